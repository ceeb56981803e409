use std::fs::File;
use std::path::PathBuf;

use coword_core::report::{CLUSTERS_FILE, GRAPH_FILE, SNAPSHOT_FILE, STRATEGIC_FILE, TRENDS_FILE};
use coword_core::{
    apply_alias_map, canonicalize_corpus, export_graph, parse_corpus, run_pipeline, AliasMap,
    AnalysisConfig, AnalysisSnapshot, Corpus, Error, Format, NormalizationRules, Stage,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/fixture")
        .join(name)
}

fn normalized_fixture() -> Corpus {
    let rules = NormalizationRules::default();
    let raw = parse_corpus(File::open(fixture("vis40.csv")).unwrap(), Format::Delimited).unwrap();
    let aliases = AliasMap::from_csv(File::open(fixture("aliases.csv")).unwrap(), &rules).unwrap();
    apply_alias_map(&canonicalize_corpus(&raw, &rules).unwrap(), &aliases)
        .unwrap()
        .with_provenance("vis40.csv")
}

fn config() -> AnalysisConfig {
    AnalysisConfig::from_toml(&std::fs::read_to_string(fixture("analysis.toml")).unwrap()).unwrap()
}

#[test]
fn fixture_pipeline_is_consistent() {
    let s = run_pipeline(&normalized_fixture(), &config()).unwrap();
    s.validate().unwrap();
    assert_eq!(s.assignment.k(), 5);
    assert_eq!(s.papers.len(), 40);
    for kw in s.keywords() {
        assert!(s.frequency.count(kw).unwrap() >= 3);
        assert!(!s.config.exclude.contains(kw));
    }
    assert_eq!(s.trends.len(), 6);
    assert!(s.trends.windows(2).all(|w| w[0].slope >= w[1].slope));
    let clustered: usize = s.metrics.iter().map(|m| m.n).sum();
    assert_eq!(clustered, s.keywords().len());
}

#[test]
fn pipeline_output_is_deterministic() {
    let c = normalized_fixture();
    let a = run_pipeline(&c, &config()).unwrap().to_json().unwrap();
    let b = run_pipeline(&c, &config()).unwrap().to_json().unwrap();
    assert_eq!(a, b);
    let back = AnalysisSnapshot::from_json(&a).unwrap();
    assert_eq!(back.to_json().unwrap(), a);
}

#[test]
fn snapshot_directory_round_trip() {
    let s = run_pipeline(&normalized_fixture(), &config()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    s.write_dir(dir.path()).unwrap();
    for f in [
        SNAPSHOT_FILE,
        CLUSTERS_FILE,
        GRAPH_FILE,
        STRATEGIC_FILE,
        TRENDS_FILE,
    ] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let back = AnalysisSnapshot::read_dir(dir.path()).unwrap();
    assert_eq!(back, s);
}

#[test]
fn graph_export_partitions_nodes_by_cluster() {
    let s = run_pipeline(&normalized_fixture(), &config()).unwrap();
    let g = export_graph(&s, 0.2);
    assert_eq!(g.nodes.len(), s.keywords().len());
    for n in &g.nodes {
        assert_eq!(Some(n.cluster), s.assignment.label_of(&n.label));
        let touching = g.edges.iter().any(|e| e.source == n.id || e.target == n.id);
        assert_eq!(n.connected, touching);
    }
    assert!(g.edges.iter().all(|e| e.weight >= 0.2));
}

#[test]
fn errors_name_the_failing_stage() {
    let mut cfg = config();
    cfg.min_occurrence = 1000;
    let err = run_pipeline(&normalized_fixture(), &cfg).unwrap_err();
    assert!(matches!(
        err,
        Error::Stage {
            stage: Stage::Matrix,
            ..
        }
    ));
    assert!(err.to_string().starts_with("matrix:"));

    let mut cfg = config();
    cfg.clusters = 500;
    let err = run_pipeline(&normalized_fixture(), &cfg).unwrap_err();
    assert!(matches!(
        err,
        Error::Stage {
            stage: Stage::Cluster,
            ..
        }
    ));
}

#[test]
fn config_rejects_unknown_keys_and_bad_pairs() {
    assert!(matches!(
        AnalysisConfig::from_toml("clustrs = 3\n"),
        Err(Error::Config(_))
    ));
    assert!(AnalysisConfig::from_toml("linkage = \"ward\"\nmetric = \"braycurtis\"\n").is_err());
    let cfg = config();
    assert_eq!(
        AnalysisConfig::from_toml(&cfg.to_toml().unwrap()).unwrap(),
        cfg
    );
}
