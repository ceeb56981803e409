//! End-to-end pipeline, the analysis snapshot and its file exports.
//!
//! A snapshot is a pure function of the corpus and the [`AnalysisConfig`];
//! every export is a pure function of the snapshot, so re-running or
//! re-exporting produces byte-identical files.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cluster::{
    agglomerate, cut_to_k, pairwise_distances, ClusterAssignment, Dendrogram, DistanceMetric,
    Linkage,
};
use crate::corpus::{
    filter_corpus, frequency_table, paper_counts, Corpus, CorpusDigest, FrequencyEntry,
    FrequencyTable, KeywordKind, Paper, YearRange,
};
use crate::error::{Error, Result, Stage, StageExt};
use crate::matrix::{
    build_doc_term_matrix, cooccurrence, correlation, CooccurrenceMatrix, CorrelationMatrix,
    MatrixExport,
};
use crate::netmetrics::{
    build_network, cluster_metrics, strategic_diagram, ClusterMetrics, KeywordNetwork,
    StrategicDiagram,
};
use crate::trends::{powerlaw_fit, rank_trends, PowerLawFit, TrendFit, TrendOptions};

pub const CONFIG_VERSION: u32 = 1;
pub const SNAPSHOT_VERSION: u32 = 1;

pub const SNAPSHOT_FILE: &str = "snapshot.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const CLUSTERS_FILE: &str = "clusters.csv";
pub const GRAPH_FILE: &str = "graph.json";
pub const STRATEGIC_FILE: &str = "strategic.json";
pub const TRENDS_FILE: &str = "trends.csv";
pub const DENDROGRAM_FILE: &str = "dendrogram.jsonl";
pub const MATRIX_FILE: &str = "matrix.json";

fn default_version() -> u32 {
    CONFIG_VERSION
}
fn default_clusters() -> usize {
    16
}
fn default_linkage() -> Linkage {
    Linkage::Ward
}
fn default_metric() -> DistanceMetric {
    DistanceMetric::SquaredEuclidean
}
fn default_trend_top() -> usize {
    15
}

/// Every knob of a pipeline run. Stored verbatim in the snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    /// Venues to keep; empty keeps every venue.
    #[serde(default)]
    pub venues: Vec<String>,
    /// Years to keep; absent keeps every year.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub years: Option<YearRange>,
    #[serde(default)]
    pub min_occurrence: usize,
    /// Keywords removed before thresholding (already canonical).
    #[serde(default)]
    pub exclude: Vec<String>,
    #[serde(default = "default_clusters")]
    pub clusters: usize,
    #[serde(default = "default_linkage")]
    pub linkage: Linkage,
    #[serde(default = "default_metric")]
    pub metric: DistanceMetric,
    #[serde(default = "default_trend_top")]
    pub trend_top: usize,
    #[serde(default)]
    pub trend_normalized: bool,
    /// Minimum correlation for edges in the graph export.
    #[serde(default)]
    pub graph_threshold: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            version: CONFIG_VERSION,
            venues: Vec::new(),
            years: None,
            min_occurrence: 0,
            exclude: Vec::new(),
            clusters: default_clusters(),
            linkage: default_linkage(),
            metric: default_metric(),
            trend_top: default_trend_top(),
            trend_normalized: false,
            graph_threshold: 0.0,
        }
    }
}

impl AnalysisConfig {
    /// Settings used for author keywords: threshold 6, four generic terms
    /// excluded, 16 clusters.
    pub fn author_preset() -> Self {
        AnalysisConfig {
            min_occurrence: 6,
            exclude: [
                "visualization",
                "information visualization",
                "scientific visualization",
                "visual analytics",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            clusters: 16,
            graph_threshold: 0.13,
            ..Default::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: AnalysisConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.clusters == 0 {
            return Err(Error::Config("clusters must be at least 1".into()));
        }
        if self.trend_top == 0 {
            return Err(Error::Config("trend_top must be at least 1".into()));
        }
        if self.graph_threshold.is_nan() || self.graph_threshold < 0.0 {
            return Err(Error::Config("graph_threshold must be non-negative".into()));
        }
        self.linkage
            .check_metric(self.metric)
            .map_err(|e| Error::Config(e.to_string()))
    }

    fn excluded(&self) -> BTreeSet<String> {
        self.exclude.iter().cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSnapshot {
    pub snapshot_version: u32,
    pub config: AnalysisConfig,
    pub provenance: String,
    pub keyword_kind: KeywordKind,
    pub digest: CorpusDigest,
    pub frequency: FrequencyTable,
    pub powerlaw: Option<PowerLawFit>,
    pub matrix: MatrixExport,
    pub cooccurrence: CooccurrenceMatrix,
    pub correlation: CorrelationMatrix,
    pub dendrogram: Dendrogram,
    pub assignment: ClusterAssignment,
    pub network: KeywordNetwork,
    pub metrics: Vec<ClusterMetrics>,
    pub strategic: StrategicDiagram,
    pub trend_years: YearRange,
    pub trends: Vec<TrendFit>,
    /// The analyzed (filtered) papers.
    pub papers: Vec<Paper>,
}

impl AnalysisSnapshot {
    /// Keywords that survived filtering, in matrix order.
    pub fn keywords(&self) -> &[String] {
        &self.matrix.keywords
    }

    /// Checks that every derived artifact covers the same keyword universe.
    pub fn validate(&self) -> Result<()> {
        let kws = self.keywords();
        let bad = |what: &str| Err(Error::Invalid(format!("snapshot {what} is inconsistent")));
        if self.papers.is_empty() || kws.is_empty() {
            return Err(Error::Invalid("snapshot is empty".into()));
        }
        if self.snapshot_version != SNAPSHOT_VERSION {
            return bad("version");
        }
        if self.matrix.cells.len() != kws.len() * self.matrix.papers.len() {
            return bad("matrix");
        }
        if self.cooccurrence.keywords() != kws || self.correlation.keywords() != kws {
            return bad("association matrices");
        }
        if self.dendrogram.leaves() != kws || self.dendrogram.merges().len() + 1 != kws.len() {
            return bad("dendrogram");
        }
        if self.assignment.keywords() != kws
            || self
                .assignment
                .labels()
                .iter()
                .any(|&l| l < 1 || l > self.assignment.k())
        {
            return bad("cluster assignment");
        }
        if self.network.nodes.len() != kws.len()
            || self
                .network
                .nodes
                .iter()
                .zip(kws)
                .any(|(n, k)| n.keyword != *k)
            || self.network.edges.iter().any(|e| {
                e.source >= e.target
                    || e.target >= kws.len()
                    || e.weight.is_nan()
                    || e.weight <= 0.0
            })
        {
            return bad("network");
        }
        if self.metrics.len() != self.assignment.k()
            || self.metrics.iter().map(|m| m.n).sum::<usize>() != kws.len()
            || self.metrics.iter().any(|m| m.n == 0)
        {
            return bad("cluster metrics");
        }
        if self.strategic.points.len() != self.metrics.len() {
            return bad("strategic diagram");
        }
        let digest = Corpus::new(self.papers.clone(), "", self.keyword_kind)?.digest();
        if digest != self.digest {
            return bad("digest");
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn corpus(&self) -> Result<Corpus> {
        Corpus::new(
            self.papers.clone(),
            self.provenance.clone(),
            self.keyword_kind,
        )
    }

    /// Writes the snapshot and every export into `dir`, creating it if needed.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(SNAPSHOT_FILE), self.to_json()?)?;
        fs::write(dir.join(CONFIG_FILE), self.config.to_toml()?)?;
        fs::write(dir.join(CLUSTERS_FILE), export_cluster_table(self)?)?;
        fs::write(
            dir.join(GRAPH_FILE),
            export_graph(self, self.config.graph_threshold).to_json()?,
        )?;
        fs::write(dir.join(STRATEGIC_FILE), export_strategic(self).to_json()?)?;
        let mut trends = Vec::new();
        crate::trends::write_trend_table(&self.trends, &mut trends)?;
        fs::write(dir.join(TRENDS_FILE), trends)?;
        let mut merges = Vec::new();
        self.dendrogram.write_merges(&mut merges)?;
        fs::write(dir.join(DENDROGRAM_FILE), merges)?;
        fs::write(dir.join(MATRIX_FILE), serde_json::to_string(&self.matrix)?)?;
        Ok(())
    }

    /// Loads and validates `dir/snapshot.json`.
    pub fn read_dir(dir: &Path) -> Result<Self> {
        let text = fs::read_to_string(dir.join(SNAPSHOT_FILE))?;
        let snap = AnalysisSnapshot::from_json(&text)?;
        snap.validate()?;
        Ok(snap)
    }
}

/// filter -> matrix -> correlation -> cluster -> network -> metrics ->
/// diagram -> trends.
pub fn run_pipeline(corpus: &Corpus, config: &AnalysisConfig) -> Result<AnalysisSnapshot> {
    config.validate().stage(Stage::Filter)?;
    let venues: BTreeSet<String> = if config.venues.is_empty() {
        corpus.venues()
    } else {
        config.venues.iter().cloned().collect()
    };
    let filtered = filter_corpus(corpus, &venues, config.years.unwrap_or_else(YearRange::all));
    let trend_years = match (config.years, filtered.year_span()) {
        (Some(y), _) => y,
        (None, Some(span)) => span,
        (None, None) => {
            return Err(Error::Invalid("no papers left after filtering".into()))
                .stage(Stage::Filter)
        }
    };

    let frequency = frequency_table(&filtered);
    let powerlaw = powerlaw_fit(&frequency).ok();

    let dtm = build_doc_term_matrix(&filtered, config.min_occurrence, &config.excluded())
        .stage(Stage::Matrix)?;
    let cooc = cooccurrence(&dtm);
    let corr = correlation(&dtm);

    let vectors: Vec<Vec<f64>> = match config.metric {
        DistanceMetric::SquaredEuclidean => corr.rows(),
        // Correlation rows can be negative; Bray-Curtis runs on co-occurrence
        // profiles instead.
        DistanceMetric::BrayCurtis => (0..cooc.len())
            .map(|i| cooc.row(i).iter().map(|&c| c as f64).collect())
            .collect(),
    };
    let dendrogram = pairwise_distances(&vectors, config.metric)
        .and_then(|d| agglomerate(&d, config.linkage))
        .and_then(|dg| dg.with_labels(dtm.keywords().to_vec()))
        .stage(Stage::Cluster)?;
    let assignment = cut_to_k(&dendrogram, config.clusters).stage(Stage::Cluster)?;

    let network = build_network(&corr, &frequency);
    let metrics =
        cluster_metrics(&network, &assignment, &cooc, &frequency).stage(Stage::Metrics)?;
    let strategic = strategic_diagram(&metrics).stage(Stage::Diagram)?;

    let trend_opts = TrendOptions {
        normalized: config.trend_normalized,
        excluded: config.excluded(),
    };
    let trends =
        rank_trends(&filtered, config.trend_top, trend_years, &trend_opts).stage(Stage::Trends)?;

    Ok(AnalysisSnapshot {
        snapshot_version: SNAPSHOT_VERSION,
        config: config.clone(),
        provenance: filtered.provenance().to_owned(),
        keyword_kind: filtered.keyword_kind(),
        digest: filtered.digest(),
        frequency,
        powerlaw,
        matrix: dtm.to_export(),
        cooccurrence: cooc,
        correlation: corr,
        dendrogram,
        assignment,
        network,
        metrics,
        strategic,
        trend_years,
        trends,
        papers: filtered.papers().to_vec(),
    })
}

/// Most frequent keywords, optionally restricted to some venues, with
/// `excluded` removed before ranking.
pub fn top_keywords(
    corpus: &Corpus,
    n: usize,
    venues: Option<&BTreeSet<String>>,
    excluded: &BTreeSet<String>,
) -> Vec<FrequencyEntry> {
    let counts = paper_counts(
        corpus
            .papers()
            .iter()
            .filter(|p| venues.is_none_or(|v| v.contains(&p.venue))),
    );
    let table =
        FrequencyTable::from_counts(counts.into_iter().filter(|(k, _)| !excluded.contains(k)));
    table.top(n).to_vec()
}

fn fmt_f(x: f64) -> String {
    format!("{x:.6}")
}

/// One row per cluster: id, member keywords by frequency, N, median
/// frequency, mean co-occurrence, centrality, density, quadrant and the two
/// most frequent members.
pub fn export_cluster_table(s: &AnalysisSnapshot) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "cluster",
        "keywords",
        "n",
        "median_freq",
        "cw_freq",
        "centrality",
        "density",
        "quadrant",
        "top_keywords",
    ])?;
    for m in &s.metrics {
        let quadrant = s
            .strategic
            .points
            .iter()
            .find(|p| p.cluster == m.cluster)
            .map(|p| p.quadrant.to_string())
            .unwrap_or_default();
        w.write_record([
            m.cluster.to_string(),
            m.members.join(";"),
            m.n.to_string(),
            fmt_f(m.median_freq),
            fmt_f(m.cw_freq),
            fmt_f(m.centrality),
            fmt_f(m.density),
            quadrant,
            m.members
                .iter()
                .take(2)
                .cloned()
                .collect::<Vec<_>>()
                .join(";"),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: usize,
    pub label: String,
    pub occurrences: usize,
    pub cluster: usize,
    /// False when no edge at the export threshold touches this node.
    pub connected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphExport {
    pub threshold: f64,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

impl GraphExport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn nodes_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "label", "occurrences", "cluster", "connected"])?;
        for n in &self.nodes {
            w.write_record([
                n.id.to_string(),
                n.label.clone(),
                n.occurrences.to_string(),
                n.cluster.to_string(),
                n.connected.to_string(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).unwrap())
    }

    pub fn edges_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["source", "target", "weight"])?;
        for e in &self.edges {
            w.write_record([e.source.to_string(), e.target.to_string(), fmt_f(e.weight)])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).unwrap())
    }
}

/// Node-link graph of the keyword network with edges of weight at least
/// `min_weight`. Every retained keyword is listed so node clusters stay a
/// partition; renderers hide nodes with `connected == false`.
pub fn export_graph(s: &AnalysisSnapshot, min_weight: f64) -> GraphExport {
    let edges: Vec<GraphEdge> = s
        .network
        .edges
        .iter()
        .filter(|e| e.weight >= min_weight)
        .map(|e| GraphEdge {
            source: e.source,
            target: e.target,
            weight: e.weight,
        })
        .collect();
    let mut connected = vec![false; s.network.nodes.len()];
    for e in &edges {
        connected[e.source] = true;
        connected[e.target] = true;
    }
    let nodes = s
        .network
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| GraphNode {
            id: i,
            label: n.keyword.clone(),
            occurrences: n.occurrences,
            cluster: s.assignment.label(i),
            connected: connected[i],
        })
        .collect();
    GraphExport {
        threshold: min_weight,
        nodes,
        edges,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategicRow {
    pub cluster: usize,
    pub centrality: f64,
    pub density: f64,
    pub quadrant: crate::netmetrics::Quadrant,
    pub theme: String,
    pub margin_centrality: f64,
    pub margin_density: f64,
    pub top_keywords: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategicExport {
    pub median_centrality: f64,
    pub median_density: f64,
    pub points: Vec<StrategicRow>,
}

impl StrategicExport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "cluster",
            "centrality",
            "density",
            "quadrant",
            "margin_centrality",
            "margin_density",
            "median_centrality",
            "median_density",
        ])?;
        for p in &self.points {
            w.write_record([
                p.cluster.to_string(),
                fmt_f(p.centrality),
                fmt_f(p.density),
                p.quadrant.to_string(),
                fmt_f(p.margin_centrality),
                fmt_f(p.margin_density),
                fmt_f(self.median_centrality),
                fmt_f(self.median_density),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).unwrap())
    }
}

/// Strategic diagram data including the two median lines.
pub fn export_strategic(s: &AnalysisSnapshot) -> StrategicExport {
    let points = s
        .strategic
        .points
        .iter()
        .map(|p| StrategicRow {
            cluster: p.cluster,
            centrality: p.x,
            density: p.y,
            quadrant: p.quadrant,
            theme: p.quadrant.description().to_owned(),
            margin_centrality: p.margin.0,
            margin_density: p.margin.1,
            top_keywords: s
                .metrics
                .iter()
                .find(|m| m.cluster == p.cluster)
                .map(|m| m.members.iter().take(2).cloned().collect())
                .unwrap_or_default(),
        })
        .collect();
    StrategicExport {
        median_centrality: s.strategic.median_centrality,
        median_density: s.strategic.median_density,
        points,
    }
}

/// Writes the top-keyword table as `rank,keyword,count`.
pub fn write_top_keywords<W: Write>(entries: &[FrequencyEntry], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "keyword", "count"])?;
    for (i, e) in entries.iter().enumerate() {
        w.write_record([(i + 1).to_string(), e.keyword.clone(), e.count.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
