use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use coword_core::{
    agglomerate, apply_alias_map, canonicalize_corpus, correlation, keyword_trend, linear_trend,
    pairwise_distances, parse_corpus, powerlaw_fit_points, run_pipeline, strategic_diagram,
    AliasMap, AnalysisConfig, AnalysisSnapshot, ClusterMetrics, DistanceMetric, DocTermMatrix,
    Format, Linkage, NormalizationRules, TrendOptions,
};
use coword_oracles::{naive_agglomerate, NaiveLinkage};
use coword_service::{router, QueryIndex, SnapshotStore};
use http_body_util::BodyExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tower::ServiceExt;

type Check = Result<(), String>;
type Criterion = (&'static str, Box<dyn FnOnce() -> Outcome>);

enum Outcome {
    Pass,
    Fail(String),
    Skip(String),
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> PathBuf {
    root().join("data/fixture").join(name)
}

fn within(started: Instant, limit: Duration) -> Check {
    let took = started.elapsed();
    ensure!(took < limit, "took {took:.2?}, limit {limit:?}");
    Ok(())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn clustering_oracle() -> Check {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2014);
    for case in 0..200 {
        let n = rng.gen_range(2..=15);
        let dim = rng.gen_range(1..=6);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.gen_range(0.0..10.0)).collect())
            .collect();
        let d = pairwise_distances(&pts, DistanceMetric::SquaredEuclidean)
            .map_err(|e| e.to_string())?;
        let dense: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| d.get(i, j)).collect())
            .collect();
        for (linkage, naive) in [
            (Linkage::Ward, NaiveLinkage::Ward),
            (Linkage::Average, NaiveLinkage::Average),
        ] {
            let dg = agglomerate(&d, linkage).map_err(|e| e.to_string())?;
            let want = naive_agglomerate(&dense, naive);
            ensure!(
                dg.merges().len() == want.len(),
                "case {case}: merge count differs"
            );
            for (step, (m, &(l, r, h, id))) in dg.merges().iter().zip(&want).enumerate() {
                ensure!(
                    (m.left, m.right, m.id) == (l, r, id),
                    "case {case} {linkage:?} step {step}: merged ({}, {}) not ({l}, {r})",
                    m.left,
                    m.right
                );
                ensure!(
                    (m.height - h).abs() <= 1e-9 * h.abs().max(1.0),
                    "case {case} {linkage:?} step {step}: height {} vs {h}",
                    m.height
                );
            }
        }
    }
    within(started, Duration::from_secs(10))
}

fn correlation_suite() -> Check {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let build = |rows: Vec<Vec<u8>>| {
        let keywords = (0..rows.len()).map(|i| format!("k{i:02}")).collect();
        let papers = (0..rows[0].len()).map(|j| format!("p{j:02}")).collect();
        DocTermMatrix::from_rows(keywords, papers, rows).map_err(|e| e.to_string())
    };
    for case in 0..1000 {
        let k = rng.gen_range(2..=12);
        let p = rng.gen_range(2..=10);
        let density = rng.gen_range(0.1..0.9);
        let rows: Vec<Vec<u8>> = (0..k)
            .map(|_| (0..p).map(|_| rng.gen_bool(density) as u8).collect())
            .collect();
        let r = correlation(&build(rows.clone())?);
        for i in 0..k {
            ensure!(r.get(i, i) == 1.0, "case {case}: diagonal {}", r.get(i, i));
            for j in 0..k {
                let v = r.get(i, j);
                ensure!(v == r.get(j, i), "case {case}: asymmetric at ({i}, {j})");
                ensure!((-1.0..=1.0).contains(&v), "case {case}: {v} out of range");
                if i != j {
                    let a: Vec<f64> = rows[i].iter().map(|&x| x as f64).collect();
                    let b: Vec<f64> = rows[j].iter().map(|&x| x as f64).collect();
                    let want = coword_oracles::pearson(&a, &b).unwrap_or(0.0);
                    ensure!((v - want).abs() <= 1e-12, "case {case}: {v} vs {want}");
                }
            }
        }
        let mut cols: Vec<usize> = (0..p).collect();
        cols.reverse();
        cols.rotate_left(rng.gen_range(0..p));
        let permuted = rows
            .iter()
            .map(|row| cols.iter().map(|&c| row[c]).collect())
            .collect();
        let r2 = correlation(&build(permuted)?);
        for i in 0..k {
            for j in 0..k {
                ensure!(
                    (r.get(i, j) - r2.get(i, j)).abs() <= 1e-12,
                    "case {case}: column permutation changed ({i}, {j})"
                );
            }
        }
    }
    within(started, Duration::from_secs(5))
}

fn metric_formulas() -> Check {
    let distance = |u: &[f64], v: &[f64], metric| -> Result<f64, String> {
        let d = pairwise_distances(&[u.to_vec(), v.to_vec()], metric).map_err(|e| e.to_string())?;
        Ok(d.get(0, 1))
    };
    let bc = distance(
        &[1.0, 0.0, 1.0],
        &[0.0, 1.0, 1.0],
        DistanceMetric::BrayCurtis,
    )?;
    ensure!(bc == 0.5, "Bray-Curtis gave {bc}");
    let cases: [(&[f64], &[f64], f64); 4] = [
        (&[0.0, 0.0], &[3.0, 4.0], 25.0),
        (&[1.0, 0.0, 1.0], &[0.0, 1.0, 1.0], 2.0),
        (&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 0.0),
        (&[-1.0, 0.5], &[2.0, -1.5], 13.0),
    ];
    for (u, v, want) in cases {
        let got = distance(u, v, DistanceMetric::SquaredEuclidean)?;
        ensure!(
            got == want,
            "squared Euclidean {u:?} {v:?} gave {got}, want {want}"
        );
    }
    Ok(())
}

fn trend_statistics() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2013);
    for case in 0..500 {
        let n = rng.gen_range(3..=20);
        let start = rng.gen_range(1990..2010);
        let years: Vec<i64> = (start..start + n as i64).collect();
        let base = rng.gen_range(0..30);
        let drift = rng.gen_range(-3..=3);
        let counts: Vec<i64> = (0..n as i64)
            .map(|i| (base + drift * i + rng.gen_range(-5..=5)).max(0))
            .collect();
        let series: Vec<(i32, f64)> = years
            .iter()
            .zip(&counts)
            .map(|(&y, &c)| (y as i32, c as f64))
            .collect();
        let got = linear_trend(&series).map_err(|e| e.to_string())?;
        let (slope, se, p) = coword_oracles::ols_t_test(&years, &counts);
        ensure!(
            close(got.slope, slope, 1e-9),
            "case {case}: slope {} vs {slope}",
            got.slope
        );
        ensure!(
            close(got.stderr, se, 1e-9),
            "case {case}: stderr {} vs {se}",
            got.stderr
        );
        ensure!(
            (got.p_value - p).abs() <= 1e-9,
            "case {case}: p {} vs {p}",
            got.p_value
        );
    }
    let flat: Vec<(i32, f64)> = (2004..2014).map(|y| (y, 7.0)).collect();
    let t = linear_trend(&flat).map_err(|e| e.to_string())?;
    ensure!(t.p_value == 1.0, "constant series gave p {}", t.p_value);
    let line: Vec<(i32, f64)> = (2004..2014)
        .map(|y| (y, 3.0 * (y - 2004) as f64 + 2.0))
        .collect();
    let t = linear_trend(&line).map_err(|e| e.to_string())?;
    ensure!(
        t.stderr == 0.0 && t.p_value == 0.0,
        "exact line gave SE {} p {}",
        t.stderr,
        t.p_value
    );
    Ok(())
}

fn power_law_recovery() -> Check {
    for step in 0..=25 {
        let alpha = 0.5 + step as f64 * 0.1;
        let points: Vec<(f64, f64)> = (1..=200)
            .map(|r| (r as f64, 1e12 * (r as f64).powf(-alpha)))
            .collect();
        let fit = powerlaw_fit_points(&points).map_err(|e| e.to_string())?;
        ensure!(
            (fit.alpha - alpha).abs() <= 1e-6,
            "planted {alpha}, got {}",
            fit.alpha
        );
        ensure!(
            (fit.r_squared - 1.0).abs() <= 1e-12,
            "planted {alpha}, R² {}",
            fit.r_squared
        );
    }
    Ok(())
}

fn strategic_quadrants() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in 0..100 {
        let n: usize = rng.gen_range(1..=16);
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                (
                    rng.gen_range(0..6) as f64 / 4.0,
                    rng.gen_range(0..6) as f64 / 8.0,
                )
            })
            .collect();
        let metrics: Vec<ClusterMetrics> = pts
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| ClusterMetrics {
                cluster: i + 1,
                members: vec![format!("k{i}")],
                n: 1,
                median_freq: 1.0,
                cw_freq: 0.0,
                density: y,
                centrality: x,
            })
            .collect();
        let sd = strategic_diagram(&metrics).map_err(|e| e.to_string())?;
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let (mx, my) = (coword_oracles::median(&xs), coword_oracles::median(&ys));
        ensure!(
            (sd.median_centrality, sd.median_density) == (mx, my),
            "case {case}: medians ({}, {}) vs ({mx}, {my})",
            sd.median_centrality,
            sd.median_density
        );
        for (p, &(x, y)) in sd.points.iter().zip(&pts) {
            let want = match (x > mx, y > my) {
                (true, true) => "motor",
                (true, false) => "basic/transversal",
                (false, true) => "developed/isolated",
                (false, false) => "emerging/declining",
            };
            ensure!(
                p.quadrant.description() == want,
                "case {case}: cluster {} misplaced",
                p.cluster
            );
        }
        let half = n.div_ceil(2);
        let high_x = sd
            .points
            .iter()
            .filter(|p| p.x > sd.median_centrality)
            .count();
        let high_y = sd.points.iter().filter(|p| p.y > sd.median_density).count();
        ensure!(
            high_x <= half && high_y <= half,
            "case {case}: {high_x}/{high_y} high of {n}"
        );
    }
    Ok(())
}

fn end_to_end_determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut trees = Vec::new();
    for run in ["a", "b"] {
        let snap = tmp.path().join(run);
        let exported = tmp.path().join(format!("{run}-export"));
        let config = fixture("analysis.toml");
        let corpus = fixture("vis40.csv");
        let steps: [Vec<&str>; 2] = [
            vec![
                "analyze",
                path_str(&corpus)?,
                "--config",
                path_str(&config)?,
                "--out",
                path_str(&snap)?,
            ],
            vec![
                "export",
                "--snapshot",
                path_str(&snap)?,
                "--out",
                path_str(&exported)?,
            ],
        ];
        for args in steps {
            let out = Command::new(env!("CARGO_BIN_EXE_coword"))
                .args(&args)
                .output()
                .map_err(|e| e.to_string())?;
            ensure!(
                out.status.success(),
                "{args:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
        }
        trees.push((read_tree(&snap)?, read_tree(&exported)?));
    }
    ensure!(!trees[0].0.is_empty(), "analyze wrote no files");
    for (name, bytes) in &trees[0].0 {
        ensure!(
            trees[1].0.get(name) == Some(bytes),
            "snapshot file {name} differs between runs"
        );
    }
    ensure!(trees[0] == trees[1], "export files differ between runs");
    Ok(())
}

fn path_str(p: &Path) -> Result<&str, String> {
    p.to_str()
        .ok_or_else(|| format!("non-UTF-8 path {}", p.display()))
}

fn read_tree(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| e.to_string())? {
        let entry = entry.map_err(|e| e.to_string())?;
        let bytes = fs::read(entry.path()).map_err(|e| e.to_string())?;
        files.insert(entry.file_name().to_string_lossy().into_owned(), bytes);
    }
    Ok(files)
}

/// The published author-keyword corpus, when `KEYVIS_CORPUS` names it.
/// `KEYVIS_ALIASES` optionally names an alias map to apply first.
fn published_corpus() -> Option<Result<(), String>> {
    let path = PathBuf::from(std::env::var_os("KEYVIS_CORPUS")?);
    Some(check_published(&path))
}

fn check_published(path: &Path) -> Check {
    let started = Instant::now();
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let raw = parse_corpus(file, Format::from_path(path)).map_err(|e| e.to_string())?;
    let rules = NormalizationRules::default();
    let mut corpus = canonicalize_corpus(&raw, &rules).map_err(|e| e.to_string())?;
    if let Some(aliases) = std::env::var_os("KEYVIS_ALIASES") {
        let file = File::open(&aliases).map_err(|e| e.to_string())?;
        let map = AliasMap::from_csv(file, &rules).map_err(|e| e.to_string())?;
        corpus = apply_alias_map(&corpus, &map).map_err(|e| e.to_string())?;
    }

    let mut problems = Vec::new();
    let d = corpus.digest();
    if (d.papers, d.unique_keywords, d.occurrences) != (1039, 2629, 4780) {
        problems.push(format!(
            "digest {} papers / {} keywords / {} occurrences, want 1039 / 2629 / 4780",
            d.papers, d.unique_keywords, d.occurrences
        ));
    }

    let config = AnalysisConfig::author_preset();
    let snap = run_pipeline(&corpus, &config).map_err(|e| e.to_string())?;
    match snap.powerlaw {
        Some(fit) if (fit.alpha - 1.66).abs() <= 0.05 && (fit.r_squared - 0.80).abs() <= 0.05 => {}
        Some(fit) => problems.push(format!(
            "power law alpha {:.3} R² {:.3}",
            fit.alpha, fit.r_squared
        )),
        None => problems.push("no power-law fit".into()),
    }

    let opts = TrendOptions::default();
    let years = snap.trend_years;
    for (keyword, slope, tol, max_p) in [
        ("interaction", 0.59, 0.02, 0.01),
        ("flow visualization", -0.82, 0.03, 0.02),
    ] {
        match keyword_trend(&corpus, keyword, years, &opts) {
            Ok(t) if (t.slope - slope).abs() <= tol && t.p_value <= max_p => {}
            Ok(t) => problems.push(format!(
                "{keyword}: slope {:.3} p {:.4}",
                t.slope, t.p_value
            )),
            Err(e) => problems.push(format!("{keyword}: {e}")),
        }
    }

    let retained = snap.keywords().len();
    if retained != 101 {
        problems.push(format!("{retained} retained keywords, want 101"));
    }

    for (a, b) in [
        ("graph visualization", "clustering"),
        ("flow visualization", "vector fields"),
    ] {
        let (ca, cb) = (snap.assignment.label_of(a), snap.assignment.label_of(b));
        let quadrant = ca.and_then(|c| snap.strategic.points.iter().find(|p| p.cluster == c));
        match (ca, cb, quadrant) {
            (Some(x), Some(y), Some(p)) if x == y && p.quadrant.to_string() == "I" => {}
            _ => problems.push(format!("({a}, {b}) not together in a quadrant I cluster")),
        }
    }

    if let Err(e) = within(started, Duration::from_secs(60)) {
        problems.push(e);
    }
    ensure!(problems.is_empty(), "{}", problems.join("; "));
    Ok(())
}

fn fixture_snapshot(clusters: usize) -> Result<AnalysisSnapshot, String> {
    let rules = NormalizationRules::default();
    let file = File::open(fixture("vis40.csv")).map_err(|e| e.to_string())?;
    let raw = parse_corpus(file, Format::Delimited).map_err(|e| e.to_string())?;
    let aliases = AliasMap::from_csv(
        File::open(fixture("aliases.csv")).map_err(|e| e.to_string())?,
        &rules,
    )
    .map_err(|e| e.to_string())?;
    let corpus = apply_alias_map(
        &canonicalize_corpus(&raw, &rules).map_err(|e| e.to_string())?,
        &aliases,
    )
    .map_err(|e| e.to_string())?;
    let text = fs::read_to_string(fixture("analysis.toml")).map_err(|e| e.to_string())?;
    let mut config = AnalysisConfig::from_toml(&text).map_err(|e| e.to_string())?;
    config.clusters = clusters;
    run_pipeline(&corpus, &config).map_err(|e| e.to_string())
}

fn app_for(snapshot: AnalysisSnapshot) -> Result<(Arc<SnapshotStore>, Router), String> {
    let store = Arc::new(SnapshotStore::new(
        QueryIndex::new(snapshot).map_err(|e| e.to_string())?,
    ));
    let app = router(store.clone(), None);
    Ok((store, app))
}

async fn fetch(app: &Router, uri: &str) -> Result<(StatusCode, Vec<u8>), String> {
    let req = Request::get(uri)
        .body(Body::empty())
        .map_err(|e| e.to_string())?;
    let resp = app.clone().oneshot(req).await.map_err(|e| e.to_string())?;
    let status = resp.status();
    let body = resp
        .into_body()
        .collect()
        .await
        .map_err(|e| e.to_string())?
        .to_bytes()
        .to_vec();
    Ok((status, body))
}

fn schema(name: &str) -> Result<jsonschema::Validator, String> {
    let path = root()
        .join("crates/service/schemas")
        .join(format!("{name}.json"));
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    jsonschema::validator_for(&value).map_err(|e| e.to_string())
}

fn encode(keyword: &str) -> String {
    keyword
        .replace('%', "%25")
        .replace(' ', "%20")
        .replace('/', "%2F")
}

async fn service_contract() -> Check {
    let (_, app) = app_for(fixture_snapshot(5)?)?;

    let mut targets: Vec<(String, &str, StatusCode)> =
        ["meta", "strategic", "clusters", "papers", "keywords"]
            .iter()
            .map(|n| (format!("/api/v1/{n}"), *n, StatusCode::OK))
            .collect();
    targets.push((
        "/api/v1/keywords?q=vis&offset=1&limit=3".into(),
        "keywords",
        StatusCode::OK,
    ));
    let (_, body) = fetch(&app, "/api/v1/clusters").await?;
    let clusters: Value = serde_json::from_slice(&body).map_err(|e| e.to_string())?;
    for c in clusters["clusters"].as_array().into_iter().flatten() {
        targets.push((
            format!("/api/v1/clusters/{}", c["id"]),
            "cluster",
            StatusCode::OK,
        ));
    }
    let (_, body) = fetch(&app, "/api/v1/keywords?limit=10000").await?;
    let keywords: Value = serde_json::from_slice(&body).map_err(|e| e.to_string())?;
    let names: BTreeSet<String> = keywords["items"]
        .as_array()
        .into_iter()
        .flatten()
        .filter_map(|h| h["keyword"].as_str().map(str::to_owned))
        .collect();
    ensure!(!names.is_empty(), "no keywords listed");
    for k in &names {
        let k = encode(k);
        targets.push((format!("/api/v1/keywords/{k}"), "keyword", StatusCode::OK));
        targets.push((
            format!("/api/v1/keywords/{k}/cooccurring"),
            "cooccurring",
            StatusCode::OK,
        ));
        targets.push((
            format!("/api/v1/keywords/{k}/trend"),
            "trend",
            StatusCode::OK,
        ));
        targets.push((
            format!("/api/v1/papers?keyword={k}"),
            "papers",
            StatusCode::OK,
        ));
    }
    for uri in [
        "/api/v1/keywords/no%20such%20keyword",
        "/api/v1/keywords/no%20such%20keyword/trend",
        "/api/v1/keywords/no%20such%20keyword/cooccurring",
        "/api/v1/papers?keyword=no%20such%20keyword",
        "/api/v1/clusters/999",
        "/api/v1/clusters/abc",
        "/api/v1/nothing",
    ] {
        targets.push((uri.into(), "error", StatusCode::NOT_FOUND));
    }

    let mut validators = BTreeMap::new();
    for (uri, name, want) in &targets {
        if !validators.contains_key(name) {
            validators.insert(*name, schema(name)?);
        }
        let (status, first) = fetch(&app, uri).await?;
        ensure!(status == *want, "{uri}: status {status}, want {want}");
        let (_, second) = fetch(&app, uri).await?;
        ensure!(
            first == second,
            "{uri}: repeated request gave a different body"
        );
        let value: Value = serde_json::from_slice(&first).map_err(|e| format!("{uri}: {e}"))?;
        let errors: Vec<String> = validators[name]
            .iter_errors(&value)
            .map(|e| e.to_string())
            .collect();
        ensure!(errors.is_empty(), "{uri}: {errors:?}");
    }

    let (a, b) = (fixture_snapshot(5)?, fixture_snapshot(3)?);
    let uris = ["/api/v1/clusters", "/api/v1/meta", "/api/v1/strategic"];
    let mut expected = Vec::new();
    for snap in [&a, &b] {
        let (_, one) = app_for(snap.clone())?;
        let mut bodies = Vec::new();
        for uri in uris {
            bodies.push(fetch(&one, uri).await?.1);
        }
        expected.push(bodies);
    }
    ensure!(
        expected[0] != expected[1],
        "swap snapshots are indistinguishable"
    );
    let (store, app) = app_for(a.clone())?;
    let swapper = tokio::task::spawn_blocking(move || -> Check {
        for i in 0..200 {
            let next = if i % 2 == 0 { b.clone() } else { a.clone() };
            store.swap(QueryIndex::new(next).map_err(|e| e.to_string())?);
        }
        Ok(())
    });
    let mut reads = Vec::new();
    for i in 0..1000 {
        let app = app.clone();
        reads.push(tokio::spawn(async move {
            (i % 3, fetch(&app, uris[i % 3]).await)
        }));
    }
    for read in reads {
        let (u, result) = read.await.map_err(|e| e.to_string())?;
        let (status, body) = result?;
        ensure!(
            status == StatusCode::OK,
            "{}: status {status} during swap",
            uris[u]
        );
        ensure!(
            body == expected[0][u] || body == expected[1][u],
            "{}: body matches neither snapshot",
            uris[u]
        );
    }
    swapper.await.map_err(|e| e.to_string())??;
    Ok(())
}

fn run_service_contract() -> Check {
    tokio::runtime::Builder::new_multi_thread()
        .worker_threads(4)
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?
        .block_on(service_contract())
}

fn outcome(check: Check) -> Outcome {
    match check {
        Ok(()) => Outcome::Pass,
        Err(e) => Outcome::Fail(e),
    }
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (
            "clustering oracle equivalence",
            Box::new(|| outcome(clustering_oracle())),
        ),
        (
            "correlation suite",
            Box::new(|| outcome(correlation_suite())),
        ),
        ("metric formulas", Box::new(|| outcome(metric_formulas()))),
        ("trend statistics", Box::new(|| outcome(trend_statistics()))),
        (
            "power-law recovery",
            Box::new(|| outcome(power_law_recovery())),
        ),
        (
            "strategic quadrants",
            Box::new(|| outcome(strategic_quadrants())),
        ),
        (
            "end-to-end determinism",
            Box::new(|| outcome(end_to_end_determinism())),
        ),
        (
            "published corpus reproduction",
            Box::new(|| match published_corpus() {
                Some(check) => outcome(check),
                None => {
                    Outcome::Skip("set KEYVIS_CORPUS to the published author-keyword corpus".into())
                }
            }),
        ),
        (
            "service contract",
            Box::new(|| outcome(run_service_contract())),
        ),
    ];

    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let result = check();
        let took = started.elapsed();
        match result {
            Outcome::Pass => println!("PASS {name} ({took:.2?})"),
            Outcome::Skip(why) => println!("SKIP {name}: {why}"),
            Outcome::Fail(why) => {
                failed += 1;
                println!("FAIL {name} ({took:.2?}): {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
