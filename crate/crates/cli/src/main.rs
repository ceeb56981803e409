use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use coword_core::report::write_top_keywords;
use coword_core::{
    apply_alias_map, apply_code_map, canonicalize_corpus, consensus_dendrogram, consensus_matrix,
    export_cluster_table, export_graph, export_strategic, frequency_table, parse_corpus,
    rank_trends, run_pipeline, top_keywords, write_corpus, AliasMap, AnalysisConfig,
    AnalysisSnapshot, CodeMap, CodingMode, Corpus, DistanceMetric, Format, Linkage,
    NormalizationRules, TrendOptions, YearRange,
};

#[derive(Parser)]
#[command(
    name = "coword",
    version,
    about = "Co-word analysis of publication keywords"
)]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CorpusFormat {
    Csv,
    Jsonl,
}

impl From<CorpusFormat> for Format {
    fn from(f: CorpusFormat) -> Format {
        match f {
            CorpusFormat::Csv => Format::Delimited,
            CorpusFormat::Jsonl => Format::Records,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a corpus file, print its digest and optionally
    /// store it as JSON lines.
    Ingest {
        corpus: PathBuf,
        #[arg(long, value_enum)]
        format: Option<CorpusFormat>,
        /// Where to write the validated corpus.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonicalize keywords and apply an alias map and/or a code map.
    Normalize {
        corpus: PathBuf,
        #[arg(long, value_enum)]
        format: Option<CorpusFormat>,
        /// `raw,canonical` table.
        #[arg(long)]
        alias: Option<PathBuf>,
        /// `keyword,codes,coder_id` table.
        #[arg(long)]
        codes: Option<PathBuf>,
        /// Coder whose codes replace the keywords; required when the code
        /// table has several coders.
        #[arg(long)]
        coder: Option<String>,
        /// Drop unmapped keywords instead of failing.
        #[arg(long)]
        lenient: bool,
        /// Write the coder consensus matrix and its dendrogram here.
        #[arg(long)]
        consensus: Option<PathBuf>,
        /// Output corpus; the extension picks the format.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full analysis and write a snapshot directory.
    Analyze {
        corpus: PathBuf,
        #[arg(long, value_enum)]
        format: Option<CorpusFormat>,
        /// TOML configuration; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Start from the author-keyword settings (threshold 6, 16 clusters).
        #[arg(long, conflicts_with = "config")]
        author_preset: bool,
        #[arg(long)]
        min_occurrence: Option<usize>,
        /// Keyword to drop before thresholding; repeatable.
        #[arg(long)]
        exclude: Vec<String>,
        #[arg(long)]
        clusters: Option<usize>,
        /// `ward` or `average`.
        #[arg(long)]
        linkage: Option<Linkage>,
        /// `sqeuclidean` or `braycurtis`.
        #[arg(long)]
        metric: Option<DistanceMetric>,
        /// `2004-2013` or a single year.
        #[arg(long)]
        years: Option<YearRange>,
        /// Comma-separated venue list.
        #[arg(long, value_delimiter = ',')]
        venues: Vec<String>,
        #[arg(long)]
        trend_top: Option<usize>,
        #[arg(long)]
        graph_threshold: Option<f64>,
        /// Snapshot directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank the most frequent keywords of a snapshot by linear trend.
    Trends {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, default_value_t = 15)]
        top: usize,
        /// Defaults to the snapshot's trend years.
        #[arg(long)]
        years: Option<YearRange>,
        /// Fit per-year shares instead of raw counts.
        #[arg(long)]
        normalized: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write cluster, graph, strategic, trend and top-keyword tables.
    Export {
        #[arg(long)]
        snapshot: PathBuf,
        /// Minimum correlation for graph edges; defaults to the snapshot config.
        #[arg(long)]
        graph_threshold: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: ExportFormat,
        #[arg(long, default_value_t = 50)]
        top: usize,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the query API over a snapshot directory. SIGHUP reloads it.
    Serve {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        /// Directory with the built web UI, served at `/`.
        #[arg(long)]
        ui: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Ingest {
            corpus,
            format,
            out,
        } => ingest(&corpus, format, out.as_deref()),
        Command::Normalize {
            corpus,
            format,
            alias,
            codes,
            coder,
            lenient,
            consensus,
            out,
        } => normalize(
            &read_corpus(&corpus, format)?,
            alias.as_deref(),
            codes.as_deref(),
            coder.as_deref(),
            lenient,
            consensus.as_deref(),
            &out,
        ),
        Command::Analyze {
            corpus,
            format,
            config,
            author_preset,
            min_occurrence,
            exclude,
            clusters,
            linkage,
            metric,
            years,
            venues,
            trend_top,
            graph_threshold,
            out,
        } => {
            let mut cfg = match (&config, author_preset) {
                (Some(path), _) => AnalysisConfig::from_toml(
                    &fs::read_to_string(path)
                        .with_context(|| format!("config: reading {}", path.display()))?,
                )
                .with_context(|| path.display().to_string())?,
                (None, true) => AnalysisConfig::author_preset(),
                (None, false) => AnalysisConfig::default(),
            };
            if let Some(v) = min_occurrence {
                cfg.min_occurrence = v;
            }
            if !exclude.is_empty() {
                cfg.exclude = exclude;
            }
            if let Some(v) = clusters {
                cfg.clusters = v;
            }
            if let Some(v) = linkage {
                cfg.linkage = v;
            }
            if let Some(v) = metric {
                cfg.metric = v;
            }
            if years.is_some() {
                cfg.years = years;
            }
            if !venues.is_empty() {
                cfg.venues = venues;
            }
            if let Some(v) = trend_top {
                cfg.trend_top = v;
            }
            if let Some(v) = graph_threshold {
                cfg.graph_threshold = v;
            }
            cfg.validate()?;
            analyze(&read_corpus(&corpus, format)?, &cfg, &out)
        }
        Command::Trends {
            snapshot,
            top,
            years,
            normalized,
            out,
        } => trends(&snapshot, top, years, normalized, out.as_deref()),
        Command::Export {
            snapshot,
            graph_threshold,
            format,
            top,
            out,
        } => export(&snapshot, graph_threshold, format, top, &out),
        Command::Serve {
            snapshot,
            port,
            bind,
            ui,
        } => serve(&snapshot, &bind, port, ui),
    }
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn read_corpus(path: &Path, format: Option<CorpusFormat>) -> Result<Corpus> {
    let format = format
        .map(Format::from)
        .unwrap_or_else(|| Format::from_path(path));
    let file = File::open(path).with_context(|| format!("ingest: opening {}", path.display()))?;
    let corpus = parse_corpus(io::BufReader::new(file), format)
        .with_context(|| format!("ingest: {}", path.display()))?;
    Ok(if corpus.provenance().is_empty() {
        corpus.with_provenance(file_name(path))
    } else {
        corpus
    })
}

fn write_corpus_file(corpus: &Corpus, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    write_corpus(corpus, &mut out, Format::from_path(path))?;
    out.flush()?;
    Ok(())
}

fn ingest(path: &Path, format: Option<CorpusFormat>, out: Option<&Path>) -> Result<()> {
    let corpus = read_corpus(path, format)?;
    let digest = corpus.digest();
    println!("{}", serde_json::to_string_pretty(&digest)?);
    for p in corpus.flagged() {
        log::warn!("paper {} has no keywords", p.id);
    }
    if let Some(out) = out {
        write_corpus_file(&corpus, out).context("ingest")?;
    }
    Ok(())
}

fn normalize(
    corpus: &Corpus,
    alias: Option<&Path>,
    codes: Option<&Path>,
    coder: Option<&str>,
    lenient: bool,
    consensus: Option<&Path>,
    out: &Path,
) -> Result<()> {
    let rules = NormalizationRules::default();
    let mut corpus = canonicalize_corpus(corpus, &rules).context("normalize")?;
    if let Some(path) = alias {
        let file =
            File::open(path).with_context(|| format!("normalize: opening {}", path.display()))?;
        let map = AliasMap::from_csv(file, &rules)
            .with_context(|| format!("normalize: {}", path.display()))?;
        corpus = apply_alias_map(&corpus, &map).context("normalize")?;
    }
    if let Some(path) = codes {
        let file =
            File::open(path).with_context(|| format!("normalize: opening {}", path.display()))?;
        let maps = CodeMap::read_csv(file, &rules)
            .with_context(|| format!("normalize: {}", path.display()))?;
        if let Some(target) = consensus {
            let keywords: Vec<String> = frequency_table(&corpus).to_map().into_keys().collect();
            let indicators: Vec<_> = maps.iter().map(|m| m.indicator(&keywords)).collect();
            let cm = consensus_matrix(&indicators).context("normalize")?;
            let tree = consensus_dendrogram(&cm).context("normalize")?;
            let body = serde_json::json!({ "matrix": cm, "dendrogram": tree });
            fs::write(target, serde_json::to_string_pretty(&body)? + "\n")
                .with_context(|| format!("writing {}", target.display()))?;
        }
        let map = match (coder, maps.as_slice()) {
            (None, [only]) => only,
            (None, _) => bail!(
                "normalize: code table has {} coders, pick one with --coder",
                maps.len()
            ),
            (Some(id), _) => maps
                .iter()
                .find(|m| m.coder_id() == id)
                .with_context(|| format!("normalize: no coder `{id}` in {}", path.display()))?,
        };
        let mode = if lenient {
            CodingMode::Lenient
        } else {
            CodingMode::Strict
        };
        let (coded, report) = apply_code_map(&corpus, map, mode).context("normalize")?;
        for (k, n) in &report.dropped {
            log::warn!("dropped unmapped keyword `{k}` ({n} occurrence(s))");
        }
        corpus = coded;
    } else if consensus.is_some() {
        bail!("normalize: --consensus needs --codes");
    }
    write_corpus_file(&corpus, out).context("normalize")
}

fn analyze(corpus: &Corpus, cfg: &AnalysisConfig, out: &Path) -> Result<()> {
    let snapshot = run_pipeline(corpus, cfg)?;
    snapshot
        .write_dir(out)
        .with_context(|| format!("writing snapshot to {}", out.display()))?;
    log::info!(
        "{} keywords in {} clusters written to {}",
        snapshot.keywords().len(),
        snapshot.assignment.k(),
        out.display()
    );
    Ok(())
}

fn load_snapshot(dir: &Path) -> Result<AnalysisSnapshot> {
    AnalysisSnapshot::read_dir(dir).with_context(|| format!("snapshot: {}", dir.display()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn trends(
    dir: &Path,
    top: usize,
    years: Option<YearRange>,
    normalized: bool,
    out: Option<&Path>,
) -> Result<()> {
    let snapshot = load_snapshot(dir)?;
    let opts = TrendOptions {
        normalized,
        excluded: snapshot.config.exclude.iter().cloned().collect(),
    };
    let years = years.unwrap_or(snapshot.trend_years);
    let fits = rank_trends(&snapshot.corpus()?, top, years, &opts).context("trends")?;
    let mut w = output(out)?;
    coword_core::trends::write_trend_table(&fits, &mut w)?;
    w.flush()?;
    Ok(())
}

fn export(
    dir: &Path,
    threshold: Option<f64>,
    format: ExportFormat,
    top: usize,
    out: &Path,
) -> Result<()> {
    let s = load_snapshot(dir)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let write = |name: &str, text: &str| -> Result<()> {
        let path = out.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    };
    let threshold = threshold.unwrap_or(s.config.graph_threshold);
    if threshold.is_nan() || threshold < 0.0 {
        bail!("export: graph threshold must be non-negative");
    }
    let graph = export_graph(&s, threshold);
    let strategic = export_strategic(&s);
    match format {
        ExportFormat::Json => {
            write("graph.json", &graph.to_json()?)?;
            write("strategic.json", &strategic.to_json()?)?;
        }
        ExportFormat::Csv => {
            write("graph-nodes.csv", &graph.nodes_csv()?)?;
            write("graph-edges.csv", &graph.edges_csv()?)?;
            write("strategic.csv", &strategic.to_csv()?)?;
        }
    }
    write("clusters.csv", &export_cluster_table(&s)?)?;

    let mut buf = Vec::new();
    coword_core::trends::write_trend_table(&s.trends, &mut buf)?;
    write("trends.csv", std::str::from_utf8(&buf)?)?;

    let excluded: BTreeSet<String> = s.config.exclude.iter().cloned().collect();
    let mut buf = Vec::new();
    write_top_keywords(&top_keywords(&s.corpus()?, top, None, &excluded), &mut buf)?;
    write("top-keywords.csv", std::str::from_utf8(&buf)?)?;

    let mut buf = Vec::new();
    s.dendrogram.write_merges(&mut buf)?;
    write("dendrogram.jsonl", std::str::from_utf8(&buf)?)?;
    Ok(())
}

fn serve(dir: &Path, bind: &str, port: u16, ui: Option<PathBuf>) -> Result<()> {
    let store = coword_service::SnapshotStore::open(dir)
        .with_context(|| format!("serve: snapshot {}", dir.display()))?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind((bind, port))
            .await
            .with_context(|| format!("serve: binding {bind}:{port}"))?;
        eprintln!(
            "serving {} on http://{}",
            dir.display(),
            listener.local_addr()?
        );
        coword_service::serve(listener, Arc::new(store), ui).await?;
        Ok(())
    })
}
