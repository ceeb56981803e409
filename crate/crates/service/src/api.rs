//! JSON bodies returned by the `/api/v1/` endpoints.

use coword_core::{AnalysisConfig, CorpusDigest, KeywordKind, PowerLawFit, YearRange};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordHit {
    pub keyword: String,
    pub count: usize,
    /// Cluster id for keywords retained by the analysis, otherwise null.
    pub cluster: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Page<T> {
    pub total: usize,
    pub offset: usize,
    pub limit: usize,
    pub items: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordSearch {
    pub query: String,
    #[serde(flatten)]
    pub page: Page<KeywordHit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub keyword: String,
    pub cooccurrences: usize,
    /// Pearson correlation when both keywords are in the analyzed matrix.
    pub correlation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperRef {
    pub id: String,
    pub title: String,
    pub venue: String,
    pub year: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearCount {
    pub year: i32,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendLine {
    pub slope: f64,
    pub stderr: f64,
    pub p_value: f64,
    pub significant: bool,
    /// Whether the fit is on per-year shares rather than raw counts.
    pub normalized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordTrend {
    pub keyword: String,
    pub years: YearRange,
    pub series: Vec<YearCount>,
    pub fit: Option<TrendLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordDetail {
    pub keyword: String,
    pub count: usize,
    pub rank: usize,
    pub cluster: Option<usize>,
    pub neighbors: Vec<Neighbor>,
    pub papers: Vec<PaperRef>,
    pub trend: KeywordTrend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cooccurring {
    pub keyword: String,
    #[serde(flatten)]
    pub page: Page<Neighbor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperList {
    pub keyword: Option<String>,
    #[serde(flatten)]
    pub page: Page<PaperRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub id: usize,
    pub n: usize,
    /// The two most frequent members.
    pub label: Vec<String>,
    pub median_freq: f64,
    pub cw_freq: f64,
    pub density: f64,
    pub centrality: f64,
    pub quadrant: String,
    pub theme: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterList {
    pub k: usize,
    pub clusters: Vec<ClusterSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterDetail {
    #[serde(flatten)]
    pub summary: ClusterSummary,
    pub members: Vec<KeywordHit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategicPointBody {
    pub cluster: usize,
    pub centrality: f64,
    pub density: f64,
    pub quadrant: String,
    pub theme: String,
    pub margin_centrality: f64,
    pub margin_density: f64,
    pub label: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strategic {
    pub median_centrality: f64,
    pub median_density: f64,
    pub points: Vec<StrategicPointBody>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub snapshot_version: u32,
    pub provenance: String,
    pub keyword_kind: KeywordKind,
    pub digest: CorpusDigest,
    pub config: AnalysisConfig,
    pub retained_keywords: usize,
    pub clusters: usize,
    pub trend_years: YearRange,
    pub powerlaw: Option<PowerLawFit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorDetail {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}
