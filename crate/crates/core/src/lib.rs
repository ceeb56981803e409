//! Co-word analysis of publication keyword corpora.
//!
//! The pipeline runs from raw paper records to topic clusters and their
//! strategic-diagram placement:
//!
//! 1. [`corpus`]: ingest and filter papers, rank keywords by frequency.
//! 2. [`normalize`]: canonicalize keywords, apply alias and expert code maps.
//! 3. [`matrix`]: binary document-keyword matrix, co-occurrence, Pearson
//!    correlation.
//! 4. [`cluster`]: Ward / average-linkage agglomeration and flat cuts.
//! 5. [`netmetrics`]: correlation network, cluster density and centrality,
//!    strategic quadrants.
//! 6. [`trends`]: rank-frequency power law and per-keyword linear trends.
//! 7. [`report`]: the end-to-end [`run_pipeline`] and the snapshot exports.

pub mod cluster;
pub mod corpus;
pub mod error;
pub mod matrix;
pub mod netmetrics;
pub mod normalize;
pub mod report;
pub mod stats;
pub mod trends;

pub use cluster::{
    agglomerate, consensus_dendrogram, consensus_matrix, cut_to_k, pairwise_distances,
    ClusterAssignment, ConsensusMatrix, Dendrogram, DistanceMatrix, DistanceMetric, Linkage, Merge,
};
pub use corpus::{
    filter_corpus, frequency_table, parse_corpus, write_corpus, Corpus, CorpusDigest, Format,
    FrequencyEntry, FrequencyTable, KeywordKind, Paper, YearRange,
};
pub use error::{Error, Result, Stage};
pub use matrix::{
    build_doc_term_matrix, cooccurrence, correlation, CooccurrenceMatrix, CorrelationMatrix,
    DocTermMatrix, MatrixExport,
};
pub use netmetrics::{
    build_network, cluster_metrics, filter_network, strategic_diagram, ClusterMetrics, Edge,
    KeywordNetwork, Node, Quadrant, StrategicDiagram, StrategicPoint,
};
pub use normalize::{
    apply_alias_map, apply_code_map, canonicalize, canonicalize_corpus, AliasMap, CodeMap,
    CoderIndicator, CodingMode, CodingReport, NormalizationRules,
};
pub use report::{
    export_cluster_table, export_graph, export_strategic, run_pipeline, top_keywords,
    AnalysisConfig, AnalysisSnapshot, GraphExport, StrategicExport,
};
pub use trends::{
    keyword_trend, linear_trend, powerlaw_fit, powerlaw_fit_points, rank_trends, yearly_counts,
    PowerLawFit, SlopeTest, TrendFit, TrendOptions,
};
