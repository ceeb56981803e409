//! Keyword network, per-cluster cohesion/connectedness and strategic
//! diagram placement.
//!
//! Density is the median weight of a cluster's internal links; centrality is
//! the sum of squared weights of links leaving the cluster.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cluster::ClusterAssignment;
use crate::corpus::FrequencyTable;
use crate::error::{Error, Result};
use crate::matrix::{CooccurrenceMatrix, CorrelationMatrix};
use crate::stats::median;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub keyword: String,
    pub occurrences: usize,
}

/// Undirected edge between node indices, `source < target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordNetwork {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl KeywordNetwork {
    pub fn index_of(&self, keyword: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.keyword == keyword)
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.weight).reduce(f64::max)
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.source == node || e.target == node)
            .count()
    }
}

/// Links every keyword pair with strictly positive correlation.
pub fn build_network(corr: &CorrelationMatrix, occurrences: &FrequencyTable) -> KeywordNetwork {
    let counts = occurrences.to_map();
    let nodes = corr
        .keywords()
        .iter()
        .map(|k| Node {
            keyword: k.clone(),
            occurrences: counts.get(k).copied().unwrap_or(0),
        })
        .collect();
    let n = corr.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = corr.get(i, j);
            if w > 0.0 {
                edges.push(Edge {
                    source: i,
                    target: j,
                    weight: w,
                });
            }
        }
    }
    KeywordNetwork { nodes, edges }
}

/// Keeps edges with `weight >= min_weight` and drops nodes left isolated.
/// Node indices are renumbered in the original order.
pub fn filter_network(net: &KeywordNetwork, min_weight: f64) -> KeywordNetwork {
    let kept: Vec<Edge> = net
        .edges
        .iter()
        .copied()
        .filter(|e| e.weight >= min_weight)
        .collect();
    let mut used = vec![false; net.nodes.len()];
    for e in &kept {
        used[e.source] = true;
        used[e.target] = true;
    }
    let mut remap = vec![usize::MAX; net.nodes.len()];
    let mut nodes = Vec::new();
    for (i, node) in net.nodes.iter().enumerate() {
        if used[i] {
            remap[i] = nodes.len();
            nodes.push(node.clone());
        }
    }
    let edges = kept
        .into_iter()
        .map(|e| Edge {
            source: remap[e.source],
            target: remap[e.target],
            weight: e.weight,
        })
        .collect();
    KeywordNetwork { nodes, edges }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterMetrics {
    pub cluster: usize,
    /// Members sorted by occurrence count (descending), then keyword.
    pub members: Vec<String>,
    pub n: usize,
    pub median_freq: f64,
    pub cw_freq: f64,
    pub density: f64,
    pub centrality: f64,
}

pub fn cluster_metrics(
    net: &KeywordNetwork,
    assign: &ClusterAssignment,
    cooc: &CooccurrenceMatrix,
    freq: &FrequencyTable,
) -> Result<Vec<ClusterMetrics>> {
    if assign.keywords() != cooc.keywords() {
        return Err(Error::Invalid(
            "cluster assignment and co-occurrence matrix cover different keywords".into(),
        ));
    }
    let node_cluster: Vec<usize> = net
        .nodes
        .iter()
        .map(|n| {
            assign.label_of(&n.keyword).ok_or_else(|| {
                Error::Invalid(format!("network keyword `{}` has no cluster", n.keyword))
            })
        })
        .collect::<Result<_>>()?;
    let counts = freq.to_map();

    let mut internal: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut boundary: BTreeMap<usize, f64> = BTreeMap::new();
    for e in &net.edges {
        let (a, b) = (node_cluster[e.source], node_cluster[e.target]);
        if a == b {
            internal.entry(a).or_default().push(e.weight);
        } else {
            let sq = e.weight * e.weight;
            *boundary.entry(a).or_default() += sq;
            *boundary.entry(b).or_default() += sq;
        }
    }

    let mut out = Vec::with_capacity(assign.k());
    for c in 1..=assign.k() {
        let leaves = assign.members(c);
        let mut members: Vec<(String, usize)> = leaves
            .iter()
            .map(|&i| {
                let k = &assign.keywords()[i];
                (k.clone(), counts.get(k).copied().unwrap_or(0))
            })
            .collect();
        members.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let freqs: Vec<f64> = members.iter().map(|m| m.1 as f64).collect();

        let mut pair_total = 0u64;
        let mut pairs = 0u64;
        for (x, &i) in leaves.iter().enumerate() {
            for &j in &leaves[x + 1..] {
                pair_total += cooc.get(i, j) as u64;
                pairs += 1;
            }
        }
        out.push(ClusterMetrics {
            cluster: c,
            n: members.len(),
            members: members.into_iter().map(|m| m.0).collect(),
            median_freq: median(&freqs).unwrap_or(0.0),
            cw_freq: if pairs == 0 {
                0.0
            } else {
                pair_total as f64 / pairs as f64
            },
            density: internal.get(&c).and_then(|w| median(w)).unwrap_or(0.0),
            centrality: boundary.get(&c).copied().unwrap_or(0.0),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrant {
    /// High centrality, high density: motor themes.
    I,
    /// High centrality, low density: basic and transversal themes.
    II,
    /// Low centrality, high density: developed but isolated themes.
    III,
    /// Low centrality, low density: emerging or declining themes.
    IV,
}

impl Quadrant {
    pub fn classify(x: f64, y: f64, median_x: f64, median_y: f64) -> Quadrant {
        match (x > median_x, y > median_y) {
            (true, true) => Quadrant::I,
            (true, false) => Quadrant::II,
            (false, true) => Quadrant::III,
            (false, false) => Quadrant::IV,
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Quadrant::I => "motor",
            Quadrant::II => "basic/transversal",
            Quadrant::III => "developed/isolated",
            Quadrant::IV => "emerging/declining",
        }
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quadrant::I => "I",
            Quadrant::II => "II",
            Quadrant::III => "III",
            Quadrant::IV => "IV",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategicPoint {
    pub cluster: usize,
    /// Centrality.
    pub x: f64,
    /// Density.
    pub y: f64,
    pub quadrant: Quadrant,
    /// Distance from the median lines, `(|x - median_x|, |y - median_y|)`.
    pub margin: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategicDiagram {
    pub median_centrality: f64,
    pub median_density: f64,
    pub points: Vec<StrategicPoint>,
}

/// Splits clusters at the median centrality and median density. Values
/// equal to a median fall on the low side.
pub fn strategic_diagram(metrics: &[ClusterMetrics]) -> Result<StrategicDiagram> {
    let xs: Vec<f64> = metrics.iter().map(|m| m.centrality).collect();
    let ys: Vec<f64> = metrics.iter().map(|m| m.density).collect();
    let (Some(mx), Some(my)) = (median(&xs), median(&ys)) else {
        return Err(Error::Invalid(
            "strategic diagram needs at least one cluster".into(),
        ));
    };
    let points = metrics
        .iter()
        .map(|m| StrategicPoint {
            cluster: m.cluster,
            x: m.centrality,
            y: m.density,
            quadrant: Quadrant::classify(m.centrality, m.density, mx, my),
            margin: ((m.centrality - mx).abs(), (m.density - my).abs()),
        })
        .collect();
    Ok(StrategicDiagram {
        median_centrality: mx,
        median_density: my,
        points,
    })
}
