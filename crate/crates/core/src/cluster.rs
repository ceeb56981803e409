//! Agglomerative hierarchical clustering.
//!
//! Two configurations are supported: Ward linkage over squared Euclidean
//! distances (the main keyword clustering) and average linkage over
//! Bray-Curtis distances (consensus of several coders). Both are driven by
//! the Lance–Williams recurrence on a dense distance matrix, so merge
//! heights are the recurrence values themselves; for Ward on squared
//! Euclidean input a height is twice the increase in within-cluster sum of
//! squares.
//!
//! Node ids follow the usual convention: leaves are `0..n` and the merge at
//! step `s` creates node `n + s`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::CoderIndicator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceMetric {
    #[serde(rename = "sqeuclidean")]
    SquaredEuclidean,
    #[serde(rename = "braycurtis")]
    BrayCurtis,
}

impl DistanceMetric {
    pub fn distance(&self, u: &[f64], v: &[f64]) -> f64 {
        match self {
            DistanceMetric::SquaredEuclidean => u
                .iter()
                .zip(v)
                .map(|(a, b)| {
                    let d = a - b;
                    d * d
                })
                .sum(),
            DistanceMetric::BrayCurtis => {
                let (num, den) = u
                    .iter()
                    .zip(v)
                    .fold((0.0, 0.0), |(n, d), (a, b)| (n + (a - b).abs(), d + a + b));
                if den == 0.0 {
                    0.0
                } else {
                    num / den
                }
            }
        }
    }
}

impl fmt::Display for DistanceMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceMetric::SquaredEuclidean => "sqeuclidean",
            DistanceMetric::BrayCurtis => "braycurtis",
        })
    }
}

impl FromStr for DistanceMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqeuclidean" | "squared-euclidean" => Ok(DistanceMetric::SquaredEuclidean),
            "braycurtis" | "bray-curtis" => Ok(DistanceMetric::BrayCurtis),
            other => Err(Error::Invalid(format!("unknown metric `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Ward,
    Average,
}

impl Linkage {
    /// Ward's recurrence is only meaningful for squared Euclidean input.
    pub fn check_metric(&self, metric: DistanceMetric) -> Result<()> {
        match (self, metric) {
            (Linkage::Ward, DistanceMetric::BrayCurtis) => Err(Error::Invalid(
                "ward linkage requires the squared Euclidean metric".into(),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Ward => "ward",
            Linkage::Average => "average",
        })
    }
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ward" => Ok(Linkage::Ward),
            "average" => Ok(Linkage::Average),
            other => Err(Error::Invalid(format!("unknown linkage `{other}`"))),
        }
    }
}

/// Dense symmetric matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Wraps a square matrix, checking shape, symmetry and a zero diagonal.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::Invalid(format!(
                    "distance row {i} has length {}",
                    r.len()
                )));
            }
            values.extend_from_slice(r);
        }
        let m = DistanceMatrix { n, values };
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(Error::Invalid(format!("non-zero self distance at {i}")));
            }
            for j in (i + 1)..n {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::Invalid(format!("asymmetric distance at ({i}, {j})")));
                }
            }
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

pub fn pairwise_distances(vectors: &[Vec<f64>], metric: DistanceMetric) -> Result<DistanceMatrix> {
    let n = vectors.len();
    let dim = vectors.first().map_or(0, Vec::len);
    if let Some(i) = vectors.iter().position(|v| v.len() != dim) {
        return Err(Error::Invalid(format!(
            "vector {i} has length {}, expected {dim}",
            vectors[i].len()
        )));
    }
    if metric == DistanceMetric::BrayCurtis {
        if let Some(i) = vectors.iter().position(|v| v.iter().any(|&x| x < 0.0)) {
            return Err(Error::Invalid(format!(
                "bray-curtis needs non-negative vectors; vector {i} has a negative entry"
            )));
        }
    }
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            if metric == DistanceMetric::BrayCurtis
                && vectors[i].iter().chain(&vectors[j]).all(|&x| x == 0.0)
            {
                log::warn!("bray-curtis distance between all-zero vectors {i} and {j} set to 0");
            }
            let d = metric.distance(&vectors[i], &vectors[j]);
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix { n, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub id: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    leaves: Vec<String>,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn leaves(&self) -> &[String] {
        &self.leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.leaves.len() {
            return Err(Error::Invalid(format!(
                "{} labels for {} leaves",
                labels.len(),
                self.leaves.len()
            )));
        }
        self.leaves = labels;
        Ok(self)
    }

    /// One JSON object per merge: `{"left":..,"right":..,"height":..,"id":..}`.
    pub fn write_merges<W: Write>(&self, mut out: W) -> Result<()> {
        for m in &self.merges {
            serde_json::to_writer(&mut out, m)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Agglomerates with the Lance–Williams recurrence.
///
/// The pair with the smallest current distance merges first; exact ties go
/// to the smallest `(left id, right id)` pair where `left < right`.
pub fn agglomerate(d: &DistanceMatrix, linkage: Linkage) -> Result<Dendrogram> {
    let n = d.len();
    for i in 0..n {
        for j in 0..n {
            let v = d.get(i, j);
            if !v.is_finite() {
                return Err(Error::NonFiniteDistance(i, j));
            }
            if v < 0.0 {
                return Err(Error::Invalid(format!("negative distance at ({i}, {j})")));
            }
        }
    }

    let mut dist = d.values.clone();
    // Slot s holds the cluster currently stored in row/column s.
    let mut node: Vec<usize> = (0..n).collect();
    let mut size: Vec<usize> = vec![1; n];
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for (x, &a) in active.iter().enumerate() {
            for &b in &active[x + 1..] {
                let h = dist[a * n + b];
                let (lo, hi) = (node[a].min(node[b]), node[a].max(node[b]));
                let better = match best {
                    None => true,
                    Some((bh, bl, br, _, _)) => h < bh || (h == bh && (lo, hi) < (bl, br)),
                };
                if better {
                    best = Some((h, lo, hi, a, b));
                }
            }
        }
        let (height, left, right, a, b) = best.expect("at least two active clusters");
        let (na, nb) = (size[a] as f64, size[b] as f64);
        let dab = dist[a * n + b];
        for &k in &active {
            if k == a || k == b {
                continue;
            }
            let (dka, dkb) = (dist[k * n + a], dist[k * n + b]);
            let updated = match linkage {
                Linkage::Ward => {
                    let nk = size[k] as f64;
                    ((na + nk) * dka + (nb + nk) * dkb - nk * dab) / (na + nb + nk)
                }
                Linkage::Average => (na * dka + nb * dkb) / (na + nb),
            };
            dist[k * n + a] = updated;
            dist[a * n + k] = updated;
        }
        let id = n + step;
        node[a] = id;
        size[a] += size[b];
        active.retain(|&s| s != b);
        merges.push(Merge {
            left,
            right,
            height,
            id,
        });
    }

    Ok(Dendrogram {
        leaves: (0..n).map(|i| i.to_string()).collect(),
        merges,
    })
}

/// Flat clustering: each leaf's cluster id in `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    k: usize,
    keywords: Vec<String>,
    labels: Vec<usize>,
}

impl ClusterAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    /// Cluster id per leaf, in leaf order.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, leaf: usize) -> usize {
        self.labels[leaf]
    }

    pub fn label_of(&self, keyword: &str) -> Option<usize> {
        self.keywords
            .iter()
            .position(|k| k == keyword)
            .map(|i| self.labels[i])
    }

    /// Leaf indices of cluster `id`, ascending.
    pub fn members(&self, id: usize) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&i| self.labels[i] == id)
            .collect()
    }
}

/// Undoes the last `k - 1` merges. Clusters are numbered by their smallest
/// leaf index, so cluster 1 contains leaf 0.
pub fn cut_to_k(dg: &Dendrogram, k: usize) -> Result<ClusterAssignment> {
    let n = dg.len();
    if k < 1 || k > n {
        return Err(Error::ClusterCount { k, n });
    }
    let mut parent: Vec<usize> = (0..(2 * n).saturating_sub(1)).collect();
    for m in &dg.merges[..n - k] {
        parent[m.left] = m.id;
        parent[m.right] = m.id;
    }
    let root = |mut x: usize| {
        while parent[x] != x {
            x = parent[x];
        }
        x
    };
    let mut root_label: Vec<Option<usize>> = vec![None; parent.len()];
    let mut next = 1;
    let labels = (0..n)
        .map(|leaf| {
            let r = root(leaf);
            *root_label[r].get_or_insert_with(|| {
                next += 1;
                next - 1
            })
        })
        .collect();
    Ok(ClusterAssignment {
        k,
        keywords: dg.leaves.clone(),
        labels,
    })
}

/// Per-pair count of coders that co-coded two keywords.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsensusMatrix {
    keywords: Vec<String>,
    coders: usize,
    counts: Vec<u32>,
}

impl ConsensusMatrix {
    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn coders(&self) -> usize {
        self.coders
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.keywords.len() + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        let n = self.keywords.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j) as f64).collect())
            .collect()
    }
}

pub fn consensus_matrix(indicators: &[CoderIndicator]) -> Result<ConsensusMatrix> {
    let first = indicators
        .first()
        .ok_or_else(|| Error::Invalid("consensus needs at least one coder".into()))?;
    let n = first.keywords.len();
    let mut counts = vec![0u32; n * n];
    for ind in indicators {
        if ind.keywords != first.keywords || ind.cells.len() != n * n {
            return Err(Error::UniverseMismatch);
        }
        for (c, &x) in counts.iter_mut().zip(&ind.cells) {
            *c += x as u32;
        }
    }
    Ok(ConsensusMatrix {
        keywords: first.keywords.clone(),
        coders: indicators.len(),
        counts,
    })
}

/// Average-linkage tree over Bray-Curtis distances between consensus rows.
pub fn consensus_dendrogram(cm: &ConsensusMatrix) -> Result<Dendrogram> {
    let d = pairwise_distances(&cm.rows(), DistanceMetric::BrayCurtis)?;
    agglomerate(&d, Linkage::Average)?.with_labels(cm.keywords.clone())
}
