//! Binary document-keyword matrices and the association matrices derived
//! from them.
//!
//! Rows are keywords (variables), columns are papers (observations). Both
//! orderings are sorted so that a given corpus always produces the same
//! matrix.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{paper_counts, Corpus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocTermMatrix {
    keywords: Vec<String>,
    papers: Vec<String>,
    /// Row-major, `keywords.len() * papers.len()` cells of 0 or 1.
    cells: Vec<u8>,
}

impl DocTermMatrix {
    /// Builds a matrix from explicit rows. Used for fixtures and imports.
    pub fn from_rows(
        keywords: Vec<String>,
        papers: Vec<String>,
        rows: Vec<Vec<u8>>,
    ) -> Result<Self> {
        if rows.len() != keywords.len() {
            return Err(Error::Invalid(format!(
                "{} rows for {} keywords",
                rows.len(),
                keywords.len()
            )));
        }
        let mut cells = Vec::with_capacity(keywords.len() * papers.len());
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != papers.len() {
                return Err(Error::Invalid(format!(
                    "row {i} has {} cells, expected {}",
                    row.len(),
                    papers.len()
                )));
            }
            if row.iter().any(|&c| c > 1) {
                return Err(Error::Invalid(format!("row {i} is not binary")));
            }
            cells.extend(row);
        }
        Ok(DocTermMatrix {
            keywords,
            papers,
            cells,
        })
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn papers(&self) -> &[String] {
        &self.papers
    }

    pub fn n_keywords(&self) -> usize {
        self.keywords.len()
    }

    pub fn n_papers(&self) -> usize {
        self.papers.len()
    }

    pub fn row(&self, i: usize) -> &[u8] {
        let n = self.papers.len();
        &self.cells[i * n..(i + 1) * n]
    }

    pub fn get(&self, keyword: usize, paper: usize) -> u8 {
        self.cells[keyword * self.papers.len() + paper]
    }

    pub fn row_sum(&self, i: usize) -> usize {
        self.row(i).iter().map(|&c| c as usize).sum()
    }

    pub fn index_of(&self, keyword: &str) -> Option<usize> {
        self.keywords
            .binary_search_by(|k| k.as_str().cmp(keyword))
            .ok()
    }

    pub fn to_export(&self) -> MatrixExport {
        MatrixExport {
            keywords: self.keywords.clone(),
            papers: self.papers.clone(),
            cells: self.cells.clone(),
        }
    }
}

/// Serialized form of a [`DocTermMatrix`]: keyword list, paper list and
/// row-major cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixExport {
    pub keywords: Vec<String>,
    pub papers: Vec<String>,
    pub cells: Vec<u8>,
}

impl TryFrom<MatrixExport> for DocTermMatrix {
    type Error = Error;

    fn try_from(e: MatrixExport) -> Result<Self> {
        let n = e.papers.len();
        if e.cells.len() != e.keywords.len() * n || n == 0 && !e.keywords.is_empty() {
            return Err(Error::Invalid("matrix export has wrong cell count".into()));
        }
        let rows = e.cells.chunks(n.max(1)).map(<[u8]>::to_vec).collect();
        DocTermMatrix::from_rows(e.keywords, e.papers, rows)
    }
}

/// Drops `excluded` keywords, then keywords on fewer than `min_occurrence`
/// papers, then papers left without any retained keyword.
pub fn build_doc_term_matrix(
    corpus: &Corpus,
    min_occurrence: usize,
    excluded: &BTreeSet<String>,
) -> Result<DocTermMatrix> {
    let counts = paper_counts(corpus.papers());
    let keywords: Vec<String> = counts
        .into_iter()
        .filter(|(k, c)| !excluded.contains(k) && *c >= min_occurrence)
        .map(|(k, _)| k)
        .collect();
    if keywords.len() < 2 {
        return Err(Error::DegenerateMatrix(keywords.len()));
    }
    let index: BTreeMap<&str, usize> = keywords
        .iter()
        .enumerate()
        .map(|(i, k)| (k.as_str(), i))
        .collect();

    let mut columns: Vec<(&str, Vec<usize>)> = corpus
        .papers()
        .iter()
        .filter_map(|p| {
            let mut hits: Vec<usize> = p
                .keywords
                .iter()
                .filter_map(|k| index.get(k.as_str()).copied())
                .collect();
            hits.sort_unstable();
            hits.dedup();
            (!hits.is_empty()).then_some((p.id.as_str(), hits))
        })
        .collect();
    columns.sort_by(|a, b| a.0.cmp(b.0));

    let n = columns.len();
    let mut cells = vec![0u8; keywords.len() * n];
    for (j, (_, hits)) in columns.iter().enumerate() {
        for &i in hits {
            cells[i * n + j] = 1;
        }
    }
    Ok(DocTermMatrix {
        keywords,
        papers: columns.into_iter().map(|(id, _)| id.to_owned()).collect(),
        cells,
    })
}

/// Symmetric count matrix; the diagonal holds each keyword's paper count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CooccurrenceMatrix {
    keywords: Vec<String>,
    counts: Vec<u32>,
}

impl CooccurrenceMatrix {
    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.keywords.len() + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let n = self.keywords.len();
        &self.counts[i * n..(i + 1) * n]
    }
}

pub fn cooccurrence(m: &DocTermMatrix) -> CooccurrenceMatrix {
    let k = m.n_keywords();
    let mut counts = vec![0u32; k * k];
    let mut present = Vec::with_capacity(k);
    for p in 0..m.n_papers() {
        present.clear();
        present.extend((0..k).filter(|&i| m.get(i, p) == 1));
        for (a, &i) in present.iter().enumerate() {
            for &j in &present[a..] {
                counts[i * k + j] += 1;
                if i != j {
                    counts[j * k + i] += 1;
                }
            }
        }
    }
    CooccurrenceMatrix {
        keywords: m.keywords.clone(),
        counts,
    }
}

/// Pearson correlations between keyword rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    keywords: Vec<String>,
    values: Vec<f64>,
    /// Rows with zero variance; their off-diagonal correlations are 0.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    constant_rows: Vec<usize>,
}

impl CorrelationMatrix {
    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.keywords.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.keywords.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn constant_rows(&self) -> &[usize] {
        &self.constant_rows
    }

    pub fn index_of(&self, keyword: &str) -> Option<usize> {
        self.keywords.iter().position(|k| k == keyword)
    }
}

/// Pearson coefficient for every pair of rows.
///
/// For 0/1 rows with `a` and `b` ones out of `n` columns and `c` shared ones
/// the coefficient reduces to `(n c - a b) / sqrt(a (n - a) b (n - b))`, which
/// is evaluated from exact integer counts.
pub fn correlation(m: &DocTermMatrix) -> CorrelationMatrix {
    let k = m.n_keywords();
    let n = m.n_papers() as i64;
    let cooc = cooccurrence(m);
    let ones: Vec<i64> = (0..k).map(|i| cooc.get(i, i) as i64).collect();
    let spread: Vec<i64> = ones.iter().map(|&a| a * (n - a)).collect();
    let constant_rows: Vec<usize> = (0..k).filter(|&i| spread[i] == 0).collect();
    for &i in &constant_rows {
        log::warn!(
            "keyword `{}` is constant across papers; its correlations are set to 0",
            m.keywords[i]
        );
    }

    let mut values = vec![0.0; k * k];
    for i in 0..k {
        values[i * k + i] = 1.0;
        for j in (i + 1)..k {
            let r = if spread[i] == 0 || spread[j] == 0 {
                0.0
            } else {
                let num = n * cooc.get(i, j) as i64 - ones[i] * ones[j];
                let den = (spread[i] as f64) * (spread[j] as f64);
                (num as f64 / den.sqrt()).clamp(-1.0, 1.0)
            };
            values[i * k + j] = r;
            values[j * k + i] = r;
        }
    }
    CorrelationMatrix {
        keywords: m.keywords.clone(),
        values,
        constant_rows,
    }
}
