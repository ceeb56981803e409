//! Slow, obviously-correct reference computations.
//!
//! Nothing here depends on `coword-core`: every function works on plain
//! vectors and strings and takes the most literal route to its answer, so
//! it can be used to check the optimized code paths without sharing any of
//! their logic.

#![allow(clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

/// Pearson product-moment correlation computed from centered values.
///
/// Returns `None` when either input has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        None
    } else {
        Some(sab / (saa * sbb).sqrt())
    }
}

/// Co-occurrence counts by an explicit double loop over rows and a scan
/// over columns.
pub fn cooccurrence(rows: &[Vec<u8>]) -> Vec<Vec<u32>> {
    let n = rows.len();
    let mut out = vec![vec![0u32; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut c = 0;
            for p in 0..rows[i].len() {
                if rows[i][p] == 1 && rows[j][p] == 1 {
                    c += 1;
                }
            }
            out[i][j] = c;
        }
    }
    out
}

pub fn squared_euclidean(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub fn bray_curtis(u: &[f64], v: &[f64]) -> f64 {
    let num: f64 = u.iter().zip(v).map(|(a, b)| (a - b).abs()).sum();
    let den: f64 = u.iter().zip(v).map(|(a, b)| a + b).sum();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaiveLinkage {
    Ward,
    Average,
}

/// One merge of the naive agglomerator: `(left id, right id, height, new id)`.
pub type NaiveMerge = (usize, usize, f64, usize);

/// Agglomerative clustering that recomputes every inter-cluster distance
/// from the original matrix at every step.
///
/// Leaves are nodes `0..n`; the merge at step `s` creates node `n + s`.
/// Ties on the minimum distance go to the smallest `(left, right)` id pair.
///
/// Ward distances are the Lance–Williams heights for squared Euclidean
/// input: twice the increase in within-cluster sum of squares, where the
/// sum of squares of a cluster `S` equals `sum_{i<j in S} d(i,j) / |S|`.
pub fn naive_agglomerate(d: &[Vec<f64>], linkage: NaiveLinkage) -> Vec<NaiveMerge> {
    let n = d.len();
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut merges = Vec::new();
    let mut next = n;

    let ess = |s: &[usize]| -> f64 {
        let mut total = 0.0;
        for a in 0..s.len() {
            for b in (a + 1)..s.len() {
                total += d[s[a]][s[b]];
            }
        }
        total / s.len() as f64
    };
    let dist = |a: &[usize], b: &[usize]| -> f64 {
        match linkage {
            NaiveLinkage::Average => {
                let mut total = 0.0;
                for &i in a {
                    for &j in b {
                        total += d[i][j];
                    }
                }
                total / (a.len() * b.len()) as f64
            }
            NaiveLinkage::Ward => {
                let mut joint = a.to_vec();
                joint.extend_from_slice(b);
                2.0 * (ess(&joint) - ess(a) - ess(b))
            }
        }
    };

    while clusters.len() > 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for x in 0..clusters.len() {
            for y in (x + 1)..clusters.len() {
                let h = dist(&clusters[x].1, &clusters[y].1);
                let (lo, hi) = if clusters[x].0 < clusters[y].0 {
                    (clusters[x].0, clusters[y].0)
                } else {
                    (clusters[y].0, clusters[x].0)
                };
                let better = match best {
                    None => true,
                    Some((bh, bl, br, _, _)) => h < bh || (h == bh && (lo, hi) < (bl, br)),
                };
                if better {
                    best = Some((h, lo, hi, x, y));
                }
            }
        }
        let (h, lo, hi, x, y) = best.unwrap();
        let mut members = clusters[x].1.clone();
        members.extend_from_slice(&clusters[y].1);
        clusters.remove(y);
        clusters.remove(x);
        clusters.push((next, members));
        merges.push((lo, hi, h, next));
        next += 1;
    }
    merges
}

/// Exact simple linear regression of `counts` on `years` followed by a
/// two-sided t-test of the slope.
///
/// All sums are accumulated in `i128`, so slope and residual sum of squares
/// are exact rationals until the final division. Returns
/// `(slope, standard error, p-value)`; a perfect fit yields standard error 0
/// and p 0 for a non-zero slope, p 1 for a zero slope.
pub fn ols_t_test(years: &[i64], counts: &[i64]) -> (f64, f64, f64) {
    assert_eq!(years.len(), counts.len());
    let n = years.len() as i128;
    let sx: i128 = years.iter().map(|&x| x as i128).sum();
    let sy: i128 = counts.iter().map(|&y| y as i128).sum();
    let sxx: i128 = years.iter().map(|&x| (x as i128) * (x as i128)).sum();
    let syy: i128 = counts.iter().map(|&y| (y as i128) * (y as i128)).sum();
    let sxy: i128 = years
        .iter()
        .zip(counts)
        .map(|(&x, &y)| (x as i128) * (y as i128))
        .sum();
    let a = n * sxx - sx * sx;
    let b = n * sxy - sx * sy;
    let c = n * syy - sy * sy;
    let slope = b as f64 / a as f64;
    let resid = a * c - b * b;
    if resid == 0 {
        let p = if b == 0 { 1.0 } else { 0.0 };
        return (slope, 0.0, p);
    }
    let se = ((resid as f64) / ((n - 2) as f64 * (a as f64) * (a as f64))).sqrt();
    let t = slope / se;
    (slope, se, t_two_sided_p(t, (n - 2) as u32))
}

/// Two-sided tail probability of Student's t by quadrature.
///
/// Substituting `t = sqrt(df) * tan(theta)` turns the density into a
/// multiple of `cos(theta)^(df-1)` on `(-pi/2, pi/2)`, so the tail is a
/// ratio of two integrals of a smooth bounded function. Both are evaluated
/// with composite Simpson's rule.
pub fn t_two_sided_p(t: f64, df: u32) -> f64 {
    let theta0 = (t.abs() / (df as f64).sqrt()).atan();
    let half_pi = std::f64::consts::FRAC_PI_2;
    let f = |th: f64| th.cos().powi(df as i32 - 1);
    let tail = simpson(&f, theta0, half_pi, 20_000);
    let whole = simpson(&f, 0.0, half_pi, 20_000);
    (tail / whole).clamp(0.0, 1.0)
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let m = panels * 2;
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let x = a + h * i as f64;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// Number of papers mentioning each keyword, counting a keyword at most once
/// per paper, by scanning every paper for every keyword.
pub fn keyword_paper_counts(papers: &[Vec<String>]) -> BTreeMap<String, usize> {
    let mut vocab = BTreeSet::new();
    for p in papers {
        for k in p {
            vocab.insert(k.clone());
        }
    }
    let mut out = BTreeMap::new();
    for k in vocab {
        let mut c = 0;
        for p in papers {
            if p.contains(&k) {
                c += 1;
            }
        }
        out.insert(k, c);
    }
    out
}

/// Total (paper, code) incidences after replacing each keyword with its codes
/// and de-duplicating within each paper.
pub fn coded_occurrences(papers: &[Vec<String>], codes: &BTreeMap<String, Vec<String>>) -> usize {
    let mut total = 0;
    for p in papers {
        let mut seen: Vec<String> = Vec::new();
        for k in p {
            if let Some(cs) = codes.get(k) {
                for c in cs {
                    if !seen.contains(c) {
                        seen.push(c.clone());
                    }
                }
            }
        }
        total += seen.len();
    }
    total
}

/// Consensus counts: for each keyword pair, the number of coders that gave
/// both keywords at least one common code. A keyword absent from a coder's
/// map shares nothing with anything for that coder.
pub fn consensus(keywords: &[String], coders: &[BTreeMap<String, Vec<String>>]) -> Vec<Vec<u32>> {
    let n = keywords.len();
    let mut out = vec![vec![0u32; n]; n];
    for coder in coders {
        for i in 0..n {
            for j in 0..n {
                let (Some(a), Some(b)) = (coder.get(&keywords[i]), coder.get(&keywords[j])) else {
                    continue;
                };
                if a.iter().any(|c| b.contains(c)) {
                    out[i][j] += 1;
                }
            }
        }
    }
    out
}

/// Median by sorting a copy; mean of the middle two for even lengths.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}
