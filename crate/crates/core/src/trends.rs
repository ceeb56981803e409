//! Rank-frequency power-law fits and per-keyword linear trends.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::{paper_counts, Corpus, FrequencyTable, YearRange};
use crate::error::{Error, Result};
use crate::stats::{t_two_sided_p, LineFit};

/// Significance level used to flag trends.
pub const SIGNIFICANCE: f64 = 0.05;

/// Log-log least squares fit of count against rank: `count ~ rank^-alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub r_squared: f64,
    /// Intercept of `ln(count)` on `ln(rank)`.
    pub intercept: f64,
    pub n_points: usize,
    /// Set when the counts have no variance and R² is undefined.
    #[serde(default)]
    pub degenerate: bool,
}

pub fn powerlaw_fit(table: &FrequencyTable) -> Result<PowerLawFit> {
    let points: Vec<(f64, f64)> = table
        .entries()
        .iter()
        .map(|e| (e.rank as f64, e.count as f64))
        .collect();
    powerlaw_fit_points(&points)
}

/// Fits `(rank, count)` pairs, ignoring points with rank or count below 1.
pub fn powerlaw_fit_points(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(r, c)| *r >= 1.0 && *c >= 1.0)
        .map(|(r, c)| (r.ln(), c.ln()))
        .collect();
    if logs.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: logs.len(),
        });
    }
    let fit = LineFit::fit(&logs).ok_or_else(|| Error::Invalid("all ranks are equal".into()))?;
    let r2 = fit.r_squared();
    Ok(PowerLawFit {
        alpha: if fit.slope == 0.0 { 0.0 } else { -fit.slope },
        r_squared: r2.unwrap_or(0.0),
        intercept: fit.intercept,
        n_points: fit.n,
        degenerate: r2.is_none(),
    })
}

/// Slope of a least squares line with its standard error and two-sided
/// p-value (t distribution, `n - 2` degrees of freedom).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeTest {
    pub slope: f64,
    pub stderr: f64,
    pub p_value: f64,
}

/// A perfect fit reports standard error 0 and p 0, except a flat series,
/// which has no evidence of a trend and reports p 1.
pub fn linear_trend<T: Copy + Into<f64>>(series: &[(i32, T)]) -> Result<SlopeTest> {
    if series.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: series.len(),
        });
    }
    let points: Vec<(f64, f64)> = series.iter().map(|&(y, c)| (y as f64, c.into())).collect();
    let fit = LineFit::fit(&points)
        .ok_or_else(|| Error::Invalid("trend series needs at least two distinct years".into()))?;
    let slope = if fit.slope == 0.0 { 0.0 } else { fit.slope };
    let perfect = fit.sse <= f64::EPSILON * f64::EPSILON * fit.syy;
    if perfect {
        return Ok(SlopeTest {
            slope,
            stderr: 0.0,
            p_value: if slope == 0.0 { 1.0 } else { 0.0 },
        });
    }
    let df = (fit.n - 2) as f64;
    let stderr = (fit.sse / df / fit.sxx).sqrt();
    Ok(SlopeTest {
        slope,
        stderr,
        p_value: t_two_sided_p(slope / stderr, df),
    })
}

/// Number of papers per year mentioning `keyword`; years without any are 0.
pub fn yearly_counts(corpus: &Corpus, keyword: &str, years: YearRange) -> Vec<(i32, usize)> {
    let mut counts = vec![0usize; years.len()];
    for p in corpus.papers() {
        if years.contains(p.year) && p.keywords.iter().any(|k| k == keyword) {
            counts[(p.year - years.start) as usize] += 1;
        }
    }
    years.years().zip(counts).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendFit {
    pub keyword: String,
    pub total_count: usize,
    pub slope: f64,
    pub stderr: f64,
    pub p_value: f64,
    pub years: YearRange,
    pub significant: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrendOptions {
    /// Fit yearly shares of papers instead of raw counts.
    #[serde(default)]
    pub normalized: bool,
    /// Keywords never selected for trend fitting.
    #[serde(default)]
    pub excluded: BTreeSet<String>,
}

/// Fits one keyword's yearly series.
pub fn keyword_trend(
    corpus: &Corpus,
    keyword: &str,
    years: YearRange,
    opts: &TrendOptions,
) -> Result<TrendFit> {
    let raw = yearly_counts(corpus, keyword, years);
    let total_count = raw.iter().map(|(_, c)| c).sum();
    let test = if opts.normalized {
        let papers = papers_per_year(corpus, years);
        let shares: Vec<(i32, f64)> = raw
            .iter()
            .zip(&papers)
            .map(|(&(y, c), &n)| (y, if n == 0 { 0.0 } else { c as f64 / n as f64 }))
            .collect();
        linear_trend(&shares)?
    } else {
        let counts: Vec<(i32, f64)> = raw.iter().map(|&(y, c)| (y, c as f64)).collect();
        linear_trend(&counts)?
    };
    Ok(TrendFit {
        keyword: keyword.to_owned(),
        total_count,
        slope: test.slope,
        stderr: test.stderr,
        p_value: test.p_value,
        years,
        significant: test.p_value < SIGNIFICANCE,
    })
}

fn papers_per_year(corpus: &Corpus, years: YearRange) -> Vec<usize> {
    let mut n = vec![0usize; years.len()];
    for p in corpus.papers() {
        if years.contains(p.year) && !p.is_flagged() {
            n[(p.year - years.start) as usize] += 1;
        }
    }
    n
}

/// Fits the `top_n` most frequent keywords within `years` and orders the
/// fits by slope, steepest rise first.
pub fn rank_trends(
    corpus: &Corpus,
    top_n: usize,
    years: YearRange,
    opts: &TrendOptions,
) -> Result<Vec<TrendFit>> {
    let counts = paper_counts(corpus.papers().iter().filter(|p| years.contains(p.year)));
    let table = FrequencyTable::from_counts(
        counts
            .into_iter()
            .filter(|(k, _)| !opts.excluded.contains(k)),
    );
    let mut fits = table
        .top(top_n)
        .iter()
        .map(|e| keyword_trend(corpus, &e.keyword, years, opts))
        .collect::<Result<Vec<_>>>()?;
    fits.sort_by(|a, b| {
        b.slope
            .total_cmp(&a.slope)
            .then_with(|| a.keyword.cmp(&b.keyword))
    });
    Ok(fits)
}

/// Writes `keyword,total,slope,stderr,p,significant` rows with a header.
pub fn write_trend_table<W: std::io::Write>(fits: &[TrendFit], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["keyword", "total", "slope", "stderr", "p", "significant"])?;
    for f in fits {
        w.write_record([
            f.keyword.clone(),
            f.total_count.to_string(),
            format!("{:.6}", f.slope),
            format!("{:.6}", f.stderr),
            format!("{:.6}", f.p_value),
            f.significant.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
