//! Small numerical helpers shared by the analysis modules.

use statrs::function::beta::beta_reg;

/// Median of `values`; the mean of the middle two for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

/// Ordinary least squares fit of `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub n: usize,
    /// Centered sum of squares of `x`.
    pub sxx: f64,
    /// Centered sum of squares of `y`.
    pub syy: f64,
    /// Residual sum of squares.
    pub sse: f64,
}

impl LineFit {
    /// Sums are taken around the means, which keeps calendar-year
    /// regressors well conditioned. Returns `None` for fewer than two points
    /// or constant `x`.
    pub fn fit(points: &[(f64, f64)]) -> Option<LineFit> {
        let n = points.len();
        if n < 2 {
            return None;
        }
        let nf = n as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
        let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
        let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
        for &(x, y) in points {
            let (dx, dy) = (x - mx, y - my);
            sxx += dx * dx;
            sxy += dx * dy;
            syy += dy * dy;
        }
        if sxx == 0.0 {
            return None;
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let sse = points
            .iter()
            .map(|&(x, y)| {
                let r = y - (intercept + slope * x);
                r * r
            })
            .sum::<f64>();
        Some(LineFit {
            slope,
            intercept,
            n,
            sxx,
            syy,
            sse,
        })
    }

    /// Coefficient of determination, or `None` when `y` has no variance.
    pub fn r_squared(&self) -> Option<f64> {
        if self.syy == 0.0 {
            None
        } else {
            Some((1.0 - self.sse / self.syy).clamp(0.0, 1.0))
        }
    }
}

/// Two-sided p-value of Student's t statistic with `df` degrees of freedom,
/// `P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2)`.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() || df <= 0.0 {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}
