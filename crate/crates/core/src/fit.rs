//! Log-log scaling fits for `e_max` and variance series.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{domain, Result};

/// What the series values measure, which fixes how the slope maps to `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// VCM maximum eigenvalue: `e_max ~ n^(p_e - 1)`.
    EMax,
    /// Fluctuation of an additive observable: `⟨ΔA²⟩ ~ n^p`.
    Variance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSeries {
    pub kind: SeriesKind,
    pub rows: Vec<ScalingRow>,
}

/// Per-`n` aggregate used as a fit point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub median: f64,
    pub instances: usize,
    /// Fraction of instances outside `(1 ± ε)·median`.
    pub exceptional_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    /// `p_e` for `EMax` series, `p` for `Variance` series.
    pub exponent: f64,
    pub stderr: f64,
    pub slope: f64,
    pub intercept: f64,
    pub ci95: (f64, f64),
    pub points: Vec<ScalingPoint>,
}

/// Relative band used for the exceptional-instance fraction.
pub const EXCEPTION_BAND: f64 = 0.5;

impl ScalingSeries {
    pub fn new(kind: SeriesKind) -> Self {
        ScalingSeries { kind, rows: Vec::new() }
    }

    pub fn push(&mut self, n: usize, label: impl Into<String>, value: f64) {
        self.rows.push(ScalingRow { n, label: label.into(), value });
    }

    /// Medians per `n`, ascending in `n`.
    pub fn points(&self) -> Vec<ScalingPoint> {
        let mut ns: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        ns.into_iter()
            .map(|n| {
                let vals: Vec<f64> = self.rows.iter().filter(|r| r.n == n).map(|r| r.value).collect();
                let med = median(&vals);
                let exc = vals
                    .iter()
                    .filter(|&&v| (v - med).abs() > EXCEPTION_BAND * med.abs())
                    .count();
                ScalingPoint {
                    n,
                    median: med,
                    instances: vals.len(),
                    exceptional_fraction: exc as f64 / vals.len() as f64,
                }
            })
            .collect()
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Ordinary least squares `y = intercept + slope·x`; returns (slope, intercept, slope stderr).
pub fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let k = x.len();
    if k != y.len() || k < 3 {
        return Err(domain(format!("least squares needs at least 3 points, got {k}")));
    }
    let mx = x.iter().sum::<f64>() / k as f64;
    let my = y.iter().sum::<f64>() / k as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(domain("degenerate fit: no spread in log n"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let stderr = (ssr / (k - 2) as f64 / sxx).sqrt();
    Ok((slope, intercept, stderr))
}

/// Fits `log(median value)` against `log n`.
pub fn fit_exponent(series: &ScalingSeries) -> Result<ExponentFit> {
    if let Some(bad) = series.rows.iter().find(|r| !(r.value > 0.0)) {
        return Err(domain(format!(
            "log-log fit needs positive values; n={} {} has {}",
            bad.n, bad.label, bad.value
        )));
    }
    let points = series.points();
    if points.len() < 3 {
        return Err(domain(format!("need at least 3 distinct n values, got {}", points.len())));
    }
    let x: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.median.ln()).collect();
    let (slope, intercept, stderr) = ols(&x, &y)?;
    let exponent = match series.kind {
        SeriesKind::EMax => slope + 1.0,
        SeriesKind::Variance => slope,
    };
    let t = students_t_975(points.len() - 2);
    let ci95 = (exponent - t * stderr, exponent + t * stderr);
    Ok(ExponentFit { exponent, stderr, slope, intercept, ci95, points })
}

/// `(p_e, stderr)` for an `e_max` series.
pub fn fit_p_e(series: &ScalingSeries) -> Result<(f64, f64)> {
    let fit = fit_exponent(series)?;
    Ok((fit.exponent, fit.stderr))
}

fn students_t_975(dof: usize) -> f64 {
    StudentsT::new(0.0, 1.0, dof as f64)
        .map(|t| t.inverse_cdf(0.975))
        .unwrap_or(1.959_963_984_540_054)
}

/// Finite-size reading of the index `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    P1,
    P2,
    Indeterminate,
}

impl Verdict {
    /// `p = 2` when the exponent is ≥ 1.5 and its 95% CI excludes 1;
    /// `p = 1` when it is ≤ 1.5 and the CI excludes 2.
    pub fn from_fit(fit: &ExponentFit) -> Verdict {
        let (lo, hi) = fit.ci95;
        if fit.exponent >= 1.5 && lo > 1.0 {
            Verdict::P2
        } else if fit.exponent <= 1.5 && hi < 2.0 {
            Verdict::P1
        } else {
            Verdict::Indeterminate
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::P1 => "1",
            Verdict::P2 => "2",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn series(kind: SeriesKind, f: impl Fn(usize) -> f64, ns: std::ops::RangeInclusive<usize>) -> ScalingSeries {
        let mut s = ScalingSeries::new(kind);
        for n in ns {
            s.push(n, "x", f(n));
        }
        s
    }

    #[test]
    fn exact_power_laws() {
        let (pe, se) = fit_p_e(&series(SeriesKind::EMax, |n| n as f64, 3..=9)).unwrap();
        assert_abs_diff_eq!(pe, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(se, 0.0, epsilon = 1e-12);
        let (pe, _) = fit_p_e(&series(SeriesKind::EMax, |_| 2.0, 3..=9)).unwrap();
        assert_abs_diff_eq!(pe, 1.0, epsilon = 1e-12);
        let fit = fit_exponent(&series(SeriesKind::Variance, |n| 0.3 * (n * n) as f64, 4..=16)).unwrap();
        assert_abs_diff_eq!(fit.exponent, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn bad_series() {
        assert!(fit_p_e(&series(SeriesKind::EMax, |n| n as f64, 3..=4)).is_err());
        assert!(fit_p_e(&series(SeriesKind::EMax, |n| n as f64 - 4.0, 3..=8)).is_err());
        let mut s = ScalingSeries::new(SeriesKind::EMax);
        for _ in 0..5 {
            s.push(4, "same n", 1.0);
        }
        assert!(fit_p_e(&s).is_err());
    }

    #[test]
    fn medians_and_exceptions() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let mut s = ScalingSeries::new(SeriesKind::EMax);
        for v in [1.0, 10.0, 10.0, 10.0] {
            s.push(5, "a", v);
        }
        let p = &s.points()[0];
        assert_eq!(p.median, 10.0);
        assert_abs_diff_eq!(p.exceptional_fraction, 0.25);
    }

    #[test]
    fn verdict_rule() {
        let mk = |e: f64, lo: f64, hi: f64| ExponentFit {
            exponent: e,
            stderr: 0.0,
            slope: 0.0,
            intercept: 0.0,
            ci95: (lo, hi),
            points: vec![],
        };
        assert_eq!(Verdict::from_fit(&mk(1.9, 1.6, 2.2)), Verdict::P2);
        assert_eq!(Verdict::from_fit(&mk(1.0, 1.0, 1.0)), Verdict::P1);
        assert_eq!(Verdict::from_fit(&mk(1.6, 0.9, 2.3)), Verdict::Indeterminate);
        assert_eq!(Verdict::from_fit(&mk(1.4, 0.5, 2.3)), Verdict::Indeterminate);
    }

    #[test]
    fn t_quantile() {
        assert_abs_diff_eq!(students_t_975(1), 12.706, epsilon = 1e-3);
        assert_abs_diff_eq!(students_t_975(1000), 1.962, epsilon = 1e-3);
    }
}
