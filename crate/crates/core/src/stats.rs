//! Distribution diagnostics and rank correlation for indicator vectors.
//!
//! Moments use the simple sample-moment estimators `g1 = m3 / m2^1.5` and
//! `g2 = m4 / m2^2 - 3` (central moments with denominator `n`) by default,
//! paired with the standard errors `sqrt(6/n)` and `sqrt(24/n)`. The
//! normality test is the one-sample Kolmogorov-Smirnov test against a normal
//! with the sample mean and standard deviation, with the p-value taken from
//! the asymptotic Kolmogorov distribution. No Lilliefors correction is
//! applied, so p-values are conservative when the parameters are estimated.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentConvention {
    /// `g1`, `g2`.
    #[default]
    Simple,
    /// Adjusted Fisher-Pearson `G1`, `G2`.
    BiasCorrected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub se_skewness: f64,
    pub se_kurtosis: f64,
    pub ks_statistic: Option<f64>,
    pub ks_p_value: Option<f64>,
    pub moments: MomentConvention,
    pub note: Option<String>,
}

fn check_finite(xs: &[f64]) -> Result<()> {
    if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("non-finite value at position {i}")));
    }
    Ok(())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Central moments m2, m3, m4 with denominator `n`.
fn central_moments(xs: &[f64], mean: f64) -> (f64, f64, f64) {
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let n = xs.len() as f64;
    (m2 / n, m3 / n, m4 / n)
}

pub fn se_skewness(n: usize) -> f64 {
    (6.0 / n as f64).sqrt()
}

pub fn se_kurtosis(n: usize) -> f64 {
    (24.0 / n as f64).sqrt()
}

pub fn summarize(xs: &[f64]) -> Result<DistributionSummary> {
    summarize_with(xs, MomentConvention::Simple)
}

pub fn summarize_with(xs: &[f64], moments: MomentConvention) -> Result<DistributionSummary> {
    let n = xs.len();
    if n < 4 {
        return Err(Error::Domain(format!(
            "summary needs at least 4 values, got {n}"
        )));
    }
    check_finite(xs)?;
    let mu = mean(xs);
    let (m2, m3, m4) = central_moments(xs, mu);
    let nf = n as f64;
    let sd = (m2 * nf / (nf - 1.0)).sqrt();
    let mut out = DistributionSummary {
        n,
        mean: mu,
        sd,
        skewness: None,
        kurtosis: None,
        se_skewness: se_skewness(n),
        se_kurtosis: se_kurtosis(n),
        ks_statistic: None,
        ks_p_value: None,
        moments,
        note: None,
    };
    if m2 == 0.0 {
        out.note = Some("zero variance".into());
        return Ok(out);
    }
    let g1 = m3 / m2.powf(1.5);
    let g2 = m4 / (m2 * m2) - 3.0;
    let (skew, kurt) = match moments {
        MomentConvention::Simple => (g1, g2),
        MomentConvention::BiasCorrected => (
            g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0),
            ((nf + 1.0) * g2 + 6.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0)),
        ),
    };
    out.skewness = Some(skew);
    out.kurtosis = Some(kurt);
    let ks = ks_against_normal(xs, mu, sd);
    out.ks_statistic = Some(ks.statistic);
    out.ks_p_value = Some(ks.p_value);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

fn ks_against_normal(xs: &[f64], mu: f64, sd: f64) -> KsResult {
    let mut z: Vec<f64> = xs.iter().map(|x| (x - mu) / sd).collect();
    z.sort_by(f64::total_cmp);
    let n = z.len() as f64;
    let mut d = 0.0f64;
    for (i, &zi) in z.iter().enumerate() {
        let f = std_normal_cdf(zi);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d = d.max(above).max(below);
    }
    KsResult {
        statistic: d,
        p_value: kolmogorov_survival(n.sqrt() * d),
    }
}

/// One-sample KS test of `xs` against the normal with the sample mean and
/// standard deviation.
pub fn ks_normal_test(xs: &[f64]) -> Result<KsResult> {
    let n = xs.len();
    if n < 4 {
        return Err(Error::Domain(format!(
            "KS test needs at least 4 values, got {n}"
        )));
    }
    check_finite(xs)?;
    let mu = mean(xs);
    let (m2, _, _) = central_moments(xs, mu);
    if m2 == 0.0 {
        return Err(Error::Domain(
            "KS test on a sample with zero variance".into(),
        ));
    }
    let sd = (m2 * n as f64 / (n as f64 - 1.0)).sqrt();
    Ok(ks_against_normal(xs, mu, sd))
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let q = if lambda < 1.18 {
        // Jacobi theta form converges fast for small arguments.
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let mut sum = 0.0;
        for k in 1..=64 {
            let odd = (2 * k - 1) as f64;
            let term = (-odd * odd * pi2 / (8.0 * lambda * lambda)).exp();
            sum += term;
            if term < 1e-300 || term < sum * 1e-17 {
                break;
            }
        }
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * sum
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for k in 1..=128 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sum += sign * term;
            if term < 1e-300 || term < sum.abs() * 1e-17 {
                break;
            }
            sign = -sign;
        }
        2.0 * sum
    };
    q.clamp(0.0, 1.0)
}

/// Average (mid) ranks, 1-based.
pub fn mid_ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        let r = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub rho: f64,
    pub rho_squared: f64,
}

/// Spearman's rho as the Pearson correlation of mid-ranks. `None` when
/// either rank vector is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<Option<Correlation>> {
    if xs.len() != ys.len() {
        return Err(Error::Domain(format!(
            "length mismatch: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::Domain(format!(
            "spearman needs at least 3 pairs, got {}",
            xs.len()
        )));
    }
    check_finite(xs)?;
    check_finite(ys)?;
    Ok(
        pearson(&mid_ranks(xs), &mid_ranks(ys)).map(|rho| Correlation {
            rho,
            rho_squared: rho * rho,
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_low: f64,
    pub bin_high: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QqPoint {
    pub theoretical_quantile: f64,
    pub sample_quantile: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub histogram: Vec<HistogramBin>,
    pub qq: Vec<QqPoint>,
}

/// Equal-width histogram over `[min, max]` (last bin closed) and normal Q-Q
/// pairs `(Phi^-1((i - 0.5) / n), x_(i))`.
pub fn plot_data(xs: &[f64], bins: usize) -> Result<PlotData> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::Domain(format!(
            "plot data needs at least 2 values, got {n}"
        )));
    }
    if bins == 0 {
        return Err(Error::Domain("bins must be at least 1".into()));
    }
    check_finite(xs)?;
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = (sorted[0], sorted[n - 1]);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in &sorted {
        let k = if width > 0.0 {
            (((x - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[k] += 1;
    }
    let histogram = counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramBin {
            bin_low: lo + k as f64 * width,
            bin_high: if k + 1 == bins {
                hi
            } else {
                lo + (k + 1) as f64 * width
            },
            count,
        })
        .collect();
    let normal = Normal::standard();
    let qq = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| QqPoint {
            theoretical_quantile: normal.inverse_cdf((i as f64 + 0.5) / n as f64),
            sample_quantile: x,
        })
        .collect();
    Ok(PlotData { histogram, qq })
}

/// Standard normal quantiles at `(i - 0.5) / n`, `i = 1..=n`.
pub fn normal_plotting_positions(n: usize) -> Vec<f64> {
    let normal = Normal::standard();
    (0..n)
        .map(|i| normal.inverse_cdf((i as f64 + 0.5) / n as f64))
        .collect()
}
