//! Descriptive statistics and log-log power-law regression.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StdConvention {
    /// Divide by n - 1.
    #[default]
    Sample,
    /// Divide by n.
    Population,
}

/// How skewness and kurtosis are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentConvention {
    /// Moment ratios g1 = m3 / m2^1.5 and g2 = m4 / m2^2 - 3.
    #[default]
    MomentRatio,
    /// Bias-adjusted G1 and G2 (the spreadsheet SKEW/KURT estimators).
    BiasAdjusted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KurtosisForm {
    /// Normal distribution centers at 0.
    #[default]
    Excess,
    /// Normal distribution centers at 3.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuartileConvention {
    /// Interpolate between order statistics at h = (n - 1) p.
    #[default]
    Linear,
    /// Smallest value with at least a fraction p of the sample at or below it.
    NearestRank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct StatConventions {
    pub std: StdConvention,
    pub moments: MomentConvention,
    pub kurtosis: KurtosisForm,
    pub quartiles: QuartileConvention,
}

/// Summary of one series. Fields that are undefined for the input
/// (standard deviation of a singleton under the sample convention,
/// moments of a constant series) are `None` and serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescriptiveStats {
    pub count: usize,
    pub sum: f64,
    pub mean: f64,
    pub std_dev: Option<f64>,
    pub mean_over_std: Option<f64>,
    pub min: f64,
    pub max: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

impl DescriptiveStats {
    /// Names of fields that came out undefined.
    pub fn undefined_fields(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.std_dev.is_none() {
            out.push("std_dev");
        }
        if self.mean_over_std.is_none() {
            out.push("mean_over_std");
        }
        if self.skewness.is_none() {
            out.push("skewness");
        }
        if self.kurtosis.is_none() {
            out.push("kurtosis");
        }
        out
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

fn quantile(sorted: &[f64], p: f64, convention: QuartileConvention) -> f64 {
    let n = sorted.len();
    match convention {
        QuartileConvention::Linear => {
            let h = (n - 1) as f64 * p;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            let frac = h - lo as f64;
            if frac == 0.0 {
                sorted[lo]
            } else {
                sorted[lo] + frac * (sorted[hi] - sorted[lo])
            }
        }
        QuartileConvention::NearestRank => {
            let rank = (p * n as f64).ceil() as usize;
            sorted[rank.clamp(1, n) - 1]
        }
    }
}

pub fn describe(series: &[f64], conventions: StatConventions) -> Result<DescriptiveStats> {
    if series.is_empty() {
        return Err(Error::Domain("cannot describe an empty series".into()));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("series contains a non-finite value".into()));
    }
    let n = series.len();
    let nf = n as f64;

    let mut sorted = series.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min = sorted[0];
    let max = sorted[n - 1];

    let sum = compensated_sum(series.iter().copied());
    let mean = sum / nf;

    // Corrected two-pass: the residual sum of deviations absorbs the
    // rounding error left in the mean.
    let dev_sum = compensated_sum(series.iter().map(|x| x - mean));
    let mut s2 = 0.0;
    let mut s3 = 0.0;
    let mut s4 = 0.0;
    for x in series {
        let d = x - mean;
        let d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    let s2 = (s2 - dev_sum * dev_sum / nf).max(0.0);
    let constant = min == max;

    let std_dev = match conventions.std {
        StdConvention::Sample if n < 2 => None,
        StdConvention::Sample => Some(if constant {
            0.0
        } else {
            (s2 / (nf - 1.0)).sqrt()
        }),
        StdConvention::Population => Some(if constant { 0.0 } else { (s2 / nf).sqrt() }),
    };
    let mean_over_std = std_dev.filter(|&s| s > 0.0).map(|s| mean / s);

    let (skewness, kurtosis) = if constant || s2 == 0.0 {
        (None, None)
    } else {
        let m2 = s2 / nf;
        let m3 = s3 / nf;
        let m4 = s4 / nf;
        let g1 = m3 / m2.powf(1.5);
        let g2 = m4 / (m2 * m2) - 3.0;
        match conventions.moments {
            MomentConvention::MomentRatio => (Some(g1), Some(g2)),
            MomentConvention::BiasAdjusted => {
                let skew = (n >= 3).then(|| g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0));
                let kurt = (n >= 4)
                    .then(|| ((nf + 1.0) * g2 + 6.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0)));
                (skew, kurt)
            }
        }
    };
    let kurtosis = match conventions.kurtosis {
        KurtosisForm::Excess => kurtosis,
        KurtosisForm::Raw => kurtosis.map(|k| k + 3.0),
    };

    Ok(DescriptiveStats {
        count: n,
        sum,
        mean,
        std_dev,
        mean_over_std,
        min,
        max,
        q1: quantile(&sorted, 0.25, conventions.quartiles),
        median: quantile(&sorted, 0.5, conventions.quartiles),
        q3: quantile(&sorted, 0.75, conventions.quartiles),
        skewness,
        kurtosis,
    })
}

/// Result of fitting y = a * x^b by least squares on (ln x, ln y).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawFit {
    /// Prefactor, exp(intercept).
    pub a: f64,
    /// Exponent, the log-log slope.
    pub b: f64,
    /// Coefficient of determination in log space.
    pub r_squared: f64,
    pub used_points: usize,
    pub dropped_points: usize,
}

pub fn power_law_fit(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    if xs.len() != ys.len() {
        return Err(Error::Domain(format!(
            "x and y lengths differ ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    let logs: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let used = logs.len();
    let dropped = xs.len() - used;
    if used < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: used,
        });
    }
    let nf = used as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(lx, ly) in &logs {
        let dx = lx - mx;
        let dy = ly - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::Domain("all usable x values are equal".into()));
    }
    let b = sxy / sxx;
    let intercept = my - b * mx;
    let ss_res: f64 = logs
        .iter()
        .map(|&(lx, ly)| {
            let r = ly - (intercept + b * lx);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(PowerLawFit {
        a: intercept.exp(),
        b,
        r_squared,
        used_points: used,
        dropped_points: dropped,
    })
}
