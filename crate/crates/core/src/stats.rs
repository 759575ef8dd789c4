//! Summary statistics: Student-t intervals, interpolated quantiles, and
//! five-number summaries.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

pub fn mean(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample("mean"));
    }
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

/// Sample standard deviation (n − 1 denominator).
pub fn std_dev(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            what: "std_dev",
            min: 2,
            got: samples.len(),
        });
    }
    let m = mean(samples)?;
    let ss: f64 = samples.iter().map(|x| (x - m) * (x - m)).sum();
    Ok((ss / (samples.len() - 1) as f64).sqrt())
}

/// Two-sided Student-t interval on the mean at confidence `level`.
pub fn confidence_interval(samples: &[f64], level: f64) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            what: "confidence_interval",
            min: 2,
            got: samples.len(),
        });
    }
    let n = samples.len() as f64;
    let m = mean(samples)?;
    let s = std_dev(samples)?;
    if s == 0.0 {
        return Ok((m, m));
    }
    let t = StudentsT::new(0.0, 1.0, n - 1.0)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.5 + level / 2.0);
    let half = t * s / n.sqrt();
    Ok((m - half, m + half))
}

/// Linear interpolation between order statistics at 1-indexed rank
/// `h = (n − 1)q + 1`.
pub fn quantiles(samples: &[f64], qs: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySample("quantiles"));
    }
    if let Some(q) = qs.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::config("quantiles.q", format!("{q} is outside [0, 1]")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(qs.iter().map(|&q| quantile_sorted(&sorted, q)).collect())
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn boxplot_stats(samples: &[f64]) -> Result<FiveNumber> {
    let v = quantiles(samples, &[0.0, 0.25, 0.5, 0.75, 1.0]).map_err(|_| Error::EmptySample("boxplot_stats"))?;
    Ok(FiveNumber {
        min: v[0],
        q1: v[1],
        median: v[2],
        q3: v[3],
        max: v[4],
    })
}
