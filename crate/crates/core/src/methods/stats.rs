//! Descriptive statistics and the feature-engineering methods composed
//! from them. Standard deviation is the population form (divide by n).

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("column is empty")]
    Empty,
    #[error("need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },
}

pub fn mean(values: &[f64]) -> Result<f64, StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

pub fn std(values: &[f64]) -> Result<f64, StatsError> {
    let m = mean(values)?;
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64;
    Ok(var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartiles {
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
}

/// Linear interpolation between the two order statistics around
/// position `(n - 1) * p` of the sorted values.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn quartiles(values: &[f64]) -> Result<Quartiles, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooShort {
            needed: 2,
            got: values.len(),
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    Ok(Quartiles { q1, q3, iqr: q3 - q1 })
}

/// `true` where a value lies outside `[q1 - 1.5 iqr, q3 + 1.5 iqr]`.
pub fn detect_outliers(values: &[f64]) -> Result<Vec<bool>, StatsError> {
    let q = quartiles(values)?;
    let lower = q.q1 - 1.5 * q.iqr;
    let upper = q.q3 + 1.5 * q.iqr;
    Ok(values.iter().map(|&v| v < lower || v > upper).collect())
}

/// Z-score; a constant column maps to zeros.
pub fn normalize(values: &[f64]) -> Result<Vec<f64>, StatsError> {
    let m = mean(values)?;
    let s = std(values)?;
    if s == 0.0 {
        return Ok(vec![0.0; values.len()]);
    }
    Ok(values.iter().map(|v| (v - m) / s).collect())
}
