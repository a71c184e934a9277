//! Box-plot summaries of Amari-index samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quartiles, 1.5 IQR fences, whiskers, outliers and median notch of a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub n: usize,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub lower_fence: f64,
    pub upper_fence: f64,
    /// Smallest and largest values inside the fences.
    pub whisker_low: f64,
    pub whisker_high: f64,
    /// Values outside the fences, ascending.
    pub outliers: Vec<f64>,
    /// `q2 -/+ 1.57 IQR / sqrt(n)`.
    pub notch_low: f64,
    pub notch_high: f64,
}

/// Quantile `q` of an ascending sample: linear interpolation at position `q (n - 1)`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(quantile(&sorted, 0.5))
}

pub fn boxplot_stats(values: &[f64]) -> Result<BoxStats> {
    if values.is_empty() {
        return Err(Error::Config("box-plot statistics of an empty sample".into()));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("sample value {v}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (q1, q2, q3) = (quantile(&sorted, 0.25), quantile(&sorted, 0.5), quantile(&sorted, 0.75));
    let iqr = q3 - q1;
    let (lower_fence, upper_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = |v: &f64| *v >= lower_fence && *v <= upper_fence;
    // the median always lies inside, so both searches succeed
    let whisker_low = *sorted.iter().find(|v| inside(v)).unwrap_or(&q2);
    let whisker_high = *sorted.iter().rev().find(|v| inside(v)).unwrap_or(&q2);
    let outliers = sorted.iter().copied().filter(|v| !inside(v)).collect();
    let half_notch = 1.57 * iqr / (sorted.len() as f64).sqrt();
    Ok(BoxStats {
        n: sorted.len(),
        q1,
        q2,
        q3,
        lower_fence,
        upper_fence,
        whisker_low,
        whisker_high,
        outliers,
        notch_low: q2 - half_notch,
        notch_high: q2 + half_notch,
    })
}
