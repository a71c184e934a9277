use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

use super::kernel::KernelSpec;
use super::regress::TrainingSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InnovationOptions {
    /// Leave the query's own pair out of its regression.
    pub leave_one_out: bool,
    /// Training pairs are thinned uniformly to at most this many.
    pub max_train: Option<usize>,
}

impl Default for InnovationOptions {
    fn default() -> Self {
        InnovationOptions {
            leave_one_out: true,
            max_train: Some(5_000),
        }
    }
}

#[derive(Debug, Clone)]
pub struct InnovationEstimate {
    /// `n_t = x_t - g(x_{t-1}, ..., x_{t-p})` for `t = p+1..T`.
    pub residuals: TimeSeries,
    /// Queries without kernel support, answered with the global response mean.
    pub out_of_support: usize,
    pub train_size: usize,
}

/// Regressors `u_t = (x_{t-1}, ..., x_{t-p})` and responses `v_t = x_t` for `t > p`.
pub fn lagged_pairs(x: &TimeSeries, order: usize) -> Result<(TimeSeries, TimeSeries)> {
    if order == 0 || x.len() <= order {
        return Err(Error::Config(format!(
            "need more than {order} samples for order-{order} lags, got {}",
            x.len()
        )));
    }
    let (n, d) = (x.len() - order, x.dim());
    let mut u = Vec::with_capacity(n * order * d);
    for t in order..x.len() {
        for lag in 1..=order {
            u.extend_from_slice(x.row(t - lag));
        }
    }
    Ok((
        TimeSeries::from_rows(n, order * d, u)?,
        x.slice(order, x.len()),
    ))
}

/// `count` indices spread evenly over `0..n`.
fn thinned_indices(n: usize, count: usize) -> Vec<usize> {
    (0..count).map(|k| k * n / count).collect()
}

/// Residuals of the kernel regression of `x_t` on its `order` lags.
pub fn estimate_innovations(
    x: &TimeSeries,
    order: usize,
    kernel: &KernelSpec,
    options: &InnovationOptions,
) -> Result<InnovationEstimate> {
    if x.len() <= order + 1 {
        return Err(Error::Config(format!(
            "innovation estimation needs more than {} samples, got {}",
            order + 1,
            x.len()
        )));
    }
    let (u, v) = lagged_pairs(x, order)?;
    let n = u.len();
    let keep = match options.max_train {
        Some(0) => return Err(Error::Config("training cap must be positive".into())),
        Some(cap) if cap < n => thinned_indices(n, cap),
        _ => (0..n).collect(),
    };
    // training position of each pair, if it was kept
    let mut position = vec![None; n];
    for (k, &i) in keep.iter().enumerate() {
        position[i] = Some(k);
    }
    let pick = |s: &TimeSeries| -> Result<TimeSeries> {
        let rows: Vec<f64> = keep.iter().flat_map(|&i| s.row(i).iter().copied()).collect();
        TimeSeries::from_rows(keep.len(), s.dim(), rows)
    };
    let times = keep.iter().map(|&i| (i + 1) as f64).collect();
    let train = TrainingSet::with_times(&pick(&u)?, &pick(&v)?, times)?;
    let prepared = train.prepare(kernel)?;
    let fallback = v.mean();

    let d = x.dim();
    let results: Vec<Result<(Vec<f64>, bool)>> = (0..n)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(train.len()),
            |scratch, i| {
                let exclude = if options.leave_one_out { position[i] } else { None };
                let g = match train.predict_with(&prepared, u.row(i), exclude, scratch) {
                    Ok(g) => (g, false),
                    Err(Error::OutOfSupport) => (fallback.clone(), true),
                    Err(e) => return Err(e),
                };
                Ok(g)
            },
        )
        .collect();

    let mut data = Vec::with_capacity(n * d);
    let mut out_of_support = 0;
    for (i, r) in results.into_iter().enumerate() {
        let (g, missed) = r?;
        out_of_support += usize::from(missed);
        data.extend(v.row(i).iter().zip(&g).map(|(a, b)| a - b));
    }
    if out_of_support > 0 {
        log::debug!("{out_of_support} of {n} regression queries fell back to the global mean");
    }
    Ok(InnovationEstimate {
        residuals: TimeSeries::from_rows(n, d, data)?,
        out_of_support,
        train_size: train.len(),
    })
}
