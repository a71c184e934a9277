//! Nadaraya-Watson regression with fixed and recursive (time-indexed) bandwidths.

use crate::error::{Error, Result};
use crate::series::TimeSeries;

use super::kernel::{KernelMode, KernelSpec};

/// Weights below `exp(LOG_SUPPORT_FLOOR)` everywhere mean the query has no support.
const LOG_SUPPORT_FLOOR: f64 = -690.775_527_898_213_7; // ln(1e-300)

/// Regressor/response pairs with their 1-based time indices.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    q: usize,
    d: usize,
    u: Vec<f64>,
    v: Vec<f64>,
    times: Vec<f64>,
}

/// Per-sample terms of the log-weight `log_norm + offset_t - scale_t |u - u_t|^2`.
#[derive(Debug, Clone)]
pub struct PreparedKernel {
    log_norm: f64,
    offset: Vec<f64>,
    scale: Vec<f64>,
}

impl TrainingSet {
    /// Pairs `(u_t, v_t)` with times `1..=len`.
    pub fn new(u: &TimeSeries, v: &TimeSeries) -> Result<Self> {
        let times = (1..=u.len()).map(|t| t as f64).collect();
        Self::with_times(u, v, times)
    }

    pub fn with_times(u: &TimeSeries, v: &TimeSeries, times: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() || times.len() != u.len() {
            return Err(Error::Dimension(format!(
                "{} regressors, {} responses, {} time indices",
                u.len(),
                v.len(),
                times.len()
            )));
        }
        if times.iter().any(|&t| !(t >= 1.0)) {
            return Err(Error::Config("time indices must be >= 1".into()));
        }
        Ok(TrainingSet {
            q: u.dim(),
            d: v.dim(),
            u: u.as_slice().to_vec(),
            v: v.as_slice().to_vec(),
            times,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn regressor_dim(&self) -> usize {
        self.q
    }

    pub fn response_dim(&self) -> usize {
        self.d
    }

    pub fn prepare(&self, kernel: &KernelSpec) -> Result<PreparedKernel> {
        kernel.validate()?;
        if kernel.reg_dim != self.q {
            return Err(Error::Dimension(format!(
                "kernel regressor dimension {} for {}-dimensional regressors",
                kernel.reg_dim, self.q
            )));
        }
        let (offset, scale) = match kernel.mode {
            KernelMode::Fixed { h } => (vec![0.0; self.len()], vec![0.5 / (h * h); self.len()]),
            KernelMode::Recursive { beta } => {
                let q = self.q as f64;
                self.times
                    .iter()
                    .map(|&t| (beta * q * t.ln(), 0.5 * t.powf(2.0 * beta)))
                    .unzip()
            }
        };
        Ok(PreparedKernel {
            log_norm: kernel.log_norm(),
            offset,
            scale,
        })
    }

    /// Kernel-weighted response average at `query`, optionally ignoring sample `exclude`.
    /// `log_w` is scratch space reused across queries.
    pub fn predict_with(
        &self,
        prepared: &PreparedKernel,
        query: &[f64],
        exclude: Option<usize>,
        log_w: &mut Vec<f64>,
    ) -> Result<Vec<f64>> {
        if query.len() != self.q {
            return Err(Error::Dimension(format!(
                "query of dimension {} for {}-dimensional regressors",
                query.len(),
                self.q
            )));
        }
        log_w.clear();
        let mut max = f64::NEG_INFINITY;
        for (i, ui) in self.u.chunks_exact(self.q).enumerate() {
            if exclude == Some(i) {
                log_w.push(f64::NEG_INFINITY);
                continue;
            }
            let dist2: f64 = ui.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
            let lw = prepared.log_norm + prepared.offset[i] - prepared.scale[i] * dist2;
            max = max.max(lw);
            log_w.push(lw);
        }
        if !(max >= LOG_SUPPORT_FLOOR) {
            return Err(Error::OutOfSupport);
        }
        let mut num = vec![0.0; self.d];
        let mut den = 0.0;
        for (lw, vi) in log_w.iter().zip(self.v.chunks_exact(self.d)) {
            let rel = lw - max;
            if rel < -745.0 {
                continue;
            }
            let w = rel.exp();
            den += w;
            for (n, v) in num.iter_mut().zip(vi) {
                *n += w * v;
            }
        }
        num.iter_mut().for_each(|n| *n /= den);
        Ok(num)
    }

    pub fn predict(&self, kernel: &KernelSpec, query: &[f64], exclude: Option<usize>) -> Result<Vec<f64>> {
        let prepared = self.prepare(kernel)?;
        self.predict_with(&prepared, query, exclude, &mut Vec::with_capacity(self.len()))
    }
}

fn check_pairs(train_u: &TimeSeries, train_v: &TimeSeries) -> Result<()> {
    if train_u.len() != train_v.len() {
        return Err(Error::Dimension(format!(
            "{} regressors but {} responses",
            train_u.len(),
            train_v.len()
        )));
    }
    Ok(())
}

/// Fixed-bandwidth estimate `sum v_t K((u - u_t)/h) / sum K((u - u_t)/h)`.
pub fn nw_regress(train_u: &TimeSeries, train_v: &TimeSeries, query: &[f64], kernel: &KernelSpec) -> Result<Vec<f64>> {
    if !matches!(kernel.mode, KernelMode::Fixed { .. }) {
        return Err(Error::Config("nw_regress needs a fixed-bandwidth kernel".into()));
    }
    check_pairs(train_u, train_v)?;
    TrainingSet::new(train_u, train_v)?.predict(kernel, query, None)
}

/// Recursive estimate with weights `t^{beta q} K(t^beta (u - u_t))`, `t` the 1-based
/// position of the pair.
pub fn recursive_nw_regress(
    train_u: &TimeSeries,
    train_v: &TimeSeries,
    query: &[f64],
    kernel: &KernelSpec,
) -> Result<Vec<f64>> {
    if !matches!(kernel.mode, KernelMode::Recursive { .. }) {
        return Err(Error::Config("recursive_nw_regress needs a recursive kernel".into()));
    }
    check_pairs(train_u, train_v)?;
    TrainingSet::new(train_u, train_v)?.predict(kernel, query, None)
}
