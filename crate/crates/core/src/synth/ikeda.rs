//! The ikeda map as a deterministic two-dimensional source.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IkedaParams {
    pub lambda: f64,
    pub initial: [f64; 2],
}

/// The two components used in the reference ikeda experiment.
pub fn default_ikeda_params() -> Vec<IkedaParams> {
    vec![
        IkedaParams {
            lambda: 0.9994,
            initial: [20.0, 20.0],
        },
        IkedaParams {
            lambda: 0.998,
            initial: [-100.0, 30.0],
        },
    ]
}

/// One iterate: rotation by `w = 0.4 - 6 / (1 + |s|^2)`, scaling by `lambda`, shift by `(1, 0)`.
pub fn ikeda_step(state: [f64; 2], lambda: f64) -> Result<[f64; 2]> {
    let [s1, s2] = state;
    if !(s1.is_finite() && s2.is_finite()) {
        return Err(Error::NonFinite(format!("ikeda state ({s1}, {s2})")));
    }
    let w = 0.4 - 6.0 / (1.0 + s1 * s1 + s2 * s2);
    let (sin, cos) = w.sin_cos();
    let next = [1.0 + lambda * (s1 * cos - s2 * sin), lambda * (s1 * sin + s2 * cos)];
    if !(next[0].is_finite() && next[1].is_finite()) {
        return Err(Error::NonFinite(format!("ikeda iterate from ({s1}, {s2})")));
    }
    Ok(next)
}

/// `len` iterates of every component side by side; component `m` occupies
/// coordinates `2m` and `2m + 1`, and row 0 holds the initial points.
pub fn generate_ikeda_sources(params: &[IkedaParams], len: usize) -> Result<TimeSeries> {
    if params.is_empty() || len == 0 {
        return Err(Error::Config("ikeda generation needs components and a positive length".into()));
    }
    for p in params {
        if p.lambda.abs() >= 1.0 {
            log::warn!("ikeda lambda {} has |lambda| >= 1; trajectory may be unbounded", p.lambda);
        }
    }
    let dim = 2 * params.len();
    let mut data = Vec::with_capacity(len * dim);
    let mut states: Vec<[f64; 2]> = params.iter().map(|p| p.initial).collect();
    for t in 0..len {
        if t > 0 {
            for (s, p) in states.iter_mut().zip(params) {
                *s = ikeda_step(*s, p.lambda)?;
            }
        }
        data.extend(states.iter().flatten());
    }
    TimeSeries::from_rows(len, dim, data)
}
