use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Entries beyond this magnitude abort a simulation.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

type MapFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// The regression function `f` of the source recursion.
#[derive(Clone)]
pub enum DynamicsMap {
    /// `f = 0`: sources are the driving noise itself.
    Zero,
    /// `f(u) = sin(F u)` elementwise, `F` is `dim x (order * dim)` row-major.
    Sine { f: Vec<f64> },
    /// Any other map on the stacked lag vector.
    Custom(Arc<MapFn>),
}

impl fmt::Debug for DynamicsMap {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsMap::Zero => write!(fm, "Zero"),
            DynamicsMap::Sine { f } => fm.debug_struct("Sine").field("f", f).finish(),
            DynamicsMap::Custom(_) => write!(fm, "Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FarDynamics {
    order: usize,
    dim: usize,
    map: DynamicsMap,
    description: String,
}

/// Serializable record of how a dynamics map was built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsProvenance {
    pub description: String,
    pub order: usize,
    pub dim: usize,
    /// Rows of `F` for sine dynamics.
    pub f_matrix: Option<Vec<Vec<f64>>>,
}

impl FarDynamics {
    pub fn zero(dim: usize, order: usize) -> Self {
        FarDynamics {
            order,
            dim,
            map: DynamicsMap::Zero,
            description: "zero".into(),
        }
    }

    pub fn custom<F>(dim: usize, order: usize, description: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    {
        FarDynamics {
            order,
            dim,
            map: DynamicsMap::Custom(Arc::new(f)),
            description: description.into(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn map(&self) -> &DynamicsMap {
        &self.map
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Evaluates `f` on the stacked lags `(s_{t-1}, ..., s_{t-p})`.
    pub fn apply(&self, lags: &[f64], out: &mut [f64]) {
        debug_assert_eq!(lags.len(), self.order * self.dim);
        match &self.map {
            DynamicsMap::Zero => out.iter_mut().for_each(|v| *v = 0.0),
            DynamicsMap::Sine { f } => {
                let q = lags.len();
                for (i, o) in out.iter_mut().enumerate() {
                    let row = &f[i * q..(i + 1) * q];
                    *o = row.iter().zip(lags).map(|(a, b)| a * b).sum::<f64>().sin();
                }
            }
            DynamicsMap::Custom(g) => g(lags, out),
        }
    }

    pub fn provenance(&self) -> DynamicsProvenance {
        let f_matrix = match &self.map {
            DynamicsMap::Sine { f } => Some(f.chunks(self.order * self.dim).map(<[f64]>::to_vec).collect()),
            _ => None,
        };
        DynamicsProvenance {
            description: self.description.clone(),
            order: self.order,
            dim: self.dim,
            f_matrix,
        }
    }
}

/// `f(u) = sin(F u)` with `F` a `dim x (order*dim)` matrix of i.i.d. uniform `[0,1)`
/// entries, drawn row by row.
pub fn make_random_sine_dynamics<R: Rng + ?Sized>(dim: usize, order: usize, rng: &mut R) -> Result<FarDynamics> {
    if dim == 0 || order == 0 {
        return Err(Error::Config(format!("sine dynamics needs dim, order >= 1 (got {dim}, {order})")));
    }
    let f: Vec<f64> = (0..dim * order * dim).map(|_| rng.random::<f64>()).collect();
    Ok(FarDynamics {
        order,
        dim,
        map: DynamicsMap::Sine { f },
        description: "sin(F u), F ~ U[0,1)".into(),
    })
}

/// Source of driving-noise vectors `e_t`.
pub trait NoiseSource {
    fn dim(&self) -> usize;
    fn fill(&mut self, out: &mut [f64]) -> Result<()>;
}

/// Replays the rows of a pre-drawn series in order.
pub struct SeriesNoise<'a> {
    series: &'a TimeSeries,
    next: usize,
}

impl<'a> SeriesNoise<'a> {
    pub fn new(series: &'a TimeSeries) -> Self {
        SeriesNoise { series, next: 0 }
    }
}

impl NoiseSource for SeriesNoise<'_> {
    fn dim(&self) -> usize {
        self.series.dim()
    }

    fn fill(&mut self, out: &mut [f64]) -> Result<()> {
        if self.next >= self.series.len() {
            return Err(Error::Config(format!(
                "noise series exhausted after {} draws",
                self.series.len()
            )));
        }
        out.copy_from_slice(self.series.row(self.next));
        self.next += 1;
        Ok(())
    }
}

pub struct ZeroNoise(pub usize);

impl NoiseSource for ZeroNoise {
    fn dim(&self) -> usize {
        self.0
    }

    fn fill(&mut self, out: &mut [f64]) -> Result<()> {
        out.iter_mut().for_each(|v| *v = 0.0);
        Ok(())
    }
}

/// Simulates the recursion with the first `order` states drawn from `noise`, then
/// `burn_in + len` steps; returns the last `len` states.
pub fn simulate_far(
    dynamics: &FarDynamics,
    noise: &mut dyn NoiseSource,
    len: usize,
    burn_in: usize,
) -> Result<TimeSeries> {
    let d = dynamics.dim();
    if noise.dim() != d {
        return Err(Error::Dimension(format!("noise dimension {} for {d}-dimensional dynamics", noise.dim())));
    }
    let mut init = vec![0.0; dynamics.order() * d];
    for row in init.chunks_exact_mut(d) {
        noise.fill(row)?;
    }
    let init = TimeSeries::from_rows(dynamics.order(), d, init)?;
    simulate_far_from(dynamics, &init, noise, len, burn_in)
}

/// As [`simulate_far`] with explicit initial states, oldest first.
pub fn simulate_far_from(
    dynamics: &FarDynamics,
    initial: &TimeSeries,
    noise: &mut dyn NoiseSource,
    len: usize,
    burn_in: usize,
) -> Result<TimeSeries> {
    let (p, d) = (dynamics.order(), dynamics.dim());
    if len == 0 {
        return Err(Error::Config("simulation length must be positive".into()));
    }
    if initial.len() != p || initial.dim() != d || noise.dim() != d {
        return Err(Error::Dimension(format!(
            "initial states {}x{} / noise dim {} for order {p}, dim {d}",
            initial.len(),
            initial.dim(),
            noise.dim()
        )));
    }
    // history[k] = s_{t-1-k}
    let mut history: Vec<f64> = (0..p).rev().flat_map(|k| initial.row(k).to_vec()).collect();
    let mut out = Vec::with_capacity(len * d);
    let mut next = vec![0.0; d];
    let mut e = vec![0.0; d];
    for step in 1..=burn_in + len {
        dynamics.apply(&history, &mut next);
        noise.fill(&mut e)?;
        for (n, ei) in next.iter_mut().zip(&e) {
            *n += ei;
        }
        if next.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_LIMIT) {
            return Err(Error::Unstable {
                step,
                limit: DIVERGENCE_LIMIT,
            });
        }
        history.rotate_right(d);
        history[..d].copy_from_slice(&next);
        if step > burn_in {
            out.extend_from_slice(&next);
        }
    }
    TimeSeries::from_rows(len, d, out)
}
