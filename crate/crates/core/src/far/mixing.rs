use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Invertible square mixing matrix with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingSpec {
    a: DMatrix<f64>,
    pub seed: Option<u64>,
    pub construction: String,
}

impl MixingSpec {
    /// Rejects matrices whose smallest singular value is below `1e-10` times the largest.
    pub fn new(a: DMatrix<f64>, seed: Option<u64>, construction: impl Into<String>) -> Result<Self> {
        if !a.is_square() || a.nrows() == 0 {
            return Err(Error::Dimension(format!("mixing matrix is {}x{}", a.nrows(), a.ncols())));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("mixing matrix entry".into()));
        }
        let sv = a.singular_values();
        let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        let ratio = if hi > 0.0 { lo / hi } else { 0.0 };
        if ratio <= 1e-10 {
            return Err(Error::SingularMixing { ratio });
        }
        Ok(MixingSpec {
            a,
            seed,
            construction: construction.into(),
        })
    }

    pub fn identity(d: usize) -> Self {
        MixingSpec {
            a: DMatrix::identity(d, d),
            seed: None,
            construction: "identity".into(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// `W = A^{-1}`.
    pub fn unmixing(&self) -> DMatrix<f64> {
        self.a
            .clone()
            .try_inverse()
            .expect("invertibility checked at construction")
    }
}

/// `x_t = A s_t` for every row.
pub fn mix(spec: &MixingSpec, s: &TimeSeries) -> Result<TimeSeries> {
    if s.dim() != spec.dim() {
        return Err(Error::Dimension(format!(
            "{}-dimensional sources for a {}x{} mixing matrix",
            s.dim(),
            spec.dim(),
            spec.dim()
        )));
    }
    s.transform(spec.matrix())
}
