use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bandwidth rule of the Gaussian kernel `K(z) = (2 pi)^{-q/2} exp(-|z|^2 / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum KernelMode {
    /// `K((u - u_t) / h)`.
    Fixed { h: f64 },
    /// `t^{beta q} K(t^beta (u - u_t))`, i.e. bandwidth `t^{-beta}` for sample `t`.
    Recursive { beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub mode: KernelMode,
    /// Regressor dimension `q`, used in the normalization and the recursive exponent.
    pub reg_dim: usize,
}

impl KernelSpec {
    pub fn fixed(h: f64, reg_dim: usize) -> Result<Self> {
        Self::validated(KernelMode::Fixed { h }, reg_dim)
    }

    pub fn recursive(beta: f64, reg_dim: usize) -> Result<Self> {
        Self::validated(KernelMode::Recursive { beta }, reg_dim)
    }

    /// Recursive kernel with `beta = beta_c / reg_dim`, `beta_c` in `(0, 1)`.
    pub fn from_beta_c(beta_c: f64, reg_dim: usize) -> Result<Self> {
        if !(beta_c > 0.0 && beta_c < 1.0) {
            return Err(Error::Config(format!("beta_c = {beta_c} outside (0, 1)")));
        }
        Self::recursive(beta_c / reg_dim as f64, reg_dim)
    }

    fn validated(mode: KernelMode, reg_dim: usize) -> Result<Self> {
        let spec = KernelSpec { mode, reg_dim };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reg_dim == 0 {
            return Err(Error::Config("kernel regressor dimension must be positive".into()));
        }
        match self.mode {
            KernelMode::Fixed { h } if !(h > 0.0 && h.is_finite()) => {
                Err(Error::Config(format!("bandwidth h = {h} must be positive")))
            }
            KernelMode::Recursive { beta } if !(beta > 0.0 && beta < 1.0 / self.reg_dim as f64) => Err(
                Error::Config(format!("beta = {beta} outside (0, 1/{})", self.reg_dim)),
            ),
            _ => Ok(()),
        }
    }

    /// Log of the Gaussian normalizing constant `(2 pi)^{-q/2}`.
    pub(crate) fn log_norm(&self) -> f64 {
        -0.5 * self.reg_dim as f64 * (2.0 * std::f64::consts::PI).ln()
    }
}
