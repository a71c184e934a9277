//! Uniform samplers on geometric forms.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeomVariant {
    /// Surface of the unit ball.
    SphereSurface,
    /// Main diagonals of the unit cube `[0,1]^d`.
    CubeDiagonals,
    /// Path `0 -> e1 -> e1+e2 -> ... -> e1+...+ed`.
    BrokenLine,
    /// Boundary of the unit square.
    SquareSkeleton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeomForm {
    pub variant: GeomVariant,
    pub dim: usize,
}

impl GeomForm {
    pub fn new(variant: GeomVariant, dim: usize) -> Result<Self> {
        let form = GeomForm { variant, dim };
        form.validate()?;
        Ok(form)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.variant {
            GeomVariant::SphereSurface => self.dim >= 2,
            GeomVariant::CubeDiagonals => (1..=62).contains(&self.dim),
            GeomVariant::BrokenLine => self.dim >= 1,
            GeomVariant::SquareSkeleton => self.dim == 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "unsupported geometric form {:?} in dimension {}",
                self.variant, self.dim
            )))
        }
    }
}

/// `n` points distributed uniformly on `form`, one per row.
pub fn sample_geometric<R: Rng + ?Sized>(form: GeomForm, n: usize, rng: &mut R) -> Result<TimeSeries> {
    form.validate()?;
    if n == 0 {
        return Err(Error::Config("sample count must be positive".into()));
    }
    let d = form.dim;
    let mut data = vec![0.0; n * d];
    for p in data.chunks_exact_mut(d) {
        match form.variant {
            GeomVariant::SphereSurface => loop {
                p.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
                let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    p.iter_mut().for_each(|v| *v /= norm);
                    break;
                }
            },
            GeomVariant::CubeDiagonals => {
                // corner with first coordinate 0, remaining bits random; segment to its opposite
                let bits: u64 = rng.random_range(0..1u64 << (d - 1));
                let t: f64 = rng.random();
                for (k, v) in p.iter_mut().enumerate() {
                    let corner = if k == 0 { 0.0 } else { ((bits >> (k - 1)) & 1) as f64 };
                    *v = corner + t * (1.0 - 2.0 * corner);
                }
            }
            GeomVariant::BrokenLine => {
                let pos = rng.random::<f64>() * d as f64;
                let seg = (pos.floor() as usize).min(d - 1);
                let t = pos - seg as f64;
                for (k, v) in p.iter_mut().enumerate() {
                    *v = match k.cmp(&seg) {
                        std::cmp::Ordering::Less => 1.0,
                        std::cmp::Ordering::Equal => t,
                        std::cmp::Ordering::Greater => 0.0,
                    };
                }
            }
            GeomVariant::SquareSkeleton => {
                let pos = rng.random::<f64>() * 4.0;
                let edge = (pos.floor() as usize).min(3);
                let t = pos - edge as f64;
                let (u, v) = match edge {
                    0 => (t, 0.0),
                    1 => (1.0, t),
                    2 => (1.0 - t, 1.0),
                    _ => (0.0, 1.0 - t),
                };
                p[0] = u;
                p[1] = v;
            }
        }
    }
    TimeSeries::from_rows(n, d, data)
}
