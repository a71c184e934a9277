//! Experiment configuration, read from JSON.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::far::{InnovationOptions, KernelMode, KernelSpec};
use crate::ica::FastIcaOptions;
use crate::isa::KccaOptions;
use crate::synth::{Expression, GeomForm, GeomVariant, IkedaParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dataset {
    /// Face-image densities, two-dimensional components.
    #[serde(alias = "smiley-like")]
    Smiley,
    /// Uniform distributions on geometric forms of the listed dimensions.
    DGeom,
    /// Deterministic ikeda trajectories used directly as sources.
    Ikeda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// Recursive Nadaraya-Watson innovations.
    #[default]
    FarIpa,
    /// Least-squares linear AR residuals.
    ArIpa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clustering {
    /// Greedy swaps with the true component dimensions.
    Greedy,
    /// Spectral clustering; the dimensions are inferred.
    Ncut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DynamicsKind {
    /// `f(u) = sin(F u)` with `F` uniform on `[0, 1]`.
    #[default]
    Sine,
    /// `f = 0`: the sources are the drivers themselves.
    Zero,
}

fn one() -> usize {
    1
}
fn default_beta_c() -> f64 {
    0.25
}
fn default_burn_in() -> usize {
    100
}
fn default_ica_retries() -> usize {
    2
}
fn default_greedy_restarts() -> usize {
    3
}
fn default_ncut_restarts() -> usize {
    20
}
fn default_face_size() -> usize {
    64
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: Dataset,
    /// Component dimensions. Defaults to `[2, 2]` for smiley and one 2 per ikeda
    /// component; required for d-geom.
    #[serde(default)]
    pub dims: Option<Vec<usize>>,
    /// Observation count `T`.
    #[serde(alias = "T")]
    pub samples: usize,
    /// fAR order `p`.
    #[serde(default = "one", alias = "p")]
    pub order: usize,
    /// Recursive bandwidth exponent `beta = beta_c / (p D)`.
    #[serde(default = "default_beta_c")]
    pub beta_c: f64,
    #[serde(default)]
    pub estimator: Estimator,
    #[serde(default = "one")]
    pub runs: usize,
    /// Run `r` uses seed `seed + r`.
    #[serde(default)]
    pub seed: u64,
    /// Defaults to greedy for smiley and d-geom, NCut for ikeda.
    #[serde(default)]
    pub clustering: Option<Clustering>,
    /// Group count handed to NCut; inferred from the eigengap when absent.
    #[serde(default)]
    pub groups: Option<usize>,
    #[serde(default)]
    pub expressions: Option<Vec<Expression>>,
    #[serde(default)]
    pub forms: Option<Vec<GeomVariant>>,
    #[serde(default)]
    pub ikeda: Option<Vec<IkedaParams>>,
    #[serde(default)]
    pub dynamics: DynamicsKind,
    /// Replaces the recursive kernel derived from `beta_c`.
    #[serde(default)]
    pub kernel: Option<KernelMode>,
    #[serde(default)]
    pub innovations: InnovationOptions,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default)]
    pub ica: FastIcaOptions,
    /// Extra FastICA attempts with fresh starts after non-convergence.
    #[serde(default = "default_ica_retries")]
    pub ica_retries: usize,
    #[serde(default)]
    pub kcca: KccaOptions,
    #[serde(default = "default_greedy_restarts")]
    pub greedy_restarts: usize,
    #[serde(default = "default_ncut_restarts")]
    pub ncut_restarts: usize,
    /// Side length of the rendered face images.
    #[serde(default = "default_face_size")]
    pub face_size: usize,
    /// Debug switch: `A = I` instead of a random orthogonal mixing.
    #[serde(default)]
    pub identity_mixing: bool,
    /// Record per-stage wall-times (the only nondeterministic report fields).
    #[serde(default = "yes")]
    pub record_timings: bool,
}

impl ExperimentConfig {
    /// Configuration with defaults for everything but the dataset and `T`.
    pub fn new(dataset: Dataset, samples: usize) -> Self {
        ExperimentConfig {
            dataset,
            dims: None,
            samples,
            order: 1,
            beta_c: default_beta_c(),
            estimator: Estimator::default(),
            runs: 1,
            seed: 0,
            clustering: None,
            groups: None,
            expressions: None,
            forms: None,
            ikeda: None,
            dynamics: DynamicsKind::default(),
            kernel: None,
            innovations: InnovationOptions::default(),
            burn_in: default_burn_in(),
            ica: FastIcaOptions::default(),
            ica_retries: default_ica_retries(),
            kcca: KccaOptions::default(),
            greedy_restarts: default_greedy_restarts(),
            ncut_restarts: default_ncut_restarts(),
            face_size: default_face_size(),
            identity_mixing: false,
            record_timings: true,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Component dimensions in ascending order.
    pub fn source_dims(&self) -> Result<Vec<usize>> {
        let mut dims = match (self.dataset, &self.dims) {
            (_, Some(d)) => d.clone(),
            (Dataset::Smiley, None) => vec![2, 2],
            (Dataset::Ikeda, None) => vec![2; self.ikeda_params().len()],
            (Dataset::DGeom, None) => return Err(Error::Config("d-geom needs `dims`".into())),
        };
        dims.sort_unstable();
        Ok(dims)
    }

    pub fn dim(&self) -> Result<usize> {
        Ok(self.source_dims()?.iter().sum())
    }

    pub fn clustering(&self) -> Clustering {
        self.clustering.unwrap_or(match self.dataset {
            Dataset::Ikeda => Clustering::Ncut,
            _ => Clustering::Greedy,
        })
    }

    pub fn expressions(&self) -> Result<Vec<Expression>> {
        let m = self.source_dims()?.len();
        match &self.expressions {
            Some(e) if e.len() != m => Err(Error::Config(format!("{} expressions for {m} components", e.len()))),
            Some(e) => Ok(e.clone()),
            None if m > Expression::ALL.len() => Err(Error::Config(format!("only {} faces for {m} components", Expression::ALL.len()))),
            None => Ok(Expression::ALL[..m].to_vec()),
        }
    }

    /// Forms for the ascending component dimensions. By default the first
    /// two-dimensional component is the square skeleton and the others cycle
    /// through sphere, cube diagonals and broken line.
    pub fn forms(&self) -> Result<Vec<GeomForm>> {
        let dims = self.source_dims()?;
        let variants = match &self.forms {
            Some(f) if f.len() != dims.len() => {
                return Err(Error::Config(format!("{} forms for {} components", f.len(), dims.len())))
            }
            Some(f) => f.clone(),
            None => {
                let cycle = [GeomVariant::SphereSurface, GeomVariant::CubeDiagonals, GeomVariant::BrokenLine];
                let skeleton = dims.iter().position(|&d| d == 2);
                let mut next = 0;
                dims.iter()
                    .enumerate()
                    .map(|(m, &d)| {
                        if Some(m) == skeleton {
                            return GeomVariant::SquareSkeleton;
                        }
                        let mut v = cycle[next % cycle.len()];
                        next += 1;
                        if d == 1 && v == GeomVariant::SphereSurface {
                            v = cycle[next % cycle.len()];
                            next += 1;
                        }
                        v
                    })
                    .collect()
            }
        };
        dims.iter().zip(variants).map(|(&d, v)| GeomForm::new(v, d)).collect()
    }

    pub fn ikeda_params(&self) -> Vec<IkedaParams> {
        self.ikeda.clone().unwrap_or_else(crate::synth::default_ikeda_params)
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        let reg_dim = self.order * self.dim()?;
        match self.kernel {
            Some(KernelMode::Fixed { h }) => KernelSpec::fixed(h, reg_dim),
            Some(KernelMode::Recursive { beta }) => KernelSpec::recursive(beta, reg_dim),
            None => KernelSpec::from_beta_c(self.beta_c, reg_dim),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.order == 0 {
            return Err(Error::Config("order must be at least 1".into()));
        }
        let dims = self.source_dims()?;
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Config(format!("invalid component dimensions {dims:?}")));
        }
        let d: usize = dims.iter().sum();
        if self.samples <= self.order * d + 2 {
            return Err(Error::Config(format!("T = {} too small for D = {d}, p = {}", self.samples, self.order)));
        }
        match self.dataset {
            Dataset::Smiley => {
                if dims.iter().any(|&k| k != 2) {
                    return Err(Error::Config("smiley components are two-dimensional".into()));
                }
                self.expressions()?;
                if self.face_size == 0 {
                    return Err(Error::Config("face_size must be positive".into()));
                }
            }
            Dataset::DGeom => {
                self.forms()?;
            }
            Dataset::Ikeda => {
                let m = self.ikeda_params().len();
                if m == 0 || dims != vec![2; m] {
                    return Err(Error::Config(format!("ikeda with {m} components needs dims of 2, got {dims:?}")));
                }
            }
        }
        if self.estimator == Estimator::FarIpa {
            self.kernel_spec()?;
        }
        if let Some(m) = self.groups {
            if m == 0 || m > d {
                return Err(Error::Config(format!("cannot form {m} groups from {d} coordinates")));
            }
        }
        if !(self.ica.tol > 0.0) || self.ica.max_iter == 0 {
            return Err(Error::Config("FastICA needs tol > 0 and max_iter >= 1".into()));
        }
        Ok(())
    }
}
