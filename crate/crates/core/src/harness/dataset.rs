//! Hidden sources for the three experiment families.

use serde::Serialize;

use crate::error::Result;
use crate::far::{make_random_sine_dynamics, simulate_far, DynamicsProvenance, FarDynamics, SeriesNoise};
use crate::rng::{stage_rng, Stage};
use crate::series::TimeSeries;
use crate::synth::{face_density, generate_ikeda_sources, sample_from_density, sample_geometric};

use super::config::{Dataset, DynamicsKind, ExperimentConfig};

#[derive(Debug, Clone)]
pub struct Sources {
    /// `T x D` hidden sources, components in ascending dimension order.
    pub s: TimeSeries,
    pub dims: Vec<usize>,
    pub dynamics: Option<DynamicsProvenance>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SourceSummary {
    pub dims: Vec<usize>,
    pub dynamics: Option<DynamicsProvenance>,
}

/// Centered i.i.d. driver draws `e_t`, one block of columns per component.
pub fn generate_drivers(config: &ExperimentConfig, n: usize, seed: u64) -> Result<TimeSeries> {
    let mut rng = stage_rng(seed, Stage::Drivers);
    let parts = match config.dataset {
        Dataset::Smiley => config
            .expressions()?
            .into_iter()
            .map(|e| sample_from_density(&face_density(e, config.face_size), n, &mut rng))
            .collect::<Result<Vec<_>>>()?,
        Dataset::DGeom => config
            .forms()?
            .into_iter()
            .map(|f| {
                let mut part = sample_geometric(f, n, &mut rng)?;
                part.center();
                Ok(part)
            })
            .collect::<Result<Vec<_>>>()?,
        Dataset::Ikeda => return Err(crate::Error::Config("ikeda sources have no drivers".into())),
    };
    TimeSeries::hstack(&parts)
}

/// Sources of run `seed`: ikeda trajectories, or the fAR recursion driven by
/// dataset-specific drivers.
pub fn generate_sources(config: &ExperimentConfig, seed: u64) -> Result<Sources> {
    let dims = config.source_dims()?;
    let d: usize = dims.iter().sum();
    if config.dataset == Dataset::Ikeda {
        return Ok(Sources {
            s: generate_ikeda_sources(&config.ikeda_params(), config.samples)?,
            dims,
            dynamics: None,
        });
    }
    let drivers = generate_drivers(config, config.order + config.burn_in + config.samples, seed)?;
    let dynamics = match config.dynamics {
        DynamicsKind::Sine => make_random_sine_dynamics(d, config.order, &mut stage_rng(seed, Stage::Dynamics))?,
        DynamicsKind::Zero => FarDynamics::zero(d, config.order),
    };
    let s = simulate_far(&dynamics, &mut SeriesNoise::new(&drivers), config.samples, config.burn_in)?;
    Ok(Sources {
        s,
        dims,
        dynamics: Some(dynamics.provenance()),
    })
}
