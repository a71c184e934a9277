//! The functional autoregressive source model and innovation estimation.
//!
//! Hidden sources follow `s_t = f(s_{t-1}, ..., s_{t-p}) + e_t` and are observed
//! as `x_t = A s_t`. Since `A` is invertible the observation is itself a
//! functional AR process with innovation `A e_t`, which kernel regression of
//! `x_t` on its own past recovers.

mod dynamics;
mod innovations;
mod kernel;
mod linear;
mod mixing;
mod regress;

pub use dynamics::{
    make_random_sine_dynamics, simulate_far, simulate_far_from, DynamicsMap, DynamicsProvenance, FarDynamics, NoiseSource,
    SeriesNoise, ZeroNoise, DIVERGENCE_LIMIT,
};
pub use innovations::{estimate_innovations, lagged_pairs, InnovationEstimate, InnovationOptions};
pub use kernel::{KernelMode, KernelSpec};
pub use linear::{fit_linear_ar, LinearArFit};
pub use mixing::{mix, MixingSpec};
pub use regress::{nw_regress, recursive_nw_regress, TrainingSet};
