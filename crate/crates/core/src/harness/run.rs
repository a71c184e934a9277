//! Seeded end-to-end runs and their aggregation.

use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::far::{estimate_innovations, fit_linear_ar, mix, DynamicsProvenance, MixingSpec};
use crate::ica::{center_whiten, fastica};
use crate::isa::{
    assemble_separation, dependence_matrix, greedy_cluster, ncut_cluster, GreedyOptions, NcutOptions, Partition,
};
use crate::linalg::haar_orthogonal;
use crate::rng::{stage_rng, Stage};
use crate::series::TimeSeries;

use super::config::{Clustering, Estimator, ExperimentConfig};
use super::dataset::generate_sources;
use super::stats::{boxplot_stats, BoxStats};

/// Haar-distributed orthogonal mixing from the QR factorization of a Gaussian matrix.
pub fn random_orthogonal<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> MixingSpec {
    MixingSpec::new(haar_orthogonal(d, rng), None, "haar-qr").expect("orthogonal matrices are invertible")
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub generate: f64,
    pub innovations: f64,
    pub whiten: f64,
    pub ica: f64,
    pub dependence: f64,
    pub cluster: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IcaDiagnostics {
    pub converged: bool,
    pub iterations: usize,
    pub attempts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    /// `None` when the run failed or the index is undefined (single block on both sides).
    pub amari: Option<f64>,
    pub error: Option<String>,
    pub true_dims: Vec<usize>,
    pub est_dims: Option<Vec<usize>>,
    pub partition: Option<Partition>,
    pub g: Option<DMatrix<f64>>,
    pub block_sums: Option<DMatrix<f64>>,
    pub w_isa: Option<DMatrix<f64>>,
    pub mixing: Option<MixingSpec>,
    pub dynamics: Option<DynamicsProvenance>,
    pub ica: Option<IcaDiagnostics>,
    /// Kernel-regression queries answered by the global mean.
    pub out_of_support: Option<usize>,
    pub dependence: Option<DMatrix<f64>>,
    pub ncut_eigenvalues: Option<Vec<f64>>,
    pub timings: Option<StageTimings>,
}

impl RunRecord {
    fn empty(run: usize, seed: u64, true_dims: Vec<usize>) -> Self {
        RunRecord {
            run,
            seed,
            amari: None,
            error: None,
            true_dims,
            est_dims: None,
            partition: None,
            g: None,
            block_sums: None,
            w_isa: None,
            mixing: None,
            dynamics: None,
            ica: None,
            out_of_support: None,
            dependence: None,
            ncut_eigenvalues: None,
            timings: None,
        }
    }

    /// Estimated dimensions equal the true ones as multisets.
    pub fn dims_recovered(&self) -> bool {
        self.est_dims.as_ref() == Some(&self.true_dims)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub records: Vec<RunRecord>,
    pub completed: usize,
    pub failed: usize,
    /// Over the runs with a defined Amari-index.
    pub amari: Option<BoxStats>,
}

impl RunReport {
    pub fn amari_values(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.amari).collect()
    }

    pub fn median_amari(&self) -> Option<f64> {
        self.amari.as_ref().map(|b| b.q2)
    }
}

struct Clock {
    enabled: bool,
    start: Instant,
    t: StageTimings,
}

impl Clock {
    fn lap(&mut self) -> f64 {
        if !self.enabled {
            return 0.0;
        }
        let now = Instant::now();
        let secs = (now - self.start).as_secs_f64();
        self.start = now;
        secs
    }
}

/// Separation stages on observations `x`: innovations, whitening, FastICA,
/// dependence and clustering. Fills the record fields it produces.
fn separate(
    config: &ExperimentConfig,
    seed: u64,
    x: &TimeSeries,
    mixing: &MixingSpec,
    true_dims: &[usize],
    record: &mut RunRecord,
    clock: &mut Clock,
) -> Result<()> {
    let innovations = match config.estimator {
        Estimator::FarIpa => {
            let est = estimate_innovations(x, config.order, &config.kernel_spec()?, &config.innovations)?;
            record.out_of_support = Some(est.out_of_support);
            est.residuals
        }
        Estimator::ArIpa => fit_linear_ar(x, config.order)?.residuals,
    };
    clock.t.innovations = clock.lap();

    let (z, whitening) = center_whiten(&innovations)?;
    clock.t.whiten = clock.lap();

    let mut rng = stage_rng(seed, Stage::Ica);
    let mut attempts = 0;
    let ica = loop {
        attempts += 1;
        let result = fastica(&z, &config.ica, &mut rng)?;
        if result.converged || attempts > config.ica_retries {
            break result;
        }
        log::warn!("run seed {seed}: FastICA did not converge, attempt {attempts}");
    };
    record.ica = Some(IcaDiagnostics {
        converged: ica.converged,
        iterations: ica.iterations,
        attempts,
    });
    clock.t.ica = clock.lap();

    let y = z.transform(&ica.w)?;
    let s = dependence_matrix(&y, &config.kcca)?;
    clock.t.dependence = clock.lap();

    let partition = match config.clustering() {
        Clustering::Greedy => greedy_cluster(
            &s,
            true_dims,
            &GreedyOptions {
                restarts: config.greedy_restarts,
                seed: seed.wrapping_add(Stage::Clustering as u64),
            },
        )?,
        Clustering::Ncut => {
            let out = ncut_cluster(
                &s,
                config.groups,
                &NcutOptions {
                    restarts: config.ncut_restarts,
                    seed: seed.wrapping_add(Stage::Clustering as u64),
                },
            )?;
            if let Some(note) = &out.note {
                log::info!("run seed {seed}: {note}");
            }
            record.ncut_eigenvalues = Some(out.eigenvalues);
            out.partition
        }
    };
    record.dependence = Some(s.s);
    let sep = assemble_separation(&whitening, &ica.w, &partition, Some((mixing.matrix(), true_dims)))?;
    clock.t.cluster = clock.lap();

    record.est_dims = Some(sep.est_dims);
    record.partition = Some(sep.partition);
    record.amari = sep.amari;
    record.g = sep.g;
    record.block_sums = sep.block_sums;
    record.w_isa = Some(sep.w_isa);
    Ok(())
}

/// One full run with seed `config.seed + run`.
pub fn run_single(config: &ExperimentConfig, run: usize) -> RunRecord {
    let seed = config.seed.wrapping_add(run as u64);
    let true_dims = config.source_dims().unwrap_or_default();
    let mut record = RunRecord::empty(run, seed, true_dims.clone());
    let begin = Instant::now();
    let mut clock = Clock {
        enabled: config.record_timings,
        start: begin,
        t: StageTimings::default(),
    };
    let outcome = (|| -> Result<()> {
        let sources = generate_sources(config, seed)?;
        record.dynamics = sources.dynamics;
        let d = sources.s.dim();
        let mut mixing = if config.identity_mixing {
            MixingSpec::identity(d)
        } else {
            random_orthogonal(d, &mut stage_rng(seed, Stage::Mixing))
        };
        mixing.seed = Some(seed);
        let x = mix(&mixing, &sources.s)?;
        record.mixing = Some(mixing.clone());
        clock.t.generate = clock.lap();
        separate(config, seed, &x, &mixing, &true_dims, &mut record, &mut clock)
    })();
    if let Err(e) = outcome {
        log::warn!("run {run} (seed {seed}) failed: {e}");
        record.error = Some(e.to_string());
    }
    if config.record_timings {
        clock.t.total = begin.elapsed().as_secs_f64();
        record.timings = Some(clock.t);
    }
    record
}

/// All runs of `config`, executed in parallel and joined in run order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let records: Vec<RunRecord> = (0..config.runs).into_par_iter().map(|r| run_single(config, r)).collect();
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    let values: Vec<f64> = records.iter().filter_map(|r| r.amari).collect();
    let amari = if values.is_empty() { None } else { Some(boxplot_stats(&values)?) };
    Ok(RunReport {
        config: config.clone(),
        completed: records.len() - failed,
        failed,
        records,
        amari,
    })
}
