//! Kernel canonical correlation between one-dimensional series.
//!
//! With centered Gram matrices `K_a = U_a Λ_a U_aᵀ` and regularizer `(K + κI)²`,
//! the canonical correlations are the singular values of `R_a R_b`, where
//! `R = K (K + κI)^{-1} = U diag(λ / (λ + κ)) Uᵀ`. Gram matrices of smooth
//! kernels are numerically low rank, so each series is factored once by pivoted
//! incomplete Cholesky and every pair reduces to a small `r_a x r_b` problem.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen_sorted;
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KccaOptions {
    /// Series are subsampled (evenly, same indices) to at most this many points.
    pub max_points: usize,
    /// Regularization `κ`.
    pub kappa: f64,
    /// Incomplete Cholesky stops once the residual trace falls below this.
    pub cholesky_tol: f64,
    pub max_rank: usize,
}

impl Default for KccaOptions {
    fn default() -> Self {
        KccaOptions {
            max_points: 1_000,
            kappa: 0.1,
            cholesky_tol: 1e-4,
            max_rank: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KccaScore {
    pub rho: f64,
    /// Set when either series had zero variance.
    pub degenerate: bool,
}

/// Shrunk orthonormal eigenbasis `U diag(λ / (λ + κ))` of one centered Gram matrix.
#[derive(Debug, Clone)]
pub struct KccaFactor {
    basis: DMatrix<f64>,
    degenerate: bool,
}

fn subsample_indices(n: usize, max_points: usize) -> Vec<usize> {
    let m = n.min(max_points);
    (0..m).map(|k| k * n / m).collect()
}

fn median_abs_difference(a: &[f64]) -> f64 {
    let mut d: Vec<f64> = Vec::with_capacity(a.len() * (a.len() - 1) / 2);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            d.push((a[i] - a[j]).abs());
        }
    }
    let mid = d.len() / 2;
    let (_, m, _) = d.select_nth_unstable_by(mid, f64::total_cmp);
    *m
}

/// Pivoted incomplete Cholesky of the Gaussian Gram matrix: `K ~ G Gᵀ`.
fn incomplete_cholesky(a: &[f64], width: f64, tol: f64, max_rank: usize) -> DMatrix<f64> {
    let n = a.len();
    let gamma = 0.5 / (width * width);
    let mut residual = vec![1.0; n];
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut pivoted = vec![false; n];
    while cols.len() < max_rank.min(n) {
        let trace: f64 = residual.iter().sum();
        if trace < tol {
            break;
        }
        let p = (0..n)
            .filter(|&i| !pivoted[i])
            .max_by(|&i, &j| residual[i].total_cmp(&residual[j]).then(j.cmp(&i)))
            .expect("unpivoted index exists while rank < n");
        let gp = residual[p].sqrt();
        if !(gp > 0.0) {
            break;
        }
        let mut col = vec![0.0; n];
        col[p] = gp;
        for i in 0..n {
            if pivoted[i] || i == p {
                continue;
            }
            let diff = a[i] - a[p];
            let mut k = (-gamma * diff * diff).exp();
            for c in &cols {
                k -= c[i] * c[p];
            }
            col[i] = k / gp;
            residual[i] = (residual[i] - col[i] * col[i]).max(0.0);
        }
        residual[p] = 0.0;
        pivoted[p] = true;
        cols.push(col);
    }
    DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

impl KccaFactor {
    /// Factor of `series` after even subsampling to `options.max_points`.
    pub fn new(series: &[f64], options: &KccaOptions) -> Result<Self> {
        if series.len() < 8 {
            return Err(Error::Config(format!("KCCA needs at least 8 samples, got {}", series.len())));
        }
        if !(options.kappa > 0.0) {
            return Err(Error::Config(format!("KCCA regularizer {} must be positive", options.kappa)));
        }
        let idx = subsample_indices(series.len(), options.max_points);
        let a: Vec<f64> = idx.iter().map(|&i| series[i]).collect();
        let n = a.len();
        let (lo, hi) = a.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        if !(hi - lo > 1e-12 * hi.abs().max(lo.abs()).max(1e-300)) {
            return Ok(KccaFactor {
                basis: DMatrix::zeros(n, 0),
                degenerate: true,
            });
        }
        let mut width = median_abs_difference(&a);
        if !(width > 0.0) {
            // more than half of the pairs tie; fall back to the spread
            width = (hi - lo) / 2.0;
        }
        let mut g = incomplete_cholesky(&a, width, options.cholesky_tol, options.max_rank);
        for mut c in g.column_iter_mut() {
            let m = c.mean();
            c.add_scalar_mut(-m);
        }
        // eigenpairs of the centered Gram G Gᵀ from the small matrix Gᵀ G
        let (vals, vecs) = symmetric_eigen_sorted(&(g.transpose() * &g));
        let top = vals.last().copied().unwrap_or(0.0);
        let keep: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > 1e-12 * top.max(1e-300)).collect();
        let mut basis = DMatrix::zeros(n, keep.len());
        for (dst, &k) in keep.iter().enumerate() {
            let lambda = vals[k];
            let u = &g * vecs.column(k) / lambda.sqrt();
            basis.set_column(dst, &(u * (lambda / (lambda + options.kappa))));
        }
        Ok(KccaFactor { basis, degenerate: false })
    }

    fn order_key(&self) -> (usize, u64) {
        (self.rank(), self.basis.get(0).map_or(0, |v| v.to_bits()))
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Largest regularized canonical correlation with `other`, clipped to `[0, 1]`.
    pub fn score(&self, other: &KccaFactor) -> Result<KccaScore> {
        if self.basis.nrows() != other.basis.nrows() {
            return Err(Error::Dimension("KCCA factors built from different sample counts".into()));
        }
        if self.degenerate || other.degenerate || self.rank() == 0 || other.rank() == 0 {
            return Ok(KccaScore {
                rho: 0.0,
                degenerate: self.degenerate || other.degenerate,
            });
        }
        // fixed operand order keeps the score bitwise symmetric
        let (x, y) = if self.order_key() <= other.order_key() { (self, other) } else { (other, self) };
        let cross = x.basis.transpose() * &y.basis;
        let rho = cross.singular_values().max();
        Ok(KccaScore {
            rho: rho.clamp(0.0, 1.0),
            degenerate: false,
        })
    }
}

/// KCCA dependence between two equally long series.
pub fn kcca_dependence(a: &[f64], b: &[f64], options: &KccaOptions) -> Result<KccaScore> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!("series of length {} and {}", a.len(), b.len())));
    }
    KccaFactor::new(a, options)?.score(&KccaFactor::new(b, options)?)
}

/// Symmetric pairwise dependence of ICA coordinates with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceMatrix {
    pub s: DMatrix<f64>,
    /// Coordinates with zero variance (their rows are zero).
    pub degenerate: Vec<usize>,
}

impl DependenceMatrix {
    pub fn from_matrix(s: DMatrix<f64>) -> Result<Self> {
        if !s.is_square() {
            return Err(Error::Dimension("dependence matrix must be square".into()));
        }
        for i in 0..s.nrows() {
            if s[(i, i)] != 0.0 {
                return Err(Error::Config("dependence matrix diagonal must be zero".into()));
            }
            for j in 0..i {
                let v = s[(i, j)];
                if v != s[(j, i)] || !(0.0..=1.0).contains(&v) {
                    return Err(Error::Config(format!("entry ({i}, {j}) is asymmetric or outside [0, 1]")));
                }
            }
        }
        Ok(DependenceMatrix {
            s,
            degenerate: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.s[(i, j)]
    }
}

pub fn dependence_matrix(y: &TimeSeries, options: &KccaOptions) -> Result<DependenceMatrix> {
    let d = y.dim();
    if d < 2 {
        return Err(Error::Dimension("dependence matrix needs at least two coordinates".into()));
    }
    let factors: Vec<KccaFactor> = (0..d)
        .into_par_iter()
        .map(|j| KccaFactor::new(&y.column(j), options))
        .collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let scores: Vec<KccaScore> = pairs
        .par_iter()
        .map(|&(i, j)| factors[i].score(&factors[j]))
        .collect::<Result<_>>()?;
    let mut s = DMatrix::zeros(d, d);
    for (&(i, j), sc) in pairs.iter().zip(&scores) {
        s[(i, j)] = sc.rho;
        s[(j, i)] = sc.rho;
    }
    let degenerate = (0..d).filter(|&j| factors[j].degenerate).collect();
    Ok(DependenceMatrix { s, degenerate })
}
