//! Whitening and symmetric FastICA.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{haar_orthogonal, inv_sqrt_symmetric, symmetric_eigen_sorted};
use crate::series::TimeSeries;

/// `z = V (x - mean)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhiteningTransform {
    pub mean: Vec<f64>,
    pub v: DMatrix<f64>,
    pub v_inv: DMatrix<f64>,
}

impl WhiteningTransform {
    pub fn apply(&self, x: &TimeSeries) -> Result<TimeSeries> {
        let mut centered = x.clone();
        for t in 0..centered.len() {
            for (a, m) in centered.row_mut(t).iter_mut().zip(&self.mean) {
                *a -= m;
            }
        }
        centered.transform(&self.v)
    }
}

/// Centers `x` and whitens it through the eigendecomposition `C = U Lambda U^T` of
/// its sample covariance, `V = U Lambda^{-1/2} U^T` (symmetric whitening, so data
/// that is already white is left unrotated).
pub fn center_whiten(x: &TimeSeries) -> Result<(TimeSeries, WhiteningTransform)> {
    let d = x.dim();
    if x.len() <= d {
        return Err(Error::DegenerateData(format!("{} samples for {d} dimensions", x.len())));
    }
    let (values, vectors) = symmetric_eigen_sorted(&x.covariance());
    let largest = values[d - 1];
    if !(values[0] > 1e-12 * largest) {
        return Err(Error::DegenerateData(format!(
            "covariance is rank deficient (eigenvalues {:e} .. {:e})",
            values[0], largest
        )));
    }
    let inv_sqrt = DVector::from_iterator(d, values.iter().map(|l| 1.0 / l.sqrt()));
    let sqrt = DVector::from_iterator(d, values.iter().map(|l| l.sqrt()));
    let v = &vectors * DMatrix::from_diagonal(&inv_sqrt) * vectors.transpose();
    let v_inv = &vectors * DMatrix::from_diagonal(&sqrt) * vectors.transpose();
    let transform = WhiteningTransform {
        mean: x.mean(),
        v,
        v_inv,
    };
    let z = transform.apply(x)?;
    Ok((z, transform))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nonlinearity {
    /// `g(y) = tanh(y)`.
    Tanh,
    /// `g(y) = y^3`.
    Cube,
    /// `g(y) = y exp(-y^2 / 2)`, the least sensitive to outliers.
    Gauss,
}

impl Nonlinearity {
    fn eval(self, y: f64) -> (f64, f64) {
        match self {
            Nonlinearity::Tanh => {
                let t = y.tanh();
                (t, 1.0 - t * t)
            }
            Nonlinearity::Cube => (y * y * y, 3.0 * y * y),
            Nonlinearity::Gauss => {
                let e = (-0.5 * y * y).exp();
                (y * e, (1.0 - y * y) * e)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FastIcaOptions {
    pub nonlinearity: Nonlinearity,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FastIcaOptions {
    fn default() -> Self {
        FastIcaOptions {
            nonlinearity: Nonlinearity::Tanh,
            tol: 1e-6,
            max_iter: 1_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcaResult {
    /// Orthogonal demixing acting on whitened data; row `i` extracts coordinate `i`.
    pub w: DMatrix<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// `(W W^T)^{-1/2} W`.
fn symmetric_decorrelation(w: &DMatrix<f64>) -> DMatrix<f64> {
    inv_sqrt_symmetric(&(w * w.transpose()), 1e-12) * w
}

/// Symmetric fixed-point FastICA on whitened data, started from a random
/// orthogonal matrix.
pub fn fastica<R: Rng + ?Sized>(z: &TimeSeries, options: &FastIcaOptions, rng: &mut R) -> Result<IcaResult> {
    if !(options.tol > 0.0) {
        return Err(Error::Config(format!("FastICA tolerance {} must be positive", options.tol)));
    }
    let (n, d) = (z.len(), z.dim());
    let zm = z.to_matrix();
    let mut w = haar_orthogonal(d, rng);
    let mut g = DMatrix::zeros(n, d);
    for iter in 1..=options.max_iter {
        let y = &zm * w.transpose();
        let mut mean_dg = vec![0.0; d];
        for j in 0..d {
            for t in 0..n {
                let (gv, dg) = options.nonlinearity.eval(y[(t, j)]);
                g[(t, j)] = gv;
                mean_dg[j] += dg;
            }
        }
        // E[z g(w'z)] - E[g'(w'z)] w, one row per component
        let mut next = g.transpose() * &zm / n as f64;
        for (i, m) in mean_dg.iter().enumerate() {
            let row = w.row(i) * (m / n as f64);
            let mut r = next.row_mut(i);
            r -= row;
        }
        let next = symmetric_decorrelation(&next);
        let change = (0..d)
            .map(|i| (1.0 - next.row(i).dot(&w.row(i)).abs()).abs())
            .fold(0.0, f64::max);
        w = next;
        if change < options.tol {
            return Ok(IcaResult {
                w,
                iterations: iter,
                converged: true,
            });
        }
    }
    Ok(IcaResult {
        w,
        iterations: options.max_iter,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gaussian_matrix, max_abs_diff, orthogonality_defect};
    use crate::metrics::{amari_index, BlockStructure};
    use crate::rng::seeded;
    use oracle::signed_permutation_distance;

    /// Minimum over signed permutations `P S` of `max |W - P S|`.
    mod oracle {
        use nalgebra::DMatrix;

        fn permutations(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in permutations(n - 1) {
                for k in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(k, n - 1);
                    out.push(q);
                }
            }
            out
        }

        pub fn signed_permutation_distance(w: &DMatrix<f64>) -> f64 {
            let n = w.nrows();
            let mut best = f64::INFINITY;
            for perm in permutations(n) {
                // signs chosen per row to match the entry picked by the permutation
                let mut worst: f64 = 0.0;
                for i in 0..n {
                    let s = w[(i, perm[i])].signum();
                    for j in 0..n {
                        let target = if j == perm[i] { s } else { 0.0 };
                        worst = worst.max((w[(i, j)] - target).abs());
                    }
                }
                best = best.min(worst);
            }
            best
        }
    }

    fn uniform_sources(n: usize, d: usize, seed: u64) -> TimeSeries {
        let mut rng = seeded(seed);
        let data = (0..n * d).map(|_| (rng.random::<f64>() - 0.5) * 12f64.sqrt()).collect();
        TimeSeries::from_rows(n, d, data).unwrap()
    }

    #[test]
    fn whitening_gives_identity_covariance() {
        let mut rng = seeded(1);
        let mix = gaussian_matrix(3, 3, &mut rng);
        let x = uniform_sources(1_000, 3, 2).transform(&mix).unwrap();
        let (z, tr) = center_whiten(&x).unwrap();
        // independent covariance oracle: explicit double sum
        let mut cov = [[0.0; 3]; 3];
        for r in z.rows() {
            for i in 0..3 {
                for j in 0..3 {
                    cov[i][j] += r[i] * r[j];
                }
            }
        }
        for (i, row) in cov.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((c / 1_000.0 - target).abs() < 1e-8);
            }
        }
        assert!(z.mean().iter().all(|m| m.abs() < 1e-10));
        assert!(max_abs_diff(&(&tr.v * &tr.v_inv), &DMatrix::identity(3, 3)) < 1e-10);
    }

    #[test]
    fn diagonal_covariance_is_rescaled() {
        let mut s = uniform_sources(5_000, 2, 3);
        s.center();
        let cov = s.covariance();
        let scale = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0 / cov[(0, 0)].sqrt(), 1.0 / cov[(1, 1)].sqrt()]));
        let x = s.transform(&scale).unwrap();
        let (z, tr) = center_whiten(&x).unwrap();
        assert!(max_abs_diff(&z.covariance(), &DMatrix::identity(2, 2)) < 1e-8);
        // sample covariance is diag(4, 1) up to its sampled off-diagonal term
        let expected = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 1.0]);
        assert!(max_abs_diff(&tr.v, &expected) < 0.05, "{}", tr.v);
    }

    #[test]
    fn already_white_data_is_left_in_place() {
        let (z0, _) = center_whiten(&uniform_sources(2_000, 3, 4)).unwrap();
        let (z1, tr) = center_whiten(&z0).unwrap();
        assert!(max_abs_diff(&tr.v, &DMatrix::identity(3, 3)) < 1e-8);
        assert!(max_abs_diff(&z1.covariance(), &DMatrix::identity(3, 3)) < 1e-8);
    }

    #[test]
    fn rank_deficient_data_is_rejected() {
        let s = uniform_sources(100, 1, 5);
        let x = TimeSeries::hstack(&[s.clone(), s]).unwrap();
        assert!(matches!(center_whiten(&x), Err(Error::DegenerateData(_))));
        let short = uniform_sources(2, 3, 6);
        assert!(center_whiten(&short).is_err());
    }

    #[test]
    fn separated_sources_stay_separated() {
        let mut passes = 0;
        for seed in 0..10 {
            let (z, _) = center_whiten(&uniform_sources(10_000, 2, 100 + seed)).unwrap();
            let ica = fastica(&z, &FastIcaOptions::default(), &mut seeded(seed)).unwrap();
            assert!(orthogonality_defect(&ica.w) < 1e-8);
            if signed_permutation_distance(&ica.w) < 0.1 {
                passes += 1;
            }
        }
        assert!(passes >= 9, "{passes}/10");
    }

    #[test]
    fn rotated_sources_are_unrotated() {
        let mut passes = 0;
        for seed in 0..10 {
            let mut s = uniform_sources(10_000, 2, 200 + seed);
            s.center();
            let angle = 0.3 + seed as f64;
            let r = DMatrix::from_row_slice(2, 2, &[angle.cos(), -angle.sin(), angle.sin(), angle.cos()]);
            let z = s.transform(&r).unwrap();
            let ica = fastica(&z, &FastIcaOptions::default(), &mut seeded(seed)).unwrap();
            if signed_permutation_distance(&(&ica.w * &r)) < 0.1 {
                passes += 1;
            }
        }
        assert!(passes >= 9, "{passes}/10");
    }

    #[test]
    fn separates_four_mixed_uniform_sources() {
        let mut passes = 0;
        for seed in 0..10 {
            let mut rng = seeded(300 + seed);
            let a = crate::linalg::haar_orthogonal(4, &mut rng);
            let x = uniform_sources(10_000, 4, 400 + seed).transform(&a).unwrap();
            let (z, tr) = center_whiten(&x).unwrap();
            let ica = fastica(&z, &FastIcaOptions::default(), &mut rng).unwrap();
            let g = &ica.w * &tr.v * &a;
            if amari_index(&g, &BlockStructure::unit(4)).unwrap() < 0.05 {
                passes += 1;
            }
        }
        assert!(passes >= 9, "{passes}/10");
    }

    #[test]
    fn other_nonlinearities_also_separate() {
        for nonlinearity in [Nonlinearity::Cube, Nonlinearity::Gauss] {
            let opts = FastIcaOptions {
                nonlinearity,
                ..FastIcaOptions::default()
            };
            let (z, _) = center_whiten(&uniform_sources(10_000, 3, 7)).unwrap();
            let ica = fastica(&z, &opts, &mut seeded(8)).unwrap();
            assert!(ica.converged, "{nonlinearity:?}");
            assert!(signed_permutation_distance(&ica.w) < 0.1, "{nonlinearity:?}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for nl in [Nonlinearity::Tanh, Nonlinearity::Cube, Nonlinearity::Gauss] {
            for &y in &[-2.3, -0.4, 0.0, 0.7, 1.9] {
                let h = 1e-6;
                let numeric = (nl.eval(y + h).0 - nl.eval(y - h).0) / (2.0 * h);
                assert!((numeric - nl.eval(y).1).abs() < 1e-6, "{nl:?} at {y}");
            }
        }
    }

    #[test]
    fn seeded_runs_are_bitwise_identical() {
        let (z, _) = center_whiten(&uniform_sources(3_000, 3, 9)).unwrap();
        let a = fastica(&z, &FastIcaOptions::default(), &mut seeded(1)).unwrap();
        let b = fastica(&z, &FastIcaOptions::default(), &mut seeded(1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exhausted_iterations_report_non_convergence() {
        let z = TimeSeries::from_matrix(&gaussian_matrix(2_000, 3, &mut seeded(10))).unwrap();
        let (z, _) = center_whiten(&z).unwrap();
        let opts = FastIcaOptions {
            max_iter: 3,
            tol: 1e-15,
            ..FastIcaOptions::default()
        };
        let ica = fastica(&z, &opts, &mut seeded(11)).unwrap();
        assert!(!ica.converged);
        assert_eq!(ica.iterations, 3);
        assert!(orthogonality_defect(&ica.w) < 1e-8);
    }
}
