//! Least-squares vector autoregression, the parametric baseline.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

use super::innovations::lagged_pairs;

#[derive(Debug, Clone)]
pub struct LinearArFit {
    pub intercept: Vec<f64>,
    /// `B_1, ..., B_p` with `x_t ~ c + sum_k B_k x_{t-k}`.
    pub coefficients: Vec<DMatrix<f64>>,
    /// Standard errors of the entries of each `B_k`.
    pub std_errors: Vec<DMatrix<f64>>,
    /// Residuals for `t = p+1..T`.
    pub residuals: TimeSeries,
}

/// Ordinary least squares of `x_t` on an intercept and `order` stacked lags, via QR.
pub fn fit_linear_ar(x: &TimeSeries, order: usize) -> Result<LinearArFit> {
    let d = x.dim();
    let k = order * d + 1;
    if order == 0 || x.len() <= order * d + 1 {
        return Err(Error::Config(format!(
            "order-{order} linear AR in dimension {d} needs more than {} samples, got {}",
            order * d + 1,
            x.len()
        )));
    }
    let (u, v) = lagged_pairs(x, order)?;
    let n = u.len();
    if n < k {
        return Err(Error::DegenerateRegression(format!("{n} equations for {k} unknowns")));
    }
    let design = DMatrix::from_fn(n, k, |t, j| if j == 0 { 1.0 } else { u.get(t, j - 1) });
    let y = v.to_matrix();

    let qr = design.clone().qr();
    let r = qr.r();
    let diag_max = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if let Some(i) = (0..k).find(|&i| !(r[(i, i)].abs() > 1e-10 * diag_max)) {
        return Err(Error::DegenerateRegression(format!("design matrix is rank deficient at column {i}")));
    }
    let qty = qr.q().transpose() * &y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::DegenerateRegression("triangular solve failed".into()))?;

    let resid = &y - &design * &beta;
    let residuals = TimeSeries::from_matrix(&resid)?;

    // diag((X'X)^{-1}) = squared row norms of R^{-1}
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::DegenerateRegression("triangular inverse failed".into()))?;
    let leverage: Vec<f64> = (0..k).map(|i| r_inv.row(i).norm_squared()).collect();
    let dof = (n - k).max(1) as f64;
    let sigma2: Vec<f64> = (0..d).map(|j| resid.column(j).norm_squared() / dof).collect();

    let intercept = (0..d).map(|j| beta[(0, j)]).collect();
    let mut coefficients = Vec::with_capacity(order);
    let mut std_errors = Vec::with_capacity(order);
    for lag in 0..order {
        // response i, regressor j of lag block -> beta[(1 + lag*d + j, i)]
        coefficients.push(DMatrix::from_fn(d, d, |i, j| beta[(1 + lag * d + j, i)]));
        std_errors.push(DMatrix::from_fn(d, d, |i, j| (sigma2[i] * leverage[1 + lag * d + j]).sqrt()));
    }
    Ok(LinearArFit {
        intercept,
        coefficients,
        std_errors,
        residuals,
    })
}
