//! Composition of whitening, ICA rotation and grouping into the final demixer.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ica::WhiteningTransform;
use crate::metrics::{amari_index, block_sums, BlockStructure};
use crate::series::TimeSeries;

use super::partition::Partition;

/// Demixing matrix `W_ISA = P W V` and, given the true mixing, the gain `G = W_ISA A`.
#[derive(Debug, Clone, Serialize)]
pub struct SeparationResult {
    pub w_isa: DMatrix<f64>,
    pub partition: Partition,
    pub est_dims: Vec<usize>,
    pub g: Option<DMatrix<f64>>,
    pub true_dims: Option<Vec<usize>>,
    pub block_sums: Option<DMatrix<f64>>,
    /// `None` when both estimated and true structures have a single block.
    pub amari: Option<f64>,
}

impl SeparationResult {
    /// Applies the demixer to observations, after removing the training mean.
    pub fn separate(&self, x: &TimeSeries, whitening: &WhiteningTransform) -> Result<TimeSeries> {
        if x.dim() != self.w_isa.ncols() {
            return Err(Error::Dimension(format!("series has {} coordinates, demixer {}", x.dim(), self.w_isa.ncols())));
        }
        let mut centered = x.clone();
        for row in 0..centered.len() {
            for (v, m) in centered.row_mut(row).iter_mut().zip(&whitening.mean) {
                *v -= m;
            }
        }
        centered.transform(&self.w_isa)
    }
}

/// Builds `W_ISA` from the whitening, ICA rotation and partition; with `truth`
/// (mixing matrix and ascending source dimensions) also the gain and Amari-index.
pub fn assemble_separation(
    whitening: &WhiteningTransform,
    w_ica: &DMatrix<f64>,
    partition: &Partition,
    truth: Option<(&DMatrix<f64>, &[usize])>,
) -> Result<SeparationResult> {
    let d = w_ica.nrows();
    if w_ica.ncols() != d || whitening.v.nrows() != d || partition.dim() != d {
        return Err(Error::Dimension(format!(
            "whitening {}x{}, rotation {}x{}, partition over {}",
            whitening.v.nrows(),
            whitening.v.ncols(),
            w_ica.nrows(),
            w_ica.ncols(),
            partition.dim()
        )));
    }
    let order = partition.order();
    let rotated = w_ica * &whitening.v;
    let w_isa = DMatrix::from_fn(d, d, |i, j| rotated[(order[i], j)]);
    let est_dims = partition.dims();
    let mut result = SeparationResult {
        w_isa,
        partition: partition.clone(),
        est_dims,
        g: None,
        true_dims: None,
        block_sums: None,
        amari: None,
    };
    if let Some((a, dims)) = truth {
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::Dimension(format!("mixing is {}x{}, expected {d}x{d}", a.nrows(), a.ncols())));
        }
        let g = &result.w_isa * a;
        let blocks = BlockStructure::new(result.est_dims.clone(), dims.to_vec())?;
        result.block_sums = Some(block_sums(&g, &blocks)?);
        result.amari = match amari_index(&g, &blocks) {
            Ok(r) => Some(r),
            Err(Error::UndefinedIndex) => None,
            Err(e) => return Err(e),
        };
        result.g = Some(g);
        result.true_dims = Some(dims.to_vec());
    }
    Ok(result)
}
