//! Amari-index for block-structured global matrices.
//!
//! For `G = W_ISA A` decomposed into `d_i x d_j` blocks with absolute block sums
//! `g_ij`,
//!
//! ```text
//! r(G) = [ sum_i (sum_j g_ij / max_j g_ij - 1) + sum_j (sum_i g_ij / max_i g_ij - 1) ]
//!        / (2 M (M - 1))
//! ```
//!
//! which is 0 exactly for block-permutation matrices and 1 when all `g_ij` agree.
//! With `M_r` estimated row blocks and `M_c` true column blocks the normalizer is
//! `M_r (M_c - 1) + M_c (M_r - 1)`, which reduces to the square case.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row (estimated) and column (true) subspace dimensions, both ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockStructure {
    row_dims: Vec<usize>,
    col_dims: Vec<usize>,
}

impl BlockStructure {
    pub fn new(row_dims: Vec<usize>, col_dims: Vec<usize>) -> Result<Self> {
        for dims in [&row_dims, &col_dims] {
            if dims.is_empty() || dims.contains(&0) {
                return Err(Error::Dimension(format!("block dimensions {dims:?} must be positive")));
            }
            if dims.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Dimension(format!("block dimensions {dims:?} are not ascending")));
            }
        }
        let (sr, sc): (usize, usize) = (row_dims.iter().sum(), col_dims.iter().sum());
        if sr != sc {
            return Err(Error::Dimension(format!("row blocks cover {sr} rows, column blocks {sc} columns")));
        }
        Ok(BlockStructure { row_dims, col_dims })
    }

    /// The same dimensions on both sides.
    pub fn square(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims.clone(), dims)
    }

    /// `d` one-dimensional blocks (the plain ICA case).
    pub fn unit(d: usize) -> Self {
        BlockStructure {
            row_dims: vec![1; d],
            col_dims: vec![1; d],
        }
    }

    pub fn row_dims(&self) -> &[usize] {
        &self.row_dims
    }

    pub fn col_dims(&self) -> &[usize] {
        &self.col_dims
    }

    pub fn dim(&self) -> usize {
        self.row_dims.iter().sum()
    }
}

fn offsets(dims: &[usize]) -> Vec<usize> {
    dims.iter()
        .scan(0, |acc, &d| {
            let start = *acc;
            *acc += d;
            Some(start)
        })
        .collect()
}

/// `g_ij` = sum of absolute entries of block `(i, j)`.
pub fn block_sums(g: &DMatrix<f64>, blocks: &BlockStructure) -> Result<DMatrix<f64>> {
    let d = blocks.dim();
    if g.nrows() != d || g.ncols() != d {
        return Err(Error::Dimension(format!(
            "{}x{} matrix for blocks covering {d} coordinates",
            g.nrows(),
            g.ncols()
        )));
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("global matrix entry".into()));
    }
    let (ro, co) = (offsets(&blocks.row_dims), offsets(&blocks.col_dims));
    Ok(DMatrix::from_fn(blocks.row_dims.len(), blocks.col_dims.len(), |i, j| {
        g.view((ro[i], co[j]), (blocks.row_dims[i], blocks.col_dims[j]))
            .iter()
            .map(|v| v.abs())
            .sum()
    }))
}

/// Amari-index of a block-sum matrix.
pub fn amari_from_block_sums(g: &DMatrix<f64>) -> Result<f64> {
    let (mr, mc) = g.shape();
    if mr == 1 && mc == 1 {
        return Err(Error::UndefinedIndex);
    }
    let mut total = 0.0;
    for i in 0..mr {
        let row = g.row(i);
        let max = row.max();
        if !(max > 0.0) {
            return Err(Error::DegenerateMatrix(format!("block row {i} is zero")));
        }
        total += row.sum() / max - 1.0;
    }
    for j in 0..mc {
        let col = g.column(j);
        let max = col.max();
        if !(max > 0.0) {
            return Err(Error::DegenerateMatrix(format!("block column {j} is zero")));
        }
        total += col.sum() / max - 1.0;
    }
    let norm = (mr * (mc - 1) + mc * (mr - 1)) as f64;
    Ok(total / norm)
}

pub fn amari_index(g: &DMatrix<f64>, blocks: &BlockStructure) -> Result<f64> {
    amari_from_block_sums(&block_sums(g, blocks)?)
}

/// Whether exactly one block per block-row and block-column exceeds `tol` times the
/// largest block sum, and every such block is square.
pub fn is_block_permutation(g: &DMatrix<f64>, blocks: &BlockStructure, tol: f64) -> bool {
    let Ok(sums) = block_sums(g, blocks) else {
        return false;
    };
    let largest = sums.max();
    if !(largest > 0.0) {
        return false;
    }
    let threshold = tol * largest;
    let (mr, mc) = sums.shape();
    let mut col_hits = vec![0usize; mc];
    for i in 0..mr {
        let mut hits = 0;
        for j in 0..mc {
            if sums[(i, j)] > threshold {
                hits += 1;
                col_hits[j] += 1;
                if blocks.row_dims[i] != blocks.col_dims[j] {
                    return false;
                }
            }
        }
        if hits != 1 {
            return false;
        }
    }
    col_hits.iter().all(|&c| c == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    fn dims22() -> BlockStructure {
        BlockStructure::square(vec![2, 2]).unwrap()
    }

    #[test]
    fn block_structure_validation() {
        assert!(BlockStructure::new(vec![3, 2], vec![2, 3]).is_err());
        assert!(BlockStructure::new(vec![2, 2], vec![2, 3]).is_err());
        assert!(BlockStructure::new(vec![0, 4], vec![4]).is_err());
        assert!(BlockStructure::new(vec![1, 3], vec![2, 2]).is_ok());
    }

    #[test]
    fn identity_and_all_ones_block_sums() {
        let id = DMatrix::<f64>::identity(4, 4);
        assert_eq!(block_sums(&id, &dims22()).unwrap(), DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]));
        let ones = DMatrix::from_element(4, 4, 1.0);
        assert_eq!(block_sums(&ones, &dims22()).unwrap(), DMatrix::from_element(2, 2, 4.0));
    }

    #[test]
    fn block_sums_match_double_loop() {
        let mut rng = seeded(1);
        let g = DMatrix::from_fn(6, 6, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let blocks = BlockStructure::square(vec![2, 4]).unwrap();
        let sums = block_sums(&g, &blocks).unwrap();
        let block_of = |k: usize| usize::from(k >= 2);
        let mut oracle = [[0.0; 2]; 2];
        for r in 0..6 {
            for c in 0..6 {
                oracle[block_of(r)][block_of(c)] += g[(r, c)].abs();
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                assert!((sums[(i, j)] - oracle[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn extreme_values() {
        let id = DMatrix::<f64>::identity(4, 4);
        assert!(amari_index(&id, &dims22()).unwrap().abs() < 1e-12);
        let ones = DMatrix::from_element(4, 4, 1.0);
        assert!((amari_index(&ones, &dims22()).unwrap() - 1.0).abs() < 1e-12);
        let mut anti = DMatrix::zeros(4, 4);
        anti.view_mut((0, 2), (2, 2)).copy_from(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -3.0, 0.5]));
        anti.view_mut((2, 0), (2, 2)).copy_from(&DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 4.0, 1.0]));
        assert!(amari_index(&anti, &dims22()).unwrap().abs() < 1e-12);
        assert!(is_block_permutation(&anti, &dims22(), 0.0));
    }

    #[test]
    fn hand_evaluated_index() {
        // g = [[3,1],[1,3]] -> (1/4)[(4/3-1)*2 + (4/3-1)*2] = 1/3
        let g = DMatrix::from_row_slice(4, 4, &[
            1.5, 0.0, 0.5, 0.0, //
            0.0, 1.5, 0.0, 0.5, //
            0.5, 0.0, 1.5, 0.0, //
            0.0, 0.5, 0.0, 1.5,
        ]);
        assert_eq!(block_sums(&g, &dims22()).unwrap(), DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 3.0]));
        assert!((amari_index(&g, &dims22()).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs_are_errors() {
        let id = DMatrix::<f64>::identity(3, 3);
        let single = BlockStructure::square(vec![3]).unwrap();
        assert!(matches!(amari_index(&id, &single), Err(Error::UndefinedIndex)));
        let mut z = DMatrix::<f64>::identity(4, 4);
        z.view_mut((0, 0), (2, 4)).fill(0.0);
        assert!(matches!(amari_index(&z, &dims22()), Err(Error::DegenerateMatrix(_))));
        assert!(matches!(amari_index(&id, &dims22()), Err(Error::Dimension(_))));
    }

    #[test]
    fn block_permutation_checks() {
        assert!(is_block_permutation(&DMatrix::identity(4, 4), &dims22(), 1e-12));
        assert!(!is_block_permutation(&DMatrix::from_element(4, 4, 1.0), &dims22(), 1e-12));
        // anti-diagonal 2x3 and 3x2 blocks pair a 2-dim row block with a 3-dim column block
        let mut g = DMatrix::zeros(5, 5);
        g.view_mut((0, 2), (2, 3)).fill(1.0);
        g.view_mut((2, 0), (3, 2)).fill(1.0);
        let blocks = BlockStructure::square(vec![2, 3]).unwrap();
        assert!(!is_block_permutation(&g, &blocks, 1e-12));
    }

    #[test]
    fn rectangular_block_counts() {
        // three estimated 1-dim blocks against one 1-dim and one 2-dim true block
        let blocks = BlockStructure::new(vec![1, 1, 1], vec![1, 2]).unwrap();
        let g = DMatrix::<f64>::identity(3, 3);
        let r = amari_index(&g, &blocks).unwrap();
        // g = [[1,0],[0,1],[0,1]]: rows contribute 0, second column contributes 1
        assert!((r - 1.0 / 7.0).abs() < 1e-12);
        assert!(!is_block_permutation(&g, &blocks, 0.0));
    }

    fn random_dims(rng: &mut impl Rng, d: usize) -> Vec<usize> {
        let mut dims = Vec::new();
        let mut left = d;
        while left > 0 {
            let k = rng.random_range(1..=left.min(4));
            dims.push(k);
            left -= k;
        }
        dims.sort_unstable();
        dims
    }

    proptest! {
        #[test]
        fn index_is_in_unit_interval_and_scale_invariant(seed in 0u64..10_000, d in 2usize..=12, scale in 1e-3..1e3f64) {
            let mut rng = seeded(seed);
            let dims = random_dims(&mut rng, d);
            prop_assume!(dims.len() >= 2);
            let blocks = BlockStructure::square(dims).unwrap();
            let g = DMatrix::from_fn(d, d, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let r = amari_index(&g, &blocks).unwrap();
            prop_assert!((0.0..=1.0).contains(&r));
            let scaled = &g * (-scale);
            prop_assert!((amari_index(&scaled, &blocks).unwrap() - r).abs() < 1e-12);
        }
    }
}
