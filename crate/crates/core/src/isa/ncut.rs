//! Normalized-cut spectral clustering with eigengap model selection.

use nalgebra::DMatrix;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen_sorted;
use crate::rng::{stream, Rng};

use super::kcca::DependenceMatrix;
use super::partition::Partition;

const DEGREE_FLOOR: f64 = 1e-12;
const LLOYD_MAX_ITER: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NcutOptions {
    /// k-means++ restarts on the spectral embedding.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for NcutOptions {
    fn default() -> Self {
        NcutOptions { restarts: 20, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NcutOutcome {
    pub partition: Partition,
    /// Ascending spectrum of the normalized Laplacian.
    pub eigenvalues: Vec<f64>,
    /// Number of groups requested or selected by the eigengap.
    pub groups: usize,
    pub note: Option<String>,
}

/// Connected components of the graph with edges where `s > 0`.
fn components(s: &DMatrix<f64>) -> Vec<usize> {
    let d = s.nrows();
    let mut labels = vec![usize::MAX; d];
    let mut next = 0;
    for start in 0..d {
        if labels[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        labels[start] = next;
        while let Some(i) = stack.pop() {
            for j in 0..d {
                if labels[j] == usize::MAX && s[(i, j)] > 0.0 {
                    labels[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    labels
}

/// Largest gap `λ_m - λ_{m-1}` (0-based) over `m` in `2..=D-1`.
fn eigengap(eigenvalues: &[f64]) -> usize {
    let d = eigenvalues.len();
    if d <= 2 {
        return d;
    }
    let mut best = (f64::NEG_INFINITY, 2);
    for m in 2..d {
        let gap = eigenvalues[m] - eigenvalues[m - 1];
        if gap > best.0 {
            best = (gap, m);
        }
    }
    best.1
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd iterations from k-means++ seeds; returns labels and inertia.
fn kmeans_once(points: &[Vec<f64>], k: usize, rng: &mut Rng) -> (Vec<usize>, f64) {
    let n = points.len();
    let mut centers = vec![points[rng.random_range(0..n)].clone()];
    while centers.len() < k {
        let weights: Vec<f64> = points
            .iter()
            .map(|p| centers.iter().map(|c| sq_dist(p, c)).fold(f64::INFINITY, f64::min))
            .collect();
        let total: f64 = weights.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, w) in weights.iter().enumerate() {
                if r < *w {
                    chosen = i;
                    break;
                }
                r -= w;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centers.push(points[pick].clone());
    }
    let mut labels = vec![0; n];
    for iter in 0..LLOYD_MAX_ITER {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = (f64::INFINITY, 0);
            for (c, center) in centers.iter().enumerate() {
                let dist = sq_dist(p, center);
                if dist < best.0 {
                    best = (dist, c);
                }
            }
            if labels[i] != best.1 {
                labels[i] = best.1;
                changed = true;
            }
        }
        if !changed && iter > 0 {
            break;
        }
        for (c, center) in centers.iter_mut().enumerate() {
            let members: Vec<&Vec<f64>> = points.iter().zip(&labels).filter(|(_, &l)| l == c).map(|(p, _)| p).collect();
            if members.is_empty() {
                continue;
            }
            for (k, x) in center.iter_mut().enumerate() {
                *x = members.iter().map(|p| p[k]).sum::<f64>() / members.len() as f64;
            }
        }
    }
    let inertia = points.iter().zip(&labels).map(|(p, &l)| sq_dist(p, &centers[l])).sum();
    (labels, inertia)
}

/// Spectral clustering of the affinity `s` into `groups` clusters, or into the
/// eigengap choice when `groups` is `None`.
///
/// With no group count and a disconnected affinity graph the connected
/// components are returned directly.
pub fn ncut_cluster(s: &DependenceMatrix, groups: Option<usize>, options: &NcutOptions) -> Result<NcutOutcome> {
    let d = s.dim();
    if d == 0 {
        return Err(Error::Dimension("empty dependence matrix".into()));
    }
    if let Some(m) = groups {
        if m == 0 || m > d {
            return Err(Error::Config(format!("cannot form {m} groups from {d} coordinates")));
        }
    }
    let w = &s.s;
    let degrees: Vec<f64> = (0..d).map(|i| w.row(i).sum() + DEGREE_FLOOR).collect();
    let laplacian = DMatrix::from_fn(d, d, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - w[(i, j)] / (degrees[i] * degrees[j]).sqrt()
    });
    let (eigenvalues, vectors) = symmetric_eigen_sorted(&laplacian);

    let component_labels = components(w);
    let component_count = component_labels.iter().max().map_or(0, |m| m + 1);
    if groups.is_none() && component_count > 1 {
        return Ok(NcutOutcome {
            partition: Partition::from_labels(&component_labels)?,
            eigenvalues,
            groups: component_count,
            note: Some(format!("affinity graph has {component_count} connected components")),
        });
    }

    let m = groups.unwrap_or_else(|| eigengap(&eigenvalues));
    if m == d {
        return Ok(NcutOutcome {
            partition: Partition::singletons(d),
            eigenvalues,
            groups: m,
            note: None,
        });
    }
    if m == 1 {
        return Ok(NcutOutcome {
            partition: Partition::new(vec![(0..d).collect()])?,
            eigenvalues,
            groups: 1,
            note: None,
        });
    }

    let points: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let row: Vec<f64> = (0..m).map(|k| vectors[(i, k)]).collect();
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter().map(|x| x / norm).collect()
            } else {
                row
            }
        })
        .collect();
    let mut rng = stream(options.seed, 0x6e63_7574);
    let mut best: Option<(Vec<usize>, f64)> = None;
    for _ in 0..options.restarts.max(1) {
        let (labels, inertia) = kmeans_once(&points, m, &mut rng);
        if best.as_ref().is_none_or(|(_, b)| inertia < *b - 1e-12) {
            best = Some((labels, inertia));
        }
    }
    let labels = best.map(|(l, _)| l).unwrap_or_default();
    let partition = Partition::from_labels(&labels)?;
    let note = (partition.len() != m).then(|| format!("k-means produced {} of {m} groups", partition.len()));
    Ok(NcutOutcome {
        partition,
        eigenvalues,
        groups: m,
        note,
    })
}
