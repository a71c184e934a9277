//! Greedy pair-swap search for groups of known sizes.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, Rng};

use super::kcca::DependenceMatrix;
use super::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreedyOptions {
    /// Extra searches from seeded random assignments.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions { restarts: 3, seed: 0 }
    }
}

/// Objective after every accepted swap of the winning search.
#[derive(Debug, Clone)]
pub struct GreedyTrace {
    pub partition: Partition,
    pub objective: f64,
    pub history: Vec<f64>,
}

/// Sum of within-group dependencies.
fn objective(s: &DependenceMatrix, labels: &[usize]) -> f64 {
    let d = labels.len();
    let mut total = 0.0;
    for i in 0..d {
        for j in i + 1..d {
            if labels[i] == labels[j] {
                total += s.get(i, j);
            }
        }
    }
    total
}

/// Local search from `labels`: apply the best improving swap until none is left.
fn improve(s: &DependenceMatrix, mut labels: Vec<usize>) -> (Vec<usize>, Vec<f64>) {
    let d = labels.len();
    let mut current = objective(s, &labels);
    let mut history = vec![current];
    loop {
        // affinity[i][g] = sum of S[i][k] over k in group g
        let groups = labels.iter().max().map_or(0, |m| m + 1);
        let mut affinity = vec![0.0; d * groups];
        for i in 0..d {
            for k in 0..d {
                affinity[i * groups + labels[k]] += s.get(i, k);
            }
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..d {
            for j in i + 1..d {
                let (gi, gj) = (labels[i], labels[j]);
                if gi == gj {
                    continue;
                }
                // i leaves gi for gj \ {j}, j leaves gj for gi \ {i}
                let delta = (affinity[i * groups + gj] - s.get(i, j)) - affinity[i * groups + gi]
                    + (affinity[j * groups + gi] - s.get(j, i))
                    - affinity[j * groups + gj];
                if delta > 1e-12 && best.is_none_or(|(b, _, _)| delta > b) {
                    best = Some((delta, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else {
            return (labels, history);
        };
        labels.swap(i, j);
        let next = objective(s, &labels);
        debug_assert!(next >= current - 1e-12);
        current = next;
        history.push(current);
    }
}

/// [`greedy_cluster`] together with the objective history of the chosen search.
pub fn greedy_cluster_traced(s: &DependenceMatrix, dims: &[usize], options: &GreedyOptions) -> Result<GreedyTrace> {
    let d = s.dim();
    if dims.is_empty() || dims.contains(&0) || dims.iter().sum::<usize>() != d {
        return Err(Error::Config(format!("group sizes {dims:?} do not cover {d} coordinates")));
    }
    let contiguous: Vec<usize> = dims.iter().enumerate().flat_map(|(g, &n)| std::iter::repeat_n(g, n)).collect();
    let (labels, history) = improve(s, contiguous.clone());
    let mut best = (objective(s, &labels), labels, history);
    let mut rng: Rng = stream(options.seed, 0x6772_6565_6479);
    for _ in 0..options.restarts {
        let mut start = contiguous.clone();
        start.shuffle(&mut rng);
        let (labels, history) = improve(s, start);
        let value = objective(s, &labels);
        if value > best.0 + 1e-12 {
            best = (value, labels, history);
        }
    }
    Ok(GreedyTrace {
        partition: Partition::from_labels(&best.1)?,
        objective: best.0,
        history: best.2,
    })
}

/// Groups of the given sizes maximizing the within-group dependence, by greedy
/// pair swaps from the contiguous assignment (plus seeded random restarts).
pub fn greedy_cluster(s: &DependenceMatrix, dims: &[usize], options: &GreedyOptions) -> Result<Partition> {
    Ok(greedy_cluster_traced(s, dims, options)?.partition)
}
