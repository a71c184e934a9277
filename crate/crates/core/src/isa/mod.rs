//! Grouping of ICA coordinates into dependent subspaces.
//!
//! ICA leaves coordinates of one multidimensional source dependent on each other
//! and independent of every other group. Pairwise KCCA scores form an affinity
//! matrix; a greedy swap search (known dimensions) or normalized-cut spectral
//! clustering (unknown dimensions) recovers the groups.

mod assemble;
mod greedy;
mod kcca;
mod ncut;
mod partition;

pub use assemble::{assemble_separation, SeparationResult};
pub use greedy::{greedy_cluster, greedy_cluster_traced, GreedyOptions, GreedyTrace};
pub use kcca::{dependence_matrix, kcca_dependence, DependenceMatrix, KccaFactor, KccaOptions, KccaScore};
pub use ncut::{ncut_cluster, NcutOptions, NcutOutcome};
pub use partition::Partition;
