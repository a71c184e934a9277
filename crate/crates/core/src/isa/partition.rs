use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Disjoint groups covering `0..D`, kept in canonical order: ascending size,
/// then ascending smallest index; indices inside a group ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    groups: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(mut groups: Vec<Vec<usize>>) -> Result<Self> {
        let d: usize = groups.iter().map(Vec::len).sum();
        let mut seen = vec![false; d];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::Config("partition contains an empty group".into()));
            }
            for &i in g {
                if i >= d || seen[i] {
                    return Err(Error::Config(format!("index {i} repeated or out of range 0..{d}")));
                }
                seen[i] = true;
            }
        }
        groups.iter_mut().for_each(|g| g.sort_unstable());
        groups.sort_by_key(|g| (g.len(), g[0]));
        Ok(Partition { groups })
    }

    /// Group `labels[i]` holds index `i`.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut groups = vec![Vec::new(); k];
        for (i, &l) in labels.iter().enumerate() {
            groups[l].push(i);
        }
        groups.retain(|g| !g.is_empty());
        Self::new(groups)
    }

    pub fn singletons(d: usize) -> Self {
        Partition {
            groups: (0..d).map(|i| vec![i]).collect(),
        }
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Group sizes, ascending.
    pub fn dims(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    /// Coordinates in group order; entry `k` is the original index placed at `k`.
    pub fn order(&self) -> Vec<usize> {
        self.groups.iter().flatten().copied().collect()
    }
}
