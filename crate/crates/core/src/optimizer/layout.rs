use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fixed-size set of occupied grid positions, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Layout {
    indices: Vec<usize>,
    positions: usize,
}

impl Layout {
    /// Builds a layout over `positions` candidates. Order does not matter;
    /// duplicates and out-of-range indices are rejected.
    pub fn new(mut indices: Vec<usize>, positions: usize) -> Result<Self> {
        indices.sort_unstable();
        if let Some(&last) = indices.last() {
            if last >= positions {
                return Err(Error::InvalidLayout(format!(
                    "index {last} outside 0..{positions}"
                )));
            }
        }
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidLayout(format!("index {} repeated", w[0])));
        }
        Ok(Self { indices, positions })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Number of turbines `N`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Number of candidate positions `M`.
    pub fn positions(&self) -> usize {
        self.positions
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn occupancy(&self) -> Vec<bool> {
        let mut mask = vec![false; self.positions];
        for &i in &self.indices {
            mask[i] = true;
        }
        mask
    }

    /// Number of bit positions in which the two layouts differ.
    pub fn hamming(&self, other: &Layout) -> usize {
        let shared = self.indices.iter().filter(|i| other.contains(**i)).count();
        self.len() + other.len() - 2 * shared
    }

    /// Moves the turbine at `from` to the empty position `to`.
    pub(crate) fn relocate(&mut self, from: usize, to: usize) {
        debug_assert!(self.contains(from) && !self.contains(to) && to < self.positions);
        let at = self.indices.binary_search(&from).expect("occupied");
        self.indices.remove(at);
        let at = self.indices.binary_search(&to).unwrap_err();
        self.indices.insert(at, to);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_and_queries() {
        let l = Layout::new(vec![7, 2, 4], 10).unwrap();
        assert_eq!(l.indices(), &[2, 4, 7]);
        assert!(l.contains(4) && !l.contains(5));
        assert_eq!(l.occupancy().iter().filter(|b| **b).count(), 3);
        assert!(Layout::new(vec![1, 1], 5).is_err());
        assert!(Layout::new(vec![5], 5).is_err());
    }

    #[test]
    fn relocation_and_distance() {
        let a = Layout::new(vec![0, 3, 9], 10).unwrap();
        let mut b = a.clone();
        b.relocate(3, 5);
        assert_eq!(b.indices(), &[0, 5, 9]);
        assert_eq!(a.hamming(&b), 2);
        assert_eq!(a.hamming(&a), 0);
    }
}
