use std::fmt;

use serde::{Deserialize, Serialize};

use super::partition::Partition;
use crate::error::{LabError, Result};

/// A permutation of `{0, ..., t-1}` stored as its image table.
///
/// Composition follows function composition: `(p.compose(q))(i) = p(q(i))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PermutationT {
    images: Vec<usize>,
}

impl PermutationT {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let t = images.len();
        let mut seen = vec![false; t];
        for &x in &images {
            if x >= t || seen[x] {
                return Err(LabError::domain(format!("{images:?} is not a bijection")));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(t: usize) -> Self {
        Self {
            images: (0..t).collect(),
        }
    }

    /// The transposition exchanging `i` and `j`.
    pub fn transposition(t: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..t).collect();
        images.swap(i, j);
        Self { images }
    }

    /// The cycle `0 -> 1 -> ... -> t-1 -> 0`.
    pub fn long_cycle(t: usize) -> Self {
        Self {
            images: (0..t).map(|i| (i + 1) % t).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Self {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Self { images }
    }

    /// Cycle lengths sorted descending (fixed points included).
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let t = self.degree();
        let mut seen = vec![false; t];
        let mut lens = Vec::new();
        for start in 0..t {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            lens.push(len);
        }
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }

    pub fn cycle_type(&self) -> Partition {
        Partition::new(self.cycle_lengths()).expect("cycle lengths form a partition")
    }

    pub fn num_cycles(&self) -> usize {
        self.cycle_lengths().len()
    }

    /// +1 for even permutations, -1 for odd.
    pub fn sign(&self) -> i64 {
        let parity: usize = self.cycle_lengths().iter().map(|l| l - 1).sum();
        if parity % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Indices `k` such that `self = s_{k_1} s_{k_2} ... s_{k_m}`, where
    /// `s_k` swaps `k` and `k + 1`.
    pub fn adjacent_word(&self) -> Vec<usize> {
        // Right-multiplying by s_k swaps positions k, k+1 of the one-line
        // notation; bubble-sort to the identity and read the swaps backwards.
        let mut line = self.images.clone();
        let mut swaps = Vec::new();
        let t = line.len();
        for pass in 0..t {
            for k in 0..t.saturating_sub(1 + pass) {
                if line[k] > line[k + 1] {
                    line.swap(k, k + 1);
                    swaps.push(k);
                }
            }
        }
        swaps.reverse();
        swaps
    }
}

impl TryFrom<Vec<usize>> for PermutationT {
    type Error = LabError;

    fn try_from(images: Vec<usize>) -> Result<Self> {
        PermutationT::new(images)
    }
}

impl From<PermutationT> for Vec<usize> {
    fn from(p: PermutationT) -> Self {
        p.images
    }
}

impl fmt::Display for PermutationT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images)
    }
}

/// Every element of `S_t` in lexicographic order of image tables.
pub fn all_permutations(t: usize) -> Vec<PermutationT> {
    let mut current: Vec<usize> = (0..t).collect();
    let mut out = vec![PermutationT {
        images: current.clone(),
    }];
    if t < 2 {
        return out;
    }
    while let Some(i) = (0..t - 1).rev().find(|&i| current[i] < current[i + 1]) {
        let j = (i + 1..t).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
        out.push(PermutationT {
            images: current.clone(),
        });
    }
    out
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_sizes() {
        for t in 0..=6 {
            let all = all_permutations(t);
            assert_eq!(all.len() as u128, factorial(t));
            assert!(all.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn group_laws() {
        let all = all_permutations(4);
        for p in &all {
            assert!(p.compose(&p.inverse()).is_identity());
            for q in &all {
                let pq = p.compose(q);
                for i in 0..4 {
                    assert_eq!(pq.apply(i), p.apply(q.apply(i)));
                }
                assert_eq!(pq.sign(), p.sign() * q.sign());
            }
        }
    }

    #[test]
    fn adjacent_word_reconstructs() {
        for t in 1..=5 {
            for p in all_permutations(t) {
                let mut acc = PermutationT::identity(t);
                for k in p.adjacent_word() {
                    acc = acc.compose(&PermutationT::transposition(t, k, k + 1));
                }
                assert_eq!(acc, p);
            }
        }
    }

    #[test]
    fn cycle_types() {
        assert_eq!(PermutationT::long_cycle(3).cycle_lengths(), vec![3]);
        assert_eq!(
            PermutationT::transposition(4, 0, 2).cycle_lengths(),
            vec![2, 1, 1]
        );
        assert_eq!(PermutationT::identity(3).num_cycles(), 3);
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(PermutationT::new(vec![0, 0]).is_err());
        assert!(PermutationT::new(vec![0, 2]).is_err());
    }
}
