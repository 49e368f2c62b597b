use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Largest `t` for which partitions and characters are enumerated.
pub const MAX_PARTITION_SIZE: usize = 8;

/// A Young diagram: weakly decreasing positive parts.
///
/// Serialises as a bare JSON integer array, e.g. `[2,1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(LabError::domain("a partition needs at least one part"));
        }
        if parts.contains(&0) {
            return Err(LabError::domain(format!("zero part in {parts:?}")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(LabError::domain(format!(
                "parts must be weakly decreasing, got {parts:?}"
            )));
        }
        Ok(Self { parts })
    }

    /// The one-row diagram `(t)`.
    pub fn row(t: usize) -> Self {
        Self { parts: vec![t] }
    }

    /// The one-column diagram `(1, ..., 1)`.
    pub fn column(t: usize) -> Self {
        Self { parts: vec![1; t] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of boxes.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn rows(&self) -> usize {
        self.parts.len()
    }

    /// Box coordinates `(i, j)`, 1-indexed row then column, in reading order.
    pub fn boxes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(r, &len)| (1..=len).map(move |c| (r + 1, c)))
    }

    /// Length of column `j` (1-indexed).
    pub fn column_len(&self, j: usize) -> usize {
        self.parts.iter().take_while(|&&p| p >= j).count()
    }

    /// Hook length of the box at `(i, j)`.
    pub fn hook(&self, i: usize, j: usize) -> usize {
        let arm = self.parts[i - 1] - j;
        let leg = self.column_len(j) - i;
        arm + leg + 1
    }

    pub fn conjugate(&self) -> Self {
        let parts = (1..=self.parts[0]).map(|j| self.column_len(j)).collect();
        Self { parts }
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = LabError;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `t` in lexicographically descending order.
pub fn partitions(t: usize) -> Result<Vec<Partition>> {
    if t == 0 || t > MAX_PARTITION_SIZE {
        return Err(LabError::capacity(
            "partition enumeration",
            t as u128,
            MAX_PARTITION_SIZE as u128,
        ));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(t);
    fill(t, t, &mut current, &mut out);
    Ok(out)
}

fn fill(remaining: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    for p in (1..=remaining.min(max_part)).rev() {
        current.push(p);
        fill(remaining - p, p, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent count: weakly decreasing sequences by brute force over
    // all compositions of t.
    fn brute_force_count(t: usize) -> usize {
        let mut count = 0;
        for mask in 0u32..(1 << (t - 1)) {
            let mut parts = Vec::new();
            let mut run = 1;
            for k in 0..t - 1 {
                if mask & (1 << k) != 0 {
                    parts.push(run);
                    run = 1;
                } else {
                    run += 1;
                }
            }
            parts.push(run);
            if parts.windows(2).all(|w| w[0] >= w[1]) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn small_cases() {
        assert_eq!(partitions(1).unwrap(), vec![Partition::row(1)]);
        let p3: Vec<Vec<usize>> = partitions(3).unwrap().into_iter().map(Into::into).collect();
        assert_eq!(p3, vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
    }

    #[test]
    fn counts_match_brute_force() {
        assert_eq!(partitions(6).unwrap().len(), 11);
        for t in 1..=8 {
            assert_eq!(partitions(t).unwrap().len(), brute_force_count(t), "t={t}");
        }
    }

    #[test]
    fn order_is_lexicographic_descending() {
        for t in 1..=8 {
            let ps = partitions(t).unwrap();
            assert!(ps.windows(2).all(|w| w[0].parts() > w[1].parts()));
        }
    }

    #[test]
    fn out_of_budget() {
        assert!(matches!(partitions(0), Err(LabError::Capacity { .. })));
        assert!(matches!(partitions(9), Err(LabError::Capacity { .. })));
    }

    #[test]
    fn boxes_enumerate_exactly_t_cells() {
        for t in 1..=8 {
            for p in partitions(t).unwrap() {
                assert_eq!(p.boxes().count(), t);
                assert_eq!(p.conjugate().conjugate(), p);
            }
        }
    }

    #[test]
    fn rejects_malformed() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
        assert!(Partition::new(vec![]).is_err());
    }

    #[test]
    fn json_is_integer_array() {
        let p = Partition::new(vec![2, 1]).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[2,1]");
        let back: Partition = serde_json::from_str("[2,1]").unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
    }
}
