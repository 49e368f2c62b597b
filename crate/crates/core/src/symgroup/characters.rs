//! Irreducible characters and module dimensions.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::partition::{Partition, MAX_PARTITION_SIZE};
use super::perm::{factorial, PermutationT};
use crate::error::{LabError, Result};

type MemoKey = (Vec<usize>, Vec<usize>);

fn memo() -> &'static Mutex<HashMap<MemoKey, i64>> {
    static MEMO: OnceLock<Mutex<HashMap<MemoKey, i64>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `chi_lambda(pi)` via the Murnaghan-Nakayama rule.
pub fn character(lambda: &Partition, pi: &PermutationT) -> Result<i64> {
    if lambda.size() != pi.degree() {
        return Err(LabError::domain(format!(
            "partition {lambda} has {} boxes but permutation acts on {} points",
            lambda.size(),
            pi.degree()
        )));
    }
    character_of_cycle_type(lambda, &pi.cycle_type())
}

/// Character value on the class with cycle type `mu`.
pub fn character_of_cycle_type(lambda: &Partition, mu: &Partition) -> Result<i64> {
    if lambda.size() != mu.size() {
        return Err(LabError::domain(format!(
            "shape {lambda} and cycle type {mu} have different sizes"
        )));
    }
    if lambda.size() > MAX_PARTITION_SIZE {
        return Err(LabError::capacity(
            "character evaluation",
            lambda.size() as u128,
            MAX_PARTITION_SIZE as u128,
        ));
    }
    Ok(murnaghan_nakayama(lambda.parts(), mu.parts()))
}

fn murnaghan_nakayama(parts: &[usize], cycles: &[usize]) -> i64 {
    let Some((&r, rest)) = cycles.split_first() else {
        return if parts.is_empty() { 1 } else { 0 };
    };
    let key = (parts.to_vec(), cycles.to_vec());
    if let Some(&v) = memo().lock().expect("character memo poisoned").get(&key) {
        return v;
    }

    // Beta numbers: removing a rim hook of length r moves one bead down by r.
    let len = parts.len();
    let beta: Vec<usize> = parts
        .iter()
        .enumerate()
        .map(|(i, &p)| p + (len - 1 - i))
        .collect();
    let mut total = 0i64;
    for (k, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let target = b - r;
        let jumped = beta.iter().filter(|&&c| c > target && c < b).count();
        let sign = if jumped % 2 == 0 { 1 } else { -1 };
        let mut next = beta.clone();
        next[k] = target;
        next.sort_unstable_by(|a, b| b.cmp(a));
        let reduced: Vec<usize> = next
            .iter()
            .enumerate()
            .map(|(i, &c)| c - (len - 1 - i))
            .filter(|&p| p > 0)
            .collect();
        total += sign * murnaghan_nakayama(&reduced, rest);
    }

    memo()
        .lock()
        .expect("character memo poisoned")
        .insert(key, total);
    total
}

/// `dim V_lambda` by the hook-length formula.
pub fn specht_dim(lambda: &Partition) -> u128 {
    let hooks: u128 = lambda
        .boxes()
        .map(|(i, j)| lambda.hook(i, j) as u128)
        .product();
    factorial(lambda.size()) / hooks
}

/// `prod_{(i,j) in lambda} (d + j - i)`.
pub fn content_product(lambda: &Partition, d: usize) -> Result<u128> {
    if d < lambda.rows() {
        return Err(LabError::domain(format!(
            "d = {d} is smaller than the {} rows of {lambda}",
            lambda.rows()
        )));
    }
    let mut acc: u128 = 1;
    for (i, j) in lambda.boxes() {
        let factor = (d + j - i) as u128;
        acc = acc
            .checked_mul(factor)
            .ok_or_else(|| LabError::capacity("content product", u128::MAX, u128::MAX))?;
    }
    Ok(acc)
}

/// `dim W_lambda = dim V_lambda / t! * prod (d + j - i)` in exact arithmetic.
pub fn weyl_dim(lambda: &Partition, d: usize) -> Result<u128> {
    let prod = content_product(lambda, d)?;
    let numer = specht_dim(lambda)
        .checked_mul(prod)
        .ok_or_else(|| LabError::capacity("Weyl dimension", u128::MAX, u128::MAX))?;
    let tf = factorial(lambda.size());
    if numer % tf != 0 {
        return Err(LabError::Consistency(format!(
            "Weyl dimension of {lambda} at d = {d} is not integral"
        )));
    }
    Ok(numer / tf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symgroup::partition::partitions;
    use crate::symgroup::perm::all_permutations;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    // Oracle: count standard Young tableaux by recursively removing corners.
    fn count_syt(parts: &[usize]) -> u128 {
        if parts.iter().sum::<usize>() == 0 {
            return 1;
        }
        let mut total = 0;
        for r in 0..parts.len() {
            let is_corner = parts[r] > 0 && (r + 1 == parts.len() || parts[r + 1] < parts[r]);
            if is_corner {
                let mut next = parts.to_vec();
                next[r] -= 1;
                total += count_syt(&next);
            }
        }
        total
    }

    #[test]
    fn named_values() {
        let swap = PermutationT::transposition(2, 0, 1);
        assert_eq!(character(&p(&[1, 1]), &swap).unwrap(), -1);
        for t in 1..=6 {
            for pi in all_permutations(t) {
                assert_eq!(character(&Partition::row(t), &pi).unwrap(), 1);
                assert_eq!(character(&Partition::column(t), &pi).unwrap(), pi.sign());
            }
        }
        assert_eq!(
            character(&p(&[2, 1]), &PermutationT::identity(3)).unwrap(),
            2
        );
        assert_eq!(
            character(&p(&[2, 1]), &PermutationT::long_cycle(3)).unwrap(),
            -1
        );
    }

    #[test]
    fn mismatched_sizes() {
        assert!(matches!(
            character(&p(&[2, 1]), &PermutationT::identity(2)),
            Err(LabError::Domain(_))
        ));
    }

    #[test]
    fn specht_dims_match_tableau_count() {
        assert_eq!(specht_dim(&p(&[2, 1])), 2);
        assert_eq!(specht_dim(&p(&[2, 2])), 2);
        for t in 1..=8 {
            for lam in partitions(t).unwrap() {
                assert_eq!(specht_dim(&lam), count_syt(lam.parts()), "{lam}");
                let at_identity = character(&lam, &PermutationT::identity(t)).unwrap();
                assert_eq!(at_identity as u128, specht_dim(&lam));
            }
        }
    }

    #[test]
    fn sum_of_squared_dims_is_group_order() {
        for t in 1..=8 {
            let s: u128 = partitions(t)
                .unwrap()
                .iter()
                .map(|l| specht_dim(l).pow(2))
                .sum();
            assert_eq!(s, factorial(t));
        }
    }

    #[test]
    fn column_orthogonality() {
        for t in 1..=6 {
            let perms = all_permutations(t);
            let parts = partitions(t).unwrap();
            for a in &parts {
                for b in &parts {
                    let s: i64 = perms
                        .iter()
                        .map(|pi| character(a, pi).unwrap() * character(b, pi).unwrap())
                        .sum();
                    let expected = if a == b { factorial(t) as i64 } else { 0 };
                    assert_eq!(s, expected, "t={t} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn weyl_dims() {
        assert_eq!(weyl_dim(&p(&[2]), 4).unwrap(), 10);
        assert_eq!(weyl_dim(&p(&[1, 1]), 4).unwrap(), 6);
        assert_eq!(weyl_dim(&p(&[2, 1]), 4).unwrap(), 20);
        assert!(matches!(
            weyl_dim(&p(&[1, 1, 1]), 2),
            Err(LabError::Domain(_))
        ));
    }

    #[test]
    fn schur_weyl_dimension_count() {
        for d in [2usize, 4, 8] {
            for t in 1..=4 {
                let total: u128 = partitions(t)
                    .unwrap()
                    .iter()
                    .filter(|l| l.rows() <= d)
                    .map(|l| specht_dim(l) * weyl_dim(l, d).unwrap())
                    .sum();
                assert_eq!(total, (d as u128).pow(t as u32), "d={d} t={t}");
            }
        }
    }
}
