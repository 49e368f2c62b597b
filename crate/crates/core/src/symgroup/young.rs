//! Young's orthogonal form: explicit real orthogonal irreps of `S_t`.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::partition::Partition;
use super::perm::{all_permutations, PermutationT};
use crate::error::{LabError, Result};

/// Largest `t` for which all `t!` irrep matrices are materialised.
pub const MAX_IRREP_DEGREE: usize = 6;

/// A standard Young tableau holding `0..t`, rows increasing left to right
/// and columns increasing top to bottom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StandardTableau {
    rows: Vec<Vec<usize>>,
    /// `position[v] = (row, col)`, both 0-indexed.
    position: Vec<(usize, usize)>,
}

impl StandardTableau {
    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// `col - row` of the box holding `value`.
    pub fn content(&self, value: usize) -> i64 {
        let (r, c) = self.position[value];
        c as i64 - r as i64
    }

    fn swapped(&self, a: usize, b: usize) -> Self {
        let mut rows = self.rows.clone();
        let (ra, ca) = self.position[a];
        let (rb, cb) = self.position[b];
        rows[ra][ca] = b;
        rows[rb][cb] = a;
        let mut position = self.position.clone();
        position.swap(a, b);
        Self { rows, position }
    }
}

/// Standard tableaux of shape `lambda`, in the order produced by placing
/// `0, 1, ...` into the topmost admissible row first. The first tableau is
/// the row-reading one.
pub fn standard_tableaux(lambda: &Partition) -> Vec<StandardTableau> {
    let t = lambda.size();
    let mut out = Vec::new();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); lambda.rows()];
    place(0, t, lambda.parts(), &mut rows, &mut out);
    out
}

fn place(
    value: usize,
    t: usize,
    shape: &[usize],
    rows: &mut Vec<Vec<usize>>,
    out: &mut Vec<StandardTableau>,
) {
    if value == t {
        let mut position = vec![(0, 0); t];
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                position[v] = (r, c);
            }
        }
        out.push(StandardTableau {
            rows: rows.clone(),
            position,
        });
        return;
    }
    for r in 0..shape.len() {
        let len = rows[r].len();
        if len < shape[r] && (r == 0 || rows[r - 1].len() > len) {
            rows[r].push(value);
            place(value + 1, t, shape, rows, out);
            rows[r].pop();
        }
    }
}

/// Matrices of the irrep `V_lambda` for every element of `S_t`, in the
/// standard-tableau basis of [`standard_tableaux`].
#[derive(Clone, Debug)]
pub struct IrrepMatrices {
    partition: Partition,
    tableaux: Vec<StandardTableau>,
    perms: Vec<PermutationT>,
    matrices: Vec<DMatrix<f64>>,
    index: HashMap<PermutationT, usize>,
}

impl IrrepMatrices {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn dim(&self) -> usize {
        self.tableaux.len()
    }

    pub fn tableaux(&self) -> &[StandardTableau] {
        &self.tableaux
    }

    /// `(pi, matrix(pi))` in lexicographic order of `pi`.
    pub fn iter(&self) -> impl Iterator<Item = (&PermutationT, &DMatrix<f64>)> {
        self.perms.iter().zip(self.matrices.iter())
    }

    pub fn matrix(&self, pi: &PermutationT) -> &DMatrix<f64> {
        &self.matrices[self.index[pi]]
    }
}

/// Matrix of the adjacent transposition swapping `k` and `k + 1`.
fn generator(
    tableaux: &[StandardTableau],
    lookup: &HashMap<StandardTableau, usize>,
    k: usize,
) -> DMatrix<f64> {
    let n = tableaux.len();
    let mut m = DMatrix::zeros(n, n);
    for (a, tab) in tableaux.iter().enumerate() {
        let axial = tab.content(k + 1) - tab.content(k);
        let inv = 1.0 / axial as f64;
        m[(a, a)] = inv;
        if axial.abs() > 1 {
            let b = lookup[&tab.swapped(k, k + 1)];
            m[(b, a)] = (1.0 - inv * inv).sqrt();
        }
    }
    m
}

pub fn young_orthogonal_rep(lambda: &Partition) -> Result<IrrepMatrices> {
    let t = lambda.size();
    if t > MAX_IRREP_DEGREE {
        return Err(LabError::capacity(
            "irrep materialisation",
            t as u128,
            MAX_IRREP_DEGREE as u128,
        ));
    }
    let tableaux = standard_tableaux(lambda);
    let lookup: HashMap<StandardTableau, usize> = tableaux
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, tab)| (tab, i))
        .collect();
    let dim = tableaux.len();
    let generators: Vec<DMatrix<f64>> = (0..t.saturating_sub(1))
        .map(|k| generator(&tableaux, &lookup, k))
        .collect();

    let perms = all_permutations(t);
    let matrices: Vec<DMatrix<f64>> = perms
        .iter()
        .map(|pi| {
            pi.adjacent_word()
                .into_iter()
                .fold(DMatrix::identity(dim, dim), |acc, k| acc * &generators[k])
        })
        .collect();
    let index = perms
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();
    Ok(IrrepMatrices {
        partition: lambda.clone(),
        tableaux,
        perms,
        matrices,
        index,
    })
}

/// Largest deviation from the Schur orthogonality relations
/// `(1/t!) Σ_π R^λ_π[i,j] R^μ_π[k,l] = δ_{λμ} δ_{ik} δ_{jl} / dim V_λ`
/// over all pairs of irreps of `S_t` and all index quadruples.
pub fn schur_orthogonality_error(t: usize) -> Result<f64> {
    let reps = super::partition::partitions(t)?
        .iter()
        .map(young_orthogonal_rep)
        .collect::<Result<Vec<_>>>()?;
    let order = super::perm::factorial(t) as f64;
    let mut worst = 0.0f64;
    for (a, ra) in reps.iter().enumerate() {
        for (b, rb) in reps.iter().enumerate() {
            let (da, db) = (ra.dim(), rb.dim());
            for i in 0..da {
                for j in 0..da {
                    for k in 0..db {
                        for l in 0..db {
                            let sum: f64 = ra
                                .iter()
                                .map(|(pi, m)| m[(i, j)] * rb.matrix(pi)[(k, l)])
                                .sum();
                            let expected = if a == b && i == k && j == l {
                                1.0 / da as f64
                            } else {
                                0.0
                            };
                            worst = worst.max((sum / order - expected).abs());
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symgroup::characters::{character, specht_dim};
    use crate::symgroup::partition::partitions;
    use crate::symgroup::perm::factorial;

    #[test]
    fn tableau_counts_and_first_is_row_reading() {
        for t in 1..=6 {
            for lam in partitions(t).unwrap() {
                let tabs = standard_tableaux(&lam);
                assert_eq!(tabs.len() as u128, specht_dim(&lam));
                let mut expected = 0;
                for (r, &len) in lam.parts().iter().enumerate() {
                    let row: Vec<usize> = (expected..expected + len).collect();
                    assert_eq!(tabs[0].rows()[r], row);
                    expected += len;
                }
            }
        }
    }

    #[test]
    fn trivial_and_sign() {
        for t in 1..=5 {
            let triv = young_orthogonal_rep(&Partition::row(t)).unwrap();
            let sign = young_orthogonal_rep(&Partition::column(t)).unwrap();
            for (pi, m) in triv.iter() {
                assert_eq!(m.nrows(), 1);
                assert!((m[(0, 0)] - 1.0).abs() < 1e-14);
                let s = sign.matrix(pi)[(0, 0)];
                assert!((s - pi.sign() as f64).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn orthogonal_homomorphism_with_correct_characters() {
        for t in 1..=5 {
            for lam in partitions(t).unwrap() {
                let rep = young_orthogonal_rep(&lam).unwrap();
                let n = rep.dim();
                for (pi, m) in rep.iter() {
                    let gram = m * m.transpose();
                    assert!((gram - DMatrix::<f64>::identity(n, n)).amax() < 1e-12);
                    let chi = character(&lam, pi).unwrap() as f64;
                    assert!((m.trace() - chi).abs() < 1e-9, "{lam} {pi}");
                }
                for (p, mp) in rep.iter() {
                    for (q, mq) in rep.iter() {
                        let lhs = rep.matrix(&p.compose(q));
                        assert!((lhs - mp * mq).amax() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn schur_sum_for_two_one() {
        let lam = Partition::new(vec![2, 1]).unwrap();
        let rep = young_orthogonal_rep(&lam).unwrap();
        let s: f64 = rep.iter().map(|(_, m)| m[(0, 0)].powi(2)).sum();
        assert!((s - 3.0).abs() < 1e-12);
        assert_eq!(factorial(3) as f64 / rep.dim() as f64, 3.0);
    }

    #[test]
    fn schur_orthogonality() {
        for t in 1..=4 {
            assert!(schur_orthogonality_error(t).unwrap() < 1e-12);
        }
    }

    #[test]
    fn over_budget() {
        assert!(matches!(
            young_orthogonal_rep(&Partition::row(7)),
            Err(LabError::Capacity { .. })
        ));
    }
}
