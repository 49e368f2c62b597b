//! Concrete operators on `C^d` and `(C^d)^{⊗t}`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dense::{CMatrix, DenseOperator, ONE};
use crate::cap::{check_dims, index_to_tuple, tuple_to_index};
use crate::error::{LabError, Result};
use crate::symgroup::PermutationT;

/// A permutation of the computational basis labels `[d]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PermutationD {
    images: Vec<usize>,
}

impl PermutationD {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        // Same bijection check as on S_t.
        PermutationT::new(images.clone())?;
        Ok(Self { images })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            images: (0..d).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (0..d).collect();
        images.shuffle(rng);
        Self { images }
    }

    pub fn domain_size(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y] = x;
        }
        Self { images }
    }
}

impl TryFrom<Vec<usize>> for PermutationD {
    type Error = LabError;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PermutationD> for Vec<usize> {
    fn from(p: PermutationD) -> Self {
        p.images
    }
}

/// A total function `[d] -> {0, 1}` as a truth table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BooleanFunction {
    bits: Vec<bool>,
}

impl BooleanFunction {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zero(d: usize) -> Self {
        Self {
            bits: vec![false; d],
        }
    }

    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        Self {
            bits: (0..d).map(|_| rng.random()).collect(),
        }
    }

    pub fn domain_size(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn eval(&self, x: usize) -> bool {
        self.bits[x]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// `P_pi : |x> -> |pi(x)>`.
pub fn perm_op(pi: &PermutationD) -> DenseOperator {
    let d = pi.domain_size();
    let mut m = CMatrix::zeros(d, d);
    for x in 0..d {
        m[(pi.apply(x), x)] = ONE;
    }
    DenseOperator::from_matrix(m).expect("square by construction")
}

/// `F_f : |x> -> (-1)^{f(x)} |x>`.
pub fn phase_op(f: &BooleanFunction) -> DenseOperator {
    let d = f.domain_size();
    let mut m = CMatrix::zeros(d, d);
    for x in 0..d {
        m[(x, x)] = if f.eval(x) { -ONE } else { ONE };
    }
    DenseOperator::from_matrix(m).expect("square by construction")
}

/// For every basis index `a` of `(C^d)^{⊗t}`, the index of `R_pi |a>`.
///
/// `R_pi` sends the content of slot `k` to slot `pi(k)`, i.e.
/// `R_pi |a> = |a_{pi^{-1}}>`.
pub fn subsystem_perm_images(pi: &PermutationT, d: usize) -> Result<Vec<usize>> {
    let t = pi.degree();
    let dim = check_dims(d, t, 1)?;
    let mut a = vec![0usize; t];
    let mut b = vec![0usize; t];
    Ok((0..dim)
        .map(|idx| {
            index_to_tuple(idx, d, &mut a);
            for (k, &ak) in a.iter().enumerate() {
                b[pi.apply(k)] = ak;
            }
            tuple_to_index(&b, d)
        })
        .collect())
}

/// `R_pi` on `(C^d)^{⊗t}`.
pub fn subsystem_perm_op(pi: &PermutationT, d: usize) -> Result<DenseOperator> {
    let images = subsystem_perm_images(pi, d)?;
    let dim = images.len();
    let mut m = CMatrix::zeros(dim, dim);
    for (a, &b) in images.iter().enumerate() {
        m[(b, a)] = ONE;
    }
    DenseOperator::new(m, vec![d; pi.degree()])
}

pub fn is_distinct_tuple(a: &[usize]) -> bool {
    a.iter()
        .enumerate()
        .all(|(i, x)| a[i + 1..].iter().all(|y| y != x))
}

/// `mask[a]` is true iff the tuple with index `a` has pairwise distinct entries.
pub fn distinct_mask(d: usize, t: usize) -> Result<Vec<bool>> {
    let dim = check_dims(d, t, 1)?;
    let mut a = vec![0usize; t];
    Ok((0..dim)
        .map(|idx| {
            index_to_tuple(idx, d, &mut a);
            is_distinct_tuple(&a)
        })
        .collect())
}

/// `d! / (d - t)!`, zero when `t > d`.
pub fn falling_factorial(d: usize, t: usize) -> u128 {
    if t > d {
        return 0;
    }
    ((d - t + 1)..=d).map(|x| x as u128).product()
}

/// The projector onto distinct tuples together with its exact trace.
#[derive(Clone, Debug)]
pub struct DistinctProjector {
    pub operator: DenseOperator,
    pub trace: u128,
    /// Set when `t > d`: no distinct tuples exist and the projector is zero.
    pub empty: bool,
}

pub fn distinct_projector(d: usize, t: usize) -> Result<DistinctProjector> {
    let mask = distinct_mask(d, t)?;
    let dim = mask.len();
    let mut m = CMatrix::zeros(dim, dim);
    for (a, &keep) in mask.iter().enumerate() {
        if keep {
            m[(a, a)] = ONE;
        }
    }
    let trace = falling_factorial(d, t);
    Ok(DistinctProjector {
        operator: DenseOperator::new(m, vec![d; t])?,
        trace,
        empty: trace == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::dense::C64;
    use crate::symgroup::all_permutations;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn perm_op_examples() {
        assert_eq!(
            perm_op(&PermutationD::identity(5)),
            DenseOperator::identity(&[5])
        );
        let x = perm_op(&PermutationD::new(vec![1, 0]).unwrap());
        let pauli_x =
            CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), ONE, ONE, C64::new(0.0, 0.0)]);
        assert_eq!(x.matrix(), &pauli_x);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let pi = PermutationD::random(7, &mut rng);
            let prod = perm_op(&pi).mul(&perm_op(&pi.inverse())).unwrap();
            assert_eq!(prod, DenseOperator::identity(&[7]));
        }
    }

    #[test]
    fn phase_op_examples() {
        assert_eq!(
            phase_op(&BooleanFunction::zero(4)),
            DenseOperator::identity(&[4])
        );
        let z = phase_op(&BooleanFunction::new(vec![false, true]));
        assert_eq!(z.matrix()[(0, 0)], ONE);
        assert_eq!(z.matrix()[(1, 1)], -ONE);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = BooleanFunction::random(8, &mut rng);
        let sq = phase_op(&f).mul(&phase_op(&f)).unwrap();
        assert_eq!(sq, DenseOperator::identity(&[8]));
    }

    #[test]
    fn swap_and_identity() {
        let swap = subsystem_perm_op(&PermutationT::transposition(2, 0, 1), 2).unwrap();
        let expected = [0usize, 2, 1, 3];
        for (a, &b) in expected.iter().enumerate() {
            assert_eq!(swap.matrix()[(b, a)], ONE);
        }
        assert_eq!(
            subsystem_perm_op(&PermutationT::identity(3), 3).unwrap(),
            DenseOperator::identity(&[3, 3, 3])
        );
    }

    #[test]
    fn trace_counts_cycles() {
        let d = 4;
        for pi in all_permutations(3) {
            let r = subsystem_perm_op(&pi, d).unwrap();
            let expected = (d as f64).powi(pi.num_cycles() as i32);
            assert!((r.trace().re - expected).abs() < 1e-12);
        }
        let three_cycle = subsystem_perm_op(&PermutationT::long_cycle(3), 4).unwrap();
        assert!((three_cycle.trace().re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn representation_property() {
        for t in 1..=3 {
            let perms = all_permutations(t);
            for p in &perms {
                for q in &perms {
                    let lhs = subsystem_perm_op(p, 3)
                        .unwrap()
                        .mul(&subsystem_perm_op(q, 3).unwrap())
                        .unwrap();
                    let rhs = subsystem_perm_op(&p.compose(q), 3).unwrap();
                    assert!(lhs.max_abs_diff(&rhs) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn distinct_projector_examples() {
        let p = distinct_projector(4, 2).unwrap();
        assert_eq!(p.trace, 12);
        assert!((p.operator.trace().re - 12.0).abs() < 1e-12);
        assert_eq!(
            distinct_projector(5, 1).unwrap().operator,
            DenseOperator::identity(&[5])
        );
        let empty = distinct_projector(2, 3).unwrap();
        assert!(empty.empty);
        assert_eq!(empty.operator, DenseOperator::zeros(&[2, 2, 2]));
    }

    #[test]
    fn distinct_projector_commutes_with_subsystem_permutations() {
        let lam = distinct_projector(3, 3).unwrap().operator;
        for pi in all_permutations(3) {
            let r = subsystem_perm_op(&pi, 3).unwrap();
            let comm = r.mul(&lam).unwrap().sub(&lam.mul(&r).unwrap()).unwrap();
            assert_eq!(comm.frobenius_norm(), 0.0);
        }
    }
}
