use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::StateFamily;
use crate::cap::{check_dims, index_to_tuple, tuple_to_index};
use crate::error::{LabError, Result};
use crate::operators::{
    distinct_mask, sample_haar_state, schatten1_norm, trace_norm_upper_bound, CMatrix, CVector,
    DenseOperator, DensityMatrix, StateVector, C64, ZERO,
};
use crate::twirls::split_shape;

/// Above this dimension trace norms are replaced by the bound `sqrt(D) ‖·‖_F`.
pub const EXACT_TRACE_NORM_DIM: usize = 1024;

/// Exact Schatten-1 norm for small spaces, rigorous upper bound otherwise.
pub fn trace_norm_or_bound(m: &CMatrix) -> f64 {
    if m.nrows() <= EXACT_TRACE_NORM_DIM {
        schatten1_norm(m)
    } else {
        trace_norm_upper_bound(m)
    }
}

/// Builds a member of `family` on `(C^{2^n})^{⊗t} ⊗ C^{dim_e}`.
pub fn build_state(
    family: StateFamily,
    n: usize,
    t: usize,
    dim_e: usize,
    seed: u64,
) -> Result<StateVector> {
    if n == 0 || n >= usize::BITS as usize {
        return Err(LabError::domain(format!("invalid qubit count {n}")));
    }
    build_state_for_dim(family, 1 << n, t, dim_e, seed)
}

/// As [`build_state`] for an arbitrary local dimension `d`.
pub fn build_state_for_dim(
    family: StateFamily,
    d: usize,
    t: usize,
    dim_e: usize,
    seed: u64,
) -> Result<StateVector> {
    if t == 0 || dim_e == 0 || d == 0 {
        return Err(LabError::domain("d, t and dim_e must be positive"));
    }
    let dim = check_dims(d, t, dim_e)?;
    let mut registers = vec![d; t];
    registers.push(dim_e);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match family {
        StateFamily::RandomPure => StateVector::new(sample_haar_state(dim, &mut rng), registers),
        StateFamily::DistinctSupported => {
            if d < t {
                return Err(LabError::Degenerate(format!(
                    "no distinct tuples exist for d = {d} < t = {t}"
                )));
            }
            let mask = distinct_mask(d, t)?;
            let mut amps = sample_haar_state(dim, &mut rng);
            for (i, z) in amps.iter_mut().enumerate() {
                if !mask[i / dim_e] {
                    *z = ZERO;
                }
            }
            StateVector::normalized(amps, registers)
        }
        StateFamily::TensorPower => {
            let phi = StateVector::new(sample_haar_state(d, &mut rng), vec![d])?;
            let e0 = StateVector::basis(&[dim_e], 0)?;
            Ok(tensor_power_state(&phi, t)?.kron(&e0))
        }
        StateFamily::ComputationalBasis => {
            let tuple: Vec<usize> = (0..t).map(|_| rng.random_range(0..d)).collect();
            StateVector::basis(&registers, tuple_to_index(&tuple, d) * dim_e)
        }
        StateFamily::AdversarialColliding => {
            let mut amps = CVector::zeros(dim);
            let w = C64::new(1.0 / (d as f64).sqrt(), 0.0);
            for z in 0..d {
                let a = tuple_to_index(&vec![z; t], d);
                amps[a * dim_e + z % dim_e] = w;
            }
            StateVector::new(amps, registers)
        }
    }
}

/// `|φ>^{⊗t}` for a single-register state.
pub fn tensor_power_state(phi: &StateVector, t: usize) -> Result<StateVector> {
    if phi.registers().len() != 1 {
        return Err(LabError::domain(
            "tensor power needs a single-register state",
        ));
    }
    if t == 0 {
        return Err(LabError::domain("tensor power needs t >= 1"));
    }
    check_dims(phi.dim(), t, 1)?;
    let mut out = phi.clone();
    for _ in 1..t {
        out = out.kron(phi);
    }
    Ok(out)
}

/// Distinct-subspace projection of a state and how far it moved.
#[derive(Clone, Debug)]
pub struct GentleNormalization {
    /// `Λ ξ Λ / Tr[Λ ξ]`.
    pub phi: DensityMatrix,
    /// `‖φ - ξ‖₁`.
    pub delta: f64,
    /// `Tr[Λ ξ]`.
    pub acceptance: f64,
    /// `2 sqrt(1 - Tr[Λ ξ])`.
    pub bound: f64,
}

/// Smallest distinct-subspace weight accepted by [`gentle_normalize`].
pub const MIN_ACCEPTANCE: f64 = 1e-12;

/// Projects `ξ` onto distinct tuples (Λ acting on the first `t` registers)
/// and renormalises.
pub fn gentle_normalize(xi: &DenseOperator, t: usize) -> Result<GentleNormalization> {
    let (d, dim_e) = split_shape(xi.registers(), t)?;
    let mask = distinct_mask(d, t)?;
    let keep = |i: usize| mask[i / dim_e];
    let m = xi.matrix();
    let acceptance: f64 = (0..m.nrows())
        .filter(|&i| keep(i))
        .map(|i| m[(i, i)].re)
        .sum();
    if acceptance < MIN_ACCEPTANCE {
        return Err(LabError::Degenerate(format!(
            "state has distinct-subspace weight {acceptance:e}; nothing to normalise"
        )));
    }
    let phi = CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        if keep(i) && keep(j) {
            m[(i, j)] / acceptance
        } else {
            ZERO
        }
    });
    let delta = trace_norm_or_bound(&(&phi - m));
    let phi =
        DensityMatrix::from_operator_unchecked(DenseOperator::new(phi, xi.registers().to_vec())?);
    Ok(GentleNormalization {
        phi,
        delta,
        acceptance,
        bound: 2.0 * (1.0 - acceptance).max(0.0).sqrt(),
    })
}

/// Distinct tuples of `[d]^t` in index order.
pub fn distinct_tuples(d: usize, t: usize) -> Result<Vec<Vec<usize>>> {
    let mask = distinct_mask(d, t)?;
    Ok(mask
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(idx, _)| {
            let mut a = vec![0; t];
            index_to_tuple(idx, d, &mut a);
            a
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{distinct_projector, hermitian_eigenvalues};

    #[test]
    fn families_are_normalised_with_the_right_shape() {
        for family in StateFamily::ALL {
            let psi = build_state(family, 2, 2, 3, 7).unwrap();
            assert_eq!(psi.registers(), &[4, 4, 3]);
            assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-12);
            assert_eq!(build_state(family, 2, 2, 3, 7).unwrap(), psi);
        }
    }

    #[test]
    fn tensor_power_of_zero_is_a_product_basis_state() {
        let zero = StateVector::basis(&[2], 0).unwrap();
        let p = tensor_power_state(&zero, 3).unwrap();
        assert_eq!(p, StateVector::basis(&[2, 2, 2], 0).unwrap());
        let psi = build_state(StateFamily::TensorPower, 1, 2, 2, 3).unwrap();
        let reduced = psi.reduced_state(&[0]).unwrap();
        assert!(((reduced.matrix() * reduced.matrix()).trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distinct_supported_is_fixed_by_the_projector() {
        let psi = build_state(StateFamily::DistinctSupported, 2, 3, 2, 1).unwrap();
        let lam = distinct_projector(4, 3).unwrap().operator;
        let lam_e = lam.kron(&DenseOperator::identity(&[2]));
        let projected = lam_e.matrix() * psi.amplitudes();
        assert_eq!((projected - psi.amplitudes()).norm(), 0.0);
        assert!(matches!(
            build_state(StateFamily::DistinctSupported, 1, 3, 1, 0),
            Err(LabError::Degenerate(_))
        ));
    }

    #[test]
    fn random_pure_workspace_rank_is_bounded() {
        let psi = build_state(StateFamily::RandomPure, 2, 2, 4, 5).unwrap();
        let rho_e = psi.reduced_state(&[2]).unwrap();
        let rank = hermitian_eigenvalues(rho_e.matrix())
            .iter()
            .filter(|&&v| v > 1e-12)
            .count();
        assert!(rank <= 4);
    }

    #[test]
    fn colliding_state_has_no_distinct_weight() {
        let psi = build_state(StateFamily::AdversarialColliding, 2, 2, 2, 0).unwrap();
        assert!(matches!(
            gentle_normalize(&psi.outer_product(), 2),
            Err(LabError::Degenerate(_))
        ));
    }

    #[test]
    fn gentle_examples() {
        let psi = build_state(StateFamily::DistinctSupported, 2, 2, 2, 4).unwrap();
        let g = gentle_normalize(&psi.outer_product(), 2).unwrap();
        assert!(g.delta < 1e-10);
        assert!((g.acceptance - 1.0).abs() < 1e-12);

        let mixed = DensityMatrix::maximally_mixed(&[4, 4, 1]);
        let g = gentle_normalize(mixed.as_operator(), 2).unwrap();
        assert!((g.acceptance - 0.75).abs() < 1e-15);
        assert!((g.bound - 1.0).abs() < 1e-15);
        // φ = Λ/12: ‖φ - I/16‖₁ = 12 (1/12 - 1/16) + 4/16 = 1/2.
        assert!((g.delta - 0.5).abs() < 1e-12);
        assert!(g.delta <= g.bound);
    }
}
