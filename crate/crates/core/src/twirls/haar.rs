use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use super::montecarlo::{conjugation_average, MonteCarloEstimate};
use super::{split_shape, TwirlInput};
use crate::error::{LabError, Result};
use crate::operators::{
    sample_haar_matrix, subsystem_perm_images, CMatrix, DenseOperator, DensityMatrix, C64,
};
use crate::schur_weyl::{assemble_from_blocks, IsotypicDecomposition};
use crate::symgroup::all_permutations;

/// Result of projecting onto the commutant `span{R_π ⊗ Y}`.
#[derive(Clone, Debug)]
pub struct CommutantProjection {
    pub operator: DenseOperator,
    /// 2-norm condition number of the Gram matrix `d^{#cycles(π^{-1}σ)}`.
    pub gram_condition: f64,
}

/// Exact t-wise Haar twirl as the Hilbert-Schmidt projection of `x` onto
/// operators of the form `Σ_π R_π ⊗ Y_π`.
///
/// Solves `Σ_σ Tr[R_π† R_σ] Y_σ = Tr_A[(R_π† ⊗ 1) x]` for the workspace
/// blocks `Y_σ`.
pub fn haar_twirl_exact(x: &DenseOperator, t: usize) -> Result<CommutantProjection> {
    let (d, dim_e) = split_shape(x.registers(), t)?;
    if d < t {
        return Err(LabError::domain(format!(
            "permutation operators are linearly dependent for d = {d} < t = {t}; \
             the commutant Gram matrix is singular"
        )));
    }
    let perms = all_permutations(t);
    let images = perms
        .iter()
        .map(|pi| subsystem_perm_images(pi, d))
        .collect::<Result<Vec<_>>>()?;
    let m = perms.len();

    let gram = DMatrix::from_fn(m, m, |p, s| {
        let rel = perms[p].inverse().compose(&perms[s]);
        (d as f64).powi(rel.num_cycles() as i32)
    });
    let eig = SymmetricEigen::new(gram.clone()).eigenvalues;
    let gram_condition = eig.max() / eig.min();
    let chol = Cholesky::new(gram).ok_or_else(|| {
        LabError::NumericalDegeneracy("commutant Gram matrix is not positive definite".into())
    })?;

    // Right-hand side: row π holds Tr_A[(R_π† ⊗ 1) x] flattened, real and
    // imaginary parts side by side.
    let xm = x.matrix();
    let ee = dim_e * dim_e;
    let mut rhs = DMatrix::<f64>::zeros(m, 2 * ee);
    for (p, img) in images.iter().enumerate() {
        for (a, &b) in img.iter().enumerate() {
            for e in 0..dim_e {
                for f in 0..dim_e {
                    let z = xm[(b * dim_e + e, a * dim_e + f)];
                    rhs[(p, e * dim_e + f)] += z.re;
                    rhs[(p, ee + e * dim_e + f)] += z.im;
                }
            }
        }
    }
    let coeffs = chol.solve(&rhs);

    let dim = x.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for (p, img) in images.iter().enumerate() {
        for (a, &b) in img.iter().enumerate() {
            for e in 0..dim_e {
                for f in 0..dim_e {
                    let k = e * dim_e + f;
                    out[(b * dim_e + e, a * dim_e + f)] +=
                        C64::new(coeffs[(p, k)], coeffs[(p, ee + k)]);
                }
            }
        }
    }
    Ok(CommutantProjection {
        operator: DenseOperator::new(out, x.registers().to_vec())?,
        gram_condition,
    })
}

/// Haar twirl assembled block by block:
/// `Σ_λ (1_{W_λ} / dim W_λ) ⊗ Tr_{W_λ}[1_{P_λ} ρ 1_{P_λ}]`.
pub fn haar_twirl_schur_weyl(
    rho: &DensityMatrix,
    decomposition: &IsotypicDecomposition,
) -> Result<DensityMatrix> {
    let out = assemble_from_blocks(rho.as_operator(), decomposition, |block| {
        DMatrix::identity(block.weyl_dim, block.weyl_dim) / block.weyl_dim as f64
    })?;
    Ok(DensityMatrix::from_operator_unchecked(out))
}

/// Monte-Carlo Haar twirl over `samples` Haar-random unitaries.
pub fn haar_twirl_monte_carlo(
    input: TwirlInput<'_>,
    t: usize,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    let (d, _) = split_shape(input.registers(), t)?;
    conjugation_average(input, t, samples, seed, |rng| {
        Ok(sample_haar_matrix(d, rng))
    })
}
