//! Direct check of the permutation-sum collapse on Schur-Weyl basis pairs:
//! `Σ_σ <β|R_σ†|α> R_σ = δ_{λλ'} δ_{ii'} (t!/dim V_λ) (1_{W_λ} ⊗ |v_j><v_{j'}|)`
//! for `α = |w_{λ,i} v_{λ,j}>`, `β = |w_{λ',i'} v_{λ',j'}>`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::operators::subsystem_perm_images;
use crate::schur_weyl::IsotypicDecomposition;
use crate::symgroup::{all_permutations, factorial};

/// Largest `d^t` for which all basis pairs are checked.
pub const COLLAPSE_DIM_LIMIT: usize = 64;

/// Largest entrywise deviation over all ordered basis pairs.
pub fn collapse_identity_error(decomposition: &IsotypicDecomposition) -> Result<f64> {
    let dim = decomposition.dim();
    if dim > COLLAPSE_DIM_LIMIT {
        return Err(LabError::capacity(
            "collapse identity check dimension",
            dim as u128,
            COLLAPSE_DIM_LIMIT as u128,
        ));
    }
    let (d, t) = (decomposition.d, decomposition.t);
    let images = all_permutations(t)
        .iter()
        .map(|pi| subsystem_perm_images(pi, d))
        .collect::<Result<Vec<_>>>()?;
    let order = factorial(t) as f64;

    // (block, i, j) label and vector for every basis column.
    let mut labels = Vec::new();
    for (bi, block) in decomposition.blocks.iter().enumerate() {
        for i in 0..block.weyl_dim {
            for j in 0..block.specht_dim {
                labels.push((
                    bi,
                    i,
                    j,
                    block.basis.column(block.column(i, j)).into_owned(),
                ));
            }
        }
    }

    // Right-hand sides indexed by (block, j, j').
    let rhs = |bi: usize, j: usize, jp: usize| -> DMatrix<f64> {
        let block = &decomposition.blocks[bi];
        let scale = order / block.specht_dim as f64;
        let mut m = DMatrix::zeros(dim, dim);
        for w in 0..block.weyl_dim {
            let u = block.basis.column(block.column(w, j));
            let v = block.basis.column(block.column(w, jp));
            m += u * v.transpose() * scale;
        }
        m
    };

    let worst = labels
        .par_iter()
        .map(|(ba, ia, ja, alpha)| {
            let mut worst = 0.0f64;
            for (bb, ib, jb, beta) in &labels {
                let mut lhs = DMatrix::<f64>::zeros(dim, dim);
                for img in &images {
                    // <β|R_σ†|α> = <α|R_σ|β>, real in this basis.
                    let c: f64 = img
                        .iter()
                        .enumerate()
                        .map(|(a, &b)| alpha[b] * beta[a])
                        .sum();
                    if c != 0.0 {
                        for (a, &b) in img.iter().enumerate() {
                            lhs[(b, a)] += c;
                        }
                    }
                }
                if ba == bb && ia == ib {
                    lhs -= rhs(*ba, *ja, *jb);
                }
                worst = worst.max(lhs.amax());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}
