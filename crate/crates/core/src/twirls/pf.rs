use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::Rng;

use super::montecarlo::{conjugation_average, signed_permutation, MonteCarloEstimate};
use super::{split_shape, TwirlInput};
use crate::cap::{check_dims, index_to_tuple, tuple_to_index};
use crate::error::{LabError, Result};
use crate::operators::{
    distinct_mask, falling_factorial, is_distinct_tuple, schatten1_norm, trace_norm_upper_bound,
    CMatrix, DenseOperator, DensityMatrix, PermutationD, C64, ZERO,
};
use crate::schur_weyl::{assemble_from_blocks, IsotypicDecomposition};
use crate::symgroup::{all_permutations, factorial};

/// Largest allowed `‖ΛρΛ - ρ‖₁` for the distinct-support formula.
pub const DISTINCT_SUPPORT_TOL: f64 = 1e-9;

/// Relabels the values of `x ++ y` by order of first appearance. Returns the
/// pattern and the number of distinct values, or `None` when some value
/// occurs an odd number of times (the phase average then vanishes).
fn even_pattern(x: &[usize], y: &[usize], scratch: &mut [u8]) -> Option<(Vec<u8>, usize)> {
    const UNSET: u8 = u8::MAX;
    let mut pattern = Vec::with_capacity(x.len() + y.len());
    let mut seen = Vec::new();
    for &v in x.iter().chain(y) {
        if scratch[v] == UNSET {
            scratch[v] = seen.len() as u8;
            seen.push(v);
        }
        pattern.push(scratch[v]);
    }
    for &v in &seen {
        scratch[v] = UNSET;
    }
    let mut counts = vec![0usize; seen.len()];
    for &l in &pattern {
        counts[l as usize] += 1;
    }
    counts
        .iter()
        .all(|c| c % 2 == 0)
        .then_some((pattern, seen.len()))
}

/// Calls `visit` with every injective map `[k] -> [d]`.
fn for_each_injection(k: usize, d: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(slot: usize, used: &mut [bool], cur: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if slot == cur.capacity() {
            visit(cur);
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(slot + 1, used, cur, visit);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut used = vec![false; d];
    let mut cur = Vec::with_capacity(k);
    rec(0, &mut used, &mut cur, visit);
}

/// Exact `E_{π,f}[(P_π F_f)^{⊗t} |x><y| (P_π F_f)^{⊗t,†}]`.
///
/// Zero unless every value occurs an even number of times in `x ++ y`;
/// otherwise the uniform average of `|g(x)><g(y)|` over injective
/// relabelings `g` of the values present.
pub fn pf_twirl_basis_element(x: &[usize], y: &[usize], d: usize) -> Result<DenseOperator> {
    let t = x.len();
    if t == 0 || y.len() != t {
        return Err(LabError::domain(
            "basis tuples must be nonempty and of equal length",
        ));
    }
    if x.iter().chain(y).any(|&v| v >= d) {
        return Err(LabError::domain(format!(
            "tuple entries must be below d = {d}"
        )));
    }
    let dim = check_dims(d, t, 1)?;
    let mut out = CMatrix::zeros(dim, dim);

    if is_distinct_tuple(x) && is_distinct_tuple(y) {
        // y = x∘σ for some slot permutation σ iff both hold the same values;
        // the result is Λ R_σ / Tr Λ = Σ_{a distinct} |a><a∘σ| / Tr Λ.
        let sigma: Option<Vec<usize>> = y.iter().map(|v| x.iter().position(|u| u == v)).collect();
        if let Some(sigma) = sigma {
            let weight = 1.0 / falling_factorial(d, t) as f64;
            let mask = distinct_mask(d, t)?;
            let mut a = vec![0usize; t];
            let mut b = vec![0usize; t];
            for (idx, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
                index_to_tuple(idx, d, &mut a);
                for k in 0..t {
                    b[k] = a[sigma[k]];
                }
                out[(idx, tuple_to_index(&b, d))] = C64::new(weight, 0.0);
            }
        }
        return DenseOperator::new(out, vec![d; t]);
    }

    let mut scratch = vec![u8::MAX; d];
    if let Some((pattern, k)) = even_pattern(x, y, &mut scratch) {
        let weight = C64::new(1.0 / falling_factorial(d, k) as f64, 0.0);
        let mut a = vec![0usize; t];
        let mut b = vec![0usize; t];
        for_each_injection(k, d, &mut |g| {
            for s in 0..t {
                a[s] = g[pattern[s] as usize];
                b[s] = g[pattern[t + s] as usize];
            }
            out[(tuple_to_index(&a, d), tuple_to_index(&b, d))] += weight;
        });
    }
    DenseOperator::new(out, vec![d; t])
}

/// Largest `d` accepted by [`pf_basis_element_by_group`].
pub const GROUP_ORACLE_MAX_D: usize = 6;

/// Reference for [`pf_twirl_basis_element`] that enumerates every
/// `(π, f) ∈ S_d × {0,1}^d` and sums `(PF)^{⊗t} |x><y| (PF)^{⊗t,†}` directly.
pub fn pf_basis_element_by_group(x: &[usize], y: &[usize], d: usize) -> Result<DenseOperator> {
    let t = x.len();
    if t == 0 || y.len() != t || x.iter().chain(y).any(|&v| v >= d) {
        return Err(LabError::domain(
            "basis tuples must be nonempty, of equal length and below d",
        ));
    }
    if d > GROUP_ORACLE_MAX_D {
        return Err(LabError::capacity(
            "group oracle degree",
            d as u128,
            GROUP_ORACLE_MAX_D as u128,
        ));
    }
    let dim = check_dims(d, t, 1)?;
    let mut out = CMatrix::zeros(dim, dim);
    let weight = 1.0 / (factorial(d) as f64 * (1u64 << d) as f64);
    let mut a = vec![0usize; t];
    let mut b = vec![0usize; t];
    for pi in all_permutations(d) {
        for s in 0..t {
            a[s] = pi.apply(x[s]);
            b[s] = pi.apply(y[s]);
        }
        let (row, col) = (tuple_to_index(&a, d), tuple_to_index(&b, d));
        for bits in 0..(1u32 << d) {
            let flips = x.iter().chain(y).filter(|&&v| bits >> v & 1 == 1).count();
            let sign = if flips % 2 == 0 { weight } else { -weight };
            out[(row, col)] += C64::new(sign, 0.0);
        }
    }
    DenseOperator::new(out, vec![d; t])
}

/// Exact PF twirl of an operator on `A ⊗ E`.
///
/// Basis pairs `(a, b)` with the same relabeling pattern form one orbit; the
/// output block at `(a, b)` is the orbit sum of input blocks divided by the
/// orbit size `d!/(d-k)!`.
pub fn pf_twirl(x: &DenseOperator, t: usize) -> Result<DenseOperator> {
    let (d, dim_e) = split_shape(x.registers(), t)?;
    let dim_a = check_dims(d, t, dim_e)? / dim_e;
    let xm = x.matrix();
    let tuples: Vec<Vec<usize>> = (0..dim_a)
        .map(|idx| {
            let mut a = vec![0usize; t];
            index_to_tuple(idx, d, &mut a);
            a
        })
        .collect();

    const NONE: u32 = u32::MAX;
    let mut class_of = vec![NONE; dim_a * dim_a];
    let mut classes: HashMap<Vec<u8>, u32> = HashMap::new();
    let mut sums: Vec<CMatrix> = Vec::new();
    let mut sizes: Vec<f64> = Vec::new();
    let mut scratch = vec![u8::MAX; d];
    for (a, ta) in tuples.iter().enumerate() {
        for (b, tb) in tuples.iter().enumerate() {
            let Some((pattern, k)) = even_pattern(ta, tb, &mut scratch) else {
                continue;
            };
            let id = *classes.entry(pattern).or_insert_with(|| {
                sums.push(CMatrix::zeros(dim_e, dim_e));
                sizes.push(falling_factorial(d, k) as f64);
                (sums.len() - 1) as u32
            });
            class_of[a * dim_a + b] = id;
            sums[id as usize] += xm.view((a * dim_e, b * dim_e), (dim_e, dim_e));
        }
    }
    for (s, &n) in sums.iter_mut().zip(&sizes) {
        *s /= C64::new(n, 0.0);
    }

    let dim = x.dim();
    let mut out = CMatrix::from_element(dim, dim, ZERO);
    for a in 0..dim_a {
        for b in 0..dim_a {
            let id = class_of[a * dim_a + b];
            if id != NONE {
                out.view_mut((a * dim_e, b * dim_e), (dim_e, dim_e))
                    .copy_from(&sums[id as usize]);
            }
        }
    }
    DenseOperator::new(out, x.registers().to_vec())
}

/// `‖ΛρΛ - ρ‖₁` with `Λ` acting on the first `t` registers.
pub(crate) fn distinct_support_residual(rho: &DenseOperator, t: usize) -> Result<f64> {
    let (d, dim_e) = split_shape(rho.registers(), t)?;
    let mask = distinct_mask(d, t)?;
    let keep = |i: usize| mask[i / dim_e];
    let mut r = rho.matrix().clone();
    for i in 0..r.nrows() {
        for j in 0..r.ncols() {
            if keep(i) && keep(j) {
                r[(i, j)] = ZERO;
            }
        }
    }
    Ok(if r.nrows() <= 1024 {
        schatten1_norm(&r)
    } else {
        trace_norm_upper_bound(&r)
    })
}

/// PF twirl of a distinct-supported state in Schur-Weyl form:
/// `Σ_λ (Λ^{(λ)} / Tr Λ^{(λ)}) ⊗ Tr_{W_λ}[1_{P_λ} ρ 1_{P_λ}]`.
pub fn pf_twirl_distinct_formula(
    rho: &DensityMatrix,
    decomposition: &IsotypicDecomposition,
) -> Result<DensityMatrix> {
    let residual = distinct_support_residual(rho.as_operator(), decomposition.t)?;
    if residual > DISTINCT_SUPPORT_TOL {
        return Err(LabError::domain(format!(
            "input is not supported on distinct tuples (‖ΛρΛ - ρ‖₁ = {residual:e})"
        )));
    }
    let out = assemble_from_blocks(rho.as_operator(), decomposition, |block| {
        let tr = block.distinct_block.trace();
        if tr > 0.5 {
            &block.distinct_block / tr
        } else {
            DMatrix::zeros(block.weyl_dim, block.weyl_dim)
        }
    })?;
    Ok(DensityMatrix::from_operator_unchecked(out))
}

/// Monte-Carlo PF twirl over uniformly random `(π, f)`.
pub fn pf_twirl_monte_carlo(
    input: TwirlInput<'_>,
    t: usize,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    let (d, _) = split_shape(input.registers(), t)?;
    conjugation_average(input, t, samples, seed, |rng| {
        let pi = PermutationD::random(d, rng);
        let signs: Vec<bool> = (0..d).map(|_| rng.random()).collect();
        Ok(signed_permutation(pi.images(), &signs))
    })
}
