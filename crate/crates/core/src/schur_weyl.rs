//! Schur-Weyl decomposition of `(C^d)^{⊗t}`: isotypic projectors, an explicit
//! orthonormal basis `|w_{λ,i}> ⊗ |v_{λ,j}>`, and the blocks of the
//! distinct-subspace projector.
//!
//! The basis is built from matrix units
//! `E_{jk} = dim(V_λ)/t! * Σ_π [R^λ_π]_{jk} R_π = 1_{W_λ} ⊗ |v_j><v_k|`,
//! with `R^λ` from Young's orthogonal form. Columns of a block's basis matrix
//! are ordered `(i, j) -> i * dim(V_λ) + j`, so `R_π` acts in block
//! coordinates as `1_{W_λ} ⊗ R^λ_π`. Everything here is real.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cap::check_dims;
use crate::error::{LabError, Result};
use crate::operators::{
    distinct_mask, falling_factorial, subsystem_perm_images, CMatrix, DenseOperator, C64,
};
use crate::symgroup::{
    all_permutations, character, content_product, factorial, partitions, specht_dim, weyl_dim,
    young_orthogonal_rep, IrrepMatrices, Partition,
};

/// Largest `t` for which an explicit basis is constructed.
pub const MAX_BASIS_DEGREE: usize = 4;

/// Rank decisions in the range orthonormalisation.
pub const RANK_TOL: f64 = 1e-7;

const PROJECTOR_TOL: f64 = 1e-9;

/// One isotypic component `P_λ = W_λ ⊗ V_λ`.
#[derive(Clone, Debug)]
pub struct IsotypicBlock {
    pub partition: Partition,
    /// `1_{P_λ}` from the character formula.
    pub projector: DenseOperator,
    pub weyl_dim: usize,
    pub specht_dim: usize,
    /// `d^t x (weyl_dim * specht_dim)`, orthonormal columns.
    pub basis: DMatrix<f64>,
    /// `Λ^{(λ)}_{W_λ}` in the `|w_{λ,i}>` coordinates.
    pub distinct_block: DMatrix<f64>,
    pub irrep: IrrepMatrices,
}

impl IsotypicBlock {
    /// Column of `|w_{λ,i}> ⊗ |v_{λ,j}>` inside [`IsotypicBlock::basis`].
    pub fn column(&self, i: usize, j: usize) -> usize {
        i * self.specht_dim + j
    }

    pub fn dim(&self) -> usize {
        self.weyl_dim * self.specht_dim
    }
}

#[derive(Clone, Debug)]
pub struct IsotypicDecomposition {
    pub d: usize,
    pub t: usize,
    /// Blocks for every `λ ⊢ t` with at most `d` rows, in canonical order.
    pub blocks: Vec<IsotypicBlock>,
}

impl IsotypicDecomposition {
    pub fn dim(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.basis.nrows())
    }

    pub fn block(&self, lambda: &Partition) -> Option<&IsotypicBlock> {
        self.blocks.iter().find(|b| &b.partition == lambda)
    }

    /// All basis vectors side by side, block after block.
    pub fn full_basis(&self) -> DMatrix<f64> {
        let cols: Vec<_> = self
            .blocks
            .iter()
            .flat_map(|b| b.basis.column_iter())
            .collect();
        DMatrix::from_columns(&cols)
    }
}

/// `1_{P_λ} = dim(V_λ)/t! * Σ_π χ_λ(π^{-1}) R_π`.
pub fn isotypic_projector(lambda: &Partition, d: usize, t: usize) -> Result<DenseOperator> {
    if lambda.size() != t {
        return Err(LabError::domain(format!(
            "{lambda} is not a partition of {t}"
        )));
    }
    if lambda.rows() > d {
        return Err(LabError::domain(format!(
            "{lambda} has more rows than d = {d}; the block is absent"
        )));
    }
    let dim = check_dims(d, t, 1)?;
    let norm = specht_dim(lambda) as f64 / factorial(t) as f64;
    let mut m = CMatrix::zeros(dim, dim);
    for pi in all_permutations(t) {
        let coef = norm * character(lambda, &pi.inverse())? as f64;
        if coef == 0.0 {
            continue;
        }
        for (a, b) in subsystem_perm_images(&pi, d)?.into_iter().enumerate() {
            m[(b, a)] += C64::new(coef, 0.0);
        }
    }
    DenseOperator::new(m, vec![d; t])
}

/// `Σ_π coef(π) R_π` applied to the rows of `q`: returns `(Σ coef R_π) q`.
fn apply_perm_combination(coefs: &[(Vec<usize>, f64)], q: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(q.nrows(), q.ncols());
    for (images, coef) in coefs {
        if *coef == 0.0 {
            continue;
        }
        for (a, &b) in images.iter().enumerate() {
            for c in 0..q.ncols() {
                out[(b, c)] += coef * q[(a, c)];
            }
        }
    }
    out
}

/// Orthonormal basis of the column space of `m` by Gram-Schmidt with
/// largest-residual pivoting; columns with residual below `tol` are dropped.
fn orthonormal_range(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let mut residual = m.clone();
    let mut q_cols: Vec<nalgebra::DVector<f64>> = Vec::new();
    loop {
        let (best, norm) = residual
            .column_iter()
            .enumerate()
            .map(|(c, col)| (c, col.norm()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if norm < tol {
            break;
        }
        let mut q = residual.column(best).into_owned();
        // One reorthogonalisation pass against the accepted vectors.
        for prev in &q_cols {
            let overlap = prev.dot(&q);
            q.axpy(-overlap, prev, 1.0);
        }
        let qn = q.norm();
        q /= qn;
        let overlaps = q.transpose() * &residual;
        residual -= &q * overlaps;
        q_cols.push(q);
        if q_cols.len() == m.nrows() {
            break;
        }
    }
    if q_cols.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    DMatrix::from_columns(&q_cols)
}

fn build_block(
    lambda: &Partition,
    d: usize,
    t: usize,
    perm_images: &[(crate::symgroup::PermutationT, Vec<usize>)],
    mask: &[bool],
) -> Result<IsotypicBlock> {
    let irrep = young_orthogonal_rep(lambda)?;
    let v_dim = irrep.dim();
    let w_dim = weyl_dim(lambda, d)? as usize;
    let dim = mask.len();
    let norm = v_dim as f64 / factorial(t) as f64;

    let unit_coefs = |j: usize, k: usize| -> Vec<(Vec<usize>, f64)> {
        perm_images
            .iter()
            .map(|(pi, images)| (images.clone(), norm * irrep.matrix(pi)[(j, k)]))
            .collect()
    };

    // E_00 = 1_W ⊗ |v_0><v_0|; its range is W_λ ⊗ v_0.
    let e00 = apply_perm_combination(&unit_coefs(0, 0), &DMatrix::identity(dim, dim));
    let q = orthonormal_range(&e00, RANK_TOL);
    if q.ncols() != w_dim {
        return Err(LabError::NumericalDegeneracy(format!(
            "range of the {lambda} matrix unit has rank {} but dim W = {w_dim}",
            q.ncols()
        )));
    }

    let mut basis = DMatrix::zeros(dim, w_dim * v_dim);
    for j in 0..v_dim {
        let copy = if j == 0 {
            q.clone()
        } else {
            apply_perm_combination(&unit_coefs(j, 0), &q)
        };
        for i in 0..w_dim {
            basis.set_column(i * v_dim + j, &copy.column(i));
        }
    }

    // Λ^{(λ)}: average of the diagonal j-blocks of B^T Λ B.
    let mut masked = basis.clone();
    for (a, &keep) in mask.iter().enumerate() {
        if !keep {
            masked.row_mut(a).fill(0.0);
        }
    }
    let lam_coords = basis.transpose() * masked;
    let mut distinct_block = DMatrix::zeros(w_dim, w_dim);
    for i in 0..w_dim {
        for k in 0..w_dim {
            let s: f64 = (0..v_dim)
                .map(|j| lam_coords[(i * v_dim + j, k * v_dim + j)])
                .sum();
            distinct_block[(i, k)] = s / v_dim as f64;
        }
    }
    let idem = (&distinct_block * &distinct_block - &distinct_block).amax();
    if idem > PROJECTOR_TOL {
        return Err(LabError::Consistency(format!(
            "distinct block for {lambda} is not a projector (residual {idem:e})"
        )));
    }

    Ok(IsotypicBlock {
        partition: lambda.clone(),
        projector: isotypic_projector(lambda, d, t)?,
        weyl_dim: w_dim,
        specht_dim: v_dim,
        basis,
        distinct_block,
        irrep,
    })
}

/// Builds the full decomposition. Blocks whose diagram has more than `d`
/// rows are absent and skipped.
pub fn schur_weyl_basis(d: usize, t: usize) -> Result<IsotypicDecomposition> {
    if t == 0 || t > MAX_BASIS_DEGREE {
        return Err(LabError::capacity(
            "Schur-Weyl basis degree",
            t as u128,
            MAX_BASIS_DEGREE as u128,
        ));
    }
    check_dims(d, t, 1)?;
    let mask = distinct_mask(d, t)?;
    let perm_images = all_permutations(t)
        .into_iter()
        .map(|pi| {
            let images = subsystem_perm_images(&pi, d)?;
            Ok((pi, images))
        })
        .collect::<Result<Vec<_>>>()?;
    let lambdas: Vec<Partition> = partitions(t)?
        .into_iter()
        .filter(|l| l.rows() <= d)
        .collect();
    let blocks = lambdas
        .par_iter()
        .map(|l| build_block(l, d, t, &perm_images, &mask))
        .collect::<Result<Vec<_>>>()?;
    Ok(IsotypicDecomposition { d, t, blocks })
}

/// `Λ^{(λ)}_{W_λ}` of the given decomposition.
pub fn distinct_block<'a>(
    lambda: &Partition,
    decomposition: &'a IsotypicDecomposition,
) -> Result<&'a DMatrix<f64>> {
    decomposition
        .block(lambda)
        .map(|b| &b.distinct_block)
        .ok_or_else(|| LabError::domain(format!("no block for {lambda} in this decomposition")))
}

/// Splits the registers of an operator on `A ⊗ E` and returns `dim E`.
pub(crate) fn workspace_dim(x: &DenseOperator, d: usize, t: usize) -> Result<usize> {
    let regs = x.registers();
    if regs.len() < t || regs[..t].iter().any(|&r| r != d) {
        return Err(LabError::domain(format!(
            "expected {t} leading registers of dimension {d}, got {regs:?}"
        )));
    }
    Ok(regs[t..].iter().product())
}

/// `Bᵀ X B` for real `B` and complex `X`.
pub(crate) fn real_congruence(b: &DMatrix<f64>, x: &CMatrix) -> CMatrix {
    let re = x.map(|z| z.re);
    let im = x.map(|z| z.im);
    let bt = b.transpose();
    let r = &bt * re * b;
    let i = &bt * im * b;
    r.zip_map(&i, C64::new)
}

/// `B K Bᵀ` for real `B` and complex `K`.
pub(crate) fn real_embedding(b: &DMatrix<f64>, k: &CMatrix) -> CMatrix {
    let re = k.map(|z| z.re);
    let im = k.map(|z| z.im);
    let bt = b.transpose();
    let r = b * re * &bt;
    let i = b * im * &bt;
    r.zip_map(&i, C64::new)
}

fn with_workspace(basis: &DMatrix<f64>, dim_e: usize) -> DMatrix<f64> {
    if dim_e == 1 {
        basis.clone()
    } else {
        basis.kronecker(&DMatrix::identity(dim_e, dim_e))
    }
}

/// `Tr_{W_λ}[1_{P_λ} ρ 1_{P_λ}]` as an operator on `V_λ ⊗ E`.
pub fn partial_trace_over_w(
    lambda: &Partition,
    rho: &DenseOperator,
    decomposition: &IsotypicDecomposition,
) -> Result<DenseOperator> {
    let block = decomposition
        .block(lambda)
        .ok_or_else(|| LabError::domain(format!("no block for {lambda}")))?;
    partial_trace_over_w_block(block, rho, decomposition)
}

pub(crate) fn partial_trace_over_w_block(
    block: &IsotypicBlock,
    rho: &DenseOperator,
    decomposition: &IsotypicDecomposition,
) -> Result<DenseOperator> {
    let dim_e = workspace_dim(rho, decomposition.d, decomposition.t)?;
    let be = with_workspace(&block.basis, dim_e);
    let coords = real_congruence(&be, rho.matrix());
    let (w, v) = (block.weyl_dim, block.specht_dim);
    let ve = v * dim_e;
    let mut out = CMatrix::zeros(ve, ve);
    for i in 0..w {
        let off = i * ve;
        out += coords.view((off, off), (ve, ve));
    }
    DenseOperator::new(out, vec![v, dim_e])
}

/// `Σ_λ (B_λ ⊗ 1_E) (S_λ ⊗ M_λ) (B_λ ⊗ 1_E)ᵀ` where `M_λ` is the `W`-traced
/// block of `rho` and `S_λ = state(block)` is a `W_λ` operator.
pub(crate) fn assemble_from_blocks<F>(
    rho: &DenseOperator,
    decomposition: &IsotypicDecomposition,
    w_state: F,
) -> Result<DenseOperator>
where
    F: Fn(&IsotypicBlock) -> DMatrix<f64> + Sync,
{
    let dim_e = workspace_dim(rho, decomposition.d, decomposition.t)?;
    let parts = decomposition
        .blocks
        .par_iter()
        .map(|block| {
            let m = partial_trace_over_w_block(block, rho, decomposition)?;
            let s = w_state(block).map(|x| C64::new(x, 0.0));
            let k = s.kronecker(m.matrix());
            Ok(real_embedding(&with_workspace(&block.basis, dim_e), &k))
        })
        .collect::<Result<Vec<_>>>()?;
    let dim = rho.dim();
    let total = parts
        .into_iter()
        .fold(CMatrix::zeros(dim, dim), |acc, p| acc + p);
    DenseOperator::new(total, rho.registers().to_vec())
}

/// Exact rational `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u128,
    pub den: u128,
}

impl Ratio {
    pub fn new(num: u128, den: u128) -> Self {
        let g = gcd(num, den).max(1);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact per-λ comparison of `Tr Λ^{(λ)}` against `dim W_λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub partition: Partition,
    /// `dim(V_λ) * (d!/(d-t)!) / t!`
    pub tr_distinct_block: u128,
    /// `dim W_λ`
    pub tr_weyl: u128,
    /// `prod_{(i,j)} (d + j - i)`
    pub content_product: u128,
    /// `1 - (d!/(d-t)!) / prod (d + j - i)`
    pub deficit: Ratio,
    pub deficit_value: f64,
    /// `1 - Tr Λ^{(λ)} / dim W_λ` from the matrices, when a decomposition was supplied.
    pub measured_deficit: Option<f64>,
    pub measured_tr_distinct_block: Option<f64>,
}

pub fn ratio_report(
    d: usize,
    t: usize,
    decomposition: Option<&IsotypicDecomposition>,
) -> Result<Vec<RatioRecord>> {
    let fall = falling_factorial(d, t);
    let tf = factorial(t);
    let mut out = Vec::new();
    for lambda in partitions(t)? {
        if lambda.rows() > d {
            continue;
        }
        let sd = specht_dim(&lambda);
        let numer = sd * fall;
        if numer % tf != 0 {
            return Err(LabError::Consistency(format!(
                "Tr Λ^({lambda}) is not integral at d = {d}"
            )));
        }
        let cp = content_product(&lambda, d)?;
        let deficit = Ratio::new(cp - fall, cp);
        let measured = match decomposition {
            Some(dec) => {
                let block = dec
                    .block(&lambda)
                    .ok_or_else(|| LabError::domain(format!("decomposition lacks {lambda}")))?;
                let tr = block.distinct_block.trace();
                Some((tr, 1.0 - tr / block.weyl_dim as f64))
            }
            None => None,
        };
        out.push(RatioRecord {
            tr_distinct_block: numer / tf,
            tr_weyl: weyl_dim(&lambda, d)?,
            content_product: cp,
            deficit,
            deficit_value: deficit.to_f64(),
            measured_deficit: measured.map(|m| m.1),
            measured_tr_distinct_block: measured.map(|m| m.0),
            partition: lambda,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{
        distinct_projector, sample_haar_unitary, subsystem_perm_op, DensityMatrix, StateVector,
    };
    use crate::symgroup::PermutationT;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn rank(m: &CMatrix) -> usize {
        crate::operators::hermitian_eigenvalues(m)
            .iter()
            .filter(|&&e| e > 0.5)
            .count()
    }

    #[test]
    fn symmetric_projector_for_t2() {
        for d in [2usize, 3] {
            let sym = isotypic_projector(&p(&[2]), d, 2).unwrap();
            let swap = subsystem_perm_op(&PermutationT::transposition(2, 0, 1), d).unwrap();
            let expected = DenseOperator::identity(&[d, d])
                .add(&swap)
                .unwrap()
                .scale(0.5);
            assert!(sym.max_abs_diff(&expected) < 1e-14);
        }
    }

    #[test]
    fn projector_traces_and_ranks() {
        let anti = isotypic_projector(&p(&[1, 1]), 4, 2).unwrap();
        assert!((anti.trace().re - 6.0).abs() < 1e-12);
        assert_eq!(rank(anti.matrix()), 6);
        let mixed = isotypic_projector(&p(&[2, 1]), 4, 3).unwrap();
        assert!((mixed.trace().re - 40.0).abs() < 1e-10);
        assert_eq!(rank(mixed.matrix()), 40);
        assert!(matches!(
            isotypic_projector(&p(&[1, 1, 1]), 2, 3),
            Err(LabError::Domain(_))
        ));
    }

    #[test]
    fn block_dimensions() {
        let dec = schur_weyl_basis(2, 2).unwrap();
        let dims: Vec<(usize, usize)> = dec
            .blocks
            .iter()
            .map(|b| (b.weyl_dim, b.specht_dim))
            .collect();
        assert_eq!(dims, vec![(3, 1), (1, 1)]);
        let dec = schur_weyl_basis(4, 2).unwrap();
        let dims: Vec<(usize, usize)> = dec
            .blocks
            .iter()
            .map(|b| (b.weyl_dim, b.specht_dim))
            .collect();
        assert_eq!(dims, vec![(10, 1), (6, 1)]);
    }

    #[test]
    fn basis_is_orthonormal_and_spans_projectors() {
        for (d, t) in [(2, 2), (3, 3), (4, 3), (2, 3), (3, 4)] {
            let dec = schur_weyl_basis(d, t).unwrap();
            let full = dec.full_basis();
            let n = full.nrows();
            assert_eq!(full.ncols(), n, "d={d} t={t}");
            let gram = full.transpose() * &full;
            assert!((gram - DMatrix::identity(n, n)).amax() < 1e-9);
            for block in &dec.blocks {
                let proj = &block.basis * block.basis.transpose();
                let expected = block.projector.matrix().map(|z| z.re);
                assert!((proj - expected).amax() < 1e-9, "{}", block.partition);
            }
        }
    }

    #[test]
    fn subsystem_permutations_act_on_specht_index_only() {
        let (d, t) = (3, 3);
        let dec = schur_weyl_basis(d, t).unwrap();
        for pi in all_permutations(t) {
            let r = subsystem_perm_op(&pi, d).unwrap().matrix().map(|z| z.re);
            for a in &dec.blocks {
                for b in &dec.blocks {
                    let coords = a.basis.transpose() * &r * &b.basis;
                    if a.partition == b.partition {
                        let expected = DMatrix::<f64>::identity(a.weyl_dim, a.weyl_dim)
                            .kronecker(a.irrep.matrix(&pi));
                        assert!((coords - expected).amax() < 1e-8);
                    } else {
                        assert!(coords.amax() < 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_power_is_block_diagonal() {
        let dec = schur_weyl_basis(4, 2).unwrap();
        let u = sample_haar_unitary(4, 8).tensor_power(2).unwrap();
        let full = dec.full_basis();
        let coords = real_congruence(&full, u.matrix());
        let mut labels = Vec::new();
        for (bi, b) in dec.blocks.iter().enumerate() {
            for _i in 0..b.weyl_dim {
                for j in 0..b.specht_dim {
                    labels.push((bi, j));
                }
            }
        }
        for (r, lr) in labels.iter().enumerate() {
            for (c, lc) in labels.iter().enumerate() {
                if lr != lc {
                    assert!(coords[(r, c)].norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn distinct_blocks() {
        let dec = schur_weyl_basis(4, 2).unwrap();
        let anti = distinct_block(&p(&[1, 1]), &dec).unwrap();
        assert!((anti - DMatrix::<f64>::identity(6, 6)).amax() < 1e-9);
        let sym = distinct_block(&p(&[2]), &dec).unwrap();
        assert!((sym.trace() - 6.0).abs() < 1e-9);

        let dec1 = schur_weyl_basis(5, 1).unwrap();
        let only = distinct_block(&p(&[1]), &dec1).unwrap();
        assert!((only - DMatrix::<f64>::identity(5, 5)).amax() < 1e-12);
    }

    #[test]
    fn distinct_projector_reconstruction() {
        for (d, t) in [(4, 2), (4, 3), (3, 3)] {
            let dec = schur_weyl_basis(d, t).unwrap();
            let mut total = DMatrix::<f64>::zeros(dec.dim(), dec.dim());
            for b in &dec.blocks {
                let k = b
                    .distinct_block
                    .kronecker(&DMatrix::<f64>::identity(b.specht_dim, b.specht_dim));
                total += &b.basis * k * b.basis.transpose();
            }
            let lam = distinct_projector(d, t)
                .unwrap()
                .operator
                .matrix()
                .map(|z| z.re);
            assert!((total - lam).amax() < 1e-9);
        }
    }

    #[test]
    fn ratio_examples() {
        let r = ratio_report(4, 2, None).unwrap();
        assert_eq!(r[0].partition, p(&[2]));
        assert_eq!(r[0].deficit, Ratio::new(8, 20));
        assert!((r[0].deficit_value - 0.4).abs() < 1e-15);
        assert_eq!(r[1].deficit, Ratio::new(0, 12));
        assert_eq!(r[1].deficit_value, 0.0);
        let r16 = ratio_report(16, 2, None).unwrap();
        assert_eq!(r16[0].deficit, Ratio::new(32, 272));
        assert!(r16[0].deficit_value <= 2.0 * 4.0 / 16.0);
    }

    #[test]
    fn ratio_numerics_match_exact() {
        for (d, t) in [(4, 2), (4, 3), (8, 2)] {
            let dec = schur_weyl_basis(d, t).unwrap();
            for rec in ratio_report(d, t, Some(&dec)).unwrap() {
                assert!((rec.measured_deficit.unwrap() - rec.deficit_value).abs() < 1e-9);
                assert!(
                    (rec.measured_tr_distinct_block.unwrap() - rec.tr_distinct_block as f64).abs()
                        < 1e-9
                );
            }
        }
    }

    #[test]
    fn partial_trace_over_w_examples() {
        let (d, t, e) = (2, 2, 2);
        let dec = schur_weyl_basis(d, t).unwrap();
        let mixed = DensityMatrix::maximally_mixed(&[d, d, e]);
        for b in &dec.blocks {
            let m = partial_trace_over_w(&b.partition, mixed.as_operator(), &dec).unwrap();
            let expected = (b.weyl_dim * b.specht_dim) as f64 / (d * d) as f64;
            assert!((m.trace().re - expected).abs() < 1e-12);
        }
        let zero = StateVector::basis(&[2, 2], 0).unwrap().density();
        let sym = partial_trace_over_w(&p(&[2]), zero.as_operator(), &dec).unwrap();
        let anti = partial_trace_over_w(&p(&[1, 1]), zero.as_operator(), &dec).unwrap();
        assert!((sym.trace().re - 1.0).abs() < 1e-12);
        assert!(anti.matrix().camax() < 1e-12);
    }

    #[test]
    fn absent_blocks_are_skipped() {
        let dec = schur_weyl_basis(2, 3).unwrap();
        assert_eq!(dec.blocks.len(), 2);
        assert!(dec.block(&p(&[1, 1, 1])).is_none());
        assert!(matches!(
            schur_weyl_basis(2, 5),
            Err(LabError::Capacity { .. })
        ));
    }
}
