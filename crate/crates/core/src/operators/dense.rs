//! Dense complex operators, density matrices and state vectors on
//! multi-register spaces.
//!
//! Registers are stored first-most-significant: the basis index of
//! `|a_0, a_1, ..., a_{m-1}>` is `((a_0 * r_1) + a_1) * r_2 + ...`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{LabError, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// A square complex matrix tagged with the dimensions of its tensor factors.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    mat: CMatrix,
    registers: Vec<usize>,
}

impl DenseOperator {
    pub fn new(mat: CMatrix, registers: Vec<usize>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(LabError::domain(format!(
                "operator must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let product: usize = registers.iter().product();
        if registers.is_empty() || product != mat.nrows() {
            return Err(LabError::domain(format!(
                "register shape {registers:?} does not match dimension {}",
                mat.nrows()
            )));
        }
        Ok(Self { mat, registers })
    }

    /// Single-register operator.
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        let n = mat.nrows();
        Self::new(mat, vec![n])
    }

    pub fn identity(registers: &[usize]) -> Self {
        let n = registers.iter().product();
        Self {
            mat: CMatrix::identity(n, n),
            registers: registers.to_vec(),
        }
    }

    pub fn zeros(registers: &[usize]) -> Self {
        let n = registers.iter().product();
        Self {
            mat: CMatrix::zeros(n, n),
            registers: registers.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn registers(&self) -> &[usize] {
        &self.registers
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Re-tags the operator with a different (compatible) register shape.
    pub fn with_registers(self, registers: Vec<usize>) -> Result<Self> {
        Self::new(self.mat, registers)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            registers: self.registers.clone(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            mat: self.mat.scale(factor),
            registers: self.registers.clone(),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.registers != other.registers {
            return Err(LabError::domain(format!(
                "shape mismatch: {:?} vs {:?}",
                self.registers, other.registers
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(LabError::domain(format!(
                "cannot multiply dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(Self {
            mat: &self.mat * &other.mat,
            registers: self.registers.clone(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            mat: &self.mat + &other.mat,
            registers: self.registers.clone(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            mat: &self.mat - &other.mat,
            registers: self.registers.clone(),
        })
    }

    /// `self ⊗ other`, registers concatenated.
    pub fn kron(&self, other: &Self) -> Self {
        let mut registers = self.registers.clone();
        registers.extend_from_slice(&other.registers);
        Self {
            mat: self.mat.kronecker(&other.mat),
            registers,
        }
    }

    /// `self^{⊗t}`, subject to the dimension cap.
    pub fn tensor_power(&self, t: usize) -> Result<Self> {
        if t == 0 {
            return Err(LabError::domain("tensor power needs t >= 1"));
        }
        crate::cap::check_dims(self.dim(), t, 1)?;
        let mut out = self.clone();
        for _ in 1..t {
            out = out.kron(self);
        }
        Ok(out)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.mat - self.mat.adjoint()).camax() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let n = self.dim();
        (self.mat.adjoint() * &self.mat - CMatrix::identity(n, n)).camax() <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat).camax()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Schatten-1 norm (sum of singular values), no 1/2 factor.
    pub fn trace_norm(&self) -> f64 {
        schatten1_norm(&self.mat)
    }

    /// Traces out every register not listed in `keep` (sorted, distinct).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let m = self.registers.len();
        if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= m) {
            return Err(LabError::domain(format!(
                "invalid registers to keep {keep:?} for shape {:?}",
                self.registers
            )));
        }
        if keep.is_empty() {
            return Err(LabError::domain("must keep at least one register"));
        }
        let kept_dims: Vec<usize> = keep.iter().map(|&k| self.registers[k]).collect();
        let kept_dim: usize = kept_dims.iter().product();
        let traced_dim = self.dim() / kept_dim;

        // groups[tau][k] = full index with kept part k and traced part tau.
        let mut groups = vec![vec![0usize; kept_dim]; traced_dim];
        let mut digits = vec![0usize; m];
        for full in 0..self.dim() {
            let mut rem = full;
            for r in (0..m).rev() {
                digits[r] = rem % self.registers[r];
                rem /= self.registers[r];
            }
            let (mut k_idx, mut t_idx) = (0usize, 0usize);
            for r in 0..m {
                if keep.contains(&r) {
                    k_idx = k_idx * self.registers[r] + digits[r];
                } else {
                    t_idx = t_idx * self.registers[r] + digits[r];
                }
            }
            groups[t_idx][k_idx] = full;
        }
        let mut out = CMatrix::zeros(kept_dim, kept_dim);
        for group in &groups {
            for (kc, &fc) in group.iter().enumerate() {
                for (kr, &fr) in group.iter().enumerate() {
                    out[(kr, kc)] += self.mat[(fr, fc)];
                }
            }
        }
        Self::new(out, kept_dims)
    }
}

impl AsRef<DenseOperator> for DenseOperator {
    fn as_ref(&self) -> &DenseOperator {
        self
    }
}

/// Eigenvalues of the Hermitian part of `m`.
pub fn hermitian_eigenvalues(m: &CMatrix) -> DVector<f64> {
    let herm = (m + m.adjoint()).scale(0.5);
    SymmetricEigen::new(herm).eigenvalues
}

/// Sum of singular values. Hermitian inputs use an eigendecomposition.
pub fn schatten1_norm(m: &CMatrix) -> f64 {
    let scale = m.camax().max(1.0);
    if (m - m.adjoint()).camax() <= 1e-12 * scale {
        hermitian_eigenvalues(m).iter().map(|v| v.abs()).sum()
    } else {
        m.clone().svd(false, false).singular_values.iter().sum()
    }
}

/// `‖a - b‖₁`, unnormalised: orthogonal pure states are at distance 2.
pub fn trace_distance(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    Ok(a.sub(b)?.trace_norm())
}

/// Upper bound `sqrt(dim) * ‖m‖_F` on the Schatten-1 norm, for spaces too
/// large to diagonalise cheaply.
pub fn trace_norm_upper_bound(m: &CMatrix) -> f64 {
    (m.nrows() as f64).sqrt() * m.norm()
}

/// A unit-trace positive semidefinite Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(DenseOperator);

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-9;
    pub const PSD_TOL: f64 = 1e-9;

    pub fn new(op: DenseOperator) -> Result<Self> {
        Self::validate(&op)?;
        Ok(Self(op))
    }

    /// Wraps without the eigenvalue check; callers guarantee the invariants.
    pub(crate) fn from_operator_unchecked(op: DenseOperator) -> Self {
        Self(op)
    }

    pub fn validate(op: &DenseOperator) -> Result<()> {
        if !op.is_hermitian(Self::HERMITIAN_TOL) {
            return Err(LabError::domain("density matrix is not Hermitian"));
        }
        let tr = op.trace();
        if (tr - ONE).norm() > Self::TRACE_TOL {
            return Err(LabError::domain(format!("density matrix has trace {tr}")));
        }
        let min = hermitian_eigenvalues(op.matrix()).min();
        if min < -Self::PSD_TOL {
            return Err(LabError::domain(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        Self(psi.outer_product())
    }

    pub fn maximally_mixed(registers: &[usize]) -> Self {
        let id = DenseOperator::identity(registers);
        let n = id.dim() as f64;
        Self(id.scale(1.0 / n))
    }

    pub fn as_operator(&self) -> &DenseOperator {
        &self.0
    }

    pub fn into_operator(self) -> DenseOperator {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn registers(&self) -> &[usize] {
        self.0.registers()
    }

    pub fn purity(&self) -> f64 {
        let m = self.0.matrix();
        m.component_mul(&m.transpose()).sum().re
    }
}

impl AsRef<DenseOperator> for DensityMatrix {
    fn as_ref(&self) -> &DenseOperator {
        &self.0
    }
}

/// A unit-norm vector on a multi-register space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: CVector,
    registers: Vec<usize>,
}

impl StateVector {
    pub const NORM_TOL: f64 = 1e-10;

    pub fn new(amps: CVector, registers: Vec<usize>) -> Result<Self> {
        let product: usize = registers.iter().product();
        if registers.is_empty() || product != amps.len() {
            return Err(LabError::domain(format!(
                "register shape {registers:?} does not match length {}",
                amps.len()
            )));
        }
        if (amps.norm() - 1.0).abs() > Self::NORM_TOL {
            return Err(LabError::domain(format!(
                "state has norm {}, expected 1",
                amps.norm()
            )));
        }
        Ok(Self { amps, registers })
    }

    /// Normalises `amps`; a vanishing vector is a degenerate input.
    pub fn normalized(amps: CVector, registers: Vec<usize>) -> Result<Self> {
        let norm = amps.norm();
        if norm < 1e-300 {
            return Err(LabError::Degenerate(
                "cannot normalise the zero vector".into(),
            ));
        }
        Self::new(amps.unscale(norm), registers)
    }

    pub fn basis(registers: &[usize], index: usize) -> Result<Self> {
        let n: usize = registers.iter().product();
        if index >= n {
            return Err(LabError::domain(format!("basis index {index} >= {n}")));
        }
        let mut amps = CVector::zeros(n);
        amps[index] = ONE;
        Ok(Self {
            amps,
            registers: registers.to_vec(),
        })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn registers(&self) -> &[usize] {
        &self.registers
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn outer_product(&self) -> DenseOperator {
        DenseOperator {
            mat: &self.amps * self.amps.adjoint(),
            registers: self.registers.clone(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut registers = self.registers.clone();
        registers.extend_from_slice(&other.registers);
        Self {
            amps: self.amps.kronecker(&other.amps),
            registers,
        }
    }

    /// Applies the single-register operator `u` to each register in `targets`.
    pub fn apply_to_registers(&self, u: &CMatrix, targets: &[usize]) -> Result<Self> {
        let mut amps = self.amps.clone();
        for &r in targets {
            check_register(&self.registers, r, u)?;
            apply_to_register_slice(amps.as_mut_slice(), &self.registers, r, u);
        }
        Ok(Self {
            amps,
            registers: self.registers.clone(),
        })
    }

    /// Reduced operator on the registers in `keep`.
    pub fn reduced_state(&self, keep: &[usize]) -> Result<DenseOperator> {
        self.outer_product().partial_trace(keep)
    }
}

fn check_register(registers: &[usize], r: usize, u: &CMatrix) -> Result<()> {
    if r >= registers.len() {
        return Err(LabError::domain(format!(
            "register {r} out of range for shape {registers:?}"
        )));
    }
    if u.nrows() != registers[r] || u.ncols() != registers[r] {
        return Err(LabError::domain(format!(
            "{}x{} operator cannot act on register of dimension {}",
            u.nrows(),
            u.ncols(),
            registers[r]
        )));
    }
    Ok(())
}

/// In-place `data <- (I ⊗ u ⊗ I) data` for the register `r`.
pub(crate) fn apply_to_register_slice(
    data: &mut [C64],
    registers: &[usize],
    r: usize,
    u: &CMatrix,
) {
    let dr = registers[r];
    let stride: usize = registers[r + 1..].iter().product();
    let block = dr * stride;
    let mut gathered = vec![ZERO; dr];
    for outer in (0..data.len()).step_by(block) {
        for inner in 0..stride {
            let base = outer + inner;
            for (k, g) in gathered.iter_mut().enumerate() {
                *g = data[base + k * stride];
            }
            for row in 0..dr {
                let mut acc = ZERO;
                for (col, g) in gathered.iter().enumerate() {
                    acc += u[(row, col)] * g;
                }
                data[base + row * stride] = acc;
            }
        }
    }
}

/// `(U_targets) X (U_targets)†`, where `u` acts on each listed register.
pub fn conjugate_registers(
    x: &DenseOperator,
    u: &CMatrix,
    targets: &[usize],
) -> Result<DenseOperator> {
    for &r in targets {
        check_register(&x.registers, r, u)?;
    }
    let mut left = x.mat.clone();
    for col in 0..left.ncols() {
        let mut column = left.column_mut(col);
        let slice = column.as_mut_slice();
        for &r in targets {
            apply_to_register_slice(slice, &x.registers, r, u);
        }
    }
    // Right multiplication by U† acts on rows as conj(U) acting on columns of the transpose.
    let mut right = left.transpose();
    let u_conj = u.map(|z| z.conj());
    for col in 0..right.ncols() {
        let mut column = right.column_mut(col);
        let slice = column.as_mut_slice();
        for &r in targets {
            apply_to_register_slice(slice, &x.registers, r, &u_conj);
        }
    }
    DenseOperator::new(right.transpose(), x.registers.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn trace_distance_basics() {
        let zero = StateVector::basis(&[2], 0).unwrap().density();
        let one = StateVector::basis(&[2], 1).unwrap().density();
        assert!(trace_distance(zero.as_operator(), zero.as_operator()).unwrap() < 1e-10);
        let d = trace_distance(zero.as_operator(), one.as_operator()).unwrap();
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_rejects_shape_mismatch() {
        let a = DenseOperator::identity(&[2, 2]);
        let b = DenseOperator::identity(&[4]);
        assert!(matches!(trace_distance(&a, &b), Err(LabError::Domain(_))));
    }

    #[test]
    fn partial_trace_of_maximally_entangled() {
        for d in [2usize, 3, 4] {
            let mut amps = CVector::zeros(d * d);
            for z in 0..d {
                amps[z * d + z] = c(1.0, 0.0);
            }
            let psi = StateVector::normalized(amps, vec![d, d]).unwrap();
            let reduced = psi.reduced_state(&[0]).unwrap();
            let target = DenseOperator::identity(&[d]).scale(1.0 / d as f64);
            assert!(reduced.max_abs_diff(&target) < 1e-10);
            assert!((reduced.trace() - ONE).norm() < 1e-10);
        }
    }

    #[test]
    fn partial_trace_of_product_keeps_factor() {
        let a = CMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, i as f64 - j as f64));
        let b = CMatrix::from_fn(3, 3, |i, j| c(if i == j { 1.0 } else { 0.1 }, 0.0));
        let op = DenseOperator::from_matrix(a.clone())
            .unwrap()
            .kron(&DenseOperator::from_matrix(b.clone()).unwrap());
        let keep0 = op.partial_trace(&[0]).unwrap();
        assert!((keep0.matrix() - a.scale(b.trace().re)).camax() < 1e-12);
        let keep1 = op.partial_trace(&[1]).unwrap();
        assert!((keep1.matrix() - b.map(|z| z * a.trace())).camax() < 1e-12);
    }

    #[test]
    fn register_application_matches_kron() {
        let u = CMatrix::from_fn(2, 2, |i, j| c(i as f64 + 0.5, j as f64 - 0.25));
        let amps = CVector::from_fn(8, |i, _| c(i as f64, 1.0 - i as f64));
        let psi = StateVector::normalized(amps, vec![2, 2, 2]).unwrap();
        let id = CMatrix::identity(2, 2);
        let full = id.kronecker(&u).kronecker(&id);
        let mut data = psi.amplitudes().clone();
        apply_to_register_slice(data.as_mut_slice(), &[2, 2, 2], 1, &u);
        assert!((data - &full * psi.amplitudes()).camax() < 1e-12);

        let x = psi.outer_product();
        let y = conjugate_registers(&x, &u, &[1]).unwrap();
        let expected = &full * x.matrix() * full.adjoint();
        assert!((y.matrix() - expected).camax() < 1e-12);
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(DenseOperator::identity(&[2])).is_err());
        let mm = DensityMatrix::maximally_mixed(&[2, 2]);
        assert!(DensityMatrix::new(mm.into_operator()).is_ok());
        let bad = CMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), ZERO, ZERO, c(-0.5, 0.0)]);
        assert!(DensityMatrix::new(DenseOperator::from_matrix(bad).unwrap()).is_err());
    }

    #[test]
    fn state_norm_checked() {
        assert!(StateVector::new(CVector::from_element(2, ONE), vec![2]).is_err());
        assert!(matches!(
            StateVector::normalized(CVector::zeros(2), vec![2]),
            Err(LabError::Degenerate(_))
        ));
    }

    #[test]
    fn tensor_power_dims() {
        let x = DenseOperator::from_matrix(CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]))
            .unwrap();
        let xx = x.tensor_power(3).unwrap();
        assert_eq!(xx.dim(), 8);
        assert_eq!(xx.registers(), &[2, 2, 2]);
        assert!(xx.is_unitary(1e-12));
    }
}
