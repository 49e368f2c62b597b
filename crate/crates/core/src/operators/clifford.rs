//! Clifford unitaries as binary symplectic tableaux.
//!
//! Row `q` of the tableau is the image of `X_q` under conjugation, row
//! `n + q` the image of `Z_q`. Each row holds `n` x-bits followed by `n`
//! z-bits and denotes the Hermitian Pauli `prod_q i^{x_q z_q} X^{x_q} Z^{z_q}`,
//! with an extra sign `(-1)^{phase}`. Qubit 0 is the most significant bit of
//! a basis index.

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dense::{CMatrix, CVector, DenseOperator, C64, ONE, ZERO};
use crate::error::{LabError, Result};

/// Largest qubit count converted to a dense matrix.
pub const MAX_DENSE_QUBITS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CliffordElement {
    n: usize,
    tableau: Vec<Vec<bool>>,
    phases: Vec<bool>,
}

/// Symplectic form on `F_2^{2n}` vectors laid out as `(x | z)`.
fn symplectic(u: &[bool], v: &[bool]) -> bool {
    let n = u.len() / 2;
    (0..n).fold(false, |acc, q| acc ^ (u[q] & v[n + q]) ^ (u[n + q] & v[q]))
}

fn xor_into(acc: &mut [bool], v: &[bool]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a ^= *b;
    }
}

fn random_combination<R: Rng + ?Sized>(basis: &[Vec<bool>], len: usize, rng: &mut R) -> Vec<bool> {
    let mut v = vec![false; len];
    for b in basis {
        if rng.random::<bool>() {
            xor_into(&mut v, b);
        }
    }
    v
}

/// Keeps a maximal linearly independent subset (GF(2) elimination).
fn independent_subset(vectors: Vec<Vec<bool>>) -> Vec<Vec<bool>> {
    let mut reduced: Vec<(usize, Vec<bool>)> = Vec::new();
    let mut kept = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for (pivot, r) in &reduced {
            if w[*pivot] {
                xor_into(&mut w, r);
            }
        }
        if let Some(pivot) = w.iter().position(|&b| b) {
            reduced.push((pivot, w));
            kept.push(v);
        }
    }
    kept
}

impl CliffordElement {
    pub fn identity(n: usize) -> Self {
        let tableau = (0..2 * n)
            .map(|r| (0..2 * n).map(|c| c == r).collect())
            .collect();
        Self {
            n,
            tableau,
            phases: vec![false; 2 * n],
        }
    }

    pub fn from_parts(n: usize, tableau: Vec<Vec<bool>>, phases: Vec<bool>) -> Result<Self> {
        if tableau.len() != 2 * n
            || tableau.iter().any(|r| r.len() != 2 * n)
            || phases.len() != 2 * n
        {
            return Err(LabError::domain(format!(
                "tableau must be {0}x{0} with {0} phase bits",
                2 * n
            )));
        }
        let c = Self { n, tableau, phases };
        if !c.is_symplectic() {
            return Err(LabError::domain(
                "tableau does not preserve the symplectic form",
            ));
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn tableau(&self) -> &[Vec<bool>] {
        &self.tableau
    }

    pub fn phases(&self) -> &[bool] {
        &self.phases
    }

    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        (0..2 * n).all(|i| {
            (0..2 * n).all(|j| {
                let expected = (i < n && j == i + n) || (i >= n && j + n == i);
                symplectic(&self.tableau[i], &self.tableau[j]) == expected
            })
        })
    }

    /// Uniformly random Clifford (modulo global phase).
    ///
    /// Rows are drawn pairwise: a uniform nonzero `x` from the symplectic
    /// complement of the pairs chosen so far, then a uniform partner `z` with
    /// `<x, z> = 1`. Every symplectic matrix arises from exactly one such
    /// sequence; the `2n` sign bits are uniform and independent.
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let len = 2 * n;
        let mut basis: Vec<Vec<bool>> = (0..len)
            .map(|r| (0..len).map(|c| c == r).collect())
            .collect();
        let mut tableau = vec![vec![false; len]; len];
        for q in 0..n {
            let x = loop {
                let v = random_combination(&basis, len, rng);
                if v.iter().any(|&b| b) {
                    break v;
                }
            };
            let z = loop {
                let v = random_combination(&basis, len, rng);
                if symplectic(&x, &v) {
                    break v;
                }
            };
            let projected = basis
                .iter()
                .map(|v| {
                    let mut w = v.clone();
                    if symplectic(v, &z) {
                        xor_into(&mut w, &x);
                    }
                    if symplectic(v, &x) {
                        xor_into(&mut w, &z);
                    }
                    w
                })
                .collect();
            basis = independent_subset(projected);
            debug_assert_eq!(basis.len(), len - 2 * (q + 1));
            tableau[q] = x;
            tableau[n + q] = z;
        }
        let phases = (0..len).map(|_| rng.random()).collect();
        Self { n, tableau, phases }
    }

    /// Dense `2^n x 2^n` unitary, fixed up to a global phase.
    ///
    /// Column `|x>` is `C X^x |0> = (prod_q (C X_q C†)^{x_q}) C|0>`, where
    /// `C|0>` is the stabilizer state of the images of the `Z_q`.
    pub fn to_dense(&self) -> Result<DenseOperator> {
        let n = self.n;
        if n == 0 {
            return Err(LabError::domain("a Clifford needs at least one qubit"));
        }
        if n > MAX_DENSE_QUBITS {
            return Err(LabError::capacity(
                "dense Clifford conversion (qubits)",
                n as u128,
                MAX_DENSE_QUBITS as u128,
            ));
        }
        let dim = 1usize << n;
        let mut stabilizer_state = None;
        for start in 0..dim {
            let mut v = CVector::zeros(dim);
            v[start] = ONE;
            for q in 0..n {
                let gv = self.apply_row(n + q, &v);
                v = (v + gv).scale(0.5);
            }
            let norm = v.norm();
            if norm > 1e-6 {
                let phase = v[start] / v[start].norm();
                stabilizer_state = Some(v.unscale(norm).map(|z| z / phase));
                break;
            }
        }
        let s = stabilizer_state
            .ok_or_else(|| LabError::Consistency("stabilizer projector vanished".into()))?;
        let mut m = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut w = s.clone();
            for q in 0..n {
                if (col >> (n - 1 - q)) & 1 == 1 {
                    w = self.apply_row(q, &w);
                }
            }
            m.set_column(col, &w);
        }
        DenseOperator::new(m, vec![2; n])
    }

    fn apply_row(&self, row: usize, v: &CVector) -> CVector {
        let n = self.n;
        let bits = &self.tableau[row];
        apply_pauli(&bits[..n], &bits[n..], self.phases[row], v)
    }

    /// Signed Pauli for tableau row `row` as a dense matrix.
    pub fn row_pauli(&self, row: usize) -> CMatrix {
        let n = self.n;
        let bits = &self.tableau[row];
        pauli_matrix(&bits[..n], &bits[n..], self.phases[row])
    }
}

/// `(-1)^sign prod_q i^{x_q z_q} X^{x_q} Z^{z_q}` applied to `v`.
pub fn apply_pauli(x: &[bool], z: &[bool], sign: bool, v: &CVector) -> CVector {
    let n = x.len();
    let flip: usize = (0..n).filter(|&q| x[q]).map(|q| 1 << (n - 1 - q)).sum();
    let y_count = (0..n).filter(|&q| x[q] && z[q]).count();
    let base = match (y_count + if sign { 2 } else { 0 }) % 4 {
        0 => ONE,
        1 => C64::new(0.0, 1.0),
        2 => -ONE,
        _ => C64::new(0.0, -1.0),
    };
    let mut out = CVector::zeros(v.len());
    for b in 0..v.len() {
        let parity = (0..n)
            .filter(|&q| z[q] && (b >> (n - 1 - q)) & 1 == 1)
            .count();
        let amp = if parity % 2 == 0 { v[b] } else { -v[b] };
        out[b ^ flip] += base * amp;
    }
    out
}

pub fn pauli_matrix(x: &[bool], z: &[bool], sign: bool) -> CMatrix {
    let dim = 1usize << x.len();
    let mut m = CMatrix::zeros(dim, dim);
    for b in 0..dim {
        let mut e = CVector::zeros(dim);
        e[b] = ONE;
        m.set_column(b, &apply_pauli(x, z, sign, &e));
    }
    m
}

/// Uniform Clifford on `n` qubits from a seed.
pub fn sample_clifford(n: usize, seed: u64) -> CliffordElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CliffordElement::sample(n, &mut rng)
}

/// Multiplies by a phase so the first (row-major) nonzero entry is real positive.
pub fn canonicalize_phase(m: &CMatrix) -> CMatrix {
    let first = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)])
        .find(|z| z.norm() > 1e-9);
    match first {
        Some(z) => {
            let phase = z.conj() / z.norm();
            m.map(|w| w * phase)
        }
        None => m.clone(),
    }
}

/// Hashable key of a phase-canonical matrix.
pub fn phase_class_key(m: &CMatrix) -> Vec<(i64, i64)> {
    canonicalize_phase(m)
        .transpose()
        .iter()
        .map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64))
        .collect()
}

fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(h, 0.0),
            C64::new(h, 0.0),
            C64::new(h, 0.0),
            C64::new(-h, 0.0),
        ],
    )
}

fn phase_gate() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, C64::new(0.0, 1.0)])
}

fn cnot() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(3, 2)] = ONE;
    m[(2, 3)] = ONE;
    m
}

/// One dense representative per phase class of the Clifford group, by
/// breadth-first closure of `{H, S}` (plus CNOT for two qubits).
///
/// `n = 1` gives 24 elements. `n = 2` (11520 elements) must be requested
/// explicitly with `allow_two_qubits`.
pub fn enumerate_cliffords(n: usize, allow_two_qubits: bool) -> Result<Vec<DenseOperator>> {
    let generators: Vec<CMatrix> = match n {
        1 => vec![hadamard(), phase_gate()],
        2 if allow_two_qubits => {
            let id = CMatrix::identity(2, 2);
            vec![
                hadamard().kronecker(&id),
                id.kronecker(&hadamard()),
                phase_gate().kronecker(&id),
                id.kronecker(&phase_gate()),
                cnot(),
            ]
        }
        _ => {
            return Err(LabError::capacity(
                "exact Clifford enumeration (qubits)",
                n as u128,
                if allow_two_qubits { 2 } else { 1 },
            ))
        }
    };
    let dim = 1usize << n;
    let start = CMatrix::identity(dim, dim);
    let mut seen: HashMap<Vec<(i64, i64)>, ()> = HashMap::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(phase_class_key(&start), ());
    queue.push_back(start);
    while let Some(u) = queue.pop_front() {
        for g in &generators {
            let next = canonicalize_phase(&(g * &u));
            let key = phase_class_key(&next);
            if seen.insert(key, ()).is_none() {
                queue.push_back(next);
            }
        }
        out.push(u);
    }
    out.into_iter()
        .map(|m| DenseOperator::new(m, vec![2; n]))
        .collect()
}
