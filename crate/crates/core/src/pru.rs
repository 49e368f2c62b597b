//! The keyed construction `U_k = P_{k1} F_{k2} C_{k3}` with toy PRF/PRP
//! schemes.
//!
//! The PRP is a key-seeded shuffle table and the PRF a counter-mode ChaCha
//! bit; both sit behind [`KeyedPermutation`] / [`KeyedFunction`] so a
//! cipher-based scheme (e.g. a Feistel network for large `n`) can replace
//! them. Neither offers any cryptographic guarantee.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::{ChaCha20Rng, ChaCha8Rng};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};
use crate::operators::{
    perm_op, phase_op, BooleanFunction, CMatrix, CliffordElement, DenseOperator, PermutationD,
    StateVector, C64,
};
use crate::twirls::{MonteCarloEstimate, TwirlInput};

/// Bytes per key component.
pub const KEY_BYTES: usize = 16;

/// Largest qubit count for a dense `U_k`.
pub const MAX_PRU_QUBITS: usize = 4;

/// `k = (k1, k2, k3)`: PRP key, PRF key and Clifford sampler seed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PruKey {
    #[serde(with = "hex::serde")]
    pub k1: [u8; KEY_BYTES],
    #[serde(with = "hex::serde")]
    pub k2: [u8; KEY_BYTES],
    #[serde(with = "hex::serde")]
    pub k3: [u8; KEY_BYTES],
}

impl PruKey {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut key = Self {
            k1: [0; KEY_BYTES],
            k2: [0; KEY_BYTES],
            k3: [0; KEY_BYTES],
        };
        rng.fill_bytes(&mut key.k1);
        rng.fill_bytes(&mut key.k2);
        rng.fill_bytes(&mut key.k3);
        key
    }

    /// Hex SHA-256 of `k1 || k2 || k3`, used to reference keys in reports.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.k1);
        h.update(self.k2);
        h.update(self.k3);
        hex::encode(h.finalize())
    }
}

/// Independent key components from a seeded ChaCha20 stream.
pub fn sample_key(seed: u64) -> PruKey {
    PruKey::random(&mut ChaCha20Rng::seed_from_u64(seed))
}

/// Expands a 16-byte key into a 32-byte ChaCha seed with a domain tag.
fn expand(key: &[u8; KEY_BYTES], tag: &[u8; KEY_BYTES]) -> [u8; 32] {
    let mut seed = [0u8; 32];
    seed[..KEY_BYTES].copy_from_slice(key);
    seed[KEY_BYTES..].copy_from_slice(tag);
    seed
}

const PRP_TAG: &[u8; KEY_BYTES] = b"pru-lab/prp-tab\0";
const PRF_TAG: &[u8; KEY_BYTES] = b"pru-lab/prf-bit\0";
const CLIFFORD_TAG: &[u8; KEY_BYTES] = b"pru-lab/clifford";

/// A keyed bijection on `[d]`.
pub trait KeyedPermutation {
    fn domain_size(&self) -> usize;
    fn eval(&self, x: usize) -> usize;
    fn invert(&self, y: usize) -> usize;

    fn to_permutation(&self) -> PermutationD {
        let images = (0..self.domain_size()).map(|x| self.eval(x)).collect();
        PermutationD::new(images).expect("keyed permutation must be a bijection")
    }
}

/// A keyed function `[d] -> {0, 1}`.
pub trait KeyedFunction {
    fn domain_size(&self) -> usize;
    fn eval(&self, x: usize) -> bool;

    fn to_boolean_function(&self) -> BooleanFunction {
        BooleanFunction::new((0..self.domain_size()).map(|x| self.eval(x)).collect())
    }
}

/// Uniform shuffle of `[d]` seeded by the key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShufflePrp {
    table: Vec<usize>,
    inverse: Vec<usize>,
}

impl ShufflePrp {
    pub fn new(key: &[u8; KEY_BYTES], d: usize) -> Self {
        let mut rng = ChaCha20Rng::from_seed(expand(key, PRP_TAG));
        let mut table: Vec<usize> = (0..d).collect();
        table.shuffle(&mut rng);
        let mut inverse = vec![0; d];
        for (x, &y) in table.iter().enumerate() {
            inverse[y] = x;
        }
        Self { table, inverse }
    }
}

impl KeyedPermutation for ShufflePrp {
    fn domain_size(&self) -> usize {
        self.table.len()
    }

    fn eval(&self, x: usize) -> usize {
        self.table[x]
    }

    fn invert(&self, y: usize) -> usize {
        self.inverse[y]
    }
}

/// `f(x)` is the low bit of the first word of ChaCha20 stream `x` under the key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterPrf {
    seed: [u8; 32],
    d: usize,
}

impl CounterPrf {
    pub fn new(key: &[u8; KEY_BYTES], d: usize) -> Self {
        Self {
            seed: expand(key, PRF_TAG),
            d,
        }
    }
}

impl KeyedFunction for CounterPrf {
    fn domain_size(&self) -> usize {
        self.d
    }

    fn eval(&self, x: usize) -> bool {
        let mut rng = ChaCha20Rng::from_seed(self.seed);
        rng.set_stream(x as u64);
        rng.next_u32() & 1 == 1
    }
}

/// The Clifford selected by `k3`: a uniform tableau sample seeded by the key.
pub fn keyed_clifford(key: &[u8; KEY_BYTES], n: usize) -> CliffordElement {
    let mut rng = ChaCha8Rng::from_seed(expand(key, CLIFFORD_TAG));
    CliffordElement::sample(n, &mut rng)
}

/// The three factors of `U_k` on `n` qubits.
#[derive(Clone, Debug)]
pub struct PruComponents {
    pub permutation: PermutationD,
    pub phase: BooleanFunction,
    pub clifford: CliffordElement,
}

pub fn pru_components(key: &PruKey, n: usize) -> Result<PruComponents> {
    check_qubits(n)?;
    let d = 1usize << n;
    Ok(PruComponents {
        permutation: ShufflePrp::new(&key.k1, d).to_permutation(),
        phase: CounterPrf::new(&key.k2, d).to_boolean_function(),
        clifford: keyed_clifford(&key.k3, n),
    })
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(LabError::domain("PRU needs at least one qubit"));
    }
    if n > MAX_PRU_QUBITS {
        return Err(LabError::capacity(
            "dense PRU qubits",
            n as u128,
            MAX_PRU_QUBITS as u128,
        ));
    }
    Ok(())
}

/// Dense `U_k = P_{π_{k1}} F_{f_{k2}} C_{k3}`.
pub fn pru_unitary(key: &PruKey, n: usize) -> Result<DenseOperator> {
    let parts = pru_components(key, n)?;
    perm_op(&parts.permutation)
        .mul(&phase_op(&parts.phase))?
        .mul(&parts.clifford.to_dense()?)?
        .with_registers(vec![1 << n])
}

fn pru_matrix(key: &PruKey, n: usize) -> Result<CMatrix> {
    Ok(pru_unitary(key, n)?.into_matrix())
}

/// `E_k (U_k^{⊗t} ⊗ 1) |ψ><ψ| (U_k^{⊗t} ⊗ 1)†` over `num_keys` keys drawn
/// from `seed`, with a Frobenius standard error.
pub fn pru_average_state(
    psi: &StateVector,
    t: usize,
    n: usize,
    num_keys: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    check_qubits(n)?;
    if num_keys == 0 {
        return Err(LabError::domain("need at least one key"));
    }
    let (d, _) = crate::twirls::split_shape(psi.registers(), t)?;
    if d != 1 << n {
        return Err(LabError::domain(format!(
            "state registers have dimension {d}, expected 2^{n}"
        )));
    }
    crate::twirls::conjugation_average(TwirlInput::Pure(psi), t, num_keys, seed, |rng| {
        pru_matrix(&PruKey::random(rng), n)
    })
}

/// Average over an explicit key list.
pub fn pru_average_over_keys(
    psi: &StateVector,
    t: usize,
    n: usize,
    keys: &[PruKey],
) -> Result<DenseOperator> {
    let unitaries = keys
        .iter()
        .map(|k| pru_matrix(k, n))
        .collect::<Result<Vec<_>>>()?;
    crate::twirls::ensemble_twirl(TwirlInput::Pure(psi), t, &unitaries)
}

/// `U_k |x>` built column by column: Clifford column, then signs, then
/// relabeling. Independent of the matrix products in [`pru_unitary`].
pub fn pru_columns(key: &PruKey, n: usize) -> Result<CMatrix> {
    let parts = pru_components(key, n)?;
    let c = parts.clifford.to_dense()?;
    let d = 1usize << n;
    let mut out = CMatrix::zeros(d, d);
    for x in 0..d {
        for y in 0..d {
            let amp = c.matrix()[(y, x)];
            let signed = if parts.phase.eval(y) { -amp } else { amp };
            out[(parts.permutation.apply(y), x)] += signed;
        }
    }
    Ok(out)
}

/// True when every column holds exactly one entry equal to `±1` and zeros
/// elsewhere.
pub fn is_signed_permutation(m: &CMatrix, tol: f64) -> bool {
    m.column_iter().all(|col| {
        let mut hits = 0;
        for z in col.iter() {
            if (*z - C64::new(1.0, 0.0)).norm() <= tol || (*z + C64::new(1.0, 0.0)).norm() <= tol {
                hits += 1;
            } else if z.norm() > tol {
                return false;
            }
        }
        hits == 1
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::sample_haar_state;
    use crate::twirls::{clifford_twirl, haar_twirl_exact, pf_twirl, TwirlMethod};
    use std::collections::HashSet;

    #[test]
    fn keys_are_deterministic_distinct_and_round_trip() {
        assert_eq!(sample_key(3), sample_key(3));
        let keys: HashSet<PruKey> = (0..1000).map(sample_key).collect();
        assert_eq!(keys.len(), 1000);
        let k = sample_key(9);
        let json = serde_json::to_string(&k).unwrap();
        assert!(json.contains(&hex::encode(k.k1)));
        assert_eq!(serde_json::from_str::<PruKey>(&json).unwrap(), k);
        assert_eq!(k.digest().len(), 64);
        assert_ne!(k.digest(), sample_key(10).digest());
    }

    #[test]
    fn prp_is_a_bijection_with_inverse() {
        for n in 1..=4 {
            let d = 1usize << n;
            for seed in 0..20 {
                let prp = ShufflePrp::new(&sample_key(seed).k1, d);
                let mut seen = vec![false; d];
                for x in 0..d {
                    let y = prp.eval(x);
                    assert!(!seen[y]);
                    seen[y] = true;
                    assert_eq!(prp.invert(y), x);
                }
            }
        }
    }

    #[test]
    fn prf_is_deterministic_and_balanced() {
        let key = sample_key(1).k2;
        let f = CounterPrf::new(&key, 4096);
        let g = CounterPrf::new(&key, 4096);
        let ones = (0..4096).filter(|&x| f.eval(x)).count();
        assert!((0..4096).all(|x| f.eval(x) == g.eval(x)));
        // 4096 fair bits: mean 2048, sd 32.
        assert!((ones as f64 - 2048.0).abs() < 5.0 * 32.0);
    }

    #[test]
    fn trivial_components_give_identity() {
        let d = 4;
        let p = perm_op(&PermutationD::identity(d));
        let f = phase_op(&BooleanFunction::zero(d));
        let c = CliffordElement::identity(2).to_dense().unwrap();
        let u = p.mul(&f).unwrap().mul(&c).unwrap();
        assert!(u.max_abs_diff(&DenseOperator::identity(&[d])) < 1e-15);
    }

    #[test]
    fn pru_is_unitary_and_matches_columnwise_construction() {
        for seed in 0..100 {
            let key = sample_key(seed);
            let u = pru_unitary(&key, 2).unwrap();
            assert!(u.is_unitary(1e-12));
            assert!((u.matrix() - pru_columns(&key, 2).unwrap()).camax() < 1e-14);
        }
        for n in [1, 3, 4] {
            let key = sample_key(500 + n as u64);
            assert!(pru_unitary(&key, n).unwrap().is_unitary(1e-10));
        }
        assert!(matches!(
            pru_unitary(&sample_key(0), 5),
            Err(LabError::Capacity { .. })
        ));
    }

    #[test]
    fn without_clifford_the_pru_is_a_signed_permutation() {
        for seed in 0..20 {
            let parts = pru_components(&sample_key(seed), 3).unwrap();
            let pf = perm_op(&parts.permutation)
                .mul(&phase_op(&parts.phase))
                .unwrap();
            assert!(is_signed_permutation(pf.matrix(), 0.0));
        }
    }

    fn random_state(regs: Vec<usize>, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = regs.iter().product();
        StateVector::new(sample_haar_state(dim, &mut rng), regs).unwrap()
    }

    #[test]
    fn single_key_average_is_pure_and_order_free() {
        let psi = random_state(vec![4, 4, 2], 1);
        let one = pru_average_state(&psi, 2, 2, 1, 5).unwrap();
        let purity = (one.mean.matrix() * one.mean.matrix()).trace().re;
        assert!((purity - 1.0).abs() < 1e-10);

        let keys: Vec<PruKey> = (0..40).map(sample_key).collect();
        let mut shuffled = keys.clone();
        shuffled.reverse();
        shuffled.swap(3, 17);
        let a = pru_average_over_keys(&psi, 2, 2, &keys).unwrap();
        let b = pru_average_over_keys(&psi, 2, 2, &shuffled).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn key_average_matches_fully_random_state() {
        let psi = random_state(vec![4, 4, 2], 2);
        let est = pru_average_state(&psi, 2, 2, 4096, 11).unwrap();
        let xi = clifford_twirl(TwirlInput::Pure(&psi), 2, TwirlMethod::Exact)
            .unwrap()
            .operator;
        let fr = pf_twirl(&xi, 2).unwrap();
        // At t = 2 the fully random state is also the Haar twirl.
        let hr = haar_twirl_exact(&psi.outer_product(), 2).unwrap().operator;
        assert!(fr.max_abs_diff(&hr) < 1e-9);
        let dist = est.mean.sub(&fr).unwrap().trace_norm();
        assert!(dist <= 3.0 * est.trace_norm_standard_error().unwrap());
        let fro = est.mean.sub(&fr).unwrap().frobenius_norm();
        assert!(fro <= 3.0 * est.standard_error.unwrap());
        crate::operators::DensityMatrix::validate(&est.mean).unwrap();
    }
}
