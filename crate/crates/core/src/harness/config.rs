use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cap::check_dims;
use crate::error::{LabError, Result};

/// Families of input states on `A_1 ... A_t ⊗ E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateFamily {
    /// Uniformly random pure state on `A ⊗ E`.
    RandomPure,
    /// Random pure state supported on distinct tuples.
    DistinctSupported,
    /// `|φ>^{⊗t} ⊗ |0>_E` for a random single-register `|φ>`.
    TensorPower,
    /// A random computational basis tuple, `E` in `|0>`.
    ComputationalBasis,
    /// `d^{-1/2} Σ_z |z ... z> ⊗ |z mod dim E>`: all weight on collisions.
    AdversarialColliding,
}

impl StateFamily {
    pub const ALL: [StateFamily; 5] = [
        StateFamily::RandomPure,
        StateFamily::DistinctSupported,
        StateFamily::TensorPower,
        StateFamily::ComputationalBasis,
        StateFamily::AdversarialColliding,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateFamily::RandomPure => "random_pure",
            StateFamily::DistinctSupported => "distinct_supported",
            StateFamily::TensorPower => "tensor_power",
            StateFamily::ComputationalBasis => "computational_basis",
            StateFamily::AdversarialColliding => "adversarial_colliding",
        }
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateFamily {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| LabError::domain(format!("unknown state family `{s}`")))
    }
}

/// How the Clifford twirl in the security pipeline is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CliffordMode {
    /// Full group average (one or two qubits).
    Exact,
    MonteCarlo {
        samples: usize,
    },
    /// Use the input state itself as `ξ` (sensible for distinct-supported inputs).
    Skip,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Slack for exact linear-algebra identities.
    pub abs: f64,
    /// Number of standard errors allowed for Monte-Carlo quantities.
    pub mc_sigma: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            abs: 1e-8,
            mc_sigma: 3.0,
        }
    }
}

/// Largest number of parallel queries supported by the pipeline.
pub const MAX_QUERIES: usize = 4;

/// Default Monte-Carlo sample count.
pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Qubits per query register; `d = 2^n`.
    pub n: usize,
    pub t: usize,
    pub dim_e: usize,
    pub state_family: StateFamily,
    pub clifford: CliffordMode,
    /// When set, also average the keyed construction over this many keys.
    pub num_keys: Option<usize>,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    /// Exact Clifford averaging for one qubit, Monte-Carlo otherwise.
    pub fn new(n: usize, t: usize, dim_e: usize, state_family: StateFamily, seed: u64) -> Self {
        let clifford = if n <= 1 {
            CliffordMode::Exact
        } else {
            CliffordMode::MonteCarlo {
                samples: DEFAULT_SAMPLES,
            }
        };
        Self {
            n,
            t,
            dim_e,
            state_family,
            clifford,
            num_keys: None,
            seed,
            tolerances: Tolerances::default(),
        }
    }

    pub fn d(&self) -> usize {
        1 << self.n
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 16 {
            return Err(LabError::domain(format!(
                "n must be in 1..=16, got {}",
                self.n
            )));
        }
        if self.t == 0 || self.t > MAX_QUERIES {
            return Err(LabError::capacity(
                "parallel queries t",
                self.t as u128,
                MAX_QUERIES as u128,
            ));
        }
        if self.dim_e == 0 {
            return Err(LabError::domain("workspace dimension must be at least 1"));
        }
        check_dims(self.d(), self.t, self.dim_e)?;
        if self.d() < self.t {
            return Err(LabError::domain(format!(
                "exact Haar twirl needs 2^n >= t (n = {}, t = {})",
                self.n, self.t
            )));
        }
        match self.clifford {
            CliffordMode::Exact if self.n > 2 => Err(LabError::capacity(
                "exact Clifford enumeration (qubits)",
                self.n as u128,
                2,
            )),
            CliffordMode::MonteCarlo { samples: 0 } => Err(LabError::domain(
                "Monte-Carlo Clifford twirl needs samples >= 1",
            )),
            _ => Ok(()),
        }?;
        if self.num_keys == Some(0) {
            return Err(LabError::domain("num_keys must be at least 1"));
        }
        Ok(())
    }
}

/// Derives an independent sub-seed for a named stage of an experiment.
pub fn derive_seed(seed: u64, stage: &str) -> u64 {
    // FNV-1a over the stage name, then a splitmix64 finalizer.
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ seed;
    for b in stage.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}
