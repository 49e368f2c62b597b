//! The t-wise Haar, permutation-phase (PF) and Clifford twirls, each with an
//! exact path and a Monte-Carlo path. Every channel acts on the first `t`
//! registers of its input and as the identity on any trailing workspace
//! registers.

mod clifford;
mod collapse;
mod haar;
mod montecarlo;
mod pf;

pub use clifford::{
    clifford_group, clifford_twirl, distinct_overlap_after_clifford, ensemble_twirl,
    OverlapEstimate,
};
pub use collapse::{collapse_identity_error, COLLAPSE_DIM_LIMIT};
pub use haar::{
    haar_twirl_exact, haar_twirl_monte_carlo, haar_twirl_schur_weyl, CommutantProjection,
};
pub(crate) use montecarlo::conjugation_average;
pub use montecarlo::{MonteCarloEstimate, ScalarEstimate, MC_CHUNKS};
pub use pf::{
    pf_basis_element_by_group, pf_twirl, pf_twirl_basis_element, pf_twirl_distinct_formula,
    pf_twirl_monte_carlo, DISTINCT_SUPPORT_TOL, GROUP_ORACLE_MAX_D,
};

use crate::error::{LabError, Result};
use crate::operators::{CMatrix, DenseOperator, StateVector};

/// A twirl input: a pure state (enables the cheap vector path) or any operator.
#[derive(Clone, Copy, Debug)]
pub enum TwirlInput<'a> {
    Pure(&'a StateVector),
    Operator(&'a DenseOperator),
}

impl TwirlInput<'_> {
    pub fn registers(&self) -> &[usize] {
        match self {
            TwirlInput::Pure(psi) => psi.registers(),
            TwirlInput::Operator(x) => x.registers(),
        }
    }

    pub fn dim(&self) -> usize {
        self.registers().iter().product()
    }

    pub fn to_operator(&self) -> DenseOperator {
        match self {
            TwirlInput::Pure(psi) => psi.outer_product(),
            TwirlInput::Operator(x) => (*x).clone(),
        }
    }
}

impl<'a> From<&'a StateVector> for TwirlInput<'a> {
    fn from(psi: &'a StateVector) -> Self {
        TwirlInput::Pure(psi)
    }
}

impl<'a> From<&'a DenseOperator> for TwirlInput<'a> {
    fn from(x: &'a DenseOperator) -> Self {
        TwirlInput::Operator(x)
    }
}

/// `(d, dim E)` for an input whose first `t` registers are the queried ones.
pub(crate) fn split_shape(registers: &[usize], t: usize) -> Result<(usize, usize)> {
    if t == 0 {
        return Err(LabError::domain("twirl degree t must be at least 1"));
    }
    if registers.len() < t {
        return Err(LabError::domain(format!(
            "shape {registers:?} has fewer than t = {t} registers"
        )));
    }
    let d = registers[0];
    if registers[..t].iter().any(|&r| r != d) {
        return Err(LabError::domain(format!(
            "the first {t} registers of {registers:?} must share one dimension"
        )));
    }
    Ok((d, registers[t..].iter().product()))
}

#[derive(Clone, Debug)]
pub enum TwirlKind {
    Haar,
    Pf,
    Clifford,
    /// Uniform average over the given single-register unitaries.
    CustomEnsemble(Vec<CMatrix>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwirlMethod {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct TwirlSpec {
    pub kind: TwirlKind,
    pub d: usize,
    pub t: usize,
    pub method: TwirlMethod,
}

#[derive(Clone, Debug)]
pub struct TwirlOutput {
    pub operator: DenseOperator,
    /// Frobenius-norm standard error of a Monte-Carlo mean.
    pub standard_error: Option<f64>,
    pub samples: Option<usize>,
    /// Condition number of the permutation Gram matrix (exact Haar only).
    pub gram_condition: Option<f64>,
}

impl TwirlOutput {
    fn exact(operator: DenseOperator) -> Self {
        Self {
            operator,
            standard_error: None,
            samples: None,
            gram_condition: None,
        }
    }

    pub(crate) fn from_estimate(est: MonteCarloEstimate) -> Self {
        Self {
            operator: est.mean,
            standard_error: est.standard_error,
            samples: Some(est.samples),
            gram_condition: None,
        }
    }
}

impl TwirlSpec {
    pub fn new(kind: TwirlKind, d: usize, t: usize, method: TwirlMethod) -> Result<Self> {
        let spec = Self { kind, d, t, method };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t == 0 || self.d == 0 {
            return Err(LabError::domain("twirl needs d >= 1 and t >= 1"));
        }
        if let TwirlMethod::MonteCarlo { samples: 0, .. } = self.method {
            return Err(LabError::domain(
                "Monte-Carlo twirl needs at least one sample",
            ));
        }
        match &self.kind {
            TwirlKind::Haar if self.method == TwirlMethod::Exact && self.d < self.t => {
                Err(LabError::domain(format!(
                    "exact Haar twirl needs d >= t (d = {}, t = {})",
                    self.d, self.t
                )))
            }
            TwirlKind::Clifford if !self.d.is_power_of_two() || self.d < 2 => Err(
                LabError::domain(format!("Clifford twirl needs d = 2^n, got {}", self.d)),
            ),
            TwirlKind::CustomEnsemble(us) if us.is_empty() => {
                Err(LabError::domain("custom ensemble is empty"))
            }
            TwirlKind::CustomEnsemble(us)
                if us
                    .iter()
                    .any(|u| u.nrows() != self.d || u.ncols() != self.d) =>
            {
                Err(LabError::domain("custom ensemble unitaries must be d x d"))
            }
            _ => Ok(()),
        }
    }

    pub fn apply(&self, input: TwirlInput<'_>) -> Result<TwirlOutput> {
        self.validate()?;
        let (d, _) = split_shape(input.registers(), self.t)?;
        if d != self.d {
            return Err(LabError::domain(format!(
                "spec has d = {} but input registers have dimension {d}",
                self.d
            )));
        }
        match (&self.kind, self.method) {
            (TwirlKind::Haar, TwirlMethod::Exact) => {
                let proj = haar_twirl_exact(&input.to_operator(), self.t)?;
                Ok(TwirlOutput {
                    gram_condition: Some(proj.gram_condition),
                    ..TwirlOutput::exact(proj.operator)
                })
            }
            (TwirlKind::Haar, TwirlMethod::MonteCarlo { samples, seed }) => Ok(
                TwirlOutput::from_estimate(haar_twirl_monte_carlo(input, self.t, samples, seed)?),
            ),
            (TwirlKind::Pf, TwirlMethod::Exact) => {
                Ok(TwirlOutput::exact(pf_twirl(&input.to_operator(), self.t)?))
            }
            (TwirlKind::Pf, TwirlMethod::MonteCarlo { samples, seed }) => Ok(
                TwirlOutput::from_estimate(pf_twirl_monte_carlo(input, self.t, samples, seed)?),
            ),
            (TwirlKind::Clifford, method) => clifford_twirl(input, self.t, method),
            (TwirlKind::CustomEnsemble(us), TwirlMethod::Exact) => {
                Ok(TwirlOutput::exact(ensemble_twirl(input, self.t, us)?))
            }
            (TwirlKind::CustomEnsemble(us), TwirlMethod::MonteCarlo { samples, seed }) => {
                let est = montecarlo::conjugation_average(input, self.t, samples, seed, |rng| {
                    use rand::Rng;
                    Ok(us[rng.random_range(0..us.len())].clone())
                })?;
                Ok(TwirlOutput::from_estimate(est))
            }
        }
    }
}
