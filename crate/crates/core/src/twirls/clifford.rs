use std::sync::OnceLock;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::montecarlo::{conjugation_average, list_average, scalar_average, ScalarEstimate};
use super::{split_shape, TwirlInput, TwirlMethod, TwirlOutput};
use crate::error::{LabError, Result};
use crate::operators::{
    conjugate_registers, distinct_mask, enumerate_cliffords, CMatrix, CliffordElement,
    DenseOperator,
};

static ONE_QUBIT: OnceLock<Vec<CMatrix>> = OnceLock::new();
static TWO_QUBIT: OnceLock<Vec<CMatrix>> = OnceLock::new();

/// The Clifford group modulo phases for one (24 elements) or two
/// (11520 elements) qubits, computed once.
pub fn clifford_group(n: usize) -> Result<&'static [CMatrix]> {
    let cell = match n {
        1 => &ONE_QUBIT,
        2 => &TWO_QUBIT,
        _ => {
            return Err(LabError::capacity(
                "exact Clifford enumeration (qubits)",
                n as u128,
                2,
            ))
        }
    };
    if let Some(list) = cell.get() {
        return Ok(list);
    }
    let list = enumerate_cliffords(n, true)?
        .into_iter()
        .map(DenseOperator::into_matrix)
        .collect();
    Ok(cell.get_or_init(|| list))
}

fn qubits_of(d: usize) -> Result<usize> {
    if d < 2 || !d.is_power_of_two() {
        return Err(LabError::domain(format!(
            "Clifford twirl needs d = 2^n, got {d}"
        )));
    }
    Ok(d.trailing_zeros() as usize)
}

fn sample_dense(n: usize, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    Ok(CliffordElement::sample(n, rng).to_dense()?.into_matrix())
}

/// Uniform average over an explicit list of single-register unitaries.
pub fn ensemble_twirl(
    input: TwirlInput<'_>,
    t: usize,
    unitaries: &[CMatrix],
) -> Result<DenseOperator> {
    if unitaries.is_empty() {
        return Err(LabError::domain("ensemble is empty"));
    }
    let mean = list_average(input, t, unitaries)?;
    DenseOperator::new(mean, input.registers().to_vec())
}

/// `E_C (C^{⊗t} ⊗ 1) X (C^{⊗t} ⊗ 1)†`: exact enumeration for one or two
/// qubits, uniform tableau sampling otherwise.
pub fn clifford_twirl(input: TwirlInput<'_>, t: usize, method: TwirlMethod) -> Result<TwirlOutput> {
    let (d, _) = split_shape(input.registers(), t)?;
    let n = qubits_of(d)?;
    match method {
        TwirlMethod::Exact => {
            let group = clifford_group(n)?;
            Ok(TwirlOutput {
                operator: ensemble_twirl(input, t, group)?,
                standard_error: None,
                samples: Some(group.len()),
                gram_condition: None,
            })
        }
        TwirlMethod::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(LabError::domain(
                    "Monte-Carlo twirl needs at least one sample",
                ));
            }
            let est = conjugation_average(input, t, samples, seed, |rng| sample_dense(n, rng))?;
            Ok(TwirlOutput::from_estimate(est))
        }
    }
}

/// `Tr[Λ ξ]` for the Clifford-twirled input `ξ`, with the collision bound
/// `1 - Tr[Λ ξ] <= t(t-1)/(d+1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapEstimate {
    pub overlap: f64,
    pub standard_error: Option<f64>,
    pub samples: usize,
    /// `t(t-1)/(d+1)`: pair count `t(t-1)/2` times `2/(d+1)` per pair.
    pub collision_bound: f64,
    /// `1 - t(t-1)/(d+1)`.
    pub lower_bound: f64,
}

pub fn distinct_overlap_after_clifford(
    input: TwirlInput<'_>,
    t: usize,
    method: TwirlMethod,
) -> Result<OverlapEstimate> {
    let (d, dim_e) = split_shape(input.registers(), t)?;
    let n = qubits_of(d)?;
    let mask = distinct_mask(d, t)?;
    let targets: Vec<usize> = (0..t).collect();
    let overlap_for = |u: &CMatrix| -> Result<f64> {
        Ok(match input {
            TwirlInput::Pure(psi) => {
                let v = psi.apply_to_registers(u, &targets)?;
                v.amplitudes()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask[i / dim_e])
                    .map(|(_, z)| z.norm_sqr())
                    .sum()
            }
            TwirlInput::Operator(x) => {
                let y = conjugate_registers(x, u, &targets)?;
                let m = y.matrix();
                (0..m.nrows())
                    .filter(|i| mask[i / dim_e])
                    .map(|i| m[(i, i)].re)
                    .sum()
            }
        })
    };
    let est = match method {
        TwirlMethod::Exact => {
            let group = clifford_group(n)?;
            let total = group
                .iter()
                .map(&overlap_for)
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .sum::<f64>();
            ScalarEstimate {
                mean: total / group.len() as f64,
                standard_error: None,
                samples: group.len(),
            }
        }
        TwirlMethod::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(LabError::domain(
                    "Monte-Carlo estimate needs at least one sample",
                ));
            }
            scalar_average(samples, seed, |rng| overlap_for(&sample_dense(n, rng)?))?
        }
    };
    let collision_bound = (t * (t - 1)) as f64 / (d + 1) as f64;
    Ok(OverlapEstimate {
        overlap: est.mean,
        standard_error: est.standard_error,
        samples: est.samples,
        collision_bound,
        lower_bound: 1.0 - collision_bound,
    })
}
