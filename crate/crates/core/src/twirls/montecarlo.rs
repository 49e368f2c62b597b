//! Chunked, seeded Monte-Carlo averaging.
//!
//! `N` samples are split over a fixed number of chunks; chunk `c` draws from
//! a ChaCha stream derived from `(seed, c)` and chunks are reduced in index
//! order, so results do not depend on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{split_shape, TwirlInput};
use crate::error::Result;
use crate::operators::{conjugate_registers, CMatrix, DenseOperator, C64};

/// Number of independent sample streams per estimate.
pub const MC_CHUNKS: usize = 64;

/// Chunks evaluated concurrently before their partial sums are folded in.
const WAVE: usize = 16;

/// Pure-state samples gathered before a rank-k update.
const BATCH: usize = 32;

pub(crate) fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn chunk_sizes(samples: usize) -> Vec<usize> {
    (0..MC_CHUNKS)
        .map(|c| samples / MC_CHUNKS + usize::from(c < samples % MC_CHUNKS))
        .collect()
}

/// Sample mean of operator-valued draws.
#[derive(Clone, Debug)]
pub struct MonteCarloEstimate {
    pub mean: DenseOperator,
    /// Standard error of the mean in Frobenius norm; `None` for one sample.
    pub standard_error: Option<f64>,
    pub samples: usize,
}

impl MonteCarloEstimate {
    /// Conservative trace-norm standard error, `sqrt(dim)` times the
    /// Frobenius one.
    pub fn trace_norm_standard_error(&self) -> Option<f64> {
        self.standard_error
            .map(|se| (self.mean.dim() as f64).sqrt() * se)
    }
}

/// Sample mean of scalar draws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarEstimate {
    pub mean: f64,
    pub standard_error: Option<f64>,
    pub samples: usize,
}

struct Partial {
    sum: CMatrix,
    sum_sq: f64,
}

fn standard_error(sum_sq: f64, mean_norm_sq: f64, n: usize) -> Option<f64> {
    if n < 2 {
        return None;
    }
    let var = ((sum_sq - n as f64 * mean_norm_sq) / (n as f64 - 1.0)).max(0.0);
    Some((var / n as f64).sqrt())
}

/// Runs `chunk` over every chunk index and folds results in chunk order.
fn ordered_reduce<T, F, G>(samples: usize, chunk: F, mut fold: G) -> Result<()>
where
    T: Send,
    F: Fn(usize, usize) -> Result<T> + Sync,
    G: FnMut(T),
{
    let sizes = chunk_sizes(samples);
    for wave in (0..MC_CHUNKS).step_by(WAVE) {
        let parts = (wave..(wave + WAVE).min(MC_CHUNKS))
            .into_par_iter()
            .map(|c| chunk(c, sizes[c]))
            .collect::<Result<Vec<_>>>()?;
        parts.into_iter().for_each(&mut fold);
    }
    Ok(())
}

/// Mean of `(U^{⊗t} ⊗ 1) X (U^{⊗t} ⊗ 1)†` over unitaries drawn by `sampler`.
pub(crate) fn conjugation_average<S>(
    input: TwirlInput<'_>,
    t: usize,
    samples: usize,
    seed: u64,
    sampler: S,
) -> Result<MonteCarloEstimate>
where
    S: Fn(&mut ChaCha8Rng) -> Result<CMatrix> + Sync,
{
    split_shape(input.registers(), t)?;
    let registers = input.registers().to_vec();
    let dim = input.dim();
    let targets: Vec<usize> = (0..t).collect();

    let run_chunk = |c: usize, count: usize| -> Result<Partial> {
        let mut rng = chunk_rng(seed, c);
        let mut sum = CMatrix::zeros(dim, dim);
        let mut sum_sq = 0.0;
        match input {
            TwirlInput::Pure(psi) => {
                let mut batch = CMatrix::zeros(dim, BATCH.min(count.max(1)));
                let mut filled = 0;
                for k in 0..count {
                    let u = sampler(&mut rng)?;
                    let v = psi.apply_to_registers(&u, &targets)?;
                    sum_sq += v.amplitudes().norm_squared().powi(2);
                    batch.set_column(filled, v.amplitudes());
                    filled += 1;
                    if filled == batch.ncols() || k + 1 == count {
                        let cols = batch.columns(0, filled);
                        sum += cols * cols.adjoint();
                        filled = 0;
                    }
                }
            }
            TwirlInput::Operator(x) => {
                for _ in 0..count {
                    let u = sampler(&mut rng)?;
                    let y = conjugate_registers(x, &u, &targets)?;
                    sum_sq += y.matrix().norm_squared();
                    sum += y.matrix();
                }
            }
        }
        Ok(Partial { sum, sum_sq })
    };

    let mut total = CMatrix::zeros(dim, dim);
    let mut total_sq = 0.0;
    ordered_reduce(samples, run_chunk, |p: Partial| {
        total += p.sum;
        total_sq += p.sum_sq;
    })?;
    let mean = total.unscale(samples as f64);
    let se = standard_error(total_sq, mean.norm_squared(), samples);
    Ok(MonteCarloEstimate {
        mean: DenseOperator::new(mean, registers)?,
        standard_error: se,
        samples,
    })
}

/// Mean of a scalar statistic.
pub(crate) fn scalar_average<F>(samples: usize, seed: u64, draw: F) -> Result<ScalarEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let run_chunk = |c: usize, count: usize| -> Result<(f64, f64)> {
        let mut rng = chunk_rng(seed, c);
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..count {
            let v = draw(&mut rng)?;
            s += v;
            s2 += v * v;
        }
        Ok((s, s2))
    };
    let (mut s, mut s2) = (0.0, 0.0);
    ordered_reduce(samples, run_chunk, |(a, b)| {
        s += a;
        s2 += b;
    })?;
    let mean = s / samples as f64;
    Ok(ScalarEstimate {
        mean,
        standard_error: standard_error(s2, mean * mean, samples),
        samples,
    })
}

/// `Σ_k (U_k^{⊗t} ⊗ 1) X (U_k^{⊗t} ⊗ 1)† / K` over an explicit list, reduced
/// in a fixed order.
pub(crate) fn list_average(
    input: TwirlInput<'_>,
    t: usize,
    unitaries: &[CMatrix],
) -> Result<CMatrix> {
    split_shape(input.registers(), t)?;
    let dim = input.dim();
    let targets: Vec<usize> = (0..t).collect();
    let per_chunk = unitaries.len().div_ceil(MC_CHUNKS).max(1);
    let parts = unitaries
        .par_chunks(per_chunk)
        .map(|group| -> Result<CMatrix> {
            let mut sum = CMatrix::zeros(dim, dim);
            for u in group {
                match input {
                    TwirlInput::Pure(psi) => {
                        let v = psi.apply_to_registers(u, &targets)?;
                        let a = v.amplitudes();
                        sum += a * a.adjoint();
                    }
                    TwirlInput::Operator(x) => {
                        sum += conjugate_registers(x, u, &targets)?.matrix();
                    }
                }
            }
            Ok(sum)
        })
        .collect::<Result<Vec<_>>>()?;
    let total = parts
        .into_iter()
        .fold(CMatrix::zeros(dim, dim), |acc, p| acc + p);
    Ok(total.unscale(unitaries.len() as f64))
}

/// `P_π F_f` as a `d x d` matrix: `|x> -> (-1)^{f(x)} |π(x)>`.
pub(crate) fn signed_permutation(images: &[usize], signs: &[bool]) -> CMatrix {
    let d = images.len();
    let mut m = CMatrix::zeros(d, d);
    for x in 0..d {
        m[(images[x], x)] = if signs[x] {
            C64::new(-1.0, 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
    }
    m
}
