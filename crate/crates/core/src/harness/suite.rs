//! The verification suite: every module invariant as a named check, run over
//! a grid of `(d, t)` cells.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{
    derive_seed, CliffordMode, ExperimentConfig, StateFamily, Tolerances, DEFAULT_SAMPLES,
};
use super::report::{CheckParams, CheckRecord, ExperimentReport, Relation};
use super::security::run_security_experiment;
use super::states::{build_state_for_dim, gentle_normalize, trace_norm_or_bound};
use crate::cap::{check_dims, index_to_tuple};
use crate::error::{LabError, Result};
use crate::operators::{
    distinct_projector, hermitian_eigenvalues, pauli_matrix, perm_op, phase_op, sample_clifford,
    sample_haar_unitary, subsystem_perm_images, subsystem_perm_op, BooleanFunction, CMatrix,
    DenseOperator, DensityMatrix, PermutationD, StateVector,
};
use crate::pru::{
    is_signed_permutation, pru_average_state, pru_columns, pru_components, pru_unitary, sample_key,
    KeyedPermutation, ShufflePrp, MAX_PRU_QUBITS,
};
use crate::schur_weyl::{
    isotypic_projector, ratio_report, schur_weyl_basis, IsotypicDecomposition, MAX_BASIS_DEGREE,
};
use crate::symgroup::{
    all_permutations, character, factorial, partitions, schur_orthogonality_error, specht_dim,
    weyl_dim, young_orthogonal_rep,
};
use crate::twirls::{
    clifford_twirl, collapse_identity_error, distinct_overlap_after_clifford, haar_twirl_exact,
    haar_twirl_monte_carlo, haar_twirl_schur_weyl, pf_basis_element_by_group, pf_twirl,
    pf_twirl_basis_element, pf_twirl_distinct_formula, pf_twirl_monte_carlo, MonteCarloEstimate,
    TwirlInput, TwirlMethod, COLLAPSE_DIM_LIMIT, GROUP_ORACLE_MAX_D,
};

/// Sample counts used for the convergence-slope checks.
pub const SLOPE_SAMPLES: [usize; 4] = [100, 1_000, 10_000, 100_000];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Local dimensions `d` to sweep.
    pub dims: Vec<usize>,
    pub ts: Vec<usize>,
    pub dim_e: usize,
    pub seed: u64,
    /// Monte-Carlo sample count for the statistical checks.
    pub samples: usize,
    /// Keys averaged in the keyed-construction check.
    pub num_keys: usize,
    /// Run only the check with this id, or the checks whose id starts with `check-`.
    pub check: Option<String>,
    pub tolerances: Tolerances,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 4, 8],
            ts: vec![2, 3],
            dim_e: 2,
            seed: 0,
            samples: DEFAULT_SAMPLES,
            num_keys: 4096,
            check: None,
            tolerances: Tolerances::default(),
        }
    }
}

type CheckFn = fn(&Cell<'_>) -> Result<Vec<CheckRecord>>;

struct CheckDef {
    id: &'static str,
    needs_decomposition: bool,
    run: CheckFn,
}

const fn def(id: &'static str, run: CheckFn) -> CheckDef {
    CheckDef {
        id,
        needs_decomposition: false,
        run,
    }
}

const fn def_sw(id: &'static str, run: CheckFn) -> CheckDef {
    CheckDef {
        id,
        needs_decomposition: true,
        run,
    }
}

const CHECKS: &[CheckDef] = &[
    def("symgroup-character-orthogonality", character_orthogonality),
    def("symgroup-specht-sum", specht_sum),
    def("symgroup-schur-weyl-dimension", schur_weyl_dimension),
    def("symgroup-young-homomorphism", young_homomorphism),
    def("symgroup-schur-orthogonality", schur_orthogonality),
    def(
        "operators-subsystem-representation",
        subsystem_representation,
    ),
    def("operators-distinct-projector", distinct_projector_check),
    def("operators-clifford-tableau", clifford_tableau),
    def("operators-haar-unitary", haar_unitary),
    def("schur-weyl-projector-completeness", projector_completeness),
    def(
        "schur-weyl-projector-orthogonality",
        projector_orthogonality,
    ),
    def("schur-weyl-projector-trace", projector_trace),
    def_sw("schur-weyl-basis-orthonormality", basis_orthonormality),
    def_sw("schur-weyl-basis-projector", basis_projector),
    def_sw("schur-weyl-permutation-action", permutation_action),
    def_sw("schur-weyl-unitary-action", unitary_action),
    def_sw("schur-weyl-distinct-block-trace", distinct_block_trace),
    def_sw("schur-weyl-deficit-closed-form", deficit_closed_form),
    def("schur-weyl-deficit-envelope", deficit_envelope),
    def_sw("schur-weyl-collapse", collapse),
    def_sw(
        "twirls-haar-commutant-vs-schur-weyl",
        haar_commutant_vs_schur_weyl,
    ),
    def("twirls-haar-invariance", haar_invariance),
    def("twirls-density-outputs", density_outputs),
    def_sw("twirls-pf-distinct-formula", pf_distinct_formula),
    def("twirls-pf-idempotence", pf_idempotence),
    def("twirls-pf-basis-element-oracle", pf_basis_element_oracle),
    def("twirls-haar-monte-carlo", haar_monte_carlo),
    def("twirls-pf-monte-carlo", pf_monte_carlo),
    def("twirls-haar-monte-carlo-slope", haar_monte_carlo_slope),
    def("twirls-pf-monte-carlo-slope", pf_monte_carlo_slope),
    def(
        "twirls-clifford-exact-two-design",
        clifford_exact_two_design,
    ),
    def(
        "twirls-clifford-monte-carlo-two-design",
        clifford_monte_carlo_two_design,
    ),
    def("twirls-distinct-overlap", distinct_overlap),
    def("pru-prp-bijective", prp_bijective),
    def("pru-unitary", pru_unitarity),
    def("pru-columnwise", pru_columnwise),
    def("pru-signed-permutation", pru_signed_permutation),
    def("pru-average-vs-fully-random", pru_average_vs_fully_random),
    def("harness-gentle-measurement", gentle_measurement),
    def("security", security),
];

/// Ids accepted by [`SuiteConfig::check`]. The `security` check emits one
/// record per step of the bound chain, each with a `security-` id.
pub fn known_check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.id).collect()
}

fn selected(filter: Option<&str>, id: &str) -> bool {
    match filter {
        None => true,
        Some(f) => id == f || id.strip_prefix(f).is_some_and(|rest| rest.starts_with('-')),
    }
}

/// Per-`(d, t)` context shared by the checks.
struct Cell<'a> {
    cfg: &'a SuiteConfig,
    d: usize,
    t: usize,
    decomposition: Option<Result<IsotypicDecomposition>>,
}

impl Cell<'_> {
    fn params(&self) -> CheckParams {
        CheckParams::new(self.d, self.t, self.cfg.dim_e)
    }

    fn seed(&self, stage: &str) -> u64 {
        derive_seed(self.cfg.seed, &format!("{stage}/d{}/t{}", self.d, self.t))
    }

    fn tol(&self) -> f64 {
        self.cfg.tolerances.abs
    }

    fn sigma(&self) -> f64 {
        self.cfg.tolerances.mc_sigma
    }

    fn qubits(&self) -> Option<usize> {
        (self.d.is_power_of_two() && self.d > 1).then(|| self.d.trailing_zeros() as usize)
    }

    fn dec(&self) -> Result<&IsotypicDecomposition> {
        match &self.decomposition {
            Some(Ok(dec)) => Ok(dec),
            Some(Err(e)) => Err(e.clone()),
            None => Err(LabError::domain("Schur-Weyl basis not built for this cell")),
        }
    }

    fn has_basis(&self) -> bool {
        self.t <= MAX_BASIS_DEGREE
    }

    fn record(
        &self,
        id: &str,
        measured: f64,
        bound: f64,
        relation: Relation,
        formula: &str,
        source: &str,
    ) -> CheckRecord {
        CheckRecord::new(
            id,
            self.params(),
            measured,
            bound,
            relation,
            formula,
            source,
        )
        .with_seed(self.cfg.seed)
    }

    fn at_most(
        &self,
        id: &str,
        measured: f64,
        bound: f64,
        formula: &str,
        source: &str,
    ) -> Vec<CheckRecord> {
        vec![self.record(id, measured, bound, Relation::AtMost, formula, source)]
    }

    fn equal(
        &self,
        id: &str,
        measured: f64,
        expected: f64,
        formula: &str,
        source: &str,
    ) -> Vec<CheckRecord> {
        vec![self.record(id, measured, expected, Relation::Equal, formula, source)]
    }

    fn random_state(&self, stage: &str) -> Result<StateVector> {
        build_state_for_dim(
            StateFamily::RandomPure,
            self.d,
            self.t,
            self.cfg.dim_e,
            self.seed(stage),
        )
    }

    fn distinct_state(&self, stage: &str) -> Result<StateVector> {
        build_state_for_dim(
            StateFamily::DistinctSupported,
            self.d,
            self.t,
            self.cfg.dim_e,
            self.seed(stage),
        )
    }
}

/// Runs the selected checks over every `(d, t)` cell. Check failures and
/// errors become failing records; only an invalid configuration is an error.
pub fn run_lemma_suite(cfg: &SuiteConfig) -> Result<ExperimentReport> {
    if cfg.dims.is_empty() || cfg.ts.is_empty() {
        return Err(LabError::domain("the suite needs at least one d and one t"));
    }
    if cfg.dims.iter().any(|&d| d < 2) || cfg.ts.contains(&0) || cfg.dim_e == 0 {
        return Err(LabError::domain("need d >= 2, t >= 1 and dim_e >= 1"));
    }
    if cfg.samples < 2 || cfg.num_keys < 2 {
        return Err(LabError::domain("samples and num_keys must be at least 2"));
    }
    let filter = cfg.check.as_deref();
    if let Some(f) = filter {
        if !CHECKS.iter().any(|c| selected(Some(f), c.id)) {
            return Err(LabError::domain(format!("unknown check '{f}'")));
        }
    }
    let started = Instant::now();
    let checks: Vec<&CheckDef> = CHECKS.iter().filter(|c| selected(filter, c.id)).collect();
    let need_basis = checks.iter().any(|c| c.needs_decomposition);

    // Bases are built up front so that checks never race to build them.
    let cells: Vec<Cell<'_>> = cfg
        .dims
        .iter()
        .flat_map(|&d| cfg.ts.iter().map(move |&t| (d, t)))
        .map(|(d, t)| {
            let decomposition = (need_basis && t <= MAX_BASIS_DEGREE)
                .then(|| check_dims(d, t, 1).and_then(|_| schur_weyl_basis(d, t)));
            Cell {
                cfg,
                d,
                t,
                decomposition,
            }
        })
        .collect();

    let jobs: Vec<(&Cell<'_>, &CheckDef)> = cells
        .iter()
        .flat_map(|c| checks.iter().map(move |&k| (c, k)))
        .collect();
    let results: Vec<Vec<CheckRecord>> = jobs
        .par_iter()
        .map(|(cell, check)| {
            let t0 = Instant::now();
            let mut records = match (check.run)(cell) {
                Ok(r) => r,
                Err(e) => vec![cell.record(
                    check.id,
                    f64::NAN,
                    f64::NAN,
                    Relation::AtMost,
                    &format!("check raised an error: {e}"),
                    "suite",
                )],
            };
            let ms = t0.elapsed().as_secs_f64() * 1e3;
            for r in &mut records {
                r.wall_ms.get_or_insert(ms);
            }
            records
        })
        .collect();

    let config = serde_json::to_value(cfg).expect("suite config serialises");
    let mut report = ExperimentReport::new("verify", config, cfg.seed);
    for r in results.into_iter().flatten() {
        report.push_check(r);
    }
    report.wall_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    Ok(report)
}

// ---- symgroup ----

fn character_orthogonality(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    let parts = partitions(c.t)?;
    let perms = all_permutations(c.t);
    let order = factorial(c.t) as i128;
    let mut worst = 0i128;
    for a in &parts {
        for b in &parts {
            let mut sum = 0i128;
            for pi in &perms {
                sum += character(a, pi)? as i128 * character(b, pi)? as i128;
            }
            let expected = if a == b { order } else { 0 };
            worst = worst.max((sum - expected).abs());
        }
    }
    Ok(c.equal(
        "symgroup-character-orthogonality",
        worst as f64,
        0.0,
        "max_{λ,μ} |Σ_π χ_λ(π) χ_μ(π) - t! δ_{λμ}|",
        "character-orthogonality",
    ))
}

fn specht_sum(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    let sum: u128 = partitions(c.t)?.iter().map(|l| specht_dim(l).pow(2)).sum();
    Ok(c.equal(
        "symgroup-specht-sum",
        sum as f64,
        factorial(c.t) as f64,
        "Σ_λ (dim V_λ)² = t!",
        "regular-representation",
    ))
}

fn schur_weyl_dimension(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    let mut sum = 0u128;
    for l in partitions(c.t)?.iter().filter(|l| l.rows() <= c.d) {
        sum += weyl_dim(l, c.d)? * specht_dim(l);
    }
    let total =
        crate::cap::checked_pow(c.d, c.t).ok_or_else(|| LabError::domain("d^t overflows"))?;
    Ok(c.equal(
        "symgroup-schur-weyl-dimension",
        sum as f64,
        total as f64,
        "Σ_{λ, rows <= d} dim W_λ dim V_λ = d^t",
        "schur-weyl-duality",
    ))
}

fn young_homomorphism(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    let perms = all_permutations(c.t);
    let mut worst = 0.0f64;
    for l in partitions(c.t)? {
        let rep = young_orthogonal_rep(&l)?;
        for p in &perms {
            for q in &perms {
                let diff = rep.matrix(&p.compose(q)) - rep.matrix(p) * rep.matrix(q);
                worst = worst.max(diff.amax());
            }
        }
    }
    Ok(c.at_most(
        "symgroup-young-homomorphism",
        worst,
        1e-12,
        "max |R^λ(πσ) - R^λ(π) R^λ(σ)|",
        "young-orthogonal-form",
    ))
}

fn schur_orthogonality(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    Ok(c.at_most(
        "symgroup-schur-orthogonality",
        schur_orthogonality_error(c.t)?,
        1e-12,
        "max |(1/t!) Σ_π R^λ_π[i,j] R^μ_π[k,l] - δ_{λμ} δ_{ik} δ_{jl} / dim V_λ|",
        "schur-orthogonality",
    ))
}

// ---- operators ----

fn subsystem_representation(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    check_dims(c.d, c.t, 1)?;
    let perms = all_permutations(c.t);
    let images = perms
        .iter()
        .map(|p| subsystem_perm_images(p, c.d))
        .collect::<Result<Vec<_>>>()?;
    let mut mismatches = 0usize;
    for (p, ip) in perms.iter().zip(&images) {
        for (q, iq) in perms.iter().zip(&images) {
            let ipq = subsystem_perm_images(&p.compose(q), c.d)?;
            mismatches += (0..ipq.len()).filter(|&a| ip[iq[a]] != ipq[a]).count();
        }
    }
    Ok(c.equal(
        "operators-subsystem-representation",
        mismatches as f64,
        0.0,
        "#{a : R_π R_σ |a> != R_{πσ} |a>}",
        "subsystem-permutation-representation",
    ))
}

fn distinct_projector_check(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    let lam = distinct_projector(c.d, c.t)?;
    let l = lam.operator.matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed("distinct-projector"));
    let p = perm_op(&PermutationD::random(c.d, &mut rng));
    let f = phase_op(&BooleanFunction::random(c.d, &mut rng));
    let pf = p.mul(&f)?.tensor_power(c.t)?;
    let mut worst = (l * l - l).camax();
    worst = worst.max((pf.matrix() * l - l * pf.matrix()).camax());
    for pi in all_permutations(c.t) {
        let r = subsystem_perm_op(&pi, c.d)?;
        worst = worst.max((r.matrix() * l - l * r.matrix()).camax());
    }
    let mut out = c.equal(
        "operators-distinct-projector",
        lam.operator.trace().re.round(),
        lam.trace as f64,
        "Tr Λ = d!/(d-t)!",
        "distinct-subspace-projector",
    );
    out.extend(c.at_most(
        "operators-distinct-projector-commutation",
        worst,
        1e-12,
        "max(|Λ² - Λ|, |[Λ, (PF)^{⊗t}]|, max_π |[Λ, R_π]|)",
        "distinct-subspace-projector",
    ));
    Ok(out)
}

fn clifford_tableau(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    let Some(n) = c.qubits().filter(|&n| n <= 3) else {
        return Ok(Vec::new());
    };
    let mut worst = 0.0f64;
    for i in 0..8 {
        let cl = sample_clifford(n, c.seed("clifford-tableau").wrapping_add(i));
        let u = cl.to_dense()?;
        let u = u.matrix();
        worst = worst.max((u.adjoint() * u - CMatrix::identity(c.d, c.d)).camax());
        for row in 0..2 * n {
            let mut x = vec![false; n];
            let mut z = vec![false; n];
            if row < n {
                x[row] = true;
            } else {
                z[row - n] = true;
            }
            let image = u * pauli_matrix(&x, &z, false) * u.adjoint();
            worst = worst.max((image - cl.row_pauli(row)).camax());
        }
    }
    Ok(c.at_most(
        "operators-clifford-tableau",
        worst,
        1e-10,
        "max over 8 samples of |C P C† - tableau row| and |C†C - 1|",
        "stabilizer-tableau",
    ))
}

fn haar_unitary(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    let mut worst = 0.0f64;
    for i in 0..8 {
        let u = sample_haar_unitary(c.d, c.seed("haar-unitary").wrapping_add(i));
        worst =
            worst.max((u.matrix().adjoint() * u.matrix() - CMatrix::identity(c.d, c.d)).camax());
    }
    Ok(c.at_most(
        "operators-haar-unitary",
        worst,
        1e-10,
        "max over 8 samples of |U†U - 1|",
        "haar-sampler",
    ))
}

// ---- schur_weyl ----

fn present_projectors(c: &Cell<'_>) -> Result<Vec<(crate::symgroup::Partition, DenseOperator)>> {
    check_dims(c.d, c.t, 1)?;
    partitions(c.t)?
        .into_iter()
        .filter(|l| l.rows() <= c.d)
        .map(|l| isotypic_projector(&l, c.d, c.t).map(|p| (l, p)))
        .collect()
}

fn projector_completeness(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    let projectors = present_projectors(c)?;
    let dim = projectors[0].1.dim();
    let sum = projectors
        .iter()
        .fold(CMatrix::zeros(dim, dim), |acc, (_, p)| acc + p.matrix());
    Ok(c.at_most(
        "schur-weyl-projector-completeness",
        (sum - CMatrix::identity(dim, dim)).camax(),
        c.tol(),
        "|Σ_λ 1_{P_λ} - 1|",
        "isotypic-projector-completeness",
    ))
}

fn projector_orthogonality(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    let projectors = present_projectors(c)?;
    let mut worst = 0.0f64;
    for (a, (_, pa)) in projectors.iter().enumerate() {
        for (b, (_, pb)) in projectors.iter().enumerate() {
            let prod = pa.matrix() * pb.matrix();
            let err = if a == b {
                (prod - pa.matrix()).camax()
            } else {
                prod.camax()
            };
            worst = worst.max(err);
        }
    }
    Ok(c.at_most(
        "schur-weyl-projector-orthogonality",
        worst,
        c.tol(),
        "max_{λ,μ} |1_{P_λ} 1_{P_μ} - δ_{λμ} 1_{P_λ}|",
        "isotypic-projector-orthogonality",
    ))
}

fn projector_trace(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    let mut worst = 0.0f64;
    for (l, p) in present_projectors(c)? {
        let expected = (weyl_dim(&l, c.d)? * specht_dim(&l)) as f64;
        worst = worst.max((p.trace().re - expected).abs());
    }
    Ok(c.at_most(
        "schur-weyl-projector-trace",
        worst,
        c.tol(),
        "max_λ |Tr 1_{P_λ} - dim W_λ dim V_λ|",
        "isotypic-projector-trace",
    ))
}

fn basis_orthonormality(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if !c.has_basis() {
        return Ok(Vec::new());
    }
    let b = c.dec()?.full_basis();
    let n = b.nrows();
    let gram = (b.transpose() * &b - DMatrix::<f64>::identity(b.ncols(), b.ncols())).amax();
    let frame = (&b * b.transpose() - DMatrix::<f64>::identity(n, n)).amax();
    Ok(c.at_most(
        "schur-weyl-basis-orthonormality",
        gram.max(frame),
        c.tol(),
        "max(|BᵀB - 1|, |BBᵀ - 1|)",
        "schur-weyl-basis",
    ))
}

fn basis_projector(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if !c.has_basis() {
        return Ok(Vec::new());
    }
    let mut worst = 0.0f64;
    for block in &c.dec()?.blocks {
        let p = isotypic_projector(&block.partition, c.d, c.t)?;
        let bb = &block.basis * block.basis.transpose();
        worst = worst.max((bb - p.matrix().map(|z| z.re)).amax());
        worst = worst.max(p.matrix().map(|z| z.im.abs()).max());
    }
    Ok(c.at_most(
        "schur-weyl-basis-projector",
        worst,
        c.tol(),
        "max_λ |B_λ B_λᵀ - 1_{P_λ}|",
        "schur-weyl-basis",
    ))
}

fn permutation_action(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if !c.has_basis() {
        return Ok(Vec::new());
    }
    let dec = c.dec()?;
    let mut worst = 0.0f64;
    for pi in all_permutations(c.t) {
        let r = subsystem_perm_op(&pi, c.d)?.matrix().map(|z| z.re);
        for a in &dec.blocks {
            for b in &dec.blocks {
                let coords = a.basis.transpose() * &r * &b.basis;
                let err = if a.partition == b.partition {
                    let expected = DMatrix::<f64>::identity(a.weyl_dim, a.weyl_dim)
                        .kronecker(a.irrep.matrix(&pi));
                    (coords - expected).amax()
                } else {
                    coords.amax()
                };
                worst = worst.max(err);
            }
        }
    }
    Ok(c.at_most(
        "schur-weyl-permutation-action",
        worst,
        c.tol(),
        "max_{π,λ,μ} |B_λᵀ R_π B_μ - δ_{λμ} 1_{W_λ} ⊗ R^λ(π)|",
        "schur-weyl-duality",
    ))
}

fn unitary_action(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if !c.has_basis() {
        return Ok(Vec::new());
    }
    let dec = c.dec()?;
    let u = sample_haar_unitary(c.d, c.seed("unitary-action")).tensor_power(c.t)?;
    let mut worst = 0.0f64;
    for a in &dec.blocks {
        for b in &dec.blocks {
            let coords = real_congruence_pair(&a.basis, u.matrix(), &b.basis);
            if a.partition != b.partition {
                worst = worst.max(coords.camax());
                continue;
            }
            // Expected form U_λ ⊗ 1_{V_λ}, with U_λ read off the j = 0 copy.
            let (w, v) = (a.weyl_dim, a.specht_dim);
            for i in 0..w {
                for j in 0..v {
                    for k in 0..w {
                        for l in 0..v {
                            let expected = if j == l {
                                coords[(a.column(i, 0), a.column(k, 0))]
                            } else {
                                Default::default()
                            };
                            worst = worst
                                .max((coords[(a.column(i, j), a.column(k, l))] - expected).norm());
                        }
                    }
                }
            }
        }
    }
    Ok(c.at_most(
        "schur-weyl-unitary-action",
        worst,
        c.tol(),
        "max |B_λᵀ U^{⊗t} B_μ - δ_{λμ} U_λ ⊗ 1_{V_λ}|",
        "schur-weyl-duality",
    ))
}

/// `Aᵀ X B` for real `A`, `B`.
fn real_congruence_pair(a: &DMatrix<f64>, x: &CMatrix, b: &DMatrix<f64>) -> CMatrix {
    let re = a.transpose() * x.map(|z| z.re) * b;
    let im = a.transpose() * x.map(|z| z.im) * b;
    CMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
        crate::operators::C64::new(re[(i, j)], im[(i, j)])
    })
}

fn distinct_block_trace(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if !c.has_basis() {
        return Ok(Vec::new());
    }
    let mut worst = 0.0f64;
    for r in ratio_report(c.d, c.t, Some(c.dec()?))? {
        let measured = r.measured_tr_distinct_block.unwrap_or(f64::NAN);
        worst = worst.max((measured - r.tr_distinct_block as f64).abs());
    }
    Ok(c.at_most(
        "schur-weyl-distinct-block-trace",
        worst,
        c.tol(),
        "max_λ |Tr Λ^{(λ)} - (dim V_λ / t!) Tr Λ|",
        "distinct-block-trace",
    ))
}

fn deficit_closed_form(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if !c.has_basis() {
        return Ok(Vec::new());
    }
    let mut worst = 0.0f64;
    for r in ratio_report(c.d, c.t, Some(c.dec()?))? {
        worst = worst.max((r.measured_deficit.unwrap_or(f64::NAN) - r.deficit_value).abs());
    }
    Ok(c.at_most(
        "schur-weyl-deficit-closed-form",
        worst,
        1e-9,
        "max_λ |(1 - Tr Λ^{(λ)} / dim W_λ) - (1 - (d!/(d-t)!) / prod (d + j - i))|",
        "distinct-block-deficit",
    ))
}

fn deficit_envelope(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if c.t > c.d {
        return Ok(Vec::new());
    }
    let worst = ratio_report(c.d, c.t, None)?
        .iter()
        .map(|r| r.deficit_value)
        .fold(0.0, f64::max);
    let envelope = 2.0 * (c.t * c.t) as f64 / c.d as f64;
    Ok(c.at_most(
        "schur-weyl-deficit-envelope",
        worst,
        envelope,
        "2t²/d: 1 - prod_k (1 - k/d) / prod_{(i,j)} (1 + (j-i)/d) with |contents| < t",
        "deficit-envelope",
    ))
}

fn collapse(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if !c.has_basis()
        || crate::cap::checked_pow(c.d, c.t).map_or(true, |v| v > COLLAPSE_DIM_LIMIT as u128)
    {
        return Ok(Vec::new());
    }
    Ok(c.at_most(
        "schur-weyl-collapse",
        collapse_identity_error(c.dec()?)?,
        c.tol(),
        "max over basis pairs of |Σ_σ <β|R_σ†|α> R_σ - δ (t!/dim V_λ) 1_{W_λ} ⊗ |v_j><v_j'||",
        "permutation-sum-collapse",
    ))
}

// ---- twirls ----

fn haar_commutant_vs_schur_weyl(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if c.t > c.d || !c.has_basis() {
        return Ok(Vec::new());
    }
    let rho = c.random_state("haar-vs-sw")?.density();
    let commutant = haar_twirl_exact(rho.as_operator(), c.t)?.operator;
    let sw = haar_twirl_schur_weyl(&rho, c.dec()?)?;
    Ok(c.at_most(
        "twirls-haar-commutant-vs-schur-weyl",
        commutant.max_abs_diff(sw.as_operator()),
        c.tol(),
        "|commutant projection - Σ_λ (1_{W_λ}/dim W_λ) ⊗ Tr_{W_λ}[1_{P_λ} ρ 1_{P_λ}]|",
        "haar-twirl-schur-weyl",
    ))
}

fn haar_invariance(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if c.t > c.d {
        return Ok(Vec::new());
    }
    let rho = c.random_state("haar-invariance")?.outer_product();
    let out = haar_twirl_exact(&rho, c.t)?.operator;
    let targets: Vec<usize> = (0..c.t).collect();
    let mut worst = 0.0f64;
    for i in 0..3 {
        let u = sample_haar_unitary(c.d, c.seed("haar-invariance-u").wrapping_add(i));
        let moved = crate::operators::conjugate_registers(&out, u.matrix(), &targets)?;
        worst = worst.max(moved.max_abs_diff(&out));
    }
    Ok(c.at_most(
        "twirls-haar-invariance",
        worst,
        c.tol(),
        "max over 3 Haar U of |U^{⊗t} X U^{⊗t,†} - X|, X the Haar twirl output",
        "haar-twirl-commutant",
    ))
}

fn density_error(x: &DenseOperator) -> f64 {
    let m = x.matrix();
    let herm = (m - m.adjoint()).camax();
    let min_eig = hermitian_eigenvalues(m).min();
    let trace = (x.trace().re - 1.0).abs() + x.trace().im.abs();
    herm.max(-min_eig).max(trace)
}

fn density_outputs(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if c.t > c.d {
        return Ok(Vec::new());
    }
    let rho = c.random_state("density")?.outer_product();
    let haar = haar_twirl_exact(&rho, c.t)?.operator;
    let pf = pf_twirl(&rho, c.t)?;
    Ok(c.at_most(
        "twirls-density-outputs",
        density_error(&haar).max(density_error(&pf)),
        1e-9,
        "max(|X - X†|, -λ_min(X), |Tr X - 1|) over the Haar and PF outputs",
        "twirl-channels",
    ))
}

fn pf_distinct_formula(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if c.t > c.d || !c.has_basis() {
        return Ok(Vec::new());
    }
    let rho = c.distinct_state("pf-formula")?.density();
    let generic = pf_twirl(rho.as_operator(), c.t)?;
    let formula = pf_twirl_distinct_formula(&rho, c.dec()?)?;
    Ok(c.at_most(
        "twirls-pf-distinct-formula",
        generic.max_abs_diff(formula.as_operator()),
        c.tol(),
        "|pf(ρ) - Σ_λ (Λ^{(λ)}/Tr Λ^{(λ)}) ⊗ Tr_{W_λ}[1_{P_λ} ρ 1_{P_λ}]| on distinct support",
        "pf-twirl-distinct-support",
    ))
}

fn pf_idempotence(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    check_dims(c.d, c.t, c.cfg.dim_e)?;
    let rho = c.random_state("pf-idempotence")?.outer_product();
    let once = pf_twirl(&rho, c.t)?;
    let twice = pf_twirl(&once, c.t)?;
    let identity = DenseOperator::identity(rho.registers());
    let unital = pf_twirl(&identity, c.t)?.max_abs_diff(&identity);
    Ok(c.at_most(
        "twirls-pf-idempotence",
        twice.max_abs_diff(&once).max(unital),
        1e-9,
        "max(|pf(pf(ρ)) - pf(ρ)|, |pf(1) - 1|)",
        "group-average",
    ))
}

fn pf_basis_element_oracle(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if c.d > GROUP_ORACLE_MAX_D.min(4) || crate::cap::checked_pow(c.d, c.t).map_or(true, |v| v > 64)
    {
        return Ok(Vec::new());
    }
    let dim = check_dims(c.d, c.t, 1)?;
    let tuples: Vec<Vec<usize>> = (0..dim)
        .map(|idx| {
            let mut a = vec![0; c.t];
            index_to_tuple(idx, c.d, &mut a);
            a
        })
        .collect();
    let worst = tuples
        .par_iter()
        .map(|x| -> Result<f64> {
            let mut w = 0.0f64;
            for y in &tuples {
                let fast = pf_twirl_basis_element(x, y, c.d)?;
                let group = pf_basis_element_by_group(x, y, c.d)?;
                w = w.max(fast.max_abs_diff(&group));
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(c.at_most(
        "twirls-pf-basis-element-oracle",
        worst,
        1e-12,
        "max over all (x, y) of |parity-and-orbit rule - average over S_d × {0,1}^d|",
        "pf-twirl-basis-element",
    ))
}

fn mc_cell(c: &Cell<'_>) -> bool {
    c.d == 4 && c.t == 2
}

fn mc_record(
    c: &Cell<'_>,
    id: &str,
    est: &MonteCarloEstimate,
    exact: &DenseOperator,
    source: &str,
) -> Vec<CheckRecord> {
    let err = (est.mean.matrix() - exact.matrix()).norm();
    c.at_most(
        id,
        err,
        c.sigma() * est.standard_error.unwrap_or(f64::NAN),
        "3 SE_F: Frobenius error against the exact twirl, three estimated standard errors",
        source,
    )
}

fn haar_monte_carlo(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if !mc_cell(c) {
        return Ok(Vec::new());
    }
    let psi = c.random_state("haar-mc")?;
    let exact = haar_twirl_exact(&psi.outer_product(), c.t)?.operator;
    let est = haar_twirl_monte_carlo(
        TwirlInput::Pure(&psi),
        c.t,
        c.cfg.samples,
        c.seed("haar-mc-samples"),
    )?;
    Ok(mc_record(
        c,
        "twirls-haar-monte-carlo",
        &est,
        &exact,
        "monte-carlo-standard-error",
    ))
}

fn pf_monte_carlo(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if !mc_cell(c) {
        return Ok(Vec::new());
    }
    let psi = c.random_state("pf-mc")?;
    let exact = pf_twirl(&psi.outer_product(), c.t)?;
    let est = pf_twirl_monte_carlo(
        TwirlInput::Pure(&psi),
        c.t,
        c.cfg.samples,
        c.seed("pf-mc-samples"),
    )?;
    Ok(mc_record(
        c,
        "twirls-pf-monte-carlo",
        &est,
        &exact,
        "monte-carlo-standard-error",
    ))
}

/// Least-squares slope of `log err` against `log N`.
pub fn log_log_slope(samples: &[usize], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = samples.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

fn slope_record<F>(
    c: &Cell<'_>,
    id: &str,
    stage: &str,
    exact: &DenseOperator,
    estimate: F,
) -> Result<Vec<CheckRecord>>
where
    F: Fn(usize, u64) -> Result<MonteCarloEstimate>,
{
    let errors = SLOPE_SAMPLES
        .iter()
        .map(|&n| {
            let est = estimate(n, c.seed(&format!("{stage}-{n}")))?;
            Ok(trace_norm_or_bound(&(est.mean.matrix() - exact.matrix())))
        })
        .collect::<Result<Vec<f64>>>()?;
    let slope = log_log_slope(&SLOPE_SAMPLES, &errors);
    Ok(c.at_most(
        id,
        (slope + 0.5).abs(),
        0.15,
        "|fitted log-log slope of ‖MC - exact‖₁ over N in {1e2..1e5} + 1/2|",
        "monte-carlo-convergence",
    ))
}

fn haar_monte_carlo_slope(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if !mc_cell(c) {
        return Ok(Vec::new());
    }
    let psi = c.random_state("haar-slope")?;
    let exact = haar_twirl_exact(&psi.outer_product(), c.t)?.operator;
    slope_record(
        c,
        "twirls-haar-monte-carlo-slope",
        "haar-slope",
        &exact,
        |n, s| haar_twirl_monte_carlo(TwirlInput::Pure(&psi), c.t, n, s),
    )
}

fn pf_monte_carlo_slope(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if !mc_cell(c) {
        return Ok(Vec::new());
    }
    let psi = c.random_state("pf-slope")?;
    let exact = pf_twirl(&psi.outer_product(), c.t)?;
    slope_record(
        c,
        "twirls-pf-monte-carlo-slope",
        "pf-slope",
        &exact,
        |n, s| pf_twirl_monte_carlo(TwirlInput::Pure(&psi), c.t, n, s),
    )
}

fn clifford_exact_two_design(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if c.t != 2 || !matches!(c.qubits(), Some(1 | 2)) {
        return Ok(Vec::new());
    }
    let mut worst = 0.0f64;
    for i in 0..3 {
        let psi = c.random_state(&format!("clifford-exact-{i}"))?;
        let haar = haar_twirl_exact(&psi.outer_product(), 2)?.operator;
        let cliff = clifford_twirl(TwirlInput::Pure(&psi), 2, TwirlMethod::Exact)?.operator;
        worst = worst.max(cliff.max_abs_diff(&haar));
    }
    Ok(c.at_most(
        "twirls-clifford-exact-two-design",
        worst,
        1e-9,
        "max over 3 states of |group-averaged Clifford twirl - Haar twirl|, t = 2",
        "clifford-two-design",
    ))
}

fn clifford_monte_carlo_two_design(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if !mc_cell(c) {
        return Ok(Vec::new());
    }
    let psi = c.random_state("clifford-mc")?;
    let haar = haar_twirl_exact(&psi.outer_product(), 2)?.operator;
    let method = TwirlMethod::MonteCarlo {
        samples: c.cfg.samples,
        seed: c.seed("clifford-mc-samples"),
    };
    let out = clifford_twirl(TwirlInput::Pure(&psi), 2, method)?;
    let err = (out.operator.matrix() - haar.matrix()).norm();
    Ok(c.at_most(
        "twirls-clifford-monte-carlo-two-design",
        err,
        c.sigma() * out.standard_error.unwrap_or(f64::NAN),
        "3 SE_F: Frobenius distance of sampled Clifford twirl to the Haar twirl",
        "clifford-two-design",
    ))
}

fn distinct_overlap(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    let Some(n) = c.qubits().filter(|&n| n <= 3) else {
        return Ok(Vec::new());
    };
    check_dims(c.d, c.t, c.cfg.dim_e)?;
    let psi = build_state_for_dim(
        StateFamily::AdversarialColliding,
        c.d,
        c.t,
        c.cfg.dim_e,
        c.seed("overlap"),
    )?;
    let method = if n == 1 {
        TwirlMethod::Exact
    } else {
        TwirlMethod::MonteCarlo {
            samples: c.cfg.samples,
            seed: c.seed("overlap-samples"),
        }
    };
    let est = distinct_overlap_after_clifford(TwirlInput::Pure(&psi), c.t, method)?;
    let slack = c.sigma() * est.standard_error.unwrap_or(0.0) + c.tol();
    Ok(c.at_most(
        "twirls-distinct-overlap",
        1.0 - est.overlap,
        est.collision_bound + slack,
        "t(t-1)/(d+1) + slack: t(t-1)/2 register pairs, each colliding with probability at most 2/(d+1) after a Clifford twirl",
        "clifford-distinct-overlap",
    ))
}

// ---- pru ----

fn pru_qubits(c: &Cell<'_>) -> Option<usize> {
    c.qubits().filter(|&n| n <= MAX_PRU_QUBITS)
}

fn prp_bijective(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if pru_qubits(c).is_none() {
        return Ok(Vec::new());
    }
    let mut failures = 0usize;
    for i in 0..16 {
        let key = sample_key(c.seed("prp").wrapping_add(i));
        let prp = ShufflePrp::new(&key.k1, c.d);
        let mut seen = vec![false; c.d];
        for x in 0..c.d {
            let y = prp.eval(x);
            if y >= c.d || seen[y] || prp.invert(y) != x {
                failures += 1;
            } else {
                seen[y] = true;
            }
        }
    }
    Ok(c.equal(
        "pru-prp-bijective",
        failures as f64,
        0.0,
        "#{(key, x) : eval not injective or invert(eval(x)) != x}, 16 keys",
        "keyed-permutation",
    ))
}

fn pru_unitarity(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    let Some(n) = pru_qubits(c) else {
        return Ok(Vec::new());
    };
    let mut worst = 0.0f64;
    for i in 0..16 {
        let u = pru_unitary(&sample_key(c.seed("pru-unitary").wrapping_add(i)), n)?;
        worst =
            worst.max((u.matrix().adjoint() * u.matrix() - CMatrix::identity(c.d, c.d)).camax());
    }
    Ok(c.at_most(
        "pru-unitary",
        worst,
        1e-10,
        "max over 16 keys of |U_k† U_k - 1|",
        "keyed-unitary",
    ))
}

fn pru_columnwise(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    let Some(n) = pru_qubits(c) else {
        return Ok(Vec::new());
    };
    let mut worst = 0.0f64;
    for i in 0..16 {
        let key = sample_key(c.seed("pru-columns").wrapping_add(i));
        worst = worst.max((pru_unitary(&key, n)?.matrix() - pru_columns(&key, n)?).camax());
    }
    Ok(c.at_most(
        "pru-columnwise",
        worst,
        1e-12,
        "max over 16 keys of |P F C - column-by-column construction|",
        "keyed-unitary",
    ))
}

fn pru_signed_permutation(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    let Some(n) = pru_qubits(c) else {
        return Ok(Vec::new());
    };
    let mut failures = 0usize;
    for i in 0..16 {
        let parts = pru_components(&sample_key(c.seed("pru-signed").wrapping_add(i)), n)?;
        let pf = perm_op(&parts.permutation).mul(&phase_op(&parts.phase))?;
        failures += usize::from(!is_signed_permutation(pf.matrix(), 1e-12));
    }
    Ok(c.equal(
        "pru-signed-permutation",
        failures as f64,
        0.0,
        "#{keys : P_k1 F_k2 is not a signed permutation matrix}, 16 keys",
        "keyed-unitary",
    ))
}

fn pru_average_vs_fully_random(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if !mc_cell(c) {
        return Ok(Vec::new());
    }
    let psi = c.random_state("pru-average")?;
    let xi = clifford_twirl(TwirlInput::Pure(&psi), c.t, TwirlMethod::Exact)?.operator;
    let fully_random = pf_twirl(&xi, c.t)?;
    let est = pru_average_state(&psi, c.t, 2, c.cfg.num_keys, c.seed("pru-keys"))?;
    let dist = trace_norm_or_bound(&(est.mean.matrix() - fully_random.matrix()));
    Ok(c.at_most(
        "pru-average-vs-fully-random",
        dist,
        c.sigma() * est.trace_norm_standard_error().unwrap_or(f64::NAN),
        "3 sqrt(D) SE_F: trace-norm distance of the key average to pf(Clifford twirl)",
        "keyed-average-statistical",
    ))
}

// ---- harness ----

fn gentle_measurement(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    if c.t > c.d {
        return Ok(Vec::new());
    }
    let xi = c.random_state("gentle")?.outer_product();
    let g = gentle_normalize(&xi, c.t)?;
    let mixed = DensityMatrix::maximally_mixed(xi.registers());
    let gm = gentle_normalize(mixed.as_operator(), c.t)?;
    Ok(c.at_most(
        "harness-gentle-measurement",
        (g.delta - g.bound).max(gm.delta - gm.bound),
        1e-9,
        "max(‖φ - ξ‖₁ - 2 sqrt(1 - Tr[Λ ξ])) over a random state and the maximally mixed state",
        "gentle-measurement",
    ))
}

fn security(c: &Cell<'_>) -> Result<Vec<CheckRecord>> {
    let Some(n) = c.qubits().filter(|&n| n <= 3) else {
        return Ok(Vec::new());
    };
    if c.t > c.d {
        return Ok(Vec::new());
    }
    let mut cfg = ExperimentConfig::new(
        n,
        c.t,
        c.cfg.dim_e,
        StateFamily::RandomPure,
        c.seed("security"),
    );
    if n > 1 {
        cfg.clifford = CliffordMode::MonteCarlo {
            samples: c.cfg.samples,
        };
    }
    cfg.tolerances = c.cfg.tolerances;
    let mut checks = run_security_experiment(&cfg)?.checks;
    for r in &mut checks {
        r.seed = Some(c.cfg.seed);
    }
    Ok(checks)
}
