use std::time::Instant;

use rayon::prelude::*;

use super::config::{derive_seed, CliffordMode, ExperimentConfig, StateFamily};
use super::report::{CheckParams, CheckRecord, DeficitEntry, ExperimentReport, Relation};
use super::states::{build_state, gentle_normalize, trace_norm_or_bound};
use crate::error::Result;
use crate::operators::{subsystem_perm_images, DenseOperator, StateVector};
use crate::pru::{pru_average_state, MAX_PRU_QUBITS};
use crate::schur_weyl::ratio_report;
use crate::symgroup::{all_permutations, character, factorial, partitions, specht_dim, Partition};
use crate::twirls::{
    clifford_twirl, distinct_overlap_after_clifford, haar_twirl_exact, pf_twirl, split_shape,
    TwirlInput, TwirlMethod,
};

/// `Tr[1_{P_λ} X]` for every `λ ⊢ t` with at most `d` rows, from characters.
pub fn isotypic_weights(x: &DenseOperator, t: usize) -> Result<Vec<(Partition, f64)>> {
    let (d, dim_e) = split_shape(x.registers(), t)?;
    let m = x.matrix();
    let perms = all_permutations(t);
    // Tr[(R_π ⊗ 1) X] = Σ_{b,e} X[(b,e), (R_π b, e)].
    let traces = perms
        .iter()
        .map(|pi| {
            let img = subsystem_perm_images(pi, d)?;
            Ok(img
                .iter()
                .enumerate()
                .map(|(b, &a)| {
                    (0..dim_e)
                        .map(|e| m[(b * dim_e + e, a * dim_e + e)].re)
                        .sum::<f64>()
                })
                .sum::<f64>())
        })
        .collect::<Result<Vec<f64>>>()?;
    let order = factorial(t) as f64;
    let mut out = Vec::new();
    for lambda in partitions(t)? {
        if lambda.rows() > d {
            continue;
        }
        let mut acc = 0.0;
        for (pi, tr) in perms.iter().zip(&traces) {
            acc += character(&lambda, &pi.inverse())? as f64 * tr;
        }
        out.push((lambda.clone(), specht_dim(&lambda) as f64 / order * acc));
    }
    Ok(out)
}

fn clifford_method(mode: CliffordMode, seed: u64) -> Option<TwirlMethod> {
    match mode {
        CliffordMode::Exact => Some(TwirlMethod::Exact),
        CliffordMode::MonteCarlo { samples } => Some(TwirlMethod::MonteCarlo {
            samples,
            seed: derive_seed(seed, "clifford"),
        }),
        CliffordMode::Skip => None,
    }
}

/// Runs the fully-random versus Haar-random comparison for one configuration
/// and checks every step of the bound chain
/// `‖ρ^fr - ρ^hr‖₁ <= ‖pf(φ) - haar(φ)‖₁ + 2δ <= 2 max_λ deficit_λ + 2δ`.
pub fn run_security_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let (n, t, d, dim_e) = (config.n, config.t, config.d(), config.dim_e);
    let seed = config.seed;
    let tol = config.tolerances;
    let params = CheckParams::new(d, t, dim_e);
    let config_json = serde_json::to_value(config).expect("config serialises");
    let mut report = ExperimentReport::new("security", config_json, seed);
    let check = |id: &str, measured: f64, bound: f64, formula: &str, source: &str| {
        CheckRecord::new(
            id,
            params.clone(),
            measured,
            bound,
            Relation::AtMost,
            formula,
            source,
        )
        .with_seed(seed)
    };

    let psi = build_state(config.state_family, n, t, dim_e, derive_seed(seed, "state"))?;
    let rho = psi.outer_product();

    let haar = haar_twirl_exact(&rho, t)?;
    let rho_hr = haar.operator;
    report.push_quantity(
        "haar_gram_condition",
        params.clone(),
        haar.gram_condition,
        None,
    );

    let method = clifford_method(config.clifford, seed);
    let (xi, xi_se) = match method {
        Some(m) => {
            let out = clifford_twirl(TwirlInput::Pure(&psi), t, m)?;
            (out.operator, out.standard_error)
        }
        None => (rho.clone(), None),
    };
    let rho_fr = pf_twirl(&xi, t)?;
    let distance = trace_norm_or_bound(&(rho_fr.matrix() - rho_hr.matrix()));
    report.push_quantity(
        "trace_distance_fr_hr",
        params.clone(),
        distance,
        Some("‖pf(ξ) - haar(ψ)‖₁, ξ the Clifford-twirled input"),
    );

    // Distinct-subspace weight after the Clifford twirl.
    let gentle = gentle_normalize(&xi, t)?;
    report.push_quantity(
        "clifford_overlap",
        params.clone(),
        gentle.acceptance,
        Some("Tr[Λ ξ]"),
    );
    let collision = (t * (t - 1)) as f64 / (d + 1) as f64;
    if let Some(m) = method {
        let overlap = distinct_overlap_after_clifford(TwirlInput::Pure(&psi), t, m)?;
        let sigma = overlap.standard_error.unwrap_or(0.0);
        if let Some(se) = overlap.standard_error {
            report.push_quantity("clifford_overlap_se", params.clone(), se, None);
        }
        let slack = tol.mc_sigma * sigma + tol.abs;
        report.push_check(check(
            "security-collision-bound",
            1.0 - gentle.acceptance,
            collision + slack,
            "t(t-1)/(d+1) + slack: t(t-1)/2 register pairs, each colliding with probability at most 2/(d+1) after a Clifford twirl",
            "clifford-distinct-overlap",
        ));
    }

    report.push_quantity(
        "gentle_norm_delta",
        params.clone(),
        gentle.delta,
        Some("‖φ - ξ‖₁"),
    );
    report.push_check(check(
        "security-gentle-measurement",
        gentle.delta,
        gentle.bound + tol.abs,
        "2 sqrt(1 - Tr[Λ ξ])",
        "gentle-measurement",
    ));

    // PF versus Haar on the normalised state, and its block decomposition.
    let phi = gentle.phi.as_operator();
    let pf_phi = pf_twirl(phi, t)?;
    let haar_phi = haar_twirl_exact(phi, t)?.operator;
    let d_phi = trace_norm_or_bound(&(pf_phi.matrix() - haar_phi.matrix()));
    report.push_quantity(
        "pf_haar_distance_normalized",
        params.clone(),
        d_phi,
        Some("‖pf(φ) - haar(φ)‖₁"),
    );

    let ratios = ratio_report(d, t, None)?;
    let max_deficit = ratios.iter().map(|r| r.deficit_value).fold(0.0, f64::max);
    for r in &ratios {
        report.deficits.push(DeficitEntry {
            d,
            t,
            partition: r.partition.clone(),
            exact: format!("{}/{}", r.deficit.num, r.deficit.den),
            value: r.deficit_value,
            tr_distinct_block: r.tr_distinct_block,
            tr_weyl: r.tr_weyl,
        });
    }
    report.push_quantity(
        "max_deficit",
        params.clone(),
        max_deficit,
        Some("max_λ 1 - (d!/(d-t)!) / prod (d + j - i)"),
    );

    let weights = isotypic_weights(phi, t)?;
    let mut weighted = 0.0;
    for (lambda, w) in &weights {
        report.push_quantity(
            format!("isotypic_weight{lambda}"),
            params.clone(),
            *w,
            Some("Tr[1_{P_λ} φ]"),
        );
        let deficit = ratios
            .iter()
            .find(|r| &r.partition == lambda)
            .map_or(0.0, |r| r.deficit_value);
        weighted += 2.0 * deficit * w;
    }
    report.push_check(check(
        "security-pf-vs-haar-identity",
        (d_phi - weighted).abs(),
        tol.abs,
        "| ‖pf(φ) - haar(φ)‖₁ - 2 Σ_λ deficit_λ Tr[1_{P_λ} φ] |",
        "pf-haar-block-deficit",
    ));
    report.push_check(check(
        "security-pf-vs-haar-normalized",
        d_phi,
        2.0 * max_deficit + tol.abs,
        "2 max_λ deficit_λ",
        "pf-haar-block-deficit",
    ));
    report.push_check(check(
        "security-triangle",
        distance,
        d_phi + 2.0 * gentle.delta + tol.abs,
        "‖pf(φ) - haar(φ)‖₁ + 2‖φ - ξ‖₁ (both twirls are contractions)",
        "channel-contraction-triangle",
    ));
    report.push_check(check(
        "security-chain",
        distance,
        2.0 * max_deficit + 2.0 * gentle.delta + tol.abs,
        "2 max_λ deficit_λ + 2‖φ - ξ‖₁",
        "security-chain",
    ));
    if method.is_some() {
        let sigma = report
            .quantities
            .iter()
            .find(|q| q.name == "clifford_overlap_se")
            .map_or(0.0, |q| q.value);
        report.push_check(check(
            "security-envelope",
            distance,
            2.0 * max_deficit + 4.0 * (collision + tol.mc_sigma * sigma).sqrt() + tol.abs,
            "2 max_λ deficit_λ + 4 sqrt(t(t-1)/(d+1) + slack)",
            "security-chain",
        ));
    }

    if let (Some(keys), Some(_)) = (config.num_keys, method) {
        if n <= MAX_PRU_QUBITS {
            let est = pru_average_state(&psi, t, n, keys, derive_seed(seed, "keys"))?;
            let dist = trace_norm_or_bound(&(est.mean.matrix() - rho_fr.matrix()));
            let root_dim = (rho.dim() as f64).sqrt();
            let se_keys = est.standard_error.unwrap_or(0.0) * root_dim;
            let se_fr = xi_se.unwrap_or(0.0) * root_dim;
            let se = (se_keys * se_keys + se_fr * se_fr).sqrt();
            report.push_quantity("trace_distance_pru_fr", params.clone(), dist, None);
            report.push_check(check(
                "security-pru-vs-fully-random",
                dist,
                tol.mc_sigma * se + tol.abs,
                "3 sqrt(D) SE_F: Frobenius standard errors of the key average and of ξ, converted to trace norm",
                "keyed-average-statistical",
            ));
        }
    }

    report.wall_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    for c in &mut report.checks {
        c.wall_ms = report.wall_ms;
    }
    Ok(report)
}

/// Runs one security experiment per `(n, t)` cell concurrently; each cell
/// contributes its chain check and headline quantities.
pub fn run_sweep(
    ns: &[usize],
    ts: &[usize],
    dim_e: usize,
    family: StateFamily,
    samples: usize,
    seed: u64,
) -> ExperimentReport {
    let cells: Vec<(usize, usize)> = ns
        .iter()
        .flat_map(|&n| ts.iter().map(move |&t| (n, t)))
        .collect();
    let config = serde_json::json!({
        "n": ns, "t": ts, "dim_e": dim_e, "state_family": family, "samples": samples, "seed": seed,
    });
    let results: Vec<_> = cells
        .par_iter()
        .map(|&(n, t)| {
            let mut cfg = ExperimentConfig::new(n, t, dim_e, family, seed);
            if n > 1 {
                cfg.clifford = CliffordMode::MonteCarlo { samples };
            }
            run_security_experiment(&cfg)
        })
        .collect();
    let mut report = ExperimentReport::new("sweep", config, seed);
    for (&(n, t), result) in cells.iter().zip(results) {
        let d = 1usize << n;
        let params = CheckParams::new(d, t, dim_e);
        match result {
            Ok(cell) => {
                for q in cell.quantities.iter().filter(|q| {
                    matches!(
                        q.name.as_str(),
                        "trace_distance_fr_hr"
                            | "clifford_overlap"
                            | "gentle_norm_delta"
                            | "max_deficit"
                    )
                }) {
                    report.quantities.push(q.clone());
                }
                if let Some(c) = cell
                    .checks
                    .into_iter()
                    .find(|c| c.check_id == "security-chain")
                {
                    report.push_check(c);
                }
            }
            Err(e) => report.push_check(
                CheckRecord::new(
                    "security-chain",
                    params,
                    f64::NAN,
                    f64::NAN,
                    Relation::AtMost,
                    format!("cell failed: {e}"),
                    "security-chain",
                )
                .with_seed(seed),
            ),
        }
    }
    report
}

/// Convenience for callers holding a state rather than a family.
pub fn trace_distance_fr_hr(psi: &StateVector, t: usize, method: TwirlMethod) -> Result<f64> {
    let hr = haar_twirl_exact(&psi.outer_product(), t)?.operator;
    let xi = clifford_twirl(TwirlInput::Pure(psi), t, method)?.operator;
    let fr = pf_twirl(&xi, t)?;
    Ok(trace_norm_or_bound(&(fr.matrix() - hr.matrix())))
}
