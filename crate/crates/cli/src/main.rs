//! `pru-lab`: runs the verification suite, the security pipeline, single
//! twirls and parameter sweeps, and writes JSON or CSV reports.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage
//! or configuration errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pru_lab_core::harness::{
    build_state, derive_seed, known_check_ids, run_lemma_suite, run_security_experiment, run_sweep,
    CheckParams, CheckRecord, CliffordMode, ExperimentConfig, ExperimentReport, Relation,
    StateFamily, SuiteConfig, DEFAULT_SAMPLES,
};
use pru_lab_core::operators::hermitian_eigenvalues;
use pru_lab_core::twirls::{haar_twirl_exact, TwirlInput, TwirlKind, TwirlMethod, TwirlSpec};
use pru_lab_core::LabError;

#[derive(Parser, Debug)]
#[command(
    name = "pru-lab",
    version,
    about = "Twirl channels and the P·F·C pseudorandom unitary, checked numerically"
)]
#[command(arg_required_else_help = true, subcommand_required = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the named invariant checks over a grid of (d, t).
    Verify(VerifyArgs),
    /// Compare the fully-random and Haar-random t-query states and check the bound chain.
    Security(SecurityArgs),
    /// Apply one twirl channel to a generated state and summarise the output.
    Twirl(TwirlArgs),
    /// Run the security experiment on every (n, t) cell and report the chain check per cell.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Drop wall-clock fields so reruns are byte-identical.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Qubits per register (comma list); sets d = 2^n.
    #[arg(long, value_delimiter = ',', conflicts_with = "d")]
    n: Vec<usize>,
    /// Local dimensions (comma list). Defaults to 2,4,8.
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    /// Parallel queries (comma list).
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3])]
    t: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    dim_e: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte-Carlo samples for the statistical checks.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Keys averaged in the keyed-construction check.
    #[arg(long, default_value_t = 4096)]
    keys: usize,
    /// Run only this check (or every check with this id prefix).
    #[arg(long)]
    check: Option<String>,
    /// Print the known check ids and exit.
    #[arg(long)]
    list_checks: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CliffordArg {
    Exact,
    Mc,
    Skip,
}

#[derive(Args, Debug)]
struct SecurityArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 4)]
    dim_e: usize,
    /// State family: random_pure, distinct_supported, tensor_power, computational_basis, adversarial_colliding.
    #[arg(long, default_value = "random_pure")]
    state: StateFamily,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Clifford samples when the Clifford twirl is sampled.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Also average the keyed construction over this many keys.
    #[arg(long)]
    keys: Option<usize>,
    /// Clifford twirl mode; defaults to exact for n = 1 and sampled otherwise.
    #[arg(long, value_enum)]
    clifford: Option<CliffordArg>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Channel {
    Haar,
    Pf,
    Clifford,
}

#[derive(Args, Debug)]
struct TwirlArgs {
    #[arg(long, value_enum)]
    channel: Channel,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 2)]
    dim_e: usize,
    #[arg(long, default_value = "random_pure")]
    state: StateFamily,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use a Monte-Carlo average over this many samples instead of the exact channel.
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3])]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2])]
    t: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    dim_e: usize,
    #[arg(long, default_value = "random_pure")]
    state: StateFamily,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("pru-lab: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, LabError> {
    match cli.command {
        Command::Verify(args) => verify(args),
        Command::Security(args) => security(args),
        Command::Twirl(args) => twirl(args),
        Command::Sweep(args) => sweep(args),
    }
}

fn emit(report: ExperimentReport, output: &OutputArgs) -> Result<bool, LabError> {
    let report = if output.no_timings {
        report.without_timings()
    } else {
        report
    };
    let text = match output.format {
        Format::Json => report.to_json()?,
        Format::Csv => report.to_csv()?.trim_end().to_string(),
    };
    match &output.out {
        Some(path) => fs::write(path, text + "\n")
            .map_err(|e| LabError::Domain(format!("cannot write {}: {e}", path.display())))?,
        None => println!("{text}"),
    }
    let failed: Vec<_> = report.failures().map(|c| c.check_id.as_str()).collect();
    eprintln!(
        "{} checks, {} failed{}",
        report.checks.len(),
        failed.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!(": {}", failed.join(", "))
        }
    );
    Ok(report.all_passed())
}

fn verify(args: VerifyArgs) -> Result<bool, LabError> {
    if args.list_checks {
        for id in known_check_ids() {
            println!("{id}");
        }
        return Ok(true);
    }
    let dims = if !args.n.is_empty() {
        args.n
            .iter()
            .map(|&n| {
                (1..=16)
                    .contains(&n)
                    .then(|| 1usize << n)
                    .ok_or_else(|| LabError::Domain(format!("n must be in 1..=16, got {n}")))
            })
            .collect::<Result<Vec<_>, _>>()?
    } else if !args.d.is_empty() {
        args.d
    } else {
        SuiteConfig::default().dims
    };
    let cfg = SuiteConfig {
        dims,
        ts: args.t,
        dim_e: args.dim_e,
        seed: args.seed,
        samples: args.samples,
        num_keys: args.keys,
        check: args.check,
        ..SuiteConfig::default()
    };
    emit(run_lemma_suite(&cfg)?, &args.output)
}

fn security(args: SecurityArgs) -> Result<bool, LabError> {
    let mut cfg = ExperimentConfig::new(args.n, args.t, args.dim_e, args.state, args.seed);
    cfg.clifford = match args.clifford {
        Some(CliffordArg::Exact) => CliffordMode::Exact,
        Some(CliffordArg::Skip) => CliffordMode::Skip,
        Some(CliffordArg::Mc) => CliffordMode::MonteCarlo {
            samples: args.samples,
        },
        None if args.n <= 1 => CliffordMode::Exact,
        None => CliffordMode::MonteCarlo {
            samples: args.samples,
        },
    };
    cfg.num_keys = args.keys;
    emit(run_security_experiment(&cfg)?, &args.output)
}

fn twirl(args: TwirlArgs) -> Result<bool, LabError> {
    let d = 1usize
        .checked_shl(args.n as u32)
        .filter(|_| (1..=16).contains(&args.n))
        .ok_or_else(|| LabError::Domain(format!("n must be in 1..=16, got {}", args.n)))?;
    let psi = build_state(
        args.state,
        args.n,
        args.t,
        args.dim_e,
        derive_seed(args.seed, "state"),
    )?;
    let kind = match args.channel {
        Channel::Haar => TwirlKind::Haar,
        Channel::Pf => TwirlKind::Pf,
        Channel::Clifford => TwirlKind::Clifford,
    };
    let method = match args.samples {
        Some(samples) => TwirlMethod::MonteCarlo {
            samples,
            seed: derive_seed(args.seed, "twirl"),
        },
        None => TwirlMethod::Exact,
    };
    let spec = TwirlSpec::new(kind, d, args.t, method)?;
    let out = spec.apply(TwirlInput::Pure(&psi))?;

    let config = serde_json::json!({
        "channel": format!("{:?}", args.channel).to_lowercase(),
        "n": args.n, "t": args.t, "dim_e": args.dim_e, "state": args.state,
        "samples": args.samples, "seed": args.seed,
    });
    let mut report = ExperimentReport::new("twirl", config, args.seed);
    let params = CheckParams::new(d, args.t, args.dim_e);
    let m = out.operator.matrix();
    let trace = out.operator.trace();
    let eigs = hermitian_eigenvalues(m);
    let purity = (m * m).trace().re;
    report.push_quantity("output_trace", params.clone(), trace.re, None);
    report.push_quantity("output_purity", params.clone(), purity, Some("Tr[X²]"));
    report.push_quantity("output_min_eigenvalue", params.clone(), eigs.min(), None);
    if let Some(se) = out.standard_error {
        report.push_quantity("standard_error_frobenius", params.clone(), se, None);
    }
    if let Some(c) = out.gram_condition {
        report.push_quantity("haar_gram_condition", params.clone(), c, None);
    }
    if d >= args.t {
        let haar = haar_twirl_exact(&psi.outer_product(), args.t)?.operator;
        let dist = pru_lab_core::operators::schatten1_norm(&(m - haar.matrix()));
        report.push_quantity(
            "trace_distance_to_haar",
            params.clone(),
            dist,
            Some("‖X - haar(ψ)‖₁"),
        );
    }
    let herm = (m - m.adjoint()).camax();
    let err = herm
        .max(-eigs.min())
        .max((trace.re - 1.0).abs())
        .max(trace.im.abs());
    report.push_check(
        CheckRecord::new(
            "twirl-density-output",
            params,
            err,
            1e-9,
            Relation::AtMost,
            "max(|X - X†|, -λ_min(X), |Tr X - 1|)",
            "twirl-channels",
        )
        .with_seed(args.seed),
    );
    emit(report, &args.output)
}

fn sweep(args: SweepArgs) -> Result<bool, LabError> {
    if args.n.is_empty() || args.t.is_empty() {
        return Err(LabError::Domain(
            "sweep needs at least one n and one t".into(),
        ));
    }
    let report = run_sweep(
        &args.n,
        &args.t,
        args.dim_e,
        args.state,
        args.samples,
        args.seed,
    );
    emit(report, &args.output)
}
