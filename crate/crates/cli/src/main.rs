//! `qsv`: plan, simulate and analyse quantum state verification experiments.

mod error;
mod family;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use qsv_core::adversarial::{adversarial_samples_general, plan_from_spectrum, trivial_mix_plan};
use qsv_core::entanglement::witness_confidence;
use qsv_core::protocol_sim::{evaluate_transcript, run_protocol, run_protocol_with_threads, Source};
use qsv_core::qmath::{hermitian_eigenvalues, Operator};
use qsv_core::qpv::convert_one_way_to_pm;
use qsv_core::states::from_spec;
use qsv_core::stats::{decide, TestPlan};
use qsv_core::strategies::{check_one_way_constraints, Strategy};

use error::CliError;
use family::FamilyArgs;
use output::{emit_csv, emit_json, emit_text, read_json, sig12};

#[derive(Parser, Debug)]
#[command(name = "qsv", version, about = "Quantum state verification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Target states
    #[command(subcommand)]
    State(StateCmd),
    /// Build, inspect and validate strategies
    #[command(subcommand)]
    Strategy(StrategyCmd),
    /// Rounds needed to reject infidelity ≥ ε at significance δ
    Plan {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        nu: f64,
    },
    /// Frequency decision for an observed pass count
    Decide {
        #[arg(long)]
        passes: u64,
        #[arg(long)]
        rounds: u64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        nu: f64,
    },
    /// Monte Carlo run of a strategy against a source
    Simulate(SimulateArgs),
    /// Planning against correlated sources
    #[command(subcommand)]
    Adversarial(AdversarialCmd),
    /// Gate verification
    #[command(subcommand)]
    Qpv(QpvCmd),
    /// Entanglement detection from test statistics
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Gap tables over a θ grid or an n range, as CSV
    Sweep(SweepArgs),
}

#[derive(Subcommand, Debug)]
enum StateCmd {
    /// Amplitudes of a named state: bell, mes:d, ghz:n, w:n, dicke:n:k,
    /// schmidt:l1,l2,..., twoqubit:theta, graph:FILE
    Build {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct StrategyInput {
    #[command(flatten)]
    family: FamilyArgs,
    /// Strategy JSON file instead of a family
    #[arg(long, conflicts_with = "family")]
    strategy: Option<PathBuf>,
}

impl StrategyInput {
    fn load(&self) -> Result<Strategy, CliError> {
        match &self.strategy {
            Some(path) => Ok(Strategy::read_file(path)?),
            None => family::build(&self.family),
        }
    }
}

#[derive(Subcommand, Debug)]
enum StrategyCmd {
    /// Strategy JSON for a family
    Build {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral gap and the closed-form prediction
    Gap {
        #[command(flatten)]
        src: StrategyInput,
    },
    /// Validity report; exit code 4 when invalid
    Check {
        #[command(flatten)]
        src: StrategyInput,
        /// Also check the one-way LOCC constraints
        #[arg(long)]
        one_way: bool,
    },
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    strategy: PathBuf,
    /// exact, worst:EPS or depolarized:P
    #[arg(long)]
    source: String,
    #[arg(long)]
    rounds: u64,
    #[arg(long)]
    seed: u64,
    /// Worker threads; the transcript does not depend on this
    #[arg(long)]
    threads: Option<usize>,
    /// Transcript JSON; a summary goes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// One row per round: k, test, pass
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also decide against infidelity EPS using the strategy's gap
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum AdversarialCmd {
    /// Asymptotic round count from λ (and τ) or from a strategy
    Plan {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        /// Second-largest eigenvalue; homogeneous when --tau is absent
        #[arg(long, required_unless_present = "strategy", conflicts_with = "strategy")]
        lambda: Option<f64>,
        /// Smallest eigenvalue
        #[arg(long, requires = "lambda")]
        tau: Option<f64>,
        #[arg(long)]
        strategy: Option<PathBuf>,
        /// Mix in the trivial test with the best weight on a grid
        #[arg(long)]
        trivial_mix: bool,
        #[arg(long, default_value_t = 1000)]
        mix_steps: usize,
    },
}

#[derive(Subcommand, Debug)]
enum QpvCmd {
    /// Prepare-and-measure plan from a one-way strategy for a Choi state
    Convert {
        #[arg(long)]
        strategy: PathBuf,
        /// Gate as operator JSON
        #[arg(long)]
        gate: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum WitnessCmd {
    /// Confidence that the average state is entangled
    Confidence {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        passes: u64,
        #[arg(long)]
        rounds: u64,
    },
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    family: String,
    /// START:END:COUNT, endpoints included
    #[arg(long, conflicts_with = "n")]
    theta: Option<String>,
    /// FIRST:LAST, inclusive
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_theta_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("--theta expects START:END:COUNT, got '{text}'"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.parse().map_err(|_| bad())?;
    let b: f64 = b.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    match n {
        0 => Err(bad()),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
    }
}

fn parse_n_range(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("--n expects FIRST:LAST, got '{text}'"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a: usize = a.parse().map_err(|_| bad())?;
    let b: usize = b.parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

#[derive(Serialize)]
struct GapReport<'a> {
    label: &'a str,
    gap: f64,
    predicted: Option<f64>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::State(StateCmd::Build { spec, out }) => {
            let psi = from_spec(&spec)?;
            emit_json(&json!({ "spec": spec, "state": psi }), out.as_ref())
        }
        Command::Strategy(StrategyCmd::Build { family, out }) => {
            let s = family::build(&family)?;
            match out {
                Some(path) => {
                    s.write_file(&path)?;
                    emit_json(
                        &json!({ "label": s.label(), "gap": s.gap()?, "predicted": s.predicted_gap(), "out": path }),
                        None,
                    )
                }
                None => emit_text(&s.to_json()?, None),
            }
        }
        Command::Strategy(StrategyCmd::Gap { src }) => {
            let s = src.load()?;
            emit_json(
                &GapReport {
                    label: s.label(),
                    gap: s.gap()?,
                    predicted: s.predicted_gap(),
                },
                None,
            )
        }
        Command::Strategy(StrategyCmd::Check { src, one_way }) => {
            let s = src.load()?;
            let report = s.validate()?;
            let constraints = if one_way { Some(check_one_way_constraints(&s)?) } else { None };
            let ok = report.valid && constraints.as_ref().is_none_or(|c| c.all_pass());
            emit_json(&json!({ "label": s.label(), "validation": report, "one_way": constraints, "valid": ok }), None)?;
            if ok {
                Ok(())
            } else {
                Err(CliError::Numerical(format!("strategy '{}' failed validation", s.label())))
            }
        }
        Command::Plan { eps, delta, nu } => {
            let plan = TestPlan::new(eps, delta, nu)?;
            emit_json(&json!({ "eps": eps, "delta": delta, "nu": nu, "rounds": plan.rounds, "threshold": plan.threshold() }), None)
        }
        Command::Decide { passes, rounds, eps, nu } => {
            let r = decide(passes, rounds, eps, nu)?;
            emit_json(&json!({ "eps": eps, "nu": nu, "result": r }), None)
        }
        Command::Simulate(a) => simulate(a),
        Command::Adversarial(AdversarialCmd::Plan { eps, delta, lambda, tau, strategy, trivial_mix, mix_steps }) => {
            let (lambda, tau) = match (&strategy, lambda) {
                (Some(path), _) => {
                    let s = Strategy::read_file(path)?;
                    let omega = s.aggregate()?;
                    if !trivial_mix {
                        let plan = adversarial_samples_general(eps, delta, &omega, s.target())?;
                        return emit_json(&json!({ "strategy": s.label(), "plan": plan }), None);
                    }
                    // Validates the operator before reading its spectrum.
                    let _ = s.gap()?;
                    let vals = hermitian_eigenvalues(&omega)?;
                    (vals[1], *vals.last().expect("nonempty"))
                }
                (None, Some(l)) => (l, tau.unwrap_or(l)),
                (None, None) => return Err(CliError::Usage("give --lambda or --strategy".into())),
            };
            if trivial_mix {
                let mix = trivial_mix_plan(eps, delta, lambda, tau, mix_steps)?;
                emit_json(&json!({ "trivial_mix": mix }), None)
            } else {
                emit_json(&json!({ "plan": plan_from_spectrum(eps, delta, lambda, tau)? }), None)
            }
        }
        Command::Qpv(QpvCmd::Convert { strategy, gate, out }) => {
            let s = Strategy::read_file(&strategy)?;
            let u: Operator = read_json(&gate)?;
            let pm = convert_one_way_to_pm(&s, &u)?;
            emit_json(&pm, out.as_ref())
        }
        Command::Witness(WitnessCmd::Confidence { d, passes, rounds }) => {
            emit_json(&witness_confidence(d, passes, rounds)?, None)
        }
        Command::Sweep(a) => sweep(a),
    }
}

fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let s = Strategy::read_file(&a.strategy)?;
    let src: Source = a.source.parse()?;
    let tr = match a.threads {
        Some(t) => run_protocol_with_threads(&s, &src, a.rounds, a.seed, t)?,
        None => run_protocol(&s, &src, a.rounds, a.seed)?,
    };
    if let Some(path) = &a.csv {
        let rows: Vec<Vec<String>> = tr
            .records
            .iter()
            .enumerate()
            .map(|(k, r)| vec![k.to_string(), r.test.to_string(), u8::from(r.pass).to_string()])
            .collect();
        emit_csv(&["k", "test", "pass"], &rows, Some(path))?;
    }
    let decision = match a.eps {
        Some(eps) => Some(evaluate_transcript(&tr, eps, s.gap()?)?),
        None => None,
    };
    match &a.out {
        Some(path) => {
            emit_json(&tr, Some(path))?;
            emit_json(
                &json!({
                    "seed": tr.seed, "strategy": tr.strategy, "source": tr.source,
                    "rounds": tr.rounds(), "passes": tr.passes, "frequency": tr.frequency,
                    "decision": decision, "out": path,
                }),
                None,
            )
        }
        None => emit_json(&json!({ "transcript": tr, "decision": decision }), None),
    }
}

fn sweep(a: SweepArgs) -> Result<(), CliError> {
    let mut rows = Vec::new();
    if let Some(grid) = &a.theta {
        if !family::THETA_FAMILIES.contains(&a.family.as_str()) {
            return Err(CliError::Usage(format!(
                "θ sweeps cover {:?}, not '{}'",
                family::THETA_FAMILIES,
                a.family
            )));
        }
        for theta in parse_theta_grid(grid)? {
            let theta = family::snap_theta(theta);
            let s = family::at_theta(&a.family, theta)?;
            rows.push(vec![sig12(theta), sig12(s.gap()?), s.predicted_gap().map(sig12).unwrap_or_default()]);
        }
        emit_csv(&["theta", "gap", "predicted"], &rows, a.out.as_ref())
    } else if let Some(range) = &a.n {
        if !family::N_FAMILIES.contains(&a.family.as_str()) {
            return Err(CliError::Usage(format!(
                "n sweeps cover {:?}, not '{}'",
                family::N_FAMILIES,
                a.family
            )));
        }
        for n in parse_n_range(range)? {
            let s = family::at_n(&a.family, n)?;
            rows.push(vec![n.to_string(), sig12(s.gap()?), s.predicted_gap().map(sig12).unwrap_or_default()]);
        }
        emit_csv(&["n", "gap", "predicted"], &rows, a.out.as_ref())
    } else {
        Err(CliError::Usage("sweep needs --theta or --n".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qsv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
