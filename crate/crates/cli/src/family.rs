use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;

use clap::Args;
use qsv_core::adversarial::homogeneous_strategy;
use qsv_core::graphs::{greedy_coloring, Coloring, Graph};
use qsv_core::states::{from_spec, SchmidtVector};
use qsv_core::strategies::*;

use crate::error::CliError;

/// A rounded π/4 such as 0.7854 is read as π/4.
const QUARTER_PI_SLACK: f64 = 1e-5;

pub const THETA_FAMILIES: &[&str] = &["local-qubit", "oneway-qubit", "twoway-qubit", "manyround-qubit"];
pub const N_FAMILIES: &[&str] = &["mes", "ghz-two-setting", "ghz-optimal", "w-locc", "w-local"];

#[derive(Args, Debug, Clone, Default)]
pub struct FamilyArgs {
    /// bell, mes, ghz-two-setting, ghz-optimal, stabilizer, coloring,
    /// local-qubit, oneway-qubit, twoway-qubit, manyround-qubit,
    /// oneway-qudit, twoway-qudit, w-locc, w-local, dicke-locc, homogeneous
    #[arg(long)]
    pub family: Option<String>,
    /// Local dimension (mes)
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of parties
    #[arg(long)]
    pub n: Option<usize>,
    /// Excitation number (dicke-locc)
    #[arg(long)]
    pub k: Option<usize>,
    /// Schmidt angle of cos θ|00⟩ + sin θ|11⟩
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Comma-separated Schmidt coefficients
    #[arg(long)]
    pub schmidt: Option<String>,
    /// Graph file (stabilizer, coloring)
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Coloring file; greedy coloring when absent
    #[arg(long)]
    pub coloring: Option<PathBuf>,
    /// Target state in the named-state grammar (homogeneous)
    #[arg(long)]
    pub state: Option<String>,
    /// Off-target eigenvalue (homogeneous)
    #[arg(long)]
    pub lambda: Option<f64>,
}

fn need<T: Copy>(v: Option<T>, flag: &str, family: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("family '{family}' needs --{flag}")))
}

pub fn snap_theta(theta: f64) -> f64 {
    if theta > FRAC_PI_4 && theta - FRAC_PI_4 <= QUARTER_PI_SLACK {
        FRAC_PI_4
    } else {
        theta
    }
}

fn schmidt(a: &FamilyArgs, family: &str) -> Result<SchmidtVector, CliError> {
    let text = a
        .schmidt
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("family '{family}' needs --schmidt")))?;
    let coeffs = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("'{s}' is not a number"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SchmidtVector::new(&coeffs)?)
}

fn graph(a: &FamilyArgs, family: &str) -> Result<Graph, CliError> {
    let path = a
        .graph
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("family '{family}' needs --graph")))?;
    Ok(Graph::read_file(path)?)
}

pub fn build(a: &FamilyArgs) -> Result<Strategy, CliError> {
    let family = a
        .family
        .as_deref()
        .ok_or_else(|| CliError::Usage("give --family or --strategy".into()))?;
    let theta = || need(a.theta, "theta", family).map(snap_theta);
    let s = match family {
        "bell" => bell_strategy(),
        "mes" => mes_strategy(need(a.d, "d", family)?)?,
        "ghz-two-setting" => ghz_two_setting(need(a.n, "n", family)?)?,
        "ghz-optimal" => ghz_optimal(need(a.n, "n", family)?)?,
        "stabilizer" => stabilizer_strategy(&graph(a, family)?)?,
        "coloring" => {
            let g = graph(a, family)?;
            let col = match &a.coloring {
                Some(path) => Coloring::read_file(path, g.n())?,
                None => greedy_coloring(&g),
            };
            coloring_strategy(&g, &col)?
        }
        "local-qubit" => two_qubit_local_optimal(theta()?)?,
        "oneway-qubit" => one_way_qubit(theta()?)?,
        "twoway-qubit" => two_way_qubit(theta()?)?,
        "manyround-qubit" => many_round_qubit(theta()?)?,
        "oneway-qudit" => one_way_qudit(&schmidt(a, family)?)?,
        "twoway-qudit" => two_way_qudit(&schmidt(a, family)?)?,
        "w-locc" => w_locc(need(a.n, "n", family)?)?,
        "w-local" => w_local(need(a.n, "n", family)?)?,
        "dicke-locc" => dicke_locc(need(a.n, "n", family)?, need(a.k, "k", family)?)?,
        "homogeneous" => {
            let spec = a
                .state
                .as_deref()
                .ok_or_else(|| CliError::Usage("family 'homogeneous' needs --state".into()))?;
            homogeneous_strategy(&from_spec(spec)?, need(a.lambda, "lambda", family)?)?
        }
        other => return Err(CliError::Usage(format!("unknown family '{other}'"))),
    };
    Ok(s)
}

/// The family at one point of a sweep.
pub fn at_theta(family: &str, theta: f64) -> Result<Strategy, CliError> {
    build(&FamilyArgs {
        family: Some(family.to_string()),
        theta: Some(theta),
        ..Default::default()
    })
}

pub fn at_n(family: &str, n: usize) -> Result<Strategy, CliError> {
    let mut a = FamilyArgs {
        family: Some(family.to_string()),
        ..Default::default()
    };
    if family == "mes" {
        a.d = Some(n);
    } else {
        a.n = Some(n);
    }
    build(&a)
}
