use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nbound::bounds::{evaluate_potential, BoundsReport};
use nbound::counter::{count_states, EffectivePotential};
use nbound::harness::{
    crossover_check, cubic_coefficient, parse_potential_spec, read_report, run_sweep, Spacing, SweepConfig,
};
use nbound::susy::{check_rung, verify_ladder};
use nbound::{census, CounterConfig, Error, Family};
use serde_json::{json, Value};

/// Bound-state counts, analytic limits and SUSY checks for central potentials.
///
/// Potentials are given as `family:g=..,R=..` (families: yukawa, hulthen,
/// squarewell, exponential; `g2=..` sets g²) or `table:PATH`.
#[derive(Parser)]
#[command(name = "nbound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shape flags: monotonicity, sign and (rV)'' <= 0.
    Classify { spec: String },
    /// Number of bound states at one angular momentum.
    Count {
        spec: String,
        #[arg(long, default_value_t = 0)]
        l: u32,
    },
    /// Bound states at every angular momentum.
    Census { spec: String },
    /// Every analytic limit, with applicability.
    Bounds {
        spec: String,
        /// Print a single bound; exits with 3 if it does not apply.
        #[arg(long)]
        only: Option<String>,
    },
    /// SUSY partner checks at one angular momentum, plus the ladder.
    Susy {
        spec: String,
        #[arg(long)]
        l: u32,
    },
    /// Parameter sweep; flags override values from --config.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long = "g-min")]
        g_min: Option<f64>,
        #[arg(long = "g-max")]
        g_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long = "R")]
        range: Option<f64>,
        /// Geometric spacing in g.
        #[arg(long)]
        log: bool,
        /// Run the (costly) SUSY verification at every point.
        #[arg(long)]
        susy: bool,
        /// Skip the exact census.
        #[arg(long = "no-census")]
        no_census: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarise a sweep written with --out.
    Report {
        #[arg(long = "in")]
        dir: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Numerical(String),
    Inapplicable(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else if e.is_inapplicable() {
            Failure::Inapplicable(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out).expect("JSON output"));
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Inapplicable(msg)) => {
            eprintln!("inapplicable: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cmd: Command) -> Result<Value, Failure> {
    match cmd {
        Command::Classify { spec } => {
            let pot = parse_potential_spec(&spec)?;
            Ok(json!(pot.classify()?))
        }
        Command::Count { spec, l } => {
            let pot = parse_potential_spec(&spec)?;
            let sc = count_states(&EffectivePotential::centrifugal(&pot, l))?;
            Ok(json!({ "l": l, "count": sc.count, "threshold_sensitive": sc.threshold_sensitive }))
        }
        Command::Census { spec } => Ok(json!(census(&parse_potential_spec(&spec)?)?)),
        Command::Bounds { spec, only } => {
            let pot = parse_potential_spec(&spec)?;
            let (fx, rep) = evaluate_potential(&pot)?;
            match only {
                None => Ok(json!({ "functionals": fx, "bounds": rep })),
                Some(name) => single_bound(&rep, &name),
            }
        }
        Command::Susy { spec, l } => {
            let pot = parse_potential_spec(&spec)?;
            let rung = check_rung(&pot, l, &CounterConfig::default())?;
            let ladder = match verify_ladder(&pot) {
                Ok(rep) => json!(rep),
                Err(e) if e.is_inapplicable() => json!({ "inapplicable": e.to_string() }),
                Err(e) => return Err(e.into()),
            };
            Ok(json!({ "passed": rung.passed(), "rung": rung, "ladder": ladder }))
        }
        Command::Sweep {
            config,
            family,
            g_min,
            g_max,
            steps,
            range,
            log,
            susy,
            no_census,
            out,
        } => {
            let mut cfg = match &config {
                Some(path) => SweepConfig::from_file(path)?,
                None => SweepConfig::default(),
            };
            if let Some(f) = family {
                cfg.family = Family::parse(&f).ok_or_else(|| Failure::Usage(format!("unknown family {f:?}")))?;
            }
            if g_min.is_some() || g_max.is_some() || steps.is_some() {
                cfg.points = None;
            }
            cfg.g_min = g_min.unwrap_or(cfg.g_min);
            cfg.g_max = g_max.unwrap_or(cfg.g_max);
            cfg.steps = steps.unwrap_or(cfg.steps);
            cfg.range = range.unwrap_or(cfg.range);
            if log {
                cfg.spacing = Spacing::Log;
            }
            cfg.susy |= susy;
            cfg.census &= !no_census;
            if out.is_some() {
                cfg.output_dir = out;
            }
            let rep = run_sweep(&cfg)?;
            let failed = rep.rows.iter().filter(|r| r.error.is_some()).count();
            let unsound = rep.rows.iter().filter(|r| !r.violations.is_empty()).count();
            Ok(json!({
                "rows": rep.rows.len(),
                "failed_rows": failed,
                "unsound_rows": unsound,
                "output_dir": cfg.output_dir,
            }))
        }
        Command::Report { dir } => {
            let rep = read_report(&dir)?;
            let coefficients: serde_json::Map<String, Value> =
                ["total_upper", "neat_total", "drastic_total", "lieb_total", "asymptotic_total"]
                    .into_iter()
                    .filter_map(|b| cubic_coefficient(&rep.rows, b).ok().map(|c| (b.to_string(), json!(c))))
                    .collect();
            let crossover = crossover_check(&rep.rows).ok();
            Ok(json!({
                "family": rep.config.family,
                "rows": rep.rows.len(),
                "failed_rows": rep.rows.iter().filter(|r| r.error.is_some()).count(),
                "unsound_rows": rep.rows.iter().filter(|r| !r.violations.is_empty()).count(),
                "cubic_coefficients": coefficients,
                "crossover": crossover,
            }))
        }
    }
}

fn single_bound(rep: &BoundsReport, name: &str) -> Result<Value, Failure> {
    let zero = rep.at(0);
    let gated = |g: &nbound::Gated<f64>| g.get().ok_or_else(|| Failure::Inapplicable(g.reason().unwrap_or_default().to_string()));
    let bound = |g: &nbound::Gated<nbound::bounds::Bound>| {
        g.get().map(|b| json!(b)).ok_or_else(|| Failure::Inapplicable(g.reason().unwrap_or_default().to_string()))
    };
    let value = match name {
        "bargmann_0" => json!(zero.map(|b| b.bargmann)),
        "cms_0" => json!(gated(&zero.ok_or_else(no_l0)?.cms_sqrt)?),
        "lower_0" => json!(gated(&zero.ok_or_else(no_l0)?.lower_limit)?),
        "n0_upper" => bound(&rep.n0_upper)?,
        "l_plus" => json!(rep.l_plus.to_string()),
        "l_plusplus" => match &rep.l_plusplus {
            nbound::Gated::Applicable(l) => json!(l.to_string()),
            nbound::Gated::Inapplicable(why) => return Err(Failure::Inapplicable(why.clone())),
        },
        "total_upper" => bound(&rep.total_upper)?,
        "neat_total" => bound(&rep.neat_total)?,
        "drastic_total" => bound(&rep.drastic_total)?,
        "lieb_total" => json!(rep.lieb_total),
        "asymptotic_total" => json!(rep.asymptotic_total),
        other => return Err(Failure::Usage(format!("unknown bound {other:?}"))),
    };
    Ok(json!({ name: value }))
}

fn no_l0() -> Failure {
    Failure::Inapplicable("no per-l bounds".into())
}
