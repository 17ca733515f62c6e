//! Command-line front end: solve built-in or user problems, print solution
//! tables, error grids, truncation sweeps, and residual diagnostics.
//!
//! Exit codes: 0 success, 2 schema/validation error, 3 method inapplicable
//! for the requested order, 4 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lrps_core::engine::{self, Outcome};
use lrps_core::expr::{parse_rat, Rat};
use lrps_core::fpe::{self, ExampleId};
use lrps_core::report::{
    emit, run_order_sweep, run_residual_check, run_table, Column, Format, ProblemFamily,
    ReportError, ResidualStatus, TableSpec,
};
use lrps_core::ClosedForm;
use num::One;

#[derive(Parser)]
#[command(
    name = "lrps",
    about = "Series solver for multi-dimensional time-fractional Fokker-Planck equations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem and print the series coefficients
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Output format: pretty or json
        #[arg(long, default_value = "pretty")]
        format: String,
    },
    /// Evaluate the solution on a grid, with error columns against the
    /// closed-form reference when one is available
    Table {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Spatial points: coordinates comma-separated, points separated by
        /// semicolons (e.g. "0.5,0.5;1,1"); default 0.5 in every coordinate
        #[arg(long)]
        points: Option<String>,
        /// Times, comma-separated and nondecreasing
        #[arg(long, default_value = "0.15,0.3,0.45,0.6,0.75,0.9")]
        times: String,
        /// Columns: any of value, exact, abs_error, rel_error
        #[arg(long)]
        columns: Option<String>,
        /// Output format: csv, json, or pretty
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Compare absolute errors across truncation depths
    OrderSweep {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        points: Option<String>,
        #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5")]
        times: String,
        /// Truncation depths, comma-separated
        #[arg(long, default_value = "4,6,8")]
        orders: String,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Verify that the truncation satisfies the equation through the
    /// resolved order, structurally and numerically
    ResidualCheck {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Fractional orders to check, comma-separated rationals
        #[arg(long, default_value = "1/2,3/4,1")]
        gammas: String,
    },
    /// List the built-in problems
    Examples,
}

#[derive(Args)]
struct ProblemArgs {
    /// Built-in problem id: 1, 2, 4, 5, 6, 7, 8, s6a, or s6b
    #[arg(long, conflicts_with = "problem")]
    example: Option<String>,
    /// Path to a problem file (JSON)
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Fractional order gamma as an exact rational, e.g. "1/2" or "0.75"
    #[arg(long)]
    gamma: Option<String>,
    /// Truncation depth K (default 8)
    #[arg(long)]
    order: Option<usize>,
}

enum CliError {
    Validation(String),
    Inapplicable(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Inapplicable(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Inapplicable(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<fpe::ProblemError> for CliError {
    fn from(e: fpe::ProblemError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<engine::SolveError> for CliError {
    fn from(e: engine::SolveError) -> Self {
        match &e {
            engine::SolveError::Inapplicable { .. } => CliError::Inapplicable(e.to_string()),
            engine::SolveError::Problem(_) => CliError::Validation(e.to_string()),
            engine::SolveError::Series(_) => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match &e {
            ReportError::Spec(_) | ReportError::ExactUnavailable | ReportError::Problem(_) => {
                CliError::Validation(e.to_string())
            }
            ReportError::Solve(inner) if inner.inapplicable_step().is_some() => {
                CliError::Inapplicable(e.to_string())
            }
            ReportError::Solve(_) => CliError::Validation(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

fn parse_gamma(s: &str) -> Result<Rat, CliError> {
    parse_rat(s).map_err(CliError::Validation)
}

impl ProblemArgs {
    fn family(&self) -> Result<(ProblemFamily, Rat), CliError> {
        let order = self.order.unwrap_or(8);
        if order < 1 {
            return Err(CliError::Validation("order must be >= 1".into()));
        }
        match (&self.example, &self.problem) {
            (Some(id), None) => {
                let id = ExampleId::parse(id)?;
                let gamma = match &self.gamma {
                    Some(g) => parse_gamma(g)?,
                    None => Rat::one(),
                };
                Ok((ProblemFamily::Builtin { id, order }, gamma))
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Validation(format!("cannot read {}: {e}", path.display()))
                })?;
                let mut p = fpe::parse_problem(&text)?;
                if let Some(o) = self.order {
                    p = p.with_order(o);
                }
                let gamma = match &self.gamma {
                    Some(g) => parse_gamma(g)?,
                    None => p.gamma.clone(),
                };
                Ok((ProblemFamily::Fixed(p), gamma))
            }
            _ => Err(CliError::Validation(
                "exactly one of --example or --problem is required".into(),
            )),
        }
    }
}

fn parse_points(s: Option<&str>, dimension: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let Some(s) = s else {
        return Ok(vec![vec![0.5; dimension]]);
    };
    s.split(';')
        .map(|point| {
            point
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::Validation(format!("bad coordinate `{c}`: {e}")))
                })
                .collect()
        })
        .collect()
}

fn parse_times(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Validation(format!("bad time `{t}`: {e}")))
        })
        .collect()
}

fn parse_columns(s: Option<&str>, has_exact: bool) -> Result<Vec<Column>, CliError> {
    match s {
        Some(s) => s
            .split(',')
            .map(|c| Column::parse(c.trim()).map_err(CliError::from))
            .collect(),
        None => Ok(if has_exact {
            vec![
                Column::Value,
                Column::Exact,
                Column::AbsError,
                Column::RelError,
            ]
        } else {
            vec![Column::Value]
        }),
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve { problem, format } => {
            let (family, gamma) = problem.family()?;
            let p = family.at_gamma(&gamma)?;
            let (sol, report) = engine::solve(&p)?;
            match format.as_str() {
                "pretty" => {
                    println!(
                        "dimension {}, gamma = {}, order = {}",
                        p.dimension,
                        p.gamma,
                        sol.order()
                    );
                    for (k, c) in sol.coefficients.iter().enumerate() {
                        println!("p[{k}] = {c}");
                    }
                    match report.outcome {
                        Outcome::Completed => println!("outcome: completed"),
                        Outcome::EarlyTerminated { from_k } => println!(
                            "outcome: terminated early (coefficients vanish from k = {from_k})"
                        ),
                    }
                    match &sol.closed_form {
                        Some(ClosedForm::MittagLeffler { coefficient, ratio }) => {
                            println!("closed form: ({coefficient}) * E_gamma({ratio} * t^gamma)")
                        }
                        Some(ClosedForm::Polynomial) => {
                            println!("closed form: terminating series")
                        }
                        None => {}
                    }
                    for w in &sol.warnings {
                        eprintln!("warning: {w}");
                    }
                }
                "json" => {
                    let closed = sol.closed_form.as_ref().map(|cf| match cf {
                        ClosedForm::MittagLeffler { coefficient, ratio } => {
                            serde_json::json!({
                                "kind": "mittag_leffler",
                                "coefficient": coefficient.to_string(),
                                "ratio": ratio.to_string(),
                            })
                        }
                        ClosedForm::Polynomial => serde_json::json!({"kind": "polynomial"}),
                    });
                    let doc = serde_json::json!({
                        "dimension": p.dimension,
                        "gamma": p.gamma.to_string(),
                        "order": sol.order(),
                        "coefficients": sol
                            .coefficients
                            .iter()
                            .map(|c| c.to_string())
                            .collect::<Vec<_>>(),
                        "outcome": match report.outcome {
                            Outcome::Completed => "completed".to_string(),
                            Outcome::EarlyTerminated { from_k } =>
                                format!("early_terminated_from_{from_k}"),
                        },
                        "closed_form": closed,
                        "warnings": sol.warnings,
                    });
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&doc).expect("serializes")
                    );
                }
                other => {
                    return Err(CliError::Validation(format!(
                        "unknown format `{other}` (expected pretty or json)"
                    )))
                }
            }
            Ok(())
        }
        Command::Table {
            problem,
            points,
            times,
            columns,
            format,
        } => {
            let (family, gamma) = problem.family()?;
            let exact = family.exact();
            let spec = TableSpec {
                points: parse_points(points.as_deref(), family.dimension())?,
                times: parse_times(&times)?,
                gammas: vec![gamma],
                columns: parse_columns(columns.as_deref(), exact.is_some())?,
            };
            let table = run_table(&family, exact.as_ref(), &spec)?;
            print!("{}", emit(&table, Format::parse(&format)?));
            Ok(())
        }
        Command::OrderSweep {
            problem,
            points,
            times,
            orders,
            format,
        } => {
            let (family, gamma) = problem.family()?;
            let exact = family.exact();
            let orders: Vec<usize> = orders
                .split(',')
                .map(|o| {
                    o.trim()
                        .parse::<usize>()
                        .map_err(|e| CliError::Validation(format!("bad order `{o}`: {e}")))
                })
                .collect::<Result<_, _>>()?;
            let spec = TableSpec {
                points: parse_points(points.as_deref(), family.dimension())?,
                times: parse_times(&times)?,
                gammas: vec![gamma],
                columns: vec![Column::AbsError],
            };
            let table = run_order_sweep(&family, exact.as_ref(), &spec, &orders)?;
            print!("{}", emit(&table, Format::parse(&format)?));
            Ok(())
        }
        Command::ResidualCheck { problem, gammas } => {
            let (family, _) = problem.family()?;
            let gammas: Vec<Rat> = gammas
                .split(',')
                .map(|g| parse_gamma(g.trim()))
                .collect::<Result<_, _>>()?;
            let entries = run_residual_check(&family, &gammas)?;
            let mut inapplicable = false;
            let mut nonzero = false;
            for entry in &entries {
                match &entry.status {
                    ResidualStatus::StructuralZero => {
                        let note = if entry.early_terminated {
                            " (terminated early)"
                        } else {
                            ""
                        };
                        println!("gamma {}: residual structurally zero{note}", entry.gamma);
                    }
                    ResidualStatus::NumericallyZero => println!(
                        "gamma {}: residual numerically zero (structural leftovers)",
                        entry.gamma
                    ),
                    ResidualStatus::NonZero(detail) => {
                        nonzero = true;
                        println!("gamma {}: RESIDUAL NONZERO: {detail}", entry.gamma);
                    }
                    ResidualStatus::Inapplicable { k, detail } => {
                        inapplicable = true;
                        println!("gamma {}: inapplicable at step {k}: {detail}", entry.gamma);
                    }
                }
                for (point, tau, defect) in &entry.samples {
                    println!("  |residual({point:?}, {tau})| = {defect:.3e}");
                }
            }
            if inapplicable {
                return Err(CliError::Inapplicable(
                    "one or more orders hit the divergence window".into(),
                ));
            }
            if nonzero {
                return Err(CliError::Numeric("nonzero residual".into()));
            }
            Ok(())
        }
        Command::Examples => {
            for id in ExampleId::ALL {
                let p = fpe::builtin_example(id);
                println!(
                    "{:>3}  {}-d  {}",
                    id.as_str(),
                    p.dimension,
                    id.description()
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
