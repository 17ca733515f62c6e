//! Table generation and serialization: solution values, error grids against
//! the closed-form references, truncation-order sweeps, and residual
//! diagnostics.

use std::fmt::Write as _;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::engine::{self, FpsSolution, SolveError};
use crate::expr::Rat;
use crate::fpe::{builtin_exact, builtin_example_with, ExampleId, FpeProblem, ProblemError};
use crate::special::{exact_reference, ExactKind, SpecialFnError};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("table spec invalid: {0}")]
    Spec(String),
    #[error("exact columns requested but no closed-form reference is available")]
    ExactUnavailable,
    #[error("relative error undefined: exact value is zero at point {point:?}, tau = {tau}")]
    DivisionByZeroExact { point: Vec<f64>, tau: f64 },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Special(#[from] SpecialFnError),
    #[error("evaluation failed: {0}")]
    Eval(#[from] crate::expr::PoleAtPoint),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Requested table columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Value,
    Exact,
    AbsError,
    RelError,
}

impl Column {
    pub fn parse(s: &str) -> Result<Column, ReportError> {
        match s {
            "value" => Ok(Column::Value),
            "exact" => Ok(Column::Exact),
            "abs_error" => Ok(Column::AbsError),
            "rel_error" => Ok(Column::RelError),
            other => Err(ReportError::Spec(format!(
                "unknown column `{other}` (expected value, exact, abs_error, rel_error)"
            ))),
        }
    }

    fn header(&self) -> &'static str {
        match self {
            Column::Value => "value",
            Column::Exact => "exact",
            Column::AbsError => "abs_error",
            Column::RelError => "rel_error",
        }
    }

    fn needs_exact(&self) -> bool {
        !matches!(self, Column::Value)
    }
}

/// Evaluation grid: the cross product of gammas, points, and times.
#[derive(Debug, Clone)]
pub struct TableSpec {
    pub points: Vec<Vec<f64>>,
    pub times: Vec<f64>,
    pub gammas: Vec<Rat>,
    pub columns: Vec<Column>,
}

impl TableSpec {
    fn validate(&self, dimension: usize) -> Result<(), ReportError> {
        if self.points.is_empty() || self.times.is_empty() || self.gammas.is_empty() {
            return Err(ReportError::Spec(
                "points, times, and gammas must be nonempty".into(),
            ));
        }
        for p in &self.points {
            if p.len() != dimension {
                return Err(ReportError::Spec(format!(
                    "point {p:?} has {} coordinates, problem dimension is {dimension}",
                    p.len()
                )));
            }
        }
        let mut prev = f64::NEG_INFINITY;
        for &t in &self.times {
            if t < 0.0 {
                return Err(ReportError::Spec(format!("negative time {t}")));
            }
            if t < prev {
                return Err(ReportError::Spec("times must be nondecreasing".into()));
            }
            prev = t;
        }
        for g in &self.gammas {
            if g.is_negative() || g.is_zero() || g > &Rat::one() {
                return Err(ReportError::Spec(format!("gamma {g} outside (0, 1]")));
            }
        }
        if self.columns.is_empty() {
            return Err(ReportError::Spec("no columns requested".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

/// A problem plus the way it varies with gamma: built-ins are regenerated
/// per gamma (their control terms depend on it), files keep their data.
#[derive(Debug, Clone)]
pub enum ProblemFamily {
    Builtin { id: ExampleId, order: usize },
    Fixed(FpeProblem),
}

impl ProblemFamily {
    pub fn at_gamma(&self, gamma: &Rat) -> Result<FpeProblem, ProblemError> {
        match self {
            ProblemFamily::Builtin { id, order } => {
                builtin_example_with(*id, gamma.clone(), *order)
            }
            ProblemFamily::Fixed(p) => Ok(p.with_gamma(gamma.clone())),
        }
    }

    pub fn default_gamma(&self) -> Rat {
        match self {
            ProblemFamily::Builtin { .. } => Rat::one(),
            ProblemFamily::Fixed(p) => p.gamma.clone(),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ProblemFamily::Builtin { id, .. } => {
                builtin_example_with(*id, Rat::one(), 1)
                    .expect("built-ins are valid")
                    .dimension
            }
            ProblemFamily::Fixed(p) => p.dimension,
        }
    }

    pub fn exact(&self) -> Option<ExactKind> {
        match self {
            ProblemFamily::Builtin { id, .. } => builtin_exact(*id),
            ProblemFamily::Fixed(_) => None,
        }
    }
}

fn point_headers(dimension: usize) -> Vec<String> {
    (0..dimension).map(|i| format!("z{}", i + 1)).collect()
}

fn solve_family(family: &ProblemFamily, gamma: &Rat) -> Result<FpsSolution, ReportError> {
    let problem = family.at_gamma(gamma)?;
    let (sol, _) = engine::solve(&problem)?;
    Ok(sol)
}

/// Grid of solution values and error measures against a closed-form
/// reference.
pub fn run_table(
    family: &ProblemFamily,
    exact: Option<&ExactKind>,
    spec: &TableSpec,
) -> Result<Table, ReportError> {
    let dimension = family.dimension();
    spec.validate(dimension)?;
    if exact.is_none() && spec.columns.iter().any(Column::needs_exact) {
        return Err(ReportError::ExactUnavailable);
    }
    let mut headers = vec!["gamma".to_string()];
    headers.extend(point_headers(dimension));
    headers.push("tau".to_string());
    headers.extend(spec.columns.iter().map(|c| c.header().to_string()));

    let mut rows = Vec::new();
    for gamma in &spec.gammas {
        let sol = solve_family(family, gamma)?;
        for point in &spec.points {
            for &tau in &spec.times {
                let value = engine::evaluate(&sol, point, tau)?;
                let exact_value = match exact {
                    Some(kind) => Some(exact_reference(kind, point, tau, gamma)?),
                    None => None,
                };
                let mut row = vec![Cell::Text(gamma.to_string())];
                row.extend(point.iter().map(|&c| Cell::Num(c)));
                row.push(Cell::Num(tau));
                for col in &spec.columns {
                    let cell = match col {
                        Column::Value => Cell::Num(value),
                        Column::Exact => Cell::Num(exact_value.expect("checked")),
                        Column::AbsError => {
                            Cell::Num((value - exact_value.expect("checked")).abs())
                        }
                        Column::RelError => {
                            let ex = exact_value.expect("checked");
                            if ex == 0.0 {
                                return Err(ReportError::DivisionByZeroExact {
                                    point: point.clone(),
                                    tau,
                                });
                            }
                            Cell::Num(((value - ex) / ex).abs())
                        }
                    };
                    row.push(cell);
                }
                rows.push(row);
            }
        }
    }
    Ok(Table { headers, rows })
}

/// Absolute-error columns for several truncation depths, demonstrating the
/// error decay with order.
pub fn run_order_sweep(
    family: &ProblemFamily,
    exact: Option<&ExactKind>,
    spec: &TableSpec,
    orders: &[usize],
) -> Result<Table, ReportError> {
    let dimension = family.dimension();
    spec.validate(dimension)?;
    if orders.is_empty() {
        return Err(ReportError::Spec("orders must be nonempty".into()));
    }
    let exact = exact.ok_or(ReportError::ExactUnavailable)?;
    let max_order = *orders.iter().max().expect("nonempty");

    let mut headers = vec!["gamma".to_string()];
    headers.extend(point_headers(dimension));
    headers.push("tau".to_string());
    headers.extend(orders.iter().map(|k| format!("abs_error_k{k}")));

    let mut rows = Vec::new();
    for gamma in &spec.gammas {
        let family = match family {
            ProblemFamily::Builtin { id, .. } => ProblemFamily::Builtin {
                id: *id,
                order: max_order,
            },
            ProblemFamily::Fixed(p) => ProblemFamily::Fixed(p.with_order(max_order)),
        };
        let sol = solve_family(&family, gamma)?;
        for point in &spec.points {
            for &tau in &spec.times {
                let ex = exact_reference(exact, point, tau, gamma)?;
                let mut row = vec![Cell::Text(gamma.to_string())];
                row.extend(point.iter().map(|&c| Cell::Num(c)));
                row.push(Cell::Num(tau));
                for &k in orders {
                    let v = engine::evaluate_truncated(&sol, point, tau, k)?;
                    row.push(Cell::Num((v - ex).abs()));
                }
                rows.push(row);
            }
        }
    }
    Ok(Table { headers, rows })
}

/// Per-gamma residual verdict.
#[derive(Debug, Clone)]
pub enum ResidualStatus {
    /// The truncated residual has no terms.
    StructuralZero,
    /// Terms remain but every coefficient samples below threshold.
    NumericallyZero,
    /// A genuinely nonzero residual entry (malformed problem).
    NonZero(String),
    /// The recursion aborted: the limit condition fails at step k.
    Inapplicable { k: usize, detail: String },
}

#[derive(Debug, Clone)]
pub struct ResidualEntry {
    pub gamma: Rat,
    pub status: ResidualStatus,
    /// (point, tau, |defect|) samples from evaluating the residual pieces
    /// separately in floating point.
    pub samples: Vec<(Vec<f64>, f64, f64)>,
    pub early_terminated: bool,
}

/// Deterministic (point, tau) pairs for the numeric residual samples.
pub fn residual_sample_pairs(dimension: usize) -> Vec<(Vec<f64>, f64)> {
    let taus = [0.1, 0.3, 0.5, 0.7, 0.9];
    taus.iter()
        .enumerate()
        .map(|(i, &tau)| {
            let point = (0..dimension)
                .map(|c| (25 + 11 * ((i + c) % 5)) as f64 / 100.0)
                .collect();
            (point, tau)
        })
        .collect()
}

/// Checks, for each gamma, that the truncation satisfies the equation
/// through the resolved order, both structurally and in floating point.
pub fn run_residual_check(
    family: &ProblemFamily,
    gammas: &[Rat],
) -> Result<Vec<ResidualEntry>, ReportError> {
    let mut out = Vec::new();
    for gamma in gammas {
        let problem = family.at_gamma(gamma)?;
        let (sol, report) = match engine::solve(&problem) {
            Ok(v) => v,
            Err(err) => {
                if let Some(k) = err.inapplicable_step() {
                    out.push(ResidualEntry {
                        gamma: gamma.clone(),
                        status: ResidualStatus::Inapplicable {
                            k,
                            detail: err.to_string(),
                        },
                        samples: Vec::new(),
                        early_terminated: false,
                    });
                    continue;
                }
                return Err(err.into());
            }
        };
        let parts = engine::residual_parts(&sol).map_err(SolveError::from)?;
        let combined = parts.combined();
        let status = if combined.is_empty() {
            ResidualStatus::StructuralZero
        } else {
            let mut worst = ResidualStatus::NumericallyZero;
            for (e, c) in combined.iter() {
                if c.zero_status(true) == crate::expr::ZeroStatus::NonZero {
                    worst = ResidualStatus::NonZero(format!("entry at exponent {e}: {c}"));
                    break;
                }
            }
            worst
        };
        let mut samples = Vec::new();
        for (point, tau) in residual_sample_pairs(problem.dimension) {
            let defect = parts.eval_defect(&point, tau)?.abs();
            samples.push((point, tau, defect));
        }
        out.push(ResidualEntry {
            gamma: gamma.clone(),
            status,
            samples,
            early_terminated: matches!(report.outcome, engine::Outcome::EarlyTerminated { .. }),
        });
    }
    Ok(out)
}

/// Output format for [`emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Pretty,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format, ReportError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "pretty" => Ok(Format::Pretty),
            other => Err(ReportError::Spec(format!(
                "unknown format `{other}` (expected csv, json, pretty)"
            ))),
        }
    }
}

fn fmt_num(v: f64) -> String {
    // scientific notation with 15 significant digits
    format!("{v:.14e}")
}

fn cell_string(c: &Cell) -> String {
    match c {
        Cell::Text(s) => s.clone(),
        Cell::Num(v) => fmt_num(*v),
    }
}

/// Serializes a table. CSV uses `.` decimals and >= 15 significant digits;
/// JSON mirrors the table structure; pretty is column-aligned.
pub fn emit(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::new();
            out.push_str(&table.headers.join(","));
            out.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(cell_string).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: serde_json::Map<String, serde_json::Value> = table
                        .headers
                        .iter()
                        .zip(row)
                        .map(|(h, c)| {
                            let v = match c {
                                Cell::Text(s) => serde_json::Value::String(s.clone()),
                                Cell::Num(n) => serde_json::json!(n),
                            };
                            (h.clone(), v)
                        })
                        .collect();
                    serde_json::Value::Object(obj)
                })
                .collect();
            let doc = serde_json::json!({
                "headers": table.headers,
                "rows": rows,
            });
            serde_json::to_string_pretty(&doc).expect("table serializes") + "\n"
        }
        Format::Pretty => {
            let mut widths: Vec<usize> = table.headers.iter().map(String::len).collect();
            let rendered: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|row| row.iter().map(cell_string).collect())
                .collect();
            for row in &rendered {
                for (i, c) in row.iter().enumerate() {
                    widths[i] = widths[i].max(c.len());
                }
            }
            let mut out = String::new();
            for (i, h) in table.headers.iter().enumerate() {
                let _ = write!(out, "{:>width$}  ", h, width = widths[i]);
            }
            out.push('\n');
            for row in &rendered {
                for (i, c) in row.iter().enumerate() {
                    let _ = write!(out, "{:>width$}  ", c, width = widths[i]);
                }
                out.push('\n');
            }
            out
        }
    }
}
