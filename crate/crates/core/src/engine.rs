//! The solver: assemble the k-th truncated residual function in the
//! transform domain, apply the limit condition, and extract the series
//! coefficients recursively.
//!
//! With `V_k = sum_{j<=k} p_j / s^{j*gamma+1}` and the transformed equation
//! `V = phi/s + s^-gamma L{FP[v]} + s^-gamma L{g}`, the k-th residual is
//!
//! ```text
//! LR_k = V_k - phi/s - s^-gamma L{ FP[ inverse(V_{k-1}) ] } - s^-gamma L{g}
//! ```
//!
//! The unknown p_k is never materialized: after the 1/s^gamma shift its unit
//! coefficient is the only contribution at exponent k*gamma+1, so the limit
//! condition reads p_k = -(surviving sum of the assembly above).

use num::One;
use thiserror::Error;

use crate::expr::{rat_to_f64, Expr, PoleAtPoint, Rat};
use crate::fpe::{apply_fp_operator, FpeProblem, ProblemError};
use crate::series::{p4_extract, LaplaceSeries, SeriesError, TimeSeries};
use crate::special::gamma_fn;

#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("method inapplicable at step k = {k}: the entry at s-exponent {exponent} decays slower than s^-{target} and its coefficient {coefficient} is nonzero; the limit diverges for gamma in {gamma_range}")]
    Inapplicable {
        k: usize,
        exponent: Rat,
        target: Rat,
        coefficient: String,
        gamma_range: String,
    },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

impl SolveError {
    pub fn inapplicable_step(&self) -> Option<usize> {
        match self {
            SolveError::Inapplicable { k, .. } => Some(*k),
            _ => None,
        }
    }
}

/// Per-step trace record.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub k: usize,
    /// Sum of entries surviving the limit at exponent k*gamma+1 (p_k is its
    /// negation).
    pub surviving: Expr,
    pub solved: Expr,
    /// Exponent slots below the target where contributions cancelled
    /// structurally during assembly.
    pub cancelled_entries: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    /// Remaining coefficients were proven zero after two consecutive
    /// structurally zero steps (linear, control-free problems only).
    EarlyTerminated {
        from_k: usize,
    },
}

#[derive(Debug, Clone)]
pub struct EngineReport {
    pub steps: Vec<StepRecord>,
    pub outcome: Outcome,
}

/// Detected closed form of the coefficient family (a certificate about the
/// computed prefix only).
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    /// p_k = coefficient * ratio^k for all computed k: the solution is
    /// coefficient * E_gamma(ratio * t^gamma).
    MittagLeffler { coefficient: Expr, ratio: Rat },
    /// p_k = 0 for all k >= 2: the series terminates.
    Polynomial,
}

/// A solved problem: the coefficient list p_0..p_K plus diagnostics.
#[derive(Debug, Clone)]
pub struct FpsSolution {
    pub problem: FpeProblem,
    pub coefficients: Vec<Expr>,
    pub closed_form: Option<ClosedForm>,
    pub terminated_early: bool,
    pub warnings: Vec<String>,
}

impl FpsSolution {
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn gamma(&self) -> &Rat {
        &self.problem.gamma
    }

    /// The exponent grid k*gamma, k = 0..K.
    pub fn grid(&self) -> Vec<Rat> {
        (0..self.coefficients.len())
            .map(|k| Rat::from_integer(k.into()) * self.gamma())
            .collect()
    }

    /// The truncated solution as a raw-coefficient time series:
    /// entry p_j / Gamma(j*gamma+1) at exponent j*gamma.
    pub fn time_series(&self) -> TimeSeries {
        truncation_series(&self.problem, &self.coefficients)
    }
}

fn truncation_series(problem: &FpeProblem, coeffs: &[Expr]) -> TimeSeries {
    let g = &problem.gamma;
    let mut nu = TimeSeries::new(problem.dimension, g.clone());
    for (j, p) in coeffs.iter().enumerate() {
        if p.is_zero_structural() {
            continue;
        }
        let jg = Rat::from_integer(j.into()) * g;
        let tok = &jg + Rat::one();
        nu.insert(jg, p.mul_gamma(&tok, -1));
    }
    nu
}

/// Runs the recursion and returns the solved coefficients with a per-step
/// trace.
pub fn solve(problem: &FpeProblem) -> Result<(FpsSolution, EngineReport), SolveError> {
    problem.validate()?;
    let g = &problem.gamma;
    let d = problem.dimension;
    let capital_k = problem.order;
    let linear = problem.is_linear();
    let control_free = problem.control.is_empty();

    // s^-gamma L{g}, fixed across steps
    let control_ls = problem.control.to_series(d, g).laplace().shift(g);
    let phi = &problem.initial;

    let mut coefficients = vec![phi.clone()];
    let mut steps = Vec::new();
    let mut warnings = Vec::new();
    let mut outcome = Outcome::Completed;

    for k in 1..=capital_k {
        let nu = truncation_series(problem, &coefficients);
        let cutoff = Rat::from_integer((k - 1).into()) * g;
        let image = apply_fp_operator(&nu, problem, &cutoff);

        // assemble the residual without the unknown p_k, tracking how many
        // populated slots cancel structurally
        let mut contributions: std::collections::BTreeSet<Rat> = std::collections::BTreeSet::new();
        let mut lrf = LaplaceSeries::new(d, g.clone());
        let absorb = |lrf: &mut LaplaceSeries,
                      contributions: &mut std::collections::BTreeSet<Rat>,
                      part: LaplaceSeries,
                      negate: bool| {
            for (e, c) in part.iter() {
                contributions.insert(e.clone());
                lrf.insert(e.clone(), if negate { c.neg() } else { c.clone() });
            }
        };
        absorb(&mut lrf, &mut contributions, nu.laplace(), false);
        let mut phi_ls = LaplaceSeries::new(d, g.clone());
        phi_ls.insert(Rat::one(), phi.clone());
        absorb(&mut lrf, &mut contributions, phi_ls, true);
        absorb(&mut lrf, &mut contributions, image.laplace().shift(g), true);
        absorb(&mut lrf, &mut contributions, control_ls.clone(), true);
        let cancelled = contributions
            .iter()
            .filter(|e| lrf.get(e).is_none())
            .count();

        let out = p4_extract(&lrf, k).map_err(|err| {
            // the divergence window: gamma values for which the offending
            // entry outruns s^-(k*gamma+1), assuming its exponent persists
            let lo = (&err.exponent - Rat::one()) / Rat::from_integer(k.into());
            SolveError::Inapplicable {
                k,
                exponent: err.exponent.clone(),
                target: err.target.clone(),
                coefficient: err.coefficient.to_string(),
                gamma_range: format!("({lo}, 1]"),
            }
        })?;
        warnings.extend(out.warnings.iter().cloned());
        steps.push(StepRecord {
            k,
            surviving: out.surviving.clone(),
            solved: out.solved.clone(),
            cancelled_entries: cancelled,
            warnings: out.warnings,
        });
        coefficients.push(out.solved);

        // two consecutive structurally vanishing coefficients propagate for
        // linear control-free problems, so the tail is certified zero
        if linear
            && control_free
            && k >= 2
            && coefficients[k].is_zero_structural()
            && coefficients[k - 1].is_zero_structural()
        {
            if k < capital_k {
                coefficients.resize(capital_k + 1, Expr::zero());
            }
            outcome = Outcome::EarlyTerminated { from_k: k - 1 };
            break;
        }
    }

    let mut solution = FpsSolution {
        problem: problem.clone(),
        coefficients,
        closed_form: None,
        terminated_early: matches!(outcome, Outcome::EarlyTerminated { .. }),
        warnings,
    };
    solution.closed_form = detect_closed_form(&solution);
    Ok((solution, EngineReport { steps, outcome }))
}

/// Looks for a geometric coefficient family p_k = c * r^k (a Mittag-Leffler
/// envelope) or a terminating one. Requires at least order 4.
pub fn detect_closed_form(sol: &FpsSolution) -> Option<ClosedForm> {
    let p = &sol.coefficients;
    if p.len() < 5 {
        return None;
    }
    if p[2..].iter().all(Expr::is_zero_structural) {
        return Some(ClosedForm::Polynomial);
    }
    let c = &p[0];
    let first = c.terms().first()?;
    let next = p[1].terms().first()?;
    let ratio = &next.coeff / &first.coeff;
    let mut power = Rat::one();
    for pk in p.iter() {
        if *pk != c.scale(&power) {
            return None;
        }
        power *= &ratio;
    }
    Some(ClosedForm::MittagLeffler {
        coefficient: c.clone(),
        ratio,
    })
}

/// Value of the truncated solution at (point, tau), keeping only terms with
/// index <= k_max.
pub fn evaluate_truncated(
    sol: &FpsSolution,
    point: &[f64],
    tau: f64,
    k_max: usize,
) -> Result<f64, PoleAtPoint> {
    let g = rat_to_f64(sol.gamma());
    let mut sum = 0.0;
    for (k, p) in sol.coefficients.iter().enumerate().take(k_max + 1) {
        if p.is_zero_structural() {
            continue;
        }
        let e = g * k as f64;
        let tp = if tau == 0.0 {
            if k == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            tau.powf(e)
        };
        // Gamma(1) = 1 exactly, so the k = 0 term is the initial datum
        let gamma_val = if k == 0 {
            1.0
        } else {
            gamma_fn(e + 1.0).expect("positive argument")
        };
        sum += p.eval(point)? * tp / gamma_val;
    }
    Ok(sum)
}

/// Value of the full truncated solution at (point, tau).
pub fn evaluate(sol: &FpsSolution, point: &[f64], tau: f64) -> Result<f64, PoleAtPoint> {
    evaluate_truncated(sol, point, tau, sol.order())
}

/// The three pieces of the time-domain residual, each truncated to the
/// resolved order (K-1)*gamma.
#[derive(Debug, Clone)]
pub struct ResidualParts {
    pub caputo: TimeSeries,
    pub operator: TimeSeries,
    pub control: TimeSeries,
}

impl ResidualParts {
    /// caputo - operator - control; structurally zero when the truncation
    /// satisfies the equation through the resolved order.
    pub fn combined(&self) -> TimeSeries {
        self.caputo.sub(&self.operator).sub(&self.control)
    }

    /// Evaluates the three parts separately in floating point and returns
    /// the defect; an independent check of the token-resolution path.
    pub fn eval_defect(&self, point: &[f64], tau: f64) -> Result<f64, PoleAtPoint> {
        Ok(self.caputo.eval(point, tau)?
            - self.operator.eval(point, tau)?
            - self.control.eval(point, tau)?)
    }
}

/// Builds the residual parts for a solved problem.
pub fn residual_parts(sol: &FpsSolution) -> Result<ResidualParts, SeriesError> {
    let problem = &sol.problem;
    let g = &problem.gamma;
    let cutoff = Rat::from_integer((sol.order() as i64 - 1).into()) * g;
    let nu = sol.time_series();
    let caputo = nu.caputo()?.truncate(&cutoff);
    let operator = apply_fp_operator(&nu, problem, &cutoff);
    let control = problem
        .control
        .to_series(problem.dimension, g)
        .truncate(&cutoff);
    Ok(ResidualParts {
        caputo,
        operator,
        control,
    })
}
