//! Problem model: dimension, flux structure, initial data, control term,
//! fractional order, and truncation depth, together with the built-in
//! problem library and the spatial Fokker-Planck operator applied to a
//! truncated series.
//!
//! The evolution law is
//!
//! ```text
//! D_t^gamma v = [ -sum_i d/dz_i f1_i + sum_{i,j} d^2/dz_i dz_j f2_ij ] v + g
//! ```
//!
//! where each flux f*v is decomposed as `linear(z) * v + quadratic(z) * v^2`
//! and `g(z, t) = sum_m c_m(z) t^{mu_m}` is an optional inhomogeneous
//! control term with exponents `mu_m = a*gamma + b`.

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{rat, rat_int, Expr, Rat};
use crate::parse::parse_expr;
use crate::series::{FracExponent, TimeSeries};
use crate::special::ExactKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("gamma out of range: {0} (requires 0 < gamma <= 1)")]
    GammaRange(String),
    #[error("unknown example id `{0}` (expected 1, 2, 4, 5, 6, 7, 8, s6a, or s6b)")]
    UnknownExample(String),
}

/// One flux entry `linear(z) * v + quadratic(z) * v^2`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FluxTerm {
    pub linear: Expr,
    pub quadratic: Expr,
}

impl FluxTerm {
    pub fn linear(e: Expr) -> Self {
        FluxTerm {
            linear: e,
            quadratic: Expr::zero(),
        }
    }

    pub fn quadratic(e: Expr) -> Self {
        FluxTerm {
            linear: Expr::zero(),
            quadratic: e,
        }
    }

    pub fn is_absent(&self) -> bool {
        self.linear.is_zero_structural() && self.quadratic.is_zero_structural()
    }
}

/// Inhomogeneous source `g(z, t) = sum_m coeff_m(z) * t^{a_m*gamma + b_m}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ControlTerm {
    pub terms: Vec<(Expr, FracExponent)>,
}

impl ControlTerm {
    pub fn is_empty(&self) -> bool {
        self.terms.iter().all(|(c, _)| c.is_zero_structural())
    }

    /// Materializes the control as a time series for a fixed gamma;
    /// exponents that collide in value merge here.
    pub fn to_series(&self, dimension: usize, gamma: &Rat) -> TimeSeries {
        let mut out = TimeSeries::new(dimension, gamma.clone());
        for (c, e) in &self.terms {
            out.insert_at(e, c.clone());
        }
        out
    }
}

/// A fully specified problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct FpeProblem {
    pub dimension: usize,
    pub gamma: Rat,
    pub order: usize,
    /// Drift flux terms, one per spatial direction.
    pub drift: Vec<FluxTerm>,
    /// Diffusion flux terms on the full d x d index grid; mixed entries
    /// (i,j) and (j,i) are kept distinct.
    pub diffusion: Vec<Vec<FluxTerm>>,
    pub initial: Expr,
    pub control: ControlTerm,
}

impl FpeProblem {
    pub fn validate(&self) -> Result<(), ProblemError> {
        let d = self.dimension;
        if !(1..=3).contains(&d) {
            return Err(ProblemError::Dimension(format!(
                "dimension must be 1, 2, or 3, got {d}"
            )));
        }
        if self.gamma.is_negative() || self.gamma.is_zero() || self.gamma > Rat::one() {
            return Err(ProblemError::GammaRange(self.gamma.to_string()));
        }
        if self.order < 1 {
            return Err(ProblemError::Schema("order must be >= 1".into()));
        }
        if self.drift.len() != d || self.diffusion.len() != d {
            return Err(ProblemError::Dimension(format!(
                "flux grids must have {d} entries per axis"
            )));
        }
        for row in &self.diffusion {
            if row.len() != d {
                return Err(ProblemError::Dimension(format!(
                    "diffusion grid must be {d}x{d}"
                )));
            }
        }
        let check_expr = |e: &Expr, what: &str| -> Result<(), ProblemError> {
            match e.max_var() {
                Some(v) if v >= d => Err(ProblemError::Dimension(format!(
                    "{what} references z{} but dimension is {d}",
                    v + 1
                ))),
                _ => Ok(()),
            }
        };
        check_expr(&self.initial, "initial data")?;
        for (i, f) in self.drift.iter().enumerate() {
            check_expr(&f.linear, &format!("drift[{}]", i + 1))?;
            check_expr(&f.quadratic, &format!("drift[{}]", i + 1))?;
        }
        for (i, row) in self.diffusion.iter().enumerate() {
            for (j, f) in row.iter().enumerate() {
                check_expr(&f.linear, &format!("diffusion[{},{}]", i + 1, j + 1))?;
                check_expr(&f.quadratic, &format!("diffusion[{},{}]", i + 1, j + 1))?;
            }
        }
        for (c, e) in &self.control.terms {
            check_expr(c, "control coefficient")?;
            if e.value(&self.gamma).is_negative() {
                return Err(ProblemError::Schema(format!(
                    "control exponent {}*gamma + {} is negative at gamma = {}",
                    e.a, e.b, self.gamma
                )));
            }
        }
        Ok(())
    }

    /// True when every quadratic flux coefficient is zero.
    pub fn is_linear(&self) -> bool {
        self.drift.iter().all(|f| f.quadratic.is_zero_structural())
            && self
                .diffusion
                .iter()
                .flatten()
                .all(|f| f.quadratic.is_zero_structural())
    }

    /// Same problem at a different fractional order. Control-term
    /// coefficients are kept as written.
    pub fn with_gamma(&self, gamma: Rat) -> FpeProblem {
        let mut p = self.clone();
        p.gamma = gamma;
        p
    }

    pub fn with_order(&self, order: usize) -> FpeProblem {
        let mut p = self.clone();
        p.order = order;
        p
    }
}

/// Applies the bracketed spatial operator to a truncated series:
/// `-sum_i d_i(A1_i u + B1_i u^2) + sum_{i,j} d_i d_j (A2_ij u + B2_ij u^2)`,
/// with the series square computed as a Cauchy product cut at `cutoff`.
pub fn apply_fp_operator(u: &TimeSeries, problem: &FpeProblem, cutoff: &Rat) -> TimeSeries {
    let d = problem.dimension;
    let needs_square = !problem.is_linear();
    let u2 = if needs_square {
        Some(u.product(u, cutoff))
    } else {
        None
    };
    let flux_series = |f: &FluxTerm| -> Option<TimeSeries> {
        let mut acc: Option<TimeSeries> = None;
        if !f.linear.is_zero_structural() {
            acc = Some(u.mul_expr(&f.linear));
        }
        if !f.quadratic.is_zero_structural() {
            let sq = u2.as_ref().expect("square computed").mul_expr(&f.quadratic);
            acc = Some(match acc {
                Some(a) => a.add(&sq),
                None => sq,
            });
        }
        acc
    };
    let mut out = TimeSeries::new(d, problem.gamma.clone());
    for (i, f) in problem.drift.iter().enumerate() {
        if let Some(g) = flux_series(f) {
            out = out.sub(&g.diff(i));
        }
    }
    for (i, row) in problem.diffusion.iter().enumerate() {
        for (j, f) in row.iter().enumerate() {
            if let Some(g) = flux_series(f) {
                out = out.add(&g.diff(j).diff(i));
            }
        }
    }
    out.truncate(cutoff)
}

// ---------------------------------------------------------------------------
// Built-in problem library
// ---------------------------------------------------------------------------

/// Identifiers of the built-in problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleId {
    Ex1,
    Ex2,
    Ex4,
    Ex5,
    Ex6,
    Ex7,
    Ex8,
    S6a,
    S6b,
}

impl ExampleId {
    pub const ALL: [ExampleId; 9] = [
        ExampleId::Ex1,
        ExampleId::Ex2,
        ExampleId::Ex4,
        ExampleId::Ex5,
        ExampleId::Ex6,
        ExampleId::Ex7,
        ExampleId::Ex8,
        ExampleId::S6a,
        ExampleId::S6b,
    ];

    pub fn parse(s: &str) -> Result<ExampleId, ProblemError> {
        match s {
            "1" => Ok(ExampleId::Ex1),
            "2" => Ok(ExampleId::Ex2),
            "4" => Ok(ExampleId::Ex4),
            "5" => Ok(ExampleId::Ex5),
            "6" => Ok(ExampleId::Ex6),
            "7" => Ok(ExampleId::Ex7),
            "8" => Ok(ExampleId::Ex8),
            "s6a" => Ok(ExampleId::S6a),
            "s6b" => Ok(ExampleId::S6b),
            other => Err(ProblemError::UnknownExample(other.to_string())),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ExampleId::Ex1 => "1",
            ExampleId::Ex2 => "2",
            ExampleId::Ex4 => "4",
            ExampleId::Ex5 => "5",
            ExampleId::Ex6 => "6",
            ExampleId::Ex7 => "7",
            ExampleId::Ex8 => "8",
            ExampleId::S6a => "s6a",
            ExampleId::S6b => "s6b",
        }
    }

    /// One-line description for the CLI listing.
    pub fn description(&self) -> &'static str {
        match self {
            ExampleId::Ex1 => "1-d linear, constant fluxes; solution z1 + t^g/gammafn(g+1)",
            ExampleId::Ex2 => "1-d linear, drift z1 and diffusion z1^2/2; solution z1*E_g(t^g)",
            ExampleId::Ex4 => "1-d nonlinear (v and v^2 fluxes); solution z1*E_g(t^g)",
            ExampleId::Ex5 => "2-d linear with mixed diffusion; solution z1*E_g(t^g)",
            ExampleId::Ex6 => "2-d nonlinear with 4*z1^-1 flux; solution z1^2*E_g(-t^g)",
            ExampleId::Ex7 => "3-d linear with full diffusion grid; solution z3*E_g(t^g)",
            ExampleId::Ex8 => "3-d nonlinear with 2*(z3-1)^-1 flux; solution (z3-1)^2*E_g(t^g)",
            ExampleId::S6a => {
                "1-d linear with Mittag-Leffler control term; solution (z1+2)*E_g(t^g)"
            }
            ExampleId::S6b => {
                "1-d linear with mixed-exponent control term; solvability depends on g"
            }
        }
    }
}

/// Builds a built-in problem at the given fractional order and truncation
/// depth. Control terms that depend on gamma (s6a, s6b) are regenerated for
/// the requested gamma.
pub fn builtin_example_with(
    id: ExampleId,
    gamma: Rat,
    order: usize,
) -> Result<FpeProblem, ProblemError> {
    if gamma.is_negative() || gamma.is_zero() || gamma > Rat::one() {
        return Err(ProblemError::GammaRange(gamma.to_string()));
    }
    let zero = FluxTerm::default();
    let grid = |d: usize| vec![vec![zero.clone(); d]; d];
    let p = match id {
        ExampleId::Ex1 => {
            let mut diffusion = grid(1);
            diffusion[0][0] = FluxTerm::linear(Expr::int(1));
            FpeProblem {
                dimension: 1,
                gamma,
                order,
                drift: vec![FluxTerm::linear(Expr::int(-1))],
                diffusion,
                initial: Expr::var(0),
                control: ControlTerm::default(),
            }
        }
        ExampleId::Ex2 => {
            let mut diffusion = grid(1);
            diffusion[0][0] = FluxTerm::linear(Expr::var(0).pow(2).scale(&rat(1, 2)));
            FpeProblem {
                dimension: 1,
                gamma,
                order,
                drift: vec![FluxTerm::linear(Expr::var(0))],
                diffusion,
                initial: Expr::var(0),
                control: ControlTerm::default(),
            }
        }
        ExampleId::Ex4 => {
            let mut diffusion = grid(1);
            diffusion[0][0] = FluxTerm::quadratic(Expr::var(0));
            FpeProblem {
                dimension: 1,
                gamma,
                order,
                drift: vec![FluxTerm {
                    linear: Expr::var(0).scale(&rat(-1, 2)),
                    quadratic: Expr::int(3),
                }],
                diffusion,
                initial: Expr::var(0),
                control: ControlTerm::default(),
            }
        }
        ExampleId::Ex5 => {
            let mut diffusion = grid(2);
            diffusion[0][0] = FluxTerm::linear(Expr::var(0).pow(2));
            diffusion[0][1] = FluxTerm::linear(Expr::int(1));
            diffusion[1][0] = FluxTerm::linear(Expr::int(1));
            diffusion[1][1] = FluxTerm::linear(Expr::var(1).pow(2));
            FpeProblem {
                dimension: 2,
                gamma,
                order,
                drift: vec![
                    FluxTerm::linear(Expr::var(0)),
                    FluxTerm::linear(Expr::var(1).scale(&rat_int(5))),
                ],
                diffusion,
                initial: Expr::var(0),
                control: ControlTerm::default(),
            }
        }
        ExampleId::Ex6 => {
            let mut diffusion = grid(2);
            diffusion[0][0] = FluxTerm::quadratic(Expr::int(1));
            diffusion[0][1] = FluxTerm::linear(Expr::int(1));
            diffusion[1][0] = FluxTerm::linear(Expr::int(1));
            diffusion[1][1] = FluxTerm::linear(Expr::int(1));
            FpeProblem {
                dimension: 2,
                gamma,
                order,
                drift: vec![
                    FluxTerm::quadratic(Expr::affine_pow(0, Rat::zero(), -1).scale(&rat_int(4))),
                    FluxTerm::linear(Expr::var(1)),
                ],
                diffusion,
                initial: Expr::var(0).pow(2),
                control: ControlTerm::default(),
            }
        }
        ExampleId::Ex7 => {
            let mut diffusion = grid(3);
            for f in diffusion.iter_mut().flatten() {
                *f = FluxTerm::linear(Expr::int(1));
            }
            diffusion[0][0] = FluxTerm::linear(Expr::var(0));
            diffusion[2][2] = FluxTerm::linear(Expr::var(2).pow(2).scale(&rat(3, 2)));
            FpeProblem {
                dimension: 3,
                gamma,
                order,
                drift: (0..3)
                    .map(|i| FluxTerm::linear(Expr::var(i).scale(&rat_int(2))))
                    .collect(),
                diffusion,
                initial: Expr::var(2),
                control: ControlTerm::default(),
            }
        }
        ExampleId::Ex8 => {
            let mut diffusion = grid(3);
            for f in diffusion.iter_mut().flatten() {
                *f = FluxTerm::linear(Expr::int(1));
            }
            diffusion[0][0] = FluxTerm::quadratic(Expr::int(1));
            diffusion[1][1] = FluxTerm::quadratic(Expr::int(1));
            FpeProblem {
                dimension: 3,
                gamma,
                order,
                drift: vec![
                    FluxTerm::linear(Expr::var(0).neg()),
                    FluxTerm::quadratic(Expr::int(1)),
                    FluxTerm::linear(Expr::affine_pow(2, rat_int(-1), -1).scale(&rat_int(2))),
                ],
                diffusion,
                initial: Expr::affine_pow(2, rat_int(-1), 2),
                control: ControlTerm::default(),
            }
        }
        ExampleId::S6a => {
            let mut diffusion = grid(1);
            diffusion[0][0] = FluxTerm::linear(Expr::int(1));
            // control g = E_g(t^g) expanded on the solution grid up to the
            // truncation depth; truncation error lands above the resolved
            // order
            let mut control = ControlTerm::default();
            for m in 0..=order {
                let tok = &gamma * rat_int(m as i64) + Rat::one();
                control
                    .terms
                    .push((Expr::one().mul_gamma(&tok, -1), FracExponent::grid(m)));
            }
            FpeProblem {
                dimension: 1,
                gamma,
                order,
                drift: vec![FluxTerm::linear(Expr::var(0).scale(&rat(-1, 2)))],
                diffusion,
                initial: Expr::var(0).add(&Expr::int(2)),
                control,
            }
        }
        ExampleId::S6b => {
            let mut diffusion = grid(1);
            diffusion[0][0] = FluxTerm::linear(Expr::int(1));
            let ex = Expr::exp_of(Expr::affine_pow(0, rat(-1, 2), 2));
            let sin = Expr::sin_pi(0);
            // g = gammafn(3)/gammafn(3-g) t^{2-g} sin(pi z)
            //     - t^2 exp((z-1/2)^2) (2(z-1/2) sin(pi z) + pi cos(pi z))
            //     + pi^2 t^2 sin(pi z)
            let c1 = sin
                .mul_gamma(&rat_int(3), 1)
                .mul_gamma(&(rat_int(3) - &gamma), -1);
            let bracket = Expr::affine(0, rat(-1, 2))
                .scale(&rat_int(2))
                .mul(&sin)
                .add(&Expr::pi_pow(1).mul(&Expr::cos_pi(0)));
            let c2 = Expr::pi_pow(2).mul(&sin).sub(&ex.mul(&bracket));
            let control = ControlTerm {
                terms: vec![
                    (c1, FracExponent::new(rat_int(-1), rat_int(2))),
                    (c2, FracExponent::new(Rat::zero(), rat_int(2))),
                ],
            };
            FpeProblem {
                dimension: 1,
                gamma,
                order,
                drift: vec![FluxTerm::linear(ex.neg())],
                diffusion,
                initial: Expr::zero(),
                control,
            }
        }
    };
    p.validate()?;
    Ok(p)
}

/// Built-in problem with the default truncation depth K = 8 and gamma = 1.
pub fn builtin_example(id: ExampleId) -> FpeProblem {
    builtin_example_with(id, Rat::one(), 8).expect("built-in problems are valid")
}

/// The closed-form reference solution carried by a built-in, if any.
pub fn builtin_exact(id: ExampleId) -> Option<ExactKind> {
    match id {
        ExampleId::Ex1 => Some(ExactKind::AffinePlusPower { base: Expr::var(0) }),
        ExampleId::Ex2 | ExampleId::Ex4 => Some(ExactKind::CTimesMlPlus { c: Expr::var(0) }),
        ExampleId::Ex5 => Some(ExactKind::CTimesMlPlus { c: Expr::var(0) }),
        ExampleId::Ex6 => Some(ExactKind::CTimesMlMinus {
            c: Expr::var(0).pow(2),
        }),
        ExampleId::Ex7 => Some(ExactKind::CTimesMlPlus { c: Expr::var(2) }),
        ExampleId::Ex8 => Some(ExactKind::CTimesMlPlus {
            c: Expr::affine_pow(2, rat_int(-1), 2),
        }),
        ExampleId::S6a => Some(ExactKind::MlShifted {
            c: Expr::var(0).add(&Expr::int(2)),
        }),
        ExampleId::S6b => None,
    }
}

// ---------------------------------------------------------------------------
// Problem-file schema
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDoc {
    dimension: usize,
    gamma: String,
    order: usize,
    initial: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    drift: Vec<FluxDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    diffusion: Vec<FluxDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    control: Vec<ControlDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FluxDoc {
    /// 1-based spatial index of the (first) derivative.
    i: usize,
    /// 1-based second index; present only for diffusion entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    j: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    linear: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quadratic: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ControlDoc {
    coeff: String,
    a: String,
    b: String,
}

fn parse_expr_field(s: &str, what: &str) -> Result<Expr, ProblemError> {
    parse_expr(s).map_err(|e| ProblemError::Schema(format!("{what}: {e}")))
}

fn parse_rat_field(s: &str, what: &str) -> Result<Rat, ProblemError> {
    crate::expr::parse_rat(s).map_err(|e| ProblemError::Schema(format!("{what}: {e}")))
}

/// Parses a problem file (JSON) into a validated [`FpeProblem`].
pub fn parse_problem(document: &str) -> Result<FpeProblem, ProblemError> {
    let doc: ProblemDoc =
        serde_json::from_str(document).map_err(|e| ProblemError::Schema(e.to_string()))?;
    let d = doc.dimension;
    if !(1..=3).contains(&d) {
        return Err(ProblemError::Dimension(format!(
            "dimension must be 1, 2, or 3, got {d}"
        )));
    }
    let gamma = parse_rat_field(&doc.gamma, "gamma")?;
    if gamma.is_negative() || gamma.is_zero() || gamma > Rat::one() {
        return Err(ProblemError::GammaRange(doc.gamma.clone()));
    }
    let initial = parse_expr_field(&doc.initial, "initial")?;
    let mut drift = vec![FluxTerm::default(); d];
    for f in &doc.drift {
        if f.j.is_some() {
            return Err(ProblemError::Schema(
                "drift entries must not carry a `j` index".into(),
            ));
        }
        if f.i == 0 || f.i > d {
            return Err(ProblemError::Dimension(format!(
                "drift index i = {} out of range 1..={d}",
                f.i
            )));
        }
        let slot = &mut drift[f.i - 1];
        if !slot.is_absent() {
            return Err(ProblemError::Schema(format!(
                "duplicate drift entry i = {}",
                f.i
            )));
        }
        if let Some(s) = &f.linear {
            slot.linear = parse_expr_field(s, "drift linear")?;
        }
        if let Some(s) = &f.quadratic {
            slot.quadratic = parse_expr_field(s, "drift quadratic")?;
        }
    }
    let mut diffusion = vec![vec![FluxTerm::default(); d]; d];
    for f in &doc.diffusion {
        let j = f
            .j
            .ok_or_else(|| ProblemError::Schema("diffusion entries require a `j` index".into()))?;
        if f.i == 0 || f.i > d || j == 0 || j > d {
            return Err(ProblemError::Dimension(format!(
                "diffusion index ({}, {j}) out of range 1..={d}",
                f.i
            )));
        }
        let slot = &mut diffusion[f.i - 1][j - 1];
        if !slot.is_absent() {
            return Err(ProblemError::Schema(format!(
                "duplicate diffusion entry ({}, {j})",
                f.i
            )));
        }
        if let Some(s) = &f.linear {
            slot.linear = parse_expr_field(s, "diffusion linear")?;
        }
        if let Some(s) = &f.quadratic {
            slot.quadratic = parse_expr_field(s, "diffusion quadratic")?;
        }
    }
    let mut control = ControlTerm::default();
    for c in &doc.control {
        let coeff = parse_expr_field(&c.coeff, "control coeff")?;
        let a = parse_rat_field(&c.a, "control exponent a")?;
        let b = parse_rat_field(&c.b, "control exponent b")?;
        control.terms.push((coeff, FracExponent::new(a, b)));
    }
    let p = FpeProblem {
        dimension: d,
        gamma,
        order: doc.order,
        drift,
        diffusion,
        initial,
        control,
    };
    p.validate()?;
    Ok(p)
}

/// Serializes a problem back to the JSON schema accepted by
/// [`parse_problem`].
pub fn serialize_problem(p: &FpeProblem) -> String {
    let flux_doc = |i: usize, j: Option<usize>, f: &FluxTerm| FluxDoc {
        i: i + 1,
        j: j.map(|j| j + 1),
        linear: (!f.linear.is_zero_structural()).then(|| f.linear.to_string()),
        quadratic: (!f.quadratic.is_zero_structural()).then(|| f.quadratic.to_string()),
    };
    let doc = ProblemDoc {
        dimension: p.dimension,
        gamma: p.gamma.to_string(),
        order: p.order,
        initial: p.initial.to_string(),
        drift: p
            .drift
            .iter()
            .enumerate()
            .filter(|(_, f)| !f.is_absent())
            .map(|(i, f)| flux_doc(i, None, f))
            .collect(),
        diffusion: p
            .diffusion
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, f)| !f.is_absent())
                    .map(move |(j, f)| (i, j, f))
            })
            .map(|(i, j, f)| flux_doc(i, Some(j), f))
            .collect(),
        control: p
            .control
            .terms
            .iter()
            .filter(|(c, _)| !c.is_zero_structural())
            .map(|(c, e)| ControlDoc {
                coeff: c.to_string(),
                a: e.a.to_string(),
                b: e.b.to_string(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("schema structs serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    #[test]
    fn builtin_data_spot_checks() {
        let p8 = builtin_example(ExampleId::Ex8);
        assert_eq!(p8.initial, Expr::affine_pow(2, rat_int(-1), 2));

        let p6 = builtin_example(ExampleId::Ex6);
        assert_eq!(
            p6.drift[0].quadratic,
            Expr::affine_pow(0, Rat::zero(), -1).scale(&rat_int(4))
        );

        let p1 = builtin_example(ExampleId::Ex1);
        assert_eq!(p1.diffusion[0][0].linear, Expr::int(1));
        assert!(p1.is_linear());
        assert!(!builtin_example(ExampleId::Ex4).is_linear());
    }

    #[test]
    fn operator_on_example1_initial() {
        let p = builtin_example_with(ExampleId::Ex1, rat(1, 2), 8).unwrap();
        let mut u = TimeSeries::new(1, p.gamma.clone());
        u.insert(Rat::zero(), Expr::var(0));
        let w = apply_fp_operator(&u, &p, &rat_int(10));
        assert_eq!(w.get(&Rat::zero()).unwrap(), &Expr::one());
        assert_eq!(w.len(), 1);
    }

    /// Hand expansion for the 2-d nonlinear problem: with u = z1^2 the flux
    /// pieces give -12 z1^2 - z1^2 + 12 z1^2 = -z1^2.
    #[test]
    fn operator_on_example6_initial() {
        let p = builtin_example_with(ExampleId::Ex6, rat(1, 2), 8).unwrap();
        let mut u = TimeSeries::new(2, p.gamma.clone());
        u.insert(Rat::zero(), Expr::var(0).pow(2));
        let w = apply_fp_operator(&u, &p, &rat_int(10));
        assert_eq!(w.get(&Rat::zero()).unwrap(), &Expr::var(0).pow(2).neg());
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn operator_on_empty_series() {
        let p = builtin_example(ExampleId::Ex4);
        let u = TimeSeries::new(1, p.gamma.clone());
        assert!(apply_fp_operator(&u, &p, &rat_int(10)).is_empty());
    }

    #[test]
    fn operator_linear_in_u_for_linear_problems() {
        let p = builtin_example_with(ExampleId::Ex5, rat(1, 2), 8).unwrap();
        let cutoff = rat_int(10);
        let mut u = TimeSeries::new(2, p.gamma.clone());
        u.insert(Rat::zero(), Expr::var(0).pow(2));
        u.insert(rat(1, 2), Expr::var(1));
        let mut v = TimeSeries::new(2, p.gamma.clone());
        v.insert(Rat::zero(), Expr::var(1).mul(&Expr::var(0)));
        let lhs = apply_fp_operator(
            &u.scale(&rat_int(3)).add(&v.scale(&rat_int(-2))),
            &p,
            &cutoff,
        );
        let rhs = apply_fp_operator(&u, &p, &cutoff)
            .scale(&rat_int(3))
            .add(&apply_fp_operator(&v, &p, &cutoff).scale(&rat_int(-2)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn parse_round_trips_builtins() {
        for id in ExampleId::ALL {
            for gamma in [rat(1, 2), rat(4, 5)] {
                let p = builtin_example_with(id, gamma, 8).unwrap();
                let text = serialize_problem(&p);
                let back = parse_problem(&text)
                    .unwrap_or_else(|e| panic!("round-trip of {id:?} failed: {e}\n{text}"));
                assert_eq!(p, back, "round-trip mismatch for {id:?}");
            }
        }
    }

    #[test]
    fn parse_rejects_bad_documents() {
        let ok = serialize_problem(&builtin_example(ExampleId::Ex1));
        assert!(parse_problem(&ok).is_ok());

        let zero_gamma = ok.replace("\"gamma\": \"1\"", "\"gamma\": \"0\"");
        assert!(matches!(
            parse_problem(&zero_gamma),
            Err(ProblemError::GammaRange(_))
        ));

        // a 2-d document referencing z3
        let doc = r#"{
            "dimension": 2, "gamma": "1/2", "order": 8, "initial": "z3",
            "diffusion": [{"i": 1, "j": 1, "linear": "1"}]
        }"#;
        assert!(matches!(
            parse_problem(doc),
            Err(ProblemError::Dimension(_))
        ));

        // unknown field
        let doc = r#"{"dimension": 1, "gamma": "1/2", "order": 8, "initial": "z1", "bogus": 1}"#;
        assert!(matches!(parse_problem(doc), Err(ProblemError::Schema(_))));

        // missing field
        let doc = r#"{"dimension": 1, "gamma": "1/2", "initial": "z1"}"#;
        assert!(matches!(parse_problem(doc), Err(ProblemError::Schema(_))));
    }

    #[test]
    fn unknown_example_id() {
        assert!(matches!(
            ExampleId::parse("3"),
            Err(ProblemError::UnknownExample(_))
        ));
        assert!(ExampleId::parse("s6b").is_ok());
    }
}
