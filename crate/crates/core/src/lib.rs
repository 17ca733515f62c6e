//! Symbolic-numeric solver for multi-dimensional time-fractional
//! Fokker-Planck equations with Caputo derivatives.
//!
//! The solver computes truncated fractional power series solutions by
//! working in the Laplace transform domain: the equation becomes algebraic,
//! the series coefficients are extracted one by one from a limit condition
//! on the truncated residual function, and the result transforms back to a
//! finite sum `sum_k p_k(z) t^{k*gamma} / Gamma(k*gamma + 1)`.
//!
//! All series bookkeeping is exact: coefficients are spatial expressions
//! over arbitrary-precision rationals, exponents are exact rationals
//! `a*gamma + b`, and Gamma factors are carried as symbolic tokens that
//! cancel formally. Floating point enters only when evaluating at a point.
//!
//! Modules:
//! - [`expr`]: the normalized spatial expression algebra
//! - [`special`]: Gamma and Mittag-Leffler evaluation, closed-form references
//! - [`series`]: fractional power series, the Caputo rule, the transform pair
//! - [`fpe`]: problem model, built-in library, the spatial operator
//! - [`engine`]: the coefficient recursion and solution diagnostics
//! - [`report`]: tables, error grids, residual checks, CSV/JSON output
//!
//! ```
//! use lrps_core::{builtin_example_with, solve, evaluate, ExampleId, ClosedForm};
//! use lrps_core::expr::{rat, Expr};
//!
//! let problem = builtin_example_with(ExampleId::Ex6, rat(3, 4), 8).unwrap();
//! let (solution, _report) = solve(&problem).unwrap();
//! assert_eq!(solution.coefficients[1], Expr::var(0).pow(2).neg());
//! assert!(matches!(solution.closed_form, Some(ClosedForm::MittagLeffler { .. })));
//!
//! let v = evaluate(&solution, &[0.5, 0.5], 0.3).unwrap();
//! assert!(v > 0.0 && v < 0.25);
//! ```

#![allow(clippy::result_large_err)] // errors carry exact rationals for diagnostics

pub mod engine;
pub mod expr;
pub mod fpe;
pub mod parse;
pub mod report;
pub mod series;
pub mod special;

pub use engine::{evaluate, evaluate_truncated, solve, ClosedForm, FpsSolution, SolveError};
pub use expr::{parse_rat, Expr, Rat};
pub use fpe::{builtin_example, builtin_example_with, parse_problem, ExampleId, FpeProblem};
pub use series::{FracExponent, LaplaceSeries, TimeSeries};
pub use special::{exact_reference, gamma_fn, mittag_leffler, ExactKind, MlParams};
