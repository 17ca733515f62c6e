//! Exact arithmetic on fractional power series in tau and their Laplace
//! counterparts in s.
//!
//! A [`TimeSeries`] stores raw coefficients: the entry `(e, c)` means
//! `c(z) * tau^e`. A [`LaplaceSeries`] entry `(e, c)` means `c(z) * s^-e`.
//! Exponents are exact rationals of the form `a*gamma + b`; the maps key on
//! the rational value, so exponents that collide for a particular gamma
//! (e.g. 2*gamma = 1 at gamma = 1/2) merge automatically.
//!
//! Gamma factors produced by the Caputo power rule and the transform pair
//! are carried as symbolic tokens on the coefficients and cancel formally;
//! they become floating point only at evaluation time.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::expr::{Expr, Rat, ZeroStatus};

/// An exponent `a*gamma + b` with exact rational parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FracExponent {
    pub a: Rat,
    pub b: Rat,
}

impl FracExponent {
    pub fn new(a: Rat, b: Rat) -> Self {
        FracExponent { a, b }
    }

    /// `k*gamma`, the k-th point of the solution grid.
    pub fn grid(k: usize) -> Self {
        FracExponent {
            a: Rat::from_integer(k.into()),
            b: Rat::zero(),
        }
    }

    /// The exact value for a fixed rational gamma.
    pub fn value(&self, gamma: &Rat) -> Rat {
        &self.a * gamma + &self.b
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("Caputo power rule unsupported for exponent {exponent} with order {gamma} (needs e = 0 or e >= gamma)")]
    UnsupportedExponent { exponent: Rat, gamma: Rat },
}

/// Finite fractional power series in tau with spatial coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub dimension: usize,
    pub gamma: Rat,
    entries: BTreeMap<Rat, Expr>,
}

/// Finite gamma-singular series in 1/s with spatial coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceSeries {
    pub dimension: usize,
    pub gamma: Rat,
    entries: BTreeMap<Rat, Expr>,
}

impl TimeSeries {
    pub fn new(dimension: usize, gamma: Rat) -> Self {
        TimeSeries {
            dimension,
            gamma,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, exponent: Rat, coeff: Expr) {
        assert!(
            !exponent.is_negative(),
            "time-series exponent must be nonnegative, got {exponent}"
        );
        if coeff.is_zero_structural() {
            return;
        }
        match self.entries.entry(exponent) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let merged = o.get().add(&coeff);
                if merged.is_zero_structural() {
                    o.remove();
                } else {
                    *o.get_mut() = merged;
                }
            }
        }
    }

    pub fn insert_at(&mut self, exponent: &FracExponent, coeff: Expr) {
        let v = exponent.value(&self.gamma);
        self.insert(v, coeff);
    }

    pub fn get(&self, exponent: &Rat) -> Option<&Expr> {
        self.entries.get(exponent)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rat, &Expr)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add(&self, other: &TimeSeries) -> TimeSeries {
        self.check_compat(other);
        let mut out = self.clone();
        for (e, c) in &other.entries {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TimeSeries) -> TimeSeries {
        self.check_compat(other);
        let mut out = self.clone();
        for (e, c) in &other.entries {
            out.insert(e.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, r: &Rat) -> TimeSeries {
        self.map_coeffs(|c| c.scale(r))
    }

    /// Multiplies every coefficient by a spatial expression.
    pub fn mul_expr(&self, f: &Expr) -> TimeSeries {
        self.map_coeffs(|c| c.mul(f))
    }

    /// Applies the spatial derivative termwise.
    pub fn diff(&self, var: usize) -> TimeSeries {
        assert!(var < self.dimension);
        self.map_coeffs(|c| c.diff(var))
    }

    fn map_coeffs(&self, f: impl Fn(&Expr) -> Expr) -> TimeSeries {
        let mut out = TimeSeries::new(self.dimension, self.gamma.clone());
        for (e, c) in &self.entries {
            out.insert(e.clone(), f(c));
        }
        out
    }

    /// Cauchy product on raw coefficients, keeping exponents <= cutoff.
    pub fn product(&self, other: &TimeSeries, cutoff: &Rat) -> TimeSeries {
        self.check_compat(other);
        let mut out = TimeSeries::new(self.dimension, self.gamma.clone());
        for (e1, c1) in &self.entries {
            if e1 > cutoff {
                break;
            }
            for (e2, c2) in &other.entries {
                let e = e1 + e2;
                if &e > cutoff {
                    break;
                }
                out.insert(e, c1.mul(c2));
            }
        }
        out
    }

    /// Drops entries with exponent above the cutoff.
    pub fn truncate(&self, cutoff: &Rat) -> TimeSeries {
        let mut out = TimeSeries::new(self.dimension, self.gamma.clone());
        for (e, c) in &self.entries {
            if e <= cutoff {
                out.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Caputo fractional derivative of order gamma, applied termwise via the
    /// power rule: the constant entry is dropped, and `c * tau^e` maps to
    /// `c * Gamma(e+1)/Gamma(e+1-gamma) * tau^{e-gamma}` with the Gamma
    /// ratio kept as symbolic tokens.
    pub fn caputo(&self) -> Result<TimeSeries, SeriesError> {
        let g = &self.gamma;
        let mut out = TimeSeries::new(self.dimension, g.clone());
        for (e, c) in &self.entries {
            if e.is_zero() {
                continue;
            }
            if e < g {
                return Err(SeriesError::UnsupportedExponent {
                    exponent: e.clone(),
                    gamma: g.clone(),
                });
            }
            let num = e + Rat::one();
            let den = e + Rat::one() - g;
            let coeff = c.mul_gamma(&num, 1).mul_gamma(&den, -1);
            out.insert(e - g, coeff);
        }
        Ok(out)
    }

    /// Laplace transform: `c * tau^e` maps to `c * Gamma(e+1) * s^-(e+1)`.
    pub fn laplace(&self) -> LaplaceSeries {
        let mut out = LaplaceSeries::new(self.dimension, self.gamma.clone());
        for (e, c) in &self.entries {
            let num = e + Rat::one();
            out.insert(e + Rat::one(), c.mul_gamma(&num, 1));
        }
        out
    }

    /// Evaluates the series at (point, tau), resolving Gamma tokens to
    /// floating point.
    pub fn eval(&self, point: &[f64], tau: f64) -> Result<f64, crate::expr::PoleAtPoint> {
        let mut sum = 0.0;
        for (e, c) in &self.entries {
            let ef = crate::expr::rat_to_f64(e);
            let tp = if tau == 0.0 {
                if e.is_zero() {
                    1.0
                } else {
                    0.0
                }
            } else {
                tau.powf(ef)
            };
            sum += c.eval(point)? * tp;
        }
        Ok(sum)
    }

    fn check_compat(&self, other: &TimeSeries) {
        assert_eq!(self.dimension, other.dimension, "dimension mismatch");
        assert_eq!(self.gamma, other.gamma, "gamma mismatch");
    }
}

impl LaplaceSeries {
    pub fn new(dimension: usize, gamma: Rat) -> Self {
        LaplaceSeries {
            dimension,
            gamma,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, exponent: Rat, coeff: Expr) {
        if coeff.is_zero_structural() {
            return;
        }
        match self.entries.entry(exponent) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let merged = o.get().add(&coeff);
                if merged.is_zero_structural() {
                    o.remove();
                } else {
                    *o.get_mut() = merged;
                }
            }
        }
    }

    pub fn get(&self, exponent: &Rat) -> Option<&Expr> {
        self.entries.get(exponent)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rat, &Expr)> {
        self.entries.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sub(&self, other: &LaplaceSeries) -> LaplaceSeries {
        assert_eq!(self.dimension, other.dimension);
        assert_eq!(self.gamma, other.gamma);
        let mut out = self.clone();
        for (e, c) in &other.entries {
            out.insert(e.clone(), c.neg());
        }
        out
    }

    /// Multiplies by `s^-by`: every exponent increases by `by`.
    pub fn shift(&self, by: &Rat) -> LaplaceSeries {
        assert!(!by.is_negative(), "shift must be nonnegative");
        let mut out = LaplaceSeries::new(self.dimension, self.gamma.clone());
        for (e, c) in &self.entries {
            out.insert(e + by, c.clone());
        }
        out
    }

    /// Inverse transform back to the time domain: `c * s^-e` maps to
    /// `c / Gamma(e) * tau^{e-1}`. Requires all exponents >= 1.
    pub fn inverse(&self) -> TimeSeries {
        let mut out = TimeSeries::new(self.dimension, self.gamma.clone());
        for (e, c) in &self.entries {
            assert!(
                e >= &Rat::one(),
                "inverse transform needs exponents >= 1, got {e}"
            );
            out.insert(e - Rat::one(), c.mul_gamma(e, -1));
        }
        out
    }
}

/// Result of applying the limit condition at step k.
#[derive(Debug, Clone)]
pub struct P4Outcome {
    /// The solved coefficient p_k = -(surviving sum).
    pub solved: Expr,
    /// The sum of entries that survive the s -> infinity limit.
    pub surviving: Expr,
    /// Entries at slower-decaying exponents that vanished only numerically.
    pub warnings: Vec<String>,
}

/// A slower-decaying entry with a nonzero coefficient: the limit diverges
/// and the coefficient cannot be determined.
#[derive(Debug, Clone, Error)]
#[error("limit diverges at step {k}: entry at s-exponent {exponent} survives multiplication by s^{target} (coefficient {coefficient})")]
pub struct DivergentLimit {
    pub k: usize,
    pub exponent: Rat,
    pub target: Rat,
    pub coefficient: Expr,
}

/// Applies the limit condition `lim s^{k*gamma+1} LR_k = 0` to a residual
/// series assembled *without* the unknown p_k (whose unit coefficient sits
/// at exponent k*gamma+1): entries decaying faster vanish, the entry at
/// exactly k*gamma+1 survives into S, and any slower-decaying entry must be
/// zero or the limit diverges. Returns p_k = -S.
pub fn p4_extract(lrf: &LaplaceSeries, k: usize) -> Result<P4Outcome, DivergentLimit> {
    let target = Rat::from_integer(k.into()) * &lrf.gamma + Rat::one();
    let mut surviving = Expr::zero();
    let mut warnings = Vec::new();
    for (e, c) in lrf.iter() {
        // multiplied exponent after scaling by s^{target}
        let m = &target - e;
        if m.is_negative() {
            continue;
        }
        if m.is_zero() {
            surviving = surviving.add(c);
            continue;
        }
        match c.zero_status(true) {
            ZeroStatus::Zero => {}
            ZeroStatus::NumericallyZero => warnings.push(format!(
                "entry at s-exponent {e} cancels only numerically (step {k})"
            )),
            ZeroStatus::NonZero => {
                return Err(DivergentLimit {
                    k,
                    exponent: e.clone(),
                    target,
                    coefficient: c.clone(),
                });
            }
        }
    }
    Ok(P4Outcome {
        solved: surviving.neg(),
        surviving,
        warnings,
    })
}
