//! Spatial expression algebra over the variables `z1..zd` (d <= 3).
//!
//! Expressions are kept in a canonical factored normal form strong enough to
//! cancel the residual-function terms structurally: each term is a rational
//! coefficient times an optional power of pi, a multiset of affine powers
//! `(z_i + a)^e` (negative exponents allowed), at most one exponential factor
//! with a polynomial argument, a multiset of sine/cosine factors with affine
//! arguments, and a multiset of symbolic Gamma-function tokens with rational
//! arguments. Terms with identical factor structure merge by coefficient
//! addition; no trig identities or polynomial expansion across distinct
//! affine bases are applied.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::special;

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// `rat(n, d)` builds the exact rational n/d.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Exact integer as a rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses an exact rational from `"3"`, `"-4/5"`, or a terminating decimal
/// like `"0.75"`.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s.strip_prefix('+').unwrap_or(s)),
    };
    let make = |r: Rat| if sign < 0 { -r } else { r };
    if let Some((n, d)) = body.split_once('/') {
        let n: BigInt = n.parse().map_err(|_| format!("bad rational `{s}`"))?;
        let d: BigInt = d.parse().map_err(|_| format!("bad rational `{s}`"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(make(Rat::new(n, d)));
    }
    if let Some((int, frac)) = body.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal `{s}`"));
        }
        let int: BigInt = if int.is_empty() {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| format!("bad decimal `{s}`"))?
        };
        let fnum: BigInt = frac.parse().map_err(|_| format!("bad decimal `{s}`"))?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(make(Rat::from_integer(int) + Rat::new(fnum, scale)));
    }
    let n: BigInt = body.parse().map_err(|_| format!("bad rational `{s}`"))?;
    Ok(make(Rat::from_integer(n)))
}

/// An affine spatial argument `z_var + shift`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Affine {
    pub var: usize,
    pub shift: Rat,
}

impl Affine {
    pub fn var(var: usize) -> Self {
        Affine {
            var,
            shift: Rat::zero(),
        }
    }

    pub fn new(var: usize, shift: Rat) -> Self {
        Affine { var, shift }
    }

    fn eval(&self, point: &[f64]) -> f64 {
        point[self.var] + rat_to_f64(&self.shift)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TrigKind {
    Sin,
    Cos,
}

/// `sin(scale * (z + a))` or `cos(scale * (z + a))`, where the scale is an
/// exact rational, optionally times pi.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TrigFactor {
    pub kind: TrigKind,
    pub scale: Rat,
    pub pi: bool,
    pub arg: Affine,
}

impl TrigFactor {
    fn angle(&self, point: &[f64]) -> f64 {
        let mut c = rat_to_f64(&self.scale);
        if self.pi {
            c *= std::f64::consts::PI;
        }
        c * self.arg.eval(point)
    }
}

/// One normalized product term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Term {
    pub coeff: Rat,
    /// Power of pi carried by the coefficient.
    pub pi_pow: i64,
    /// Affine powers, exponents nonzero (negative = Laurent factor).
    pub powers: BTreeMap<Affine, i64>,
    /// At most one exponential factor; the argument must be polynomial.
    pub exp_arg: Option<Box<Expr>>,
    /// Sorted multiset of trig factors. Products are never rewritten to sums.
    pub trig: Vec<TrigFactor>,
    /// Symbolic Gamma tokens `gammafn(arg)^e` with positive rational args.
    /// Integer arguments fold into the coefficient as factorials.
    pub gammas: BTreeMap<Rat, i64>,
}

impl Term {
    pub fn constant(coeff: Rat) -> Self {
        Term {
            coeff,
            pi_pow: 0,
            powers: BTreeMap::new(),
            exp_arg: None,
            trig: Vec::new(),
            gammas: BTreeMap::new(),
        }
    }

    /// Orders by factor structure only (coefficient excluded), so equal keys
    /// are mergeable.
    fn cmp_key(&self, other: &Term) -> Ordering {
        (
            self.pi_pow,
            &self.powers,
            &self.exp_arg,
            &self.trig,
            &self.gammas,
        )
            .cmp(&(
                other.pi_pow,
                &other.powers,
                &other.exp_arg,
                &other.trig,
                &other.gammas,
            ))
    }

    fn is_constant_one_structure(&self) -> bool {
        self.pi_pow == 0
            && self.powers.is_empty()
            && self.exp_arg.is_none()
            && self.trig.is_empty()
            && self.gammas.is_empty()
    }

    /// Cleans up a raw term: drops zero exponents, folds integer Gamma
    /// arguments, canonicalizes trig scales to be positive. Returns `None`
    /// for a term equal to zero.
    fn normalized(mut self) -> Option<Term> {
        if self.coeff.is_zero() {
            return None;
        }
        self.powers.retain(|_, e| *e != 0);
        if let Some(arg) = &self.exp_arg {
            if arg.is_zero_structural() {
                self.exp_arg = None;
            }
        }
        let mut trig = Vec::with_capacity(self.trig.len());
        for mut f in std::mem::take(&mut self.trig) {
            if f.scale.is_zero() {
                match f.kind {
                    TrigKind::Sin => return None, // sin(0) = 0 kills the term
                    TrigKind::Cos => continue,    // cos(0) = 1
                }
            }
            if f.scale.is_negative() {
                f.scale = -f.scale;
                if f.kind == TrigKind::Sin {
                    self.coeff = -self.coeff;
                }
            }
            trig.push(f);
        }
        trig.sort();
        self.trig = trig;
        let mut folded = Rat::one();
        let mut gammas = BTreeMap::new();
        for (arg, e) in std::mem::take(&mut self.gammas) {
            if e == 0 {
                continue;
            }
            if arg.is_integer() {
                let n = arg
                    .to_integer()
                    .to_i64()
                    .expect("gamma token argument out of range");
                assert!(n >= 1, "gamma token at a pole: gammafn({n})");
                let mut f = Rat::one();
                for m in 1..n {
                    f *= rat_int(m);
                }
                folded *= f.pow(e as i32);
            } else {
                assert!(
                    arg.is_positive(),
                    "gamma token argument must be positive, got {arg}"
                );
                gammas.insert(arg, e);
            }
        }
        self.coeff *= folded;
        self.gammas = gammas;
        if self.coeff.is_zero() {
            return None;
        }
        Some(self)
    }

    fn mul(&self, other: &Term) -> Term {
        let mut powers = self.powers.clone();
        for (a, e) in &other.powers {
            *powers.entry(a.clone()).or_insert(0) += e;
        }
        let mut gammas = self.gammas.clone();
        for (a, e) in &other.gammas {
            *gammas.entry(a.clone()).or_insert(0) += e;
        }
        let exp_arg = match (&self.exp_arg, &other.exp_arg) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => Some(Box::new(a.add(b))),
        };
        let mut trig = self.trig.clone();
        trig.extend(other.trig.iter().cloned());
        Term {
            coeff: &self.coeff * &other.coeff,
            pi_pow: self.pi_pow + other.pi_pow,
            powers,
            exp_arg,
            trig,
            gammas,
        }
    }

    fn eval(&self, point: &[f64]) -> Result<f64, PoleAtPoint> {
        let mut v = rat_to_f64(&self.coeff);
        if self.pi_pow != 0 {
            v *= std::f64::consts::PI.powi(self.pi_pow as i32);
        }
        for (aff, e) in &self.powers {
            let base = aff.eval(point);
            if *e < 0 && base == 0.0 {
                return Err(PoleAtPoint {
                    var: aff.var,
                    shift: aff.shift.clone(),
                });
            }
            v *= base.powi(*e as i32);
        }
        if let Some(arg) = &self.exp_arg {
            v *= arg.eval(point)?.exp();
        }
        for f in &self.trig {
            let angle = f.angle(point);
            v *= match f.kind {
                TrigKind::Sin => angle.sin(),
                TrigKind::Cos => angle.cos(),
            };
        }
        for (arg, e) in &self.gammas {
            let g = special::gamma_fn(rat_to_f64(arg))
                .expect("gamma token argument is positive by construction");
            v *= g.powi(*e as i32);
        }
        Ok(v)
    }

    /// Magnitude proxy: |value| with every factor replaced by its absolute
    /// value, used as a cancellation-aware scale for numeric comparisons.
    fn eval_abs(&self, point: &[f64]) -> Result<f64, PoleAtPoint> {
        self.eval(point).map(f64::abs)
    }

    fn is_polynomial(&self) -> bool {
        self.exp_arg.is_none()
            && self.trig.is_empty()
            && self.gammas.is_empty()
            && self.powers.values().all(|e| *e > 0)
    }
}

/// Evaluation failure: a Laurent factor `(z_i + a)^-n` hit its pole.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("pole at sample point: (z{} + {shift}) vanishes", var + 1)]
pub struct PoleAtPoint {
    pub var: usize,
    pub shift: Rat,
}

/// Three-valued zero test result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroStatus {
    /// The normal form has no terms.
    Zero,
    /// Terms remain but all sampled values are below threshold (e.g. an
    /// unreduced trig identity).
    NumericallyZero,
    NonZero,
}

/// A normalized spatial expression: a canonical sum of [`Term`]s.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Expr {
    terms: Vec<Term>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Expr::constant(Rat::one())
    }

    pub fn constant(r: Rat) -> Self {
        Expr::from_terms(vec![Term::constant(r)])
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(rat_int(n))
    }

    /// The variable `z_{var+1}`.
    pub fn var(var: usize) -> Self {
        Expr::affine(var, Rat::zero())
    }

    /// The affine factor `z_{var+1} + shift`.
    pub fn affine(var: usize, shift: Rat) -> Self {
        Expr::affine_pow(var, shift, 1)
    }

    /// `(z_{var+1} + shift)^e` with a possibly negative exponent.
    pub fn affine_pow(var: usize, shift: Rat, e: i64) -> Self {
        let mut t = Term::constant(Rat::one());
        t.powers.insert(Affine::new(var, shift), e);
        Expr::from_terms(vec![t])
    }

    /// `exp(arg)`; the argument must be polynomial.
    pub fn exp_of(arg: Expr) -> Self {
        assert!(
            arg.is_polynomial(),
            "exponential argument must be polynomial, got {arg}"
        );
        let mut t = Term::constant(Rat::one());
        t.exp_arg = Some(Box::new(arg));
        Expr::from_terms(vec![t])
    }

    /// `sin(scale * pi^{pi} * (z_var + shift))`.
    pub fn trig(kind: TrigKind, scale: Rat, pi: bool, var: usize, shift: Rat) -> Self {
        let mut t = Term::constant(Rat::one());
        t.trig.push(TrigFactor {
            kind,
            scale,
            pi,
            arg: Affine::new(var, shift),
        });
        Expr::from_terms(vec![t])
    }

    /// `sin(pi * z_var)`, the control-term staple.
    pub fn sin_pi(var: usize) -> Self {
        Expr::trig(TrigKind::Sin, Rat::one(), true, var, Rat::zero())
    }

    pub fn cos_pi(var: usize) -> Self {
        Expr::trig(TrigKind::Cos, Rat::one(), true, var, Rat::zero())
    }

    /// The symbolic token `gammafn(arg)^e`.
    pub fn gamma_token(arg: Rat, e: i64) -> Self {
        let mut t = Term::constant(Rat::one());
        t.gammas.insert(arg, e);
        Expr::from_terms(vec![t])
    }

    /// `pi^n` as a constant expression.
    pub fn pi_pow(n: i64) -> Self {
        let mut t = Term::constant(Rat::one());
        t.pi_pow = n;
        Expr::from_terms(vec![t])
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        let mut ts: Vec<Term> = terms.into_iter().filter_map(Term::normalized).collect();
        ts.sort_by(|a, b| a.cmp_key(b));
        let mut merged: Vec<Term> = Vec::with_capacity(ts.len());
        for t in ts {
            match merged.last_mut() {
                Some(last) if last.cmp_key(&t) == Ordering::Equal => {
                    last.coeff += &t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        Expr { terms: merged }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero_structural(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the expression is a rational constant (including zero).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 if self.terms[0].is_constant_one_structure() => Some(self.terms[0].coeff.clone()),
            _ => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(Term::is_polynomial)
    }

    /// Recognizes an affine function of one variable with no other factors:
    /// either a single term `c * pi^p * (z_i + a)` or the two-monomial sum
    /// `c * pi^p * z_i + d * pi^p`. Returns `(c, p, z_i + d/c)`. The parser
    /// uses this to refactor parenthesized affine groups into single power
    /// and trig atoms so that rendered factors re-parse to the same form.
    pub fn as_scaled_affine(&self) -> Option<(Rat, i64, Affine)> {
        // a bare monomial `c*z_i` or factored affine `c*(z_i + a)`
        let single = |t: &Term| -> Option<Affine> {
            if t.exp_arg.is_some() || !t.trig.is_empty() || !t.gammas.is_empty() {
                return None;
            }
            match t.powers.len() {
                1 => {
                    let (a, e) = t.powers.iter().next().expect("one factor");
                    (*e == 1).then(|| a.clone())
                }
                _ => None,
            }
        };
        let constant = |t: &Term| -> bool {
            t.exp_arg.is_none() && t.trig.is_empty() && t.gammas.is_empty() && t.powers.is_empty()
        };
        match self.terms.as_slice() {
            [t] => single(t).map(|aff| (t.coeff.clone(), t.pi_pow, aff)),
            [a, b] => {
                if a.pi_pow != b.pi_pow {
                    return None;
                }
                let (lin, con) = if constant(a) {
                    (b, a)
                } else if constant(b) {
                    (a, b)
                } else {
                    return None;
                };
                let aff = single(lin)?;
                let shift = &aff.shift + &con.coeff / &lin.coeff;
                Some((lin.coeff.clone(), lin.pi_pow, Affine::new(aff.var, shift)))
            }
            _ => None,
        }
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        let mut max = None;
        let mut push = |v: usize| max = Some(max.map_or(v, |m: usize| m.max(v)));
        for t in &self.terms {
            for a in t.powers.keys() {
                push(a.var);
            }
            for f in &t.trig {
                push(f.arg.var);
            }
            if let Some(arg) = &t.exp_arg {
                if let Some(v) = arg.max_var() {
                    push(v);
                }
            }
        }
        max
    }

    pub fn add(&self, other: &Expr) -> Expr {
        let mut ts = self.terms.clone();
        ts.extend(other.terms.iter().cloned());
        Expr::from_terms(ts)
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Expr {
        let ts = self
            .terms
            .iter()
            .map(|t| {
                let mut t = t.clone();
                t.coeff = -t.coeff;
                t
            })
            .collect();
        Expr { terms: ts }
    }

    pub fn scale(&self, r: &Rat) -> Expr {
        if r.is_zero() {
            return Expr::zero();
        }
        let ts = self
            .terms
            .iter()
            .map(|t| {
                let mut t = t.clone();
                t.coeff *= r;
                t
            })
            .collect();
        Expr { terms: ts }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        let mut ts = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                ts.push(a.mul(b));
            }
        }
        Expr::from_terms(ts)
    }

    pub fn pow(&self, n: u32) -> Expr {
        let mut acc = Expr::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplies by the symbolic token `gammafn(arg)^e`.
    pub fn mul_gamma(&self, arg: &Rat, e: i64) -> Expr {
        if e == 0 {
            return self.clone();
        }
        let ts = self
            .terms
            .iter()
            .map(|t| {
                let mut t = t.clone();
                *t.gammas.entry(arg.clone()).or_insert(0) += e;
                t
            })
            .collect();
        Expr::from_terms(ts)
    }

    /// Exact partial derivative with respect to `z_{var+1}`.
    pub fn diff(&self, var: usize) -> Expr {
        let mut out: Vec<Term> = Vec::new();
        for t in &self.terms {
            // affine power factors
            for (aff, e) in &t.powers {
                if aff.var != var {
                    continue;
                }
                let mut d = t.clone();
                d.coeff *= rat_int(*e);
                let slot = d.powers.get_mut(aff).expect("factor present");
                *slot -= 1;
                out.push(d);
            }
            // exponential factor: chain rule multiplies by the argument's
            // derivative, which may be a multi-term polynomial
            if let Some(arg) = &t.exp_arg {
                let darg = arg.diff(var);
                for factor in darg.terms {
                    out.push(t.mul(&factor));
                }
            }
            // trig factors
            for (i, f) in t.trig.iter().enumerate() {
                if f.arg.var != var {
                    continue;
                }
                let mut d = t.clone();
                d.coeff *= &f.scale;
                if f.pi {
                    d.pi_pow += 1;
                }
                let g = &mut d.trig[i];
                g.kind = match f.kind {
                    TrigKind::Sin => TrigKind::Cos,
                    TrigKind::Cos => {
                        d.coeff = -d.coeff;
                        TrigKind::Sin
                    }
                };
                out.push(d);
            }
        }
        Expr::from_terms(out)
    }

    /// Floating-point value at `point` (one coordinate per dimension).
    pub fn eval(&self, point: &[f64]) -> Result<f64, PoleAtPoint> {
        let mut sum = 0.0;
        for t in &self.terms {
            sum += t.eval(point)?;
        }
        Ok(sum)
    }

    /// Sum of per-term magnitudes at `point`; a scale for cancellation-aware
    /// comparisons.
    pub fn eval_magnitude(&self, point: &[f64]) -> Result<f64, PoleAtPoint> {
        let mut sum = 0.0;
        for t in &self.terms {
            sum += t.eval_abs(point)?;
        }
        Ok(sum)
    }

    /// Structural zero test, with an optional numeric fallback that samples
    /// eight fixed interior points of [0.1, 0.9]^d.
    pub fn zero_status(&self, sampling: bool) -> ZeroStatus {
        if self.terms.is_empty() {
            return ZeroStatus::Zero;
        }
        if !sampling {
            return ZeroStatus::NonZero;
        }
        let dim = self.max_var().map_or(1, |v| v + 1);
        for point in sample_points(dim) {
            let v = match self.eval_at_shifted(&point) {
                Some(v) => v,
                None => return ZeroStatus::NonZero, // persistent pole: not zero
            };
            if v.abs() >= ZERO_SAMPLE_TOL {
                return ZeroStatus::NonZero;
            }
        }
        ZeroStatus::NumericallyZero
    }

    /// Evaluates at `point`, nudging coordinates away from poles while
    /// staying inside [0.1, 0.9].
    fn eval_at_shifted(&self, point: &[f64]) -> Option<f64> {
        let mut p = point.to_vec();
        for _ in 0..4 {
            match self.eval(&p) {
                Ok(v) => return Some(v),
                Err(pole) => {
                    let c = &mut p[pole.var];
                    *c += 0.0173;
                    if *c > 0.9 {
                        *c -= 0.8;
                    }
                }
            }
        }
        None
    }
}

/// Absolute threshold for the sampled zero test.
pub const ZERO_SAMPLE_TOL: f64 = 1e-9;

/// Eight deterministic sample points in the open box (0.1, 0.9)^dim.
pub fn sample_points(dim: usize) -> Vec<Vec<f64>> {
    const BASE: [f64; 8] = [0.137, 0.289, 0.413, 0.531, 0.659, 0.773, 0.861, 0.229];
    (0..8)
        .map(|j| (0..dim).map(|c| BASE[(j + 5 * c) % 8]).collect())
        .collect()
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational representable as f64")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write_term(f, t)?;
        }
        Ok(())
    }
}

fn write_affine(f: &mut fmt::Formatter<'_>, a: &Affine) -> fmt::Result {
    if a.shift.is_zero() {
        write!(f, "z{}", a.var + 1)
    } else if a.shift.is_negative() {
        write!(f, "(z{}-{})", a.var + 1, -a.shift.clone())
    } else {
        write!(f, "(z{}+{})", a.var + 1, a.shift)
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    let mag = t.coeff.abs();
    let mut wrote = false;
    let structural_one = t.is_constant_one_structure();
    if !mag.is_one() || structural_one {
        write!(f, "{mag}")?;
        wrote = true;
    }
    let sep = |f: &mut fmt::Formatter<'_>, wrote: &mut bool| -> fmt::Result {
        if *wrote {
            write!(f, "*")?;
        }
        *wrote = true;
        Ok(())
    };
    if t.pi_pow != 0 {
        sep(f, &mut wrote)?;
        if t.pi_pow == 1 {
            write!(f, "pi")?;
        } else {
            write!(f, "pi^{}", t.pi_pow)?;
        }
    }
    for (a, e) in &t.powers {
        sep(f, &mut wrote)?;
        write_affine(f, a)?;
        if *e != 1 {
            write!(f, "^{e}")?;
        }
    }
    if let Some(arg) = &t.exp_arg {
        sep(f, &mut wrote)?;
        write!(f, "exp({arg})")?;
    }
    for tf in &t.trig {
        sep(f, &mut wrote)?;
        let name = match tf.kind {
            TrigKind::Sin => "sin",
            TrigKind::Cos => "cos",
        };
        write!(f, "{name}(")?;
        if !tf.scale.is_one() {
            write!(f, "{}*", tf.scale)?;
        }
        if tf.pi {
            write!(f, "pi*")?;
        }
        write_affine(f, &tf.arg)?;
        write!(f, ")")?;
    }
    for (arg, e) in &t.gammas {
        sep(f, &mut wrote)?;
        write!(f, "gammafn({arg})")?;
        if *e != 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}
