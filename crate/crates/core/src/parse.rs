//! Parser for the expression strings used in problem files.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := '-' factor | primary ('^' int)?
//! primary := rational | 'pi' | var | func '(' expr ')' | '(' expr ')'
//! var     := 'z1' | 'z2' | 'z3'
//! func    := 'exp' | 'sin' | 'cos' | 'gammafn'
//! rational:= digits ('/' digits | '.' digits)?
//! int     := '-'? digits
//! ```
//!
//! There is no division operator; reciprocals are written with negative
//! powers, e.g. `4*z1^-1` or `2*(z3-1)^-1`, which are legal only on bases
//! free of trig factors. `exp` arguments must be polynomial; `sin`/`cos`
//! arguments must reduce to `c * (z_i + a)` or `c * pi * (z_i + a)`;
//! `gammafn` takes a positive rational literal.

use num::{One, Signed};
use thiserror::Error;

use crate::expr::{parse_rat, Expr, Rat, Term, TrigKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("unexpected character `{0}` at offset {1}")]
    UnexpectedChar(char, usize),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {expected}, found `{found}`")]
    Expected {
        expected: &'static str,
        found: String,
    },
    #[error("bad number: {0}")]
    BadNumber(String),
    #[error("negative power on a base that is not invertible in the term algebra: `{0}`")]
    BadNegativePower(String),
    #[error("exp argument must be polynomial: `{0}`")]
    BadExpArgument(String),
    #[error(
        "trig argument must be a rational (optionally pi-) multiple of an affine variable: `{0}`"
    )]
    BadTrigArgument(String),
    #[error("gammafn argument must be a positive rational literal: `{0}`")]
    BadGammaArgument(String),
    #[error("trailing input after expression: `{0}`")]
    TrailingInput(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Caret,
}

fn lex(input: &str) -> Result<Vec<Tok>, ParseError> {
    let bytes = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                toks.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(Tok::RParen);
                i += 1;
            }
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            '^' => {
                toks.push(Tok::Caret);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                // optional /denominator or .fraction
                if i < bytes.len()
                    && (bytes[i] == b'/' || bytes[i] == b'.')
                    && i + 1 < bytes.len()
                    && bytes[i + 1].is_ascii_digit()
                {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let text = &input[start..i];
                let r = parse_rat(text).map_err(ParseError::BadNumber)?;
                toks.push(Tok::Num(r));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push(Tok::Ident(input[start..i].to_string()));
            }
            _ => return Err(ParseError::UnexpectedChar(c, i)),
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Tok, ParseError> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or(ParseError::UnexpectedEnd)?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, tok: Tok, what: &'static str) -> Result<(), ParseError> {
        let t = self.next()?;
        if t == tok {
            Ok(())
        } else {
            Err(ParseError::Expected {
                expected: what,
                found: format!("{t:?}"),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.pos += 1;
            return Ok(self.factor()?.neg());
        }
        let base = self.primary()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.pos += 1;
            let negative = if matches!(self.peek(), Some(Tok::Minus)) {
                self.pos += 1;
                true
            } else {
                false
            };
            let e = match self.next()? {
                Tok::Num(r) if r.is_integer() && !r.is_negative() => {
                    num::ToPrimitive::to_i64(&r.to_integer())
                        .ok_or_else(|| ParseError::BadNumber("exponent overflow".into()))?
                }
                t => {
                    return Err(ParseError::Expected {
                        expected: "integer exponent",
                        found: format!("{t:?}"),
                    })
                }
            };
            if negative {
                return invert_pow(&base, e);
            }
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.next()? {
            Tok::Num(r) => Ok(Expr::constant(r)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "closing parenthesis")?;
                // a parenthesized affine group becomes a single factored
                // atom: `(z3-1)` is the factor (z3-1)^1, not a two-term
                // sum, so rendered factors re-parse to the same form
                if let Some((c, p, aff)) = e.as_scaled_affine() {
                    let mut t = Term::constant(c);
                    t.pi_pow = p;
                    t.powers.insert(aff, 1);
                    return Ok(Expr::from_terms(vec![t]));
                }
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "pi" => Ok(Expr::pi_pow(1)),
                "z1" => Ok(Expr::var(0)),
                "z2" => Ok(Expr::var(1)),
                "z3" => Ok(Expr::var(2)),
                "exp" => {
                    let arg = self.paren_arg()?;
                    if !arg.is_polynomial() {
                        return Err(ParseError::BadExpArgument(arg.to_string()));
                    }
                    Ok(Expr::exp_of(arg))
                }
                "sin" => self.trig(TrigKind::Sin),
                "cos" => self.trig(TrigKind::Cos),
                "gammafn" => {
                    let arg = self.paren_arg()?;
                    match arg.as_constant() {
                        Some(r) if r.is_positive() => Ok(Expr::gamma_token(r, 1)),
                        _ => Err(ParseError::BadGammaArgument(arg.to_string())),
                    }
                }
                other => Err(ParseError::Expected {
                    expected: "z1/z2/z3, pi, or a function name",
                    found: other.to_string(),
                }),
            },
            t => Err(ParseError::Expected {
                expected: "expression atom",
                found: format!("{t:?}"),
            }),
        }
    }

    fn paren_arg(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen, "opening parenthesis")?;
        let e = self.expr()?;
        self.expect(Tok::RParen, "closing parenthesis")?;
        Ok(e)
    }

    fn trig(&mut self, kind: TrigKind) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen, "opening parenthesis")?;
        let arg = self.expr()?;
        self.expect(Tok::RParen, "closing parenthesis")?;
        // the argument must reduce to c * pi^{0|1} * (z_i + a)
        let (c, p, aff) = arg
            .as_scaled_affine()
            .ok_or_else(|| ParseError::BadTrigArgument(arg.to_string()))?;
        if p != 0 && p != 1 {
            return Err(ParseError::BadTrigArgument(arg.to_string()));
        }
        Ok(Expr::trig(kind, c, p == 1, aff.var, aff.shift))
    }
}

/// Term-level inversion for negative powers: legal when the base is a single
/// term without trig factors (affine powers, pi powers, exponential and
/// gamma tokens all invert cleanly).
fn invert_pow(base: &Expr, e: i64) -> Result<Expr, ParseError> {
    let terms = base.terms();
    if terms.len() != 1 || !terms[0].trig.is_empty() {
        return Err(ParseError::BadNegativePower(base.to_string()));
    }
    let t = &terms[0];
    let mut inv = Term::constant(Rat::one() / &t.coeff);
    inv.pi_pow = -t.pi_pow;
    for (a, p) in &t.powers {
        inv.powers.insert(a.clone(), -p);
    }
    if let Some(arg) = &t.exp_arg {
        inv.exp_arg = Some(Box::new(arg.neg()));
    }
    for (a, p) in &t.gammas {
        inv.gammas.insert(a.clone(), -p);
    }
    Ok(Expr::from_terms(vec![inv]).pow(e as u32))
}

/// Parses an expression string in the problem-file grammar.
pub fn parse_expr(input: &str) -> Result<Expr, ParseError> {
    let toks = lex(input)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ParseError::TrailingInput(format!("{:?}", &p.toks[p.pos..])));
    }
    Ok(e)
}
