//! Max-min-plus-scaling (MMPS) expression trees.
//!
//! The grammar is `f := x_i | u_j | α | max(f, f) | min(f, f) | f + f | β·f`.
//! The max-min-plus fragment drops scaling and only allows sums where one
//! side is constant; see [`MmpsExpression::is_max_min_plus`].

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::weight::{oplus, oplus_dual, otimes, Weight};
use crate::{Error, Result};

#[derive(Clone, PartialEq)]
pub enum MmpsExpression {
    /// State variable `x_i` (0-based).
    Var(usize),
    /// Input variable `u_j` (0-based).
    InputVar(usize),
    Const(Weight),
    Max(Box<MmpsExpression>, Box<MmpsExpression>),
    Min(Box<MmpsExpression>, Box<MmpsExpression>),
    Plus(Box<MmpsExpression>, Box<MmpsExpression>),
    Scale(f64, Box<MmpsExpression>),
}

use MmpsExpression as E;

impl MmpsExpression {
    pub fn var(i: usize) -> Self {
        E::Var(i)
    }

    pub fn input(j: usize) -> Self {
        E::InputVar(j)
    }

    pub fn constant(c: impl Into<Weight>) -> Self {
        E::Const(c.into())
    }

    pub fn max(a: Self, b: Self) -> Self {
        E::Max(Box::new(a), Box::new(b))
    }

    pub fn min(a: Self, b: Self) -> Self {
        E::Min(Box::new(a), Box::new(b))
    }

    pub fn plus(a: Self, b: Self) -> Self {
        E::Plus(Box::new(a), Box::new(b))
    }

    pub fn scale(factor: f64, a: Self) -> Self {
        E::Scale(factor, Box::new(a))
    }

    /// `x_i + c`.
    pub fn var_plus(i: usize, c: impl Into<Weight>) -> Self {
        Self::plus(E::Var(i), E::Const(c.into()))
    }

    /// Left-folded `max` over a non-empty list; `ε` for an empty one.
    pub fn max_of(items: impl IntoIterator<Item = Self>) -> Self {
        items
            .into_iter()
            .reduce(Self::max)
            .unwrap_or(E::Const(Weight::EPSILON))
    }

    /// Left-folded `min` over a non-empty list; `⊤` for an empty one.
    pub fn min_of(items: impl IntoIterator<Item = Self>) -> Self {
        items
            .into_iter()
            .reduce(Self::min)
            .unwrap_or(E::Const(Weight::TOP))
    }

    pub fn eval(&self, x: &[Weight], u: &[Weight]) -> Result<Weight> {
        Ok(match self {
            E::Var(i) => *x.get(*i).ok_or(Error::IndexOutOfRange {
                kind: "state variable",
                index: *i,
                dim: x.len(),
            })?,
            E::InputVar(j) => *u.get(*j).ok_or(Error::IndexOutOfRange {
                kind: "input variable",
                index: *j,
                dim: u.len(),
            })?,
            E::Const(c) => *c,
            E::Max(a, b) => oplus(a.eval(x, u)?, b.eval(x, u)?),
            E::Min(a, b) => oplus_dual(a.eval(x, u)?, b.eval(x, u)?),
            E::Plus(a, b) => otimes(a.eval(x, u)?, b.eval(x, u)?),
            E::Scale(beta, a) => scale(*beta, a.eval(x, u)?),
        })
    }

    fn is_constant(&self) -> bool {
        matches!(self, E::Const(c) if c.is_finite())
    }

    /// Max-min-plus fragment: variables, constants, `max`, `min`, and `+`
    /// with a finite constant on at least one side. No scaling.
    pub fn is_max_min_plus(&self) -> bool {
        self.check_max_min_plus().is_ok()
    }

    pub(crate) fn check_max_min_plus(&self) -> Result<()> {
        match self {
            E::Var(_) | E::InputVar(_) | E::Const(_) => Ok(()),
            E::Max(a, b) | E::Min(a, b) => {
                a.check_max_min_plus()?;
                b.check_max_min_plus()
            }
            E::Plus(a, b) => {
                if !a.is_constant() && !b.is_constant() {
                    return Err(Error::NotMaxMinPlus("sum of two non-constant terms"));
                }
                a.check_max_min_plus()?;
                b.check_max_min_plus()
            }
            E::Scale(..) => Err(Error::NotMaxMinPlus("scaling")),
        }
    }

    /// Largest state and input indices referenced, as `(n, n_u)` lower bounds.
    pub fn arity(&self) -> (usize, usize) {
        match self {
            E::Var(i) => (i + 1, 0),
            E::InputVar(j) => (0, j + 1),
            E::Const(_) => (0, 0),
            E::Max(a, b) | E::Min(a, b) | E::Plus(a, b) => {
                let (n1, m1) = a.arity();
                let (n2, m2) = b.arity();
                (n1.max(n2), m1.max(m2))
            }
            E::Scale(_, a) => a.arity(),
        }
    }

    /// Replaces every variable leaf by the expression `f` returns for it.
    pub fn substitute(&self, f: &impl Fn(&MmpsExpression) -> Option<MmpsExpression>) -> Self {
        if let Some(e) = f(self) {
            return e;
        }
        match self {
            E::Var(_) | E::InputVar(_) | E::Const(_) => self.clone(),
            E::Max(a, b) => Self::max(a.substitute(f), b.substitute(f)),
            E::Min(a, b) => Self::min(a.substitute(f), b.substitute(f)),
            E::Plus(a, b) => Self::plus(a.substitute(f), b.substitute(f)),
            E::Scale(beta, a) => Self::scale(*beta, a.substitute(f)),
        }
    }

    pub fn min_count(&self) -> usize {
        match self {
            E::Var(_) | E::InputVar(_) | E::Const(_) => 0,
            E::Min(a, b) => 1 + a.min_count() + b.min_count(),
            E::Max(a, b) | E::Plus(a, b) => a.min_count() + b.min_count(),
            E::Scale(_, a) => a.min_count(),
        }
    }
}

/// `β·a` on extended reals: infinities keep their sign for `β ≥ 0` and swap
/// for `β < 0`.
fn scale(beta: f64, a: Weight) -> Weight {
    match a.as_finite() {
        Some(v) => Weight::finite(beta * v),
        None if beta >= 0.0 => a,
        None if a.is_epsilon() => Weight::TOP,
        None => Weight::EPSILON,
    }
}

impl fmt::Debug for MmpsExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Variables print 1-based (`x1`, `u1`) to match the usual notation.
impl fmt::Display for MmpsExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            E::Var(i) => write!(f, "x{}", i + 1),
            E::InputVar(j) => write!(f, "u{}", j + 1),
            E::Const(c) => write!(f, "{c}"),
            E::Max(a, b) => write!(f, "max({a}, {b})"),
            E::Min(a, b) => write!(f, "min({a}, {b})"),
            E::Plus(a, b) => write!(f, "{a} + {b}"),
            E::Scale(beta, a) => write!(f, "{beta}*({a})"),
        }
    }
}

/// Parses the notation printed by `Display`: `x1`, `u1`, numbers, `-inf`,
/// `+inf`, `max(..)` and `min(..)` with two or more arguments, `a + b`,
/// `β*(e)` and parentheses. Variables are 1-based.
impl FromStr for MmpsExpression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::InvalidModel(format!("expression `{}`: {what} at offset {}", self.src, self.pos))
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{token}`")))
        }
    }

    fn sum(&mut self) -> Result<E> {
        let mut e = self.term()?;
        while self.eat("+") {
            e = E::plus(e, self.term()?);
        }
        Ok(e)
    }

    fn args(&mut self) -> Result<Vec<E>> {
        self.expect("(")?;
        let mut items = vec![self.sum()?];
        while self.eat(",") {
            items.push(self.sum()?);
        }
        self.expect(")")?;
        Ok(items)
    }

    fn index(&mut self) -> Result<usize> {
        let digits = self.rest().len() - self.rest().trim_start_matches(|c: char| c.is_ascii_digit()).len();
        let i: usize = self.rest()[..digits]
            .parse()
            .map_err(|_| self.error("expected a variable index"))?;
        if i == 0 {
            return Err(self.error("variables are numbered from 1"));
        }
        self.pos += digits;
        Ok(i - 1)
    }

    fn term(&mut self) -> Result<E> {
        self.skip_ws();
        if self.eat("max") {
            return Ok(E::max_of(self.args()?));
        }
        if self.eat("min") {
            return Ok(E::min_of(self.args()?));
        }
        if self.eat("(") {
            let e = self.sum()?;
            self.expect(")")?;
            return Ok(e);
        }
        if self.eat("-inf") {
            return Ok(E::Const(Weight::EPSILON));
        }
        if self.eat("+inf") {
            return Ok(E::Const(Weight::TOP));
        }
        if self.eat("x") {
            return Ok(E::Var(self.index()?));
        }
        if self.eat("u") {
            return Ok(E::InputVar(self.index()?));
        }
        let len = self.rest().len()
            - self
                .rest()
                .trim_start_matches(|c: char| c.is_ascii_digit() || matches!(c, '.' | '-' | 'e' | 'E'))
                .len();
        let v: f64 = self.rest()[..len]
            .parse()
            .map_err(|_| self.error("expected a term"))?;
        self.pos += len;
        if self.eat("*") {
            self.expect("(")?;
            let e = self.sum()?;
            self.expect(")")?;
            return Ok(E::scale(v, e));
        }
        Ok(E::Const(Weight::finite(v)))
    }
}

/// Evaluates each component expression on the same `(x, u)`.
pub fn eval_all(components: &[MmpsExpression], x: &[Weight], u: &[Weight]) -> Result<Vec<Weight>> {
    components.iter().map(|e| e.eval(x, u)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn parse_round_trip() {
        for e in production_line_mode_l1([1, 2, 3]) {
            let text = e.to_string();
            let back: MmpsExpression = text.parse().unwrap();
            assert_eq!(back.to_string(), text);
        }
        let e: MmpsExpression = "max(x1 + 2, min(x2, u1 + -1.5), -inf) + 0.5*(x3)".parse().unwrap();
        let x = [Weight::from(1), Weight::from(4), Weight::from(6)];
        assert_eq!(e.eval(&x, &[Weight::from(7)]).unwrap(), Weight::from(7));
        for bad in ["", "x0", "max(x1", "x1 +", "y1", "max()"] {
            assert!(bad.parse::<MmpsExpression>().is_err(), "{bad}");
        }
    }

    use crate::fixtures::production_line_mode_l1;

    const EPS: Weight = Weight::EPSILON;

    fn w(v: i32) -> Weight {
        Weight::from(v)
    }

    #[test]
    fn eval_max_plus() {
        let e = E::max(E::var(0), E::var_plus(1, 3));
        assert_eq!(e.eval(&[w(5), w(1)], &[]).unwrap(), w(5));
    }

    #[test]
    fn eval_production_line_x3() {
        let f = production_line_mode_l1([1, 2, 3]);
        // max(1, 2, ε, min(4, 5))
        assert_eq!(f[2].eval(&[w(0), w(0), EPS], &[]).unwrap(), w(4));
    }

    #[test]
    fn eval_scale() {
        assert_eq!(E::scale(2.0, E::var(0)).eval(&[w(3)], &[]).unwrap(), w(6));
        assert_eq!(E::scale(-1.0, E::var(0)).eval(&[EPS], &[]).unwrap(), Weight::TOP);
    }

    #[test]
    fn eval_index_errors() {
        assert!(matches!(
            E::var(2).eval(&[w(0)], &[]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(E::input(0).eval(&[], &[]).is_err());
    }

    #[test]
    fn fragment_membership() {
        assert!(E::max(E::var(0), E::var_plus(1, 2)).is_max_min_plus());
        assert!(E::min(E::var(0), E::input(0)).is_max_min_plus());
        assert!(!E::scale(2.0, E::var(0)).is_max_min_plus());
        assert!(!E::plus(E::var(0), E::var(1)).is_max_min_plus());
        assert!(E::plus(E::constant(1), E::var(1)).is_max_min_plus());
        // ε is not a usable offset
        assert!(!E::plus(E::var(0), E::Const(EPS)).is_max_min_plus());
    }
}
