//! Lattice-linear expressions: variables combined with rational scaling,
//! addition, supremum and infimum.
//!
//! The surface syntax also accepts `|e|`, `e^+`, `e^-`, unary and binary
//! minus; all of them are expanded while parsing so the tree only ever holds
//! the five core node kinds.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{fmt_rational, int, parse_rational, to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    /// 1-based variable index.
    Var(usize),
    Scale(Rational, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sup(Box<Expr>, Box<Expr>),
    Inf(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("variable t{index} exceeds arity {arity}")]
    ArityExceeded { index: usize, arity: usize },
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn scale(c: Rational, e: Expr) -> Expr {
        Expr::Scale(c, Box::new(e))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sup(a: Expr, b: Expr) -> Expr {
        Expr::Sup(Box::new(a), Box::new(b))
    }

    pub fn inf(a: Expr, b: Expr) -> Expr {
        Expr::Inf(Box::new(a), Box::new(b))
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::scale(-Rational::one(), e)
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::add(a, Expr::neg(b))
    }

    /// `|e| = e ∨ (−e)`.
    pub fn abs(e: Expr) -> Expr {
        Expr::sup(e.clone(), Expr::neg(e))
    }

    /// `e⁺ = e ∨ 0·e`.
    pub fn pos(e: Expr) -> Expr {
        Expr::sup(e.clone(), Expr::scale(Rational::zero(), e))
    }

    /// `e⁻ = (−e) ∨ 0·e`.
    pub fn negpart(e: Expr) -> Expr {
        Expr::sup(Expr::neg(e.clone()), Expr::scale(Rational::zero(), e))
    }

    /// The zero element written over the first variable.
    pub fn zero() -> Expr {
        Expr::scale(Rational::zero(), Expr::Var(1))
    }

    /// Largest variable index that occurs (0 never occurs, so this is also
    /// the minimal arity).
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Var(i) => *i,
            Expr::Scale(_, e) => e.max_var(),
            Expr::Add(a, b) | Expr::Sup(a, b) | Expr::Inf(a, b) => a.max_var().max(b.max_var()),
        }
    }

    pub fn vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Var(i) => out.push(*i),
            Expr::Scale(_, e) => e.collect_vars(out),
            Expr::Add(a, b) | Expr::Sup(a, b) | Expr::Inf(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Var(_) => 1,
            Expr::Scale(_, e) => 1 + e.node_count(),
            Expr::Add(a, b) | Expr::Sup(a, b) | Expr::Inf(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    /// Exact evaluation; `x[i-1]` feeds `Var(i)`.
    pub fn eval(&self, x: &[Rational]) -> Result<Rational, ExprError> {
        let need = self.max_var();
        if need > x.len() {
            return Err(ExprError::DimensionMismatch { expected: need, got: x.len() });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[Rational]) -> Rational {
        match self {
            Expr::Var(i) => x[*i - 1].clone(),
            Expr::Scale(c, e) => {
                if c.is_zero() {
                    Rational::zero()
                } else {
                    c * e.eval_unchecked(x)
                }
            }
            Expr::Add(a, b) => a.eval_unchecked(x) + b.eval_unchecked(x),
            Expr::Sup(a, b) => a.eval_unchecked(x).max(b.eval_unchecked(x)),
            Expr::Inf(a, b) => a.eval_unchecked(x).min(b.eval_unchecked(x)),
        }
    }

    /// Floating point evaluation for heuristics; never used for certified values.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Var(i) => x[*i - 1],
            Expr::Scale(c, e) => to_f64(c) * e.eval_f64(x),
            Expr::Add(a, b) => a.eval_f64(x) + b.eval_f64(x),
            Expr::Sup(a, b) => a.eval_f64(x).max(b.eval_f64(x)),
            Expr::Inf(a, b) => a.eval_f64(x).min(b.eval_f64(x)),
        }
    }

    /// Evaluates with every variable replaced by a vector and the operations
    /// taken coordinatewise, which is how the expression acts in a
    /// coordinate lattice `ℝ^r`.
    pub fn eval_coordinatewise(&self, images: &[Vec<Rational>], dim: usize) -> Vec<Rational> {
        (0..dim)
            .map(|c| {
                let column: Vec<Rational> = images.iter().map(|v| v[c].clone()).collect();
                self.eval_unchecked(&column)
            })
            .collect()
    }

    /// Replaces `Var(i)` by `images[i-1]`.
    pub fn substitute(&self, images: &[Expr]) -> Result<Expr, ExprError> {
        let need = self.max_var();
        if need > images.len() {
            return Err(ExprError::DimensionMismatch { expected: need, got: images.len() });
        }
        Ok(self.substitute_unchecked(images))
    }

    fn substitute_unchecked(&self, images: &[Expr]) -> Expr {
        match self {
            Expr::Var(i) => images[*i - 1].clone(),
            Expr::Scale(c, e) => Expr::scale(c.clone(), e.substitute_unchecked(images)),
            Expr::Add(a, b) => Expr::add(a.substitute_unchecked(images), b.substitute_unchecked(images)),
            Expr::Sup(a, b) => Expr::sup(a.substitute_unchecked(images), b.substitute_unchecked(images)),
            Expr::Inf(a, b) => Expr::inf(a.substitute_unchecked(images), b.substitute_unchecked(images)),
        }
    }

    /// Renumbers `Var(i)` to `Var(i + offset)`.
    pub fn shift_vars(&self, offset: usize) -> Expr {
        match self {
            Expr::Var(i) => Expr::Var(i + offset),
            Expr::Scale(c, e) => Expr::scale(c.clone(), e.shift_vars(offset)),
            Expr::Add(a, b) => Expr::add(a.shift_vars(offset), b.shift_vars(offset)),
            Expr::Sup(a, b) => Expr::sup(a.shift_vars(offset), b.shift_vars(offset)),
            Expr::Inf(a, b) => Expr::inf(a.shift_vars(offset), b.shift_vars(offset)),
        }
    }

    /// Linear combination `Σ cᵢ·t_{vars[i]}` as an expression; the zero
    /// combination becomes `0*t1`.
    pub fn linear_combination(terms: &[(usize, Rational)]) -> Expr {
        let mut out: Option<Expr> = None;
        for (v, c) in terms.iter().filter(|(_, c)| !c.is_zero()) {
            let term = if c.is_one() { Expr::Var(*v) } else { Expr::scale(c.clone(), Expr::Var(*v)) };
            out = Some(match out {
                None => term,
                Some(acc) => Expr::add(acc, term),
            });
        }
        out.unwrap_or_else(Expr::zero)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

/// Canonical text: operands that are not bare variables are parenthesized,
/// so `parse(print(e)) == e` holds structurally.
pub fn print(e: &Expr) -> String {
    fn operand(e: &Expr) -> String {
        match e {
            Expr::Var(i) => format!("t{i}"),
            other => format!("({})", print(other)),
        }
    }
    match e {
        Expr::Var(i) => format!("t{i}"),
        Expr::Scale(c, inner) => format!("{}*{}", fmt_rational(c), operand(inner)),
        Expr::Add(a, b) => format!("{} + {}", operand(a), operand(b)),
        Expr::Sup(a, b) => format!("{} \\/ {}", operand(a), operand(b)),
        Expr::Inf(a, b) => format!("{} /\\ {}", operand(a), operand(b)),
    }
}

/// Parses the surface syntax and checks every variable against `arity`.
pub fn parse(text: &str, arity: usize) -> Result<Expr, ExprError> {
    let mut parser = Parser { src: text.as_bytes(), pos: 0 };
    let e = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    let max = e.max_var();
    if max > arity {
        return Err(ExprError::ArityExceeded { index: max, arity });
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ExprError {
        ExprError::Syntax { position: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    // expr := join (("+" | "-") join)*
    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.join()?;
        loop {
            if self.eat("+") {
                acc = Expr::add(acc, self.join()?);
            } else if self.peek() == Some(b'-') {
                self.pos += 1;
                acc = Expr::sub(acc, self.join()?);
            } else {
                return Ok(acc);
            }
        }
    }

    // join := meet ("\/" meet)*
    fn join(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.meet()?;
        while self.eat("\\/") {
            acc = Expr::sup(acc, self.meet()?);
        }
        Ok(acc)
    }

    // meet := factor ("/\" factor)*
    fn meet(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.factor()?;
        while self.eat("/\\") {
            acc = Expr::inf(acc, self.factor()?);
        }
        Ok(acc)
    }

    // factor := rational "*" factor | "-" factor | primary ("^+" | "^-")*
    fn factor(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'0'..=b'9') => {
                let c = self.rational()?;
                if !self.eat("*") {
                    return Err(self.error("expected '*' after coefficient"));
                }
                Ok(Expr::scale(c, self.factor()?))
            }
            Some(b'-') => {
                self.pos += 1;
                if matches!(self.src.get(self.pos), Some(b'0'..=b'9')) {
                    let c = self.rational()?;
                    if !self.eat("*") {
                        return Err(self.error("expected '*' after coefficient"));
                    }
                    Ok(Expr::scale(-c, self.factor()?))
                } else {
                    Ok(Expr::neg(self.factor()?))
                }
            }
            _ => {
                let mut e = self.primary()?;
                loop {
                    if self.eat("^+") {
                        e = Expr::pos(e);
                    } else if self.eat("^-") {
                        e = Expr::negpart(e);
                    } else {
                        return Ok(e);
                    }
                }
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(")") {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(b'|') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat("|") {
                    return Err(self.error("expected closing '|'"));
                }
                Ok(Expr::abs(e))
            }
            Some(b't') => {
                self.pos += 1;
                let start = self.pos;
                while matches!(self.src.get(self.pos), Some(b'0'..=b'9')) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match digits.parse::<usize>() {
                    Ok(i) if i >= 1 => Ok(Expr::Var(i)),
                    _ => {
                        self.pos = start;
                        Err(self.error("expected variable index >= 1 after 't'"))
                    }
                }
            }
            Some(_) => Err(self.error("expected variable, '(' or '|'")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn rational(&mut self) -> Result<Rational, ExprError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while matches!(p.src.get(p.pos), Some(b'0'..=b'9')) {
                p.pos += 1;
            }
            p.pos > s
        };
        if !digits(self) {
            return Err(self.error("expected integer"));
        }
        // "/" followed by a digit is a fraction bar; "/\" is the meet operator.
        if self.src.get(self.pos) == Some(&b'/') && matches!(self.src.get(self.pos + 1), Some(b'0'..=b'9')) {
            self.pos += 1;
            digits(self);
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match parse_rational(text) {
            Some(q) => Ok(q),
            None => {
                self.pos = start;
                Err(self.error("denominator must be positive"))
            }
        }
    }
}

/// Coefficient magnitude bound, handy for random generators and tests.
pub fn max_abs_coefficient(e: &Expr) -> Rational {
    match e {
        Expr::Var(_) => int(1),
        Expr::Scale(c, inner) => c.abs().max(max_abs_coefficient(inner)),
        Expr::Add(a, b) | Expr::Sup(a, b) | Expr::Inf(a, b) => max_abs_coefficient(a).max(max_abs_coefficient(b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn t(i: usize) -> Expr {
        Expr::Var(i)
    }

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn parses_the_mixed_example() {
        let e = parse("t1 /\\ t2 + t1 \\/ (2*t3)", 3).unwrap();
        let want = Expr::add(Expr::inf(t(1), t(2)), Expr::sup(t(1), Expr::scale(int(2), t(3))));
        assert_eq!(e, want);
        assert_eq!(e.eval(&q(&[1, 2, 3])).unwrap(), int(7));
    }

    #[test]
    fn parses_single_variable() {
        assert_eq!(parse("t1", 1).unwrap(), t(1));
    }

    #[test]
    fn expands_sugar() {
        let e = parse("|t1| - t2^+", 2).unwrap();
        let want = Expr::add(
            Expr::sup(t(1), Expr::scale(int(-1), t(1))),
            Expr::scale(int(-1), Expr::sup(t(2), Expr::scale(int(0), t(2)))),
        );
        assert_eq!(e, want);
        let neg = parse("t1^-", 1).unwrap();
        assert_eq!(neg.eval(&q(&[-3])).unwrap(), int(3));
        assert_eq!(neg.eval(&q(&[3])).unwrap(), int(0));
    }

    #[test]
    fn meet_binds_tighter_than_join() {
        let e = parse("t1 \\/ t2 /\\ t3", 3).unwrap();
        assert_eq!(e, Expr::sup(t(1), Expr::inf(t(2), t(3))));
        let e = parse("t1 - t2 - t3", 3).unwrap();
        assert_eq!(e, Expr::sub(Expr::sub(t(1), t(2)), t(3)));
    }

    #[test]
    fn fractions_and_negative_coefficients() {
        let e = parse("3/2*t1 + -1/3*t2", 2).unwrap();
        assert_eq!(e, Expr::add(Expr::scale(frac(3, 2), t(1)), Expr::scale(frac(-1, 3), t(2))));
        let e = parse("-t1", 1).unwrap();
        assert_eq!(e, Expr::neg(t(1)));
        // fraction bar next to a meet operator
        let e = parse("2*t1/\\t2", 2).unwrap();
        assert_eq!(e, Expr::inf(Expr::scale(int(2), t(1)), t(2)));
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse("t1 + ", 1) {
            Err(ExprError::Syntax { position, .. }) => assert_eq!(position, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(parse("t3", 2), Err(ExprError::ArityExceeded { index: 3, arity: 2 }));
        assert!(matches!(parse("(t1", 1), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("t0", 1), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("1/0*t1", 1), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("2 t1", 1), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn eval_examples() {
        let e = parse("t1 \\/ t2", 2).unwrap();
        assert_eq!(e.eval(&q(&[3, -1])).unwrap(), int(3));
        assert_eq!(e.eval(&q(&[0, 0])).unwrap(), int(0));
        assert_eq!(e.eval(&q(&[1])), Err(ExprError::DimensionMismatch { expected: 2, got: 1 }));
    }

    #[test]
    fn substitute_examples() {
        let e = parse("t1 \\/ t2", 2).unwrap();
        let imgs = vec![parse("t1 + t2", 2).unwrap(), t(1)];
        let s = e.substitute(&imgs).unwrap();
        assert_eq!(s, Expr::sup(Expr::add(t(1), t(2)), t(1)));

        let id: Vec<Expr> = (1..=2).map(t).collect();
        assert_eq!(e.substitute(&id).unwrap(), e);

        // |2t1 - t2| at (1, 3) = |2 - 3| = 1
        let a = parse("|t1|", 1).unwrap();
        let s = a.substitute(&[parse("2*t1 - t2", 2).unwrap()]).unwrap();
        assert_eq!(s.eval(&q(&[1, 3])).unwrap(), int(1));
        assert!(a.substitute(&[]).is_err());
    }

    #[test]
    fn print_examples() {
        assert_eq!(print(&t(1)), "t1");
        assert_eq!(print(&Expr::sup(t(1), Expr::scale(int(2), t(3)))), "t1 \\/ (2*t3)");
        assert_eq!(print(&Expr::add(Expr::inf(t(1), t(2)), t(3))), "(t1 /\\ t2) + t3");
        assert_eq!(print(&Expr::scale(frac(-3, 2), t(1))), "-3/2*t1");
    }

    #[test]
    fn linear_combinations() {
        let e = Expr::linear_combination(&[(1, int(1)), (2, int(-2)), (3, int(0))]);
        assert_eq!(e.eval(&q(&[5, 1, 100])).unwrap(), int(3));
        assert_eq!(Expr::linear_combination(&[]), Expr::zero());
    }
}
