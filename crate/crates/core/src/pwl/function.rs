use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::expr::{Expr, ExprError};
use crate::linalg::independent_reduction;
use crate::rational::{fmt_rational, primitive_integer, Rational};

/// A linear functional on `ℚ^d`, stored by its coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinFunc(pub Vec<Rational>);

impl LinFunc {
    pub fn zero(dim: usize) -> Self {
        LinFunc(vec![Rational::zero(); dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![Rational::zero(); dim];
        v[i] = Rational::one();
        LinFunc(v)
    }

    pub fn from_ints(v: &[i64]) -> Self {
        LinFunc(v.iter().map(|&a| Rational::from_integer(BigInt::from(a))).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.0
            .iter()
            .zip(x)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(a, b)| crate::rational::to_f64(a) * b).sum()
    }

    pub fn add(&self, other: &LinFunc) -> LinFunc {
        LinFunc(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LinFunc) -> LinFunc {
        LinFunc(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Rational) -> LinFunc {
        LinFunc(self.0.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> LinFunc {
        LinFunc(self.0.iter().map(|a| -a.clone()).collect())
    }

    /// Representative of the hyperplane `{ℓ = 0}`: primitive integer vector
    /// whose first nonzero coordinate is positive. `None` for the zero functional.
    pub fn canonical_normal(&self) -> Option<LinFunc> {
        if self.is_zero() {
            return None;
        }
        let mut ints = primitive_integer(&self.0);
        if ints.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
            ints = ints.into_iter().map(|x| -x).collect();
        }
        Some(LinFunc(ints.into_iter().map(Rational::from_integer).collect()))
    }
}

impl fmt::Display for LinFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PwlError {
    #[error("ambient dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("expression uses t{needed} but only {rows} composition rows are given")]
    MissingRows { needed: usize, rows: usize },
    #[error("all functionals are zero; the arrangement is the whole space")]
    Degenerate,
    #[error("region is unbounded")]
    UnboundedRegion,
    #[error("internal invariant violated: {0}")]
    Fault(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// `f(x) = expr(Mx)` for a lattice-linear expression and a rational matrix
/// whose rows feed the expression's variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PwlFunction {
    dim: usize,
    expr: Expr,
    rows: Vec<LinFunc>,
}

impl PwlFunction {
    pub fn new(expr: Expr, rows: Vec<LinFunc>, dim: usize) -> Result<Self, PwlError> {
        if expr.max_var() > rows.len() {
            return Err(PwlError::MissingRows { needed: expr.max_var(), rows: rows.len() });
        }
        if let Some(bad) = rows.iter().find(|r| r.dim() != dim) {
            return Err(PwlError::DimensionMismatch(bad.dim(), dim));
        }
        Ok(Self { dim, expr, rows })
    }

    /// Element of the free vector lattice on `n` generators: the composition
    /// matrix is the identity.
    pub fn free(expr: Expr, n: usize) -> Result<Self, PwlError> {
        Self::new(expr, (0..n).map(|i| LinFunc::unit(n, i)).collect(), n)
    }

    pub fn linear(l: LinFunc) -> Self {
        let dim = l.dim();
        Self { dim, expr: Expr::Var(1), rows: vec![l] }
    }

    pub fn zero(dim: usize) -> Self {
        Self::linear(LinFunc::zero(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn rows(&self) -> &[LinFunc] {
        &self.rows
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Rational, PwlError> {
        if x.len() != self.dim {
            return Err(PwlError::DimensionMismatch(x.len(), self.dim));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[Rational]) -> Rational {
        let y: Vec<Rational> = self.rows.iter().map(|r| r.eval(x)).collect();
        self.expr.eval_unchecked(&y)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = self.rows.iter().map(|r| r.eval_f64(x)).collect();
        self.expr.eval_f64(&y)
    }

    fn binary(&self, other: &PwlFunction, op: fn(Expr, Expr) -> Expr) -> Result<PwlFunction, PwlError> {
        if self.dim != other.dim {
            return Err(PwlError::DimensionMismatch(self.dim, other.dim));
        }
        let expr = op(self.expr.clone(), other.expr.shift_vars(self.rows.len()));
        let rows = self.rows.iter().chain(&other.rows).cloned().collect();
        Ok(PwlFunction { dim: self.dim, expr, rows })
    }

    pub fn plus(&self, other: &PwlFunction) -> Result<PwlFunction, PwlError> {
        self.binary(other, Expr::add)
    }

    pub fn minus(&self, other: &PwlFunction) -> Result<PwlFunction, PwlError> {
        self.binary(other, Expr::sub)
    }

    pub fn sup(&self, other: &PwlFunction) -> Result<PwlFunction, PwlError> {
        self.binary(other, Expr::sup)
    }

    pub fn inf(&self, other: &PwlFunction) -> Result<PwlFunction, PwlError> {
        self.binary(other, Expr::inf)
    }

    pub fn scaled(&self, c: &Rational) -> PwlFunction {
        PwlFunction { dim: self.dim, expr: Expr::scale(c.clone(), self.expr.clone()), rows: self.rows.clone() }
    }

    pub fn abs(&self) -> PwlFunction {
        PwlFunction { dim: self.dim, expr: Expr::abs(self.expr.clone()), rows: self.rows.clone() }
    }

    /// Candidate linear pieces: a finite set containing every functional `f`
    /// coincides with on some open region.
    pub fn linear_pieces(&self) -> BTreeSet<LinFunc> {
        pieces_of(&self.expr, &self.rows)
    }

    /// Hyperplanes across which `f` can change its linear piece: at every
    /// `∨`/`∧` node, the differences between a piece of the left operand and
    /// a piece of the right one. `f` is linear on every cell of the
    /// arrangement they generate.
    pub fn breakpoints(&self) -> BTreeSet<LinFunc> {
        let mut out = BTreeSet::new();
        breakpoints_of(&self.expr, &self.rows, &mut out);
        out
    }

    /// Drops unused variables and rewrites dependent rows in terms of a
    /// maximal independent subset, leaving the function unchanged.
    pub fn reduced(&self) -> PwlFunction {
        self.reduction().0
    }

    /// [`PwlFunction::reduced`] together with the (1-based) variables whose
    /// rows were kept; empty when every used row is zero.
    pub fn reduction(&self) -> (PwlFunction, Vec<usize>) {
        let used = self.expr.vars();
        let vectors: Vec<Vec<Rational>> = used.iter().map(|&v| self.rows[v - 1].0.clone()).collect();
        let red = independent_reduction(&vectors);
        if red.basis.is_empty() {
            return (PwlFunction::zero(self.dim), Vec::new());
        }
        let mut images = vec![Expr::zero(); self.rows.len()];
        for (k, &v) in used.iter().enumerate() {
            let terms: Vec<(usize, Rational)> =
                red.coords[k].iter().enumerate().map(|(b, c)| (b + 1, c.clone())).collect();
            images[v - 1] = Expr::linear_combination(&terms);
        }
        let expr = self.expr.substitute(&images).expect("images cover every variable");
        let rows = red.basis.iter().map(|&b| LinFunc(vectors[b].clone())).collect();
        let kept = red.basis.iter().map(|&b| used[b]).collect();
        (PwlFunction { dim: self.dim, expr, rows }, kept)
    }
}

fn pieces_of(e: &Expr, rows: &[LinFunc]) -> BTreeSet<LinFunc> {
    match e {
        Expr::Var(i) => BTreeSet::from([rows[*i - 1].clone()]),
        Expr::Scale(c, inner) => pieces_of(inner, rows).iter().map(|l| l.scale(c)).collect(),
        Expr::Add(a, b) => {
            let left = pieces_of(a, rows);
            let right = pieces_of(b, rows);
            left.iter().flat_map(|l| right.iter().map(move |r| l.add(r))).collect()
        }
        Expr::Sup(a, b) | Expr::Inf(a, b) => {
            let mut out = pieces_of(a, rows);
            out.extend(pieces_of(b, rows));
            out
        }
    }
}

fn breakpoints_of(e: &Expr, rows: &[LinFunc], out: &mut BTreeSet<LinFunc>) {
    match e {
        Expr::Var(_) => {}
        Expr::Scale(c, inner) => {
            if !c.is_zero() {
                breakpoints_of(inner, rows, out);
            }
        }
        Expr::Add(a, b) => {
            breakpoints_of(a, rows, out);
            breakpoints_of(b, rows, out);
        }
        Expr::Sup(a, b) | Expr::Inf(a, b) => {
            breakpoints_of(a, rows, out);
            breakpoints_of(b, rows, out);
            let left = pieces_of(a, rows);
            let right = pieces_of(b, rows);
            for l in &left {
                for r in &right {
                    if let Some(h) = l.sub(r).canonical_normal() {
                        out.insert(h);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::rational::int;

    #[test]
    fn canonical_normals() {
        let h = LinFunc::from_ints(&[-2, 4, 0]).canonical_normal().unwrap();
        assert_eq!(h, LinFunc::from_ints(&[1, -2, 0]));
        let h = LinFunc(vec![int(0), int(3) / int(4), int(-3) / int(2)]).canonical_normal().unwrap();
        assert_eq!(h, LinFunc::from_ints(&[0, 1, -2]));
        assert!(LinFunc::zero(2).canonical_normal().is_none());
    }

    #[test]
    fn pieces_of_join() {
        let f = PwlFunction::free(parse("t1 \\/ t2", 2).unwrap(), 2).unwrap();
        let want: BTreeSet<_> = [LinFunc::from_ints(&[1, 0]), LinFunc::from_ints(&[0, 1])].into();
        assert_eq!(f.linear_pieces(), want);
    }

    #[test]
    fn pieces_of_generator() {
        let f = PwlFunction::free(parse("t1", 1).unwrap(), 1).unwrap();
        assert_eq!(f.linear_pieces(), BTreeSet::from([LinFunc::from_ints(&[1])]));
    }

    #[test]
    fn pieces_of_mixed_example() {
        let f = PwlFunction::free(parse("t1 /\\ t2 + t1 \\/ (2*t3)", 3).unwrap(), 3).unwrap();
        let want: BTreeSet<_> = [[2, 0, 0], [1, 0, 2], [1, 1, 0], [0, 1, 2]]
            .iter()
            .map(|v| LinFunc::from_ints(v))
            .collect();
        assert_eq!(f.linear_pieces(), want);
        let bp: BTreeSet<_> = [[1, -1, 0], [1, 0, -2]].iter().map(|v| LinFunc::from_ints(v)).collect();
        assert_eq!(f.breakpoints(), bp);
    }

    #[test]
    fn reduction_keeps_values() {
        let rows = vec![LinFunc::from_ints(&[1, 0]), LinFunc::from_ints(&[0, 1]), LinFunc::from_ints(&[1, 1])];
        let f = PwlFunction::new(parse("t3 - t1 \\/ t2", 3).unwrap(), rows, 2).unwrap();
        let r = f.reduced();
        assert_eq!(r.rows().len(), 2);
        for x in [[1, 2], [-3, 1], [0, -5], [2, 2]] {
            let x: Vec<Rational> = x.iter().map(|&a| int(a)).collect();
            assert_eq!(f.eval(&x).unwrap(), r.eval(&x).unwrap());
        }
    }

    #[test]
    fn composition_checks_shapes() {
        assert!(matches!(
            PwlFunction::new(parse("t2", 2).unwrap(), vec![LinFunc::from_ints(&[1])], 1),
            Err(PwlError::MissingRows { .. })
        ));
        assert!(matches!(
            PwlFunction::new(parse("t1", 1).unwrap(), vec![LinFunc::from_ints(&[1, 0])], 1),
            Err(PwlError::DimensionMismatch(2, 1))
        ));
    }
}
