use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use super::NormError;
use crate::pwl::{LinFunc, PwlFunction};
use crate::rational::{fmt_rational, parse_rational, to_f64, Rational, RealValue};

/// Exponent of an `ℓ_p` norm.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PNorm {
    One,
    Two,
    Inf,
    /// Rational `p > 1`, handled in floating point.
    Real(Rational),
}

impl PNorm {
    pub fn dual(&self) -> PNorm {
        match self {
            PNorm::One => PNorm::Inf,
            PNorm::Inf => PNorm::One,
            PNorm::Two => PNorm::Two,
            PNorm::Real(p) => PNorm::Real(p / (p - Rational::one())),
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        matches!(self, PNorm::One | PNorm::Inf)
    }

    fn exponent_f64(&self) -> f64 {
        match self {
            PNorm::One => 1.0,
            PNorm::Two => 2.0,
            PNorm::Inf => f64::INFINITY,
            PNorm::Real(p) => to_f64(p),
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PNorm::One => f.write_str("1"),
            PNorm::Two => f.write_str("2"),
            PNorm::Inf => f.write_str("inf"),
            PNorm::Real(p) => f.write_str(&fmt_rational(p)),
        }
    }
}

impl FromStr for PNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infty" | "oo" => return Ok(PNorm::Inf),
            _ => {}
        }
        let p = parse_rational(s).ok_or_else(|| format!("invalid exponent '{s}'"))?;
        if p == Rational::one() {
            Ok(PNorm::One)
        } else if p == Rational::from_integer(2.into()) {
            Ok(PNorm::Two)
        } else if p > Rational::one() {
            Ok(PNorm::Real(p))
        } else {
            Err(format!("exponent must be >= 1, got {s}"))
        }
    }
}

/// `ℓ_p` norm of a rational vector.
pub fn lp_norm(v: &[Rational], p: &PNorm) -> RealValue {
    match p {
        PNorm::One => RealValue::Exact(v.iter().map(Signed::abs).sum()),
        PNorm::Inf => RealValue::Exact(v.iter().map(Signed::abs).max().unwrap_or_else(Rational::zero)),
        PNorm::Two => RealValue::sqrt_of(v.iter().map(|a| a * a).sum()),
        PNorm::Real(_) => RealValue::Approx(lp_norm_f64(&v.iter().map(to_f64).collect::<Vec<_>>(), p)),
    }
}

pub fn lp_norm_f64(v: &[f64], p: &PNorm) -> f64 {
    match p {
        PNorm::One => v.iter().map(|a| a.abs()).sum(),
        PNorm::Inf => v.iter().fold(0.0, |m, a| m.max(a.abs())),
        PNorm::Two => v.iter().map(|a| a * a).sum::<f64>().sqrt(),
        PNorm::Real(_) => {
            let e = p.exponent_f64();
            v.iter().map(|a| a.abs().powf(e)).sum::<f64>().powf(1.0 / e)
        }
    }
}

/// The free vector lattice on `n` generators, or the sublattice generated by
/// `E = (ℝ^m, ‖·‖_p)` inside `ℝ^{E*}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpaceSpec {
    Fvl { n: usize },
    Seq { p: PNorm, m: usize },
}

impl SpaceSpec {
    pub fn fvl(n: usize) -> Self {
        SpaceSpec::Fvl { n }
    }

    pub fn seq(p: PNorm, m: usize) -> Self {
        SpaceSpec::Seq { p, m }
    }

    /// Dimension of the dual space the realized functions live on.
    pub fn dim(&self) -> usize {
        match self {
            SpaceSpec::Fvl { n } => *n,
            SpaceSpec::Seq { m, .. } => *m,
        }
    }

    /// Norm on the underlying Banach space; generators of `FVL(n)` behave
    /// like the unit vectors of `ℓ₁^n`.
    pub fn exponent(&self) -> PNorm {
        match self {
            SpaceSpec::Fvl { .. } => PNorm::One,
            SpaceSpec::Seq { p, .. } => p.clone(),
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        self.exponent().is_polyhedral()
    }

    pub fn vector_norm(&self, x: &[Rational]) -> RealValue {
        lp_norm(x, &self.exponent())
    }

    /// Extreme points of the unit ball of `E` (one per ± pair) for polyhedral
    /// spaces: admissibility of a tuple only has to be checked there.
    pub fn ball_vertices(&self) -> Option<Vec<LinFunc>> {
        let d = self.dim();
        match self.exponent() {
            PNorm::One => Some((0..d).map(|i| LinFunc::unit(d, i)).collect()),
            PNorm::Inf => Some(sign_vectors(d)),
            _ => None,
        }
    }
}

/// `{±1}^d` with the first coordinate fixed to `+1`.
pub(crate) fn sign_vectors(d: usize) -> Vec<LinFunc> {
    (0..1usize << d.saturating_sub(1))
        .map(|mask| {
            LinFunc(
                (0..d)
                    .map(|i| {
                        let neg = i > 0 && mask & (1 << (i - 1)) != 0;
                        Rational::from_integer(if neg { (-1).into() } else { 1.into() })
                    })
                    .collect(),
            )
        })
        .collect()
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Fvl { n } => write!(f, "fvl:{n}"),
            SpaceSpec::Seq { p, m } => write!(f, "seq:{p}:{m}"),
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = String;

    /// `fvl:N` or `seq:P:M` with `P` one of `1`, `2`, `inf` or a rational `> 1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let count = |t: &str| -> Result<usize, String> {
            match t.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(format!("dimension must be a positive integer, got '{t}'")),
            }
        };
        match parts.as_slice() {
            ["fvl", n] => Ok(SpaceSpec::Fvl { n: count(n)? }),
            ["seq", p, m] => Ok(SpaceSpec::Seq { p: p.parse()?, m: count(m)? }),
            _ => Err(format!("unknown space '{s}' (expected fvl:N or seq:P:M)")),
        }
    }
}

/// Finitely many dual vectors `x₁…x_k`, inducing `f ↦ Σᵢ |f(xᵢ)|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FunctionalTuple(pub Vec<Vec<Rational>>);

impl FunctionalTuple {
    pub fn single(x: Vec<Rational>) -> Self {
        FunctionalTuple(vec![x])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.0
    }

    /// Stable text encoding, used to break ties deterministically.
    pub fn encode(&self) -> String {
        self.0
            .iter()
            .map(|p| p.iter().map(fmt_rational).join(","))
            .join(";")
    }
}

/// `sup_{‖x‖_E ≤ 1} Σᵢ |xᵢ(x)|`: the largest value the tuple seminorm takes
/// on a generator of norm one.
pub fn constraint_norm(tuple: &FunctionalTuple, space: &SpaceSpec) -> Result<RealValue, NormError> {
    if tuple.is_empty() {
        return Err(NormError::EmptyTuple);
    }
    let d = space.dim();
    if let Some(bad) = tuple.0.iter().find(|x| x.len() != d) {
        return Err(NormError::DimensionMismatch(bad.len(), d));
    }
    let k = tuple.len();
    match space.exponent() {
        PNorm::One => {
            let best = (0..d)
                .map(|j| tuple.0.iter().map(|x| x[j].abs()).sum::<Rational>())
                .max()
                .unwrap_or_else(Rational::zero);
            Ok(RealValue::Exact(best))
        }
        PNorm::Inf if k > d => {
            // Same value through the vertices of the cube, cheaper here.
            let best = sign_vectors(d)
                .iter()
                .map(|v| tuple.0.iter().map(|x| v.eval(x).abs()).sum::<Rational>())
                .max()
                .unwrap_or_else(Rational::zero);
            Ok(RealValue::Exact(best))
        }
        dual_of => {
            let q = dual_of.dual();
            let mut best_exact: Option<Rational> = None;
            let mut best_f64 = 0.0f64;
            for pattern in sign_vectors(k) {
                let combo: Vec<Rational> = (0..d)
                    .map(|j| tuple.0.iter().zip(&pattern.0).map(|(x, s)| &x[j] * s).sum())
                    .collect();
                match &q {
                    PNorm::One => {
                        let v: Rational = combo.iter().map(Signed::abs).sum();
                        best_exact = Some(best_exact.map_or(v.clone(), |b| b.max(v)));
                    }
                    PNorm::Two => {
                        let v: Rational = combo.iter().map(|a| a * a).sum();
                        best_exact = Some(best_exact.map_or(v.clone(), |b| b.max(v)));
                    }
                    other => {
                        let v = lp_norm_f64(&combo.iter().map(to_f64).collect::<Vec<_>>(), other);
                        best_f64 = best_f64.max(v);
                    }
                }
            }
            Ok(match q {
                PNorm::One => RealValue::Exact(best_exact.unwrap_or_else(Rational::zero)),
                PNorm::Two => RealValue::sqrt_of(best_exact.unwrap_or_else(Rational::zero)),
                _ => RealValue::Approx(best_f64),
            })
        }
    }
}

/// Floating point twin of [`constraint_norm`] for heuristic search.
pub(crate) fn constraint_norm_f64(points: &[Vec<f64>], space: &SpaceSpec) -> f64 {
    let d = space.dim();
    match space.exponent() {
        PNorm::One => (0..d)
            .map(|j| points.iter().map(|x| x[j].abs()).sum::<f64>())
            .fold(0.0, f64::max),
        PNorm::Inf => sign_vectors(d)
            .iter()
            .map(|v| {
                let v: Vec<f64> = v.0.iter().map(to_f64).collect();
                points.iter().map(|x| x.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>().abs()).sum::<f64>()
            })
            .fold(0.0, f64::max),
        p => {
            let q = p.dual();
            let k = points.len();
            (0..1usize << k.saturating_sub(1))
                .map(|mask| {
                    let combo: Vec<f64> = (0..d)
                        .map(|j| {
                            points
                                .iter()
                                .enumerate()
                                .map(|(i, x)| if i > 0 && mask & (1 << (i - 1)) != 0 { -x[j] } else { x[j] })
                                .sum()
                        })
                        .collect();
                    lp_norm_f64(&combo, &q)
                })
                .fold(0.0, f64::max)
        }
    }
}

/// `Σᵢ |f(xᵢ)| / max(1, constraint_norm)`: the tuple seminorm scaled into
/// admissibility, hence a certified lower bound for the norm of `f`.
pub fn tuple_seminorm_value(
    f: &PwlFunction,
    tuple: &FunctionalTuple,
    space: &SpaceSpec,
) -> Result<Rational, NormError> {
    if f.dim() != space.dim() {
        return Err(NormError::DimensionMismatch(f.dim(), space.dim()));
    }
    let c = constraint_norm(tuple, space)?;
    let mut total = Rational::zero();
    for x in &tuple.0 {
        total += f.eval(x)?.abs();
    }
    let scale = match &c {
        RealValue::Approx(_) => c.upper_rational(),
        exactish => {
            if exactish.le_rational(&Rational::one()) {
                Rational::one()
            } else {
                exactish.upper_rational()
            }
        }
    };
    Ok(total / scale.max(Rational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::rational::{frac, int};

    fn pts(v: &[&[i64]]) -> FunctionalTuple {
        FunctionalTuple(v.iter().map(|p| p.iter().map(|&a| int(a)).collect()).collect())
    }

    #[test]
    fn parses_spaces() {
        assert_eq!("fvl:3".parse::<SpaceSpec>().unwrap(), SpaceSpec::fvl(3));
        assert_eq!("seq:inf:2".parse::<SpaceSpec>().unwrap(), SpaceSpec::seq(PNorm::Inf, 2));
        assert_eq!("seq:3/2:2".parse::<SpaceSpec>().unwrap(), SpaceSpec::seq(PNorm::Real(frac(3, 2)), 2));
        assert_eq!("seq:2:4".parse::<SpaceSpec>().unwrap().to_string(), "seq:2:4");
        assert!("seq:1/2:2".parse::<SpaceSpec>().is_err());
        assert!("fvl:0".parse::<SpaceSpec>().is_err());
        assert!("l2".parse::<SpaceSpec>().is_err());
    }

    #[test]
    fn constraint_norm_examples() {
        assert_eq!(constraint_norm(&pts(&[&[1, 0], &[0, 1]]), &SpaceSpec::fvl(2)).unwrap(), RealValue::Exact(int(1)));
        assert_eq!(constraint_norm(&pts(&[&[1], &[-1]]), &SpaceSpec::fvl(1)).unwrap(), RealValue::Exact(int(2)));
        assert_eq!(
            constraint_norm(&pts(&[&[1, 0]]), &SpaceSpec::seq(PNorm::Two, 2)).unwrap(),
            RealValue::Exact(int(1))
        );
        assert_eq!(constraint_norm(&FunctionalTuple::default(), &SpaceSpec::fvl(1)), Err(NormError::EmptyTuple));
    }

    #[test]
    fn cube_vertices_match_sign_patterns() {
        // For ℓ∞ the sign-pattern formula and the cube-vertex formula agree.
        let space = SpaceSpec::seq(PNorm::Inf, 2);
        let t = pts(&[&[1, 2], &[-3, 1], &[2, -2]]);
        let via_vertices = constraint_norm(&t, &space).unwrap();
        let mut best = int(0);
        for s in sign_vectors(3) {
            let combo: Vec<Rational> = (0..2).map(|j| (0..3).map(|i| &t.0[i][j] * &s.0[i]).sum()).collect();
            best = best.max(combo.iter().map(|a| a.abs()).sum());
        }
        assert_eq!(via_vertices, RealValue::Exact(best));
    }

    #[test]
    fn tuple_values() {
        let gen = PwlFunction::free(parse("t1", 1).unwrap(), 1).unwrap();
        assert_eq!(tuple_seminorm_value(&gen, &pts(&[&[1]]), &SpaceSpec::fvl(1)).unwrap(), int(1));
        let join = PwlFunction::free(parse("t1 \\/ t2", 2).unwrap(), 2).unwrap();
        assert_eq!(tuple_seminorm_value(&join, &pts(&[&[1, 0], &[0, 1]]), &SpaceSpec::fvl(2)).unwrap(), int(2));
        assert_eq!(tuple_seminorm_value(&join, &pts(&[&[0, 0]]), &SpaceSpec::fvl(2)).unwrap(), int(0));
        // Inadmissible tuples are scaled down.
        assert_eq!(tuple_seminorm_value(&gen, &pts(&[&[3]]), &SpaceSpec::fvl(1)).unwrap(), int(1));
    }

    #[test]
    fn float_constraint_norm_agrees() {
        for space in [SpaceSpec::fvl(2), SpaceSpec::seq(PNorm::Inf, 2), SpaceSpec::seq(PNorm::Two, 2)] {
            let t = pts(&[&[1, 2], &[-3, 1]]);
            let exact = constraint_norm(&t, &space).unwrap().to_f64();
            let float: Vec<Vec<f64>> = t.0.iter().map(|p| p.iter().map(to_f64).collect()).collect();
            assert!((constraint_norm_f64(&float, &space) - exact).abs() < 1e-12, "{space}");
        }
    }
}
