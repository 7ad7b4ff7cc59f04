//! Elements of the free lattices, lattice homomorphisms out of them into
//! finite-dimensional Banach lattices, and the seminorms they pull back.

use num_traits::{Signed, Zero};

use crate::expr::Expr;
use crate::linalg::independent_reduction;
use crate::norm::{lp_norm, LatticeSeminorm, NormCertificate, NormError, PNorm, SpaceSpec};
use crate::pwl::{equivalent, LinFunc, PwlError, PwlFunction};
use crate::rational::{Rational, RealValue};

/// `expr(x̂₁, …, x̂_k)` with linearly independent `xᵢ`, together with the
/// function it realizes on the dual space. The zero element is the one
/// exception: a single zero vector under `0·t1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeElement {
    pub space: SpaceSpec,
    pub vectors: Vec<Vec<Rational>>,
    pub expr: Expr,
    pub realized: PwlFunction,
}

impl FreeElement {
    pub fn zero(space: &SpaceSpec) -> Self {
        let d = space.dim();
        FreeElement {
            space: space.clone(),
            vectors: vec![vec![Rational::zero(); d]],
            expr: Expr::zero(),
            realized: PwlFunction::new(Expr::zero(), vec![LinFunc::zero(d)], d).expect("one row"),
        }
    }

    /// The `i`-th generator (1-based) of `FVL(n)`, or `x̂` for the `i`-th unit
    /// vector of a sequence space.
    pub fn generator(space: &SpaceSpec, i: usize) -> Result<Self, NormError> {
        let d = space.dim();
        if i == 0 || i > d {
            return Err(NormError::DimensionMismatch(i, d));
        }
        embed(space, &LinFunc::unit(d, i - 1).0)
    }

    pub fn function(&self) -> &PwlFunction {
        &self.realized
    }

    pub fn is_zero(&self) -> Result<bool, NormError> {
        Ok(equivalent(&self.realized, &PwlFunction::zero(self.space.dim()))?.is_equal())
    }

    fn combine(&self, other: &FreeElement, op: fn(Expr, Expr) -> Expr) -> Result<FreeElement, NormError> {
        if self.space != other.space {
            return Err(NormError::DimensionMismatch(self.space.dim(), other.space.dim()));
        }
        let vectors: Vec<Vec<Rational>> = self.vectors.iter().chain(&other.vectors).cloned().collect();
        let expr = op(self.expr.clone(), other.expr.shift_vars(self.vectors.len()));
        make_element(&self.space, &vectors, &expr)
    }

    pub fn plus(&self, other: &FreeElement) -> Result<FreeElement, NormError> {
        self.combine(other, Expr::add)
    }

    pub fn minus(&self, other: &FreeElement) -> Result<FreeElement, NormError> {
        self.combine(other, Expr::sub)
    }

    pub fn sup(&self, other: &FreeElement) -> Result<FreeElement, NormError> {
        self.combine(other, Expr::sup)
    }

    pub fn inf(&self, other: &FreeElement) -> Result<FreeElement, NormError> {
        self.combine(other, Expr::inf)
    }

    pub fn scaled(&self, c: &Rational) -> Result<FreeElement, NormError> {
        make_element(&self.space, &self.vectors, &Expr::scale(c.clone(), self.expr.clone()))
    }

    pub fn abs(&self) -> Result<FreeElement, NormError> {
        make_element(&self.space, &self.vectors, &Expr::abs(self.expr.clone()))
    }
}

/// `x̂`, the evaluation at `x` of functionals on `E`.
pub fn embed(space: &SpaceSpec, x: &[Rational]) -> Result<FreeElement, NormError> {
    if x.len() != space.dim() {
        return Err(NormError::DimensionMismatch(x.len(), space.dim()));
    }
    if x.iter().all(Zero::is_zero) {
        return Ok(FreeElement::zero(space));
    }
    let realized = PwlFunction::linear(LinFunc(x.to_vec()));
    Ok(FreeElement { space: space.clone(), vectors: vec![x.to_vec()], expr: Expr::Var(1), realized })
}

/// `expr(x̂₁, …, x̂_k)`, with dependent vectors replaced by combinations of
/// an independent subset. The rewrite is checked to realize the same function.
pub fn make_element(space: &SpaceSpec, vectors: &[Vec<Rational>], expr: &Expr) -> Result<FreeElement, NormError> {
    let d = space.dim();
    if let Some(bad) = vectors.iter().find(|v| v.len() != d) {
        return Err(NormError::DimensionMismatch(bad.len(), d));
    }
    let rows: Vec<LinFunc> = vectors.iter().cloned().map(LinFunc).collect();
    let original = PwlFunction::new(expr.clone(), rows, d)?;
    let (reduced, kept) = original.reduction();
    if kept.is_empty() {
        return Ok(FreeElement::zero(space));
    }
    if !equivalent(&original, &reduced)?.is_equal() {
        return Err(NormError::Fault("reduction changed the realized function".into()));
    }
    let independent = independent_reduction(&reduced.rows().iter().map(|r| r.0.clone()).collect::<Vec<_>>());
    if independent.basis.len() != reduced.rows().len() {
        return Err(NormError::Fault("reduced vectors are dependent".into()));
    }
    Ok(FreeElement {
        space: space.clone(),
        vectors: reduced.rows().iter().map(|r| r.0.clone()).collect(),
        expr: reduced.expr().clone(),
        realized: reduced,
    })
}

/// `ℝ^r` with the coordinatewise order and the `ℓ_p` norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetLattice {
    pub r: usize,
    pub p: PNorm,
}

impl TargetLattice {
    pub fn new(r: usize, p: PNorm) -> Self {
        TargetLattice { r, p }
    }

    pub fn norm(&self, y: &[Rational]) -> RealValue {
        lp_norm(y, &self.p)
    }
}

/// A bounded operator `T : E → ℝ^r` (an `r × d` matrix). A map on the
/// generators of `FVL(n)` is the operator on `ℓ₁^n` whose columns are the
/// generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeMap {
    pub matrix: Vec<Vec<Rational>>,
}

impl LatticeMap {
    pub fn from_generator_images(images: &[Vec<Rational>]) -> Result<Self, NormError> {
        let r = images.first().map_or(0, Vec::len);
        if let Some(bad) = images.iter().find(|y| y.len() != r) {
            return Err(NormError::DimensionMismatch(bad.len(), r));
        }
        let matrix = (0..r).map(|i| images.iter().map(|y| y[i].clone()).collect()).collect();
        Ok(LatticeMap { matrix })
    }

    pub fn from_matrix(matrix: Vec<Vec<Rational>>) -> Result<Self, NormError> {
        let d = matrix.first().map_or(0, Vec::len);
        if let Some(bad) = matrix.iter().find(|row| row.len() != d) {
            return Err(NormError::DimensionMismatch(bad.len(), d));
        }
        Ok(LatticeMap { matrix })
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        self.matrix.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn scaled(&self, c: &Rational) -> LatticeMap {
        LatticeMap { matrix: self.matrix.iter().map(|row| row.iter().map(|a| a * c).collect()).collect() }
    }

    fn check(&self, space: &SpaceSpec, target: &TargetLattice) -> Result<(), NormError> {
        if self.cols() != space.dim() {
            return Err(NormError::DimensionMismatch(self.cols(), space.dim()));
        }
        if self.rows() != target.r {
            return Err(NormError::DimensionMismatch(self.rows(), target.r));
        }
        Ok(())
    }
}

/// An upper bound for an operator norm, flagged when it is the norm itself.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorBound {
    pub upper: Rational,
    pub exact: bool,
}

/// `‖T : E → ℓ_p^r‖`. Exact when the domain ball is a polytope (its
/// vertices are enumerated) and the target norm is rational on them;
/// otherwise a row-norm estimate.
pub fn operator_norm_bound(map: &LatticeMap, space: &SpaceSpec, target: &TargetLattice) -> Result<OperatorBound, NormError> {
    map.check(space, target)?;
    if let Some(vertices) = space.ball_vertices() {
        let mut upper = Rational::zero();
        let mut exact = true;
        for v in vertices {
            let n = target.norm(&map.apply(&v.0));
            exact &= n.is_exact();
            upper = upper.max(n.upper_rational());
        }
        return Ok(OperatorBound { upper, exact });
    }
    let q = space.exponent().dual();
    let row_norms: Vec<RealValue> = map.matrix.iter().map(|row| lp_norm(row, &q)).collect();
    let bound = match (&space.exponent(), &target.p) {
        (_, PNorm::Inf) => row_norms.iter().map(RealValue::upper_rational).max().unwrap_or_else(Rational::zero),
        (PNorm::Two, PNorm::Two) => {
            RealValue::sqrt_of(map.matrix.iter().flatten().map(|a| a * a).sum()).upper_rational()
        }
        _ => row_norms.iter().map(RealValue::upper_rational).sum(),
    };
    Ok(OperatorBound { upper: bound, exact: false })
}

/// `φ̂(f)`: the lattice expression evaluated coordinatewise on `T xᵢ`.
pub fn extend_hom(element: &FreeElement, map: &LatticeMap, target: &TargetLattice) -> Result<Vec<Rational>, NormError> {
    map.check(&element.space, target)?;
    Ok(apply_to_function(&element.realized, map))
}

pub(crate) fn apply_to_function(f: &PwlFunction, map: &LatticeMap) -> Vec<Rational> {
    let images: Vec<Vec<Rational>> = f.rows().iter().map(|row| map.apply(&row.0)).collect();
    f.expr().eval_coordinatewise(&images, map.rows())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractivityReport {
    pub image: Vec<Rational>,
    pub image_norm: RealValue,
    pub operator_bound: Rational,
    /// `operator_bound · cert.upper`.
    pub bound: Rational,
    pub ok: bool,
}

/// Checks `‖φ̂f‖ <= ‖φ‖·upper(f)`.
pub fn contractivity_audit(
    element: &FreeElement,
    map: &LatticeMap,
    target: &TargetLattice,
    cert: &NormCertificate,
) -> Result<ContractivityReport, NormError> {
    let image = extend_hom(element, map, target)?;
    let image_norm = target.norm(&image);
    let operator_bound = operator_norm_bound(map, &element.space, target)?.upper;
    let bound = &operator_bound * &cert.upper;
    let ok = image_norm.le_rational(&bound);
    Ok(ContractivityReport { image, image_norm, operator_bound, bound, ok })
}

/// `f ↦ ‖φ̂f‖ / max(1, ‖φ‖)`, a lattice seminorm bounded by one on the
/// generators.
#[derive(Clone, Debug, PartialEq)]
pub struct PullbackSeminorm {
    pub map: LatticeMap,
    pub target: TargetLattice,
    scale: Rational,
}

pub fn pullback_seminorm(map: &LatticeMap, space: &SpaceSpec, target: &TargetLattice) -> Result<PullbackSeminorm, NormError> {
    let bound = operator_norm_bound(map, space, target)?.upper;
    let one = Rational::from_integer(1.into());
    Ok(PullbackSeminorm { map: map.clone(), target: target.clone(), scale: bound.max(one) })
}

impl LatticeSeminorm for PullbackSeminorm {
    fn label(&self) -> String {
        format!("pullback[{}x{} -> l{}]", self.map.rows(), self.map.cols(), self.target.p)
    }

    fn evaluate(&self, f: &PwlFunction) -> Result<RealValue, NormError> {
        if f.dim() != self.map.cols() {
            return Err(NormError::Pwl(PwlError::DimensionMismatch(f.dim(), self.map.cols())));
        }
        let inv = Rational::from_integer(1.into()) / &self.scale;
        Ok(self.target.norm(&apply_to_function(f, &self.map)).scale(&inv.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::norm::{maximality_audit, norm_exact_polyhedral};
    use crate::rational::{frac, int};

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&a| int(a)).collect()
    }

    #[test]
    fn embed_and_zero() {
        let space = SpaceSpec::fvl(2);
        let e = embed(&space, &q(&[1, 2])).unwrap();
        assert_eq!(e.expr, Expr::Var(1));
        assert_eq!(e.realized.eval(&q(&[3, -1])).unwrap(), int(1));
        let z = embed(&space, &q(&[0, 0])).unwrap();
        assert!(z.is_zero().unwrap());
        assert_eq!(z, FreeElement::zero(&space));
    }

    #[test]
    fn dependent_vectors_are_reduced() {
        let space = SpaceSpec::fvl(2);
        let vectors = vec![q(&[1, 0]), q(&[2, 0]), q(&[0, 1])];
        let e = make_element(&space, &vectors, &parse("t1 \\/ t2 + t3", 3).unwrap()).unwrap();
        assert_eq!(e.vectors, vec![q(&[1, 0]), q(&[0, 1])]);
        let original = PwlFunction::new(
            parse("t1 \\/ t2 + t3", 3).unwrap(),
            vectors.into_iter().map(LinFunc).collect(),
            2,
        )
        .unwrap();
        assert!(equivalent(&original, &e.realized).unwrap().is_equal());
    }

    #[test]
    fn extension_of_a_join() {
        let space = SpaceSpec::fvl(2);
        let a = FreeElement::generator(&space, 1).unwrap();
        let b = FreeElement::generator(&space, 2).unwrap();
        let f = a.sup(&b).unwrap();
        let map = LatticeMap::from_generator_images(&[q(&[1, -1]), q(&[0, 1])]).unwrap();
        let target = TargetLattice::new(2, PNorm::Inf);
        assert_eq!(extend_hom(&f, &map, &target).unwrap(), q(&[1, 1]));
        let cert = norm_exact_polyhedral(f.function(), &space).unwrap();
        let report = contractivity_audit(&f, &map, &target, &cert).unwrap();
        assert!(report.ok);
        assert_eq!(report.operator_bound, int(1));
    }

    #[test]
    fn operator_bounds() {
        let map = LatticeMap::from_matrix(vec![q(&[1, 2]), q(&[-3, 1])]).unwrap();
        let inf = TargetLattice::new(2, PNorm::Inf);
        let one = TargetLattice::new(2, PNorm::One);
        let b = operator_norm_bound(&map, &SpaceSpec::seq(PNorm::One, 2), &one).unwrap();
        assert_eq!((b.upper, b.exact), (int(4), true));
        let b = operator_norm_bound(&map, &SpaceSpec::seq(PNorm::Inf, 2), &inf).unwrap();
        assert_eq!((b.upper, b.exact), (int(4), true));
        let b = operator_norm_bound(&map, &SpaceSpec::seq(PNorm::Two, 2), &inf).unwrap();
        assert!(!b.exact && b.upper >= frac(316, 100));
    }

    #[test]
    fn pullbacks_are_below_the_norm() {
        let space = SpaceSpec::fvl(2);
        let f = FreeElement::generator(&space, 1)
            .unwrap()
            .minus(&FreeElement::generator(&space, 2).unwrap())
            .unwrap()
            .abs()
            .unwrap();
        let cert = norm_exact_polyhedral(f.function(), &space).unwrap();
        let map = LatticeMap::from_generator_images(&[q(&[1, 0, 1]), q(&[-1, 1, 0])]).unwrap();
        let nu = pullback_seminorm(&map, &space, &TargetLattice::new(3, PNorm::One)).unwrap();
        let family: Vec<Box<dyn LatticeSeminorm>> = vec![Box::new(nu)];
        assert!(maximality_audit(f.function(), &family, &cert).unwrap().passed());
    }
}
