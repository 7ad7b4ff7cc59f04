use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::arrangement::{Arrangement, Cell, Sign};
use super::function::{LinFunc, PwlError, PwlFunction};
use super::lp::{solve_lp, Goal, LinearConstraint, LpOutcome};
use crate::expr::Expr;
use crate::linalg::rank;
use crate::rational::{primitive_integer, Rational};

/// The functional `f` agrees with on an open cell, read off from its
/// difference quotients at `interior` and `interior + δ·e_i`.
fn gradient_on_cell(f: &PwlFunction, arr: &Arrangement, cell: &Cell) -> Result<LinFunc, PwlError> {
    let delta = arr.interior_step(cell);
    let base = f.eval_unchecked(&cell.interior);
    let mut grad = Vec::with_capacity(f.dim());
    for i in 0..f.dim() {
        let mut q = cell.interior.clone();
        q[i] += &delta;
        grad.push((f.eval_unchecked(&q) - &base) / &delta);
    }
    let g = LinFunc(grad);
    if g.eval(&cell.interior) != base {
        return Err(PwlError::Fault(format!(
            "function is not linear on cell {}; the arrangement does not refine its pieces",
            cell.sign_string()
        )));
    }
    Ok(g)
}

/// The unique candidate equal to `f` on `cell`.
pub fn active_piece(
    f: &PwlFunction,
    arr: &Arrangement,
    cell: &Cell,
    candidates: &BTreeSet<LinFunc>,
) -> Result<LinFunc, PwlError> {
    let g = gradient_on_cell(f, arr, cell)?;
    if candidates.contains(&g) {
        Ok(g)
    } else {
        Err(PwlError::Fault(format!("active functional {g} on cell {} is not a candidate piece", cell.sign_string())))
    }
}

/// An arrangement on whose cells `f` is linear, with the active piece per cell.
#[derive(Clone, Debug)]
pub struct CellDecomposition {
    pub arrangement: Arrangement,
    pub active: Vec<LinFunc>,
}

impl CellDecomposition {
    /// Arrangement of `f`'s breakpoints plus `extra` hyperplanes.
    pub fn new(f: &PwlFunction, extra: &[LinFunc]) -> Result<Self, PwlError> {
        let hyperplanes = f.breakpoints().into_iter().chain(extra.iter().cloned());
        let arrangement = Arrangement::from_hyperplanes(f.dim(), hyperplanes);
        let candidates = f.linear_pieces();
        let active = arrangement
            .cells()
            .par_iter()
            .map(|c| active_piece(f, &arrangement, c, &candidates))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { arrangement, active })
    }

    pub fn cells(&self) -> &[Cell] {
        self.arrangement.cells()
    }

    /// Distinct active pieces in sorted order.
    pub fn pieces(&self) -> Vec<LinFunc> {
        self.active.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Equivalence {
    Equal,
    Unequal { witness: Vec<Rational>, left: Rational, right: Rational },
}

impl Equivalence {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equivalence::Equal)
    }
}

/// Exact decision whether `f` and `g` agree as functions. Both are linear
/// on every cell of the common arrangement, so by continuity they agree
/// everywhere iff their active functionals agree on every cell.
pub fn equivalent(f: &PwlFunction, g: &PwlFunction) -> Result<Equivalence, PwlError> {
    if f.dim() != g.dim() {
        return Err(PwlError::DimensionMismatch(f.dim(), g.dim()));
    }
    let hyperplanes: BTreeSet<LinFunc> = f.breakpoints().into_iter().chain(g.breakpoints()).collect();
    let arr = Arrangement::from_hyperplanes(f.dim(), hyperplanes);
    let (fc, gc) = (f.linear_pieces(), g.linear_pieces());
    let verdicts = arr
        .cells()
        .par_iter()
        .map(|cell| -> Result<Option<Equivalence>, PwlError> {
            let lf = active_piece(f, &arr, cell, &fc)?;
            let lg = active_piece(g, &arr, cell, &gc)?;
            if lf == lg {
                return Ok(None);
            }
            let delta = arr.interior_step(cell);
            let probes = std::iter::once(cell.interior.clone()).chain((0..f.dim()).map(|i| {
                let mut q = cell.interior.clone();
                q[i] += &delta;
                q
            }));
            for q in probes {
                let (a, b) = (f.eval_unchecked(&q), g.eval_unchecked(&q));
                if a != b {
                    // Homogeneity lets us report a primitive integer witness.
                    let scaled: Vec<Rational> =
                        primitive_integer(&q).into_iter().map(Rational::from_integer).collect();
                    let (a, b) = (f.eval_unchecked(&scaled), g.eval_unchecked(&scaled));
                    return Ok(Some(Equivalence::Unequal { witness: scaled, left: a, right: b }));
                }
            }
            Err(PwlError::Fault("active pieces differ but no probe separates them".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(verdicts.into_iter().flatten().next().unwrap_or(Equivalence::Equal))
}

/// `max` over groups of `min` within each group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxMinForm {
    pub dim: usize,
    pub groups: Vec<Vec<LinFunc>>,
}

impl MaxMinForm {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.groups
            .iter()
            .map(|g| g.iter().map(|l| l.eval(x)).min().expect("groups are nonempty"))
            .max()
            .expect("at least one group")
    }

    pub fn to_pwl(&self) -> PwlFunction {
        let rows: Vec<LinFunc> =
            self.groups.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let index = |l: &LinFunc| rows.binary_search(l).expect("row present") + 1;
        let expr = self
            .groups
            .iter()
            .map(|g| g.iter().map(|l| Expr::Var(index(l))).reduce(Expr::inf).expect("nonempty group"))
            .reduce(Expr::sup)
            .expect("at least one group");
        PwlFunction::new(expr, rows, self.dim).expect("rows match the expression")
    }
}

/// Max–min normal form: one group per cell holding every piece that
/// dominates the cell's active piece on the cell. Groups that contain
/// another group are dropped. The result is checked with [`equivalent`].
pub fn max_min_form(f: &PwlFunction) -> Result<MaxMinForm, PwlError> {
    let dec = CellDecomposition::new(f, &[])?;
    let pieces = dec.pieces();
    let arr = &dec.arrangement;
    let groups: Vec<Vec<LinFunc>> = arr
        .cells()
        .par_iter()
        .zip(dec.active.par_iter())
        .map(|(cell, active)| {
            let mut cons = arr.closure_constraints(cell);
            cons.extend(box_constraints(f.dim()));
            pieces
                .iter()
                .filter(|l| {
                    if *l == active {
                        return true;
                    }
                    let diff = l.sub(active);
                    match solve_lp(&diff.0, &cons, Goal::Minimize) {
                        LpOutcome::Optimal { value, .. } => !value.is_negative(),
                        _ => false,
                    }
                })
                .cloned()
                .collect()
        })
        .collect();
    let unique: BTreeSet<Vec<LinFunc>> = groups.into_iter().collect();
    let unique: Vec<Vec<LinFunc>> = unique.into_iter().collect();
    let minimal: Vec<Vec<LinFunc>> = unique
        .iter()
        .filter(|g| !unique.iter().any(|h| h != *g && h.iter().all(|l| g.contains(l))))
        .cloned()
        .collect();
    let form = MaxMinForm { dim: f.dim(), groups: minimal };
    if !equivalent(f, &form.to_pwl())?.is_equal() {
        return Err(PwlError::Fault("max-min form does not reproduce the function".into()));
    }
    Ok(form)
}

/// `‖x‖∞ <= 1`.
pub(crate) fn box_constraints(dim: usize) -> Vec<LinearConstraint> {
    let mut out = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        let unit = LinFunc::unit(dim, i);
        out.push(LinearConstraint::le(unit.0.clone(), Rational::one()));
        out.push(LinearConstraint::ge(unit.0, -Rational::one()));
    }
    out
}

/// Polyhedral region `{x : ℓ_i(x) <= b_i, Σ_j |m_j(x)| <= 1}`; the ℓ₁-type
/// term is omitted when `l1` is empty.
#[derive(Clone, Debug, Default)]
pub struct Region {
    pub halfspaces: Vec<(LinFunc, Rational)>,
    pub l1: Vec<LinFunc>,
}

impl Region {
    /// Unit ball of `x ↦ Σ_j |m_j(x)|`.
    pub fn l1_ball(l1: Vec<LinFunc>) -> Self {
        Self { halfspaces: Vec::new(), l1 }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        let l1: Rational = self.l1.iter().map(|m| m.eval(x).abs()).sum();
        self.halfspaces.iter().all(|(l, b)| l.eval(x) <= *b) && (self.l1.is_empty() || l1 <= Rational::one())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupAbs {
    pub value: Rational,
    pub witness: Vec<Rational>,
}

/// Exact `sup |f|` over a bounded polyhedral region. On every cell of the
/// arrangement refined by the sign hyperplanes of the ℓ₁ terms, `f` and each
/// `|m_j|` are linear, so the cell's share of the region is a polytope and
/// the restricted problem is a pair of LPs.
pub fn sup_abs_over(f: &PwlFunction, region: &Region) -> Result<SupAbs, PwlError> {
    let dim = f.dim();
    let l1_rows: Vec<Vec<Rational>> = region.l1.iter().map(|m| m.0.clone()).collect();
    let a_priori_bounded = !l1_rows.is_empty() && rank(&l1_rows) == dim;
    let extra: Vec<LinFunc> = region.l1.clone();
    let dec = CellDecomposition::new(f, &extra)?;
    let arr = &dec.arrangement;
    let per_cell = arr
        .cells()
        .par_iter()
        .zip(dec.active.par_iter())
        .map(|(cell, active)| -> Result<Option<SupAbs>, PwlError> {
            let mut cons = arr.closure_constraints(cell);
            for (l, b) in &region.halfspaces {
                cons.push(LinearConstraint::le(l.0.clone(), b.clone()));
            }
            if !region.l1.is_empty() {
                let mut row = vec![Rational::zero(); dim];
                for m in &region.l1 {
                    let sign = Sign::of(&m.eval(&cell.interior));
                    if let Some(s) = sign {
                        for (acc, a) in row.iter_mut().zip(&m.0) {
                            *acc += s.apply(a);
                        }
                    }
                }
                cons.push(LinearConstraint::le(row, Rational::one()));
            }
            if !a_priori_bounded {
                for i in 0..dim {
                    let unit = LinFunc::unit(dim, i);
                    for goal in [Goal::Maximize, Goal::Minimize] {
                        if solve_lp(&unit.0, &cons, goal) == LpOutcome::Unbounded {
                            return Err(PwlError::UnboundedRegion);
                        }
                    }
                }
            }
            let mut best: Option<SupAbs> = None;
            for sign in [Sign::Pos, Sign::Neg] {
                let obj: Vec<Rational> = active.0.iter().map(|a| sign.apply(a)).collect();
                match solve_lp(&obj, &cons, Goal::Maximize) {
                    LpOutcome::Optimal { value, point } => {
                        if best.as_ref().is_none_or(|b| value > b.value) {
                            best = Some(SupAbs { value, witness: point });
                        }
                    }
                    LpOutcome::Unbounded => return Err(PwlError::UnboundedRegion),
                    LpOutcome::Infeasible => {}
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut best = SupAbs { value: Rational::zero(), witness: vec![Rational::zero(); dim] };
    for candidate in per_cell.into_iter().flatten() {
        if candidate.value > best.value {
            best = candidate;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::rational::int;

    fn free(text: &str, n: usize) -> PwlFunction {
        PwlFunction::free(parse(text, n).unwrap(), n).unwrap()
    }

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&a| int(a)).collect()
    }

    #[test]
    fn active_piece_of_join() {
        let f = free("t1 \\/ t2", 2);
        let dec = CellDecomposition::new(&f, &[]).unwrap();
        let cell = dec.arrangement.locate(&q(&[1, 0])).unwrap();
        assert_eq!(dec.active[cell], LinFunc::from_ints(&[1, 0]));
    }

    #[test]
    fn active_piece_of_abs_on_negative_axis() {
        let f = free("|t1|", 1);
        let dec = CellDecomposition::new(&f, &[]).unwrap();
        let cell = dec.arrangement.locate(&q(&[-1])).unwrap();
        assert_eq!(dec.active[cell], LinFunc::from_ints(&[-1]));
    }

    #[test]
    fn active_piece_of_mixed_example() {
        let f = free("t1 /\\ t2 + t1 \\/ (2*t3)", 3);
        let dec = CellDecomposition::new(&f, &[]).unwrap();
        let p = q(&[2, 3, 0]);
        let cell = dec.arrangement.locate(&p).unwrap();
        assert_eq!(dec.active[cell], LinFunc::from_ints(&[2, 0, 0]));
        assert_eq!(dec.active[cell].eval(&p), int(4));
    }

    #[test]
    fn missing_candidate_is_a_fault() {
        let f = free("t1 \\/ t2", 2);
        let arr = Arrangement::from_hyperplanes(2, f.breakpoints());
        let only: BTreeSet<_> = [LinFunc::from_ints(&[0, 1])].into();
        let cell = arr.locate(&q(&[1, 0])).unwrap();
        assert!(matches!(active_piece(&f, &arr, &arr.cells()[cell], &only), Err(PwlError::Fault(_))));
    }

    #[test]
    fn distributivity_identity() {
        let f = free("t1 + (t2 \\/ t3)", 3);
        let g = free("(t1 + t2) \\/ (t1 + t3)", 3);
        assert_eq!(equivalent(&f, &g).unwrap(), Equivalence::Equal);
        assert_eq!(equivalent(&f, &f).unwrap(), Equivalence::Equal);
    }

    #[test]
    fn join_versus_meet() {
        let f = free("t1 \\/ t2", 2);
        let g = free("t1 /\\ t2", 2);
        match equivalent(&f, &g).unwrap() {
            Equivalence::Unequal { witness, left, right } => {
                assert_ne!(left, right);
                assert_eq!(f.eval(&witness).unwrap(), left);
                assert_eq!(g.eval(&witness).unwrap(), right);
                assert_eq!(witness, q(&[1, 0]));
                assert_eq!((left, right), (int(1), int(0)));
            }
            Equivalence::Equal => panic!("join and meet differ"),
        }
        assert!(equivalent(&f, &free("t1", 1)).is_err());
    }

    #[test]
    fn max_min_of_join_and_abs() {
        let form = max_min_form(&free("t1 \\/ t2", 2)).unwrap();
        let mut groups = form.groups.clone();
        groups.sort();
        assert_eq!(groups, vec![vec![LinFunc::from_ints(&[0, 1])], vec![LinFunc::from_ints(&[1, 0])]]);
        let form = max_min_form(&free("|t1|", 1)).unwrap();
        let mut groups = form.groups.clone();
        groups.sort();
        assert_eq!(groups, vec![vec![LinFunc::from_ints(&[-1])], vec![LinFunc::from_ints(&[1])]]);
    }

    #[test]
    fn max_min_of_mixed_example() {
        let f = free("t1 /\\ t2 + t1 \\/ (2*t3)", 3);
        let form = max_min_form(&f).unwrap();
        let cells = CellDecomposition::new(&f, &[]).unwrap().cells().len();
        assert!(form.groups.len() <= cells);
        let pieces = f.linear_pieces();
        assert!(form.groups.iter().flatten().all(|l| pieces.contains(l)));
    }

    #[test]
    fn sup_abs_examples() {
        let gen = free("t1", 1);
        let unit = Region::l1_ball(vec![LinFunc::unit(1, 0)]);
        let s = sup_abs_over(&gen, &unit).unwrap();
        assert_eq!(s.value, int(1));
        assert_eq!(s.witness.iter().map(|x| x.abs()).collect::<Vec<_>>(), q(&[1]));

        let cross = Region::l1_ball(vec![LinFunc::unit(2, 0), LinFunc::unit(2, 1)]);
        let s = sup_abs_over(&free("t1 \\/ t2", 2), &cross).unwrap();
        assert_eq!(s.value, int(1));
        assert!(cross.contains(&s.witness));
        let s = sup_abs_over(&free("|t1| + |t2|", 2), &cross).unwrap();
        assert_eq!(s.value, int(1));
    }

    #[test]
    fn unbounded_region_is_reported() {
        let f = free("t1 + t2", 2);
        let strip = Region::l1_ball(vec![LinFunc::unit(2, 0)]);
        assert_eq!(sup_abs_over(&f, &strip), Err(PwlError::UnboundedRegion));
        let half = Region { halfspaces: vec![(LinFunc::unit(2, 0), int(1))], l1: vec![] };
        assert_eq!(sup_abs_over(&PwlFunction::zero(2), &half), Err(PwlError::UnboundedRegion));
    }
}
