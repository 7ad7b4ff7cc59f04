use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::bounds::strong_unit_bound;
use super::certificate::{NormCertificate, UpperMethod};
use super::space::{tuple_seminorm_value, FunctionalTuple, SpaceSpec};
use super::{check_dim, is_zero_function, NormError};
use crate::pwl::lp::solve_nonneg;
use crate::pwl::{CellDecomposition, Goal, LinFunc, LinearConstraint, LpOutcome, PwlFunction, Sign};
use crate::rational::Rational;

/// One point of a candidate tuple: a cell of the decomposition and the sign
/// `f` is required to have there.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub cell: usize,
    pub sign: Sign,
}

/// The norm of `f` on a polyhedral space as a finite LP.
///
/// Cells come from `f`'s breakpoints together with the hyperplanes `v = 0`
/// for every vertex `v` of the unit ball of `E`, so each `|v(x)|` is linear
/// on each closed cell and every cell is a pointed cone. A slot point in a
/// cell is a nonnegative combination of the cell's extreme rays, which turns
/// the admissibility condition `Σ_slots |v(x)| <= 1` and the objective
/// `Σ_slots s·f(x)` into linear functions of the ray weights.
#[derive(Clone, Debug)]
pub struct SlotProblem {
    dec: CellDecomposition,
    rays: Vec<Vec<Vec<Rational>>>,
    vertices: Vec<LinFunc>,
}

impl SlotProblem {
    pub fn new(f: &PwlFunction, space: &SpaceSpec) -> Result<Self, NormError> {
        check_dim(f, space)?;
        let vertices = space.ball_vertices().ok_or_else(|| NormError::NotPolyhedral(space.clone()))?;
        let dec = CellDecomposition::new(f, &vertices)?;
        let arr = &dec.arrangement;
        let rays: Vec<_> = arr.cells().iter().map(|c| arr.cell_rays(c).to_vec()).collect();
        if let Some(i) = rays.iter().position(Vec::is_empty) {
            return Err(NormError::Fault(format!("cell {} has no extreme rays", arr.cells()[i].sign_string())));
        }
        Ok(SlotProblem { dec, rays, vertices })
    }

    pub fn decomposition(&self) -> &CellDecomposition {
        &self.dec
    }

    pub fn cells(&self) -> usize {
        self.dec.cells().len()
    }

    /// A tuple never needs more than one point per cell and sign.
    pub fn k_max(&self) -> usize {
        2 * self.cells()
    }

    pub fn all_slots(&self) -> Vec<Slot> {
        (0..self.cells())
            .flat_map(|cell| [Slot { cell, sign: Sign::Pos }, Slot { cell, sign: Sign::Neg }])
            .collect()
    }

    /// Optimum of the slot LP over the given slots, with the optimal tuple.
    pub fn solve(&self, slots: &[Slot]) -> Result<(Rational, FunctionalTuple), NormError> {
        // Column per (slot, ray) with positive gain; the same ray reached from
        // several slots has the same gain, so keep it once.
        let mut columns: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
        for slot in slots {
            let active = self
                .dec
                .active
                .get(slot.cell)
                .ok_or_else(|| NormError::Fault(format!("slot refers to missing cell {}", slot.cell)))?;
            for r in &self.rays[slot.cell] {
                let gain = slot.sign.apply(&active.eval(r));
                if gain.is_positive() {
                    columns.entry(r.clone()).or_insert(gain);
                }
            }
        }
        let d = self.dec.arrangement.dim();
        if columns.is_empty() {
            return Ok((Rational::zero(), FunctionalTuple::single(vec![Rational::zero(); d])));
        }
        // Larger rays first, so positive directions lead the witness.
        let columns: Vec<(Vec<Rational>, Rational)> = columns.into_iter().rev().collect();
        let objective: Vec<Rational> = columns.iter().map(|(_, g)| g.clone()).collect();
        let constraints: Vec<LinearConstraint> = self
            .vertices
            .iter()
            .map(|v| LinearConstraint::le(columns.iter().map(|(r, _)| v.eval(r).abs()).collect(), Rational::from_integer(1.into())))
            .collect();
        match solve_nonneg(&objective, &constraints, Goal::Maximize) {
            LpOutcome::Optimal { value, point } => {
                let witness: Vec<Vec<Rational>> = columns
                    .iter()
                    .zip(&point)
                    .filter(|(_, mu)| mu.is_positive())
                    .map(|((r, _), mu)| r.iter().map(|a| a * mu).collect())
                    .collect();
                Ok((value, FunctionalTuple(witness)))
            }
            LpOutcome::Unbounded => Err(NormError::Fault("slot LP is unbounded".into())),
            LpOutcome::Infeasible => Err(NormError::Fault("slot LP is infeasible".into())),
        }
    }
}

/// Exact norm on `FVL(n)`, `ℓ₁^m` or `ℓ∞^m`. The LP optimum is both the value
/// of the returned witness and an upper bound, because every admissible tuple
/// splits along the extreme rays of its points' cells without changing its
/// constraint value and without lowering its score.
pub fn norm_exact_polyhedral(f: &PwlFunction, space: &SpaceSpec) -> Result<NormCertificate, NormError> {
    check_dim(f, space)?;
    if !space.is_polyhedral() {
        return Err(NormError::NotPolyhedral(space.clone()));
    }
    if is_zero_function(f)? {
        return Ok(NormCertificate::zero(space));
    }
    let problem = SlotProblem::new(f, space)?;
    let (value, witness) = problem.solve(&problem.all_slots())?;
    let rescored = tuple_seminorm_value(f, &witness, space)?;
    if rescored != value {
        return Err(NormError::Fault(format!("witness scores {rescored}, LP optimum is {value}")));
    }
    let unit = strong_unit_bound(f, space)?;
    if value > unit.upper {
        return Err(NormError::Fault(format!("LP optimum {value} exceeds the strong-unit bound {}", unit.upper)));
    }
    Ok(NormCertificate {
        space: space.clone(),
        lower: value.clone(),
        upper: value,
        witness,
        upper_method: UpperMethod::ExactMatch,
        exact: true,
        lambda: unit.lambda,
        unit_support: unit.support,
        unit_norm_sum: unit.norm_sum,
        cells: problem.cells(),
        k_max: problem.k_max(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::norm::PNorm;
    use crate::rational::int;

    fn norm(text: &str, n: usize) -> NormCertificate {
        let f = PwlFunction::free(parse(text, n).unwrap(), n).unwrap();
        norm_exact_polyhedral(&f, &SpaceSpec::fvl(n)).unwrap()
    }

    #[test]
    fn join_of_two_generators() {
        let c = norm("t1 \\/ t2", 2);
        assert_eq!((c.lower.clone(), c.upper.clone()), (int(2), int(2)));
        assert!(c.exact);
        let w: Vec<Vec<Rational>> = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        assert_eq!(c.witness.0, w);
        assert_eq!(c.upper_method, UpperMethod::ExactMatch);
    }

    #[test]
    fn small_exact_norms() {
        assert_eq!(norm("t1", 1).upper, int(1));
        assert_eq!(norm("t2", 3).upper, int(1));
        assert_eq!(norm("t1 - t2", 2).upper, int(2));
        assert_eq!(norm("|t1| + |t2|", 2).upper, int(2));
        assert_eq!(norm("t1 \\/ t2 \\/ t3", 3).upper, int(3));
        assert_eq!(norm("|t1|", 1).upper, int(1));
        assert_eq!(norm("0*t1", 1).upper, int(0));
    }

    #[test]
    fn sequence_spaces() {
        // x̂ for x = (1, -2): its norm is ‖x‖_p.
        let f = PwlFunction::linear(LinFunc::from_ints(&[1, -2]));
        let one = norm_exact_polyhedral(&f, &SpaceSpec::seq(PNorm::One, 2)).unwrap();
        assert_eq!(one.upper, int(3));
        let inf = norm_exact_polyhedral(&f, &SpaceSpec::seq(PNorm::Inf, 2)).unwrap();
        assert_eq!(inf.upper, int(2));
        assert!(norm_exact_polyhedral(&f, &SpaceSpec::seq(PNorm::Two, 2)).is_err());
    }

    #[test]
    fn extra_slot_changes_nothing() {
        let f = PwlFunction::free(parse("t1 \\/ t2 \\/ t3", 3).unwrap(), 3).unwrap();
        let p = SlotProblem::new(&f, &SpaceSpec::fvl(3)).unwrap();
        let mut slots = p.all_slots();
        let base = p.solve(&slots).unwrap().0;
        slots.push(slots[0]);
        assert_eq!(p.solve(&slots).unwrap().0, base);
        assert_eq!(slots.len(), p.k_max() + 1);
    }
}
