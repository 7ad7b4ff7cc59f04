//! Exact rational linear programming: dense two-phase simplex with Bland's
//! anti-cycling rule.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Self { coeffs, relation, rhs }
    }

    pub fn le(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Le, rhs)
    }

    pub fn ge(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Ge, rhs)
    }

    pub fn eq(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Eq, rhs)
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Goal {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Optimizes over free (sign-unrestricted) variables.
pub fn solve_lp(objective: &[Rational], constraints: &[LinearConstraint], goal: Goal) -> LpOutcome {
    let n = objective.len();
    // x = u - v with u, v >= 0.
    let split = |row: &[Rational]| -> Vec<Rational> {
        let mut out = Vec::with_capacity(2 * n);
        out.extend(row.iter().cloned());
        out.extend(row.iter().map(|a| -a.clone()));
        out
    };
    let obj = split(objective);
    let cons: Vec<LinearConstraint> = constraints
        .iter()
        .map(|c| LinearConstraint::new(split(&c.coeffs), c.relation, c.rhs.clone()))
        .collect();
    match solve_nonneg(&obj, &cons, goal) {
        LpOutcome::Optimal { value, point } => {
            let x = (0..n).map(|i| &point[i] - &point[n + i]).collect();
            LpOutcome::Optimal { value, point: x }
        }
        other => other,
    }
}

/// Optimizes over nonnegative variables.
pub fn solve_nonneg(objective: &[Rational], constraints: &[LinearConstraint], goal: Goal) -> LpOutcome {
    let c: Vec<Rational> = match goal {
        Goal::Maximize => objective.to_vec(),
        Goal::Minimize => objective.iter().map(|a| -a.clone()).collect(),
    };
    let mut tableau = Tableau::build(&c, constraints);
    let outcome = tableau.run();
    match (outcome, goal) {
        (LpOutcome::Optimal { value, point }, Goal::Minimize) => LpOutcome::Optimal { value: -value, point },
        (other, _) => other,
    }
}

struct Tableau {
    /// Rows of `[A | b]`.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    n_orig: usize,
    n_total: usize,
    artificial_from: usize,
    cost: Vec<Rational>,
}

impl Tableau {
    fn build(cost: &[Rational], constraints: &[LinearConstraint]) -> Self {
        let n = cost.len();
        // Normalize to nonnegative right-hand sides.
        let normalized: Vec<(Vec<Rational>, Relation, Rational)> = constraints
            .iter()
            .map(|con| {
                assert_eq!(con.coeffs.len(), n, "constraint width differs from objective");
                if con.rhs.is_negative() {
                    let flipped = match con.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (con.coeffs.iter().map(|a| -a.clone()).collect(), flipped, -con.rhs.clone())
                } else {
                    (con.coeffs.clone(), con.relation, con.rhs.clone())
                }
            })
            .collect();
        let n_slack = normalized.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        let n_art = normalized.iter().filter(|(_, r, _)| *r != Relation::Le).count();
        let artificial_from = n + n_slack;
        let n_total = artificial_from + n_art;
        let mut rows = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let (mut slack, mut art) = (n, artificial_from);
        for (coeffs, rel, rhs) in normalized {
            let mut row = vec![Rational::zero(); n_total + 1];
            for (j, a) in coeffs.into_iter().enumerate() {
                row[j] = a;
            }
            row[n_total] = rhs;
            match rel {
                Relation::Le => {
                    row[slack] = Rational::from_integer(1.into());
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = Rational::from_integer((-1).into());
                    slack += 1;
                    row[art] = Rational::from_integer(1.into());
                    basis.push(art);
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = Rational::from_integer(1.into());
                    basis.push(art);
                    art += 1;
                }
            }
            rows.push(row);
        }
        let mut full_cost = vec![Rational::zero(); n_total];
        full_cost[..n].clone_from_slice(cost);
        Self { rows, basis, n_orig: n, n_total, artificial_from, cost: full_cost }
    }

    fn run(&mut self) -> LpOutcome {
        if self.artificial_from < self.n_total {
            // Phase 1: maximize -Σ artificials.
            let phase1: Vec<Rational> = (0..self.n_total)
                .map(|j| if j >= self.artificial_from { Rational::from_integer((-1).into()) } else { Rational::zero() })
                .collect();
            let mut obj = self.objective_row(&phase1);
            if !self.optimize(&mut obj, self.n_total) {
                unreachable!("phase one objective is bounded above by zero");
            }
            if obj[self.n_total].is_negative() {
                return LpOutcome::Infeasible;
            }
            self.drive_out_artificials();
        }
        let cost = self.cost.clone();
        let mut obj = self.objective_row(&cost);
        if !self.optimize(&mut obj, self.artificial_from) {
            return LpOutcome::Unbounded;
        }
        let mut point = vec![Rational::zero(); self.n_orig];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_orig {
                point[b] = self.rows[i][self.n_total].clone();
            }
        }
        let value = point.iter().zip(&self.cost).map(|(x, c)| x * c).sum();
        LpOutcome::Optimal { value, point }
    }

    /// Reduced-cost row: entry j is `c_B B⁻¹ A_j − c_j`, last entry the
    /// current objective value.
    fn objective_row(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut obj: Vec<Rational> = cost.iter().map(|c| -c.clone()).collect();
        obj.push(Rational::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (o, a) in obj.iter_mut().zip(&self.rows[i]) {
                if !a.is_zero() {
                    *o += cb * a;
                }
            }
        }
        obj
    }

    /// Bland's rule iterations over columns `< limit`. Returns false when
    /// the objective is unbounded.
    fn optimize(&mut self, obj: &mut [Rational], limit: usize) -> bool {
        loop {
            let Some(enter) = (0..limit).find(|&j| obj[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = &row[enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &row[self.n_total] / a;
                let better = match &leave {
                    None => true,
                    Some((li, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, enter, Some(obj));
        }
    }

    fn pivot(&mut self, r: usize, c: usize, obj: Option<&mut [Rational]>) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let support: Vec<usize> = (0..=self.n_total).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut [Rational]| {
            let factor = row[c].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &support {
                let delta = &factor * &pivot_row[j];
                row[j] -= delta;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        if let Some(obj) = obj {
            eliminate(obj);
        }
        self.basis[r] = c;
    }

    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.artificial_from {
                if let Some(c) = (0..self.artificial_from).find(|&j| !self.rows[i][j].is_zero()) {
                    self.pivot(i, c, None);
                    i += 1;
                } else {
                    // Redundant equality.
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            } else {
                i += 1;
            }
        }
        for row in self.rows.iter_mut() {
            for v in row[self.artificial_from..self.n_total].iter_mut() {
                v.set_zero();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn v(x: &[i64]) -> Vec<Rational> {
        x.iter().map(|&a| int(a)).collect()
    }

    #[test]
    fn bounded_single_variable() {
        let out = solve_lp(&v(&[1, 0]), &[LinearConstraint::le(v(&[1, 0]), int(1)), LinearConstraint::le(v(&[0, 1]), int(0)), LinearConstraint::ge(v(&[0, 1]), int(0))], Goal::Maximize);
        assert_eq!(out.value(), Some(&int(1)));
    }

    #[test]
    fn unbounded_direction() {
        let out = solve_lp(&v(&[1]), &[LinearConstraint::ge(v(&[1]), int(0))], Goal::Maximize);
        assert_eq!(out, LpOutcome::Unbounded);
    }

    #[test]
    fn facet_optimum_returns_a_vertex() {
        let cons = [
            LinearConstraint::le(v(&[1, 1]), int(1)),
            LinearConstraint::le(v(&[-1, 0]), int(0)),
            LinearConstraint::le(v(&[0, -1]), int(0)),
        ];
        match solve_lp(&v(&[1, 1]), &cons, Goal::Maximize) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, int(1));
                assert!(cons.iter().all(|c| c.is_satisfied(&point)));
                assert!(point == v(&[1, 0]) || point == v(&[0, 1]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_system() {
        let cons = [LinearConstraint::le(v(&[1]), int(0)), LinearConstraint::ge(v(&[1]), int(1))];
        assert_eq!(solve_lp(&v(&[1]), &cons, Goal::Maximize), LpOutcome::Infeasible);
    }

    #[test]
    fn equalities_and_minimization() {
        // min x + 2y s.t. x + y = 3, x <= 2, y >= 0 → x=2, y=1, value 4
        let cons = [
            LinearConstraint::eq(v(&[1, 1]), int(3)),
            LinearConstraint::le(v(&[1, 0]), int(2)),
            LinearConstraint::ge(v(&[0, 1]), int(0)),
        ];
        match solve_lp(&v(&[1, 2]), &cons, Goal::Minimize) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, int(4));
                assert_eq!(point, v(&[2, 1]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let cons = [
            LinearConstraint::eq(v(&[1, 1]), int(1)),
            LinearConstraint::eq(v(&[2, 2]), int(2)),
        ];
        let out = solve_nonneg(&v(&[1, 0]), &cons, Goal::Maximize);
        assert_eq!(out.value(), Some(&int(1)));
    }

    #[test]
    fn fractional_optimum() {
        // max x + y s.t. 2x + y <= 2, x + 3y <= 3 → (3/5, 4/5), value 7/5
        let cons = [LinearConstraint::le(v(&[2, 1]), int(2)), LinearConstraint::le(v(&[1, 3]), int(3))];
        match solve_nonneg(&v(&[1, 1]), &cons, Goal::Maximize) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, frac(7, 5));
                assert_eq!(point, vec![frac(3, 5), frac(4, 5)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling instance.
        let cons = [
            LinearConstraint::le(vec![frac(1, 4), int(-60), frac(-1, 25), int(9)], int(0)),
            LinearConstraint::le(vec![frac(1, 2), int(-90), frac(-1, 50), int(3)], int(0)),
            LinearConstraint::le(vec![int(0), int(0), int(1), int(0)], int(1)),
        ];
        let obj = vec![frac(3, 4), int(-150), frac(1, 50), int(-6)];
        assert_eq!(solve_nonneg(&obj, &cons, Goal::Maximize).value(), Some(&frac(1, 20)));
    }
}
