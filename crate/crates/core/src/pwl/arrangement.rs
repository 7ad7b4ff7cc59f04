//! Central hyperplane arrangements and their full-dimensional cells.
//!
//! Cells are found by incremental sign-vector search: hyperplanes are
//! inserted one at a time and every existing cell is tested on both sides of
//! the new hyperplane. A side is kept when a strictly interior point exists,
//! either inherited from the parent cell or found by a margin-maximizing LP.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use super::function::{LinFunc, PwlError};
use super::lp::{solve_nonneg, Goal, LinearConstraint, LpOutcome};
use crate::linalg::{nullspace, rref};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn of(q: &Rational) -> Option<Sign> {
        if q.is_positive() {
            Some(Sign::Pos)
        } else if q.is_negative() {
            Some(Sign::Neg)
        } else {
            None
        }
    }

    pub fn apply(self, q: &Rational) -> Rational {
        match self {
            Sign::Pos => q.clone(),
            Sign::Neg => -q.clone(),
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Neg => '-',
        }
    }
}

/// An open full-dimensional cone `{x : signs[j]·h_j(x) > 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub signs: Vec<Sign>,
    pub interior: Vec<Rational>,
    /// `min_j signs[j]·h_j(interior)`, or one when there are no hyperplanes.
    pub margin: Rational,
    /// Indices of hyperplanes that suffice to describe the cell; contains
    /// every facet, possibly with a few redundant extras.
    pub facets: Vec<usize>,
    /// Extreme rays of the closed cell, sorted; empty unless the cell is a
    /// pointed cone.
    pub rays: Vec<Vec<Rational>>,
}

impl Cell {
    pub fn sign_string(&self) -> String {
        self.signs.iter().map(|s| s.symbol()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Arrangement {
    dim: usize,
    hyperplanes: Vec<LinFunc>,
    cells: Vec<Cell>,
}

/// Builds the arrangement of the nonzero pairwise differences of `pieces`
/// together with `extra` hyperplanes.
pub fn build_arrangement(
    dim: usize,
    pieces: &BTreeSet<LinFunc>,
    extra: &[LinFunc],
) -> Result<Arrangement, PwlError> {
    let mut normals = BTreeSet::new();
    let pieces: Vec<&LinFunc> = pieces.iter().collect();
    for (i, a) in pieces.iter().enumerate() {
        for b in &pieces[i + 1..] {
            if let Some(h) = a.sub(b).canonical_normal() {
                normals.insert(h);
            }
        }
    }
    normals.extend(extra.iter().filter_map(LinFunc::canonical_normal));
    if normals.is_empty() {
        return Err(PwlError::Degenerate);
    }
    Ok(Arrangement::from_hyperplanes(dim, normals))
}

impl Arrangement {
    /// Arrangement of the given hyperplanes, canonicalized and deduplicated;
    /// with none, the single cell is the whole space.
    pub fn from_hyperplanes(dim: usize, hyperplanes: impl IntoIterator<Item = LinFunc>) -> Arrangement {
        let normals: BTreeSet<LinFunc> = hyperplanes.into_iter().filter_map(|h| h.canonical_normal()).collect();
        let hyperplanes: Vec<LinFunc> = normals.into_iter().collect();
        let mut start = vec![Rational::zero(); dim];
        if dim > 0 {
            start[0] = Rational::one();
        }
        let mut cells = vec![Cell {
            signs: Vec::new(),
            interior: start,
            margin: Rational::one(),
            facets: Vec::new(),
            rays: Vec::new(),
        }];
        for k in 0..hyperplanes.len() {
            let upto: Vec<&LinFunc> = hyperplanes[..=k].iter().collect();
            let mut next = Vec::with_capacity(cells.len() * 2);
            for cell in cells {
                split_cell(&upto, cell, &mut next);
            }
            cells = next;
        }
        cells.sort_by(|a, b| a.signs.cmp(&b.signs));
        Arrangement { dim, hyperplanes, cells }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hyperplanes(&self) -> &[LinFunc] {
        &self.hyperplanes
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// The cell whose open cone contains `x`, if `x` lies on no hyperplane.
    pub fn locate(&self, x: &[Rational]) -> Option<usize> {
        let signs: Option<Vec<Sign>> = self.hyperplanes.iter().map(|h| Sign::of(&h.eval(x))).collect();
        let signs = signs?;
        self.cells.binary_search_by(|c| c.signs.cmp(&signs)).ok()
    }

    /// Constraints `signs[j]·h_j(x) >= 0` describing the closed cell.
    pub fn closure_constraints(&self, cell: &Cell) -> Vec<LinearConstraint> {
        self.hyperplanes
            .iter()
            .zip(&cell.signs)
            .map(|(h, s)| LinearConstraint::ge(h.0.iter().map(|a| s.apply(a)).collect(), Rational::zero()))
            .collect()
    }

    /// Lines through the origin cut out by `dim − 1` independent hyperplanes,
    /// each given by a primitive integer direction with positive leading entry.
    pub fn lines(&self) -> Vec<LinFunc> {
        let mut out = BTreeSet::new();
        let k = self.dim.saturating_sub(1);
        for subset in (0..self.hyperplanes.len()).combinations(k) {
            let rows: Vec<Vec<Rational>> = subset.iter().map(|&i| self.hyperplanes[i].0.clone()).collect();
            let ns = nullspace(&rows, self.dim);
            if ns.len() == 1 {
                if let Some(dir) = LinFunc(ns[0].clone()).canonical_normal() {
                    out.insert(dir);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Extreme rays of a closed cell. Complete when the arrangement is
    /// essential (hyperplane normals span the space), since then every cell
    /// is a pointed cone.
    pub fn cell_rays<'a>(&self, cell: &'a Cell) -> &'a [Vec<Rational>] {
        &cell.rays
    }

    /// Offset making `interior ± δ·e_i` strictly interior for every `i`.
    pub fn interior_step(&self, cell: &Cell) -> Rational {
        let max_coeff = self
            .hyperplanes
            .iter()
            .flat_map(|h| h.0.iter())
            .map(|a| a.abs())
            .max()
            .unwrap_or_else(Rational::zero);
        &cell.margin / (Rational::from_integer(2.into()) * (Rational::one() + max_coeff))
    }
}

/// Subsets of facets tried when testing cone membership; beyond this the
/// exact LP decides instead.
const CONE_SUBSET_CAP: usize = 4000;

fn signed(h: &LinFunc, s: Sign) -> Vec<Rational> {
    h.0.iter().map(|a| s.apply(a)).collect()
}

/// Whether `target` is a nonnegative combination of `gens`, by Carathéodory:
/// some linearly independent subset of at most `dim` generators suffices.
/// `None` when there are too many subsets to try.
fn cone_contains(target: &[Rational], gens: &[Vec<Rational>], dim: usize) -> Option<bool> {
    let top = dim.min(gens.len());
    let subsets: usize = (1..=top).map(|r| binomial(gens.len(), r)).sum();
    if subsets > CONE_SUBSET_CAP {
        return None;
    }
    for r in 1..=top {
        for subset in (0..gens.len()).combinations(r) {
            // Columns g_i, augmented by the target.
            let mut m: Vec<Vec<Rational>> = (0..dim)
                .map(|row| subset.iter().map(|&i| gens[i][row].clone()).chain([target[row].clone()]).collect())
                .collect();
            let pivots = rref(&mut m);
            if pivots.len() != r || pivots.contains(&r) {
                continue;
            }
            if (0..r).all(|i| !m[i][r].is_negative()) {
                return Some(true);
            }
        }
    }
    Some(false)
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Drops facets implied by the others.
fn prune(hyperplanes: &[&LinFunc], signs: &[Sign], facets: &mut Vec<usize>, dim: usize) {
    let mut i = 0;
    while i < facets.len() {
        let j = facets[i];
        let others: Vec<Vec<Rational>> =
            facets.iter().filter(|&&k| k != j).map(|&k| signed(hyperplanes[k], signs[k])).collect();
        if cone_contains(&signed(hyperplanes[j], signs[j]), &others, dim) == Some(true) {
            facets.remove(i);
        } else {
            i += 1;
        }
    }
}

/// Intersections of `dim − 1` facets lying in the closed cell, or nothing
/// when the facet normals do not span (the cell contains a line).
fn extreme_rays(all: &[&LinFunc], signs: &[Sign], facets: &[usize], dim: usize) -> Vec<Vec<Rational>> {
    let normals: Vec<Vec<Rational>> = facets.iter().map(|&j| signed(all[j], signs[j])).collect();
    if crate::linalg::rank(&normals) < dim {
        return Vec::new();
    }
    let mut rays = BTreeSet::new();
    for subset in (0..normals.len()).combinations(dim - 1) {
        let rows: Vec<Vec<Rational>> = subset.iter().map(|&i| normals[i].clone()).collect();
        let ns = nullspace(&rows, dim);
        if ns.len() != 1 {
            continue;
        }
        let Some(dir) = LinFunc(ns[0].clone()).canonical_normal() else { continue };
        for s in [Sign::Pos, Sign::Neg] {
            let r: Vec<Rational> = dir.0.iter().map(|a| s.apply(a)).collect();
            if normals.iter().all(|g| !dot(g, &r).is_negative()) {
                rays.insert(r);
            }
        }
    }
    rays.into_iter().collect()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Facets and rays of a child cell with `h_k` added. Redundant facets are
/// dropped: with rays at hand a facet survives iff the rays on it span a
/// hyperplane.
fn child_shape(all: &[&LinFunc], signs: &[Sign], parent: &[usize], dim: usize) -> (Vec<usize>, Vec<Vec<Rational>>) {
    let mut facets = parent.to_vec();
    facets.push(all.len() - 1);
    let rays = extreme_rays(all, signs, &facets, dim);
    if rays.is_empty() {
        prune(all, signs, &mut facets, dim);
    } else {
        facets.retain(|&j| {
            let on: Vec<Vec<Rational>> = rays.iter().filter(|r| all[j].eval(r).is_zero()).cloned().collect();
            on.len() + 1 >= dim && crate::linalg::rank(&on) + 1 >= dim
        });
    }
    (facets, rays)
}

fn child(all: &[&LinFunc], signs: Vec<Sign>, interior: Vec<Rational>, margin: Rational, parent: &[usize]) -> Cell {
    let (facets, rays) = child_shape(all, &signs, parent, interior.len());
    Cell { signs, interior, margin, facets, rays }
}

/// Whether `{x in cell : side·h(x) < 0}` is nonempty.
fn far_side_nonempty(all: &[&LinFunc], cell: &Cell, side: Sign) -> Option<bool> {
    let h = all[all.len() - 1];
    if !cell.rays.is_empty() {
        // A pointed cone is the hull of its rays.
        return Some(cell.rays.iter().any(|r| side.apply(&h.eval(r)).is_negative()));
    }
    // Otherwise the far side is empty iff side·h is implied by the facets.
    let gens: Vec<Vec<Rational>> = cell.facets.iter().map(|&j| signed(all[j], cell.signs[j])).collect();
    cone_contains(&signed(h, side), &gens, h.dim()).map(|inside| !inside)
}

fn split_cell(all: &[&LinFunc], cell: Cell, out: &mut Vec<Cell>) {
    let h = all[all.len() - 1];
    let prev = &all[..all.len() - 1];
    let value = h.eval(&cell.interior);
    match Sign::of(&value) {
        Some(side) => {
            let mut signs = cell.signs.clone();
            signs.push(side.flip());
            let other = match far_side_nonempty(all, &cell, side) {
                Some(false) => None,
                Some(true) if !cell.rays.is_empty() => {
                    // The sum of the extreme rays lies inside a pointed cone.
                    let (facets, rays) = child_shape(all, &signs, &cell.facets, h.dim());
                    let interior: Vec<Rational> =
                        (0..h.dim()).map(|i| rays.iter().map(|r| &r[i]).sum()).collect();
                    let margin = margin_at(all, &signs, &interior);
                    Some(Cell { signs, interior, margin, facets, rays })
                }
                _ => {
                    let mut working = cell.facets.clone();
                    working.push(all.len() - 1);
                    margin_relaxation(all, &signs, &working).map(|(margin, interior)| {
                        let margin = margin.min(margin_at(all, &signs, &interior));
                        child(all, signs, interior, margin, &cell.facets)
                    })
                }
            };
            let margin = cell.margin.clone().min(side.apply(&value));
            let mut kept_signs = cell.signs.clone();
            kept_signs.push(side);
            match other {
                Some(found) => {
                    out.push(child(all, kept_signs, cell.interior.clone(), margin, &cell.facets));
                    out.push(found);
                }
                None => out.push(Cell { signs: kept_signs, margin, ..cell }),
            }
        }
        None => {
            // On the new hyperplane: step along its normal in both directions.
            let hh: Rational = h.0.iter().map(|a| a * a).sum();
            let coupling = prev
                .iter()
                .map(|g| dot(&g.0, &h.0).abs())
                .max()
                .unwrap_or_else(Rational::zero);
            let t = &cell.margin / (Rational::from_integer(2.into()) * (Rational::one() + coupling));
            for side in [Sign::Pos, Sign::Neg] {
                let interior: Vec<Rational> =
                    cell.interior.iter().zip(&h.0).map(|(x, a)| x + side.apply(&(&t * a))).collect();
                let mut signs = cell.signs.clone();
                let margin = margin_at(prev, &signs, &interior).min(&t * &hh);
                signs.push(side);
                out.push(child(all, signs, interior, margin, &cell.facets));
            }
        }
    }
}

fn margin_at(hyperplanes: &[&LinFunc], signs: &[Sign], x: &[Rational]) -> Rational {
    hyperplanes
        .iter()
        .zip(signs)
        .map(|(h, s)| s.apply(&h.eval(x)))
        .min()
        .unwrap_or_else(Rational::one)
}

/// Maximizes `ε` subject to `signs[j]·h_j(x) >= ε` for `j` in `working`,
/// `‖x‖∞ <= 1` and `ε <= 1`; `None` when the optimum is not positive.
fn margin_relaxation(all: &[&LinFunc], signs: &[Sign], working: &[usize]) -> Option<(Rational, Vec<Rational>)> {
    let dim = all[0].dim();
    // Variables: u (dim), v (dim), ε; x = u − v.
    let width = 2 * dim + 1;
    let mut cons = Vec::with_capacity(working.len() + 2 * dim + 1);
    for &j in working {
        let (g, s) = (all[j], signs[j]);
        let mut row = vec![Rational::zero(); width];
        for (i, a) in g.0.iter().enumerate() {
            let sa = s.apply(a);
            row[i] = -sa.clone();
            row[dim + i] = sa;
        }
        row[2 * dim] = Rational::one();
        cons.push(LinearConstraint::le(row, Rational::zero()));
    }
    for i in 0..dim {
        let mut row = vec![Rational::zero(); width];
        row[i] = Rational::one();
        row[dim + i] = -Rational::one();
        cons.push(LinearConstraint::le(row.clone(), Rational::one()));
        cons.push(LinearConstraint::le(row.into_iter().map(|a| -a).collect(), Rational::one()));
    }
    let mut row = vec![Rational::zero(); width];
    row[2 * dim] = Rational::one();
    cons.push(LinearConstraint::le(row, Rational::one()));
    let mut objective = vec![Rational::zero(); width];
    objective[2 * dim] = Rational::one();
    match solve_nonneg(&objective, &cons, Goal::Maximize) {
        LpOutcome::Optimal { value, point } if value.is_positive() => {
            Some((value, (0..dim).map(|i| &point[i] - &point[dim + i]).collect()))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn lf(v: &[i64]) -> LinFunc {
        LinFunc::from_ints(v)
    }

    #[test]
    fn single_hyperplane_splits_the_plane() {
        let pieces: BTreeSet<_> = [lf(&[1, 0]), lf(&[0, 1])].into();
        let arr = build_arrangement(2, &pieces, &[]).unwrap();
        assert_eq!(arr.hyperplanes(), &[lf(&[1, -1])]);
        assert_eq!(arr.cells().len(), 2);
        for c in arr.cells() {
            assert!(c.signs[0].apply(&arr.hyperplanes()[0].eval(&c.interior)).is_positive());
        }
    }

    #[test]
    fn line_splits_into_two_rays() {
        let pieces: BTreeSet<_> = [lf(&[1]), lf(&[-1])].into();
        let arr = build_arrangement(1, &pieces, &[]).unwrap();
        assert_eq!(arr.hyperplanes(), &[lf(&[1])]);
        assert_eq!(arr.cells().len(), 2);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let pieces: BTreeSet<_> = [lf(&[1, 1])].into();
        assert_eq!(build_arrangement(2, &pieces, &[]).unwrap_err(), PwlError::Degenerate);
        let arr = Arrangement::from_hyperplanes(2, Vec::new());
        assert_eq!(arr.cells().len(), 1);
    }

    #[test]
    fn coordinate_planes_give_orthants() {
        let arr = Arrangement::from_hyperplanes(3, (0..3).map(|i| LinFunc::unit(3, i)));
        assert_eq!(arr.cells().len(), 8);
        let lines = arr.lines();
        assert_eq!(lines.len(), 3);
        for c in arr.cells() {
            assert_eq!(c.facets.len(), 3);
            assert_eq!(arr.cell_rays(c).len(), 3);
        }
    }

    #[test]
    fn generic_planes_in_space() {
        // n great circles in general position cut the sphere into n(n-1)+2 regions.
        let hs = vec![lf(&[1, 0, 0]), lf(&[0, 1, 0]), lf(&[0, 0, 1]), lf(&[1, 1, 1])];
        let arr = Arrangement::from_hyperplanes(3, hs);
        assert_eq!(arr.cells().len(), 14);
        let p = vec![int(3), int(-1), int(-1)];
        assert!(arr.locate(&p).is_some());
    }
}
