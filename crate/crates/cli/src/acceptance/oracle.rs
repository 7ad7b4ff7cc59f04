//! Reference computations for the acceptance suite. Nothing here calls the
//! solvers under test: evaluation, piece enumeration, tuple scoring and the
//! strong-unit constant are recomputed from the expression tree.

use latfree::expr::Expr;
use latfree::norm::{PNorm, SpaceSpec};
use latfree::rational::{int, zero};
use latfree::Rational;
use num_traits::{Signed, Zero};
use rand::Rng;

pub fn eval(e: &Expr, x: &[Rational]) -> Rational {
    match e {
        Expr::Var(i) => x[i - 1].clone(),
        Expr::Scale(c, a) => c * eval(a, x),
        Expr::Add(a, b) => eval(a, x) + eval(b, x),
        Expr::Sup(a, b) => eval(a, x).max(eval(b, x)),
        Expr::Inf(a, b) => eval(a, x).min(eval(b, x)),
    }
}

pub fn eval_f64(e: &Expr, x: &[f64]) -> f64 {
    match e {
        Expr::Var(i) => x[i - 1],
        Expr::Scale(c, a) => latfree::rational::to_f64(c) * eval_f64(a, x),
        Expr::Add(a, b) => eval_f64(a, x) + eval_f64(b, x),
        Expr::Sup(a, b) => eval_f64(a, x).max(eval_f64(b, x)),
        Expr::Inf(a, b) => eval_f64(a, x).min(eval_f64(b, x)),
    }
}

/// `f(x) = e(⟨v_1, x⟩, …, ⟨v_n, x⟩)` for a dual point `x`.
pub fn realized(e: &Expr, vectors: &[Vec<Rational>], x: &[Rational]) -> Rational {
    let args: Vec<Rational> = vectors.iter().map(|v| dot(v, x)).collect();
    eval(e, &args)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Monte Carlo comparison on uniform points of `[-1, 1]^n`: a point where the
/// two expressions differ beyond rounding, if one is found.
pub fn sampled_difference<R: Rng>(a: &Expr, b: &Expr, n: usize, points: usize, rng: &mut R) -> Option<Vec<f64>> {
    let mut x = vec![0.0; n];
    for _ in 0..points {
        for xi in x.iter_mut() {
            *xi = rng.gen_range(-1.0..=1.0);
        }
        let (u, v) = (eval_f64(a, &x), eval_f64(b, &x));
        if (u - v).abs() > 1e-9 * (1.0 + u.abs() + v.abs()) {
            return Some(x);
        }
    }
    None
}

/// `sup_{‖x‖ <= 1} Σ_i |⟨x_i, x⟩|` squared, over the extreme points of the
/// unit ball of `E` (for ℓ₂ the supremum over sign choices of `‖Σ ±x_i‖₂`).
pub fn constraint_squared(tuple: &[Vec<Rational>], space: &SpaceSpec) -> Rational {
    let d = space.dim();
    let exponent = match space {
        SpaceSpec::Fvl { .. } => PNorm::One,
        SpaceSpec::Seq { p, .. } => p.clone(),
    };
    let best = match exponent {
        PNorm::One => (0..d).map(|j| tuple.iter().map(|x| x[j].abs()).sum::<Rational>()).max().unwrap_or_else(zero),
        PNorm::Inf => sign_points(d)
            .iter()
            .map(|s| tuple.iter().map(|x| dot(x, s).abs()).sum::<Rational>())
            .max()
            .unwrap_or_else(zero),
        PNorm::Two => {
            let sq = sign_points(tuple.len())
                .iter()
                .map(|s| {
                    (0..d)
                        .map(|j| {
                            let c: Rational = tuple.iter().zip(s).map(|(x, e)| &x[j] * e).sum();
                            &c * &c
                        })
                        .sum::<Rational>()
                })
                .max()
                .unwrap_or_else(zero);
            return sq;
        }
        PNorm::Real(_) => panic!("oracle covers p in {{1, 2, inf}}"),
    };
    &best * &best
}

pub fn sign_points(k: usize) -> Vec<Vec<Rational>> {
    (0..1usize << k)
        .map(|mask| (0..k).map(|i| if mask & (1 << i) != 0 { int(-1) } else { int(1) }).collect())
        .collect()
}

/// `(Σ|f(x_i)|, c²)` for a tuple, with `c` its constraint value.
pub fn tuple_parts(e: &Expr, vectors: &[Vec<Rational>], tuple: &[Vec<Rational>], space: &SpaceSpec) -> (Rational, Rational) {
    let sum = tuple.iter().map(|x| realized(e, vectors, x).abs()).sum();
    (sum, constraint_squared(tuple, space))
}

/// Whether `value` is the score of `tuple`: `Σ|f(x_i)|` when the tuple is
/// admissible, `Σ|f(x_i)| / c` otherwise (for irrational `c`, `value` must
/// not exceed it and may fall short only by rounding of `c`).
pub fn rescores_to(value: &Rational, e: &Expr, vectors: &[Vec<Rational>], tuple: &[Vec<Rational>], space: &SpaceSpec) -> bool {
    let (sum, c2) = tuple_parts(e, vectors, tuple, space);
    if c2 <= int(1) {
        return *value == sum;
    }
    let lhs = value * value * &c2;
    let rhs = &sum * &sum;
    if lhs == rhs {
        return true;
    }
    lhs < rhs && latfree::rational::to_f64(&((&rhs - &lhs) / &rhs)) < 1e-15
}

/// Largest exact score over all tuples of at most `k` points of `{-1, 0, 1}^d`.
pub fn grid_lower(e: &Expr, vectors: &[Vec<Rational>], space: &SpaceSpec, k: usize) -> Rational {
    let d = space.dim();
    let points: Vec<Vec<Rational>> = (0..3usize.pow(d as u32))
        .map(|mut code| {
            (0..d)
                .map(|_| {
                    let v = code % 3;
                    code /= 3;
                    int(v as i64 - 1)
                })
                .collect()
        })
        .filter(|p: &Vec<Rational>| p.iter().any(|a| !a.is_zero()))
        .collect();
    let mut best = zero();
    let mut idx = Vec::new();
    grid_search(e, vectors, space, &points, k, 0, &mut idx, &mut best);
    best
}

#[allow(clippy::too_many_arguments)]
fn grid_search(
    e: &Expr,
    vectors: &[Vec<Rational>],
    space: &SpaceSpec,
    points: &[Vec<Rational>],
    k: usize,
    start: usize,
    idx: &mut Vec<usize>,
    best: &mut Rational,
) {
    if !idx.is_empty() {
        let tuple: Vec<Vec<Rational>> = idx.iter().map(|&i| points[i].clone()).collect();
        let (sum, c2) = tuple_parts(e, vectors, &tuple, space);
        // Polyhedral spaces only: c is rational, recover it from c².
        let c = rational_sqrt(&c2).expect("polyhedral constraint");
        if c.is_positive() {
            let score = sum / c;
            if score > *best {
                *best = score;
            }
        }
    }
    if idx.len() == k {
        return;
    }
    for i in start..points.len() {
        idx.push(i);
        grid_search(e, vectors, space, points, k, i, idx, best);
        idx.pop();
    }
}

pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// Every linear functional an expression can agree with locally, as
/// coefficient vectors over its variables.
pub fn pieces(e: &Expr, n: usize) -> Vec<Vec<Rational>> {
    let mut out = match e {
        Expr::Var(i) => {
            let mut v = vec![zero(); n];
            v[i - 1] = int(1);
            vec![v]
        }
        Expr::Scale(c, a) => pieces(a, n).into_iter().map(|v| v.iter().map(|x| x * c).collect()).collect(),
        Expr::Add(a, b) => {
            let (pa, pb) = (pieces(a, n), pieces(b, n));
            pa.iter().flat_map(|u| pb.iter().map(move |v| u.iter().zip(v).map(|(x, y)| x + y).collect())).collect()
        }
        Expr::Sup(a, b) | Expr::Inf(a, b) => {
            let mut all = pieces(a, n);
            all.extend(pieces(b, n));
            all
        }
    };
    out.sort();
    out.dedup();
    out
}

/// Normals of hyperplanes where some join or meet in `e` can switch branch.
pub fn kinks(e: &Expr, n: usize) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    collect_kinks(e, n, &mut out);
    out.retain(|v| v.iter().any(|a| !a.is_zero()));
    out.sort();
    out.dedup();
    out
}

fn collect_kinks(e: &Expr, n: usize, out: &mut Vec<Vec<Rational>>) {
    match e {
        Expr::Var(_) => {}
        Expr::Scale(_, a) => collect_kinks(a, n, out),
        Expr::Add(a, b) => {
            collect_kinks(a, n, out);
            collect_kinks(b, n, out);
        }
        Expr::Sup(a, b) | Expr::Inf(a, b) => {
            collect_kinks(a, n, out);
            collect_kinks(b, n, out);
            for u in pieces(a, n) {
                for v in pieces(b, n) {
                    out.push(u.iter().zip(&v).map(|(x, y)| x - y).collect());
                }
            }
        }
    }
}

/// `sup |e(x)|` over the unit ball of `ℓ₁^n`, for `n <= 3`. On each cell cut
/// out by the kinks and the coordinate hyperplanes `e` is linear and the cell
/// meets the ball in a polytope whose vertices lie on rays of the arrangement.
pub fn lambda(e: &Expr, n: usize) -> Rational {
    assert!(n <= 3, "lambda oracle handles at most three variables");
    let mut normals = kinks(e, n);
    for j in 0..n {
        let mut v = vec![zero(); n];
        v[j] = int(1);
        normals.push(v);
    }
    let mut rays: Vec<Vec<Rational>> = Vec::new();
    match n {
        1 => rays.push(vec![int(1)]),
        2 => rays.extend(normals.iter().map(|v| vec![-v[1].clone(), v[0].clone()])),
        _ => {
            for (i, u) in normals.iter().enumerate() {
                for v in &normals[i + 1..] {
                    rays.push(vec![
                        &u[1] * &v[2] - &u[2] * &v[1],
                        &u[2] * &v[0] - &u[0] * &v[2],
                        &u[0] * &v[1] - &u[1] * &v[0],
                    ]);
                }
            }
        }
    }
    let mut best = zero();
    for r in rays {
        let l1: Rational = r.iter().map(|a| a.abs()).sum();
        if l1.is_zero() {
            continue;
        }
        for s in [int(1), int(-1)] {
            let x: Vec<Rational> = r.iter().map(|a| a * &s / &l1).collect();
            let v = eval(e, &x).abs();
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// `e(φ(a_1), …, φ(a_n))` computed coordinate by coordinate.
pub fn extension(e: &Expr, images: &[Vec<Rational>], r: usize) -> Vec<Rational> {
    (0..r)
        .map(|i| {
            let args: Vec<Rational> = images.iter().map(|y| y[i].clone()).collect();
            eval(e, &args)
        })
        .collect()
}

/// `‖y‖_p^p` for `p = 2`, `‖y‖_p` for `p ∈ {1, ∞}`.
pub fn norm_power(y: &[Rational], p: &PNorm) -> Rational {
    match p {
        PNorm::One => y.iter().map(|a| a.abs()).sum(),
        PNorm::Inf => y.iter().map(|a| a.abs()).max().unwrap_or_else(zero),
        PNorm::Two => y.iter().map(|a| a * a).sum(),
        PNorm::Real(_) => panic!("oracle covers p in {{1, 2, inf}}"),
    }
}

/// Rank of a small rational matrix by elimination.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                let pivot = m[r].clone();
                for (a, b) in m[i].iter_mut().zip(&pivot) {
                    *a -= &f * b;
                }
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use latfree::expr::parse;
    use latfree::rational::frac;

    #[test]
    fn lambda_of_simple_expressions() {
        assert_eq!(lambda(&parse("t1 \\/ t2", 2).unwrap(), 2), int(1));
        assert_eq!(lambda(&parse("t1 - t2", 2).unwrap(), 2), int(1));
        assert_eq!(lambda(&parse("t1 + t2 + t3", 3).unwrap(), 3), int(1));
        assert_eq!(lambda(&parse("2*t1 - 3*t2", 2).unwrap(), 2), int(3));
        assert_eq!(lambda(&parse("t1 /\\ t2", 2).unwrap(), 2), int(1));
        assert_eq!(lambda(&parse("(t1 /\\ t2)^+", 2).unwrap(), 2), frac(1, 2));
    }

    #[test]
    fn grid_finds_the_join_value() {
        let e = parse("t1 \\/ t2", 2).unwrap();
        let id = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        assert_eq!(grid_lower(&e, &id, &SpaceSpec::fvl(2), 2), int(2));
    }

    #[test]
    fn constraint_in_l2() {
        let t = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        assert_eq!(constraint_squared(&t, &SpaceSpec::seq(PNorm::Two, 2)), int(2));
        assert_eq!(rank(&t), 2);
    }
}
