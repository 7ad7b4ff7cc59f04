use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::certificate::{NormCertificate, UpperMethod};
use super::space::{constraint_norm_f64, tuple_seminorm_value, FunctionalTuple, PNorm, SpaceSpec};
use super::{check_dim, is_zero_function, NormError};
use crate::pwl::{sup_abs_over, CellDecomposition, LinFunc, PwlFunction, Region};
use crate::rational::{rationalize, sqrt_upper_compact, to_f64, Rational, RealValue};

#[derive(Clone, Debug, PartialEq)]
pub struct NormOptions {
    /// Largest tuple size the search may use; defaults to twice the number
    /// of cells.
    pub k_max: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    /// Step size at which coordinate ascent stops.
    pub tolerance: f64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions { k_max: None, restarts: 8, seed: 0, tolerance: 1e-9 }
    }
}

/// Tuples larger than this are not searched by ascent; sign-pattern
/// constraint norms cost `2^(k-1)` per evaluation.
const ASCENT_K_CAP: usize = 6;
const ASCENT_MAX_SWEEPS: usize = 600;
const RATIONAL_DEN_CAP: u64 = 1_000_000;
/// Relative slack, in decimal digits, when a square root is rounded up.
const SQRT_SLACK_DIGITS: u32 = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct StrongUnit {
    pub lambda: Rational,
    pub support: Vec<usize>,
    pub norm_sum: Rational,
    pub norm_sum_exact: bool,
    pub upper: Rational,
}

/// `‖f‖ <= λ·Σ_j ‖x_j‖`: write `f = F(x̂_1, …, x̂_k)` with independent `x_j`;
/// then `|f| <= λ·Σ|x̂_j|` for `λ = sup |F|` over the unit ball of ℓ₁^k.
pub fn strong_unit_bound(f: &PwlFunction, space: &SpaceSpec) -> Result<StrongUnit, NormError> {
    check_dim(f, space)?;
    let (reduced, support) = f.reduction();
    if support.is_empty() {
        let zero = Rational::zero();
        return Ok(StrongUnit { lambda: zero.clone(), support, norm_sum: zero.clone(), norm_sum_exact: true, upper: zero });
    }
    let k = support.len();
    let free = PwlFunction::free(reduced.expr().clone(), k)?;
    let ball = Region::l1_ball((0..k).map(|i| LinFunc::unit(k, i)).collect());
    let lambda = sup_abs_over(&free, &ball)?.value;
    let mut norm_sum = Rational::zero();
    let mut norm_sum_exact = true;
    for row in reduced.rows() {
        let n = space.vector_norm(&row.0);
        norm_sum_exact &= n.is_exact();
        norm_sum += match n {
            RealValue::Sqrt(q) => sqrt_upper_compact(&q, SQRT_SLACK_DIGITS),
            other => other.upper_rational(),
        };
    }
    let upper = &lambda * &norm_sum;
    Ok(StrongUnit { lambda, support, norm_sum, norm_sum_exact, upper })
}

/// A point of the dual unit ball on which `ℓ` attains (or, for irrational
/// norms, nearly attains) its dual norm.
pub fn norming_functional(l: &LinFunc, space: &SpaceSpec) -> Vec<Rational> {
    let d = l.dim();
    let sign = |a: &Rational| if a.is_negative() { -Rational::one() } else { Rational::one() };
    match space.exponent() {
        PNorm::One => l.0.iter().map(sign).collect(),
        PNorm::Inf => {
            let mut out = vec![Rational::zero(); d];
            if let Some((i, a)) = l.0.iter().enumerate().max_by(|a, b| a.1.abs().cmp(&b.1.abs()).then(b.0.cmp(&a.0))) {
                out[i] = sign(a);
            }
            out
        }
        PNorm::Two => {
            let sq: Rational = l.0.iter().map(|a| a * a).sum();
            if sq.is_zero() {
                return vec![Rational::zero(); d];
            }
            let hi = sqrt_upper_compact(&sq, SQRT_SLACK_DIGITS);
            l.0.iter().map(|a| a / &hi).collect()
        }
        PNorm::Real(p) => {
            let p = to_f64(&p);
            let v: Vec<f64> = l.0.iter().map(to_f64).collect();
            let norm = v.iter().map(|a| a.abs().powf(p)).sum::<f64>().powf(1.0 / p);
            if norm == 0.0 {
                return vec![Rational::zero(); d];
            }
            v.iter()
                .map(|a| rationalize(a.signum() * (a.abs() / norm).powf(p - 1.0), RATIONAL_DEN_CAP))
                .collect()
        }
    }
}

/// Rescales a nonzero tuple so that its constraint norm is about one. The
/// score is computed soundly afterwards either way.
fn normalize(tuple: FunctionalTuple, space: &SpaceSpec) -> FunctionalTuple {
    let c = match super::space::constraint_norm(&tuple, space) {
        Ok(c) => c,
        Err(_) => return tuple,
    };
    let scale = match c {
        RealValue::Exact(q) => q,
        RealValue::Sqrt(q) => sqrt_upper_compact(&q, SQRT_SLACK_DIGITS),
        RealValue::Approx(v) => rationalize(v, RATIONAL_DEN_CAP),
    };
    if !scale.is_positive() {
        return tuple;
    }
    FunctionalTuple(tuple.0.into_iter().map(|p| p.into_iter().map(|a| a / &scale).collect()).collect())
}

fn sweep_candidates(dec: &CellDecomposition, f: &PwlFunction, space: &SpaceSpec) -> Vec<FunctionalTuple> {
    let d = space.dim();
    let arr = &dec.arrangement;
    let mut out: Vec<FunctionalTuple> = Vec::new();
    let lines = arr.lines();
    for line in &lines {
        out.push(FunctionalTuple::single(line.0.clone()));
        out.push(FunctionalTuple::single(line.neg().0));
    }
    for cell in arr.cells() {
        out.push(FunctionalTuple::single(cell.interior.clone()));
    }
    let pieces: BTreeSet<LinFunc> = dec.pieces().into_iter().chain(f.rows().iter().cloned()).collect();
    let norming: Vec<Vec<Rational>> = pieces
        .iter()
        .map(|l| norming_functional(l, space))
        .filter(|x| x.iter().any(|a| !a.is_zero()))
        .collect();
    for x in &norming {
        out.push(FunctionalTuple::single(x.clone()));
        out.push(FunctionalTuple::single(x.iter().map(|a| -a).collect()));
    }
    if norming.len() > 1 {
        out.push(FunctionalTuple(norming));
    }
    // Unit vectors, each signed towards the larger value of |f|.
    let units: Vec<Vec<Rational>> = (0..d)
        .map(|j| {
            let e = LinFunc::unit(d, j);
            let (pos, neg) = (f.eval_unchecked(&e.0).abs(), f.eval_unchecked(&e.neg().0).abs());
            if neg > pos {
                e.neg().0
            } else {
                e.0
            }
        })
        .collect();
    for u in &units {
        out.push(FunctionalTuple::single(u.clone()));
    }
    out.push(FunctionalTuple(units));
    out.into_iter().map(|t| normalize(t, space)).collect()
}

fn ascent_objective(f: &PwlFunction, points: &[Vec<f64>], space: &SpaceSpec) -> f64 {
    let c = constraint_norm_f64(points, space);
    if c <= 0.0 {
        return 0.0;
    }
    points.iter().map(|x| f.eval_f64(x).abs()).sum::<f64>() / c
}

/// Seeded coordinate ascent on `Σ|f(x_i)| / constraint_norm` in floating
/// point; returns the rationalized end point.
fn ascend(f: &PwlFunction, space: &SpaceSpec, k: usize, seed: u64, tolerance: f64) -> FunctionalTuple {
    let d = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<Vec<f64>> = (0..k).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let mut best = ascent_objective(f, &x, space);
    let mut step = 0.5;
    let mut sweeps = 0;
    while step > tolerance && sweeps < ASCENT_MAX_SWEEPS {
        let mut improved = false;
        for i in 0..k {
            for j in 0..d {
                for delta in [step, -step] {
                    x[i][j] += delta;
                    let v = ascent_objective(f, &x, space);
                    if v > best * (1.0 + 1e-13) {
                        best = v;
                        improved = true;
                        break;
                    }
                    x[i][j] -= delta;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
        sweeps += 1;
    }
    // Scale to unit constraint before rationalizing, so denominators stay small.
    let c = constraint_norm_f64(&x, space);
    let s = if c > 0.0 { 1.0 / c } else { 1.0 };
    FunctionalTuple(x.iter().map(|p| p.iter().map(|a| rationalize(a * s, RATIONAL_DEN_CAP)).collect()).collect())
}

/// Certified bounds for any space: the lower bound is the exact score of
/// the best tuple found by a deterministic sweep and seeded ascent, the
/// upper bound is [`strong_unit_bound`].
pub fn norm_bounds(f: &PwlFunction, space: &SpaceSpec, opts: &NormOptions) -> Result<NormCertificate, NormError> {
    check_dim(f, space)?;
    if is_zero_function(f)? {
        let mut zero = NormCertificate::zero(space);
        zero.upper_method = UpperMethod::StrongUnit;
        return Ok(zero);
    }
    let d = space.dim();
    let unit = strong_unit_bound(f, space)?;
    let extra = space.ball_vertices().unwrap_or_else(|| (0..d).map(|i| LinFunc::unit(d, i)).collect());
    let dec = CellDecomposition::new(f, &extra)?;
    let cells = dec.cells().len();
    let k_max = opts.k_max.unwrap_or(2 * cells).max(1);
    let k_cap = k_max.min(d + 1).min(ASCENT_K_CAP);

    let mut candidates = sweep_candidates(&dec, f, space);
    let ascended: Vec<FunctionalTuple> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let seed = opts.seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            normalize(ascend(f, space, 1 + r % k_cap, seed, opts.tolerance), space)
        })
        .collect();
    candidates.extend(ascended);
    candidates.retain(|t| !t.is_empty() && t.len() <= k_max);

    let scored = candidates
        .into_par_iter()
        .map(|t| tuple_seminorm_value(f, &t, space).map(|v| (v, t)))
        .collect::<Result<Vec<_>, _>>()?;
    let (lower, witness) = scored
        .into_iter()
        .reduce(|a, b| {
            let better = b.0 > a.0 || (b.0 == a.0 && b.1.encode() < a.1.encode());
            if better {
                b
            } else {
                a
            }
        })
        .ok_or_else(|| NormError::Fault("no candidate tuples".into()))?;
    if lower > unit.upper {
        return Err(NormError::Fault(format!("lower bound {lower} exceeds upper bound {}", unit.upper)));
    }
    Ok(NormCertificate {
        space: space.clone(),
        exact: lower == unit.upper,
        lower,
        upper: unit.upper,
        witness,
        upper_method: UpperMethod::StrongUnit,
        lambda: unit.lambda,
        unit_support: unit.support,
        unit_norm_sum: unit.norm_sum,
        cells,
        k_max,
    })
}
