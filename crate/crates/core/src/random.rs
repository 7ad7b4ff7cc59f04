//! Seeded generators for random expressions, vectors and identity-preserving
//! rewrites, shared by tests, benchmarks and the self-test.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::Expr;
use crate::rational::{frac, int, Rational};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer coefficient in `-bound..=bound` other than zero and one.
fn coefficient<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    loop {
        let c = rng.gen_range(-bound..=bound);
        if c != 0 && c != 1 {
            return int(c);
        }
        if bound <= 1 {
            return int(-1);
        }
    }
}

/// Random expression in `t1..t_arity` with exactly `leaves` variable
/// occurrences and integer coefficients in `-coeff..=coeff`.
pub fn random_expr<R: Rng>(rng: &mut R, arity: usize, leaves: usize, coeff: i64) -> Expr {
    let node = if leaves <= 1 {
        Expr::Var(rng.gen_range(1..=arity))
    } else {
        let left = rng.gen_range(1..leaves);
        let a = random_expr(rng, arity, left, coeff);
        let b = random_expr(rng, arity, leaves - left, coeff);
        match rng.gen_range(0..3) {
            0 => Expr::add(a, b),
            1 => Expr::sup(a, b),
            _ => Expr::inf(a, b),
        }
    };
    match rng.gen_range(0..8) {
        0 | 1 => Expr::scale(coefficient(rng, coeff), node),
        2 if leaves > 1 => Expr::abs(node),
        _ => node,
    }
}

pub fn random_rational<R: Rng>(rng: &mut R, bound: i64, max_den: i64) -> Rational {
    frac(rng.gen_range(-bound..=bound), rng.gen_range(1..=max_den))
}

pub fn random_vector<R: Rng>(rng: &mut R, dim: usize, bound: i64, max_den: i64) -> Vec<Rational> {
    (0..dim).map(|_| random_rational(rng, bound, max_den)).collect()
}

pub fn random_nonzero_vector<R: Rng>(rng: &mut R, dim: usize, bound: i64, max_den: i64) -> Vec<Rational> {
    loop {
        let v = random_vector(rng, dim, bound, max_den);
        if v.iter().any(|a| !a.is_zero()) {
            return v;
        }
    }
}

/// Applies one identity valid in every vector lattice at a random node.
pub fn rewrite_once<R: Rng>(rng: &mut R, e: &Expr) -> Expr {
    let size = e.node_count();
    let target = rng.gen_range(0..size);
    let mut counter = 0;
    rewrite_at(rng, e, target, &mut counter)
}

/// `steps` random identity rewrites; the result realizes the same function.
pub fn rewrite_equivalent<R: Rng>(rng: &mut R, e: &Expr, steps: usize) -> Expr {
    let mut out = e.clone();
    for _ in 0..steps {
        out = rewrite_once(rng, &out);
    }
    out
}

fn rewrite_at<R: Rng>(rng: &mut R, e: &Expr, target: usize, counter: &mut usize) -> Expr {
    let here = *counter;
    *counter += 1;
    if here == target {
        return apply_identity(rng, e);
    }
    match e {
        Expr::Var(_) => e.clone(),
        Expr::Scale(c, a) => Expr::scale(c.clone(), rewrite_at(rng, a, target, counter)),
        Expr::Add(a, b) => {
            let a = rewrite_at(rng, a, target, counter);
            Expr::add(a, rewrite_at(rng, b, target, counter))
        }
        Expr::Sup(a, b) => {
            let a = rewrite_at(rng, a, target, counter);
            Expr::sup(a, rewrite_at(rng, b, target, counter))
        }
        Expr::Inf(a, b) => {
            let a = rewrite_at(rng, a, target, counter);
            Expr::inf(a, rewrite_at(rng, b, target, counter))
        }
    }
}

fn apply_identity<R: Rng>(rng: &mut R, e: &Expr) -> Expr {
    let half = frac(1, 2);
    match (e, rng.gen_range(0..3)) {
        (Expr::Sup(a, b), 0) => Expr::sup((**b).clone(), (**a).clone()),
        (Expr::Inf(a, b), 0) => Expr::inf((**b).clone(), (**a).clone()),
        (Expr::Add(a, b), 0) => Expr::add((**b).clone(), (**a).clone()),
        // a ∨ b = a + b − a ∧ b
        (Expr::Sup(a, b), 1) => Expr::sub(Expr::add((**a).clone(), (**b).clone()), Expr::inf((**a).clone(), (**b).clone())),
        // a ∧ b = (a + b − |a − b|) / 2
        (Expr::Inf(a, b), 1) => Expr::scale(
            half,
            Expr::sub(Expr::add((**a).clone(), (**b).clone()), Expr::abs(Expr::sub((**a).clone(), (**b).clone()))),
        ),
        (Expr::Add(a, b), 1) => match &**b {
            Expr::Sup(c, d) => Expr::sup(Expr::add((**a).clone(), (**c).clone()), Expr::add((**a).clone(), (**d).clone())),
            Expr::Inf(c, d) => Expr::inf(Expr::add((**a).clone(), (**c).clone()), Expr::add((**a).clone(), (**d).clone())),
            _ => Expr::sub(Expr::add(Expr::scale(int(2), (**a).clone()), (**b).clone()), (**a).clone()),
        },
        (Expr::Scale(c, inner), _) => match &**inner {
            Expr::Sup(a, b) | Expr::Inf(a, b) => {
                let (ca, cb) = (Expr::scale(c.clone(), (**a).clone()), Expr::scale(c.clone(), (**b).clone()));
                let is_sup = matches!(**inner, Expr::Sup(..));
                if is_sup == (*c >= Rational::zero()) {
                    Expr::sup(ca, cb)
                } else {
                    Expr::inf(ca, cb)
                }
            }
            Expr::Add(a, b) => Expr::add(Expr::scale(c.clone(), (**a).clone()), Expr::scale(c.clone(), (**b).clone())),
            _ => Expr::scale(c * int(2), Expr::scale(half, (**inner).clone())),
        },
        // idempotence, then absorption
        (other, 2) => Expr::inf(other.clone(), Expr::sup(other.clone(), other.clone())),
        (other, _) => Expr::sup(other.clone(), Expr::inf(other.clone(), Expr::scale(int(2), other.clone()))),
    }
}

/// A small change that usually, but not always, changes the function.
pub fn mutate<R: Rng>(rng: &mut R, e: &Expr, arity: usize) -> Expr {
    let size = e.node_count();
    let target = rng.gen_range(0..size);
    let mut counter = 0;
    mutate_at(e, target, &mut counter, arity)
}

fn mutate_at(e: &Expr, target: usize, counter: &mut usize, arity: usize) -> Expr {
    let here = *counter;
    *counter += 1;
    if here == target {
        return match e {
            Expr::Var(i) => Expr::Var(if arity > 1 { i % arity + 1 } else { *i }),
            Expr::Scale(c, a) => Expr::scale(c + int(1), (**a).clone()),
            Expr::Add(a, b) => Expr::sup((**a).clone(), (**b).clone()),
            Expr::Sup(a, b) => Expr::inf((**a).clone(), (**b).clone()),
            Expr::Inf(a, b) => Expr::add((**a).clone(), (**b).clone()),
        };
    }
    match e {
        Expr::Var(_) => e.clone(),
        Expr::Scale(c, a) => Expr::scale(c.clone(), mutate_at(a, target, counter, arity)),
        Expr::Add(a, b) => {
            let a = mutate_at(a, target, counter, arity);
            Expr::add(a, mutate_at(b, target, counter, arity))
        }
        Expr::Sup(a, b) => {
            let a = mutate_at(a, target, counter, arity);
            Expr::sup(a, mutate_at(b, target, counter, arity))
        }
        Expr::Inf(a, b) => {
            let a = mutate_at(a, target, counter, arity);
            Expr::inf(a, mutate_at(b, target, counter, arity))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_seeded() {
        let a = random_expr(&mut seeded(4), 3, 5, 3);
        let b = random_expr(&mut seeded(4), 3, 5, 3);
        assert_eq!(a, b);
        assert!(a.max_var() <= 3);
    }

    #[test]
    fn rewrites_keep_values() {
        let mut rng = seeded(11);
        for _ in 0..200 {
            let e = random_expr(&mut rng, 3, 4, 3);
            let g = rewrite_equivalent(&mut rng, &e, 3);
            for _ in 0..20 {
                let x = random_vector(&mut rng, 3, 5, 3);
                assert_eq!(e.eval(&x).unwrap(), g.eval(&x).unwrap(), "{} vs {}", crate::expr::print(&e), crate::expr::print(&g));
            }
        }
    }
}
