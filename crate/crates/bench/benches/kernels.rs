use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use latfree::norm::{norm_bounds, norm_exact_polyhedral, NormOptions, PNorm, SpaceSpec};
use latfree::pwl::{equivalent, solve_lp, Arrangement, Goal, LinFunc, LinearConstraint, PwlFunction};
use latfree::random::rewrite_equivalent;
use latfree::rational::int;
use latfree_bench::{random_batch, suite};

fn lp(c: &mut Criterion) {
    // max x + y + z over the cross-polytope cut by a few slanted planes
    let mut rows = Vec::new();
    for mask in 0..8 {
        let s = |i: i64| if mask & (1 << i) != 0 { int(-1) } else { int(1) };
        rows.push(LinearConstraint::le(vec![s(0), s(1), s(2)], int(1)));
    }
    rows.push(LinearConstraint::le(vec![int(2), int(-1), int(1)], int(1)));
    rows.push(LinearConstraint::le(vec![int(1), int(3), int(-2)], int(2)));
    let objective = vec![int(1), int(1), int(1)];
    c.bench_function("lp/cross_polytope", |b| b.iter(|| solve_lp(black_box(&objective), black_box(&rows), Goal::Maximize)));
}

fn arrangement(c: &mut Criterion) {
    let mut group = c.benchmark_group("arrangement");
    for leaves in [3, 5] {
        let normals: Vec<LinFunc> = random_batch(leaves, 4)
            .into_iter()
            .flat_map(|e| PwlFunction::free(e, 3).expect("valid").breakpoints())
            .collect();
        group.bench_with_input(BenchmarkId::from_parameter(leaves), &normals, |b, normals| {
            b.iter(|| Arrangement::from_hyperplanes(3, normals.iter().cloned()))
        });
    }
    group.finish();
}

fn exact_norm(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_norm");
    for (n, e) in suite() {
        let f = PwlFunction::free(e.clone(), n).expect("valid");
        let space = SpaceSpec::fvl(n);
        group.bench_function(latfree::print(&e), |b| b.iter(|| norm_exact_polyhedral(black_box(&f), &space)));
    }
    group.finish();
}

fn equivalence(c: &mut Criterion) {
    let mut rng = latfree::random::seeded(7);
    let pairs: Vec<(PwlFunction, PwlFunction)> = random_batch(4, 8)
        .into_iter()
        .map(|e| {
            let g = rewrite_equivalent(&mut rng, &e, 3);
            (PwlFunction::free(e, 3).expect("valid"), PwlFunction::free(g, 3).expect("valid"))
        })
        .collect();
    c.bench_function("equivalent/rewrites", |b| {
        b.iter(|| pairs.iter().all(|(f, g)| equivalent(f, g).map(|v| v.is_equal()).unwrap_or(false)))
    });
}

fn bounds(c: &mut Criterion) {
    let space = SpaceSpec::seq(PNorm::Two, 2);
    let f = PwlFunction::new(
        latfree::parse("t1 \\/ t2", 2).expect("valid"),
        vec![LinFunc(vec![int(1), int(2)]), LinFunc(vec![int(3), int(-1)])],
        2,
    )
    .expect("valid");
    let opts = NormOptions::default();
    let mut group = c.benchmark_group("bounds");
    group.sample_size(10);
    group.bench_function("l2_join", |b| b.iter(|| norm_bounds(black_box(&f), &space, &opts)));
    group.finish();
}

criterion_group!(benches, lp, arrangement, exact_norm, equivalence, bounds);
criterion_main!(benches);
