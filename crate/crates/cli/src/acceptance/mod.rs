//! The acceptance suite behind `latfree selftest` and the `acceptance` test
//! target. Every criterion compares the library against the reference
//! computations in [`oracle`] and reports a deterministic one-line detail.

pub mod oracle;

use std::time::{Duration, Instant};

use latfree::expr::{parse, Expr};
use latfree::lattice::{embed, extend_hom, make_element, FreeElement, LatticeMap, TargetLattice};
use latfree::norm::{
    norm_bounds, norm_certificate, norm_exact_polyhedral, NormCertificate, NormError, NormOptions, PNorm,
    SlotProblem, SpaceSpec,
};
use latfree::pwl::{equivalent, Equivalence, PwlFunction};
use latfree::random::{mutate, random_expr, random_nonzero_vector, random_rational, rewrite_equivalent, seeded};
use latfree::rational::{fmt_rational, frac, int, to_f64};
use latfree::Rational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Worker count compared against a single thread in the determinism check.
    pub threads: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0, threads: 4 }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

type Check = fn(&SuiteConfig, &mut ChaCha8Rng) -> Result<Verdict, NormError>;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Result<Verdict, NormError> {
    Ok(Verdict { passed, detail: detail.into() })
}

const CRITERIA: [(usize, &str, Option<u64>, Check); 10] = [
    (1, "generator norms", Some(4), generator_norms),
    (2, "equivalence", Some(30), equivalence),
    (3, "exact norm suite", Some(50), exact_suite),
    (4, "fvl agrees with seq:1", Some(300), fvl_vs_seq1),
    (5, "embedded vectors", Some(60), embedded_vectors),
    (6, "norm axioms", None, norm_axioms),
    (7, "sandwich certificates", None, sandwich),
    (8, "lattice homomorphisms", Some(120), homomorphisms),
    (9, "larger k never helps", Some(60), slot_saturation),
    (10, "determinism", None, determinism),
];

/// Runs the selected criteria (all when `only` is `None`) in order.
pub fn run_suite(cfg: &SuiteConfig, only: Option<&[usize]>) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .filter(|(id, ..)| only.is_none_or(|ids| ids.contains(id)))
        .map(|&(id, name, limit, check)| {
            let mut rng = seeded(cfg.seed.wrapping_mul(0x2545_F491_4F6C_DD1D) ^ id as u64);
            let start = Instant::now();
            let outcome = check(cfg, &mut rng);
            let elapsed = start.elapsed();
            let limit = limit.map(Duration::from_secs);
            let (mut passed, mut detail) = match outcome {
                Ok(v) => (v.passed, v.detail),
                Err(e) => (false, format!("error: {e}")),
            };
            if limit.is_some_and(|l| elapsed > l) {
                passed = false;
                detail.push_str("; over the time limit");
            }
            CriterionResult { id, name, passed, detail, elapsed, limit }
        })
        .collect()
}

fn identity(n: usize) -> Vec<Vec<Rational>> {
    (0..n).map(|i| (0..n).map(|j| int((i == j) as i64)).collect()).collect()
}

fn element(space: &SpaceSpec, e: &Expr) -> Result<FreeElement, NormError> {
    make_element(space, &identity(space.dim()), e)
}

fn exact(f: &FreeElement) -> Result<Rational, NormError> {
    let c = norm_exact_polyhedral(f.function(), &f.space)?;
    if c.lower != c.upper {
        return Err(NormError::Fault(format!("exact path left a gap {}", fmt_rational(&c.gap()))));
    }
    Ok(c.upper)
}

struct SuiteEntry {
    label: &'static str,
    n: usize,
    text: &'static str,
    value: i64,
    /// A tuple of dual points scoring `value`.
    witness: Vec<Vec<i64>>,
    /// `|f| <= λ Σ|δ_j|`, so `‖f‖ <= λ n`.
    lambda: Rational,
}

fn exact_norm_suite() -> Vec<SuiteEntry> {
    vec![
        SuiteEntry {
            label: "a\\/b",
            n: 2,
            text: "t1 \\/ t2",
            value: 2,
            witness: vec![vec![1, 0], vec![0, 1]],
            lambda: int(1),
        },
        SuiteEntry {
            label: "a\\/b\\/c",
            n: 3,
            text: "t1 \\/ t2 \\/ t3",
            value: 3,
            witness: vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
            lambda: int(1),
        },
        SuiteEntry {
            label: "|a|+|b|",
            n: 2,
            text: "|t1| + |t2|",
            value: 2,
            witness: vec![vec![1, 1], vec![1, -1]],
            lambda: int(1),
        },
        SuiteEntry { label: "a-b", n: 2, text: "t1 - t2", value: 2, witness: vec![vec![1, -1]], lambda: int(1) },
        SuiteEntry { label: "|a|", n: 1, text: "|t1|", value: 1, witness: vec![vec![1]], lambda: int(1) },
    ]
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&a| int(a)).collect()
}

fn generator_norms(_: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Verdict, NormError> {
    let mut count = 0;
    let mut slow = 0;
    let mut bad = Vec::new();
    for n in 1..=4 {
        let space = SpaceSpec::fvl(n);
        for i in 1..=n {
            let start = Instant::now();
            let c = norm_exact_polyhedral(FreeElement::generator(&space, i)?.function(), &space)?;
            if start.elapsed() > Duration::from_secs(1) {
                slow += 1;
            }
            count += 1;
            if !(c.exact && c.lower == int(1) && c.upper == int(1)) {
                bad.push(format!("fvl:{n} t{i} -> [{}, {}]", fmt_rational(&c.lower), fmt_rational(&c.upper)));
            }
        }
    }
    let passed = bad.is_empty() && slow == 0;
    let detail = if passed {
        format!("{count} generators, each exactly 1")
    } else {
        format!("{} wrong, {slow} over 1 s: {}", bad.len(), bad.join(", "))
    };
    verdict(passed, detail)
}

fn equivalence(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Verdict, NormError> {
    const POINTS: usize = 10_000;
    let lhs = parse("t1 + (t2 \\/ t3)", 3).expect("literal");
    let rhs = parse("(t1 + t2) \\/ (t1 + t3)", 3).expect("literal");
    let distributive = equivalent(&PwlFunction::free(lhs.clone(), 3)?, &PwlFunction::free(rhs.clone(), 3)?)?;
    let sampled = oracle::sampled_difference(&lhs, &rhs, 3, POINTS, rng);
    let distributive_ok = distributive.is_equal() && sampled.is_none();

    let (mut equal, mut unequal, mut contradictions) = (0, 0, Vec::new());
    for t in 0..200 {
        let n = rng.gen_range(1..=3);
        let leaves = rng.gen_range(2..=5);
        let a = random_expr(rng, n, leaves, 3);
        let b = if t % 2 == 0 { rewrite_equivalent(rng, &a, 3) } else { mutate(rng, &a, n) };
        let verdict = equivalent(&PwlFunction::free(a.clone(), n)?, &PwlFunction::free(b.clone(), n)?)?;
        let sampled = oracle::sampled_difference(&a, &b, n, POINTS, rng);
        let consistent = match &verdict {
            Equivalence::Equal => {
                equal += 1;
                sampled.is_none()
            }
            Equivalence::Unequal { witness, left, right } => {
                unequal += 1;
                // A witness separating the two exactly settles it even if
                // sampling missed the region where they differ.
                witness.len() == n
                    && oracle::eval(&a, witness) == *left
                    && oracle::eval(&b, witness) == *right
                    && left != right
            }
        };
        if !consistent {
            contradictions.push(t);
        }
    }
    let passed = distributive_ok && contradictions.is_empty();
    verdict(
        passed,
        format!(
            "distributivity {}; 200 pairs: {equal} equal, {unequal} unequal, {} contradictions",
            if distributive_ok { "equal" } else { "NOT decided equal" },
            contradictions.len()
        ),
    )
}

fn exact_suite(_: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Verdict, NormError> {
    let mut lines = Vec::new();
    let mut passed = true;
    for entry in exact_norm_suite() {
        let space = SpaceSpec::fvl(entry.n);
        let e = parse(entry.text, entry.n).expect("literal");
        let f = element(&space, &e)?;
        let start = Instant::now();
        let c = norm_exact_polyhedral(f.function(), &space)?;
        let in_time = start.elapsed() <= Duration::from_secs(10);
        let expected = int(entry.value);
        let id = identity(entry.n);
        let witness: Vec<Vec<Rational>> = entry.witness.iter().map(|w| ints(w)).collect();
        let hand_lower = oracle::rescores_to(&expected, &e, &id, &witness, &space);
        let hand_upper = entry.lambda == oracle::lambda(&e, entry.n) && &entry.lambda * int(entry.n as i64) == expected;
        let grid = oracle::grid_lower(&e, &id, &space, entry.n.min(3));
        let ok = c.exact && c.lower == expected && c.upper == expected && grid == expected && hand_lower && hand_upper && in_time;
        passed &= ok;
        lines.push(format!("{}={}{}", entry.label, fmt_rational(&c.upper), if ok { "" } else { "(!)" }));
    }
    verdict(passed, lines.join(" "))
}

fn fvl_vs_seq1(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Verdict, NormError> {
    let mut mismatches = 0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let leaves = rng.gen_range(1..=4);
        let e = random_expr(rng, n, leaves, 3);
        let a = exact(&element(&SpaceSpec::fvl(n), &e)?)?;
        let b = exact(&element(&SpaceSpec::seq(PNorm::One, n), &e)?)?;
        if a != b {
            mismatches += 1;
        }
    }
    verdict(mismatches == 0, format!("50 expressions, {mismatches} mismatches"))
}

fn embedded_vectors(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Verdict, NormError> {
    let mut bad = 0;
    let mut widest = 0.0f64;
    let opts = NormOptions { seed: cfg.seed, ..NormOptions::default() };
    for t in 0..20 {
        let m = rng.gen_range(1..=3);
        let p = [PNorm::One, PNorm::Two, PNorm::Inf][t % 3].clone();
        let x = random_nonzero_vector(rng, m, 5, 4);
        let space = SpaceSpec::seq(p.clone(), m);
        let c = norm_certificate(embed(&space, &x)?.function(), &space, &opts)?;
        let target = oracle::norm_power(&x, &p);
        let ok = match p {
            PNorm::Two => {
                let gap = to_f64(&c.gap());
                widest = widest.max(gap);
                &c.lower * &c.lower <= target && target <= &c.upper * &c.upper && gap <= 1e-9
            }
            _ => c.exact && c.lower == target && c.upper == target,
        };
        if !ok {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("20 vectors, {bad} wrong, widest l2 gap {widest:.1e}"))
}

fn random_space(rng: &mut ChaCha8Rng, t: usize, n: usize) -> SpaceSpec {
    match t % 3 {
        0 => SpaceSpec::fvl(n),
        1 => SpaceSpec::seq(PNorm::One, n),
        _ => SpaceSpec::seq(PNorm::Inf, n.max(rng.gen_range(1..=3))),
    }
}

fn norm_axioms(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Verdict, NormError> {
    let mut failures: Vec<String> = Vec::new();
    let mut dominated = 0;
    for t in 0..50 {
        let n = rng.gen_range(1..=3);
        let space = random_space(rng, t, n);
        let d = space.dim();
        let vectors = if matches!(space, SpaceSpec::Fvl { .. }) {
            identity(n)
        } else {
            (0..n).map(|_| random_nonzero_vector(rng, d, 2, 2)).collect()
        };
        let (la, lb) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let ea = random_expr(rng, n, la, 3);
        let eb = random_expr(rng, n, lb, 3);
        let f = make_element(&space, &vectors, &ea)?;
        let g = make_element(&space, &vectors, &eb)?;
        let (nf, ng) = (exact(&f)?, exact(&g)?);

        if exact(&f.plus(&g)?)? > &nf + &ng {
            failures.push(format!("triangle #{t}"));
        }
        let c = loop {
            let c = random_rational(rng, 3, 3);
            if !c.is_zero() {
                break c;
            }
        };
        if exact(&f.scaled(&c)?)? != c.abs() * &nf {
            failures.push(format!("homogeneity #{t}"));
        }
        if exact(&f.abs()?)? != nf {
            failures.push(format!("modulus #{t}"));
        }
        // h = |f| ∨ |g| dominates both, which the equivalence test must confirm.
        let h = f.abs()?.sup(&g.abs()?)?;
        let nh = exact(&h)?;
        for (x, nx) in [(&f, &nf), (&g, &ng)] {
            let dominates = equivalent(x.abs()?.sup(&h)?.function(), h.function())?.is_equal();
            if !dominates || *nx > nh {
                failures.push(format!("monotonicity #{t}"));
            }
        }
        if equivalent(f.abs()?.sup(&g.abs()?)?.function(), g.abs()?.function())?.is_equal() {
            dominated += 1;
            if nf > ng {
                failures.push(format!("monotonicity (pair) #{t}"));
            }
        }
        let zero_fn = f.is_zero()?;
        let sampled_zero = sampled_zero(&ea, &vectors, d, rng);
        if zero_fn != sampled_zero || (!zero_fn && !nf.is_positive()) || (zero_fn && !nf.is_zero()) {
            failures.push(format!("nondegeneracy #{t}"));
        }
    }
    failures.dedup();
    let detail = if failures.is_empty() {
        format!("50 pairs, {dominated} naturally dominated, no violations")
    } else {
        format!("violations: {}", failures.join(", "))
    };
    verdict(failures.is_empty(), detail)
}

/// Whether `e(⟨v_1, x⟩, …)` vanishes on 2000 random dual points.
fn sampled_zero(e: &Expr, vectors: &[Vec<Rational>], d: usize, rng: &mut ChaCha8Rng) -> bool {
    (0..2000).all(|_| {
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let args: Vec<f64> = vectors.iter().map(|v| v.iter().zip(&x).map(|(a, b)| to_f64(a) * b).sum()).collect();
        oracle::eval_f64(e, &args).abs() <= 1e-9
    })
}

fn sandwich(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Verdict, NormError> {
    let mut failures = Vec::new();
    let (mut exact_count, mut lambda_checked) = (0, 0);
    for t in 0..100 {
        let n = rng.gen_range(1..=3);
        let space = match t % 4 {
            0 => SpaceSpec::fvl(n),
            1 => SpaceSpec::seq(PNorm::One, rng.gen_range(n..=3)),
            2 => SpaceSpec::seq(PNorm::Two, rng.gen_range(n..=3)),
            _ => SpaceSpec::seq(PNorm::Inf, rng.gen_range(n..=3)),
        };
        let d = space.dim();
        let vectors = if matches!(space, SpaceSpec::Fvl { .. }) {
            identity(n)
        } else {
            (0..n).map(|_| random_nonzero_vector(rng, d, 3, 2)).collect()
        };
        let leaves = rng.gen_range(1..=4);
        let e = random_expr(rng, n, leaves, 3);
        let f = make_element(&space, &vectors, &e)?;
        let opts = NormOptions { seed: cfg.seed ^ t as u64, ..NormOptions::default() };
        let c = norm_bounds(f.function(), &space, &opts)?;
        exact_count += c.exact as usize;

        let mut ok = c.lower <= c.upper && c.upper == &c.lambda * &c.unit_norm_sum;
        ok &= c.witness.is_empty() && c.lower.is_zero()
            || oracle::rescores_to(&c.lower, &e, &vectors, c.witness.points(), &space);
        let used = e.vars();
        let rows: Vec<Vec<Rational>> = used.iter().map(|&j| vectors[j - 1].clone()).collect();
        if !f.is_zero()? && oracle::rank(&rows) == rows.len() {
            lambda_checked += 1;
            ok &= c.lambda == oracle::lambda(&e, n);
            ok &= norm_sum_matches(&c, &rows, &space);
        }
        if !ok {
            failures.push(format!("#{t}"));
        }
    }
    let detail = if failures.is_empty() {
        format!("100 certificates, {exact_count} closed, lambda checked on {lambda_checked}")
    } else {
        format!("failed: {}", failures.join(", "))
    };
    verdict(failures.is_empty(), detail)
}

fn norm_sum_matches(c: &NormCertificate, rows: &[Vec<Rational>], space: &SpaceSpec) -> bool {
    match space.exponent() {
        PNorm::Two => {
            let sum: f64 = rows.iter().map(|r| to_f64(&oracle::norm_power(r, &PNorm::Two)).sqrt()).sum();
            let claimed = to_f64(&c.unit_norm_sum);
            // Each term is rounded up, never down.
            let lower_ok = rows
                .iter()
                .all(|r| oracle::norm_power(r, &PNorm::Two) <= &c.unit_norm_sum * &c.unit_norm_sum);
            lower_ok && claimed >= sum - 1e-12 && claimed - sum <= 1e-9
        }
        p => c.unit_norm_sum == rows.iter().map(|r| oracle::norm_power(r, &p)).sum::<Rational>(),
    }
}

fn admissible_images(rng: &mut ChaCha8Rng, n: usize, r: usize, p: &PNorm) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|_| {
            let y = random_nonzero_vector(rng, r, 4, 3);
            let size = oracle::norm_power(&y, p);
            // Rescale onto the sphere, or leave it shorter at random.
            let shrink = if rng.gen_bool(0.5) { int(1) } else { frac(1, 2) };
            y.iter().map(|a| a / &size * &shrink).collect()
        })
        .collect()
}

fn homomorphisms(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Verdict, NormError> {
    let suite = exact_norm_suite();
    let mut failures = Vec::new();
    for t in 0..25 {
        let r = rng.gen_range(1..=3);
        let p = if t % 2 == 0 { PNorm::Inf } else { PNorm::One };
        let target = TargetLattice::new(r, p.clone());
        let entry = &suite[t % suite.len()];
        let mut cases: Vec<(Expr, usize, Option<Rational>)> =
            vec![(parse(entry.text, entry.n).expect("literal"), entry.n, Some(int(entry.value)))];
        let n = rng.gen_range(1..=3);
        let leaves = rng.gen_range(1..=4);
        cases.push((random_expr(rng, n, leaves, 3), n, None));
        for (e, n, known) in cases {
            let space = SpaceSpec::fvl(n);
            let images = admissible_images(rng, n, r, &p);
            let map = LatticeMap::from_generator_images(&images)?;
            let f = element(&space, &e)?;
            let norm = exact(&f)?;
            let image = extend_hom(&f, &map, &target)?;
            let mut ok = known.is_none_or(|v| v == norm);
            ok &= image == oracle::extension(&e, &images, r);
            ok &= oracle::norm_power(&image, &p) <= norm;
            let twin = element(&space, &rewrite_equivalent(rng, &e, 3))?;
            ok &= extend_hom(&twin, &map, &target)? == image;
            if !ok {
                failures.push(format!("#{t}"));
            }
        }
    }
    failures.dedup();
    let detail = if failures.is_empty() {
        "25 maps, contractive and invariant under rewriting".to_string()
    } else {
        format!("failed: {}", failures.join(", "))
    };
    verdict(failures.is_empty(), detail)
}

fn slot_saturation(_: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Verdict, NormError> {
    let mut lines = Vec::new();
    let mut passed = true;
    for entry in exact_norm_suite() {
        let space = SpaceSpec::fvl(entry.n);
        let f = element(&space, &parse(entry.text, entry.n).expect("literal"))?;
        let problem = SlotProblem::new(f.function(), &space)?;
        let slots = problem.all_slots();
        let (base, _) = problem.solve(&slots)?;
        let mut ok = base == int(entry.value) && slots.len() == problem.k_max();
        for s in &slots {
            let mut more = slots.clone();
            more.push(*s);
            ok &= problem.solve(&more)?.0 == base;
        }
        passed &= ok;
        lines.push(format!("{}: k_max={}{}", entry.label, problem.k_max(), if ok { "" } else { "(!)" }));
    }
    verdict(passed, lines.join(" "))
}

/// Certificates of a fixed batch, serialized; compared across thread counts.
fn digest(seed: u64) -> Result<String, NormError> {
    let cases = [
        ("fvl:2", "t1 \\/ t2", None),
        ("fvl:3", "(t1 - t2) /\\ |t3|", None),
        ("seq:inf:2", "|t1| + |t2|", None),
        ("seq:2:2", "t1 \\/ t2", Some("1,2;3,-1")),
        ("seq:2:3", "|t1 - 2*t2| /\\ t1", Some("1,0,1;0,1,-1")),
        ("seq:3/2:2", "t1 + t2^+", Some("1,1;2,-1")),
    ];
    let opts = NormOptions { seed, ..NormOptions::default() };
    let mut out = String::new();
    for (space, text, vectors) in cases {
        let space: SpaceSpec = space.parse().map_err(NormError::Fault)?;
        let vs = match vectors {
            Some(v) => crate::parse_vectors(v).map_err(|_| NormError::Fault("bad literal".into()))?,
            None => identity(space.dim()),
        };
        let e = parse(text, vs.len()).expect("literal");
        let c = norm_certificate(make_element(&space, &vs, &e)?.function(), &space, &opts)?;
        out.push_str(&format!(
            "{space} {} {} {}\n",
            fmt_rational(&c.lower),
            fmt_rational(&c.upper),
            c.witness.encode()
        ));
    }
    Ok(out)
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, NormError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| NormError::Fault(e.to_string()))?;
    Ok(pool.install(f))
}

fn determinism(cfg: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Verdict, NormError> {
    let seed = cfg.seed;
    let one = in_pool(1, || digest(seed))??;
    let many = in_pool(cfg.threads.max(2), || digest(seed))??;
    let args = |threads: &str| {
        vec![
            "latfree".to_string(),
            "norm".into(),
            "--space".into(),
            "seq:2:3".into(),
            "--expr".into(),
            "t1 \\/ (t2 - t3)".into(),
            "--vectors".into(),
            "1,0,2;0,1,1;1,-1,0".into(),
            "--seed".into(),
            seed.to_string(),
            "--threads".into(),
            threads.into(),
        ]
    };
    let first = crate::run_cli(args("1"));
    let second = crate::run_cli(args("1"));
    let parallel = crate::run_cli(args(&cfg.threads.max(2).to_string()));
    let reports_ok = first.code == 0 && first == second && first == parallel;
    let passed = one == many && reports_ok;
    verdict(
        passed,
        format!(
            "certificates {} across 1 and {} threads; reports {}",
            if one == many { "identical" } else { "DIFFER" },
            cfg.threads.max(2),
            if reports_ok { "byte-identical" } else { "DIFFER" }
        ),
    )
}
