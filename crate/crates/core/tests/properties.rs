use latfree::expr::{parse, print, Expr};
use latfree::linalg::rank;
use latfree::lattice::make_element;
use latfree::norm::{norm_exact_polyhedral, PNorm, SpaceSpec};
use latfree::pwl::{equivalent, solve_lp, Arrangement, Equivalence, Goal, LinFunc, LinearConstraint, LpOutcome, PwlFunction};
use latfree::random::{random_expr, random_vector, rewrite_equivalent, seeded};
use latfree::rational::{frac, int, Rational};
use num_traits::Zero;
use proptest::prelude::*;

fn expr_strategy(arity: usize) -> impl Strategy<Value = Expr> {
    (any::<u64>(), 1..=5usize).prop_map(move |(seed, leaves)| random_expr(&mut seeded(seed), arity, leaves, 3))
}

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| frac(n, d))
}

fn point(d: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(rational(), d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_then_parse_is_identity(e in expr_strategy(3)) {
        prop_assert_eq!(parse(&print(&e), 3).unwrap(), e);
    }

    #[test]
    fn positive_homogeneity(e in expr_strategy(3), x in point(3), c in (0i64..=5, 1i64..=3)) {
        let c = frac(c.0, c.1);
        let scaled: Vec<Rational> = x.iter().map(|a| a * &c).collect();
        prop_assert_eq!(e.eval(&scaled).unwrap(), &c * e.eval(&x).unwrap());
    }

    #[test]
    fn substitution_commutes_with_evaluation(
        e in expr_strategy(2),
        g1 in expr_strategy(3),
        g2 in expr_strategy(3),
        x in point(3),
    ) {
        let composed = e.substitute(&[g1.clone(), g2.clone()]).unwrap();
        let inner = [g1.eval(&x).unwrap(), g2.eval(&x).unwrap()];
        prop_assert_eq!(composed.eval(&x).unwrap(), e.eval(&inner).unwrap());
    }

    #[test]
    fn rewrites_are_recognized_as_equal(e in expr_strategy(3), seed in any::<u64>()) {
        let g = rewrite_equivalent(&mut seeded(seed), &e, 4);
        let verdict = equivalent(&PwlFunction::free(e, 3).unwrap(), &PwlFunction::free(g, 3).unwrap()).unwrap();
        prop_assert!(verdict.is_equal());
    }

    #[test]
    fn inequality_witnesses_separate(a in expr_strategy(3), b in expr_strategy(3), x in point(3)) {
        let verdict = equivalent(&PwlFunction::free(a.clone(), 3).unwrap(), &PwlFunction::free(b.clone(), 3).unwrap()).unwrap();
        match verdict {
            Equivalence::Equal => prop_assert_eq!(a.eval(&x).unwrap(), b.eval(&x).unwrap()),
            Equivalence::Unequal { witness, left, right } => {
                prop_assert_ne!(&left, &right);
                prop_assert_eq!(a.eval(&witness).unwrap(), left);
                prop_assert_eq!(b.eval(&witness).unwrap(), right);
            }
        }
    }

    #[test]
    fn lp_matches_vertex_enumeration(
        rows in proptest::collection::vec((point(2), 1i64..=6), 1..5),
        objective in point(2),
    ) {
        let mut constraints: Vec<(Vec<Rational>, Rational)> = rows.into_iter().map(|(a, b)| (a, int(b))).collect();
        for (i, s) in [(0, 1), (0, -1), (1, 1), (1, -1)] {
            let mut a = vec![int(0), int(0)];
            a[i] = int(s);
            constraints.push((a, int(5)));
        }
        let lp: Vec<LinearConstraint> = constraints.iter().map(|(a, b)| LinearConstraint::le(a.clone(), b.clone())).collect();
        let value = match solve_lp(&objective, &lp, Goal::Maximize) {
            LpOutcome::Optimal { value, point } => {
                prop_assert!(lp.iter().all(|c| c.is_satisfied(&point)));
                value
            }
            other => return Err(TestCaseError::fail(format!("{other:?}"))),
        };
        let mut best: Option<Rational> = None;
        for (i, (a, b)) in constraints.iter().enumerate() {
            for (c, d) in &constraints[i + 1..] {
                let det = &a[0] * &c[1] - &a[1] * &c[0];
                if det.is_zero() {
                    continue;
                }
                let x = vec![(b * &c[1] - &a[1] * d) / &det, (&a[0] * d - &c[0] * b) / &det];
                if lp.iter().all(|k| k.is_satisfied(&x)) {
                    let v = &objective[0] * &x[0] + &objective[1] * &x[1];
                    if best.as_ref().is_none_or(|b| v > *b) {
                        best = Some(v);
                    }
                }
            }
        }
        prop_assert_eq!(Some(value), best);
    }

    #[test]
    fn arrangement_cells_cover_generic_points(normals in proptest::collection::vec(point(3), 1..5), x in point(3)) {
        let arr = Arrangement::from_hyperplanes(3, normals.into_iter().map(LinFunc));
        for cell in arr.cells() {
            prop_assert!(arr.hyperplanes().iter().zip(&cell.signs).all(|(h, s)| !s.apply(&h.eval(&cell.interior)).is_zero()
                && s.apply(&h.eval(&cell.interior)) > int(0)));
        }
        let generic = arr.hyperplanes().iter().all(|h| !h.eval(&x).is_zero());
        prop_assert_eq!(arr.locate(&x).is_some(), generic);
        // The recorded facets describe each cell, and its rays are exactly
        // the arrangement lines lying in its closure.
        let hs = arr.hyperplanes();
        let lines = arr.lines();
        let essential = rank(&hs.iter().map(|h| h.0.clone()).collect::<Vec<_>>()) == 3;
        for cell in arr.cells() {
            let on_side = |j: usize, p: &[Rational]| cell.signs[j].apply(&hs[j].eval(p));
            let all = (0..hs.len()).all(|j| on_side(j, &x) > int(0));
            let by_facets = cell.facets.iter().all(|&j| on_side(j, &x) > int(0));
            prop_assert_eq!(all, by_facets);
            if essential {
                let mut brute: Vec<Vec<Rational>> = lines
                    .iter()
                    .flat_map(|l| [l.0.clone(), l.0.iter().map(|a| -a).collect()])
                    .filter(|r| (0..hs.len()).all(|j| on_side(j, r) >= int(0)))
                    .collect();
                brute.sort();
                prop_assert_eq!(arr.cell_rays(cell), &brute[..]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn reduced_elements_realize_the_same_function(
        e in expr_strategy(3),
        seed in any::<u64>(),
        x in point(2),
    ) {
        let mut rng = seeded(seed);
        let mut vectors: Vec<Vec<Rational>> = (0..2).map(|_| random_vector(&mut rng, 2, 3, 2)).collect();
        // A dependent third vector exercises the reduction.
        vectors.push(vectors[0].iter().zip(&vectors[1]).map(|(a, b)| a * int(2) - b).collect());
        let space = SpaceSpec::seq(PNorm::One, 2);
        let f = make_element(&space, &vectors, &e).unwrap();
        let args: Vec<Rational> = vectors.iter().map(|v| v.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
        prop_assert_eq!(f.function().eval(&x).unwrap(), e.eval(&args).unwrap());
        prop_assert!(f.vectors.len() <= 2);
    }

    #[test]
    fn exact_norm_is_a_seminorm(a in expr_strategy(2), b in expr_strategy(2)) {
        let space = SpaceSpec::fvl(2);
        let n = |e: Expr| norm_exact_polyhedral(&PwlFunction::free(e, 2).unwrap(), &space).unwrap();
        let (na, nb, nab) = (n(a.clone()), n(b.clone()), n(Expr::add(a.clone(), b)));
        prop_assert!(na.exact && nb.exact && nab.exact);
        prop_assert!(nab.upper <= &na.upper + &nb.upper);
        prop_assert_eq!(n(Expr::abs(a.clone())).upper, na.upper.clone());
        prop_assert_eq!(n(Expr::scale(int(-3), a)).upper, int(3) * na.upper);
    }
}
