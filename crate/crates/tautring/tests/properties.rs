//! Randomized structural properties: mark-permutation equivariance of
//! integrals, exact recovery of random full-rank linear systems, stability
//! under redundant equations, parse/print round trips, and thread safety of
//! the evaluation pipeline.

use std::collections::BTreeMap;

use proptest::prelude::*;

use tautring::engine::{integrate, DegreeMode};
use tautring::parse::{format_monomial, parse_monomial, resolve_monomial};
use tautring::solver::{build_system, solve, TestCurve, UnknownClassSpec};
use tautring::{ClassExpression, Generator, Genus, ModuliSpace, Rational};

const MARKS: [&str; 3] = ["p1", "p2", "p3"];

fn space13() -> ModuliSpace {
    ModuliSpace::new(Genus::One, MARKS).expect("static space")
}

fn arb_generator() -> impl Strategy<Value = Generator> {
    prop_oneof![
        (0usize..3).prop_map(|i| Generator::psi(MARKS[i])),
        Just(Generator::Lambda1),
        Just(Generator::DeltaIrr),
        (1u32..8)
            .prop_filter("at least two marks", |bits| bits.count_ones() >= 2)
            .prop_map(|bits| {
                Generator::sep(
                    MARKS
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| bits & (1 << i) != 0)
                        .map(|(_, m)| *m),
                )
            }),
    ]
}

fn arb_powers() -> impl Strategy<Value = Vec<(Generator, u32)>> {
    prop::collection::vec((arb_generator(), 1u32..3), 1..4)
}

fn arb_small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..10, 1i64..5).prop_map(|(n, d)| Rational::new(n, d))
}

const PERMUTATIONS: [[&str; 3]; 6] = [
    ["p1", "p2", "p3"],
    ["p1", "p3", "p2"],
    ["p2", "p1", "p3"],
    ["p2", "p3", "p1"],
    ["p3", "p1", "p2"],
    ["p3", "p2", "p1"],
];

proptest! {
    /// Relabeling marks by any permutation never changes an integral.
    #[test]
    fn integrals_are_permutation_equivariant(powers in arb_powers()) {
        let space = space13();
        let expr = ClassExpression::monomial(&space, Rational::one(), &powers)
            .expect("valid monomial");
        let base = integrate(&expr, DegreeMode::Lenient).expect("integrates");
        for image in &PERMUTATIONS {
            let map: BTreeMap<String, String> = MARKS
                .iter()
                .zip(image.iter())
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect();
            let permuted = expr.relabel_marks(&map).expect("relabels");
            let value = integrate(&permuted, DegreeMode::Lenient).expect("integrates");
            prop_assert_eq!(&value, &base);
        }
    }

    /// The solver exactly recovers the solution of a random full-rank
    /// system built as L*U with nonzero diagonals, and appending the sum of
    /// all equations changes nothing.
    #[test]
    fn solver_recovers_random_full_rank_systems(
        k in 2usize..5,
        lower in prop::collection::vec(-5i64..6, 16),
        upper in prop::collection::vec(-5i64..6, 16),
        diag in prop::collection::vec(prop_oneof![(-9i64..0), (1i64..10)], 4),
        x in prop::collection::vec(arb_small_rational(), 4),
    ) {
        // A = L * U, L lower-triangular with nonzero diagonal, U unit
        // upper-triangular: full rank by construction.
        let mut a = vec![vec![Rational::zero(); k]; k];
        for i in 0..k {
            for j in 0..k {
                let mut sum = Rational::zero();
                for m in 0..k {
                    let l = match m.cmp(&i) {
                        std::cmp::Ordering::Less => Rational::from(lower[i * 4 + m]),
                        std::cmp::Ordering::Equal => Rational::from(diag[i]),
                        std::cmp::Ordering::Greater => Rational::zero(),
                    };
                    let u = match m.cmp(&j) {
                        std::cmp::Ordering::Less => Rational::zero(),
                        std::cmp::Ordering::Equal => Rational::one(),
                        std::cmp::Ordering::Greater => Rational::from(upper[m * 4 + j]),
                    };
                    sum += l * u;
                }
                a[i][j] = sum;
            }
        }
        let generators: Vec<String> = (0..k).map(|i| format!("g{i}")).collect();
        let spec = UnknownClassSpec::new(generators.clone(), vec![], vec![])
            .expect("valid spec");
        let mut curves: Vec<TestCurve> = (0..k)
            .map(|i| {
                let mut rhs = Rational::zero();
                for j in 0..k {
                    rhs += &a[i][j] * &x[j];
                }
                TestCurve {
                    name: format!("r{i}"),
                    pairings: generators
                        .iter()
                        .cloned()
                        .zip(a[i].iter().cloned())
                        .collect(),
                    rhs_constant: rhs,
                    rhs_aux: BTreeMap::new(),
                }
            })
            .collect();

        let report = solve(&build_system(&spec, &curves).expect("system builds"));
        prop_assert!(report.consistent);
        prop_assert_eq!(report.rank, k);
        prop_assert!(report.undetermined.is_empty());
        for (j, g) in generators.iter().enumerate() {
            prop_assert_eq!(&report.coefficients[g], &x[j]);
        }

        // Redundancy stability: append the sum of all equations.
        let mut sum_pairings: BTreeMap<String, Rational> = BTreeMap::new();
        let mut sum_rhs = Rational::zero();
        for curve in &curves {
            for (g, v) in &curve.pairings {
                *sum_pairings.entry(g.clone()).or_insert_with(Rational::zero) += v;
            }
            sum_rhs += &curve.rhs_constant;
        }
        curves.push(TestCurve {
            name: "sum".into(),
            pairings: sum_pairings,
            rhs_constant: sum_rhs,
            rhs_aux: BTreeMap::new(),
        });
        let extended = solve(&build_system(&spec, &curves).expect("system builds"));
        prop_assert!(extended.consistent);
        prop_assert_eq!(extended.rank, k);
        prop_assert_eq!(&extended.coefficients, &report.coefficients);
        prop_assert!(extended.residuals.values().all(Rational::is_zero));
    }

    /// Formatting a monomial and parsing it back yields the same powers.
    #[test]
    fn parse_print_round_trip(powers in arb_powers()) {
        let space = space13();
        let canonical: Vec<(Generator, u32)> = powers
            .iter()
            .map(|(g, e)| (g.clone().validated(&space).expect("valid"), *e))
            .collect();
        let text = format_monomial(&space, &canonical);
        let reparsed = parse_monomial(&text).expect("round-trip text parses");
        let resolved = resolve_monomial(&space, &reparsed).expect("resolves");

        let fold = |list: &[(Generator, u32)]| -> BTreeMap<Generator, u32> {
            let mut map = BTreeMap::new();
            for (g, e) in list {
                *map.entry(g.clone()).or_insert(0) += e;
            }
            map
        };
        prop_assert_eq!(fold(&resolved), fold(&canonical));
    }
}

/// The whole pipeline is safe to drive from several threads at once: pure
/// functions over immutable data, no shared state.
#[test]
fn parallel_evaluation_smoke_test() {
    let handles: Vec<_> = (0..8)
        .map(|_| {
            std::thread::spawn(|| {
                let space = space13();
                let expr = ClassExpression::monomial(
                    &space,
                    Rational::one(),
                    &[(Generator::psi("p1"), 2), (Generator::DeltaIrr, 1)],
                )
                .expect("valid monomial");
                let value = integrate(&expr, DegreeMode::Strict).expect("integrates");
                let gothic = tautring::gothic::run_default().expect("pipeline runs");
                (value, gothic)
            })
        })
        .collect();
    let results: Vec<_> = handles
        .into_iter()
        .map(|h| h.join().expect("thread joins"))
        .collect();
    for (value, gothic) in &results {
        assert_eq!(value, &Rational::new(1, 2));
        assert_eq!(gothic.eta3, Rational::new(-13, 6));
        assert_eq!(gothic.eta2_lambda1, Rational::new(-1, 2));
        assert_eq!(gothic.lyapunov_sum, Rational::new(6, 13));
    }
}
