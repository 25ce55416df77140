//! The acceptance suite: every headline number and structural property this
//! crate is built to reproduce, runnable in-process (the `selftest` CLI
//! command and the acceptance integration test both call [`run_all`]).
//!
//! Each check returns a pass/fail result with a short detail line; failures
//! carry the first few mismatches. Everything here is deterministic, so the
//! serialized report is byte-identical across runs.

use std::collections::BTreeMap;
use std::fmt::Display;

use serde::Serialize;

use crate::class::{ClassExpression, Generator};
use crate::engine::{integrate, substitute_lambda, DegreeMode};
use crate::gothic::{pairing_table, run_default, FlexClass};
use crate::rational::Rational;
use crate::solver::{build_system, solve, verify, TestCurve};
use crate::space::{Genus, ModuliSpace};

/// Outcome of one acceptance check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

struct Check {
    checked: usize,
    failures: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check {
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn eq<T: PartialEq + Display>(&mut self, label: impl Display, actual: T, expected: T) {
        self.checked += 1;
        if actual != expected {
            self.failures
                .push(format!("{label}: got {actual}, want {expected}"));
        }
    }

    fn assert(&mut self, label: impl Display, condition: bool) {
        self.checked += 1;
        if !condition {
            self.failures.push(label.to_string());
        }
    }

    fn finish(self, name: &str, unit: &str) -> CheckResult {
        let passed = self.failures.is_empty();
        let details = if passed {
            format!("{} {} verified", self.checked, unit)
        } else {
            let mut shown: Vec<String> = self.failures.iter().take(3).cloned().collect();
            if self.failures.len() > 3 {
                shown.push(format!("... and {} more", self.failures.len() - 3));
            }
            shown.join("; ")
        };
        CheckResult {
            name: name.into(),
            passed,
            details,
        }
    }
}

fn check(
    name: &str,
    unit: &str,
    body: impl FnOnce(&mut Check) -> Result<(), String>,
) -> CheckResult {
    let mut c = Check::new();
    match body(&mut c) {
        Ok(()) => c.finish(name, unit),
        Err(e) => CheckResult {
            name: name.into(),
            passed: false,
            details: format!("error: {e}"),
        },
    }
}

fn space13() -> ModuliSpace {
    ModuliSpace::new(Genus::One, ["p1", "p2", "p3"]).expect("static space")
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn int(space: &ModuliSpace, powers: &[(Generator, u32)]) -> Result<Rational, String> {
    let expr =
        ClassExpression::monomial(space, Rational::one(), powers).map_err(|e| e.to_string())?;
    integrate(&expr, DegreeMode::Strict).map_err(|e| e.to_string())
}

/// The five boundary generators of the 3-marked genus-1 space, in display
/// order.
fn boundary_generators() -> [Generator; 5] {
    [
        Generator::DeltaIrr,
        Generator::sep(["p1", "p2"]),
        Generator::sep(["p1", "p3"]),
        Generator::sep(["p2", "p3"]),
        Generator::sep(["p1", "p2", "p3"]),
    ]
}

/// A labeled monomial together with its expected integral.
type TableProduct = (String, Vec<(Generator, u32)>, Rational);

/// The fifteen products of the intersection table: each of the three
/// degree-2 monomial prefixes against each boundary generator.
fn table_products() -> Vec<TableProduct> {
    let rows: [(&str, Vec<(Generator, u32)>); 3] = [
        (
            "lambda1*psi1",
            vec![(Generator::Lambda1, 1), (Generator::psi("p1"), 1)],
        ),
        ("psi1^2", vec![(Generator::psi("p1"), 2)]),
        (
            "psi1*psi2",
            vec![(Generator::psi("p1"), 1), (Generator::psi("p2"), 1)],
        ),
    ];
    let values: [[Rational; 5]; 3] = [
        [
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
            q(1, 24),
            q(1, 24),
        ],
        [
            q(1, 2),
            Rational::zero(),
            Rational::zero(),
            q(1, 24),
            Rational::zero(),
        ],
        [
            Rational::one(),
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
        ],
    ];
    let mut out = Vec::new();
    for (row_idx, (row_name, prefix)) in rows.iter().enumerate() {
        for (col_idx, boundary) in boundary_generators().into_iter().enumerate() {
            let mut powers = prefix.clone();
            powers.push((boundary.clone(), 1));
            out.push((
                format!("{row_name}*{boundary}"),
                powers,
                values[row_idx][col_idx].clone(),
            ));
        }
    }
    out
}

fn solved_flex_class() -> FlexClass {
    FlexClass {
        dirr: q(4, 3),
        d0_12: Rational::from(4),
        d0_13: Rational::from(4),
        d0_23: Rational::from(4),
        d0_123: Rational::from(4),
    }
}

// ---------------------------------------------------------------------
// Check 1: the twelve tabulated intersection values (fifteen products).
// ---------------------------------------------------------------------
pub fn check_intersection_table() -> CheckResult {
    check("01-intersection-table", "table products", |c| {
        let space = space13();
        for (label, powers, expected) in table_products() {
            c.eq(&label, int(&space, &powers)?, expected);
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------
// Check 2: pairings of the solved flex class.
// ---------------------------------------------------------------------
pub fn check_flex_pairings() -> CheckResult {
    check("02-flex-pairings", "pairings", |c| {
        let table = pairing_table(&solved_flex_class()).map_err(|e| e.to_string())?;
        c.eq("psi1^2.F", table.psi1_sq, q(5, 6));
        c.eq("psi2^2.F", table.psi2_sq, q(5, 6));
        c.eq("psi1*psi2.F", table.psi1_psi2, q(4, 3));
        c.eq("lambda1*psi1.F", table.lambda_psi1, q(1, 3));
        c.eq("lambda1*psi2.F", table.lambda_psi2, q(1, 3));
        Ok(())
    })
}

// ---------------------------------------------------------------------
// Check 3: the bundled test-curve system, tied and independent.
// ---------------------------------------------------------------------
pub fn check_testcurve_solve() -> CheckResult {
    check("03-testcurve-solve", "solver facts", |c| {
        let file = crate::files::bundled_testcurves().map_err(|e| e.to_string())?;
        let (spec, curves) = file.system(true).map_err(|e| e.to_string())?;
        let system = build_system(&spec, &curves).map_err(|e| e.to_string())?;
        let report = solve(&system);
        c.eq("dirr", report.coefficients["dirr"].clone(), q(4, 3));
        for g in ["d0{1,2}", "d0{1,3}", "d0{2,3}", "d0{1,2,3}"] {
            c.eq(g, report.coefficients[g].clone(), Rational::from(4));
        }
        c.eq("aux c", report.aux["c"].clone(), Rational::from(2));
        c.eq("rank", report.rank, 4);
        c.eq("equation_count", report.equation_count, 7);
        c.assert("consistent", report.consistent);
        c.assert(
            "all residuals zero",
            report.residuals.values().all(Rational::is_zero),
        );
        c.assert(
            "verify() all zero",
            verify(&system, &report).values().all(Rational::is_zero),
        );

        let (spec, curves) = file.system(false).map_err(|e| e.to_string())?;
        let report = solve(&build_system(&spec, &curves).map_err(|e| e.to_string())?);
        c.assert("independent consistent", report.consistent);
        c.assert(
            "independent fully determined",
            report.undetermined.is_empty(),
        );
        for g in ["d0{1,2}", "d0{1,3}", "d0{2,3}"] {
            c.eq(
                format!("independent {g}"),
                report.coefficients[g].clone(),
                Rational::from(4),
            );
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------
// Check 4: the gothic invariants and the decimal cross-check.
// ---------------------------------------------------------------------
pub fn check_gothic_invariants() -> CheckResult {
    check("04-gothic-invariants", "invariants", |c| {
        let result = run_default().map_err(|e| e.to_string())?;
        c.eq("eta3", result.eta3.clone(), q(-13, 6));
        c.eq("eta2_lambda1", result.eta2_lambda1.clone(), q(-1, 2));
        c.eq("lyapunov_sum", result.lyapunov_sum.clone(), q(6, 13));
        let drift = (result.lyapunov_sum - q(46155, 100_000)).abs();
        c.assert(
            format!("|lyapunov_sum - 0.46155| = {drift} < 2/10000"),
            drift < q(2, 10_000),
        );
        Ok(())
    })
}

// ---------------------------------------------------------------------
// Check 5a: lambda1 pairs like dirr/12 against every degree-2 monomial.
// ---------------------------------------------------------------------
pub fn check_lambda_dirr_proportionality() -> CheckResult {
    check(
        "05a-lambda-dirr-proportionality",
        "degree-2 monomials",
        |c| {
            let space = space13();
            let mut gens: Vec<Generator> = vec![
                Generator::psi("p1"),
                Generator::psi("p2"),
                Generator::psi("p3"),
            ];
            gens.extend(boundary_generators());
            for i in 0..gens.len() {
                for j in i..gens.len() {
                    let m: Vec<(Generator, u32)> = vec![(gens[i].clone(), 1), (gens[j].clone(), 1)];
                    let mut with_lambda = m.clone();
                    with_lambda.push((Generator::Lambda1, 1));
                    let mut with_dirr = m.clone();
                    with_dirr.push((Generator::DeltaIrr, 1));
                    let lhs = int(&space, &with_lambda)?;
                    let rhs = q(1, 12) * int(&space, &with_dirr)?;
                    c.eq(format!("{}*{}", gens[i], gens[j]), lhs, rhs);
                }
            }
            Ok(())
        },
    )
}

// ---------------------------------------------------------------------
// Check 5b: lambda1^2 kills every degree-1 monomial, on both paths.
// ---------------------------------------------------------------------
pub fn check_lambda_square() -> CheckResult {
    check("05b-lambda-square-vanishes", "degree-1 monomials", |c| {
        let space = space13();
        let mut gens: Vec<Generator> = vec![
            Generator::psi("p1"),
            Generator::psi("p2"),
            Generator::psi("p3"),
        ];
        gens.extend(boundary_generators());
        for g in gens {
            let expr = ClassExpression::monomial(
                &space,
                Rational::one(),
                &[(Generator::Lambda1, 2), (g.clone(), 1)],
            )
            .map_err(|e| e.to_string())?;
            let direct = integrate(&expr, DegreeMode::Strict).map_err(|e| e.to_string())?;
            c.eq(format!("lambda1^2*{g} direct"), direct, Rational::zero());
            let substituted = substitute_lambda(&expr).map_err(|e| e.to_string())?;
            let via_sub = integrate(&substituted, DegreeMode::Strict).map_err(|e| e.to_string())?;
            c.eq(
                format!("lambda1^2*{g} substituted"),
                via_sub,
                Rational::zero(),
            );
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------
// Check 5c: mark-permutation equivariance of every table product.
// ---------------------------------------------------------------------
pub fn check_permutation_equivariance() -> CheckResult {
    check(
        "05c-mark-permutation-equivariance",
        "permuted integrals",
        |c| {
            let space = space13();
            let marks = ["p1", "p2", "p3"];
            let images: [[&str; 3]; 6] = [
                ["p1", "p2", "p3"],
                ["p1", "p3", "p2"],
                ["p2", "p1", "p3"],
                ["p2", "p3", "p1"],
                ["p3", "p1", "p2"],
                ["p3", "p2", "p1"],
            ];
            for (label, powers, _) in table_products() {
                let expr = ClassExpression::monomial(&space, Rational::one(), &powers)
                    .map_err(|e| e.to_string())?;
                let base = integrate(&expr, DegreeMode::Strict).map_err(|e| e.to_string())?;
                for image in &images {
                    let perm: BTreeMap<String, String> = marks
                        .iter()
                        .zip(image.iter())
                        .map(|(a, b)| (a.to_string(), b.to_string()))
                        .collect();
                    let permuted = expr.relabel_marks(&perm).map_err(|e| e.to_string())?;
                    let value =
                        integrate(&permuted, DegreeMode::Strict).map_err(|e| e.to_string())?;
                    c.eq(
                        format!("{label} under {}", image.join(",")),
                        value,
                        base.clone(),
                    );
                }
            }
            Ok(())
        },
    )
}

// ---------------------------------------------------------------------
// Check 5d: the genus-0 relation psi_i = sum of boundary divisors whose
// subset contains i but neither j nor k, preserved under every completion
// to top degree.
// ---------------------------------------------------------------------
pub fn check_psi_boundary_substitution() -> CheckResult {
    check(
        "05d-psi-boundary-substitution",
        "substituted integrals",
        |c| {
            for n in [4usize, 5] {
                let marks: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
                let space =
                    ModuliSpace::new(Genus::Zero, marks.clone()).map_err(|e| e.to_string())?;

                // All degree-1 generators, used to complete monomials to top
                // degree on n = 5.
                let mut completions: Vec<Vec<(Generator, u32)>> = vec![vec![]];
                if n == 5 {
                    completions.clear();
                    for m in &marks {
                        completions.push(vec![(Generator::psi(m), 1)]);
                    }
                    let mut seen = std::collections::BTreeSet::new();
                    for bits in 1u32..(1 << n) - 1 {
                        let subset: std::collections::BTreeSet<String> = marks
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| bits & (1 << i) != 0)
                            .map(|(_, m)| m.clone())
                            .collect();
                        if subset.len() < 2 || subset.len() > n - 2 {
                            continue;
                        }
                        let gen = Generator::DeltaSep(subset)
                            .validated(&space)
                            .map_err(|e| e.to_string())?;
                        if seen.insert(gen.clone()) {
                            completions.push(vec![(gen, 1)]);
                        }
                    }
                }

                for i in 0..n {
                    for j in 0..n {
                        for k in (j + 1)..n {
                            if i == j || i == k {
                                continue;
                            }
                            // The boundary-sum replacement for psi_i relative to
                            // the reference marks j, k.
                            let mut replacement = ClassExpression::zero(space.clone());
                            for bits in 1u32..(1 << n) - 1 {
                                let subset: std::collections::BTreeSet<String> = marks
                                    .iter()
                                    .enumerate()
                                    .filter(|(b, _)| bits & (1 << b) != 0)
                                    .map(|(_, m)| m.clone())
                                    .collect();
                                if !subset.contains(&marks[i])
                                    || subset.contains(&marks[j])
                                    || subset.contains(&marks[k])
                                    || subset.len() < 2
                                {
                                    continue;
                                }
                                let gen =
                                    ClassExpression::generator(&space, Generator::DeltaSep(subset))
                                        .map_err(|e| e.to_string())?;
                                replacement = replacement.add(&gen).map_err(|e| e.to_string())?;
                            }
                            for completion in &completions {
                                let mut psi_powers = completion.clone();
                                psi_powers.push((Generator::psi(&marks[i]), 1));
                                let direct = int(&space, &psi_powers)?;
                                let tail =
                                    ClassExpression::monomial(&space, Rational::one(), completion)
                                        .map_err(|e| e.to_string())?;
                                let substituted = integrate(
                                    &replacement.mul(&tail).map_err(|e| e.to_string())?,
                                    DegreeMode::Strict,
                                )
                                .map_err(|e| e.to_string())?;
                                c.eq(
                                    format!(
                                        "n={n} psi{} (ref {},{}) x {:?}",
                                        marks[i],
                                        marks[j],
                                        marks[k],
                                        completion.len()
                                    ),
                                    direct,
                                    substituted,
                                );
                            }
                        }
                    }
                }
            }
            Ok(())
        },
    )
}

// ---------------------------------------------------------------------
// Check 5e: genus-0 string/dilaton recursion agrees with the closed
// formula on every exponent vector with n <= 6.
// ---------------------------------------------------------------------

/// Independent test oracle: evaluate a genus-0 psi integral purely by the
/// string and dilaton reductions from the 3-mark base case.
fn genus0_by_string_dilaton(exps: &[u32]) -> Rational {
    let n = exps.len();
    let total: u32 = exps.iter().sum();
    if total != (n as u32).saturating_sub(3) {
        return Rational::zero();
    }
    if n == 3 {
        return Rational::one();
    }
    if let Some(i) = exps.iter().position(|&e| e == 1) {
        // Dilaton: remove the exponent-1 mark, scale by (marks after
        // removal) - 2.
        let mut rest: Vec<u32> = exps.to_vec();
        rest.remove(i);
        return Rational::from((n - 3) as i64) * genus0_by_string_dilaton(&rest);
    }
    let zero_at = exps
        .iter()
        .position(|&e| e == 0)
        .expect("degree below mark count forces an exponent 0");
    // String: remove the exponent-0 mark and decrement each remaining
    // positive exponent in turn.
    let mut rest: Vec<u32> = exps.to_vec();
    rest.remove(zero_at);
    let mut acc = Rational::zero();
    for j in 0..rest.len() {
        if rest[j] > 0 {
            let mut next = rest.clone();
            next[j] -= 1;
            acc += genus0_by_string_dilaton(&next);
        }
    }
    acc
}

fn exponent_vectors(n: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(slots: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            let mut v = prefix.clone();
            v.push(left);
            out.push(v);
            return;
        }
        for a in 0..=left {
            prefix.push(a);
            rec(slots - 1, left - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, total, &mut Vec::new(), &mut out);
    out
}

pub fn check_string_dilaton() -> CheckResult {
    check("05e-string-dilaton-closed-form", "exponent vectors", |c| {
        for n in 3usize..=6 {
            let marks: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
            let space = ModuliSpace::new(Genus::Zero, marks.clone()).map_err(|e| e.to_string())?;
            for exps in exponent_vectors(n, (n - 3) as u32) {
                let map: BTreeMap<String, u32> = marks
                    .iter()
                    .cloned()
                    .zip(exps.iter().copied())
                    .filter(|(_, e)| *e > 0)
                    .collect();
                let closed =
                    crate::engine::psi_integral_genus0(&space, &map).map_err(|e| e.to_string())?;
                let recursed = genus0_by_string_dilaton(&exps);
                c.eq(format!("n={n} a={exps:?}"), closed, recursed);
            }
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------
// Check 6: solver robustness under redundancy and perturbation.
// ---------------------------------------------------------------------
pub fn check_solver_robustness() -> CheckResult {
    check("06-solver-robustness", "solver scenarios", |c| {
        let file = crate::files::bundled_testcurves().map_err(|e| e.to_string())?;
        let (spec, curves) = file.system(true).map_err(|e| e.to_string())?;
        let base = solve(&build_system(&spec, &curves).map_err(|e| e.to_string())?);

        // Appending rational combinations of existing equations changes
        // nothing but the equation count.
        let combos: Vec<Vec<(usize, Rational)>> = vec![
            vec![(0, Rational::from(2)), (2, Rational::from(-3))],
            vec![(1, q(1, 2)), (6, Rational::from(5))],
            (0..curves.len()).map(|i| (i, Rational::one())).collect(),
        ];
        for (combo_idx, combo) in combos.iter().enumerate() {
            let mut pairings: BTreeMap<String, Rational> = BTreeMap::new();
            let mut rhs_constant = Rational::zero();
            let mut rhs_aux: BTreeMap<String, Rational> = BTreeMap::new();
            for (idx, coeff) in combo {
                for (g, v) in &curves[*idx].pairings {
                    let entry = pairings.entry(g.clone()).or_insert_with(Rational::zero);
                    *entry += coeff * v;
                }
                rhs_constant += coeff * &curves[*idx].rhs_constant;
                for (a, v) in &curves[*idx].rhs_aux {
                    let entry = rhs_aux.entry(a.clone()).or_insert_with(Rational::zero);
                    *entry += coeff * v;
                }
            }
            let mut extended = curves.clone();
            extended.push(TestCurve {
                name: format!("combo{combo_idx}"),
                pairings,
                rhs_constant,
                rhs_aux,
            });
            let report = solve(&build_system(&spec, &extended).map_err(|e| e.to_string())?);
            c.eq(
                format!("combo{combo_idx} coefficients unchanged"),
                report.coefficients == base.coefficients && report.aux == base.aux,
                true,
            );
            c.eq(format!("combo{combo_idx} rank"), report.rank, base.rank);
            c.eq(
                format!("combo{combo_idx} equation_count"),
                report.equation_count,
                base.equation_count + 1,
            );
            c.assert(format!("combo{combo_idx} consistent"), report.consistent);
        }

        // Perturbing the RHS of any dependent equation flips consistency,
        // with exactly that equation's residual nonzero.
        let dependent: Vec<String> = curves
            .iter()
            .map(|curve| curve.name.clone())
            .filter(|name| !base.pivot_curves.contains(name))
            .collect();
        c.eq("dependent equation count", dependent.len(), 3);
        for name in dependent {
            let mut perturbed = curves.clone();
            let target = perturbed
                .iter_mut()
                .find(|curve| curve.name == name)
                .expect("dependent curve present");
            target.rhs_constant += Rational::one();
            let report = solve(&build_system(&spec, &perturbed).map_err(|e| e.to_string())?);
            c.assert(format!("perturbed {name} inconsistent"), !report.consistent);
            let nonzero: Vec<&String> = report
                .residuals
                .iter()
                .filter(|(_, r)| !r.is_zero())
                .map(|(n, _)| n)
                .collect();
            c.eq(
                format!("perturbed {name} nonzero residuals"),
                nonzero.len(),
                1,
            );
            c.assert(
                format!("perturbed {name} residual named"),
                nonzero.first().is_some_and(|n| **n == name),
            );
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------
// Check 7: determinism of the whole report.
// ---------------------------------------------------------------------
/// Checks 1 through 6 (with the five structural sub-checks of 5), in
/// report order.
pub fn core_checks() -> Vec<CheckResult> {
    vec![
        check_intersection_table(),
        check_flex_pairings(),
        check_testcurve_solve(),
        check_gothic_invariants(),
        check_lambda_dirr_proportionality(),
        check_lambda_square(),
        check_permutation_equivariance(),
        check_psi_boundary_substitution(),
        check_string_dilaton(),
        check_solver_robustness(),
    ]
}

/// Check 7: running the core suite twice serializes to identical bytes.
pub fn check_determinism() -> CheckResult {
    check("07-determinism", "serialized reports", |c| {
        let a = serde_json::to_string(&core_checks()).map_err(|e| e.to_string())?;
        let b = serde_json::to_string(&core_checks()).map_err(|e| e.to_string())?;
        c.assert("two in-process runs serialize byte-identically", a == b);
        Ok(())
    })
}

/// Run the full acceptance suite.
pub fn run_all() -> Vec<CheckResult> {
    let mut results = core_checks();
    results.push(check_determinism());
    results
}
