//! Genus-0 psi-class integrals: the closed multinomial formula, the same
//! values recovered through the general integration routine, and a boundary
//! restriction evaluated through an explicit gluing cover.
//!
//! Run with: `cargo run --example genus0_integrals`

use std::collections::BTreeMap;

use tautring::{
    boundary_pullback, integrate, psi_integral_genus0, ClassExpression, DegreeMode, Generator,
    Genus, ModuliSpace, Rational,
};

fn main() {
    // psi exponent vectors on spaces with 4..=7 marks, evaluated by the
    // closed formula (n-3)! / prod(a_i!).
    println!("Closed-formula psi integrals:");
    for (marks, exps) in [
        (4usize, vec![1u32, 0, 0, 0]),
        (5, vec![1, 1, 0, 0, 0]),
        (5, vec![2, 0, 0, 0, 0]),
        (6, vec![1, 1, 1, 0, 0, 0]),
        (6, vec![3, 0, 0, 0, 0, 0]),
        (7, vec![2, 2, 0, 0, 0, 0, 0]),
    ] {
        let labels: Vec<String> = (1..=marks).map(|i| format!("q{i}")).collect();
        let space = ModuliSpace::new(Genus::Zero, labels.clone()).expect("stable space");
        let exponents: BTreeMap<String, u32> = labels
            .iter()
            .cloned()
            .zip(exps.iter().copied())
            .filter(|(_, e)| *e > 0)
            .collect();
        let value = psi_integral_genus0(&space, &exponents).expect("top degree");
        let monomial = exps
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, e)| {
                if *e == 1 {
                    format!("psi{}", i + 1)
                } else {
                    format!("psi{}^{e}", i + 1)
                }
            })
            .collect::<Vec<_>>()
            .join("*");
        println!("  n={marks}: integral of {monomial:<15} = {value}");
    }

    // The same numbers through the generic route: build the monomial as a
    // class expression and integrate it.
    let space = ModuliSpace::new(Genus::Zero, ["q1", "q2", "q3", "q4", "q5"]).expect("space");
    let expr = ClassExpression::monomial(
        &space,
        Rational::one(),
        &[(Generator::psi("q1"), 1), (Generator::psi("q2"), 1)],
    )
    .expect("valid monomial");
    println!(
        "\nGeneric evaluation of psi1*psi2 on {space}: {}",
        integrate(&expr, DegreeMode::Strict).expect("top degree")
    );

    // A boundary divisor restricted to its own gluing cover: the cover of
    // d0{1,2} is a product of two smaller genus-0 spaces, and the
    // restriction of psi3 lands on the factor carrying mark q3.
    let boundary = Generator::sep(["q1", "q2"]);
    let psi3 = ClassExpression::monomial(&space, Rational::one(), &[(Generator::psi("q3"), 1)])
        .expect("valid monomial");
    let (cover, restricted) = boundary_pullback(&space, &boundary, &psi3).expect("pullback");
    println!("\nGluing cover of d0{{1,2}} on {space}:");
    for factor in cover.cover_ambient().factors() {
        println!("  factor {factor}");
    }
    println!(
        "Restriction of psi3 to the cover integrates to {}",
        integrate(&restricted, DegreeMode::Strict).expect("top degree")
    );
    // The same number computed without touching covers by hand: the product
    // d0{1,2}*psi3 has degree 2 on the 2-dimensional ambient space, so the
    // integrator performs the restriction internally.
    let product = ClassExpression::monomial(
        &space,
        Rational::one(),
        &[(boundary.clone(), 1), (Generator::psi("q3"), 1)],
    )
    .expect("valid monomial");
    println!(
        "Direct integral of d0{{1,2}}*psi3 on {space} = {}",
        integrate(&product, DegreeMode::Strict).expect("top degree")
    );
}
