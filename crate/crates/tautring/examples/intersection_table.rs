//! Print the full table of top intersection numbers of degree-3 divisor
//! monomials on the 3-marked genus-1 moduli space: each degree-2 monomial
//! prefix against each boundary divisor.
//!
//! Run with: `cargo run --example intersection_table`

use tautring::{integrate, ClassExpression, DegreeMode, Generator, Genus, ModuliSpace, Rational};

fn main() {
    let space = ModuliSpace::new(Genus::One, ["p1", "p2", "p3"]).expect("stable space");
    println!(
        "Top intersections on {space} (dimension {}):\n",
        space.dimension()
    );

    let prefixes: [(&str, Vec<(Generator, u32)>); 3] = [
        (
            "lambda1*psi1",
            vec![(Generator::Lambda1, 1), (Generator::psi("p1"), 1)],
        ),
        ("psi1^2     ", vec![(Generator::psi("p1"), 2)]),
        (
            "psi1*psi2  ",
            vec![(Generator::psi("p1"), 1), (Generator::psi("p2"), 1)],
        ),
    ];
    let boundaries = [
        ("dirr      ", Generator::DeltaIrr),
        ("d0{1,2}   ", Generator::sep(["p1", "p2"])),
        ("d0{1,3}   ", Generator::sep(["p1", "p3"])),
        ("d0{2,3}   ", Generator::sep(["p2", "p3"])),
        ("d0{1,2,3} ", Generator::sep(["p1", "p2", "p3"])),
    ];

    print!("{:14}", "");
    for (name, _) in &boundaries {
        print!("{name:>11}");
    }
    println!();

    for (row_name, prefix) in &prefixes {
        print!("{row_name:14}");
        for (_, boundary) in &boundaries {
            let mut powers = prefix.clone();
            powers.push((boundary.clone(), 1));
            let expr = ClassExpression::monomial(&space, Rational::one(), &powers)
                .expect("valid monomial");
            let value = integrate(&expr, DegreeMode::Strict).expect("top degree");
            print!("{:>11}", value.to_string());
        }
        println!();
    }

    println!("\nEvery value is exact; zeros reflect vanishing restrictions, not rounding.");
}
