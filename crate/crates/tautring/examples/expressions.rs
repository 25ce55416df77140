//! The expression grammar: parse divisor monomials from text, resolve them
//! against a moduli space, integrate, and round-trip back to text. Also
//! shows the position-exact syntax errors.
//!
//! Grammar: `expr := term ('*' term)*`, `term := gen ('^' INT)?`,
//! `gen := 'psi' INT | 'lambda1' | 'dirr' | 'd0{' INT (',' INT)* '}'`,
//! where integers are 1-based positions in the space's mark list and
//! whitespace is insignificant.
//!
//! Run with: `cargo run --example expressions`

use tautring::parse::{format_monomial, parse_monomial, resolve_monomial};
use tautring::{integrate, ClassExpression, DegreeMode, Genus, ModuliSpace, Rational};

fn main() {
    let space = ModuliSpace::new(Genus::One, ["p1", "p2", "p3"]).expect("stable space");
    println!("Space: {space}\n");

    for text in [
        "psi1^2 * dirr",
        "lambda1 * psi1 * d0{2,3}",
        "psi1 * psi2 * d0{1,2,3}",
        "  psi 1 ^ 2*d0 { 1 , 2 }  ",
        "dirr^3",
    ] {
        let monomial = parse_monomial(text).expect("grammar example parses");
        let powers = resolve_monomial(&space, &monomial).expect("marks in range");
        let canonical = format_monomial(&space, &powers);
        let expr =
            ClassExpression::monomial(&space, Rational::one(), &powers).expect("valid monomial");
        let value = integrate(&expr, DegreeMode::Strict).expect("top degree");
        println!("{text:28} -> {canonical:24} integral {value}");
    }

    // Syntax errors carry the exact character position and what was
    // expected there.
    println!("\nSyntax errors:");
    for text in ["psi1 ** 2", "d0{1,}", "psi0 + psi1", "lambda2"] {
        match parse_monomial(text) {
            Ok(_) => println!("{text:14} -> parsed (unexpected)"),
            Err(e) => println!("{text:14} -> {e}"),
        }
    }

    // Resolution errors are separate from syntax: the text below parses,
    // but the space has no seventh mark.
    println!("\nResolution errors:");
    let monomial = parse_monomial("psi7").expect("syntactically fine");
    match resolve_monomial(&space, &monomial) {
        Ok(_) => println!("psi7 resolved (unexpected)"),
        Err(e) => println!("psi7           -> {e}"),
    }
}
