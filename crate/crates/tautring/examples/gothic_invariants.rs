//! The full invariant chain: solve for the flex divisor class, pair it
//! against the degree-2 monomials, assemble the eta self-intersection
//! numbers, and finish with the Lyapunov exponent sum.
//!
//! Run with: `cargo run --example gothic_invariants`

use tautring::gothic::{
    eta_powers, pairing_table, run, solve_bundled_flex_class, FlexClass, GothicConstants,
};

fn main() {
    // Step 1: the flex divisor class from the bundled test curves.
    let class = solve_bundled_flex_class().expect("bundled system solves");
    println!("Flex divisor class:");
    for (name, value) in class.coefficients() {
        println!("  {name:<10} {value}");
    }

    // Step 2: its pairings with the degree-2 monomials.
    let table = pairing_table(&class).expect("pairings evaluate");
    println!("\nPairings against the class:");
    println!("  psi1^2        . F = {}", table.psi1_sq);
    println!("  psi2^2        . F = {}", table.psi2_sq);
    println!("  psi1*psi2     . F = {}", table.psi1_psi2);
    println!("  lambda1*psi1  . F = {}", table.lambda_psi1);
    println!("  lambda1*psi2  . F = {}", table.lambda_psi2);

    // Step 3: eta powers from the pairings and the geometric constants.
    let constants = GothicConstants::default();
    let (eta3, eta2_lambda1) = eta_powers(&table, &constants);
    println!("\neta^3          = {eta3}");
    println!("eta^2*lambda1  = {eta2_lambda1}");

    // Step 4: the Lyapunov exponent sum, with a decimal rendering for
    // comparison against numerical experiments.
    let result = run(&class, &constants).expect("chain completes");
    let approx = result.lyapunov_sum.to_f64();
    println!("lyapunov sum   = {} (~ {approx:.5})", result.lyapunov_sum);

    // The chain is a closed formula in the class, so feeding the zero class
    // isolates the constant blocks.
    let zero = run(&FlexClass::zero(), &constants).expect("chain completes");
    println!(
        "\nWith the zero class the constant blocks remain: eta^3 = {}, eta^2*lambda1 = {}",
        zero.eta3, zero.eta2_lambda1
    );
}
