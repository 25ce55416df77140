//! The flex/gothic pipeline: from the flex divisor class on the 3-marked
//! genus-1 space to the self-intersection numbers of the tautological line
//! class eta on the projectivized gothic locus, and the Lyapunov-exponent
//! sum they determine.
//!
//! The geometric pushforward chain is encoded as a fixed formula
//! parameterized by [`GothicConstants`]: the pairings of the three boundary
//! level-graph classes beta_1..beta_3 with eta, lambda1, and the psi
//! classes; their multiplicities in the expansion of eta; and the degree of
//! eta on a fiber of the projection to the flex locus. Everything that
//! varies with the flex class itself is computed exactly by the
//! intersection engine.

use serde::Serialize;

use crate::class::{ClassExpression, Generator};
use crate::engine::{integrate, DegreeMode};
use crate::error::{EngineError, PipelineError};
use crate::rational::Rational;
use crate::solver::SolveReport;
use crate::space::{Genus, ModuliSpace};

/// The 3-marked genus-1 space the flex class lives on.
pub fn flex_space() -> ModuliSpace {
    ModuliSpace::new(Genus::One, ["p1", "p2", "p3"]).expect("static space")
}

/// A divisor class on the flex space, written in the five boundary
/// generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlexClass {
    pub dirr: Rational,
    pub d0_12: Rational,
    pub d0_13: Rational,
    pub d0_23: Rational,
    pub d0_123: Rational,
}

impl FlexClass {
    pub fn zero() -> Self {
        FlexClass {
            dirr: Rational::zero(),
            d0_12: Rational::zero(),
            d0_13: Rational::zero(),
            d0_23: Rational::zero(),
            d0_123: Rational::zero(),
        }
    }

    /// The coefficient list in generator order
    /// (dirr, d0{1,2}, d0{1,3}, d0{2,3}, d0{1,2,3}).
    pub fn coefficients(&self) -> [(&'static str, &Rational); 5] {
        [
            ("dirr", &self.dirr),
            ("d0{1,2}", &self.d0_12),
            ("d0{1,3}", &self.d0_13),
            ("d0{2,3}", &self.d0_23),
            ("d0{1,2,3}", &self.d0_123),
        ]
    }

    /// The class as a degree-1 expression on [`flex_space`].
    pub fn expression(&self) -> Result<ClassExpression, EngineError> {
        let space = flex_space();
        let mut expr = ClassExpression::zero(space.clone());
        let parts: [(Generator, &Rational); 5] = [
            (Generator::DeltaIrr, &self.dirr),
            (Generator::sep(["p1", "p2"]), &self.d0_12),
            (Generator::sep(["p1", "p3"]), &self.d0_13),
            (Generator::sep(["p2", "p3"]), &self.d0_23),
            (Generator::sep(["p1", "p2", "p3"]), &self.d0_123),
        ];
        for (gen, coeff) in parts {
            expr = expr.add(&ClassExpression::monomial(
                &space,
                coeff.clone(),
                &[(gen, 1)],
            )?)?;
        }
        Ok(expr)
    }

    /// Read the class off a solved coefficient report (keys in the surface
    /// grammar: "dirr", "d0{1,2}", ...). Fails when the report is
    /// inconsistent or leaves any of the five coefficients undetermined.
    pub fn from_report(report: &SolveReport) -> Result<FlexClass, PipelineError> {
        if !report.consistent {
            let (curve, residual) = report
                .residuals
                .iter()
                .find(|(_, r)| !r.is_zero())
                .map(|(c, r)| (c.clone(), r.clone()))
                .unwrap_or_else(|| ("unknown".into(), Rational::zero()));
            return Err(PipelineError::InconsistentSystem { curve, residual });
        }
        let get = |name: &str| -> Result<Rational, PipelineError> {
            if report.is_undetermined(name) {
                return Err(PipelineError::UndeterminedCoefficient(name.into()));
            }
            report
                .coefficients
                .get(name)
                .cloned()
                .ok_or_else(|| PipelineError::UndeterminedCoefficient(name.into()))
        };
        Ok(FlexClass {
            dirr: get("dirr")?,
            d0_12: get("d0{1,2}")?,
            d0_13: get("d0{1,3}")?,
            d0_23: get("d0{2,3}")?,
            d0_123: get("d0{1,2,3}")?,
        })
    }
}

/// The shipped constants of the pushforward chain. The defaults are the
/// exact values entering the gothic computation; every one of them is used
/// by [`eta_powers`] on each call, so overriding any entry changes the
/// output accordingly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GothicConstants {
    /// Pairings eta . beta_i.
    pub eta_beta: [Rational; 3],
    /// Pairings lambda1 . beta_i.
    pub lambda_beta: [Rational; 3],
    /// Pairings psi_{p_r} . beta_i for r = 1, 2 (rows) and i = 1..3
    /// (columns). Zero by default; kept so the formula mirrors the chain
    /// term by term.
    pub psi_beta: [[Rational; 3]; 2],
    /// Multiplicities of the beta classes in the expansion of eta.
    pub beta_multiplicities: [i64; 3],
    /// Degree of eta on a fiber of the projection to the flex locus; the
    /// coefficient turning the fiber-integrated psi1^2 pairing into the
    /// final pushforward term.
    pub fiber_degree_eta: Rational,
}

impl Default for GothicConstants {
    fn default() -> Self {
        GothicConstants {
            eta_beta: [
                Rational::new(1, 2),
                Rational::new(1, 12),
                Rational::new(1, 12),
            ],
            lambda_beta: [Rational::zero(), Rational::new(1, 24), Rational::new(1, 24)],
            psi_beta: Default::default(),
            beta_multiplicities: [1, 2, 2],
            fiber_degree_eta: -Rational::one(),
        }
    }
}

/// The five pairings of a flex class needed by the chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingTable {
    /// psi1^2 . F
    pub psi1_sq: Rational,
    /// psi2^2 . F
    pub psi2_sq: Rational,
    /// psi1 psi2 . F
    pub psi1_psi2: Rational,
    /// lambda1 psi1 . F
    pub lambda_psi1: Rational,
    /// lambda1 psi2 . F
    pub lambda_psi2: Rational,
}

/// Compute the pairing table of a flex class with the intersection engine.
pub fn pairing_table(class: &FlexClass) -> Result<PairingTable, EngineError> {
    let space = flex_space();
    let f = class.expression()?;
    let pair = |powers: &[(Generator, u32)]| -> Result<Rational, EngineError> {
        let monomial = ClassExpression::monomial(&space, Rational::one(), powers)?;
        integrate(&monomial.mul(&f)?, DegreeMode::Strict)
    };
    Ok(PairingTable {
        psi1_sq: pair(&[(Generator::psi("p1"), 2)])?,
        psi2_sq: pair(&[(Generator::psi("p2"), 2)])?,
        psi1_psi2: pair(&[(Generator::psi("p1"), 1), (Generator::psi("p2"), 1)])?,
        lambda_psi1: pair(&[(Generator::Lambda1, 1), (Generator::psi("p1"), 1)])?,
        lambda_psi2: pair(&[(Generator::Lambda1, 1), (Generator::psi("p2"), 1)])?,
    })
}

/// The two top self-intersection numbers of eta, from a pairing table and
/// the chain constants. The beta blocks are recomputed from the constants
/// on every call:
///
/// ```text
/// eta3        = sum_i mult_i * (eta.beta_i  +  psi1.beta_i  +  psi2.beta_i)
///               + fiber_degree_eta * (psi1^2.F)  -  (psi2^2.F)  -  (psi1 psi2.F)
/// eta2_lambda1 = sum_i mult_i * (lambda1.beta_i)
///               + fiber_degree_eta * (lambda1 psi1.F)  -  (lambda1 psi2.F)
/// ```
pub fn eta_powers(table: &PairingTable, constants: &GothicConstants) -> (Rational, Rational) {
    let mut eta_block = Rational::zero();
    let mut lambda_block = Rational::zero();
    for i in 0..3 {
        let mult = Rational::from(constants.beta_multiplicities[i]);
        eta_block += &mult * &constants.eta_beta[i];
        eta_block += &mult * &constants.psi_beta[0][i];
        eta_block += &mult * &constants.psi_beta[1][i];
        lambda_block += &mult * &constants.lambda_beta[i];
    }
    let eta3 = eta_block + &constants.fiber_degree_eta * &table.psi1_sq
        - table.psi2_sq.clone()
        - table.psi1_psi2.clone();
    let eta2_lambda1 =
        lambda_block + &constants.fiber_degree_eta * &table.lambda_psi1 - table.lambda_psi2.clone();
    (eta3, eta2_lambda1)
}

/// The Lyapunov-exponent sum `2 * eta2_lambda1 / eta3`.
pub fn lyapunov_sum(eta3: &Rational, eta2_lambda1: &Rational) -> Result<Rational, PipelineError> {
    if eta3.is_zero() {
        return Err(PipelineError::ZeroDenominator);
    }
    Ok(Rational::from(2) * eta2_lambda1 / eta3.clone())
}

/// Final pipeline output. Serializes with fields in this order, rationals
/// as reduced strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GothicResult {
    pub eta3: Rational,
    pub eta2_lambda1: Rational,
    pub lyapunov_sum: Rational,
}

/// Run the chain for a given class and constants.
pub fn run(class: &FlexClass, constants: &GothicConstants) -> Result<GothicResult, PipelineError> {
    let table = pairing_table(class)?;
    let (eta3, eta2_lambda1) = eta_powers(&table, constants);
    let lyapunov = lyapunov_sum(&eta3, &eta2_lambda1)?;
    Ok(GothicResult {
        eta3,
        eta2_lambda1,
        lyapunov_sum: lyapunov,
    })
}

/// End-to-end default run: solve the bundled test-curve system for the flex
/// class, then run the chain with the default constants.
pub fn run_default() -> Result<GothicResult, PipelineError> {
    let class = solve_bundled_flex_class()?;
    run(&class, &GothicConstants::default())
}

/// Solve the bundled test-curve data (tied mode) for the flex class.
pub fn solve_bundled_flex_class() -> Result<FlexClass, PipelineError> {
    let file = crate::files::bundled_testcurves()?;
    let (spec, curves) = file.system(true)?;
    let system = crate::solver::build_system(&spec, &curves)?;
    let report = crate::solver::solve(&system);
    FlexClass::from_report(&report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn solved_class() -> FlexClass {
        FlexClass {
            dirr: q(4, 3),
            d0_12: Rational::from(4),
            d0_13: Rational::from(4),
            d0_23: Rational::from(4),
            d0_123: Rational::from(4),
        }
    }

    #[test]
    fn pairing_table_of_the_solved_class() {
        let table = pairing_table(&solved_class()).unwrap();
        assert_eq!(table.psi1_sq, q(5, 6));
        assert_eq!(table.psi2_sq, q(5, 6));
        assert_eq!(table.psi1_psi2, q(4, 3));
        assert_eq!(table.lambda_psi1, q(1, 3));
        assert_eq!(table.lambda_psi2, q(1, 3));
    }

    #[test]
    fn eta_powers_with_default_constants() {
        let table = pairing_table(&solved_class()).unwrap();
        let (eta3, eta2_lambda1) = eta_powers(&table, &GothicConstants::default());
        assert_eq!(eta3, q(-13, 6));
        assert_eq!(eta2_lambda1, q(-1, 2));
        assert_eq!(lyapunov_sum(&eta3, &eta2_lambda1).unwrap(), q(6, 13));
    }

    #[test]
    fn zero_class_leaves_only_the_beta_blocks() {
        let table = pairing_table(&FlexClass::zero()).unwrap();
        assert_eq!(table.psi1_sq, Rational::zero());
        let (eta3, eta2_lambda1) = eta_powers(&table, &GothicConstants::default());
        assert_eq!(eta3, q(5, 6));
        assert_eq!(eta2_lambda1, q(1, 6));
        assert_eq!(lyapunov_sum(&eta3, &eta2_lambda1).unwrap(), q(2, 5));
    }

    #[test]
    fn beta_free_constants_leave_only_the_pairings() {
        let constants = GothicConstants {
            eta_beta: [Rational::zero(), Rational::zero(), Rational::zero()],
            lambda_beta: [Rational::zero(), Rational::zero(), Rational::zero()],
            ..GothicConstants::default()
        };
        let table = pairing_table(&solved_class()).unwrap();
        let (eta3, eta2_lambda1) = eta_powers(&table, &constants);
        assert_eq!(eta3, Rational::from(-3));
        assert_eq!(eta2_lambda1, q(-2, 3));
    }

    #[test]
    fn constant_blocks_are_not_hard_coded() {
        let table = pairing_table(&FlexClass::zero()).unwrap();
        let mut constants = GothicConstants::default();
        constants.eta_beta[1] = q(1, 2); // was 1/12, multiplicity 2
        let (eta3, _) = eta_powers(&table, &constants);
        assert_eq!(eta3, q(5, 6) - q(2, 12) + Rational::one());
        let constants = GothicConstants {
            beta_multiplicities: [1, 1, 1],
            ..GothicConstants::default()
        };
        let (eta3, eta2_lambda1) = eta_powers(&table, &constants);
        assert_eq!(eta3, q(1, 2) + q(2, 12));
        assert_eq!(eta2_lambda1, q(2, 24));
    }

    #[test]
    fn lyapunov_edge_cases() {
        assert_eq!(
            lyapunov_sum(&q(7, 2), &Rational::zero()).unwrap(),
            Rational::zero()
        );
        assert!(matches!(
            lyapunov_sum(&Rational::zero(), &Rational::one()),
            Err(PipelineError::ZeroDenominator)
        ));
    }

    #[test]
    fn pairing_table_is_linear_in_the_class() {
        let a = solved_class();
        let mut b = FlexClass::zero();
        b.d0_23 = q(3, 7);
        b.dirr = q(-2, 5);
        let sum = FlexClass {
            dirr: &a.dirr + &b.dirr,
            d0_12: &a.d0_12 + &b.d0_12,
            d0_13: &a.d0_13 + &b.d0_13,
            d0_23: &a.d0_23 + &b.d0_23,
            d0_123: &a.d0_123 + &b.d0_123,
        };
        let ta = pairing_table(&a).unwrap();
        let tb = pairing_table(&b).unwrap();
        let ts = pairing_table(&sum).unwrap();
        assert_eq!(ts.psi1_sq, &ta.psi1_sq + &tb.psi1_sq);
        assert_eq!(ts.psi1_psi2, &ta.psi1_psi2 + &tb.psi1_psi2);
        assert_eq!(ts.lambda_psi2, &ta.lambda_psi2 + &tb.lambda_psi2);
    }

    #[test]
    fn decimal_sanity_of_the_lyapunov_sum() {
        // |6/13 - 0.46155| < 2e-4, checked in exact arithmetic.
        let exact = q(6, 13);
        let approx = q(46155, 100_000);
        let bound = q(2, 10_000);
        assert!((exact - approx).abs() < bound);
    }

    #[test]
    fn default_run_is_the_full_reproduction() {
        let result = run_default().unwrap();
        assert_eq!(result.eta3, q(-13, 6));
        assert_eq!(result.eta2_lambda1, q(-1, 2));
        assert_eq!(result.lyapunov_sum, q(6, 13));
    }

    #[test]
    fn inconsistent_solve_aborts_before_pairing() {
        let file = crate::files::bundled_testcurves().unwrap();
        let (spec, mut curves) = file.system(true).unwrap();
        let last = curves.len() - 1;
        curves[last].rhs_constant = Rational::one();
        let system = crate::solver::build_system(&spec, &curves).unwrap();
        let report = crate::solver::solve(&system);
        match FlexClass::from_report(&report) {
            Err(PipelineError::InconsistentSystem { curve, residual }) => {
                assert_eq!(curve, "B7");
                assert!(!residual.is_zero());
            }
            other => panic!("expected InconsistentSystem, got {other:?}"),
        }
    }
}
