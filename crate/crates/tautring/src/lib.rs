//! Exact intersection theory on moduli spaces of stable curves of genus 0
//! and 1, with a linear solver for divisor classes tested against curve
//! classes, and the pipeline computing the self-intersection invariants and
//! Lyapunov-exponent sum of the flex locus via its gothic-locus fibration.
//!
//! Everything is exact rational arithmetic; no floating point is used
//! anywhere.
//!
//! The main entry points:
//!
//! * [`ModuliSpace`], [`Generator`], [`ClassExpression`] build divisor
//!   polynomials on a moduli space (or a product of them);
//! * [`integrate`] evaluates top intersection numbers, and
//!   [`boundary_pullback`] exposes one restriction step through a gluing
//!   cover;
//! * [`solver`] solves for unknown divisor-class coefficients from pairings
//!   with test curves;
//! * [`gothic`] assembles the flex-locus invariants from the fibration
//!   constants and the intersection engine.

pub mod class;
pub mod cli;
pub mod engine;
pub mod error;
pub mod files;
pub mod gothic;
pub mod parse;
pub mod rational;
pub mod selftest;
pub mod solver;
pub mod space;

pub use class::{ClassExpression, Generator, PowerMap};
pub use engine::{
    boundary_pullback, descendent_genus1, integrate, psi_integral_genus0, substitute_lambda,
    DegreeMode, GluingCover,
};
pub use error::{EngineError, FileError, PipelineError, SolverError};
pub use rational::Rational;
pub use space::{Ambient, Genus, ModuliSpace};
