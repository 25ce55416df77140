//! Error types shared by the space/class/engine layers.

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    /// The (genus, mark count) pair does not describe a stable moduli space.
    #[error("unstable space: genus {genus} with {marks} marked points")]
    UnstableSpace { genus: u8, marks: usize },

    /// Genus outside {0, 1}.
    #[error("unsupported genus {0}; only genus 0 and 1 are implemented")]
    UnsupportedGenus(u8),

    /// Mark labels must be distinct and non-empty.
    #[error("invalid mark set: {0}")]
    InvalidMarks(String),

    /// A generator that does not exist on the given space, e.g. lambda1 on
    /// genus 0 or a psi class at an unknown mark.
    #[error("unsupported generator on this space: {0}")]
    UnsupportedGenerator(String),

    /// The monomial degree does not match the ambient dimension (strict
    /// integration mode only).
    #[error("degree mismatch: monomial degree {degree}, ambient dimension {dimension}")]
    DegreeMismatch { degree: u32, dimension: u32 },

    /// An expression was used with an ambient it does not live on.
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    /// A curve pairs against a generator the unknown-class spec does not declare.
    #[error("curve {curve:?} pairs against undeclared generator {name:?}")]
    UnknownGenerator { curve: String, name: String },

    /// A curve references an auxiliary unknown the spec does not declare.
    #[error("curve {curve:?} references undeclared auxiliary unknown {name:?}")]
    UnknownAux { curve: String, name: String },

    /// Duplicate names within generators, ties, aux, or curve names.
    #[error("invalid unknown-class spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    /// The test-curve system has a nonzero residual; no class to push forward.
    #[error("test-curve system is inconsistent: residual {residual} on curve {curve:?}")]
    InconsistentSystem { curve: String, residual: Rational },

    /// The self-intersection eta^3 vanished, so the Lyapunov ratio is undefined.
    #[error("eta^3 = 0: Lyapunov sum denominator vanishes")]
    ZeroDenominator,

    /// The solved system left a needed coefficient undetermined.
    #[error("coefficient {0:?} is undetermined by the test-curve system")]
    UndeterminedCoefficient(String),

    #[error(transparent)]
    Engine(#[from] EngineError),

    #[error(transparent)]
    Solver(#[from] SolverError),

    #[error(transparent)]
    File(#[from] FileError),
}

/// Errors loading or validating data files.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FileError {
    /// The file could not be read.
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    /// The file's content does not match the expected schema.
    #[error("schema error in {path}: {message}")]
    Schema { path: String, message: String },
}
