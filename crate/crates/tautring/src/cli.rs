//! Command-line front end.
//!
//! Four subcommands cover the crate's capabilities:
//!
//! * `intersect` — evaluate one divisor monomial against the fundamental
//!   class of a moduli space;
//! * `solve` — solve a test-curve file for unknown divisor coefficients;
//! * `gothic` — run the invariant chain (eta powers and the Lyapunov sum);
//! * `selftest` — run the acceptance suite.
//!
//! Exit codes: `0` success, `1` selftest failure, `2` syntax/validation/
//! schema error, `3` inconsistent linear system, `4` zero denominator in
//! the final ratio. Every failure prints a single line to stderr of the
//! form `E_<KIND>: <message>`.

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::class::ClassExpression;
use crate::engine::{integrate, DegreeMode};
use crate::error::{EngineError, FileError, PipelineError, SolverError};
use crate::files;
use crate::gothic::{self, FlexClass, GothicConstants};
use crate::parse::{parse_monomial, resolve_monomial, SyntaxError};
use crate::rational::Rational;
use crate::selftest;
use crate::solver::{build_system, solve, SolveReport};
use crate::space::{Genus, ModuliSpace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;
pub const EXIT_ZERO_DENOMINATOR: i32 = 4;

#[derive(Parser)]
#[command(
    name = "tautring",
    version,
    about = "Exact divisor intersection numbers on small moduli spaces of curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a top intersection number of a divisor monomial.
    Intersect {
        /// Genus of the moduli space (0 or 1).
        #[arg(long)]
        genus: u8,
        /// Comma-separated mark labels, e.g. `p1,p2,p3`.
        #[arg(long, value_delimiter = ',', required = true)]
        marks: Vec<String>,
        /// Monomial in the expression grammar, e.g. `psi1^2 * dirr`.
        /// Integers index into --marks (1-based).
        #[arg(long)]
        expr: String,
        /// Evaluate off-dimension monomials to 0 instead of failing.
        #[arg(long)]
        lenient: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Solve a test-curve system for unknown divisor coefficients.
    Solve {
        /// Path to a curves JSON file (bare names also resolve against
        /// $TAUTRING_DATA, the executable's data/ directory, and the
        /// bundled copies).
        #[arg(long)]
        curves: String,
        /// Drop the tie constraints and close the curve list under mark
        /// permutations before solving.
        #[arg(long)]
        independent: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the invariant chain: eta^3, eta^2*lambda1, and the Lyapunov sum.
    Gothic {
        /// Constants JSON file (defaults to the bundled constants).
        #[arg(long)]
        constants: Option<String>,
        /// Divisor class to use: `zero`, a JSON file path, or inline
        /// `dirr=4/3,d0{1,2}=4,...`. Defaults to solving the bundled
        /// test-curve system.
        #[arg(long)]
        class: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the acceptance suite and print one pass/fail line per check.
    Selftest {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// A terminal failure: the stderr line and the process exit code.
struct Failure {
    prefix: &'static str,
    message: String,
    code: i32,
}

impl Failure {
    fn new(prefix: &'static str, code: i32, message: impl ToString) -> Self {
        Failure {
            prefix,
            message: message.to_string(),
            code,
        }
    }
}

fn syntax_failure(e: SyntaxError) -> Failure {
    Failure::new("E_SYNTAX", EXIT_USAGE, e)
}

fn engine_failure(e: EngineError) -> Failure {
    match e {
        EngineError::DegreeMismatch { .. } => Failure::new("E_DEGREE", EXIT_USAGE, e),
        other => Failure::new("E_SCHEMA", EXIT_USAGE, other),
    }
}

fn solver_failure(e: SolverError) -> Failure {
    Failure::new("E_SCHEMA", EXIT_USAGE, e)
}

fn file_failure(e: FileError) -> Failure {
    Failure::new("E_SCHEMA", EXIT_USAGE, e)
}

fn pipeline_failure(e: PipelineError) -> Failure {
    match e {
        PipelineError::InconsistentSystem { .. } => {
            Failure::new("E_INCONSISTENT", EXIT_INCONSISTENT, e)
        }
        PipelineError::ZeroDenominator => Failure::new("E_ZERODENOM", EXIT_ZERO_DENOMINATOR, e),
        PipelineError::Engine(inner) => engine_failure(inner),
        PipelineError::Solver(inner) => solver_failure(inner),
        PipelineError::File(inner) => file_failure(inner),
        other => Failure::new("E_SCHEMA", EXIT_USAGE, other),
    }
}

#[derive(Serialize)]
struct IntersectOutput {
    value: Rational,
}

fn cmd_intersect(
    genus: u8,
    marks: Vec<String>,
    expr: &str,
    lenient: bool,
    format: Format,
) -> Result<String, Failure> {
    let genus = Genus::from_u8(genus).map_err(engine_failure)?;
    let space = ModuliSpace::new(genus, marks).map_err(engine_failure)?;
    let monomial = parse_monomial(expr).map_err(syntax_failure)?;
    let powers = resolve_monomial(&space, &monomial).map_err(engine_failure)?;
    let class =
        ClassExpression::monomial(&space, Rational::one(), &powers).map_err(engine_failure)?;
    let mode = if lenient {
        DegreeMode::Lenient
    } else {
        DegreeMode::Strict
    };
    let value = integrate(&class, mode).map_err(engine_failure)?;
    Ok(match format {
        Format::Text => format!("{value}\n"),
        Format::Json => {
            let out = IntersectOutput { value };
            format!("{}\n", serde_json::to_string(&out).expect("serialize"))
        }
    })
}

fn render_solve_text(report: &SolveReport) -> String {
    let mut out = String::new();
    for (name, value) in &report.coefficients {
        let marker = if report.is_undetermined(name) {
            "  (undetermined)"
        } else {
            ""
        };
        out.push_str(&format!("coefficient {name} = {value}{marker}\n"));
    }
    for (name, value) in &report.aux {
        let marker = if report.is_undetermined(name) {
            "  (undetermined)"
        } else {
            ""
        };
        out.push_str(&format!("aux {name} = {value}{marker}\n"));
    }
    out.push_str(&format!(
        "rank {} of {} equations\n",
        report.rank, report.equation_count
    ));
    out.push_str(&format!("consistent: {}\n", report.consistent));
    for (name, value) in &report.residuals {
        if !value.is_zero() {
            out.push_str(&format!("residual {name} = {value}\n"));
        }
    }
    if !report.undetermined.is_empty() {
        out.push_str(&format!(
            "undetermined: {}\n",
            report.undetermined.join(", ")
        ));
    }
    out
}

/// Solve result plus the failure to raise *after* printing it (an
/// inconsistent system still reports its residuals).
fn cmd_solve(
    curves: &str,
    independent: bool,
    format: Format,
) -> Result<(String, Option<Failure>), Failure> {
    let file = files::load_curves(curves).map_err(file_failure)?;
    let (spec, curve_list) = file.system(!independent).map_err(pipeline_failure)?;
    let system = build_system(&spec, &curve_list).map_err(solver_failure)?;
    let report = solve(&system);
    let rendered = match format {
        Format::Text => render_solve_text(&report),
        Format::Json => format!("{}\n", serde_json::to_string(&report).expect("serialize")),
    };
    let failure = if report.consistent {
        None
    } else {
        let first_bad = report
            .residuals
            .iter()
            .find(|(_, r)| !r.is_zero())
            .map(|(n, _)| n.clone())
            .unwrap_or_default();
        Some(Failure::new(
            "E_INCONSISTENT",
            EXIT_INCONSISTENT,
            format!(
                "test-curve system has no exact solution (first nonzero residual: {first_bad})"
            ),
        ))
    };
    Ok((rendered, failure))
}

fn resolve_class_argument(arg: Option<&str>) -> Result<FlexClass, Failure> {
    match arg {
        None => gothic::solve_bundled_flex_class().map_err(pipeline_failure),
        Some("zero") => Ok(FlexClass::zero()),
        Some(inline) if inline.contains('=') => {
            let file = files::ClassFile::parse_inline(inline).map_err(file_failure)?;
            Ok(file.to_flex_class())
        }
        Some(path) => {
            let file = files::load_class(path).map_err(file_failure)?;
            Ok(file.to_flex_class())
        }
    }
}

fn cmd_gothic(
    constants: Option<&str>,
    class: Option<&str>,
    format: Format,
) -> Result<String, Failure> {
    let constants = match constants {
        None => GothicConstants::default(),
        Some(arg) => files::load_constants(arg)
            .map_err(file_failure)?
            .to_constants(),
    };
    let class = resolve_class_argument(class)?;
    let result = gothic::run(&class, &constants).map_err(pipeline_failure)?;
    Ok(match format {
        Format::Text => format!(
            "eta3 = {}\neta2_lambda1 = {}\nlyapunov_sum = {}\n",
            result.eta3, result.eta2_lambda1, result.lyapunov_sum
        ),
        Format::Json => format!("{}\n", serde_json::to_string(&result).expect("serialize")),
    })
}

#[derive(Serialize)]
struct SelftestOutput {
    checks: Vec<selftest::CheckResult>,
    passed: bool,
}

fn cmd_selftest(format: Format) -> (String, i32) {
    let checks = selftest::run_all();
    let passed = checks.iter().all(|c| c.passed);
    let rendered = match format {
        Format::Text => {
            let mut out = String::new();
            for check in &checks {
                let status = if check.passed { "PASS" } else { "FAIL" };
                out.push_str(&format!("{status} {}: {}\n", check.name, check.details));
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed == 0 {
                out.push_str(&format!("all {} checks passed\n", checks.len()));
            } else {
                out.push_str(&format!("{failed} of {} checks failed\n", checks.len()));
            }
            out
        }
        Format::Json => {
            let out = SelftestOutput { checks, passed };
            format!("{}\n", serde_json::to_string(&out).expect("serialize"))
        }
    };
    let code = if passed {
        EXIT_OK
    } else {
        EXIT_SELFTEST_FAILED
    };
    (rendered, code)
}

fn dispatch(cli: Cli) -> (String, i32, Option<Failure>) {
    match cli.command {
        Command::Intersect {
            genus,
            marks,
            expr,
            lenient,
            format,
        } => match cmd_intersect(genus, marks, &expr, lenient, format) {
            Ok(out) => (out, EXIT_OK, None),
            Err(f) => (String::new(), f.code, Some(f)),
        },
        Command::Solve {
            curves,
            independent,
            format,
        } => match cmd_solve(&curves, independent, format) {
            Ok((out, None)) => (out, EXIT_OK, None),
            Ok((out, Some(f))) => (out, f.code, Some(f)),
            Err(f) => (String::new(), f.code, Some(f)),
        },
        Command::Gothic {
            constants,
            class,
            format,
        } => match cmd_gothic(constants.as_deref(), class.as_deref(), format) {
            Ok(out) => (out, EXIT_OK, None),
            Err(f) => (String::new(), f.code, Some(f)),
        },
        Command::Selftest { format } => {
            let (out, code) = cmd_selftest(format);
            (out, code, None)
        }
    }
}

/// Parse `std::env::args`, run the selected command, and return the exit
/// code after printing stdout/stderr.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let (stdout, code, failure) = dispatch(cli);
    print!("{stdout}");
    if let Some(f) = failure {
        let one_line = f.message.replace('\n', " ");
        eprintln!("{}: {}", f.prefix, one_line);
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (String, i32, Option<(String, String)>) {
        let cli = Cli::try_parse_from(args).expect("args parse");
        let (out, code, failure) = dispatch(cli);
        (
            out,
            code,
            failure.map(|f| (f.prefix.to_string(), f.message)),
        )
    }

    #[test]
    fn intersect_text_and_json() {
        let (out, code, _) = run_args(&[
            "tautring",
            "intersect",
            "--genus",
            "1",
            "--marks",
            "p1,p2,p3",
            "--expr",
            "psi1^2 * dirr",
        ]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "1/2\n");

        let (out, code, _) = run_args(&[
            "tautring",
            "intersect",
            "--genus",
            "1",
            "--marks",
            "p1,p2,p3",
            "--expr",
            "psi1^2*dirr",
            "--format",
            "json",
        ]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "{\"value\":\"1/2\"}\n");
    }

    #[test]
    fn intersect_genus0() {
        let (out, code, _) = run_args(&[
            "tautring",
            "intersect",
            "--genus",
            "0",
            "--marks",
            "a,b,c,d,e",
            "--expr",
            "psi1*psi2",
        ]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "2\n");
    }

    #[test]
    fn intersect_degree_mismatch_strict_vs_lenient() {
        let (_, code, failure) = run_args(&[
            "tautring",
            "intersect",
            "--genus",
            "0",
            "--marks",
            "a,b,c,d,e",
            "--expr",
            "psi1",
        ]);
        assert_eq!(code, EXIT_USAGE);
        let (prefix, _) = failure.expect("failure");
        assert_eq!(prefix, "E_DEGREE");

        let (out, code, _) = run_args(&[
            "tautring",
            "intersect",
            "--genus",
            "0",
            "--marks",
            "a,b,c,d,e",
            "--expr",
            "psi1",
            "--lenient",
        ]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "0\n");
    }

    #[test]
    fn intersect_syntax_error_position() {
        let (_, code, failure) = run_args(&[
            "tautring",
            "intersect",
            "--genus",
            "1",
            "--marks",
            "p1,p2,p3",
            "--expr",
            "psi1 ** 2",
        ]);
        assert_eq!(code, EXIT_USAGE);
        let (prefix, message) = failure.expect("failure");
        assert_eq!(prefix, "E_SYNTAX");
        assert!(message.contains("position 6"), "message: {message}");
    }

    #[test]
    fn intersect_unknown_mark_index() {
        let (_, code, failure) = run_args(&[
            "tautring",
            "intersect",
            "--genus",
            "1",
            "--marks",
            "p1,p2,p3",
            "--expr",
            "psi7",
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert_eq!(failure.expect("failure").0, "E_SCHEMA");
    }

    #[test]
    fn solve_bundled_by_name() {
        let (out, code, failure) =
            run_args(&["tautring", "solve", "--curves", "flex_testcurves.json"]);
        assert_eq!(code, EXIT_OK);
        assert!(failure.is_none());
        assert!(out.contains("coefficient dirr = 4/3\n"), "out: {out}");
        assert!(out.contains("coefficient d0{1,2} = 4\n"));
        assert!(out.contains("aux c = 2\n"));
        assert!(out.contains("rank 4 of 7 equations\n"));
        assert!(out.contains("consistent: true\n"));
    }

    #[test]
    fn solve_json_is_deterministic() {
        let args = [
            "tautring",
            "solve",
            "--curves",
            "flex_testcurves.json",
            "--format",
            "json",
        ];
        let (a, code, _) = run_args(&args);
        assert_eq!(code, EXIT_OK);
        let (b, _, _) = run_args(&args);
        assert_eq!(a, b);
        assert!(a.starts_with("{\"coefficients\":{"), "json: {a}");
    }

    #[test]
    fn gothic_default_json() {
        let (out, code, _) = run_args(&["tautring", "gothic", "--format", "json"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(
            out,
            "{\"eta3\":\"-13/6\",\"eta2_lambda1\":\"-1/2\",\"lyapunov_sum\":\"6/13\"}\n"
        );
    }

    #[test]
    fn gothic_zero_class() {
        let (out, code, _) =
            run_args(&["tautring", "gothic", "--class", "zero", "--format", "json"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(
            out,
            "{\"eta3\":\"5/6\",\"eta2_lambda1\":\"1/6\",\"lyapunov_sum\":\"2/5\"}\n"
        );
    }

    #[test]
    fn gothic_inline_class() {
        let (out, code, _) = run_args(&[
            "tautring",
            "gothic",
            "--class",
            "dirr=4/3,d0{1,2}=4,d0{1,3}=4,d0{2,3}=4,d0{1,2,3}=4",
            "--format",
            "json",
        ]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(
            out,
            "{\"eta3\":\"-13/6\",\"eta2_lambda1\":\"-1/2\",\"lyapunov_sum\":\"6/13\"}\n"
        );
    }

    #[test]
    fn gothic_zero_denominator() {
        // With the default constants, eta3 = 5/6 - 2c for the class c*dirr,
        // so c = 5/12 sends the denominator of the final ratio to zero.
        let (_, code, failure) = run_args(&["tautring", "gothic", "--class", "dirr=5/12"]);
        assert_eq!(code, EXIT_ZERO_DENOMINATOR);
        assert_eq!(failure.expect("failure").0, "E_ZERODENOM");
    }

    #[test]
    fn gothic_bad_inline_class() {
        let (_, code, failure) = run_args(&["tautring", "gothic", "--class", "dirr=4/3,bogus=1"]);
        assert_eq!(code, EXIT_USAGE);
        assert_eq!(failure.expect("failure").0, "E_SCHEMA");
    }

    #[test]
    fn selftest_passes_and_is_deterministic() {
        let (a, code) = cmd_selftest(Format::Json);
        assert_eq!(code, EXIT_OK);
        let (b, _) = cmd_selftest(Format::Json);
        assert_eq!(a, b);
        let (text, code) = cmd_selftest(Format::Text);
        assert_eq!(code, EXIT_OK);
        assert!(text.contains("PASS 01-intersection-table"), "text: {text}");
        assert!(text.contains("all 11 checks passed"));
    }
}
