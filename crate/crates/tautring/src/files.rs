//! JSON file formats, bundled data, and data-path resolution.
//!
//! Two data files ship with the crate and are compiled in as defaults:
//! `flex_testcurves.json` (the test-curve system determining the flex
//! divisor class) and `gothic_constants.json` (the pushforward-chain
//! constants). A file argument resolves in this order: a literal path; the
//! file name under `$TAUTRING_DATA`; the file name under `data/` next to
//! the executable; finally the compiled-in copy for the two bundled names.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{FileError, PipelineError, SolverError};
use crate::gothic::{FlexClass, GothicConstants};
use crate::parse::{format_generator, parse_generator_name, resolve_gen};
use crate::rational::Rational;
use crate::solver::{TestCurve, UnknownClassSpec};
use crate::space::{Genus, ModuliSpace};

pub const TESTCURVES_FILE: &str = "flex_testcurves.json";
pub const CONSTANTS_FILE: &str = "gothic_constants.json";
pub const DATA_ENV_VAR: &str = "TAUTRING_DATA";

const BUNDLED_TESTCURVES: &str = include_str!("../data/flex_testcurves.json");
const BUNDLED_CONSTANTS: &str = include_str!("../data/gothic_constants.json");

fn schema_error(origin: &str, message: impl Into<String>) -> FileError {
    FileError::Schema {
        path: origin.into(),
        message: message.into(),
    }
}

/// The moduli space a curves file works on.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub genus: u8,
    pub marks: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhsSpec {
    pub constant: Rational,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aux: BTreeMap<String, Rational>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub name: String,
    #[serde(default)]
    pub pairings: BTreeMap<String, Rational>,
    pub rhs: RhsSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comments: Option<Vec<String>>,
}

/// The test-curve file: a space, the generator/tie/aux declarations of the
/// unknown class, and the curve equations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvesFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comments: Option<Vec<String>>,
    pub space: SpaceSpec,
    pub generators: Vec<String>,
    #[serde(default)]
    pub ties: Vec<Vec<String>>,
    #[serde(default)]
    pub aux: Vec<String>,
    pub curves: Vec<CurveSpec>,
}

impl CurvesFile {
    /// Parse and validate; `origin` labels error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self, FileError> {
        let file: CurvesFile =
            serde_json::from_str(text).map_err(|e| schema_error(origin, e.to_string()))?;
        let space = file.space_checked(origin)?;
        for name in &file.generators {
            let gen = parse_generator_name(name)
                .map_err(|e| schema_error(origin, format!("generator {name:?}: {e}")))?;
            let resolved = resolve_gen(&space, &gen)
                .map_err(|e| schema_error(origin, format!("generator {name:?}: {e}")))?;
            let canonical = format_generator(&space, &resolved);
            if &canonical != name {
                return Err(schema_error(
                    origin,
                    format!("generator {name:?} must be written canonically as {canonical:?}"),
                ));
            }
        }
        Ok(file)
    }

    pub fn space_checked(&self, origin: &str) -> Result<ModuliSpace, FileError> {
        let genus =
            Genus::from_u8(self.space.genus).map_err(|e| schema_error(origin, e.to_string()))?;
        ModuliSpace::new(genus, self.space.marks.iter().cloned())
            .map_err(|e| schema_error(origin, e.to_string()))
    }

    /// Build the solver inputs. With `tied` the declared tie groups apply;
    /// without, every generator keeps its own coefficient and the curve
    /// list is closed under mark permutations (each curve construction is
    /// symmetric in the marks, so a relabeled curve is again a valid curve
    /// of the family). Permuted copies are named `base@m1,m2,...` by the
    /// image of the mark list, and duplicates of already-present equations
    /// are dropped.
    pub fn system(&self, tied: bool) -> Result<(UnknownClassSpec, Vec<TestCurve>), PipelineError> {
        let spec = UnknownClassSpec::new(
            self.generators.clone(),
            if tied { self.ties.clone() } else { Vec::new() },
            self.aux.clone(),
        )?;
        let base: Vec<TestCurve> = self
            .curves
            .iter()
            .map(|c| TestCurve {
                name: c.name.clone(),
                pairings: c.pairings.clone(),
                rhs_constant: c.rhs.constant.clone(),
                rhs_aux: c.rhs.aux.clone(),
            })
            .collect();
        if tied {
            return Ok((spec, base));
        }
        let space = self
            .space_checked("<curves>")
            .map_err(PipelineError::from)?;
        let marks = space.marks().to_vec();
        // A relabeled curve is the same equation iff its pairings and both
        // right-hand-side parts coincide.
        type EquationSignature = (
            BTreeMap<String, Rational>,
            Rational,
            BTreeMap<String, Rational>,
        );
        let mut seen: BTreeSet<EquationSignature> = BTreeSet::new();
        let mut out = Vec::new();
        for curve in &base {
            // permutations() yields the identity arrangement first.
            for image in marks.iter().permutations(marks.len()) {
                let relabel: BTreeMap<&str, &str> = marks
                    .iter()
                    .map(String::as_str)
                    .zip(image.iter().map(|s| s.as_str()))
                    .collect();
                let mut pairings = BTreeMap::new();
                for (name, value) in &curve.pairings {
                    let gen = parse_generator_name(name)
                        .map_err(|e| SolverError::InvalidSpec(format!("{name:?}: {e}")))?;
                    let resolved = resolve_gen(&space, &gen)?;
                    let renamed = resolved
                        .relabel(|l| {
                            relabel
                                .get(l)
                                .map(|s| s.to_string())
                                .unwrap_or_else(|| l.into())
                        })
                        .validated(&space)?;
                    let new_name = format_generator(&space, &renamed);
                    if let Some(previous) = pairings.insert(new_name.clone(), value.clone()) {
                        // Two distinct names never collapse under a
                        // bijection of marks.
                        let _: Rational = previous;
                        unreachable!("mark bijection collapsed generator names");
                    }
                }
                let signature = (
                    pairings.clone(),
                    curve.rhs_constant.clone(),
                    curve.rhs_aux.clone(),
                );
                if !seen.insert(signature) {
                    continue;
                }
                let is_identity = relabel.iter().all(|(a, b)| a == b);
                let name = if is_identity {
                    curve.name.clone()
                } else {
                    let suffix: Vec<&str> = image.iter().map(|s| s.as_str()).collect();
                    format!("{}@{}", curve.name, suffix.join(","))
                };
                out.push(TestCurve {
                    name,
                    pairings,
                    rhs_constant: curve.rhs_constant.clone(),
                    rhs_aux: curve.rhs_aux.clone(),
                });
            }
        }
        Ok((spec, out))
    }
}

/// The pushforward-chain constants file; see the bundled
/// `gothic_constants.json` for the field meanings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comments: Option<Vec<String>>,
    pub eta_beta: [Rational; 3],
    pub lambda_beta: [Rational; 3],
    #[serde(default)]
    pub psi_beta: [[Rational; 3]; 2],
    pub beta_multiplicities: [i64; 3],
    pub fiber_degree_eta: Rational,
}

impl ConstantsFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, FileError> {
        serde_json::from_str(text).map_err(|e| schema_error(origin, e.to_string()))
    }

    pub fn to_constants(&self) -> GothicConstants {
        GothicConstants {
            eta_beta: self.eta_beta.clone(),
            lambda_beta: self.lambda_beta.clone(),
            psi_beta: self.psi_beta.clone(),
            beta_multiplicities: self.beta_multiplicities,
            fiber_degree_eta: self.fiber_degree_eta.clone(),
        }
    }
}

/// A divisor class on the flex space as a JSON object keyed by generator
/// name; missing generators default to coefficient 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassFile(pub BTreeMap<String, Rational>);

impl ClassFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, FileError> {
        let file: ClassFile =
            serde_json::from_str(text).map_err(|e| schema_error(origin, e.to_string()))?;
        file.validated(origin)
    }

    fn validated(self, origin: &str) -> Result<Self, FileError> {
        for key in self.0.keys() {
            if !FLEX_GENERATOR_NAMES.contains(&key.as_str()) {
                return Err(schema_error(
                    origin,
                    format!(
                        "unknown coefficient {key:?}; expected one of {}",
                        FLEX_GENERATOR_NAMES.join(", ")
                    ),
                ));
            }
        }
        Ok(self)
    }

    pub fn to_flex_class(&self) -> FlexClass {
        let get = |name: &str| self.0.get(name).cloned().unwrap_or_else(Rational::zero);
        FlexClass {
            dirr: get("dirr"),
            d0_12: get("d0{1,2}"),
            d0_13: get("d0{1,3}"),
            d0_23: get("d0{2,3}"),
            d0_123: get("d0{1,2,3}"),
        }
    }

    /// Parse the inline `name=value,...` form (commas inside `{}` belong to
    /// the generator name).
    pub fn parse_inline(text: &str) -> Result<Self, FileError> {
        let origin = "<inline class>";
        let mut map = BTreeMap::new();
        for piece in split_top_level_commas(text) {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            let Some((name, value)) = piece.split_once('=') else {
                return Err(schema_error(
                    origin,
                    format!("expected name=value, got {piece:?}"),
                ));
            };
            let value: Rational = value
                .trim()
                .parse()
                .map_err(|e| schema_error(origin, format!("coefficient for {name:?}: {e}")))?;
            if map.insert(name.trim().to_string(), value).is_some() {
                return Err(schema_error(
                    origin,
                    format!("duplicate coefficient {name:?}"),
                ));
            }
        }
        ClassFile(map).validated(origin)
    }
}

const FLEX_GENERATOR_NAMES: [&str; 5] = ["dirr", "d0{1,2}", "d0{1,3}", "d0{2,3}", "d0{1,2,3}"];

fn split_top_level_commas(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

/// Resolve a data-file argument to its content; see the module docs for the
/// search order. Returns (origin label, content).
pub fn resolve_data(arg: &str) -> Result<(String, String), FileError> {
    let read = |p: &Path| -> Result<(String, String), FileError> {
        std::fs::read_to_string(p)
            .map(|text| (p.display().to_string(), text))
            .map_err(|e| FileError::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })
    };
    let path = Path::new(arg);
    if path.exists() {
        return read(path);
    }
    let base = path
        .file_name()
        .map(|b| b.to_string_lossy().into_owned())
        .unwrap_or_else(|| arg.to_string());
    if let Ok(dir) = std::env::var(DATA_ENV_VAR) {
        let candidate = PathBuf::from(dir).join(&base);
        if candidate.exists() {
            return read(&candidate);
        }
    }
    if let Ok(exe) = std::env::current_exe() {
        if let Some(dir) = exe.parent() {
            let candidate = dir.join("data").join(&base);
            if candidate.exists() {
                return read(&candidate);
            }
        }
    }
    match base.as_str() {
        TESTCURVES_FILE => Ok((
            format!("<bundled {TESTCURVES_FILE}>"),
            BUNDLED_TESTCURVES.into(),
        )),
        CONSTANTS_FILE => Ok((
            format!("<bundled {CONSTANTS_FILE}>"),
            BUNDLED_CONSTANTS.into(),
        )),
        _ => Err(FileError::Io {
            path: arg.into(),
            message: format!("no such file, and {base:?} is not a bundled data file"),
        }),
    }
}

pub fn load_curves(arg: &str) -> Result<CurvesFile, FileError> {
    let (origin, text) = resolve_data(arg)?;
    CurvesFile::parse(&text, &origin)
}

pub fn load_constants(arg: &str) -> Result<ConstantsFile, FileError> {
    let (origin, text) = resolve_data(arg)?;
    ConstantsFile::parse(&text, &origin)
}

pub fn load_class(arg: &str) -> Result<ClassFile, FileError> {
    let (origin, text) = resolve_data(arg)?;
    ClassFile::parse(&text, &origin)
}

/// The compiled-in test-curve system.
pub fn bundled_testcurves() -> Result<CurvesFile, FileError> {
    CurvesFile::parse(BUNDLED_TESTCURVES, &format!("<bundled {TESTCURVES_FILE}>"))
}

/// The compiled-in chain constants.
pub fn bundled_constants() -> Result<ConstantsFile, FileError> {
    ConstantsFile::parse(BUNDLED_CONSTANTS, &format!("<bundled {CONSTANTS_FILE}>"))
}
