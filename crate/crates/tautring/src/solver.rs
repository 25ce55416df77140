//! Exact linear solver for divisor-class coefficients determined by test
//! curves.
//!
//! Each test curve pairs with the generators of the Picard group and with
//! the unknown divisor class, giving one linear equation on the unknown
//! coefficients. Generators may be tied into groups sharing one coefficient
//! (one column per group), and auxiliary unknowns appearing on the
//! right-hand side are moved to the left with flipped sign, producing one
//! uniform system solved by exact Gauss-Jordan elimination.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::SolverError;
use crate::rational::Rational;

/// The unknowns of a solve: ordered generator names, tie groups sharing one
/// coefficient, and auxiliary right-hand-side unknowns.
#[derive(Debug, Clone)]
pub struct UnknownClassSpec {
    generators: Vec<String>,
    ties: Vec<Vec<String>>,
    aux: Vec<String>,
}

impl UnknownClassSpec {
    pub fn new(
        generators: Vec<String>,
        ties: Vec<Vec<String>>,
        aux: Vec<String>,
    ) -> Result<Self, SolverError> {
        let mut seen = BTreeSet::new();
        for g in &generators {
            if !seen.insert(g.clone()) {
                return Err(SolverError::InvalidSpec(format!(
                    "duplicate generator {g:?}"
                )));
            }
        }
        let mut tied = BTreeSet::new();
        for group in &ties {
            if group.is_empty() {
                return Err(SolverError::InvalidSpec("empty tie group".into()));
            }
            for name in group {
                if !seen.contains(name) {
                    return Err(SolverError::InvalidSpec(format!(
                        "tie group references unknown generator {name:?}"
                    )));
                }
                if !tied.insert(name.clone()) {
                    return Err(SolverError::InvalidSpec(format!(
                        "generator {name:?} appears in more than one tie group"
                    )));
                }
            }
        }
        let mut aux_seen = BTreeSet::new();
        for a in &aux {
            if seen.contains(a) || !aux_seen.insert(a.clone()) {
                return Err(SolverError::InvalidSpec(format!(
                    "auxiliary unknown {a:?} duplicates another name"
                )));
            }
        }
        Ok(UnknownClassSpec {
            generators,
            ties,
            aux,
        })
    }

    /// Untie all generators: same generators and aux, no tie groups.
    pub fn untied(&self) -> UnknownClassSpec {
        UnknownClassSpec {
            generators: self.generators.clone(),
            ties: Vec::new(),
            aux: self.aux.clone(),
        }
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn ties(&self) -> &[Vec<String>] {
        &self.ties
    }

    pub fn aux(&self) -> &[String] {
        &self.aux
    }
}

/// One test curve: its exact pairings with the generators, the known part
/// of its pairing with the unknown class, and the coefficients of any
/// auxiliary unknowns in that pairing.
#[derive(Debug, Clone)]
pub struct TestCurve {
    pub name: String,
    pub pairings: BTreeMap<String, Rational>,
    pub rhs_constant: Rational,
    pub rhs_aux: BTreeMap<String, Rational>,
}

/// The assembled exact system: one row per curve over the effective
/// unknowns (tie groups collapse to the column of their first member;
/// auxiliary unknowns take the trailing columns, negated).
#[derive(Debug, Clone)]
pub struct LinearSystem {
    column_names: Vec<String>,
    gen_column: BTreeMap<String, usize>,
    aux_column: BTreeMap<String, usize>,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    curve_names: Vec<String>,
    degenerate: Vec<String>,
}

/// The outcome of a solve: per-generator coefficients (tied generators
/// share their group's value), auxiliary values, rank and consistency data,
/// and the residual of every input equation at the reported solution.
///
/// Serializes with this exact field order; all maps are ordered, so the
/// JSON form is byte-deterministic.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SolveReport {
    pub coefficients: BTreeMap<String, Rational>,
    pub aux: BTreeMap<String, Rational>,
    pub rank: usize,
    pub equation_count: usize,
    pub consistent: bool,
    pub residuals: BTreeMap<String, Rational>,
    /// Effective unknowns not pinned down by the system (free, or pivoting
    /// on rows that involve free unknowns). Values reported for these come
    /// from the particular solution with free unknowns set to 0.
    pub undetermined: Vec<String>,
    /// Names of the curves whose rows were chosen as pivots; the remaining
    /// curves are linearly dependent cross-checks.
    pub pivot_curves: Vec<String>,
}

/// Build the exact linear system imposed by `curves` on the unknowns of
/// `spec`: one equation per curve,
/// `sum(pairing * coefficient) - sum(rhs_aux * aux) = rhs_constant`.
pub fn build_system(
    spec: &UnknownClassSpec,
    curves: &[TestCurve],
) -> Result<LinearSystem, SolverError> {
    if curves.is_empty() {
        return Err(SolverError::InvalidSpec("no test curves given".into()));
    }
    let mut column_names: Vec<String> = Vec::new();
    let mut gen_column: BTreeMap<String, usize> = BTreeMap::new();
    for gen in &spec.generators {
        if gen_column.contains_key(gen) {
            continue;
        }
        match spec.ties.iter().find(|group| group.contains(gen)) {
            Some(group) => {
                let col = column_names.len();
                column_names.push(group.join("="));
                for member in group {
                    gen_column.insert(member.clone(), col);
                }
            }
            None => {
                gen_column.insert(gen.clone(), column_names.len());
                column_names.push(gen.clone());
            }
        }
    }
    let mut aux_column: BTreeMap<String, usize> = BTreeMap::new();
    for aux in &spec.aux {
        aux_column.insert(aux.clone(), column_names.len());
        column_names.push(aux.clone());
    }

    let width = column_names.len();
    let mut rows = Vec::with_capacity(curves.len());
    let mut rhs = Vec::with_capacity(curves.len());
    let mut curve_names = Vec::with_capacity(curves.len());
    let mut degenerate = Vec::new();
    for curve in curves {
        let mut row = vec![Rational::zero(); width];
        for (name, value) in &curve.pairings {
            let col = *gen_column
                .get(name)
                .ok_or_else(|| SolverError::UnknownGenerator {
                    curve: curve.name.clone(),
                    name: name.clone(),
                })?;
            row[col] += value;
        }
        for (name, value) in &curve.rhs_aux {
            let col = *aux_column
                .get(name)
                .ok_or_else(|| SolverError::UnknownAux {
                    curve: curve.name.clone(),
                    name: name.clone(),
                })?;
            row[col] -= value;
        }
        if row.iter().all(Rational::is_zero) {
            degenerate.push(curve.name.clone());
        }
        rows.push(row);
        rhs.push(curve.rhs_constant.clone());
        curve_names.push(curve.name.clone());
    }
    Ok(LinearSystem {
        column_names,
        gen_column,
        aux_column,
        rows,
        rhs,
        curve_names,
        degenerate,
    })
}

impl LinearSystem {
    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn equation_count(&self) -> usize {
        self.rows.len()
    }

    /// Curves whose equation has an all-zero left-hand side.
    pub fn degenerate_curves(&self) -> &[String] {
        &self.degenerate
    }

    fn solution_vector(&self, report: &SolveReport) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.column_names.len()];
        for (gen, col) in &self.gen_column {
            x[*col] = report.coefficients[gen].clone();
        }
        for (aux, col) in &self.aux_column {
            x[*col] = report.aux[aux].clone();
        }
        x
    }

    fn residual_of_row(&self, i: usize, x: &[Rational]) -> Rational {
        let mut lhs = Rational::zero();
        for (a, v) in self.rows[i].iter().zip(x) {
            lhs += a * v;
        }
        lhs - self.rhs[i].clone()
    }
}

/// Solve by exact Gauss-Jordan elimination. Pivots are chosen scanning
/// columns left to right and, within a column, rows top to bottom; the
/// system is never consumed, and degenerate or dependent rows become
/// residual checks rather than errors.
pub fn solve(system: &LinearSystem) -> SolveReport {
    let width = system.column_names.len();
    let height = system.rows.len();
    let mut a = system.rows.clone();
    let mut b = system.rhs.clone();

    let mut pivot_of_col: Vec<Option<usize>> = vec![None; width];
    let mut pivot_rows: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut used_row = vec![false; height];
    for col in 0..width {
        let Some(row) = (0..height).find(|&r| !used_row[r] && !a[r][col].is_zero()) else {
            continue;
        };
        used_row[row] = true;
        pivot_of_col[col] = Some(row);
        pivot_rows.push((row, col));
        let inv = a[row][col].clone().recip();
        for entry in &mut a[row] {
            *entry = &*entry * &inv;
        }
        b[row] = &b[row] * &inv;
        let pivot_row = a[row].clone();
        for r in 0..height {
            if r != row && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for (entry, pivot_entry) in a[r].iter_mut().zip(&pivot_row) {
                    let delta = &factor * pivot_entry;
                    *entry = &*entry - &delta;
                }
                let delta = &factor * &b[row];
                b[r] = &b[r] - &delta;
            }
        }
    }

    let rank = pivot_rows.len();
    let free_cols: Vec<usize> = (0..width).filter(|c| pivot_of_col[*c].is_none()).collect();

    // Particular solution: free unknowns 0, pivot unknowns read off the
    // fully reduced rows.
    let mut x = vec![Rational::zero(); width];
    for (row, col) in &pivot_rows {
        x[*col] = b[*row].clone();
    }

    // An unknown is pinned down only if it is a pivot whose reduced row
    // involves no free unknown.
    let mut undetermined: Vec<String> = Vec::new();
    for (col, pivot) in pivot_of_col.iter().enumerate() {
        let determined = match pivot {
            None => false,
            Some(row) => free_cols.iter().all(|fc| a[*row][*fc].is_zero()),
        };
        if !determined {
            undetermined.push(system.column_names[col].clone());
        }
    }

    let mut coefficients = BTreeMap::new();
    for (gen, col) in &system.gen_column {
        coefficients.insert(gen.clone(), x[*col].clone());
    }
    let mut aux = BTreeMap::new();
    for (name, col) in &system.aux_column {
        aux.insert(name.clone(), x[*col].clone());
    }

    let mut residuals = BTreeMap::new();
    let mut consistent = true;
    for i in 0..height {
        let r = system.residual_of_row(i, &x);
        consistent &= r.is_zero();
        residuals.insert(system.curve_names[i].clone(), r);
    }

    let pivot_curves = pivot_rows
        .iter()
        .map(|(row, _)| system.curve_names[*row].clone())
        .collect();

    SolveReport {
        coefficients,
        aux,
        rank,
        equation_count: height,
        consistent,
        residuals,
        undetermined,
        pivot_curves,
    }
}

impl SolveReport {
    /// Whether the named generator or aux unknown is among the undetermined
    /// ones. Tie-group columns are named by their members joined with '=',
    /// so membership is checked per component.
    pub fn is_undetermined(&self, name: &str) -> bool {
        self.undetermined
            .iter()
            .any(|col| col.split('=').any(|part| part == name))
    }
}

/// Recompute every equation's `LHS - RHS` at the report's solution; all
/// zero exactly when the report is consistent.
pub fn verify(system: &LinearSystem, report: &SolveReport) -> BTreeMap<String, Rational> {
    let x = system.solution_vector(report);
    let mut out = BTreeMap::new();
    for i in 0..system.rows.len() {
        out.insert(system.curve_names[i].clone(), system.residual_of_row(i, &x));
    }
    out
}
