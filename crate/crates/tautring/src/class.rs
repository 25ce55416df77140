//! Divisor generators and polynomial class expressions on a (product of)
//! moduli space(s).
//!
//! Generators are the psi class at a mark, the Hodge class `lambda1` (genus 1
//! only), the irreducible boundary `dirr` (genus 1 only), and separating
//! boundary divisors `DeltaSep(S)`. On genus 1 the stored subset of a
//! separating divisor is always the set of marks on the genus-0 side
//! (2 <= |S| <= n). On genus 0 the two sides are interchangeable, so the
//! stored subset is canonicalized to the one containing the space's first
//! mark (2 <= |S| <= n-2 after canonicalization).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::EngineError;
use crate::rational::Rational;
use crate::space::{Ambient, Genus, ModuliSpace};

/// A degree-1 tautological generator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    /// Cotangent class at the named mark.
    Psi(String),
    /// First Chern class of the Hodge bundle; genus 1 only.
    Lambda1,
    /// Irreducible (non-separating) boundary divisor; genus 1 only.
    DeltaIrr,
    /// Separating boundary divisor, stored by the subset described above.
    DeltaSep(BTreeSet<String>),
}

impl Generator {
    pub fn psi(label: impl Into<String>) -> Self {
        Generator::Psi(label.into())
    }

    pub fn sep<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Generator::DeltaSep(labels.into_iter().map(Into::into).collect())
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, Generator::DeltaIrr | Generator::DeltaSep(_))
    }

    /// Validate against `space` and return the canonical form.
    pub fn validated(self, space: &ModuliSpace) -> Result<Generator, EngineError> {
        match self {
            Generator::Psi(label) => {
                if !space.has_mark(&label) {
                    return Err(EngineError::UnsupportedGenerator(format!(
                        "psi({label}) on {space}: no such mark"
                    )));
                }
                Ok(Generator::Psi(label))
            }
            Generator::Lambda1 => {
                if space.genus() != Genus::One {
                    return Err(EngineError::UnsupportedGenerator(format!(
                        "lambda1 on {space}: requires genus 1"
                    )));
                }
                Ok(Generator::Lambda1)
            }
            Generator::DeltaIrr => {
                if space.genus() != Genus::One {
                    return Err(EngineError::UnsupportedGenerator(format!(
                        "dirr on {space}: requires genus 1"
                    )));
                }
                Ok(Generator::DeltaIrr)
            }
            Generator::DeltaSep(subset) => {
                for label in &subset {
                    if !space.has_mark(label) {
                        return Err(EngineError::UnsupportedGenerator(format!(
                            "d0{{{label},..}} on {space}: no such mark"
                        )));
                    }
                }
                let n = space.mark_count();
                let (min, max) = match space.genus() {
                    Genus::Zero => (2, n.saturating_sub(2)),
                    Genus::One => (2, n),
                };
                let canonical = match space.genus() {
                    Genus::Zero => canonicalize_genus0(space, subset),
                    Genus::One => subset,
                };
                if canonical.len() < min || canonical.len() > max {
                    return Err(EngineError::UnsupportedGenerator(format!(
                        "d0 subset of size {} on {space}: needs {min} <= size <= {max}",
                        canonical.len()
                    )));
                }
                Ok(Generator::DeltaSep(canonical))
            }
        }
    }

    /// Rename every mark through `f`. The result is raw; callers revalidate
    /// against the target space to restore canonical form.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Generator {
        match self {
            Generator::Psi(l) => Generator::Psi(f(l)),
            Generator::Lambda1 => Generator::Lambda1,
            Generator::DeltaIrr => Generator::DeltaIrr,
            Generator::DeltaSep(s) => Generator::DeltaSep(s.iter().map(|l| f(l)).collect()),
        }
    }
}

/// On genus 0 both sides of the node describe the same divisor; store the
/// side containing the first mark.
fn canonicalize_genus0(space: &ModuliSpace, subset: BTreeSet<String>) -> BTreeSet<String> {
    let first = &space.marks()[0];
    if subset.contains(first) {
        subset
    } else {
        space
            .marks()
            .iter()
            .filter(|m| !subset.contains(*m))
            .cloned()
            .collect()
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Psi(l) => write!(f, "psi({l})"),
            Generator::Lambda1 => write!(f, "lambda1"),
            Generator::DeltaIrr => write!(f, "dirr"),
            Generator::DeltaSep(s) => {
                let labels: Vec<&str> = s.iter().map(String::as_str).collect();
                write!(f, "d0{{{}}}", labels.join(","))
            }
        }
    }
}

/// Exponents of factor-tagged generators; the monomial support of one term.
pub type PowerMap = BTreeMap<(usize, Generator), u32>;

/// A finite rational combination of monomials in the generators, attached to
/// an ambient product of moduli spaces. Like terms are always collected and
/// zero terms pruned, so equality of expressions is equality of normal forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassExpression {
    ambient: Ambient,
    terms: BTreeMap<PowerMap, Rational>,
}

impl ClassExpression {
    pub fn zero(ambient: impl Into<Ambient>) -> Self {
        ClassExpression {
            ambient: ambient.into(),
            terms: BTreeMap::new(),
        }
    }

    /// The fundamental class (empty monomial with coefficient 1).
    pub fn one(ambient: impl Into<Ambient>) -> Self {
        let mut expr = ClassExpression::zero(ambient);
        expr.add_term(PowerMap::new(), Rational::one());
        expr
    }

    /// A single validated generator on a single space.
    pub fn generator(space: &ModuliSpace, gen: Generator) -> Result<Self, EngineError> {
        ClassExpression::monomial(space, Rational::one(), &[(gen, 1)])
    }

    /// A coefficient times a product of validated generator powers on a
    /// single space.
    pub fn monomial(
        space: &ModuliSpace,
        coeff: Rational,
        powers: &[(Generator, u32)],
    ) -> Result<Self, EngineError> {
        let mut map = PowerMap::new();
        for (gen, exp) in powers {
            if *exp == 0 {
                continue;
            }
            let canon = gen.clone().validated(space)?;
            *map.entry((0, canon)).or_insert(0) += exp;
        }
        let mut expr = ClassExpression::zero(space.clone());
        expr.add_term(map, coeff);
        Ok(expr)
    }

    /// A raw factor-tagged term on a product ambient. Generators must
    /// already be canonical for their factor; used by the pullback engine.
    pub(crate) fn raw_term(ambient: Ambient, powers: PowerMap, coeff: Rational) -> Self {
        let mut expr = ClassExpression::zero(ambient);
        expr.add_term(powers, coeff);
        expr
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn iter_terms(&self) -> impl Iterator<Item = (&PowerMap, &Rational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, powers: PowerMap, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(powers);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_same_ambient(&self, other: &ClassExpression) -> Result<(), EngineError> {
        if self.ambient != other.ambient {
            return Err(EngineError::AmbientMismatch(format!(
                "{} vs {}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &ClassExpression) -> Result<ClassExpression, EngineError> {
        self.check_same_ambient(other)?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ClassExpression) -> Result<ClassExpression, EngineError> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &ClassExpression) -> Result<ClassExpression, EngineError> {
        self.check_same_ambient(other)?;
        let mut out = ClassExpression::zero(self.ambient.clone());
        for (pa, ca) in &self.terms {
            for (pb, cb) in &other.terms {
                let mut powers = pa.clone();
                for (key, exp) in pb {
                    *powers.entry(key.clone()).or_insert(0) += exp;
                }
                out.add_term(powers, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32) -> ClassExpression {
        let mut out = ClassExpression::one(self.ambient.clone());
        for _ in 0..exp {
            out = out.mul(self).expect("same ambient");
        }
        out
    }

    pub fn scale(&self, factor: &Rational) -> ClassExpression {
        let mut out = ClassExpression::zero(self.ambient.clone());
        for (p, c) in &self.terms {
            out.add_term(p.clone(), c * factor);
        }
        out
    }

    pub fn neg(&self) -> ClassExpression {
        self.scale(&-Rational::one())
    }

    /// Total degree of one term.
    pub fn term_degree(powers: &PowerMap) -> u32 {
        powers.values().sum()
    }

    /// True when every term has the same total degree `d`.
    pub fn is_homogeneous_of_degree(&self, d: u32) -> bool {
        self.terms.keys().all(|p| Self::term_degree(p) == d)
    }

    /// Apply a mark permutation (or any relabeling bijection on the marks of
    /// a single-space ambient) and recanonicalize. `perm` maps old label ->
    /// new label and must be a bijection of the space's marks.
    pub fn relabel_marks(
        &self,
        perm: &BTreeMap<String, String>,
    ) -> Result<ClassExpression, EngineError> {
        let space = self.ambient.single().ok_or_else(|| {
            EngineError::AmbientMismatch("relabel_marks needs a single-space ambient".into())
        })?;
        let mut out = ClassExpression::zero(space.clone());
        for (powers, coeff) in &self.terms {
            let mut new_powers = PowerMap::new();
            for ((factor, gen), exp) in powers {
                let renamed = gen
                    .relabel(|l| perm.get(l).cloned().unwrap_or_else(|| l.to_owned()))
                    .validated(space)?;
                *new_powers.entry((*factor, renamed)).or_insert(0) += exp;
            }
            out.add_term(new_powers, coeff.clone());
        }
        Ok(out)
    }
}

impl fmt::Display for ClassExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let multi_factor = self.ambient.factor_count() > 1;
        let mut first = true;
        for (powers, coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut pieces: Vec<String> = Vec::new();
            if !coeff.is_one() || powers.is_empty() {
                pieces.push(coeff.to_string());
            }
            for ((factor, gen), exp) in powers {
                let name = if multi_factor {
                    format!("[{factor}]{gen}")
                } else {
                    gen.to_string()
                };
                if *exp == 1 {
                    pieces.push(name);
                } else {
                    pieces.push(format!("{name}^{exp}"));
                }
            }
            write!(f, "{}", pieces.join("*"))?;
        }
        Ok(())
    }
}
