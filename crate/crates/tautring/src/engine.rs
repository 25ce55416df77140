//! Exact evaluation of top intersection numbers.
//!
//! Strategy: a monomial with a boundary factor is restricted to that boundary
//! divisor through its gluing cover; the remaining factors pull back by the
//! rules below, and the integral continues on the cover (a product of
//! smaller spaces), picking up the cover's multiplicity factor. A monomial
//! with no boundary factor is a product over the ambient factors of pure
//! psi/lambda integrals, each evaluated in closed form or by the
//! string/dilaton recursion. Every restriction drops the total dimension by
//! exactly one, so the recursion terminates.
//!
//! Pullback rules through a gluing cover:
//!
//! * psi at a mark restricts to psi at the same mark on whichever factor
//!   carries it.
//! * Through a separating cover (genus-0 side with marks `S + node`, times
//!   the complement side), `lambda1` and `dirr` restrict to the complement
//!   (genus-1) factor. A separating divisor `d0{T}` restricts to: the excess
//!   class `-psi(node) - psi(node')` when T is the divisor being restricted;
//!   a separating divisor of the factor that wholly contains one side of T
//!   when the two node partitions are nested; and zero when they cross.
//! * Through the irreducible cover (genus 0, two extra marks from
//!   normalizing the non-separating node, multiplicity 1/2), `lambda1`
//!   restricts to zero, `d0{T}` to the single divisor separating T from
//!   everything else, and `dirr` to its excess class
//!   `-psi(n') - psi(n'')` plus the sum of all separating divisors of the
//!   cover that split the two new marks apart.

use std::collections::BTreeMap;

use crate::class::{ClassExpression, Generator, PowerMap};
use crate::error::EngineError;
use crate::rational::{factorial, Rational};
use crate::space::{Ambient, Genus, ModuliSpace};

/// Base value `<tau_1>_1 = 1/24`: the psi integral on the space of 1-marked
/// genus-1 curves. Anchor of the genus-1 string/dilaton recursion.
pub fn tau1_base_genus1() -> Rational {
    Rational::new(1, 24)
}

/// Base value of the Hodge-class integral on the space of 1-marked genus-1
/// curves, `1/24`. Anchor of the lambda-times-psi recursion.
pub fn lambda1_base_genus1() -> Rational {
    Rational::new(1, 24)
}

/// How [`integrate`] treats monomials whose degree differs from the ambient
/// dimension: `Strict` raises [`EngineError::DegreeMismatch`], `Lenient`
/// drops them as zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreeMode {
    #[default]
    Strict,
    Lenient,
}

/// Which kind of boundary divisor a gluing cover normalizes.
#[derive(Debug, Clone, PartialEq, Eq)]
enum CoverKind {
    /// Non-separating node; the two new marks are its branches.
    Irr { prime: String, dprime: String },
    /// Separating node; `subset` is the stored side of the divisor, `dot`
    /// the node mark on that side, `star` the node mark on the complement.
    Sep {
        subset: std::collections::BTreeSet<String>,
        dot: String,
        star: String,
    },
}

/// The gluing cover of one boundary divisor inside one factor of an ambient
/// product, together with the data needed to pull classes back to it.
#[derive(Debug, Clone)]
pub struct GluingCover {
    source: Ambient,
    factor_idx: usize,
    boundary: Generator,
    kind: CoverKind,
    cover: Ambient,
    replaced_by: usize,
    multiplicity: Rational,
}

impl GluingCover {
    /// Cover of `boundary` (a validated boundary generator) inside factor
    /// `factor_idx` of `source`. `fresh` feeds the node-mark naming scheme;
    /// each new node bumps it, so nested restrictions never collide.
    pub fn new(
        source: &Ambient,
        factor_idx: usize,
        boundary: &Generator,
        fresh: &mut u64,
    ) -> Result<Self, EngineError> {
        let space = source.factor(factor_idx);
        let boundary = boundary.clone().validated(space)?;
        let taken: Vec<&str> = source
            .factors()
            .iter()
            .flat_map(|f| f.marks().iter().map(String::as_str))
            .collect();
        let mut fresh_label = |base: &str| loop {
            *fresh += 1;
            let candidate = format!("{base}{fresh}");
            if !taken.contains(&candidate.as_str()) {
                return candidate;
            }
        };

        let (kind, new_factors, multiplicity) = match &boundary {
            Generator::DeltaIrr => {
                let prime = fresh_label("•′");
                let dprime = fresh_label("•″");
                let mut marks: Vec<String> = space.marks().to_vec();
                marks.push(prime.clone());
                marks.push(dprime.clone());
                let cover_space = ModuliSpace::new(Genus::Zero, marks)?;
                (
                    CoverKind::Irr { prime, dprime },
                    vec![cover_space],
                    Rational::new(1, 2),
                )
            }
            Generator::DeltaSep(subset) => {
                let dot = fresh_label("•");
                let star = fresh_label("⋆");
                let mut side0: Vec<String> = space
                    .marks()
                    .iter()
                    .filter(|m| subset.contains(*m))
                    .cloned()
                    .collect();
                side0.push(dot.clone());
                let mut side1: Vec<String> = space
                    .marks()
                    .iter()
                    .filter(|m| !subset.contains(*m))
                    .cloned()
                    .collect();
                side1.push(star.clone());
                let g0 = ModuliSpace::new(Genus::Zero, side0)?;
                let g1 = ModuliSpace::new(space.genus(), side1)?;
                (
                    CoverKind::Sep {
                        subset: subset.clone(),
                        dot,
                        star,
                    },
                    vec![g0, g1],
                    Rational::one(),
                )
            }
            other => {
                return Err(EngineError::UnsupportedGenerator(format!(
                    "{other} is not a boundary divisor"
                )))
            }
        };

        let replaced_by = new_factors.len();
        let mut factors: Vec<ModuliSpace> = Vec::with_capacity(source.factor_count() + 1);
        factors.extend_from_slice(&source.factors()[..factor_idx]);
        factors.extend(new_factors);
        factors.extend_from_slice(&source.factors()[factor_idx + 1..]);

        Ok(GluingCover {
            source: source.clone(),
            factor_idx,
            boundary,
            kind,
            cover: Ambient::product(factors),
            replaced_by,
            multiplicity,
        })
    }

    pub fn source(&self) -> &Ambient {
        &self.source
    }

    pub fn boundary(&self) -> &Generator {
        &self.boundary
    }

    /// The ambient the pullback lands on.
    pub fn cover_ambient(&self) -> &Ambient {
        &self.cover
    }

    /// 1/2 for the irreducible cover (the two node branches can be swapped),
    /// 1 for separating covers.
    pub fn multiplicity(&self) -> &Rational {
        &self.multiplicity
    }

    fn shifted(&self, factor: usize) -> usize {
        if factor < self.factor_idx {
            factor
        } else {
            factor + self.replaced_by - 1
        }
    }

    /// Pull one factor-tagged generator of the source ambient back to the
    /// cover ambient.
    pub fn pullback_generator(
        &self,
        factor: usize,
        gen: &Generator,
    ) -> Result<ClassExpression, EngineError> {
        if factor != self.factor_idx {
            let mut powers = PowerMap::new();
            powers.insert((self.shifted(factor), gen.clone()), 1);
            return Ok(ClassExpression::raw_term(
                self.cover.clone(),
                powers,
                Rational::one(),
            ));
        }
        match &self.kind {
            CoverKind::Irr { prime, dprime } => self.pullback_into_irr(gen, prime, dprime),
            CoverKind::Sep { subset, dot, star } => self.pullback_into_sep(gen, subset, dot, star),
        }
    }

    fn single_cover_generator(
        &self,
        cover_factor: usize,
        gen: Generator,
    ) -> Result<ClassExpression, EngineError> {
        let idx = self.factor_idx + cover_factor;
        let canon = gen.validated(self.cover.factor(idx))?;
        let mut powers = PowerMap::new();
        powers.insert((idx, canon), 1);
        Ok(ClassExpression::raw_term(
            self.cover.clone(),
            powers,
            Rational::one(),
        ))
    }

    /// The excess class `-psi(a_mark) - psi(b_mark)` for restricting a
    /// boundary divisor to itself: the first-order deformations of the node.
    fn excess(&self, a: (usize, &str), b: (usize, &str)) -> ClassExpression {
        let mut expr = ClassExpression::zero(self.cover.clone());
        for (cover_factor, label) in [a, b] {
            let mut powers = PowerMap::new();
            powers.insert((self.factor_idx + cover_factor, Generator::psi(label)), 1);
            expr = expr
                .add(&ClassExpression::raw_term(
                    self.cover.clone(),
                    powers,
                    -Rational::one(),
                ))
                .expect("same ambient");
        }
        expr
    }

    fn pullback_into_irr(
        &self,
        gen: &Generator,
        prime: &str,
        dprime: &str,
    ) -> Result<ClassExpression, EngineError> {
        let marks = self.source.factor(self.factor_idx).marks();
        match gen {
            Generator::Psi(label) => self.single_cover_generator(0, Generator::psi(label)),
            Generator::Lambda1 => Ok(ClassExpression::zero(self.cover.clone())),
            Generator::DeltaSep(t) => {
                // The only cover divisor gluing to a separating node with
                // genus-0 side exactly T: the bubble carrying T alone. A
                // bubble carrying T plus both node branches glues to a curve
                // whose genus-0 side is the complement of T, so it belongs
                // to the pullback of that divisor instead.
                self.single_cover_generator(0, Generator::DeltaSep(t.clone()))
            }
            Generator::DeltaIrr => {
                let mut expr = self.excess((0, prime), (0, dprime));
                // Cover divisors separating the two node branches glue to
                // curves with a second non-separating node.
                let n = marks.len();
                for bits in 1..((1u64 << n) - 1) {
                    let mut side: std::collections::BTreeSet<String> = marks
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| bits & (1 << i) != 0)
                        .map(|(_, m)| m.clone())
                        .collect();
                    side.insert(prime.to_owned());
                    expr = expr
                        .add(&self.single_cover_generator(0, Generator::DeltaSep(side))?)
                        .expect("same ambient");
                }
                Ok(expr)
            }
        }
    }

    fn pullback_into_sep(
        &self,
        gen: &Generator,
        subset: &std::collections::BTreeSet<String>,
        dot: &str,
        star: &str,
    ) -> Result<ClassExpression, EngineError> {
        let space = self.source.factor(self.factor_idx);
        match gen {
            Generator::Psi(label) => {
                let side = usize::from(!subset.contains(label));
                self.single_cover_generator(side, Generator::psi(label))
            }
            // The Hodge bundle and the non-separating locus live entirely on
            // the complement (genus-1) side.
            Generator::Lambda1 => self.single_cover_generator(1, Generator::Lambda1),
            Generator::DeltaIrr => self.single_cover_generator(1, Generator::DeltaIrr),
            Generator::DeltaSep(t) => {
                if t == subset {
                    return Ok(self.excess((0, dot), (1, star)));
                }
                match space.genus() {
                    Genus::One => {
                        // Stored subsets are genus-0 sides; compare directly.
                        if t.is_subset(subset) {
                            self.single_cover_generator(0, Generator::DeltaSep(t.clone()))
                        } else if subset.is_subset(t) {
                            let mut rest: std::collections::BTreeSet<String> =
                                t.difference(subset).cloned().collect();
                            rest.insert(star.to_owned());
                            self.single_cover_generator(1, Generator::DeltaSep(rest))
                        } else if t.is_disjoint(subset) {
                            self.single_cover_generator(1, Generator::DeltaSep(t.clone()))
                        } else {
                            Ok(ClassExpression::zero(self.cover.clone()))
                        }
                    }
                    Genus::Zero => {
                        // Either side of T may nest into either side of the
                        // restricted partition; crossing partitions meet
                        // nowhere. Both subsets are canonical (contain the
                        // space's first mark), so T never fits inside the
                        // complement side directly -- only via its own
                        // complement.
                        let t_comp: std::collections::BTreeSet<String> = space
                            .marks()
                            .iter()
                            .filter(|m| !t.contains(*m))
                            .cloned()
                            .collect();
                        if t.is_subset(subset) {
                            self.single_cover_generator(0, Generator::DeltaSep(t.clone()))
                        } else if t_comp.is_subset(subset) {
                            self.single_cover_generator(0, Generator::DeltaSep(t_comp))
                        } else if t_comp.iter().all(|m| !subset.contains(m)) {
                            self.single_cover_generator(1, Generator::DeltaSep(t_comp))
                        } else {
                            Ok(ClassExpression::zero(self.cover.clone()))
                        }
                    }
                }
            }
        }
    }

    /// Pull a whole expression on the source ambient back to the cover.
    pub fn pullback(&self, expr: &ClassExpression) -> Result<ClassExpression, EngineError> {
        if expr.ambient() != &self.source {
            return Err(EngineError::AmbientMismatch(format!(
                "pullback of expression on {} through cover of {}",
                expr.ambient(),
                self.source
            )));
        }
        let mut cache: BTreeMap<(usize, Generator), ClassExpression> = BTreeMap::new();
        let mut out = ClassExpression::zero(self.cover.clone());
        for (powers, coeff) in expr.iter_terms() {
            let mut term = ClassExpression::one(self.cover.clone()).scale(coeff);
            for ((factor, gen), exp) in powers {
                let key = (*factor, gen.clone());
                if !cache.contains_key(&key) {
                    let mapped = self.pullback_generator(*factor, gen)?;
                    cache.insert(key.clone(), mapped);
                }
                term = term.mul(&cache[&key].pow(*exp))?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }
}

/// Restrict `expr` to the boundary divisor `boundary` of `space`: returns
/// the gluing cover and the pullback of `expr` to it. `expr` should not
/// contain the copy of `boundary` being restricted; further copies it does
/// contain become excess terms.
pub fn boundary_pullback(
    space: &ModuliSpace,
    boundary: &Generator,
    expr: &ClassExpression,
) -> Result<(GluingCover, ClassExpression), EngineError> {
    if expr.ambient().single() != Some(space) {
        return Err(EngineError::AmbientMismatch(format!(
            "expression lives on {}, not on {}",
            expr.ambient(),
            space
        )));
    }
    let mut fresh = 0;
    let cover = GluingCover::new(expr.ambient(), 0, boundary, &mut fresh)?;
    let pulled = cover.pullback(expr)?;
    Ok((cover, pulled))
}

/// Top intersection number of `expr` against the fundamental class of its
/// ambient. Exact; see [`DegreeMode`] for the degree policy.
pub fn integrate(expr: &ClassExpression, mode: DegreeMode) -> Result<Rational, EngineError> {
    let dim = expr.ambient().total_dimension();
    let mut fresh = 0u64;
    let mut total = Rational::zero();
    for (powers, coeff) in expr.iter_terms() {
        let degree = ClassExpression::term_degree(powers);
        if degree != dim {
            match mode {
                DegreeMode::Strict => {
                    return Err(EngineError::DegreeMismatch {
                        degree,
                        dimension: dim,
                    })
                }
                DegreeMode::Lenient => continue,
            }
        }
        total += coeff * &integrate_term(expr.ambient(), powers, &mut fresh)?;
    }
    Ok(total)
}

fn integrate_term(
    ambient: &Ambient,
    powers: &PowerMap,
    fresh: &mut u64,
) -> Result<Rational, EngineError> {
    let boundary_key = powers.keys().find(|(_, gen)| gen.is_boundary()).cloned();
    match boundary_key {
        None => {
            let mut product = Rational::one();
            for (idx, space) in ambient.factors().iter().enumerate() {
                let factor_powers = powers
                    .iter()
                    .filter(|((f, _), _)| *f == idx)
                    .map(|((_, gen), exp)| (gen, *exp));
                product *= &pure_factor_integral(space, factor_powers);
                if product.is_zero() {
                    return Ok(product);
                }
            }
            Ok(product)
        }
        Some((factor_idx, boundary)) => {
            let cover = GluingCover::new(ambient, factor_idx, &boundary, fresh)?;
            let mut rest = powers.clone();
            match rest.get_mut(&(factor_idx, boundary.clone())) {
                Some(exp) if *exp > 1 => *exp -= 1,
                _ => {
                    rest.remove(&(factor_idx, boundary));
                }
            }
            let pulled = cover.pullback(&ClassExpression::raw_term(
                ambient.clone(),
                rest,
                Rational::one(),
            ))?;
            let mut sum = Rational::zero();
            for (p, c) in pulled.iter_terms() {
                sum += c * &integrate_term(cover.cover_ambient(), p, fresh)?;
            }
            Ok(cover.multiplicity() * &sum)
        }
    }
}

/// Integral over one factor of a boundary-free monomial: psi exponents and
/// a lambda1 power. Returns 0 on any degree mismatch (legitimate zeros of
/// the product rule).
fn pure_factor_integral<'a>(
    space: &ModuliSpace,
    powers: impl Iterator<Item = (&'a Generator, u32)>,
) -> Rational {
    let mut psi: BTreeMap<&str, u32> = BTreeMap::new();
    let mut lambda = 0u32;
    for (gen, exp) in powers {
        match gen {
            Generator::Psi(label) => *psi.entry(label).or_insert(0) += exp,
            Generator::Lambda1 => lambda += exp,
            other => unreachable!("boundary generator {other} in pure evaluation"),
        }
    }
    let exps: Vec<u32> = space
        .marks()
        .iter()
        .map(|m| psi.get(m.as_str()).copied().unwrap_or(0))
        .collect();
    let total: u32 = exps.iter().sum::<u32>() + lambda;
    if total != space.dimension() {
        return Rational::zero();
    }
    match space.genus() {
        Genus::Zero => {
            debug_assert_eq!(lambda, 0, "lambda1 cannot exist on genus 0");
            psi_value_genus0(space.mark_count(), &exps)
        }
        Genus::One => match lambda {
            0 => tau_value_genus1(&exps),
            // In genus 1 the Hodge bundle has rank 1 and c(E)c(E^d) = 1
            // forces lambda1^2 = 0.
            1 => lambda_tau_value_genus1(&exps),
            _ => Rational::zero(),
        },
    }
}

/// Closed form on genus 0: with sum of exponents equal to n-3 the value is
/// (n-3)! / prod(a_i!); any other total gives 0.
fn psi_value_genus0(n: usize, exps: &[u32]) -> Rational {
    let total: u32 = exps.iter().sum();
    if n < 3 || total != (n - 3) as u32 {
        return Rational::zero();
    }
    let mut value = factorial((n - 3) as u64);
    for &a in exps {
        if a > 1 {
            value = value / factorial(a as u64);
        }
    }
    value
}

fn sorted_desc(exps: &[u32]) -> Vec<u32> {
    let mut v = exps.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// Pure psi integral on genus 1 (sum of exponents = n), by the string and
/// dilaton equations down to the 1-mark base value 1/24.
fn tau_value_genus1(exps: &[u32]) -> Rational {
    fn rec(exps: Vec<u32>, memo: &mut BTreeMap<Vec<u32>, Rational>) -> Rational {
        if let Some(v) = memo.get(&exps) {
            return v.clone();
        }
        let n = exps.len();
        let value = if n == 1 {
            if exps[0] == 1 {
                tau1_base_genus1()
            } else {
                Rational::zero()
            }
        } else if exps[n - 1] == 0 {
            // String equation: drop one exponent-0 mark, decrement each
            // remaining positive exponent in turn.
            let without = &exps[..n - 1];
            let mut acc = Rational::zero();
            for j in 0..without.len() {
                if without[j] > 0 {
                    let mut next = without.to_vec();
                    next[j] -= 1;
                    acc += rec(sorted_desc(&next), memo);
                }
            }
            acc
        } else {
            // No exponent-0 mark with total degree n forces all exponents 1.
            // Dilaton equation: drop one exponent-1 mark, scale by n-1.
            Rational::from((n - 1) as i64) * rec(exps[..n - 1].to_vec(), memo)
        };
        memo.insert(exps, value.clone());
        value
    }
    rec(sorted_desc(exps), &mut BTreeMap::new())
}

/// lambda1 times a psi monomial on genus 1 (sum of exponents = n-1), by the
/// string equation down to the 1-mark base value 1/24.
fn lambda_tau_value_genus1(exps: &[u32]) -> Rational {
    fn rec(exps: Vec<u32>, memo: &mut BTreeMap<Vec<u32>, Rational>) -> Rational {
        if let Some(v) = memo.get(&exps) {
            return v.clone();
        }
        let n = exps.len();
        let value = if n == 1 {
            if exps[0] == 0 {
                lambda1_base_genus1()
            } else {
                Rational::zero()
            }
        } else if exps[n - 1] == 0 {
            let without = &exps[..n - 1];
            let mut acc = Rational::zero();
            for j in 0..without.len() {
                if without[j] > 0 {
                    let mut next = without.to_vec();
                    next[j] -= 1;
                    acc += rec(sorted_desc(&next), memo);
                }
            }
            acc
        } else {
            // Total degree n-1 over n marks always leaves an exponent-0 mark.
            Rational::zero()
        };
        memo.insert(exps, value.clone());
        value
    }
    rec(sorted_desc(exps), &mut BTreeMap::new())
}

/// Pure psi integral on a genus-0 space, by the closed formula
/// (n-3)! / prod(a_i!). Strict: the exponents must sum to n-3.
pub fn psi_integral_genus0(
    space: &ModuliSpace,
    exponents: &BTreeMap<String, u32>,
) -> Result<Rational, EngineError> {
    if space.genus() != Genus::Zero {
        return Err(EngineError::UnsupportedGenerator(format!(
            "psi_integral_genus0 on {space}"
        )));
    }
    let exps = collect_exponents(space, exponents)?;
    let total: u32 = exps.iter().sum();
    if total != space.dimension() {
        return Err(EngineError::DegreeMismatch {
            degree: total,
            dimension: space.dimension(),
        });
    }
    Ok(psi_value_genus0(space.mark_count(), &exps))
}

/// Pure psi integral on a genus-1 space, by the string/dilaton recursion.
/// Strict: the exponents must sum to n.
pub fn descendent_genus1(
    space: &ModuliSpace,
    exponents: &BTreeMap<String, u32>,
) -> Result<Rational, EngineError> {
    if space.genus() != Genus::One {
        return Err(EngineError::UnsupportedGenerator(format!(
            "descendent_genus1 on {space}"
        )));
    }
    let exps = collect_exponents(space, exponents)?;
    let total: u32 = exps.iter().sum();
    if total != space.dimension() {
        return Err(EngineError::DegreeMismatch {
            degree: total,
            dimension: space.dimension(),
        });
    }
    Ok(tau_value_genus1(&exps))
}

fn collect_exponents(
    space: &ModuliSpace,
    exponents: &BTreeMap<String, u32>,
) -> Result<Vec<u32>, EngineError> {
    for label in exponents.keys() {
        if !space.has_mark(label) {
            return Err(EngineError::UnsupportedGenerator(format!(
                "psi exponent at unknown mark {label:?} on {space}"
            )));
        }
    }
    Ok(space
        .marks()
        .iter()
        .map(|m| exponents.get(m).copied().unwrap_or(0))
        .collect())
}

/// Replace every `lambda1` factor by `(1/12) * dirr`, the genus-1 Picard
/// relation. This is the engine's second, independent evaluation path for
/// lambda monomials; the first carries `lambda1` to genus-1 factors of the
/// covers and bottoms out in the 1/24 base values.
pub fn substitute_lambda(expr: &ClassExpression) -> Result<ClassExpression, EngineError> {
    let space = expr
        .ambient()
        .single()
        .ok_or_else(|| {
            EngineError::AmbientMismatch("substitute_lambda needs a single-space ambient".into())
        })?
        .clone();
    if space.genus() != Genus::One {
        return Err(EngineError::UnsupportedGenerator(format!(
            "substitute_lambda on {space}: requires genus 1"
        )));
    }
    let twelfth = Rational::new(1, 12);
    let mut out = ClassExpression::zero(space.clone());
    for (powers, coeff) in expr.iter_terms() {
        let mut new_powers = powers.clone();
        let e = new_powers.remove(&(0, Generator::Lambda1)).unwrap_or(0);
        if e > 0 {
            *new_powers.entry((0, Generator::DeltaIrr)).or_insert(0) += e;
        }
        let term =
            ClassExpression::raw_term(space.clone().into(), new_powers, coeff * &twelfth.pow(e));
        out = out.add(&term)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::Generator as G;

    fn space(genus: Genus, marks: &[&str]) -> ModuliSpace {
        ModuliSpace::new(genus, marks.iter().copied()).unwrap()
    }

    fn mono(space: &ModuliSpace, powers: &[(G, u32)]) -> ClassExpression {
        ClassExpression::monomial(space, Rational::one(), powers).unwrap()
    }

    fn value(space: &ModuliSpace, powers: &[(G, u32)]) -> Rational {
        integrate(&mono(space, powers), DegreeMode::Strict).unwrap()
    }

    #[test]
    fn genus0_closed_formula() {
        let m05 = space(Genus::Zero, &["1", "2", "3", "4", "5"]);
        assert_eq!(
            value(&m05, &[(G::psi("1"), 1), (G::psi("2"), 1)]),
            Rational::from(2)
        );
        assert_eq!(value(&m05, &[(G::psi("1"), 2)]), Rational::one());
        let m03 = space(Genus::Zero, &["1", "2", "3"]);
        assert_eq!(value(&m03, &[]), Rational::one());
        let m06 = space(Genus::Zero, &["1", "2", "3", "4", "5", "6"]);
        assert_eq!(
            value(
                &m06,
                &[(G::psi("1"), 1), (G::psi("2"), 1), (G::psi("3"), 1)]
            ),
            Rational::from(6)
        );
        assert_eq!(value(&m06, &[(G::psi("1"), 3)]), Rational::one());
    }

    #[test]
    fn strict_rejects_lenient_drops_degree_mismatch() {
        let m13 = space(Genus::One, &["p1", "p2", "p3"]);
        let expr = mono(&m13, &[(G::psi("p1"), 1), (G::psi("p2"), 1)]);
        assert!(matches!(
            integrate(&expr, DegreeMode::Strict),
            Err(EngineError::DegreeMismatch {
                degree: 2,
                dimension: 3
            })
        ));
        assert_eq!(
            integrate(&expr, DegreeMode::Lenient).unwrap(),
            Rational::zero()
        );
    }

    #[test]
    fn one_mark_genus1_bases() {
        let m11 = space(Genus::One, &["p"]);
        assert_eq!(value(&m11, &[(G::psi("p"), 1)]), Rational::new(1, 24));
        assert_eq!(value(&m11, &[(G::Lambda1, 1)]), Rational::new(1, 24));
        assert_eq!(value(&m11, &[(G::DeltaIrr, 1)]), Rational::new(1, 2));
    }

    #[test]
    fn genus1_psi_cube_by_dilaton() {
        let m13 = space(Genus::One, &["p1", "p2", "p3"]);
        assert_eq!(
            value(
                &m13,
                &[(G::psi("p1"), 1), (G::psi("p2"), 1), (G::psi("p3"), 1)]
            ),
            Rational::new(1, 12)
        );
    }

    #[test]
    fn descendent_examples() {
        let m11 = space(Genus::One, &["p"]);
        let exp = |pairs: &[(&str, u32)]| -> BTreeMap<String, u32> {
            pairs.iter().map(|(m, e)| (m.to_string(), *e)).collect()
        };
        assert_eq!(
            descendent_genus1(&m11, &exp(&[("p", 1)])).unwrap(),
            Rational::new(1, 24)
        );
        let m12 = space(Genus::One, &["p1", "p2"]);
        assert_eq!(
            descendent_genus1(&m12, &exp(&[("p1", 1), ("p2", 1)])).unwrap(),
            Rational::new(1, 24)
        );
        let m13 = space(Genus::One, &["p1", "p2", "p3"]);
        assert_eq!(
            descendent_genus1(&m13, &exp(&[("p1", 1), ("p2", 1), ("p3", 1)])).unwrap(),
            Rational::new(1, 12)
        );
        assert_eq!(
            descendent_genus1(&m13, &exp(&[("p1", 3)])).unwrap(),
            Rational::new(1, 24)
        );
        assert_eq!(
            descendent_genus1(&m13, &exp(&[("p1", 2), ("p2", 1)])).unwrap(),
            Rational::new(1, 12)
        );
        assert!(matches!(
            descendent_genus1(&m13, &exp(&[("p1", 1)])),
            Err(EngineError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn lambda_times_psi_follows_string_recursion() {
        // <lambda1 psi^a>_1 = (n-1)!/(24 * prod a_i!) solves the string
        // recursion from the 1-mark base; spot-check against it.
        let m13 = space(Genus::One, &["p1", "p2", "p3"]);
        assert_eq!(
            value(&m13, &[(G::Lambda1, 1), (G::psi("p1"), 2)]),
            Rational::new(1, 24)
        );
        assert_eq!(
            value(
                &m13,
                &[(G::Lambda1, 1), (G::psi("p1"), 1), (G::psi("p2"), 1)]
            ),
            Rational::new(1, 12)
        );
    }

    #[test]
    fn lambda_square_vanishes_on_both_paths() {
        let m13 = space(Genus::One, &["p1", "p2", "p3"]);
        for extra in [
            G::psi("p1"),
            G::DeltaIrr,
            G::sep(["p2", "p3"]),
            G::sep(["p1", "p2", "p3"]),
        ] {
            let direct = mono(&m13, &[(G::Lambda1, 2), (extra.clone(), 1)]);
            assert_eq!(
                integrate(&direct, DegreeMode::Strict).unwrap(),
                Rational::zero(),
                "direct path, extra factor {extra}"
            );
            let substituted = substitute_lambda(&direct).unwrap();
            assert_eq!(
                integrate(&substituted, DegreeMode::Strict).unwrap(),
                Rational::zero(),
                "substitution path, extra factor {extra}"
            );
        }
    }

    #[test]
    fn pullback_kills_lambda_through_irr() {
        let m12 = space(Genus::One, &["p1", "p2"]);
        let lambda = ClassExpression::generator(&m12, G::Lambda1).unwrap();
        let (_, pulled) = boundary_pullback(&m12, &G::DeltaIrr, &lambda).unwrap();
        assert!(pulled.is_zero());
    }

    #[test]
    fn pullback_sends_psi_to_its_factor() {
        let m13 = space(Genus::One, &["p1", "p2", "p3"]);
        let psi1 = ClassExpression::generator(&m13, G::psi("p1")).unwrap();
        let (cover, pulled) = boundary_pullback(&m13, &G::sep(["p2", "p3"]), &psi1).unwrap();
        assert_eq!(cover.cover_ambient().factor_count(), 2);
        // p1 lies on the complement (genus-1) factor.
        let (powers, coeff) = pulled.iter_terms().next().unwrap();
        assert_eq!(pulled.term_count(), 1);
        assert!(coeff.is_one());
        assert_eq!(powers.keys().next().unwrap(), &(1usize, G::psi("p1")));
    }

    #[test]
    fn dirr_self_restriction_integrates_to_zero() {
        let m12 = space(Genus::One, &["p1", "p2"]);
        let dirr = ClassExpression::generator(&m12, G::DeltaIrr).unwrap();
        let (cover, pulled) = boundary_pullback(&m12, &G::DeltaIrr, &dirr).unwrap();
        // -psi -psi plus the two divisors separating the node branches.
        assert_eq!(pulled.term_count(), 4);
        let total = cover.multiplicity() * &integrate(&pulled, DegreeMode::Strict).unwrap();
        assert_eq!(total, Rational::zero());
    }

    #[test]
    fn mixed_boundary_monomials_on_three_marks() {
        let m13 = space(Genus::One, &["p1", "p2", "p3"]);
        assert_eq!(
            value(
                &m13,
                &[(G::psi("p1"), 1), (G::psi("p2"), 1), (G::DeltaIrr, 1)]
            ),
            Rational::one()
        );
        assert_eq!(
            value(&m13, &[(G::psi("p1"), 2), (G::DeltaIrr, 1)]),
            Rational::new(1, 2)
        );
        assert_eq!(
            value(
                &m13,
                &[
                    (G::Lambda1, 1),
                    (G::psi("p1"), 1),
                    (G::sep(["p2", "p3"]), 1)
                ]
            ),
            Rational::new(1, 24)
        );
        assert_eq!(
            value(
                &m13,
                &[
                    (G::Lambda1, 1),
                    (G::psi("p1"), 1),
                    (G::sep(["p1", "p2", "p3"]), 1)
                ]
            ),
            Rational::new(1, 24)
        );
    }

    #[test]
    fn restriction_order_is_immaterial_on_larger_spaces() {
        // Guards the single-component pullback of separating divisors
        // through the irreducible cover: restricting dirr first must agree
        // with restricting the separating divisor first.
        let m14 = space(Genus::One, &["p1", "p2", "p3", "p4"]);
        let cases: Vec<(Vec<(G, u32)>, Rational)> = vec![
            (
                vec![
                    (G::DeltaIrr, 1),
                    (G::sep(["p1", "p2"]), 1),
                    (G::psi("p1"), 1),
                    (G::psi("p2"), 1),
                ],
                Rational::zero(),
            ),
            (
                vec![
                    (G::DeltaIrr, 1),
                    (G::sep(["p1", "p2"]), 1),
                    (G::sep(["p1", "p2", "p3"]), 1),
                    (G::psi("p4"), 1),
                ],
                Rational::new(1, 2),
            ),
        ];
        for (powers, expected) in cases {
            let direct = value(&m14, &powers);
            assert_eq!(direct, expected, "monomial {powers:?}");
            // Independent route: substitute dirr = 12 lambda1 the other way
            // around, i.e. compare against 12 * the lambda version.
            let lambda_version: Vec<(G, u32)> = powers
                .iter()
                .map(|(g, e)| {
                    if *g == G::DeltaIrr {
                        (G::Lambda1, *e)
                    } else {
                        (g.clone(), *e)
                    }
                })
                .collect();
            let via_lambda = Rational::from(12) * value(&m14, &lambda_version);
            assert_eq!(direct, via_lambda, "Picard relation on {powers:?}");
        }
    }

    #[test]
    fn substitute_lambda_rewrites_powers() {
        let m13 = space(Genus::One, &["p1", "p2", "p3"]);
        let expr = mono(&m13, &[(G::Lambda1, 1), (G::psi("p1"), 1)]);
        let substituted = substitute_lambda(&expr).unwrap();
        let expected = ClassExpression::monomial(
            &m13,
            Rational::new(1, 12),
            &[(G::DeltaIrr, 1), (G::psi("p1"), 1)],
        )
        .unwrap();
        assert_eq!(substituted, expected);
    }

    #[test]
    fn lambda_substitution_consistency_on_a_sample() {
        let m13 = space(Genus::One, &["p1", "p2", "p3"]);
        let samples: Vec<Vec<(G, u32)>> = vec![
            vec![(G::psi("p1"), 1), (G::psi("p2"), 1)],
            vec![(G::sep(["p2", "p3"]), 2)],
            vec![(G::sep(["p1", "p2", "p3"]), 1), (G::sep(["p2", "p3"]), 1)],
            vec![(G::DeltaIrr, 1), (G::psi("p3"), 1)],
        ];
        for m in samples {
            let mut with_lambda = m.clone();
            with_lambda.push((G::Lambda1, 1));
            let lhs = value(&m13, &with_lambda);
            let mut with_dirr = m.clone();
            with_dirr.push((G::DeltaIrr, 1));
            let rhs = Rational::new(1, 12) * value(&m13, &with_dirr);
            assert_eq!(lhs, rhs, "monomial {m:?}");
        }
    }
}
