//! Moduli spaces of stable marked curves and products of them.

use std::fmt;

use crate::error::EngineError;

/// Genus of the general fiber; only 0 and 1 are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Genus {
    Zero,
    One,
}

impl Genus {
    pub fn from_u8(g: u8) -> Result<Self, EngineError> {
        match g {
            0 => Ok(Genus::Zero),
            1 => Ok(Genus::One),
            other => Err(EngineError::UnsupportedGenus(other)),
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Genus::Zero => 0,
            Genus::One => 1,
        }
    }
}

/// The moduli space of stable genus-`g` curves with an ordered set of
/// distinct mark labels. Stability requires n >= 3 in genus 0 and n >= 1 in
/// genus 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModuliSpace {
    genus: Genus,
    marks: Vec<String>,
}

impl ModuliSpace {
    pub fn new<I, S>(genus: Genus, marks: I) -> Result<Self, EngineError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let marks: Vec<String> = marks.into_iter().map(Into::into).collect();
        for (i, m) in marks.iter().enumerate() {
            if m.is_empty() {
                return Err(EngineError::InvalidMarks("empty mark label".into()));
            }
            if marks[..i].contains(m) {
                return Err(EngineError::InvalidMarks(format!("duplicate mark {m:?}")));
            }
        }
        let min = match genus {
            Genus::Zero => 3,
            Genus::One => 1,
        };
        if marks.len() < min {
            return Err(EngineError::UnstableSpace {
                genus: genus.as_u8(),
                marks: marks.len(),
            });
        }
        Ok(ModuliSpace { genus, marks })
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn marks(&self) -> &[String] {
        &self.marks
    }

    pub fn mark_count(&self) -> usize {
        self.marks.len()
    }

    /// Complex dimension: n - 3 in genus 0, n in genus 1.
    pub fn dimension(&self) -> u32 {
        match self.genus {
            Genus::Zero => (self.marks.len() - 3) as u32,
            Genus::One => self.marks.len() as u32,
        }
    }

    pub fn mark_index(&self, label: &str) -> Option<usize> {
        self.marks.iter().position(|m| m == label)
    }

    pub fn has_mark(&self, label: &str) -> bool {
        self.mark_index(label).is_some()
    }
}

impl fmt::Display for ModuliSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mbar({}; {})", self.genus.as_u8(), self.marks.join(","))
    }
}

/// An ordered product of moduli spaces. Boundary restriction replaces one
/// factor by the one or two factors of its gluing cover, so intermediate
/// integrands live on products even when the original ambient is a single
/// space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ambient {
    factors: Vec<ModuliSpace>,
}

impl Ambient {
    pub fn product(factors: Vec<ModuliSpace>) -> Self {
        assert!(!factors.is_empty(), "ambient needs at least one factor");
        Ambient { factors }
    }

    pub fn factors(&self) -> &[ModuliSpace] {
        &self.factors
    }

    pub fn factor(&self, idx: usize) -> &ModuliSpace {
        &self.factors[idx]
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    /// The single factor, when this ambient is not a proper product.
    pub fn single(&self) -> Option<&ModuliSpace> {
        if self.factors.len() == 1 {
            Some(&self.factors[0])
        } else {
            None
        }
    }

    pub fn total_dimension(&self) -> u32 {
        self.factors.iter().map(ModuliSpace::dimension).sum()
    }
}

impl From<ModuliSpace> for Ambient {
    fn from(space: ModuliSpace) -> Self {
        Ambient::product(vec![space])
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(" x "))
    }
}
