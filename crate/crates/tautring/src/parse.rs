//! Surface syntax for class monomials.
//!
//! ```text
//! expr := term ('*' term)*
//! term := gen ('^' posint)?
//! gen  := 'psi' INT | 'lambda1' | 'dirr' | 'd0{' INT (',' INT)* '}'
//! ```
//!
//! Whitespace is insignificant. The integers are 1-based positions into the
//! mark list of the target space (`psi1` is the first mark), so the same
//! source text works against any space with enough marks.

use std::fmt;

use crate::class::Generator;
use crate::error::EngineError;
use crate::space::ModuliSpace;

/// A grammar-level generator: mark references are positional, not yet
/// resolved against a space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprGen {
    Psi(u32),
    Lambda1,
    DeltaIrr,
    Sep(Vec<u32>),
}

/// A parsed monomial: generator powers in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprMonomial {
    pub factors: Vec<(ExprGen, u32)>,
}

/// A parse failure: 0-based character position and the set of inputs that
/// would have been accepted there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub position: usize,
    pub expected: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at position {}: expected {}",
            self.position, self.expected
        )
    }
}

impl std::error::Error for SyntaxError {}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(input: &str) -> Self {
        Cursor {
            chars: input.chars().collect(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat_char(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// Consume `lit` if the input continues with it; never consumes on a
    /// partial match.
    fn eat_literal(&mut self, lit: &str) -> bool {
        let lit: Vec<char> = lit.chars().collect();
        if self.chars[self.pos..].starts_with(&lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn parse_uint(&mut self, expected: &str) -> Result<u32, SyntaxError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(SyntaxError {
                position: start,
                expected: expected.into(),
            });
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| SyntaxError {
            position: start,
            expected: format!("{expected} (value out of range)"),
        })
    }

    fn error(&self, expected: &str) -> SyntaxError {
        SyntaxError {
            position: self.pos,
            expected: expected.into(),
        }
    }
}

fn parse_gen(c: &mut Cursor) -> Result<ExprGen, SyntaxError> {
    if c.eat_literal("lambda1") {
        return Ok(ExprGen::Lambda1);
    }
    if c.eat_literal("dirr") {
        return Ok(ExprGen::DeltaIrr);
    }
    if c.eat_literal("d0") {
        c.skip_ws();
        if !c.eat_char('{') {
            return Err(c.error("'{' after 'd0'"));
        }
        let mut indices = Vec::new();
        loop {
            c.skip_ws();
            indices.push(c.parse_uint("a mark index")?);
            c.skip_ws();
            if c.eat_char(',') {
                continue;
            }
            if c.eat_char('}') {
                return Ok(ExprGen::Sep(indices));
            }
            return Err(c.error("',' or '}'"));
        }
    }
    if c.eat_literal("psi") {
        c.skip_ws();
        return Ok(ExprGen::Psi(c.parse_uint("a mark index after 'psi'")?));
    }
    Err(c.error("a generator: 'psi<k>', 'lambda1', 'dirr', or 'd0{..}'"))
}

/// Parse one monomial in the surface grammar.
pub fn parse_monomial(input: &str) -> Result<ExprMonomial, SyntaxError> {
    let mut c = Cursor::new(input);
    let mut factors = Vec::new();
    loop {
        c.skip_ws();
        let gen = parse_gen(&mut c)?;
        c.skip_ws();
        let mut had_exponent = false;
        let exp = if c.eat_char('^') {
            had_exponent = true;
            c.skip_ws();
            let at = c.pos;
            let e = c.parse_uint("a positive exponent after '^'")?;
            if e == 0 {
                return Err(SyntaxError {
                    position: at,
                    expected: "a positive exponent after '^'".into(),
                });
            }
            e
        } else {
            1
        };
        factors.push((gen, exp));
        c.skip_ws();
        if c.at_end() {
            return Ok(ExprMonomial { factors });
        }
        if !c.eat_char('*') {
            return Err(c.error(if had_exponent {
                "'*' or end of input"
            } else {
                "'^', '*', or end of input"
            }));
        }
    }
}

/// Parse a bare generator name (the `gen` production alone), as used in the
/// JSON file formats.
pub fn parse_generator_name(input: &str) -> Result<ExprGen, SyntaxError> {
    let mut c = Cursor::new(input);
    c.skip_ws();
    let gen = parse_gen(&mut c)?;
    c.skip_ws();
    if !c.at_end() {
        return Err(c.error("end of input"));
    }
    Ok(gen)
}

/// Resolve a positional generator against a concrete space, producing the
/// canonical engine [`Generator`].
pub fn resolve_gen(space: &ModuliSpace, gen: &ExprGen) -> Result<Generator, EngineError> {
    let label_at = |idx: u32| -> Result<String, EngineError> {
        if idx == 0 || idx as usize > space.mark_count() {
            return Err(EngineError::InvalidMarks(format!(
                "mark index {idx} out of range 1..={} on {space}",
                space.mark_count()
            )));
        }
        Ok(space.marks()[idx as usize - 1].clone())
    };
    let raw = match gen {
        ExprGen::Psi(i) => Generator::Psi(label_at(*i)?),
        ExprGen::Lambda1 => Generator::Lambda1,
        ExprGen::DeltaIrr => Generator::DeltaIrr,
        ExprGen::Sep(indices) => {
            let mut labels = std::collections::BTreeSet::new();
            for i in indices {
                if !labels.insert(label_at(*i)?) {
                    return Err(EngineError::InvalidMarks(format!(
                        "duplicate mark index {i} in d0 subset"
                    )));
                }
            }
            Generator::DeltaSep(labels)
        }
    };
    raw.validated(space)
}

/// Resolve a full parsed monomial to validated generator powers.
pub fn resolve_monomial(
    space: &ModuliSpace,
    monomial: &ExprMonomial,
) -> Result<Vec<(Generator, u32)>, EngineError> {
    monomial
        .factors
        .iter()
        .map(|(gen, exp)| Ok((resolve_gen(space, gen)?, *exp)))
        .collect()
}

/// Render a canonical generator back into grammar syntax against a space
/// (inverse of parsing + resolution up to canonical form).
pub fn format_generator(space: &ModuliSpace, gen: &Generator) -> String {
    let index_of = |label: &str| {
        space
            .mark_index(label)
            .map(|i| (i + 1).to_string())
            .unwrap_or_else(|| format!("?{label}?"))
    };
    match gen {
        Generator::Psi(l) => format!("psi{}", index_of(l)),
        Generator::Lambda1 => "lambda1".into(),
        Generator::DeltaIrr => "dirr".into(),
        Generator::DeltaSep(s) => {
            let mut indices: Vec<usize> = s
                .iter()
                .filter_map(|l| space.mark_index(l).map(|i| i + 1))
                .collect();
            indices.sort_unstable();
            let joined: Vec<String> = indices.iter().map(usize::to_string).collect();
            format!("d0{{{}}}", joined.join(","))
        }
    }
}

/// Render generator powers in grammar syntax, `*`-joined.
pub fn format_monomial(space: &ModuliSpace, powers: &[(Generator, u32)]) -> String {
    let pieces: Vec<String> = powers
        .iter()
        .map(|(gen, exp)| {
            let name = format_generator(space, gen);
            if *exp == 1 {
                name
            } else {
                format!("{name}^{exp}")
            }
        })
        .collect();
    pieces.join(" * ")
}
