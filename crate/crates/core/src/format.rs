//! The `.alg` presentation file format: parsing and serialization.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::ncpoly::{Alphabet, GeneratorInfo, Poly, Word};
use crate::scalars::{Domain, Scalar, ScalarError};
use crate::zoo::{self, Gl2Kind, Presentation, Provenance, ZooError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}, column {col}: expected {expected}")]
    Parse { line: usize, col: usize, expected: String },
    #[error("line {line}, column {col}: unknown generator `{name}`")]
    UnknownGenerator { name: String, line: usize, col: usize },
    #[error("line {line}: unknown family `{name}`")]
    UnknownFamily { name: String, line: usize },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("line {line}, column {col}: {source}")]
    Scalar { line: usize, col: usize, source: ScalarError },
    #[error(transparent)]
    Zoo(#[from] ZooError),
}

/// A parsed `.alg` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationFile {
    pub name: String,
    pub presentation: Presentation,
    /// Named automorphisms as generator images in declaration order.
    pub automorphisms: Vec<(String, Vec<Poly>)>,
    /// Named groups as lists of automorphism names.
    pub groups: Vec<(String, Vec<String>)>,
}

impl PresentationFile {
    pub fn new(name: impl Into<String>, presentation: Presentation) -> Self {
        PresentationFile {
            name: name.into(),
            presentation,
            automorphisms: vec![],
            groups: vec![],
        }
    }

    pub fn automorphism(&self, name: &str) -> Option<&[Poly]> {
        self.automorphisms
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    /// Generator images of every automorphism listed in the group.
    pub fn group(&self, name: &str) -> Option<Vec<Vec<Poly>>> {
        let (_, members) = self.groups.iter().find(|(n, _)| n == name)?;
        members.iter().map(|m| self.automorphism(m).map(<[Poly]>::to_vec)).collect()
    }
}

// ---------------------------------------------------------------------------
// Sections

#[derive(Debug)]
struct Entry {
    line: usize,
    /// Column of the first character of `text`.
    col: usize,
    key: Option<(String, usize)>,
    text: String,
}

#[derive(Debug)]
struct Section {
    kind: String,
    arg: Option<String>,
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries
            .iter()
            .find(|e| e.key.as_ref().is_some_and(|(k, _)| k == key))
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn split_sections(text: &str) -> Result<Vec<Section>, FormatError> {
    let mut sections: Vec<Section> = vec![];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw);
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start().len();
        if trimmed.starts_with('[') {
            let Some(inner) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) else {
                return Err(FormatError::Parse {
                    line,
                    col: indent + trimmed.len() + 1,
                    expected: "`]`".into(),
                });
            };
            let mut parts = inner.split_whitespace();
            let kind = parts.next().unwrap_or("").to_string();
            let arg = parts.next().map(str::to_string);
            if parts.next().is_some() {
                return Err(FormatError::Invalid {
                    line,
                    message: "section headers take at most one name".into(),
                });
            }
            let needs_arg = matches!(kind.as_str(), "automorphism" | "group");
            match kind.as_str() {
                "algebra" | "relations" | "family" | "automorphism" | "group" => {}
                _ => {
                    return Err(FormatError::Parse {
                        line,
                        col: indent + 2,
                        expected: "one of `algebra`, `relations`, `family`, `automorphism`, `group`".into(),
                    })
                }
            }
            if needs_arg != arg.is_some() {
                return Err(FormatError::Invalid {
                    line,
                    message: if needs_arg {
                        format!("[{kind}] needs a name")
                    } else {
                        format!("[{kind}] takes no name")
                    },
                });
            }
            if let Some(a) = &arg {
                if !is_ident(a) {
                    return Err(FormatError::Parse {
                        line,
                        col: indent + 2 + kind.len() + 1,
                        expected: "an identifier".into(),
                    });
                }
            }
            if sections.iter().any(|s| s.kind == kind && s.arg == arg) {
                return Err(FormatError::Invalid {
                    line,
                    message: format!("duplicate section [{}]", inner.trim()),
                });
            }
            sections.push(Section {
                kind,
                arg,
                line,
                entries: vec![],
            });
            continue;
        }
        let Some(section) = sections.last_mut() else {
            return Err(FormatError::Parse {
                line,
                col: indent + 1,
                expected: "a section header".into(),
            });
        };
        let entry = if section.kind == "relations" {
            Entry {
                line,
                col: indent + 1,
                key: None,
                text: trimmed.to_string(),
            }
        } else {
            let Some(eq) = body.find('=') else {
                return Err(FormatError::Parse {
                    line,
                    col: indent + trimmed.len() + 1,
                    expected: "`=`".into(),
                });
            };
            let key = body[..eq].trim();
            if !is_ident(key) {
                return Err(FormatError::Parse {
                    line,
                    col: indent + 1,
                    expected: "a key".into(),
                });
            }
            if section.get(key).is_some() {
                return Err(FormatError::Invalid {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
            let rest = &body[eq + 1..];
            let lead = rest.len() - rest.trim_start().len();
            Entry {
                line,
                col: eq + 2 + lead,
                key: Some((key.to_string(), indent + 1)),
                text: rest.trim().to_string(),
            }
        };
        section.entries.push(entry);
    }
    Ok(sections)
}

/// Splits on top-level occurrences of `sep`, returning pieces with their
/// column offsets relative to `text`.
fn split_top(text: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = vec![];
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push((start, &text[start..i]));
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push((start, &text[start..]));
    out.into_iter()
        .map(|(off, s)| {
            let lead = s.len() - s.trim_start().len();
            (off + lead, s.trim())
        })
        .collect()
}

fn check_keys(section: &Section, allowed: &[&str]) -> Result<(), FormatError> {
    for e in &section.entries {
        if let Some((k, col)) = &e.key {
            if !allowed.contains(&k.as_str()) {
                return Err(FormatError::Parse {
                    line: e.line,
                    col: *col,
                    expected: format!("one of {}", allowed.iter().map(|a| format!("`{a}`")).collect::<Vec<_>>().join(", ")),
                });
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Expressions

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    col0: usize,
}

impl Lexer {
    fn new(text: &str, line: usize, col0: usize) -> Result<Self, FormatError> {
        let bytes: Vec<char> = text.chars().collect();
        let mut toks = vec![];
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = bytes[start..i].iter().collect();
                toks.push((Tok::Int(s.parse().expect("digits")), start));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                toks.push((Tok::Ident(bytes[start..i].iter().collect()), start));
            } else if "+-*/^()#".contains(c) {
                toks.push((Tok::Sym(c), i));
                i += 1;
            } else {
                return Err(FormatError::Parse {
                    line,
                    col: col0 + i,
                    expected: "an identifier, number, operator or parenthesis".into(),
                });
            }
        }
        toks.push((Tok::End, bytes.len()));
        Ok(Lexer { toks, pos: 0, line, col0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.col0 + self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> FormatError {
        FormatError::Parse {
            line: self.line,
            col: self.col(),
            expected: expected.into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), FormatError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("`{c}`")))
        }
    }

    fn uint(&mut self) -> Result<BigInt, FormatError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.error("a nonnegative integer")),
        }
    }

    fn small_uint(&mut self) -> Result<u32, FormatError> {
        let col = self.col();
        let n = self.uint()?;
        u32::try_from(n).map_err(|_| FormatError::Parse {
            line: self.line,
            col,
            expected: "an integer below 2^32".into(),
        })
    }
}

struct ExprParser<'a> {
    lex: Lexer,
    alphabet: Option<&'a Alphabet>,
    domain: Domain,
}

impl ExprParser<'_> {
    fn scalar_err(&self, col: usize, source: ScalarError) -> FormatError {
        FormatError::Scalar {
            line: self.lex.line,
            col,
            source,
        }
    }

    fn expr(&mut self) -> Result<Poly, FormatError> {
        let mut acc = self.term()?;
        loop {
            if self.lex.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.lex.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, FormatError> {
        let mut acc = self.unary()?;
        while self.lex.eat('*') {
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly, FormatError> {
        if self.lex.eat('-') {
            Ok(-&self.unary()?)
        } else if self.lex.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Poly, FormatError> {
        let base = self.atom()?;
        if !self.lex.eat('^') {
            return Ok(base);
        }
        let col = self.lex.col();
        let negative = self.lex.eat('-');
        let e = self.lex.small_uint()?;
        if negative {
            let is_constant = base.terms().all(|(w, _)| w.is_empty());
            if !is_constant {
                return Err(FormatError::Parse {
                    line: self.lex.line,
                    col,
                    expected: "a nonnegative exponent on a non-scalar base".into(),
                });
            }
            let c = base.coeff(&Word::empty());
            let inv = c
                .pow(-(e as i64))
                .map_err(|s| self.scalar_err(col, s))?;
            return Ok(Poly::constant(inv));
        }
        let mut acc = Poly::one(self.domain);
        for _ in 0..e {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Poly, FormatError> {
        let col = self.lex.col();
        match self.lex.peek().clone() {
            Tok::Int(n) => {
                self.lex.bump();
                let mut q = BigRational::from_integer(n);
                if self.lex.eat('/') {
                    let dcol = self.lex.col();
                    let d = self.lex.uint()?;
                    if d == BigInt::from(0) {
                        return Err(self.scalar_err(dcol, ScalarError::DivisionByZero));
                    }
                    q /= BigRational::from_integer(d);
                }
                let s = self.domain.from_rational(&q).map_err(|e| self.scalar_err(col, e))?;
                Ok(Poly::constant(s))
            }
            Tok::Ident(name) if name == "zeta" => {
                self.lex.bump();
                self.lex.expect('(')?;
                let ncol = self.lex.col();
                let n = self.lex.small_uint()?;
                self.lex.expect(')')?;
                let s = self.domain.zeta(n).map_err(|e| self.scalar_err(ncol, e))?;
                Ok(Poly::constant(s))
            }
            Tok::Ident(name) => {
                self.lex.bump();
                let idx = self.alphabet.and_then(|a| a.index_of(&name));
                match idx {
                    Some(i) => Ok(Poly::generator(i, self.domain)),
                    None => Err(FormatError::UnknownGenerator {
                        name,
                        line: self.lex.line,
                        col,
                    }),
                }
            }
            Tok::Sym('(') => {
                self.lex.bump();
                let e = self.expr()?;
                self.lex.expect(')')?;
                Ok(e)
            }
            _ => Err(self.lex.error("an identifier, number, `zeta(n)` or `(`")),
        }
    }
}

fn parse_expr_at(
    text: &str,
    alphabet: Option<&Alphabet>,
    domain: Domain,
    line: usize,
    col: usize,
) -> Result<Poly, FormatError> {
    let mut p = ExprParser {
        lex: Lexer::new(text, line, col)?,
        alphabet,
        domain,
    };
    if *p.lex.peek() == Tok::End {
        return Err(p.lex.error("an expression"));
    }
    let e = p.expr()?;
    if *p.lex.peek() != Tok::End {
        return Err(p.lex.error("an operator or end of expression"));
    }
    Ok(e)
}

/// Parses an expression in the generators of `alphabet`; `a = b` means `a - b`.
pub fn parse_expression(text: &str, alphabet: &Alphabet, domain: Domain) -> Result<Poly, FormatError> {
    parse_relation(text, Some(alphabet), domain, 1, 1)
}

/// Parses `p1 # g1 + p2 # g2 - ...` where each `p` is a product term and each
/// group reference is resolved by `resolve`; a term without `#` sits on the
/// identity element 0.
pub fn parse_skew_expression(
    text: &str,
    alphabet: &Alphabet,
    domain: Domain,
    resolve: &dyn Fn(&str) -> Option<usize>,
) -> Result<Vec<(Poly, usize)>, FormatError> {
    let mut p = ExprParser {
        lex: Lexer::new(text, 1, 1)?,
        alphabet: Some(alphabet),
        domain,
    };
    let mut out = vec![];
    let mut negate = false;
    loop {
        let mut t = p.term()?;
        if negate {
            t = -&t;
        }
        let mut g = 0;
        if p.lex.eat('#') {
            let col = p.lex.col();
            let name = match p.lex.bump() {
                Tok::Ident(s) => s,
                Tok::Int(n) => n.to_string(),
                _ => return Err(FormatError::Parse { line: 1, col, expected: "a group element".into() }),
            };
            g = resolve(&name).ok_or(FormatError::Parse {
                line: 1,
                col,
                expected: "a group element".into(),
            })?;
        }
        out.push((t, g));
        if p.lex.eat('+') {
            negate = false;
        } else if p.lex.eat('-') {
            negate = true;
        } else if *p.lex.peek() == Tok::End {
            return Ok(out);
        } else {
            return Err(p.lex.error("`+`, `-`, `#` or end of expression"));
        }
    }
}

/// Parses a scalar literal such as `1/2`, `zeta(3)^2` or `1 + zeta(4)`.
pub fn parse_scalar(text: &str, domain: Domain) -> Result<Scalar, FormatError> {
    scalar_at(text, domain, 1, 1)
}

fn parse_relation(
    text: &str,
    alphabet: Option<&Alphabet>,
    domain: Domain,
    line: usize,
    col: usize,
) -> Result<Poly, FormatError> {
    let sides = split_top(text, '=');
    match sides.as_slice() {
        [(off, s)] => parse_expr_at(s, alphabet, domain, line, col + off),
        [(lo, l), (ro, r)] => {
            let l = parse_expr_at(l, alphabet, domain, line, col + lo)?;
            let r = parse_expr_at(r, alphabet, domain, line, col + ro)?;
            Ok(&l - &r)
        }
        _ => Err(FormatError::Parse {
            line,
            col: col + sides[2].0 - 1,
            expected: "at most one `=`".into(),
        }),
    }
}

fn scalar_at(text: &str, domain: Domain, line: usize, col: usize) -> Result<Scalar, FormatError> {
    let p = parse_expr_at(text, None, domain, line, col)?;
    Ok(p.coeff(&Word::empty()))
}

fn parse_domain(entry: &Entry) -> Result<Domain, FormatError> {
    let s: String = entry.text.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || FormatError::Parse {
        line: entry.line,
        col: entry.col,
        expected: "`Q`, `Q(zeta(n))` or `F(p)`".into(),
    };
    if s == "Q" {
        return Ok(Domain::Rational);
    }
    if let Some(n) = s.strip_prefix("Q(zeta(").and_then(|r| r.strip_suffix("))")) {
        let n: u32 = n.parse().map_err(|_| err())?;
        if n == 0 {
            return Err(err());
        }
        return Ok(Domain::cyclotomic(n));
    }
    if let Some(p) = s.strip_prefix("F(").and_then(|r| r.strip_suffix(')')) {
        let p: u64 = p.parse().map_err(|_| err())?;
        return Domain::prime_field(p).map_err(|source| FormatError::Scalar {
            line: entry.line,
            col: entry.col,
            source,
        });
    }
    Err(err())
}

fn parse_generators(entry: &Entry) -> Result<Vec<GeneratorInfo>, FormatError> {
    let mut out = vec![];
    for (off, item) in split_top(&entry.text, ',') {
        let col = entry.col + off;
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        if parts.is_empty() || !is_ident(parts[0]) || parts[0] == "zeta" {
            return Err(FormatError::Parse {
                line: entry.line,
                col,
                expected: "a generator name other than `zeta`".into(),
            });
        }
        if parts.len() > 3 {
            return Err(FormatError::Parse {
                line: entry.line,
                col,
                expected: "`name[:weight[:parity]]`".into(),
            });
        }
        let num = |i: usize, default: u32| -> Result<u32, FormatError> {
            match parts.get(i) {
                None => Ok(default),
                Some(s) => s.parse().map_err(|_| FormatError::Parse {
                    line: entry.line,
                    col,
                    expected: "a nonnegative integer weight or parity".into(),
                }),
            }
        };
        let weight = num(1, 1)?;
        let parity = num(2, 0)?;
        if parity > 1 {
            return Err(FormatError::Invalid {
                line: entry.line,
                message: format!("parity of `{}` must be 0 or 1", parts[0]),
            });
        }
        out.push(GeneratorInfo::new(parts[0], weight, parity as u8));
    }
    Ok(out)
}

fn parse_names(entry: &Entry) -> Result<Vec<(usize, String)>, FormatError> {
    split_top(&entry.text, ',')
        .into_iter()
        .map(|(off, s)| {
            if is_ident(s) {
                Ok((entry.col + off, s.to_string()))
            } else {
                Err(FormatError::Parse {
                    line: entry.line,
                    col: entry.col + off,
                    expected: "an identifier".into(),
                })
            }
        })
        .collect()
}

fn apply_precedence(gens: &mut [GeneratorInfo], entry: &Entry) -> Result<(), FormatError> {
    let names = parse_names(entry)?;
    if names.len() != gens.len() {
        return Err(FormatError::Invalid {
            line: entry.line,
            message: format!("precedence lists {} names for {} generators", names.len(), gens.len()),
        });
    }
    let mut seen = vec![false; gens.len()];
    for (rank, (col, name)) in names.into_iter().enumerate() {
        let Some(i) = gens.iter().position(|g| g.name == name) else {
            return Err(FormatError::UnknownGenerator {
                name,
                line: entry.line,
                col,
            });
        };
        if seen[i] {
            return Err(FormatError::Invalid {
                line: entry.line,
                message: format!("`{name}` appears twice in precedence"),
            });
        }
        seen[i] = true;
        gens[i].precedence = rank as u32;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Families

fn family_presentation(section: &Section, domain: Domain) -> Result<Presentation, FormatError> {
    let name_entry = section.get("name").ok_or(FormatError::Invalid {
        line: section.line,
        message: "[family] needs `name`".into(),
    })?;
    let name = name_entry.text.as_str();
    let scalar = |key: &str| -> Result<Option<Scalar>, FormatError> {
        section
            .get(key)
            .map(|e| scalar_at(&e.text, domain, e.line, e.col))
            .transpose()
    };
    let required = |key: &str| -> Result<Scalar, FormatError> {
        scalar(key)?.ok_or(FormatError::Invalid {
            line: section.line,
            message: format!("family `{name}` needs `{key}`"),
        })
    };
    let list = |key: &str| -> Result<Option<Vec<Scalar>>, FormatError> {
        let Some(e) = section.get(key) else { return Ok(None) };
        if e.text.is_empty() {
            return Ok(Some(vec![]));
        }
        split_top(&e.text, ',')
            .into_iter()
            .map(|(off, s)| scalar_at(s, domain, e.line, e.col + off))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    };
    let uint = |key: &str, default: u32| -> Result<u32, FormatError> {
        match section.get(key) {
            None => Ok(default),
            Some(e) => e.text.parse().map_err(|_| FormatError::Parse {
                line: e.line,
                col: e.col,
                expected: "a nonnegative integer".into(),
            }),
        }
    };
    let (allowed, p): (&[&str], Result<Presentation, ZooError>) = match name {
        "weyl" => (&[], zoo::weyl(domain)),
        "pl11" => (&[], zoo::pl11(domain)),
        "quantum_plane" => (&["q"], zoo::gl2_family(&Gl2Kind::QuantumPlane(required("q")?), domain)),
        "quantum_weyl" => (&["q"], zoo::gl2_family(&Gl2Kind::QuantumWeyl(required("q")?), domain)),
        "jordan" => (&[], zoo::gl2_family(&Gl2Kind::Jordan, domain)),
        "deformed_jordan" => (&[], zoo::gl2_family(&Gl2Kind::DeformedJordan, domain)),
        "quantized_weyl" => {
            let n = uint("n", 1)? as usize;
            let gamma = list("gamma")?.ok_or(FormatError::Invalid {
                line: section.line,
                message: "family `quantized_weyl` needs `gamma`".into(),
            })?;
            let p = match (section.get("q"), section.get("q_matrix")) {
                (Some(_), None) => zoo::quantized_weyl_uniform(n, &required("q")?, &gamma, domain),
                (None, Some(e)) => {
                    let rows = split_top(&e.text, ';')
                        .into_iter()
                        .map(|(roff, row)| {
                            split_top(row, ',')
                                .into_iter()
                                .map(|(off, s)| scalar_at(s, domain, e.line, e.col + roff + off))
                                .collect::<Result<Vec<_>, _>>()
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    zoo::quantized_weyl(n, &rows, &gamma, domain)
                }
                _ => {
                    return Err(FormatError::Invalid {
                        line: section.line,
                        message: "family `quantized_weyl` needs exactly one of `q`, `q_matrix`".into(),
                    })
                }
            };
            (&["n", "q", "q_matrix", "gamma"], p)
        }
        "down_up" => {
            let gamma = required("gamma")?;
            let p = match (scalar("alpha")?, scalar("beta")?, scalar("r")?, scalar("s")?) {
                (Some(a), Some(b), r, s) => match (r, s) {
                    (Some(r), Some(s)) => zoo::down_up(&a, &b, &gamma, Some((&r, &s)), domain),
                    (None, None) => zoo::down_up(&a, &b, &gamma, None, domain),
                    _ => {
                        return Err(FormatError::Invalid {
                            line: section.line,
                            message: "`r` and `s` must be given together".into(),
                        })
                    }
                },
                (None, None, Some(r), Some(s)) => zoo::down_up_from_roots(&r, &s, &gamma, domain),
                _ => {
                    return Err(FormatError::Invalid {
                        line: section.line,
                        message: "family `down_up` needs `alpha, beta` or `r, s`".into(),
                    })
                }
            };
            (&["alpha", "beta", "gamma", "r", "s"], p)
        }
        "symplectic_rank1" => {
            let m = uint("m", 0)?;
            let t = required("t")?;
            let c = list("c")?.unwrap_or_default();
            (&["m", "t", "c"], zoo::symplectic_reflection_rank1(m, &t, &c, domain))
        }
        "polynomial_ring" => {
            let e = section.get("generators").ok_or(FormatError::Invalid {
                line: section.line,
                message: "family `polynomial_ring` needs `generators`".into(),
            })?;
            let names = parse_names(e)?;
            let names: Vec<&str> = names.iter().map(|(_, n)| n.as_str()).collect();
            (&["generators"], zoo::polynomial_ring(&names, domain))
        }
        _ => {
            return Err(FormatError::UnknownFamily {
                name: name.to_string(),
                line: name_entry.line,
            })
        }
    };
    let mut keys = vec!["name"];
    keys.extend_from_slice(allowed);
    check_keys(section, &keys)?;
    Ok(p?)
}

// ---------------------------------------------------------------------------
// Files

/// Parses a `.alg` file.
pub fn parse_presentation(text: &str) -> Result<PresentationFile, FormatError> {
    let sections = split_sections(text)?;
    let find = |kind: &str| sections.iter().find(|s| s.kind == kind);
    let algebra = find("algebra").ok_or(FormatError::Invalid {
        line: 1,
        message: "missing [algebra] section".into(),
    })?;
    check_keys(algebra, &["name", "field", "generators", "precedence", "gkdim"])?;
    let name = algebra.get("name").map(|e| e.text.clone()).unwrap_or_default();
    let field = algebra.get("field").ok_or(FormatError::Invalid {
        line: algebra.line,
        message: "[algebra] needs `field`".into(),
    })?;
    let domain = parse_domain(field)?;
    let gkdim = match algebra.get("gkdim") {
        None => None,
        Some(e) => Some(e.text.parse::<u32>().map_err(|_| FormatError::Parse {
            line: e.line,
            col: e.col,
            expected: "a nonnegative integer".into(),
        })?),
    };

    let presentation = match (find("relations"), find("family")) {
        (Some(rel), None) => {
            let gens_entry = algebra.get("generators").ok_or(FormatError::Invalid {
                line: algebra.line,
                message: "[algebra] needs `generators` when [relations] is given".into(),
            })?;
            let mut gens = parse_generators(gens_entry)?;
            if let Some(e) = algebra.get("precedence") {
                apply_precedence(&mut gens, e)?;
            } else {
                for (i, g) in gens.iter_mut().enumerate() {
                    g.precedence = i as u32;
                }
            }
            let alphabet = Alphabet::with_precedence(gens).map_err(|e| FormatError::Invalid {
                line: gens_entry.line,
                message: e.to_string(),
            })?;
            let mut relations = vec![];
            for e in &rel.entries {
                let r = parse_relation(&e.text, Some(&alphabet), domain, e.line, e.col)?;
                if r.is_zero() {
                    return Err(FormatError::Invalid {
                        line: e.line,
                        message: "relation is identically zero".into(),
                    });
                }
                relations.push(r);
            }
            let p = Presentation::new(alphabet, relations, domain)?;
            match gkdim {
                Some(g) => p.with_provenance(Provenance {
                    family: "explicit".into(),
                    gk_dim: Some(g),
                    ..Provenance::default()
                }),
                None => p,
            }
        }
        (None, Some(fam)) => {
            for key in ["generators", "precedence", "gkdim"] {
                if let Some(e) = algebra.get(key) {
                    return Err(FormatError::Invalid {
                        line: e.line,
                        message: format!("`{key}` is fixed by the [family] section"),
                    });
                }
            }
            family_presentation(fam, domain)?
        }
        (Some(_), Some(fam)) => {
            return Err(FormatError::Invalid {
                line: fam.line,
                message: "give either [relations] or [family], not both".into(),
            })
        }
        (None, None) => {
            return Err(FormatError::Invalid {
                line: algebra.line,
                message: "missing [relations] or [family] section".into(),
            })
        }
    };

    let alphabet = &presentation.alphabet;
    let mut automorphisms = vec![];
    for s in sections.iter().filter(|s| s.kind == "automorphism") {
        let mut images: Vec<Option<Poly>> = vec![None; alphabet.len()];
        for e in &s.entries {
            let (key, kcol) = e.key.as_ref().expect("keyed section");
            let Some(i) = alphabet.index_of(key) else {
                return Err(FormatError::UnknownGenerator {
                    name: key.clone(),
                    line: e.line,
                    col: *kcol,
                });
            };
            images[i] = Some(parse_expr_at(&e.text, Some(alphabet), domain, e.line, e.col)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, img)| {
                img.ok_or(FormatError::Invalid {
                    line: s.line,
                    message: format!("automorphism misses the image of `{}`", alphabet.get(i).name),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        automorphisms.push((s.arg.clone().expect("named"), images));
    }
    let mut groups = vec![];
    for s in sections.iter().filter(|s| s.kind == "group") {
        check_keys(s, &["generators"])?;
        let e = s.get("generators").ok_or(FormatError::Invalid {
            line: s.line,
            message: "[group] needs `generators`".into(),
        })?;
        let mut members = vec![];
        if !e.text.is_empty() {
            for (col, n) in parse_names(e)? {
                if !automorphisms.iter().any(|(a, _)| *a == n) {
                    return Err(FormatError::Invalid {
                        line: e.line,
                        message: format!("column {col}: unknown automorphism `{n}`"),
                    });
                }
                members.push(n);
            }
        }
        groups.push((s.arg.clone().expect("named"), members));
    }
    Ok(PresentationFile {
        name,
        presentation,
        automorphisms,
        groups,
    })
}

/// Writes a file with explicit generators and relations that parses back
/// to the same presentation.
pub fn write_presentation(file: &PresentationFile) -> String {
    let p = &file.presentation;
    let a = &p.alphabet;
    let mut out = String::new();
    out.push_str("[algebra]\n");
    if !file.name.is_empty() {
        let _ = writeln!(out, "name = {}", file.name);
    }
    let _ = writeln!(out, "field = {}", p.domain);
    let gens: Vec<String> = a
        .generators()
        .iter()
        .map(|g| format!("{}:{}:{}", g.name, g.weight, g.parity))
        .collect();
    let _ = writeln!(out, "generators = {}", gens.join(", "));
    let order = a.by_precedence();
    if order.iter().enumerate().any(|(i, &j)| i != j) {
        let names: Vec<&str> = order.iter().map(|&i| a.get(i).name.as_str()).collect();
        let _ = writeln!(out, "precedence = {}", names.join(", "));
    }
    if let Some(g) = p.provenance.as_ref().and_then(|pr| pr.gk_dim) {
        let _ = writeln!(out, "gkdim = {g}");
    }
    out.push_str("\n[relations]\n");
    for r in &p.relations {
        let _ = writeln!(out, "{}", r.display(a));
    }
    for (name, images) in &file.automorphisms {
        let _ = writeln!(out, "\n[automorphism {name}]");
        for (i, img) in images.iter().enumerate() {
            let _ = writeln!(out, "{} = {}", a.get(i).name, img.display(a));
        }
    }
    for (name, members) in &file.groups {
        let _ = writeln!(out, "\n[group {name}]");
        let _ = writeln!(out, "generators = {}", members.join(", "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3() -> Domain {
        Domain::cyclotomic(3)
    }

    #[test]
    fn family_matches_constructor() {
        let text = "[algebra]\nname = qw\nfield = Q(zeta(3))\n\n[family]\nname = quantized_weyl\nn = 1\nq = zeta(3)\ngamma = zeta(3)\n";
        let f = parse_presentation(text).unwrap();
        let z = z3().zeta(3).unwrap();
        let expected = zoo::quantized_weyl_uniform(1, &z, std::slice::from_ref(&z), z3()).unwrap();
        assert_eq!(f.presentation, expected);
    }

    #[test]
    fn quantum_plane_relation() {
        let text = "[algebra]\nfield = Q(zeta(3))\ngenerators = x, y\n[relations]\nx*y - zeta(3)*y*x\n";
        let f = parse_presentation(text).unwrap();
        let z = z3().zeta(3).unwrap();
        let expected = zoo::gl2_family(&Gl2Kind::QuantumPlane(z), z3()).unwrap();
        assert!(f.presentation.same_structure(&expected));
    }

    #[test]
    fn unknown_generator_located() {
        let text = "[algebra]\nfield = Q\ngenerators = x, y\n[relations]\nx*y - z*x\n";
        match parse_presentation(text) {
            Err(FormatError::UnknownGenerator { name, line, col }) => {
                assert_eq!((name.as_str(), line, col), ("z", 5, 7));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_family() {
        let text = "[algebra]\nfield = Q\n[family]\nname = nope\n";
        assert!(matches!(
            parse_presentation(text),
            Err(FormatError::UnknownFamily { line: 4, .. })
        ));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let text = "[algebra]\nfield = Q\ngenerators = x\n[relations]\nx*(x + 1\n";
        match parse_presentation(text) {
            Err(FormatError::Parse { line, col, .. }) => assert_eq!((line, col), (5, 9)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_presentation("x = 1\n"),
            Err(FormatError::Parse { line: 1, col: 1, .. })
        ));
    }

    #[test]
    fn relations_and_family_exclusive() {
        let text = "[algebra]\nfield = Q\ngenerators = x\n[relations]\nx\n[family]\nname = weyl\n";
        assert!(matches!(parse_presentation(text), Err(FormatError::Invalid { line: 6, .. })));
    }

    #[test]
    fn scalar_literals() {
        let d = Domain::cyclotomic(6);
        let s = parse_scalar("1/2 + zeta(3)^2 - 3*zeta(6)", d).unwrap();
        let half = Scalar::rational(1, 2);
        let expected = &(&d.lift(&half).unwrap() + &d.zeta(3).unwrap().pow(2).unwrap())
            - &(&d.from_int(3) * &d.zeta(6).unwrap());
        assert_eq!(s, expected);
        assert_eq!(parse_scalar("zeta(3)^-1", z3()).unwrap(), z3().zeta(3).unwrap().pow(2).unwrap());
        assert_eq!(parse_scalar("10", Domain::PrimeField(7)).unwrap(), Domain::PrimeField(7).from_int(3));
        assert!(matches!(parse_scalar("zeta(3)", Domain::Rational), Err(FormatError::Scalar { .. })));
    }

    #[test]
    fn skew_terms() {
        let a = Alphabet::new(vec![GeneratorInfo::new("x", 1, 0), GeneratorInfo::new("y", 1, 0)]).unwrap();
        let d = Domain::Rational;
        let resolve = |s: &str| match s {
            "e" => Some(0),
            "g1" => Some(1),
            _ => None,
        };
        let t = parse_skew_expression("2*x # g1 - y + (x + y)#e", &a, d, &resolve).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0], (Poly::generator(0, d).scale(&d.from_int(2)), 1));
        assert_eq!(t[1], (-&Poly::generator(1, d), 0));
        assert_eq!(t[2].1, 0);
        assert!(parse_skew_expression("x # h", &a, d, &resolve).is_err());
    }

    #[test]
    fn equation_sides() {
        let text = "[algebra]\nfield = Q(zeta(3))\ngenerators = x:1, y:1, g:0\nprecedence = x, y, g\n[relations]\ng^3 = 1\ng*x = zeta(3)*x*g\n";
        let f = parse_presentation(text).unwrap();
        let a = &f.presentation.alphabet;
        assert_eq!(f.presentation.relations[0].display(a).to_string(), "g*g*g - 1");
    }

    #[test]
    fn automorphisms_and_groups() {
        let text = "[algebra]\nfield = Q\n[family]\nname = polynomial_ring\ngenerators = x, y\n\n[automorphism neg]\nx = -x\ny = -y\n\n[group G]\ngenerators = neg\n";
        let f = parse_presentation(text).unwrap();
        let imgs = f.group("G").unwrap();
        assert_eq!(imgs.len(), 1);
        assert_eq!(imgs[0][0], -&Poly::generator(0, Domain::Rational));
        let bad = text.replace("y = -y\n", "");
        assert!(matches!(parse_presentation(&bad), Err(FormatError::Invalid { .. })));
    }

    #[test]
    fn round_trip_with_precedence() {
        let p = zoo::gl2_family(&Gl2Kind::Jordan, Domain::Rational).unwrap();
        let f = PresentationFile::new("jordan", p);
        let text = write_presentation(&f);
        assert!(text.contains("precedence = y, x"));
        let g = parse_presentation(&text).unwrap();
        assert!(g.presentation.same_structure(&f.presentation));
        assert_eq!(write_presentation(&g), text);
    }
}
