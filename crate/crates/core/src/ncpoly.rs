//! Words and polynomials in the free algebra on a weighted, parity-tagged
//! alphabet.
//!
//! Monomials are compared by weighted degree, then word length, then
//! left-lexicographically by generator precedence. The order is total and
//! compatible with concatenation on both sides.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalars::{Domain, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("scalar domain mismatch: {0} vs {1}")]
    DomainMismatch(Domain, Domain),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid generator `{name}`: {reason}")]
    InvalidGenerator { name: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorInfo {
    pub name: String,
    /// Filtration degree.
    pub weight: u32,
    /// `Z/2`-degree.
    pub parity: u8,
    /// Position in the total order on letters; smaller is lower.
    pub precedence: u32,
}

impl GeneratorInfo {
    pub fn new(name: impl Into<String>, weight: u32, parity: u8) -> Self {
        GeneratorInfo {
            name: name.into(),
            weight,
            parity,
            precedence: 0,
        }
    }
}

/// An ordered alphabet. Generator indices are declaration positions; the
/// monomial order uses `precedence`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    gens: Vec<GeneratorInfo>,
}

impl Alphabet {
    /// Builds an alphabet whose precedence is declaration order.
    pub fn new(gens: Vec<GeneratorInfo>) -> Result<Self, PolyError> {
        let gens = gens
            .into_iter()
            .enumerate()
            .map(|(i, g)| GeneratorInfo {
                precedence: i as u32,
                ..g
            })
            .collect();
        Self::with_precedence(gens)
    }

    /// Builds an alphabet keeping the `precedence` fields as given; they must be
    /// a permutation of `0..len`.
    pub fn with_precedence(gens: Vec<GeneratorInfo>) -> Result<Self, PolyError> {
        let mut seen = std::collections::HashSet::new();
        for g in &gens {
            if !seen.insert(g.name.as_str()) {
                return Err(PolyError::DuplicateGenerator(g.name.clone()));
            }
            if g.parity > 1 {
                return Err(PolyError::InvalidGenerator {
                    name: g.name.clone(),
                    reason: "parity must be 0 or 1".into(),
                });
            }
        }
        let mut prec: Vec<u32> = gens.iter().map(|g| g.precedence).collect();
        prec.sort_unstable();
        if prec.iter().enumerate().any(|(i, &p)| p != i as u32) {
            return Err(PolyError::InvalidGenerator {
                name: gens.iter().map(|g| g.name.as_str()).collect::<Vec<_>>().join(","),
                reason: "precedences must be a permutation of 0..n".into(),
            });
        }
        if gens.len() > u16::MAX as usize {
            return Err(PolyError::InvalidGenerator {
                name: "<alphabet>".into(),
                reason: "too many generators".into(),
            });
        }
        Ok(Alphabet { gens })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[GeneratorInfo] {
        &self.gens
    }

    pub fn get(&self, i: usize) -> &GeneratorInfo {
        &self.gens[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.gens[i].weight
    }

    /// Generator indices sorted by precedence.
    pub fn by_precedence(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.gens.len()).collect();
        idx.sort_by_key(|&i| self.gens[i].precedence);
        idx
    }

    pub fn word_weight(&self, w: &[u16]) -> u64 {
        w.iter().map(|&i| self.gens[i as usize].weight as u64).sum()
    }

    pub fn word_parity(&self, w: &[u16]) -> u8 {
        (w.iter().map(|&i| self.gens[i as usize].parity as u32).sum::<u32>() % 2) as u8
    }

    /// The monomial order: weight, then length, then left-lex by precedence.
    pub fn cmp_words(&self, a: &[u16], b: &[u16]) -> Ordering {
        self.word_weight(a)
            .cmp(&self.word_weight(b))
            .then(a.len().cmp(&b.len()))
            .then_with(|| {
                for (x, y) in a.iter().zip(b) {
                    let o = self.gens[*x as usize]
                        .precedence
                        .cmp(&self.gens[*y as usize].precedence);
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                Ordering::Equal
            })
    }

    pub fn fmt_word(&self, w: &[u16]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .map(|&i| self.gens[i as usize].name.as_str())
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// A word in the generators; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<u16>);

impl Word {
    pub fn empty() -> Word {
        Word(vec![])
    }

    pub fn letter(i: usize) -> Word {
        Word(vec![i as u16])
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Position of the first occurrence of `pat` as a contiguous subword.
    pub fn find(&self, pat: &[u16]) -> Option<usize> {
        if pat.is_empty() || pat.len() > self.0.len() {
            return None;
        }
        self.0.windows(pat.len()).position(|w| w == pat)
    }
}

impl Deref for Word {
    type Target = [u16];
    fn deref(&self) -> &[u16] {
        &self.0
    }
}

impl From<Vec<u16>> for Word {
    fn from(v: Vec<u16>) -> Self {
        Word(v)
    }
}

/// A finite linear combination of words over one scalar domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    domain: Domain,
    terms: BTreeMap<Word, Scalar>,
}

impl Poly {
    pub fn zero(domain: Domain) -> Poly {
        Poly {
            domain,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Scalar) -> Poly {
        Poly::monomial(Word::empty(), c)
    }

    pub fn one(domain: Domain) -> Poly {
        Poly::constant(domain.one())
    }

    pub fn monomial(w: Word, c: Scalar) -> Poly {
        let mut p = Poly::zero(c.domain());
        if !c.is_zero() {
            p.terms.insert(w, c);
        }
        p
    }

    pub fn word(w: Word, domain: Domain) -> Poly {
        Poly::monomial(w, domain.one())
    }

    pub fn generator(i: usize, domain: Domain) -> Poly {
        Poly::word(Word::letter(i), domain)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Word, Scalar)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(|| self.domain.zero())
    }

    /// Adds `c * w` in place.
    pub fn add_term(&mut self, w: Word, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        assert_eq!(c.domain(), self.domain, "scalar domains must agree");
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Poly, c: &Scalar) {
        for (w, a) in &other.terms {
            self.add_term(w.clone(), &(a * c));
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.same_domain(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.domain);
        }
        Poly {
            domain: self.domain,
            terms: self.terms.iter().map(|(w, a)| (w.clone(), a * c)).collect(),
        }
    }

    fn same_domain(&self, other: &Poly) -> Result<(), PolyError> {
        if self.domain != other.domain {
            return Err(PolyError::DomainMismatch(self.domain, other.domain));
        }
        Ok(())
    }

    /// Product in the free algebra: concatenation of words, extended bilinearly.
    pub fn free_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.same_domain(other)?;
        let mut out = Poly::zero(self.domain);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), &(a * b));
            }
        }
        Ok(out)
    }

    /// Leading term under the alphabet's monomial order.
    pub fn leading(&self, alphabet: &Alphabet) -> Option<(&Word, &Scalar)> {
        self.terms.iter().max_by(|a, b| alphabet.cmp_words(a.0, b.0))
    }

    /// Largest word weight; `None` for the zero polynomial.
    pub fn weight(&self, alphabet: &Alphabet) -> Option<u64> {
        self.terms.keys().map(|w| alphabet.word_weight(w)).max()
    }

    pub fn homogeneous_component(&self, alphabet: &Alphabet, weight: u64) -> Poly {
        Poly {
            domain: self.domain,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| alphabet.word_weight(w) == weight)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Applies `f` to every coefficient, producing a polynomial over `target`.
    pub fn map_coeffs<E>(
        &self,
        target: Domain,
        mut f: impl FnMut(&Scalar) -> Result<Scalar, E>,
    ) -> Result<Poly, E> {
        let mut out = Poly::zero(target);
        for (w, c) in &self.terms {
            let v = f(c)?;
            out.add_term(w.clone(), &v);
        }
        Ok(out)
    }

    /// Relabels letters through `map`.
    pub fn rename(&self, map: &[u16]) -> Poly {
        let mut out = Poly::zero(self.domain);
        for (w, c) in &self.terms {
            out.add_term(Word(w.iter().map(|&i| map[i as usize]).collect()), c);
        }
        out
    }

    /// Terms sorted by descending monomial order.
    pub fn sorted_terms(&self, alphabet: &Alphabet) -> Vec<(&Word, &Scalar)> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|a, b| alphabet.cmp_words(b.0, a.0));
        t
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, alphabet }
    }
}

macro_rules! poly_op {
    ($tr:ident, $method:ident, $sign:expr) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                assert_eq!(self.domain, rhs.domain, "scalar domains must agree");
                let mut out = self.clone();
                let c: Scalar = $sign(rhs.domain.one());
                out.add_scaled(rhs, &c);
                out
            }
        }
    };
}

poly_op!(Add, add, |x: Scalar| x);
poly_op!(Sub, sub, |x: Scalar| -x);

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.free_mul(rhs).expect("scalar domains must agree")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-self.domain.one())
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    alphabet: &'a Alphabet,
}

/// Formats `c * word` pieces in the presentation expression syntax.
impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.poly.sorted_terms(self.alphabet);
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in terms.into_iter().enumerate() {
            let (neg, body) = match c.signed_term() {
                Some((neg, mag)) => (neg, fmt_coeff_word(&mag.to_string(), mag.is_one(), self.alphabet, w, false)),
                None => (false, fmt_coeff_word(&c.to_string(), false, self.alphabet, w, true)),
            };
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

fn fmt_coeff_word(coeff: &str, unit: bool, alphabet: &Alphabet, w: &Word, wrap: bool) -> String {
    if w.is_empty() {
        return if wrap { format!("({coeff})") } else { coeff.to_string() };
    }
    let word = alphabet.fmt_word(w);
    if unit {
        word
    } else if wrap {
        format!("({coeff})*{word}")
    } else {
        format!("{coeff}*{word}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Alphabet {
        Alphabet::new(vec![GeneratorInfo::new("x", 1, 0), GeneratorInfo::new("y", 1, 0)]).unwrap()
    }

    #[test]
    fn word_weights() {
        let a = xy();
        assert_eq!(a.word_weight(&[]), 0);
        assert_eq!(a.word_weight(&[0, 1]), 2);
        let b = Alphabet::new(vec![
            GeneratorInfo::new("x1", 1, 0),
            GeneratorInfo::new("y1", 1, 0),
            GeneratorInfo::new("x2", 2, 0),
            GeneratorInfo::new("y2", 2, 0),
        ])
        .unwrap();
        assert_eq!(b.word_weight(&[2, 3]), 4);
    }

    #[test]
    fn free_multiplication_examples() {
        let d = Domain::Rational;
        let x = Poly::generator(0, d);
        let y = Poly::generator(1, d);
        let s = &x + &y;
        assert_eq!(&s * &Poly::one(d), s);
        assert_eq!(&x * &y, Poly::word(Word(vec![0, 1]), d));
        let prod = &(&x + &y) * &(&x - &y);
        let mut expect = Poly::zero(d);
        expect.add_term(Word(vec![0, 0]), &d.one());
        expect.add_term(Word(vec![0, 1]), &d.from_int(-1));
        expect.add_term(Word(vec![1, 0]), &d.one());
        expect.add_term(Word(vec![1, 1]), &d.from_int(-1));
        assert_eq!(prod, expect);
    }

    #[test]
    fn free_mul_rejects_mixed_domains() {
        let x = Poly::generator(0, Domain::Rational);
        let y = Poly::generator(0, Domain::Cyclotomic(3));
        assert!(matches!(x.free_mul(&y), Err(PolyError::DomainMismatch(..))));
    }

    #[test]
    fn order_examples() {
        let a = xy();
        assert_eq!(a.cmp_words(&[1, 0], &[0, 1]), Ordering::Greater);
        assert_eq!(a.cmp_words(&[1], &[0, 0]), Ordering::Less);
        let rev = Alphabet::with_precedence(vec![
            GeneratorInfo { precedence: 1, ..GeneratorInfo::new("x", 1, 0) },
            GeneratorInfo { precedence: 0, ..GeneratorInfo::new("y", 1, 0) },
        ])
        .unwrap();
        assert_eq!(rev.cmp_words(&[0, 1], &[1, 0]), Ordering::Greater);
    }

    #[test]
    fn duplicate_names_rejected() {
        let r = Alphabet::new(vec![GeneratorInfo::new("x", 1, 0), GeneratorInfo::new("x", 1, 0)]);
        assert_eq!(r, Err(PolyError::DuplicateGenerator("x".into())));
    }

    #[test]
    fn display_round_trip_shapes() {
        let a = xy();
        let d = Domain::Cyclotomic(3);
        let z = d.zeta(3).unwrap();
        let mut p = Poly::word(Word(vec![0, 1]), d);
        p.add_term(Word(vec![1, 0]), &-&z);
        p.add_term(Word::empty(), &d.from_int(-1));
        assert_eq!(p.display(&a).to_string(), "-zeta(3)*y*x + x*y - 1");
        let q = Poly::monomial(Word(vec![0]), &z * &z);
        assert_eq!(q.display(&a).to_string(), "(-1 - zeta(3))*x");
    }
}
