//! Oriented rewrite systems, normal forms, and diamond-lemma confluence checks.
//!
//! Every relation is oriented so that its leading word (in the alphabet's
//! monomial order) rewrites to a combination of strictly smaller words. With
//! that order-compatibility reduction always terminates, and a system is
//! confluent exactly when every overlap and inclusion ambiguity between rule
//! left-hand sides resolves to a common normal form. The irreducible words
//! then form a basis of the algebra.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

use crate::ncpoly::{Alphabet, Poly, Word};
use crate::scalars::Domain;

/// Default memo capacity; `NCFILT_MEMO_CAP` overrides it.
pub const DEFAULT_MEMO_CAP: usize = 1 << 20;
const MAX_NORMAL_WORD_LEN: usize = 1024;
const MAX_NORMAL_WORDS: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("relation {index} cannot be oriented: {reason}")]
    NotOrientable { index: usize, reason: String },
    #[error("relations {first} and {second} both orient onto the leading word {lhs}")]
    DuplicateLhs { first: usize, second: usize, lhs: String },
    #[error("relation {index} lives over {found}, expected {expected}")]
    DomainMismatch { index: usize, expected: Domain, found: Domain },
    #[error("confluence is certified only up to weight {certified:?}, but weight {needed} is required")]
    ConfluenceNotEstablished { needed: u64, certified: Option<u64> },
    #[error("normal words of weight <= {weight} are not finite in number (or exceed the enumeration cap)")]
    NotLocallyFinite { weight: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub lhs: Word,
    pub rhs: Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapKind {
    /// A proper suffix of the first lhs equals a proper prefix of the second.
    SuffixPrefix,
    /// The second lhs occurs inside the first.
    Inclusion,
    /// A rule whose right-hand side rewrites back to its own lhs.
    Loop,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapWitness {
    pub word: Word,
    pub rules: (usize, usize),
    pub kind: OverlapKind,
    /// Difference of the two reductions (first minus second).
    pub difference: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfluenceStatus {
    Unchecked,
    ConfluentUpTo(u64),
    Nonconfluent(OverlapWitness),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub overlap: String,
    pub rules: [usize; 2],
    pub kind: OverlapKind,
    pub difference: String,
}

/// Serializes to `{status, bound, overlaps_checked, witness?}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfluenceReport {
    pub status: String,
    pub bound: u64,
    pub overlaps_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
}

impl ConfluenceReport {
    pub fn is_confluent(&self) -> bool {
        self.witness.is_none()
    }
}

struct Overlap {
    word: Word,
    rules: (usize, usize),
    kind: OverlapKind,
    // (left factor, right factor) around each side's rhs
    first: (Word, Word),
    second: (Word, Word),
}

pub struct RewriteSystem {
    alphabet: Alphabet,
    domain: Domain,
    rules: Vec<RewriteRule>,
    status: ConfluenceStatus,
    order_compatible: bool,
    by_first: Vec<Vec<usize>>,
    memo: Mutex<HashMap<Word, Arc<Poly>>>,
    memo_cap: usize,
}

impl Clone for RewriteSystem {
    fn clone(&self) -> Self {
        RewriteSystem {
            alphabet: self.alphabet.clone(),
            domain: self.domain,
            rules: self.rules.clone(),
            status: self.status.clone(),
            order_compatible: self.order_compatible,
            by_first: self.by_first.clone(),
            memo: Mutex::new(HashMap::new()),
            memo_cap: self.memo_cap,
        }
    }
}

impl std::fmt::Debug for RewriteSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RewriteSystem")
            .field("rules", &self.rules.len())
            .field("status", &self.status)
            .finish()
    }
}

fn memo_cap_from_env() -> usize {
    std::env::var("NCFILT_MEMO_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MEMO_CAP)
}

/// Orients each relation as `leading word -> rest / (-leading coefficient)`.
pub fn orient(relations: &[Poly], alphabet: &Alphabet, domain: Domain) -> Result<RewriteSystem, RewriteError> {
    let mut rules: Vec<RewriteRule> = Vec::with_capacity(relations.len());
    for (index, rel) in relations.iter().enumerate() {
        if rel.domain() != domain {
            return Err(RewriteError::DomainMismatch {
                index,
                expected: domain,
                found: rel.domain(),
            });
        }
        let Some((lead, c)) = rel.leading(alphabet) else {
            return Err(RewriteError::NotOrientable {
                index,
                reason: "relation is zero".into(),
            });
        };
        let lead = lead.clone();
        let inv = c.inv().map_err(|_| RewriteError::NotOrientable {
            index,
            reason: "leading coefficient is not invertible".into(),
        })?;
        let mut rhs = rel.scale(&-&inv);
        rhs.add_term(lead.clone(), &domain.one());
        if rhs.terms().any(|(w, _)| *w == lead) {
            return Err(RewriteError::NotOrientable {
                index,
                reason: "remainder contains the leading word".into(),
            });
        }
        if let Some(first) = rules.iter().position(|r| r.lhs == lead) {
            return Err(RewriteError::DuplicateLhs {
                first,
                second: index,
                lhs: alphabet.fmt_word(&lead),
            });
        }
        rules.push(RewriteRule { lhs: lead, rhs });
    }
    Ok(RewriteSystem::build(alphabet.clone(), domain, rules, true))
}

impl RewriteSystem {
    fn build(alphabet: Alphabet, domain: Domain, rules: Vec<RewriteRule>, order_compatible: bool) -> Self {
        let mut by_first = vec![vec![]; alphabet.len()];
        for (i, r) in rules.iter().enumerate() {
            if let Some(&a) = r.lhs.first() {
                by_first[a as usize].push(i);
            }
        }
        RewriteSystem {
            alphabet,
            domain,
            rules,
            status: ConfluenceStatus::Unchecked,
            order_compatible,
            by_first,
            memo: Mutex::new(HashMap::new()),
            memo_cap: memo_cap_from_env(),
        }
    }

    /// Installs rules as given, without orientation. Order-compatibility is
    /// recorded but not enforced; such systems are only meant for
    /// [`RewriteSystem::check_confluence`], which then looks for rewrite loops.
    pub fn from_rules_unchecked(alphabet: Alphabet, domain: Domain, rules: Vec<RewriteRule>) -> Self {
        let compatible = rules.iter().all(|r| {
            !r.lhs.is_empty()
                && r.rhs
                    .terms()
                    .all(|(w, _)| alphabet.cmp_words(w, &r.lhs) == std::cmp::Ordering::Less)
        });
        Self::build(alphabet, domain, rules, compatible)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn status(&self) -> &ConfluenceStatus {
        &self.status
    }

    pub fn is_order_compatible(&self) -> bool {
        self.order_compatible
    }

    pub fn set_memo_cap(&mut self, cap: usize) {
        self.memo_cap = cap;
    }

    /// Highest weight up to which confluence has been certified.
    pub fn certified_bound(&self) -> Option<u64> {
        match self.status {
            ConfluenceStatus::ConfluentUpTo(w) => Some(w),
            _ => None,
        }
    }

    /// Errors unless normal words of weight `<= n` are certified to be a basis,
    /// which requires confluence up to `2n`.
    pub fn require_basis(&self, n: u64) -> Result<(), RewriteError> {
        self.require_confluence(2 * n)
    }

    pub fn require_confluence(&self, needed: u64) -> Result<(), RewriteError> {
        match self.certified_bound() {
            Some(w) if w >= needed => Ok(()),
            certified => Err(RewriteError::ConfluenceNotEstablished { needed, certified }),
        }
    }

    /// Leftmost occurrence of a rule lhs; ties at a position go to the lowest
    /// rule index.
    fn leftmost_redex(&self, w: &[u16]) -> Option<(usize, usize)> {
        for start in 0..w.len() {
            for &ri in &self.by_first[w[start] as usize] {
                if w[start..].starts_with(&self.rules[ri].lhs) {
                    return Some((start, ri));
                }
            }
        }
        None
    }

    pub fn is_irreducible(&self, w: &[u16]) -> bool {
        self.leftmost_redex(w).is_none()
    }

    fn rewrite_at(&self, w: &[u16], start: usize, ri: usize) -> Poly {
        let rule = &self.rules[ri];
        let prefix = Word(w[..start].to_vec());
        let suffix = Word(w[start + rule.lhs.len()..].to_vec());
        let mut out = Poly::zero(self.domain);
        for (m, c) in rule.rhs.terms() {
            out.add_term(prefix.concat(m).concat(&suffix), c);
        }
        out
    }

    fn normal_form_word(&self, w: &Word, depth: usize) -> Arc<Poly> {
        if let Some(p) = self.memo.lock().unwrap().get(w) {
            return p.clone();
        }
        assert!(
            depth < 100_000,
            "rewriting did not terminate; the system is not order-compatible"
        );
        let result = match self.leftmost_redex(w) {
            None => Poly::word(w.clone(), self.domain),
            Some((start, ri)) => {
                let mut acc = Poly::zero(self.domain);
                for (m, c) in self.rewrite_at(w, start, ri).terms() {
                    let nf = self.normal_form_word(m, depth + 1);
                    acc.add_scaled(&nf, c);
                }
                acc
            }
        };
        let result = Arc::new(result);
        let mut memo = self.memo.lock().unwrap();
        if memo.len() < self.memo_cap {
            memo.insert(w.clone(), result.clone());
        }
        result
    }

    /// Exhaustive leftmost reduction. Linear in `p`; no monomial of the result
    /// contains a rule lhs.
    pub fn normal_form(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero(self.domain);
        for (w, c) in p.terms() {
            out.add_scaled(&self.normal_form_word(w, 0), c);
        }
        out
    }

    pub fn normal_form_of_word(&self, w: &Word) -> Poly {
        (*self.normal_form_word(w, 0)).clone()
    }

    fn overlaps(&self) -> Vec<Overlap> {
        let mut out = vec![];
        for (i, ri) in self.rules.iter().enumerate() {
            for (j, rj) in self.rules.iter().enumerate() {
                let (a, b) = (&ri.lhs, &rj.lhs);
                for k in 1..a.len().min(b.len()) {
                    if a[a.len() - k..] == b[..k] {
                        out.push(Overlap {
                            word: Word([&a[..], &b[k..]].concat()),
                            rules: (i, j),
                            kind: OverlapKind::SuffixPrefix,
                            first: (Word::empty(), Word(b[k..].to_vec())),
                            second: (Word(a[..a.len() - k].to_vec()), Word::empty()),
                        });
                    }
                }
                if i != j && b.len() <= a.len() {
                    for s in 0..=(a.len() - b.len()) {
                        if a[s..s + b.len()] == b[..] {
                            out.push(Overlap {
                                word: a.clone(),
                                rules: (i, j),
                                kind: OverlapKind::Inclusion,
                                first: (Word::empty(), Word::empty()),
                                second: (Word(a[..s].to_vec()), Word(a[s + b.len()..].to_vec())),
                            });
                        }
                    }
                }
            }
        }
        out.sort_by(|x, y| {
            self.alphabet
                .cmp_words(&x.word, &y.word)
                .then(x.rules.cmp(&y.rules))
                .then((x.kind as u8).cmp(&(y.kind as u8)))
                .then(x.second.0.len().cmp(&y.second.0.len()))
        });
        out
    }

    fn sandwich(&self, left: &Word, p: &Poly, right: &Word) -> Poly {
        let mut out = Poly::zero(self.domain);
        for (m, c) in p.terms() {
            out.add_term(left.concat(m).concat(right), c);
        }
        out
    }

    /// Looks for a rule whose right-hand side rewrites back onto its own lhs.
    fn find_loop(&self, step_cap: usize) -> Option<OverlapWitness> {
        for (i, rule) in self.rules.iter().enumerate() {
            let mut p = rule.rhs.clone();
            for _ in 0..step_cap {
                let next = p.terms().find_map(|(w, c)| {
                    self.leftmost_redex(w).map(|(s, ri)| (w.clone(), c.clone(), s, ri))
                });
                let Some((w, c, s, ri)) = next else { break };
                let mut q = p.clone();
                q.add_term(w.clone(), &-&c);
                q.add_scaled(&self.rewrite_at(&w, s, ri), &c);
                p = q;
                let back = p.coeff(&rule.lhs);
                if !back.is_zero() {
                    let mut difference = p.clone();
                    difference.add_term(rule.lhs.clone(), &-&back);
                    return Some(OverlapWitness {
                        word: rule.lhs.clone(),
                        rules: (i, ri),
                        kind: OverlapKind::Loop,
                        difference,
                    });
                }
            }
        }
        None
    }

    /// Resolves every ambiguity whose overlap word has weight `<= bound`.
    /// Sets the status to `ConfluentUpTo(bound)` (keeping any larger certified
    /// bound) or `Nonconfluent` with the first failing overlap.
    pub fn check_confluence(&mut self, bound: u64) -> ConfluenceReport {
        if !self.order_compatible {
            if let Some(w) = self.find_loop(10_000) {
                return self.finish(bound, 0, Some(w));
            }
        }
        let mut checked = 0;
        for ov in self.overlaps() {
            if self.alphabet.word_weight(&ov.word) > bound {
                continue;
            }
            checked += 1;
            let (i, j) = ov.rules;
            let one = self.normal_form(&self.sandwich(&ov.first.0, &self.rules[i].rhs, &ov.first.1));
            let two = self.normal_form(&self.sandwich(&ov.second.0, &self.rules[j].rhs, &ov.second.1));
            if one != two {
                let witness = OverlapWitness {
                    word: ov.word,
                    rules: ov.rules,
                    kind: ov.kind,
                    difference: &one - &two,
                };
                return self.finish(bound, checked, Some(witness));
            }
        }
        self.finish(bound, checked, None)
    }

    fn finish(&mut self, bound: u64, checked: usize, witness: Option<OverlapWitness>) -> ConfluenceReport {
        let report = ConfluenceReport {
            status: if witness.is_some() { "nonconfluent" } else { "confluent" }.into(),
            bound,
            overlaps_checked: checked,
            witness: witness.as_ref().map(|w| WitnessReport {
                overlap: self.alphabet.fmt_word(&w.word),
                rules: [w.rules.0, w.rules.1],
                kind: w.kind,
                difference: w.difference.display(&self.alphabet).to_string(),
            }),
        };
        self.status = match witness {
            Some(w) => ConfluenceStatus::Nonconfluent(w),
            None => match self.status {
                ConfluenceStatus::ConfluentUpTo(prev) if prev > bound => ConfluenceStatus::ConfluentUpTo(prev),
                _ => ConfluenceStatus::ConfluentUpTo(bound),
            },
        };
        report
    }

    /// Irreducible words of weight `<= n`, ascending in the monomial order.
    /// Does not require confluence.
    pub fn irreducible_words_upto(&self, n: u64) -> Result<Vec<Word>, RewriteError> {
        let mut out = vec![];
        let mut stack = vec![Word::empty()];
        while let Some(w) = stack.pop() {
            let weight = self.alphabet.word_weight(&w);
            for a in 0..self.alphabet.len() {
                let wa = weight + self.alphabet.weight(a) as u64;
                if wa > n {
                    continue;
                }
                let mut next = w.0.clone();
                next.push(a as u16);
                // the prefix is irreducible, so only suffixes can match
                let reducible = self.rules.iter().any(|r| next.ends_with(&r.lhs));
                if !reducible {
                    if next.len() > MAX_NORMAL_WORD_LEN {
                        return Err(RewriteError::NotLocallyFinite { weight: n });
                    }
                    stack.push(Word(next));
                }
            }
            out.push(w);
            if out.len() > MAX_NORMAL_WORDS {
                return Err(RewriteError::NotLocallyFinite { weight: n });
            }
        }
        out.sort_by(|a, b| self.alphabet.cmp_words(a, b));
        Ok(out)
    }

    /// Normal words of weight `<= n`; a basis of `F_n` once confluence to `2n`
    /// is certified.
    pub fn normal_words_upto(&self, n: u64) -> Result<Vec<Word>, RewriteError> {
        self.require_basis(n)?;
        self.irreducible_words_upto(n)
    }

    pub fn dim_upto(&self, n: u64) -> Result<u64, RewriteError> {
        Ok(self.normal_words_upto(n)?.len() as u64)
    }

    /// `dim F_k` for `k = 0..=n`.
    pub fn dim_table(&self, n: u64) -> Result<Vec<u64>, RewriteError> {
        let words = self.normal_words_upto(n)?;
        let mut exact = vec![0u64; n as usize + 1];
        for w in &words {
            exact[self.alphabet.word_weight(w) as usize] += 1;
        }
        let mut acc = 0;
        Ok(exact
            .into_iter()
            .map(|e| {
                acc += e;
                acc
            })
            .collect())
    }
}
