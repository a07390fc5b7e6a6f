//! The element `f_G`, truncated membership in the ideal `(f_G)`, pertinency
//! certificates, quotient growth, and the Auslander map.
//!
//! Sandwiches `(a # g) f_G (b # h) = sum_m a m(b) # m h` do not depend on `g`,
//! so the spanning set only runs over left words `a`, right words `b` and
//! right group elements `h`.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{skew_mul, ActionError, FiniteGroup, SkewPoly};
use crate::format::parse_scalar;
use crate::linalg::{Echelon, Insertion, SparseVec};
use crate::ncpoly::{Poly, Word};
use crate::rewrite::RewriteError;
use crate::scalars::Scalar;
use crate::zoo::{estimate_gk_dim, ZooError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuslanderError {
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error("target has weight {weight} above the bound {bound}")]
    TargetAboveBound { weight: u64, bound: u64 },
    #[error("witness does not re-expand to its target")]
    WitnessMismatch,
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
}

/// `sum_g 1 # g`.
pub fn f_g(group: &FiniteGroup) -> SkewPoly {
    let mut f = SkewPoly::zero(group.domain());
    for g in 0..group.order() {
        f.add_term(Word::empty(), g, &group.domain().one());
    }
    f
}

/// One sandwich `coeff * (u_word # u_group) f_G (v_word # v_group)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SandwichTerm {
    pub u_word: Word,
    pub u_group: usize,
    pub v_word: Word,
    pub v_group: usize,
    pub coeff: Scalar,
}

/// A combination of sandwiches equal to `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipWitness {
    pub target: SkewPoly,
    pub terms: Vec<SandwichTerm>,
}

impl MembershipWitness {
    /// Re-expands the sandwiches through `skew_mul` and compares with the
    /// target.
    pub fn new(target: SkewPoly, terms: Vec<SandwichTerm>, group: &FiniteGroup) -> Result<Self, AuslanderError> {
        let w = MembershipWitness { target, terms };
        if w.expand(group)? != w.target {
            return Err(AuslanderError::WitnessMismatch);
        }
        Ok(w)
    }

    pub fn expand(&self, group: &FiniteGroup) -> Result<SkewPoly, AuslanderError> {
        let f = f_g(group);
        let mut sum = SkewPoly::zero(group.domain());
        for t in &self.terms {
            let u = SkewPoly::monomial(t.u_word.clone(), t.u_group, group.domain().one());
            let v = SkewPoly::monomial(t.v_word.clone(), t.v_group, group.domain().one());
            let uf = skew_mul(&u, &f, group)?;
            sum.add_scaled(&skew_mul(&uf, &v, group)?, &t.coeff);
        }
        Ok(sum)
    }

    pub fn verify(&self, group: &FiniteGroup) -> bool {
        self.expand(group).is_ok_and(|s| s == self.target)
    }
}

/// The span of all sandwiches of weight `<= bound`, kept in echelon form.
#[derive(Debug, Clone)]
pub struct SandwichSpan<'g> {
    group: &'g FiniteGroup,
    bound: u64,
    words: Vec<Word>,
    rank_of: HashMap<Word, usize>,
    columns: Vec<(Word, Word, usize)>,
    echelon: Echelon,
}

impl<'g> SandwichSpan<'g> {
    /// Requires confluence up to `2 * bound`.
    pub fn build(group: &'g FiniteGroup, bound: u64) -> Result<Self, AuslanderError> {
        let algebra = group.algebra();
        algebra.system().require_basis(bound)?;
        let alphabet = algebra.alphabet();
        let mut words = algebra.system().normal_words_upto(bound)?;
        words.sort_by(|a, b| alphabet.cmp_words(a, b));
        let rank_of: HashMap<Word, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let weight = |w: &Word| alphabet.word_weight(w);
        let mut pairs: Vec<(u64, usize, usize)> = vec![];
        for (i, a) in words.iter().enumerate() {
            for (j, b) in words.iter().enumerate() {
                let s = weight(a) + weight(b);
                if s <= bound {
                    pairs.push((s, i, j));
                }
            }
        }
        pairs.sort();
        let n = group.order();
        let mut span = SandwichSpan {
            group,
            bound,
            words: words.clone(),
            rank_of,
            columns: vec![],
            echelon: Echelon::new(group.domain()),
        };
        for (_, i, j) in pairs {
            // sum_m a m(b) # m, right-multiplied by each h afterwards
            let mut images: Vec<Poly> = Vec::with_capacity(n);
            for m in 0..n {
                let mb = group.element(m).apply_word(&words[j]);
                images.push(algebra.mul(&Poly::word(words[i].clone(), group.domain()), &mb));
            }
            for h in 0..n {
                let mut v = SparseVec::new();
                for (m, img) in images.iter().enumerate() {
                    let k = group.mul(m, h);
                    for (w, c) in img.terms() {
                        v.insert(span.coord(w, k), c.clone());
                    }
                }
                span.columns.push((words[i].clone(), words[j].clone(), h));
                span.echelon.insert(v);
            }
        }
        Ok(span)
    }

    fn coord(&self, w: &Word, g: usize) -> usize {
        self.rank_of[w] * self.group.order() + g
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    /// A witness for `target`, or `None` when it is outside the span.
    pub fn solve(&self, target: &SkewPoly) -> Result<Option<MembershipWitness>, AuslanderError> {
        let alphabet = self.group.algebra().alphabet();
        let mut v = SparseVec::new();
        for ((w, g), c) in target.terms() {
            let weight = alphabet.word_weight(w);
            if weight > self.bound || !self.rank_of.contains_key(w) {
                return Err(AuslanderError::TargetAboveBound {
                    weight,
                    bound: self.bound,
                });
            }
            v.insert(self.coord(w, *g), c.clone());
        }
        let Some(combo) = self.echelon.solve(&v) else {
            return Ok(None);
        };
        let terms = combo
            .into_iter()
            .map(|(k, coeff)| {
                let (a, b, h) = &self.columns[k];
                SandwichTerm {
                    u_word: a.clone(),
                    u_group: 0,
                    v_word: b.clone(),
                    v_group: *h,
                    coeff,
                }
            })
            .collect();
        Ok(Some(MembershipWitness::new(target.clone(), terms, self.group)?))
    }

    /// `dim (F_n # G) / (span ∩ F_n # G)` for `n = 0..=bound`.
    pub fn quotient_dims(&self) -> Vec<u64> {
        let alphabet = self.group.algebra().alphabet();
        let g = self.group.order() as u64;
        let mut pivots: Vec<usize> = self.echelon.pivot_coordinates().collect();
        pivots.sort_unstable();
        (0..=self.bound)
            .map(|n| {
                let words_n = self.words.iter().filter(|w| alphabet.word_weight(w) <= n).count();
                let limit = words_n * self.group.order();
                let inside = pivots.iter().take_while(|&&p| p < limit).count() as u64;
                g * words_n as u64 - inside
            })
            .collect()
    }
}

/// Truncated membership of `target` in `(f_G)`: `Ok(None)` only means no
/// witness within `bound`.
pub fn ideal_membership(
    target: &SkewPoly,
    group: &FiniteGroup,
    bound: u64,
) -> Result<Option<MembershipWitness>, AuslanderError> {
    SandwichSpan::build(group, bound)?.solve(target)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateEntry {
    pub generator: String,
    pub exponent: u64,
    pub witness: MembershipWitness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PertinencyCertificate {
    pub entries: Vec<CertificateEntry>,
    pub bound: u64,
    pub gk_dim: Option<u32>,
    /// Whether the words avoiding every rule lhs and every certified power
    /// form a finite set.
    pub quotient_finite: bool,
    pub conclusion: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PertinencyOutcome {
    Certified(PertinencyCertificate),
    /// Some generator has no power in `(f_G)` within the search limits.
    Inconclusive {
        bound: u64,
        failed: Vec<String>,
        partial: Vec<CertificateEntry>,
    },
}

/// Searches `x_i^N # e` in `(f_G)` for `N = 1..=cap` and each generator.
pub fn pertinency_certificate(group: &FiniteGroup, cap: u64, bound: u64) -> Result<PertinencyOutcome, AuslanderError> {
    let span = SandwichSpan::build(group, bound)?;
    let algebra = group.algebra();
    let alphabet = algebra.alphabet();
    let mut entries = vec![];
    let mut failed = vec![];
    for i in 0..alphabet.len() {
        let mut found = None;
        for n in 1..=cap {
            let w = n * alphabet.weight(i) as u64;
            if w > bound {
                break;
            }
            let power = algebra.normal_form_of_word(&Word(vec![i as u16; n as usize]));
            if let Some(witness) = span.solve(&SkewPoly::from_poly(&power, 0))? {
                found = Some((n, witness));
                break;
            }
        }
        match found {
            Some((exponent, witness)) => entries.push(CertificateEntry {
                generator: alphabet.get(i).name.clone(),
                exponent,
                witness,
            }),
            None => failed.push(alphabet.get(i).name.clone()),
        }
    }
    if !failed.is_empty() {
        return Ok(PertinencyOutcome::Inconclusive {
            bound,
            failed,
            partial: entries,
        });
    }
    let mut patterns: Vec<Vec<u16>> = algebra.system().rules().iter().map(|r| r.lhs.0.clone()).collect();
    for (i, e) in entries.iter().enumerate() {
        patterns.push(vec![i as u16; e.exponent as usize]);
    }
    let finite = avoiding_words_finite(alphabet.len(), &patterns);
    let (gk, _) = estimate_gk_dim(algebra, bound / 2)?;
    let conclusion = conclusion_text(finite, gk);
    Ok(PertinencyOutcome::Certified(PertinencyCertificate {
        entries,
        bound,
        gk_dim: gk,
        quotient_finite: finite,
        conclusion,
    }))
}

pub fn conclusion_text(finite: bool, gk: Option<u32>) -> String {
    if !finite {
        return "generator powers lie in (f_G) but the avoiding words are infinite; no conclusion".into();
    }
    let mut s = "quotient finite-dimensional => GKdim (A#G)/(f_G) = 0 => p(A,G) = GKdim A".to_string();
    if let Some(d) = gk {
        s.push_str(&format!(" = {d}"));
        if d >= 2 {
            s.push_str("; p >= 2 => the Auslander map is an isomorphism for this pair");
        }
    }
    s
}

/// Whether only finitely many words avoid every pattern as a factor. The
/// avoiding words are paths in the automaton whose states are the last
/// `L - 1` letters; the language is finite exactly when no cycle is
/// reachable from the empty state.
pub fn avoiding_words_finite(letters: usize, patterns: &[Vec<u16>]) -> bool {
    if patterns.iter().any(|p| p.is_empty()) {
        return true;
    }
    let l = patterns.iter().map(|p| p.len()).max().unwrap_or(1);
    let set: HashSet<&[u16]> = patterns.iter().map(|p| p.as_slice()).collect();
    let keep = l.saturating_sub(1);
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    let mut marks: HashMap<Vec<u16>, Mark> = HashMap::new();
    // iterative DFS with an explicit stack of (state, next letter)
    let mut stack: Vec<(Vec<u16>, usize)> = vec![(vec![], 0)];
    marks.insert(vec![], Mark::Active);
    while let Some((state, next)) = stack.pop() {
        if next == letters {
            marks.insert(state, Mark::Done);
            continue;
        }
        stack.push((state.clone(), next + 1));
        let mut w = state.clone();
        w.push(next as u16);
        if (1..=w.len()).any(|k| set.contains(&w[w.len() - k..])) {
            continue;
        }
        let child: Vec<u16> = w[w.len().saturating_sub(keep)..].to_vec();
        match marks.get(&child) {
            Some(Mark::Active) => return false,
            Some(Mark::Done) => {}
            None => {
                marks.insert(child.clone(), Mark::Active);
                stack.push((child, 0));
            }
        }
    }
    true
}

/// Dimensions of the weight-`<= n` slices of `(A # G) / (f_G)`, truncated at
/// `bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthSeries {
    pub bound: u64,
    pub dims: Vec<u64>,
    /// The last three entries agree.
    pub gkdim0_evidence: bool,
}

pub fn quotient_growth(group: &FiniteGroup, bound: u64) -> Result<GrowthSeries, AuslanderError> {
    let span = SandwichSpan::build(group, bound)?;
    let dims = span.quotient_dims();
    let gkdim0_evidence = dims.len() >= 3 && dims[dims.len() - 3..].windows(2).all(|w| w[0] == w[1]);
    Ok(GrowthSeries {
        bound,
        dims,
        gkdim0_evidence,
    })
}

/// `sum a g(b)` over the terms `a # g` of `u`, in normal form.
pub fn auslander_apply(u: &SkewPoly, b: &Poly, group: &FiniteGroup) -> Result<Poly, AuslanderError> {
    let d = group.domain();
    if u.domain() != d || b.domain() != d {
        return Err(ActionError::DomainMismatch(d, if u.domain() != d { u.domain() } else { b.domain() }).into());
    }
    let algebra = group.algebra();
    let mut out = Poly::zero(d);
    for ((a, g), c) in u.terms() {
        if *g >= group.order() {
            return Err(ActionError::UnknownElement(*g).into());
        }
        let gb = group.element(*g).apply(b);
        out.add_scaled(&algebra.mul(&Poly::word(a.clone(), d), &gb), c);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectivityReport {
    pub n: u64,
    pub m: u64,
    pub source_dim: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    pub kernel_witness: Option<SkewPoly>,
}

/// Rank of `u ↦ (b ↦ u(b))` from the weight-`<= n` slice of `A # G` into
/// maps from the weight-`<= m` slice of `A` to the weight-`<= n + m` slice.
pub fn truncated_injectivity(group: &FiniteGroup, n: u64, m: u64) -> Result<InjectivityReport, AuslanderError> {
    let algebra = group.algebra();
    algebra.system().require_basis(n + m)?;
    let alphabet = algebra.alphabet();
    let mut words = algebra.system().normal_words_upto(n + m)?;
    words.sort_by(|a, b| alphabet.cmp_words(a, b));
    let rank_of: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let src: Vec<&Word> = words.iter().filter(|w| alphabet.word_weight(w) <= n).collect();
    let probes: Vec<&Word> = words.iter().filter(|w| alphabet.word_weight(w) <= m).collect();
    let d = group.domain();
    let width = words.len();
    let mut basis: Vec<(Word, usize)> = vec![];
    let mut echelon = Echelon::new(d);
    let mut witness = None;
    for a in &src {
        for g in 0..group.order() {
            let u = SkewPoly::monomial((*a).clone(), g, d.one());
            let mut v = SparseVec::new();
            for (bi, b) in probes.iter().enumerate() {
                let img = auslander_apply(&u, &Poly::word((*b).clone(), d), group)?;
                for (w, c) in img.terms() {
                    v.insert(bi * width + rank_of[w], c.clone());
                }
            }
            basis.push(((*a).clone(), g));
            if let Insertion::Dependent(combo) = echelon.insert(v) {
                if witness.is_none() {
                    let mut k = SkewPoly::zero(d);
                    for (i, c) in combo {
                        k.add_term(basis[i].0.clone(), basis[i].1, &c);
                    }
                    witness = Some(k);
                }
            }
        }
    }
    Ok(InjectivityReport {
        n,
        m,
        source_dim: basis.len(),
        rank: echelon.rank(),
        kernel_dim: basis.len() - echelon.rank(),
        kernel_witness: witness,
    })
}

/// Serialized sandwich: `(u_word, u_group, v_word, v_group, coeff)` with
/// words in `x*y` syntax and group elements by index.
pub type SandwichJson = (String, usize, String, usize, String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntryJson {
    pub generator: String,
    pub exponent: u64,
    pub witness: Vec<SandwichJson>,
    pub bound: u64,
    pub conclusion: String,
}

impl CertificateEntry {
    pub fn to_json(&self, group: &FiniteGroup, bound: u64, conclusion: &str) -> CertificateEntryJson {
        let alphabet = group.algebra().alphabet();
        CertificateEntryJson {
            generator: self.generator.clone(),
            exponent: self.exponent,
            witness: self
                .witness
                .terms
                .iter()
                .map(|t| {
                    (
                        alphabet.fmt_word(&t.u_word),
                        t.u_group,
                        alphabet.fmt_word(&t.v_word),
                        t.v_group,
                        t.coeff.to_string(),
                    )
                })
                .collect(),
            bound,
            conclusion: conclusion.to_string(),
        }
    }
}

fn parse_word(text: &str, group: &FiniteGroup) -> Result<Word, AuslanderError> {
    let alphabet = group.algebra().alphabet();
    if text.trim() == "1" {
        return Ok(Word::empty());
    }
    text.split('*')
        .map(|name| {
            alphabet
                .index_of(name.trim())
                .map(|i| i as u16)
                .ok_or_else(|| AuslanderError::MalformedCertificate(format!("unknown generator `{}`", name.trim())))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Word)
}

/// Rebuilds a certificate entry and re-expands its witness against
/// `x^exponent # e`.
pub fn verify_certificate_entry(entry: &CertificateEntryJson, group: &FiniteGroup) -> Result<CertificateEntry, AuslanderError> {
    let algebra = group.algebra();
    let d = group.domain();
    let i = algebra
        .alphabet()
        .index_of(&entry.generator)
        .ok_or_else(|| AuslanderError::MalformedCertificate(format!("unknown generator `{}`", entry.generator)))?;
    if entry.exponent == 0 {
        return Err(AuslanderError::MalformedCertificate("exponent must be positive".into()));
    }
    let power = algebra.normal_form_of_word(&Word(vec![i as u16; entry.exponent as usize]));
    let mut terms = vec![];
    for (u_word, u_group, v_word, v_group, coeff) in &entry.witness {
        if *u_group >= group.order() || *v_group >= group.order() {
            return Err(AuslanderError::MalformedCertificate(format!(
                "group element index out of range for a group of order {}",
                group.order()
            )));
        }
        let coeff = parse_scalar(coeff, d).map_err(|e| AuslanderError::MalformedCertificate(e.to_string()))?;
        terms.push(SandwichTerm {
            u_word: parse_word(u_word, group)?,
            u_group: *u_group,
            v_word: parse_word(v_word, group)?,
            v_group: *v_group,
            coeff,
        });
    }
    let witness = MembershipWitness::new(SkewPoly::from_poly(&power, 0), terms, group)?;
    Ok(CertificateEntry {
        generator: entry.generator.clone(),
        exponent: entry.exponent,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::action::{generate_group, mk_automorphism, reynolds};
    use crate::scalars::{mk_root_of_unity, Domain};
    use crate::zoo::{gl2_family, polynomial_ring, AlgebraHandle, Gl2Kind};

    fn kxy(bound: u64) -> Arc<AlgebraHandle> {
        Arc::new(AlgebraHandle::certified(polynomial_ring(&["x", "y"], Domain::Rational).unwrap(), bound).unwrap())
    }

    fn diag(a: &Arc<AlgebraHandle>, sx: &Scalar, sy: &Scalar) -> FiniteGroup {
        let d = a.domain();
        let phi = mk_automorphism(a, vec![Poly::generator(0, d).scale(sx), Poly::generator(1, d).scale(sy)]).unwrap();
        generate_group(a, &[phi], 64).unwrap()
    }

    fn neg(a: &Arc<AlgebraHandle>) -> FiniteGroup {
        let m = -a.domain().one();
        diag(a, &m, &m)
    }

    fn reflection(a: &Arc<AlgebraHandle>) -> FiniteGroup {
        diag(a, &a.domain().one(), &-a.domain().one())
    }

    fn e(w: &[u16]) -> SkewPoly {
        SkewPoly::monomial(Word(w.to_vec()), 0, Domain::Rational.one())
    }

    #[test]
    fn f_g_examples() {
        let a = kxy(8);
        assert_eq!(f_g(&FiniteGroup::trivial(&a)), e(&[]));
        let g = neg(&a);
        let f = f_g(&g);
        assert_eq!(f.len(), 2);
        let ff = skew_mul(&f, &f, &g).unwrap();
        assert_eq!(ff, f.scale(&Domain::Rational.from_int(2)));
    }

    #[test]
    fn membership_examples() {
        let a = kxy(8);
        let g = neg(&a);
        let w = ideal_membership(&e(&[0]), &g, 2).unwrap().expect("x#e is in (f_G)");
        assert!(w.verify(&g));
        assert!(ideal_membership(&e(&[]), &g, 2).unwrap().is_none());
        let t = FiniteGroup::trivial(&a);
        let target = e(&[0, 1, 1]);
        assert!(ideal_membership(&target, &t, 3).unwrap().unwrap().verify(&t));
        // monotone in the bound
        let w2 = ideal_membership(&e(&[0]), &g, 4).unwrap().unwrap();
        assert!(w2.verify(&g));
        assert!(matches!(
            ideal_membership(&e(&[0, 0, 0]), &g, 2),
            Err(AuslanderError::TargetAboveBound { .. })
        ));
        let uncertified = Arc::new(AlgebraHandle::certified(polynomial_ring(&["x", "y"], Domain::Rational).unwrap(), 2).unwrap());
        let g = neg(&uncertified);
        assert!(matches!(ideal_membership(&e(&[0]), &g, 2), Err(AuslanderError::Rewrite(_))));
    }

    #[test]
    fn tampered_witness_fails() {
        let a = kxy(8);
        let g = neg(&a);
        let mut w = ideal_membership(&e(&[0]), &g, 2).unwrap().unwrap();
        w.terms[0].coeff = &w.terms[0].coeff + &Domain::Rational.one();
        assert!(!w.verify(&g));
        assert!(MembershipWitness::new(w.target.clone(), w.terms.clone(), &g).is_err());
    }

    #[test]
    fn pertinency_examples() {
        let a = kxy(12);
        match pertinency_certificate(&neg(&a), 3, 6).unwrap() {
            PertinencyOutcome::Certified(c) => {
                assert_eq!(c.entries.iter().map(|e| e.exponent).collect::<Vec<_>>(), vec![1, 1]);
                assert!(c.quotient_finite);
                assert_eq!(c.gk_dim, Some(2));
                assert!(c.conclusion.contains("p >= 2"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            pertinency_certificate(&reflection(&a), 4, 6).unwrap(),
            PertinencyOutcome::Inconclusive { ref failed, .. } if failed == &vec!["x".to_string()]
        ));
    }

    #[test]
    fn certificate_json_round_trip() {
        let a = kxy(12);
        let g = neg(&a);
        let PertinencyOutcome::Certified(c) = pertinency_certificate(&g, 3, 6).unwrap() else {
            panic!("expected a certificate");
        };
        for entry in &c.entries {
            let json = entry.to_json(&g, c.bound, &c.conclusion);
            let text = serde_json::to_string(&json).unwrap();
            let back: CertificateEntryJson = serde_json::from_str(&text).unwrap();
            assert_eq!(verify_certificate_entry(&back, &g).unwrap(), *entry);
            let mut bad = back.clone();
            bad.witness[0].4 = format!("{} + 1", bad.witness[0].4);
            assert_eq!(verify_certificate_entry(&bad, &g), Err(AuslanderError::WitnessMismatch));
            bad = back.clone();
            bad.witness[0].0 = "z".into();
            assert!(matches!(verify_certificate_entry(&bad, &g), Err(AuslanderError::MalformedCertificate(_))));
        }
    }

    #[test]
    fn quantum_weyl_pertinency() {
        let d3 = Domain::cyclotomic(3);
        let z = mk_root_of_unity(3);
        let a = Arc::new(
            AlgebraHandle::certified(gl2_family(&Gl2Kind::QuantumWeyl(z.clone()), d3).unwrap(), 12).unwrap(),
        );
        let g = diag(&a, &z, &z.inv().unwrap());
        assert_eq!(g.order(), 3);
        assert!(ideal_membership(&SkewPoly::monomial(Word::empty(), 0, d3.one()), &g, 6).unwrap().is_some());
        assert!(ideal_membership(&SkewPoly::monomial(Word::letter(0), 0, d3.one()), &g, 2).unwrap().is_none());
        assert_eq!(quotient_growth(&g, 6).unwrap().dims, vec![0; 7]);
        match pertinency_certificate(&g, 3, 6).unwrap() {
            PertinencyOutcome::Certified(c) => {
                // 1#e already lies in (f_G) at this bound, so the first power suffices
                assert_eq!(c.entries.iter().map(|e| e.exponent).collect::<Vec<_>>(), vec![1, 1]);
                assert!(c.entries.iter().all(|e| e.witness.verify(&g)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn growth_examples() {
        let a = kxy(12);
        let t = quotient_growth(&FiniteGroup::trivial(&a), 4).unwrap();
        assert_eq!(t.dims, vec![0; 5]);
        let s = quotient_growth(&neg(&a), 4).unwrap();
        assert!(s.gkdim0_evidence, "{:?}", s.dims);
        let r = quotient_growth(&reflection(&a), 5).unwrap();
        assert!(r.dims.windows(2).all(|w| w[0] < w[1]), "{:?}", r.dims);
        for series in [&s, &r] {
            for (n, d) in series.dims.iter().enumerate() {
                assert!(*d <= 2 * a.dim_upto(n as u64).unwrap());
            }
        }
    }

    #[test]
    fn auslander_map_examples() {
        let a = kxy(12);
        let g = neg(&a);
        let d = Domain::Rational;
        let u = SkewPoly::monomial(Word::letter(0), 1, d.one());
        let y = Poly::generator(1, d);
        assert_eq!(auslander_apply(&u, &y, &g).unwrap(), Poly::word(Word(vec![0, 1]), d).scale(&d.from_int(-1)));
        let b = &Poly::word(Word(vec![0, 0]), d) + &Poly::generator(1, d);
        let lhs = auslander_apply(&f_g(&g), &b, &g).unwrap();
        assert_eq!(lhs, reynolds(&g, &b).unwrap().scale(&d.from_int(2)));
    }

    #[test]
    fn injectivity_examples() {
        let a = kxy(16);
        let r = truncated_injectivity(&neg(&a), 2, 2).unwrap();
        assert_eq!(r.kernel_dim, 0);
        assert_eq!(r.source_dim, 12);
        assert_eq!(truncated_injectivity(&reflection(&a), 2, 2).unwrap().kernel_dim, 0);
        let t = FiniteGroup::trivial(&a);
        for n in 0..=4 {
            assert_eq!(truncated_injectivity(&t, n, n).unwrap().kernel_dim, 0);
        }
        // probing only with constants cannot separate x#e from x#g
        let r = truncated_injectivity(&neg(&a), 1, 0).unwrap();
        assert!(r.kernel_dim > 0);
        let k = r.kernel_witness.unwrap();
        assert!(auslander_apply(&k, &Poly::one(Domain::Rational), &neg(&a)).unwrap().is_zero());
    }

    #[test]
    fn avoidance_finiteness() {
        assert!(avoiding_words_finite(2, &[vec![1, 0], vec![0], vec![1]]));
        assert!(!avoiding_words_finite(2, &[vec![1, 0], vec![1]]));
        assert!(avoiding_words_finite(2, &[vec![1, 0], vec![0, 0], vec![1, 1]]));
        assert!(!avoiding_words_finite(2, &[vec![0, 0], vec![1, 1]]));
    }
}
