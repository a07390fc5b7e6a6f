//! Filtered automorphisms, finite groups of them, and the skew group algebra.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::linalg::{determinant, Echelon, SparseVec};
use crate::ncpoly::{Poly, Word};
use crate::rewrite::RewriteError;
use crate::scalars::{Domain, Scalar};
use crate::zoo::AlgebraHandle;

pub const DEFAULT_ORDER_CAP: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("expected {expected} generator images, found {found}")]
    WrongImageCount { expected: usize, found: usize },
    #[error("scalar domain mismatch: {0} vs {1}")]
    DomainMismatch(Domain, Domain),
    #[error("relation {index} ({relation}) is not preserved: its image reduces to {remainder}")]
    RelationNotPreserved {
        index: usize,
        relation: String,
        remainder: String,
    },
    #[error("image of {generator} has weight {image_weight} > {weight}")]
    FiltrationViolated {
        generator: String,
        image_weight: u64,
        weight: u32,
    },
    #[error("image of {generator} does not have the generator's parity")]
    ParityViolated { generator: String },
    #[error("image of {generator} is not homogeneous of the generator's weight")]
    NotHomogeneous { generator: String },
    #[error("automorphisms act on different algebras")]
    AlgebraMismatch,
    #[error("group exceeds {cap} elements")]
    CapExceeded { cap: usize },
    #[error("|G| = {order} is not invertible in characteristic {characteristic}")]
    OrderNotInvertible { order: usize, characteristic: u64 },
    #[error("image of {generator} is not linear in the weight-1 generators")]
    NotLinearizable { generator: String },
    #[error("group element index {0} out of range")]
    UnknownElement(usize),
}

/// A filtration-preserving algebra endomorphism given by generator images,
/// verified to preserve every relation.
#[derive(Debug, Clone)]
pub struct AutoMap {
    algebra: Arc<AlgebraHandle>,
    images: Vec<Poly>,
    verified: bool,
    order: Option<u64>,
    cache: Arc<Mutex<HashMap<Word, Poly>>>,
}

impl PartialEq for AutoMap {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images
    }
}

impl Eq for AutoMap {}

fn substitute_word(algebra: &AlgebraHandle, images: &[Poly], w: &[u16]) -> Poly {
    let mut acc = Poly::one(algebra.domain());
    for &a in w {
        acc = algebra.mul(&acc, &images[a as usize]);
    }
    acc
}

/// Builds and verifies an automorphism from generator images. The algebra
/// must be confluent up to the largest relation weight.
pub fn mk_automorphism(algebra: &Arc<AlgebraHandle>, images: Vec<Poly>) -> Result<AutoMap, ActionError> {
    build(algebra, images, false)
}

/// As [`mk_automorphism`], also requiring each image to be homogeneous of
/// its generator's weight.
pub fn mk_graded_automorphism(algebra: &Arc<AlgebraHandle>, images: Vec<Poly>) -> Result<AutoMap, ActionError> {
    build(algebra, images, true)
}

fn build(algebra: &Arc<AlgebraHandle>, images: Vec<Poly>, strict: bool) -> Result<AutoMap, ActionError> {
    let alphabet = algebra.alphabet();
    if images.len() != alphabet.len() {
        return Err(ActionError::WrongImageCount {
            expected: alphabet.len(),
            found: images.len(),
        });
    }
    let domain = algebra.domain();
    let mut normal = Vec::with_capacity(images.len());
    for (i, img) in images.iter().enumerate() {
        if img.domain() != domain {
            return Err(ActionError::DomainMismatch(domain, img.domain()));
        }
        let g = alphabet.get(i);
        let img = algebra.normal_form(img);
        let wt = img.weight(alphabet).unwrap_or(0);
        if wt > g.weight as u64 {
            return Err(ActionError::FiltrationViolated {
                generator: g.name.clone(),
                image_weight: wt,
                weight: g.weight,
            });
        }
        if img.terms().any(|(w, _)| alphabet.word_parity(w) != g.parity) {
            return Err(ActionError::ParityViolated {
                generator: g.name.clone(),
            });
        }
        if strict && img.terms().any(|(w, _)| alphabet.word_weight(w) != g.weight as u64) {
            return Err(ActionError::NotHomogeneous {
                generator: g.name.clone(),
            });
        }
        normal.push(img);
    }
    let pres = algebra.presentation();
    let needed = pres.relations.iter().filter_map(|r| r.weight(alphabet)).max().unwrap_or(0);
    algebra.system().require_confluence(needed)?;
    for (index, r) in pres.relations.iter().enumerate() {
        let mut image = Poly::zero(domain);
        for (w, c) in r.terms() {
            image.add_scaled(&substitute_word(algebra, &normal, w), c);
        }
        if !image.is_zero() {
            return Err(ActionError::RelationNotPreserved {
                index,
                relation: r.display(alphabet).to_string(),
                remainder: image.display(alphabet).to_string(),
            });
        }
    }
    let mut map = AutoMap {
        algebra: algebra.clone(),
        images: normal,
        verified: true,
        order: None,
        cache: Arc::default(),
    };
    map.order = map.compute_order(DEFAULT_ORDER_CAP);
    Ok(map)
}

impl AutoMap {
    pub fn identity(algebra: &Arc<AlgebraHandle>) -> AutoMap {
        let d = algebra.domain();
        AutoMap {
            algebra: algebra.clone(),
            images: (0..algebra.alphabet().len()).map(|i| Poly::generator(i, d)).collect(),
            verified: true,
            order: Some(1),
            cache: Arc::default(),
        }
    }

    pub fn algebra(&self) -> &Arc<AlgebraHandle> {
        &self.algebra
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Multiplicative order, if it is at most the cap used at construction.
    pub fn order(&self) -> Option<u64> {
        self.order
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, p)| *p == Poly::generator(i, self.algebra.domain()))
    }

    /// Image of a normal word.
    pub fn apply_word(&self, w: &Word) -> Poly {
        if w.is_empty() {
            return Poly::one(self.algebra.domain());
        }
        if let Some(p) = self.cache.lock().unwrap().get(w) {
            return p.clone();
        }
        let (last, prefix) = w.split_last().unwrap();
        let head = self.apply_word(&Word(prefix.to_vec()));
        let out = self.algebra.mul(&head, &self.images[*last as usize]);
        self.cache.lock().unwrap().insert(w.clone(), out.clone());
        out
    }

    /// `phi(p)` in normal form.
    pub fn apply(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero(self.algebra.domain());
        for (w, c) in p.terms() {
            out.add_scaled(&self.apply_word(w), c);
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AutoMap) -> AutoMap {
        AutoMap {
            algebra: self.algebra.clone(),
            images: other.images.iter().map(|p| self.apply(p)).collect(),
            verified: self.verified && other.verified,
            order: None,
            cache: Arc::default(),
        }
    }

    fn compute_order(&self, cap: u64) -> Option<u64> {
        let mut power = self.clone();
        for k in 1..=cap {
            if power.is_identity() {
                return Some(k);
            }
            power = self.compose(&power);
        }
        None
    }
}

/// A finite group of automorphisms. Element 0 is the identity and
/// `table[i][j]` is the index of `elements[i] ∘ elements[j]`.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    algebra: Arc<AlgebraHandle>,
    elements: Vec<AutoMap>,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    order_invertible: bool,
}

/// Breadth-first closure of `gens` under composition.
pub fn generate_group(algebra: &Arc<AlgebraHandle>, gens: &[AutoMap], cap: usize) -> Result<FiniteGroup, ActionError> {
    if gens.iter().any(|g| g.algebra.presentation() != algebra.presentation()) {
        return Err(ActionError::AlgebraMismatch);
    }
    let identity = AutoMap::identity(algebra);
    let mut elements = vec![identity];
    let mut index: HashMap<Vec<Poly>, usize> = HashMap::new();
    index.insert(elements[0].images.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in gens {
            let next = elements[i].compose(g);
            if index.contains_key(&next.images) {
                continue;
            }
            if elements.len() >= cap {
                return Err(ActionError::CapExceeded { cap });
            }
            index.insert(next.images.clone(), elements.len());
            queue.push_back(elements.len());
            elements.push(next);
        }
    }
    let n = elements.len();
    let mut table = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let c = elements[i].compose(&elements[j]);
            table[i][j] = index[&c.images];
        }
    }
    let inverse: Vec<usize> = (0..n)
        .map(|i| (0..n).find(|&j| table[i][j] == 0).expect("finite groups have inverses"))
        .collect();
    for (i, e) in elements.iter_mut().enumerate() {
        let mut k = 1u64;
        let mut cur = i;
        while cur != 0 {
            cur = table[cur][i];
            k += 1;
        }
        e.order = Some(k);
    }
    let order_invertible = !algebra.domain().from_int(n as i64).is_zero();
    Ok(FiniteGroup {
        algebra: algebra.clone(),
        elements,
        table,
        inverse,
        order_invertible,
    })
}

impl FiniteGroup {
    /// The trivial group acting on `algebra`.
    pub fn trivial(algebra: &Arc<AlgebraHandle>) -> FiniteGroup {
        generate_group(algebra, &[], 1).expect("trivial group")
    }

    pub fn algebra(&self) -> &Arc<AlgebraHandle> {
        &self.algebra
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[AutoMap] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &AutoMap {
        &self.elements[i]
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn order_invertible(&self) -> bool {
        self.order_invertible
    }

    pub fn domain(&self) -> Domain {
        self.algebra.domain()
    }

    /// Index of the element with the given generator images.
    pub fn find(&self, map: &AutoMap) -> Option<usize> {
        self.elements.iter().position(|e| e.images == map.images)
    }
}

/// An element of `A # G`: a finite map from (normal word, group index) to
/// nonzero scalars.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SkewPoly {
    domain: Domain,
    terms: BTreeMap<(Word, usize), Scalar>,
}

impl SkewPoly {
    pub fn zero(domain: Domain) -> Self {
        SkewPoly {
            domain,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(w: Word, g: usize, c: Scalar) -> Self {
        let mut s = SkewPoly::zero(c.domain());
        s.add_term(w, g, &c);
        s
    }

    /// `p # g`, with `p` already in normal form.
    pub fn from_poly(p: &Poly, g: usize) -> Self {
        let mut s = SkewPoly::zero(p.domain());
        for (w, c) in p.terms() {
            s.add_term(w.clone(), g, c);
        }
        s
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

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, usize), &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word, g: usize) -> Scalar {
        self.terms
            .get(&(w.clone(), g))
            .cloned()
            .unwrap_or_else(|| self.domain.zero())
    }

    pub fn add_term(&mut self, w: Word, g: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let key = (w, g);
        match self.terms.get_mut(&key) {
            Some(t) => {
                let s = &*t + c;
                if s.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *t = s;
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &SkewPoly, c: &Scalar) {
        for ((w, g), x) in &other.terms {
            self.add_term(w.clone(), *g, &(x * c));
        }
    }

    pub fn scale(&self, c: &Scalar) -> SkewPoly {
        let mut out = SkewPoly::zero(self.domain);
        out.add_scaled(self, c);
        out
    }

    /// The component `p` with `p # g` in `self`.
    pub fn component(&self, g: usize) -> Poly {
        let mut p = Poly::zero(self.domain);
        for ((w, h), c) in &self.terms {
            if *h == g {
                p.add_term(w.clone(), c);
            }
        }
        p
    }

    pub fn display(&self, group: &FiniteGroup) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let alphabet = group.algebra.alphabet();
        let mut parts = vec![];
        let mut by_group: BTreeMap<usize, Poly> = BTreeMap::new();
        for ((w, g), c) in &self.terms {
            by_group
                .entry(*g)
                .or_insert_with(|| Poly::zero(self.domain))
                .add_term(w.clone(), c);
        }
        for (g, p) in by_group {
            parts.push(format!("({}) # g{}", p.display(alphabet), g));
        }
        parts.join(" + ")
    }
}

fn check_domain(d: Domain, group: &FiniteGroup) -> Result<(), ActionError> {
    if d != group.domain() {
        Err(ActionError::DomainMismatch(d, group.domain()))
    } else {
        Ok(())
    }
}

/// Bilinear extension of `(a # g)(b # h) = a g(b) # gh`.
pub fn skew_mul(u: &SkewPoly, v: &SkewPoly, group: &FiniteGroup) -> Result<SkewPoly, ActionError> {
    check_domain(u.domain, group)?;
    check_domain(v.domain, group)?;
    let algebra = &group.algebra;
    let mut out = SkewPoly::zero(u.domain);
    for ((a, g), c) in &u.terms {
        if *g >= group.order() {
            return Err(ActionError::UnknownElement(*g));
        }
        for ((b, h), d) in &v.terms {
            if *h >= group.order() {
                return Err(ActionError::UnknownElement(*h));
            }
            let gb = group.elements[*g].apply_word(b);
            let prod = algebra.mul(&Poly::word(a.clone(), u.domain), &gb);
            let k = group.table[*g][*h];
            let cd = c * d;
            for (w, x) in prod.terms() {
                out.add_term(w.clone(), k, &(x * &cd));
            }
        }
    }
    Ok(out)
}

/// `|G|^-1 sum_g g(a)` in normal form.
pub fn reynolds(group: &FiniteGroup, a: &Poly) -> Result<Poly, ActionError> {
    check_domain(a.domain(), group)?;
    if !group.order_invertible {
        return Err(ActionError::OrderNotInvertible {
            order: group.order(),
            characteristic: group.domain().characteristic(),
        });
    }
    let a = group.algebra.normal_form(a);
    let mut sum = Poly::zero(a.domain());
    for g in &group.elements {
        sum.add_scaled(&g.apply(&a), &group.domain().one());
    }
    let inv = group.domain().from_int(group.order() as i64).inv().expect("order is invertible");
    Ok(sum.scale(&inv))
}

/// A basis of the invariants in `F_n`, in reduced echelon form over the
/// normal words (sorted by leading word).
pub fn invariant_basis(group: &FiniteGroup, n: u64) -> Result<Vec<Poly>, ActionError> {
    let algebra = &group.algebra;
    algebra.system().require_basis(n)?;
    let mut words = algebra.system().normal_words_upto(n)?;
    words.sort_by(|a, b| algebra.alphabet().cmp_words(a, b));
    let rank: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut echelon = Echelon::new(group.domain());
    for w in &words {
        let r = reynolds(group, &Poly::word(w.clone(), group.domain()))?;
        let v: SparseVec = r.terms().map(|(w, c)| (rank[w], c.clone())).collect();
        echelon.insert(v);
    }
    Ok(echelon
        .reduced_basis()
        .into_iter()
        .map(|v| {
            let mut p = Poly::zero(group.domain());
            for (k, c) in v {
                p.add_term(words[k].clone(), &c);
            }
            p
        })
        .collect())
}

/// Determinant of the linear part of `phi` on the span of weight-1
/// generators.
pub fn linear_determinant(phi: &AutoMap) -> Result<Scalar, ActionError> {
    let alphabet = phi.algebra.alphabet();
    let domain = phi.algebra.domain();
    let ones: Vec<usize> = (0..alphabet.len()).filter(|&i| alphabet.weight(i) == 1).collect();
    let pos: HashMap<usize, usize> = ones.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let n = ones.len();
    let mut m = vec![vec![domain.zero(); n]; n];
    for (col, &g) in ones.iter().enumerate() {
        let linear = phi.images[g].homogeneous_component(alphabet, 1);
        for (w, c) in linear.terms() {
            let row = match &w[..] {
                [a] => pos.get(&(*a as usize)).copied(),
                _ => None,
            };
            let Some(row) = row else {
                return Err(ActionError::NotLinearizable {
                    generator: alphabet.get(g).name.clone(),
                });
            };
            m[row][col] = c.clone();
        }
    }
    Ok(determinant(m, domain))
}
