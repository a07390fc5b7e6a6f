//! Presentations of the filtered algebra families and the handle type that
//! pairs a presentation with its certified rewrite system.

mod congenial;
mod families;

use std::sync::Mutex;

use thiserror::Error;

use crate::ncpoly::{Alphabet, Poly, PolyError, Word};
use crate::rewrite::{orient, ConfluenceReport, ConfluenceStatus, RewriteError, RewriteSystem};
use crate::scalars::{Domain, Scalar, ScalarError};

pub use congenial::{
    associated_graded, central_witness, congeniality_report, estimate_gk_dim, growth_slope, order_and_reduce,
    CentralSearch, CentralWitness, CongenialityReport, ConditionReport, PrimeReport, WitnessEntry, WitnessForm,
};
pub use families::{
    down_up, down_up_from_roots, enveloping_super, gl2_family, iterated_ore, pl11, pl11_data, polynomial_ring,
    quantized_weyl, quantized_weyl_uniform, symplectic_reflection_rank1, tensor_product, validate_super_lie,
    weyl, Gl2Kind, SuperLieData,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZooError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("{axiom} axiom fails at ({i}, {j}, {k})")]
    AxiomViolation { i: usize, j: usize, k: usize, axiom: String },
    #[error("delta_{k} is not a derivation: it does not annihilate prior relation {relation}")]
    NotADerivation { k: usize, relation: String },
    #[error("invalid q matrix: {0}")]
    InvalidQMatrix(String),
    #[error("parameter {0} must be nonzero")]
    ZeroParameter(String),
    #[error("down-up algebras need beta != 0")]
    BetaZero,
    #[error("roots r, s do not satisfy r + s = alpha and -rs = beta")]
    RootsInconsistent,
    #[error("tensor factors live over different domains: {0} vs {1}")]
    DomainMismatch(Domain, Domain),
    #[error("tensor products of superalgebras are not supported")]
    SuperTensorUnsupported,
    #[error("graded dimension mismatch at weight {weight}: algebra {algebra}, associated graded {graded}")]
    GradedDimensionMismatch { weight: u64, algebra: u64, graded: u64 },
    #[error("rewrite system is not confluent: overlap {overlap} leaves {difference}")]
    Nonconfluent { overlap: String, difference: String },
    #[error("coefficient {coefficient} of {location} does not reduce: {source}")]
    CoefficientReduction {
        location: String,
        coefficient: String,
        source: ScalarError,
    },
    #[error("odd generators need characteristic != 2 (odd squares are stored as 2y^2 - [y,y])")]
    OddGeneratorsInCharacteristicTwo,
    #[error("operation requires a prime-field algebra, found {0}")]
    NotPrimeField(Domain),
}

/// Where a presentation came from: constructor name, parameter values, and
/// any conventions the constructor had to choose.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub family: String,
    /// Printable `(name, value)` pairs.
    pub params: Vec<(String, String)>,
    /// Scalar parameters that generate the order `D` together with the
    /// relation coefficients.
    pub parameters: Vec<Scalar>,
    /// Known GK dimension, when the family determines it.
    pub gk_dim: Option<u32>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relations: Vec<Poly>,
    pub domain: Domain,
    pub provenance: Option<Provenance>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relations: Vec<Poly>, domain: Domain) -> Result<Self, ZooError> {
        let odd = alphabet.generators().iter().any(|g| g.parity == 1);
        for (i, r) in relations.iter().enumerate() {
            if r.is_zero() {
                return Err(ZooError::InvalidPresentation(format!("relation {i} is zero")));
            }
            if r.domain() != domain {
                return Err(ZooError::InvalidPresentation(format!(
                    "relation {i} lives over {}, expected {domain}",
                    r.domain()
                )));
            }
            if r.terms().any(|(w, _)| w.iter().any(|&a| a as usize >= alphabet.len())) {
                return Err(ZooError::InvalidPresentation(format!("relation {i} uses an unknown generator")));
            }
            if odd {
                let mut parities = r.terms().map(|(w, _)| alphabet.word_parity(w));
                let first = parities.next().unwrap();
                if parities.any(|p| p != first) {
                    return Err(ZooError::InvalidPresentation(format!(
                        "relation {i} is not parity-homogeneous"
                    )));
                }
            }
        }
        Ok(Presentation {
            alphabet,
            relations,
            domain,
            provenance: None,
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    /// Equality of alphabet, relations and domain, ignoring provenance.
    pub fn same_structure(&self, other: &Presentation) -> bool {
        self.alphabet == other.alphabet && self.relations == other.relations && self.domain == other.domain
    }

    pub fn family(&self) -> Option<&str> {
        self.provenance.as_ref().map(|p| p.family.as_str())
    }

    pub fn has_odd_generators(&self) -> bool {
        self.alphabet.generators().iter().any(|g| g.parity == 1)
    }

    /// Relation coefficients followed by the provenance parameters.
    pub fn coefficients(&self) -> Result<Vec<Scalar>, ZooError> {
        let mut out: Vec<Scalar> = vec![];
        for r in &self.relations {
            for (_, c) in r.terms() {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
        }
        if let Some(p) = &self.provenance {
            for s in &p.parameters {
                let s = self.domain.lift(s)?;
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        Ok(out)
    }

    pub fn generator(&self, name: &str) -> Option<usize> {
        self.alphabet.index_of(name)
    }
}

/// A presentation together with its oriented rewrite system.
#[derive(Debug)]
pub struct AlgebraHandle {
    presentation: Presentation,
    system: RewriteSystem,
    dims: Mutex<Vec<u64>>,
}

impl Clone for AlgebraHandle {
    fn clone(&self) -> Self {
        AlgebraHandle {
            presentation: self.presentation.clone(),
            system: self.system.clone(),
            dims: Mutex::new(self.dims.lock().unwrap().clone()),
        }
    }
}

impl AlgebraHandle {
    /// Orients the relations; confluence is left unchecked.
    pub fn new(presentation: Presentation) -> Result<Self, ZooError> {
        let system = orient(&presentation.relations, &presentation.alphabet, presentation.domain)?;
        Ok(AlgebraHandle {
            presentation,
            system,
            dims: Mutex::new(vec![]),
        })
    }

    /// Orients and checks confluence up to `bound`, failing on a
    /// nonconfluent system.
    pub fn certified(presentation: Presentation, bound: u64) -> Result<Self, ZooError> {
        let mut h = Self::new(presentation)?;
        h.ensure_confluence(bound)?;
        Ok(h)
    }

    pub fn check_confluence(&mut self, bound: u64) -> ConfluenceReport {
        self.system.check_confluence(bound)
    }

    /// Checks confluence up to `bound` unless already certified that far.
    pub fn ensure_confluence(&mut self, bound: u64) -> Result<(), ZooError> {
        if self.system.certified_bound().is_some_and(|w| w >= bound) {
            return Ok(());
        }
        let report = self.system.check_confluence(bound);
        match report.witness {
            None => Ok(()),
            Some(w) => Err(ZooError::Nonconfluent {
                overlap: w.overlap,
                difference: w.difference,
            }),
        }
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn system(&self) -> &RewriteSystem {
        &self.system
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.presentation.alphabet
    }

    pub fn domain(&self) -> Domain {
        self.presentation.domain
    }

    pub fn status(&self) -> &ConfluenceStatus {
        self.system.status()
    }

    pub fn certified_bound(&self) -> Option<u64> {
        self.system.certified_bound()
    }

    pub fn require_basis(&self, n: u64) -> Result<(), ZooError> {
        Ok(self.system.require_basis(n)?)
    }

    pub fn normal_form(&self, p: &Poly) -> Poly {
        self.system.normal_form(p)
    }

    pub fn normal_form_of_word(&self, w: &Word) -> Poly {
        self.system.normal_form_of_word(w)
    }

    /// `nf(p * q)`.
    pub fn mul(&self, p: &Poly, q: &Poly) -> Poly {
        self.normal_form(&(p * q))
    }

    pub fn normal_words_upto(&self, n: u64) -> Result<Vec<Word>, ZooError> {
        Ok(self.system.normal_words_upto(n)?)
    }

    /// `dim F_k` for `k = 0..=n`, cached.
    pub fn dim_table(&self, n: u64) -> Result<Vec<u64>, ZooError> {
        {
            let cached = self.dims.lock().unwrap();
            if cached.len() > n as usize {
                return Ok(cached[..=n as usize].to_vec());
            }
        }
        let table = self.system.dim_table(n)?;
        let mut cached = self.dims.lock().unwrap();
        if cached.len() < table.len() {
            *cached = table.clone();
        }
        Ok(table)
    }

    pub fn dim_upto(&self, n: u64) -> Result<u64, ZooError> {
        Ok(self.dim_table(n)?[n as usize])
    }

    pub fn generator_poly(&self, i: usize) -> Poly {
        Poly::generator(i, self.domain())
    }
}
