use std::collections::HashMap;

use serde::Serialize;

use crate::linalg::{Echelon, Insertion, SparseVec};
use crate::ncpoly::{Alphabet, Poly, Word};
use crate::rewrite::RewriteError;
use crate::scalars::{order_generators, reduce_mod_p, Domain, OrderSpec, Scalar};

use super::{AlgebraHandle, Presentation, Provenance, ZooError};

const GRADED_PREFIX: &str = "associated_graded";

/// The associated graded presentation: each relation replaced by its top
/// weight component. `a` must be confluent up to `bound`; the result is
/// certified to the same bound and its dimension table is compared with
/// that of `a` on every weight `n` with `2n <= bound`.
pub fn associated_graded(a: &AlgebraHandle, bound: u64) -> Result<Presentation, ZooError> {
    a.system().require_confluence(bound)?;
    let pres = a.presentation();
    let relations: Vec<Poly> = pres
        .relations
        .iter()
        .map(|r| {
            let top = r.weight(&pres.alphabet).expect("relations are nonzero");
            r.homogeneous_component(&pres.alphabet, top)
        })
        .collect();
    let provenance = pres.provenance.clone().map(|p| {
        if p.family.starts_with(GRADED_PREFIX) {
            p
        } else {
            Provenance {
                family: format!("{GRADED_PREFIX}({})", p.family),
                ..p
            }
        }
    });
    let mut gr = Presentation::new(pres.alphabet.clone(), relations, pres.domain)?;
    gr.provenance = provenance;
    let handle = AlgebraHandle::certified(gr.clone(), bound)?;
    let half = bound / 2;
    let ours = a.dim_table(half)?;
    let theirs = handle.dim_table(half)?;
    for (w, (x, y)) in ours.iter().zip(&theirs).enumerate() {
        if x != y {
            return Err(ZooError::GradedDimensionMismatch {
                weight: w as u64,
                algebra: *x,
                graded: *y,
            });
        }
    }
    Ok(gr)
}

/// Extracts the order `D` generated by the coefficients and parameters of
/// `a`, then reduces every coefficient modulo `p`. When `a` is certified, the
/// reduced system is certified to the same bound.
pub fn order_and_reduce(a: &AlgebraHandle, p: u64) -> Result<(OrderSpec, AlgebraHandle), ZooError> {
    let pres = a.presentation();
    if pres.has_odd_generators() && p == 2 {
        return Err(ZooError::OddGeneratorsInCharacteristicTwo);
    }
    let target = Domain::prime_field(p)?;
    let order = order_generators(&pres.coefficients()?)?;
    let mut relations = vec![];
    for (i, r) in pres.relations.iter().enumerate() {
        let reduced = r
            .map_coeffs(target, |c| reduce_mod_p(c, p).map_err(|e| (c.clone(), e)))
            .map_err(|(c, source)| ZooError::CoefficientReduction {
                location: format!("relation {i}"),
                coefficient: c.to_string(),
                source,
            })?;
        relations.push(reduced);
    }
    let provenance = match &pres.provenance {
        Some(prov) => {
            let mut parameters = vec![];
            for (k, s) in prov.parameters.iter().enumerate() {
                let s = pres.domain.lift(s)?;
                let r = reduce_mod_p(&s, p).map_err(|source| ZooError::CoefficientReduction {
                    location: format!("parameter {k}"),
                    coefficient: s.to_string(),
                    source,
                })?;
                parameters.push(r);
            }
            let mut params = prov.params.clone();
            params.push(("p".into(), p.to_string()));
            let mut notes = prov.notes.clone();
            notes.push(format!("coefficients reduced modulo {p}"));
            Provenance {
                family: prov.family.clone(),
                params,
                parameters,
                gk_dim: prov.gk_dim,
                notes,
            }
        }
        None => Provenance {
            family: "custom".into(),
            params: vec![("p".into(), p.to_string())],
            notes: vec![format!("coefficients reduced modulo {p}")],
            ..Default::default()
        },
    };
    let reduced = Presentation::new(pres.alphabet.clone(), relations, target)?.with_provenance(provenance);
    let mut handle = AlgebraHandle::new(reduced)?;
    if let Some(b) = a.certified_bound() {
        handle.ensure_confluence(b)?;
    }
    Ok((order, handle))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessForm {
    /// `sum alpha_i a^(p^i)`.
    PPolynomial,
    /// A general polynomial in `a` without constant term.
    Polynomial,
    /// Some power of `a` vanishes, so `a` is integral over the centre
    /// trivially.
    Nilpotent,
}

/// `z = sum coefficients[k] * a^exponents[k]`, central and nonzero (or the
/// vanishing power, for nilpotent `a`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralWitness {
    pub generator: String,
    pub form: WitnessForm,
    pub exponents: Vec<u64>,
    pub coefficients: Vec<Scalar>,
    pub element: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CentralSearch {
    Found(CentralWitness),
    NotFound { max_degree: u64 },
}

/// Searches for a nonzero central element in `F_p[a]` of degree at most
/// `p^i_max`. The p-polynomial space `sum_{i=1}^{i_max} alpha_i a^(p^i)` is
/// tried first, then all polynomials without constant term.
pub fn central_witness(a: &AlgebraHandle, generator: usize, i_max: u32) -> Result<CentralSearch, ZooError> {
    let domain = a.domain();
    let p = match domain {
        Domain::PrimeField(p) => p,
        other => return Err(ZooError::NotPrimeField(other)),
    };
    let alphabet = a.alphabet();
    if generator >= alphabet.len() {
        return Err(ZooError::InvalidPresentation(format!("no generator with index {generator}")));
    }
    let max_degree = p
        .checked_pow(i_max)
        .ok_or_else(|| ZooError::InvalidPresentation("degree bound overflows".into()))?;
    let w = alphabet.weight(generator) as u64;
    let max_w = (0..alphabet.len()).map(|i| alphabet.weight(i) as u64).max().unwrap_or(0);
    a.system()
        .require_confluence((2 * max_degree * w).max(max_degree * w + max_w))?;

    let gen = a.generator_poly(generator);
    let mut powers: Vec<Poly> = Vec::with_capacity(max_degree as usize + 1);
    powers.push(Poly::one(domain));
    for e in 1..=max_degree {
        let next = a.mul(&powers[e as usize - 1], &gen);
        if next.is_zero() {
            return Ok(CentralSearch::Found(CentralWitness {
                generator: alphabet.get(generator).name.clone(),
                form: WitnessForm::Nilpotent,
                exponents: vec![e],
                coefficients: vec![domain.one()],
                element: next,
            }));
        }
        powers.push(next);
    }
    let commutators: Vec<Vec<Poly>> = powers
        .iter()
        .map(|z| {
            (0..alphabet.len())
                .map(|j| {
                    let g = a.generator_poly(j);
                    &a.mul(z, &g) - &a.mul(&g, z)
                })
                .collect()
        })
        .collect();

    let p_exps: Vec<u64> = (1..=i_max).map(|i| p.pow(i)).collect();
    let all_exps: Vec<u64> = (1..=max_degree).collect();
    for (form, exps) in [(WitnessForm::PPolynomial, p_exps), (WitnessForm::Polynomial, all_exps)] {
        if let Some(w) = search_kernel(a, generator, &powers, &commutators, &exps, form) {
            return Ok(CentralSearch::Found(w));
        }
    }
    Ok(CentralSearch::NotFound { max_degree })
}

fn search_kernel(
    a: &AlgebraHandle,
    generator: usize,
    powers: &[Poly],
    commutators: &[Vec<Poly>],
    exps: &[u64],
    form: WitnessForm,
) -> Option<CentralWitness> {
    let domain = a.domain();
    let mut coords: HashMap<(usize, Word), usize> = HashMap::new();
    let mut echelon = Echelon::new(domain);
    for &e in exps {
        let mut v = SparseVec::new();
        for (j, c) in commutators[e as usize].iter().enumerate() {
            for (w, s) in c.sorted_terms(a.alphabet()) {
                let next = coords.len();
                let k = *coords.entry((j, w.clone())).or_insert(next);
                v.insert(k, s.clone());
            }
        }
        if let Insertion::Dependent(combo) = echelon.insert(v) {
            let mut z = Poly::zero(domain);
            for (k, c) in &combo {
                z.add_scaled(&powers[exps[*k] as usize], c);
            }
            if z.is_zero() {
                continue;
            }
            let (exponents, coefficients): (Vec<u64>, Vec<Scalar>) =
                combo.iter().map(|(k, c)| (exps[*k], c.clone())).unzip();
            return Some(CentralWitness {
                generator: a.alphabet().get(generator).name.clone(),
                form,
                exponents,
                coefficients,
                element: z,
            });
        }
    }
    None
}

/// Least-squares slope of `ln table[n]` against `ln(n + 1)` for `n` in
/// `lo..=hi`. `None` with fewer than two usable points.
pub fn growth_slope(table: &[u64], lo: u64, hi: u64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .filter(|&n| (n as usize) < table.len() && table[n as usize] > 0)
        .map(|n| (((n + 1) as f64).ln(), (table[n as usize] as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (den > 0.0).then(|| num / den)
}

/// GK dimension: the family's known value if recorded, otherwise the rounded
/// growth slope of the dimension table up to `bound`.
pub fn estimate_gk_dim(a: &AlgebraHandle, bound: u64) -> Result<(Option<u32>, Option<f64>), ZooError> {
    let table = a.dim_table(bound)?;
    let slope = growth_slope(&table, bound.div_ceil(2), bound);
    let known = a.presentation().provenance.as_ref().and_then(|p| p.gk_dim);
    Ok((known.or_else(|| slope.map(|s| s.round().max(0.0) as u32)), slope))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub status: String,
    pub detail: String,
}

impl ConditionReport {
    fn new(status: &str, detail: impl Into<String>) -> Self {
        ConditionReport {
            status: status.into(),
            detail: detail.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    /// A growth proxy held; never a verification.
    pub fn proxy_holds(&self) -> bool {
        self.status == "proxy"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessEntry {
    pub generator: String,
    pub form: Option<WitnessForm>,
    pub exponents: Vec<u64>,
    pub coefficients: Vec<String>,
    pub element: String,
}

impl WitnessEntry {
    pub fn new(cw: &CentralWitness, alphabet: &Alphabet) -> Self {
        WitnessEntry {
            generator: cw.generator.clone(),
            form: Some(cw.form),
            exponents: cw.exponents.clone(),
            coefficients: cw.coefficients.iter().map(|c| c.to_string()).collect(),
            element: cw.element.display(alphabet).to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeReport {
    pub prime: u64,
    pub status: String,
    pub detail: String,
    pub witnesses: Vec<WitnessEntry>,
}

/// Evidence for the five conditions of congeniality, up to a weight bound.
/// The noetherian condition is a growth proxy only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CongenialityReport {
    pub algebra: String,
    pub bound: u64,
    pub local_finiteness: ConditionReport,
    pub order: ConditionReport,
    pub graded_order: ConditionReport,
    pub noetherian_proxy: ConditionReport,
    pub primes: Vec<PrimeReport>,
    pub order_generators: Vec<String>,
    pub dims: Vec<u64>,
    pub gr_dims: Vec<u64>,
    pub slope: Option<f64>,
    pub gk_dim: Option<u32>,
}

impl CongenialityReport {
    pub fn all_passed(&self) -> bool {
        self.local_finiteness.passed()
            && self.order.passed()
            && self.graded_order.passed()
            && self.noetherian_proxy.proxy_holds()
            && self.primes.iter().all(|p| p.status == "pass")
    }
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// Builds the congeniality evidence for `a` at `bound`; failures are
/// recorded in the report rather than returned.
pub fn congeniality_report(a: &AlgebraHandle, primes: &[u64], bound: u64) -> CongenialityReport {
    let name = a.presentation().family().unwrap_or("custom").to_string();
    let mut report = CongenialityReport {
        algebra: name,
        bound,
        local_finiteness: ConditionReport::new("inconclusive", "not evaluated"),
        order: ConditionReport::new("inconclusive", "not evaluated"),
        graded_order: ConditionReport::new("inconclusive", "not evaluated"),
        noetherian_proxy: ConditionReport::new("inconclusive", "not evaluated"),
        primes: vec![],
        order_generators: vec![],
        dims: vec![],
        gr_dims: vec![],
        slope: None,
        gk_dim: None,
    };
    let mut h = a.clone();
    if let Err(e) = h.ensure_confluence(2 * bound) {
        report.local_finiteness = ConditionReport::new("fail", e.to_string());
        return report;
    }
    match h.dim_table(bound) {
        Ok(t) => {
            report.local_finiteness =
                ConditionReport::new("pass", format!("dim F_{bound} = {}", t.last().copied().unwrap_or(0)));
            report.dims = t;
        }
        Err(e) => {
            report.local_finiteness = ConditionReport::new("fail", e.to_string());
            return report;
        }
    }

    let order = match h.presentation().coefficients().map(|c| order_generators(&c)) {
        Ok(Ok(o)) => o,
        Ok(Err(e)) => {
            report.order = ConditionReport::new("fail", e.to_string());
            return report;
        }
        Err(e) => {
            report.order = ConditionReport::new("fail", e.to_string());
            return report;
        }
    };
    report.order_generators = order.generator_names();
    let names = if order.is_integral() {
        "Z".to_string()
    } else {
        format!("Z[{}]", report.order_generators.join(", "))
    };
    report.order = ConditionReport::new("pass", format!("relations and F_0 defined over {names}"));

    match associated_graded(&h, 2 * bound) {
        Ok(gr) => {
            let inside = gr.relations.iter().all(|r| r.terms().all(|(_, c)| order.contains(c)));
            report.graded_order = if inside {
                ConditionReport::new("pass", format!("graded relations defined over {names}"))
            } else {
                ConditionReport::new("fail", "graded coefficients leave D")
            };
            match AlgebraHandle::certified(gr, 2 * bound).and_then(|g| g.dim_table(bound)) {
                Ok(t) => report.gr_dims = t,
                Err(e) => report.noetherian_proxy = ConditionReport::new("fail", e.to_string()),
            }
        }
        Err(e) => report.graded_order = ConditionReport::new("fail", e.to_string()),
    }
    if !report.gr_dims.is_empty() {
        let slope = growth_slope(&report.gr_dims, bound.div_ceil(2), bound);
        report.slope = slope.map(round6);
        // a known GK dimension above the generator count (down-up) raises the limit
        let known = h.presentation().provenance.as_ref().and_then(|p| p.gk_dim).unwrap_or(0);
        let limit = h.alphabet().len().max(known as usize);
        report.noetherian_proxy = match slope {
            Some(s) if s <= limit as f64 + 1e-9 => ConditionReport::new(
                "proxy",
                format!("strongly noetherian not machine-checkable; proxy: graded growth slope {s:.3} <= {limit}"),
            ),
            Some(s) => ConditionReport::new("fail", format!("graded growth slope {s:.3} exceeds {limit}")),
            None => ConditionReport::new("inconclusive", "too few weights for a growth estimate"),
        };
    }
    report.gk_dim = h
        .presentation()
        .provenance
        .as_ref()
        .and_then(|p| p.gk_dim)
        .or_else(|| report.slope.map(|s| s.round().max(0.0) as u32));

    for &p in primes {
        report.primes.push(prime_report(&h, p));
    }
    report
}

fn prime_report(h: &AlgebraHandle, p: u64) -> PrimeReport {
    let fail = |detail: String| PrimeReport {
        prime: p,
        status: "fail".into(),
        detail,
        witnesses: vec![],
    };
    let mut reduced = match order_and_reduce(h, p) {
        Ok((_, r)) => r,
        Err(e) => return fail(e.to_string()),
    };
    let alphabet = reduced.alphabet().clone();
    let max_w = (0..alphabet.len()).map(|i| alphabet.weight(i) as u64).max().unwrap_or(0);
    let mut witnesses = vec![];
    let mut missing = vec![];
    for g in 0..alphabet.len() {
        let w = alphabet.weight(g) as u64;
        if let Err(e) = reduced.ensure_confluence((2 * p * w).max(p * w + max_w)) {
            return fail(e.to_string());
        }
        match central_witness(&reduced, g, 1) {
            Ok(CentralSearch::Found(cw)) => witnesses.push(WitnessEntry::new(&cw, &alphabet)),
            Ok(CentralSearch::NotFound { .. }) => missing.push(alphabet.get(g).name.clone()),
            Err(ZooError::Rewrite(RewriteError::ConfluenceNotEstablished { needed, certified })) => {
                return fail(format!("confluence needed to {needed}, certified {certified:?}"))
            }
            Err(e) => return fail(e.to_string()),
        }
    }
    if missing.is_empty() {
        PrimeReport {
            prime: p,
            status: "pass".into(),
            detail: format!("central witness of degree <= {p} for every generator"),
            witnesses,
        }
    } else {
        PrimeReport {
            prime: p,
            status: "fail".into(),
            detail: format!("no central witness for {}", missing.join(", ")),
            witnesses,
        }
    }
}
