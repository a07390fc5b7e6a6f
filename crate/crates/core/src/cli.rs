//! Command dispatch and JSON reports for the `ncfilt` binary.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::action::{generate_group, mk_automorphism, skew_mul, ActionError, AutoMap, FiniteGroup, SkewPoly, DEFAULT_ORDER_CAP};
use crate::auslander::{
    pertinency_certificate, quotient_growth, truncated_injectivity, verify_certificate_entry, AuslanderError,
    CertificateEntryJson, PertinencyOutcome,
};
use crate::format::{parse_presentation, parse_skew_expression, write_presentation, FormatError, PresentationFile};
use crate::ncpoly::Word;
use crate::sample;
use crate::scalars::{reduce_mod_p, Domain};
use crate::zoo::{
    associated_graded, central_witness, congeniality_report, order_and_reduce, AlgebraHandle, CentralSearch,
    WitnessEntry, ZooError,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {source}")]
    Format { path: String, source: FormatError },
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Auslander(#[from] AuslanderError),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("invalid certificate: {0}")]
    Certificate(String),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "ncfilt", version, about = "Filtered noncommutative algebras, skew group algebras and pertinency certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check confluence of the rewrite system up to a weight bound.
    CheckPbw {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        bound: u64,
    },
    /// Dimensions of the filtration pieces.
    Dims {
        file: PathBuf,
        #[arg(long)]
        upto: u64,
    },
    /// Associated graded presentation.
    Gr {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        bound: u64,
    },
    /// Verify a named automorphism.
    AutoVerify {
        file: PathBuf,
        #[arg(long)]
        auto: String,
        #[arg(long, default_value_t = 6)]
        certify: u64,
    },
    /// Generate a named group and print its multiplication table.
    Group {
        file: PathBuf,
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP as usize)]
        cap: usize,
        #[arg(long, default_value_t = 6)]
        certify: u64,
    },
    /// Multiply two elements of the skew group algebra.
    SkewMul {
        file: PathBuf,
        #[arg(long)]
        group: String,
        #[arg(long, allow_hyphen_values = true)]
        lhs: String,
        #[arg(long, allow_hyphen_values = true)]
        rhs: String,
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP as usize)]
        cap: usize,
        #[arg(long, default_value_t = 6)]
        certify: u64,
    },
    /// Extract the order and reduce modulo a prime.
    Modp {
        file: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 6)]
        bound: u64,
    },
    /// Search for a central element in F_p[generator].
    CentralWitness {
        file: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(long = "gen")]
        generator: String,
        #[arg(long, default_value_t = 1)]
        imax: u32,
    },
    /// Congeniality evidence up to a weight bound.
    Congenial {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 6)]
        bound: u64,
    },
    /// Bounded pertinency certificate for a group action.
    Pertinency {
        file: PathBuf,
        #[arg(long)]
        group: String,
        /// Largest generator power tried.
        #[arg(long, default_value_t = 3)]
        cap: u64,
        #[arg(long, default_value_t = 6)]
        bound: u64,
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP as usize)]
        group_cap: usize,
    },
    /// Truncated injectivity of the Auslander map.
    AuslanderInj {
        file: PathBuf,
        #[arg(long)]
        group: String,
        #[arg(short = 'N')]
        n: u64,
        #[arg(short = 'M')]
        m: u64,
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP as usize)]
        group_cap: usize,
    },
    /// Growth of (A#G)/(f_G) up to a weight bound.
    Growth {
        file: PathBuf,
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 6)]
        bound: u64,
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP as usize)]
        group_cap: usize,
    },
    /// Re-verify a pertinency certificate.
    VerifyCert { file: PathBuf, cert: PathBuf },
    /// Randomized self-checks with a fixed seed.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckPbw { .. } => "check-pbw",
            Command::Dims { .. } => "dims",
            Command::Gr { .. } => "gr",
            Command::AutoVerify { .. } => "auto-verify",
            Command::Group { .. } => "group",
            Command::SkewMul { .. } => "skew-mul",
            Command::Modp { .. } => "modp",
            Command::CentralWitness { .. } => "central-witness",
            Command::Congenial { .. } => "congenial",
            Command::Pertinency { .. } => "pertinency",
            Command::AuslanderInj { .. } => "auslander-inj",
            Command::Growth { .. } => "growth",
            Command::VerifyCert { .. } => "verify-cert",
            Command::Selftest { .. } => "selftest",
        }
    }
}

/// Result of one invocation: exit code and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// A self-contained pertinency certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub algebra: String,
    pub group: String,
    pub group_cap: usize,
    pub bound: u64,
    pub gk_dim: Option<u32>,
    pub quotient_finite: bool,
    pub conclusion: String,
    pub entries: Vec<CertificateEntryJson>,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    execute(&cli.command)
}

pub fn execute(command: &Command) -> Outcome {
    match dispatch(command) {
        Ok((code, mut report)) => {
            let obj = report.as_object_mut().expect("reports are objects");
            obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
            obj.insert("command".into(), json!(command.name()));
            Outcome {
                code,
                stdout: render(&report),
                stderr: String::new(),
            }
        }
        Err(e) => {
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": command.name(),
                "status": "error",
                "error": e.to_string(),
            });
            Outcome {
                code: 2,
                stdout: render(&report),
                stderr: format!("error: {e}\n"),
            }
        }
    }
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn load(path: &Path) -> Result<PresentationFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_presentation(&text).map_err(|source| CliError::Format {
        path: path.display().to_string(),
        source,
    })
}

fn certified(file: &PresentationFile, bound: u64) -> Result<Arc<AlgebraHandle>, CliError> {
    let mut h = AlgebraHandle::new(file.presentation.clone())?;
    h.ensure_confluence(bound)?;
    Ok(Arc::new(h))
}

fn automorphism(file: &PresentationFile, a: &Arc<AlgebraHandle>, name: &str) -> Result<AutoMap, CliError> {
    let images = file.automorphism(name).ok_or_else(|| CliError::Unknown {
        kind: "automorphism",
        name: name.into(),
    })?;
    Ok(mk_automorphism(a, images.to_vec())?)
}

fn group(file: &PresentationFile, a: &Arc<AlgebraHandle>, name: &str, cap: usize) -> Result<FiniteGroup, CliError> {
    let images = file.group(name).ok_or_else(|| CliError::Unknown {
        kind: "group",
        name: name.into(),
    })?;
    let gens = images
        .into_iter()
        .map(|imgs| mk_automorphism(a, imgs))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(generate_group(a, &gens, cap)?)
}

fn images_json(map: &AutoMap) -> Value {
    let alphabet = map.algebra().alphabet();
    Value::Array(
        map.images()
            .iter()
            .enumerate()
            .map(|(i, p)| json!([alphabet.get(i).name, p.display(alphabet).to_string()]))
            .collect(),
    )
}

fn dispatch(command: &Command) -> Result<(i32, Value), CliError> {
    match command {
        Command::CheckPbw { file, bound } => {
            let f = load(file)?;
            let mut h = AlgebraHandle::new(f.presentation.clone())?;
            let report = h.check_confluence(*bound);
            let alphabet = h.alphabet();
            let rules: Vec<Value> = h
                .system()
                .rules()
                .iter()
                .map(|r| json!([alphabet.fmt_word(&r.lhs), r.rhs.display(alphabet).to_string()]))
                .collect();
            let code = if report.is_confluent() { 0 } else { 1 };
            Ok((
                code,
                json!({ "algebra": f.name, "confluence": report, "rules": rules }),
            ))
        }
        Command::Dims { file, upto } => {
            let f = load(file)?;
            let h = certified(&f, 2 * upto)?;
            let table = h.dim_table(*upto)?;
            let graded: Vec<u64> = (0..table.len())
                .map(|n| table[n] - if n == 0 { 0 } else { table[n - 1] })
                .collect();
            Ok((0, json!({ "algebra": f.name, "upto": upto, "dims": table, "graded": graded })))
        }
        Command::Gr { file, bound } => {
            let f = load(file)?;
            let h = certified(&f, *bound)?;
            let gr = associated_graded(&h, *bound)?;
            let relations: Vec<String> = gr.relations.iter().map(|r| r.display(&gr.alphabet).to_string()).collect();
            let text = write_presentation(&PresentationFile::new(format!("gr_{}", f.name), gr.clone()));
            Ok((
                0,
                json!({ "algebra": f.name, "bound": bound, "family": gr.family(), "relations": relations, "presentation": text }),
            ))
        }
        Command::AutoVerify { file, auto, certify } => {
            let f = load(file)?;
            let h = certified(&f, *certify)?;
            let map = automorphism(&f, &h, auto)?;
            Ok((
                0,
                json!({
                    "algebra": f.name,
                    "automorphism": auto,
                    "verified": map.is_verified(),
                    "order": map.order(),
                    "images": images_json(&map),
                }),
            ))
        }
        Command::Group { file, group: name, cap, certify } => {
            let f = load(file)?;
            let h = certified(&f, *certify)?;
            let g = group(&f, &h, name, *cap)?;
            let elements: Vec<Value> = g.elements().iter().map(images_json).collect();
            Ok((
                0,
                json!({
                    "algebra": f.name,
                    "group": name,
                    "order": g.order(),
                    "order_invertible": g.order_invertible(),
                    "elements": elements,
                    "table": g.table(),
                }),
            ))
        }
        Command::SkewMul { file, group: name, lhs, rhs, cap, certify } => {
            let f = load(file)?;
            let h = certified(&f, *certify)?;
            let g = group(&f, &h, name, *cap)?;
            let resolve = |s: &str| -> Option<usize> {
                if s == "e" {
                    return Some(0);
                }
                if let Some(k) = s.strip_prefix('g').and_then(|k| k.parse::<usize>().ok()) {
                    return (k < g.order()).then_some(k);
                }
                if let Ok(k) = s.parse::<usize>() {
                    return (k < g.order()).then_some(k);
                }
                let images = f.automorphism(s)?;
                g.elements().iter().position(|m| m.images() == images)
            };
            let parse = |text: &str| -> Result<SkewPoly, CliError> {
                let terms = parse_skew_expression(text, h.alphabet(), h.domain(), &resolve)
                    .map_err(|e| CliError::Usage(format!("cannot parse `{text}`: {e}")))?;
                let mut s = SkewPoly::zero(h.domain());
                for (p, k) in terms {
                    s.add_scaled(&SkewPoly::from_poly(&h.normal_form(&p), k), &h.domain().one());
                }
                Ok(s)
            };
            let (u, v) = (parse(lhs)?, parse(rhs)?);
            let product = skew_mul(&u, &v, &g)?;
            Ok((
                0,
                json!({
                    "algebra": f.name,
                    "group": name,
                    "lhs": u.display(&g),
                    "rhs": v.display(&g),
                    "product": product.display(&g),
                }),
            ))
        }
        Command::Modp { file, prime, bound } => {
            let f = load(file)?;
            let h = certified(&f, *bound)?;
            let (order, reduced) = order_and_reduce(&h, *prime)?;
            let expressions: Vec<Value> = order
                .expressions
                .iter()
                .map(|e| json!(e.to_string()))
                .collect();
            let alphabet = reduced.alphabet();
            let relations: Vec<String> = reduced
                .presentation()
                .relations
                .iter()
                .map(|r| r.display(alphabet).to_string())
                .collect();
            let half = bound / 2;
            let dims = h.dim_table(half)?;
            let reduced_dims = reduced.dim_table(half)?;
            Ok((
                0,
                json!({
                    "algebra": f.name,
                    "prime": prime,
                    "order_generators": order.generator_names(),
                    "coefficients": expressions,
                    "relations": relations,
                    "dims": dims,
                    "reduced_dims": reduced_dims,
                    "dims_agree": dims == reduced_dims,
                }),
            ))
        }
        Command::CentralWitness { file, prime, generator, imax } => {
            let f = load(file)?;
            let base = AlgebraHandle::new(f.presentation.clone())?;
            let mut reduced = if base.domain() == Domain::PrimeField(*prime) {
                base
            } else {
                order_and_reduce(&base, *prime)?.1
            };
            let gi = reduced.presentation().generator(generator).ok_or_else(|| CliError::Unknown {
                kind: "generator",
                name: generator.clone(),
            })?;
            let alphabet = reduced.alphabet().clone();
            let w = alphabet.weight(gi) as u64;
            let max_w = (0..alphabet.len()).map(|i| alphabet.weight(i) as u64).max().unwrap_or(0);
            let pi = prime.pow(*imax);
            reduced.ensure_confluence((2 * pi * w).max(pi * w + max_w))?;
            match central_witness(&reduced, gi, *imax)? {
                CentralSearch::Found(cw) => Ok((
                    0,
                    json!({ "algebra": f.name, "prime": prime, "status": "found", "witness": WitnessEntry::new(&cw, &alphabet) }),
                )),
                CentralSearch::NotFound { max_degree } => Ok((
                    1,
                    json!({
                        "algebra": f.name,
                        "prime": prime,
                        "status": "not_found",
                        "max_degree": max_degree,
                        "note": "bounded search; absence of a witness is not a proof",
                    }),
                )),
            }
        }
        Command::Congenial { file, primes, bound } => {
            let f = load(file)?;
            let h = AlgebraHandle::new(f.presentation.clone())?;
            let report = congeniality_report(&h, primes, *bound);
            let code = if report.all_passed() { 0 } else { 1 };
            Ok((code, json!({ "algebra": f.name, "report": report })))
        }
        Command::Pertinency { file, group: name, cap, bound, group_cap } => {
            let f = load(file)?;
            let h = certified(&f, 2 * bound)?;
            let g = group(&f, &h, name, *group_cap)?;
            match pertinency_certificate(&g, *cap, *bound)? {
                PertinencyOutcome::Certified(c) => {
                    let doc = CertificateDocument {
                        algebra: f.name.clone(),
                        group: name.clone(),
                        group_cap: *group_cap,
                        bound: c.bound,
                        gk_dim: c.gk_dim,
                        quotient_finite: c.quotient_finite,
                        conclusion: c.conclusion.clone(),
                        entries: c.entries.iter().map(|e| e.to_json(&g, c.bound, &c.conclusion)).collect(),
                    };
                    let exponents: Vec<u64> = c.entries.iter().map(|e| e.exponent).collect();
                    let code = if c.quotient_finite { 0 } else { 1 };
                    Ok((
                        code,
                        json!({
                            "algebra": f.name,
                            "group": name,
                            "group_order": g.order(),
                            "status": if c.quotient_finite { "certified" } else { "inconclusive" },
                            "exponents": exponents,
                            "certificate": doc,
                        }),
                    ))
                }
                PertinencyOutcome::Inconclusive { bound, failed, partial } => {
                    let partial: Vec<CertificateEntryJson> = partial.iter().map(|e| e.to_json(&g, bound, "")).collect();
                    Ok((
                        1,
                        json!({
                            "algebra": f.name,
                            "group": name,
                            "group_order": g.order(),
                            "status": "inconclusive",
                            "bound": bound,
                            "failed": failed,
                            "partial": partial,
                            "note": "bounded search; no claim that p(A,G) < 2",
                        }),
                    ))
                }
            }
        }
        Command::AuslanderInj { file, group: name, n, m, group_cap } => {
            let f = load(file)?;
            let h = certified(&f, 2 * (n + m))?;
            let g = group(&f, &h, name, *group_cap)?;
            let r = truncated_injectivity(&g, *n, *m)?;
            let code = if r.kernel_dim == 0 { 0 } else { 1 };
            Ok((
                code,
                json!({
                    "algebra": f.name,
                    "group": name,
                    "n": r.n,
                    "m": r.m,
                    "source_dim": r.source_dim,
                    "rank": r.rank,
                    "kernel_dim": r.kernel_dim,
                    "kernel_witness": r.kernel_witness.as_ref().map(|k| k.display(&g)),
                }),
            ))
        }
        Command::Growth { file, group: name, bound, group_cap } => {
            let f = load(file)?;
            let h = certified(&f, 2 * bound)?;
            let g = group(&f, &h, name, *group_cap)?;
            let series = quotient_growth(&g, *bound)?;
            Ok((0, json!({ "algebra": f.name, "group": name, "growth": series })))
        }
        Command::VerifyCert { file, cert } => {
            let f = load(file)?;
            let text = std::fs::read_to_string(cert).map_err(|e| CliError::Io {
                path: cert.display().to_string(),
                message: e.to_string(),
            })?;
            let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Certificate(e.to_string()))?;
            let body = value.get("certificate").cloned().unwrap_or(value);
            let doc: CertificateDocument = serde_json::from_value(body).map_err(|e| CliError::Certificate(e.to_string()))?;
            if doc.algebra != f.name {
                return Err(CliError::Certificate(format!(
                    "certificate is for `{}`, file presents `{}`",
                    doc.algebra, f.name
                )));
            }
            let h = certified(&f, 2 * doc.bound)?;
            let g = group(&f, &h, &doc.group, doc.group_cap)?;
            let mut checked = vec![];
            for e in &doc.entries {
                let entry = verify_certificate_entry(e, &g)?;
                checked.push(json!({ "generator": entry.generator, "exponent": entry.exponent, "terms": entry.witness.terms.len() }));
            }
            Ok((
                0,
                json!({ "algebra": f.name, "group": doc.group, "status": "verified", "entries": checked }),
            ))
        }
        Command::Selftest { seed, samples } => selftest(*seed, *samples),
    }
}

fn selftest(seed: u64, samples: usize) -> Result<(i32, Value), CliError> {
    let mut rng = sample::rng(seed);
    let mut checks = vec![];
    let mut all_ok = true;
    let mut record = |name: String, passed: usize, failed: usize, skipped: usize| {
        all_ok &= failed == 0;
        checks.push(json!({ "name": name, "passed": passed, "failed": failed, "skipped": skipped }));
    };
    for domain in [Domain::Rational, Domain::cyclotomic(3), Domain::cyclotomic(4), Domain::PrimeField(7)] {
        let (mut ok, mut bad) = (0, 0);
        for _ in 0..samples {
            let a = sample::scalar(&mut rng, domain, 5);
            let b = sample::scalar(&mut rng, domain, 5);
            let c = sample::scalar(&mut rng, domain, 5);
            let assoc = &(&a * &b) * &c == &a * &(&b * &c);
            let distrib = &a * &(&b + &c) == &(&a * &b) + &(&a * &c);
            let inverse = a.is_zero() || (&a * &a.inv().expect("nonzero")).is_one();
            if assoc && distrib && inverse {
                ok += 1;
            } else {
                bad += 1;
            }
        }
        record(format!("field axioms over {domain}"), ok, bad, 0);
    }
    for (domain, p) in [(Domain::Rational, 7), (Domain::cyclotomic(3), 7), (Domain::cyclotomic(4), 13)] {
        let (mut ok, mut bad, mut skip) = (0, 0, 0);
        for _ in 0..samples {
            let a = sample::scalar(&mut rng, domain, 5);
            let b = sample::scalar(&mut rng, domain, 5);
            let red = |s: &crate::scalars::Scalar| reduce_mod_p(s, p);
            match (red(&a), red(&b), red(&(&a + &b)), red(&(&a * &b))) {
                (Ok(ra), Ok(rb), Ok(rs), Ok(rp)) => {
                    if rs == &ra + &rb && rp == &ra * &rb {
                        ok += 1;
                    } else {
                        bad += 1;
                    }
                }
                _ => skip += 1,
            }
        }
        record(format!("reduce_mod_p over {domain} at p = {p}"), ok, bad, skip);
    }
    let poly = crate::zoo::polynomial_ring(&["x", "y"], Domain::Rational)?;
    let h = Arc::new(AlgebraHandle::certified(poly, 8)?);
    let d = h.domain();
    let neg = mk_automorphism(
        &h,
        vec![
            crate::ncpoly::Poly::generator(0, d).scale(&d.from_int(-1)),
            crate::ncpoly::Poly::generator(1, d).scale(&d.from_int(-1)),
        ],
    )?;
    let g = generate_group(&h, &[neg], 4)?;
    let words: Vec<Word> = h.normal_words_upto(2)?;
    let (mut ok, mut bad) = (0, 0);
    for _ in 0..samples {
        let u = sample::skew(&mut rng, &words, g.order(), 3, d, 4);
        let v = sample::skew(&mut rng, &words, g.order(), 3, d, 4);
        let w = sample::skew(&mut rng, &words, g.order(), 3, d, 4);
        let left = skew_mul(&skew_mul(&u, &v, &g)?, &w, &g)?;
        let right = skew_mul(&u, &skew_mul(&v, &w, &g)?, &g)?;
        if left == right {
            ok += 1;
        } else {
            bad += 1;
        }
    }
    record("skew_mul associativity on k[x,y] # <-id>".into(), ok, bad, 0);
    Ok((
        if all_ok { 0 } else { 1 },
        json!({ "seed": seed, "samples": samples, "checks": checks }),
    ))
}
