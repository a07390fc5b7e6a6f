use crate::ncpoly::{Alphabet, GeneratorInfo, Poly, Word};
use crate::scalars::{Domain, Scalar};

use super::{Presentation, Provenance, ZooError};

fn poly(domain: Domain, terms: &[(Scalar, &[usize])]) -> Poly {
    let mut p = Poly::zero(domain);
    for (c, w) in terms {
        p.add_term(Word(w.iter().map(|&i| i as u16).collect()), c);
    }
    p
}

fn lift(domain: Domain, s: &Scalar) -> Result<Scalar, ZooError> {
    Ok(domain.lift(s)?)
}

fn nonzero(name: &str, s: &Scalar) -> Result<(), ZooError> {
    if s.is_zero() {
        Err(ZooError::ZeroParameter(name.into()))
    } else {
        Ok(())
    }
}

fn gens(names: &[&str], weights: &[u32]) -> Vec<GeneratorInfo> {
    names
        .iter()
        .zip(weights)
        .map(|(n, &w)| GeneratorInfo::new(*n, w, 0))
        .collect()
}

/// Bracket table of a finite-dimensional Lie superalgebra: `table[i][j][p]`
/// is the coefficient of `x_p` in `[x_i, x_j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperLieData {
    pub names: Vec<String>,
    pub parities: Vec<u8>,
    pub domain: Domain,
    pub table: Vec<Vec<Vec<Scalar>>>,
}

impl SuperLieData {
    pub fn new(names: Vec<String>, parities: Vec<u8>, domain: Domain) -> Self {
        let n = names.len();
        SuperLieData {
            names,
            parities,
            domain,
            table: vec![vec![vec![domain.zero(); n]; n]; n],
        }
    }

    /// Fills the listed brackets and, for each listed `[a, b]` whose mirror
    /// `[b, a]` is not listed, sets the mirror by super skew-symmetry.
    pub fn from_brackets(
        names: Vec<String>,
        parities: Vec<u8>,
        domain: Domain,
        brackets: &[(usize, usize, Vec<Scalar>)],
    ) -> Self {
        let mut data = Self::new(names, parities, domain);
        for (a, b, v) in brackets {
            data.table[*a][*b] = v.clone();
        }
        for (a, b, v) in brackets {
            if !brackets.iter().any(|(c, d, _)| c == b && d == a) {
                let sign = data.super_sign(*a, *b);
                // [b, a] = -(-1)^{|a||b|} [a, b]
                data.table[*b][*a] = v.iter().map(|c| if sign { c.clone() } else { -c }).collect();
            }
        }
        data
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// True when `(-1)^{|a||b|} = -1`.
    fn super_sign(&self, a: usize, b: usize) -> bool {
        self.parities[a] * self.parities[b] == 1
    }

    fn bracket_basis_vec(&self, a: usize, v: &[Scalar]) -> Vec<Scalar> {
        let n = self.dim();
        let mut out = vec![self.domain.zero(); n];
        for (p, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (q, t) in self.table[a][p].iter().enumerate() {
                if !t.is_zero() {
                    out[q] = &out[q] + &(c * t);
                }
            }
        }
        out
    }
}

/// Checks parity-compatibility, super skew-symmetry and the super Jacobi
/// identity over all basis triples. Returns notes on the conventions used.
pub fn validate_super_lie(data: &SuperLieData) -> Result<Vec<String>, ZooError> {
    let n = data.dim();
    if data.parities.len() != n || data.table.len() != n {
        return Err(ZooError::InvalidPresentation("bracket table has the wrong shape".into()));
    }
    for i in 0..n {
        if data.table[i].len() != n || data.table[i].iter().any(|v| v.len() != n) {
            return Err(ZooError::InvalidPresentation("bracket table has the wrong shape".into()));
        }
        for j in 0..n {
            for (p, c) in data.table[i][j].iter().enumerate() {
                if c.domain() != data.domain {
                    return Err(ZooError::InvalidPresentation(format!(
                        "structure constant ({i}, {j}, {p}) lives over {}",
                        c.domain()
                    )));
                }
                if !c.is_zero() && (data.parities[i] + data.parities[j]) % 2 != data.parities[p] {
                    return Err(ZooError::AxiomViolation {
                        i,
                        j,
                        k: p,
                        axiom: "parity".into(),
                    });
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for p in 0..n {
                let lhs = &data.table[i][j][p];
                let mirror = &data.table[j][i][p];
                let expected = if data.super_sign(i, j) { mirror.clone() } else { -mirror };
                if *lhs != expected {
                    return Err(ZooError::AxiomViolation {
                        i,
                        j,
                        k: p,
                        axiom: "skew-symmetry".into(),
                    });
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let sign = |a: usize, b: usize| if data.super_sign(a, b) { -data.domain.one() } else { data.domain.one() };
                let t1 = data.bracket_basis_vec(i, &data.table[j][k]);
                let t2 = data.bracket_basis_vec(j, &data.table[k][i]);
                let t3 = data.bracket_basis_vec(k, &data.table[i][j]);
                let (s1, s2, s3) = (sign(i, k), sign(j, i), sign(k, j));
                let bad = (0..n).any(|p| !(&(&(&s1 * &t1[p]) + &(&s2 * &t2[p])) + &(&s3 * &t3[p])).is_zero());
                if bad {
                    return Err(ZooError::AxiomViolation {
                        i,
                        j,
                        k,
                        axiom: "Jacobi".into(),
                    });
                }
            }
        }
    }
    Ok(vec![
        "skew-symmetry checked as [x,y] = -(-1)^{|x||y|}[y,x]".into(),
        "odd squares stored as 2y^2 - [y,y]".into(),
    ])
}

/// Enveloping algebra of a Lie superalgebra, generators in weight 1.
pub fn enveloping_super(data: &SuperLieData) -> Result<Presentation, ZooError> {
    let notes = validate_super_lie(data)?;
    let d = data.domain;
    let n = data.dim();
    let alphabet = Alphabet::new(
        data.names
            .iter()
            .zip(&data.parities)
            .map(|(name, &par)| GeneratorInfo::new(name.clone(), 1, par))
            .collect(),
    )?;
    let mut relations = vec![];
    for j in 0..n {
        for i in 0..=j {
            let bracket = &data.table[j][i];
            let mut r = Poly::zero(d);
            if i == j {
                if data.parities[i] == 0 {
                    continue;
                }
                r.add_term(Word(vec![i as u16, i as u16]), &d.from_int(2));
            } else {
                r.add_term(Word(vec![j as u16, i as u16]), &d.one());
                let s = if data.super_sign(i, j) { d.one() } else { -d.one() };
                r.add_term(Word(vec![i as u16, j as u16]), &s);
            }
            for (p, c) in bracket.iter().enumerate() {
                r.add_term(Word::letter(p), &-c);
            }
            relations.push(r);
        }
    }
    let even = data.parities.iter().filter(|&&p| p == 0).count() as u32;
    Ok(Presentation::new(alphabet, relations, d)?.with_provenance(Provenance {
        family: "enveloping_super".into(),
        params: vec![("dim".into(), format!("{}|{}", even, n as u32 - even))],
        parameters: vec![],
        gk_dim: Some(even),
        notes,
    }))
}

/// The Lie superalgebra pl(1|1) with basis `x1, x2` (even) and `y1, y2`
/// (odd): `[x2,y1] = y1`, `[x2,y2] = -y2`, `[y1,y2] = x1`.
pub fn pl11_data(domain: Domain) -> SuperLieData {
    let e = |p: usize, c: i64| {
        let mut v = vec![domain.zero(); 4];
        v[p] = domain.from_int(c);
        v
    };
    SuperLieData::from_brackets(
        ["x1", "x2", "y1", "y2"].iter().map(|s| s.to_string()).collect(),
        vec![0, 0, 1, 1],
        domain,
        &[(1, 2, e(2, 1)), (1, 3, e(3, -1)), (2, 3, e(0, 1))],
    )
}

pub fn pl11(domain: Domain) -> Result<Presentation, ZooError> {
    let mut p = enveloping_super(&pl11_data(domain))?;
    if let Some(prov) = &mut p.provenance {
        prov.family = "pl11".into();
    }
    Ok(p)
}

/// Iterated Ore extension `k[x1][x2; delta_2]...[xn; delta_n]`.
/// `deltas[i - 1][j]` is `delta(x_i, x_j)` for `j < i` (0-based indices).
/// Weights: `x1` has weight 1, and each later generator gets the maximum
/// weight of its derivation values, at least 1.
pub fn iterated_ore(names: &[&str], domain: Domain, deltas: &[Vec<Poly>]) -> Result<Presentation, ZooError> {
    let n = names.len();
    if n == 0 || deltas.len() + 1 != n {
        return Err(ZooError::InvalidPresentation(
            "need one derivation list per generator after the first".into(),
        ));
    }
    let mut weights: Vec<u32> = vec![1];
    for (k, row) in deltas.iter().enumerate() {
        let i = k + 1;
        if row.len() != i {
            return Err(ZooError::InvalidPresentation(format!(
                "delta for {} needs values on {} generators",
                names[i], i
            )));
        }
        let mut w = 1u64;
        for (j, d) in row.iter().enumerate() {
            if d.domain() != domain {
                return Err(ZooError::InvalidPresentation(format!(
                    "delta({}, {}) lives over {}",
                    names[i],
                    names[j],
                    d.domain()
                )));
            }
            if d.terms().any(|(word, _)| word.iter().any(|&a| a as usize >= i)) {
                return Err(ZooError::InvalidPresentation(format!(
                    "delta({}, {}) uses generators not yet adjoined",
                    names[i], names[j]
                )));
            }
            let wt = d
                .terms()
                .map(|(word, _)| word.iter().map(|&a| weights[a as usize] as u64).sum::<u64>())
                .max()
                .unwrap_or(0);
            w = w.max(wt);
        }
        weights.push(w as u32);
    }
    let alphabet = Alphabet::new(gens(names, &weights))?;
    let mut relations = vec![];
    let rel = |i: usize, j: usize| {
        let mut r = poly(domain, &[(domain.one(), &[i, j]), (-domain.one(), &[j, i])]);
        r.add_scaled(&deltas[i - 1][j], &-domain.one());
        r
    };
    for i in 1..n {
        for j in 0..i {
            relations.push(rel(i, j));
        }
    }
    // Each delta must kill the relations among earlier generators.
    for i in 2..n {
        let prior: Vec<Poly> = (1..i).flat_map(|a| (0..a).map(move |b| (a, b))).map(|(a, b)| rel(a, b)).collect();
        let system = crate::rewrite::orient(&prior, &alphabet, domain)?;
        for r in &prior {
            let mut image = Poly::zero(domain);
            for (w, c) in r.terms() {
                for pos in 0..w.len() {
                    let pre = Poly::word(Word(w[..pos].to_vec()), domain);
                    let post = Poly::word(Word(w[pos + 1..].to_vec()), domain);
                    let d = &deltas[i - 1][w[pos] as usize];
                    image.add_scaled(&(&(&pre * d) * &post), c);
                }
            }
            if !system.normal_form(&image).is_zero() {
                return Err(ZooError::NotADerivation {
                    k: i + 1,
                    relation: r.display(&alphabet).to_string(),
                });
            }
        }
    }
    Ok(Presentation::new(alphabet, relations, domain)?.with_provenance(Provenance {
        family: "iterated_ore".into(),
        params: vec![("n".into(), n.to_string())],
        parameters: vec![],
        gk_dim: Some(n as u32),
        notes: vec![],
    }))
}

/// Multiparameter quantized Weyl algebra on `x1, y1, ..., xn, yn` (names `x, y`
/// when `n = 1`), with `x_i, y_i` in weight `i`.
pub fn quantized_weyl(
    n: usize,
    q: &[Vec<Scalar>],
    gamma: &[Scalar],
    domain: Domain,
) -> Result<Presentation, ZooError> {
    quantized_weyl_inner(n, q, gamma, domain, None)
}

/// [`quantized_weyl`] with `q_ij = q` for `i < j` and `q^-1` for `i > j`.
pub fn quantized_weyl_uniform(n: usize, q: &Scalar, gamma: &[Scalar], domain: Domain) -> Result<Presentation, ZooError> {
    let q = lift(domain, q)?;
    nonzero("q", &q)?;
    let qi = q.inv()?;
    let m: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Less => q.clone(),
                    std::cmp::Ordering::Equal => domain.one(),
                    std::cmp::Ordering::Greater => qi.clone(),
                })
                .collect()
        })
        .collect();
    quantized_weyl_inner(n, &m, gamma, domain, Some(q))
}

fn quantized_weyl_inner(
    n: usize,
    q: &[Vec<Scalar>],
    gamma: &[Scalar],
    domain: Domain,
    uniform: Option<Scalar>,
) -> Result<Presentation, ZooError> {
    if n == 0 {
        return Err(ZooError::InvalidPresentation("quantized Weyl algebra needs n >= 1".into()));
    }
    if q.len() != n || q.iter().any(|r| r.len() != n) {
        return Err(ZooError::InvalidQMatrix(format!("expected a {n}x{n} matrix")));
    }
    if gamma.len() != n {
        return Err(ZooError::InvalidPresentation(format!("expected {n} gamma values")));
    }
    let q: Vec<Vec<Scalar>> = q
        .iter()
        .map(|r| r.iter().map(|s| lift(domain, s)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let gamma: Vec<Scalar> = gamma.iter().map(|s| lift(domain, s)).collect::<Result<_, _>>()?;
    for i in 0..n {
        if !q[i][i].is_one() {
            return Err(ZooError::InvalidQMatrix(format!("q_{0}{0} must be 1", i + 1)));
        }
        for j in 0..n {
            if q[i][j].is_zero() {
                return Err(ZooError::InvalidQMatrix(format!("q_{}{} is zero", i + 1, j + 1)));
            }
            if !(&q[i][j] * &q[j][i]).is_one() {
                return Err(ZooError::InvalidQMatrix(format!(
                    "q_{0}{1} * q_{1}{0} must be 1",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    for (i, g) in gamma.iter().enumerate() {
        nonzero(&format!("gamma_{}", i + 1), g)?;
    }
    let names: Vec<String> = if n == 1 {
        vec!["x".into(), "y".into()]
    } else {
        (1..=n).flat_map(|i| [format!("x{i}"), format!("y{i}")]).collect()
    };
    let weights: Vec<u32> = (1..=n as u32).flat_map(|i| [i, i]).collect();
    let alphabet = Alphabet::new(
        names
            .iter()
            .zip(&weights)
            .map(|(s, &w)| GeneratorInfo::new(s.clone(), w, 0))
            .collect(),
    )?;
    let x = |i: usize| 2 * i;
    let y = |i: usize| 2 * i + 1;
    let one = domain.one();
    let mut relations = vec![];
    for j in 0..n {
        for i in 0..j {
            relations.push(poly(domain, &[(one.clone(), &[y(i), y(j)]), (-&q[i][j], &[y(j), y(i)])]));
            relations.push(poly(domain, &[(one.clone(), &[x(i), y(j)]), (-&q[j][i], &[y(j), x(i)])]));
            relations.push(poly(
                domain,
                &[(one.clone(), &[x(i), x(j)]), (-&(&gamma[i] * &q[i][j]), &[x(j), x(i)])],
            ));
            relations.push(poly(
                domain,
                &[(one.clone(), &[x(j), y(i)]), (-&(&gamma[i] * &q[i][j]), &[y(i), x(j)])],
            ));
        }
        let mut r = poly(
            domain,
            &[(one.clone(), &[x(j), y(j)]), (-one.clone(), &[]), (-&gamma[j], &[y(j), x(j)])],
        );
        for l in 0..j {
            r.add_term(Word(vec![y(l) as u16, x(l) as u16]), &-&(&gamma[l] - &one));
        }
        relations.push(r);
    }
    let mut params = vec![("n".to_string(), n.to_string())];
    let mut parameters = vec![];
    if let Some(u) = &uniform {
        params.push(("q".into(), u.to_string()));
        parameters.push(u.clone());
    } else {
        for i in 0..n {
            for j in i + 1..n {
                params.push((format!("q{}{}", i + 1, j + 1), q[i][j].to_string()));
                parameters.push(q[i][j].clone());
            }
        }
    }
    for (i, g) in gamma.iter().enumerate() {
        params.push((format!("gamma{}", i + 1), g.to_string()));
        parameters.push(g.clone());
    }
    Ok(Presentation::new(alphabet, relations, domain)?.with_provenance(Provenance {
        family: "quantized_weyl".into(),
        params,
        parameters,
        gk_dim: Some(2 * n as u32),
        notes: vec![],
    }))
}

/// The first Weyl algebra `xy - yx = 1`.
pub fn weyl(domain: Domain) -> Result<Presentation, ZooError> {
    let mut p = quantized_weyl(1, &[vec![domain.one()]], &[domain.one()], domain)?;
    if let Some(prov) = &mut p.provenance {
        prov.family = "weyl".into();
        prov.params.clear();
        prov.parameters.clear();
    }
    Ok(p)
}

/// Down-up algebra `A(alpha, beta, gamma)` on `d, u`, both in weight 1.
/// Optional roots must satisfy `r + s = alpha`, `rs = -beta`.
pub fn down_up(
    alpha: &Scalar,
    beta: &Scalar,
    gamma: &Scalar,
    roots: Option<(&Scalar, &Scalar)>,
    domain: Domain,
) -> Result<Presentation, ZooError> {
    let (a, b, g) = (lift(domain, alpha)?, lift(domain, beta)?, lift(domain, gamma)?);
    if b.is_zero() {
        return Err(ZooError::BetaZero);
    }
    let mut params = vec![
        ("alpha".to_string(), a.to_string()),
        ("beta".to_string(), b.to_string()),
        ("gamma".to_string(), g.to_string()),
    ];
    let mut parameters = vec![a.clone(), b.clone(), g.clone()];
    if let Some((r, s)) = roots {
        let (r, s) = (lift(domain, r)?, lift(domain, s)?);
        if &r + &s != a || -&(&r * &s) != b {
            return Err(ZooError::RootsInconsistent);
        }
        params.push(("r".into(), r.to_string()));
        params.push(("s".into(), s.to_string()));
        parameters.push(r);
        parameters.push(s);
    }
    let alphabet = Alphabet::new(gens(&["d", "u"], &[1, 1]))?;
    let one = domain.one();
    let (d, u) = (0, 1);
    let relations = vec![
        poly(
            domain,
            &[(one.clone(), &[d, d, u]), (-&a, &[d, u, d]), (-&b, &[u, d, d]), (-&g, &[d])],
        ),
        poly(
            domain,
            &[(one.clone(), &[d, u, u]), (-&a, &[u, d, u]), (-&b, &[u, u, d]), (-&g, &[u])],
        ),
    ];
    Ok(Presentation::new(alphabet, relations, domain)?.with_provenance(Provenance {
        family: "down_up".into(),
        params,
        parameters,
        gk_dim: Some(3),
        notes: vec!["d and u both read in filtration degree 1".into()],
    }))
}

pub fn down_up_from_roots(r: &Scalar, s: &Scalar, gamma: &Scalar, domain: Domain) -> Result<Presentation, ZooError> {
    let (r, s) = (lift(domain, r)?, lift(domain, s)?);
    let alpha = &r + &s;
    let beta = -&(&r * &s);
    down_up(&alpha, &beta, gamma, Some((&r, &s)), domain)
}

/// The four two-generated families over a field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gl2Kind {
    QuantumPlane(Scalar),
    Jordan,
    QuantumWeyl(Scalar),
    DeformedJordan,
}

/// `quantum_plane`: `xy - q yx`. `jordan`: `yx - xy + y^2`. `quantum_weyl`:
/// `xy - q yx - 1`. `deformed_jordan`: `yx - xy + y^2 + 1`. The Jordan types
/// order `y` below `x` so that `xy` leads.
pub fn gl2_family(kind: &Gl2Kind, domain: Domain) -> Result<Presentation, ZooError> {
    let one = domain.one();
    let (x, y) = (0, 1);
    let (family, rel, q, jordan) = match kind {
        Gl2Kind::QuantumPlane(q) => {
            let q = lift(domain, q)?;
            nonzero("q", &q)?;
            let r = poly(domain, &[(one.clone(), &[x, y]), (-&q, &[y, x])]);
            ("quantum_plane", r, Some(q), false)
        }
        Gl2Kind::QuantumWeyl(q) => {
            let q = lift(domain, q)?;
            nonzero("q", &q)?;
            let r = poly(domain, &[(one.clone(), &[x, y]), (-&q, &[y, x]), (-one.clone(), &[])]);
            ("quantum_weyl", r, Some(q), false)
        }
        Gl2Kind::Jordan => (
            "jordan",
            poly(domain, &[(one.clone(), &[y, x]), (-one.clone(), &[x, y]), (one.clone(), &[y, y])]),
            None,
            true,
        ),
        Gl2Kind::DeformedJordan => (
            "deformed_jordan",
            poly(
                domain,
                &[(one.clone(), &[y, x]), (-one.clone(), &[x, y]), (one.clone(), &[y, y]), (one.clone(), &[])],
            ),
            None,
            true,
        ),
    };
    let mut g = gens(&["x", "y"], &[1, 1]);
    if jordan {
        g[0].precedence = 1;
        g[1].precedence = 0;
    } else {
        g[1].precedence = 1;
    }
    let alphabet = Alphabet::with_precedence(g)?;
    let mut params = vec![];
    let mut parameters = vec![];
    if let Some(q) = q {
        params.push(("q".into(), q.to_string()));
        parameters.push(q);
    }
    Ok(Presentation::new(alphabet, vec![rel], domain)?.with_provenance(Provenance {
        family: family.into(),
        params,
        parameters,
        gk_dim: Some(2),
        notes: vec![],
    }))
}

/// Rank-one symplectic reflection algebra for the cyclic group of order `m`
/// acting on `span(x, y)` by `diag(zeta_m, zeta_m^-1)`, with `omega(x, y) = 1`.
/// Generators `x, y` in weight 1 and `g` in weight 0; `c` lists `c_1..c_{m-1}`.
pub fn symplectic_reflection_rank1(m: u32, t: &Scalar, c: &[Scalar], domain: Domain) -> Result<Presentation, ZooError> {
    if m == 0 {
        return Err(ZooError::InvalidPresentation("group order must be positive".into()));
    }
    if c.len() + 1 != m as usize {
        return Err(ZooError::InvalidPresentation(format!("expected {} class parameters", m - 1)));
    }
    let zeta = domain.zeta(m)?;
    let zinv = zeta.inv()?;
    let t = lift(domain, t)?;
    let c: Vec<Scalar> = c.iter().map(|s| lift(domain, s)).collect::<Result<_, _>>()?;
    let alphabet = Alphabet::new(vec![
        GeneratorInfo::new("x", 1, 0),
        GeneratorInfo::new("y", 1, 0),
        GeneratorInfo::new("g", 0, 0),
    ])?;
    let one = domain.one();
    let (x, y, g) = (0, 1, 2);
    let gm: Vec<usize> = vec![g; m as usize];
    let mut relations = vec![
        poly(domain, &[(one.clone(), &gm), (-one.clone(), &[])]),
        poly(domain, &[(one.clone(), &[g, x]), (-&zeta, &[x, g])]),
        poly(domain, &[(one.clone(), &[g, y]), (-&zinv, &[y, g])]),
    ];
    let mut r = poly(domain, &[(one.clone(), &[x, y]), (-one.clone(), &[y, x]), (-&t, &[])]);
    for (i, ci) in c.iter().enumerate() {
        r.add_term(Word(vec![g as u16; i + 1]), &-ci);
    }
    relations.push(r);
    let mut params = vec![("m".to_string(), m.to_string()), ("t".to_string(), t.to_string())];
    let mut parameters = vec![t];
    for (i, ci) in c.iter().enumerate() {
        params.push((format!("c{}", i + 1), ci.to_string()));
        parameters.push(ci.clone());
    }
    parameters.push(zeta);
    Ok(Presentation::new(alphabet, relations, domain)?.with_provenance(Provenance {
        family: "symplectic_reflection_rank1".into(),
        params,
        parameters,
        gk_dim: Some(2),
        notes: vec!["omega(x, y) = 1".into()],
    }))
}

/// `k[x_1, ..., x_n]` with generators in weight 1.
pub fn polynomial_ring(names: &[&str], domain: Domain) -> Result<Presentation, ZooError> {
    let n = names.len();
    let alphabet = Alphabet::new(gens(names, &vec![1; n]))?;
    let one = domain.one();
    let mut relations = vec![];
    for j in 0..n {
        for i in 0..j {
            relations.push(poly(domain, &[(one.clone(), &[j, i]), (-one.clone(), &[i, j])]));
        }
    }
    Ok(Presentation::new(alphabet, relations, domain)?.with_provenance(Provenance {
        family: "polynomial_ring".into(),
        params: vec![("n".into(), n.to_string())],
        parameters: vec![],
        gk_dim: Some(n as u32),
        notes: vec![],
    }))
}

/// Tensor product over the common field. Clashing names in the second factor
/// get a `_2` suffix; second-factor letters rank above first-factor ones.
pub fn tensor_product(a: &Presentation, b: &Presentation) -> Result<Presentation, ZooError> {
    if a.domain != b.domain {
        return Err(ZooError::DomainMismatch(a.domain, b.domain));
    }
    if a.has_odd_generators() || b.has_odd_generators() {
        return Err(ZooError::SuperTensorUnsupported);
    }
    let domain = a.domain;
    let na = a.alphabet.len();
    let mut g: Vec<GeneratorInfo> = a.alphabet.generators().to_vec();
    for info in b.alphabet.generators() {
        let mut name = info.name.clone();
        while g.iter().any(|h| h.name == name) {
            name.push_str("_2");
        }
        g.push(GeneratorInfo {
            name,
            weight: info.weight,
            parity: 0,
            precedence: info.precedence + na as u32,
        });
    }
    let alphabet = Alphabet::with_precedence(g)?;
    let shift: Vec<u16> = (0..b.alphabet.len()).map(|i| (i + na) as u16).collect();
    let mut relations: Vec<Poly> = a.relations.clone();
    relations.extend(b.relations.iter().map(|r| r.rename(&shift)));
    let one = domain.one();
    for i in 0..na {
        for j in 0..b.alphabet.len() {
            relations.push(poly(domain, &[(one.clone(), &[j + na, i]), (-one.clone(), &[i, j + na])]));
        }
    }
    let (pa, pb) = (a.provenance.clone().unwrap_or_default(), b.provenance.clone().unwrap_or_default());
    let mut params: Vec<(String, String)> = pa.params.iter().map(|(k, v)| (format!("left.{k}"), v.clone())).collect();
    params.extend(pb.params.iter().map(|(k, v)| (format!("right.{k}"), v.clone())));
    let mut parameters = pa.parameters.clone();
    parameters.extend(pb.parameters.iter().cloned());
    let gk_dim = pa.gk_dim.zip(pb.gk_dim).map(|(x, y)| x + y);
    Ok(Presentation::new(alphabet, relations, domain)?.with_provenance(Provenance {
        family: format!("tensor({}, {})", pa.family, pb.family),
        params,
        parameters,
        gk_dim,
        notes: vec![],
    }))
}
