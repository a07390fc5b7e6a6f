//! Exact coefficient arithmetic.
//!
//! Three coefficient domains are supported: the rationals, cyclotomic fields
//! `Q(zeta_n)` stored in the power basis modulo the `n`-th cyclotomic
//! polynomial, and prime fields `F_p`. Values of different domains never mix
//! silently; the `checked_*` methods report a [`ScalarError::DomainMismatch`]
//! and the operator impls panic.
//!
//! The module also extracts the subring `D` of "order" coefficients
//! ([`order_generators`]) and specializes scalars to finite fields
//! ([`reduce_mod_p`]).

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("scalar domain mismatch: {0} vs {1}")]
    DomainMismatch(Domain, Domain),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("denominator of {value} vanishes modulo {p}")]
    DenominatorVanishes { value: String, p: u64 },
    #[error("F_{p} contains no element of multiplicative order {n}")]
    NoRootOfUnity { n: u32, p: u64 },
    #[error("coefficients live in incompatible cyclotomic fields Q(zeta({0})) and Q(zeta({1}))")]
    MixedCyclotomicOrders(u32, u32),
    #[error("cannot embed zeta({n}) into {domain}")]
    RootNotInDomain { n: u32, domain: Domain },
    #[error("operation not supported on {0}")]
    UnsupportedDomain(Domain),
}

/// Coefficient domain tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    Rational,
    /// `Q(zeta_n)` with `n >= 3`.
    Cyclotomic(u32),
    PrimeField(u64),
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Rational => write!(f, "Q"),
            Domain::Cyclotomic(n) => write!(f, "Q(zeta({n}))"),
            Domain::PrimeField(p) => write!(f, "F({p})"),
        }
    }
}

impl Domain {
    /// `Q(zeta_n)`; for `n <= 2` this is just `Q`.
    pub fn cyclotomic(n: u32) -> Domain {
        assert!(n >= 1, "cyclotomic order must be positive");
        if n <= 2 {
            Domain::Rational
        } else {
            Domain::Cyclotomic(n)
        }
    }

    pub fn prime_field(p: u64) -> Result<Domain, ScalarError> {
        if !is_prime(p) {
            return Err(ScalarError::NotPrime(p));
        }
        Ok(Domain::PrimeField(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Domain::PrimeField(p) => *p,
            _ => 0,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_int(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int(&self, i: i64) -> Scalar {
        match *self {
            Domain::Rational => Scalar::Rational(BigRational::from_integer(i.into())),
            Domain::Cyclotomic(n) => {
                let mut coeffs = vec![BigRational::zero(); euler_phi(n) as usize];
                coeffs[0] = BigRational::from_integer(i.into());
                Scalar::Cyclotomic(Cyclotomic { n, coeffs })
            }
            Domain::PrimeField(p) => Scalar::PrimeField {
                p,
                value: i.rem_euclid(p as i64) as u64,
            },
        }
    }

    /// Embeds a rational number. Over `F_p` this is reduction, which fails when
    /// `p` divides the denominator.
    pub fn from_rational(&self, q: &BigRational) -> Result<Scalar, ScalarError> {
        match *self {
            Domain::Rational => Ok(Scalar::Rational(q.clone())),
            Domain::Cyclotomic(n) => {
                let mut coeffs = vec![BigRational::zero(); euler_phi(n) as usize];
                coeffs[0] = q.clone();
                Ok(Scalar::Cyclotomic(Cyclotomic { n, coeffs }))
            }
            Domain::PrimeField(p) => rational_mod_p(q, p),
        }
    }

    /// `zeta_k` inside this domain. Over `Q(zeta_n)` requires `k | n`; over
    /// `F_p` the image is the smallest residue of multiplicative order `k`.
    pub fn zeta(&self, k: u32) -> Result<Scalar, ScalarError> {
        if k == 0 {
            return Err(ScalarError::RootNotInDomain { n: k, domain: *self });
        }
        match *self {
            Domain::Rational => match k {
                1 => Ok(self.one()),
                2 => Ok(self.from_int(-1)),
                _ => Err(ScalarError::RootNotInDomain { n: k, domain: *self }),
            },
            Domain::Cyclotomic(n) => {
                if n % k != 0 {
                    return Err(ScalarError::RootNotInDomain { n: k, domain: *self });
                }
                Ok(zeta_power(n, (n / k) as u64))
            }
            Domain::PrimeField(p) => {
                let r = root_of_unity_mod_p(k, p).ok_or(ScalarError::NoRootOfUnity { n: k, p })?;
                Ok(Scalar::PrimeField { p, value: r })
            }
        }
    }

    /// Moves `s` into this domain when that is a field embedding: rationals go
    /// anywhere (with reduction over `F_p`), `Q(zeta_k)` goes into `Q(zeta_n)`
    /// for `k | n`.
    pub fn lift(&self, s: &Scalar) -> Result<Scalar, ScalarError> {
        if s.domain() == *self {
            return Ok(s.clone());
        }
        match (s, *self) {
            (Scalar::Rational(q), _) => self.from_rational(q),
            (Scalar::Cyclotomic(c), Domain::Cyclotomic(n)) if n % c.n == 0 => {
                let z = zeta_power(n, (n / c.n) as u64);
                let mut acc = self.zero();
                let mut pow = self.one();
                for coeff in &c.coeffs {
                    acc = &acc + &(&pow * &self.from_rational(coeff)?);
                    pow = &pow * &z;
                }
                Ok(acc)
            }
            _ => Err(ScalarError::DomainMismatch(s.domain(), *self)),
        }
    }

    /// Smallest domain that both `self` and `other` embed into.
    pub fn join(&self, other: Domain) -> Result<Domain, ScalarError> {
        match (*self, other) {
            (a, b) if a == b => Ok(a),
            (Domain::Rational, b) => Ok(b),
            (a, Domain::Rational) => Ok(a),
            (Domain::Cyclotomic(a), Domain::Cyclotomic(b)) => {
                if a % b == 0 {
                    Ok(Domain::Cyclotomic(a))
                } else if b % a == 0 {
                    Ok(Domain::Cyclotomic(b))
                } else {
                    Err(ScalarError::MixedCyclotomicOrders(a, b))
                }
            }
            (a, b) => Err(ScalarError::DomainMismatch(a, b)),
        }
    }
}

/// Element of `Q(zeta_n)` in the power basis `1, zeta, ..., zeta^(phi(n)-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    n: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Builds a value from power-basis coordinates of any length, reducing
    /// modulo the cyclotomic polynomial.
    pub fn from_coeffs(n: u32, mut coeffs: Vec<BigRational>) -> Cyclotomic {
        reduce_mod_cyclotomic(n, &mut coeffs);
        Cyclotomic { n, coeffs }
    }

    fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Cyclotomic(Cyclotomic),
    PrimeField { p: u64, value: u64 },
}

impl Scalar {
    pub fn domain(&self) -> Domain {
        match self {
            Scalar::Rational(_) => Domain::Rational,
            Scalar::Cyclotomic(c) => Domain::Cyclotomic(c.n),
            Scalar::PrimeField { p, .. } => Domain::PrimeField(*p),
        }
    }

    pub fn rational(num: i64, den: i64) -> Scalar {
        Scalar::Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Cyclotomic(c) => c.coeffs.iter().all(Zero::is_zero),
            Scalar::PrimeField { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Cyclotomic(c) => c.coeffs[0].is_one() && c.is_rational(),
            Scalar::PrimeField { value, .. } => *value == 1,
        }
    }

    /// The rational value, when this scalar is one.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Rational(q) => Some(q.clone()),
            Scalar::Cyclotomic(c) if c.is_rational() => Some(c.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.binary(other, BinOp::Add)
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.binary(other, BinOp::Sub)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.binary(other, BinOp::Mul)
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        let inv = other.inv()?;
        self.checked_mul(&inv)
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(q) => Scalar::Rational(q.recip()),
            Scalar::Cyclotomic(c) => Scalar::Cyclotomic(cyclotomic_inverse(c)),
            Scalar::PrimeField { p, value } => Scalar::PrimeField {
                p: *p,
                value: pow_mod(*value, *p - 2, *p),
            },
        })
    }

    /// `self^e` for any integer `e` (negative exponents invert).
    pub fn pow(&self, e: i64) -> Result<Scalar, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.domain().one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    fn binary(&self, other: &Scalar, op: BinOp) -> Result<Scalar, ScalarError> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
            })),
            (Scalar::Cyclotomic(a), Scalar::Cyclotomic(b)) if a.n == b.n => {
                Ok(Scalar::Cyclotomic(match op {
                    BinOp::Add => Cyclotomic {
                        n: a.n,
                        coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
                    },
                    BinOp::Sub => Cyclotomic {
                        n: a.n,
                        coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
                    },
                    BinOp::Mul => cyclotomic_mul(a, b),
                }))
            }
            (Scalar::PrimeField { p, value: a }, Scalar::PrimeField { p: q, value: b }) if p == q => {
                let p = *p;
                let value = match op {
                    BinOp::Add => ((*a as u128 + *b as u128) % p as u128) as u64,
                    BinOp::Sub => ((*a as u128 + p as u128 - *b as u128) % p as u128) as u64,
                    BinOp::Mul => ((*a as u128 * *b as u128) % p as u128) as u64,
                };
                Ok(Scalar::PrimeField { p, value })
            }
            _ => Err(ScalarError::DomainMismatch(self.domain(), other.domain())),
        }
    }

    /// Multiplicative order, searched up to `cap`.
    pub fn multiplicative_order(&self, cap: u64) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let mut acc = self.clone();
        for k in 1..=cap {
            if acc.is_one() {
                return Some(k);
            }
            acc = &acc * self;
        }
        None
    }

    /// Splits a scalar that prints as a single signed term into its sign and
    /// magnitude; `None` for sums.
    pub(crate) fn signed_term(&self) -> Option<(bool, Scalar)> {
        match self {
            Scalar::Rational(q) => Some((q.is_negative(), Scalar::Rational(q.abs()))),
            Scalar::Cyclotomic(c) => {
                let nonzero: Vec<usize> = (0..c.coeffs.len()).filter(|&i| !c.coeffs[i].is_zero()).collect();
                match nonzero.as_slice() {
                    [] => Some((false, self.clone())),
                    [i] => {
                        let neg = c.coeffs[*i].is_negative();
                        let mut coeffs = c.coeffs.clone();
                        coeffs[*i] = coeffs[*i].abs();
                        Some((neg, Scalar::Cyclotomic(Cyclotomic { n: c.n, coeffs })))
                    }
                    _ => None,
                }
            }
            Scalar::PrimeField { .. } => Some((false, self.clone())),
        }
    }
}

#[derive(Clone, Copy)]
enum BinOp {
    Add,
    Sub,
    Mul,
}

macro_rules! scalar_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar domains must agree")
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$checked(&rhs).expect("scalar domains must agree")
            }
        }
    };
}

scalar_op!(Add, add, checked_add);
scalar_op!(Sub, sub, checked_sub);
scalar_op!(Mul, mul, checked_mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Cyclotomic(c) => Scalar::Cyclotomic(Cyclotomic {
                n: c.n,
                coeffs: c.coeffs.iter().map(|x| -x).collect(),
            }),
            Scalar::PrimeField { p, value } => Scalar::PrimeField {
                p: *p,
                value: (p - value) % p,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn fmt_zeta(n: u32, k: usize) -> String {
    match k {
        0 => "1".to_string(),
        1 => format!("zeta({n})"),
        _ => format!("zeta({n})^{k}"),
    }
}

/// Prints in the literal syntax accepted by the presentation parser.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{}", fmt_rational(q)),
            Scalar::PrimeField { value, .. } => write!(f, "{value}"),
            Scalar::Cyclotomic(c) => {
                let mut first = true;
                for (k, coeff) in c.coeffs.iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    let neg = coeff.is_negative();
                    let mag = coeff.abs();
                    if first {
                        if neg {
                            write!(f, "-")?;
                        }
                    } else {
                        write!(f, "{}", if neg { " - " } else { " + " })?;
                    }
                    first = false;
                    if k == 0 {
                        write!(f, "{}", fmt_rational(&mag))?;
                    } else if mag.is_one() {
                        write!(f, "{}", fmt_zeta(c.n, k))?;
                    } else {
                        write!(f, "{}*{}", fmt_rational(&mag), fmt_zeta(c.n, k))?;
                    }
                }
                if first {
                    write!(f, "0")?;
                }
                Ok(())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Cyclotomic machinery

pub fn euler_phi(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Integer coefficients of the `n`-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Phi_d for proper divisors d.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let div = cyclotomic_polynomial(d);
            num = exact_div_monic(&num, &div);
        }
    }
    let poly = Arc::new(num);
    cache.lock().unwrap().insert(n, poly.clone());
    poly
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

fn reduce_mod_cyclotomic(n: u32, coeffs: &mut Vec<BigRational>) {
    let phi = cyclotomic_polynomial(n);
    let deg = phi.len() - 1;
    if coeffs.len() > deg {
        for k in (deg..coeffs.len()).rev() {
            let c = std::mem::replace(&mut coeffs[k], BigRational::zero());
            if c.is_zero() {
                continue;
            }
            for (j, &pj) in phi.iter().enumerate().take(deg) {
                if pj != 0 {
                    coeffs[k - deg + j] -= &c * BigRational::from_integer(pj.into());
                }
            }
        }
        coeffs.truncate(deg);
    }
    coeffs.resize(deg, BigRational::zero());
}

fn zeta_power(n: u32, k: u64) -> Scalar {
    let k = (k % n as u64) as usize;
    let mut coeffs = vec![BigRational::zero(); k + 1];
    coeffs[k] = BigRational::one();
    Scalar::Cyclotomic(Cyclotomic::from_coeffs(n, coeffs))
}

fn cyclotomic_mul(a: &Cyclotomic, b: &Cyclotomic) -> Cyclotomic {
    let len = a.coeffs.len();
    let mut prod = vec![BigRational::zero(); 2 * len - 1];
    for (i, x) in a.coeffs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate() {
            if !y.is_zero() {
                prod[i + j] += x * y;
            }
        }
    }
    Cyclotomic::from_coeffs(a.n, prod)
}

type QPoly = Vec<BigRational>;

fn qpoly_trim(p: &mut QPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn qpoly_divrem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let mut rem = a.clone();
    qpoly_trim(&mut rem);
    let db = b.len() - 1;
    if rem.len() < b.len() {
        return (vec![], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    let lead = &b[db];
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let c = rem.last().unwrap() / lead;
        for (j, bj) in b.iter().enumerate() {
            rem[shift + j] -= &c * bj;
        }
        quot[shift] = c;
        rem.pop();
        qpoly_trim(&mut rem);
    }
    (quot, rem)
}

fn qpoly_sub_mul(a: &QPoly, q: &QPoly, b: &QPoly) -> QPoly {
    let mut out = a.clone();
    let need = q.len() + b.len();
    if out.len() < need {
        out.resize(need, BigRational::zero());
    }
    for (i, x) in q.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] -= x * y;
        }
    }
    qpoly_trim(&mut out);
    out
}

/// Inverse via the extended Euclidean algorithm against the (irreducible)
/// cyclotomic polynomial.
fn cyclotomic_inverse(c: &Cyclotomic) -> Cyclotomic {
    let phi: QPoly = cyclotomic_polynomial(c.n)
        .iter()
        .map(|&x| BigRational::from_integer(x.into()))
        .collect();
    let mut r0 = phi;
    let mut r1 = c.coeffs.clone();
    qpoly_trim(&mut r1);
    let mut s0: QPoly = vec![];
    let mut s1: QPoly = vec![BigRational::one()];
    while r1.len() > 1 {
        let (q, r) = qpoly_divrem(&r0, &r1);
        let s = qpoly_sub_mul(&s0, &q, &s1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    // r1 is a nonzero constant; s1 * c == r1 modulo Phi_n.
    let k = r1[0].clone();
    let coeffs = s1.into_iter().map(|x| x / &k).collect();
    Cyclotomic::from_coeffs(c.n, coeffs)
}

/// `zeta_n` as an exact scalar; `n = 1, 2` give the rationals `1` and `-1`.
pub fn mk_root_of_unity(n: u32) -> Scalar {
    Domain::cyclotomic(n).zeta(n).expect("zeta_n lives in Q(zeta_n)")
}

// ---------------------------------------------------------------------------
// Prime fields

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u128 % p as u128;
    let mut base = (b % p) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    b = acc as u64;
    b
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest residue in `F_p` of multiplicative order exactly `n`.
pub fn root_of_unity_mod_p(n: u32, p: u64) -> Option<u64> {
    let n = n as u64;
    if n == 0 || !(p - 1).is_multiple_of(n) {
        return None;
    }
    let factors = prime_factors(n);
    (1..p).find(|&r| pow_mod(r, n, p) == 1 && factors.iter().all(|&q| pow_mod(r, n / q, p) != 1))
}

fn bigint_mod(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

fn rational_mod_p(q: &BigRational, p: u64) -> Result<Scalar, ScalarError> {
    let den = bigint_mod(q.denom(), p);
    if den == 0 {
        return Err(ScalarError::DenominatorVanishes {
            value: fmt_rational(q),
            p,
        });
    }
    let num = bigint_mod(q.numer(), p);
    Ok(Scalar::PrimeField {
        p,
        value: ((num as u128 * pow_mod(den, p - 2, p) as u128) % p as u128) as u64,
    })
}

/// Specializes a characteristic-zero scalar to `F_p`. Cyclotomic values map
/// `zeta_n` to the smallest residue of multiplicative order exactly `n`.
pub fn reduce_mod_p(s: &Scalar, p: u64) -> Result<Scalar, ScalarError> {
    if !is_prime(p) {
        return Err(ScalarError::NotPrime(p));
    }
    match s {
        Scalar::Rational(q) => rational_mod_p(q, p),
        Scalar::Cyclotomic(c) => {
            let root = root_of_unity_mod_p(c.n, p).ok_or(ScalarError::NoRootOfUnity { n: c.n, p })?;
            let mut acc = 0u128;
            let mut pow = 1u128;
            for coeff in &c.coeffs {
                let Scalar::PrimeField { value, .. } = rational_mod_p(coeff, p).map_err(|_| {
                    ScalarError::DenominatorVanishes {
                        value: s.to_string(),
                        p,
                    }
                })?
                else {
                    unreachable!()
                };
                acc = (acc + value as u128 * pow) % p as u128;
                pow = pow * root as u128 % p as u128;
            }
            Ok(Scalar::PrimeField { p, value: acc as u64 })
        }
        Scalar::PrimeField { p: q, .. } if *q == p => Ok(s.clone()),
        Scalar::PrimeField { .. } => Err(ScalarError::DomainMismatch(s.domain(), Domain::PrimeField(p))),
    }
}

// ---------------------------------------------------------------------------
// Orders

/// One generator of `D` over `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderGenerator {
    pub name: String,
    pub value: Scalar,
}

/// A coefficient written as an integer polynomial in the order generators:
/// `sum c * g_1^e_1 * ... * g_k^e_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientExpression {
    pub value: Scalar,
    pub terms: Vec<(BigInt, Vec<u32>)>,
}

/// The subring `D = Z[g_1, ..., g_k]` of the coefficient field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderSpec {
    pub generators: Vec<OrderGenerator>,
    pub expressions: Vec<CoefficientExpression>,
    denominator: BigInt,
    zeta: Option<u32>,
}

impl OrderSpec {
    pub fn is_integral(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generator_names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    /// Whether `s` lies in `D`.
    pub fn contains(&self, s: &Scalar) -> bool {
        let coords: Vec<BigRational> = match s {
            Scalar::Rational(q) => vec![q.clone()],
            Scalar::Cyclotomic(c) => {
                if !c.is_rational() && self.zeta != Some(c.n) {
                    return false;
                }
                c.coeffs.clone()
            }
            Scalar::PrimeField { .. } => return false,
        };
        coords.iter().all(|q| {
            let mut d = q.denom().clone();
            let g = d.gcd(&self.denominator);
            // strip every prime that D inverts
            let mut g = g;
            while !g.is_one() {
                while (&d % &g).is_zero() {
                    d /= &g;
                }
                g = d.gcd(&self.denominator);
            }
            d.is_one()
        })
    }

    /// Evaluates an expression over the recorded generator values.
    pub fn evaluate(&self, expr: &CoefficientExpression) -> Result<Scalar, ScalarError> {
        let domain = expr.value.domain();
        let mut acc = domain.zero();
        for (c, exps) in &expr.terms {
            let mut term = domain.from_rational(&BigRational::from_integer(c.clone()))?;
            for (g, &e) in self.generators.iter().zip(exps) {
                term = term.checked_mul(&domain.lift(&g.value)?.pow(e as i64)?)?;
            }
            acc = acc.checked_add(&term)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for CoefficientExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =", self.value)?;
        if self.terms.is_empty() {
            return write!(f, " 0");
        }
        for (i, (c, exps)) in self.terms.iter().enumerate() {
            write!(f, "{}{}", if i == 0 { " " } else { " + " }, c)?;
            for (g, e) in exps.iter().enumerate() {
                if *e > 0 {
                    write!(f, "*g{}^{}", g + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

/// Minimal extraction of `D`: integers need nothing, denominators contribute
/// `1/L` for `L` the lcm of all denominators, and any non-rational cyclotomic
/// coefficient contributes `zeta_n`.
pub fn order_generators(coeffs: &[Scalar]) -> Result<OrderSpec, ScalarError> {
    let mut zeta_order: Option<u32> = None;
    let mut needs_zeta = false;
    let mut denominator = BigInt::one();
    for s in coeffs {
        let coords: &[BigRational] = match s {
            Scalar::Rational(q) => std::slice::from_ref(q),
            Scalar::Cyclotomic(c) => {
                match zeta_order {
                    Some(n) if n != c.n => return Err(ScalarError::MixedCyclotomicOrders(n, c.n)),
                    _ => zeta_order = Some(c.n),
                }
                needs_zeta |= !c.is_rational();
                &c.coeffs
            }
            Scalar::PrimeField { .. } => return Err(ScalarError::UnsupportedDomain(s.domain())),
        };
        for q in coords {
            denominator = denominator.lcm(q.denom());
        }
    }
    let domain = zeta_order.map_or(Domain::Rational, Domain::Cyclotomic);
    let mut generators = vec![];
    let inverts = !denominator.is_one();
    if inverts {
        generators.push(OrderGenerator {
            name: format!("1/{denominator}"),
            value: domain.from_rational(&BigRational::new(BigInt::one(), denominator.clone()))?,
        });
    }
    let zeta = if needs_zeta { zeta_order } else { None };
    if let Some(n) = zeta {
        generators.push(OrderGenerator {
            name: format!("zeta({n})"),
            value: domain.zeta(n)?,
        });
    }
    let mut spec = OrderSpec {
        generators,
        expressions: vec![],
        denominator: denominator.clone(),
        zeta,
    };
    for s in coeffs {
        let coords: Vec<BigRational> = match s {
            Scalar::Rational(q) => vec![q.clone()],
            Scalar::Cyclotomic(c) => c.coeffs.clone(),
            Scalar::PrimeField { .. } => unreachable!(),
        };
        let mut terms = vec![];
        for (k, q) in coords.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let scaled = q * BigRational::from_integer(denominator.clone());
            debug_assert!(scaled.is_integer());
            let mut exps = vec![];
            if inverts {
                exps.push(1);
            }
            if zeta.is_some() {
                exps.push(k as u32);
            }
            terms.push((scaled.to_integer(), exps));
        }
        let expr = CoefficientExpression {
            value: s.clone(),
            terms,
        };
        let back = spec.evaluate(&expr)?;
        assert_eq!(domain.lift(s)?, back, "order expression must reproduce its coefficient");
        spec.expressions.push(expr);
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeta(n: u32) -> Scalar {
        mk_root_of_unity(n)
    }

    #[test]
    fn roots_of_unity_small_cases() {
        assert_eq!(zeta(1), Scalar::rational(1, 1));
        assert_eq!(zeta(2), Scalar::rational(-1, 1));
        let z4 = zeta(4);
        assert_eq!(&z4 * &z4, Domain::Cyclotomic(4).from_int(-1));
    }

    #[test]
    fn roots_of_unity_have_exact_order() {
        for n in 1..=24 {
            assert_eq!(zeta(n).multiplicative_order(100), Some(n as u64), "n = {n}");
        }
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn zeta3_identities() {
        let z = zeta(3);
        let z2 = &z * &z;
        assert_eq!(&z + &z2, Domain::Cyclotomic(3).from_int(-1));
        assert_eq!(z.inv().unwrap(), z2);
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_mod_p(&Scalar::rational(3, 2), 5).unwrap(), Scalar::PrimeField { p: 5, value: 4 });
        assert!(matches!(
            reduce_mod_p(&Scalar::rational(1, 2), 2),
            Err(ScalarError::DenominatorVanishes { .. })
        ));
        assert_eq!(reduce_mod_p(&zeta(3), 7).unwrap(), Scalar::PrimeField { p: 7, value: 2 });
        assert_eq!(
            reduce_mod_p(&zeta(3), 3),
            Err(ScalarError::NoRootOfUnity { n: 3, p: 3 })
        );
        assert_eq!(reduce_mod_p(&zeta(3), 4), Err(ScalarError::NotPrime(4)));
    }

    #[test]
    fn smallest_roots_mod_p() {
        assert_eq!(root_of_unity_mod_p(3, 7), Some(2));
        assert_eq!(root_of_unity_mod_p(3, 13), Some(3));
        assert_eq!(root_of_unity_mod_p(4, 5), Some(2));
        assert_eq!(root_of_unity_mod_p(3, 5), None);
    }

    #[test]
    fn mixed_domains_are_errors() {
        let a = zeta(3);
        let b = Scalar::rational(1, 2);
        assert!(matches!(a.checked_add(&b), Err(ScalarError::DomainMismatch(..))));
        assert!(zeta(3).checked_mul(&zeta(4)).is_err());
    }

    #[test]
    fn lifting() {
        let d12 = Domain::Cyclotomic(12);
        let z3 = d12.lift(&zeta(3)).unwrap();
        assert_eq!(z3.multiplicative_order(20), Some(3));
        assert_eq!(d12.lift(&zeta(3)).unwrap(), d12.zeta(3).unwrap());
        assert!(Domain::Cyclotomic(3).lift(&zeta(4)).is_err());
        assert_eq!(
            Domain::PrimeField(7).lift(&Scalar::rational(1, 2)).unwrap(),
            Scalar::PrimeField { p: 7, value: 4 }
        );
    }

    #[test]
    fn display_literals() {
        let z = zeta(3);
        assert_eq!(z.to_string(), "zeta(3)");
        assert_eq!((&z * &z).to_string(), "-1 - zeta(3)");
        assert_eq!(Scalar::rational(-3, 6).to_string(), "-1/2");
        assert_eq!(Domain::Cyclotomic(5).zero().to_string(), "0");
    }

    #[test]
    fn order_extraction() {
        let q = Domain::Rational;
        let spec = order_generators(&[q.from_int(1), q.from_int(-1), q.from_int(2)]).unwrap();
        assert!(spec.is_integral());

        let d3 = Domain::Cyclotomic(3);
        let spec = order_generators(&[zeta(3), d3.from_int(5)]).unwrap();
        assert_eq!(spec.generator_names(), vec!["zeta(3)"]);

        let spec = order_generators(&[Scalar::rational(1, 2), Scalar::rational(5, 3)]).unwrap();
        assert_eq!(spec.generator_names(), vec!["1/6"]);
        assert!(spec.contains(&Scalar::rational(7, 4)));
        assert!(!spec.contains(&Scalar::rational(1, 5)));

        assert_eq!(
            order_generators(&[zeta(3), zeta(4)]),
            Err(ScalarError::MixedCyclotomicOrders(3, 4))
        );
    }

    #[test]
    fn order_extraction_is_idempotent() {
        let d = Domain::Cyclotomic(5);
        let half = d.from_rational(&BigRational::new(1.into(), 2.into())).unwrap();
        let spec = order_generators(&[&half * &zeta(5), d.from_int(3)]).unwrap();
        let values: Vec<Scalar> = spec.generators.iter().map(|g| g.value.clone()).collect();
        let again = order_generators(&values).unwrap();
        assert_eq!(again.generator_names(), spec.generator_names());
    }
}
