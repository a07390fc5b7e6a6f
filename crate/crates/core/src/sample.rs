//! Seeded random sampling of scalars, polynomials and skew elements.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::action::SkewPoly;
use crate::ncpoly::{Poly, Word};
use crate::scalars::{euler_phi, Cyclotomic, Domain, Scalar};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational with numerator in `[-height, height]` and denominator in
/// `[1, height]`.
pub fn rational<R: Rng>(rng: &mut R, height: i64) -> BigRational {
    let h = height.max(1);
    let n = rng.gen_range(-h..=h);
    let d = rng.gen_range(1..=h);
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn scalar<R: Rng>(rng: &mut R, domain: Domain, height: i64) -> Scalar {
    match domain {
        Domain::Rational => Scalar::Rational(rational(rng, height)),
        Domain::Cyclotomic(n) => {
            let coeffs = (0..euler_phi(n)).map(|_| rational(rng, height)).collect();
            Scalar::Cyclotomic(Cyclotomic::from_coeffs(n, coeffs))
        }
        Domain::PrimeField(p) => domain.from_int(rng.gen_range(0..p) as i64),
    }
}

pub fn nonzero_scalar<R: Rng>(rng: &mut R, domain: Domain, height: i64) -> Scalar {
    loop {
        let s = scalar(rng, domain, height);
        if !s.is_zero() {
            return s;
        }
    }
}

/// A combination of up to `terms` words drawn from `words`.
pub fn poly<R: Rng>(rng: &mut R, words: &[Word], terms: usize, domain: Domain, height: i64) -> Poly {
    let mut p = Poly::zero(domain);
    if words.is_empty() {
        return p;
    }
    for _ in 0..rng.gen_range(1..=terms.max(1)) {
        let w = words[rng.gen_range(0..words.len())].clone();
        p.add_term(w, &scalar(rng, domain, height));
    }
    p
}

/// A combination of up to `terms` elements `w # g`.
pub fn skew<R: Rng>(rng: &mut R, words: &[Word], group_order: usize, terms: usize, domain: Domain, height: i64) -> SkewPoly {
    let mut s = SkewPoly::zero(domain);
    if words.is_empty() || group_order == 0 {
        return s;
    }
    for _ in 0..rng.gen_range(1..=terms.max(1)) {
        let w = words[rng.gen_range(0..words.len())].clone();
        s.add_term(w, rng.gen_range(0..group_order), &scalar(rng, domain, height));
    }
    s
}
