use std::cmp::Ordering;
use std::sync::Arc;

use ncfilt::action::{generate_group, mk_automorphism, reynolds, skew_mul, FiniteGroup, SkewPoly};
use ncfilt::ncpoly::{Alphabet, GeneratorInfo, Poly, Word};
use ncfilt::scalars::{mk_root_of_unity, reduce_mod_p, Cyclotomic, Domain, Scalar};
use ncfilt::zoo::{
    down_up_from_roots, gl2_family, pl11, pl11_data, polynomial_ring, quantized_weyl, validate_super_lie, weyl,
    AlgebraHandle, Gl2Kind, Presentation, SuperLieData,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-12i64..=12, 1i64..=12).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn scalar(domain: Domain) -> BoxedStrategy<Scalar> {
    match domain {
        Domain::Rational => rational().prop_map(Scalar::Rational).boxed(),
        Domain::Cyclotomic(n) => {
            let phi = (1..=n).filter(|k| num_integer::gcd(*k, n) == 1).count();
            prop::collection::vec(rational(), phi)
                .prop_map(move |c| Scalar::Cyclotomic(Cyclotomic::from_coeffs(n, c)))
                .boxed()
        }
        Domain::PrimeField(p) => (0..p).prop_map(move |v| domain.from_int(v as i64)).boxed(),
    }
}

fn word(letters: u16, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..letters, 0..=max_len).prop_map(Word)
}

fn poly(domain: Domain, letters: u16, max_len: usize, terms: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((word(letters, max_len), scalar(domain)), 0..=terms).prop_map(move |ts| {
        let mut p = Poly::zero(domain);
        for (w, c) in ts {
            p.add_term(w, &c);
        }
        p
    })
}

const DOMAINS: [Domain; 6] = [
    Domain::Rational,
    Domain::Cyclotomic(3),
    Domain::Cyclotomic(5),
    Domain::Cyclotomic(12),
    Domain::PrimeField(7),
    Domain::PrimeField(13),
];

#[test]
fn field_axioms_in_every_domain() {
    for d in DOMAINS {
        runner(300)
            .run(&(scalar(d), scalar(d), scalar(d)), |(a, b, c)| {
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                prop_assert_eq!(&a * &b, &b * &a);
                prop_assert_eq!(&a - &a, d.zero());
                if !a.is_zero() {
                    prop_assert!((&a * &a.inv().unwrap()).is_one());
                }
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn reduction_is_a_ring_homomorphism() {
    for (d, p) in [
        (Domain::Rational, 2),
        (Domain::Rational, 7),
        (Domain::Cyclotomic(3), 7),
        (Domain::Cyclotomic(3), 13),
        (Domain::Cyclotomic(4), 5),
        (Domain::Cyclotomic(5), 11),
    ] {
        runner(300)
            .run(&(scalar(d), scalar(d)), |(a, b)| {
                let r = |s: &Scalar| reduce_mod_p(s, p);
                if let (Ok(ra), Ok(rb), Ok(rs), Ok(rd), Ok(rp)) = (r(&a), r(&b), r(&(&a + &b)), r(&(&a - &b)), r(&(&a * &b))) {
                    prop_assert_eq!(rs, &ra + &rb);
                    prop_assert_eq!(rd, &ra - &rb);
                    prop_assert_eq!(rp, &ra * &rb);
                }
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn roots_of_unity_have_exact_order_by_exponentiation() {
    for n in 1..=24u32 {
        let z = mk_root_of_unity(n);
        let mut acc = z.domain().one();
        for k in 1..=n {
            acc = &acc * &z;
            assert_eq!(acc.is_one(), k == n, "zeta({n})^{k}");
        }
    }
}

fn mixed_alphabet() -> Alphabet {
    Alphabet::new(vec![
        GeneratorInfo::new("a", 1, 0),
        GeneratorInfo::new("b", 2, 0),
        GeneratorInfo::new("c", 3, 0),
    ])
    .unwrap()
}

#[test]
fn free_mul_is_associative_and_distributive() {
    let d = Domain::Cyclotomic(3);
    let p = || poly(d, 3, 3, 4);
    runner(1000)
        .run(&(p(), p(), p()), |(a, b, c)| {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            Ok(())
        })
        .unwrap();
}

#[test]
fn word_weight_is_additive() {
    let a = mixed_alphabet();
    runner(1000)
        .run(&(word(3, 6), word(3, 6)), |(u, v)| {
            let expected: u64 = u.iter().chain(v.iter()).map(|&l| [1u64, 2, 3][l as usize]).sum();
            prop_assert_eq!(a.word_weight(&u.concat(&v)), expected);
            prop_assert_eq!(a.word_weight(&u.concat(&v)), a.word_weight(&u) + a.word_weight(&v));
            Ok(())
        })
        .unwrap();
}

#[test]
fn monomial_order_is_total_and_multiplicative() {
    let a = Alphabet::with_precedence(vec![
        GeneratorInfo { precedence: 2, ..GeneratorInfo::new("a", 1, 0) },
        GeneratorInfo { precedence: 0, ..GeneratorInfo::new("b", 2, 0) },
        GeneratorInfo { precedence: 1, ..GeneratorInfo::new("c", 1, 0) },
    ])
    .unwrap();
    // oracle: (weight, length, precedence sequence)
    let key = |w: &Word| {
        let prec = [2u32, 0, 1];
        (a.word_weight(w), w.len(), w.iter().map(|&l| prec[l as usize]).collect::<Vec<_>>())
    };
    runner(1000)
        .run(&(word(3, 5), word(3, 5), word(3, 3)), |(u, v, w)| {
            let o = a.cmp_words(&u, &v);
            prop_assert_eq!(o, key(&u).cmp(&key(&v)));
            prop_assert_eq!(o, a.cmp_words(&v, &u).reverse());
            prop_assert_eq!(o == Ordering::Equal, u == v);
            if o == Ordering::Less {
                prop_assert_eq!(a.cmp_words(&w.concat(&u), &w.concat(&v)), Ordering::Less);
                prop_assert_eq!(a.cmp_words(&u.concat(&w), &v.concat(&w)), Ordering::Less);
            }
            Ok(())
        })
        .unwrap();
}

fn certified(p: Presentation, bound: u64) -> Arc<AlgebraHandle> {
    Arc::new(AlgebraHandle::certified(p, bound).unwrap())
}

fn zeta3() -> Scalar {
    mk_root_of_unity(3)
}

fn normal_form_systems() -> Vec<Arc<AlgebraHandle>> {
    let d3 = Domain::Cyclotomic(3);
    let z = zeta3();
    let q = vec![vec![d3.one(), z.clone()], vec![z.pow(2).unwrap(), d3.one()]];
    vec![
        certified(weyl(Domain::Rational).unwrap(), 8),
        certified(gl2_family(&Gl2Kind::QuantumWeyl(z.clone()), d3).unwrap(), 8),
        certified(quantized_weyl(2, &q, &[z.clone(), d3.one()], d3).unwrap(), 8),
        certified(down_up_from_roots(&z, &z.pow(2).unwrap(), &d3.one(), d3).unwrap(), 8),
        certified(pl11(Domain::Rational).unwrap(), 8),
    ]
}

#[test]
fn normal_form_is_idempotent_linear_and_coherent() {
    for h in normal_form_systems() {
        let d = h.domain();
        let k = h.alphabet().len() as u16;
        let p = || poly(d, k, 3, 3);
        runner(100)
            .run(&(p(), p(), scalar(d), scalar(d)), |(x, y, a, b)| {
                let nx = h.normal_form(&x);
                prop_assert_eq!(h.normal_form(&nx), nx.clone());
                let combo = &x.scale(&a) + &y.scale(&b);
                let ny = h.normal_form(&y);
                prop_assert_eq!(h.normal_form(&combo), &nx.scale(&a) + &ny.scale(&b));
                prop_assert_eq!(h.normal_form(&(&x * &y)), h.normal_form(&(&nx * &ny)));
                Ok(())
            })
            .unwrap();
    }
}

// ---------------------------------------------------------------------------
// super Lie fuzzing against a direct axiom check

fn sign(data: &SuperLieData, a: usize, b: usize) -> i64 {
    if data.parities[a] * data.parities[b] == 1 {
        -1
    } else {
        1
    }
}

fn bracket(data: &SuperLieData, u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
    let n = data.names.len();
    let mut out = vec![data.domain.zero(); n];
    for i in 0..n {
        for j in 0..n {
            let c = &u[i] * &v[j];
            if c.is_zero() {
                continue;
            }
            for p in 0..n {
                out[p] = &out[p] + &(&c * &data.table[i][j][p]);
            }
        }
    }
    out
}

fn unit(data: &SuperLieData, i: usize) -> Vec<Scalar> {
    let mut v = vec![data.domain.zero(); data.names.len()];
    v[i] = data.domain.one();
    v
}

fn axioms_hold(data: &SuperLieData) -> bool {
    let n = data.names.len();
    let d = data.domain;
    for i in 0..n {
        for j in 0..n {
            for p in 0..n {
                let c = &data.table[i][j][p];
                if !c.is_zero() && data.parities[p] != (data.parities[i] + data.parities[j]) % 2 {
                    return false;
                }
                let mirror = &data.table[j][i][p] * &d.from_int(-sign(data, i, j));
                if *c != mirror {
                    return false;
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (x, y, z) = (unit(data, i), unit(data, j), unit(data, k));
                let t1 = bracket(data, &x, &bracket(data, &y, &z));
                let t2 = bracket(data, &y, &bracket(data, &z, &x));
                let t3 = bracket(data, &z, &bracket(data, &x, &y));
                let (s1, s2, s3) = (sign(data, i, k), sign(data, j, i), sign(data, k, j));
                for p in 0..n {
                    let total = &(&(&t1[p] * &d.from_int(s1)) + &(&t2[p] * &d.from_int(s2))) + &(&t3[p] * &d.from_int(s3));
                    if !total.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[test]
fn super_validation_agrees_with_axiom_check_under_perturbation() {
    let d = Domain::Rational;
    let base = pl11_data(d);
    assert!(axioms_hold(&base));
    assert!(validate_super_lie(&base).is_ok());
    let strategy = (0usize..4, 0usize..4, 0usize..4, -2i64..=2, any::<bool>());
    let (mut rejected, mut accepted) = (0, 0);
    runner(300)
        .run(&strategy, |(i, j, p, delta, mirror)| {
            let mut data = base.clone();
            let v = &data.table[i][j][p] + &d.from_int(delta);
            data.table[i][j][p] = v.clone();
            if mirror && i != j {
                data.table[j][i][p] = &v * &d.from_int(-sign(&data, i, j));
            }
            let ok = validate_super_lie(&data).is_ok();
            prop_assert_eq!(ok, axioms_hold(&data));
            Ok(())
        })
        .unwrap();
    // every single-entry perturbation by +-1
    for i in 0..4 {
        for j in 0..4 {
            for p in 0..4 {
                for delta in [-1i64, 1] {
                    let mut data = base.clone();
                    data.table[i][j][p] = &data.table[i][j][p] + &d.from_int(delta);
                    let ok = validate_super_lie(&data).is_ok();
                    assert_eq!(ok, axioms_hold(&data));
                    if ok {
                        accepted += 1;
                    } else {
                        rejected += 1;
                    }
                }
            }
        }
    }
    assert_eq!(accepted + rejected, 128);
    assert!(rejected > 100);
}

// ---------------------------------------------------------------------------
// skew group algebra

fn diag_group(h: &Arc<AlgebraHandle>, scales: &[Scalar]) -> FiniteGroup {
    let d = h.domain();
    let images = scales.iter().enumerate().map(|(i, s)| Poly::generator(i, d).scale(s)).collect();
    let phi = mk_automorphism(h, images).unwrap();
    generate_group(h, &[phi], 64).unwrap()
}

fn fixture_groups() -> Vec<FiniteGroup> {
    let q = Domain::Rational;
    let d3 = Domain::Cyclotomic(3);
    let z = zeta3();
    let kxy = certified(polynomial_ring(&["x", "y"], q).unwrap(), 8);
    let w = certified(weyl(q).unwrap(), 8);
    let qw = certified(gl2_family(&Gl2Kind::QuantumWeyl(z.clone()), d3).unwrap(), 8);
    let d4 = Domain::Cyclotomic(4);
    let pl = certified(pl11(d4).unwrap(), 8);
    let m = -&q.one();
    let g = |i| Poly::generator(i, d4);
    let phi = mk_automorphism(&pl, vec![-&g(0), -&g(1), g(3), -&g(2)]).unwrap();
    vec![
        diag_group(&kxy, &[m.clone(), m.clone()]),
        diag_group(&kxy, &[q.one(), m.clone()]),
        diag_group(&w, &[m.clone(), m.clone()]),
        diag_group(&qw, &[z.clone(), z.pow(2).unwrap()]),
        generate_group(&pl, &[phi], 64).unwrap(),
    ]
}

fn skew_strategy(group: &FiniteGroup) -> impl Strategy<Value = SkewPoly> {
    let d = group.domain();
    let k = group.algebra().alphabet().len() as u16;
    let order = group.order();
    let algebra = group.algebra().clone();
    prop::collection::vec((word(k, 2), 0..order, scalar(d)), 0..=3).prop_map(move |ts| {
        let mut s = SkewPoly::zero(d);
        for (w, g, c) in ts {
            let nf = algebra.normal_form_of_word(&w);
            for (v, a) in nf.terms() {
                s.add_term(v.clone(), g, &(a * &c));
            }
        }
        s
    })
}

#[test]
fn skew_mul_is_associative_and_unital() {
    for g in fixture_groups() {
        let s = || skew_strategy(&g);
        let one = SkewPoly::monomial(Word::empty(), 0, g.domain().one());
        runner(60)
            .run(&(s(), s(), s()), |(u, v, w)| {
                let left = skew_mul(&skew_mul(&u, &v, &g).unwrap(), &w, &g).unwrap();
                let right = skew_mul(&u, &skew_mul(&v, &w, &g).unwrap(), &g).unwrap();
                prop_assert_eq!(left, right);
                prop_assert_eq!(skew_mul(&one, &u, &g).unwrap(), u.clone());
                prop_assert_eq!(skew_mul(&u, &one, &g).unwrap(), u);
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn automorphisms_commute_with_products_and_reduction() {
    for g in fixture_groups() {
        let h = g.algebra().clone();
        let d = h.domain();
        let k = h.alphabet().len() as u16;
        runner(40)
            .run(&(poly(d, k, 3, 3), poly(d, k, 3, 3)), |(p, q)| {
                for phi in g.elements() {
                    prop_assert_eq!(phi.apply(&h.mul(&p, &q)), h.mul(&phi.apply(&p), &phi.apply(&q)));
                    prop_assert_eq!(phi.apply(&h.normal_form(&p)), h.normal_form(&phi.apply(&p)));
                }
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn reynolds_is_an_invariant_projection() {
    for g in fixture_groups() {
        if !g.order_invertible() {
            continue;
        }
        let h = g.algebra().clone();
        let d = h.domain();
        let k = h.alphabet().len() as u16;
        runner(40)
            .run(&poly(d, k, 3, 4), |p| {
                let r = reynolds(&g, &p).unwrap();
                prop_assert_eq!(reynolds(&g, &r).unwrap(), r.clone());
                for phi in g.elements() {
                    prop_assert_eq!(phi.apply(&r), r.clone());
                }
                Ok(())
            })
            .unwrap();
    }
}

#[test]
fn group_tables_satisfy_the_axioms() {
    for g in fixture_groups() {
        let n = g.order();
        assert!(n <= 16);
        for a in 0..n {
            assert_eq!(g.mul(0, a), a);
            assert_eq!(g.mul(a, 0), a);
            assert_eq!(g.mul(a, g.inverse(a)), 0);
            for b in 0..n {
                // oracle: compose the maps and look the result up
                assert_eq!(g.find(&g.element(a).compose(g.element(b))), Some(g.mul(a, b)));
                for c in 0..n {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
        }
    }
}
