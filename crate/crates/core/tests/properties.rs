mod common;

use std::collections::BTreeSet;

use common::*;
use noether_core::cohmodel::{build_pullback, intersect, CurveDatum, DivisorClass};
use noether_core::exactmath::{int, isolate_real_roots, largest_real_root, rat, Polynomial, Rational, RationalMatrix};
use noether_core::noether::{NoetherianMap, ProjPoint};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=7).prop_map(|(p, q)| rat(p, q))
}

fn nonzero_rat() -> impl Strategy<Value = Rational> {
    small_rat().prop_filter("nonzero", |r| !r.is_zero())
}

/// Parameters of a map on ℙ^d: d free rationals, the last one fixes the sum.
fn params() -> impl Strategy<Value = Vec<Rational>> {
    (3usize..=6).prop_flat_map(|d| {
        proptest::collection::vec(small_rat(), d).prop_map(|mut v| {
            let s: Rational = v.iter().sum();
            v.push(int(2) - s);
            v
        })
    })
}

fn int_matrix(n: usize) -> impl Strategy<Value = RationalMatrix> {
    proptest::collection::vec(-5i64..=5, n * n)
        .prop_map(move |e| RationalMatrix::new(n, n, e.into_iter().map(int).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn charpoly_is_monic_and_matches_determinants(m in (1usize..=6).prop_flat_map(int_matrix)) {
        let p = m.char_poly().unwrap();
        prop_assert!(p.leading().is_one());
        prop_assert!(charpoly_agrees(&m, &p));
    }

    #[test]
    fn charpoly_of_block_triangular(a in int_matrix(3), b in int_matrix(2), c in proptest::collection::vec(-4i64..=4, 6)) {
        let mut m = RationalMatrix::zeros(5, 5);
        for r in 0..3 {
            for k in 0..3 {
                m.set(r, k, a.get(r, k).clone());
            }
            for k in 0..2 {
                m.set(r, 3 + k, int(c[2 * r + k]));
            }
        }
        for r in 0..2 {
            for k in 0..2 {
                m.set(3 + r, 3 + k, b.get(r, k).clone());
            }
        }
        let lhs = m.char_poly().unwrap();
        let rhs = &a.char_poly().unwrap() * &b.char_poly().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn matrix_powers_compose(a in 0u32..12, b in 0u32..12) {
        let f = NoetherianMap::parse("1/2,1/2,1/3,1/5,7/15").unwrap();
        let (_, m) = build_pullback(&f).unwrap();
        prop_assert_eq!(m.pow(a + b).unwrap(), m.pow(a).unwrap().mul(&m.pow(b).unwrap()).unwrap());
    }

    #[test]
    fn root_isolation_finds_planted_roots(
        roots in proptest::collection::btree_set((-20i64..=20, 1i64..=4), 1..=5),
        extra in proptest::collection::vec(0usize..3, 5),
    ) {
        let roots: Vec<Rational> = roots.into_iter().map(|(p, q)| rat(p, q)).collect::<BTreeSet<_>>().into_iter().collect();
        let mut poly = Polynomial::one();
        for (k, r) in roots.iter().enumerate() {
            for _ in 0..=extra[k] {
                poly = &poly * &Polynomial::linear_root(r);
            }
        }
        // x² + 1 contributes no real roots.
        poly = &poly * &Polynomial::from_ints(&[1, 0, 1]);
        let iv = isolate_real_roots(&poly).unwrap();
        prop_assert_eq!(iv.len(), roots.len());
        for (k, (i, r)) in iv.iter().zip(&roots).enumerate() {
            prop_assert!(&i.lo <= r && r <= &i.hi);
            prop_assert_eq!(i.multiplicity, extra[k] + 1);
        }
        let top = largest_real_root(&poly).unwrap();
        prop_assert_eq!(top.as_rational(), roots.last());
    }

    #[test]
    fn j_is_an_involution(coords in proptest::collection::vec(nonzero_rat(), 4..=7)) {
        prop_assert!(j_involution(coords));
    }

    #[test]
    fn l_squared_is_scalar_and_det_is_signed(a in params()) {
        let f = NoetherianMap::new(a).unwrap();
        prop_assert_eq!(l_checks(&f), (true, true));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn f_inverts(a in params(), seed in proptest::collection::vec(nonzero_rat(), 7)) {
        let f = NoetherianMap::new(a).unwrap();
        let x = ProjPoint::new(seed[..=f.d()].to_vec()).unwrap();
        let r = inverse_check(&f, &x);
        prop_assume!(r.is_some());
        prop_assert!(r.unwrap());
    }

    #[test]
    fn f_agrees_with_the_definition(a in params(), seed in proptest::collection::vec(small_rat(), 7)) {
        let f = NoetherianMap::new(a.clone()).unwrap();
        let x = &seed[..=f.d()];
        prop_assume!(x.iter().any(|v| !v.is_zero()));
        let got = f.evaluate(&ProjPoint::new(x.to_vec()).unwrap()).unwrap().point();
        match f_oracle(&a, x) {
            Some(y) => prop_assert!(proj_eq(got.unwrap().coords(), &y)),
            None => prop_assert!(got.is_none()),
        }
    }

    #[test]
    fn intersection_is_bilinear(
        b1 in proptest::collection::vec(small_rat(), 5),
        b2 in proptest::collection::vec(small_rat(), 5),
        s in small_rat(),
        t in small_rat(),
        deg in 1u32..5,
        m in proptest::collection::vec(0u32..3, 4),
    ) {
        let f = NoetherianMap::parse("1/2,1/2,1/3,1/5,7/15").unwrap();
        let (model, _) = build_pullback(&f).unwrap();
        let pts = [(0, 1), (0, 2), (1, 1), (1, 2)];
        let mults: Vec<((usize, usize), u32)> = pts.iter().zip(&m).map(|(p, k)| (*p, *k)).collect();
        let c = CurveDatum::new("test curve", deg, &mults);
        let combo: Vec<Rational> = b1.iter().zip(&b2).map(|(x, y)| &s * x + &t * y).collect();
        let dot = |b: Vec<Rational>, c: &CurveDatum| intersect(&DivisorClass::new(&model, b).unwrap(), &model, c).unwrap();
        prop_assert_eq!(dot(combo, &c), &s * dot(b1.clone(), &c) + &t * dot(b2, &c));
        // Linear in the curve: doubling degree and multiplicities doubles the product.
        let mults2: Vec<((usize, usize), u32)> = mults.iter().map(|(p, k)| (*p, 2 * k)).collect();
        let c2 = CurveDatum::new("doubled", 2 * deg, &mults2);
        prop_assert_eq!(dot(b1.clone(), &c2), int(2) * dot(b1, &c));
    }

    #[test]
    fn singularity_matches_the_orbit(n in 1usize..=9, a in params()) {
        // Put (N−1)/N in slot 0 and repair the sum with the last slot.
        let mut a = a;
        let d = a.len() - 1;
        a[0] = rat(n as i64 - 1, n as i64);
        let rest: Rational = a[..d].iter().sum();
        a[d] = int(2) - rest;
        let f = NoetherianMap::new(a.clone()).unwrap();
        prop_assert_eq!(f.singular_length(0), Some(n));
        prop_assert_eq!(singular_by_formula(&a[0]), Some(n));
        prop_assert_eq!(orbit_oracle(&a, 0, 50), Ok(Some(n)));
        let o = f.orbit(0, 50).unwrap();
        prop_assert_eq!(o.points.last().unwrap(), &ProjPoint::basis(0, d));
    }
}

fn element() -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(small_rat(), 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn number_field_axioms(a in element(), b in element(), c in element()) {
        let k = cubic_base();
        prop_assert!(field_axioms(&k, &nf(&k, a), &nf(&k, b), &nf(&k, c)));
    }

    #[test]
    fn sign_agrees_with_high_precision(c in proptest::collection::vec(-50i64..=50, 1..=3)) {
        prop_assert!(sign_check(&cubic_base(), &cubic_root_bracket(), &c));
    }
}
