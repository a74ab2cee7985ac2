use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropcount_core::arith::{factorize, is_prime, sigma};
use tropcount_core::count::random_polarized_torus;
use tropcount_core::tori::{
    kernel_order, pullback_polarization, validate_hom, validate_polarized_torus, Polarization,
    TorusHom, TropicalTorus,
};
use tropcount_core::{
    enumerate_subgroups, normalize_type, nu, FieldMatrix, FieldScalar, IntMatrix, DEFAULT_BUDGET,
};

const SQUAREFREE: [u64; 8] = [2, 3, 5, 6, 7, 10, 11, 13];

/// Sign of `a + b sqrt(d)` from decimal enclosures of `sqrt(d)`, refined
/// until the enclosure excludes zero.
fn interval_sign(a: &BigInt, b: &BigInt, d: u64) -> Ordering {
    if b.is_zero() {
        return a.sign().cmp(&num_bigint::Sign::NoSign);
    }
    let mut digits = 10u32;
    loop {
        let scale = BigInt::from(10).pow(digits);
        let lo = (BigInt::from(d) * &scale * &scale).sqrt();
        let hi = &lo + 1;
        let base = a * &scale;
        let (x, y) = (&base + b * &lo, &base + b * &hi);
        let (min, max) = if x <= y { (x, y) } else { (y, x) };
        if min.is_positive() {
            return Ordering::Greater;
        }
        if max.is_negative() {
            return Ordering::Less;
        }
        digits *= 2;
    }
}

fn random_unimodular(rng: &mut ChaCha8Rng, g: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(g);
    for _ in 0..5 {
        let (i, j) = (rng.gen_range(0..g), rng.gen_range(0..g));
        if i != j {
            let mut e = IntMatrix::identity(g);
            e[(i, j)] = rng.gen_range(-2i64..=2).into();
            m = m.checked_mul(&e).unwrap();
        }
    }
    m
}

fn random_int_matrix(rng: &mut ChaCha8Rng, g: usize, r: i64) -> IntMatrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..g)
            .map(|_| (0..g).map(|_| rng.gen_range(-r..=r)).collect())
            .collect();
        let m = IntMatrix::from_rows(&rows);
        if !m.det().unwrap().is_zero() {
            return m;
        }
    }
}

/// An isogeny out of `t` with `G = k U`, `U` unimodular, and random `H`;
/// the target lattice is `J' = H^T J G^{-1}`.
fn isogeny_from(rng: &mut ChaCha8Rng, t: &TropicalTorus) -> (TorusHom, TropicalTorus) {
    let g = t.rank();
    let u = random_unimodular(rng, g);
    let k = rng.gen_range(1i64..=3);
    let h = random_int_matrix(rng, g, 3);
    // U^{-1} = adj(U) det(U) for det(U) = +-1
    let u_inv = u.adjugate().unwrap().scale(&u.det().unwrap());
    let j2 = FieldMatrix::int_mul(&h.transpose(), t.embedding())
        .unwrap()
        .mul_int(&u_inv)
        .unwrap()
        .scale_rational(&BigRational::new(1.into(), k.into()));
    let f = TorusHom {
        g: u.scale(&k.into()),
        h,
    };
    (f, TropicalTorus::new(j2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn exact_sign_matches_interval_evaluation(
        a in -1_000_000_000i64..=1_000_000_000,
        b in -1_000_000i64..=1_000_000,
        k in 0usize..SQUAREFREE.len(),
    ) {
        let d = SQUAREFREE[k];
        let x = FieldScalar::new(
            BigRational::from_integer(a.into()),
            BigRational::from_integer(b.into()),
            d,
        )
        .unwrap();
        prop_assert_eq!(x.signum(), interval_sign(&a.into(), &b.into(), d));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn near_cancellation_signs(p in 1i64..2000, k in 0usize..SQUAREFREE.len()) {
        // p^2 - d q^2 is small for q = round(p / sqrt d)
        let d = SQUAREFREE[k];
        let q = ((p as f64) / (d as f64).sqrt()).round() as i64;
        let x = FieldScalar::new(
            BigRational::from_integer(p.into()),
            BigRational::from_integer((-q).into()),
            d,
        )
        .unwrap();
        prop_assert_eq!(x.signum(), interval_sign(&p.into(), &(-q).into(), d));
    }

    #[test]
    fn pairing_symmetry_iff_dual_square_commutes(seed in 0u64..100_000, g in 2usize..=3, twist in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (torus, c) = random_polarized_torus(&mut rng, g, 30, 2);
        // optionally break symmetry by composing the lattice with a shear
        let torus = if twist {
            let mut e = IntMatrix::identity(g);
            e[(0, 1)] = 1.into();
            TropicalTorus::new(torus.embedding().mul_int(&e).unwrap()).unwrap()
        } else {
            torus
        };
        let pairing = torus.embedding().transpose().mul_int(&c).unwrap();
        let f = TorusHom { g: c.clone(), h: c.clone() };
        let commutes = validate_hom(&torus, &torus.dual(), &f).is_ok();
        prop_assert_eq!(pairing.is_symmetric(), commutes);
        if !twist {
            prop_assert!(validate_polarized_torus(&torus, &Polarization::new(c).unwrap()).is_ok());
        }
    }

    #[test]
    fn double_adjugate_scales(seed in 0u64..100_000, g in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_int_matrix(&mut rng, g, 6);
        let n = c.det().unwrap();
        let adj2 = c.adjugate().unwrap().adjugate().unwrap();
        prop_assert_eq!(adj2, c.scale(&n.pow(g as u32 - 2)));
    }

    #[test]
    fn degrees_multiply_under_composition(seed in 0u64..100_000, g in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (t1, c) = random_polarized_torus(&mut rng, g, 20, 3);
        let (f1, t2) = isogeny_from(&mut rng, &t1);
        let (f2, t3) = isogeny_from(&mut rng, &t2);
        let d1 = validate_hom(&t1, &t2, &f1).unwrap();
        let d2 = validate_hom(&t2, &t3, &f2).unwrap();
        let d = validate_hom(&t1, &t3, &f2.compose(&f1).unwrap()).unwrap();
        prop_assert_eq!(&d.topological, &(&d1.topological * &d2.topological));
        prop_assert_eq!(&d.metric, &(&d1.metric * &d2.metric));
        prop_assert_eq!(&d.tropical, &(&d1.tropical * &d2.tropical));
        // det(H C G) for a form C on the target
        let l = Polarization::new(c).unwrap();
        let pulled = pullback_polarization(&f1, &l).unwrap();
        prop_assert_eq!(
            kernel_order(&pulled).unwrap(),
            kernel_order(&l).unwrap() * &d1.topological * &d1.metric
        );
    }

    #[test]
    fn nu_bounds_and_presentation_invariance(a in 1u64..=12, b in 1u64..=12, c in 1u64..=6) {
        let t = normalize_type(&[a, b, c]).unwrap();
        let v = nu(&t, DEFAULT_BUDGET).unwrap();
        let subgroups = enumerate_subgroups(&t, DEFAULT_BUDGET).unwrap().len();
        let top = *t.factors().last().unwrap();
        let divisors = (1..=top).filter(|d| top % d == 0).count();
        prop_assert!(v >= BigInt::from(subgroups));
        prop_assert!(subgroups >= divisors);
        // the same group from a permuted and a coprime-split presentation
        prop_assert_eq!(&nu(&normalize_type(&[c, a, b]).unwrap(), DEFAULT_BUDGET).unwrap(), &v);
        let mut split: Vec<u64> = vec![a, b];
        for (p, e) in factorize(c) {
            split.push(p.pow(e));
        }
        prop_assert_eq!(&nu(&normalize_type(&split).unwrap(), DEFAULT_BUDGET).unwrap(), &v);
    }

    #[test]
    fn sigma_of_prime(p in 2u64..5000) {
        prop_assume!(is_prime(p));
        prop_assert_eq!(sigma(1, p), BigInt::from(p + 1));
    }
}
