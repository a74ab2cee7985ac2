use num_integer::Integer;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropcount_core::tori::{
    find_subtorus, search_rational_line, spans_rational_line, validate_polarized_torus,
    Polarization, SubtorusVerdict, TropicalTorus,
};
use tropcount_core::{FieldMatrix, FieldScalar, IntMatrix};

fn scalar(a: i64, b: i64, d: u64) -> FieldScalar {
    FieldScalar::new(
        BigRational::from_integer(a.into()),
        BigRational::from_integer(b.into()),
        d,
    )
    .unwrap()
}

fn torus(d: u64, a: &[[i64; 2]; 2], b: &[[i64; 2]; 2]) -> Option<TropicalTorus> {
    let rows = (0..2)
        .map(|i| (0..2).map(|j| scalar(a[i][j], b[i][j], d)).collect())
        .collect();
    TropicalTorus::new(FieldMatrix::from_rows(d, rows).ok()?).ok()
}

/// Half generic embeddings, half of the form `J = M P^{-1}` where `P` is
/// unimodular with first column `lambda_0` and `M e_1` is rational, so that
/// `J lambda_0` spans a rational line.
fn seeded_examples(seed: u64, count: usize) -> Vec<TropicalTorus> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let d = [2u64, 3, 5, 6, 7][rng.gen_range(0..5)];
        let mut a = [[0i64; 2]; 2];
        let mut b = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                a[i][j] = rng.gen_range(-5..=5);
                b[i][j] = rng.gen_range(-3..=3);
            }
        }
        if out.len() % 2 == 1 {
            let (p, q) = (rng.gen_range(1i64..=5), rng.gen_range(-5i64..=5));
            let e = p.extended_gcd(&q);
            if e.gcd != 1 {
                continue;
            }
            // P = [[p, -y], [q, x]] with p x + q y = 1; P^{-1} = [[x, y], [-q, p]]
            let inv = [[e.x, e.y], [-q, p]];
            b[0][0] = 0;
            b[1][0] = 0;
            let times = |m: &[[i64; 2]; 2]| {
                let mut r = [[0i64; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        r[i][j] = m[i][0] * inv[0][j] + m[i][1] * inv[1][j];
                    }
                }
                r
            };
            a = times(&a);
            b = times(&b);
        }
        if let Some(t) = torus(d, &a, &b) {
            out.push(t);
        }
    }
    out
}

#[test]
fn sqrt2_example_is_simple_and_polarized() {
    let t = torus(2, &[[1, 0], [0, 3]], &[[0, 1], [1, 0]]).unwrap();
    let c = Polarization::new(IntMatrix::identity(2)).unwrap();
    validate_polarized_torus(&t, &c).unwrap();
    assert_eq!(find_subtorus(&t, 1000).unwrap(), SubtorusVerdict::Simple);
    assert_eq!(search_rational_line(&t, 1000).unwrap(), None);
}

#[test]
fn rational_lattices_have_subtori() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for g in [2usize, 3] {
        for _ in 0..20 {
            let rows: Vec<Vec<(i64, i64)>> = (0..g)
                .map(|_| {
                    (0..g)
                        .map(|_| (rng.gen_range(-9..=9), rng.gen_range(1..=5)))
                        .collect()
                })
                .collect();
            let Ok(t) = TropicalTorus::new(FieldMatrix::from_rational_rows(0, &rows).unwrap())
            else {
                continue;
            };
            assert!(matches!(
                find_subtorus(&t, 5).unwrap(),
                SubtorusVerdict::SubtorusFound { .. }
            ));
        }
    }
}

#[test]
fn exact_verdict_agrees_with_search() {
    let examples = seeded_examples(31, 50);
    let mut found = 0;
    for t in &examples {
        let verdict = find_subtorus(t, 1000).unwrap();
        let search = search_rational_line(t, 1000).unwrap();
        match verdict {
            SubtorusVerdict::Simple => assert_eq!(search, None, "J = {}", t.embedding()),
            SubtorusVerdict::SubtorusFound { witness } => {
                found += 1;
                assert!(spans_rational_line(t, &witness.vector));
                let hit = search.expect("search must find a line");
                assert!(spans_rational_line(t, &hit));
            }
            SubtorusVerdict::Inconclusive { .. } => panic!("g = 2 is decided exactly"),
        }
    }
    // both outcomes are exercised
    assert!((20..50).contains(&found), "found {found}");
}

#[test]
fn rank_three_witnesses_are_genuine() {
    let d = 2;
    let s = |a, b| scalar(a, b, d);
    // e1 spans a rational line; the (e2, e3) block is irrational
    let rows = vec![
        vec![s(3, 0), s(0, 0), s(0, 0)],
        vec![s(0, 0), s(1, 1), s(2, 0)],
        vec![s(0, 0), s(2, 0), s(1, -1)],
    ];
    let t = TropicalTorus::new(FieldMatrix::from_rows(d, rows).unwrap()).unwrap();
    match find_subtorus(&t, 3).unwrap() {
        SubtorusVerdict::SubtorusFound { witness } => {
            assert_eq!(witness.dim, 1);
            assert!(spans_rational_line(&t, &witness.vector));
        }
        other => panic!("{other:?}"),
    }
}
