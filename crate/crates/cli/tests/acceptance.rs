//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropcount_cli::suites::{run_suite, Suite, SuiteReport};
use tropcount_cli::table::table_rows;
use tropcount_core::count::{
    default_embedding, random_pd_form, total_count_closed, total_count_enumerated, CountOptions,
};
use tropcount_core::theta::theta_value;
use tropcount_core::tori::{
    find_subtorus, search_rational_line, spans_rational_line, validate_polarized_torus,
    Polarization, SubtorusVerdict, TropicalTorus,
};
use tropcount_core::{nu_dagger, AbelianType, FieldMatrix, FieldScalar, IntMatrix, DEFAULT_BUDGET};

const SEED: u64 = 42;

const DIAG2: [u64; 15] = [
    15, 40, 151, 156, 600, 400, 1335, 1201, 2340, 1464, 6040, 2380, 6000, 6240, 11191,
];

const DIAG3: [u64; 15] = [
    135, 1120, 11287, 19656, 151200, 137600, 810135, 915853, 2653560, 1950048, 12641440, 5231240,
    18576000, 22014720, 54681751,
];

const PAIRS: [((u64, u64), u64); 15] = [
    ((2, 4), 39),
    ((2, 6), 60),
    ((2, 8), 87),
    ((2, 10), 90),
    ((2, 12), 156),
    ((3, 6), 120),
    ((3, 9), 148),
    ((3, 12), 280),
    ((4, 8), 375),
    ((4, 12), 604),
    ((4, 16), 823),
    ((5, 10), 468),
    ((5, 15), 624),
    ((6, 12), 1560),
    ((6, 18), 2220),
];

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn suite_passes(r: &SuiteReport) -> Result<(), String> {
    match r.checks.iter().find(|c| !c.pass()) {
        None => Ok(()),
        Some(c) => Err(format!(
            "{}: {} failures, first {}",
            c.name,
            c.failures,
            c.first_counterexample.clone().unwrap_or_default()
        )),
    }
}

fn criterion_table() -> Outcome {
    let start = Instant::now();
    let g2 = table_rows(2, 16, true, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let g3 = table_rows(3, 16, false, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let mut expected: Vec<(Vec<u64>, u64)> = (2..=16u64)
        .map(|d| (vec![d, d], DIAG2[d as usize - 2]))
        .collect();
    expected.extend(PAIRS.iter().map(|&((a, b), v)| (vec![a, b], v)));
    expected.extend((2..=16u64).map(|d| (vec![d, d, d], DIAG3[d as usize - 2])));
    let got: Vec<(Vec<u64>, BigInt)> = g2
        .into_iter()
        .chain(g3)
        .map(|r| (r.label, r.value))
        .collect();
    ensure(got.len() == expected.len(), "row count")?;
    for ((label, value), (want_label, want)) in got.iter().zip(&expected) {
        ensure(
            label == want_label && *value == BigInt::from(*want),
            format!("{want_label:?}: {value} != {want}"),
        )?;
    }
    ensure(
        elapsed < Duration::from_secs(120),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!("{} rows exact in {:.2?}", got.len(), elapsed))
}

fn criterion_identities() -> Outcome {
    let r = run_suite(Suite::Identities, SEED, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    suite_passes(&r)?;
    let cases: Vec<usize> = r.checks.iter().map(|c| c.cases).collect();
    ensure(cases == [500, 300, 200], format!("case counts {cases:?}"))?;
    Ok("sigma n <= 500, p-pn 300 cases, multiplicativity 200 pairs".into())
}

fn criterion_oracles() -> Outcome {
    let r = run_suite(Suite::Oracles, SEED, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    suite_passes(&r)?;
    Ok(format!(
        "{} chains with |H| <= 64, {} types with |G| <= 200",
        r.checks[0].cases, r.checks[1].cases
    ))
}

fn criterion_theorem() -> Outcome {
    let r = run_suite(Suite::Pipeline, SEED, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    suite_passes(&r)?;
    ensure(
        r.checks[0].cases == 40,
        "expected 20 polarizations per genus",
    )?;
    let c = IntMatrix::diag(&[1, 2]);
    let t = default_embedding(&c).map_err(|e| e.to_string())?;
    let report =
        total_count_enumerated(&t, &c, CountOptions::default()).map_err(|e| e.to_string())?;
    ensure(
        report.enumerated_total == BigInt::from(12),
        "diag(1,2) enumerated",
    )?;
    ensure(
        total_count_closed(&c, DEFAULT_BUDGET).map_err(|e| e.to_string())? == BigInt::from(12),
        "diag(1,2) closed",
    )?;
    Ok(format!(
        "40 seeded C agree; {} surfaces of type (1,n) give n^2 sigma_1(n); diag(1,2) -> 12",
        r.checks[1].cases
    ))
}

/// The threefold reading of the primitive-type clause, for the record.
fn primitive_threefold_note() -> String {
    // nu_dagger(1,1,n) = nu(1,n,n), which is not sigma_1(n) once n > 1
    let n = 7u64;
    let t = AbelianType::new(vec![1, 1, n]).unwrap();
    let dagger = nu_dagger(&t, DEFAULT_BUDGET).unwrap();
    let sigma = tropcount_core::arith::sigma(1, n);
    format!(
        "type (1,1,{n}) on threefolds: n^2 nu_dagger = {} but n^2 sigma_1(n) = {}; the sigma_1 form is checked for surfaces only",
        BigInt::from(n * n) * &dagger,
        BigInt::from(n * n) * &sigma
    )
}

fn criterion_roundtrip() -> Outcome {
    let r = run_suite(Suite::Roundtrip, SEED, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    suite_passes(&r)?;
    Ok(format!(
        "{} forms, {} non-degenerate skeletons of genus g and 3-edge-connected",
        r.checks[0].cases, r.checks[2].cases
    ))
}

fn random_point(rng: &mut ChaCha8Rng, g: usize, d: u64) -> Vec<FieldScalar> {
    (0..g)
        .map(|_| {
            let den = rng.gen_range(1i64..=6);
            let num = rng.gen_range(-2 * den..=2 * den);
            FieldScalar::rational_in(BigRational::new(num.into(), den.into()), d)
        })
        .collect()
}

/// `a + b sqrt(d) > 0` for integers.
fn positive(a: &BigInt, b: &BigInt, d: u64) -> bool {
    let d = BigInt::from(d);
    match (a.sign(), b.sign()) {
        (_, Sign::NoSign) => a.sign() == Sign::Plus,
        (Sign::NoSign, s) => s == Sign::Plus,
        (Sign::Plus, Sign::Plus) => true,
        (Sign::Minus, Sign::Minus) => false,
        (Sign::Plus, Sign::Minus) => a * a > &d * b * b,
        (Sign::Minus, Sign::Plus) => &d * b * b > a * a,
    }
}

/// Maximum of `Q(l, x) - Q(l, l) / 2` over the whole box that contains
/// the ellipsoid `Q(l, l) <= 16 Q(x, x)`, in integers scaled by `2 m^2`.
fn brute_theta(q: &FieldMatrix, x: &[FieldScalar]) -> FieldScalar {
    let g = q.rows();
    let d = q.discriminant();
    let r = q
        .bilinear(x, x)
        .unwrap()
        .scale(&BigRational::from_integer(16.into()));
    let inv = q.inverse().unwrap();
    let bound = (0..g)
        .map(|i| {
            let (_, hi) = r.checked_mul(&inv[(i, i)]).unwrap().rational_bounds(20);
            let c = hi.ceil().to_integer();
            let mut b = 0i64;
            while BigInt::from(b * b) < c {
                b += 1;
            }
            b
        })
        .max()
        .unwrap();
    let m = q.entries().iter().chain(x).fold(BigInt::from(1), |acc, v| {
        acc.lcm(v.rat().denom()).lcm(v.irr().denom())
    });
    let scaled = |v: &FieldScalar| {
        let mr = BigRational::from_integer(m.clone());
        ((v.rat() * &mr).to_integer(), (v.irr() * &mr).to_integer())
    };
    let qi: Vec<(BigInt, BigInt)> = q.entries().iter().map(scaled).collect();
    let xi: Vec<(BigInt, BigInt)> = x.iter().map(scaled).collect();
    let di = BigInt::from(d);
    let side = (2 * bound + 1) as usize;
    let mut best: Option<(BigInt, BigInt)> = None;
    for idx in 0..side.pow(g as u32) {
        let mut k = idx;
        let l: Vec<BigInt> = (0..g)
            .map(|_| {
                let c = (k % side) as i64 - bound;
                k /= side;
                BigInt::from(c)
            })
            .collect();
        let (mut a, mut b) = (BigInt::from(0), BigInt::from(0));
        for i in 0..g {
            for j in 0..g {
                let (qa, qb) = &qi[i * g + j];
                let (xa, xb) = &xi[j];
                let (pa, pb) = (qa * xa + &di * qb * xb, qa * xb + qb * xa);
                a += BigInt::from(2) * &l[i] * pa - &m * &l[i] * &l[j] * qa;
                b += BigInt::from(2) * &l[i] * pb - &m * &l[i] * &l[j] * qb;
            }
        }
        if best
            .as_ref()
            .is_none_or(|(ba, bb)| positive(&(&a - ba), &(&b - bb), d))
        {
            best = Some((a, b));
        }
    }
    let (a, b) = best.unwrap();
    let den = BigInt::from(2) * &m * &m;
    FieldScalar::new(
        BigRational::new(a, den.clone()),
        BigRational::new(b, den),
        d,
    )
    .unwrap()
}

fn criterion_theta() -> Outcome {
    let mut zero_checks = 0;
    for g in [2usize, 3] {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + g as u64);
        for case in 0..100 {
            let d = if case % 2 == 0 { 0 } else { 2 };
            let q = random_pd_form(&mut rng, g, d);
            let x = random_point(&mut rng, g, d);
            let t = theta_value(&q, &x).map_err(|e| e.to_string())?;
            let b = brute_theta(&q, &x);
            ensure(
                t.value == b,
                format!("g={g} case {case}: {} != {}", t.value, b),
            )?;
            let zero = vec![FieldScalar::zero_in(d); g];
            ensure(
                theta_value(&q, &zero).unwrap().value.is_zero(),
                format!("Theta(0) != 0 for Q = {q}"),
            )?;
            zero_checks += 1;
        }
    }
    Ok(format!(
        "200 pairs match the doubled-radius maximum; Theta(0) = 0 on {zero_checks} forms"
    ))
}

fn scalar(a: i64, b: i64, d: u64) -> FieldScalar {
    FieldScalar::new(
        BigRational::from_integer(a.into()),
        BigRational::from_integer(b.into()),
        d,
    )
    .unwrap()
}

fn surface(d: u64, a: &[[i64; 2]; 2], b: &[[i64; 2]; 2]) -> Option<TropicalTorus> {
    let rows = (0..2)
        .map(|i| (0..2).map(|j| scalar(a[i][j], b[i][j], d)).collect())
        .collect();
    TropicalTorus::new(FieldMatrix::from_rows(d, rows).ok()?).ok()
}

/// Alternately generic and of the form `J = M P^{-1}`, `P` unimodular and
/// `M e_1` rational, so that `J P e_1` spans a rational line.
fn seeded_surfaces(seed: u64, count: usize) -> Vec<TropicalTorus> {
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
        if let Some(t) = surface(d, &a, &b) {
            out.push(t);
        }
    }
    out
}

fn criterion_simplicity() -> Outcome {
    let err = |e: tropcount_core::Error| e.to_string();
    let t = surface(2, &[[1, 0], [0, 3]], &[[0, 1], [1, 0]]).unwrap();
    validate_polarized_torus(&t, &Polarization::new(IntMatrix::identity(2)).map_err(err)?)
        .map_err(err)?;
    ensure(
        find_subtorus(&t, 1000).map_err(err)? == SubtorusVerdict::Simple,
        "sqrt 2 example not simple",
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut rational = 0;
    for g in [2usize, 3] {
        while rational < 20 * (g - 1) {
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
            let v = find_subtorus(&t, 5).map_err(err)?;
            ensure(
                matches!(v, SubtorusVerdict::SubtorusFound { .. }),
                format!("rational J reported {v:?}"),
            )?;
            rational += 1;
        }
    }

    let mut found = 0;
    for t in seeded_surfaces(SEED, 50) {
        let search = search_rational_line(&t, 1000).map_err(err)?;
        match find_subtorus(&t, 1000).map_err(err)? {
            SubtorusVerdict::Simple => ensure(
                search.is_none(),
                format!("search found a line for J = {}", t.embedding()),
            )?,
            SubtorusVerdict::SubtorusFound { witness } => {
                found += 1;
                ensure(
                    spans_rational_line(&t, &witness.vector),
                    "witness is not rational",
                )?;
                ensure(
                    search.is_some(),
                    format!("search missed the line of J = {}", t.embedding()),
                )?;
            }
            SubtorusVerdict::Inconclusive { .. } => {
                return Err("surface verdict inconclusive".into())
            }
        }
    }
    Ok(format!(
        "sqrt 2 example simple; {rational} rational tori split; 50 surfaces agree with the height-1000 search ({found} split)"
    ))
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut notes = Vec::new();
    let guarded = |f: &dyn Fn() -> Outcome| -> Outcome {
        catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        })
    };
    results.push((1, "value table", guarded(&criterion_table)));
    results.push((2, "identities", guarded(&criterion_identities)));
    results.push((3, "oracle equivalence", guarded(&criterion_oracles)));
    results.push((4, "count = n^2 nu_dagger", guarded(&criterion_theorem)));
    notes.push(primitive_threefold_note());
    results.push((5, "skeleton round trip", guarded(&criterion_roundtrip)));
    results.push((6, "theta evaluator", guarded(&criterion_theta)));
    results.push((7, "simplicity", guarded(&criterion_simplicity)));
    let covered = results
        .iter()
        .filter(|(k, _, _)| *k <= 4)
        .all(|(_, _, r)| r.is_ok());
    let scope = if covered {
        Ok(
            "analytic correspondence not reproducible here; tropical side covered by 1-4"
                .to_string(),
        )
    } else {
        Err("criteria 1-4 did not all pass".to_string())
    };
    results.push((8, "scope", scope));

    let mut failed = 0;
    for (k, name, r) in &results {
        match r {
            Ok(detail) => println!("PASS  {k}  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {k}  {name}: {detail}");
            }
        }
    }
    for n in notes {
        println!("note  {n}");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
