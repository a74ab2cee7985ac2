//! Divisor sums and the closed-form identities satisfied by `nu`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::abelian::{normalize_type, nu, nu_direct, AbelianType};
use crate::error::Result;

/// Prime factorization by trial division on a 2-3-5 wheel, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    for p in [2u64, 3, 5] {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    const STEPS: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut i = 0;
    while p.saturating_mul(p) <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += STEPS[i];
        i = (i + 1) % STEPS.len();
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

/// `sigma_k(n) = sum_{d | n} d^k`.
pub fn sigma(k: u32, n: u64) -> BigInt {
    assert!(n >= 1, "sigma needs n >= 1");
    factorize(n)
        .into_iter()
        .map(|(p, e)| {
            let pk = BigInt::from(p).pow(k);
            let mut term = BigInt::one();
            let mut acc = BigInt::one();
            for _ in 0..e {
                term *= &pk;
                acc += &term;
            }
            acc
        })
        .product()
}

/// Coefficients `c_0..=c_max` of `-1/24 + sum_{n>=1} sigma_1(n) q^n`, built
/// from the Lambert series `sum_m m q^m / (1 - q^m)`.
pub fn eisenstein_e2_coefficients(max_n: usize) -> Vec<BigRational> {
    let mut c = vec![BigInt::zero(); max_n + 1];
    for m in 1..=max_n {
        let mut k = m;
        while k <= max_n {
            c[k] += m;
            k += m;
        }
    }
    let mut out: Vec<BigRational> = c.into_iter().map(BigRational::from_integer).collect();
    out[0] = BigRational::new((-1).into(), 24.into());
    out
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct IdentityCase {
    pub input: String,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

/// Outcome of an identity check over a parameter range.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct IdentityReport {
    pub name: String,
    pub range: String,
    pub cases: Vec<IdentityCase>,
    pub pass: bool,
}

impl IdentityReport {
    fn new(name: &str, range: String) -> Self {
        Self {
            name: name.into(),
            range,
            cases: Vec::new(),
            pass: true,
        }
    }

    fn push(&mut self, input: String, lhs: &BigInt, rhs: &BigInt) {
        let pass = lhs == rhs;
        self.pass &= pass;
        self.cases.push(IdentityCase {
            input,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            pass,
        });
    }

    pub fn first_failure(&self) -> Option<&IdentityCase> {
        self.cases.iter().find(|c| !c.pass)
    }

    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| !c.pass).count()
    }
}

/// `nu(1, n) = sigma_1(n)` for `1 <= n <= max_n`.
pub fn check_sigma_identity(max_n: u64, budget: u128) -> Result<IdentityReport> {
    let mut r = IdentityReport::new("nu(1,n) = sigma_1(n)", format!("1 <= n <= {max_n}"));
    for n in 1..=max_n {
        let t = AbelianType::new(vec![1, n])?;
        r.push(format!("n={n}"), &nu(&t, budget)?, &sigma(1, n));
    }
    Ok(r)
}

/// `nu(p, p n) = sigma_1(p^2 n) + p^3 sigma_1(n)` for each prime `p` and `1 <= n <= max_n`.
pub fn check_p_pn_identity(primes: &[u64], max_n: u64, budget: u128) -> Result<IdentityReport> {
    let list: Vec<String> = primes.iter().map(u64::to_string).collect();
    let mut r = IdentityReport::new(
        "nu(p,pn) = sigma_1(p^2 n) + p^3 sigma_1(n)",
        format!("p in {{{}}}, 1 <= n <= {max_n}", list.join(",")),
    );
    for &p in primes {
        assert!(is_prime(p), "{p} is not prime");
        for n in 1..=max_n {
            let t = AbelianType::new(vec![p, p * n])?;
            let rhs = sigma(1, p * p * n) + BigInt::from(p).pow(3) * sigma(1, n);
            r.push(format!("p={p},n={n}"), &nu(&t, budget)?, &rhs);
        }
    }
    Ok(r)
}

/// Random type whose order only involves `primes`, with order at most `max_order`.
fn random_type(rng: &mut ChaCha8Rng, primes: &[u64], max_order: u64) -> AbelianType {
    loop {
        let rank = rng.gen_range(1..=3usize);
        let mut factors = Vec::with_capacity(rank);
        let mut d = 1u64;
        for _ in 0..rank {
            for _ in 0..rng.gen_range(0..=2) {
                d *= primes[rng.gen_range(0..primes.len())];
            }
            factors.push(d);
        }
        let t = AbelianType::new(factors).expect("built as a chain");
        if t.order() <= BigInt::from(max_order) {
            return t;
        }
    }
}

/// Seeded pairs `(G, G')` of coprime order with `|G| |G'| <= 10^4`.
pub fn coprime_type_pairs(seed: u64, cases: usize) -> Vec<(AbelianType, AbelianType)> {
    const PRIMES: [u64; 5] = [2, 3, 5, 7, 11];
    const MAX: u64 = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(cases);
    while out.len() < cases {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for p in PRIMES {
            if rng.gen_bool(0.5) {
                left.push(p);
            } else {
                right.push(p);
            }
        }
        if left.is_empty() || right.is_empty() {
            continue;
        }
        let a = random_type(&mut rng, &left, MAX);
        let remaining = MAX / u64::try_from(a.order()).expect("bounded");
        let b = random_type(&mut rng, &right, remaining.max(1));
        if a.order() * b.order() <= BigInt::from(MAX) {
            out.push((a, b));
        }
    }
    out
}

/// `nu(G x G') = nu(G) nu(G')` on seeded coprime pairs; every side goes
/// through a full subgroup enumeration of its own group.
pub fn check_multiplicativity(seed: u64, cases: usize, budget: u128) -> Result<IdentityReport> {
    let mut r = IdentityReport::new(
        "nu(G x G') = nu(G) nu(G') for coprime orders",
        format!("seed {seed}, {cases} cases, |G||G'| <= 10000"),
    );
    for (a, b) in coprime_type_pairs(seed, cases) {
        debug_assert!(a.order().gcd(&b.order()).is_one());
        let mut joined = a.factors().to_vec();
        joined.extend_from_slice(b.factors());
        let combined = normalize_type(&joined)?;
        let lhs = nu_direct(&combined, budget)?;
        let rhs = nu_direct(&a, budget)? * nu_direct(&b, budget)?;
        r.push(format!("({a})x({b})"), &lhs, &rhs);
    }
    Ok(r)
}
