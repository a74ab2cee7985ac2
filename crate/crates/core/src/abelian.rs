//! Finite abelian groups given by invariant factors.
//!
//! Subgroups of `G = Z^g / N Z^g` (with `N = diag(d_1, ..., d_g)`) are
//! represented by the intermediate lattices `N Z^g <= L <= Z^g`, keyed by the
//! Hermite normal form of `L`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::normal_form::{snf, snf_diagonal_small};

/// Default cap on the number of HNF candidates examined by subgroup enumeration.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Cap on the group order accepted by [`hom_sym_bruteforce`].
pub const BRUTEFORCE_MAX_ORDER: u64 = 10_000;

/// Invariant factors `d_1 | d_2 | ... | d_g`; leading ones are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct AbelianType {
    factors: Vec<u64>,
}

impl AbelianType {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidType("empty type".into()));
        }
        if factors.contains(&0) {
            return Err(Error::InvalidType("factors must be positive".into()));
        }
        if let Some(w) = factors.windows(2).find(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidType(format!(
                "{} does not divide {}",
                w[0], w[1]
            )));
        }
        Ok(Self { factors })
    }

    /// The trivial group of rank `g` (all factors 1).
    pub fn trivial(g: usize) -> Self {
        Self {
            factors: vec![1; g.max(1)],
        }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().map(|&d| BigInt::from(d)).product()
    }

    pub fn exponent(&self) -> u64 {
        *self.factors.last().expect("nonempty")
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.iter().all(|&d| d == 1)
    }

    /// The factors greater than one.
    pub fn nontrivial(&self) -> Vec<u64> {
        self.factors.iter().copied().filter(|&d| d > 1).collect()
    }

    /// Primitive in the polarization sense: `gcd(d_i) = d_1 = 1`.
    pub fn is_primitive(&self) -> bool {
        self.factors[0] == 1
    }

    /// `p`-primary part, same rank.
    pub fn primary_part(&self, p: u64) -> Self {
        let factors = self
            .factors
            .iter()
            .map(|&d| {
                let mut q = 1;
                let mut d = d;
                while d % p == 0 {
                    d /= p;
                    q *= p;
                }
                q
            })
            .collect();
        Self { factors }
    }

    /// Primes dividing the order, ascending.
    pub fn primes(&self) -> Vec<u64> {
        factorize(self.exponent())
            .into_iter()
            .map(|(p, _)| p)
            .collect()
    }
}

impl TryFrom<Vec<u64>> for AbelianType {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<AbelianType> for Vec<u64> {
    fn from(t: AbelianType) -> Self {
        t.factors
    }
}

impl fmt::Display for AbelianType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(u64::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Parses a comma-separated list of positive integers (any order) and
/// normalizes it to invariant factors.
impl FromStr for AbelianType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad type entry {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        normalize_type(&values)
    }
}

/// Invariant factors of `Z/v_1 + ... + Z/v_k`, padded with ones to length `k`.
pub fn normalize_type(values: &[u64]) -> Result<AbelianType> {
    if values.is_empty() {
        return Err(Error::InvalidType("empty type".into()));
    }
    if values.contains(&0) {
        return Err(Error::InvalidType("factors must be positive".into()));
    }
    let r = snf(&IntMatrix::diag(values));
    let factors = r
        .diagonal()
        .iter()
        .map(|d| u64::try_from(d).expect("divides a u64 product"))
        .collect();
    AbelianType::new(factors)
}

/// `(n/d_g, ..., n/d_1)` with `n = d_1 * ... * d_g`.
pub fn dual_type(t: &AbelianType) -> AbelianType {
    let n = t.order();
    let factors = t
        .factors
        .iter()
        .rev()
        .map(|&d| u64::try_from(&n / d).expect("dual factor exceeds u64"))
        .collect();
    AbelianType::new(factors).expect("dual of a chain is a chain")
}

/// A subgroup `H = L / N Z^g` of the group of type `ambient`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupRep {
    #[serde(skip)]
    pub ambient: AbelianType,
    /// HNF basis of `L`.
    pub basis: IntMatrix,
    pub invariants: AbelianType,
}

impl SubgroupRep {
    pub fn order(&self) -> BigInt {
        self.invariants.order()
    }

    pub fn hom_sym(&self) -> BigInt {
        hom_sym_count(&self.invariants)
    }
}

/// Number of HNF candidates the enumeration would examine without pruning:
/// `prod_j sum_{a | d_j} a^(g-1-j)`.
pub fn subgroup_candidate_count(t: &AbelianType) -> u128 {
    let g = t.rank();
    t.factors
        .iter()
        .enumerate()
        .map(|(j, &d)| {
            divisors(d)
                .into_iter()
                .map(|a| (a as u128).saturating_pow((g - 1 - j) as u32))
                .fold(0u128, u128::saturating_add)
        })
        .fold(1u128, u128::saturating_mul)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut a = 1;
    while a * a <= n {
        if n.is_multiple_of(a) {
            small.push(a);
            if a * a != n {
                large.push(n / a);
            }
        }
        a += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Upper-triangular partial basis built column by column.
struct Partial {
    /// cols[j] holds rows 0..=j of column j.
    cols: Vec<Vec<i128>>,
    /// coords[j] = H^{-1} (d_j e_j), rows 0..=j.
    coords: Vec<Vec<i128>>,
}

impl Partial {
    /// Coordinates of `v` (length j) in the lattice of the first j columns.
    fn express(&self, v: &[i128]) -> Option<Vec<i128>> {
        let mut r = v.to_vec();
        let mut x = vec![0i128; v.len()];
        for i in (0..v.len()).rev() {
            let h = self.cols[i][i];
            if r[i] % h != 0 {
                return None;
            }
            let c = r[i] / h;
            x[i] = c;
            if c != 0 {
                for (k, rk) in r.iter_mut().enumerate().take(i + 1) {
                    *rk -= c * self.cols[i][k];
                }
            }
        }
        Some(x)
    }
}

/// Lattice columns paired with their coordinates.
type Candidate = (Vec<Vec<i128>>, Vec<Vec<i128>>);

fn enumerate_columns(
    d: &[i128],
    divs: &[Vec<i128>],
    partial: &mut Partial,
    out: &mut Vec<Candidate>,
) {
    let j = partial.cols.len();
    if j == d.len() {
        out.push((partial.cols.clone(), partial.coords.clone()));
        return;
    }
    for &a in &divs[j] {
        let y = d[j] / a;
        // odometer over off-diagonal entries h_i in [0, H_ii)
        let mut h = vec![0i128; j];
        loop {
            let v: Vec<i128> = h.iter().map(|&x| x * y).collect();
            if let Some(x) = partial.express(&v) {
                let mut col = h.clone();
                col.push(a);
                let mut coord: Vec<i128> = x.iter().map(|&c| -c).collect();
                coord.push(y);
                partial.cols.push(col);
                partial.coords.push(coord);
                enumerate_columns(d, divs, partial, out);
                partial.cols.pop();
                partial.coords.pop();
            }
            let mut k = 0;
            loop {
                if k == j {
                    break;
                }
                h[k] += 1;
                if h[k] < partial.cols[k][k] {
                    break;
                }
                h[k] = 0;
                k += 1;
            }
            if k == j {
                break;
            }
        }
    }
}

/// Every subgroup exactly once, sorted by HNF key.
pub fn enumerate_subgroups(t: &AbelianType, budget: u128) -> Result<Vec<SubgroupRep>> {
    let candidates = subgroup_candidate_count(t);
    if candidates > budget {
        return Err(Error::BudgetExceeded { candidates, budget });
    }
    if t.exponent() > (1u64 << 40) {
        return Err(Error::InvalidType(format!("exponent of {t} too large")));
    }
    let g = t.rank();
    let d: Vec<i128> = t.factors.iter().map(|&x| x as i128).collect();
    let divs: Vec<Vec<i128>> = t
        .factors
        .iter()
        .map(|&x| divisors(x).into_iter().map(|a| a as i128).collect())
        .collect();
    let mut raw = Vec::new();
    let mut partial = Partial {
        cols: Vec::with_capacity(g),
        coords: Vec::with_capacity(g),
    };
    enumerate_columns(&d, &divs, &mut partial, &mut raw);

    let mut reps: Vec<SubgroupRep> = raw
        .into_iter()
        .map(|(cols, coords)| {
            let mut basis = IntMatrix::zeros(g, g);
            let mut m = vec![vec![0i128; g]; g];
            for j in 0..g {
                for i in 0..=j {
                    basis[(i, j)] = BigInt::from(cols[j][i]);
                    m[i][j] = coords[j][i];
                }
            }
            // H^{-1} N presents H = L / N Z^g
            let inv: Vec<u64> = snf_diagonal_small(m)
                .into_iter()
                .map(|x| x as u64)
                .collect();
            SubgroupRep {
                ambient: t.clone(),
                basis,
                invariants: AbelianType::new(inv).expect("snf diagonal is a chain"),
            }
        })
        .collect();
    reps.sort_by(|a, b| a.basis.cmp(&b.basis));
    Ok(reps)
}

/// `#Hom^sym(H, H^*) = prod_{i <= j} gcd(e_i, e_j)`.
///
/// A symmetric bilinear map into `Q/Z` is fixed by its values on pairs of
/// generators, and the value on `(g_i, g_j)` ranges over the cyclic group
/// of order `gcd(e_i, e_j)`.
pub fn hom_sym_count(t: &AbelianType) -> BigInt {
    let e = &t.factors;
    let mut acc = BigInt::one();
    for i in 0..e.len() {
        for j in i..e.len() {
            acc *= e[i].gcd(&e[j]);
        }
    }
    acc
}

/// Literal enumeration of homomorphisms `phi: H -> Hom(H, Q/Z)` that are
/// symmetric as bilinear maps.
///
/// `phi(g_i)(g_j) = m_ij / e_j` with `m_ij` in `[0, e_j)`. Well-definedness on
/// `H` requires `e_i * m_ij / e_j` to be integral; symmetry requires
/// `m_ij / e_j = m_ji / e_i` in `Q/Z`.
pub fn hom_sym_bruteforce(t: &AbelianType, budget: u128) -> Result<BigInt> {
    let order = t.order();
    if order > BigInt::from(BRUTEFORCE_MAX_ORDER) {
        return Err(Error::BudgetExceeded {
            candidates: u128::try_from(&order).unwrap_or(u128::MAX),
            budget: BRUTEFORCE_MAX_ORDER as u128,
        });
    }
    let e: Vec<u64> = t.factors.clone();
    let k = e.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let mut m = vec![vec![0u64; k]; k];
    let mut visited: u128 = 0;
    let mut count = BigInt::from(0);
    brute_rec(&e, &pairs, 0, &mut m, &mut visited, budget, &mut count)?;
    Ok(count)
}

fn brute_rec(
    e: &[u64],
    pairs: &[(usize, usize)],
    idx: usize,
    m: &mut Vec<Vec<u64>>,
    visited: &mut u128,
    budget: u128,
    count: &mut BigInt,
) -> Result<()> {
    if idx == pairs.len() {
        *count += 1;
        return Ok(());
    }
    let (i, j) = pairs[idx];
    let well_defined = |a: usize, b: usize, x: u64| (e[a] * x).is_multiple_of(e[b]);
    for x in 0..e[j] {
        let ys: Vec<u64> = if i == j { vec![x] } else { (0..e[i]).collect() };
        for y in ys {
            *visited += 1;
            if *visited > budget {
                return Err(Error::BudgetExceeded {
                    candidates: *visited,
                    budget,
                });
            }
            // x = m_ij (over e_j), y = m_ji (over e_i)
            if !well_defined(i, j, x) || !well_defined(j, i, y) {
                continue;
            }
            if (x * e[i]) % (e[i] * e[j]) != (y * e[j]) % (e[i] * e[j]) {
                continue;
            }
            m[i][j] = x;
            m[j][i] = y;
            brute_rec(e, pairs, idx + 1, m, visited, budget, count)?;
        }
    }
    Ok(())
}

/// `nu(G) = sum_{H <= G} #Hom^sym(H, H^*)`, computed prime by prime.
pub fn nu(t: &AbelianType, budget: u128) -> Result<BigInt> {
    let mut acc = BigInt::one();
    for p in t.primes() {
        acc *= nu_direct(&t.primary_part(p), budget)?;
    }
    Ok(acc)
}

/// `nu` by a single enumeration of all subgroups of `G`.
pub fn nu_direct(t: &AbelianType, budget: u128) -> Result<BigInt> {
    Ok(enumerate_subgroups(t, budget)?
        .iter()
        .map(SubgroupRep::hom_sym)
        .sum())
}

/// `nu(dual_type(t))`.
pub fn nu_dagger(t: &AbelianType, budget: u128) -> Result<BigInt> {
    nu(&dual_type(t), budget)
}

/// Histogram of subgroup orders.
pub fn subgroup_order_histogram(subgroups: &[SubgroupRep]) -> BTreeMap<BigInt, usize> {
    let mut hist = BTreeMap::new();
    for s in subgroups {
        *hist.entry(s.order()).or_insert(0) += 1;
    }
    hist
}
