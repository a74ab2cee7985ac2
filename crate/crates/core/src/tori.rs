//! Tropical tori `Hom(X, R) / Lambda`, polarizations and homomorphisms.
//!
//! Bases of `X` and `Lambda` are fixed once, so every map is a matrix:
//!
//! * `J` (g x g, over `Q(sqrt(D))`): column `j` is `j(lambda_j)` in the basis
//!   of `Hom(X, R)` dual to the basis of `X`;
//! * `C` (integer): column `j` is `c_L(lambda_j)` in `X`-coordinates.
//!
//! The pairing `<l1, l2> = j(l1)(c_L(l2))` then has matrix `J^T C`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::abelian::AbelianType;
use crate::error::{Error, Result};
use crate::field::FieldScalar;
use crate::field_matrix::{is_positive_definite, FieldMatrix};
use crate::matrix::IntMatrix;
use crate::normal_form::cokernel_invariants;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalTorus {
    j: FieldMatrix,
}

impl TropicalTorus {
    pub fn new(j: FieldMatrix) -> Result<Self> {
        j.require_square()?;
        if j.det()?.is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(Self { j })
    }

    pub fn rank(&self) -> usize {
        self.j.rows()
    }

    pub fn discriminant(&self) -> u64 {
        self.j.discriminant()
    }

    pub fn embedding(&self) -> &FieldMatrix {
        &self.j
    }

    /// `Hom(Lambda, R) / X`, whose lattice embedding is `J^T`.
    pub fn dual(&self) -> Self {
        Self {
            j: self.j.transpose(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polarization {
    c: IntMatrix,
}

impl Polarization {
    pub fn new(c: IntMatrix) -> Result<Self> {
        c.require_square()?;
        Ok(Self { c })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.c
    }

    pub fn rank(&self) -> usize {
        self.c.rows()
    }

    fn det_nonzero(&self) -> Result<BigInt> {
        let det = self.c.det()?;
        if det.is_zero() {
            return Err(Error::SingularPolarization);
        }
        Ok(det)
    }
}

/// A homomorphism `T1 -> T2`: `G: Lambda_1 -> Lambda_2` and `H: X_2 -> X_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusHom {
    pub g: IntMatrix,
    pub h: IntMatrix,
}

impl TorusHom {
    pub fn identity(n: usize) -> Self {
        Self {
            g: IntMatrix::identity(n),
            h: IntMatrix::identity(n),
        }
    }

    pub fn multiplication(n: usize, m: i64) -> Self {
        let s = IntMatrix::identity(n).scale(&m.into());
        Self { g: s.clone(), h: s }
    }

    /// `self` after `first`: `(G_2 G_1, H_1 H_2)`.
    pub fn compose(&self, first: &TorusHom) -> Result<TorusHom> {
        Ok(TorusHom {
            g: self.g.checked_mul(&first.g)?,
            h: first.h.checked_mul(&self.h)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolarizationType {
    #[serde(rename = "type")]
    pub ty: AbelianType,
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub degree: BigInt,
    pub primitive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomDegrees {
    pub topological: BigInt,
    pub metric: BigInt,
    pub tropical: BigInt,
}

/// Checks that `(T, L)` is a polarized tropical abelian variety and returns
/// the pairing matrix `J^T C`.
pub fn validate_polarized_torus(t: &TropicalTorus, l: &Polarization) -> Result<FieldMatrix> {
    if t.rank() != l.rank() {
        return Err(Error::DimensionMismatch(format!(
            "torus of rank {} with a {}x{} polarization",
            t.rank(),
            l.rank(),
            l.rank()
        )));
    }
    l.det_nonzero()?;
    let pairing = t.j.transpose().mul_int(&l.c)?;
    if !pairing.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    // J adj(C) is symmetric exactly when J^T C is
    let dual_pairing = t.j.mul_int(&l.c.adjugate()?)?;
    if !dual_pairing.is_symmetric() {
        return Err(Error::ConditionViolated(
            "pairing symmetric but J adj(C) is not".into(),
        ));
    }
    if !is_positive_definite(&pairing)? {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(pairing)
}

/// Type, degree and primitivity of `c_L`.
pub fn polarization_type(l: &Polarization) -> Result<PolarizationType> {
    let det = l.det_nonzero()?;
    let ty = cokernel_invariants(&l.c)?;
    Ok(PolarizationType {
        primitive: ty.is_primitive(),
        degree: det.abs(),
        ty,
    })
}

/// `n * C^{-1}`: the adjugate of `C`, sign-corrected so that
/// `C * C_hat = C_hat * C = n * I` with `n = |det C|`.
pub fn dual_polarization_matrix(c: &IntMatrix) -> Result<IntMatrix> {
    let det = c.det()?;
    if det.is_zero() {
        return Err(Error::SingularPolarization);
    }
    let adj = c.adjugate()?;
    Ok(if det.is_negative() {
        adj.scale(&BigInt::from(-1))
    } else {
        adj
    })
}

pub fn dual_polarization(l: &Polarization) -> Result<Polarization> {
    let c_hat = dual_polarization_matrix(&l.c)?;
    let n = l.c.det()?.abs();
    let scaled = IntMatrix::identity(l.rank()).scale(&n);
    if l.c.checked_mul(&c_hat)? != scaled || c_hat.checked_mul(&l.c)? != scaled {
        return Err(Error::ConditionViolated("C * C_hat != n I".into()));
    }
    Polarization::new(c_hat)
}

/// Checks the commuting square `J_2 G = H^T J_1` and returns the degrees.
pub fn validate_hom(t1: &TropicalTorus, t2: &TropicalTorus, f: &TorusHom) -> Result<HomDegrees> {
    if t1.discriminant() != t2.discriminant() {
        return Err(Error::MixedDiscriminant(
            t1.discriminant(),
            t2.discriminant(),
        ));
    }
    let (g1, g2) = (t1.rank(), t2.rank());
    if (f.g.rows(), f.g.cols()) != (g2, g1) || (f.h.rows(), f.h.cols()) != (g1, g2) {
        return Err(Error::DimensionMismatch("homomorphism matrices".into()));
    }
    let lhs = t2.j.mul_int(&f.g)?;
    let rhs = FieldMatrix::int_mul(&f.h.transpose(), &t1.j)?;
    if lhs != rhs {
        return Err(Error::DiagramDoesNotCommute);
    }
    let dt = f.g.det()?.abs();
    let dm = f.h.det()?.abs();
    if dt.is_zero() || dm.is_zero() {
        return Err(Error::NotIsogeny);
    }
    Ok(HomDegrees {
        tropical: &dt * &dm,
        topological: dt,
        metric: dm,
    })
}

/// `f^* c_L = H C G`.
pub fn pullback_polarization(f: &TorusHom, l: &Polarization) -> Result<Polarization> {
    Polarization::new(f.h.checked_mul(&l.c)?.checked_mul(&f.g)?)
}

/// Order of `ker(A -> A_hat)`, i.e. `|det C|`.
pub fn kernel_order(l: &Polarization) -> Result<BigInt> {
    Ok(l.det_nonzero()?.abs())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubtorusWitness {
    /// Dimension of the subtorus.
    pub dim: usize,
    /// For `dim == 1`: a primitive `lambda` spanning it. For `dim == g - 1`
    /// with `g = 3`: a primitive covector `mu` with the subtorus `ker(mu)`.
    pub vector: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SubtorusVerdict {
    Simple,
    SubtorusFound { witness: SubtorusWitness },
    Inconclusive { height_bound: u64 },
}

/// Integer matrices `(A, B)` with `J = (A + B sqrt(D)) / den`.
pub fn integral_parts(j: &FieldMatrix) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let mut den = BigInt::one();
    for e in j.entries() {
        den = den.lcm(e.rat().denom()).lcm(e.irr().denom());
    }
    let scale =
        |q: &BigRational| -> BigInt { (q * BigRational::from_integer(den.clone())).to_integer() };
    let rows = j.to_rows();
    let a = rows
        .iter()
        .map(|r| r.iter().map(|e| scale(e.rat())).collect())
        .collect();
    let b = rows
        .iter()
        .map(|r| r.iter().map(|e| scale(e.irr())).collect())
        .collect();
    (a, b)
}

fn to_i128(m: &[Vec<BigInt>]) -> Result<Vec<Vec<i128>>> {
    m.iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    x.to_i128().ok_or_else(|| {
                        Error::ConditionViolated("lattice entries too large for search".into())
                    })
                })
                .collect()
        })
        .collect()
}

fn apply(m: &[Vec<i128>], v: &[i64]) -> Vec<i128> {
    m.iter()
        .map(|r| r.iter().zip(v).map(|(a, &x)| a * x as i128).sum())
        .collect()
}

/// `A v` and `B v` parallel: the direction of `(A + B sqrt(D)) v` is rational.
fn parallel(x: &[i128], y: &[i128]) -> bool {
    (0..x.len()).all(|i| (i + 1..x.len()).all(|k| x[i] * y[k] == x[k] * y[i]))
}

fn normalize_witness(mut v: Vec<i64>) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
    if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    v
}

/// Integer vectors with max-norm exactly `h`, first nonzero entry positive,
/// in lexicographic order.
fn shell(g: usize, h: i64) -> Vec<Vec<i64>> {
    fn rec(g: usize, h: i64, v: &mut Vec<i64>, has_h: bool, out: &mut Vec<Vec<i64>>) {
        if v.len() == g {
            if has_h && v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
                out.push(v.clone());
            }
            return;
        }
        // the last entry must reach the norm if nothing before did
        let values: Vec<i64> = if v.len() + 1 == g && !has_h {
            vec![-h, h]
        } else {
            (-h..=h).collect()
        };
        for x in values {
            v.push(x);
            rec(g, h, v, has_h || x.abs() == h, out);
            v.pop();
        }
    }
    let mut out = Vec::new();
    rec(g, h, &mut Vec::with_capacity(g), false, &mut out);
    out
}

/// Exhaustive search for a rational direction `M v` with `v` primitive of
/// max-norm at most `height`, shell by shell.
fn search_direction(m: &FieldMatrix, height: u64) -> Result<Option<Vec<i64>>> {
    let (a, b) = integral_parts(m);
    let (a, b) = (to_i128(&a)?, to_i128(&b)?);
    let g = m.rows();
    for h in 1..=height as i64 {
        for v in shell(g, h) {
            if parallel(&apply(&a, &v), &apply(&b, &v)) {
                return Ok(Some(normalize_witness(v)));
            }
        }
    }
    Ok(None)
}

/// Bounded search for a primitive `lambda` whose image `J lambda` spans a
/// rational line. Independent of the exact rank-2 criterion.
pub fn search_rational_line(t: &TropicalTorus, height: u64) -> Result<Option<Vec<i64>>> {
    search_direction(&t.j, height)
}

/// Whether `J lambda` spans a rational line, evaluated in field arithmetic.
pub fn spans_rational_line(t: &TropicalTorus, lambda: &[i64]) -> bool {
    let v: Vec<FieldScalar> = (0..t.rank())
        .map(|i| {
            lambda
                .iter()
                .enumerate()
                .fold(FieldScalar::zero_in(t.discriminant()), |acc, (k, &x)| {
                    &acc + &t.j[(i, k)].scale(&BigRational::from_integer(x.into()))
                })
        })
        .collect();
    // v is parallel to its conjugate
    let w: Vec<FieldScalar> = v.iter().map(FieldScalar::conj).collect();
    (0..v.len()).all(|i| (i + 1..v.len()).all(|k| (&v[i] * &w[k]) == (&v[k] * &w[i])))
}

fn is_rational_square(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

fn witness_key(v: &[i64]) -> (i64, usize, Vec<i64>) {
    (
        v.iter().map(|x| x.abs()).max().unwrap_or(0),
        v.iter().filter(|&&x| x < 0).count(),
        v.to_vec(),
    )
}

/// Rank-2 criterion: `J lambda` has rational direction iff the binary
/// quadratic form `F(lambda) = (B lambda)_1 (A lambda)_2 - (A lambda)_1 (B lambda)_2`
/// vanishes, where `J = A + B sqrt(D)`. Simple iff `F` is anisotropic over `Q`.
fn rank_two_verdict(t: &TropicalTorus) -> Result<SubtorusVerdict> {
    let rows = t.j.to_rows();
    let a = |i: usize, k: usize| rows[i][k].rat().clone();
    let b = |i: usize, k: usize| rows[i][k].irr().clone();
    let alpha = b(0, 0) * a(1, 0) - a(0, 0) * b(1, 0);
    let beta = b(0, 0) * a(1, 1) + b(0, 1) * a(1, 0) - a(0, 0) * b(1, 1) - a(0, 1) * b(1, 0);
    let gamma = b(0, 1) * a(1, 1) - a(0, 1) * b(1, 1);
    let found = |v: Vec<i64>| SubtorusVerdict::SubtorusFound {
        witness: SubtorusWitness { dim: 1, vector: v },
    };
    if alpha.is_zero() && beta.is_zero() && gamma.is_zero() {
        return Ok(found(vec![1, 0]));
    }
    let disc = &beta * &beta - BigRational::from_integer(4.into()) * &alpha * &gamma;
    let Some(root) = is_rational_square(&disc) else {
        return Ok(SubtorusVerdict::Simple);
    };
    let to_vec = |p: BigRational, q: BigRational| -> Option<Vec<i64>> {
        // primitive integer vector proportional to (p, q)
        let l = p.denom().lcm(q.denom());
        let s = BigRational::from_integer(l);
        let (x, y) = ((p * &s).to_integer(), (q * &s).to_integer());
        let g = x.gcd(&y);
        if g.is_zero() {
            return None;
        }
        Some(normalize_witness(vec![
            (x / &g).to_i64()?,
            (y / &g).to_i64()?,
        ]))
    };
    let mut candidates = Vec::new();
    if alpha.is_zero() {
        candidates.extend(to_vec(BigRational::one(), BigRational::zero()));
        candidates.extend(to_vec(-gamma.clone(), beta.clone()));
    } else {
        let two_alpha = BigRational::from_integer(2.into()) * &alpha;
        for r in [-&beta + &root, -&beta - &root] {
            candidates.extend(to_vec(r, two_alpha.clone()));
        }
    }
    candidates.sort_by_key(|v| witness_key(v));
    match candidates.into_iter().next() {
        Some(v) => Ok(found(v)),
        None => Err(Error::ConditionViolated(
            "isotropic form without a witness".into(),
        )),
    }
}

/// Looks for a proper nonzero subtorus.
///
/// Exact for `g = 2`. For `g = 3` the search covers rank-1 subtori
/// (primitive `lambda`) and rank-2 subtori (primitive covectors `mu` whose
/// kernel has a rational real span) up to `height_bound`; finding nothing
/// yields `Inconclusive`.
pub fn find_subtorus(t: &TropicalTorus, height_bound: u64) -> Result<SubtorusVerdict> {
    let g = t.rank();
    if g != 2 && g != 3 {
        return Err(Error::UnsupportedRank(g));
    }
    if t.j.is_rational() {
        let mut e1 = vec![0; g];
        e1[0] = 1;
        return Ok(SubtorusVerdict::SubtorusFound {
            witness: SubtorusWitness { dim: 1, vector: e1 },
        });
    }
    if g == 2 {
        return rank_two_verdict(t);
    }
    let lines = t.j.clone();
    // ker(mu) maps onto a rational plane iff J^{-T} mu has rational direction
    let planes = t.j.inverse()?.transpose();
    let (la, lb) = integral_parts(&lines);
    let (pa, pb) = integral_parts(&planes);
    let (la, lb, pa, pb) = (to_i128(&la)?, to_i128(&lb)?, to_i128(&pa)?, to_i128(&pb)?);
    for h in 1..=height_bound as i64 {
        let sh = shell(3, h);
        for v in &sh {
            if parallel(&apply(&la, v), &apply(&lb, v)) {
                return Ok(SubtorusVerdict::SubtorusFound {
                    witness: SubtorusWitness {
                        dim: 1,
                        vector: normalize_witness(v.clone()),
                    },
                });
            }
        }
        for v in &sh {
            if parallel(&apply(&pa, v), &apply(&pb, v)) {
                return Ok(SubtorusVerdict::SubtorusFound {
                    witness: SubtorusWitness {
                        dim: 2,
                        vector: normalize_witness(v.clone()),
                    },
                });
            }
        }
    }
    Ok(SubtorusVerdict::Inconclusive { height_bound })
}
