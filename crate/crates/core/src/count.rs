//! Curve counts on a polarized tropical abelian variety, from the closed
//! form and by enumerating lattice factorizations of the dual polarization.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::abelian::{dual_type, enumerate_subgroups, nu_dagger, AbelianType, SubgroupRep};
use crate::error::{Error, Result};
use crate::field::FieldScalar;
use crate::field_matrix::{is_positive_definite, FieldMatrix};
use crate::matrix::IntMatrix;
use crate::normal_form::{cokernel_invariants, hnf, snf};
use crate::theta::skeleton;
use crate::tori::{
    dual_polarization_matrix, find_subtorus, polarization_type, validate_polarized_torus,
    Polarization, SubtorusVerdict, TropicalTorus,
};

/// A chain `X --F1--> I --F2--> Lambda` composing to `n C^{-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationTriple {
    pub f1: IntMatrix,
    pub f2: IntMatrix,
    pub subgroup: SubgroupRep,
}

fn degree(c: &IntMatrix) -> Result<BigInt> {
    let det = c.det()?;
    if det.is_zero() {
        return Err(Error::SingularPolarization);
    }
    Ok(det.abs())
}

fn unimodular_inverse(u: &IntMatrix) -> Result<IntMatrix> {
    let det = u.det()?;
    Ok(u.adjugate()?.scale(&det))
}

/// One triple per lattice `C_hat Z^g <= I <= Z^g`, sorted by `F2`.
pub fn enumerate_factorizations(c: &IntMatrix, budget: u128) -> Result<Vec<FactorizationTriple>> {
    degree(c)?;
    let c_hat = dual_polarization_matrix(c)?;
    let s = snf(&c_hat);
    let diag: Vec<u64> = s
        .diagonal()
        .iter()
        .map(|x| {
            u64::try_from(x).map_err(|_| Error::InvalidType(format!("factor {x} out of range")))
        })
        .collect::<Result<_>>()?;
    let t = AbelianType::new(diag)?;
    // U C_hat V = S, so U carries C_hat Z^g onto S Z^g
    let u_inv = unimodular_inverse(&s.u)?;
    let mut out = Vec::new();
    for subgroup in enumerate_subgroups(&t, budget)? {
        let f2 = hnf(&u_inv.checked_mul(&subgroup.basis)?)?;
        let f1 = f2
            .solve_integral(&c_hat)?
            .ok_or_else(|| Error::ConditionViolated("C_hat Z^g not inside I".into()))?;
        out.push(FactorizationTriple { f1, f2, subgroup });
    }
    out.sort_by(|a, b| a.f2.cmp(&b.f2));
    Ok(out)
}

/// `F1 C F2 = n I`: the triple pulls `c_L` back to `n` times a principal
/// polarization.
pub fn s2_condition_check(c: &IntMatrix, t: &FactorizationTriple) -> Result<bool> {
    let n = degree(c)?;
    let lhs = t.f1.checked_mul(c)?.checked_mul(&t.f2)?;
    if lhs != IntMatrix::identity(c.rows()).scale(&n) {
        return Err(Error::ConditionViolated(format!("F1 C F2 = {lhs}")));
    }
    Ok(true)
}

/// Gram matrix `K = F2^T J^T F1^{-1}` of the principally polarized torus
/// `Hom(I, R) / I`.
pub fn build_ppav(
    torus: &TropicalTorus,
    c: &IntMatrix,
    t: &FactorizationTriple,
) -> Result<FieldMatrix> {
    validate_polarized_torus(torus, &Polarization::new(c.clone())?)?;
    let det = t.f1.det()?;
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let k = FieldMatrix::int_mul(&t.f2.transpose(), &torus.embedding().transpose())?
        .mul_int(&t.f1.adjugate()?)?
        .scale_rational(&BigRational::new(BigInt::one(), det));
    if !k.is_symmetric() {
        return Err(Error::ConditionViolated(
            "PPAV Gram is not symmetric".into(),
        ));
    }
    if !is_positive_definite(&k)? {
        return Err(Error::ConditionViolated(
            "PPAV Gram is not positive definite".into(),
        ));
    }
    Ok(k)
}

/// `n * |Hom^sym(G, G^*)|` with `G = coker F1`.
pub fn multiplicity(c: &IntMatrix, t: &FactorizationTriple) -> Result<BigInt> {
    let n = degree(c)?;
    let g = cokernel_invariants(&t.f1)?;
    Ok(n * crate::abelian::hom_sym_count(&g))
}

/// `n^2 nu^dagger(type of C)`.
pub fn total_count_closed(c: &IntMatrix, budget: u128) -> Result<BigInt> {
    let g = c.require_square()?;
    if g != 2 && g != 3 {
        return Err(Error::UnsupportedRank(g));
    }
    let pt = polarization_type(&Polarization::new(c.clone())?)?;
    Ok(&pt.degree * &pt.degree * nu_dagger(&pt.ty, budget)?)
}

/// `n^2 nu^dagger(t)` straight from a type.
pub fn total_count_for_type(t: &AbelianType, budget: u128) -> Result<BigInt> {
    if t.rank() != 2 && t.rank() != 3 {
        return Err(Error::UnsupportedRank(t.rank()));
    }
    let n = t.order();
    Ok(&n * &n * nu_dagger(t, budget)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SkeletonSummary {
    pub genus: usize,
    pub three_edge_connected: bool,
    pub degenerate: bool,
    pub vertices: usize,
    pub edge_lengths: Vec<FieldScalar>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountEntry {
    pub f1: IntMatrix,
    pub f2: IntMatrix,
    pub g_invariants: AbelianType,
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub multiplicity: BigInt,
    pub ppav_gram: FieldMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skeleton: Option<SkeletonSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountReport {
    #[serde(rename = "type")]
    pub ty: AbelianType,
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub n: BigInt,
    pub dual_type: AbelianType,
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub kernel_factor: BigInt,
    pub entries: Vec<CountEntry>,
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub enumerated_total: BigInt,
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub closed_total: BigInt,
    pub agreement: bool,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    pub skeletons: bool,
    /// Height bound for the subtorus search behind the simplicity warning;
    /// 0 skips the check.
    pub simplicity_height: u64,
    pub budget: u128,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            skeletons: false,
            simplicity_height: 0,
            budget: crate::abelian::DEFAULT_BUDGET,
        }
    }
}

/// Enumerates every factorization, weighs it by its multiplicity, applies
/// the kernel factor once and compares with the closed form.
pub fn total_count_enumerated(
    torus: &TropicalTorus,
    c: &IntMatrix,
    opts: CountOptions,
) -> Result<CountReport> {
    let g = c.require_square()?;
    if g != 2 && g != 3 {
        return Err(Error::UnsupportedRank(g));
    }
    let pol = Polarization::new(c.clone())?;
    validate_polarized_torus(torus, &pol)?;
    let pt = polarization_type(&pol)?;
    let n = pt.degree.clone();
    let mut warnings = Vec::new();
    if opts.simplicity_height > 0 {
        match find_subtorus(torus, opts.simplicity_height)? {
            SubtorusVerdict::Simple => {}
            SubtorusVerdict::SubtorusFound { witness } => warnings.push(format!(
                "torus is not simple: subtorus of dimension {} from {:?}",
                witness.dim, witness.vector
            )),
            SubtorusVerdict::Inconclusive { height_bound } => warnings.push(format!(
                "simplicity not decided up to height {height_bound}"
            )),
        }
    }
    let mut entries = Vec::new();
    let mut sum = BigInt::zero();
    for (k, t) in enumerate_factorizations(c, opts.budget)?
        .into_iter()
        .enumerate()
    {
        s2_condition_check(c, &t)?;
        let g_inv = cokernel_invariants(&t.f1)?;
        if g_inv != t.subgroup.invariants {
            return Err(Error::ConditionViolated(format!(
                "coker F1 = ({g_inv}) but the subgroup has type ({})",
                t.subgroup.invariants
            )));
        }
        let m = multiplicity(c, &t)?;
        let gram = build_ppav(torus, c, &t)?;
        let skel = if opts.skeletons {
            let sk = skeleton(&gram)?;
            let summary = SkeletonSummary {
                genus: sk.graph.genus()?,
                three_edge_connected: sk.graph.is_m_edge_connected(3)?,
                degenerate: sk.degenerate,
                vertices: sk.graph.vertex_count(),
                edge_lengths: sk.graph.edges().iter().map(|e| e.len.clone()).collect(),
            };
            if summary.degenerate {
                warnings.push(format!(
                    "triple {k}: degenerate skeleton (Voronoi cone boundary)"
                ));
            }
            if !summary.three_edge_connected {
                warnings.push(format!("triple {k}: skeleton is not 3-edge-connected"));
            }
            Some(summary)
        } else {
            None
        };
        sum += &m;
        entries.push(CountEntry {
            f1: t.f1,
            f2: t.f2,
            g_invariants: g_inv,
            multiplicity: m,
            ppav_gram: gram,
            skeleton: skel,
        });
    }
    let enumerated_total = &n * sum;
    let closed_total = total_count_closed(c, opts.budget)?;
    Ok(CountReport {
        dual_type: dual_type(&pt.ty),
        ty: pt.ty,
        kernel_factor: n.clone(),
        n,
        entries,
        agreement: enumerated_total == closed_total,
        enumerated_total,
        closed_total,
        warnings,
    })
}

/// A lattice embedding valid for any nonsingular `C`: `J = C^{-T}`, with
/// pairing `J^T C = I`.
pub fn default_embedding(c: &IntMatrix) -> Result<TropicalTorus> {
    let ct = FieldMatrix::from_int(&c.transpose(), 0);
    TropicalTorus::new(ct.inverse()?)
}

/// Random nonsingular integer matrix with entries in `[-r, r]` and
/// `1 <= |det| <= max_det`.
pub fn random_polarization_matrix<R: Rng>(
    rng: &mut R,
    g: usize,
    r: i64,
    max_det: u64,
) -> IntMatrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..g)
            .map(|_| (0..g).map(|_| rng.gen_range(-r..=r)).collect())
            .collect();
        let m = IntMatrix::from_rows(&rows);
        let det = m.det().expect("square");
        if !det.is_zero() && det.abs() <= BigInt::from(max_det) {
            return m;
        }
    }
}

/// Random symmetric positive definite `S = A + B sqrt(D)` with small integer
/// entries, diagonally dominant in both parts.
pub fn random_pd_form<R: Rng>(rng: &mut R, g: usize, d: u64) -> FieldMatrix {
    let mut a = vec![vec![0i64; g]; g];
    let mut b = vec![vec![0i64; g]; g];
    for i in 0..g {
        for j in i + 1..g {
            a[i][j] = rng.gen_range(-3..=3);
            a[j][i] = a[i][j];
            if d != 0 {
                b[i][j] = rng.gen_range(-2..=2);
                b[j][i] = b[i][j];
            }
        }
    }
    // sqrt(D) < D, so |b| sqrt(D) <= |b| D bounds the irrational part
    let weight = if d == 0 { 0 } else { d as i64 };
    for i in 0..g {
        let off: i64 = (0..g)
            .filter(|&j| j != i)
            .map(|j| a[i][j].abs() + weight * b[i][j].abs())
            .sum();
        if d != 0 {
            b[i][i] = rng.gen_range(-1..=1);
        }
        a[i][i] = off + weight * b[i][i].abs() + rng.gen_range(1..=4);
    }
    let rows = (0..g)
        .map(|i| {
            (0..g)
                .map(|j| {
                    FieldScalar::new(
                        BigRational::from_integer(a[i][j].into()),
                        BigRational::from_integer(b[i][j].into()),
                        d,
                    )
                    .expect("valid discriminant")
                })
                .collect()
        })
        .collect();
    FieldMatrix::from_rows(d, rows).expect("square")
}

/// A random polarized torus: `J = C^{-T} S` so that `J^T C = S`.
pub fn random_polarized_torus<R: Rng>(
    rng: &mut R,
    g: usize,
    max_det: u64,
    d: u64,
) -> (TropicalTorus, IntMatrix) {
    let c = random_polarization_matrix(rng, g, 3, max_det);
    let s = random_pd_form(rng, g, d);
    let c_inv_t = FieldMatrix::from_int(&c.transpose(), d)
        .inverse()
        .expect("nonsingular");
    let j = c_inv_t.checked_mul(&s).expect("same field");
    (TropicalTorus::new(j).expect("nonsingular"), c)
}
