//! Selling reduction, tropical skeletons of principally polarized tori, and
//! the tropical theta function.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldScalar;
use crate::field_matrix::{is_positive_definite, FieldMatrix};
use crate::graph::{Edge, MetricGraph};
use crate::matrix::IntMatrix;

/// Pairs `(i, j)` of superbase indices in parameter order.
pub fn selling_pairs(dim: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..=dim {
        for j in i + 1..=dim {
            out.push((i, j));
        }
    }
    // order: pairs with 0 first, then the rest lexicographically
    out.sort_by_key(|&(i, j)| (i != 0, i, j));
    out
}

/// An obtuse superbase `v_0 + ... + v_g = 0` of a form `Q`, with Selling
/// parameters `p_ij = -Q(v_i, v_j) >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SellingDecomposition {
    pub dim: usize,
    /// Columns `v_1, ..., v_g`; unimodular.
    pub u: IntMatrix,
    /// `p_ij` in the order of [`selling_pairs`].
    pub params: Vec<FieldScalar>,
}

impl SellingDecomposition {
    /// `U^T Q U` rebuilt from the parameters:
    /// `sum_i p_0i e_i e_i^T + sum_{1 <= i < j} p_ij (e_i - e_j)(e_i - e_j)^T`.
    pub fn reconstruct(&self) -> Result<FieldMatrix> {
        let g = self.dim;
        let d = self.params.first().map_or(0, FieldScalar::discriminant);
        let mut m = vec![FieldScalar::zero_in(d); g * g];
        for (&(i, j), p) in selling_pairs(g).iter().zip(&self.params) {
            if i == 0 {
                let k = j - 1;
                m[k * g + k] = m[k * g + k].checked_add(p)?;
            } else {
                let (a, b) = (i - 1, j - 1);
                m[a * g + a] = m[a * g + a].checked_add(p)?;
                m[b * g + b] = m[b * g + b].checked_add(p)?;
                m[a * g + b] = m[a * g + b].checked_sub(p)?;
                m[b * g + a] = m[b * g + a].checked_sub(p)?;
            }
        }
        FieldMatrix::new(g, g, d, m)
    }
}

fn superbase_params(q: &FieldMatrix, v: &[Vec<i64>]) -> Vec<FieldScalar> {
    selling_pairs(v.len() - 1)
        .into_iter()
        .map(|(i, j)| -&q.bilinear_int(&v[i], &v[j]))
        .collect()
}

fn check_form(q: &FieldMatrix) -> Result<usize> {
    let g = q.require_square()?;
    if g != 2 && g != 3 {
        return Err(Error::UnsupportedDimension(g));
    }
    if !q.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if !is_positive_definite(q)? {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(g)
}

/// Selling reduction: flips the first negative parameter until none is left.
/// Each flip strictly lowers `sum_i Q(v_i, v_i)`, so this terminates.
pub fn selling_reduce(q: &FieldMatrix) -> Result<SellingDecomposition> {
    let g = check_form(q)?;
    let mut v: Vec<Vec<i64>> = vec![vec![-1; g]];
    for i in 0..g {
        let mut e = vec![0; g];
        e[i] = 1;
        v.push(e);
    }
    let pairs = selling_pairs(g);
    loop {
        let params = superbase_params(q, &v);
        let Some(k) = params.iter().position(FieldScalar::is_negative) else {
            let cols: Vec<Vec<i64>> = (0..g).map(|r| (1..=g).map(|c| v[c][r]).collect()).collect();
            let u = IntMatrix::from_rows(&cols);
            debug_assert!(u.is_unimodular());
            return Ok(SellingDecomposition { dim: g, u, params });
        };
        let (i, j) = pairs[k];
        let vi = v[i].clone();
        let others: Vec<usize> = (0..=g).filter(|&x| x != i && x != j).collect();
        let factor = if g == 2 { 2 } else { 1 };
        for &o in &others {
            for (x, y) in v[o].iter_mut().zip(&vi) {
                *x = x.checked_add(factor * y).expect("superbase overflow");
            }
        }
        for x in v[i].iter_mut() {
            *x = -*x;
        }
    }
}

/// Selling parameters up to relabelling of the superbase: the smallest
/// parameter vector over all permutations of `v_0, ..., v_g`.
pub fn canonical_selling(dim: usize, params: &[FieldScalar]) -> Vec<FieldScalar> {
    let pairs = selling_pairs(dim);
    let index = |a: usize, b: usize| {
        let key = (a.min(b), a.max(b));
        pairs.iter().position(|&p| p == key).expect("pair")
    };
    let cmp = |x: &Vec<FieldScalar>, y: &Vec<FieldScalar>| {
        x.iter()
            .zip(y)
            .map(|(a, b)| a.cmp_exact(b).expect("same field"))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    };
    let mut best: Option<Vec<FieldScalar>> = None;
    for perm in permutations(dim + 1) {
        let relabelled: Vec<FieldScalar> = pairs
            .iter()
            .map(|&(i, j)| params[index(perm[i], perm[j])].clone())
            .collect();
        if best.as_ref().is_none_or(|b| cmp(&relabelled, b).is_lt()) {
            best = Some(relabelled);
        }
    }
    best.unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub graph: MetricGraph,
    pub selling: SellingDecomposition,
    /// Some Selling parameter vanished and its edge was contracted.
    pub degenerate: bool,
}

/// The metric graph whose Jacobian is `(R^g / Z^g, Q)`.
///
/// `g = 2`: the theta graph with lengths `p_01, p_02, p_12`.
/// `g = 3`: `K_4` on the superbase indices, where edge `{k, l}` carries the
/// parameter of the complementary pair. Zero-length edges are contracted.
pub fn skeleton(q: &FieldMatrix) -> Result<Skeleton> {
    let selling = selling_reduce(q)?;
    let g = selling.dim;
    let pairs = selling_pairs(g);
    let (vertices, edges): (usize, Vec<Edge>) = if g == 2 {
        let edges = selling
            .params
            .iter()
            .map(|p| Edge {
                u: 0,
                v: 1,
                len: p.clone(),
            })
            .collect();
        (2, edges)
    } else {
        let edges = pairs
            .iter()
            .map(|&(k, l)| {
                let comp: Vec<usize> = (0..4).filter(|&x| x != k && x != l).collect();
                let idx = pairs
                    .iter()
                    .position(|&p| p == (comp[0], comp[1]))
                    .expect("pair");
                Edge {
                    u: k,
                    v: l,
                    len: selling.params[idx].clone(),
                }
            })
            .collect();
        (4, edges)
    };
    let raw = MetricGraph::with_lengths_unchecked(vertices, edges)?;
    let degenerate = selling.params.iter().any(FieldScalar::is_zero);
    let graph = raw.contract_zero_edges()?;
    let graph = MetricGraph::new(graph.vertex_count(), graph.edges().to_vec())?;
    Ok(Skeleton {
        graph,
        selling,
        degenerate,
    })
}

fn ceil_sqrt(n: &BigInt) -> BigInt {
    if !n.is_positive() {
        return BigInt::zero();
    }
    let r = n.sqrt();
    if &r * &r == *n {
        r
    } else {
        r + 1
    }
}

/// Integer `B` with `|lambda_i| <= B` whenever `Q(lambda, lambda) <= r`,
/// from `lambda_i^2 <= r (Q^{-1})_ii`.
fn box_bounds(q: &FieldMatrix, r: &FieldScalar) -> Result<Vec<i64>> {
    let inv = q.inverse()?;
    (0..q.rows())
        .map(|i| {
            let bound = r.checked_mul(&inv[(i, i)])?;
            let (_, hi) = bound.rational_bounds(32);
            let ceil = hi.ceil().to_integer();
            ceil_sqrt(&ceil)
                .to_i64()
                .ok_or_else(|| Error::ConditionViolated("theta search box too large".into()))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaValue {
    pub value: FieldScalar,
    pub argmax: Vec<i64>,
}

/// Advances `lambda` through the box `[-b_i, b_i]` in lexicographic order.
fn next_in_box(lambda: &mut [i64], bounds: &[i64]) -> bool {
    for k in (0..lambda.len()).rev() {
        if lambda[k] < bounds[k] {
            lambda[k] += 1;
            for (l, b) in lambda.iter_mut().zip(bounds).skip(k + 1) {
                *l = -b;
            }
            return true;
        }
    }
    false
}

/// `Theta(x) = max_lambda Q(lambda, x) - Q(lambda, lambda) / 2`.
///
/// Any maximizer satisfies `Q(lambda, lambda) <= 4 Q(x, x)`, so only that
/// ellipsoid is searched. Ties go to the first lattice point in
/// lexicographic order.
pub fn theta_value(q: &FieldMatrix, x: &[FieldScalar]) -> Result<ThetaValue> {
    let g = check_form_any(q)?;
    if x.len() != g {
        return Err(Error::DimensionMismatch("point and form".into()));
    }
    let d = q.discriminant();
    let x: Vec<FieldScalar> = x.iter().map(|s| s.lift(d)).collect::<Result<_>>()?;
    let qxx = q.bilinear(&x, &x)?;
    let radius = qxx.scale(&BigRational::from_integer(4.into()));
    let bounds = box_bounds(q, &radius)?;
    if let Some(t) = fast::theta(q, &x, &bounds) {
        return Ok(t);
    }
    let half = BigRational::new(BigInt::one(), 2.into());
    let mut best: Option<ThetaValue> = None;
    let mut lambda: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        let qll = q.bilinear_int(&lambda, &lambda);
        if qll.cmp_exact(&radius)?.is_le() {
            let lf: Vec<FieldScalar> = lambda
                .iter()
                .map(|&k| FieldScalar::from_int_in(k, d))
                .collect();
            let val = q.bilinear(&lf, &x)?.checked_sub(&qll.scale(&half))?;
            let better = match &best {
                None => true,
                Some(b) => val.cmp_exact(&b.value)?.is_gt(),
            };
            if better {
                best = Some(ThetaValue {
                    value: val,
                    argmax: lambda.clone(),
                });
            }
        }
        if !next_in_box(&mut lambda, &bounds) {
            return best.ok_or_else(|| Error::ConditionViolated("empty search".into()));
        }
    }
}

/// The same search in `i128`, after clearing denominators. Returns `None`
/// on overflow so the caller can fall back to arbitrary precision.
mod fast {
    use std::cmp::Ordering;

    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    use super::{next_in_box, ThetaValue};
    use crate::field::FieldScalar;
    use crate::field_matrix::FieldMatrix;

    /// `a + b sqrt(d)`.
    #[derive(Clone, Copy)]
    struct Zd {
        a: i128,
        b: i128,
    }

    impl Zd {
        const ZERO: Zd = Zd { a: 0, b: 0 };

        fn add(self, o: Zd) -> Option<Zd> {
            Some(Zd {
                a: self.a.checked_add(o.a)?,
                b: self.b.checked_add(o.b)?,
            })
        }

        fn sub(self, o: Zd) -> Option<Zd> {
            Some(Zd {
                a: self.a.checked_sub(o.a)?,
                b: self.b.checked_sub(o.b)?,
            })
        }

        fn scale(self, k: i128) -> Option<Zd> {
            Some(Zd {
                a: self.a.checked_mul(k)?,
                b: self.b.checked_mul(k)?,
            })
        }

        fn mul(self, o: Zd, d: i128) -> Option<Zd> {
            let a = self
                .a
                .checked_mul(o.a)?
                .checked_add(self.b.checked_mul(o.b)?.checked_mul(d)?)?;
            let b = self
                .a
                .checked_mul(o.b)?
                .checked_add(self.b.checked_mul(o.a)?)?;
            Some(Zd { a, b })
        }

        fn sign(self, d: i128) -> Option<Ordering> {
            let (sa, sb) = (self.a.cmp(&0), self.b.cmp(&0));
            if sb == Ordering::Equal || sa == sb {
                return Some(if sa == Ordering::Equal { sb } else { sa });
            }
            if sa == Ordering::Equal {
                return Some(sb);
            }
            // opposite signs: compare a^2 with d b^2
            let a2 = self.a.checked_mul(self.a)?;
            let b2 = self.b.checked_mul(self.b)?.checked_mul(d)?;
            Some(if sa == Ordering::Greater {
                a2.cmp(&b2)
            } else {
                b2.cmp(&a2)
            })
        }
    }

    fn lcm_of_denominators<'a>(values: impl Iterator<Item = &'a FieldScalar>) -> Option<i128> {
        let mut l = BigInt::from(1);
        for v in values {
            l = l.lcm(v.rat().denom()).lcm(v.irr().denom());
        }
        l.to_i128()
    }

    fn scaled(v: &FieldScalar, l: i128) -> Option<Zd> {
        let lq = BigRational::from_integer(l.into());
        Some(Zd {
            a: (v.rat() * &lq).to_integer().to_i128()?,
            b: (v.irr() * &lq).to_integer().to_i128()?,
        })
    }

    pub(super) fn theta(q: &FieldMatrix, x: &[FieldScalar], bounds: &[i64]) -> Option<ThetaValue> {
        let g = x.len();
        let d = i128::from(q.discriminant());
        let l = lcm_of_denominators(q.entries().iter().chain(x))?;
        let qn: Vec<Zd> = q
            .entries()
            .iter()
            .map(|v| scaled(v, l))
            .collect::<Option<_>>()?;
        let xn: Vec<Zd> = x.iter().map(|v| scaled(v, l)).collect::<Option<_>>()?;
        // w = Qn xn and xQx = xn^T Qn xn
        let mut w = vec![Zd::ZERO; g];
        for i in 0..g {
            for j in 0..g {
                w[i] = w[i].add(qn[i * g + j].mul(xn[j], d)?)?;
            }
        }
        let mut xqx = Zd::ZERO;
        for i in 0..g {
            xqx = xqx.add(xn[i].mul(w[i], d)?)?;
        }
        // Q(lambda, lambda) <= 4 Q(x, x)  <=>  l^2 lambda^T Qn lambda <= 4 xQx
        let rhs = xqx.scale(4)?;
        let l2 = l.checked_mul(l)?;
        let mut best: Option<(Zd, Vec<i64>)> = None;
        let mut lambda: Vec<i64> = bounds.iter().map(|b| -b).collect();
        loop {
            let mut quad = Zd::ZERO;
            let mut lin = Zd::ZERO;
            for i in 0..g {
                let li = i128::from(lambda[i]);
                lin = lin.add(w[i].scale(li)?)?;
                for j in 0..g {
                    quad =
                        quad.add(qn[i * g + j].scale(li.checked_mul(i128::from(lambda[j]))?)?)?;
                }
            }
            if quad.scale(l2)?.sub(rhs)?.sign(d)? != Ordering::Greater {
                // 2 l^2 (Q(lambda, x) - Q(lambda, lambda) / 2) = 2 lin - l quad
                let val = lin.scale(2)?.sub(quad.scale(l)?)?;
                let better = match &best {
                    None => true,
                    Some((b, _)) => val.sub(*b)?.sign(d)? == Ordering::Greater,
                };
                if better {
                    best = Some((val, lambda.clone()));
                }
            }
            if !next_in_box(&mut lambda, bounds) {
                break;
            }
        }
        let (val, argmax) = best?;
        let den = BigRational::new(1.into(), BigInt::from(2) * BigInt::from(l2));
        let value = FieldScalar::new(
            BigRational::from_integer(val.a.into()) * &den,
            BigRational::from_integer(val.b.into()) * &den,
            q.discriminant(),
        )
        .ok()?;
        Some(ThetaValue { value, argmax })
    }
}

fn check_form_any(q: &FieldMatrix) -> Result<usize> {
    let g = q.require_square()?;
    if !q.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if !is_positive_definite(q)? {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(g)
}

/// Upper limit for [`graphs_isomorphic`].
pub const ISOMORPHISM_MAX_VERTICES: usize = 8;

/// Metric graph isomorphism by trying every vertex bijection.
pub fn graphs_isomorphic(a: &MetricGraph, b: &MetricGraph) -> Result<bool> {
    let n = a.vertex_count();
    if n > ISOMORPHISM_MAX_VERTICES || b.vertex_count() > ISOMORPHISM_MAX_VERTICES {
        return Err(Error::TooLarge(n.max(b.vertex_count())));
    }
    if n != b.vertex_count() || a.edges().len() != b.edges().len() {
        return Ok(false);
    }
    let d = a.discriminant().max(b.discriminant());
    let key = |e: &Edge, p: &[usize]| -> Result<(usize, usize, BigRational, BigRational)> {
        let (x, y) = (p[e.u], p[e.v]);
        let len = e.len.lift(d)?;
        Ok((x.min(y), x.max(y), len.rat().clone(), len.irr().clone()))
    };
    let identity: Vec<usize> = (0..n).collect();
    let mut target = b
        .edges()
        .iter()
        .map(|e| key(e, &identity))
        .collect::<Result<Vec<_>>>()?;
    target.sort();
    for perm in permutations(n) {
        let mut mapped = a
            .edges()
            .iter()
            .map(|e| key(e, &perm))
            .collect::<Result<Vec<_>>>()?;
        mapped.sort();
        if mapped == target {
            return Ok(true);
        }
    }
    Ok(false)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(rows: &[Vec<(i64, i64)>]) -> FieldMatrix {
        FieldMatrix::from_rational_rows(0, rows).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<FieldScalar> {
        v.iter().map(|&k| FieldScalar::from_int_in(k, 0)).collect()
    }

    fn q(n: i64) -> FieldScalar {
        FieldScalar::from_int_in(n, 0)
    }

    #[test]
    fn pair_order() {
        assert_eq!(selling_pairs(2), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(
            selling_pairs(3),
            vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        );
    }

    #[test]
    fn identity_reduction() {
        let s = selling_reduce(&FieldMatrix::identity(2, 0)).unwrap();
        assert_eq!(s.params, ints(&[1, 1, 0]));
        let s = selling_reduce(&FieldMatrix::identity(3, 0)).unwrap();
        assert_eq!(s.params, ints(&[1, 1, 1, 0, 0, 0]));
    }

    #[test]
    fn reduction_reconstructs() {
        let m = form(&[vec![(2, 1), (1, 1)], vec![(1, 1), (2, 1)]]);
        let s = selling_reduce(&m).unwrap();
        assert!(s.params.iter().all(|p| !p.is_negative()));
        assert_eq!(s.reconstruct().unwrap(), m.congruence(&s.u).unwrap());
        let m = form(&[
            vec![(5, 1), (2, 1), (-1, 1)],
            vec![(2, 1), (4, 1), (1, 1)],
            vec![(-1, 1), (1, 1), (3, 1)],
        ]);
        let s = selling_reduce(&m).unwrap();
        assert!(s.params.iter().all(|p| !p.is_negative()));
        assert_eq!(s.reconstruct().unwrap(), m.congruence(&s.u).unwrap());
        assert!(s.u.is_unimodular());
    }

    #[test]
    fn skeleton_examples() {
        let sk = skeleton(&FieldMatrix::identity(2, 0)).unwrap();
        assert!(sk.degenerate);
        assert_eq!(sk.graph.vertex_count(), 1);
        assert_eq!(sk.graph.edges().len(), 2);

        let m = form(&[vec![(2, 1), (1, 1)], vec![(1, 1), (2, 1)]]);
        let sk = skeleton(&m).unwrap();
        assert!(!sk.degenerate);
        assert_eq!(sk.graph.genus().unwrap(), 2);
        assert!(sk.graph.is_m_edge_connected(3).unwrap());
        let mut lens: Vec<_> = sk.graph.edges().iter().map(|e| e.len.clone()).collect();
        lens.sort_by(|a, b| a.cmp_exact(b).unwrap());
        assert_eq!(lens, ints(&[1, 1, 1]));

        // unit K4 has Gram [[3,-1,-1],[-1,3,-1],[-1,-1,3]] up to basis
        let k4 = form(&[
            vec![(3, 1), (-1, 1), (-1, 1)],
            vec![(-1, 1), (3, 1), (-1, 1)],
            vec![(-1, 1), (-1, 1), (3, 1)],
        ]);
        let sk = skeleton(&k4).unwrap();
        assert_eq!(sk.graph.vertex_count(), 4);
        assert!(sk.graph.edges().iter().all(|e| e.len == q(1)));
        assert_eq!(sk.graph.jacobian_gram().unwrap().det().unwrap(), q(16));
    }

    #[test]
    fn theta_examples() {
        let id = FieldMatrix::identity(2, 0);
        assert_eq!(theta_value(&id, &ints(&[0, 0])).unwrap().value, q(0));
        // x = (1/2, 0): lambda in {0, e1} tie at 0
        let half = FieldScalar::rational(BigRational::new(1.into(), 2.into()));
        let t = theta_value(&id, &[half.clone(), q(0)]).unwrap();
        assert_eq!(t.value, q(0));
        // x = e1: Theta = 1/2 at lambda = e1
        let t = theta_value(&id, &ints(&[1, 0])).unwrap();
        assert_eq!(t.value, half);
        assert_eq!(t.argmax, vec![1, 0]);
    }

    #[test]
    fn huge_denominators_fall_back() {
        // l^2 overflows i128, forcing the arbitrary-precision search
        let big = BigInt::from(10).pow(25);
        let x1 = FieldScalar::rational(BigRational::new(&big + 1, big.clone()));
        let t = theta_value(&FieldMatrix::identity(2, 0), &[x1, q(0)]).unwrap();
        assert_eq!(t.argmax, vec![1, 0]);
        assert_eq!(
            t.value,
            FieldScalar::rational(BigRational::new(&big + 2, big * 2))
        );
    }

    #[test]
    fn isomorphism_examples() {
        let l = |n| q(n);
        let a = MetricGraph::new(
            2,
            vec![
                Edge {
                    u: 0,
                    v: 1,
                    len: l(1),
                },
                Edge {
                    u: 0,
                    v: 1,
                    len: l(2),
                },
                Edge {
                    u: 1,
                    v: 0,
                    len: l(3),
                },
            ],
        )
        .unwrap();
        let b = MetricGraph::new(
            2,
            vec![
                Edge {
                    u: 1,
                    v: 0,
                    len: l(3),
                },
                Edge {
                    u: 0,
                    v: 1,
                    len: l(1),
                },
                Edge {
                    u: 1,
                    v: 0,
                    len: l(2),
                },
            ],
        )
        .unwrap();
        assert!(graphs_isomorphic(&a, &b).unwrap());
        let c = MetricGraph::new(
            2,
            vec![
                Edge {
                    u: 1,
                    v: 0,
                    len: l(3),
                },
                Edge {
                    u: 0,
                    v: 1,
                    len: l(1),
                },
                Edge {
                    u: 1,
                    v: 0,
                    len: l(1),
                },
            ],
        )
        .unwrap();
        assert!(!graphs_isomorphic(&a, &c).unwrap());
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4)[1], vec![0, 1, 3, 2]);
    }
}
