//! Smith and Hermite normal forms over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::abelian::AbelianType;
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// `U * A * V = S` with `U`, `V` unimodular and `S` diagonal, `s_1 | s_2 | ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub s: IntMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        self.s.diagonal()
    }
}

/// Smith normal form with transforms. Total on any integer matrix.
pub fn snf(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.rows(), a.cols());
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    'outer: for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block, first in row-major order
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if s[(i, j)].is_zero() {
                        continue;
                    }
                    if pivot.is_none_or(|(pi, pj)| s[(i, j)].abs() < s[(pi, pj)].abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                break 'outer;
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let p = s[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..m {
                let q = s[(i, t)].div_floor(&p);
                if !q.is_zero() {
                    s.add_row_multiple(i, t, &-&q);
                    u.add_row_multiple(i, t, &-&q);
                }
                dirty |= !s[(i, t)].is_zero();
            }
            for j in t + 1..n {
                let q = s[(t, j)].div_floor(&p);
                if !q.is_zero() {
                    s.add_col_multiple(j, t, &-&q);
                    v.add_col_multiple(j, t, &-&q);
                }
                dirty |= !s[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !s[(i, j)].is_multiple_of(&p)));
            if let Some(i) = offender {
                s.add_row_multiple(t, i, &BigInt::from(1));
                u.add_row_multiple(t, i, &BigInt::from(1));
                continue;
            }
            break;
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfResult { u, v, s }
}

/// Column-style Hermite normal form of a nonsingular square matrix.
///
/// The result `H` is upper triangular with positive diagonal, every entry to
/// the right of the diagonal in row `i` lies in `[0, H[i][i])`, and
/// `H * Z^g = A * Z^g`.
pub fn hnf(a: &IntMatrix) -> Result<IntMatrix> {
    let g = a.require_square()?;
    if a.det()?.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let mut h = a.clone();
    for i in (0..g).rev() {
        loop {
            let nonzero: Vec<usize> = (0..=i).filter(|&c| !h[(i, c)].is_zero()).collect();
            if nonzero.len() <= 1 && (nonzero.is_empty() || nonzero[0] == i) {
                break;
            }
            let p = *nonzero
                .iter()
                .min_by(|&&x, &&y| h[(i, x)].abs().cmp(&h[(i, y)].abs()).then(x.cmp(&y)))
                .expect("nonempty");
            h.swap_cols(p, i);
            let piv = h[(i, i)].clone();
            for c in 0..i {
                let q = h[(i, c)].div_floor(&piv);
                h.add_col_multiple(c, i, &-q);
            }
        }
        if h[(i, i)].is_zero() {
            return Err(Error::SingularMatrix);
        }
        if h[(i, i)].is_negative() {
            h.negate_col(i);
        }
        let piv = h[(i, i)].clone();
        for c in i + 1..g {
            let q = h[(i, c)].div_floor(&piv);
            h.add_col_multiple(c, i, &-q);
        }
    }
    Ok(h)
}

/// Invariant factors of `Z^g / A Z^g`, padded with leading ones to length `g`.
pub fn cokernel_invariants(a: &IntMatrix) -> Result<AbelianType> {
    let g = a.require_square()?;
    if a.det()?.is_zero() {
        return Err(Error::InfiniteCokernel);
    }
    let diag = snf(a).diagonal();
    let mut factors = Vec::with_capacity(g);
    for d in diag {
        factors.push(
            d.to_u64()
                .ok_or_else(|| Error::InvalidType(format!("invariant factor {d} exceeds u64")))?,
        );
    }
    AbelianType::new(factors)
}

/// Invariant factors of a small square matrix with machine-size entries.
/// Used on the hot path of subgroup enumeration.
pub(crate) fn snf_diagonal_small(mut a: Vec<Vec<i128>>) -> Vec<i128> {
    let n = a.len();
    for t in 0..n {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, &x) in row.iter().enumerate().skip(t) {
                    if x != 0 && pivot.is_none_or(|(pi, pj)| x.abs() < a[pi][pj].abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return (0..n).map(|i| a[i][i].abs()).collect();
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..n {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    for j in t..n {
                        a[i][j] -= q * a[t][j];
                    }
                }
                dirty |= a[i][t] != 0;
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                dirty |= a[t][j] != 0;
            }
            if dirty {
                continue;
            }
            let offender = (t + 1..n).find(|&i| (t + 1..n).any(|j| a[i][j] % p != 0));
            if let Some(i) = offender {
                for j in t..n {
                    a[t][j] += a[i][j];
                }
                continue;
            }
            break;
        }
    }
    (0..n).map(|i| a[i][i].abs()).collect()
}
