//! Matrices over `Q(sqrt(D))`.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::FieldScalar;
use crate::matrix::IntMatrix;

/// Row-major matrix whose entries share one discriminant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    d: u64,
    entries: Vec<FieldScalar>,
}

impl FieldMatrix {
    pub fn new(rows: usize, cols: usize, d: u64, entries: Vec<FieldScalar>) -> Result<Self> {
        crate::field::check_discriminant(d)?;
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let entries = entries
            .into_iter()
            .map(|e| e.lift(d))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            rows,
            cols,
            d,
            entries,
        })
    }

    pub fn from_rows(d: u64, rows: Vec<Vec<FieldScalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Self::new(r, c, d, rows.into_iter().flatten().collect())
    }

    /// Rational matrix from `(numerator, denominator)` pairs.
    pub fn from_rational_rows(d: u64, rows: &[Vec<(i64, i64)>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&(n, m)| {
                        FieldScalar::rational_in(BigRational::new(n.into(), m.into()), d)
                    })
                    .collect()
            })
            .collect();
        Self::from_rows(d, rows)
    }

    pub fn from_int(m: &IntMatrix, d: u64) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            d,
            entries: m
                .entries()
                .iter()
                .map(|e| FieldScalar::from_bigint_in(e, d))
                .collect(),
        }
    }

    pub fn identity(n: usize, d: u64) -> Self {
        Self::from_int(&IntMatrix::identity(n), d)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn discriminant(&self) -> u64 {
        self.d
    }

    pub fn entries(&self) -> &[FieldScalar] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldScalar>> {
        (0..self.rows)
            .map(|i| self.entries[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// True when every entry has zero irrational part.
    pub fn is_rational(&self) -> bool {
        self.entries.iter().all(FieldScalar::is_rational)
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self[(i, j)].clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            d: self.d,
            entries,
        }
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.d != rhs.d {
            return Err(Error::MixedDiscriminant(self.d, rhs.d));
        }
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut entries = vec![FieldScalar::zero_in(self.d); self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let slot = &mut entries[i * rhs.cols + j];
                    *slot = &*slot + &(a * &rhs[(k, j)]);
                }
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: rhs.cols,
            d: self.d,
            entries,
        })
    }

    pub fn mul_int(&self, rhs: &IntMatrix) -> Result<Self> {
        self.checked_mul(&Self::from_int(rhs, self.d))
    }

    pub fn int_mul(lhs: &IntMatrix, rhs: &Self) -> Result<Self> {
        Self::from_int(lhs, rhs.d).checked_mul(rhs)
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        if self.d != rhs.d {
            return Err(Error::MixedDiscriminant(self.d, rhs.d));
        }
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            d: self.d,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, s: &FieldScalar) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.checked_mul(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            d: self.d,
            entries,
        })
    }

    pub fn scale_rational(&self, q: &BigRational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            d: self.d,
            entries: self.entries.iter().map(|e| e.scale(q)).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Determinant by Gaussian elimination over the field.
    pub fn det(&self) -> Result<FieldScalar> {
        let n = self.require_square()?;
        let mut a = self.to_rows();
        let mut det = FieldScalar::one_in(self.d);
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
                return Ok(FieldScalar::zero_in(self.d));
            };
            if p != k {
                a.swap(p, k);
                det = -&det;
            }
            det = &det * &a[k][k];
            let inv = a[k][k].inv()?;
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = &a[i][k] * &inv;
                for j in k..n {
                    let v = &a[i][j] - &(&f * &a[k][j]);
                    a[i][j] = v;
                }
            }
        }
        Ok(det)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let entries = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self[(i, j)].clone())
            .collect();
        Self {
            rows: rows.len(),
            cols: cols.len(),
            d: self.d,
            entries,
        }
    }

    /// Leading principal minors `det(Q[0..k, 0..k])` for `k = 1..=n`.
    pub fn leading_minors(&self) -> Result<Vec<FieldScalar>> {
        let n = self.require_square()?;
        (1..=n)
            .map(|k| {
                let idx: Vec<usize> = (0..k).collect();
                self.submatrix(&idx, &idx).det()
            })
            .collect()
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.require_square()?;
        let mut a = self.to_rows();
        let mut inv = Self::identity(n, self.d).to_rows();
        for k in 0..n {
            let p = (k..n)
                .find(|&r| !a[r][k].is_zero())
                .ok_or(Error::SingularMatrix)?;
            a.swap(p, k);
            inv.swap(p, k);
            let piv = a[k][k].inv()?;
            for j in 0..n {
                a[k][j] = &a[k][j] * &piv;
                inv[k][j] = &inv[k][j] * &piv;
            }
            for i in 0..n {
                if i == k || a[i][k].is_zero() {
                    continue;
                }
                let f = a[i][k].clone();
                for j in 0..n {
                    let v = &a[i][j] - &(&f * &a[k][j]);
                    a[i][j] = v;
                    let w = &inv[i][j] - &(&f * &inv[k][j]);
                    inv[i][j] = w;
                }
            }
        }
        Self::from_rows(self.d, inv)
    }

    /// Bilinear value `u^T Q v` for integer vectors.
    pub fn bilinear_int(&self, u: &[i64], v: &[i64]) -> FieldScalar {
        let mut acc = FieldScalar::zero_in(self.d);
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for (j, &vj) in v.iter().enumerate() {
                if vj == 0 {
                    continue;
                }
                let c = BigRational::from_integer((ui * vj).into());
                acc = &acc + &self[(i, j)].scale(&c);
            }
        }
        acc
    }

    /// Bilinear value `u^T Q v` for field vectors.
    pub fn bilinear(&self, u: &[FieldScalar], v: &[FieldScalar]) -> Result<FieldScalar> {
        let mut acc = FieldScalar::zero_in(self.d);
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                let t = ui.checked_mul(&self[(i, j)])?.checked_mul(vj)?;
                acc = acc.checked_add(&t)?;
            }
        }
        Ok(acc)
    }

    /// Congruence `W^T Q W` by an integer matrix.
    pub fn congruence(&self, w: &IntMatrix) -> Result<Self> {
        Self::int_mul(&w.transpose(), &self.mul_int(w)?)
    }
}

/// Exact positive-definiteness test by leading principal minors.
pub fn is_positive_definite(q: &FieldMatrix) -> Result<bool> {
    q.require_square()?;
    if !q.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(q.leading_minors()?.iter().all(FieldScalar::is_positive))
}

impl std::ops::Index<(usize, usize)> for FieldMatrix {
    type Output = FieldScalar;
    fn index(&self, (i, j): (usize, usize)) -> &FieldScalar {
        &self.entries[i * self.cols + j]
    }
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(ToString::to_string).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl FieldMatrix {
    pub fn is_zero(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.rat().is_zero() && e.irr().is_zero())
    }
}
