// SPDX-License-Identifier: MIT OR Apache-2.0
//! Dense constant matrices over `Q(ζ_R)` and exact Gaussian elimination.
//!
//! Shape mismatches in the arithmetic helpers are programming errors and
//! panic; the fallible entry points ([`Mat::inverse`], [`Mat::solve`]) report
//! singularity through `Result`/`Option`.

use std::fmt;

use super::cyclotomic::{rat_int, CycNum, Field, FieldExt};
use super::AlgebraError;

/// Row-major dense matrix with entries in a cyclotomic field.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<CycNum>,
}

impl Mat {
    /// The `rows × cols` zero matrix.
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Mat {
        Mat { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    /// The `n × n` identity.
    pub fn identity(field: &Field, n: usize) -> Mat {
        Mat::from_fn(field, n, n, |i, j| if i == j { field.one() } else { field.zero() })
    }

    /// Builds a matrix entrywise.
    pub fn from_fn(
        field: &Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> CycNum,
    ) -> Mat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { field: field.clone(), rows, cols, data }
    }

    /// Builds a matrix from rows of integers.
    pub fn from_ints(field: &Field, rows: &[Vec<i64>]) -> Mat {
        let cols = rows.first().map_or(0, Vec::len);
        Mat::from_fn(field, rows.len(), cols, |i, j| field.int(rows[i][j]))
    }

    /// Diagonal matrix with the given entries.
    pub fn diag(field: &Field, entries: &[CycNum]) -> Mat {
        let n = entries.len();
        Mat::from_fn(field, n, n, |i, j| if i == j { entries[i].clone() } else { field.zero() })
    }

    /// The coefficient field.
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &CycNum {
        &self.data[i * self.cols + j]
    }

    /// Overwrites entry `(i, j)`.
    pub fn set(&mut self, i: usize, j: usize, v: CycNum) {
        self.data[i * self.cols + j] = v;
    }

    /// Row `i` as a vector.
    pub fn row(&self, i: usize) -> Vec<CycNum> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    /// Column `j` as a vector.
    pub fn col(&self, j: usize) -> Vec<CycNum> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(field: &Field, rows: usize, cols: &[Vec<CycNum>]) -> Mat {
        Mat::from_fn(field, rows, cols.len(), |i, j| cols[j][i].clone())
    }

    /// Whether every entry is zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(CycNum::is_zero)
    }

    /// Whether the matrix is square.
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn zip(&self, other: &Mat, op: impl Fn(&CycNum, &CycNum) -> CycNum) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix shape mismatch");
        Mat {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| op(a, b)).collect(),
        }
    }

    /// Entrywise sum. Panics on shape mismatch.
    pub fn add(&self, other: &Mat) -> Mat {
        self.zip(other, |a, b| a + b)
    }

    /// Entrywise difference. Panics on shape mismatch.
    pub fn sub(&self, other: &Mat) -> Mat {
        self.zip(other, |a, b| a - b)
    }

    /// Negation.
    pub fn neg(&self) -> Mat {
        self.map(|a| -a)
    }

    /// Multiplies every entry by `c`.
    pub fn scale(&self, c: &CycNum) -> Mat {
        self.map(|a| a * c)
    }

    /// Applies a function to every entry.
    pub fn map(&self, f: impl Fn(&CycNum) -> CycNum) -> Mat {
        Mat {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Matrix product. Panics if the inner dimensions differ.
    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Mat::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[CycNum]) -> Vec<CycNum> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc = &acc + &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    /// Commutator `self·other − other·self`.
    pub fn commutator(&self, other: &Mat) -> Mat {
        self.mul(other).sub(&other.mul(self))
    }

    /// Transpose.
    pub fn transpose(&self) -> Mat {
        Mat::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> CycNum {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).fold(self.field.zero(), |acc, i| &acc + self.get(i, i))
    }

    /// Non-negative integer power of a square matrix.
    pub fn pow(&self, e: usize) -> Mat {
        let mut out = Mat::identity(&self.field, self.rows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, row * m.cols + j);
                }
            }
            let inv = m.get(row, col).inv().expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for i in 0..m.rows {
                if i == row {
                    continue;
                }
                let factor = m.get(i, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m.get(i, j) - &(&factor * m.get(row, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    /// Rank over the coefficient field.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space `{x : self·x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<CycNum>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.field.zero(); self.cols];
                v[f] = self.field.one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f);
                }
                v
            })
            .collect()
    }

    /// Some solution of `self·x = rhs`, or `None` if the system is inconsistent.
    pub fn solve(&self, rhs: &[CycNum]) -> Option<Vec<CycNum>> {
        assert_eq!(rhs.len(), self.rows, "right-hand side length mismatch");
        let aug = Mat::from_fn(&self.field, self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs[i].clone()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self) -> Result<Mat, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let aug = Mat::from_fn(&self.field, n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                self.field.one()
            } else {
                self.field.zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(AlgebraError::SingularMatrix);
        }
        Ok(Mat::from_fn(&self.field, n, n, |i, j| r.get(i, n + j).clone()))
    }

    /// Characteristic polynomial `det(λ − self)`, lowest degree first, via
    /// the Faddeev–LeVerrier recursion.
    pub fn charpoly(&self) -> Vec<CycNum> {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let n = self.rows;
        let mut coeffs = vec![self.field.zero(); n + 1];
        coeffs[n] = self.field.one();
        let mut m = Mat::zeros(&self.field, n, n);
        let id = Mat::identity(&self.field, n);
        for k in 1..=n {
            m = self.mul(&m).add(&id.scale(&coeffs[n - k + 1]));
            let c = self.mul(&m).trace().scale(&(-rat_int(1) / rat_int(k as i64)));
            coeffs[n - k] = c;
        }
        coeffs
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::cyclotomic::CycField;

    #[test]
    fn inverse_and_solve() {
        let f = CycField::new(1);
        let a = Mat::from_ints(&f, &[vec![2, 1], vec![1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Mat::identity(&f, 2));
        let x = a.solve(&[f.int(3), f.int(2)]).unwrap();
        assert_eq!(x, vec![f.int(1), f.int(1)]);
        let s = Mat::from_ints(&f, &[vec![1, 2], vec![2, 4]]);
        assert_eq!(s.inverse().unwrap_err(), AlgebraError::SingularMatrix);
        assert!(s.solve(&[f.int(1), f.int(0)]).is_none());
    }

    #[test]
    fn nullspace_and_rank() {
        let f = CycField::new(1);
        let a = Mat::from_ints(&f, &[vec![1, 2, 3], vec![2, 4, 6]]);
        assert_eq!(a.rank(), 1);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(a.apply(&v).iter().all(CycNum::is_zero));
        }
    }

    #[test]
    fn charpoly_of_companion() {
        // Oracle: the companion of x^2 - 3x + 2 has that characteristic polynomial.
        let f = CycField::new(1);
        let a = Mat::from_ints(&f, &[vec![0, -2], vec![1, 3]]);
        assert_eq!(a.charpoly(), vec![f.int(2), f.int(-3), f.int(1)]);
    }

    #[test]
    fn vandermonde_character_orthogonality() {
        let f = CycField::new(3);
        let v = Mat::from_fn(&f, 3, 3, |j, k| f.zeta_pow((j * k) as i64));
        let w = Mat::from_fn(&f, 3, 3, |k, l| f.zeta_pow(-((k * l) as i64)).scale(&crate::algebra::rat(1, 3)));
        assert_eq!(v.mul(&w), Mat::identity(&f, 3));
    }
}
