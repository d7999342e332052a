// SPDX-License-Identifier: MIT OR Apache-2.0
//! Matrices of truncated Laurent series sharing one precision window.
//!
//! A [`SeriesMatrix`] is stored as a truncated series of constant matrices
//! `Σ_{ord ≤ e < prec} M_e x^e`, so every entry automatically shares the
//! window `[ord, prec)`. Building one from entries of different windows takes
//! the minimal order and the minimal precision.

use std::fmt;

use super::cyclotomic::{rat_int, CycNum, Field, FieldExt};
use super::linalg::Mat;
use super::series::{TruncSeries, Var};
use super::{check_window, AlgebraError};

/// Matrix-valued truncated Laurent series.
#[derive(Clone)]
pub struct SeriesMatrix {
    field: Field,
    var: Var,
    rows: usize,
    cols: usize,
    ord: i64,
    prec: i64,
    coeffs: Vec<Mat>,
}

impl SeriesMatrix {
    /// Builds a matrix series from the coefficient matrices of `x^ord, x^{ord+1}, …`.
    ///
    /// Missing trailing coefficients are zero.
    pub fn new(
        field: &Field,
        var: Var,
        rows: usize,
        cols: usize,
        ord: i64,
        prec: i64,
        coeffs: Vec<Mat>,
    ) -> Result<Self, AlgebraError> {
        check_window(ord, prec)?;
        let len = (prec - ord) as usize;
        if coeffs.len() > len {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{} coefficient matrices do not fit the window [{ord}, {prec})",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|m| m.rows() != rows || m.cols() != cols) {
            return Err(AlgebraError::DimensionMismatch(format!(
                "coefficient matrices must all be {rows}×{cols}"
            )));
        }
        let mut coeffs = coeffs;
        coeffs.resize(len, Mat::zeros(field, rows, cols));
        Ok(SeriesMatrix { field: field.clone(), var, rows, cols, ord, prec, coeffs })
    }

    /// The zero matrix on `[ord, prec)`.
    pub fn zero(
        field: &Field,
        var: Var,
        rows: usize,
        cols: usize,
        ord: i64,
        prec: i64,
    ) -> Result<Self, AlgebraError> {
        Self::new(field, var, rows, cols, ord, prec, Vec::new())
    }

    /// The constant matrix `m` known up to `prec`.
    pub fn constant(m: &Mat, var: Var, prec: i64) -> Result<Self, AlgebraError> {
        Self::new(m.field(), var, m.rows(), m.cols(), 0, prec, vec![m.clone()])
    }

    /// The monomial `m·x^e` known up to `prec`.
    pub fn monomial(m: &Mat, var: Var, e: i64, prec: i64) -> Result<Self, AlgebraError> {
        Self::new(m.field(), var, m.rows(), m.cols(), e, prec, vec![m.clone()])
    }

    /// The `n × n` identity known up to `prec`.
    pub fn identity(field: &Field, var: Var, n: usize, prec: i64) -> Result<Self, AlgebraError> {
        Self::constant(&Mat::identity(field, n), var, prec)
    }

    /// Builds a matrix from its entries; the window is `[min ord, min prec)`.
    pub fn from_entries(entries: &[Vec<TruncSeries>]) -> Result<Self, AlgebraError> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        let first = entries
            .first()
            .and_then(|r| r.first())
            .ok_or_else(|| AlgebraError::DimensionMismatch("empty matrix".into()))?;
        let field = first.field().clone();
        let var = first.var();
        let mut ord = i64::MAX;
        let mut prec = i64::MAX;
        for row in entries {
            if row.len() != cols {
                return Err(AlgebraError::DimensionMismatch("ragged rows".into()));
            }
            for s in row {
                if s.var() != var {
                    return Err(AlgebraError::VariableMismatch);
                }
                if s.field().order() != field.order() {
                    return Err(AlgebraError::OrderMismatch(field.order(), s.field().order()));
                }
                ord = ord.min(s.ord());
                prec = prec.min(s.prec());
            }
        }
        check_window(ord, prec)?;
        let coeffs = (ord..prec)
            .map(|e| Mat::from_fn(&field, rows, cols, |i, j| entries[i][j].coeff(e).unwrap()))
            .collect();
        Self::new(&field, var, rows, cols, ord, prec, coeffs)
    }

    /// The coefficient field.
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// The series variable.
    pub fn var(&self) -> Var {
        self.var
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Lowest stored exponent.
    pub fn ord(&self) -> i64 {
        self.ord
    }

    /// First unknown exponent.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Stored coefficient matrices for exponents `ord .. prec`.
    pub fn coeff_mats(&self) -> &[Mat] {
        &self.coeffs
    }

    /// Coefficient matrix of `x^e`: zero below `ord`, `None` when unknown.
    pub fn coeff(&self, e: i64) -> Option<Mat> {
        if e >= self.prec {
            None
        } else if e < self.ord {
            Some(Mat::zeros(&self.field, self.rows, self.cols))
        } else {
            Some(self.coeffs[(e - self.ord) as usize].clone())
        }
    }

    /// Entry `(i, j)` as a truncated series on the common window.
    pub fn entry(&self, i: usize, j: usize) -> TruncSeries {
        let coeffs = self.coeffs.iter().map(|m| m.get(i, j).clone()).collect();
        TruncSeries::new(&self.field, self.var, self.ord, self.prec, coeffs)
            .expect("window is nonempty")
    }

    /// Lowest exponent with a nonzero known coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.iter().position(|m| !m.is_zero()).map(|i| self.ord + i as i64)
    }

    /// Whether all known coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    /// Re-windows to `[ord, prec)` with `prec ≤ self.prec`.
    fn rewindow(&self, ord: i64, prec: i64) -> SeriesMatrix {
        debug_assert!(prec <= self.prec && ord < prec);
        let coeffs = (ord..prec).map(|e| self.coeff(e).unwrap()).collect();
        SeriesMatrix { coeffs, ord, prec, ..self.clone_shape() }
    }

    fn clone_shape(&self) -> SeriesMatrix {
        SeriesMatrix {
            field: self.field.clone(),
            var: self.var,
            rows: self.rows,
            cols: self.cols,
            ord: self.ord,
            prec: self.prec,
            coeffs: Vec::new(),
        }
    }

    /// Raises `ord` past known-zero coefficient matrices.
    pub fn trim_ord(&self) -> SeriesMatrix {
        let new_ord = self.valuation().unwrap_or(self.prec - 1);
        self.rewindow(new_ord, self.prec)
    }

    /// Lowers `ord` by padding with exact zeros.
    pub fn extend_ord(&self, ord: i64) -> SeriesMatrix {
        if ord >= self.ord {
            return self.clone();
        }
        self.rewindow(ord, self.prec)
    }

    /// Forgets coefficients at exponents `≥ prec`.
    pub fn truncate(&self, prec: i64) -> Result<SeriesMatrix, AlgebraError> {
        if prec >= self.prec {
            return Ok(self.clone());
        }
        check_window(self.ord, prec)?;
        Ok(self.rewindow(self.ord, prec))
    }

    /// Declares the stored coefficients exact up to a larger precision.
    ///
    /// Only valid for objects known to be polynomial (or Laurent polynomial)
    /// with all nonzero terms already stored; callers use it for exact
    /// constructions such as companion matrices and explicit gauges.
    pub fn with_exact_prec(&self, prec: i64) -> SeriesMatrix {
        if prec <= self.prec {
            return self.clone();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize((prec - self.ord) as usize, Mat::zeros(&self.field, self.rows, self.cols));
        SeriesMatrix { coeffs, prec, ..self.clone_shape() }
    }

    /// Multiplies by `x^k` exactly.
    pub fn shift(&self, k: i64) -> SeriesMatrix {
        SeriesMatrix {
            ord: self.ord + k,
            prec: self.prec + k,
            coeffs: self.coeffs.clone(),
            ..self.clone_shape()
        }
    }

    /// Applies a function to every coefficient matrix (shape may change).
    pub fn map_coeffs(&self, f: impl Fn(&Mat) -> Mat) -> SeriesMatrix {
        let coeffs: Vec<Mat> = self.coeffs.iter().map(f).collect();
        let (rows, cols) = coeffs.first().map_or((self.rows, self.cols), |m| (m.rows(), m.cols()));
        SeriesMatrix { coeffs, rows, cols, ..self.clone_shape() }
    }

    /// Multiplies every entry by a field element.
    pub fn scale(&self, c: &CycNum) -> SeriesMatrix {
        self.map_coeffs(|m| m.scale(c))
    }

    /// Negation.
    pub fn neg(&self) -> SeriesMatrix {
        self.map_coeffs(Mat::neg)
    }

    /// Transpose.
    pub fn transpose(&self) -> SeriesMatrix {
        self.map_coeffs(Mat::transpose)
    }

    /// Left multiplication by a constant matrix.
    pub fn left_mul_const(&self, m: &Mat) -> SeriesMatrix {
        self.map_coeffs(|c| m.mul(c))
    }

    /// Right multiplication by a constant matrix.
    pub fn right_mul_const(&self, m: &Mat) -> SeriesMatrix {
        self.map_coeffs(|c| c.mul(m))
    }

    fn check_compatible(&self, other: &SeriesMatrix) -> Result<(), AlgebraError> {
        if self.var != other.var {
            return Err(AlgebraError::VariableMismatch);
        }
        if self.field.order() != other.field.order() {
            return Err(AlgebraError::OrderMismatch(self.field.order(), other.field.order()));
        }
        Ok(())
    }

    fn combine(
        &self,
        other: &SeriesMatrix,
        op: impl Fn(&Mat, &Mat) -> Mat,
    ) -> Result<SeriesMatrix, AlgebraError> {
        self.check_compatible(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{}×{} vs {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ord = self.ord.min(other.ord);
        let prec = self.prec.min(other.prec);
        check_window(ord, prec)?;
        let coeffs =
            (ord..prec).map(|e| op(&self.coeff(e).unwrap(), &other.coeff(e).unwrap())).collect();
        Ok(SeriesMatrix { coeffs, ord, prec, ..self.clone_shape() })
    }

    /// Sum on the window `[min ord, min prec)`.
    pub fn add(&self, other: &SeriesMatrix) -> Result<SeriesMatrix, AlgebraError> {
        self.combine(other, Mat::add)
    }

    /// Difference on the window `[min ord, min prec)`.
    pub fn sub(&self, other: &SeriesMatrix) -> Result<SeriesMatrix, AlgebraError> {
        self.combine(other, Mat::sub)
    }

    /// Product: `ord = a.ord + b.ord`, `prec = min(a.prec + b.ord, b.prec + a.ord)`.
    pub fn mul(&self, other: &SeriesMatrix) -> Result<SeriesMatrix, AlgebraError> {
        self.check_compatible(other)?;
        if self.cols != other.rows {
            return Err(AlgebraError::DimensionMismatch(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ord = self.ord + other.ord;
        let prec = (self.prec + other.ord).min(other.prec + self.ord);
        check_window(ord, prec)?;
        let len = (prec - ord) as usize;
        let mut coeffs = vec![Mat::zeros(&self.field, self.rows, other.cols); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        Ok(SeriesMatrix { coeffs, ord, prec, cols: other.cols, ..self.clone_shape() })
    }

    /// Commutator `self·other − other·self`.
    pub fn commutator(&self, other: &SeriesMatrix) -> Result<SeriesMatrix, AlgebraError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Non-negative power of a square matrix series.
    pub fn pow(&self, e: usize) -> Result<SeriesMatrix, AlgebraError> {
        if e == 0 {
            return SeriesMatrix::identity(&self.field, self.var, self.rows, self.prec.max(1));
        }
        let mut out = self.clone();
        for _ in 1..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Inverse of a square matrix series whose coefficient at `ord` is invertible.
    ///
    /// For the window `[o, p)` the inverse has window `[-o, p - 2o)`.
    pub fn inverse(&self) -> Result<SeriesMatrix, AlgebraError> {
        if self.rows != self.cols {
            return Err(AlgebraError::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let lead_inv = self.coeffs[0].inverse()?;
        let n = self.coeffs.len();
        let mut out: Vec<Mat> = Vec::with_capacity(n);
        out.push(lead_inv.clone());
        for k in 1..n {
            let mut acc = Mat::zeros(&self.field, self.rows, self.cols);
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc = acc.add(&self.coeffs[j].mul(&out[k - j]));
                }
            }
            out.push(lead_inv.mul(&acc).neg());
        }
        SeriesMatrix::new(
            &self.field,
            self.var,
            self.rows,
            self.cols,
            -self.ord,
            self.prec - 2 * self.ord,
            out,
        )
    }

    /// Termwise derivative in the series variable; the window shifts down by one.
    pub fn derivative(&self) -> SeriesMatrix {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, m)| m.scale(&self.field.rational(rat_int(self.ord + i as i64))))
            .collect();
        SeriesMatrix { coeffs, ord: self.ord - 1, prec: self.prec - 1, ..self.clone_shape() }
    }

    /// Trace as a truncated series.
    pub fn trace(&self) -> TruncSeries {
        let coeffs = self.coeffs.iter().map(Mat::trace).collect();
        TruncSeries::new(&self.field, self.var, self.ord, self.prec, coeffs)
            .expect("window is nonempty")
    }

    /// Substitutes `x ↦ c·x` in every entry.
    pub fn substitute_scaled(&self, c: &CycNum) -> Result<SeriesMatrix, AlgebraError> {
        let mut power = c.pow(self.ord)?;
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for m in &self.coeffs {
            coeffs.push(m.scale(&power));
            power = &power * c;
        }
        Ok(SeriesMatrix { coeffs, ..self.clone_shape() })
    }

    /// Substitutes `z = w^r` in every entry.
    pub fn to_w(&self, r: usize) -> Result<SeriesMatrix, AlgebraError> {
        if self.var != Var::Z {
            return Err(AlgebraError::VariableMismatch);
        }
        let ri = r as i64;
        let ord = self.ord * ri;
        let prec = self.prec * ri;
        let mut coeffs = vec![Mat::zeros(&self.field, self.rows, self.cols); (prec - ord) as usize];
        for (i, m) in self.coeffs.iter().enumerate() {
            coeffs[i * r] = m.clone();
        }
        SeriesMatrix::new(&self.field, Var::W, self.rows, self.cols, ord, prec, coeffs)
    }

    /// Inverse of [`SeriesMatrix::to_w`]; every nonzero exponent must be divisible by `r`.
    pub fn from_w(&self, r: usize) -> Result<SeriesMatrix, AlgebraError> {
        if self.var != Var::W {
            return Err(AlgebraError::VariableMismatch);
        }
        let ri = r as i64;
        for (i, m) in self.coeffs.iter().enumerate() {
            let e = self.ord + i as i64;
            if !m.is_zero() && e.rem_euclid(ri) != 0 {
                return Err(AlgebraError::NotPullbackable { exponent: e, index: r });
            }
        }
        let ceil = |x: i64| x.div_euclid(ri) + i64::from(x.rem_euclid(ri) != 0);
        let ord = ceil(self.ord);
        let prec = ceil(self.prec);
        check_window(ord, prec)?;
        let coeffs = (ord..prec).map(|e| self.coeff(e * ri).unwrap()).collect();
        SeriesMatrix::new(&self.field, Var::Z, self.rows, self.cols, ord, prec, coeffs)
    }

    /// Whether both matrices agree on every exponent below `upto` that both know.
    pub fn agrees_below(&self, other: &SeriesMatrix, upto: i64) -> bool {
        if (self.rows, self.cols) != (other.rows, other.cols) || self.var != other.var {
            return false;
        }
        let top = upto.min(self.prec).min(other.prec);
        let low = self.ord.min(other.ord);
        (low..top).all(|e| self.coeff(e) == other.coeff(e))
    }

    /// Keeps only the entries selected by `keep(i, j)`, zeroing the rest.
    pub fn mask(&self, keep: impl Fn(usize, usize) -> bool) -> SeriesMatrix {
        let field = self.field.clone();
        self.map_coeffs(|m| {
            Mat::from_fn(&field, m.rows(), m.cols(), |i, j| {
                if keep(i, j) {
                    m.get(i, j).clone()
                } else {
                    field.zero()
                }
            })
        })
    }
}

impl PartialEq for SeriesMatrix {
    /// Same shape, variable and precision, with equal known coefficients.
    fn eq(&self, other: &Self) -> bool {
        self.prec == other.prec
            && self.field.order() == other.field.order()
            && self.agrees_below(other, self.prec)
    }
}

impl Eq for SeriesMatrix {}

impl fmt::Debug for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SeriesMatrix {}×{} in {} window [{}, {})", self.rows, self.cols, self.var, self.ord, self.prec)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                writeln!(f, "  ({i},{j}): {}", self.entry(i, j))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::cyclotomic::CycField;

    fn companion(f: &Field, r: usize, prec: i64) -> SeriesMatrix {
        let sub = Mat::from_fn(f, r, r, |i, j| if i == j + 1 { f.one() } else { f.zero() });
        let corner = Mat::from_fn(f, r, r, |i, j| if i == 0 && j == r - 1 { f.one() } else { f.zero() });
        SeriesMatrix::new(f, Var::Z, r, r, 0, prec, vec![sub, corner]).unwrap()
    }

    #[test]
    fn companion_power_is_z() {
        let f = CycField::new(1);
        for r in 2..=4 {
            let n = companion(&f, r, 10);
            let p = n.pow(r).unwrap();
            let z = SeriesMatrix::monomial(&Mat::identity(&f, r), Var::Z, 1, 10).unwrap();
            assert_eq!(p, z);
        }
    }

    #[test]
    fn inverse_is_two_sided() {
        let f = CycField::new(1);
        let p = SeriesMatrix::new(
            &f,
            Var::Z,
            2,
            2,
            0,
            5,
            vec![Mat::from_ints(&f, &[vec![1, 2], vec![0, 1]]), Mat::from_ints(&f, &[vec![3, 0], vec![1, 1]])],
        )
        .unwrap();
        let q = p.inverse().unwrap();
        let id = SeriesMatrix::identity(&f, Var::Z, 2, 5).unwrap();
        assert_eq!(p.mul(&q).unwrap(), id);
        assert_eq!(q.mul(&p).unwrap(), id);
    }

    #[test]
    fn entries_round_trip() {
        let f = CycField::new(1);
        let n = companion(&f, 3, 4);
        let entries: Vec<Vec<TruncSeries>> =
            (0..3).map(|i| (0..3).map(|j| n.entry(i, j)).collect()).collect();
        assert_eq!(SeriesMatrix::from_entries(&entries).unwrap(), n);
    }

    #[test]
    fn pullback_round_trip() {
        let f = CycField::new(1);
        let n = companion(&f, 2, 4);
        assert_eq!(n.to_w(2).unwrap().from_w(2).unwrap(), n);
    }
}
