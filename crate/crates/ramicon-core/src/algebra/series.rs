// SPDX-License-Identifier: MIT OR Apache-2.0
//! Truncated Laurent series in one variable with an explicit precision window.
//!
//! A [`TruncSeries`] knows its coefficients for exponents in `[ord, prec)`.
//! Exponents below `ord` are exact zeros, exponents at or above `prec` are
//! unknown. The lowest stored coefficient may itself be zero: the order is
//! only raised on request through [`TruncSeries::trim_ord`].
//!
//! Every operation propagates the pessimistic precision and refuses to build
//! an empty window, returning [`AlgebraError::PrecisionExhausted`] instead.

use std::fmt;

use super::cyclotomic::{render_rational, CycNum, Field, FieldExt};
use super::{check_window, AlgebraError};

/// The name of the series variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// The coordinate on the base disk.
    Z,
    /// The coordinate on the ramified cover, `w^r = z`.
    W,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::Z => "z",
            Var::W => "w",
        })
    }
}

/// Truncated Laurent series `Σ_{ord ≤ e < prec} c_e x^e + O(x^prec)`.
#[derive(Clone)]
pub struct TruncSeries {
    field: Field,
    var: Var,
    ord: i64,
    prec: i64,
    coeffs: Vec<CycNum>,
}

impl TruncSeries {
    /// Builds a series from the coefficients of exponents `ord, ord+1, …`.
    ///
    /// Missing trailing coefficients up to `prec` are zero. More coefficients
    /// than the window holds is an error.
    pub fn new(
        field: &Field,
        var: Var,
        ord: i64,
        prec: i64,
        coeffs: Vec<CycNum>,
    ) -> Result<Self, AlgebraError> {
        check_window(ord, prec)?;
        let len = (prec - ord) as usize;
        if coeffs.len() > len {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{} coefficients do not fit the window [{ord}, {prec})",
                coeffs.len()
            )));
        }
        for c in &coeffs {
            if c.field().order() != field.order() {
                return Err(AlgebraError::OrderMismatch(field.order(), c.field().order()));
            }
        }
        let mut coeffs = coeffs;
        coeffs.resize(len, field.zero());
        Ok(TruncSeries { field: field.clone(), var, ord, prec, coeffs })
    }

    /// The zero series on the window `[ord, prec)`.
    pub fn zero(field: &Field, var: Var, ord: i64, prec: i64) -> Result<Self, AlgebraError> {
        Self::new(field, var, ord, prec, Vec::new())
    }

    /// The monomial `c x^e`, known up to `prec`.
    pub fn monomial(
        field: &Field,
        var: Var,
        e: i64,
        c: CycNum,
        prec: i64,
    ) -> Result<Self, AlgebraError> {
        Self::new(field, var, e, prec, vec![c])
    }

    /// The constant `c`, known up to `prec`.
    pub fn constant(field: &Field, var: Var, c: CycNum, prec: i64) -> Result<Self, AlgebraError> {
        Self::monomial(field, var, 0, c, prec)
    }

    /// The coefficient field.
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// The series variable.
    pub fn var(&self) -> Var {
        self.var
    }

    /// Lowest stored exponent.
    pub fn ord(&self) -> i64 {
        self.ord
    }

    /// First unknown exponent.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Stored coefficients for exponents `ord .. prec`.
    pub fn coeffs(&self) -> &[CycNum] {
        &self.coeffs
    }

    /// Coefficient of `x^e`: exact zero below `ord`, `None` when unknown.
    pub fn coeff(&self, e: i64) -> Option<CycNum> {
        if e >= self.prec {
            None
        } else if e < self.ord {
            Some(self.field.zero())
        } else {
            Some(self.coeffs[(e - self.ord) as usize].clone())
        }
    }

    /// Lowest exponent with a nonzero known coefficient, `None` if all known
    /// coefficients vanish.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| self.ord + i as i64)
    }

    /// Whether every known coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    /// Raises `ord` to the valuation (or to `prec - 1` for a known-zero series).
    pub fn trim_ord(&self) -> TruncSeries {
        let new_ord = self.valuation().unwrap_or(self.prec - 1);
        self.with_window(new_ord, self.prec)
    }

    /// Re-windows the series to `[ord, prec)`.
    ///
    /// Lowering `ord` pads with exact zeros; raising it drops coefficients that
    /// must be zero (checked in debug builds). `prec` may only decrease.
    fn with_window(&self, ord: i64, prec: i64) -> TruncSeries {
        debug_assert!(prec <= self.prec && ord < prec);
        let coeffs = (ord..prec)
            .map(|e| {
                let c = self.coeff(e).expect("window inside known range");
                debug_assert!(e >= self.ord || c.is_zero());
                c
            })
            .collect();
        debug_assert!((self.ord..ord.min(self.prec)).all(|e| self.coeff(e).unwrap().is_zero()));
        TruncSeries { field: self.field.clone(), var: self.var, ord, prec, coeffs }
    }

    /// Lowers the stored order to `ord` by padding with exact zeros.
    pub fn extend_ord(&self, ord: i64) -> TruncSeries {
        if ord >= self.ord {
            return self.clone();
        }
        self.with_window(ord, self.prec)
    }

    /// Forgets coefficients at exponents `≥ prec`.
    pub fn truncate(&self, prec: i64) -> Result<TruncSeries, AlgebraError> {
        if prec >= self.prec {
            return Ok(self.clone());
        }
        check_window(self.ord, prec)?;
        Ok(self.with_window(self.ord, prec))
    }

    /// Multiplies by `x^k` exactly (window shifts by `k`).
    pub fn shift(&self, k: i64) -> TruncSeries {
        TruncSeries {
            field: self.field.clone(),
            var: self.var,
            ord: self.ord + k,
            prec: self.prec + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Multiplies every coefficient by a field element.
    pub fn scale(&self, c: &CycNum) -> TruncSeries {
        TruncSeries {
            field: self.field.clone(),
            var: self.var,
            ord: self.ord,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Substitutes `x ↦ c·x`, multiplying the coefficient of `x^e` by `c^e`.
    pub fn substitute_scaled(&self, c: &CycNum) -> Result<TruncSeries, AlgebraError> {
        let mut power = c.pow(self.ord)?;
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for x in &self.coeffs {
            coeffs.push(x * &power);
            power = &power * c;
        }
        Ok(TruncSeries { coeffs, ..self.clone() })
    }

    fn check_compatible(&self, other: &TruncSeries) -> Result<(), AlgebraError> {
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
        other: &TruncSeries,
        op: impl Fn(&CycNum, &CycNum) -> CycNum,
    ) -> Result<TruncSeries, AlgebraError> {
        self.check_compatible(other)?;
        let ord = self.ord.min(other.ord);
        let prec = self.prec.min(other.prec);
        check_window(ord, prec)?;
        let coeffs = (ord..prec)
            .map(|e| op(&self.coeff(e).unwrap(), &other.coeff(e).unwrap()))
            .collect();
        Ok(TruncSeries { field: self.field.clone(), var: self.var, ord, prec, coeffs })
    }

    /// Sum; the result window is `[min ord, min prec)`.
    pub fn add(&self, other: &TruncSeries) -> Result<TruncSeries, AlgebraError> {
        self.combine(other, |a, b| a + b)
    }

    /// Difference; the result window is `[min ord, min prec)`.
    pub fn sub(&self, other: &TruncSeries) -> Result<TruncSeries, AlgebraError> {
        self.combine(other, |a, b| a - b)
    }

    /// Negation.
    pub fn neg(&self) -> TruncSeries {
        TruncSeries { coeffs: self.coeffs.iter().map(|c| -c).collect(), ..self.clone() }
    }

    /// Product; see [`series_mul`].
    pub fn mul(&self, other: &TruncSeries) -> Result<TruncSeries, AlgebraError> {
        series_mul(self, other)
    }

    /// Whether both series agree on every exponent below `upto` that both know.
    pub fn agrees_below(&self, other: &TruncSeries, upto: i64) -> bool {
        let top = upto.min(self.prec).min(other.prec);
        let low = self.ord.min(other.ord);
        (low..top).all(|e| self.coeff(e) == other.coeff(e))
    }
}

impl PartialEq for TruncSeries {
    /// Equal variable, equal precision and equal coefficients on every known exponent.
    fn eq(&self, other: &Self) -> bool {
        self.var == other.var
            && self.prec == other.prec
            && self.field.order() == other.field.order()
            && self.agrees_below(other, self.prec)
    }
}

impl Eq for TruncSeries {}

/// Series product: `ord = a.ord + b.ord`, `prec = min(a.prec + b.ord, b.prec + a.ord)`.
pub fn series_mul(a: &TruncSeries, b: &TruncSeries) -> Result<TruncSeries, AlgebraError> {
    a.check_compatible(b)?;
    let ord = a.ord + b.ord;
    let prec = (a.prec + b.ord).min(b.prec + a.ord);
    check_window(ord, prec)?;
    let mut coeffs = vec![a.field.zero(); (prec - ord) as usize];
    for (i, x) in a.coeffs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate() {
            let k = i + j;
            if k >= coeffs.len() {
                break;
            }
            if !y.is_zero() {
                coeffs[k] = &coeffs[k] + &(x * y);
            }
        }
    }
    Ok(TruncSeries { field: a.field.clone(), var: a.var, ord, prec, coeffs })
}

/// Multiplicative inverse of a series whose coefficient at `ord` is nonzero.
///
/// For `a` with window `[o, p)` the inverse has window `[-o, p - 2o)`.
pub fn series_inv(a: &TruncSeries) -> Result<TruncSeries, AlgebraError> {
    let lead = &a.coeffs[0];
    if lead.is_zero() {
        return Err(AlgebraError::NonUnitLeading);
    }
    let lead_inv = lead.inv()?;
    let n = a.coeffs.len();
    let mut out: Vec<CycNum> = Vec::with_capacity(n);
    out.push(lead_inv.clone());
    for k in 1..n {
        let mut acc = a.field.zero();
        for j in 1..=k {
            if !a.coeffs[j].is_zero() {
                acc = &acc + &(&a.coeffs[j] * &out[k - j]);
            }
        }
        out.push(-(&acc * &lead_inv));
    }
    TruncSeries::new(&a.field, a.var, -a.ord, a.prec - 2 * a.ord, out)
}

/// Derivative with respect to the series variable: window shifts down by one.
pub fn series_d_dz(a: &TruncSeries) -> TruncSeries {
    let coeffs = a
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c.scale(&super::cyclotomic::rat_int(a.ord + i as i64)))
        .collect();
    TruncSeries { field: a.field.clone(), var: a.var, ord: a.ord - 1, prec: a.prec - 1, coeffs }
}

/// Substitutes `z = w^r`: exponent `e` becomes `r·e`, window scales by `r`.
pub fn to_w(a: &TruncSeries, r: usize) -> Result<TruncSeries, AlgebraError> {
    if a.var != Var::Z {
        return Err(AlgebraError::VariableMismatch);
    }
    let r = r as i64;
    let ord = a.ord * r;
    let prec = a.prec * r;
    let mut coeffs = vec![a.field.zero(); (prec - ord) as usize];
    for (i, c) in a.coeffs.iter().enumerate() {
        coeffs[i * r as usize] = c.clone();
    }
    TruncSeries::new(&a.field, Var::W, ord, prec, coeffs)
}

/// Inverse of [`to_w`] on series supported on exponents divisible by `r`.
pub fn from_w(a: &TruncSeries, r: usize) -> Result<TruncSeries, AlgebraError> {
    if a.var != Var::W {
        return Err(AlgebraError::VariableMismatch);
    }
    let ri = r as i64;
    for (i, c) in a.coeffs.iter().enumerate() {
        let e = a.ord + i as i64;
        if !c.is_zero() && e.rem_euclid(ri) != 0 {
            return Err(AlgebraError::NotPullbackable { exponent: e, index: r });
        }
    }
    let ord = a.ord.div_euclid(ri) + i64::from(a.ord.rem_euclid(ri) != 0);
    let prec = a.prec.div_euclid(ri) + i64::from(a.prec.rem_euclid(ri) != 0);
    check_window(ord, prec)?;
    let coeffs = (ord..prec).map(|e| a.coeff(e * ri).unwrap()).collect();
    TruncSeries::new(&a.field, Var::Z, ord, prec, coeffs)
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.ord + i as i64;
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let text = match c.to_rational() {
                Some(q) => render_rational(&q),
                None => format!("({c})"),
            };
            match e {
                0 => write!(f, "{text}")?,
                1 => write!(f, "{text}*{}", self.var)?,
                _ => write!(f, "{text}*{}^{e}", self.var)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({}^{})", self.var, self.prec)
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} [ord {}]", self.ord)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::cyclotomic::CycField;

    fn series(f: &Field, ord: i64, prec: i64, c: &[i64]) -> TruncSeries {
        TruncSeries::new(f, Var::Z, ord, prec, c.iter().map(|&x| f.int(x)).collect()).unwrap()
    }

    /// Convolution oracle on explicit (exponent, value) lists.
    fn naive_product(a: &[(i64, i64)], b: &[(i64, i64)]) -> std::collections::BTreeMap<i64, i64> {
        let mut out = std::collections::BTreeMap::new();
        for (ea, ca) in a {
            for (eb, cb) in b {
                *out.entry(ea + eb).or_insert(0) += ca * cb;
            }
        }
        out
    }

    #[test]
    fn product_of_laurent_and_monomial() {
        let f = CycField::new(1);
        let a = series(&f, -1, 2, &[1, 1, 0]);
        let b = series(&f, 1, 3, &[1, 0]);
        let p = series_mul(&a, &b).unwrap();
        let oracle = naive_product(&[(-1, 1), (0, 1)], &[(1, 1)]);
        assert_eq!(p.ord(), 0);
        // min(a.prec + b.ord, b.prec + a.ord) = min(3, 2)
        assert_eq!(p.prec(), 2);
        for e in 0..p.prec() {
            assert_eq!(p.coeff(e).unwrap(), f.int(*oracle.get(&e).unwrap_or(&0)));
        }
    }

    #[test]
    fn product_with_one_and_zero() {
        let f = CycField::new(1);
        let a = series(&f, 0, 4, &[3, 1, 4, 1]);
        let one = series(&f, 0, 10, &[1]);
        assert_eq!(series_mul(&a, &one).unwrap(), a);
        let zero = series(&f, 0, 3, &[]);
        let p = series_mul(&zero, &a).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.prec(), 3);
    }

    #[test]
    fn inverse_examples() {
        let f = CycField::new(1);
        let a = series(&f, 0, 3, &[1, 1]);
        assert_eq!(series_inv(&a).unwrap(), series(&f, 0, 3, &[1, -1, 1]));
        let z = series(&f, 1, 5, &[1]);
        let zi = series_inv(&z).unwrap();
        assert_eq!((zi.ord(), zi.prec()), (-1, 3));
        assert_eq!(zi.coeff(-1).unwrap(), f.one());
        let bad = series(&f, 0, 3, &[0, 1]);
        assert_eq!(series_inv(&bad).unwrap_err(), AlgebraError::NonUnitLeading);
    }

    #[test]
    fn derivative_examples() {
        let f = CycField::new(1);
        let d = series_d_dz(&series(&f, 2, 5, &[1]));
        assert_eq!(d.coeff(1).unwrap(), f.int(2));
        assert_eq!(d.prec(), 4);
        assert!(series_d_dz(&series(&f, 0, 3, &[7])).is_zero());
        let d = series_d_dz(&series(&f, -1, 2, &[1]));
        assert_eq!(d.coeff(-2).unwrap(), f.int(-1));
    }

    #[test]
    fn pullback_round_trip_and_rejection() {
        let f = CycField::new(1);
        let a = series(&f, 1, 3, &[1, 1]);
        let w = to_w(&a, 2).unwrap();
        assert_eq!(w.coeff(2).unwrap(), f.one());
        assert_eq!(w.coeff(3).unwrap(), f.zero());
        assert_eq!(w.coeff(4).unwrap(), f.one());
        assert_eq!(from_w(&w, 2).unwrap(), a);
        let w3 = TruncSeries::monomial(&f, Var::W, 3, f.one(), 8).unwrap();
        assert!(matches!(from_w(&w3, 2), Err(AlgebraError::NotPullbackable { exponent: 3, .. })));
    }

    #[test]
    fn empty_window_is_rejected() {
        let f = CycField::new(1);
        let a = series(&f, 2, 5, &[1]);
        assert!(matches!(a.truncate(2), Err(AlgebraError::PrecisionExhausted { .. })));
        let w = TruncSeries::zero(&f, Var::W, 1, 3).unwrap();
        assert!(matches!(from_w(&w, 4), Err(AlgebraError::PrecisionExhausted { .. })));
    }

    #[test]
    fn variable_mismatch() {
        let f = CycField::new(1);
        let a = series(&f, 0, 2, &[1]);
        let b = TruncSeries::constant(&f, Var::W, f.one(), 2).unwrap();
        assert_eq!(series_mul(&a, &b).unwrap_err(), AlgebraError::VariableMismatch);
        assert_eq!(a.add(&b).unwrap_err(), AlgebraError::VariableMismatch);
    }

    #[test]
    fn trim_and_shift() {
        let f = CycField::new(1);
        let a = series(&f, 0, 5, &[0, 0, 2, 1]);
        let t = a.trim_ord();
        assert_eq!(t.ord(), 2);
        assert_eq!(t, a);
        let s = a.shift(-2);
        assert_eq!((s.ord(), s.prec()), (-2, 3));
        assert_eq!(s.coeff(0).unwrap(), f.int(2));
    }
}
