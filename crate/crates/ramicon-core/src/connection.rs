// SPDX-License-Identifier: MIT OR Apache-2.0
//! Connections `d + A(x) dx/x^m` on a formal disk and their gauge action.
//!
//! The matrix `A` is stored without its pole; the pole order `m` is carried
//! separately. Gauges act on the right: a gauge `P` replaces the frame `e` by
//! `e·P`, so `A ↦ P⁻¹AP + x^m P⁻¹ dP/dx`.

use crate::algebra::{AlgebraError, CycNum, Field, FieldExt, Mat, SeriesMatrix, Var};
use crate::algebra::forms::{EpsMatrix, EpsRing, FormMatrix};
use crate::error::{Error, Result};
use crate::exponent::{validate_exponent, RamifiedExponent};

/// Moves a matrix series to the window starting at `0`, rejecting genuine poles.
pub(crate) fn regular_part(m: &SeriesMatrix, what: &str) -> Result<SeriesMatrix> {
    if m.ord() >= 0 {
        return Ok(m.clone());
    }
    if let Some(v) = m.valuation().filter(|&v| v < 0) {
        return Err(Error::InvalidInput(format!("{what} has a pole of order {}", -v)));
    }
    if m.prec() <= 0 {
        return Err(AlgebraError::PrecisionExhausted { ord: 0, prec: m.prec() }.into());
    }
    let coeffs: Vec<Mat> = (0..m.prec()).map(|e| m.coeff(e).expect("known coefficient")).collect();
    Ok(SeriesMatrix::new(m.field(), m.var(), m.rows(), m.cols(), 0, m.prec(), coeffs)?)
}

/// A connection `d + A(x) dx/x^m` of rank `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    rank: usize,
    pole_order: usize,
    matrix: SeriesMatrix,
}

impl Connection {
    /// Builds a connection from its pole-free matrix `A` and pole order `m`.
    pub fn new(matrix: SeriesMatrix, pole_order: usize) -> Result<Connection> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::InvalidInput("connection matrix must be square".into()));
        }
        let matrix = regular_part(&matrix, "connection matrix")?;
        if matrix.prec() < pole_order as i64 {
            return Err(AlgebraError::PrecisionExhausted { ord: 0, prec: matrix.prec() }.into());
        }
        Ok(Connection { rank: matrix.rows(), pole_order, matrix })
    }

    /// Rank.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Pole order `m`.
    pub fn pole_order(&self) -> usize {
        self.pole_order
    }

    /// The pole-free matrix `A`.
    pub fn matrix(&self) -> &SeriesMatrix {
        &self.matrix
    }

    /// Precision of `A`.
    pub fn prec(&self) -> i64 {
        self.matrix.prec()
    }

    /// Coefficient field.
    pub fn field(&self) -> &Field {
        self.matrix.field()
    }

    /// Series variable.
    pub fn var(&self) -> Var {
        self.matrix.var()
    }

    /// The same connection with `A` known only up to `prec`.
    pub fn truncate(&self, prec: i64) -> Result<Connection> {
        Connection::new(self.matrix.truncate(prec)?, self.pole_order)
    }

    /// The actual `dx` coefficient `A/x^m`.
    pub fn dz_coefficient(&self) -> SeriesMatrix {
        self.matrix.shift(-(self.pole_order as i64))
    }

    /// The connection as a parameter-free one-form over `ring`.
    pub fn to_form(&self, ring: EpsRing) -> FormMatrix {
        FormMatrix::from_dz(EpsMatrix::constant(ring, &self.dz_coefficient()))
    }
}

/// The `r × r` matrix of multiplication by `w` in the basis `1, w, …, w^{r−1}`:
/// ones on the subdiagonal and `x` in the top-right corner, known up to `q`.
pub fn companion(field: &Field, r: usize, q: i64, var: Var) -> Result<SeriesMatrix> {
    if q < 1 {
        return Err(AlgebraError::PrecisionExhausted { ord: 0, prec: q }.into());
    }
    let sub = Mat::from_fn(field, r, r, |i, j| if i == j + 1 { field.one() } else { field.zero() });
    let corner =
        Mat::from_fn(field, r, r, |i, j| if i == 0 && j == r - 1 { field.one() } else { field.zero() });
    let coeffs = if q >= 2 { vec![sub, corner] } else { vec![sub] };
    Ok(SeriesMatrix::new(field, var, r, r, 0, q, coeffs)?)
}

/// The constant part `N(0)`: ones on the subdiagonal.
pub fn nilpotent_shift(field: &Field, r: usize) -> Mat {
    Mat::from_fn(field, r, r, |i, j| if i == j + 1 { field.one() } else { field.zero() })
}

/// `R_r = diag(0, 1/r, …, (r−1)/r)`.
pub fn residue_shift(field: &Field, r: usize) -> Mat {
    let d: Vec<CycNum> = (0..r).map(|k| field.frac(k as i64, r as i64)).collect();
    Mat::diag(field, &d)
}

/// The normal-form connection `ν(N) + x^{m−1} R_r`, known up to `q`.
pub fn normal_matrix(nu: &RamifiedExponent, q: i64) -> Result<Connection> {
    validate_exponent(nu)?;
    normal_matrix_unchecked(nu, q, Var::Z)
}

pub(crate) fn normal_matrix_unchecked(nu: &RamifiedExponent, q: i64, var: Var) -> Result<Connection> {
    let field = nu.field();
    let r = nu.r();
    let m = nu.m() as i64;
    if q < m {
        return Err(AlgebraError::PrecisionExhausted { ord: 0, prec: q }.into());
    }
    let n = companion(field, r, q, var)?;
    let numerator = nu.numerator_matrix(&n)?;
    let shift = SeriesMatrix::monomial(&residue_shift(field, r), var, m - 1, q)?;
    Connection::new(numerator.add(&shift)?, nu.m())
}

/// An invertible gauge matrix together with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gauge {
    p: SeriesMatrix,
    p_inv: SeriesMatrix,
}

impl Gauge {
    /// A gauge from a pole-free matrix with invertible constant term.
    pub fn from_matrix(p: &SeriesMatrix) -> Result<Gauge> {
        let p = regular_part(p, "gauge matrix")?;
        if p.coeff(0).map_or(true, |c| c.inverse().is_err()) {
            return Err(Error::SingularGauge);
        }
        let p_inv = p.inverse()?;
        Ok(Gauge { p, p_inv })
    }

    /// A gauge from an explicit (possibly Laurent) pair, checked to be mutually inverse.
    pub fn from_pair(p: SeriesMatrix, p_inv: SeriesMatrix) -> Result<Gauge> {
        let prod = p.mul(&p_inv)?;
        let id = SeriesMatrix::identity(p.field(), p.var(), p.rows(), prod.prec())?;
        if !prod.agrees_below(&id, prod.prec()) {
            return Err(Error::SingularGauge);
        }
        Ok(Gauge { p, p_inv })
    }

    /// The identity gauge known up to `prec`.
    pub fn identity(field: &Field, var: Var, r: usize, prec: i64) -> Result<Gauge> {
        let id = SeriesMatrix::identity(field, var, r, prec)?;
        Ok(Gauge { p: id.clone(), p_inv: id })
    }

    /// The gauge matrix.
    pub fn matrix(&self) -> &SeriesMatrix {
        &self.p
    }

    /// Its inverse.
    pub fn inverse_matrix(&self) -> &SeriesMatrix {
        &self.p_inv
    }

    /// Precision of the gauge matrix.
    pub fn prec(&self) -> i64 {
        self.p.prec().min(self.p_inv.prec())
    }

    /// The inverse gauge.
    pub fn inverse(&self) -> Gauge {
        Gauge { p: self.p_inv.clone(), p_inv: self.p.clone() }
    }

    /// Composite `self·other` (apply `self` first).
    pub fn compose(&self, other: &Gauge) -> Result<Gauge> {
        Ok(Gauge { p: self.p.mul(&other.p)?, p_inv: other.p_inv.mul(&self.p_inv)? })
    }

    /// Whether the gauge matrix is the identity on its known window.
    pub fn is_identity(&self) -> bool {
        let id = SeriesMatrix::identity(self.p.field(), self.p.var(), self.p.rows(), self.p.prec());
        id.is_ok_and(|id| self.p.agrees_below(&id, self.p.prec()))
    }
}

/// `A ↦ P⁻¹AP + x^m P⁻¹ dP/dx`.
pub fn gauge_transform(c: &Connection, g: &Gauge) -> Result<Connection> {
    if g.p.rows() != c.rank {
        return Err(Error::InvalidInput("gauge and connection ranks differ".into()));
    }
    let m = c.pole_order as i64;
    let conj = g.p_inv.mul(&c.matrix)?.mul(&g.p)?;
    let deriv = g.p_inv.mul(&g.p.derivative())?.shift(m);
    let out = conj.add(&deriv)?;
    let out = regular_part(&out, "gauge-transformed matrix")?;
    if out.prec() < m {
        return Err(AlgebraError::PrecisionExhausted { ord: 0, prec: out.prec() }.into());
    }
    Connection::new(out, c.pole_order)
}

/// Outcome of checking whether a connection is generic ramified for `ν`.
#[derive(Clone, Debug)]
pub struct RamificationReport {
    /// Whether the normalization to the requested order succeeded.
    pub generic: bool,
    /// Target order of the normalization.
    pub order: i64,
    /// Normalizing gauge on success.
    pub gauge: Option<Gauge>,
    /// Human-readable reason on failure.
    pub reason: Option<String>,
}

/// Runs the normalization and reports whether `c` is generic ν-ramified to order `q`.
pub fn nu_connection_operator_check(c: &Connection, nu: &RamifiedExponent, q: i64) -> RamificationReport {
    match crate::normalform::normalize(c, nu, q) {
        Ok(outcome) => RamificationReport { generic: true, order: q, gauge: Some(outcome.gauge), reason: None },
        Err(e) => RamificationReport { generic: false, order: q, gauge: None, reason: Some(e.to_string()) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, CycField, TruncSeries};

    fn field() -> Field {
        CycField::new(2)
    }

    #[test]
    fn companion_examples() {
        let f = field();
        let n = companion(&f, 2, 5, Var::Z).unwrap();
        assert_eq!(n.coeff(0).unwrap(), Mat::from_ints(&f, &[vec![0, 0], vec![1, 0]]));
        assert_eq!(n.coeff(1).unwrap(), Mat::from_ints(&f, &[vec![0, 1], vec![0, 0]]));
        let n3 = companion(&f, 3, 5, Var::Z).unwrap();
        assert_eq!(n3.coeff(1).unwrap().get(0, 2), &f.one());
        for r in 2..=4 {
            let n = companion(&f, r, 8, Var::Z).unwrap();
            let z = SeriesMatrix::monomial(&Mat::identity(&f, r), Var::Z, 1, 8).unwrap();
            assert_eq!(n.pow(r).unwrap(), z);
        }
    }

    #[test]
    fn normal_matrix_r2_m2() {
        let f = field();
        let nu = RamifiedExponent::simple(&f, 2, 2).unwrap();
        let a = normal_matrix(&nu, 4).unwrap();
        // A = [[0, z], [1, z/2]]
        assert_eq!(a.matrix().coeff(0).unwrap(), Mat::from_ints(&f, &[vec![0, 0], vec![1, 0]]));
        let mut c1 = Mat::from_ints(&f, &[vec![0, 1], vec![0, 0]]);
        c1.set(1, 1, f.frac(1, 2));
        assert_eq!(a.matrix().coeff(1).unwrap(), c1);
        assert!(a.matrix().coeff(2).unwrap().is_zero());
    }

    #[test]
    fn identity_gauge_and_scalar_gauge() {
        let f = field();
        let nu = RamifiedExponent::simple(&f, 2, 2).unwrap();
        let c = normal_matrix(&nu, 6).unwrap();
        let id = Gauge::identity(&f, Var::Z, 2, 6).unwrap();
        assert_eq!(gauge_transform(&c, &id).unwrap(), c);
        // P = (1 + z)·Id: A ↦ A + z^m (1+z)^{-1} Id.
        let u = TruncSeries::new(&f, Var::Z, 0, 6, vec![f.one(), f.one()]).unwrap();
        let p = SeriesMatrix::identity(&f, Var::Z, 2, 6).unwrap().add(
            &SeriesMatrix::monomial(&Mat::identity(&f, 2), Var::Z, 1, 6).unwrap()).unwrap();
        let g = Gauge::from_matrix(&p).unwrap();
        let out = gauge_transform(&c, &g).unwrap();
        let inv = crate::algebra::series_inv(&u).unwrap();
        let expected_shift = SeriesMatrix::identity(&f, Var::Z, 2, 6).unwrap();
        let scalar: Vec<Mat> = (0..4)
            .map(|e| expected_shift.coeff(0).unwrap().scale(&inv.coeff(e).unwrap()))
            .collect();
        let corr = SeriesMatrix::new(&f, Var::Z, 2, 2, 2, 6, scalar).unwrap();
        assert_eq!(out.matrix().clone(), c.matrix().add(&corr).unwrap());
        let _ = rat(1, 2);
    }

    #[test]
    fn gauge_action_is_a_right_action() {
        let f = field();
        let nu = RamifiedExponent::simple(&f, 2, 2).unwrap();
        let c = normal_matrix(&nu, 6).unwrap();
        let p = SeriesMatrix::new(&f, Var::Z, 2, 2, 0, 6, vec![
            Mat::from_ints(&f, &[vec![1, 2], vec![0, 1]]),
            Mat::from_ints(&f, &[vec![0, 1], vec![3, 0]]),
        ]).unwrap();
        let q = SeriesMatrix::new(&f, Var::Z, 2, 2, 0, 6, vec![
            Mat::from_ints(&f, &[vec![2, 0], vec![1, 1]]),
            Mat::from_ints(&f, &[vec![1, 0], vec![0, -1]]),
        ]).unwrap();
        let gp = Gauge::from_matrix(&p).unwrap();
        let gq = Gauge::from_matrix(&q).unwrap();
        let lhs = gauge_transform(&gauge_transform(&c, &gp).unwrap(), &gq).unwrap();
        let rhs = gauge_transform(&c, &gp.compose(&gq).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn singular_gauge_is_rejected() {
        let f = field();
        let p = SeriesMatrix::constant(&Mat::from_ints(&f, &[vec![1, 1], vec![1, 1]]), Var::Z, 3).unwrap();
        assert_eq!(Gauge::from_matrix(&p).unwrap_err(), Error::SingularGauge);
    }
}
