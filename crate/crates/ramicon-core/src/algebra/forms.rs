// SPDX-License-Identifier: MIT OR Apache-2.0
//! Matrix-valued differential forms over a nilpotent parameter ring.
//!
//! The parameter rings are `C` itself, `C[ε]/(ε²)`, `C[ε₁,ε₂]/(ε₁²,ε₂²)` and
//! `C[ε₁,ε₂]/(ε₁²,ε₁ε₂,ε₂²)`. Monomials in the parameters are encoded as bit
//! masks: bit `1` is `ε₁` (also written `ε` in the one-parameter ring) and
//! bit `2` is `ε₂`.
//!
//! A one-form `Γ = Γ_z dz + Σ_j Γ_j dε_j` is a [`FormMatrix`]. Because
//! `ε_j dε_j = ½ d(ε_j²) = 0`, the coefficient `Γ_j` is only defined modulo
//! `ε_j`; it is stored without monomials containing `ε_j`. The same reasoning
//! places the `dz∧dε_j` coefficient of a two-form in `R/(ε_j)` and the
//! `dε₁∧dε₂` coefficient in `R/(ε₁,ε₂)`.

use std::collections::BTreeMap;

use super::cyclotomic::{CycNum, Field};
use super::matrix::SeriesMatrix;
use super::series::Var;
use super::AlgebraError;

/// The nilpotent parameter ring of a deformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EpsRing {
    /// No parameters.
    None,
    /// `C[ε]/(ε²)`.
    Dual,
    /// `C[ε₁,ε₂]/(ε₁²,ε₂²)`.
    Bidual,
    /// `C[ε₁,ε₂]/(ε₁²,ε₁ε₂,ε₂²)`.
    BidualTruncated,
}

impl EpsRing {
    /// Whether the monomial encoded by `mono` is nonzero in the ring.
    pub fn allows(self, mono: u8) -> bool {
        match self {
            EpsRing::None => mono == 0,
            EpsRing::Dual => mono <= 1,
            EpsRing::Bidual => mono <= 3,
            EpsRing::BidualTruncated => mono <= 2,
        }
    }

    /// Parameter indices (`1`, `2`) present in the ring.
    pub fn params(self) -> &'static [u8] {
        match self {
            EpsRing::None => &[],
            EpsRing::Dual => &[1],
            EpsRing::Bidual | EpsRing::BidualTruncated => &[1, 2],
        }
    }

    /// All monomials that are nonzero in the ring.
    pub fn monomials(self) -> Vec<u8> {
        (0u8..4).filter(|&m| self.allows(m)).collect()
    }

    /// Short name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            EpsRing::None => "none",
            EpsRing::Dual => "dual",
            EpsRing::Bidual => "bidual",
            EpsRing::BidualTruncated => "bidual-truncated",
        }
    }
}

/// Bit mask of parameter `j` (`1 ↦ 0b01`, `2 ↦ 0b10`).
pub fn param_bit(j: u8) -> u8 {
    1 << (j - 1)
}

/// Matrix polynomial in the ring parameters with matrix-series coefficients.
///
/// Absent monomials are exact zeros.
#[derive(Clone, Debug)]
pub struct EpsMatrix {
    ring: EpsRing,
    field: Field,
    var: Var,
    rows: usize,
    cols: usize,
    terms: BTreeMap<u8, SeriesMatrix>,
}

impl EpsMatrix {
    /// The zero matrix over `ring`.
    pub fn zero(ring: EpsRing, field: &Field, var: Var, rows: usize, cols: usize) -> EpsMatrix {
        EpsMatrix { ring, field: field.clone(), var, rows, cols, terms: BTreeMap::new() }
    }

    /// Embeds a parameter-free matrix series.
    pub fn constant(ring: EpsRing, m: &SeriesMatrix) -> EpsMatrix {
        let mut out = EpsMatrix::zero(ring, m.field(), m.var(), m.rows(), m.cols());
        out.terms.insert(0, m.clone());
        out
    }

    /// Builds from `(monomial, coefficient)` pairs; disallowed monomials are dropped.
    pub fn from_terms(
        ring: EpsRing,
        field: &Field,
        var: Var,
        rows: usize,
        cols: usize,
        terms: impl IntoIterator<Item = (u8, SeriesMatrix)>,
    ) -> Result<EpsMatrix, AlgebraError> {
        let mut out = EpsMatrix::zero(ring, field, var, rows, cols);
        for (mono, m) in terms {
            out.add_term(mono, m)?;
        }
        Ok(out)
    }

    fn add_term(&mut self, mono: u8, m: SeriesMatrix) -> Result<(), AlgebraError> {
        if !self.ring.allows(mono) {
            return Ok(());
        }
        if m.var() != self.var {
            return Err(AlgebraError::VariableMismatch);
        }
        if (m.rows(), m.cols()) != (self.rows, self.cols) {
            return Err(AlgebraError::DimensionMismatch("ε-term shape mismatch".into()));
        }
        let next = match self.terms.remove(&mono) {
            Some(prev) => prev.add(&m)?,
            None => m,
        };
        self.terms.insert(mono, next);
        Ok(())
    }

    /// The parameter ring.
    pub fn ring(&self) -> EpsRing {
        self.ring
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

    /// Coefficient of a monomial, `None` if it is an exact zero.
    pub fn term(&self, mono: u8) -> Option<&SeriesMatrix> {
        self.terms.get(&mono)
    }

    /// All stored `(monomial, coefficient)` pairs in monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (u8, &SeriesMatrix)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    /// Whether every known coefficient of every monomial vanishes.
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(SeriesMatrix::is_zero)
    }

    /// Smallest precision among stored terms.
    pub fn prec(&self) -> Option<i64> {
        self.terms.values().map(SeriesMatrix::prec).min()
    }

    fn check_ring(&self, other: &EpsMatrix) -> Result<(), AlgebraError> {
        if self.ring != other.ring {
            return Err(AlgebraError::EpsOrderMismatch);
        }
        Ok(())
    }

    /// Sum.
    pub fn add(&self, other: &EpsMatrix) -> Result<EpsMatrix, AlgebraError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (mono, m) in &other.terms {
            out.add_term(*mono, m.clone())?;
        }
        Ok(out)
    }

    /// Difference.
    pub fn sub(&self, other: &EpsMatrix) -> Result<EpsMatrix, AlgebraError> {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> EpsMatrix {
        self.map_terms(SeriesMatrix::neg)
    }

    /// Multiplies by a field element.
    pub fn scale(&self, c: &CycNum) -> EpsMatrix {
        self.map_terms(|m| m.scale(c))
    }

    /// Applies a function to every coefficient.
    pub fn map_terms(&self, f: impl Fn(&SeriesMatrix) -> SeriesMatrix) -> EpsMatrix {
        let terms: BTreeMap<u8, SeriesMatrix> = self.terms.iter().map(|(k, v)| (*k, f(v))).collect();
        let (rows, cols) =
            terms.values().next().map_or((self.rows, self.cols), |m| (m.rows(), m.cols()));
        EpsMatrix { terms, rows, cols, ..self.clone() }
    }

    /// Applies a fallible function to every coefficient.
    pub fn try_map_terms(
        &self,
        f: impl Fn(&SeriesMatrix) -> Result<SeriesMatrix, AlgebraError>,
    ) -> Result<EpsMatrix, AlgebraError> {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            terms.insert(*k, f(v)?);
        }
        let (rows, cols) =
            terms.values().next().map_or((self.rows, self.cols), |m| (m.rows(), m.cols()));
        Ok(EpsMatrix { terms, rows, cols, ..self.clone() })
    }

    /// Product in the ring: monomials sharing a parameter multiply to zero.
    pub fn mul(&self, other: &EpsMatrix) -> Result<EpsMatrix, AlgebraError> {
        self.check_ring(other)?;
        if self.cols != other.rows {
            return Err(AlgebraError::DimensionMismatch("ε-matrix product shape mismatch".into()));
        }
        let mut out = EpsMatrix::zero(self.ring, &self.field, self.var, self.rows, other.cols);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if a & b != 0 || !self.ring.allows(a | b) {
                    continue;
                }
                out.add_term(a | b, x.mul(y)?)?;
            }
        }
        Ok(out)
    }

    /// Commutator.
    pub fn commutator(&self, other: &EpsMatrix) -> Result<EpsMatrix, AlgebraError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Partial derivative `∂/∂ε_j`, valued in `R/(ε_j)`.
    pub fn d_eps(&self, j: u8) -> EpsMatrix {
        let bit = param_bit(j);
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| *k & bit != 0)
            .map(|(k, v)| (k & !bit, v.clone()))
            .collect();
        EpsMatrix { terms, ..self.clone() }
    }

    /// Image in `R/(ε_j)`: drops monomials containing `ε_j`.
    pub fn quotient(&self, j: u8) -> EpsMatrix {
        let bit = param_bit(j);
        let terms = self.terms.iter().filter(|(k, _)| *k & bit == 0).map(|(k, v)| (*k, v.clone())).collect();
        EpsMatrix { terms, ..self.clone() }
    }

    /// Image in `R/(ε₁, ε₂)`: keeps only the parameter-free term.
    pub fn reduce_all(&self) -> EpsMatrix {
        let terms = self.terms.iter().filter(|(k, _)| **k == 0).map(|(k, v)| (*k, v.clone())).collect();
        EpsMatrix { terms, ..self.clone() }
    }

    /// Derivative in the series variable.
    pub fn d_var(&self) -> EpsMatrix {
        self.map_terms(SeriesMatrix::derivative)
    }

    /// Inverse, via the parameter-free inverse and a nilpotent geometric series.
    pub fn inverse(&self) -> Result<EpsMatrix, AlgebraError> {
        let g0 = self
            .terms
            .get(&0)
            .ok_or(AlgebraError::SingularMatrix)?;
        let g0_inv = EpsMatrix::constant(self.ring, &g0.inverse()?);
        let mut nil = self.clone();
        nil.terms.remove(&0);
        // g⁻¹ = Σ_k (−g0⁻¹ n)^k g0⁻¹; nilpotency order is at most 3.
        let step = g0_inv.mul(&nil)?.neg();
        let mut out = g0_inv.clone();
        let mut power = g0_inv.clone();
        for _ in 0..2 {
            power = step.mul(&power)?;
            if power.terms.is_empty() {
                break;
            }
            out = out.add(&power)?;
        }
        Ok(out)
    }

    /// Whether both agree on every monomial below exponent `upto`.
    pub fn agrees_below(&self, other: &EpsMatrix, upto: i64) -> bool {
        let keys: std::collections::BTreeSet<u8> =
            self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.into_iter().all(|k| match (self.terms.get(&k), other.terms.get(&k)) {
            (Some(a), Some(b)) => a.agrees_below(b, upto),
            (Some(a), None) | (None, Some(a)) => {
                a.truncate(upto).map(|t| t.is_zero()).unwrap_or(true)
            }
            (None, None) => true,
        })
    }
}

/// Matrix one-form `Γ_z dz + Σ_j Γ_j dε_j` over a parameter ring.
#[derive(Clone, Debug)]
pub struct FormMatrix {
    /// The parameter ring.
    pub ring: EpsRing,
    /// Coefficient of `dz` (or `dw`), including its pole.
    pub dz: EpsMatrix,
    /// Coefficients of `dε_j`, each stored without monomials containing `ε_j`.
    pub deps: BTreeMap<u8, EpsMatrix>,
}

impl FormMatrix {
    /// A form with only a `dz` part.
    pub fn from_dz(dz: EpsMatrix) -> FormMatrix {
        FormMatrix { ring: dz.ring(), dz, deps: BTreeMap::new() }
    }

    /// Builds a form, reducing each `dε_j` part modulo `ε_j`.
    pub fn new(dz: EpsMatrix, deps: BTreeMap<u8, EpsMatrix>) -> Result<FormMatrix, AlgebraError> {
        let ring = dz.ring();
        let mut reduced = BTreeMap::new();
        for (j, m) in deps {
            if m.ring() != ring {
                return Err(AlgebraError::EpsOrderMismatch);
            }
            if !ring.params().contains(&j) {
                return Err(AlgebraError::DimensionMismatch(format!(
                    "parameter ε_{j} is not in the {} ring",
                    ring.name()
                )));
            }
            reduced.insert(j, m.quotient(j));
        }
        Ok(FormMatrix { ring, dz, deps: reduced })
    }

    /// The `dε_j` coefficient, zero when absent.
    pub fn deps_part(&self, j: u8) -> EpsMatrix {
        self.deps.get(&j).cloned().unwrap_or_else(|| {
            EpsMatrix::zero(self.ring, self.dz.field(), self.dz.var(), self.dz.rows(), self.dz.cols())
        })
    }

    /// Gauge transform `g⁻¹Γg + g⁻¹dg` by an invertible ε-matrix.
    pub fn gauge(&self, g: &EpsMatrix) -> Result<FormMatrix, AlgebraError> {
        let g_inv = g.inverse()?;
        let dz = g_inv.mul(&self.dz)?.mul(g)?.add(&g_inv.mul(&g.d_var())?)?;
        let mut deps = BTreeMap::new();
        for &j in self.ring.params() {
            let part = g_inv
                .mul(&self.deps_part(j))?
                .mul(g)?
                .add(&g_inv.mul(&g.d_eps(j))?)?;
            deps.insert(j, part);
        }
        FormMatrix::new(dz, deps)
    }
}

/// Matrix two-form: `dz∧dε_j` coefficients and the `dε₁∧dε₂` coefficient.
#[derive(Clone, Debug)]
pub struct TwoForm {
    /// Coefficient of `dz∧dε_j`, valued in `R/(ε_j)`.
    pub dz_deps: BTreeMap<u8, EpsMatrix>,
    /// Coefficient of `dε₁∧dε₂`, valued in `R/(ε₁,ε₂)`.
    pub deps12: Option<EpsMatrix>,
}

impl TwoForm {
    /// Whether every component vanishes on all known coefficients.
    pub fn is_zero(&self) -> bool {
        self.dz_deps.values().all(EpsMatrix::is_zero)
            && self.deps12.as_ref().is_none_or(EpsMatrix::is_zero)
    }

    /// Componentwise sum.
    pub fn add(&self, other: &TwoForm) -> Result<TwoForm, AlgebraError> {
        let mut dz_deps = self.dz_deps.clone();
        for (j, m) in &other.dz_deps {
            let next = match dz_deps.remove(j) {
                Some(prev) => prev.add(m)?,
                None => m.clone(),
            };
            dz_deps.insert(*j, next);
        }
        let deps12 = match (&self.deps12, &other.deps12) {
            (Some(a), Some(b)) => Some(a.add(b)?),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        Ok(TwoForm { dz_deps, deps12 })
    }
}

/// Exterior product `Γ∧Δ` with non-commuting matrix coefficients.
pub fn wedge(gamma: &FormMatrix, delta: &FormMatrix) -> Result<TwoForm, AlgebraError> {
    if gamma.ring != delta.ring {
        return Err(AlgebraError::EpsOrderMismatch);
    }
    let ring = gamma.ring;
    let mut dz_deps = BTreeMap::new();
    for &j in ring.params() {
        let c = gamma
            .dz
            .mul(&delta.deps_part(j))?
            .sub(&gamma.deps_part(j).mul(&delta.dz)?)?
            .quotient(j);
        dz_deps.insert(j, c);
    }
    let deps12 = if ring.params().len() == 2 {
        let c = gamma
            .deps_part(1)
            .mul(&delta.deps_part(2))?
            .sub(&gamma.deps_part(2).mul(&delta.deps_part(1))?)?
            .reduce_all();
        Some(c)
    } else {
        None
    };
    Ok(TwoForm { dz_deps, deps12 })
}

/// Exterior derivative of a matrix one-form.
pub fn d_form(gamma: &FormMatrix) -> Result<TwoForm, AlgebraError> {
    let ring = gamma.ring;
    let mut dz_deps = BTreeMap::new();
    for &j in ring.params() {
        let c = gamma.deps_part(j).d_var().sub(&gamma.dz.d_eps(j))?.quotient(j);
        dz_deps.insert(j, c);
    }
    let deps12 = if ring.params().len() == 2 {
        let c = gamma.deps_part(2).d_eps(1).sub(&gamma.deps_part(1).d_eps(2))?.reduce_all();
        Some(c)
    } else {
        None
    };
    Ok(TwoForm { dz_deps, deps12 })
}

/// Curvature `dΓ + Γ∧Γ`.
pub fn curvature(gamma: &FormMatrix) -> Result<TwoForm, AlgebraError> {
    d_form(gamma)?.add(&wedge(gamma, gamma)?)
}
