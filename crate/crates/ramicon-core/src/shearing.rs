// SPDX-License-Identifier: MIT OR Apache-2.0
//! Passage from a ramified connection on the `z`-disk to an unramified,
//! Galois-equivariant connection on the cover `w ↦ w^r = z`, and back.
//!
//! The forward direction pulls back along the cover, applies the gauge
//! `V⁻¹` with `V_{jk} = ζ^{jk} w^k`, removes the Galois-invariant scalar part
//! `ν₀`, and divides by `w`. For a connection in normal form the result is
//! the diagonal `d + Λ(w) dw/w^{mr−r}` with
//! `λ_j(w) = Σ_{k≥1,l} r a_{k,l} ζ^{kj} w^{rl+k−1}`.

use std::collections::BTreeMap;

use crate::algebra::{
    AlgebraError, CycNum, EpsMatrix, EpsRing, Field, FieldExt, FormMatrix, Mat, SeriesMatrix, TruncSeries, Var,
};
use crate::connection::{gauge_transform, Connection, Gauge};
use crate::error::{Error, Result};
use crate::exponent::{validate_exponent, DeformationDirection, RamifiedExponent};
use crate::normalform::normalize;

fn require_root(field: &Field, r: usize) -> Result<()> {
    if field.contains_root_of_unity(r) {
        Ok(())
    } else {
        Err(Error::FieldLacksRoot { order: field.order(), r })
    }
}

/// Pullback along `z = w^r`: `A(z) dz/z^m ↦ r A(w^r) dw/w^{mr−r+1}`.
pub fn pullback(c: &Connection) -> Result<Connection> {
    if c.var() != Var::Z {
        return Err(AlgebraError::VariableMismatch.into());
    }
    let r = c.rank();
    let m = c.pole_order();
    let field = c.field().clone();
    let a = c.matrix().to_w(r)?.scale(&field.int(r as i64));
    Connection::new(a, m * r - r + 1)
}

/// The pullback of a connection of rank `r` along the degree-`degree` cover.
pub fn pullback_with_degree(c: &Connection, degree: usize) -> Result<Connection> {
    if c.var() != Var::Z {
        return Err(AlgebraError::VariableMismatch.into());
    }
    let m = c.pole_order();
    let field = c.field().clone();
    let a = c.matrix().to_w(degree)?.scale(&field.int(degree as i64));
    Connection::new(a, (m * degree + 1).saturating_sub(degree))
}

/// The constant character matrix `(ζ_r^{jk})`.
pub fn character_matrix(field: &Field, r: usize) -> Result<Mat> {
    require_root(field, r)?;
    Ok(Mat::from_fn(field, r, r, |j, k| field.root_of_unity_pow(r, (j * k) as i64)))
}

/// Inverse of the character matrix: `(1/r)(ζ_r^{−jk})`.
pub fn character_matrix_inverse(field: &Field, r: usize) -> Result<Mat> {
    require_root(field, r)?;
    let inv_r = field.frac(1, r as i64);
    Ok(Mat::from_fn(field, r, r, |j, k| &field.root_of_unity_pow(r, -((j * k) as i64)) * &inv_r))
}

/// The gauge with matrix `V_{jk} = ζ_r^{jk} w^k` and inverse
/// `diag(w^{−k})·(1/r)(ζ_r^{−jk})`, exact up to `prec`.
pub fn vandermonde(field: &Field, r: usize, prec: i64) -> Result<Gauge> {
    let chars = character_matrix(field, r)?;
    let chars_inv = character_matrix_inverse(field, r)?;
    let r_i = r as i64;
    let top = prec.max(r_i);
    let mut v_coeffs = vec![Mat::zeros(field, r, r); r];
    for k in 0..r {
        for j in 0..r {
            v_coeffs[k].set(j, k, chars.get(j, k).clone());
        }
    }
    let v = SeriesMatrix::new(field, Var::W, r, r, 0, top, v_coeffs)?;
    let mut inv_coeffs = vec![Mat::zeros(field, r, r); r];
    for k in 0..r {
        for j in 0..r {
            inv_coeffs[r - 1 - k].set(k, j, chars_inv.get(k, j).clone());
        }
    }
    let v_inv = SeriesMatrix::new(field, Var::W, r, r, 1 - r_i, top, inv_coeffs)?;
    Gauge::from_pair(v, v_inv)
}

/// The diagonal entries `λ_j(w)` of the split form, as numerators of `dw/w^{mr−r}`.
pub fn lambda_form(nu: &RamifiedExponent, prec: i64) -> Result<Vec<TruncSeries>> {
    validate_exponent(nu)?;
    let field = nu.field();
    let r = nu.r();
    require_root(field, r)?;
    split_diagonal(field, r, nu.table(), prec)
}

/// `Σ_{k≥1,l} r c_{k,l} ζ^{kj} w^{rl+k−1}` for each branch `j`.
fn split_diagonal(field: &Field, r: usize, table: &[Vec<CycNum>], prec: i64) -> Result<Vec<TruncSeries>> {
    let mut out = Vec::with_capacity(r);
    for j in 0..r {
        let mut coeffs = vec![field.zero(); prec.max(1) as usize];
        for (k, row) in table.iter().enumerate().skip(1) {
            for (l, a) in row.iter().enumerate() {
                let e = (r * l + k - 1) as i64;
                if e < prec && !a.is_zero() {
                    let term = &(a * &field.int(r as i64)) * &field.root_of_unity_pow(r, (k * j) as i64);
                    coeffs[e as usize] = &coeffs[e as usize] + &term;
                }
            }
        }
        out.push(TruncSeries::new(field, Var::W, 0, prec, coeffs)?);
    }
    Ok(out)
}

fn diagonal_matrix(entries: &[TruncSeries]) -> Result<SeriesMatrix> {
    let r = entries.len();
    let first = &entries[0];
    let zero = TruncSeries::zero(first.field(), first.var(), first.ord(), first.prec())?;
    let grid: Vec<Vec<TruncSeries>> = (0..r)
        .map(|i| (0..r).map(|j| if i == j { entries[i].clone() } else { zero.clone() }).collect())
        .collect();
    Ok(SeriesMatrix::from_entries(&grid)?)
}

/// An unramified connection on the cover obtained by shearing.
#[derive(Clone, Debug)]
pub struct ShearedConnection {
    /// The connection in `w` with pole order `mr − r`.
    pub connection: Connection,
    /// Gauge on the cover carrying the pulled-back input to the split form before the scalar twist.
    pub gauge: Gauge,
    /// Order of the Galois group of the cover.
    pub galois_order: usize,
}

/// Shears a connection already in normal form for `nu`.
pub fn shear_normalized(c: &Connection, nu: &RamifiedExponent) -> Result<ShearedConnection> {
    let r = nu.r();
    let field = nu.field().clone();
    require_root(&field, r)?;
    let pulled = pullback(c)?;
    let v = vandermonde(&field, r, pulled.prec() + r as i64)?;
    let gauge = v.inverse();
    let split = gauge_transform(&pulled, &gauge)?;
    let scalar = nu.component(0, Var::Z, c.prec())?;
    let scalar_w = crate::algebra::series::to_w(&scalar, r)?.scale(&field.int(r as i64));
    let twist = SeriesMatrix::identity(&field, Var::W, r, split.prec())?
        .map_coeffs(|m| m.clone())
        .mul(&SeriesMatrix::from_entries(&[vec![scalar_w.truncate(split.prec())?]])?.broadcast(r)?)?;
    let twisted = split.matrix().sub(&twist)?;
    let constant = twisted.coeff(0).expect("known constant term");
    if !constant.is_zero() {
        return Err(Error::NotRamified("sheared matrix is not divisible by w".into()));
    }
    let reduced = twisted.shift(-1);
    let connection = Connection::new(reduced, pulled.pole_order() - 1)?;
    Ok(ShearedConnection { connection, gauge, galois_order: r })
}

/// Normalizes `c` for `nu` at its full precision and shears the result.
pub fn shear(c: &Connection, nu: &RamifiedExponent) -> Result<ShearedConnection> {
    validate_exponent(nu)?;
    require_root(nu.field(), nu.r())?;
    let outcome = normalize(c, nu, c.prec()).map_err(|e| match e {
        Error::Algebra(AlgebraError::PrecisionExhausted { .. }) => e,
        other => Error::NotRamified(other.to_string()),
    })?;
    let mut sheared = shear_normalized(&outcome.connection, nu)?;
    let lifted = Gauge::from_pair(
        outcome.gauge.matrix().to_w(nu.r())?,
        outcome.gauge.inverse_matrix().to_w(nu.r())?,
    )?;
    sheared.gauge = lifted.compose(&sheared.gauge)?;
    Ok(sheared)
}

/// `ζ^{j(1−P)} M(ζ^j w)`: the pullback of `M dw/w^P` by `w ↦ ζ_r^j w`.
pub fn substitute_root(m: &SeriesMatrix, r: usize, j: i64, pole_order: i64) -> Result<SeriesMatrix> {
    if m.var() != Var::W {
        return Err(AlgebraError::VariableMismatch.into());
    }
    let field = m.field().clone();
    require_root(&field, r)?;
    let zeta = field.root_of_unity_pow(r, j);
    let factor = field.root_of_unity_pow(r, j * (1 - pole_order));
    Ok(m.substitute_scaled(&zeta)?.scale(&factor))
}

/// Galois conjugate of a form `M dw/w^P`: substitute `w ↦ ζ^j w` and permute
/// the branches cyclically by `j`.
pub fn galois_conjugate(m: &SeriesMatrix, r: usize, j: i64, pole_order: i64) -> Result<SeriesMatrix> {
    if m.rows() != r || m.cols() != r {
        return Err(Error::InvalidInput("galois_conjugate needs an r×r matrix".into()));
    }
    let sub = substitute_root(m, r, j, pole_order)?;
    let shift = j.rem_euclid(r as i64) as usize;
    let idx = |i: usize| (i + r - shift) % r;
    let field = m.field().clone();
    Ok(sub.map_coeffs(|c| Mat::from_fn(&field, r, r, |a, b| c.get(idx(a), idx(b)).clone())))
}

/// Galois average `(1/r) Σ_j M(ζ^j w)`, which keeps exactly the exponents divisible by `r`.
pub fn galois_average(m: &SeriesMatrix, r: usize) -> Result<SeriesMatrix> {
    let field = m.field().clone();
    require_root(&field, r)?;
    let mut acc = m.clone();
    for j in 1..r as i64 {
        acc = acc.add(&m.substitute_scaled(&field.root_of_unity_pow(r, j))?)?;
    }
    Ok(acc.scale(&field.frac(1, r as i64)))
}

/// Termwise primitive of a Laurent series without a `w^{−1}` term.
pub(crate) fn primitive(s: &TruncSeries) -> Result<TruncSeries> {
    let field = s.field().clone();
    let mut coeffs = Vec::with_capacity(s.coeffs().len());
    for (i, c) in s.coeffs().iter().enumerate() {
        let e = s.ord() + i as i64;
        if e == -1 {
            if !c.is_zero() {
                return Err(Error::ResidueDeformation(0));
            }
            coeffs.push(field.zero());
        } else {
            coeffs.push(c / &field.int(e + 1));
        }
    }
    Ok(TruncSeries::new(&field, s.var(), s.ord() + 1, s.prec() + 1, coeffs)?)
}

/// The horizontal lift of the split form along a direction, on the cover:
/// `(Λ + εΛ_v) dw/w^{mr−r} + B′ dε` with `B′` the diagonal primitive of `Λ_v dw/w^{mr−r}`.
pub fn sheared_lift(nu: &RamifiedExponent, dir: &DeformationDirection, prec: i64) -> Result<FormMatrix> {
    let r = nu.r();
    let m = nu.m();
    let field = nu.field().clone();
    let pole = (m * r - r) as i64;
    let lam = lambda_form(nu, prec)?;
    let dir_table: Vec<Vec<CycNum>> = dir.table().to_vec();
    let lam_v = split_diagonal(&field, r, &dir_table, prec)?;
    let lam_m = diagonal_matrix(&lam)?.shift(-pole);
    let lam_v_m = diagonal_matrix(&lam_v)?.shift(-pole);
    let prims: Vec<TruncSeries> = lam_v.iter().map(|s| primitive(&s.shift(-pole))).collect::<Result<_>>()?;
    let b = diagonal_matrix(&prims)?;
    let dz = EpsMatrix::from_terms(EpsRing::Dual, &field, Var::W, r, r, [(0, lam_m), (1, lam_v_m)])?;
    let mut deps = BTreeMap::new();
    deps.insert(1, EpsMatrix::constant(EpsRing::Dual, &b));
    Ok(FormMatrix::new(dz, deps)?)
}

/// Descends a Galois-consistent total connection on the cover to the `z`-disk.
///
/// The `dw` part is untwisted by `ν₀` (and its deformation `ν₀,v`), multiplied
/// by `w`, transported by `V` and rewritten in `z`; a `dw` part that does not
/// descend raises `NotDescendable`. Each `dε` part is transported by `V`,
/// Galois-averaged and rewritten in `z`, then the primitive `∫ν₀,v` is added.
pub fn descend(total: &FormMatrix, nu: &RamifiedExponent, dir: &DeformationDirection) -> Result<FormMatrix> {
    let r = nu.r();
    let m = nu.m();
    let field = nu.field().clone();
    require_root(&field, r)?;
    let big_pole = (m * r - r + 1) as i64;
    let ring = total.ring;
    let prec_w = total.dz.prec().unwrap_or(0) + big_pole;
    let v = vandermonde(&field, r, prec_w + r as i64)?;
    let (vm, vinv) = (v.matrix(), v.inverse_matrix());
    let v_deriv = vinv.mul(&vm.derivative())?.shift(big_pole);

    let scalar = |table_row: &[CycNum]| -> Result<SeriesMatrix> {
        let s = TruncSeries::new(&field, Var::Z, 0, prec_w, table_row.to_vec())?;
        let sw = crate::algebra::series::to_w(&s, r)?.scale(&field.int(r as i64));
        SeriesMatrix::from_entries(&[vec![sw]])?.broadcast(r).map_err(Error::from)
    };
    let nu0 = scalar(&nu.table()[0])?;
    let dir0 = scalar(&dir.table()[0])?;

    let mut dz_terms = Vec::new();
    for (mono, x) in total.dz.terms() {
        let mut a = x.shift(big_pole);
        a = a.add(&if mono == 0 { nu0.clone() } else { dir0.clone() })?;
        let mut e = vinv.mul(&a)?.mul(vm)?;
        if mono == 0 {
            e = e.add(&v_deriv)?;
        }
        let e = crate::connection::regular_part(&e, "descended matrix")?;
        let z_side = e
            .from_w(r)
            .map_err(|err| Error::NotDescendable(err.to_string()))?
            .scale(&field.frac(1, r as i64));
        dz_terms.push((mono, z_side.shift(-(m as i64))));
    }
    let dz = EpsMatrix::from_terms(ring, &field, Var::Z, r, r, dz_terms)?;

    let primitive_dir0 = {
        let row = &dir.table()[0];
        let mut coeffs = Vec::new();
        for (l, b) in row.iter().enumerate() {
            let e = l as i64 - m as i64;
            coeffs.push(if b.is_zero() { field.zero() } else { b / &field.int(e + 1) });
        }
        let s = TruncSeries::new(&field, Var::Z, 1 - m as i64, prec_w, coeffs)?;
        SeriesMatrix::from_entries(&[vec![s]])?.broadcast(r)?
    };
    let mut deps = BTreeMap::new();
    for (&j, part) in &total.deps {
        let mut terms = Vec::new();
        for (mono, x) in part.terms() {
            let conj = vinv.mul(x)?.mul(vm)?;
            let avg = galois_average(&conj, r)?;
            let mut z_side = avg.from_w(r).map_err(|err| Error::NotDescendable(err.to_string()))?;
            if mono == 0 && j == 1 {
                z_side = z_side.add(&primitive_dir0)?;
            }
            terms.push((mono, z_side));
        }
        deps.insert(j, EpsMatrix::from_terms(ring, &field, Var::Z, r, r, terms)?);
    }
    Ok(FormMatrix::new(dz, deps)?)
}

trait Broadcast {
    fn broadcast(&self, r: usize) -> std::result::Result<SeriesMatrix, AlgebraError>;
}

impl Broadcast for SeriesMatrix {
    /// `s·Id_r` for a `1×1` matrix `s`.
    fn broadcast(&self, r: usize) -> std::result::Result<SeriesMatrix, AlgebraError> {
        let field = self.field().clone();
        Ok(self.map_coeffs(|c| Mat::identity(&field, r).scale(c.get(0, 0))))
    }
}
