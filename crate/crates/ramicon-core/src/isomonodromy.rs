// SPDX-License-Identifier: MIT OR Apache-2.0
//! Horizontal lifts: extensions of a connection `d + A dz/z^m` to an
//! integrable connection over a nilpotent parameter ring.
//!
//! A one-parameter lift is `(A + εC) dz/z^m + B dε` with
//! `C = z^m dB/dz + [A, B]`; the two-parameter lift adds
//! `ε₁ε₂C₁₂ dz/z^m + B₁₂(ε₁dε₂ + ε₂dε₁)` with
//! `C₁₂ = z^m dB₁₂/dz + [A, B₁₂] + [C₁, B₂]`. The matrices `B` are read off
//! the deformation direction in the adapted gauge, where `A` agrees with the
//! normal form `ν(N) + z^{m−1}R_r` to the adapted depth.

use std::collections::BTreeMap;

use crate::algebra::{
    curvature, AlgebraError, CycNum, EpsMatrix, EpsRing, Field, FieldExt, FormMatrix, Mat, SeriesMatrix, TwoForm, Var,
};
use crate::connection::{companion, gauge_transform, normal_matrix, regular_part, Connection, Gauge};
use crate::error::{Error, Result};
use crate::exponent::{validate_exponent, DeformationDirection, RamifiedExponent, UnramifiedExponentTuple};
use crate::normalform::normalize;

/// A connection in adapted gauge: `A = ν(N) + z^{m−1}R_r + z^d A′` with `d` the depth.
#[derive(Clone, Debug)]
pub struct AdaptedConnection {
    connection: Connection,
    nu: RamifiedExponent,
    depth: i64,
    remainder: SeriesMatrix,
}

impl AdaptedConnection {
    /// Checks the decomposition of `c` at depth `depth` and records `A′`.
    pub fn new(c: &Connection, nu: &RamifiedExponent, depth: i64) -> Result<AdaptedConnection> {
        validate_exponent(nu)?;
        let m = nu.m() as i64;
        if c.pole_order() != nu.m() || c.rank() != nu.r() {
            return Err(Error::InvalidInput("connection shape does not match the exponent".into()));
        }
        if depth != 2 * m - 1 && depth != 3 * m - 1 {
            return Err(Error::InvalidInput(format!("adapted depth must be {} or {}", 2 * m - 1, 3 * m - 1)));
        }
        if c.prec() < depth {
            return Err(AlgebraError::PrecisionExhausted { ord: 0, prec: c.prec() }.into());
        }
        let normal = normal_matrix(nu, c.prec())?;
        let diff = c.matrix().sub(normal.matrix())?;
        if let Some(v) = diff.valuation().filter(|&v| v < depth) {
            return Err(Error::NotAdaptedGauge(format!(
                "matrix differs from the normal form at order {v}, below depth {depth}"
            )));
        }
        let remainder = if c.prec() > depth {
            diff.truncate(c.prec())?.shift(-depth).trim_ord()
        } else {
            SeriesMatrix::zero(c.field(), Var::Z, c.rank(), c.rank(), 0, 1)?
        };
        Ok(AdaptedConnection { connection: c.clone(), nu: nu.clone(), depth, remainder })
    }

    /// The connection `d + A dz/z^m`.
    pub fn connection(&self) -> &Connection {
        &self.connection
    }

    /// The exponent of the normal form.
    pub fn exponent(&self) -> &RamifiedExponent {
        &self.nu
    }

    /// The depth `d` of the decomposition.
    pub fn depth(&self) -> i64 {
        self.depth
    }

    /// The remainder `A′` with `A = ν(N) + z^{m−1}R_r + z^d A′`.
    pub fn remainder(&self) -> &SeriesMatrix {
        &self.remainder
    }
}

/// Normalizes `c` to the given depth and returns the gauge with the adapted connection.
pub fn adapt(c: &Connection, nu: &RamifiedExponent, depth: i64) -> Result<(Gauge, AdaptedConnection)> {
    validate_exponent(nu)?;
    if c.prec() < depth {
        return Err(AlgebraError::PrecisionExhausted { ord: 0, prec: c.prec() }.into());
    }
    let outcome = normalize(c, nu, depth)?;
    let adapted = AdaptedConnection::new(&outcome.transformed, nu, depth)?;
    Ok((outcome.gauge, adapted))
}

/// Deformation data of a horizontal lift over its parameter ring.
#[derive(Clone, Debug)]
pub struct HorizontalLift {
    /// The base connection `d + A dz/z^m`.
    pub base: Connection,
    /// The nilpotent parameter ring.
    pub ring: EpsRing,
    /// The `dε_j` coefficients `B_j`.
    pub b: BTreeMap<u8, SeriesMatrix>,
    /// The `ε_j` corrections `C_j` to `A`.
    pub c: BTreeMap<u8, SeriesMatrix>,
    /// The mixed `dε` coefficient `B₁₂` of a two-parameter lift.
    pub b12: Option<SeriesMatrix>,
    /// The mixed correction `C₁₂` of a two-parameter lift.
    pub c12: Option<SeriesMatrix>,
    /// Exponent below which each `C_j` agrees with `ν_{v,j}(N)`, when that is tracked.
    pub certified_window: Option<i64>,
}

impl HorizontalLift {
    /// The total connection form
    /// `(A + Σε_jC_j + ε₁ε₂C₁₂) dz/z^m + Σ B_j dε_j + B₁₂(ε₁dε₂ + ε₂dε₁)`.
    pub fn to_form(&self) -> Result<FormMatrix> {
        let m = self.base.pole_order() as i64;
        let field = self.base.field().clone();
        let r = self.base.rank();
        let mut dz_terms = vec![(0u8, self.base.dz_coefficient())];
        for (&j, cj) in &self.c {
            dz_terms.push((crate::algebra::forms::param_bit(j), cj.shift(-m)));
        }
        if let Some(c12) = &self.c12 {
            dz_terms.push((3, c12.shift(-m)));
        }
        let dz = EpsMatrix::from_terms(self.ring, &field, Var::Z, r, r, dz_terms)?;
        let mut deps = BTreeMap::new();
        for (&j, bj) in &self.b {
            let mut terms = vec![(0u8, bj.clone())];
            if let Some(b12) = &self.b12 {
                let other = if j == 1 { 2 } else { 1 };
                terms.push((crate::algebra::forms::param_bit(other), b12.clone()));
            }
            deps.insert(j, EpsMatrix::from_terms(self.ring, &field, Var::Z, r, r, terms)?);
        }
        Ok(FormMatrix::new(dz, deps)?)
    }

    /// All curvature components of the total form.
    pub fn curvature(&self) -> Result<TwoForm> {
        Ok(curvature(&self.to_form()?)?)
    }

    /// Whether the curvature vanishes at the working precision.
    pub fn is_flat(&self) -> Result<bool> {
        Ok(self.curvature()?.is_zero())
    }

    /// The total form moved to another frame by a parameter-free gauge.
    pub fn transport(&self, g: &Gauge) -> Result<FormMatrix> {
        let ge = EpsMatrix::constant(self.ring, g.matrix());
        Ok(self.to_form()?.gauge(&ge)?)
    }

    /// The one-parameter lift obtained by setting `ε₁ = ε₂ = ε`.
    pub fn diagonal_restriction(&self) -> Result<HorizontalLift> {
        if self.ring != EpsRing::Bidual && self.ring != EpsRing::BidualTruncated {
            return Err(Error::InvalidInput("diagonal restriction needs two parameters".into()));
        }
        let sum = |map: &BTreeMap<u8, SeriesMatrix>| -> Result<SeriesMatrix> {
            let mut it = map.values();
            let first = it.next().ok_or_else(|| Error::InvalidInput("empty lift".into()))?.clone();
            it.try_fold(first, |acc, x| acc.add(x).map_err(Error::from))
        };
        Ok(HorizontalLift {
            base: self.base.clone(),
            ring: EpsRing::Dual,
            b: BTreeMap::from([(1, sum(&self.b)?)]),
            c: BTreeMap::from([(1, sum(&self.c)?)]),
            b12: None,
            c12: None,
            certified_window: self.certified_window,
        })
    }
}

/// `z^m dB/dz + [A, B]`, moved to the window starting at `0`.
fn correction(a: &SeriesMatrix, b: &SeriesMatrix, m: usize) -> Result<SeriesMatrix> {
    let deriv = b.derivative().shift(m as i64);
    let out = deriv.add(&a.commutator(b)?)?;
    regular_part(&out, "lift correction")
}

/// `B = Σ_{k, l ≤ m−2} r b_{k,l} z^{l+1−m} N^k / (−mr + lr + r + k)`, known up to `prec`.
pub fn ramified_lift_matrix(dir: &DeformationDirection, prec: i64) -> Result<SeriesMatrix> {
    let field = dir.field().clone();
    let (r, m) = (dir.r(), dir.m());
    let n = companion(&field, r, prec + m as i64, Var::Z)?;
    let mut out = SeriesMatrix::zero(&field, Var::Z, r, r, 1 - m as i64, prec)?;
    let mut power = SeriesMatrix::identity(&field, Var::Z, r, prec + m as i64)?;
    for k in 0..r {
        for l in 0..m - 1 {
            let b = dir.coeff(k, l);
            if b.is_zero() {
                continue;
            }
            let denom = -((m * r) as i64) + (l * r + r + k) as i64;
            let coeff = &(b * &field.int(r as i64)) / &field.int(denom);
            out = out.add(&power.shift(l as i64 + 1 - m as i64).scale(&coeff))?;
        }
        power = power.mul(&n)?;
    }
    Ok(out.truncate(prec)?)
}

fn certified_window(c: &SeriesMatrix, dir: &DeformationDirection) -> Result<i64> {
    let n = companion(dir.field(), dir.r(), c.prec(), Var::Z)?;
    let target = dir.numerator_matrix(&n)?;
    let diff = c.sub(&target)?;
    Ok(diff.valuation().unwrap_or(diff.prec()))
}

/// The one-parameter lift of an adapted connection at depth at least `2m−1` along `dir`.
pub fn lift_ramified(ac: &AdaptedConnection, dir: &DeformationDirection) -> Result<HorizontalLift> {
    let base = ac.connection();
    let m = base.pole_order();
    if dir.r() != base.rank() || dir.m() != m {
        return Err(Error::InvalidInput("direction shape does not match the connection".into()));
    }
    if ac.depth() < 2 * m as i64 - 1 {
        return Err(Error::NotAdaptedGauge(format!("depth {} is below {}", ac.depth(), 2 * m - 1)));
    }
    let b = ramified_lift_matrix(dir, base.prec() + 1)?;
    let c = correction(base.matrix(), &b, m)?;
    let window = certified_window(&c, dir)?;
    let lift = HorizontalLift {
        base: base.clone(),
        ring: EpsRing::Dual,
        b: BTreeMap::from([(1, b)]),
        c: BTreeMap::from([(1, c)]),
        b12: None,
        c12: None,
        certified_window: Some(window),
    };
    if !lift.is_flat()? {
        return Err(Error::AxiomViolation("one-parameter lift is not integrable".into()));
    }
    Ok(lift)
}

/// The lift at an unramified point: `B = diag(∫ μ_{k,v})` for `μ_{k,v} = Σ_j b_{k,j} z^j dz/z^m`.
pub fn lift_unramified(
    c: &Connection,
    mu: &UnramifiedExponentTuple,
    mu_dir: &[Vec<CycNum>],
) -> Result<HorizontalLift> {
    let (r, m) = (mu.r(), mu.m());
    if c.rank() != r || c.pole_order() != m {
        return Err(Error::InvalidInput("connection shape does not match the exponents".into()));
    }
    if mu_dir.len() != r || mu_dir.iter().any(|row| row.len() != m) {
        return Err(Error::InvalidInput(format!("unramified direction must be {r}×{m}")));
    }
    let field = c.field().clone();
    let mi = m as i64;
    let window = (2 * mi - 1).min(c.prec());
    let off = c.matrix().mask(|i, j| i != j);
    if off.valuation().is_some_and(|v| v < window) {
        return Err(Error::InvalidInput("connection is not diagonal modulo z^(2m-1)".into()));
    }
    if !c.matrix().mask(|i, j| i == j).agrees_below(&mu.numerator_matrix(c.prec())?, mi) {
        return Err(Error::InvalidInput("diagonal does not match the exponents modulo z^m".into()));
    }
    let mut diag = Vec::with_capacity(r);
    for (k, row) in mu_dir.iter().enumerate() {
        if !row[m - 1].is_zero() {
            return Err(Error::ResidueDeformation(k));
        }
        diag.push(row.clone());
    }
    let prec = c.prec() + 1;
    let mut coeffs = vec![Mat::zeros(&field, r, r); m.max(1)];
    for (k, row) in diag.iter().enumerate() {
        for (j, b) in row.iter().enumerate().take(m - 1) {
            let e = j as i64 + 1 - mi;
            coeffs[j].set(k, k, b / &field.int(e));
        }
    }
    let b = SeriesMatrix::new(&field, Var::Z, r, r, 1 - mi, prec, coeffs)?;
    let cm = correction(c.matrix(), &b, m)?;
    let lift = HorizontalLift {
        base: c.clone(),
        ring: EpsRing::Dual,
        b: BTreeMap::from([(1, b)]),
        c: BTreeMap::from([(1, cm)]),
        b12: None,
        c12: None,
        certified_window: None,
    };
    if !lift.is_flat()? {
        return Err(Error::AxiomViolation("unramified lift is not integrable".into()));
    }
    Ok(lift)
}

/// The lift at a logarithmic point: trivial, after checking the residue shape.
pub fn lift_logarithmic(c: &Connection, residues: &[CycNum]) -> Result<HorizontalLift> {
    if c.pole_order() != 1 {
        return Err(Error::NotLogarithmic(format!("pole order {} is not 1", c.pole_order())));
    }
    let r = c.rank();
    if residues.len() != r {
        return Err(Error::NotLogarithmic(format!("expected {r} residues")));
    }
    let res = c.matrix().coeff(0).expect("constant term is known");
    for i in 0..r {
        if res.get(i, i) != &residues[i] {
            return Err(Error::NotLogarithmic(format!("diagonal entry {i} differs from the residue")));
        }
        for j in i + 1..r {
            if !res.get(i, j).is_zero() {
                return Err(Error::NotLogarithmic("residue matrix is not lower triangular".into()));
            }
        }
    }
    let zero = SeriesMatrix::zero(c.field(), Var::Z, r, r, 0, c.prec())?;
    Ok(HorizontalLift {
        base: c.clone(),
        ring: EpsRing::Dual,
        b: BTreeMap::from([(1, zero.clone())]),
        c: BTreeMap::from([(1, zero)]),
        b12: None,
        c12: None,
        certified_window: None,
    })
}

/// A two-parameter lift with the data needed to audit it.
#[derive(Clone, Debug)]
pub struct TwoParameterLift {
    /// The lift over `C[ε₁,ε₂]/(ε₁², ε₂²)`.
    pub lift: HorizontalLift,
    /// `[C₁, B₂]`, equal to `[C₂, B₁]`.
    pub cross_term: SeriesMatrix,
}

/// The two-parameter lift of an adapted connection at depth at least `3m−1`.
pub fn lift_two_param(
    ac: &AdaptedConnection,
    dir1: &DeformationDirection,
    dir2: &DeformationDirection,
    dir12: Option<&DeformationDirection>,
) -> Result<TwoParameterLift> {
    let base = ac.connection();
    let m = base.pole_order();
    if ac.depth() < 3 * m as i64 - 1 {
        return Err(Error::NotAdaptedGauge(format!("depth {} is below {}", ac.depth(), 3 * m - 1)));
    }
    let one1 = lift_ramified(ac, dir1)?;
    let one2 = lift_ramified(ac, dir2)?;
    let (b1, c1) = (&one1.b[&1], &one1.c[&1]);
    let (b2, c2) = (&one2.b[&1], &one2.c[&1]);
    let zero_dir;
    let dir12 = match dir12 {
        Some(d) => d,
        None => {
            zero_dir = DeformationDirection::zero(base.field(), base.rank(), m)?;
            &zero_dir
        }
    };
    let b12 = ramified_lift_matrix(dir12, base.prec() + 1)?;
    let cross = c1.commutator(b2)?;
    let cross_other = c2.commutator(b1)?;
    if !cross.sub(&cross_other)?.is_zero() {
        return Err(Error::AxiomViolation("[C1, B2] differs from [C2, B1]".into()));
    }
    let c12 = correction(base.matrix(), &b12, m)?.add(&regular_part(&cross, "cross term")?)?;
    let lift = HorizontalLift {
        base: base.clone(),
        ring: EpsRing::Bidual,
        b: BTreeMap::from([(1, b1.clone()), (2, b2.clone())]),
        c: BTreeMap::from([(1, c1.clone()), (2, c2.clone())]),
        b12: Some(b12),
        c12: Some(c12),
        certified_window: one1.certified_window.min(one2.certified_window),
    };
    if !lift.is_flat()? {
        return Err(Error::AxiomViolation("two-parameter lift is not integrable".into()));
    }
    Ok(TwoParameterLift { lift, cross_term: cross })
}

fn forms_agree(a: &FormMatrix, b: &FormMatrix) -> Result<bool> {
    if a.ring != b.ring {
        return Ok(false);
    }
    if !a.dz.sub(&b.dz)?.is_zero() {
        return Ok(false);
    }
    for &j in a.ring.params() {
        if !a.deps_part(j).sub(&b.deps_part(j))?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A gauge `I + Σ ε_jQ_j + ε₁ε₂Q₁₂` with regular `Q` identifying two lifts.
#[derive(Clone, Debug)]
pub struct UniquenessTransform {
    /// The first-order terms `Q_j`.
    pub q: BTreeMap<u8, SeriesMatrix>,
    /// The mixed term of a two-parameter transform.
    pub q12: Option<SeriesMatrix>,
    /// The full gauge as a parameter matrix.
    pub gauge: EpsMatrix,
}

fn regular_or_not_equivalent(m: &SeriesMatrix, what: &str) -> Result<SeriesMatrix> {
    if let Some(v) = m.valuation().filter(|&v| v < 0) {
        return Err(Error::NotEquivalent(format!("{what} has a pole of order {}", -v)));
    }
    regular_part(m, what)
}

/// The ε-gauge carrying the form `b` to the form `a`, both lifts of one base connection.
pub fn uniqueness_transform_forms(a: &FormMatrix, b: &FormMatrix) -> Result<UniquenessTransform> {
    if a.ring != b.ring {
        return Err(Error::NotEquivalent("lifts live over different parameter rings".into()));
    }
    let ring = a.ring;
    let field = a.dz.field().clone();
    let var = a.dz.var();
    let r = a.dz.rows();
    let prec = a.dz.prec().unwrap_or(1).min(b.dz.prec().unwrap_or(1)).max(1);
    let id = SeriesMatrix::identity(&field, var, r, prec + 1)?;
    let mut q = BTreeMap::new();
    let mut terms = vec![(0u8, id)];
    for &j in ring.params() {
        let da = a.deps_part(j);
        let db = b.deps_part(j);
        let zero = SeriesMatrix::zero(&field, var, r, r, 0, prec)?;
        let diff = da.term(0).unwrap_or(&zero).sub(db.term(0).unwrap_or(&zero))?;
        let qj = regular_or_not_equivalent(&diff, "first-order transform")?;
        terms.push((crate::algebra::forms::param_bit(j), qj.clone()));
        q.insert(j, qj);
    }
    let first = EpsMatrix::from_terms(ring, &field, var, r, r, terms)?;
    let moved = b.gauge(&first)?;
    let (gauge, q12) = if ring == EpsRing::Bidual {
        let zero = SeriesMatrix::zero(&field, var, r, r, 0, prec)?;
        let diff = a.deps_part(1).sub(&moved.deps_part(1))?;
        let q12 = regular_or_not_equivalent(diff.term(2).unwrap_or(&zero), "mixed transform")?;
        let id = SeriesMatrix::identity(&field, var, r, prec + 1)?;
        let second = EpsMatrix::from_terms(ring, &field, var, r, r, [(0u8, id), (3u8, q12.clone())])?;
        (first.mul(&second)?, Some(q12))
    } else {
        (first, None)
    };
    let image = b.gauge(&gauge)?;
    if !forms_agree(a, &image)? {
        return Err(Error::NotEquivalent("no regular transform identifies the lifts".into()));
    }
    Ok(UniquenessTransform { q, q12, gauge })
}

/// The transform identifying `lift_b` with `lift_a`; in the one-parameter
/// ramified case `Q mod z^m` is also checked to be a polynomial in `N`.
pub fn uniqueness_transform(lift_a: &HorizontalLift, lift_b: &HorizontalLift) -> Result<UniquenessTransform> {
    if lift_a.base != lift_b.base {
        return Err(Error::NotEquivalent("lifts have different base connections".into()));
    }
    let out = uniqueness_transform_forms(&lift_a.to_form()?, &lift_b.to_form()?)?;
    if lift_a.certified_window.is_some() && lift_a.ring == EpsRing::Dual {
        let q = &out.q[&1];
        if !commutes_mod(q, lift_a.base.rank(), lift_a.base.pole_order() as i64)? {
            return Err(Error::AxiomViolation("transform is not a polynomial in N modulo z^m".into()));
        }
    }
    Ok(out)
}

/// Whether `q ≡ Σ_k q_{k,0} N^k` modulo `z^upto`.
pub fn commutes_mod(q: &SeriesMatrix, r: usize, upto: i64) -> Result<bool> {
    let field = q.field().clone();
    let n = companion(&field, r, upto.max(1), Var::Z)?;
    let mut poly = SeriesMatrix::zero(&field, Var::Z, r, r, 0, upto.max(1))?;
    let mut power = SeriesMatrix::identity(&field, Var::Z, r, upto.max(1))?;
    for k in 0..r {
        let fk = q.entry(k, 0);
        let fk_m = SeriesMatrix::from_entries(&[vec![fk]])?;
        let scaled = fk_m.map_coeffs(|c| Mat::identity(&field, r).scale(c.get(0, 0))).truncate(upto.max(1))?;
        poly = poly.add(&scaled.mul(&power)?)?;
        power = power.mul(&n)?;
    }
    Ok(q.agrees_below(&poly, upto))
}

/// Outcome of the bracket audit.
#[derive(Clone, Debug)]
pub struct BracketReport {
    /// Named checks and whether they held.
    pub checks: Vec<(String, bool)>,
}

impl BracketReport {
    /// Whether every check held.
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

/// Audits the matrix identities behind compatibility of lifts with brackets.
pub fn commutator_bracket_check(
    ac: &AdaptedConnection,
    dir1: &DeformationDirection,
    dir2: &DeformationDirection,
) -> Result<BracketReport> {
    let mut checks = Vec::new();
    let two = lift_two_param(ac, dir1, dir2, None)?;
    checks.push(("two-parameter lift is flat".to_string(), two.lift.is_flat()?));

    let sum = lift_ramified(ac, &dir1.add(dir2)?)?;
    let diag = two.lift.diagonal_restriction()?;
    let diagonal_ok = match uniqueness_transform(&sum, &diag) {
        Ok(t) => t.q[&1].is_zero(),
        Err(Error::NotEquivalent(_)) => false,
        Err(e) => return Err(e),
    };
    checks.push(("diagonal restriction equals the lift of the sum".to_string(), diagonal_ok));

    let l1 = lift_ramified(ac, dir1)?;
    let l2 = lift_ramified(ac, dir2)?;
    let additive = l1.b[&1].add(&l2.b[&1])?.sub(&sum.b[&1])?.is_zero();
    checks.push(("lift is additive in the direction".to_string(), additive));

    let t = ac.connection().field().frac(-3, 2);
    let scaled = lift_ramified(ac, &dir1.scale(&t))?;
    checks.push((
        "lift scales with the direction".to_string(),
        scaled.b[&1].sub(&l1.b[&1].scale(&t))?.is_zero(),
    ));

    let swapped = lift_two_param(ac, dir2, dir1, None)?;
    let anti = two.lift.c12.as_ref().expect("mixed term").sub(swapped.lift.c12.as_ref().expect("mixed term"))?;
    checks.push(("antisymmetrized mixed term vanishes".to_string(), anti.is_zero()));

    let m = ac.connection().pole_order() as i64;
    let val_ok = two.cross_term.valuation().is_none_or(|v| v >= m + 1);
    checks.push(("cross term is divisible by z^(m+1)".to_string(), val_ok));
    Ok(BracketReport { checks })
}

/// The field of a lift, for callers that only hold the lift.
pub fn lift_field(l: &HorizontalLift) -> &Field {
    l.base.field()
}

/// Moves a connection by a gauge and re-adapts it, for lifting in a general frame.
pub fn adapted_after_gauge(c: &Connection, g: &Gauge, nu: &RamifiedExponent, depth: i64) -> Result<AdaptedConnection> {
    AdaptedConnection::new(&gauge_transform(c, g)?, nu, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CycField;
    use crate::sample::{random_direction, random_exponent, scrambled_connection};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ints(field: &Field, rows: &[&[i64]]) -> Vec<Vec<CycNum>> {
        rows.iter().map(|row| row.iter().map(|&x| field.int(x)).collect()).collect()
    }

    fn adapted_normal(nu: &RamifiedExponent, depth: i64, prec: i64) -> AdaptedConnection {
        AdaptedConnection::new(&normal_matrix(nu, prec).unwrap(), nu, depth).unwrap()
    }

    #[test]
    fn normal_form_adapts_to_itself() {
        let f = CycField::new(1);
        let nu = RamifiedExponent::simple(&f, 2, 2).unwrap();
        let c = normal_matrix(&nu, 6).unwrap();
        let (g, ac) = adapt(&c, &nu, 3).unwrap();
        assert!(g.is_identity());
        assert!(ac.remainder().is_zero());
        assert!(matches!(
            adapt(&c.truncate(2).unwrap(), &nu, 3),
            Err(Error::Algebra(AlgebraError::PrecisionExhausted { .. }))
        ));
    }

    #[test]
    fn scrambled_connection_adapts() {
        let f = CycField::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let nu = random_exponent(&mut rng, &f, 2, 2).unwrap();
        let (c, _) = scrambled_connection(&mut rng, &nu, 7).unwrap();
        let (g, ac) = adapt(&c, &nu, 3).unwrap();
        assert_eq!(ac.depth(), 3);
        assert!(gauge_transform(&c, &g).unwrap().matrix().agrees_below(normal_matrix(&nu, 7).unwrap().matrix(), 3));
    }

    #[test]
    fn worked_ramified_example() {
        let f = CycField::new(1);
        let nu = RamifiedExponent::simple(&f, 2, 2).unwrap();
        let ac = adapted_normal(&nu, 3, 6);
        let dir = DeformationDirection::new(&f, 2, 2, ints(&f, &[&[5], &[7]])).unwrap();
        let lift = lift_ramified(&ac, &dir).unwrap();
        let b = &lift.b[&1];
        assert_eq!(b.valuation(), Some(-1));
        assert_eq!(b.coeff(-1).unwrap(), Mat::from_ints(&f, &[vec![-5, 0], vec![-14, -5]]));
        assert_eq!(b.coeff(0).unwrap(), Mat::from_ints(&f, &[vec![0, -14], vec![0, 0]]));
        let n = companion(&f, 2, lift.c[&1].prec(), Var::Z).unwrap();
        assert_eq!(lift.c[&1], dir.numerator_matrix(&n).unwrap());
        assert_eq!(lift.certified_window, Some(lift.c[&1].prec()));
        assert!(lift.is_flat().unwrap());
    }

    #[test]
    fn zero_direction_gives_zero_lift() {
        let f = CycField::new(1);
        let nu = RamifiedExponent::simple(&f, 3, 2).unwrap();
        let ac = adapted_normal(&nu, 3, 6);
        let lift = lift_ramified(&ac, &DeformationDirection::zero(&f, 3, 2).unwrap()).unwrap();
        assert!(lift.b[&1].is_zero() && lift.c[&1].is_zero());
    }

    #[test]
    fn corrupted_lift_is_curved() {
        let f = CycField::new(1);
        let nu = RamifiedExponent::simple(&f, 2, 2).unwrap();
        let ac = adapted_normal(&nu, 3, 6);
        let dir = DeformationDirection::new(&f, 2, 2, ints(&f, &[&[1], &[1]])).unwrap();
        let mut lift = lift_ramified(&ac, &dir).unwrap();
        let bump = SeriesMatrix::monomial(&Mat::from_ints(&f, &[vec![0, 1], vec![0, 0]]), Var::Z, 0, 7).unwrap();
        let b = lift.b[&1].add(&bump).unwrap();
        lift.b.insert(1, b);
        let curv = lift.curvature().unwrap();
        assert!(!curv.dz_deps[&1].is_zero());
    }

    #[test]
    fn scrambled_lift_window_is_reported() {
        let f = CycField::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (r, m) in [(2, 2), (3, 2), (2, 3)] {
            let nu = random_exponent(&mut rng, &f, r, m).unwrap();
            let depth = 2 * m as i64 - 1;
            let (c, _) = scrambled_connection(&mut rng, &nu, depth + 4).unwrap();
            let (_, ac) = adapt(&c, &nu, depth).unwrap();
            let dir = random_direction(&mut rng, &f, r, m).unwrap();
            let lift = lift_ramified(&ac, &dir).unwrap();
            assert!(lift.is_flat().unwrap());
            assert!(lift.certified_window.unwrap() >= m as i64);
            assert!(lift.c[&1].valuation().is_none_or(|v| v >= 0));
        }
    }

    #[test]
    fn unramified_lift() {
        let f = CycField::new(1);
        let mu = UnramifiedExponentTuple::new(&f, 2, 2, ints(&f, &[&[1, 0], &[-1, 0]])).unwrap();
        let c = Connection::new(mu.numerator_matrix(5).unwrap(), 2).unwrap();
        let dir = ints(&f, &[&[3, 0], &[0, 0]]);
        let lift = lift_unramified(&c, &mu, &dir).unwrap();
        assert_eq!(lift.b[&1].coeff(-1).unwrap(), Mat::from_ints(&f, &[vec![-3, 0], vec![0, 0]]));
        assert!(lift.is_flat().unwrap());
        let zero = lift_unramified(&c, &mu, &ints(&f, &[&[0, 0], &[0, 0]])).unwrap();
        assert!(zero.b[&1].is_zero() && zero.c[&1].is_zero());
        assert!(matches!(
            lift_unramified(&c, &mu, &ints(&f, &[&[0, 0], &[0, 2]])),
            Err(Error::ResidueDeformation(1))
        ));
    }

    #[test]
    fn logarithmic_lift() {
        let f = CycField::new(1);
        let res = Mat::from_ints(&f, &[vec![1, 0], vec![4, 2]]);
        let c = Connection::new(SeriesMatrix::constant(&res, Var::Z, 3).unwrap(), 1).unwrap();
        let lift = lift_logarithmic(&c, &[f.int(1), f.int(2)]).unwrap();
        assert!(lift.b[&1].is_zero());
        assert!(lift.is_flat().unwrap());
        let irregular = Connection::new(SeriesMatrix::constant(&res, Var::Z, 3).unwrap(), 2).unwrap();
        assert!(matches!(lift_logarithmic(&irregular, &[f.int(1), f.int(2)]), Err(Error::NotLogarithmic(_))));
    }

    #[test]
    fn two_parameter_lift_and_claim() {
        let f = CycField::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for (r, m) in [(2, 2), (3, 2), (2, 3)] {
            let nu = random_exponent(&mut rng, &f, r, m).unwrap();
            let depth = 3 * m as i64 - 1;
            let (c, _) = scrambled_connection(&mut rng, &nu, depth + 3).unwrap();
            let (_, ac) = adapt(&c, &nu, depth).unwrap();
            let d1 = random_direction(&mut rng, &f, r, m).unwrap();
            let d2 = random_direction(&mut rng, &f, r, m).unwrap();
            let d12 = random_direction(&mut rng, &f, r, m).unwrap();
            let two = lift_two_param(&ac, &d1, &d2, Some(&d12)).unwrap();
            assert!(two.lift.is_flat().unwrap());
            assert!(two.cross_term.valuation().is_none_or(|v| v >= m as i64 + 1));
        }
    }

    #[test]
    fn uniqueness_recovers_polynomial_gauge() {
        let f = CycField::new(1);
        let nu = RamifiedExponent::simple(&f, 2, 2).unwrap();
        let ac = adapted_normal(&nu, 3, 7);
        let dir = DeformationDirection::new(&f, 2, 2, ints(&f, &[&[1], &[2]])).unwrap();
        let lift = lift_ramified(&ac, &dir).unwrap();
        let same = uniqueness_transform(&lift, &lift).unwrap();
        assert!(same.q[&1].is_zero());

        let n = companion(&f, 2, 8, Var::Z).unwrap();
        let poly = n.scale(&f.int(3)).add(&SeriesMatrix::identity(&f, Var::Z, 2, 8).unwrap()).unwrap();
        let id = SeriesMatrix::identity(&f, Var::Z, 2, 8).unwrap();
        let g = EpsMatrix::from_terms(EpsRing::Dual, &f, Var::Z, 2, 2, [(0, id), (1, poly.clone())]).unwrap();
        let moved = lift.to_form().unwrap().gauge(&g).unwrap();
        let t = uniqueness_transform_forms(&lift.to_form().unwrap(), &moved).unwrap();
        assert!(t.q[&1].agrees_below(&poly.neg(), 6));

        let other = DeformationDirection::new(&f, 2, 2, ints(&f, &[&[1], &[3]])).unwrap();
        let lift2 = lift_ramified(&ac, &other).unwrap();
        assert!(matches!(uniqueness_transform(&lift, &lift2), Err(Error::NotEquivalent(_))));
    }

    #[test]
    fn two_parameter_uniqueness() {
        let f = CycField::new(1);
        let nu = RamifiedExponent::simple(&f, 2, 2).unwrap();
        let ac = adapted_normal(&nu, 5, 9);
        let d1 = DeformationDirection::new(&f, 2, 2, ints(&f, &[&[1], &[2]])).unwrap();
        let d2 = DeformationDirection::new(&f, 2, 2, ints(&f, &[&[-1], &[1]])).unwrap();
        let two = lift_two_param(&ac, &d1, &d2, None).unwrap().lift;
        let form = two.to_form().unwrap();
        let id = SeriesMatrix::identity(&f, Var::Z, 2, 10).unwrap();
        let q1 = SeriesMatrix::monomial(&Mat::from_ints(&f, &[vec![1, 2], vec![0, 1]]), Var::Z, 1, 10).unwrap();
        let q2 = SeriesMatrix::constant(&Mat::from_ints(&f, &[vec![0, 1], vec![1, 0]]), Var::Z, 10).unwrap();
        let q12 = SeriesMatrix::constant(&Mat::from_ints(&f, &[vec![2, 0], vec![0, 0]]), Var::Z, 10).unwrap();
        let g = EpsMatrix::from_terms(EpsRing::Bidual, &f, Var::Z, 2, 2, [(0, id), (1, q1), (2, q2), (3, q12)])
            .unwrap();
        let moved = form.gauge(&g).unwrap();
        let t = uniqueness_transform_forms(&form, &moved).unwrap();
        assert!(t.q12.is_some());
        assert!(forms_agree(&form, &moved.gauge(&t.gauge).unwrap()).unwrap());
    }

    #[test]
    fn bracket_report_passes() {
        let f = CycField::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let nu = random_exponent(&mut rng, &f, 2, 2).unwrap();
        let (c, _) = scrambled_connection(&mut rng, &nu, 8).unwrap();
        let (_, ac) = adapt(&c, &nu, 5).unwrap();
        let d1 = random_direction(&mut rng, &f, 2, 2).unwrap();
        let d2 = random_direction(&mut rng, &f, 2, 2).unwrap();
        let report = commutator_bracket_check(&ac, &d1, &d2).unwrap();
        assert!(report.all_passed(), "{:?}", report.checks);
        let same = commutator_bracket_check(&ac, &d1, &d1).unwrap();
        assert!(same.all_passed());
    }
}
