// SPDX-License-Identifier: MIT OR Apache-2.0
//! Reduction of a generic ramified connection to its normal form
//! `ν(N) + x^{m−1} R_r` by a sequence of explicit polynomial gauges.
//!
//! The reduction first finds a frame in which the connection agrees with the
//! normal form modulo `x^{m−1}` and has a strictly lower triangular defect at
//! order `m−1`. It then runs one elementary step per pair `(q′, s)` with
//! `m ≤ q′ ≤ q` and `1 ≤ s ≤ r`, stopping after `(q, r−1)`. Each step solves
//! a cyclic system for one scalar `c` and a vector `b`, and is checked
//! afterwards against the invariant the next step needs.

use crate::algebra::{AlgebraError, CycNum, Field, FieldExt, Mat, SeriesMatrix, Var};
use crate::connection::{companion, gauge_transform, normal_matrix_unchecked, Connection, Gauge};
use crate::error::{Error, Result};
use crate::exponent::{validate_exponent, RamifiedExponent};

/// Record of one elementary reduction step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    /// Order index `q′` of the step.
    pub order: i64,
    /// Shift index `s` of the step, in `1..=r`.
    pub shift: usize,
    /// Scalar coefficient `c` of the `x^{q′−m} N^s` part.
    pub c: CycNum,
    /// Coefficients `b_0 = 0, b_1, …, b_{r−1}` of the diagonal part.
    pub b: Vec<CycNum>,
}

/// Result of a successful normalization.
#[derive(Clone, Debug)]
pub struct NormalizeOutcome {
    /// Gauge `G` with `G·input ≡ normal form` modulo `x^q`, known to the input precision.
    pub gauge: Gauge,
    /// The normalized connection at the certified precision `q`.
    pub connection: Connection,
    /// The gauge-transformed input at the full input precision.
    pub transformed: Connection,
    /// Elementary steps in execution order.
    pub trace: Vec<ReductionStep>,
}

/// The ordered list of `(q′, s)` pairs run by the reduction to order `q`.
pub fn reduction_schedule(m: usize, r: usize, q: i64) -> Vec<(i64, usize)> {
    let mut out = Vec::new();
    let m = m as i64;
    for qp in m..=q {
        let last = if qp == q { r - 1 } else { r };
        for s in 1..=last {
            out.push((qp, s));
        }
    }
    out
}

/// A hypothesis violation: column, row, exponent and offending coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Column index `k`.
    pub column: usize,
    /// Row index.
    pub row: usize,
    /// Exponent of the offending coefficient.
    pub exponent: i64,
    /// Offending coefficient.
    pub value: CycNum,
}

/// Lowest exponent allowed in row `row` of column `k` of the defect before step `(q′, s)`.
fn allowed_valuation(r: usize, qp: i64, s: usize, k: usize, row: usize) -> i64 {
    if k + s < r {
        if row >= k + s { qp - 1 } else { qp }
    } else if row >= k + s - r {
        qp
    } else {
        qp + 1
    }
}

/// Checks that the defect `A − A_norm` is small enough for step `(q′, s)`,
/// looking only at exponents below `upto`.
pub fn check_hypothesis(defect: &SeriesMatrix, r: usize, qp: i64, s: usize, upto: i64) -> Option<Violation> {
    let top = upto.min(defect.prec());
    for k in 0..r {
        for row in 0..r {
            let allowed = allowed_valuation(r, qp, s, k, row);
            for e in defect.ord().max(0)..top.min(allowed) {
                let v = defect.coeff(e).expect("known coefficient").get(row, k).clone();
                if !v.is_zero() {
                    return Some(Violation { column: k, row, exponent: e, value: v });
                }
            }
        }
    }
    None
}

/// Working state of the reduction after the frame has been prepared.
#[derive(Clone, Debug)]
pub struct ReductionState {
    nu: RamifiedExponent,
    target: i64,
    normal: SeriesMatrix,
    current: Connection,
    gauge: Gauge,
    trace: Vec<ReductionStep>,
}

impl ReductionState {
    /// Prepares the frame for `c` so that the first step `(m, 1)` applies.
    pub fn new(c: &Connection, nu: &RamifiedExponent, q: i64) -> Result<ReductionState> {
        validate_exponent(nu)?;
        check_compatible(c, nu)?;
        let m = nu.m() as i64;
        if q < m {
            return Err(Error::InvalidInput(format!("target order {q} is below the pole order {m}")));
        }
        if c.prec() < q {
            return Err(AlgebraError::PrecisionExhausted { ord: 0, prec: c.prec() }.into());
        }
        let p = c.prec();
        let normal = normal_matrix_unchecked(nu, p, Var::Z)?.matrix().clone();
        let field = nu.field().clone();
        let r = nu.r();

        let first = leading_frame(c, &normal, &field, r, m)?;
        let mid = gauge_transform(c, &first)?;
        let second = triangular_frame(&mid, &normal, &field, r, m)?;
        let current = gauge_transform(&mid, &second)?;
        let gauge = first.compose(&second)?;
        let state = ReductionState { nu: nu.clone(), target: q, normal, current, gauge, trace: Vec::new() };
        state.require(m, 1)?;
        Ok(state)
    }

    /// Current connection.
    pub fn connection(&self) -> &Connection {
        &self.current
    }

    /// Accumulated gauge.
    pub fn gauge(&self) -> &Gauge {
        &self.gauge
    }

    /// Steps run so far.
    pub fn trace(&self) -> &[ReductionStep] {
        &self.trace
    }

    fn defect(&self) -> Result<SeriesMatrix> {
        Ok(self.current.matrix().sub(&self.normal)?)
    }

    fn require(&self, qp: i64, s: usize) -> Result<()> {
        let r = self.nu.r();
        let (qp, s) = if s > r { (qp + 1, 1) } else { (qp, s) };
        match check_hypothesis(&self.defect()?, r, qp, s, self.target) {
            None => Ok(()),
            Some(v) => Err(Error::ResidualMismatch { qprime: qp, s, k: v.column, residual: v.value }),
        }
    }

    /// Runs the elementary step `(q′, s)`; the state must satisfy its hypothesis.
    pub fn step(&mut self, qp: i64, s: usize) -> Result<&ReductionStep> {
        let r = self.nu.r();
        let m = self.nu.m() as i64;
        let field = self.nu.field().clone();
        let defect = self.defect()?;
        let known = |e: i64, row: usize, col: usize| -> CycNum {
            if e < self.target {
                defect.coeff(e).expect("known coefficient").get(row, col).clone()
            } else {
                field.zero()
            }
        };
        let residuals: Vec<CycNum> = (0..r)
            .map(|k| if k + s < r { known(qp - 1, k + s, k) } else { known(qp, k + s - r, k) })
            .collect();
        let weight = field.int((qp - m) * r as i64 + s as i64);
        let total = residuals.iter().fold(field.zero(), |acc, x| &acc + x);
        let c = -(&total / &weight);
        let lead_inv = self.nu.coeff(1, 0).inv()?;
        let drift = &(&weight * &c) / &field.int(r as i64);
        let mut b = vec![field.zero(); r];
        for k in 0..r - 1 {
            b[k + 1] = &b[k] + &(&(&residuals[k] + &drift) * &lead_inv);
        }

        let p = self.current.prec();
        let gauge = Gauge::from_matrix(&step_gauge(&field, r, m, qp, s, &c, &b, p)?)?;
        self.current = gauge_transform(&self.current, &gauge)?;
        self.gauge = self.gauge.compose(&gauge)?;
        self.trace.push(ReductionStep { order: qp, shift: s, c, b });
        self.require(qp, s + 1)?;
        Ok(self.trace.last().expect("just pushed"))
    }

    /// Runs every remaining step and checks the composite gauge against the input.
    pub fn finish(mut self, input: &Connection) -> Result<NormalizeOutcome> {
        let schedule = reduction_schedule(self.nu.m(), self.nu.r(), self.target);
        for &(qp, s) in &schedule[self.trace.len()..] {
            self.step(qp, s)?;
        }
        let check = gauge_transform(input, &self.gauge)?;
        if check != self.current {
            return Err(Error::AxiomViolation("composite gauge does not reproduce the reduction".into()));
        }
        let connection = self.current.truncate(self.target)?;
        Ok(NormalizeOutcome { gauge: self.gauge, connection, transformed: self.current, trace: self.trace })
    }
}

fn check_compatible(c: &Connection, nu: &RamifiedExponent) -> Result<()> {
    if c.rank() != nu.r() {
        return Err(Error::InvalidInput(format!("connection rank {} differs from ramification {}", c.rank(), nu.r())));
    }
    if c.pole_order() != nu.m() {
        return Err(Error::InvalidInput(format!(
            "connection pole order {} differs from the exponent's {}",
            c.pole_order(),
            nu.m()
        )));
    }
    if c.var() != Var::Z {
        return Err(AlgebraError::VariableMismatch.into());
    }
    if c.field().order() != nu.field().order() {
        return Err(AlgebraError::OrderMismatch(c.field().order(), nu.field().order()).into());
    }
    Ok(())
}

/// `I + c x^{q′−m} N^s + x^{q′−1} N^{s−1} diag(b)`, exact up to `prec`.
#[allow(clippy::too_many_arguments)]
fn step_gauge(
    field: &Field,
    r: usize,
    m: i64,
    qp: i64,
    s: usize,
    c: &CycNum,
    b: &[CycNum],
    prec: i64,
) -> Result<SeriesMatrix> {
    let n = companion(field, r, prec, Var::Z)?;
    let id = SeriesMatrix::identity(field, Var::Z, r, prec)?;
    let shift_part = n.pow(s)?.scale(c).shift(qp - m);
    let diag = Mat::diag(field, b);
    let diag_part = n.pow(s - 1)?.right_mul_const(&diag).shift(qp - 1);
    Ok(id.add(&shift_part)?.add(&diag_part)?.truncate(prec)?)
}

/// Solves a linear condition on polynomial gauges `Σ_{j<len} P_j x^j` and
/// returns a basis of the solutions.
fn solve_frames(
    field: &Field,
    r: usize,
    len: i64,
    eval: impl Fn(&SeriesMatrix) -> Result<Vec<CycNum>>,
) -> Result<Vec<SeriesMatrix>> {
    let mut unknowns = Vec::new();
    for j in 0..len {
        for a in 0..r {
            for b in 0..r {
                let mut e = Mat::zeros(field, r, r);
                e.set(a, b, field.one());
                unknowns.push(SeriesMatrix::monomial(&e, Var::Z, j, len)?.extend_ord(0));
            }
        }
    }
    let cols: Vec<Vec<CycNum>> = unknowns.iter().map(&eval).collect::<Result<_>>()?;
    let rows = cols.first().map_or(0, Vec::len);
    let system = Mat::from_cols(field, rows, &cols);
    let mut basis = Vec::new();
    for v in system.nullspace() {
        let mut acc = SeriesMatrix::zero(field, Var::Z, r, r, 0, len)?;
        for (x, u) in v.iter().zip(&unknowns) {
            if !x.is_zero() {
                acc = acc.add(&u.scale(x))?;
            }
        }
        basis.push(acc);
    }
    Ok(basis)
}

/// Picks an invertible element of the solution space: the identity if it
/// solves the condition, otherwise `Σ t^i basis_i` for the first `t = 1, 2, …`
/// with invertible constant term.
fn pick_invertible(
    field: &Field,
    r: usize,
    len: i64,
    basis: &[SeriesMatrix],
    eval: impl Fn(&SeriesMatrix) -> Result<Vec<CycNum>>,
) -> Result<Option<SeriesMatrix>> {
    let id = SeriesMatrix::identity(field, Var::Z, r, len)?;
    if eval(&id)?.iter().all(CycNum::is_zero) {
        return Ok(Some(id));
    }
    if basis.is_empty() {
        return Ok(None);
    }
    let tries = (r * basis.len() + 1) as i64;
    for t in 1..=tries {
        let tf = field.int(t);
        let mut weight = field.one();
        let mut acc = SeriesMatrix::zero(field, Var::Z, r, r, 0, len)?;
        for u in basis {
            acc = acc.add(&u.scale(&weight))?;
            weight = &weight * &tf;
        }
        if acc.coeff(0).expect("constant term").rank() == r {
            return Ok(Some(acc));
        }
    }
    Ok(None)
}

fn flatten(m: &SeriesMatrix, below: i64, out: &mut Vec<CycNum>) {
    for e in 0..below {
        let c = m.coeff(e).expect("known coefficient");
        for i in 0..c.rows() {
            for j in 0..c.cols() {
                out.push(c.get(i, j).clone());
            }
        }
    }
}

/// Gauge making the connection agree with the normal form modulo `x^{m−1}`.
fn leading_frame(c: &Connection, normal: &SeriesMatrix, field: &Field, r: usize, m: i64) -> Result<Gauge> {
    let len = m - 1;
    let a = c.matrix().truncate(len)?;
    let target = normal.truncate(len)?;
    let eval = |p: &SeriesMatrix| -> Result<Vec<CycNum>> {
        let lhs = a.mul(p)?.sub(&p.mul(&target)?)?;
        let mut out = Vec::new();
        flatten(&lhs, len, &mut out);
        Ok(out)
    };
    let basis = solve_frames(field, r, len, eval)?;
    let p = pick_invertible(field, r, len, &basis, eval)?.ok_or(Error::FrameNotFound)?;
    Gauge::from_matrix(&p.with_exact_prec(c.prec()))
}

/// Gauge making the order-`(m−1)` defect strictly lower triangular while
/// keeping agreement modulo `x^{m−1}`.
fn triangular_frame(c: &Connection, normal: &SeriesMatrix, field: &Field, r: usize, m: i64) -> Result<Gauge> {
    let len = m;
    let a = c.matrix().truncate(len)?;
    let target = normal.truncate(len)?;
    let eval = |p: &SeriesMatrix| -> Result<Vec<CycNum>> {
        let lhs = a.mul(p)?.sub(&p.mul(&target)?)?;
        let mut out = Vec::new();
        flatten(&lhs, len - 1, &mut out);
        let top = lhs.coeff(len - 1).expect("known coefficient");
        for i in 0..r {
            for j in i..r {
                out.push(top.get(i, j).clone());
            }
        }
        Ok(out)
    };
    let basis = solve_frames(field, r, len, eval)?;
    let p = pick_invertible(field, r, len, &basis, eval)?.ok_or(Error::FrameNotFound)?;
    Gauge::from_matrix(&p.with_exact_prec(c.prec()))
}

/// Brings `c` to the normal form of `ν` modulo `x^q`.
pub fn normalize(c: &Connection, nu: &RamifiedExponent, q: i64) -> Result<NormalizeOutcome> {
    ReductionState::new(c, nu, q)?.finish(c)
}

/// A gauge carrying `a` to `b` modulo `x^q` when both are generic for `ν`.
pub fn formal_iso(a: &Connection, b: &Connection, nu: &RamifiedExponent, q: i64) -> Result<Gauge> {
    let ga = normalize(a, nu, q)?.gauge;
    let gb = normalize(b, nu, q)?.gauge;
    ga.compose(&gb.inverse())
}

/// Number of elementary steps run by the reduction to order `q`.
pub fn step_count(m: usize, r: usize, q: i64) -> usize {
    reduction_schedule(m, r, q).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CycField;
    use crate::connection::normal_matrix;

    fn scramble(field: &Field, r: usize, prec: i64, seed: i64) -> Gauge {
        let mut coeffs = Vec::new();
        for e in 0..3 {
            coeffs.push(Mat::from_fn(field, r, r, |i, j| {
                let v = (seed * 7 + (i as i64) * 3 + (j as i64) * 5 + e * 11) % 5 - 2;
                if e == 0 && i == j {
                    field.int(v.abs() + 1)
                } else if e == 0 && j > i {
                    field.zero()
                } else {
                    field.int(v)
                }
            }));
        }
        let p = SeriesMatrix::new(field, Var::Z, r, r, 0, prec, coeffs).unwrap();
        Gauge::from_matrix(&p).unwrap()
    }

    #[test]
    fn schedule_length() {
        assert_eq!(step_count(2, 2, 2), 1);
        assert_eq!(step_count(2, 2, 4), 5);
        assert_eq!(step_count(3, 3, 5), 8);
    }

    #[test]
    fn normal_form_is_fixed() {
        let f = CycField::new(1);
        let nu = RamifiedExponent::simple(&f, 2, 2).unwrap();
        let c = normal_matrix(&nu, 6).unwrap();
        let out = normalize(&c, &nu, 5).unwrap();
        assert!(out.gauge.is_identity());
        assert!(out.trace.iter().all(|s| s.c.is_zero() && s.b.iter().all(CycNum::is_zero)));
    }

    #[test]
    fn scrambled_normal_forms_are_recovered() {
        let f = CycField::new(1);
        for (r, m) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
            let a: Vec<Vec<CycNum>> = (0..r)
                .map(|k| {
                    (0..m)
                        .map(|l| if k >= 1 && l == m - 1 { f.zero() } else { f.int(((k * 3 + l * 2) % 5) as i64 - 1) })
                        .collect()
                })
                .collect();
            let mut a = a;
            a[1][0] = f.int(2);
            let nu = RamifiedExponent::new(&f, r, m, a).unwrap();
            let q = m as i64 + 2;
            let prec = q + 1;
            let base = normal_matrix(&nu, prec).unwrap();
            let g = scramble(&f, r, prec, (r + m) as i64);
            let c = gauge_transform(&base, &g).unwrap();
            let out = normalize(&c, &nu, q).unwrap();
            assert_eq!(out.trace.len(), step_count(m, r, q));
            assert_eq!(out.connection, normal_matrix(&nu, q).unwrap());
            assert_eq!(gauge_transform(&c, &out.gauge).unwrap().truncate(q).unwrap(), out.connection);
        }
    }

    #[test]
    fn diagonal_connection_is_rejected() {
        let f = CycField::new(1);
        let nu = RamifiedExponent::simple(&f, 2, 2).unwrap();
        let d = SeriesMatrix::constant(&Mat::from_ints(&f, &[vec![1, 0], vec![0, -1]]), Var::Z, 4).unwrap();
        let c = Connection::new(d, 2).unwrap();
        let err = normalize(&c, &nu, 3).unwrap_err();
        assert!(matches!(err, Error::FrameNotFound | Error::ResidualMismatch { .. }), "{err:?}");
    }

    #[test]
    fn formal_iso_links_two_scrambles() {
        let f = CycField::new(1);
        let nu = RamifiedExponent::simple(&f, 3, 2).unwrap();
        let base = normal_matrix(&nu, 6).unwrap();
        let a = gauge_transform(&base, &scramble(&f, 3, 6, 1)).unwrap();
        let b = gauge_transform(&base, &scramble(&f, 3, 6, 4)).unwrap();
        let g = formal_iso(&a, &b, &nu, 5).unwrap();
        let moved = gauge_transform(&a, &g).unwrap();
        assert!(moved.matrix().agrees_below(b.matrix(), 5));
    }

    #[test]
    fn residue_slot_term_is_absorbed() {
        let f = CycField::new(1);
        let nu = RamifiedExponent::simple(&f, 2, 2).unwrap();
        let base = normal_matrix(&nu, 6).unwrap();
        let extra = companion(&f, 2, 6, Var::Z).unwrap().shift(1).truncate(6).unwrap();
        let c = Connection::new(base.matrix().add(&extra).unwrap(), 2).unwrap();
        let out = normalize(&c, &nu, 5).unwrap();
        assert_eq!(out.connection, normal_matrix(&nu, 5).unwrap());
        assert_eq!(gauge_transform(&c, &out.gauge).unwrap().truncate(5).unwrap(), out.connection);
    }

    #[test]
    fn step_out_of_order_reports_residual_mismatch() {
        let f = CycField::new(1);
        let nu = RamifiedExponent::simple(&f, 2, 2).unwrap();
        let base = normal_matrix(&nu, 6).unwrap();
        let c = gauge_transform(&base, &scramble(&f, 2, 6, 3)).unwrap();
        let mut state = ReductionState::new(&c, &nu, 4).unwrap();
        let err = state.step(3, 1).unwrap_err();
        assert!(matches!(err, Error::ResidualMismatch { .. }), "{err:?}");
    }

    #[test]
    fn incompatible_exponent_is_rejected() {
        let f = CycField::new(1);
        let nu = RamifiedExponent::simple(&f, 2, 2).unwrap();
        let mut table = vec![vec![f.zero(); 2]; 2];
        table[1][0] = f.int(2);
        let other = RamifiedExponent::new(&f, 2, 2, table).unwrap();
        let c = normal_matrix(&other, 5).unwrap();
        let err = normalize(&c, &nu, 4).unwrap_err();
        assert!(matches!(err, Error::FrameNotFound | Error::ResidualMismatch { .. }), "{err:?}");
        let formal = formal_iso(&normal_matrix(&nu, 5).unwrap(), &c, &nu, 4).unwrap_err();
        assert_eq!(formal.class(), err.class());
    }
}
