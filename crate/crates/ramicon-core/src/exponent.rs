// SPDX-License-Identifier: MIT OR Apache-2.0
//! Exponent data of ramified, unramified and unfolded singular points.
//!
//! A ramified exponent of rank `r` and pole order `m` is the one-form
//! `ν(w) = Σ_{k,l} a_{k,l} z^l w^k dz/z^m` with `w^r = z`. Evaluating it at a
//! matrix `N` with `N^r = z` gives the leading part of the normal form.
//!
//! The unfolded family replaces `z^m` by `(z − h^r q_1)⋯(z − h^r q_{m−1})(z − h^r)`
//! and splits the pole into `m` simple poles for `h ≠ 0`.

use std::collections::BTreeMap;

use crate::algebra::cycpoly;
use crate::algebra::forms::{EpsMatrix, EpsRing, FormMatrix};
use crate::algebra::{AlgebraError, CycNum, Field, FieldExt, Mat, SeriesMatrix, TruncSeries, Var};
use crate::error::{Error, Result};

fn check_table(table: &[Vec<CycNum>], rows: usize, cols: usize, what: &str) -> Result<()> {
    if table.len() != rows || table.iter().any(|row| row.len() != cols) {
        return Err(Error::InvalidInput(format!("{what} must be a {rows}×{cols} table")));
    }
    Ok(())
}

/// `Σ_{k,l} table[k][l] z^l N^k`, known up to the precision of `n`.
fn evaluate_table(field: &Field, table: &[Vec<CycNum>], n: &SeriesMatrix) -> Result<SeriesMatrix> {
    let r = n.rows();
    let prec = n.prec();
    let mut acc = SeriesMatrix::zero(field, n.var(), r, r, 0, prec)?;
    let mut power = SeriesMatrix::identity(field, n.var(), r, prec)?;
    for (k, row) in table.iter().enumerate() {
        if k > 0 {
            power = power.mul(n)?;
        }
        for (l, c) in row.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&power.scale(c).shift(l as i64).truncate(prec)?)?;
            }
        }
    }
    Ok(acc.truncate(prec)?)
}

/// Ramified exponent `ν(w) = Σ a_{k,l} z^l w^k dz/z^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamifiedExponent {
    field: Field,
    r: usize,
    m: usize,
    a: Vec<Vec<CycNum>>,
}

impl RamifiedExponent {
    /// Builds an exponent from its `r × m` coefficient table `a[k][l]`.
    ///
    /// Only the shape is checked here; see [`validate_exponent`].
    pub fn new(field: &Field, r: usize, m: usize, a: Vec<Vec<CycNum>>) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidInput(format!("rank r = {r} must be at least 2")));
        }
        if m < 2 {
            return Err(Error::InvalidInput(format!("pole order m = {m} must be at least 2")));
        }
        check_table(&a, r, m, "exponent coefficients")?;
        if a.iter().flatten().any(|c| c.field().order() != field.order()) {
            return Err(AlgebraError::OrderMismatch(field.order(), 0).into());
        }
        Ok(RamifiedExponent { field: field.clone(), r, m, a })
    }

    /// The exponent `w dz/z^m` (only `a_{1,0} = 1`).
    pub fn simple(field: &Field, r: usize, m: usize) -> Result<Self> {
        let mut a = vec![vec![field.zero(); m]; r];
        a[1][0] = field.one();
        Self::new(field, r, m, a)
    }

    /// Coefficient field.
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Rank `r`.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Pole order `m`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Coefficient `a_{k,l}`.
    pub fn coeff(&self, k: usize, l: usize) -> &CycNum {
        &self.a[k][l]
    }

    /// The full coefficient table.
    pub fn table(&self) -> &[Vec<CycNum>] {
        &self.a
    }

    /// The residue-level coefficient `a_{0,m−1}`.
    pub fn residue_constant(&self) -> &CycNum {
        &self.a[0][self.m - 1]
    }

    /// Checks the admissibility conditions.
    pub fn validate(&self) -> Result<()> {
        validate_exponent(self)
    }

    /// Numerator `Σ a_{k,l} z^l N^k` at the precision of `n`.
    pub fn numerator_matrix(&self, n: &SeriesMatrix) -> Result<SeriesMatrix> {
        if n.rows() != self.r || n.cols() != self.r {
            return Err(Error::InvalidInput("N must be r×r".into()));
        }
        evaluate_table(&self.field, &self.a, n)
    }

    /// Numerator `ν_k(z) = Σ_l a_{k,l} z^l` of the `w^k` component.
    pub fn component(&self, k: usize, var: Var, prec: i64) -> Result<TruncSeries> {
        let len = (self.m as i64).min(prec).max(0) as usize;
        Ok(TruncSeries::new(&self.field, var, 0, prec, self.a[k][..len].to_vec())?)
    }
}

/// Checks `a_{1,0} ≠ 0` and `a_{k,m−1} = 0` for `k ≥ 1`.
pub fn validate_exponent(nu: &RamifiedExponent) -> Result<()> {
    if nu.a[1][0].is_zero() {
        return Err(Error::DegenerateLeading);
    }
    for k in 1..nu.r {
        if !nu.a[k][nu.m - 1].is_zero() {
            return Err(Error::IllegalResidueTerm { k, l: nu.m - 1 });
        }
    }
    Ok(())
}

/// `ν(N) = (Σ a_{k,l} z^l N^k) dz/z^m` as a parameter-free form.
///
/// The numerator is known up to `q`; the `dz` coefficient therefore has the
/// window `[−m, q − m)`.
pub fn nu_of_matrix(nu: &RamifiedExponent, n: &SeriesMatrix, q: i64) -> Result<FormMatrix> {
    if n.prec() < q {
        return Err(AlgebraError::PrecisionExhausted { ord: 0, prec: n.prec() }.into());
    }
    let numerator = nu.numerator_matrix(&n.truncate(q)?)?;
    let dz = numerator.shift(-(nu.m as i64));
    Ok(FormMatrix::from_dz(EpsMatrix::constant(EpsRing::None, &dz)))
}

/// Galois twist `a_{k,l} ↦ ζ_r^{jk} a_{k,l}`, i.e. `ν(w) ↦ ν(ζ_r^j w)`.
pub fn galois_twist(nu: &RamifiedExponent, j: i64) -> Result<RamifiedExponent> {
    if !nu.field.contains_root_of_unity(nu.r) {
        return Err(Error::FieldLacksRoot { order: nu.field.order(), r: nu.r });
    }
    let a = nu
        .a
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let factor = nu.field.root_of_unity_pow(nu.r, j * k as i64);
            row.iter().map(|c| c * &factor).collect()
        })
        .collect();
    RamifiedExponent::new(&nu.field, nu.r, nu.m, a)
}

/// Direction of a deformation of a ramified exponent:
/// `ν_v(w) = Σ b_{k,l} z^l w^k dz/z^m` with `l ≤ m − 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationDirection {
    field: Field,
    r: usize,
    m: usize,
    b: Vec<Vec<CycNum>>,
}

impl DeformationDirection {
    /// Builds a direction from its `r × (m−1)` table `b[k][l]`.
    pub fn new(field: &Field, r: usize, m: usize, b: Vec<Vec<CycNum>>) -> Result<Self> {
        if r < 2 || m < 2 {
            return Err(Error::InvalidInput("deformations need r ≥ 2 and m ≥ 2".into()));
        }
        check_table(&b, r, m - 1, "direction coefficients")?;
        Ok(DeformationDirection { field: field.clone(), r, m, b })
    }

    /// The zero direction.
    pub fn zero(field: &Field, r: usize, m: usize) -> Result<Self> {
        Self::new(field, r, m, vec![vec![field.zero(); m - 1]; r])
    }

    /// Coefficient field.
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Rank.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Pole order.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Coefficient `b_{k,l}`.
    pub fn coeff(&self, k: usize, l: usize) -> &CycNum {
        &self.b[k][l]
    }

    /// The full coefficient table.
    pub fn table(&self) -> &[Vec<CycNum>] {
        &self.b
    }

    /// Whether all coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.b.iter().flatten().all(CycNum::is_zero)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if (self.r, self.m) != (other.r, other.m) {
            return Err(Error::InvalidInput("directions of different shapes".into()));
        }
        Ok(())
    }

    /// Sum of two directions.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let b = self
            .b
            .iter()
            .zip(&other.b)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
            .collect();
        Self::new(&self.field, self.r, self.m, b)
    }

    /// Scalar multiple.
    pub fn scale(&self, t: &CycNum) -> Self {
        let b = self.b.iter().map(|row| row.iter().map(|c| c * t).collect()).collect();
        DeformationDirection { b, ..self.clone() }
    }

    /// Numerator `Σ b_{k,l} z^l N^k` at the precision of `n`.
    pub fn numerator_matrix(&self, n: &SeriesMatrix) -> Result<SeriesMatrix> {
        evaluate_table(&self.field, &self.b, n)
    }

    /// Numerator of the `w^k` component.
    pub fn component(&self, k: usize, var: Var, prec: i64) -> Result<TruncSeries> {
        let len = ((self.m - 1) as i64).min(prec).max(0) as usize;
        Ok(TruncSeries::new(&self.field, var, 0, prec, self.b[k][..len].to_vec())?)
    }
}

/// Diagonal exponents `μ_k = Σ_j a_{k,j} z^j dz/z^m` of an unramified point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnramifiedExponentTuple {
    field: Field,
    r: usize,
    m: usize,
    a: Vec<Vec<CycNum>>,
}

impl UnramifiedExponentTuple {
    /// Builds and validates the tuple from an `r × m` table.
    pub fn new(field: &Field, r: usize, m: usize, a: Vec<Vec<CycNum>>) -> Result<Self> {
        if r < 1 || m < 1 {
            return Err(Error::InvalidInput("unramified exponents need r ≥ 1 and m ≥ 1".into()));
        }
        check_table(&a, r, m, "unramified exponent coefficients")?;
        for i in 0..r {
            for j in i + 1..r {
                if a[i][0] == a[j][0] {
                    return Err(Error::RepeatedLeading(i, j));
                }
            }
        }
        Ok(UnramifiedExponentTuple { field: field.clone(), r, m, a })
    }

    /// Coefficient field.
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Rank.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Pole order.
    pub fn m(&self) -> usize {
        self.m
    }

    /// The coefficient table.
    pub fn table(&self) -> &[Vec<CycNum>] {
        &self.a
    }

    /// The diagonal numerator matrix `diag(Σ_j a_{k,j} z^j)` known up to `prec`.
    pub fn numerator_matrix(&self, prec: i64) -> Result<SeriesMatrix> {
        let mut coeffs = Vec::new();
        for j in 0..self.m.min(prec.max(0) as usize) {
            let d: Vec<CycNum> = (0..self.r).map(|k| self.a[k][j].clone()).collect();
            coeffs.push(Mat::diag(&self.field, &d));
        }
        Ok(SeriesMatrix::new(&self.field, Var::Z, self.r, self.r, 0, prec, coeffs)?)
    }
}

/// Unfolded exponent with simple poles at `h^r q_1, …, h^r q_{m−1}, h^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfoldedExponent {
    base: RamifiedExponent,
    h: CycNum,
    q: Vec<CycNum>,
}

/// Builds the unfolding of `ν` with parameter `h` and ratios `q_1, …, q_{m−1}`.
pub fn unfold_exponent(nu: &RamifiedExponent, h: CycNum, q: Vec<CycNum>) -> Result<UnfoldedExponent> {
    validate_exponent(nu)?;
    if q.len() != nu.m - 1 {
        return Err(Error::InvalidInput(format!("expected {} unfolding ratios", nu.m - 1)));
    }
    let one = nu.field.one();
    for (i, x) in q.iter().enumerate() {
        if *x == one || q[..i].contains(x) {
            return Err(Error::RepeatedRoots);
        }
    }
    Ok(UnfoldedExponent { base: nu.clone(), h, q })
}

impl UnfoldedExponent {
    /// The exponent being unfolded.
    pub fn base(&self) -> &RamifiedExponent {
        &self.base
    }

    /// The unfolding parameter.
    pub fn h(&self) -> &CycNum {
        &self.h
    }

    /// The ratios `q_1, …, q_{m−1}`.
    pub fn ratios(&self) -> &[CycNum] {
        &self.q
    }

    /// The same family at another parameter value.
    pub fn with_h(&self, h: CycNum) -> UnfoldedExponent {
        UnfoldedExponent { h, ..self.clone() }
    }

    fn h_power(&self) -> CycNum {
        self.h.pow(self.base.r as i64).expect("non-negative power")
    }

    /// Pole locations `h^r q_1, …, h^r q_{m−1}, h^r` (the last has ratio `q_m = 1`).
    pub fn roots(&self) -> Vec<CycNum> {
        let hr = self.h_power();
        let mut out: Vec<CycNum> = self.q.iter().map(|x| &hr * x).collect();
        out.push(hr);
        out
    }

    /// Denominator `Π (z − ρ_i)`, lowest degree first.
    pub fn denominator(&self) -> Vec<CycNum> {
        let f = &self.base.field;
        self.roots().iter().fold(vec![f.one()], |acc, rho| cycpoly::mul(f, &acc, &[-rho, f.one()]))
    }

    /// Numerator polynomial of the `w^k` component.
    pub fn numerator(&self, k: usize) -> Vec<CycNum> {
        self.base.a[k].clone()
    }

    /// Residue of `ν_{k,h}` at the `index`-th root (`index = m − 1` is `h^r`).
    pub fn residue(&self, k: usize, index: usize) -> Result<CycNum> {
        let f = &self.base.field;
        let roots = self.roots();
        let rho = roots
            .get(index)
            .ok_or_else(|| Error::InvalidInput(format!("root index {index} out of range")))?;
        let mut denom = f.one();
        for (i, other) in roots.iter().enumerate() {
            if i != index {
                denom = &denom * &(rho - other);
            }
        }
        let num = cycpoly::eval(f, &self.numerator(k), rho);
        let inv = denom.inv().map_err(|_| Error::RepeatedRoots)?;
        Ok(&num * &inv)
    }

    /// Laurent expansion at `z = 0` of the `dz` coefficient of `ν_{k,h}`, known up to `prec`.
    pub fn expand(&self, k: usize, prec: i64) -> Result<TruncSeries> {
        let f = &self.base.field;
        let denom = self.denominator();
        let lowest = denom.iter().position(|c| !c.is_zero()).unwrap_or(0) as i64;
        let denom_len = (prec + 2 * lowest).max(lowest + 1);
        let d = TruncSeries::new(
            f,
            Var::Z,
            lowest,
            denom_len,
            denom[lowest as usize..].iter().take((denom_len - lowest) as usize).cloned().collect(),
        )?;
        let num_prec = prec + lowest;
        let num = TruncSeries::new(
            f,
            Var::Z,
            0,
            num_prec.max(1),
            self.numerator(k).into_iter().take(num_prec.max(1) as usize).collect(),
        )?;
        let out = num.mul(&crate::algebra::series_inv(&d)?)?;
        Ok(out.truncate(prec)?)
    }

    /// The specialization `h = 0`, re-expressed as a ramified exponent after
    /// checking that the denominator collapses to `z^m`.
    pub fn specialize_at_zero(&self) -> Result<RamifiedExponent> {
        let at_zero = self.with_h(self.base.field.zero());
        let denom = at_zero.denominator();
        let m = self.base.m;
        let expected: Vec<CycNum> =
            (0..=m).map(|i| if i == m { self.base.field.one() } else { self.base.field.zero() }).collect();
        if denom != expected {
            return Err(Error::InvalidInput("denominator is not z^m".into()));
        }
        RamifiedExponent::new(&self.base.field, self.base.r, m, self.base.a.clone())
    }

    /// The `N`-part of the unfolded normal form at the `index`-th root: the
    /// companion matrix with corner `ρ − h^r`, so that its `r`-th power is
    /// `(ρ − h^r)·Id`.
    pub fn fiber_companion(&self, index: usize) -> Result<Mat> {
        let roots = self.roots();
        let rho = roots
            .get(index)
            .ok_or_else(|| Error::InvalidInput(format!("root index {index} out of range")))?;
        let corner = rho - &self.h_power();
        let f = &self.base.field;
        let r = self.base.r;
        Ok(Mat::from_fn(f, r, r, |i, j| {
            if i == j + 1 {
                f.one()
            } else if i == 0 && j == r - 1 {
                corner.clone()
            } else {
                f.zero()
            }
        }))
    }
}

/// Characteristic polynomial of the residue's `N`-part at `z = h^r q_j`
/// (`j` in `1..=m`, with `q_m = 1`), and whether it is separable.
pub fn unfolded_residue_spectrum(u: &UnfoldedExponent, j: usize) -> Result<(Vec<CycNum>, bool)> {
    if j == 0 || j > u.base.m {
        return Err(Error::InvalidInput(format!("root index j = {j} must lie in 1..={}", u.base.m)));
    }
    let charpoly = u.fiber_companion(j - 1)?.charpoly();
    let separable = cycpoly::is_separable(&charpoly);
    Ok((charpoly, separable))
}

/// Sparse view of an exponent table, used by reports: `(k, l) ↦ a_{k,l}` for nonzero entries.
pub fn nonzero_entries(table: &[Vec<CycNum>]) -> BTreeMap<(usize, usize), CycNum> {
    let mut out = BTreeMap::new();
    for (k, row) in table.iter().enumerate() {
        for (l, c) in row.iter().enumerate() {
            if !c.is_zero() {
                out.insert((k, l), c.clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, CycField};

    fn exponent(f: &Field, r: usize, m: usize, entries: &[((usize, usize), i64)]) -> RamifiedExponent {
        let mut a = vec![vec![f.zero(); m]; r];
        for ((k, l), v) in entries {
            a[*k][*l] = f.int(*v);
        }
        RamifiedExponent::new(f, r, m, a).unwrap()
    }

    fn companion(f: &Field, r: usize, prec: i64) -> SeriesMatrix {
        let sub = Mat::from_fn(f, r, r, |i, j| if i == j + 1 { f.one() } else { f.zero() });
        let corner = Mat::from_fn(f, r, r, |i, j| if i == 0 && j == r - 1 { f.one() } else { f.zero() });
        SeriesMatrix::new(f, Var::Z, r, r, 0, prec, vec![sub, corner]).unwrap()
    }

    #[test]
    fn validation_examples() {
        let f = CycField::new(2);
        assert!(exponent(&f, 2, 2, &[((1, 0), 1)]).validate().is_ok());
        assert_eq!(exponent(&f, 2, 2, &[((0, 0), 1)]).validate(), Err(Error::DegenerateLeading));
        assert_eq!(
            exponent(&f, 2, 2, &[((1, 0), 1), ((1, 1), 3)]).validate(),
            Err(Error::IllegalResidueTerm { k: 1, l: 1 })
        );
    }

    #[test]
    fn nu_of_companion() {
        let f = CycField::new(2);
        let nu = exponent(&f, 2, 2, &[((1, 0), 1)]);
        let n = companion(&f, 2, 4);
        let form = nu_of_matrix(&nu, &n, 4).unwrap();
        let dz = form.dz.term(0).unwrap();
        assert_eq!(dz.ord(), -2);
        assert_eq!(dz.shift(2), n);
        let c = exponent(&f, 2, 2, &[((0, 0), 5), ((1, 0), 1)]);
        let only_c = RamifiedExponent::new(&f, 2, 2, vec![vec![f.int(5), f.zero()], vec![f.zero(), f.zero()]]).unwrap();
        let scalar = only_c.numerator_matrix(&n).unwrap();
        assert_eq!(scalar, SeriesMatrix::identity(&f, Var::Z, 2, 4).unwrap().scale(&f.int(5)));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn galois_twist_action() {
        let f = CycField::new(3);
        let nu = RamifiedExponent::new(
            &f,
            3,
            2,
            vec![vec![f.int(1), f.int(2)], vec![f.int(3), f.zero()], vec![f.zeta_pow(1), f.zero()]],
        )
        .unwrap();
        assert_eq!(galois_twist(&nu, 0).unwrap(), nu);
        for i in 0..3 {
            for j in 0..3 {
                let lhs = galois_twist(&galois_twist(&nu, i).unwrap(), j).unwrap();
                assert_eq!(lhs, galois_twist(&nu, (i + j) % 3).unwrap());
            }
        }
        let f2 = CycField::new(2);
        let nu2 = exponent(&f2, 2, 2, &[((0, 0), 4), ((1, 0), 1)]);
        let t = galois_twist(&nu2, 1).unwrap();
        assert_eq!(t.coeff(1, 0), &f2.int(-1));
        assert_eq!(t.coeff(0, 0), &f2.int(4));
        let f1 = CycField::new(1);
        let nu1 = exponent(&f1, 2, 2, &[((1, 0), 1)]);
        assert!(matches!(galois_twist(&nu1, 1), Err(Error::FieldLacksRoot { .. })));
    }

    #[test]
    fn unfolding_examples() {
        let f = CycField::new(2);
        let nu = exponent(&f, 2, 2, &[((0, 0), 3), ((0, 1), 5), ((1, 0), 1)]);
        let u = unfold_exponent(&nu, f.one(), vec![f.int(2)]).unwrap();
        // Denominator (z − 2)(z − 1) = z² − 3z + 2.
        assert_eq!(u.denominator(), vec![f.int(2), f.int(-3), f.one()]);
        // Residue at z = h^r: (a00 + a01 h^r)/(h^r(1 − q1)) = 8 / (1·(−1)).
        assert_eq!(u.residue(0, 1).unwrap(), f.int(-8));
        let back = u.with_h(f.zero()).specialize_at_zero().unwrap();
        assert_eq!(back, nu);
        assert_eq!(unfold_exponent(&nu, f.one(), vec![f.one()]).unwrap_err(), Error::RepeatedRoots);
    }

    #[test]
    fn expansion_at_h_zero_is_the_pole() {
        let f = CycField::new(2);
        let nu = exponent(&f, 2, 2, &[((0, 0), 3), ((0, 1), 5), ((1, 0), 1)]);
        let u = unfold_exponent(&nu, f.zero(), vec![f.int(2)]).unwrap();
        let e = u.expand(0, 3).unwrap();
        assert_eq!(e.coeff(-2).unwrap(), f.int(3));
        assert_eq!(e.coeff(-1).unwrap(), f.int(5));
        assert_eq!(e.coeff(0).unwrap(), f.zero());
    }

    #[test]
    fn residue_spectrum() {
        let f = CycField::new(2);
        let nu = exponent(&f, 2, 2, &[((1, 0), 1)]);
        let u = unfold_exponent(&nu, f.one(), vec![f.int(2)]).unwrap();
        let (p, sep) = unfolded_residue_spectrum(&u, 1).unwrap();
        assert_eq!(p, vec![f.int(-1), f.zero(), f.one()]);
        assert!(sep);
        let (p, sep) = unfolded_residue_spectrum(&u, 2).unwrap();
        assert_eq!(p, vec![f.zero(), f.zero(), f.one()]);
        assert!(!sep);
        let (_, sep) = unfolded_residue_spectrum(&u.with_h(f.zero()), 1).unwrap();
        assert!(!sep);
        let u3 = unfold_exponent(&nu, f.rational(rat(1, 3)), vec![f.int(5)]).unwrap();
        assert!(unfolded_residue_spectrum(&u3, 1).unwrap().1);
    }

    #[test]
    fn direction_arithmetic() {
        let f = CycField::new(1);
        let d = DeformationDirection::new(&f, 2, 3, vec![vec![f.int(1), f.int(2)], vec![f.int(3), f.int(4)]]).unwrap();
        let z = DeformationDirection::zero(&f, 2, 3).unwrap();
        assert_eq!(d.add(&z).unwrap(), d);
        assert_eq!(d.scale(&f.int(2)), d.add(&d).unwrap());
        assert!(UnramifiedExponentTuple::new(&f, 2, 2, vec![vec![f.one(), f.zero()], vec![f.one(), f.one()]]).is_err());
    }
}
