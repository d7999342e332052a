// SPDX-License-Identifier: MIT OR Apache-2.0
//! Factorized ramified structures at a ramified point and the equivalent
//! description by quotient modules `L_k ≅ C[w]/(w^{mr−r+1})`.
//!
//! Everything lives on `E = O_m^r` with `O_m = C[x]/(x^m)`, in the adapted
//! basis `e_0, …, e_{r−1}`. The filtration is
//! `V_k = ⟨e_k, …, e_{r−1}, x e_0, …, x e_{k−1}⟩` with `V_r = x V_0`, and the
//! dual filtration on `E^∨` is
//! `W_k = ⟨e*_0, …, e*_{r−k−1}, x e*_{r−k}, …, x e*_{r−1}⟩`.
//! The quotient `V̄_k = V_k / x^{m−1} V_{k+1}` has dimension `mr − r + 1`.

use crate::algebra::{Field, FieldExt, Mat, SeriesMatrix, Var};
use crate::algebra::CycNum;
use crate::connection::{companion, Connection};
use crate::error::{Error, Result};
use crate::exponent::{validate_exponent, RamifiedExponent};

/// Dimension `mr − r + 1` of each quotient `V̄_k`.
pub fn quotient_dimension(r: usize, m: usize) -> usize {
    m * r - r + 1
}

/// Whether a column vector lies in `x^shift V_k` modulo `x^m` (with `V_r = x V_0`).
pub fn in_filtration(v: &SeriesMatrix, k: usize, shift: i64, m: usize) -> bool {
    let r = v.rows();
    (0..r).all(|i| {
        let need = shift + i64::from(i < k);
        (0..need.min(m as i64)).all(|e| v.coeff(e).map_or(true, |c| c.get(i, 0).is_zero()))
    })
}

/// Whether a column vector lies in `x^shift W_k` modulo `x^m` (with `W_r = x W_0`).
pub fn in_dual_filtration(v: &SeriesMatrix, k: usize, shift: i64, m: usize) -> bool {
    let r = v.rows();
    let reversed = SeriesMatrix::from_entries(
        &(0..r).map(|i| vec![v.entry(r - 1 - i, 0)]).collect::<Vec<_>>(),
    )
    .expect("column vector");
    in_filtration(&reversed, k, shift, m)
}

fn unit_vector(field: &Field, r: usize, i: usize, power: i64, m: usize) -> SeriesMatrix {
    let mut e = Mat::zeros(field, r, 1);
    e.set(i, 0, field.one());
    SeriesMatrix::monomial(&e, Var::Z, power, m as i64).expect("window").extend_ord(0)
}

/// Generators `e_k, …, e_{r−1}, x e_0, …, x e_{k−1}` of `V_k`.
pub fn filtration_generators(field: &Field, r: usize, m: usize, k: usize) -> Vec<SeriesMatrix> {
    let mut out: Vec<SeriesMatrix> = (k..r).map(|i| unit_vector(field, r, i, 0, m)).collect();
    out.extend((0..k).map(|i| unit_vector(field, r, i, 1, m)));
    out
}

/// Generators `e*_0, …, e*_{r−k−1}, x e*_{r−k}, …, x e*_{r−1}` of `W_k`.
pub fn dual_filtration_generators(field: &Field, r: usize, m: usize, k: usize) -> Vec<SeriesMatrix> {
    let mut out: Vec<SeriesMatrix> = (0..r - k).map(|i| unit_vector(field, r, i, 0, m)).collect();
    out.extend((r - k..r).map(|i| unit_vector(field, r, i, 1, m)));
    out
}

/// Coordinates `(row, exponent)` spanning `V̄_k`, ordered so that position `j`
/// corresponds to `w^j` under the standard identification.
pub fn quotient_coordinates(r: usize, m: usize, k: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for i in 0..r {
        let range = if i == k {
            0..m as i64
        } else if i > k {
            0..m as i64 - 1
        } else {
            1..m as i64
        };
        for e in range {
            out.push((i, e));
        }
    }
    let key = |&(i, e): &(usize, i64)| r as i64 * e + i as i64 - k as i64;
    out.sort_by_key(key);
    out
}

/// Coordinates of a vector of `V_k` in `V̄_k`.
pub fn quotient_vector(v: &SeriesMatrix, r: usize, m: usize, k: usize) -> Vec<CycNum> {
    quotient_coordinates(r, m, k)
        .into_iter()
        .map(|(i, e)| v.coeff(e).expect("known coefficient").get(i, 0).clone())
        .collect()
}

fn apply(x: &SeriesMatrix, v: &SeriesMatrix, m: usize) -> Result<SeriesMatrix> {
    Ok(x.mul(v)?.truncate(m as i64)?)
}

/// Named outcome of one axiom check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    /// Short identifier of the axiom.
    pub name: String,
    /// Whether it holds.
    pub passed: bool,
}

/// List of axiom checks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    /// Individual checks in a fixed order.
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    fn push(&mut self, name: &str, passed: bool) {
        self.checks.push(AxiomCheck { name: name.to_string(), passed });
    }

    /// Whether every check passed.
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Names of the failed checks.
    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

/// A factorized ramified structure `N = θ ∘ κ` on `O_m^r` in the adapted basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizedStructure {
    r: usize,
    m: usize,
    n: SeriesMatrix,
    theta: SeriesMatrix,
    kappa: SeriesMatrix,
}

/// The antidiagonal permutation matrix.
pub fn antidiagonal(field: &Field, r: usize) -> Mat {
    Mat::from_fn(field, r, r, |i, j| if i + j == r - 1 { field.one() } else { field.zero() })
}

/// The constant part of `κ`: ones at `(r−2−i, i)`.
fn kappa_constant(field: &Field, r: usize) -> Mat {
    Mat::from_fn(field, r, r, |i, j| if i + j + 2 == r { field.one() } else { field.zero() })
}

/// `κ`: ones at `(r−2−i, i)` for `i ≤ r−2` and `x` at `(r−1, r−1)`, modulo `x^m`.
pub fn standard_kappa(field: &Field, r: usize, m: usize) -> Result<SeriesMatrix> {
    let mut corner = Mat::zeros(field, r, r);
    corner.set(r - 1, r - 1, field.one());
    let coeffs = if m >= 2 { vec![kappa_constant(field, r), corner] } else { vec![kappa_constant(field, r)] };
    Ok(SeriesMatrix::new(field, Var::Z, r, r, 0, m as i64, coeffs)?)
}

impl FactorizedStructure {
    /// Wraps explicit matrices; no axiom is checked.
    pub fn from_parts(m: usize, n: SeriesMatrix, theta: SeriesMatrix, kappa: SeriesMatrix) -> Result<Self> {
        let r = n.rows();
        for x in [&n, &theta, &kappa] {
            if x.rows() != r || x.cols() != r {
                return Err(Error::InvalidInput("factorized structure matrices must be r×r".into()));
            }
        }
        let cut = |x: &SeriesMatrix| -> Result<SeriesMatrix> { Ok(x.extend_ord(0).truncate(m as i64)?) };
        Ok(FactorizedStructure { r, m, n: cut(&n)?, theta: cut(&theta)?, kappa: cut(&kappa)? })
    }

    /// The standard structure `N = companion`, `θ = antidiagonal`, `κ` as in [`standard_kappa`].
    pub fn standard(field: &Field, r: usize, m: usize) -> Result<Self> {
        if r < 2 || m < 2 {
            return Err(Error::InvalidInput("factorized structures need r ≥ 2 and m ≥ 2".into()));
        }
        let n = companion(field, r, m as i64, Var::Z)?;
        let theta = SeriesMatrix::constant(&antidiagonal(field, r), Var::Z, m as i64)?;
        Ok(FactorizedStructure { r, m, n, theta, kappa: standard_kappa(field, r, m)? })
    }

    /// Rank.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Pole order.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Coefficient field.
    pub fn field(&self) -> &Field {
        self.n.field()
    }

    /// `N` modulo `x^m`.
    pub fn n(&self) -> &SeriesMatrix {
        &self.n
    }

    /// `θ : E^∨ → E` modulo `x^m`.
    pub fn theta(&self) -> &SeriesMatrix {
        &self.theta
    }

    /// `κ : E → E^∨` modulo `x^m`.
    pub fn kappa(&self) -> &SeriesMatrix {
        &self.kappa
    }

    /// `f(ᵗN)` for a polynomial `f` given by its coefficients.
    fn poly_in_transpose(&self, coeffs: &[CycNum]) -> Result<SeriesMatrix> {
        let nt = self.n.transpose();
        let mut acc = SeriesMatrix::zero(self.field(), Var::Z, self.r, self.r, 0, self.m as i64)?;
        let mut power = SeriesMatrix::identity(self.field(), Var::Z, self.r, self.m as i64)?;
        for c in coeffs {
            acc = acc.add(&power.scale(c))?;
            power = power.mul(&nt)?;
        }
        Ok(acc)
    }

    /// The equivalent structure `(θ·ς, ς⁻¹·κ)` with `ς = f(ᵗN)` for a unit polynomial `f`.
    pub fn twisted(&self, unit: &[CycNum]) -> Result<Self> {
        if unit.first().is_none_or(CycNum::is_zero) {
            return Err(Error::InvalidInput("twist polynomial must have a nonzero constant term".into()));
        }
        let sigma = self.poly_in_transpose(unit)?;
        let sigma_inv = sigma.inverse()?;
        Ok(FactorizedStructure {
            r: self.r,
            m: self.m,
            n: self.n.clone(),
            theta: self.theta.mul(&sigma)?,
            kappa: sigma_inv.mul(&self.kappa)?,
        })
    }

    /// Generators of `V_k`.
    pub fn generators(&self, k: usize) -> Vec<SeriesMatrix> {
        filtration_generators(self.field(), self.r, self.m, k)
    }

    /// Checks the structure-only axioms.
    pub fn verify_structure(&self) -> Result<AxiomReport> {
        let mut report = AxiomReport::default();
        let (r, m) = (self.r, self.m);
        let field = self.field().clone();
        let mi = m as i64;
        report.push("theta symmetric", self.theta.transpose() == self.theta);
        report.push("kappa symmetric", self.kappa.transpose() == self.kappa);
        report.push("theta kappa = N", self.theta.mul(&self.kappa)? == self.n);
        let z_id = SeriesMatrix::monomial(&Mat::identity(&field, r), Var::Z, 1, mi)?.extend_ord(0);
        report.push("N^r = z", self.n.pow(r)?.truncate(mi)? == z_id);

        let mut n_filtration = true;
        let mut nilpotent = true;
        let mut cyclic = true;
        let mut theta_maps = true;
        let mut kappa_maps = true;
        let big = quotient_dimension(r, m);
        let n_big = self.n.pow(big)?.truncate(mi)?;
        for k in 0..r {
            for g in self.generators(k) {
                n_filtration &= in_filtration(&apply(&self.n, &g, m)?, k + 1, 0, m);
                nilpotent &= in_filtration(&apply(&n_big, &g, m)?, k + 1, mi - 1, m);
                kappa_maps &= in_dual_filtration(&apply(&self.kappa, &g, m)?, k + 1, 0, m);
            }
            for g in dual_filtration_generators(&field, r, m, k) {
                theta_maps &= in_filtration(&apply(&self.theta, &g, m)?, k, 0, m);
            }
            let mut v = unit_vector(&field, r, k, 0, m);
            let mut cols = Vec::with_capacity(big);
            for _ in 0..big {
                cols.push(quotient_vector(&v, r, m, k));
                v = apply(&self.n, &v, m)?;
            }
            cyclic &= Mat::from_cols(&field, big, &cols).rank() == big;
        }
        report.push("N(V_k) in V_(k+1)", n_filtration);
        report.push("N^(mr-r+1) = 0 on quotients", nilpotent);
        report.push("quotients cyclic over C[w]", cyclic);
        report.push("theta(W_k) in V_k", theta_maps);
        report.push("kappa(V_k) in W_(k+1)", kappa_maps);
        Ok(report)
    }
}

/// Builds the standard factorized structure for a connection in adapted gauge.
///
/// The connection must agree with the normal form of `nu` below `x^{2m−1}`.
pub fn build_factorized(c: &Connection, nu: &RamifiedExponent) -> Result<FactorizedStructure> {
    validate_exponent(nu)?;
    let m = nu.m();
    let depth = 2 * m as i64 - 1;
    if c.rank() != nu.r() || c.pole_order() != m {
        return Err(Error::NotAdaptedGauge("rank or pole order differs from the exponent".into()));
    }
    if c.prec() < depth {
        return Err(crate::algebra::AlgebraError::PrecisionExhausted { ord: 0, prec: c.prec() }.into());
    }
    let normal = crate::connection::normal_matrix(nu, depth)?;
    if !c.matrix().agrees_below(normal.matrix(), depth) {
        return Err(Error::NotAdaptedGauge(format!("connection differs from the normal form below order {depth}")));
    }
    FactorizedStructure::standard(nu.field(), nu.r(), m)
}

/// Checks all axioms of `fs` together with its compatibility with `c` and `nu`.
pub fn verify_factorized(fs: &FactorizedStructure, c: &Connection, nu: &RamifiedExponent) -> Result<AxiomReport> {
    let mut report = fs.verify_structure()?;
    let (r, m) = (fs.r, fs.m);
    let mi = m as i64;
    if c.rank() != r || nu.r() != r || nu.m() != m || c.prec() < mi {
        report.push("connection shape", false);
        return Ok(report);
    }
    let a = c.matrix().truncate(mi)?;
    let nu_n = nu.numerator_matrix(fs.n())?.truncate(mi)?;
    let field = fs.field().clone();
    let mut stable = true;
    let mut square = true;
    for k in 0..r {
        let shift = SeriesMatrix::monomial(
            &Mat::identity(&field, r).scale(&field.frac(k as i64, r as i64)),
            Var::Z,
            mi - 1,
            mi,
        )?;
        let defect = a.sub(&nu_n)?.sub(&shift)?;
        for g in fs.generators(k) {
            stable &= in_filtration(&apply(&a, &g, m)?, k, 0, m);
            square &= in_filtration(&apply(&defect, &g, m)?, k + 1, mi - 1, m);
        }
    }
    report.push("connection preserves V_k", stable);
    report.push("residue square commutes", square);
    Ok(report)
}

/// Generic ramified structure: for each `k`, the images `π_k(g)` of the generators
/// of `V_k` in `C[w]/(w^{mr−r+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericRamifiedStructure {
    field: Field,
    r: usize,
    m: usize,
    images: Vec<Vec<Vec<CycNum>>>,
}

fn truncated_product(field: &Field, a: &[CycNum], b: &[CycNum], len: usize) -> Vec<CycNum> {
    let mut out = vec![field.zero(); len];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate() {
            if i + j < len {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    out
}

fn shift_up(field: &Field, a: &[CycNum], by: usize) -> Vec<CycNum> {
    let len = a.len();
    (0..len).map(|j| if j >= by { a[j - by].clone() } else { field.zero() }).collect()
}

impl GenericRamifiedStructure {
    /// Wraps explicit images; no axiom is checked.
    pub fn from_images(field: &Field, r: usize, m: usize, images: Vec<Vec<Vec<CycNum>>>) -> Result<Self> {
        let big = quotient_dimension(r, m);
        if images.len() != r || images.iter().any(|k| k.len() != r || k.iter().any(|p| p.len() != big)) {
            return Err(Error::InvalidInput(format!("expected r×r images of length {big}")));
        }
        Ok(GenericRamifiedStructure { field: field.clone(), r, m, images })
    }

    /// Rank.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Pole order.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Image of generator `g` of `V_k` (generator order as in [`filtration_generators`]).
    pub fn image(&self, k: usize, g: usize) -> &[CycNum] {
        &self.images[k][g]
    }

    /// `π_k(v)` for `v ∈ V_k`.
    pub fn project(&self, k: usize, v: &SeriesMatrix) -> Vec<CycNum> {
        let (r, m) = (self.r, self.m);
        let big = quotient_dimension(r, m);
        let mut out = vec![self.field.zero(); big];
        for (i, e) in quotient_coordinates(r, m, k) {
            let c = v.coeff(e).expect("known coefficient").get(i, 0).clone();
            if c.is_zero() {
                continue;
            }
            let (g, power) = if i >= k { (i - k, e) } else { (r - k + i, e - 1) };
            let moved = shift_up(&self.field, &self.images[k][g], r * power as usize);
            for (o, x) in out.iter_mut().zip(&moved) {
                *o = &*o + &(&c * x);
            }
        }
        out
    }

    /// The same structure with every `π_k` multiplied by the unit `β(w)`.
    pub fn twisted(&self, unit: &[CycNum]) -> Result<Self> {
        if unit.first().is_none_or(CycNum::is_zero) {
            return Err(Error::InvalidInput("twist polynomial must have a nonzero constant term".into()));
        }
        let big = quotient_dimension(self.r, self.m);
        let images = self
            .images
            .iter()
            .map(|k| k.iter().map(|p| truncated_product(&self.field, unit, p, big)).collect())
            .collect();
        Ok(GenericRamifiedStructure { images, ..self.clone() })
    }

    /// Checks surjectivity of each `π_k` and the compatibility `π_k = w·π_{k+1}` on `V_{k+1}`.
    pub fn verify(&self) -> AxiomReport {
        let (r, m) = (self.r, self.m);
        let big = quotient_dimension(r, m);
        let mut report = AxiomReport::default();
        let mut surjective = true;
        let mut compatible = true;
        for k in 0..r {
            let cols: Vec<Vec<CycNum>> = quotient_coordinates(r, m, k)
                .into_iter()
                .map(|(i, e)| {
                    let mut v = Mat::zeros(&self.field, r, 1);
                    v.set(i, 0, self.field.one());
                    let vec = SeriesMatrix::monomial(&v, Var::Z, e, m as i64).expect("window").extend_ord(0);
                    self.project(k, &vec)
                })
                .collect();
            surjective &= Mat::from_cols(&self.field, big, &cols).rank() == big;
            let next = (k + 1) % r;
            for g in filtration_generators(&self.field, r, m, k + 1) {
                let (upper, lower) = if k + 1 < r {
                    (self.project(k, &g), self.project(next, &g))
                } else {
                    let lowered = g.shift(-1).extend_ord(0).with_exact_prec(m as i64);
                    (self.project(k, &g), self.project(0, &lowered))
                };
                compatible &= upper == shift_up(&self.field, &lower, 1);
            }
        }
        report.push("projections surjective", surjective);
        report.push("projections compatible with w", compatible);
        report
    }
}

/// The generic structure attached to `fs`: `L_k = V̄_k` with `w` acting by `N`,
/// identified with `C[w]/(w^{mr−r+1})` through the generator `e_k`.
pub fn to_generic(fs: &FactorizedStructure) -> Result<GenericRamifiedStructure> {
    let report = fs.verify_structure()?;
    if !report.all_passed() {
        return Err(Error::AxiomViolation(report.failed().join(", ")));
    }
    let (r, m) = (fs.r, fs.m);
    let big = quotient_dimension(r, m);
    let field = fs.field().clone();
    let mut images = Vec::with_capacity(r);
    for k in 0..r {
        let mut v = unit_vector(&field, r, k, 0, m);
        let mut cols = Vec::with_capacity(big);
        for _ in 0..big {
            cols.push(quotient_vector(&v, r, m, k));
            v = apply(fs.n(), &v, m)?;
        }
        let basis = Mat::from_cols(&field, big, &cols);
        let mut per_k = Vec::with_capacity(r);
        for g in fs.generators(k) {
            let coords = quotient_vector(&g, r, m, k);
            per_k.push(basis.solve(&coords).ok_or_else(|| Error::AxiomViolation("quotient not cyclic".into()))?);
        }
        images.push(per_k);
    }
    GenericRamifiedStructure::from_images(&field, r, m, images)
}

/// The factorized structure attached to a generic one.
///
/// Lifts `ē_k = 1 ∈ L_k` to `e′_k ∈ V_k`, sets `P = [e′_0 … e′_{r−1}]`, and
/// transports the standard structure: `N′ = P N P⁻¹`, `θ′ = P θ ᵗP`,
/// `κ′ = ᵗP⁻¹ κ P⁻¹`.
pub fn from_generic(gs: &GenericRamifiedStructure) -> Result<FactorizedStructure> {
    let report = gs.verify();
    if !report.all_passed() {
        return Err(Error::AxiomViolation(report.failed().join(", ")));
    }
    let (r, m) = (gs.r, gs.m);
    if r < 2 || m < 2 {
        return Err(Error::InvalidInput("generic structures need r ≥ 2 and m ≥ 2".into()));
    }
    let field = gs.field.clone();
    let big = quotient_dimension(r, m);
    let mi = m as i64;
    let mut columns: Vec<Mat> = vec![Mat::zeros(&field, r, r); m];
    for k in 0..r {
        let coords = quotient_coordinates(r, m, k);
        let cols: Vec<Vec<CycNum>> = coords
            .iter()
            .map(|&(i, e)| gs.project(k, &unit_vector(&field, r, i, e, m)))
            .collect();
        let system = Mat::from_cols(&field, big, &cols);
        let mut one = vec![field.zero(); big];
        one[0] = field.one();
        let x = system.solve(&one).ok_or_else(|| Error::AxiomViolation("cannot lift the generator".into()))?;
        for (&(i, e), val) in coords.iter().zip(&x) {
            columns[e as usize].set(i, k, val.clone());
        }
    }
    let p = SeriesMatrix::new(&field, Var::Z, r, r, 0, mi, columns)?;
    if p.coeff(0).expect("constant term").rank() != r {
        return Err(Error::AxiomViolation("lifted generators are not a basis".into()));
    }
    let p_inv = p.inverse()?;
    let standard = FactorizedStructure::standard(&field, r, m)?;
    let n = p.mul(standard.n())?.mul(&p_inv)?;
    let theta = p.mul(standard.theta())?.mul(&p.transpose())?;
    let kappa = p_inv.transpose().mul(standard.kappa())?.mul(&p_inv)?;
    let fs = FactorizedStructure::from_parts(m, n, theta, kappa)?;
    let report = fs.verify_structure()?;
    if !report.all_passed() {
        return Err(Error::AxiomViolation(report.failed().join(", ")));
    }
    Ok(fs)
}

/// Checks equivalence of two factorized structures on the same filtration.
///
/// The structures are equivalent when `N` agrees on every `V̄_k` and
/// `ς = θ⁻¹θ′` is an automorphism of every `W_k` commuting with `ᵗN` on the
/// quotients `W̄_k`, with `κ′ = ς⁻¹κ` on the quotients.
pub fn equivalence_report(a: &FactorizedStructure, b: &FactorizedStructure) -> Result<AxiomReport> {
    let mut report = AxiomReport::default();
    if (a.r, a.m) != (b.r, b.m) {
        report.push("same shape", false);
        return Ok(report);
    }
    let (r, m) = (a.r, a.m);
    let mi = m as i64;
    let field = a.field().clone();
    let dn = a.n.sub(&b.n)?;
    let mut n_agree = true;
    for k in 0..r {
        for g in a.generators(k) {
            n_agree &= in_filtration(&apply(&dn, &g, m)?, k + 1, mi - 1, m);
        }
    }
    report.push("N agrees on quotients", n_agree);
    let theta_inv = match a.theta.inverse() {
        Ok(t) => t,
        Err(_) => {
            report.push("theta invertible", false);
            return Ok(report);
        }
    };
    let sigma = theta_inv.mul(&b.theta)?;
    let sigma_inv = match sigma.inverse() {
        Ok(s) => s,
        Err(_) => {
            report.push("sigma invertible", false);
            return Ok(report);
        }
    };
    let nt = a.n.transpose();
    let comm = sigma.mul(&nt)?.sub(&nt.mul(&sigma)?)?;
    let dk = b.kappa.sub(&sigma_inv.mul(&a.kappa)?)?;
    let mut preserves = true;
    let mut commutes = true;
    let mut kappa_ok = true;
    for k in 0..r {
        for g in dual_filtration_generators(&field, r, m, k) {
            preserves &= in_dual_filtration(&apply(&sigma, &g, m)?, k, 0, m);
            preserves &= in_dual_filtration(&apply(&sigma_inv, &g, m)?, k, 0, m);
            commutes &= in_dual_filtration(&apply(&comm, &g, m)?, k + 1, mi - 1, m);
        }
        for g in a.generators(k) {
            kappa_ok &= in_dual_filtration(&apply(&dk, &g, m)?, k + 1, mi - 1, m);
        }
    }
    report.push("sigma preserves W_k", preserves);
    report.push("sigma commutes with transpose N", commutes);
    report.push("kappa matches", kappa_ok);
    Ok(report)
}

/// `Θ(w^a, w^b)` for the trace pairing `Θ(f, g) dx = Tr(f g dw)`, as `(coefficient, power of x)`.
///
/// Uses `dw = w dx/(r x)`, `Tr(x^l) = r x^l` and `Tr(w^k x^l) = 0` for `1 ≤ k ≤ r−1`.
pub fn trace_pairing_monomial(field: &Field, r: usize, a: usize, b: usize) -> (CycNum, i64) {
    let total = a + b + 1;
    if total % r != 0 {
        return (field.zero(), 0);
    }
    let trace = field.int(r as i64);
    let value = &trace / &field.int(r as i64);
    (value, (total / r) as i64 - 1)
}

/// Matrix of the trace pairing on the basis `1, w, …, w^{r−1}`, modulo `x^m`.
pub fn trace_pairing_matrix(field: &Field, r: usize, m: usize) -> Result<SeriesMatrix> {
    let mut coeffs = vec![Mat::zeros(field, r, r); m];
    for a in 0..r {
        for b in 0..r {
            let (v, l) = trace_pairing_monomial(field, r, a, b);
            if !v.is_zero() && (l as usize) < m {
                coeffs[l as usize].set(a, b, v);
            }
        }
    }
    Ok(SeriesMatrix::new(field, Var::Z, r, r, 0, m as i64, coeffs)?)
}

/// The factorized structure induced by the trace pairing: `θ` its matrix and `κ = θ⁻¹N`.
pub fn trace_pairing_structure(field: &Field, r: usize, m: usize) -> Result<FactorizedStructure> {
    let theta = trace_pairing_matrix(field, r, m)?;
    let n = companion(field, r, m as i64, Var::Z)?;
    let kappa = theta.inverse()?.mul(&n)?;
    FactorizedStructure::from_parts(m, n, theta, kappa)
}

/// Basis of the endomorphisms inducing zero on every `V̄_k`: `x^{m−1}` times a
/// strictly lower triangular matrix unit.
pub fn endomorphism_lift_ambiguity(field: &Field, r: usize, m: usize) -> Result<Vec<SeriesMatrix>> {
    let mut out = Vec::new();
    for i in 0..r {
        for j in 0..i {
            let mut e = Mat::zeros(field, r, r);
            e.set(i, j, field.one());
            out.push(SeriesMatrix::monomial(&e, Var::Z, m as i64 - 1, m as i64)?.extend_ord(0));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CycField;
    use crate::connection::normal_matrix;

    fn f() -> Field {
        CycField::new(1)
    }

    #[test]
    fn standard_matrices_r2_r3() {
        let field = f();
        let fs = FactorizedStructure::standard(&field, 2, 2).unwrap();
        assert_eq!(fs.theta().coeff(0).unwrap(), Mat::from_ints(&field, &[vec![0, 1], vec![1, 0]]));
        assert_eq!(fs.kappa().coeff(0).unwrap(), Mat::from_ints(&field, &[vec![1, 0], vec![0, 0]]));
        assert_eq!(fs.kappa().coeff(1).unwrap(), Mat::from_ints(&field, &[vec![0, 0], vec![0, 1]]));
        let fs3 = FactorizedStructure::standard(&field, 3, 2).unwrap();
        assert_eq!(
            fs3.kappa().coeff(0).unwrap(),
            Mat::from_ints(&field, &[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 0]])
        );
        assert_eq!(fs3.theta().mul(fs3.kappa()).unwrap(), *fs3.n());
    }

    #[test]
    fn axioms_hold_for_normal_forms() {
        let field = f();
        for r in 2..=5 {
            for m in 2..=3 {
                let nu = RamifiedExponent::simple(&field, r, m).unwrap();
                let c = normal_matrix(&nu, 2 * m as i64).unwrap();
                let fs = build_factorized(&c, &nu).unwrap();
                let report = verify_factorized(&fs, &c, &nu).unwrap();
                assert!(report.all_passed(), "r={r} m={m}: {:?}", report.failed());
            }
        }
    }

    #[test]
    fn corrupted_structures_fail() {
        let field = f();
        let fs = FactorizedStructure::standard(&field, 2, 3).unwrap();
        let mut c2 = Mat::zeros(&field, 2, 2);
        c2.set(1, 1, field.one());
        let kappa = SeriesMatrix::new(&field, Var::Z, 2, 2, 0, 3, vec![
            fs.kappa().coeff(0).unwrap(),
            Mat::zeros(&field, 2, 2),
            c2,
        ]).unwrap();
        let bad = FactorizedStructure::from_parts(3, fs.n().clone(), fs.theta().clone(), kappa).unwrap();
        assert!(bad.verify_structure().unwrap().failed().contains(&"theta kappa = N"));
        let mut t = fs.theta().coeff(0).unwrap();
        t.set(0, 0, field.one());
        t.set(0, 1, field.int(2));
        let theta = SeriesMatrix::constant(&t, Var::Z, 3).unwrap();
        let bad = FactorizedStructure::from_parts(3, fs.n().clone(), theta, fs.kappa().clone()).unwrap();
        assert!(bad.verify_structure().unwrap().failed().contains(&"theta symmetric"));
    }

    #[test]
    fn not_adapted_is_rejected() {
        let field = f();
        let nu = RamifiedExponent::simple(&field, 2, 2).unwrap();
        let other = RamifiedExponent::simple(&field, 2, 2).unwrap();
        let mut c = normal_matrix(&other, 4).unwrap().matrix().clone();
        c = c.add(&SeriesMatrix::monomial(&Mat::identity(&field, 2), Var::Z, 1, 4).unwrap()).unwrap();
        let c = Connection::new(c, 2).unwrap();
        assert!(matches!(build_factorized(&c, &nu), Err(Error::NotAdaptedGauge(_))));
    }

    #[test]
    fn generic_model_r2_m2() {
        let field = f();
        let fs = FactorizedStructure::standard(&field, 2, 2).unwrap();
        let gs = to_generic(&fs).unwrap();
        assert!(gs.verify().all_passed());
        // π_0(e_0) = 1, π_0(e_1) = w, and π_0(z e_0) = w².
        assert_eq!(gs.image(0, 0), &[field.one(), field.zero(), field.zero()]);
        assert_eq!(gs.image(0, 1), &[field.zero(), field.one(), field.zero()]);
        let ze0 = unit_vector(&field, 2, 0, 1, 2);
        assert_eq!(gs.project(0, &ze0), vec![field.zero(), field.zero(), field.one()]);
        // φ_1 is multiplication by w: π_0(e_1) = w·π_1(e_1).
        assert_eq!(gs.image(1, 0), &[field.one(), field.zero(), field.zero()]);
    }

    #[test]
    fn round_trips() {
        let field = f();
        for (r, m) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
            let fs = FactorizedStructure::standard(&field, r, m).unwrap();
            let twisted = fs.twisted(&[field.int(2), field.int(-1), field.frac(1, 3)]).unwrap();
            assert!(twisted.verify_structure().unwrap().all_passed());
            for start in [&fs, &twisted] {
                let back = from_generic(&to_generic(start).unwrap()).unwrap();
                let eq = equivalence_report(start, &back).unwrap();
                assert!(eq.all_passed(), "{:?}", eq.failed());
            }
            let gs = to_generic(&fs).unwrap().twisted(&[field.int(3), field.one(), field.int(-2)]).unwrap();
            let fs2 = from_generic(&gs).unwrap();
            let gs2 = to_generic(&fs2).unwrap();
            assert!(gs2.verify().all_passed());
            assert!(equivalence_report(&fs, &fs2).unwrap().all_passed());
        }
    }

    #[test]
    fn inequivalent_structures_are_detected() {
        let field = f();
        let fs = FactorizedStructure::standard(&field, 2, 2).unwrap();
        let s = SeriesMatrix::constant(&Mat::from_ints(&field, &[vec![1, 0], vec![1, 1]]), Var::Z, 2).unwrap();
        let other = FactorizedStructure::from_parts(
            2,
            fs.n().clone(),
            fs.theta().mul(&s).unwrap(),
            s.inverse().unwrap().mul(fs.kappa()).unwrap(),
        )
        .unwrap();
        assert!(!equivalence_report(&fs, &other).unwrap().all_passed());
    }

    #[test]
    fn trace_pairing_gives_the_standard_structure() {
        let field = f();
        for r in 2..=4 {
            let (v, l) = trace_pairing_monomial(&field, r, 0, r - 1);
            assert_eq!((v, l), (field.one(), 0));
            let fs = trace_pairing_structure(&field, r, 3).unwrap();
            assert_eq!(fs, FactorizedStructure::standard(&field, r, 3).unwrap());
            assert!(fs.verify_structure().unwrap().all_passed());
        }
    }

    #[test]
    fn trace_is_insensitive_to_lift_ambiguity() {
        let field = f();
        let h = SeriesMatrix::new(&field, Var::Z, 3, 3, 0, 2, vec![
            Mat::from_ints(&field, &[vec![1, 2, 0], vec![0, 3, 1], vec![4, 0, 2]]),
            Mat::from_ints(&field, &[vec![0, 1, 0], vec![2, 0, 0], vec![1, 1, 1]]),
        ]).unwrap();
        for amb in endomorphism_lift_ambiguity(&field, 3, 2).unwrap() {
            assert_eq!(h.add(&amb.scale(&field.int(5))).unwrap().trace(), h.trace());
        }
    }
}
