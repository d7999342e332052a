// SPDX-License-Identifier: MIT OR Apache-2.0
//! Local deformation spaces of a factorized ramified structure and the
//! pairing between them.
//!
//! Work on `E = O_m^r` in the adapted basis with dual basis `e*_i`. A
//! symmetric tensor on the `V` side is a matrix `X : E → E^∨` with
//! `X(V_k) ⊆ W_k`; one on the `W` side is `T : E^∨ → E` with `T(W_k) ⊆ V_k`.
//! Each is stored as its canonical ambient lift modulo `x^m`:
//!
//! * entries strictly past the antidiagonal on the side's "deep" half are
//!   divisible by `x`,
//! * entries on the side's "shallow" half are known modulo `x^{m−1}` and
//!   stored with zero top coefficient,
//! * antidiagonal entries are known modulo `x^m`; an antidiagonal pair agrees
//!   modulo `x^{m−1}` but may differ in its top coefficient.
//!
//! For `X` the deep half is `i + j ≥ r`; for `T` it is `i + j ≤ r − 2`, so
//! that `T = J X J` with `J` the antidiagonal permutation.

use crate::algebra::{CycNum, Field, FieldExt, Mat, SeriesMatrix, TruncSeries, Var};
use crate::error::{Error, Result};
use crate::exponent::{validate_exponent, RamifiedExponent};
use crate::ramstruct::{in_filtration, quotient_coordinates, quotient_vector, FactorizedStructure};

/// Which symmetric space an element belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// Tensors `E → E^∨` compatible with `V_k → W_k`.
    V,
    /// Tensors `E^∨ → E` compatible with `W_k → V_k`.
    W,
}

/// Position class of an entry relative to the antidiagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Zone {
    /// Divisible by `x`, known modulo `x^m`.
    Deep,
    /// Known modulo `x^{m−1}`.
    Shallow,
    /// Known modulo `x^m`.
    Anti,
}

fn zone(side: Side, r: usize, i: usize, j: usize) -> Zone {
    let s = match side {
        Side::V => i + j,
        Side::W => 2 * (r - 1) - (i + j),
    };
    if s + 1 == r {
        Zone::Anti
    } else if s >= r {
        Zone::Deep
    } else {
        Zone::Shallow
    }
}

/// Closed form `r + (m−1) r (r+1) / 2` for the dimension of either symmetric space.
pub fn sym2_dimension(r: usize, m: usize) -> usize {
    r + (m - 1) * r * (r + 1) / 2
}

/// One coordinate of a symmetric space: the entries `(row, col, exponent)` it sets to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sym2Slot {
    /// Entries set by this coordinate.
    pub positions: Vec<(usize, usize, i64)>,
}

/// Coordinates of the symmetric space of the given side, in basis order.
pub fn sym2_slots(r: usize, m: usize, side: Side) -> Vec<Sym2Slot> {
    let top = m as i64 - 1;
    let mut out = Vec::new();
    for i in 0..r {
        for j in i..r {
            let pair = |e: i64| {
                if i == j {
                    vec![(i, j, e)]
                } else {
                    vec![(i, j, e), (j, i, e)]
                }
            };
            match zone(side, r, i, j) {
                Zone::Shallow => (0..top).for_each(|e| out.push(Sym2Slot { positions: pair(e) })),
                Zone::Deep => (1..=top).for_each(|e| out.push(Sym2Slot { positions: pair(e) })),
                Zone::Anti => {
                    (0..top).for_each(|e| out.push(Sym2Slot { positions: pair(e) }));
                    out.push(Sym2Slot { positions: vec![(i, j, top)] });
                    if i != j {
                        out.push(Sym2Slot { positions: vec![(j, i, top)] });
                    }
                }
            }
        }
    }
    out
}

/// A symmetric tensor stored as its canonical ambient lift modulo `x^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sym2Element {
    side: Side,
    m: usize,
    table: SeriesMatrix,
}

impl Sym2Element {
    /// Canonicalizes an ambient lift: drops the top coefficient of shallow
    /// entries and checks divisibility and symmetry.
    pub fn from_lift(side: Side, m: usize, lift: &SeriesMatrix) -> Result<Sym2Element> {
        let r = lift.rows();
        if lift.cols() != r || r < 2 || m < 2 {
            return Err(Error::InvalidInput("symmetric tensors need an r×r table with r, m ≥ 2".into()));
        }
        let field = lift.field().clone();
        let top = m as i64 - 1;
        let base = lift.extend_ord(0).truncate(m as i64)?;
        let mut coeffs: Vec<Mat> = (0..m as i64).map(|e| base.coeff(e).expect("known")).collect();
        for i in 0..r {
            for j in 0..r {
                if zone(side, r, i, j) == Zone::Shallow {
                    coeffs[top as usize].set(i, j, field.zero());
                }
            }
        }
        let table = SeriesMatrix::new(&field, Var::Z, r, r, 0, m as i64, coeffs)?;
        let out = Sym2Element { side, m, table };
        out.check()?;
        Ok(out)
    }

    fn check(&self) -> Result<()> {
        let r = self.r();
        let top = self.m as i64 - 1;
        for i in 0..r {
            for j in 0..r {
                let z = zone(self.side, r, i, j);
                let a = self.table.entry(i, j);
                let b = self.table.entry(j, i);
                if z == Zone::Deep && !a.coeff(0).expect("known").is_zero() {
                    return Err(Error::AxiomViolation(format!("entry ({i},{j}) must be divisible by x")));
                }
                let upto = if z == Zone::Anti { top } else { top + 1 };
                if !a.agrees_below(&b, upto) {
                    return Err(Error::AxiomViolation(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(())
    }

    /// The zero tensor.
    pub fn zero(field: &Field, r: usize, m: usize, side: Side) -> Result<Sym2Element> {
        let table = SeriesMatrix::zero(field, Var::Z, r, r, 0, m as i64)?;
        Ok(Sym2Element { side, m, table })
    }

    /// The element with the given coordinates.
    pub fn from_coordinates(field: &Field, r: usize, m: usize, side: Side, coords: &[CycNum]) -> Result<Self> {
        let slots = sym2_slots(r, m, side);
        if coords.len() != slots.len() {
            return Err(Error::InvalidInput(format!("expected {} coordinates", slots.len())));
        }
        let mut coeffs = vec![Mat::zeros(field, r, r); m];
        for (slot, c) in slots.iter().zip(coords) {
            for &(i, j, e) in &slot.positions {
                coeffs[e as usize].set(i, j, c.clone());
            }
        }
        let table = SeriesMatrix::new(field, Var::Z, r, r, 0, m as i64, coeffs)?;
        Ok(Sym2Element { side, m, table })
    }

    /// Coordinates in the basis of [`sym2_basis`].
    pub fn coordinates(&self) -> Vec<CycNum> {
        sym2_slots(self.r(), self.m, self.side)
            .iter()
            .map(|slot| {
                let (i, j, e) = slot.positions[0];
                self.table.coeff(e).expect("known").get(i, j).clone()
            })
            .collect()
    }

    /// Side of the tensor.
    pub fn side(&self) -> Side {
        self.side
    }

    /// Rank.
    pub fn r(&self) -> usize {
        self.table.rows()
    }

    /// Pole order.
    pub fn m(&self) -> usize {
        self.m
    }

    /// The canonical ambient lift.
    pub fn table(&self) -> &SeriesMatrix {
        &self.table
    }

    /// Linear combination `Σ c_i x_i` of elements of one side.
    pub fn combination(field: &Field, items: &[(CycNum, &Sym2Element)], r: usize, m: usize, side: Side) -> Result<Self> {
        let mut acc = Sym2Element::zero(field, r, m, side)?.table;
        for (c, x) in items {
            if x.side != side {
                return Err(Error::InvalidInput("cannot combine tensors of different sides".into()));
            }
            acc = acc.add(&x.table.scale(c))?;
        }
        Ok(Sym2Element { side, m, table: acc })
    }
}

/// Basis of the symmetric space on the given side.
pub fn sym2_basis(field: &Field, r: usize, m: usize, side: Side) -> Result<Vec<Sym2Element>> {
    if r < 2 || m < 2 {
        return Err(Error::InvalidInput("symmetric spaces need r ≥ 2 and m ≥ 2".into()));
    }
    let n = sym2_dimension(r, m);
    (0..n)
        .map(|k| {
            let coords: Vec<CycNum> = (0..n).map(|i| if i == k { field.one() } else { field.zero() }).collect();
            Sym2Element::from_coordinates(field, r, m, side, &coords)
        })
        .collect()
}

/// A tuple `(a_k(w))` with `a_k ∈ C[w]/(w^{mr−r+1})` and `w(a_k − a_{k+1}) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A0Element {
    r: usize,
    m: usize,
    components: Vec<Vec<CycNum>>,
}

impl A0Element {
    /// Validates the agreement condition.
    pub fn new(r: usize, m: usize, components: Vec<Vec<CycNum>>) -> Result<A0Element> {
        let len = m * r - r + 1;
        if components.len() != r || components.iter().any(|c| c.len() != len) {
            return Err(Error::InvalidInput(format!("A0 elements need {r} components of length {len}")));
        }
        for k in 0..r - 1 {
            if components[k][..len - 1] != components[k + 1][..len - 1] {
                return Err(Error::InvalidInput(format!("components {k} and {} differ below the top", k + 1)));
            }
        }
        Ok(A0Element { r, m, components })
    }

    /// The components `a_k`.
    pub fn components(&self) -> &[Vec<CycNum>] {
        &self.components
    }

    /// Ambient endomorphism `f(N) + x^{m−1} diag(γ_k)` inducing `a_k(N)` on
    /// each quotient, with `f` the common part and `γ_k` the top coefficients.
    pub fn lift(&self, fs: &FactorizedStructure) -> Result<SeriesMatrix> {
        let field = fs.field().clone();
        let (r, m) = (self.r, self.m);
        let len = m * r - r + 1;
        let n = fs.n();
        let mut out = SeriesMatrix::zero(&field, Var::Z, r, r, 0, m as i64)?;
        let mut power = SeriesMatrix::identity(&field, Var::Z, r, m as i64)?;
        for i in 0..len - 1 {
            let c = &self.components[0][i];
            if !c.is_zero() {
                out = out.add(&power.scale(c))?;
            }
            power = power.mul(n)?.truncate(m as i64)?;
        }
        let tops: Vec<CycNum> = self.components.iter().map(|c| c[len - 1].clone()).collect();
        let diag = SeriesMatrix::monomial(&Mat::diag(&field, &tops), Var::Z, m as i64 - 1, m as i64)?.extend_ord(0);
        Ok(out.add(&diag)?)
    }
}

/// An `O_m`-linear functional on `A⁰`, stored by its values on the basis of [`a_spaces`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A1Functional {
    r: usize,
    m: usize,
    values: Vec<Vec<CycNum>>,
}

impl A1Functional {
    /// Values (coefficients modulo `x^m`) on the `A⁰` basis.
    pub fn values(&self) -> &[Vec<CycNum>] {
        &self.values
    }

    /// Whether every value vanishes.
    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().all(CycNum::is_zero)
    }

    /// Whether the value table is compatible with multiplication by `x`.
    pub fn is_o_linear(&self) -> bool {
        let (r, m) = (self.r, self.m);
        let top = m * r - r;
        let times_x = |v: &[CycNum]| -> Vec<CycNum> {
            let mut out = vec![v[0].field().zero(); m];
            out[1..m].clone_from_slice(&v[..m - 1]);
            out
        };
        let zero = |v: &[CycNum]| v.iter().all(CycNum::is_zero);
        for i in 0..=top {
            let shifted = times_x(&self.values[i]);
            if i + r <= top {
                if shifted != self.values[i + r] {
                    return false;
                }
            } else if !zero(&shifted) {
                return false;
            }
        }
        self.values[top + 1..].iter().all(|v| zero(&times_x(v)))
    }

    /// Flattened coordinate vector.
    pub fn flatten(&self) -> Vec<CycNum> {
        self.values.iter().flatten().cloned().collect()
    }
}

/// Bases of `A⁰` (`w^i` in every component for `0 ≤ i ≤ mr−r`, then `w^{mr−r}` in
/// component `j` for `1 ≤ j ≤ r−1`) and of its `O_m`-dual `A¹`.
pub fn a_spaces(field: &Field, r: usize, m: usize) -> Result<(Vec<A0Element>, Vec<A1Functional>)> {
    if r < 2 || m < 1 {
        return Err(Error::InvalidInput("A-spaces need r ≥ 2 and m ≥ 1".into()));
    }
    let len = m * r - r + 1;
    let unit = |i: usize| -> Vec<CycNum> { (0..len).map(|e| if e == i { field.one() } else { field.zero() }).collect() };
    let mut a0 = Vec::new();
    for i in 0..len {
        a0.push(A0Element::new(r, m, vec![unit(i); r])?);
    }
    for j in 1..r {
        let comps = (0..r).map(|k| if k == j { unit(len - 1) } else { vec![field.zero(); len] }).collect();
        a0.push(A0Element::new(r, m, comps)?);
    }
    // A functional is determined by its values on the generators b_0, …, b_{r−1}, d_1, …, d_{r−1}
    // with b_i for i ≥ 1 sent into xO_m and d_j into x^{m−1}O_m.
    let mut a1 = Vec::new();
    let mut push_generator = |g: usize, q: usize| {
        let mut values = vec![vec![field.zero(); m]; a0.len()];
        if g < r {
            let mut i = g;
            let mut e = q;
            while i < len && e < m {
                values[i][e] = field.one();
                i += r;
                e += 1;
            }
        } else {
            values[len + g - r][q] = field.one();
        }
        a1.push(A1Functional { r, m, values });
    };
    for q in 0..m {
        push_generator(0, q);
    }
    for g in 1..r {
        for q in 1..m {
            push_generator(g, q);
        }
    }
    for g in r..2 * r - 1 {
        push_generator(g, m - 1);
    }
    Ok((a0, a1))
}

fn power_sum(n: &SeriesMatrix, p: usize, m: usize) -> Result<Vec<SeriesMatrix>> {
    let field = n.field().clone();
    let mut out = vec![SeriesMatrix::identity(&field, Var::Z, n.rows(), m as i64)?];
    for _ in 0..p {
        let next = out.last().expect("nonempty").mul(n)?.truncate(m as i64)?;
        out.push(next);
    }
    Ok(out)
}

fn scalar_times(s: &TruncSeries, x: &SeriesMatrix) -> Result<SeriesMatrix> {
    let field = x.field().clone();
    let r = x.rows();
    let coeffs: Vec<Mat> = (0..s.prec()).map(|e| Mat::identity(&field, r).scale(&s.coeff(e).expect("known"))).collect();
    let scalar = SeriesMatrix::new(&field, Var::Z, r, r, 0, s.prec(), coeffs)?;
    Ok(scalar.mul(x)?)
}

fn check_shapes(tau: &Sym2Element, xi: &Sym2Element, fs: &FactorizedStructure) -> Result<()> {
    if tau.side != Side::W || xi.side != Side::V {
        return Err(Error::InvalidInput("expected a W-side and a V-side tensor".into()));
    }
    if tau.r() != fs.r() || xi.r() != fs.r() || tau.m != fs.m() || xi.m != fs.m() {
        return Err(Error::InvalidInput("tensor shape does not match the structure".into()));
    }
    Ok(())
}

/// `θ∘ξ + τ∘κ` as an endomorphism of `E`.
pub fn mixed_endomorphism(tau: &Sym2Element, xi: &Sym2Element, fs: &FactorizedStructure) -> Result<SeriesMatrix> {
    check_shapes(tau, xi, fs)?;
    let m = fs.m() as i64;
    let a = fs.theta().mul(&xi.table)?.truncate(m)?;
    let b = tau.table.mul(fs.kappa())?.truncate(m)?;
    Ok(a.add(&b)?)
}

/// The pair `(a(N)θ, −κ a(N))` attached to an element of `A⁰`.
pub fn d0(a: &A0Element, fs: &FactorizedStructure) -> Result<(Sym2Element, Sym2Element)> {
    let m = fs.m() as i64;
    let u = a.lift(fs)?;
    let tau = u.mul(fs.theta())?.truncate(m)?;
    let xi = fs.kappa().mul(&u)?.truncate(m)?.neg();
    Ok((Sym2Element::from_lift(Side::W, fs.m(), &tau)?, Sym2Element::from_lift(Side::V, fs.m(), &xi)?))
}

/// Ambient form of `δ = Σ_{p=1}^{r−1} Σ_{l=1}^{p} ν_p N^{p−l}(θξ + τκ)N^{l−1}` modulo `x^m`.
pub fn delta_ambient(
    tau: &Sym2Element,
    xi: &Sym2Element,
    nu: &RamifiedExponent,
    fs: &FactorizedStructure,
) -> Result<SeriesMatrix> {
    validate_exponent(nu)?;
    let (r, m) = (fs.r(), fs.m());
    let mixed = mixed_endomorphism(tau, xi, fs)?;
    let powers = power_sum(fs.n(), r, m)?;
    let mut out = SeriesMatrix::zero(fs.field(), Var::Z, r, r, 0, m as i64)?;
    for p in 1..r {
        let nu_p = nu.component(p, Var::Z, m as i64)?;
        for l in 1..=p {
            let term = powers[p - l].mul(&mixed)?.mul(&powers[l - 1])?.truncate(m as i64)?;
            out = out.add(&scalar_times(&nu_p, &term)?.truncate(m as i64)?)?;
        }
    }
    Ok(out)
}

/// The endomorphisms induced by an ambient endomorphism on each `V̄_k`, in
/// the coordinates of [`quotient_coordinates`]. Fails if `V_k` is not preserved.
pub fn induced_on_quotients(x: &SeriesMatrix, r: usize, m: usize) -> Result<Vec<Mat>> {
    let field = x.field().clone();
    let mut out = Vec::with_capacity(r);
    for k in 0..r {
        let coords = quotient_coordinates(r, m, k);
        let mut cols = Vec::with_capacity(coords.len());
        for &(i, e) in &coords {
            let mut unit = Mat::zeros(&field, r, 1);
            unit.set(i, 0, field.one());
            let v = SeriesMatrix::monomial(&unit, Var::Z, e, m as i64)?.extend_ord(0);
            let image = x.mul(&v)?.truncate(m as i64)?;
            if !in_filtration(&image, k, 0, m) {
                return Err(Error::AxiomViolation(format!("endomorphism does not preserve V_{k}")));
            }
            cols.push(quotient_vector(&image, r, m, k));
        }
        out.push(Mat::from_cols(&field, coords.len(), &cols));
    }
    Ok(out)
}

/// `δ` as a tuple of endomorphisms of the quotients `V̄_k`.
pub fn delta_map(
    tau: &Sym2Element,
    xi: &Sym2Element,
    nu: &RamifiedExponent,
    fs: &FactorizedStructure,
) -> Result<Vec<Mat>> {
    induced_on_quotients(&delta_ambient(tau, xi, nu, fs)?, fs.r(), fs.m())
}

/// `Θ(f) = Tr(f (θξ + τκ))` evaluated on the `A⁰` basis with the canonical lifts of `f`.
pub fn theta_functional(tau: &Sym2Element, xi: &Sym2Element, fs: &FactorizedStructure) -> Result<A1Functional> {
    let mixed = mixed_endomorphism(tau, xi, fs)?;
    theta_with(&mixed, fs, |a| a.lift(fs))
}

/// `Θ` with a caller-supplied lift of each `A⁰` basis element.
pub fn theta_with(
    mixed: &SeriesMatrix,
    fs: &FactorizedStructure,
    lift: impl Fn(&A0Element) -> Result<SeriesMatrix>,
) -> Result<A1Functional> {
    let (r, m) = (fs.r(), fs.m());
    let (a0, _) = a_spaces(fs.field(), r, m)?;
    let mut values = Vec::with_capacity(a0.len());
    for a in &a0 {
        let tr = lift(a)?.mul(mixed)?.truncate(m as i64)?.trace();
        values.push((0..m as i64).map(|e| tr.coeff(e).expect("known")).collect());
    }
    Ok(A1Functional { r, m, values })
}

/// `Ξ(η, η′) = Σ_{p=1}^{r−1} Σ_{j=1}^{p} (ν_p/2) Tr(τ′ ᵗN^{p−j} ξ N^{j−1} − N^{p−j} τ ᵗN^{j−1} ξ′)` modulo `x^m`.
pub fn xi_pairing(
    eta: (&Sym2Element, &Sym2Element),
    eta2: (&Sym2Element, &Sym2Element),
    nu: &RamifiedExponent,
    fs: &FactorizedStructure,
) -> Result<TruncSeries> {
    validate_exponent(nu)?;
    let (tau, xi) = eta;
    let (tau2, xi2) = eta2;
    check_shapes(tau, xi, fs)?;
    check_shapes(tau2, xi2, fs)?;
    let (r, m) = (fs.r(), fs.m());
    let mi = m as i64;
    let field = fs.field().clone();
    let powers = power_sum(fs.n(), r, m)?;
    let tpowers = power_sum(&fs.n().transpose(), r, m)?;
    let half = field.frac(1, 2);
    let mut total = TruncSeries::zero(&field, Var::Z, 0, mi)?;
    for p in 1..r {
        let nu_p = nu.component(p, Var::Z, mi)?.scale(&half);
        let mut inner = SeriesMatrix::zero(&field, Var::Z, r, r, 0, mi)?;
        for j in 1..=p {
            let first = tau2.table.mul(&tpowers[p - j])?.mul(&xi.table)?.mul(&powers[j - 1])?;
            let second = powers[p - j].mul(&tau.table)?.mul(&tpowers[j - 1])?.mul(&xi2.table)?;
            inner = inner.add(&first.sub(&second)?.truncate(mi)?)?;
        }
        total = total.add(&nu_p.mul(&inner.trace())?.truncate(mi)?)?;
    }
    Ok(total)
}

/// Outcome of the perfect-pairing check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingReport {
    /// `dim ker(ξ ↦ Θ_{(0,ξ)})`.
    pub kernel_dim: usize,
    /// `dim coker(d⁰ → W side)`.
    pub cokernel_dim: usize,
    /// Rank of the residue pairing matrix between the two.
    pub rank: usize,
    /// Whether the pairing vanishes identically against the image of `d⁰`.
    pub vanishes_on_image: bool,
    /// Dimension of the span of the antisymmetric antidiagonal top directions
    /// `E_{i,j} − E_{j,i}` (at the top exponent) that lie in the kernel and
    /// pair to zero with every element of the W side.
    pub antisymmetric_radical_dim: usize,
}

impl PairingReport {
    /// Equal dimensions, full rank and well-definedness on the cokernel.
    pub fn is_perfect(&self) -> bool {
        self.kernel_dim == self.cokernel_dim && self.rank == self.kernel_dim && self.vanishes_on_image
    }

    /// The same test after quotienting the kernel by the antisymmetric antidiagonal tops.
    pub fn is_perfect_modulo_antisymmetric_tops(&self) -> bool {
        self.kernel_dim == self.cokernel_dim + self.antisymmetric_radical_dim
            && self.rank == self.cokernel_dim
            && self.vanishes_on_image
    }
}

/// The elements `E_{i,j} − E_{j,i}` at the top exponent for each antidiagonal pair `i < j`.
fn antisymmetric_tops(field: &Field, r: usize, m: usize, side: Side) -> Result<Vec<Sym2Element>> {
    let slots = sym2_slots(r, m, side);
    let top = m as i64 - 1;
    let find = |i: usize, j: usize| slots.iter().position(|s| s.positions == [(i, j, top)]);
    let mut out = Vec::new();
    for i in 0..r {
        let j = r - 1 - i;
        if i >= j {
            continue;
        }
        if let (Some(a), Some(b)) = (find(i, j), find(j, i)) {
            let mut coords = vec![field.zero(); slots.len()];
            coords[a] = field.one();
            coords[b] = field.int(-1);
            out.push(Sym2Element::from_coordinates(field, r, m, side, &coords)?);
        }
    }
    Ok(out)
}

fn residue(s: &TruncSeries, m: usize) -> CycNum {
    s.coeff(m as i64 - 1).expect("known")
}

/// Pairs `ker(Sym²V̄ → A¹)` against `coker(A⁰ → Sym²W̄)` through the top coefficient of `Ξ`.
pub fn perfect_pairing_check(nu: &RamifiedExponent, fs: &FactorizedStructure) -> Result<PairingReport> {
    validate_exponent(nu)?;
    let (r, m) = (fs.r(), fs.m());
    if nu.r() != r || nu.m() != m {
        return Err(Error::InvalidInput("exponent and structure shapes differ".into()));
    }
    let field = fs.field().clone();
    let zero_w = Sym2Element::zero(&field, r, m, Side::W)?;
    let zero_v = Sym2Element::zero(&field, r, m, Side::V)?;
    let basis_v = sym2_basis(&field, r, m, Side::V)?;
    let basis_w = sym2_basis(&field, r, m, Side::W)?;
    let s = basis_v.len();

    let theta_cols: Vec<Vec<CycNum>> =
        basis_v.iter().map(|x| Ok(theta_functional(&zero_w, x, fs)?.flatten())).collect::<Result<_>>()?;
    let theta_mat = Mat::from_cols(&field, theta_cols[0].len(), &theta_cols);
    let kernel: Vec<Sym2Element> = theta_mat
        .nullspace()
        .into_iter()
        .map(|v| {
            let items: Vec<(CycNum, &Sym2Element)> = v.into_iter().zip(basis_v.iter()).collect();
            Sym2Element::combination(&field, &items, r, m, Side::V)
        })
        .collect::<Result<_>>()?;

    let (a0, _) = a_spaces(&field, r, m)?;
    let images: Vec<Sym2Element> = a0.iter().map(|a| Ok(d0(a, fs)?.0)).collect::<Result<_>>()?;
    let mut span: Vec<Vec<CycNum>> = images.iter().map(Sym2Element::coordinates).collect();
    let image_rank = Mat::from_cols(&field, s, &span).rank();
    let mut current = image_rank;
    let mut complement = Vec::new();
    for (k, b) in basis_w.iter().enumerate() {
        span.push(b.coordinates());
        let next = Mat::from_cols(&field, s, &span).rank();
        if next > current {
            current = next;
            complement.push(k);
        } else {
            span.pop();
        }
    }

    let mut vanishes = true;
    for x in &kernel {
        for t in &images {
            if !xi_pairing((&zero_w, x), (t, &zero_v), nu, fs)?.is_zero() {
                vanishes = false;
            }
        }
    }
    let mut rows = Vec::new();
    for x in &kernel {
        let row: Vec<CycNum> = complement
            .iter()
            .map(|&k| Ok(residue(&xi_pairing((&zero_w, x), (&basis_w[k], &zero_v), nu, fs)?, m)))
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    let rank = if rows.is_empty() || complement.is_empty() {
        0
    } else {
        Mat::from_fn(&field, rows.len(), complement.len(), |i, j| rows[i][j].clone()).rank()
    };

    let mut radical = Vec::new();
    for x in antisymmetric_tops(&field, r, m, Side::V)? {
        let in_kernel = theta_functional(&zero_w, &x, fs)?.flatten().iter().all(CycNum::is_zero);
        let mut pairs_to_zero = true;
        for t in &basis_w {
            if !xi_pairing((&zero_w, &x), (t, &zero_v), nu, fs)?.is_zero() {
                pairs_to_zero = false;
            }
        }
        if in_kernel && pairs_to_zero {
            radical.push(x.coordinates());
        }
    }
    let antisymmetric_radical_dim = if radical.is_empty() { 0 } else { Mat::from_cols(&field, s, &radical).rank() };
    Ok(PairingReport {
        kernel_dim: kernel.len(),
        cokernel_dim: complement.len(),
        rank,
        vanishes_on_image: vanishes,
        antisymmetric_radical_dim,
    })
}

/// Kind of a marked point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointKind {
    /// Logarithmic point (pole order 1).
    Log,
    /// Generic unramified irregular point.
    Unramified,
    /// Generic ramified irregular point.
    Ramified,
}

/// `2r²(g−1) + 2 + r(r−1) deg D`.
pub fn moduli_dimension_closed(genus: i64, r: usize, points: &[(PointKind, usize)]) -> i64 {
    let r = r as i64;
    let degree: i64 = points.iter().map(|&(_, m)| m as i64).sum();
    2 * r * r * (genus - 1) + 2 + r * (r - 1) * degree
}

/// The same count assembled from local contributions, using the actual
/// sizes of the symmetric spaces and of `A⁰` at ramified points.
pub fn moduli_dimension_local(genus: i64, r: usize, points: &[(PointKind, usize)]) -> Result<i64> {
    let ri = r as i64;
    let field = crate::algebra::CycField::new(1);
    let mut total = 2 * ri * ri * (genus - 1) + 2;
    for &(kind, m) in points {
        let mi = m as i64;
        match kind {
            PointKind::Log | PointKind::Unramified => total += ri * (ri - 1) * mi,
            PointKind::Ramified => {
                let sym2 = sym2_basis(&field, r, m, Side::V)?.len() as i64;
                let sym2_w = sym2_basis(&field, r, m, Side::W)?.len() as i64;
                let a0 = a_spaces(&field, r, m)?.0.len() as i64;
                total += ri * (ri - 1) + sym2 + sym2_w - 2 * a0;
            }
        }
    }
    Ok(total)
}

/// Dimension of the moduli space; both computations are run and must agree.
pub fn moduli_dimension(genus: i64, r: usize, points: &[(PointKind, usize)]) -> Result<i64> {
    if genus < 0 || r < 1 {
        return Err(Error::InvalidInput("genus must be ≥ 0 and rank ≥ 1".into()));
    }
    for &(kind, m) in points {
        match kind {
            PointKind::Log if m != 1 => {
                return Err(Error::InvalidInput("logarithmic points have pole order 1".into()))
            }
            PointKind::Ramified if r < 2 || m < 2 => {
                return Err(Error::InvalidInput("ramified points need r ≥ 2 and pole order ≥ 2".into()))
            }
            _ if m < 1 => return Err(Error::InvalidInput("pole orders are positive".into())),
            _ => {}
        }
    }
    let closed = moduli_dimension_closed(genus, r, points);
    let local = moduli_dimension_local(genus, r, points)?;
    if closed != local {
        return Err(Error::AxiomViolation(format!("dimension counts disagree: {closed} vs {local}")));
    }
    Ok(closed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CycField;
    use crate::ramstruct::endomorphism_lift_ambiguity;

    fn f() -> Field {
        CycField::new(1)
    }

    /// Dimension from the raw constraint system on all `r²m` coefficients.
    fn brute_force_dimension(field: &Field, r: usize, m: usize) -> usize {
        let idx = |i: usize, j: usize, e: usize| (i * r + j) * m + e;
        let unknowns = r * r * m;
        let mut rows: Vec<Vec<CycNum>> = Vec::new();
        let mut eq = |pairs: &[(usize, i64)]| {
            let mut row = vec![field.zero(); unknowns];
            for &(u, c) in pairs {
                row[u] = field.int(c);
            }
            rows.push(row);
        };
        let mut shallow = 0;
        for i in 0..r {
            for j in 0..r {
                if i + j >= r {
                    eq(&[(idx(i, j, 0), 1)]);
                }
                if i + j + 2 <= r {
                    shallow += 1;
                }
                if i < j {
                    let upto = if i + j < r { m - 1 } else { m };
                    for e in 0..upto {
                        eq(&[(idx(i, j, e), 1), (idx(j, i, e), -1)]);
                    }
                }
            }
        }
        let mat = Mat::from_fn(field, rows.len(), unknowns, |a, b| rows[a][b].clone());
        mat.nullspace().len() - shallow
    }

    #[test]
    fn sym2_dimensions_match_closed_form_and_oracle() {
        let field = f();
        assert_eq!(sym2_basis(&field, 2, 2, Side::V).unwrap().len(), 5);
        assert_eq!(sym2_basis(&field, 3, 2, Side::W).unwrap().len(), 9);
        for r in 2..=4 {
            for m in 2..=3 {
                let n = sym2_dimension(r, m);
                assert_eq!(sym2_basis(&field, r, m, Side::V).unwrap().len(), n);
                assert_eq!(sym2_basis(&field, r, m, Side::W).unwrap().len(), n);
                if r <= 3 {
                    assert_eq!(brute_force_dimension(&field, r, m), n, "r={r} m={m}");
                }
            }
        }
    }

    #[test]
    fn a_spaces_dimensions_and_linearity() {
        let field = f();
        for (r, m) in [(2, 2), (3, 2), (2, 3), (4, 3)] {
            let (a0, a1) = a_spaces(&field, r, m).unwrap();
            assert_eq!(a0.len(), m * r);
            assert_eq!(a1.len(), m * r);
            assert_eq!((m * r - r + 1) + (r - 1), m * r);
            assert!(a1.iter().all(A1Functional::is_o_linear));
            let mat = Mat::from_cols(&field, a1[0].flatten().len(), &a1.iter().map(|x| x.flatten()).collect::<Vec<_>>());
            assert_eq!(mat.rank(), m * r);
        }
        assert!(a_spaces(&field, 1, 2).is_err());
    }

    #[test]
    fn d0_of_constants_and_zero() {
        let field = f();
        let fs = FactorizedStructure::standard(&field, 2, 2).unwrap();
        let (a0, _) = a_spaces(&field, 2, 2).unwrap();
        let zero = A0Element::new(2, 2, vec![vec![field.zero(); 3]; 2]).unwrap();
        let (t, x) = d0(&zero, &fs).unwrap();
        assert!(t.table().is_zero() && x.table().is_zero());
        let (t, x) = d0(&a0[0], &fs).unwrap();
        assert_eq!(t, Sym2Element::from_lift(Side::W, 2, fs.theta()).unwrap());
        assert_eq!(x, Sym2Element::from_lift(Side::V, 2, &fs.kappa().neg()).unwrap());
    }

    #[test]
    fn d1_after_d0_vanishes() {
        let field = f();
        for (r, m) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
            let fs = FactorizedStructure::standard(&field, r, m).unwrap();
            let nu = RamifiedExponent::simple(&field, r, m).unwrap();
            let (a0, _) = a_spaces(&field, r, m).unwrap();
            for a in &a0 {
                let (t, x) = d0(a, &fs).unwrap();
                assert!(delta_map(&t, &x, &nu, &fs).unwrap().iter().all(Mat::is_zero));
                assert!(theta_functional(&t, &x, &fs).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn theta_is_o_linear_and_lift_independent() {
        let field = f();
        let (r, m) = (3, 2);
        let fs = FactorizedStructure::standard(&field, r, m).unwrap();
        let zero_w = Sym2Element::zero(&field, r, m, Side::W).unwrap();
        let ambiguity = endomorphism_lift_ambiguity(&field, r, m).unwrap();
        for x in sym2_basis(&field, r, m, Side::V).unwrap() {
            let theta = theta_functional(&zero_w, &x, &fs).unwrap();
            assert!(theta.is_o_linear());
            let mixed = mixed_endomorphism(&zero_w, &x, &fs).unwrap();
            let other = theta_with(&mixed, &fs, |a| {
                let mut u = a.lift(&fs)?;
                for (k, amb) in ambiguity.iter().enumerate() {
                    u = u.add(&amb.scale(&field.int(k as i64 + 2)))?;
                }
                Ok(u)
            })
            .unwrap();
            assert_eq!(theta, other);
        }
    }

    #[test]
    fn xi_is_alternating() {
        let field = f();
        let (r, m) = (2, 3);
        let fs = FactorizedStructure::standard(&field, r, m).unwrap();
        let mut nu_table = vec![vec![field.int(1), field.int(2), field.int(-1)], vec![field.int(3), field.int(1), field.zero()]];
        nu_table[0][1] = field.frac(1, 2);
        let nu = RamifiedExponent::new(&field, r, m, nu_table).unwrap();
        let bw = sym2_basis(&field, r, m, Side::W).unwrap();
        let bv = sym2_basis(&field, r, m, Side::V).unwrap();
        for (i, t) in bw.iter().enumerate() {
            let x = &bv[(i * 3) % bv.len()];
            assert!(xi_pairing((t, x), (t, x), &nu, &fs).unwrap().is_zero());
            let t2 = &bw[(i + 1) % bw.len()];
            let x2 = &bv[(i + 2) % bv.len()];
            let ab = xi_pairing((t, x), (t2, x2), &nu, &fs).unwrap();
            let ba = xi_pairing((t2, x2), (t, x), &nu, &fs).unwrap();
            assert!(ab.add(&ba).unwrap().is_zero());
        }
    }

    #[test]
    fn pairing_is_perfect_only_modulo_antisymmetric_tops() {
        let field = f();
        for (r, m) in [(2, 2), (3, 2), (2, 3), (3, 3), (4, 2)] {
            let fs = FactorizedStructure::standard(&field, r, m).unwrap();
            let mut table = vec![vec![field.zero(); m]; r];
            table[0][0] = field.int(2);
            table[1][0] = field.int(1);
            if m > 2 {
                table[1][1] = field.int(-3);
            }
            let nu = RamifiedExponent::new(&field, r, m, table).unwrap();
            let report = perfect_pairing_check(&nu, &fs).unwrap();
            // The kernel exceeds the cokernel by the antisymmetric antidiagonal tops.
            assert!(!report.is_perfect(), "r={r} m={m}: {report:?}");
            assert!(report.is_perfect_modulo_antisymmetric_tops(), "r={r} m={m}: {report:?}");
            assert_eq!(report.antisymmetric_radical_dim, r / 2);
            assert_eq!(report.cokernel_dim, sym2_dimension(r, m) - m * r);
        }
    }

    #[test]
    fn moduli_dimension_examples() {
        assert_eq!(moduli_dimension(0, 2, &[(PointKind::Ramified, 4)]).unwrap(), 2);
        assert_eq!(moduli_dimension(1, 2, &[]).unwrap(), 2);
        assert_eq!(moduli_dimension(0, 2, &[(PointKind::Ramified, 2)]).unwrap(), -2);
        let mixed = [(PointKind::Log, 1), (PointKind::Unramified, 3), (PointKind::Ramified, 3)];
        assert_eq!(moduli_dimension(2, 3, &mixed).unwrap(), moduli_dimension_closed(2, 3, &mixed));
        assert!(moduli_dimension(0, 2, &[(PointKind::Log, 2)]).is_err());
    }
}
