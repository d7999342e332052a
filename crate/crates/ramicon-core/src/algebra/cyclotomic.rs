// SPDX-License-Identifier: MIT OR Apache-2.0
//! Exact rationals and the cyclotomic field `Q(ζ_R)`.
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^{φ(R)-1}` of
//! `Q[x]/(Φ_R(x))`. The defining polynomial is computed once per field by the
//! recursive quotient `Φ_R = (x^R - 1) / Π_{d | R, d < R} Φ_d` and shared
//! through an [`Arc`], so values are cheap to clone and safe to send between
//! threads.
//!
//! Arithmetic operators (`+`, `-`, `*`, `/`) panic when the operands live in
//! fields of different orders, the same way shape mismatches panic in dense
//! array libraries. [`cyc_arith`] is the checked entry point.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly;
use super::AlgebraError;

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Builds the rational `n / d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"` (optional leading sign, decimal digits only).
pub fn parse_rational(text: &str) -> Result<Rational, AlgebraError> {
    let text = text.trim();
    let bad = || AlgebraError::Parse(format!("malformed rational {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let valid = |s: &str| {
        let digits = s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) {
        return Err(bad());
    }
    let n: BigInt = num.trim_start_matches('+').parse().map_err(|_| bad())?;
    let d: BigInt = den.trim_start_matches('+').parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(AlgebraError::Parse(format!(
            "malformed rational {text:?}: zero denominator"
        )));
    }
    Ok(BigRational::new(n, d))
}

/// Renders a rational as `"p/q"`, or `"p"` when the denominator is one.
pub fn render_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Integer coefficients of the `n`-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic order must be positive");
    let to_q = |v: &[BigInt]| -> Vec<Rational> {
        v.iter().map(|c| BigRational::from_integer(c.clone())).collect()
    };
    // x^n - 1
    let mut numerator = vec![Rational::zero(); n as usize + 1];
    numerator[0] = -Rational::one();
    numerator[n as usize] = Rational::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = to_q(&cyclotomic_polynomial(d));
            let (quo, rem) = poly::divrem(&numerator, &phi_d);
            debug_assert!(rem.is_empty(), "cyclotomic division must be exact");
            numerator = quo;
        }
    }
    numerator
        .into_iter()
        .map(|c| {
            debug_assert!(c.is_integer());
            c.to_integer()
        })
        .collect()
}

/// Euler's totient, computed by trial division.
pub fn euler_phi(n: u32) -> usize {
    (1..=n).filter(|k| k.gcd(&n) == 1).count()
}

/// The field `Q(ζ_R)` with its defining polynomial.
#[derive(Debug, PartialEq, Eq)]
pub struct CycField {
    order: u32,
    /// Monic `Φ_R`, lowest degree first; length `φ(R) + 1`.
    modulus: Vec<Rational>,
}

/// Shared handle to a cyclotomic field.
pub type Field = Arc<CycField>;

impl CycField {
    /// Creates `Q(ζ_order)`. Panics if `order == 0`.
    pub fn new(order: u32) -> Field {
        let modulus = cyclotomic_polynomial(order)
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        Arc::new(CycField { order, modulus })
    }

    /// The order `R` of the distinguished root of unity.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Degree `φ(R)` of the field over `Q`.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Whether `ζ_r` lies in this field, i.e. `r` divides `R`.
    pub fn contains_root_of_unity(&self, r: usize) -> bool {
        r >= 1 && (self.order as usize) % r == 0
    }

    /// Reduces an arbitrary-length coefficient vector modulo `Φ_R`.
    fn reduce(&self, mut coeffs: Vec<Rational>) -> Vec<Rational> {
        let d = self.degree();
        if coeffs.len() > d {
            for i in (d..coeffs.len()).rev() {
                let c = std::mem::take(&mut coeffs[i]);
                if c.is_zero() {
                    continue;
                }
                let shift = i - d;
                for (j, m) in self.modulus.iter().enumerate().take(d) {
                    if !m.is_zero() {
                        coeffs[shift + j] -= &c * m;
                    }
                }
            }
            coeffs.truncate(d);
        }
        coeffs.resize(d, Rational::zero());
        coeffs
    }
}

/// Convenience constructors attached to a field handle.
pub trait FieldExt {
    /// The additive identity.
    fn zero(&self) -> CycNum;
    /// The multiplicative identity.
    fn one(&self) -> CycNum;
    /// Embeds an integer.
    fn int(&self, n: i64) -> CycNum;
    /// Embeds `n / d`.
    fn frac(&self, n: i64, d: i64) -> CycNum;
    /// Embeds a rational.
    fn rational(&self, q: Rational) -> CycNum;
    /// `ζ_R^j` for any integer `j`.
    fn zeta_pow(&self, j: i64) -> CycNum;
    /// `ζ_r^j` where `r` divides the field order.
    fn root_of_unity_pow(&self, r: usize, j: i64) -> CycNum;
    /// Builds an element from power-basis coordinates; shorter inputs are zero padded.
    fn from_coeffs(&self, coeffs: Vec<Rational>) -> Result<CycNum, AlgebraError>;
}

impl FieldExt for Field {
    fn zero(&self) -> CycNum {
        CycNum { field: self.clone(), coeffs: vec![Rational::zero(); self.degree()] }
    }

    fn one(&self) -> CycNum {
        self.int(1)
    }

    fn int(&self, n: i64) -> CycNum {
        self.rational(rat_int(n))
    }

    fn frac(&self, n: i64, d: i64) -> CycNum {
        self.rational(rat(n, d))
    }

    fn rational(&self, q: Rational) -> CycNum {
        let mut coeffs = vec![Rational::zero(); self.degree()];
        coeffs[0] = q;
        CycNum { field: self.clone(), coeffs }
    }

    fn zeta_pow(&self, j: i64) -> CycNum {
        let e = j.rem_euclid(self.order as i64) as usize;
        let mut coeffs = vec![Rational::zero(); e + 1];
        coeffs[e] = Rational::one();
        CycNum { field: self.clone(), coeffs: self.reduce(coeffs) }
    }

    fn root_of_unity_pow(&self, r: usize, j: i64) -> CycNum {
        assert!(self.contains_root_of_unity(r), "ζ_{r} is not in Q(ζ_{})", self.order);
        let step = (self.order as usize / r) as i64;
        self.zeta_pow(j.rem_euclid(r as i64) * step)
    }

    fn from_coeffs(&self, coeffs: Vec<Rational>) -> Result<CycNum, AlgebraError> {
        if coeffs.len() > self.degree() {
            return Err(AlgebraError::Parse(format!(
                "cyclotomic element has {} coordinates but Q(ζ_{}) has degree {}",
                coeffs.len(),
                self.order,
                self.degree()
            )));
        }
        Ok(CycNum { field: self.clone(), coeffs: self.reduce(coeffs) })
    }
}

/// Exact element of `Q(ζ_R)`.
#[derive(Clone)]
pub struct CycNum {
    field: Field,
    coeffs: Vec<Rational>,
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        self.field.order == other.field.order && self.coeffs == other.coeffs
    }
}

impl Eq for CycNum {}

impl CycNum {
    /// The field this element lives in.
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Power-basis coordinates (length `φ(R)`).
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Whether the element is zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Whether the element equals one.
    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value if the element lies in `Q`.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn check_same(&self, other: &CycNum) -> Result<(), AlgebraError> {
        if self.field.order != other.field.order {
            Err(AlgebraError::OrderMismatch(self.field.order, other.field.order))
        } else {
            Ok(())
        }
    }

    fn assert_same(&self, other: &CycNum) {
        assert_eq!(
            self.field.order, other.field.order,
            "mixed cyclotomic orders in arithmetic"
        );
    }

    /// Multiplicative inverse, or `DivisionByZero`.
    pub fn inv(&self) -> Result<CycNum, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if self.field.degree() == 1 {
            return Ok(self.field.rational(self.coeffs[0].recip()));
        }
        let inv = poly::inverse_mod(&self.coeffs, &self.field.modulus)
            .ok_or(AlgebraError::DivisionByZero)?;
        Ok(CycNum { field: self.field.clone(), coeffs: self.field.reduce(inv) })
    }

    /// Multiplies by a rational scalar.
    pub fn scale(&self, q: &Rational) -> CycNum {
        CycNum { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    /// Integer power (negative exponents invert).
    pub fn pow(&self, e: i64) -> Result<CycNum, AlgebraError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut out = self.field.one();
        let mut b = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                out = &out * &b;
            }
            b = &b * &b;
            n >>= 1;
        }
        Ok(out)
    }

    /// Applies the field automorphism `ζ ↦ ζ^j`; `j` must be coprime to `R`.
    pub fn galois(&self, j: i64) -> CycNum {
        let r = self.field.order as i64;
        assert_eq!(j.rem_euclid(r).gcd(&r), 1, "ζ ↦ ζ^{j} is not an automorphism");
        let mut acc = self.field.zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &self.field.zeta_pow(j * i as i64).scale(c);
            }
        }
        acc
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> CycNum {
        self.galois(-1)
    }

    /// The image under `Q(ζ_R) ⊂ Q(ζ_S)`, `ζ_R ↦ ζ_S^{S/R}`; `R` must divide `S`.
    pub fn embed(&self, target: &Field) -> Result<CycNum, AlgebraError> {
        let (from, to) = (self.field.order, target.order);
        if to % from != 0 {
            return Err(AlgebraError::OrderMismatch(from, to));
        }
        let step = i64::from(to / from);
        let mut acc = target.zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &target.zeta_pow(step * i as i64).scale(c);
            }
        }
        Ok(acc)
    }
}

/// The four field operations selectable in [`cyc_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycOp {
    /// Sum.
    Add,
    /// Difference.
    Sub,
    /// Product.
    Mul,
    /// Quotient.
    Div,
}

/// Checked field arithmetic: rejects mixed orders and division by zero.
pub fn cyc_arith(a: &CycNum, b: &CycNum, op: CycOp) -> Result<CycNum, AlgebraError> {
    a.check_same(b)?;
    Ok(match op {
        CycOp::Add => a + b,
        CycOp::Sub => a - b,
        CycOp::Mul => a * b,
        CycOp::Div => a * &b.inv()?,
    })
}

impl Add<&CycNum> for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        self.assert_same(rhs);
        CycNum {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Sub<&CycNum> for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self.assert_same(rhs);
        CycNum {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(x, y)| x - y).collect(),
        }
    }
}

impl Mul<&CycNum> for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        self.assert_same(rhs);
        if self.field.degree() == 1 {
            return CycNum {
                field: self.field.clone(),
                coeffs: vec![&self.coeffs[0] * &rhs.coeffs[0]],
            };
        }
        if self.is_zero() || rhs.is_zero() {
            return self.field.zero();
        }
        let prod = poly::mul(&self.coeffs, &rhs.coeffs);
        CycNum { field: self.field.clone(), coeffs: self.field.reduce(prod) }
    }
}

impl Div<&CycNum> for &CycNum {
    type Output = CycNum;
    fn div(self, rhs: &CycNum) -> CycNum {
        self * &rhs.inv().expect("division by zero in Q(ζ)")
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycNum> for CycNum {
            type Output = CycNum;
            fn $m(self, rhs: CycNum) -> CycNum {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&CycNum> for CycNum {
            type Output = CycNum;
            fn $m(self, rhs: &CycNum) -> CycNum {
                (&self).$m(rhs)
            }
        }
        impl $tr<CycNum> for &CycNum {
            type Output = CycNum;
            fn $m(self, rhs: CycNum) -> CycNum {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", render_rational(&mag))?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{}*", render_rational(&mag))?;
                    }
                    if i == 1 {
                        write!(f, "ζ")?;
                    } else {
                        write!(f, "ζ^{i}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} [Q(ζ_{})]", self.field.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_respects_arithmetic_and_roots() {
        let small = CycField::new(3);
        let big = CycField::new(6);
        let zeta = small.zeta_pow(1);
        assert_eq!(zeta.embed(&big).unwrap(), big.zeta_pow(2));
        let x = &small.frac(1, 2) + &small.zeta_pow(2);
        let y = &small.int(3) - &zeta;
        assert_eq!((&x * &y).embed(&big).unwrap(), &x.embed(&big).unwrap() * &y.embed(&big).unwrap());
        assert!(zeta.embed(&CycField::new(4)).is_err());
        assert_eq!(CycField::new(1).frac(2, 3).embed(&big).unwrap(), big.frac(2, 3));
    }

    #[test]
    fn cyclotomic_polynomials_small_orders() {
        let ints = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(3), ints(&[1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
        for n in 1..=30 {
            assert_eq!(cyclotomic_polynomial(n).len() - 1, euler_phi(n));
        }
    }

    #[test]
    fn zeta4_squared_is_minus_one() {
        let f = CycField::new(4);
        let z = f.zeta_pow(1);
        assert_eq!(cyc_arith(&z, &z, CycOp::Mul).unwrap(), f.int(-1));
    }

    #[test]
    fn rational_addition() {
        let f = CycField::new(1);
        let s = cyc_arith(&f.frac(1, 2), &f.frac(1, 3), CycOp::Add).unwrap();
        assert_eq!(s, f.frac(5, 6));
    }

    #[test]
    fn zeta2_squared_is_one() {
        // Oracle: ζ_2 reduces to -1 because Φ_2 = x + 1.
        let f = CycField::new(2);
        let z = f.zeta_pow(1);
        assert_eq!(z, f.int(-1));
        assert_eq!(&z * &z, f.one());
    }

    #[test]
    fn order_mismatch_and_division_by_zero() {
        let a = CycField::new(3).one();
        let b = CycField::new(4).one();
        assert_eq!(cyc_arith(&a, &b, CycOp::Add), Err(AlgebraError::OrderMismatch(3, 4)));
        let z = CycField::new(3).zero();
        assert_eq!(cyc_arith(&a, &z, CycOp::Div), Err(AlgebraError::DivisionByZero));
    }

    #[test]
    fn zeta_power_r_is_one_and_inverse_works() {
        for order in [3u32, 5, 6, 8, 12] {
            let f = CycField::new(order);
            let z = f.zeta_pow(1);
            assert_eq!(z.pow(order as i64).unwrap(), f.one());
            let x = &f.zeta_pow(1) + &f.int(2);
            assert_eq!(&x * &x.inv().unwrap(), f.one());
        }
    }

    #[test]
    fn galois_and_conjugation() {
        let f = CycField::new(5);
        let z = f.zeta_pow(1);
        assert_eq!(z.galois(2), f.zeta_pow(2));
        assert_eq!(z.conj(), f.zeta_pow(4));
        assert_eq!(&z * &z.conj(), f.one());
    }

    #[test]
    fn parse_and_render_rationals() {
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat_int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.5").is_err());
        assert_eq!(render_rational(&rat(6, 4)), "3/2");
        assert_eq!(render_rational(&rat(-4, 2)), "-2");
    }

    #[test]
    fn display_formats_power_basis() {
        let f = CycField::new(3);
        let x = &f.int(1) - &f.zeta_pow(1).scale(&rat(1, 2));
        assert_eq!(x.to_string(), "1 - 1/2*ζ");
        assert_eq!(f.zero().to_string(), "0");
    }
}
