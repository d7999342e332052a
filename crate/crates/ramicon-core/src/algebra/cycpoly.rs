// SPDX-License-Identifier: MIT OR Apache-2.0
//! Dense univariate polynomials with coefficients in `Q(ζ_R)`, lowest degree first.

use super::cyclotomic::{rat_int, CycNum, Field, FieldExt};

/// Drops trailing zero coefficients.
pub fn trim(mut p: Vec<CycNum>) -> Vec<CycNum> {
    while matches!(p.last(), Some(c) if c.is_zero()) {
        p.pop();
    }
    p
}

/// Degree, `None` for the zero polynomial.
pub fn degree(p: &[CycNum]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

/// Product of two polynomials.
pub fn mul(field: &Field, a: &[CycNum], b: &[CycNum]) -> Vec<CycNum> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(out)
}

/// Value at a point (Horner).
pub fn eval(field: &Field, p: &[CycNum], x: &CycNum) -> CycNum {
    p.iter().rev().fold(field.zero(), |acc, c| &(&acc * x) + c)
}

/// Formal derivative.
pub fn derivative(p: &[CycNum]) -> Vec<CycNum> {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c.scale(&rat_int(i as i64))).collect())
}

/// Remainder of Euclidean division. Panics if `b` is zero.
pub fn rem(a: &[CycNum], b: &[CycNum]) -> Vec<CycNum> {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = b[db].inv().expect("leading coefficient is nonzero");
    let mut r = trim(a.to_vec());
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let factor = &r[dr] * &lead_inv;
        for (i, c) in b.iter().enumerate().take(db + 1) {
            r[dr - db + i] = &r[dr - db + i] - &(&factor * c);
        }
        r = trim(r);
    }
    r
}

/// Monic greatest common divisor (empty for two zero polynomials).
pub fn gcd(a: &[CycNum], b: &[CycNum]) -> Vec<CycNum> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(d) = degree(&x) {
        let inv = x[d].inv().expect("leading coefficient is nonzero");
        x = x.iter().map(|c| c * &inv).collect();
    }
    x
}

/// Whether a nonconstant polynomial has no repeated roots.
pub fn is_separable(p: &[CycNum]) -> bool {
    let g = gcd(p, &derivative(p));
    degree(&g) == Some(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CycField;

    #[test]
    fn separability() {
        let f = CycField::new(1);
        // λ² − 1 is separable, λ² is not.
        assert!(is_separable(&[f.int(-1), f.zero(), f.one()]));
        assert!(!is_separable(&[f.zero(), f.zero(), f.one()]));
        // (λ − 1)²(λ + 2) shares λ − 1 with its derivative.
        let p = mul(&f, &mul(&f, &[f.int(-1), f.one()], &[f.int(-1), f.one()]), &[f.int(2), f.one()]);
        assert_eq!(gcd(&p, &derivative(&p)), vec![f.int(-1), f.one()]);
        assert_eq!(eval(&f, &p, &f.one()), f.zero());
    }
}
