// SPDX-License-Identifier: MIT OR Apache-2.0
//! Dense univariate polynomials over the rationals, stored lowest degree first.
//!
//! Only the handful of operations needed by the cyclotomic field and by the
//! characteristic-polynomial utilities live here.

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Removes trailing zero coefficients so that the last entry (if any) is nonzero.
pub(crate) fn trim(p: &mut Vec<BigRational>) {
    while matches!(p.last(), Some(c) if c.is_zero()) {
        p.pop();
    }
}

/// Degree of a trimmed polynomial; `None` for the zero polynomial.
pub(crate) fn degree(p: &[BigRational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub(crate) fn mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(&mut out);
    out
}

pub(crate) fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
        out.push(x - y);
    }
    trim(&mut out);
    out
}

/// Euclidean division `a = q*b + r` with `deg r < deg b`. Panics if `b` is zero.
pub(crate) fn divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead = b[db].clone();
    let mut rem: Vec<BigRational> = a.to_vec();
    trim(&mut rem);
    let mut quo = vec![BigRational::zero(); rem.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let factor = &rem[dr] / &lead;
        let shift = dr - db;
        for (i, c) in b.iter().enumerate().take(db + 1) {
            if !c.is_zero() {
                let t = &factor * c;
                rem[shift + i] -= t;
            }
        }
        quo[shift] = factor;
        trim(&mut rem);
    }
    trim(&mut quo);
    (quo, rem)
}

/// Extended Euclid: returns `u` with `u*a ≡ gcd(a, m) (mod m)` together with the gcd.
pub(crate) fn inverse_mod(a: &[BigRational], m: &[BigRational]) -> Option<Vec<BigRational>> {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    trim(&mut r0);
    trim(&mut r1);
    let mut s0: Vec<BigRational> = Vec::new();
    let mut s1: Vec<BigRational> = vec![BigRational::one()];
    while degree(&r1).is_some() {
        let (q, r) = divrem(&r0, &r1);
        let s = sub(&s0, &mul(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    // r0 is the gcd (up to a scalar), s0 the matching cofactor of `a`.
    let d = degree(&r0)?;
    if d != 0 {
        return None;
    }
    let lead = r0[0].clone();
    let mut out: Vec<BigRational> = s0.into_iter().map(|c| c / &lead).collect();
    let (_, rem) = divrem(&out, m);
    out = rem;
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn divrem_reconstructs_dividend() {
        let a = vec![q(1), q(0), q(-3), q(2)];
        let b = vec![q(-1), q(1)];
        let (quo, rem) = divrem(&a, &b);
        let back = sub(&mul(&quo, &b), &sub(&[], &rem));
        assert_eq!(back, a);
    }

    #[test]
    fn inverse_mod_of_linear_polynomial() {
        // (x + 1)^{-1} modulo x^2 + 1 is (1 - x)/2.
        let inv = inverse_mod(&[q(1), q(1)], &[q(1), q(0), q(1)]).unwrap();
        let prod = mul(&inv, &[q(1), q(1)]);
        let (_, r) = divrem(&prod, &[q(1), q(0), q(1)]);
        assert_eq!(r, vec![q(1)]);
    }
}
