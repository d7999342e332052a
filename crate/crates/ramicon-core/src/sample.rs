// SPDX-License-Identifier: MIT OR Apache-2.0
//! Random exact test data: small rationals, exponents, deformation
//! directions, gauges and scrambled connections.
//!
//! Every generator takes the random source explicitly so that seeded runs
//! are reproducible.

use rand::Rng;

use crate::algebra::{CycNum, Field, FieldExt, Mat, SeriesMatrix, Var};
use crate::connection::{gauge_transform, normal_matrix, Connection, Gauge};
use crate::error::Result;
use crate::exponent::{DeformationDirection, RamifiedExponent};

/// A rational `p/q` with `|p| ≤ bound` and `1 ≤ q ≤ 3`.
pub fn small_rational<R: Rng + ?Sized>(rng: &mut R, field: &Field, bound: i64) -> CycNum {
    let p = rng.random_range(-bound..=bound);
    let q = rng.random_range(1..=3);
    field.frac(p, q)
}

/// A nonzero small rational.
pub fn nonzero_rational<R: Rng + ?Sized>(rng: &mut R, field: &Field, bound: i64) -> CycNum {
    loop {
        let x = small_rational(rng, field, bound.max(1));
        if !x.is_zero() {
            return x;
        }
    }
}

/// A valid ramified exponent of rank `r` and pole order `m` with rational coefficients.
pub fn random_exponent<R: Rng + ?Sized>(rng: &mut R, field: &Field, r: usize, m: usize) -> Result<RamifiedExponent> {
    let mut table = vec![vec![field.zero(); m]; r];
    for (k, row) in table.iter_mut().enumerate() {
        for (l, x) in row.iter_mut().enumerate() {
            if k >= 1 && l == m - 1 {
                continue;
            }
            *x = small_rational(rng, field, 3);
        }
    }
    if r > 1 {
        table[1][0] = nonzero_rational(rng, field, 3);
    }
    RamifiedExponent::new(field, r, m, table)
}

/// A random deformation direction with `r × (m−1)` rational coefficients.
pub fn random_direction<R: Rng + ?Sized>(
    rng: &mut R,
    field: &Field,
    r: usize,
    m: usize,
) -> Result<DeformationDirection> {
    let table = (0..r).map(|_| (0..m - 1).map(|_| small_rational(rng, field, 3)).collect()).collect();
    DeformationDirection::new(field, r, m, table)
}

/// A matrix series on `[0, prec)` whose first `terms` coefficients are random.
pub fn random_regular<R: Rng + ?Sized>(
    rng: &mut R,
    field: &Field,
    r: usize,
    terms: usize,
    prec: i64,
) -> Result<SeriesMatrix> {
    let coeffs = (0..terms).map(|_| Mat::from_fn(field, r, r, |_, _| small_rational(rng, field, 2))).collect();
    Ok(SeriesMatrix::new(field, Var::Z, r, r, 0, prec, coeffs)?)
}

/// A random gauge with unipotent lower-triangular constant term and `terms`
/// random higher coefficients, known up to `prec`.
pub fn random_gauge<R: Rng + ?Sized>(rng: &mut R, field: &Field, r: usize, terms: usize, prec: i64) -> Result<Gauge> {
    let mut coeffs = vec![Mat::from_fn(field, r, r, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => field.one(),
        std::cmp::Ordering::Greater => small_rational(rng, field, 2),
        std::cmp::Ordering::Less => field.zero(),
    })];
    for _ in 0..terms {
        coeffs.push(Mat::from_fn(field, r, r, |_, _| small_rational(rng, field, 2)));
    }
    let p = SeriesMatrix::new(field, Var::Z, r, r, 0, prec, coeffs)?;
    Gauge::from_matrix(&p)
}

/// The normal form of `nu` moved by a random gauge, together with that gauge.
pub fn scrambled_connection<R: Rng + ?Sized>(
    rng: &mut R,
    nu: &RamifiedExponent,
    prec: i64,
) -> Result<(Connection, Gauge)> {
    let base = normal_matrix(nu, prec)?;
    let g = random_gauge(rng, nu.field(), nu.r(), 2, prec)?;
    Ok((gauge_transform(&base, &g)?, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CycField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seeded_generators_are_reproducible() {
        let f = CycField::new(1);
        let a = random_exponent(&mut ChaCha8Rng::seed_from_u64(5), &f, 3, 2).unwrap();
        let b = random_exponent(&mut ChaCha8Rng::seed_from_u64(5), &f, 3, 2).unwrap();
        assert_eq!(a, b);
        assert!(!a.coeff(1, 0).is_zero());
    }

    #[test]
    fn scrambled_connection_has_requested_precision() {
        let f = CycField::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let nu = random_exponent(&mut rng, &f, 2, 2).unwrap();
        let (c, g) = scrambled_connection(&mut rng, &nu, 6).unwrap();
        assert_eq!(c.prec(), 6);
        assert_eq!(gauge_transform(&c, &g.inverse()).unwrap(), normal_matrix(&nu, 6).unwrap());
    }
}
