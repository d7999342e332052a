// SPDX-License-Identifier: MIT OR Apache-2.0
//! Randomized algebraic identities checked exactly.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ramicon_core::algebra::series::{from_w, to_w};
use ramicon_core::algebra::{rat, series_d_dz, series_inv, CycField, CycNum, Field, FieldExt, TruncSeries, Var};
use ramicon_core::connection::{gauge_transform, normal_matrix};
use ramicon_core::isomonodromy::{lift_ramified, AdaptedConnection};
use ramicon_core::pairing::{sym2_basis, xi_pairing, Side, Sym2Element};
use ramicon_core::ramstruct::FactorizedStructure;
use ramicon_core::sample::{random_direction, random_exponent, random_gauge, small_rational};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

fn element(field: &Field, coords: &[(i64, i64)]) -> CycNum {
    let coeffs = coords.iter().take(field.degree()).map(|&(p, q)| rat(p, q)).collect();
    field.from_coeffs(coeffs).unwrap()
}

fn coords() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-6i64..=6, 1i64..=4), 6)
}

fn series(field: &Field, ord: i64, prec: i64, coeffs: &[(i64, i64)]) -> TruncSeries {
    let values = coeffs.iter().take((prec - ord) as usize).map(|&(p, q)| field.frac(p, q)).collect();
    TruncSeries::new(field, Var::Z, ord, prec, values).unwrap()
}

fn shape() -> impl Strategy<Value = (usize, usize)> {
    prop::sample::select(vec![(2usize, 2usize), (3, 2), (2, 3)])
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn cyclotomic_field_axioms(order in prop::sample::select(vec![1u32, 3, 4, 5, 6]), a in coords(), b in coords(), c in coords()) {
        let field = CycField::new(order);
        let (a, b, c) = (element(&field, &a), element(&field, &b), element(&field, &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn roots_of_unity_have_the_right_order(order in prop::sample::select(vec![3u32, 4, 5, 6]), j in -10i64..10) {
        let field = CycField::new(order);
        let zeta = field.zeta_pow(j);
        prop_assert!(zeta.pow(order as i64).unwrap().is_one());
        prop_assert_eq!(zeta.galois(-1), field.zeta_pow(-j));
    }

    #[test]
    fn series_inverse_is_exact(ord in -2i64..2, len in 1i64..6, lead in 1i64..5, rest in coords()) {
        let field = CycField::new(1);
        let mut values = vec![(lead, 1)];
        values.extend(rest);
        let s = series(&field, ord, ord + len, &values);
        let product = s.mul(&series_inv(&s).unwrap()).unwrap();
        let one = TruncSeries::constant(&field, Var::Z, field.one(), product.prec()).unwrap();
        prop_assert!(product.agrees_below(&one, product.prec()));
    }

    #[test]
    fn derivative_obeys_leibniz(a in coords(), b in coords(), oa in -2i64..2, ob in -2i64..2) {
        let field = CycField::new(1);
        let x = series(&field, oa, oa + 5, &a);
        let y = series(&field, ob, ob + 5, &b);
        let lhs = series_d_dz(&x.mul(&y).unwrap());
        let rhs = series_d_dz(&x).mul(&y).unwrap().add(&x.mul(&series_d_dz(&y)).unwrap()).unwrap();
        let upto = lhs.prec().min(rhs.prec());
        prop_assert!(lhs.agrees_below(&rhs, upto));
    }

    #[test]
    fn ramified_substitution_round_trips(a in coords(), ord in -3i64..3, r in 2usize..5) {
        let field = CycField::new(1);
        let x = series(&field, ord, ord + 4, &a);
        let up = to_w(&x, r).unwrap();
        prop_assert_eq!(up.var(), Var::W);
        prop_assert_eq!(from_w(&up, r).unwrap(), x);
    }

    #[test]
    fn gauge_action_is_a_right_action(seed in any::<u64>(), (r, m) in shape()) {
        let field = CycField::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nu = random_exponent(&mut rng, &field, r, m).unwrap();
        let base = normal_matrix(&nu, 6).unwrap();
        let g = random_gauge(&mut rng, &field, r, 2, 6).unwrap();
        let h = random_gauge(&mut rng, &field, r, 2, 6).unwrap();
        let stepwise = gauge_transform(&gauge_transform(&base, &g).unwrap(), &h).unwrap();
        let composed = gauge_transform(&base, &g.compose(&h).unwrap()).unwrap();
        prop_assert_eq!(&stepwise, &composed);
        let back = gauge_transform(&gauge_transform(&base, &g).unwrap(), &g.inverse()).unwrap();
        prop_assert_eq!(back, base);
    }

    #[test]
    fn ramified_lift_is_linear_in_the_direction(seed in any::<u64>(), (r, m) in shape()) {
        let field = CycField::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nu = random_exponent(&mut rng, &field, r, m).unwrap();
        let depth = 2 * m as i64 - 1;
        let ac = AdaptedConnection::new(&normal_matrix(&nu, depth + m as i64).unwrap(), &nu, depth).unwrap();
        let d1 = random_direction(&mut rng, &field, r, m).unwrap();
        let d2 = random_direction(&mut rng, &field, r, m).unwrap();
        let t = small_rational(&mut rng, &field, 4);
        let l1 = lift_ramified(&ac, &d1).unwrap();
        let l2 = lift_ramified(&ac, &d2).unwrap();
        let sum = lift_ramified(&ac, &d1.add(&d2).unwrap()).unwrap();
        let scaled = lift_ramified(&ac, &d1.scale(&t)).unwrap();
        prop_assert_eq!(&sum.b[&1], &l1.b[&1].add(&l2.b[&1]).unwrap());
        prop_assert_eq!(&sum.c[&1], &l1.c[&1].add(&l2.c[&1]).unwrap());
        prop_assert_eq!(&scaled.b[&1], &l1.b[&1].scale(&t));
        prop_assert_eq!(&scaled.c[&1], &l1.c[&1].scale(&t));
        prop_assert!(sum.is_flat().unwrap());
    }

    #[test]
    fn residue_pairing_is_alternating(seed in any::<u64>(), (r, m) in shape()) {
        let field = CycField::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nu = random_exponent(&mut rng, &field, r, m).unwrap();
        let fs = FactorizedStructure::standard(&field, r, m).unwrap();
        let mut pick = |side: Side| -> Sym2Element {
            let basis = sym2_basis(&field, r, m, side).unwrap();
            let items: Vec<(CycNum, &Sym2Element)> =
                basis.iter().map(|b| (small_rational(&mut rng, &field, 3), b)).collect();
            Sym2Element::combination(&field, &items, r, m, side).unwrap()
        };
        let (tau, xi) = (pick(Side::W), pick(Side::V));
        let (tau2, xi2) = (pick(Side::W), pick(Side::V));
        prop_assert!(xi_pairing((&tau, &xi), (&tau, &xi), &nu, &fs).unwrap().is_zero());
        let forward = xi_pairing((&tau, &xi), (&tau2, &xi2), &nu, &fs).unwrap();
        let backward = xi_pairing((&tau2, &xi2), (&tau, &xi), &nu, &fs).unwrap();
        prop_assert!(forward.add(&backward).unwrap().is_zero());
    }
}
