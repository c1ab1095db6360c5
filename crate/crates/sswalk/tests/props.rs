//! Property tests for the structural invariants of the toolkit: unitarity of
//! every constructor, norm preservation under evolution, rotation-group
//! behavior of the coin, and the momentum/branch conventions.

use proptest::prelude::*;
use sswalk::core::{apply, make_basis_state, position_distribution, LatticeGeometry, WalkerState};
use sswalk::operators::{
    coin, coin_layer, oqw_step, qplate, shift_s, site_dependent_coin_1d, ssqw_double_step,
    ssqw_step, t_minus, t_plus, CoinAngle, CoinProfile, QPlateParams,
};
use sswalk::spectral::{momentum_grid, quasienergy_ss};
use sswalk::{c, wrap_quasienergy};
use std::f64::consts::PI;

fn angle() -> impl Strategy<Value = f64> {
    -3.1f64..3.1f64
}

fn lattice() -> impl Strategy<Value = usize> {
    2usize..12
}

proptest! {
    #[test]
    fn coin_angle_lands_in_half_open_interval(raw in -50.0f64..50.0) {
        let v = CoinAngle::new(raw).value();
        prop_assert!(v > -PI && v <= PI);
        let shifted = CoinAngle::new(raw + 2.0 * PI).value();
        prop_assert!((shifted - v).abs() < 1e-9 || (shifted - v).abs() > 2.0 * PI - 1e-9);
    }

    #[test]
    fn quasienergy_wrap_lands_in_half_open_interval(raw in -50.0f64..50.0) {
        let v = wrap_quasienergy(raw);
        prop_assert!(v > -PI && v <= PI);
        prop_assert!(((v - raw) / (2.0 * PI)).round() * 2.0 * PI + raw - v < 1e-9);
    }

    #[test]
    fn coin_is_a_rotation_group(a in angle(), b in angle()) {
        let prod = coin(CoinAngle::new(a)).mul(&coin(CoinAngle::new(b)));
        let sum = coin(CoinAngle::new(a + b));
        prop_assert!(prod.sub(&sum).max_abs() < 1e-12);
        let inv = coin(CoinAngle::new(a)).mul(&coin(CoinAngle::new(-a)));
        prop_assert!(inv.sub(&sswalk::Mat2::identity()).max_abs() < 1e-12);
    }

    #[test]
    fn every_1d_constructor_is_unitary(t1 in angle(), t2 in angle(), n in lattice()) {
        // PropagatorMatrix::new runs the 1e-12 unitarity check internally,
        // so success of each constructor is the assertion.
        let a1 = CoinAngle::new(t1);
        let a2 = CoinAngle::new(t2);
        prop_assert!(oqw_step(a1, n).is_ok());
        prop_assert!(ssqw_step(a1, a2, n).is_ok());
        prop_assert!(shift_s(n).is_ok());
        prop_assert!(t_plus(n).is_ok());
        prop_assert!(t_minus(n).is_ok());
        prop_assert!(coin_layer(a1, n).is_ok());
        if n % 2 == 0 {
            prop_assert!(ssqw_double_step(a1, a2, n).is_ok());
        }
    }

    #[test]
    fn half_shifts_multiply_to_full_shift(n in lattice()) {
        let s = shift_s(n).unwrap();
        let prod = t_plus(n).unwrap().compose(&t_minus(n).unwrap()).unwrap();
        let d = sswalk::core::operator_distance(&prod, &s).unwrap();
        prop_assert!(d < 1e-15);
    }

    #[test]
    fn double_step_factors_into_ordinary_steps(t1 in angle(), t2 in angle()) {
        let n = 8;
        let a1 = CoinAngle::new(t1);
        let a2 = CoinAngle::new(t2);
        let lhs = ssqw_double_step(a1, a2, n).unwrap();
        let rhs = oqw_step(a1, n).unwrap().compose(&oqw_step(a2, n).unwrap()).unwrap();
        let d = sswalk::core::operator_distance(&lhs, &rhs).unwrap();
        prop_assert!(d <= 1e-12);
    }

    #[test]
    fn evolution_preserves_norm_and_distribution(
        t1 in angle(),
        t2 in angle(),
        site in 0usize..10,
        re in -1.0f64..1.0,
        im in -1.0f64..1.0,
    ) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let n = 10;
        let geom = LatticeGeometry::ring(n).unwrap();
        let mut psi = make_basis_state(&geom, &[site], (c(re, 0.3), c(0.1, im))).unwrap();
        let u = ssqw_step(CoinAngle::new(t1), CoinAngle::new(t2), n).unwrap();
        for _ in 0..50 {
            psi = apply(&u, &psi).unwrap();
        }
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        let p = position_distribution(&psi);
        prop_assert!((p.sum() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|x| *x >= -1e-15));
    }

    #[test]
    fn uniform_profile_matches_global_coin(t in angle(), n in lattice()) {
        let a = CoinAngle::new(t);
        let lhs = site_dependent_coin_1d(&CoinProfile::uniform(n, a), n).unwrap();
        let rhs = coin_layer(a, n).unwrap();
        let d = sswalk::core::operator_distance(&lhs, &rhs).unwrap();
        prop_assert!(d < 1e-15);
    }

    #[test]
    fn qplate_is_unitary_when_charge_fits(delta in 0.0f64..PI, two_q in -6i64..7) {
        let n = 8usize;
        let params = QPlateParams::new(two_q, delta).unwrap();
        let built = qplate(params, n);
        if two_q != 0 && two_q.rem_euclid(n as i64) == 0 {
            prop_assert!(built.is_err());
        } else {
            prop_assert!(built.is_ok());
        }
    }

    #[test]
    fn split_step_band_is_even_and_bounded(t1 in angle(), t2 in angle(), k in -3.1f64..3.1) {
        let a1 = CoinAngle::new(t1);
        let a2 = CoinAngle::new(t2);
        let e = quasienergy_ss(a1, a2, k);
        prop_assert!((0.0..=PI).contains(&e));
        prop_assert!((e - quasienergy_ss(a1, a2, -k)).abs() < 1e-12);
    }

    #[test]
    fn bloch_vector_is_unit_when_defined(t1 in angle(), t2 in angle(), idx in 0usize..32) {
        let k = momentum_grid(32)[idx];
        let b = sswalk::spectral::hamiltonian_ss_closed_form(CoinAngle::new(t1), CoinAngle::new(t2), k);
        if let Some(n) = b.n {
            let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-10);
        }
        prop_assert!(b.u.unitarity_deviation() < 1e-12);
        prop_assert!(b.h.herm_deviation() < 1e-10);
    }

    #[test]
    fn random_states_normalize(seed in 1u64..5000) {
        let n = 6usize;
        let geom = LatticeGeometry::ring(n).unwrap();
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let amp = ndarray::Array1::from_shape_fn(2 * n, |_| c(next(), next()));
        prop_assume!(amp.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6);
        let psi = WalkerState::normalized(geom, amp).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
    }
}
