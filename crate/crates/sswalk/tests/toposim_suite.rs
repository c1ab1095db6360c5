//! Regression suite for the real-space topological simulations: bound modes
//! at phase interfaces, localization metrics, and the 2D edge-state machinery.
//! Numeric thresholds were frozen from an independent prototype run.

use sswalk::core::{apply, axis_marginal, make_basis_state, operator_distance, LatticeGeometry};
use sswalk::operators::{oqw_step, ssqw2d_step_profile, ssqw_step, CoinAngle, CoinProfile};
use sswalk::toposim::{
    bound_state_spectrum, build_inhomogeneous_ssqw, edge_band, edge_state_sim_2d, edge_wavepacket,
    evolve, max_group_velocity_center, BoundaryConfig, BoundaryWindow, DetectorSettings,
};
use sswalk::{c, cr};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

fn topological_config() -> BoundaryConfig {
    BoundaryConfig::two_zone(
        64,
        CoinAngle::new(FRAC_PI_4),
        CoinAngle::new(0.0),
        CoinAngle::new(-FRAC_PI_2),
    )
}

#[test]
fn interface_between_distinct_phases_hosts_two_zero_modes() {
    let cfg = topological_config();
    let u = build_inhomogeneous_ssqw(&cfg).unwrap();
    let spec = bound_state_spectrum(&u, &cfg.boundaries, &DetectorSettings::default()).unwrap();
    let flagged = spec.flagged_indices();
    assert_eq!(flagged.len(), 2, "one mode per interface");
    for &i in &flagged {
        let e = spec.quasienergies[i];
        assert!(e.abs().min((e.abs() - PI).abs()) <= 1e-6, "E = {e:.3e}");
        assert!(spec.metrics[i].window_prob >= 0.5);
        assert!(spec.metrics[i].ipr > 0.3, "delocalized: {}", spec.metrics[i].ipr);
    }
    // Ring hybridization splitting between the two interfaces is tiny at N=64.
    let split = spec.splitting_near(0.0, 1e-6).unwrap();
    assert!(split < 1e-10, "splitting {split:.3e}");
}

#[test]
fn flagged_mode_decay_length_is_subsite() {
    let cfg = topological_config();
    let u = build_inhomogeneous_ssqw(&cfg).unwrap();
    let spec = bound_state_spectrum(&u, &cfg.boundaries, &DetectorSettings::default()).unwrap();
    let idx = spec.flagged_indices()[0];
    let m = &spec.metrics[idx];
    let xi = m.decay_length.expect("bound mode should admit a decay fit");
    // Frozen reference 0.5887.
    assert!((xi - 0.5887).abs() < 1e-3, "xi = {xi}");
    assert!(m.fit_points >= 4);
}

#[test]
fn same_phase_junction_has_no_bound_modes() {
    let cfg = BoundaryConfig::two_zone(
        64,
        CoinAngle::new(FRAC_PI_4),
        CoinAngle::new(-PI / 8.0),
        CoinAngle::new(-PI / 16.0),
    );
    let u = build_inhomogeneous_ssqw(&cfg).unwrap();
    let spec = bound_state_spectrum(&u, &cfg.boundaries, &DetectorSettings::default()).unwrap();
    assert!(spec.flagged_indices().is_empty());
}

#[test]
fn bound_mode_count_survives_boundary_translation() {
    for split in [20usize, 32, 45] {
        let cfg = BoundaryConfig::two_zone_at(
            64,
            CoinAngle::new(FRAC_PI_4),
            CoinAngle::new(0.0),
            CoinAngle::new(-FRAC_PI_2),
            split,
            0,
        );
        let u = build_inhomogeneous_ssqw(&cfg).unwrap();
        let spec = bound_state_spectrum(&u, &cfg.boundaries, &DetectorSettings::default()).unwrap();
        assert_eq!(spec.flagged_indices().len(), 2, "split at {split}");
    }
}

#[test]
fn flagged_mode_is_stationary_under_evolution() {
    let cfg = topological_config();
    let u = build_inhomogeneous_ssqw(&cfg).unwrap();
    let spec = bound_state_spectrum(&u, &cfg.boundaries, &DetectorSettings::default()).unwrap();
    let idx = spec.flagged_indices()[0];
    let traj = evolve(&spec.eigenvectors[idx], &u, 100).unwrap();
    let series = traj.window_prob_series(&cfg.window(5));
    let drift = series
        .iter()
        .map(|w| (w - series[0]).abs())
        .fold(0.0f64, f64::max);
    assert!(drift < 1e-8, "window probability drift {drift:.3e}");
}

#[test]
fn smoothing_shifts_bound_energies_but_keeps_them_near_zero() {
    // With a ramped interface the symmetry pinning is only approximate; the
    // drift is reported by the detector through larger epsilon_e.
    let cfg = BoundaryConfig::two_zone_at(
        64,
        CoinAngle::new(FRAC_PI_4),
        CoinAngle::new(0.0),
        CoinAngle::new(-FRAC_PI_2),
        32,
        4,
    );
    let u = build_inhomogeneous_ssqw(&cfg).unwrap();
    let settings = DetectorSettings {
        epsilon_e: 0.3,
        ..DetectorSettings::default()
    };
    let spec = bound_state_spectrum(&u, &cfg.boundaries, &settings).unwrap();
    assert!(
        spec.flagged_indices().len() >= 2,
        "smoothed interface should still bind"
    );
    let strict = bound_state_spectrum(&u, &cfg.boundaries, &DetectorSettings::default()).unwrap();
    let _ = strict; // strictness may or may not flag; drift is reported, not asserted
}

#[test]
fn uniform_config_matches_plain_split_step() {
    let a = ssqw_step(CoinAngle::new(0.3), CoinAngle::new(0.7), 16).unwrap();
    let b = build_inhomogeneous_ssqw(&BoundaryConfig::uniform(
        16,
        CoinAngle::new(0.3),
        CoinAngle::new(0.7),
    ))
    .unwrap();
    assert!(operator_distance(&a, &b).unwrap() < 1e-15);
}

#[test]
fn homogeneous_walk_spreads_ballistically() {
    let n = 64usize;
    let geom = LatticeGeometry::ring(n).unwrap();
    let inv = 1.0 / 2.0f64.sqrt();
    let psi0 = make_basis_state(&geom, &[n / 2], (cr(inv), c(0.0, inv))).unwrap();
    let u = oqw_step(CoinAngle::new(FRAC_PI_4), n).unwrap();
    let traj = evolve(&psi0, &u, 25).unwrap();
    let stds = traj.std_series(0).unwrap();
    // After transients the spread rate std/t is constant within 5%.
    let rates: Vec<f64> = (10..=25).map(|t| stds[t] / t as f64).collect();
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    for r in &rates {
        assert!((r - mean).abs() / mean < 0.05, "rate {r} vs mean {mean}");
    }
}

#[test]
fn structured_2d_stepper_agrees_with_dense_matrix() {
    let (n1, n2) = (8usize, 10usize);
    let theta1 = CoinAngle::new(0.3);
    let profile = CoinProfile::two_zone(n1, CoinAngle::new(0.4), CoinAngle::new(-0.9));
    let dense = ssqw2d_step_profile(theta1, &profile, n1, n2).unwrap();
    let geom = LatticeGeometry::torus(n1, n2).unwrap();
    let psi = make_basis_state(&geom, &[3, 4], (cr(0.6), c(0.0, 0.8))).unwrap();
    let traj_dense = evolve(&psi, &dense, 4).unwrap();
    let traj_fast = edge_state_sim_2d(theta1, &profile, n1, n2, &psi, 4, None).unwrap();
    for (pd, pf) in traj_dense
        .distributions
        .iter()
        .zip(&traj_fast.distributions)
    {
        for (a, b) in pd.iter().zip(pf.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
    let (m1d, m2d) = (
        traj_dense.std_series(0).unwrap(),
        traj_fast.std_series(0).unwrap(),
    );
    for (a, b) in m1d.iter().zip(&m2d) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn edge_band_crosses_zero_with_localized_modes() {
    let (n1, n2) = (32usize, 64usize);
    let profile = CoinProfile::two_zone(
        n1,
        CoinAngle::new(-PI / 3.0),
        CoinAngle::new(-2.0 * PI / 3.0),
    );
    let window = BoundaryWindow::new(vec![16], 5);
    let band = edge_band(CoinAngle::new(FRAC_PI_4), &profile, n1, n2, &window, 0.4, 0.5).unwrap();
    // Frozen reference: 12 of 64 transverse momenta carry an edge mode with
    // |E| < 0.4 and window weight > 0.5, spanning E in [-0.347, 0.347].
    assert_eq!(band.len(), 12);
    let emin = band.iter().map(|p| p.e).fold(f64::MAX, f64::min);
    let emax = band.iter().map(|p| p.e).fold(f64::MIN, f64::max);
    assert!(emin < -0.3 && emax > 0.3);
    assert!((emin + emax).abs() < 1e-6, "band should be symmetric");
    for p in &band {
        assert!(p.window_prob > 0.5);
    }
    let (_kyc, vg) = max_group_velocity_center(&band, n2).unwrap();
    assert!((vg.abs() - 1.189).abs() < 1e-2, "group velocity {vg}");
}

#[test]
fn edge_wavepacket_starts_localized_at_interface() {
    let (n1, n2) = (32usize, 64usize);
    let profile = CoinProfile::two_zone(
        n1,
        CoinAngle::new(-PI / 3.0),
        CoinAngle::new(-2.0 * PI / 3.0),
    );
    let window = BoundaryWindow::new(vec![16], 5);
    let band = edge_band(CoinAngle::new(FRAC_PI_4), &profile, n1, n2, &window, 0.4, 0.5).unwrap();
    let (kyc, _) = max_group_velocity_center(&band, n2).unwrap();
    let psi = edge_wavepacket(&band, n1, n2, kyc, 0.35).unwrap();
    assert!((psi.norm() - 1.0).abs() < 1e-12);
    let p1 = axis_marginal(&psi, 0).unwrap();
    assert!(window.probability(&p1) > 0.95);
}

#[test]
fn no_edge_band_in_a_uniform_strip() {
    let (n1, n2) = (16usize, 16usize);
    let profile = CoinProfile::uniform(n1, CoinAngle::new(-PI / 3.0));
    let window = BoundaryWindow::new(vec![8], 3);
    let r = edge_band(CoinAngle::new(FRAC_PI_4), &profile, n1, n2, &window, 0.2, 0.5);
    assert!(r.is_err(), "uniform strip must not report an edge band");
}

#[test]
fn eigenvector_residuals_stay_small() {
    let cfg = BoundaryConfig::two_zone(
        48,
        CoinAngle::new(FRAC_PI_4),
        CoinAngle::new(0.0),
        CoinAngle::new(-FRAC_PI_2),
    );
    let u = build_inhomogeneous_ssqw(&cfg).unwrap();
    let spec = bound_state_spectrum(&u, &cfg.boundaries, &DetectorSettings::default()).unwrap();
    let mut worst = 0.0f64;
    for (i, psi) in spec.eigenvectors.iter().enumerate() {
        let moved = apply(&u, psi).unwrap();
        let lam = c(0.0, -spec.quasienergies[i]).exp();
        let diff: f64 = moved
            .amplitudes()
            .iter()
            .zip(psi.amplitudes())
            .map(|(a, b)| (a - b * lam).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(diff);
    }
    assert!(worst < 1e-8, "worst eigenpair residual {worst:.3e}");
}

#[test]
fn trajectory_distributions_each_sum_to_one() {
    let n = 32usize;
    let geom = LatticeGeometry::ring(n).unwrap();
    let psi0 = make_basis_state(&geom, &[16], (cr(0.8), c(0.0, 0.6))).unwrap();
    let u = ssqw_step(CoinAngle::new(0.9), CoinAngle::new(-0.2), n).unwrap();
    let traj = evolve(&psi0, &u, 12).unwrap();
    for p in &traj.distributions {
        assert!((p.sum() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn support_stays_inside_light_cone_without_wraparound() {
    let (n, t) = (64usize, 25usize); // n >= 2t + 2
    let geom = LatticeGeometry::ring(n).unwrap();
    let start = n / 2;
    let psi0 = make_basis_state(&geom, &[start], (cr(1.0), cr(0.0))).unwrap();
    let u = oqw_step(CoinAngle::new(FRAC_PI_4), n).unwrap();
    let traj = evolve(&psi0, &u, t).unwrap();
    let last = traj.distributions.last().unwrap();
    for (x, p) in last.iter().enumerate() {
        let d = x.abs_diff(start).min(n - x.abs_diff(start));
        if d > t {
            assert!(*p < 1e-24, "site {x} outside the light cone has p={p:.3e}");
        }
    }
}

#[test]
fn ballistic_peak_tracks_group_velocity_extremum() {
    // For the ordinary walk E = arccos(cos theta cos k), max |dE/dk| = cos theta.
    let (n, t) = (64usize, 25usize);
    let theta = CoinAngle::new(FRAC_PI_4);
    let geom = LatticeGeometry::ring(n).unwrap();
    let inv = 1.0 / 2.0f64.sqrt();
    let psi0 = make_basis_state(&geom, &[n / 2], (cr(inv), c(0.0, inv))).unwrap();
    let u = oqw_step(theta, n).unwrap();
    let traj = evolve(&psi0, &u, t).unwrap();
    let last = traj.distributions.last().unwrap();
    let peak = last
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0;
    let expect = theta.value().cos() * t as f64;
    let disp = (peak as f64 - n as f64 / 2.0).abs();
    assert!(
        (disp - expect).abs() <= 2.0,
        "peak displacement {disp} vs v_g t = {expect:.1}"
    );
}

#[test]
fn delta_state_has_unit_ipr_and_window_probability() {
    let geom = LatticeGeometry::ring(16).unwrap();
    let psi = make_basis_state(&geom, &[7], (cr(1.0), cr(0.0))).unwrap();
    let m = sswalk::toposim::localization_metrics(&psi, 7, 2).unwrap();
    assert!((m.ipr - 1.0).abs() < 1e-12);
    assert!((m.window_prob - 1.0).abs() < 1e-12);
}

#[test]
fn spectrum_eigenvectors_are_orthonormal() {
    let cfg = BoundaryConfig::two_zone(
        24,
        CoinAngle::new(FRAC_PI_4),
        CoinAngle::new(0.0),
        CoinAngle::new(-FRAC_PI_2),
    );
    let u = build_inhomogeneous_ssqw(&cfg).unwrap();
    let spec = bound_state_spectrum(&u, &cfg.boundaries, &DetectorSettings::default()).unwrap();
    let dim = spec.eigenvectors.len();
    assert_eq!(dim, 48);
    for i in 0..dim {
        for j in i..dim {
            let ip = spec.eigenvectors[i].inner(&spec.eigenvectors[j]);
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!(
                (ip.norm() - expect).abs() < 1e-8,
                "modes {i},{j}: |<i|j>| = {:.3e}",
                ip.norm()
            );
        }
    }
}
