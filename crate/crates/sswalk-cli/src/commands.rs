//! The six analysis pipelines behind the subcommands. Each one resolves
//! its defaults from the merged configuration, runs the corresponding
//! library routine, writes the requested document, and returns a one-line
//! summary plus the process exit code.

use crate::config::ExperimentConfig;
use crate::output::{num, opt_num, write_document};
use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;
use sswalk::core::{make_basis_state, LatticeGeometry};
use sswalk::decomposition::{self, theta_grid, IdentityReport};
use sswalk::operators::{oqw_step, ssqw_step, CoinAngle, CoinProfile};
use sswalk::spectral::{
    dispersion_curve_2d, dispersion_curve_oqw, dispersion_curve_ss, DispersionCurve,
};
use sswalk::{cr, C64};
use sswalk::toposim::{
    bound_state_spectrum, build_inhomogeneous_ssqw, edge_band, edge_state_sim_2d, edge_wavepacket,
    evolve, max_group_velocity_center, phase_diagram_scan, BoundaryConfig, BoundaryWindow,
    DetectorSettings,
};
use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_8};

/// Width of the ky-Gaussian used for edge wavepackets. Narrow enough to
/// stay inside the linear part of the edge band, wide enough to keep the
/// packet compact on a 64-site axis.
const SIGMA_K: f64 = 0.35;

pub fn run(config: &ExperimentConfig) -> Result<(String, u8)> {
    match config.command.as_str() {
        "verify" => run_verify(config),
        "spectrum" => run_spectrum(config),
        "walk" => run_walk(config),
        "boundary" => run_boundary(config),
        "edge2d" => run_edge2d(config),
        "phasediagram" => run_phasediagram(config),
        other => bail!("unknown command '{other}'"),
    }
}

fn angle_or(value: Option<f64>, default: f64) -> CoinAngle {
    CoinAngle::new(value.unwrap_or(default))
}

fn run_verify(config: &ExperimentConfig) -> Result<(String, u8)> {
    let claim = config
        .claim
        .as_deref()
        .ok_or_else(|| anyhow!("verify requires --claim"))?;
    let t1 = angle_or(config.theta1, FRAC_PI_4);
    let t2 = angle_or(config.theta2, FRAC_PI_8);
    let mut config = config.clone();
    config.theta1 = Some(t1.value());
    let report: IdentityReport = match claim {
        "cyclic-property" => {
            let n = config.n.get_or_insert(16);
            decomposition::verify_cyclic_property(t1, *n)?
        }
        "1d-decomposition" => {
            config.theta2 = Some(t2.value());
            let n = config.n.get_or_insert(16);
            decomposition::verify_1d_decomposition(t1, t2, *n)?
        }
        "2d-decomposition" => {
            config.theta2 = Some(t2.value());
            let n1 = *config.n.get_or_insert(6);
            let n2 = *config.n2.get_or_insert(n1);
            decomposition::verify_2d_decomposition(t1, t2, n1, n2)?
        }
        "qplate-identity" => {
            let n = config.n.get_or_insert(8);
            decomposition::verify_qplate_identity(t1, *n)?
        }
        "single-qplate-scheme" => {
            config.theta2 = Some(t2.value());
            let n = config.n.get_or_insert(8);
            decomposition::verify_single_qplate_scheme(t1, t2, *n)?
        }
        other => bail!(
            "unknown claim '{other}' (expected cyclic-property, 1d-decomposition, \
             2d-decomposition, qplate-identity, or single-qplate-scheme)"
        ),
    };
    let tolerance = *config
        .tolerance
        .get_or_insert(decomposition::IDENTITY_TOL);
    let config = config;
    let rows = vec![vec![
        report.claim_id.clone(),
        report.matched_form.clone().unwrap_or_default(),
        num(report.residual),
    ]];
    let records = vec![serde_json::to_value(&report)?];
    write_document(
        &config,
        &["claim", "matched_form", "residual"],
        &rows,
        &records,
    )?;
    let pass = report.residual <= tolerance;
    let form = report.matched_form.as_deref().unwrap_or("no candidate");
    let summary = format!(
        "{}: {} at residual {:.3e}, tolerance {:.1e} [{}]",
        report.claim_id,
        form,
        report.residual,
        tolerance,
        if pass { "ok" } else { "FAIL" },
    );
    Ok((summary, if pass { 0 } else { 2 }))
}

fn curve_rows(curve: &DispersionCurve, two_d: bool) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let header = if two_d {
        vec!["kx", "ky", "e", "n1", "n2", "n3"]
    } else {
        vec!["k", "e", "n1", "n2", "n3"]
    };
    let rows = curve
        .samples
        .iter()
        .map(|s| {
            let mut row = vec![num(s.k)];
            if two_d {
                row.push(opt_num(s.ky));
            }
            row.push(num(s.e));
            match s.n {
                Some(n) => row.extend([num(n[0]), num(n[1]), num(n[2])]),
                None => row.extend([String::new(), String::new(), String::new()]),
            }
            row
        })
        .collect();
    (header, rows)
}

fn run_spectrum(config: &ExperimentConfig) -> Result<(String, u8)> {
    let mut config = config.clone();
    let res = *config.kgrid.get_or_insert(256);
    let two_d = config.twod.unwrap_or(false);
    let t1 = angle_or(config.theta1, FRAC_PI_4);
    config.theta1 = Some(t1.value());
    let (curve, label) = if two_d {
        let t2 = angle_or(config.theta2, FRAC_PI_8);
        config.theta2 = Some(t2.value());
        (
            dispersion_curve_2d(t1, t2, res),
            format!("2d walk ({res}x{res} k-grid)"),
        )
    } else if let Some(th2) = config.theta2 {
        let t2 = CoinAngle::new(th2);
        (
            dispersion_curve_ss(t1, t2, res),
            format!("split-step walk ({res} k-points)"),
        )
    } else {
        (
            dispersion_curve_oqw(t1, res),
            format!("ordinary walk ({res} k-points)"),
        )
    };
    let (header, rows) = curve_rows(&curve, two_d);
    let records: Vec<serde_json::Value> = curve
        .samples
        .iter()
        .map(serde_json::to_value)
        .collect::<std::result::Result<_, _>>()?;
    write_document(&config, &header, &rows, &records)?;
    let gapless = curve.samples.iter().filter(|s| s.n.is_none()).count();
    let e_max = curve.samples.iter().fold(0.0f64, |m, s| m.max(s.e.abs()));
    Ok((
        format!(
            "{label}: {} samples, max |E| {:.4}, {} gap-closing points",
            curve.samples.len(),
            e_max,
            gapless
        ),
        0,
    ))
}

fn run_walk(config: &ExperimentConfig) -> Result<(String, u8)> {
    let n = config.n.ok_or_else(|| anyhow!("walk requires --n"))?;
    let mut config = config.clone();
    let steps = *config.steps.get_or_insert(25);
    let t1 = angle_or(config.theta1, FRAC_PI_4);
    config.theta1 = Some(t1.value());
    let u = match config.theta2 {
        Some(th2) => ssqw_step(t1, CoinAngle::new(th2), n)?,
        None => oqw_step(t1, n)?,
    };
    let geometry = LatticeGeometry::ring(n)?;
    // Coin-symmetric start (|0> + i |1>)/sqrt(2): the OQW spreads evenly.
    let psi0 = make_basis_state(&geometry, &[n / 2], (cr(1.0), C64::new(0.0, 1.0)))?;
    let trajectory = evolve(&psi0, &u, steps)?;
    let mut rows = Vec::with_capacity((steps + 1) * n);
    let mut records = Vec::with_capacity(steps + 1);
    for (t, dist) in trajectory.distributions.iter().enumerate() {
        for (site, &p) in dist.iter().enumerate() {
            rows.push(vec![t.to_string(), site.to_string(), num(p)]);
        }
        records.push(json!({
            "step": t,
            "distribution": dist.to_vec(),
        }));
    }
    write_document(&config, &["step", "site", "probability"], &rows, &records)?;
    let stds = trajectory.std_series(0)?;
    let walk_kind = if config.theta2.is_some() {
        "split-step"
    } else {
        "ordinary"
    };
    Ok((
        format!(
            "{walk_kind} walk on {n} sites, {steps} steps: position std {:.4} -> {:.4}",
            stds[0], stds[steps]
        ),
        0,
    ))
}

fn run_boundary(config: &ExperimentConfig) -> Result<(String, u8)> {
    let mut config = config.clone();
    let n = *config.n.get_or_insert(64);
    let t1 = angle_or(config.theta1, FRAC_PI_4);
    let zone_a = angle_or(config.theta2, 0.0);
    let zone_b = angle_or(config.theta2b, -std::f64::consts::FRAC_PI_2);
    config.theta1 = Some(t1.value());
    config.theta2 = Some(zone_a.value());
    config.theta2b = Some(zone_b.value());
    let split = *config.boundary.get_or_insert(n / 2);
    let smoothing = *config.smoothing.get_or_insert(0);
    let half_width = *config.window.get_or_insert(5);
    let boundary = BoundaryConfig::two_zone_at(n, t1, zone_a, zone_b, split, smoothing);
    let u = build_inhomogeneous_ssqw(&boundary)?;
    let settings = DetectorSettings {
        window: half_width,
        ..Default::default()
    };
    let spectrum = bound_state_spectrum(&u, &boundary.boundaries, &settings)?;
    let mut rows = Vec::with_capacity(spectrum.quasienergies.len());
    let mut records = Vec::with_capacity(spectrum.quasienergies.len());
    for i in 0..spectrum.quasienergies.len() {
        let m = &spectrum.metrics[i];
        rows.push(vec![
            i.to_string(),
            num(spectrum.quasienergies[i]),
            num(m.ipr),
            num(m.window_prob),
            opt_num(m.decay_length),
            (spectrum.flagged[i] as u8).to_string(),
        ]);
        records.push(json!({
            "index": i,
            "quasienergy": spectrum.quasienergies[i],
            "ipr": m.ipr,
            "window_prob": m.window_prob,
            "decay_length": m.decay_length,
            "fit_points": m.fit_points,
            "flagged": spectrum.flagged[i],
        }));
    }
    write_document(
        &config,
        &[
            "index",
            "quasienergy",
            "ipr",
            "window_prob",
            "decay_length",
            "flagged",
        ],
        &rows,
        &records,
    )?;
    let flagged = spectrum.flagged_indices();
    let splitting = spectrum
        .splitting_near(0.0, settings.epsilon_e)
        .map(|s| format!(", E=0 splitting {s:.3e}"))
        .unwrap_or_default();
    Ok((
        format!(
            "two-zone walk on {n} sites: {} bound modes flagged of {}{}",
            flagged.len(),
            spectrum.quasienergies.len(),
            splitting
        ),
        0,
    ))
}

fn run_edge2d(config: &ExperimentConfig) -> Result<(String, u8)> {
    let mut config = config.clone();
    let n1 = *config.n.get_or_insert(32);
    let n2 = *config.n2.get_or_insert(64);
    let t1 = angle_or(config.theta1, FRAC_PI_4);
    let zone_a = angle_or(config.theta2, -FRAC_PI_3);
    let zone_b = angle_or(config.theta2b, -2.0 * FRAC_PI_3);
    config.theta1 = Some(t1.value());
    config.theta2 = Some(zone_a.value());
    config.theta2b = Some(zone_b.value());
    let split = *config.boundary.get_or_insert(n1 / 2);
    let smoothing = *config.smoothing.get_or_insert(0);
    let half_width = *config.window.get_or_insert(5);
    let steps = *config.steps.get_or_insert(25);
    let profile = CoinProfile::two_zone_smoothed(n1, zone_a, zone_b, split, smoothing);
    let window = BoundaryWindow::new(vec![split], half_width);
    let band =
        edge_band(t1, &profile, n1, n2, &window, 0.4, 0.5).context("edge-band scan failed")?;
    let (ky_center, vg) = max_group_velocity_center(&band, n2)
        .ok_or_else(|| anyhow!("edge band has no consecutive ky pair"))?;
    let psi0 = edge_wavepacket(&band, n1, n2, ky_center, SIGMA_K)?;
    let trajectory = edge_state_sim_2d(t1, &profile, n1, n2, &psi0, steps, Some(&window))?;
    let (m1, m2) = trajectory
        .marginals
        .as_ref()
        .ok_or_else(|| anyhow!("2D trajectory lacks marginals"))?;
    let wp = trajectory
        .window_prob
        .as_ref()
        .ok_or_else(|| anyhow!("2D trajectory lacks window series"))?;
    let mut rows = Vec::new();
    let mut records = Vec::with_capacity(steps + 1);
    for t in 0..=steps {
        for (site, &p) in m1[t].iter().enumerate() {
            rows.push(vec![t.to_string(), "1".into(), site.to_string(), num(p)]);
        }
        for (site, &p) in m2[t].iter().enumerate() {
            rows.push(vec![t.to_string(), "2".into(), site.to_string(), num(p)]);
        }
        rows.push(vec![
            t.to_string(),
            "window".into(),
            split.to_string(),
            num(wp[t]),
        ]);
        records.push(json!({
            "step": t,
            "marginal1": m1[t].to_vec(),
            "marginal2": m2[t].to_vec(),
            "window_prob": wp[t],
        }));
    }
    write_document(
        &config,
        &["step", "axis", "site", "probability"],
        &rows,
        &records,
    )?;
    let min_wp = wp.iter().cloned().fold(f64::MAX, f64::min);
    Ok((
        format!(
            "edge packet on {n1}x{n2}: band {} modes, ky center {:.4}, vg {:.4}, \
             min window prob {:.4} over {steps} steps",
            band.len(),
            ky_center,
            vg,
            min_wp
        ),
        0,
    ))
}

fn run_phasediagram(config: &ExperimentConfig) -> Result<(String, u8)> {
    let mut config = config.clone();
    let per_axis = *config.tgrid.get_or_insert(9);
    let res = *config.kgrid.get_or_insert(256);
    let axis = theta_grid(per_axis);
    let mut pairs = Vec::with_capacity(per_axis * per_axis);
    for &a in &axis {
        for &b in &axis {
            pairs.push((a, b));
        }
    }
    let cells = phase_diagram_scan(&pairs, res)?;
    let rows = cells
        .iter()
        .map(|c| {
            vec![
                num(c.theta1),
                num(c.theta2),
                num(c.gap0),
                num(c.gap_pi),
                c.winding.map(|w| w.to_string()).unwrap_or_default(),
            ]
        })
        .collect::<Vec<_>>();
    let records: Vec<serde_json::Value> = cells
        .iter()
        .map(serde_json::to_value)
        .collect::<std::result::Result<_, _>>()?;
    write_document(
        &config,
        &["theta1", "theta2", "gap0", "gap_pi", "winding"],
        &rows,
        &records,
    )?;
    let defined = cells.iter().filter(|c| c.winding.is_some()).count();
    let nontrivial = cells
        .iter()
        .filter(|c| c.winding.map_or(false, |w| w != 0))
        .count();
    Ok((
        format!(
            "phase diagram {per_axis}x{per_axis}: {} cells, winding defined on {}, \
             nontrivial on {}",
            cells.len(),
            defined,
            nontrivial
        ),
        0,
    ))
}
