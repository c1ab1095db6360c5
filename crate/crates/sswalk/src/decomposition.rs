//! Machine-precision verification of the operator identities relating the
//! walk families: the cyclic similarity of coin and shift, the reduction of
//! double-shift walks to products of ordinary walks in 1D and 2D, and the
//! q-plate realizations of shift and split-step layers.
//!
//! Each verifier enumerates a small, fixed set of candidate algebraic forms
//! (orderings, conjugators, coin-basis changes, optionally a global phase)
//! and reports which candidate matches to spectral-norm residual below
//! [`IDENTITY_TOL`]. The reports are the ground truth for the ordering
//! conventions used elsewhere in the crate.

use crate::core::{
    operator_distance, operator_distance_phase_insensitive, optimal_phase, PropagatorMatrix,
};
use crate::linalg::Mat2;
use crate::operators::{
    self, coin, oqw_step, pauli_x, pauli_y, pauli_z, phase_v, qplate, shift_s, smp_tilde_coin,
    ssqw_double_step, ssqw_double_step_axis, ssqw_step, ssqw2d_step, uniform_block_layer,
    CoinAngle, QPlateParams,
};
use crate::Result;
use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::f64::consts::{FRAC_PI_2, PI};

/// Residual below which a candidate form counts as matched.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Outcome of one identity verification.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    /// Which identity was tested, e.g. "1d-decomposition".
    pub claim_id: String,
    /// Description of the algebraic form that matched; `None` when no
    /// candidate reached the tolerance.
    pub matched_form: Option<String>,
    /// Smallest residual over all candidate forms.
    pub residual: f64,
    /// Parameters tested plus the per-candidate residual map.
    pub parameters: serde_json::Value,
}

impl IdentityReport {
    fn from_candidates(
        claim_id: &str,
        candidates: Vec<(String, f64)>,
        mut parameters: serde_json::Value,
    ) -> Self {
        // The earliest candidate within tolerance wins, so degenerate
        // parameter points report deterministically.
        let (matched_form, residual) = match candidates.iter().find(|(_, r)| *r <= IDENTITY_TOL) {
            Some((name, r)) => (Some(name.clone()), *r),
            None => (
                None,
                candidates
                    .iter()
                    .map(|(_, r)| *r)
                    .fold(f64::INFINITY, f64::min),
            ),
        };
        if let Some(map) = parameters.as_object_mut() {
            map.insert(
                "candidate_residuals".to_string(),
                json!(candidates
                    .iter()
                    .map(|(n, r)| json!({ "form": n, "residual": r }))
                    .collect::<Vec<_>>()),
            );
        }
        IdentityReport {
            claim_id: claim_id.to_string(),
            matched_form,
            residual,
            parameters,
        }
    }
}

/// Evenly spaced coin angles covering (-pi, pi]: theta_j = -pi + 2pi(j+1)/count.
pub fn theta_grid(count: usize) -> Vec<CoinAngle> {
    (0..count)
        .map(|j| CoinAngle::new(-PI + 2.0 * PI * (j as f64 + 1.0) / count as f64))
        .collect()
}

/// Confirms the cyclic similarity Zbar(theta) = S Z(theta) S^dag, where
/// Zbar applies the coin before the shift.
pub fn verify_cyclic_property(theta: CoinAngle, n: usize) -> Result<IdentityReport> {
    let s = shift_s(n)?;
    let coin_l = operators::coin_layer(theta, n)?;
    let zbar = s.compose(&coin_l)?;
    let z = oqw_step(theta, n)?;
    let conjugated = s.compose(&z)?.compose(&s.adjoint())?;
    let residual = operator_distance(&zbar, &conjugated)?;
    Ok(IdentityReport::from_candidates(
        "cyclic-property",
        vec![("S Z(theta) S^dag".to_string(), residual)],
        json!({ "theta": theta.value(), "N": n }),
    ))
}

/// Tests both orderings Z(theta1) Z(theta2) and Z(theta2) Z(theta1) against
/// the double-shift walk. Exactly one matches when theta1 != theta2.
pub fn verify_1d_decomposition(
    theta1: CoinAngle,
    theta2: CoinAngle,
    n: usize,
) -> Result<IdentityReport> {
    let lhs = ssqw_double_step(theta1, theta2, n)?;
    let z1 = oqw_step(theta1, n)?;
    let z2 = oqw_step(theta2, n)?;
    let candidates = vec![
        (
            "Z(theta1) Z(theta2)".to_string(),
            operator_distance(&lhs, &z1.compose(&z2)?)?,
        ),
        (
            "Z(theta2) Z(theta1)".to_string(),
            operator_distance(&lhs, &z2.compose(&z1)?)?,
        ),
    ];
    Ok(IdentityReport::from_candidates(
        "1d-decomposition",
        candidates,
        json!({ "theta1": theta1.value(), "theta2": theta2.value(), "N": n }),
    ))
}

/// Tests the reduction of the triangular-lattice walk to a product of
/// double-shift walks along the two axes, in both factor orderings and up
/// to conjugation by one of {1, S1, S2, S3}.
pub fn verify_2d_decomposition(
    theta1: CoinAngle,
    theta2: CoinAngle,
    n1: usize,
    n2: usize,
) -> Result<IdentityReport> {
    if n1 % 2 != 0 || n2 % 2 != 0 {
        return Err(crate::Error::InvalidDimensions(format!(
            "2d decomposition requires even lattice sides, got {n1}x{n2}"
        )));
    }
    let lhs = ssqw2d_step(theta1, theta2, n1, n2)?;
    // Axis-2 factor carries angles (0, theta1); axis-1 factor (theta2, theta1).
    let za = ssqw_double_step_axis(1, CoinAngle::new(0.0), theta1, n1, n2)?;
    let zb = ssqw_double_step_axis(0, theta2, theta1, n1, n2)?;
    let orders = [
        ("Zt2(0,theta1) Zt1(theta2,theta1)", za.compose(&zb)?),
        ("Zt1(theta2,theta1) Zt2(0,theta1)", zb.compose(&za)?),
    ];
    let conjugators = [
        ("1", None),
        ("S1", Some(operators::s1(n1, n2)?)),
        ("S2", Some(operators::s2(n1, n2)?)),
        ("S3", Some(operators::s3(n1, n2)?)),
    ];
    let mut candidates = Vec::new();
    for (gname, g) in &conjugators {
        for (oname, product) in &orders {
            let candidate = match g {
                None => product.clone(),
                Some(g) => g.compose(product)?.compose(&g.adjoint())?,
            };
            let name = format!("{gname} [{oname}] {gname}^dag");
            candidates.push((name, operator_distance(&lhs, &candidate)?));
        }
    }
    Ok(IdentityReport::from_candidates(
        "2d-decomposition",
        candidates,
        json!({
            "theta1": theta1.value(),
            "theta2": theta2.value(),
            "N1": n1,
            "N2": n2,
        }),
    ))
}

/// Compares the tuned q-plate Q^(1/2) at delta = pi/2 - theta against
/// -i (1 (x) sigma_x) [cos(theta) S + i sin(theta) (1 (x) sigma_x)],
/// allowing one fixed coin-basis change to absorb the circular-basis
/// labeling convention.
pub fn verify_qplate_identity(theta: CoinAngle, n: usize) -> Result<IdentityReport> {
    let delta = FRAC_PI_2 - theta.value();
    let q = qplate(QPlateParams::new(1, delta)?, n)?;
    let s = shift_s(n)?;
    let sx_layer = uniform_block_layer(pauli_x(), n)?;
    let (st, ct) = theta.value().sin_cos();
    let minus_i = crate::linalg::c(0.0, -1.0);
    let bracket: Array2<crate::linalg::C64> =
        s.matrix() * crate::linalg::c(ct, 0.0) + sx_layer.matrix() * crate::linalg::c(0.0, st);
    let rhs_matrix = sx_layer.matrix().dot(&bracket) * minus_i;
    let rhs = PropagatorMatrix::new(q.geometry().clone(), rhs_matrix)?;
    let mut candidates = Vec::new();
    for (bname, block) in [("identity", Mat2::identity()), ("sigma_x", pauli_x())] {
        let layer = uniform_block_layer(block, n)?;
        let conjugated = layer.compose(&q)?.compose(&layer.adjoint())?;
        candidates.push((
            format!("basis {bname}"),
            operator_distance(&conjugated, &rhs)?,
        ));
    }
    Ok(IdentityReport::from_candidates(
        "qplate-identity",
        candidates,
        json!({ "theta": theta.value(), "delta": delta, "N": n }),
    ))
}

fn basis_candidates() -> Vec<(&'static str, Mat2)> {
    let v = phase_v();
    vec![
        ("1", Mat2::identity()),
        ("sigma_x", pauli_x()),
        ("sigma_y", pauli_y()),
        ("sigma_z", pauli_z()),
        ("V", v),
        ("V^dag", v.adjoint()),
        ("sigma_x V", pauli_x().mul(&v)),
        ("sigma_x V^dag", pauli_x().mul(&v.adjoint())),
        ("V sigma_x", v.mul(&pauli_x())),
        ("V^dag sigma_x", v.adjoint().mul(&pauli_x())),
    ]
}

/// Tests whether a single tuned q-plate preceded by a redefined coin
/// reproduces the split-step walk up to global phase and a fixed coin-basis
/// change. Both the stated redefined coin V C sigma_x V^dag and its
/// sigma_y variant are tried; the best convention is reported, not assumed.
pub fn verify_single_qplate_scheme(
    theta1: CoinAngle,
    theta2: CoinAngle,
    n: usize,
) -> Result<IdentityReport> {
    let target = ssqw_step(theta1, theta2, n)?;
    let plate = qplate(QPlateParams::new(1, FRAC_PI_2 - theta2.value())?, n)?;
    let v = phase_v();
    let tilde_variants = [
        ("Ctilde = V C(theta1) sigma_x V^dag", smp_tilde_coin(theta1)),
        (
            "Ctilde = V C(theta1) sigma_y V^dag",
            v.mul(&coin(theta1)).mul(&pauli_y()).mul(&v.adjoint()),
        ),
    ];
    let mut candidates = Vec::new();
    let mut best_phase = 0.0;
    let mut best_residual = f64::INFINITY;
    for (tname, tilde) in &tilde_variants {
        let scheme = uniform_block_layer(*tilde, n)?.compose(&plate)?;
        for (bname, block) in basis_candidates() {
            let layer = uniform_block_layer(block, n)?;
            let conjugated = layer.compose(&target)?.compose(&layer.adjoint())?;
            let residual = operator_distance_phase_insensitive(&scheme, &conjugated)?;
            if residual < best_residual {
                best_residual = residual;
                best_phase = optimal_phase(&scheme, &conjugated)?;
            }
            candidates.push((format!("{tname}, basis {bname}"), residual));
        }
    }
    Ok(IdentityReport::from_candidates(
        "single-qplate-scheme",
        candidates,
        json!({
            "theta1": theta1.value(),
            "theta2": theta2.value(),
            "N": n,
            "optimal_phase": best_phase,
        }),
    ))
}

/// Runs the 1D decomposition verifier over a theta grid and lattice sizes,
/// in parallel.
pub fn sweep_1d_decomposition(
    grid: &[CoinAngle],
    sizes: &[usize],
) -> Result<Vec<IdentityReport>> {
    let mut jobs = Vec::new();
    for &n in sizes {
        for &t1 in grid {
            for &t2 in grid {
                jobs.push((t1, t2, n));
            }
        }
    }
    jobs.par_iter()
        .map(|&(t1, t2, n)| verify_1d_decomposition(t1, t2, n))
        .collect()
}

/// Runs the 2D decomposition verifier over a theta grid and lattice shapes,
/// in parallel.
pub fn sweep_2d_decomposition(
    grid: &[CoinAngle],
    shapes: &[(usize, usize)],
) -> Result<Vec<IdentityReport>> {
    let mut jobs = Vec::new();
    for &(n1, n2) in shapes {
        for &t1 in grid {
            for &t2 in grid {
                jobs.push((t1, t2, n1, n2));
            }
        }
    }
    jobs.par_iter()
        .map(|&(t1, t2, n1, n2)| verify_2d_decomposition(t1, t2, n1, n2))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_grid_is_half_open_and_uniform() {
        let g = theta_grid(9);
        assert_eq!(g.len(), 9);
        assert!((g[8].value() - PI).abs() < 1e-12);
        assert!(g[0].value() > -PI);
        let step = g[1].value() - g[0].value();
        for w in g.windows(2) {
            assert!((w[1].value() - w[0].value() - step).abs() < 1e-12);
        }
    }

    #[test]
    fn report_picks_first_candidate_under_tolerance() {
        let cands = vec![
            ("loose".to_string(), 0.5),
            ("tight-a".to_string(), 1e-14),
            ("tight-b".to_string(), 1e-15),
        ];
        let r = IdentityReport::from_candidates("demo", cands, json!({}));
        assert_eq!(r.matched_form.as_deref(), Some("tight-a"));
        assert!((r.residual - 1e-14).abs() < 1e-20);
        let listed = r.parameters["candidate_residuals"].as_array().unwrap();
        assert_eq!(listed.len(), 3);
    }

    #[test]
    fn report_without_match_keeps_best_residual() {
        let cands = vec![("a".to_string(), 0.7), ("b".to_string(), 0.2)];
        let r = IdentityReport::from_candidates("demo", cands, json!({}));
        assert!(r.matched_form.is_none());
        assert!((r.residual - 0.2).abs() < 1e-15);
    }

    #[test]
    fn reports_serialize_with_claim_id() {
        let r = verify_cyclic_property(CoinAngle::new(0.4), 4).unwrap();
        let line = serde_json::to_string(&r).unwrap();
        assert!(line.contains("\"claim_id\":\"cyclic-property\""));
        assert!(line.contains("\"residual\""));
    }
}
