//! Real-space simulation of inhomogeneous walks: boundary coin profiles,
//! time evolution, bound-state detection at quasienergy 0 and pi,
//! localization metrics, strip-resolved edge bands, and 2D edge-state
//! dynamics.
//!
//! The detectors carry explicit thresholds ([`DetectorSettings`]) that are
//! embedded in outputs so runs are reproducible. Ring topology means every
//! two-zone profile has two interfaces; both are always analyzed.

use crate::core::{
    apply, axis_marginal, position_distribution, LatticeGeometry, PropagatorMatrix, WalkerState,
};
use crate::linalg::{self, cr, C64};
use crate::operators::{
    coin_layer, site_dependent_coin_1d, t_minus, t_plus, CoinAngle, CoinProfile,
};
use crate::spectral::s_k;
use crate::{Error, Result};
use ndarray::Array1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Thresholds used to flag bound modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorSettings {
    /// Max distance of a flagged quasienergy from 0 or pi.
    pub epsilon_e: f64,
    /// Min probability inside the boundary window.
    pub p_min: f64,
    /// Window half-width in sites around each boundary.
    pub window: usize,
}

impl Default for DetectorSettings {
    fn default() -> Self {
        DetectorSettings {
            epsilon_e: 1e-6,
            p_min: 0.5,
            window: 5,
        }
    }
}

/// Distance between two sites on a ring of n sites.
pub fn ring_distance(a: usize, b: usize, n: usize) -> usize {
    let d = (a as i64 - b as i64).rem_euclid(n as i64) as usize;
    d.min(n - d)
}

/// A set of boundary sites with a common window half-width; a site is
/// inside the window when its ring distance to the nearest boundary is at
/// most `half_width`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryWindow {
    pub sites: Vec<usize>,
    pub half_width: usize,
}

impl BoundaryWindow {
    pub fn new(sites: Vec<usize>, half_width: usize) -> Self {
        BoundaryWindow { sites, half_width }
    }

    pub fn contains(&self, x: usize, n: usize) -> bool {
        self.sites
            .iter()
            .any(|&b| ring_distance(x, b, n) <= self.half_width)
    }

    /// Total probability of a site distribution inside the window.
    pub fn probability(&self, dist: &Array1<f64>) -> f64 {
        let n = dist.len();
        dist.iter()
            .enumerate()
            .filter(|(x, _)| self.contains(*x, n))
            .map(|(_, p)| p)
            .sum()
    }
}

/// Inhomogeneous split-step walk specification: uniform theta1, a
/// site-dependent theta2 profile, and the interface positions it creates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConfig {
    pub n: usize,
    pub theta1: CoinAngle,
    pub theta2_profile: CoinProfile,
    /// Interface positions; a ring two-zone profile has exactly two.
    pub boundaries: Vec<usize>,
    pub smoothing: usize,
}

impl BoundaryConfig {
    /// Two-zone profile split at the default position n/2, boundaries at
    /// n/2 and at the ring wrap 0.
    pub fn two_zone(n: usize, theta1: CoinAngle, zone_a: CoinAngle, zone_b: CoinAngle) -> Self {
        Self::two_zone_at(n, theta1, zone_a, zone_b, n / 2, 0)
    }

    /// Two-zone profile split at an explicit position with optional
    /// smoothing ramp width.
    pub fn two_zone_at(
        n: usize,
        theta1: CoinAngle,
        zone_a: CoinAngle,
        zone_b: CoinAngle,
        split: usize,
        smoothing: usize,
    ) -> Self {
        BoundaryConfig {
            n,
            theta1,
            theta2_profile: CoinProfile::two_zone_smoothed(n, zone_a, zone_b, split, smoothing),
            boundaries: vec![split, 0],
            smoothing,
        }
    }

    /// Uniform theta2: no boundary.
    pub fn uniform(n: usize, theta1: CoinAngle, theta2: CoinAngle) -> Self {
        BoundaryConfig {
            n,
            theta1,
            theta2_profile: CoinProfile::uniform(n, theta2),
            boundaries: Vec::new(),
            smoothing: 0,
        }
    }

    pub fn window(&self, half_width: usize) -> BoundaryWindow {
        BoundaryWindow::new(self.boundaries.clone(), half_width)
    }
}

/// Single-shift split-step walk with uniform C_theta1 and site-dependent
/// C_theta2(x): Z_ss = (1 (x) C_theta1) T- (1 (x) C_theta2(x)) T+.
pub fn build_inhomogeneous_ssqw(config: &BoundaryConfig) -> Result<PropagatorMatrix> {
    let n = config.n;
    coin_layer(config.theta1, n)?
        .compose(&t_minus(n)?)?
        .compose(&site_dependent_coin_1d(&config.theta2_profile, n)?)?
        .compose(&t_plus(n)?)
}

/// Recorded time evolution: site distributions per step (index 0 is the
/// initial state), axis marginals for 2D runs, and optionally the
/// boundary-window probability series.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub geometry: LatticeGeometry,
    pub step_count: usize,
    pub distributions: Vec<Array1<f64>>,
    pub marginals: Option<(Vec<Array1<f64>>, Vec<Array1<f64>>)>,
    pub window_prob: Option<Vec<f64>>,
    pub window: Option<BoundaryWindow>,
}

fn weighted_std(p: &Array1<f64>) -> f64 {
    // Plain index statistics centered at n/2; callers keep supports away
    // from the wrap so no circular correction is needed.
    let n = p.len();
    let mean: f64 = p
        .iter()
        .enumerate()
        .map(|(x, &w)| w * (x as f64 - (n / 2) as f64))
        .sum();
    p.iter()
        .enumerate()
        .map(|(x, &w)| {
            let d = x as f64 - (n / 2) as f64 - mean;
            w * d * d
        })
        .sum::<f64>()
        .sqrt()
}

impl Trajectory {
    /// Standard deviation of the site index per step along an axis
    /// (axis 0 for 1D runs).
    pub fn std_series(&self, axis: usize) -> Result<Vec<f64>> {
        match (&self.marginals, axis) {
            (None, 0) => Ok(self.distributions.iter().map(weighted_std).collect()),
            (Some((m1, _)), 0) => Ok(m1.iter().map(weighted_std).collect()),
            (Some((_, m2)), 1) => Ok(m2.iter().map(weighted_std).collect()),
            _ => Err(Error::ParameterOutOfDomain(format!(
                "axis {axis} not available for this trajectory"
            ))),
        }
    }

    /// Window probability per step for an arbitrary window (axis-1
    /// marginal for 2D runs).
    pub fn window_prob_series(&self, window: &BoundaryWindow) -> Vec<f64> {
        let dists = match &self.marginals {
            Some((m1, _)) => m1,
            None => &self.distributions,
        };
        dists.iter().map(|p| window.probability(p)).collect()
    }
}

/// Applies U to psi0 T times, recording distributions each step.
pub fn evolve(psi0: &WalkerState, u: &PropagatorMatrix, t: usize) -> Result<Trajectory> {
    if t == 0 {
        return Err(Error::ParameterOutOfDomain(
            "evolution needs at least one step".to_string(),
        ));
    }
    let geometry = psi0.geometry().clone();
    let two_d = !geometry.is_one_dimensional();
    let mut distributions = Vec::with_capacity(t + 1);
    let mut m1 = Vec::new();
    let mut m2 = Vec::new();
    let mut record = |psi: &WalkerState| -> Result<()> {
        distributions.push(position_distribution(psi));
        if two_d {
            m1.push(axis_marginal(psi, 0)?);
            m2.push(axis_marginal(psi, 1)?);
        }
        Ok(())
    };
    let mut psi = psi0.clone();
    record(&psi)?;
    for _ in 0..t {
        psi = apply(u, &psi)?;
        record(&psi)?;
    }
    Ok(Trajectory {
        geometry,
        step_count: t,
        distributions,
        marginals: if two_d { Some((m1, m2)) } else { None },
        window_prob: None,
        window: None,
    })
}

/// Localization diagnostics of a state relative to boundary sites:
/// IPR of the boundary-axis distribution, probability within the window,
/// and the exponential decay length fitted outside it. `decay_length` is
/// absent when the fit is degenerate (fewer than 4 usable points, reported
/// via `fit_points`) or non-decaying.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalizationMetrics {
    pub ipr: f64,
    pub window_prob: f64,
    pub decay_length: Option<f64>,
    pub fit_points: usize,
}

/// Metrics against a single boundary site.
pub fn localization_metrics(
    psi: &WalkerState,
    boundary: usize,
    window: usize,
) -> Result<LocalizationMetrics> {
    localization_metrics_multi(psi, &[boundary], window)
}

/// Metrics with distances taken to the nearest of several boundary sites.
pub fn localization_metrics_multi(
    psi: &WalkerState,
    boundaries: &[usize],
    window: usize,
) -> Result<LocalizationMetrics> {
    let p = if psi.geometry().is_one_dimensional() {
        position_distribution(psi)
    } else {
        axis_marginal(psi, 0)?
    };
    let n = p.len();
    let ipr = p.iter().map(|&w| w * w).sum();
    if boundaries.is_empty() {
        return Ok(LocalizationMetrics {
            ipr,
            window_prob: 0.0,
            decay_length: None,
            fit_points: 0,
        });
    }
    let dist_to_boundary = |x: usize| -> usize {
        boundaries
            .iter()
            .map(|&b| ring_distance(x, b, n))
            .min()
            .expect("boundaries checked non-empty")
    };
    let window_prob = p
        .iter()
        .enumerate()
        .filter(|(x, _)| dist_to_boundary(*x) <= window)
        .map(|(_, &w)| w)
        .sum();
    // Least-squares fit of ln p against distance outside the window,
    // ignoring amplitudes below a relative floor (far-side underflow would
    // otherwise poison the fit).
    let p_max = p.iter().fold(0.0f64, |m, &w| m.max(w));
    let pts: Vec<(f64, f64)> = p
        .iter()
        .enumerate()
        .filter(|(x, &w)| dist_to_boundary(*x) > window && w > 1e-12 * p_max)
        .map(|(x, &w)| (dist_to_boundary(x) as f64, w.ln()))
        .collect();
    let fit_points = pts.len();
    let decay_length = if fit_points < 4 {
        None
    } else {
        let m = fit_points as f64;
        let sx: f64 = pts.iter().map(|(d, _)| d).sum();
        let sy: f64 = pts.iter().map(|(_, y)| y).sum();
        let sxx: f64 = pts.iter().map(|(d, _)| d * d).sum();
        let sxy: f64 = pts.iter().map(|(d, y)| d * y).sum();
        let denom = m * sxx - sx * sx;
        if denom.abs() < 1e-12 {
            None
        } else {
            let slope = (m * sxy - sx * sy) / denom;
            if slope < 0.0 {
                Some(-1.0 / slope)
            } else {
                None
            }
        }
    };
    Ok(LocalizationMetrics {
        ipr,
        window_prob,
        decay_length,
        fit_points,
    })
}

/// Full eigendecomposition of a walk unitary with per-mode localization
/// diagnostics and bound-mode flags.
#[derive(Debug, Clone)]
pub struct SpectrumRecord {
    /// Quasienergies -arg(lambda) in (-pi, pi], ascending.
    pub quasienergies: Vec<f64>,
    pub eigenvectors: Vec<WalkerState>,
    pub metrics: Vec<LocalizationMetrics>,
    pub flagged: Vec<bool>,
}

impl SpectrumRecord {
    pub fn flagged_indices(&self) -> Vec<usize> {
        self.flagged
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| i)
            .collect()
    }

    /// Spread of flagged quasienergies around a target (0 or pi): the
    /// hybridization splitting of an interface pair. None when fewer than
    /// two flagged modes sit near the target.
    pub fn splitting_near(&self, target: f64, epsilon: f64) -> Option<f64> {
        let deltas: Vec<f64> = self
            .flagged_indices()
            .into_iter()
            .map(|i| linalg::wrap_quasienergy(self.quasienergies[i] - target))
            .filter(|d| d.abs() <= epsilon)
            .collect();
        if deltas.len() < 2 {
            return None;
        }
        let max = deltas.iter().cloned().fold(f64::MIN, f64::max);
        let min = deltas.iter().cloned().fold(f64::MAX, f64::min);
        Some(max - min)
    }
}

/// Diagonalizes U and flags bound modes: quasienergy within
/// `settings.epsilon_e` of 0 or pi AND boundary-window probability at
/// least `settings.p_min`.
pub fn bound_state_spectrum(
    u: &PropagatorMatrix,
    boundaries: &[usize],
    settings: &DetectorSettings,
) -> Result<SpectrumRecord> {
    let (vals, vecs) = linalg::unitary_eig(u.matrix())?;
    let dim = vals.len();
    let mut order: Vec<usize> = (0..dim).collect();
    let energies: Vec<f64> = vals
        .iter()
        .map(|l| linalg::wrap_quasienergy(-l.arg()))
        .collect();
    order.sort_by(|&a, &b| {
        energies[a]
            .partial_cmp(&energies[b])
            .expect("quasienergies are finite")
            .then(a.cmp(&b))
    });
    let mut quasienergies = Vec::with_capacity(dim);
    let mut eigenvectors = Vec::with_capacity(dim);
    let mut metrics = Vec::with_capacity(dim);
    let mut flagged = Vec::with_capacity(dim);
    for &i in &order {
        let psi = WalkerState::normalized(u.geometry().clone(), vecs.column(i).to_owned())?;
        let m = localization_metrics_multi(&psi, boundaries, settings.window)?;
        let e = energies[i];
        let near = e.abs() <= settings.epsilon_e || (PI - e.abs()) <= settings.epsilon_e;
        flagged.push(near && m.window_prob >= settings.p_min);
        quasienergies.push(e);
        metrics.push(m);
        eigenvectors.push(psi);
    }
    Ok(SpectrumRecord {
        quasienergies,
        eigenvectors,
        metrics,
        flagged,
    })
}

// ---------------------------------------------------------------------------
// 2D edge-state machinery
// ---------------------------------------------------------------------------

/// Structured application of one 2D triangular walk step
/// S3 C1 S2 C2(x1) S1 C1 without materializing the dense operator.
struct Step2D {
    n1: usize,
    n2: usize,
    cos1: f64,
    sin1: f64,
    cos2: Vec<f64>,
    sin2: Vec<f64>,
}

impl Step2D {
    fn new(theta1: CoinAngle, profile: &CoinProfile, n1: usize, n2: usize) -> Result<Self> {
        if profile.len() != n1 {
            return Err(Error::ProfileLengthMismatch {
                profile: profile.len(),
                axis: n1,
            });
        }
        let (sin1, cos1) = theta1.value().sin_cos();
        let (sin2, cos2) = profile
            .thetas()
            .iter()
            .map(|t| t.value().sin_cos())
            .unzip();
        Ok(Step2D {
            n1,
            n2,
            cos1,
            sin1,
            cos2,
            sin2,
        })
    }

    #[inline]
    fn idx(&self, x1: usize, x2: usize, c: usize) -> usize {
        2 * (x1 * self.n2 + x2) + c
    }

    fn coin_uniform(&self, a: &mut Array1<C64>) {
        for i in (0..a.len()).step_by(2) {
            let (u, d) = (a[i], a[i + 1]);
            a[i] = u * self.cos1 - d * self.sin1;
            a[i + 1] = u * self.sin1 + d * self.cos1;
        }
    }

    fn coin_profile(&self, a: &mut Array1<C64>) {
        for x1 in 0..self.n1 {
            let (c, s) = (self.cos2[x1], self.sin2[x1]);
            for x2 in 0..self.n2 {
                let i = self.idx(x1, x2, 0);
                let (u, d) = (a[i], a[i + 1]);
                a[i] = u * c - d * s;
                a[i + 1] = u * s + d * c;
            }
        }
    }

    /// Coin-conditioned shift: up moves +1 and down moves -1 along the
    /// chosen axis.
    fn shift(&self, a: &Array1<C64>, b: &mut Array1<C64>, axis: usize) {
        for x1 in 0..self.n1 {
            for x2 in 0..self.n2 {
                let (u1, u2) = if axis == 0 {
                    ((x1 + 1) % self.n1, x2)
                } else {
                    (x1, (x2 + 1) % self.n2)
                };
                let (d1, d2) = if axis == 0 {
                    ((x1 + self.n1 - 1) % self.n1, x2)
                } else {
                    (x1, (x2 + self.n2 - 1) % self.n2)
                };
                b[self.idx(u1, u2, 0)] = a[self.idx(x1, x2, 0)];
                b[self.idx(d1, d2, 1)] = a[self.idx(x1, x2, 1)];
            }
        }
    }

    fn apply(&self, a: &mut Array1<C64>, scratch: &mut Array1<C64>) {
        self.coin_uniform(a);
        self.shift(a, scratch, 0);
        std::mem::swap(a, scratch);
        self.coin_profile(a);
        self.shift(a, scratch, 1);
        std::mem::swap(a, scratch);
        self.coin_uniform(a);
        self.shift(a, scratch, 0);
        std::mem::swap(a, scratch);
        self.shift(a, scratch, 1);
        std::mem::swap(a, scratch);
    }
}

/// Evolves the 2D triangular walk with a theta2 profile along axis 1,
/// recording marginals, without building the dense propagator. The window,
/// when given, produces the per-step axis-1 window probability series.
/// Requires N2 >= 2T+2 so the axis-2 spread never wraps.
pub fn edge_state_sim_2d(
    theta1: CoinAngle,
    theta2_profile: &CoinProfile,
    n1: usize,
    n2: usize,
    psi0: &WalkerState,
    t: usize,
    window: Option<&BoundaryWindow>,
) -> Result<Trajectory> {
    if n2 < 2 * t + 2 {
        return Err(Error::InvalidDimensions(format!(
            "axis-2 length {n2} too small for {t} steps; need N2 >= 2T+2"
        )));
    }
    let geometry = LatticeGeometry::torus(n1, n2)?;
    if psi0.geometry() != &geometry {
        return Err(Error::GeometryMismatch(format!(
            "initial state geometry {:?} does not match {n1}x{n2}",
            psi0.geometry().dims()
        )));
    }
    let step = Step2D::new(theta1, theta2_profile, n1, n2)?;
    let mut amps = psi0.amplitudes().clone();
    let mut scratch = Array1::from_elem(amps.len(), cr(0.0));
    let mut distributions = Vec::with_capacity(t + 1);
    let mut m1 = Vec::with_capacity(t + 1);
    let mut m2 = Vec::with_capacity(t + 1);
    let mut record = |a: &Array1<C64>| {
        let mut site = Array1::zeros(n1 * n2);
        let mut ax1 = Array1::zeros(n1);
        let mut ax2 = Array1::zeros(n2);
        for x1 in 0..n1 {
            for x2 in 0..n2 {
                let p = a[2 * (x1 * n2 + x2)].norm_sqr() + a[2 * (x1 * n2 + x2) + 1].norm_sqr();
                site[x1 * n2 + x2] = p;
                ax1[x1] += p;
                ax2[x2] += p;
            }
        }
        distributions.push(site);
        m1.push(ax1);
        m2.push(ax2);
    };
    record(&amps);
    for _ in 0..t {
        step.apply(&mut amps, &mut scratch);
        record(&amps);
    }
    let window_prob = window.map(|w| m1.iter().map(|p| w.probability(p)).collect());
    Ok(Trajectory {
        geometry,
        step_count: t,
        distributions,
        marginals: Some((m1, m2)),
        window_prob,
        window: window.cloned(),
    })
}

/// Strip Bloch operator of the 2D walk: real space along axis 1, momentum
/// k_y along axis 2. With P2(k_y) = 1 (x) diag(e^{ik_y}, e^{-ik_y}) the
/// fiber is S1 P2 C1 P2 C2(x1) S1 C1, a 2 N1-dimensional unitary.
pub fn strip_bloch_operator(
    theta1: CoinAngle,
    theta2_profile: &CoinProfile,
    n1: usize,
    ky: f64,
) -> Result<PropagatorMatrix> {
    let s1 = crate::operators::shift_s(n1)?;
    let p2 = crate::operators::uniform_block_layer(s_k(ky), n1)?;
    let c1 = coin_layer(theta1, n1)?;
    let c2 = site_dependent_coin_1d(theta2_profile, n1)?;
    s1.compose(&p2)?
        .compose(&c1)?
        .compose(&p2)?
        .compose(&c2)?
        .compose(&s1)?
        .compose(&c1)
}

/// One edge-band sample: the ky-fiber eigenmode nearest E = 0 that is
/// localized in the boundary window.
#[derive(Debug, Clone)]
pub struct EdgeBandPoint {
    /// Index m of ky on the N2-point momentum grid.
    pub m: usize,
    pub ky: f64,
    pub e: f64,
    pub window_prob: f64,
    /// Strip eigenvector (dim 2 N1), phase-aligned so its largest
    /// component is real positive.
    pub vector: Array1<C64>,
}

/// Scans the N2-point ky grid for strip eigenmodes with |E| < `e_max` and
/// window probability above `wp_min`, keeping the best-localized mode per
/// ky. An empty result is an error: no edge band exists at these
/// parameters.
pub fn edge_band(
    theta1: CoinAngle,
    theta2_profile: &CoinProfile,
    n1: usize,
    n2: usize,
    window: &BoundaryWindow,
    e_max: f64,
    wp_min: f64,
) -> Result<Vec<EdgeBandPoint>> {
    let grid = crate::spectral::momentum_grid(n2);
    let points: Result<Vec<Option<EdgeBandPoint>>> = grid
        .par_iter()
        .enumerate()
        .map(|(m, &ky)| {
            let u = strip_bloch_operator(theta1, theta2_profile, n1, ky)?;
            let (vals, vecs) = linalg::unitary_eig(u.matrix())?;
            let mut best: Option<EdgeBandPoint> = None;
            for j in 0..vals.len() {
                let e = linalg::wrap_quasienergy(-vals[j].arg());
                if e.abs() >= e_max {
                    continue;
                }
                let mut site = Array1::zeros(n1);
                for x1 in 0..n1 {
                    site[x1] =
                        vecs[[2 * x1, j]].norm_sqr() + vecs[[2 * x1 + 1, j]].norm_sqr();
                }
                let wp = window.probability(&site);
                if wp <= wp_min {
                    continue;
                }
                if best.as_ref().map_or(true, |b| wp > b.window_prob) {
                    best = Some(EdgeBandPoint {
                        m,
                        ky,
                        e,
                        window_prob: wp,
                        vector: align_phase(vecs.column(j).to_owned()),
                    });
                }
            }
            Ok(best)
        })
        .collect();
    let band: Vec<EdgeBandPoint> = points?.into_iter().flatten().collect();
    if band.is_empty() {
        return Err(Error::NoEdgeBand(format!(
            "no strip mode with |E| < {e_max} and window probability > {wp_min}"
        )));
    }
    Ok(band)
}

/// Rotates a vector's global phase so its largest-magnitude component is
/// real positive. Fixes the otherwise arbitrary eigenvector phases before
/// coherent superposition.
fn align_phase(mut v: Array1<C64>) -> Array1<C64> {
    let mut pivot = cr(0.0);
    for &z in v.iter() {
        if z.norm() > pivot.norm() {
            pivot = z;
        }
    }
    if pivot.norm() > 0.0 {
        let phase = pivot / pivot.norm();
        v.mapv_inplace(|z| z * phase.conj());
    }
    v
}

/// Finds the band point at the steepest dispersion slope: returns
/// (ky_center, group velocity) from the consecutive-ky pair with maximal
/// |dE/dky|, using the left point of the pair as center.
pub fn max_group_velocity_center(band: &[EdgeBandPoint], n2: usize) -> Option<(f64, f64)> {
    let dk = 2.0 * PI / n2 as f64;
    let mut best: Option<(f64, f64)> = None;
    for w in band.windows(2) {
        if w[1].m == w[0].m + 1 {
            let vg = (w[1].e - w[0].e) / dk;
            if best.map_or(true, |(_, b)| vg.abs() > b.abs()) {
                best = Some((w[0].ky, vg));
            }
        }
    }
    best
}

/// Builds a normalized Gaussian wavepacket over an edge band: each band
/// mode is weighted by exp(-(ky-ky_center)^2 / (2 sigma_k^2)) (wrapped
/// difference, weights below 1e-4 dropped) and carried along axis 2 by the
/// plane wave e^{i ky (x2 - N2/2)}.
pub fn edge_wavepacket(
    band: &[EdgeBandPoint],
    n1: usize,
    n2: usize,
    ky_center: f64,
    sigma_k: f64,
) -> Result<WalkerState> {
    let geometry = LatticeGeometry::torus(n1, n2)?;
    let mut amps = Array1::from_elem(geometry.hilbert_dim(), cr(0.0));
    for point in band {
        if point.vector.len() != 2 * n1 {
            return Err(Error::InvalidDimensions(format!(
                "band vector dim {} does not match strip width {n1}",
                point.vector.len()
            )));
        }
        let d = linalg::wrap_quasienergy(point.ky - ky_center);
        let g = (-d * d / (2.0 * sigma_k * sigma_k)).exp();
        if g < 1e-4 {
            continue;
        }
        for x2 in 0..n2 {
            let phase = C64::from_polar(1.0, point.ky * (x2 as f64 - (n2 / 2) as f64));
            for x1 in 0..n1 {
                for c in 0..2 {
                    amps[2 * (x1 * n2 + x2) + c] += point.vector[2 * x1 + c] * phase * g;
                }
            }
        }
    }
    WalkerState::normalized(geometry, amps)
}

// ---------------------------------------------------------------------------
// Phase diagram
// ---------------------------------------------------------------------------

/// One cell of the phase diagram: gaps and, where defined, the winding
/// number. Winding is absent at gapless or non-planar cells.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseCell {
    pub theta1: f64,
    pub theta2: f64,
    pub gap0: f64,
    pub gap_pi: f64,
    pub winding: Option<i64>,
}

/// Evaluates (gap0, gapPi, winding) over a (theta1, theta2) grid. Cells
/// where the winding is undefined (gap below the grid-resolution
/// threshold) record None; adjacent cells with different winding locate
/// the phase boundaries.
pub fn phase_diagram_scan(
    grid: &[(CoinAngle, CoinAngle)],
    resolution: usize,
) -> Result<Vec<PhaseCell>> {
    grid.par_iter()
        .map(|&(t1, t2)| {
            let (gap0, gap_pi) = crate::spectral::gap(t1, t2, resolution)?;
            let winding = match crate::spectral::winding_number(t1, t2, resolution) {
                Ok(w) => Some(w),
                Err(Error::GaplessSpectrum { .. }) | Err(Error::NonPlanarBloch { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(PhaseCell {
                theta1: t1.value(),
                theta2: t2.value(),
                gap0,
                gap_pi,
                winding,
            })
        })
        .collect()
}
