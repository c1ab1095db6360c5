//! Constructors for every propagator in the toolkit: coins, conditional
//! shifts, 1D and 2D walk steps, q-plates, and position-dependent coins.
//!
//! All constructors return unitarity-checked [`PropagatorMatrix`] values
//! (or exact 2x2 blocks). Dense matrices are the reference representation;
//! structured state-level application lives in [`crate::toposim`].

use crate::core::{LatticeGeometry, PropagatorMatrix};
use crate::linalg::{c, cr, Mat2, C64};
use crate::{Error, Result};
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Coin angle in radians, normalized into (-pi, pi] on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoinAngle(f64);

impl CoinAngle {
    pub fn new(theta: f64) -> Self {
        let two_pi = 2.0 * PI;
        let mut x = theta % two_pi;
        if x <= -PI {
            x += two_pi;
        } else if x > PI {
            x -= two_pi;
        }
        if x == -PI {
            x = PI;
        }
        CoinAngle(x)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl From<f64> for CoinAngle {
    fn from(theta: f64) -> Self {
        CoinAngle::new(theta)
    }
}

/// Map from lattice site to coin angle along one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoinProfile {
    thetas: Vec<CoinAngle>,
}

impl CoinProfile {
    /// Same angle at every site.
    pub fn uniform(n: usize, theta: CoinAngle) -> Self {
        CoinProfile {
            thetas: vec![theta; n],
        }
    }

    /// Explicit per-site angles.
    pub fn explicit(thetas: Vec<CoinAngle>) -> Self {
        CoinProfile { thetas }
    }

    /// Two-zone profile with the default split: zone A on [0, n/2), zone B on
    /// [n/2, n). On a ring this creates boundaries at n/2 and at 0 (wrap).
    pub fn two_zone(n: usize, zone_a: CoinAngle, zone_b: CoinAngle) -> Self {
        Self::two_zone_at(n, zone_a, zone_b, n / 2)
    }

    /// Two-zone profile split at `boundary`: zone A on [0, boundary), zone B
    /// on [boundary, n).
    pub fn two_zone_at(n: usize, zone_a: CoinAngle, zone_b: CoinAngle, boundary: usize) -> Self {
        let thetas = (0..n)
            .map(|x| if x < boundary { zone_a } else { zone_b })
            .collect();
        CoinProfile { thetas }
    }

    /// Two-zone profile whose steps are replaced by linear ramps of width `s`
    /// sites centered on each boundary (both the split and the ring wrap).
    /// `s = 0` reproduces the sharp profile.
    pub fn two_zone_smoothed(
        n: usize,
        zone_a: CoinAngle,
        zone_b: CoinAngle,
        boundary: usize,
        s: usize,
    ) -> Self {
        if s == 0 {
            return Self::two_zone_at(n, zone_a, zone_b, boundary);
        }
        let (a, b) = (zone_a.value(), zone_b.value());
        let ramp = |x: usize, edge: usize, from: f64, to: f64| -> Option<f64> {
            // Signed ring distance from the edge, in [-n/2, n/2).
            let d = (x as i64 - edge as i64).rem_euclid(n as i64);
            let d = if d >= (n as i64) / 2 { d - n as i64 } else { d };
            let half = s as f64 / 2.0;
            if (d as f64) < -half || (d as f64) >= half {
                return None;
            }
            let t = (d as f64 + half) / (s as f64);
            Some(from + (to - from) * t)
        };
        let thetas = (0..n)
            .map(|x| {
                if let Some(v) = ramp(x, boundary, a, b) {
                    CoinAngle::new(v)
                } else if let Some(v) = ramp(x, 0, b, a) {
                    CoinAngle::new(v)
                } else if x < boundary {
                    zone_a
                } else {
                    zone_b
                }
            })
            .collect();
        CoinProfile { thetas }
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn theta(&self, x: usize) -> CoinAngle {
        self.thetas[x]
    }

    pub fn thetas(&self) -> &[CoinAngle] {
        &self.thetas
    }
}

/// q-plate parameters: topological charge q (2q integer) and retardation
/// delta in [0, pi].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QPlateParams {
    two_q: i64,
    delta: f64,
}

impl QPlateParams {
    pub fn new(two_q: i64, delta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&delta) {
            return Err(Error::ParameterOutOfDomain(format!(
                "q-plate retardation delta={delta} outside [0, pi]"
            )));
        }
        Ok(QPlateParams { two_q, delta })
    }

    pub fn two_q(&self) -> i64 {
        self.two_q
    }

    pub fn q(&self) -> f64 {
        self.two_q as f64 / 2.0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

// ---------------------------------------------------------------------------
// 2x2 blocks
// ---------------------------------------------------------------------------

/// Coin rotation C_theta = cos(theta) 1 - i sin(theta) sigma_y
/// = [[cos, -sin], [sin, cos]].
pub fn coin(theta: CoinAngle) -> Mat2 {
    let (s, co) = theta.value().sin_cos();
    Mat2::new(cr(co), cr(-s), cr(s), cr(co))
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(cr(0.0), cr(1.0), cr(1.0), cr(0.0))
}

pub fn pauli_y() -> Mat2 {
    Mat2::new(cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0))
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(cr(1.0), cr(0.0), cr(0.0), cr(-1.0))
}

/// Quarter-turn coin phase V = exp(-i pi sigma_z / 4) = diag(e^{-i pi/4}, e^{+i pi/4}).
pub fn phase_v() -> Mat2 {
    Mat2::diag(C64::from_polar(1.0, -PI / 4.0), C64::from_polar(1.0, PI / 4.0))
}

/// Redefined scheme coin C~_theta1 = V C_theta1 sigma_x V^dag.
pub fn smp_tilde_coin(theta1: CoinAngle) -> Mat2 {
    let v = phase_v();
    v.mul(&coin(theta1)).mul(&pauli_x()).mul(&v.adjoint())
}

// ---------------------------------------------------------------------------
// 1D ring operators
// ---------------------------------------------------------------------------

fn ring_geometry(n: usize) -> Result<LatticeGeometry> {
    LatticeGeometry::ring(n)
}

/// Builds a dense operator from a site-permutation-with-coin rule:
/// `rule(x, c)` returns the list of (target_site, target_coin, amplitude).
fn build_1d<F>(n: usize, rule: F) -> Result<PropagatorMatrix>
where
    F: Fn(usize, usize) -> Vec<(usize, usize, C64)>,
{
    let geometry = ring_geometry(n)?;
    let dim = geometry.hilbert_dim();
    let mut m = Array2::from_elem((dim, dim), cr(0.0));
    for x in 0..n {
        for coin_in in 0..2 {
            let col = 2 * x + coin_in;
            for (tx, tc, amp) in rule(x, coin_in) {
                m[[2 * tx + tc, col]] += amp;
            }
        }
    }
    PropagatorMatrix::new(geometry, m)
}

/// Cyclic forward shift F on the ring: |x> -> |x+1 mod N> (coin untouched).
pub fn forward_f(n: usize) -> Result<PropagatorMatrix> {
    build_1d(n, |x, c_in| vec![((x + 1) % n, c_in, cr(1.0))])
}

/// Coin-conditioned full shift S = F (x) |up><up| + F^dag (x) |down><down|.
pub fn shift_s(n: usize) -> Result<PropagatorMatrix> {
    build_1d(n, |x, c_in| {
        let tx = if c_in == 0 { (x + 1) % n } else { (x + n - 1) % n };
        vec![(tx, c_in, cr(1.0))]
    })
}

/// Partial shift T+ = F (x) |up><up| + 1 (x) |down><down|.
pub fn t_plus(n: usize) -> Result<PropagatorMatrix> {
    build_1d(n, |x, c_in| {
        let tx = if c_in == 0 { (x + 1) % n } else { x };
        vec![(tx, c_in, cr(1.0))]
    })
}

/// Partial shift T- = 1 (x) |up><up| + F^dag (x) |down><down|.
pub fn t_minus(n: usize) -> Result<PropagatorMatrix> {
    build_1d(n, |x, c_in| {
        let tx = if c_in == 0 { x } else { (x + n - 1) % n };
        vec![(tx, c_in, cr(1.0))]
    })
}

/// Uniform coin layer 1 (x) C_theta on the ring.
pub fn coin_layer(theta: CoinAngle, n: usize) -> Result<PropagatorMatrix> {
    site_dependent_coin_1d(&CoinProfile::uniform(n, theta), n)
}

/// Uniform coin-space layer 1 (x) B for an arbitrary unitary 2x2 block.
pub fn uniform_block_layer(block: Mat2, n: usize) -> Result<PropagatorMatrix> {
    build_1d(n, move |x, c_in| {
        vec![(x, 0, block.0[0][c_in]), (x, 1, block.0[1][c_in])]
    })
}

/// Block-diagonal coin layer applying C_theta(x) at site x.
pub fn site_dependent_coin_1d(profile: &CoinProfile, n: usize) -> Result<PropagatorMatrix> {
    if profile.len() != n {
        return Err(Error::ProfileLengthMismatch {
            profile: profile.len(),
            axis: n,
        });
    }
    build_1d(n, |x, c_in| {
        let cm = coin(profile.theta(x));
        vec![
            (x, 0, cm.0[0][c_in]),
            (x, 1, cm.0[1][c_in]),
        ]
    })
}

/// Ordinary walk step Z(theta) = (1 (x) C_theta) S.
pub fn oqw_step(theta: CoinAngle, n: usize) -> Result<PropagatorMatrix> {
    coin_layer(theta, n)?.compose(&shift_s(n)?)
}

/// Single-shift split-step walk Z_ss(theta1, theta2) =
/// (1 (x) C_theta1) T- (1 (x) C_theta2) T+.
pub fn ssqw_step(theta1: CoinAngle, theta2: CoinAngle, n: usize) -> Result<PropagatorMatrix> {
    coin_layer(theta1, n)?
        .compose(&t_minus(n)?)?
        .compose(&coin_layer(theta2, n)?)?
        .compose(&t_plus(n)?)
}

/// Double-shift split-step walk Z~_ss(theta1, theta2) =
/// (1 (x) C_theta1) T-^2 (1 (x) C_theta2) T+^2. Requires even N so the
/// two-site jumps respect the sublattice structure.
pub fn ssqw_double_step(
    theta1: CoinAngle,
    theta2: CoinAngle,
    n: usize,
) -> Result<PropagatorMatrix> {
    if n % 2 != 0 {
        return Err(Error::InvalidDimensions(format!(
            "double-shift walk requires even N, got {n}"
        )));
    }
    let tm = t_minus(n)?;
    let tp = t_plus(n)?;
    coin_layer(theta1, n)?
        .compose(&tm.compose(&tm)?)?
        .compose(&coin_layer(theta2, n)?)?
        .compose(&tp.compose(&tp)?)
}

/// Double-shift walk with a site-dependent second coin.
pub fn ssqw_double_step_profile(
    theta1: CoinAngle,
    profile: &CoinProfile,
    n: usize,
) -> Result<PropagatorMatrix> {
    if n % 2 != 0 {
        return Err(Error::InvalidDimensions(format!(
            "double-shift walk requires even N, got {n}"
        )));
    }
    let tm = t_minus(n)?;
    let tp = t_plus(n)?;
    coin_layer(theta1, n)?
        .compose(&tm.compose(&tm)?)?
        .compose(&site_dependent_coin_1d(profile, n)?)?
        .compose(&tp.compose(&tp)?)
}

/// q-plate operator on an OAM ring:
/// Q = cos(delta) 1 - i sin(delta) (F_{2q} (x) |L><R| + F_{2q}^dag (x) |R><L|)
/// with the convention |L> = |up>, |R> = |down| and F_{2q} the shift by 2q.
pub fn qplate(params: QPlateParams, n: usize) -> Result<PropagatorMatrix> {
    let two_q = params.two_q();
    if two_q != 0 && two_q.rem_euclid(n as i64) == 0 {
        return Err(Error::IncompatibleQPlate { two_q, n });
    }
    let (cd, sd) = (params.delta().cos(), params.delta().sin());
    let shift = |x: usize, by: i64| -> usize {
        ((x as i64 + by).rem_euclid(n as i64)) as usize
    };
    build_1d(n, move |x, c_in| {
        let mut entries = vec![(x, c_in, cr(cd))];
        if c_in == 1 {
            // |L><R| : right-circular (down) component hops up by 2q.
            entries.push((shift(x, two_q), 0, c(0.0, -sd)));
        } else {
            // |R><L| : left-circular (up) component hops down by 2q.
            entries.push((shift(x, -two_q), 1, c(0.0, -sd)));
        }
        entries
    })
}

// ---------------------------------------------------------------------------
// 2D torus operators
// ---------------------------------------------------------------------------

fn build_2d<F>(n1: usize, n2: usize, rule: F) -> Result<PropagatorMatrix>
where
    F: Fn(usize, usize, usize) -> Vec<(usize, usize, usize, C64)>,
{
    let geometry = LatticeGeometry::torus(n1, n2)?;
    let dim = geometry.hilbert_dim();
    let mut m = Array2::from_elem((dim, dim), cr(0.0));
    for x1 in 0..n1 {
        for x2 in 0..n2 {
            for coin_in in 0..2 {
                let col = 2 * (x1 * n2 + x2) + coin_in;
                for (t1, t2, tc, amp) in rule(x1, x2, coin_in) {
                    m[[2 * (t1 * n2 + t2) + tc, col]] += amp;
                }
            }
        }
    }
    PropagatorMatrix::new(geometry, m)
}

/// Axis-1 conditional shift S1 = (F (x) 1) (x) |up><up| + (F^dag (x) 1) (x) |down><down|.
pub fn s1(n1: usize, n2: usize) -> Result<PropagatorMatrix> {
    build_2d(n1, n2, |x1, x2, c_in| {
        let t1 = if c_in == 0 { (x1 + 1) % n1 } else { (x1 + n1 - 1) % n1 };
        vec![(t1, x2, c_in, cr(1.0))]
    })
}

/// Axis-2 conditional shift S2 = (1 (x) F) (x) |up><up| + (1 (x) F^dag) (x) |down><down|.
pub fn s2(n1: usize, n2: usize) -> Result<PropagatorMatrix> {
    build_2d(n1, n2, |x1, x2, c_in| {
        let t2 = if c_in == 0 { (x2 + 1) % n2 } else { (x2 + n2 - 1) % n2 };
        vec![(x1, t2, c_in, cr(1.0))]
    })
}

/// Partial shift T+ along the given axis (0 or 1) of the torus: the up
/// component advances by one, the down component stays.
pub fn t_plus_axis(axis: usize, n1: usize, n2: usize) -> Result<PropagatorMatrix> {
    axis_partial_shift(axis, n1, n2, true)
}

/// Partial shift T- along the given axis: the down component retreats by
/// one, the up component stays.
pub fn t_minus_axis(axis: usize, n1: usize, n2: usize) -> Result<PropagatorMatrix> {
    axis_partial_shift(axis, n1, n2, false)
}

fn axis_partial_shift(axis: usize, n1: usize, n2: usize, plus: bool) -> Result<PropagatorMatrix> {
    if axis > 1 {
        return Err(Error::ParameterOutOfDomain(format!(
            "shift axis {axis} out of range"
        )));
    }
    build_2d(n1, n2, move |x1, x2, c_in| {
        let (mut t1, mut t2) = (x1, x2);
        if plus && c_in == 0 {
            if axis == 0 {
                t1 = (x1 + 1) % n1;
            } else {
                t2 = (x2 + 1) % n2;
            }
        } else if !plus && c_in == 1 {
            if axis == 0 {
                t1 = (x1 + n1 - 1) % n1;
            } else {
                t2 = (x2 + n2 - 1) % n2;
            }
        }
        vec![(t1, t2, c_in, cr(1.0))]
    })
}

/// Double-shift split-step walk along one torus axis:
/// C_a (T-_axis)^2 C_b (T+_axis)^2 with uniform coins.
pub fn ssqw_double_step_axis(
    axis: usize,
    theta_a: CoinAngle,
    theta_b: CoinAngle,
    n1: usize,
    n2: usize,
) -> Result<PropagatorMatrix> {
    let tm = t_minus_axis(axis, n1, n2)?;
    let tp = t_plus_axis(axis, n1, n2)?;
    let ca = site_dependent_coin_2d(&CoinProfile::uniform(n1, theta_a), 0, n1, n2)?;
    let cb = site_dependent_coin_2d(&CoinProfile::uniform(n1, theta_b), 0, n1, n2)?;
    ca.compose(&tm.compose(&tm)?)?
        .compose(&cb)?
        .compose(&tp.compose(&tp)?)
}

/// Diagonal shift S3 = S1 S2 (= S2 S1).
pub fn s3(n1: usize, n2: usize) -> Result<PropagatorMatrix> {
    build_2d(n1, n2, |x1, x2, c_in| {
        let (t1, t2) = if c_in == 0 {
            ((x1 + 1) % n1, (x2 + 1) % n2)
        } else {
            ((x1 + n1 - 1) % n1, (x2 + n2 - 1) % n2)
        };
        vec![(t1, t2, c_in, cr(1.0))]
    })
}

/// Coin layer on the torus with theta depending on the chosen axis
/// coordinate (axis 0 or 1); a uniform profile gives 1 (x) 1 (x) C_theta.
pub fn site_dependent_coin_2d(
    profile: &CoinProfile,
    axis: usize,
    n1: usize,
    n2: usize,
) -> Result<PropagatorMatrix> {
    let axis_len = if axis == 0 {
        n1
    } else if axis == 1 {
        n2
    } else {
        return Err(Error::ParameterOutOfDomain(format!(
            "coin profile axis {axis} out of range"
        )));
    };
    if profile.len() != axis_len {
        return Err(Error::ProfileLengthMismatch {
            profile: profile.len(),
            axis: axis_len,
        });
    }
    build_2d(n1, n2, |x1, x2, c_in| {
        let theta = profile.theta(if axis == 0 { x1 } else { x2 });
        let cm = coin(theta);
        vec![
            (x1, x2, 0, cm.0[0][c_in]),
            (x1, x2, 1, cm.0[1][c_in]),
        ]
    })
}

/// Triangular-lattice 2D split-step walk
/// Z_2D(theta1, theta2) = S3 C_theta1 S2 C_theta2 S1 C_theta1.
pub fn ssqw2d_step(
    theta1: CoinAngle,
    theta2: CoinAngle,
    n1: usize,
    n2: usize,
) -> Result<PropagatorMatrix> {
    ssqw2d_step_profile(theta1, &CoinProfile::uniform(n1, theta2), n1, n2)
}

/// Z_2D with the second coin depending on the axis-1 coordinate.
pub fn ssqw2d_step_profile(
    theta1: CoinAngle,
    theta2_profile: &CoinProfile,
    n1: usize,
    n2: usize,
) -> Result<PropagatorMatrix> {
    let c1 = site_dependent_coin_2d(&CoinProfile::uniform(n1, theta1), 0, n1, n2)?;
    let c2 = site_dependent_coin_2d(theta2_profile, 0, n1, n2)?;
    s3(n1, n2)?
        .compose(&c1)?
        .compose(&s2(n1, n2)?)?
        .compose(&c2)?
        .compose(&s1(n1, n2)?)?
        .compose(&c1)
}

// ---------------------------------------------------------------------------
// Generalized SMP gadget geometry
// ---------------------------------------------------------------------------

/// Radial geometry of the generalized SMP gadget: intensity-maximum radii
/// r_max(l) = w sqrt(|l|/2) for |l| <= l_c + 1 and the gadget boundary
/// radius r_boundary = (r_max(l_c) + r_max(l_c + 1)) / 2.
pub fn generalized_smp_radii(l_c: u64, w: f64) -> Result<(Vec<f64>, f64)> {
    if w <= 0.0 {
        return Err(Error::ParameterOutOfDomain(format!(
            "beam width w={w} must be positive"
        )));
    }
    let r_max: Vec<f64> = (0..=l_c + 1)
        .map(|l| w * ((l as f64) / 2.0).sqrt())
        .collect();
    let r_boundary = (r_max[l_c as usize] + r_max[l_c as usize + 1]) / 2.0;
    Ok((r_max, r_boundary))
}

/// OAM index of ring site x: l = x for x < N/2 and l = x - N otherwise,
/// so the ring covers l in [-N/2, N/2).
pub fn oam_index(x: usize, n: usize) -> i64 {
    if x < n.div_ceil(2) {
        x as i64
    } else {
        x as i64 - n as i64
    }
}

/// Coin profile induced by the generalized SMP gadget on an OAM ring:
/// theta_inner for |l| <= l_c, theta_outer beyond.
pub fn generalized_smp_profile(
    n: usize,
    l_c: u64,
    theta_inner: CoinAngle,
    theta_outer: CoinAngle,
) -> CoinProfile {
    let thetas = (0..n)
        .map(|x| {
            if oam_index(x, n).unsigned_abs() <= l_c {
                theta_inner
            } else {
                theta_outer
            }
        })
        .collect();
    CoinProfile::explicit(thetas)
}
