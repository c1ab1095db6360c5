//! Momentum-space analysis: Bloch blocks, closed-form quasienergy
//! Hamiltonians, the SU(2) matrix-logarithm oracle, truncated BCH series,
//! dispersion curves, spectral gaps, and winding numbers.
//!
//! Ordering conventions matter here and are recorded explicitly. The
//! translation-invariant walks block-diagonalize over |k> = sum_x
//! exp(-ikx)|x>, under which F maps to e^{ik}. A walk written coin-after-
//! shift has Bloch block C_theta S_k; its cyclic partner has S_k C_theta.
//! The two are similar, share quasienergies, and differ in the direction
//! vector n(k). The closed-form dispersion formulas used below match the
//! shift-then-coin convention; [`BlochOrdering`] selects between the two.

use crate::linalg::{self, c, cr, Mat2, C64};
use crate::operators::{coin, CoinAngle};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Points with sin E below this are treated as gap closings: the direction
/// vector n(k) is reported as absent rather than extrapolated.
pub const GAP_CLOSING_SIN_E: f64 = 1e-6;

/// Planarity tolerance for the winding-number construction.
pub const PLANARITY_TOL: f64 = 1e-8;

/// Factor order of a single-step Bloch block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlochOrdering {
    /// U_k = C_theta S_k: coin applied after the shift.
    CoinShift,
    /// U_k = S_k C_theta: the cyclically equivalent shift-after-coin block;
    /// this is the convention the closed-form n(k) formulas match.
    ShiftCoin,
}

/// One momentum fiber of a translation-invariant walk: the 2x2 unitary
/// block, its Hermitian logarithm, the quasienergy E in [0, pi], and the
/// unit direction vector n with H = E n.sigma (absent at gap closings).
#[derive(Debug, Clone)]
pub struct BlochBlock {
    pub k: f64,
    /// Second momentum component for 2D blocks.
    pub ky: Option<f64>,
    pub u: Mat2,
    pub h: Mat2,
    pub e: f64,
    pub n: Option<[f64; 3]>,
}

impl BlochBlock {
    /// Builds the block from its unitary: H via the SU(2) logarithm,
    /// E = arccos(Re tr U / 2), n from the traceless part of H.
    pub fn from_unitary(k: f64, ky: Option<f64>, u: Mat2) -> Self {
        let h = linalg::su2_log(&u);
        let e = clamped_acos(u.trace().re / 2.0);
        let (_, v) = h.pauli_components();
        let vnorm = norm3(v);
        let n = if e.sin() >= GAP_CLOSING_SIN_E && vnorm > 0.0 {
            Some(scale3(v, 1.0 / vnorm))
        } else {
            None
        };
        BlochBlock { k, ky, u, h, e, n }
    }
}

fn clamped_acos(x: f64) -> f64 {
    x.clamp(-1.0, 1.0).acos()
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn scale3(v: [f64; 3], s: f64) -> [f64; 3] {
    [v[0] * s, v[1] * s, v[2] * s]
}

fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// diag(e^{ik}, e^{-ik}).
pub fn s_k(k: f64) -> Mat2 {
    Mat2::diag(C64::from_polar(1.0, k), C64::from_polar(1.0, -k))
}

/// diag(e^{ik}, 1).
pub fn t_plus_k(k: f64) -> Mat2 {
    Mat2::diag(C64::from_polar(1.0, k), cr(1.0))
}

/// diag(1, e^{-ik}).
pub fn t_minus_k(k: f64) -> Mat2 {
    Mat2::diag(cr(1.0), C64::from_polar(1.0, -k))
}

/// Momentum grid of `resolution` points covering (-pi, pi].
pub fn momentum_grid(resolution: usize) -> Vec<f64> {
    (0..resolution)
        .map(|j| -PI + 2.0 * PI * (j as f64 + 1.0) / resolution as f64)
        .collect()
}

/// Bloch block of the ordinary walk in the coin-after-shift convention,
/// U_k = C_theta diag(e^{ik}, e^{-ik}).
pub fn bloch_block_oqw(theta: CoinAngle, k: f64) -> BlochBlock {
    bloch_block_oqw_ordered(theta, k, BlochOrdering::CoinShift)
}

/// Bloch block of the ordinary walk in either factor order.
pub fn bloch_block_oqw_ordered(theta: CoinAngle, k: f64, ordering: BlochOrdering) -> BlochBlock {
    let cm = coin(theta);
    let sk = s_k(k);
    let u = match ordering {
        BlochOrdering::CoinShift => cm.mul(&sk),
        BlochOrdering::ShiftCoin => sk.mul(&cm),
    };
    BlochBlock::from_unitary(k, None, u)
}

/// Closed-form ordinary-walk dispersion: E = arccos(cos theta cos k) and
/// n = (sin theta sin k, sin theta cos k, -cos theta sin k) / sin E.
/// The direction matches the shift-then-coin block S_k C_theta; n is
/// absent at gap closings (sin E < [`GAP_CLOSING_SIN_E`]).
pub fn dispersion_oqw(theta: CoinAngle, k: f64) -> (f64, Option<[f64; 3]>) {
    let (ce, w) = oqw_cos_and_vec(theta, k);
    let e = clamped_acos(ce);
    let se = e.sin();
    let n = if se >= GAP_CLOSING_SIN_E {
        Some(scale3(w, 1.0 / se))
    } else {
        None
    };
    (e, n)
}

/// (cos E, sin E * n) for the ordinary-walk block S_k C_theta. Well defined
/// at gap closings, where the vector part vanishes.
fn oqw_cos_and_vec(theta: CoinAngle, k: f64) -> (f64, [f64; 3]) {
    let (st, ct) = theta.value().sin_cos();
    let (sk, ck) = k.sin_cos();
    (ct * ck, [st * sk, st * ck, -ct * sk])
}

/// (cos E, sin E * n) read directly off a determinant-one 2x2 unitary,
/// U = cos E - i sin E n.sigma.
fn su2_cos_and_vec(u: &Mat2) -> (f64, [f64; 3]) {
    let ce = u.trace().re / 2.0;
    let m = u.sub(&Mat2::identity().scale(cr(ce))).scale(linalg::I);
    let (_, v) = m.pauli_components();
    (ce, v)
}

/// Hermitian logarithm oracle: H with U = exp(-iH) and eigenvalues in
/// (-pi, pi], the eigenvalue -1 mapped to quasienergy +pi.
pub fn su2_log(u: &Mat2) -> Mat2 {
    linalg::su2_log(u)
}

/// Exact exponential exp(-iH) of a Hermitian 2x2 block; inverse of
/// [`su2_log`] away from the branch cut.
pub fn su2_exp(h: &Mat2) -> Mat2 {
    linalg::expm_minus_i_herm(h)
}

/// SU(2) composition of two (cos E, sin E * n) factors, left factor first:
/// exp(-iE_a a.sigma) exp(-iE_b b.sigma).
fn compose_su2(a: (f64, [f64; 3]), b: (f64, [f64; 3])) -> (f64, [f64; 3]) {
    let ce = a.0 * b.0 - dot3(a.1, b.1);
    let vec = add3(
        add3(scale3(a.1, b.0), scale3(b.1, a.0)),
        cross3(a.1, b.1),
    );
    (ce, vec)
}

fn block_from_composition(
    k: f64,
    ky: Option<f64>,
    u: Mat2,
    composed: (f64, [f64; 3]),
) -> BlochBlock {
    let (ce, vec) = composed;
    let e = clamped_acos(ce);
    let se = (1.0 - ce * ce).max(0.0).sqrt();
    if se >= GAP_CLOSING_SIN_E {
        let n = scale3(vec, 1.0 / se);
        let h = Mat2::from_pauli(0.0, scale3(n, e));
        BlochBlock {
            k,
            ky,
            u,
            h,
            e,
            n: Some(n),
        }
    } else {
        // Gap closing: no closed-form direction; fall back to the oracle.
        let h = linalg::su2_log(&u);
        BlochBlock {
            k,
            ky,
            u,
            h,
            e,
            n: None,
        }
    }
}

/// Closed-form split-step Hamiltonian at momentum k, built by composing the
/// two ordinary-walk factors:
///
/// cos E_ss = cos E1 cos E2 - sin E1 sin E2 n1.n2
/// H_ss = E_ss / sin E_ss * [sin E1 cos E2 n1 + cos E1 sin E2 n2
///                           + sin E1 sin E2 (n1 x n2)].sigma
///
/// with the theta1 factor leftmost. The returned block's U is the matching
/// product (S_k C_theta1)(S_k C_theta2), which equals the Bloch block of
/// the double-shift walk up to the recorded cyclic conjugation; exp(-iH_ss)
/// reproduces it to machine precision away from gap closings.
pub fn hamiltonian_ss_closed_form(theta1: CoinAngle, theta2: CoinAngle, k: f64) -> BlochBlock {
    let f1 = oqw_cos_and_vec(theta1, k);
    let f2 = oqw_cos_and_vec(theta2, k);
    let u1 = s_k(k).mul(&coin(theta1));
    let u2 = s_k(k).mul(&coin(theta2));
    block_from_composition(k, None, u1.mul(&u2), compose_su2(f1, f2))
}

/// Single-momentum split-step factor of the 2D closed form: the coin-first
/// block C_a S_k C_b S_k.
fn split_factor(theta_a: CoinAngle, theta_b: CoinAngle, k: f64) -> Mat2 {
    let sk = s_k(k);
    coin(theta_a).mul(&sk).mul(&coin(theta_b)).mul(&sk)
}

/// Closed-form 2D split-step Hamiltonian at (k_x, k_y):
///
/// cos E_2D = cos E_ss(k_y) cos E_ss(k_x)
///            - sin E_ss(k_y) sin E_ss(k_x) N(k_y).N(k_x)
///
/// with direction sin E_y cos E_x N(k_y) + cos E_y sin E_x N(k_x)
/// + sin E_y sin E_x N(k_y) x N(k_x). The axis-2 factor (angles (0,
/// theta1) at k_y) stands leftmost; the axis-1 factor carries (theta2,
/// theta1) at k_x. The returned U is that product; the direct 2D walk
/// block equals S_kx U S_kx^dag (cyclic conjugation along axis 1).
pub fn hamiltonian_2dss_closed_form(
    theta1: CoinAngle,
    theta2: CoinAngle,
    kx: f64,
    ky: f64,
) -> BlochBlock {
    let dy = split_factor(CoinAngle::new(0.0), theta1, ky);
    let dx = split_factor(theta2, theta1, kx);
    let fy = su2_cos_and_vec(&dy);
    let fx = su2_cos_and_vec(&dx);
    block_from_composition(kx, Some(ky), dy.mul(&dx), compose_su2(fy, fx))
}

/// Direct Bloch block of the 2D triangular walk:
/// S3(k) C_theta1 S2(k) C_theta2 S1(k) C_theta1 with S1(k) = S_kx,
/// S2(k) = S_ky, S3(k) = S_kx S_ky.
pub fn bloch_block_2d(theta1: CoinAngle, theta2: CoinAngle, kx: f64, ky: f64) -> BlochBlock {
    let c1 = coin(theta1);
    let c2 = coin(theta2);
    let (s1k, s2k) = (s_k(kx), s_k(ky));
    let u = s1k
        .mul(&s2k)
        .mul(&c1)
        .mul(&s2k)
        .mul(&c2)
        .mul(&s1k)
        .mul(&c1);
    BlochBlock::from_unitary(kx, Some(ky), u)
}

/// Baker-Campbell-Hausdorff expansion of H with exp(-iH) =
/// exp(-iH1) exp(-iH2), truncated at the requested order:
/// order 1: H1 + H2; order 2: adds -(i/2)[H1, H2]; order 3: adds
/// -(1/12)([H1,[H1,H2]] - [H2,[H1,H2]]). H1 is the left factor.
pub fn bch_truncated(h1: &Mat2, h2: &Mat2, order: u8) -> Result<Mat2> {
    if !(1..=3).contains(&order) {
        return Err(Error::ParameterOutOfDomain(format!(
            "BCH truncation order must be 1, 2, or 3, got {order}"
        )));
    }
    let mut h = h1.add(h2);
    if order >= 2 {
        let comm = h1.commutator(h2);
        h = h.add(&comm.scale(c(0.0, -0.5)));
        if order >= 3 {
            let double = h1.commutator(&comm).sub(&h2.commutator(&comm));
            h = h.add(&double.scale(cr(-1.0 / 12.0)));
        }
    }
    Ok(h)
}

/// Split-step quasienergy E(k) = arccos(cos theta1 cos theta2 cos k
/// - sin theta1 sin theta2) for the single-shift walk. The double-shift
/// walk's dispersion is E(2k), so both share the same quasienergy image.
pub fn quasienergy_ss(theta1: CoinAngle, theta2: CoinAngle, k: f64) -> f64 {
    let (s1, c1) = theta1.value().sin_cos();
    let (s2, c2) = theta2.value().sin_cos();
    clamped_acos(c1 * c2 * k.cos() - s1 * s2)
}

/// Minimum distances of the split-step spectrum from E = 0 and E = pi over
/// a k-grid of the given resolution.
pub fn gap(theta1: CoinAngle, theta2: CoinAngle, resolution: usize) -> Result<(f64, f64)> {
    if resolution < 64 {
        return Err(Error::ParameterOutOfDomain(format!(
            "gap grid resolution must be at least 64, got {resolution}"
        )));
    }
    let mut gap0 = f64::INFINITY;
    let mut gap_pi = f64::INFINITY;
    for k in momentum_grid(resolution) {
        let e = quasienergy_ss(theta1, theta2, k);
        gap0 = gap0.min(e);
        gap_pi = gap_pi.min(PI - e);
    }
    Ok((gap0, gap_pi))
}

/// Smallest-eigenvalue eigenvector of a real symmetric 3x3 matrix.
fn sym3_smallest_eigvec(m: [[f64; 3]; 3]) -> Result<[f64; 3]> {
    let a = ndarray::Array2::from_shape_fn((3, 3), |(i, j)| cr(m[i][j]));
    let (_, vecs) = linalg::hermitian_eig(&a)?;
    // Columns are sorted ascending; re-align the arbitrary complex phase so
    // the vector is real.
    let col = vecs.column(0);
    let mut pivot = cr(0.0);
    for &z in col.iter() {
        if z.norm() > pivot.norm() {
            pivot = z;
        }
    }
    let phase = pivot / pivot.norm();
    let mut v = [0.0f64; 3];
    for (i, &z) in col.iter().enumerate() {
        v[i] = (z * phase.conj()).re;
    }
    let n = norm3(v);
    Ok(scale3(v, 1.0 / n))
}

/// Signed winding number of the split-step Bloch vector n(k) about the
/// normal of its plane as k traverses (-pi, pi].
///
/// The sampled block is the coin-first single-shift fiber
/// T-(k) C_theta2 T+(k) C_theta1, whose direction vector at theta2 = 0
/// reduces to (sin k, cos k, 0). The plane is found by principal-component
/// analysis of the samples; its normal is oriented so that the first
/// component exceeding 1e-6 in magnitude is positive, which fixes the sign
/// of the reported winding.
pub fn winding_number(theta1: CoinAngle, theta2: CoinAngle, resolution: usize) -> Result<i64> {
    if resolution < 64 {
        return Err(Error::ParameterOutOfDomain(format!(
            "winding grid resolution must be at least 64, got {resolution}"
        )));
    }
    let spacing = 2.0 * PI / resolution as f64;
    let (gap0, gap_pi) = gap(theta1, theta2, resolution)?;
    let required = 10.0 * spacing;
    if gap0 <= required || gap_pi <= required {
        return Err(Error::GaplessSpectrum {
            gap: gap0.min(gap_pi),
            required,
        });
    }

    let c1 = coin(theta1);
    let c2 = coin(theta2);
    let samples: Vec<[f64; 3]> = momentum_grid(resolution)
        .into_iter()
        .map(|k| {
            let u = t_minus_k(k).mul(&c2).mul(&t_plus_k(k)).mul(&c1);
            let (_, w) = su2_cos_and_vec(&u);
            let n = norm3(w);
            scale3(w, 1.0 / n)
        })
        .collect();

    let mut gram = [[0.0f64; 3]; 3];
    for n in &samples {
        for i in 0..3 {
            for j in 0..3 {
                gram[i][j] += n[i] * n[j];
            }
        }
    }
    let mut normal = sym3_smallest_eigvec(gram)?;

    let planarity = samples
        .iter()
        .map(|n| dot3(*n, normal).abs())
        .fold(0.0f64, f64::max);
    if planarity > PLANARITY_TOL {
        return Err(Error::NonPlanarBloch {
            deviation: planarity,
            tolerance: PLANARITY_TOL,
        });
    }

    for j in 0..3 {
        if normal[j].abs() > 1e-6 {
            if normal[j] < 0.0 {
                normal = scale3(normal, -1.0);
            }
            break;
        }
    }

    let e1 = {
        let n0 = samples[0];
        let v = add3(n0, scale3(normal, -dot3(n0, normal)));
        scale3(v, 1.0 / norm3(v))
    };
    let e2 = cross3(normal, e1);

    let angle = |n: &[f64; 3]| dot3(*n, e2).atan2(dot3(*n, e1));
    let mut total = 0.0;
    let mut prev = angle(&samples[0]);
    for n in samples.iter().skip(1).chain(std::iter::once(&samples[0])) {
        let a = angle(n);
        let mut d = a - prev;
        if d > PI {
            d -= 2.0 * PI;
        } else if d <= -PI {
            d += 2.0 * PI;
        }
        total += d;
        prev = a;
    }
    let w = total / (2.0 * PI);
    let rounded = w.round();
    if (w - rounded).abs() > 1e-6 {
        return Err(Error::ParameterOutOfDomain(format!(
            "winding accumulated to non-integer {w}; refine the grid"
        )));
    }
    Ok(rounded as i64)
}

/// One (k, E, n) sample of a dispersion relation.
#[derive(Debug, Clone, Serialize)]
pub struct DispersionSample {
    pub k: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ky: Option<f64>,
    pub e: f64,
    pub n: Option<[f64; 3]>,
}

/// Sampled dispersion relation with the coin angles that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct DispersionCurve {
    pub thetas: Vec<f64>,
    pub samples: Vec<DispersionSample>,
}

/// Ordinary-walk dispersion sampled on a k-grid.
pub fn dispersion_curve_oqw(theta: CoinAngle, resolution: usize) -> DispersionCurve {
    let samples = momentum_grid(resolution)
        .into_par_iter()
        .map(|k| {
            let (e, n) = dispersion_oqw(theta, k);
            DispersionSample { k, ky: None, e, n }
        })
        .collect();
    DispersionCurve {
        thetas: vec![theta.value()],
        samples,
    }
}

/// Split-step dispersion from the closed-form Hamiltonian on a k-grid.
pub fn dispersion_curve_ss(
    theta1: CoinAngle,
    theta2: CoinAngle,
    resolution: usize,
) -> DispersionCurve {
    let samples = momentum_grid(resolution)
        .into_par_iter()
        .map(|k| {
            let b = hamiltonian_ss_closed_form(theta1, theta2, k);
            DispersionSample {
                k,
                ky: None,
                e: b.e,
                n: b.n,
            }
        })
        .collect();
    DispersionCurve {
        thetas: vec![theta1.value(), theta2.value()],
        samples,
    }
}

/// 2D split-step dispersion on a resolution x resolution (k_x, k_y) grid,
/// k_x major.
pub fn dispersion_curve_2d(
    theta1: CoinAngle,
    theta2: CoinAngle,
    resolution: usize,
) -> DispersionCurve {
    let grid = momentum_grid(resolution);
    let mut points = Vec::with_capacity(resolution * resolution);
    for &kx in &grid {
        for &ky in &grid {
            points.push((kx, ky));
        }
    }
    let samples = points
        .into_par_iter()
        .map(|(kx, ky)| {
            let b = hamiltonian_2dss_closed_form(theta1, theta2, kx, ky);
            DispersionSample {
                k: kx,
                ky: Some(ky),
                e: b.e,
                n: b.n,
            }
        })
        .collect();
    DispersionCurve {
        thetas: vec![theta1.value(), theta2.value()],
        samples,
    }
}
