//! Internal dense linear algebra: 2x2 complex blocks, a cyclic-Jacobi
//! Hermitian eigensolver, unitary eigendecomposition via simultaneous
//! diagonalization, the SU(2) matrix logarithm, and spectral norms.
//!
//! Everything here is deterministic: no randomized pivoting, no
//! platform-dependent LAPACK. Dimensions stay at desk scale (<= 512), where
//! Jacobi sweeps are fast and reproducible bit-for-bit.

use crate::Error;
use ndarray::{Array1, Array2};
use num_complex::Complex64;

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

// ---------------------------------------------------------------------------
// 2x2 blocks
// ---------------------------------------------------------------------------

/// Dense 2x2 complex matrix, the workhorse for Bloch-block algebra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2([[cr(0.0); 2]; 2])
    }

    pub fn identity() -> Self {
        Mat2([[cr(1.0), cr(0.0)], [cr(0.0), cr(1.0)]])
    }

    pub fn new(a: C64, b: C64, c_: C64, d: C64) -> Self {
        Mat2([[a, b], [c_, d]])
    }

    /// Diagonal matrix diag(a, b).
    pub fn diag(a: C64, b: C64) -> Self {
        Mat2([[a, cr(0.0)], [cr(0.0), b]])
    }

    /// phi*1 + v . sigma with sigma the Pauli vector; Hermitian for real inputs.
    pub fn from_pauli(phi: f64, v: [f64; 3]) -> Self {
        Mat2([
            [c(phi + v[2], 0.0), c(v[0], -v[1])],
            [c(v[0], v[1]), c(phi - v[2], 0.0)],
        ])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] *= s;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Commutator [self, rhs].
    pub fn commutator(&self, rhs: &Mat2) -> Mat2 {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max(self.0[i][j].norm());
            }
        }
        m
    }

    /// Spectral norm (largest singular value) of a 2x2 block, exact formula.
    pub fn spectral_norm(&self) -> f64 {
        // Singular values from eigenvalues of A^dag A: s^2 = (t/2) +- sqrt(t^2/4 - d)
        // with t = tr(A^dag A), d = |det A|^2.
        let ata = self.adjoint().mul(self);
        let t = ata.trace().re;
        let d = self.det().norm_sqr();
        let disc = (t * t / 4.0 - d).max(0.0).sqrt();
        (t / 2.0 + disc).max(0.0).sqrt()
    }

    /// Hermiticity deviation max |A - A^dag|.
    pub fn herm_deviation(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    /// Unitarity deviation max |A^dag A - 1|.
    pub fn unitarity_deviation(&self) -> f64 {
        self.adjoint().mul(self).sub(&Mat2::identity()).max_abs()
    }

    /// Pauli decomposition of a Hermitian block: (phi, v) with A = phi*1 + v.sigma.
    pub fn pauli_components(&self) -> (f64, [f64; 3]) {
        let a = &self.0;
        let phi = (a[0][0].re + a[1][1].re) / 2.0;
        let vx = (a[0][1].re + a[1][0].re) / 2.0;
        let vy = (a[1][0].im - a[0][1].im) / 2.0;
        let vz = (a[0][0].re - a[1][1].re) / 2.0;
        (phi, [vx, vy, vz])
    }
}

/// exp(-i H) for Hermitian H, via the exact SU(2) formula.
pub fn expm_minus_i_herm(h: &Mat2) -> Mat2 {
    let (phi, v) = h.pauli_components();
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let (co, si) = (r.cos(), if r > 0.0 { r.sin() / r } else { 1.0 });
    // e^{-i phi} (cos r - i sin r v_hat . sigma)
    let phase = c(phi.cos(), -phi.sin());
    let vs = Mat2::from_pauli(0.0, v).scale(c(0.0, -si));
    Mat2::identity().scale(cr(co)).add(&vs).scale(phase)
}

/// Hermitian logarithm of a 2x2 unitary: returns H with U = exp(-iH) and
/// eigenvalues of H in (-pi, pi], the -1 eigenvalue branch mapped to +pi.
///
/// The determinant phase is split off first so the SU(2) part can be read
/// from the Pauli components without diagonalizing.
pub fn su2_log(u: &Mat2) -> Mat2 {
    // det U = e^{2i delta}; pick delta in (-pi/2, pi/2] and write U = e^{i delta} W
    // with W in SU(2) up to sign.
    let det = u.det();
    let half_arg = det.arg() / 2.0;
    let delta = if half_arg <= -std::f64::consts::FRAC_PI_2 {
        half_arg + std::f64::consts::PI
    } else if half_arg > std::f64::consts::FRAC_PI_2 {
        half_arg - std::f64::consts::PI
    } else {
        half_arg
    };
    let w = u.scale(c(delta.cos(), -delta.sin()));
    // W = cos(E) 1 - i sin(E) n.sigma (real cos E because det W = 1 up to sign)
    let ctrace = w.trace().re / 2.0;
    let a = &w.0;
    let vx = -(a[0][1].im + a[1][0].im) / 2.0;
    let vy = (a[1][0].re - a[0][1].re) / 2.0;
    let vz = -(a[0][0].im - a[1][1].im) / 2.0;
    let s = (vx * vx + vy * vy + vz * vz).sqrt();
    let e_w = s.atan2(ctrace);
    // Eigenphases of -i log U are wrap(+-E_W - delta); reassemble H from the
    // spectral projectors of n.sigma.
    let e1 = wrap_quasienergy(e_w - delta);
    let e2 = wrap_quasienergy(-e_w - delta);
    if s > 1e-300 {
        let n = [vx / s, vy / s, vz / s];
        let nsig = Mat2::from_pauli(0.0, n);
        let p_plus = Mat2::identity().add(&nsig).scale(cr(0.5));
        let p_minus = Mat2::identity().sub(&nsig).scale(cr(0.5));
        p_plus.scale(cr(e1)).add(&p_minus.scale(cr(e2)))
    } else {
        // W proportional to identity: +-1 after the phase split.
        let e = if ctrace >= 0.0 {
            wrap_quasienergy(-delta)
        } else {
            wrap_quasienergy(std::f64::consts::PI - delta)
        };
        Mat2::identity().scale(cr(e))
    }
}

/// Wrap an angle into (-pi, pi], with the branch point mapped to +pi.
pub fn wrap_quasienergy(e: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = e % two_pi;
    if x <= -std::f64::consts::PI {
        x += two_pi;
    } else if x > std::f64::consts::PI {
        x -= two_pi;
    }
    // A value within one ulp of -pi belongs on the +pi branch.
    if x == -std::f64::consts::PI {
        x = std::f64::consts::PI;
    }
    x
}

// ---------------------------------------------------------------------------
// Dense helpers
// ---------------------------------------------------------------------------

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { cr(1.0) } else { cr(0.0) })
}

pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    let (r, cdim) = a.dim();
    Array2::from_shape_fn((cdim, r), |(i, j)| a[[j, i]].conj())
}

/// max |(A^dag A - 1)_{ij}|, the unitarity deviation.
pub fn unitarity_deviation(a: &Array2<C64>) -> f64 {
    let prod = adjoint(a).dot(a);
    let n = prod.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { cr(1.0) } else { cr(0.0) };
            dev = dev.max((prod[[i, j]] - target).norm());
        }
    }
    dev
}

/// Spectral norm via the Hermitian eigenvalues of A^dag A.
pub fn spectral_norm(a: &Array2<C64>) -> f64 {
    let ata = adjoint(a).dot(a);
    let (vals, _) = hermitian_eig(&ata).expect("A^dag A is Hermitian by construction");
    vals.iter().fold(0.0f64, |m, &v| m.max(v)).max(0.0).sqrt()
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver: cyclic Jacobi with complex rotations
// ---------------------------------------------------------------------------

const JACOBI_MAX_SWEEPS: usize = 60;

fn off_diagonal_norm(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[[i, j]].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues ascending and the unitary V with A = V diag V^dag.
/// Deterministic cyclic sweeps; converges quadratically once off-diagonal
/// mass is small.
pub fn hermitian_eig(a: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>), Error> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "hermitian_eig requires a square matrix");
    let mut m = a.clone();
    let mut v = identity(n);
    let scale = a.iter().fold(0.0f64, |acc, z| acc.max(z.norm())).max(1.0);
    let tol = 1e-14 * scale * (n as f64);

    let mut sweeps = 0;
    while off_diagonal_norm(&m) > tol {
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(Error::EigensolverFailure {
                residual: off_diagonal_norm(&m),
                sweeps,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                let norm_apq = apq.norm();
                if norm_apq <= tol / (n as f64) {
                    continue;
                }
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                let phase = apq / norm_apq;
                let tau = (aqq - app) / (2.0 * norm_apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = t * cth;
                // Plane rotation G: G[p,p]=c, G[p,q]=s*phase, G[q,p]=-s*conj(phase), G[q,q]=c.
                // Updates A <- G^dag A G, V <- V G.
                let s_ph = cr(sth) * phase;
                let s_ph_c = s_ph.conj();
                for i in 0..n {
                    let aip = m[[i, p]];
                    let aiq = m[[i, q]];
                    m[[i, p]] = aip * cr(cth) - aiq * s_ph_c;
                    m[[i, q]] = aip * s_ph + aiq * cr(cth);
                }
                for j in 0..n {
                    let apj = m[[p, j]];
                    let aqj = m[[q, j]];
                    m[[p, j]] = apj * cr(cth) - aqj * s_ph;
                    m[[q, j]] = apj * s_ph_c + aqj * cr(cth);
                }
                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = vip * cr(cth) - viq * s_ph_c;
                    v[[i, q]] = vip * s_ph + viq * cr(cth);
                }
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[[i, i]].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
    let vals = Array1::from_iter(order.iter().map(|&i| diag[i]));
    let mut vecs = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for i in 0..n {
            vecs[[i, col]] = v[[i, src]];
        }
    }
    Ok((vals, vecs))
}

// ---------------------------------------------------------------------------
// Unitary eigendecomposition via simultaneous diagonalization
// ---------------------------------------------------------------------------

/// Eigendecomposition of a unitary matrix.
///
/// Returns unit-modulus eigenvalues and an orthonormal eigenbasis. Strategy:
/// diagonalize the Hermitian part (U+U^dag)/2, then within each degenerate
/// cluster diagonalize the restriction of (U-U^dag)/(2i). The two commute on
/// each cluster because U is normal, which resolves e.g. the +-E quasienergy
/// pairs that share cos E.
pub fn unitary_eig(u: &Array2<C64>) -> Result<(Array1<C64>, Array2<C64>), Error> {
    let n = u.nrows();
    let ud = adjoint(u);
    let herm = Array2::from_shape_fn((n, n), |(i, j)| (u[[i, j]] + ud[[i, j]]) * cr(0.5));
    let skew = Array2::from_shape_fn((n, n), |(i, j)| (u[[i, j]] - ud[[i, j]]) * c(0.0, -0.5));
    let (vals1, mut basis) = hermitian_eig(&herm)?;

    // Cluster nearly equal eigenvalues of the Hermitian part.
    let cluster_tol = 1e-8;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (vals1[end] - vals1[end - 1]).abs() < cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            // Restrict the skew part to the cluster and rediagonalize.
            let m = end - start;
            let sub_cols: Vec<usize> = (start..end).collect();
            let mut restricted = Array2::zeros((m, m));
            // B = P^dag skew P with P the cluster columns.
            let mut skew_p = Array2::zeros((n, m));
            for (jj, &col) in sub_cols.iter().enumerate() {
                for i in 0..n {
                    let mut acc = cr(0.0);
                    for k in 0..n {
                        acc += skew[[i, k]] * basis[[k, col]];
                    }
                    skew_p[[i, jj]] = acc;
                }
            }
            for (ii, &ci) in sub_cols.iter().enumerate() {
                for jj in 0..m {
                    let mut acc = cr(0.0);
                    for k in 0..n {
                        acc += basis[[k, ci]].conj() * skew_p[[k, jj]];
                    }
                    restricted[[ii, jj]] = acc;
                }
            }
            let (_, rot) = hermitian_eig(&restricted)?;
            // Rotate the cluster columns in place.
            let old: Vec<Vec<C64>> = sub_cols
                .iter()
                .map(|&cidx| (0..n).map(|i| basis[[i, cidx]]).collect())
                .collect();
            for (jj, &cidx) in sub_cols.iter().enumerate() {
                for i in 0..n {
                    let mut acc = cr(0.0);
                    for (kk, col) in old.iter().enumerate() {
                        acc += col[i] * rot[[kk, jj]];
                    }
                    basis[[i, cidx]] = acc;
                }
            }
        }
        start = end;
    }

    // Eigenvalues from Rayleigh quotients, projected onto the unit circle.
    let mut vals = Array1::from_elem(n, cr(0.0));
    for col in 0..n {
        let mut uv = vec![cr(0.0); n];
        for i in 0..n {
            let mut acc = cr(0.0);
            for k in 0..n {
                acc += u[[i, k]] * basis[[k, col]];
            }
            uv[i] = acc;
        }
        let mut lambda = cr(0.0);
        for i in 0..n {
            lambda += basis[[i, col]].conj() * uv[i];
        }
        let lam = if lambda.norm() > 0.0 {
            lambda / lambda.norm()
        } else {
            cr(1.0)
        };
        // Residual check: the decomposition must actually diagonalize U.
        let mut res = 0.0f64;
        for i in 0..n {
            res += (uv[i] - lam * basis[[i, col]]).norm_sqr();
        }
        let res = res.sqrt();
        if res > 1e-8 {
            return Err(Error::EigensolverFailure {
                residual: res,
                sweeps: 0,
            });
        }
        vals[col] = lam;
    }
    Ok((vals, basis))
}
