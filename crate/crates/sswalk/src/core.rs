//! Hilbert-space primitives: lattice geometry, walker states, dense unitary
//! propagators, and the distances used by every verifier.

use crate::linalg::{self, cr, C64};
use crate::{Error, Result, UNITARITY_TOL};
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

/// Periodic lattice carrying the walk: a ring of N sites or an N1 x N2 torus,
/// always with a two-level coin. Basis index is site-major, coin-minor:
/// `2*x + c` in 1D and `2*(x1*N2 + x2) + c` in 2D.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    dims: Vec<usize>,
}

impl LatticeGeometry {
    /// 1D ring of `n` sites.
    pub fn ring(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimensions(format!("ring size {n} < 2")));
        }
        Ok(LatticeGeometry { dims: vec![n] })
    }

    /// 2D torus of `n1 x n2` sites.
    pub fn torus(n1: usize, n2: usize) -> Result<Self> {
        if n1 < 2 || n2 < 2 {
            return Err(Error::InvalidDimensions(format!(
                "torus dims {n1}x{n2} must both be >= 2"
            )));
        }
        Ok(LatticeGeometry {
            dims: vec![n1, n2],
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn coin_dim(&self) -> usize {
        2
    }

    pub fn is_one_dimensional(&self) -> bool {
        self.dims.len() == 1
    }

    /// Number of lattice sites (product over axes).
    pub fn site_count(&self) -> usize {
        self.dims.iter().product()
    }

    /// Total Hilbert dimension: sites x coin.
    pub fn hilbert_dim(&self) -> usize {
        self.site_count() * 2
    }

    /// Flat basis index of (site..., coin).
    pub fn index_of(&self, site: &[usize], coin: usize) -> Result<usize> {
        if site.len() != self.dims.len() {
            return Err(Error::SiteOutOfRange {
                index: site.to_vec(),
                dims: self.dims.clone(),
            });
        }
        let mut flat = 0usize;
        for (axis, (&s, &n)) in site.iter().zip(self.dims.iter()).enumerate() {
            if s >= n {
                return Err(Error::SiteOutOfRange {
                    index: site.to_vec(),
                    dims: self.dims.clone(),
                });
            }
            let _ = axis;
            flat = flat * n + s;
        }
        Ok(2 * flat + coin)
    }
}

/// Normalized amplitude vector over (site x coin).
#[derive(Debug, Clone)]
pub struct WalkerState {
    geometry: LatticeGeometry,
    amplitudes: Array1<C64>,
}

impl WalkerState {
    /// Wraps raw amplitudes after checking length and unit norm.
    pub fn new(geometry: LatticeGeometry, amplitudes: Array1<C64>) -> Result<Self> {
        if amplitudes.len() != geometry.hilbert_dim() {
            return Err(Error::GeometryMismatch(format!(
                "amplitude length {} != Hilbert dimension {}",
                amplitudes.len(),
                geometry.hilbert_dim()
            )));
        }
        let state = WalkerState {
            geometry,
            amplitudes,
        };
        let n = state.norm();
        if (n - 1.0).abs() > UNITARITY_TOL {
            return Err(Error::ParameterOutOfDomain(format!(
                "state norm {n} deviates from 1 beyond {UNITARITY_TOL:.0e}"
            )));
        }
        Ok(state)
    }

    /// Wraps amplitudes, normalizing them first.
    pub fn normalized(geometry: LatticeGeometry, amplitudes: Array1<C64>) -> Result<Self> {
        let n = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 {
            return Err(Error::ZeroCoinVector);
        }
        let scaled = amplitudes.mapv(|z| z / cr(n));
        WalkerState::new(geometry, scaled)
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Overlap <self|other>.
    pub fn inner(&self, other: &WalkerState) -> C64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Dense unitary propagator with its lattice geometry.
#[derive(Debug, Clone)]
pub struct PropagatorMatrix {
    geometry: LatticeGeometry,
    matrix: Array2<C64>,
}

impl PropagatorMatrix {
    /// Wraps a dense matrix after checking shape and unitarity at 1e-12.
    pub fn new(geometry: LatticeGeometry, matrix: Array2<C64>) -> Result<Self> {
        let dim = geometry.hilbert_dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::GeometryMismatch(format!(
                "matrix shape {:?} != Hilbert dimension {dim}",
                matrix.dim()
            )));
        }
        let dev = linalg::unitarity_deviation(&matrix);
        if dev > UNITARITY_TOL {
            return Err(Error::NotUnitary {
                deviation: dev,
                tolerance: UNITARITY_TOL,
            });
        }
        Ok(PropagatorMatrix { geometry, matrix })
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Matrix product self * rhs (rhs acts first).
    pub fn compose(&self, rhs: &PropagatorMatrix) -> Result<PropagatorMatrix> {
        if self.geometry != rhs.geometry {
            return Err(Error::GeometryMismatch(
                "cannot compose propagators on different lattices".into(),
            ));
        }
        PropagatorMatrix::new(self.geometry.clone(), self.matrix.dot(&rhs.matrix))
    }

    pub fn adjoint(&self) -> PropagatorMatrix {
        PropagatorMatrix {
            geometry: self.geometry.clone(),
            matrix: linalg::adjoint(&self.matrix),
        }
    }
}

/// Basis state with the given coin amplitudes at one site.
pub fn make_basis_state(
    geometry: &LatticeGeometry,
    site: &[usize],
    coin: (C64, C64),
) -> Result<WalkerState> {
    let norm = (coin.0.norm_sqr() + coin.1.norm_sqr()).sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroCoinVector);
    }
    let up = geometry.index_of(site, 0)?;
    let down = geometry.index_of(site, 1)?;
    let mut amplitudes = Array1::from_elem(geometry.hilbert_dim(), cr(0.0));
    amplitudes[up] = coin.0 / cr(norm);
    amplitudes[down] = coin.1 / cr(norm);
    WalkerState::new(geometry.clone(), amplitudes)
}

/// Applies the propagator: returns U psi. Norm is preserved by unitarity.
pub fn apply(u: &PropagatorMatrix, psi: &WalkerState) -> Result<WalkerState> {
    if u.geometry() != psi.geometry() {
        return Err(Error::GeometryMismatch(
            "propagator and state live on different lattices".into(),
        ));
    }
    let out = u.matrix().dot(psi.amplitudes());
    Ok(WalkerState {
        geometry: psi.geometry().clone(),
        amplitudes: out,
    })
}

/// Probability of each lattice site, coin traced out.
pub fn position_distribution(psi: &WalkerState) -> Array1<f64> {
    let sites = psi.geometry().site_count();
    let amp = psi.amplitudes();
    Array1::from_shape_fn(sites, |x| {
        amp[2 * x].norm_sqr() + amp[2 * x + 1].norm_sqr()
    })
}

/// Marginal distribution over one axis of a 2D state (0 or 1).
pub fn axis_marginal(psi: &WalkerState, axis: usize) -> Result<Array1<f64>> {
    let dims = psi.geometry().dims();
    if dims.len() != 2 {
        return Err(Error::GeometryMismatch(
            "axis marginal requires a 2D state".into(),
        ));
    }
    if axis > 1 {
        return Err(Error::ParameterOutOfDomain(format!(
            "axis {axis} out of range for 2D state"
        )));
    }
    let (n1, n2) = (dims[0], dims[1]);
    let full = position_distribution(psi);
    let len = if axis == 0 { n1 } else { n2 };
    let mut out = Array1::zeros(len);
    for x1 in 0..n1 {
        for x2 in 0..n2 {
            let p = full[x1 * n2 + x2];
            out[if axis == 0 { x1 } else { x2 }] += p;
        }
    }
    Ok(out)
}

/// Spectral-norm distance ||A - B||.
pub fn operator_distance(a: &PropagatorMatrix, b: &PropagatorMatrix) -> Result<f64> {
    if a.geometry() != b.geometry() {
        return Err(Error::GeometryMismatch(
            "operator distance requires matching lattices".into(),
        ));
    }
    let diff = a.matrix() - b.matrix();
    Ok(linalg::spectral_norm(&diff))
}

/// Phase-insensitive distance min over phi of ||A - e^{i phi} B||.
///
/// The optimal phase aligns e^{i phi} with tr(B^dag A); when the trace
/// vanishes the plain distance is already phase-optimal on average and is
/// returned for the zero-phase representative.
pub fn operator_distance_phase_insensitive(
    a: &PropagatorMatrix,
    b: &PropagatorMatrix,
) -> Result<f64> {
    let phi = optimal_phase(a, b)?;
    let rotated = b.matrix().mapv(|z| z * C64::from_polar(1.0, phi));
    let diff = a.matrix() - &rotated;
    Ok(linalg::spectral_norm(&diff))
}

/// Phase phi maximizing Re tr(A^dag e^{i phi} B)... i.e. arg tr(B^dag A).
pub fn optimal_phase(a: &PropagatorMatrix, b: &PropagatorMatrix) -> Result<f64> {
    if a.geometry() != b.geometry() {
        return Err(Error::GeometryMismatch(
            "operator distance requires matching lattices".into(),
        ));
    }
    let n = a.dim();
    let mut tr = cr(0.0);
    for i in 0..n {
        for k in 0..n {
            tr += b.matrix()[[k, i]].conj() * a.matrix()[[k, i]];
        }
    }
    Ok(if tr.norm() > 0.0 { tr.arg() } else { 0.0 })
}
