use thiserror::Error;

/// Errors reported by constructors, verifiers, and simulators.
#[derive(Debug, Error)]
pub enum Error {
    /// Lattice dimensions violate a constructor precondition.
    #[error("invalid lattice dimensions: {0}")]
    InvalidDimensions(String),

    /// Site index outside the lattice.
    #[error("site index {index:?} out of range for dims {dims:?}")]
    SiteOutOfRange { index: Vec<usize>, dims: Vec<usize> },

    /// Coin amplitude pair was (0, 0).
    #[error("coin amplitude vector must be nonzero")]
    ZeroCoinVector,

    /// Operands live on different lattices.
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    /// A matrix expected to be unitary failed the tolerance check.
    #[error("matrix is not unitary: max deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NotUnitary { deviation: f64, tolerance: f64 },

    /// Profile length does not match the lattice axis.
    #[error("coin profile length {profile} does not match axis length {axis}")]
    ProfileLengthMismatch { profile: usize, axis: usize },

    /// q-plate charge incompatible with the ring size.
    #[error("q-plate charge 2q={two_q} acts trivially on a ring of {n} sites")]
    IncompatibleQPlate { two_q: i64, n: usize },

    /// Parameter outside its documented domain.
    #[error("parameter out of domain: {0}")]
    ParameterOutOfDomain(String),

    /// Winding number requested for a spectrum without a usable gap.
    #[error("spectrum is gapless at the requested resolution: min gap {gap:.3e} <= {required:.3e}")]
    GaplessSpectrum { gap: f64, required: f64 },

    /// Sampled Bloch vectors do not lie in a common plane.
    #[error("Bloch vectors are not planar: max out-of-plane component {deviation:.3e} exceeds {tolerance:.3e}")]
    NonPlanarBloch { deviation: f64, tolerance: f64 },

    /// Eigensolver failed to converge.
    #[error("eigensolver did not converge: off-diagonal residual {residual:.3e} after {sweeps} sweeps")]
    EigensolverFailure { residual: f64, sweeps: usize },

    /// Strip spectrum carries no edge band for the requested profile.
    #[error("no edge band detected: {0}")]
    NoEdgeBand(String),
}
