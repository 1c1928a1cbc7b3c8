//! Numerical constants shared by the assembly and solver stages.

/// Quadrature and tolerance settings for operator assembly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyConfig {
    /// Pairs whose centroids are closer than `near_factor` times the longest
    /// edge of the pair use the near rule and static-kernel extraction.
    pub near_factor: f64,
    /// Number of points (3 or 6) of the symmetric rule used on both
    /// triangles of well-separated pairs.
    pub far_points: usize,
    /// Order of the collapsed Gauss rule used for the outer integral when the
    /// two triangles share a node (the inner static part is analytic).
    pub touching_order: usize,
    /// Relative symmetry tolerance `‖Z - Zᵀ‖ / ‖Z‖` asserted after assembly.
    pub symmetry_tol: f64,
    /// Relative tolerance on negative eigenvalues of `Re(Z)` and `S^H S`.
    pub psd_tol: f64,
    /// Estimated condition number of `Z` above which a possible internal
    /// resonance is flagged.
    pub resonance_condition: f64,
    /// Free-space impedance (ohms).
    pub z0: f64,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        Self {
            near_factor: 2.0,
            far_points: 6,
            touching_order: 10,
            symmetry_tol: 1e-10,
            psd_tol: 1e-6,
            resonance_condition: 1e7,
            z0: crate::Z0,
        }
    }
}

/// Singular values below this fraction of the largest one are treated as
/// numerically zero.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Diagonal shift, relative to the mean diagonal, used when a reduced loss
/// matrix is not numerically positive definite.
pub const CHOLESKY_SHIFT: f64 = 1e-12;

/// Relative tie window for ordering degenerate eigenvalues.
pub const TIE_WINDOW: f64 = 1e-9;
