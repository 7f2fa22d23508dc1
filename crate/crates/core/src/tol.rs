//! Numerical tolerances shared by the library and its test suites.
//!
//! Every threshold used by a kernel or asserted by a test lives here so the
//! two cannot drift apart. Values fall into three bands: machine-precision
//! slack for exact algebra (1e-12 .. 1e-10), accumulated-rounding slack for
//! iterative kernels (1e-8), and statistical tolerances for Monte Carlo
//! estimates (0.05).

/// Maximum allowed `|M - M^T|` entry before a matrix is rejected as
/// asymmetric by the symmetric eigensolver.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Jacobi sweep convergence: stop once the off-diagonal Frobenius mass drops
/// below this fraction of the input's Frobenius norm.
pub const JACOBI_CONVERGENCE: f64 = 1e-12;

/// Hard cap on Jacobi sweeps; the solver reports non-convergence past this.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigendecomposition reconstruction error, relative Frobenius.
pub const EIGEN_RECONSTRUCT_REL: f64 = 1e-10;

/// Eigenvector orthonormality, max entry of `V^T V - I`.
pub const EIGEN_ORTHO_MAX: f64 = 1e-10;

/// Gram eigenvalues below this are clamped to zero when taking square roots
/// for singular values.
pub const SINGULAR_CLAMP: f64 = 1e-12;

/// Smallest eigenvalue accepted by the symmetric inverse square root; at or
/// below this the matrix is treated as singular.
pub const POS_DEF_MIN_EIG: f64 = 1e-12;

/// `R * M * R = I` accuracy of the inverse square root, max entry.
pub const INV_SQRT_RESIDUAL_MAX: f64 = 1e-8;

/// Least-squares rank test: smallest over largest `|R_ii|` of the QR factor.
pub const RANK_REL_TOL: f64 = 1e-10;

/// Least-squares residual orthogonality, relative to `norm(b)`.
pub const LSQ_ORTHO_REL: f64 = 1e-8;

/// Column norms at or below this count as zero columns (coherence, pursuit).
pub const ZERO_COLUMN_TOL: f64 = 1e-14;

/// Early-stop threshold for greedy pursuit, relative to `norm(y)`.
pub const PURSUIT_RESIDUAL_REL: f64 = 1e-10;

/// Relative slack applied to theorem inequalities so eigensolver round-off
/// cannot flip a true statement to false.
pub const THEOREM_SLACK_REL: f64 = 1e-10;

/// Slack for exact algebraic identities checked in floating point
/// (folding-factor routes, the eta2 proof identity, model identities).
pub const IDENTITY_REL: f64 = 1e-12;

/// Whitening exactness for orthobasis concatenations, max entry of `B - A`.
pub const ORTHOBASIS_WHITEN_MAX: f64 = 1e-8;

/// `A A^T - (p/n) I` for orthobasis concatenations, spectral norm.
pub const ORTHOBASIS_GRAM_TOL: f64 = 1e-10;

/// Relative Frobenius tolerance for Monte Carlo covariance estimates at
/// 1e5 draws.
pub const MC_COVARIANCE_REL: f64 = 0.05;

/// Default ceiling on the number of column subsets enumerated by the
/// brute-force RIP certifier.
pub const DEFAULT_SUBSET_CAP: u64 = 2_000_000;

/// Per-subset sandwich verification is enabled by default up to this many
/// subsets; beyond it only the aggregate RIP bounds are checked.
pub const SANDWICH_AUTO_CAP: u64 = 1_000_000;
