//! Pass/fail thresholds for the verification experiments. The harness and the
//! acceptance suite both read them from here.

/// Counterexample phases must match their exact multiples of pi this closely.
pub const COUNTEREXAMPLE_PHASE_TOL: f64 = 1e-12;
pub const COUNTEREXAMPLE_MAX_SECS: f64 = 1.0;

/// Sequential vs composed application, pointwise max deviation.
pub const SEMIGROUP_TOL: f64 = 1e-12;
pub const SEMIGROUP_MAX_SECS: f64 = 10.0;
pub const SEMIGROUP_PAIRS: usize = 100;
pub const SEMIGROUP_FIELDS: usize = 10;
pub const SEMIGROUP_POINTS: usize = 256;

/// Hydrodynamic composition and inverse round-trip.
pub const HYDRO_GROUP_TOL: f64 = 1e-12;
pub const HYDRO_PAIRS: usize = 100;

/// Relative modulus change under any realization.
pub const MODULUS_TOL: f64 = 1e-14;
pub const MODULUS_DRAWS: usize = 100;

/// Gauge-equivalence residual study.
pub const RESIDUAL_MAX_RELATIVE: f64 = 1e-3;
pub const REFINEMENT_RATIO_MIN: f64 = 3.0;
pub const REFINEMENT_RATIO_MAX: f64 = 5.0;
pub const EQUIVALENCE_MAX_SECS: f64 = 300.0;

/// Functional spot checks on the Gaussian `exp(-x^2/2)`.
pub const FUNCTIONAL_MAX_ERR: f64 = 5e-3;
pub const FUNCTIONAL_ZERO_TOL: f64 = 1e-13;

/// Density-matrix checks.
pub const DIAGONAL_TOL: f64 = 1e-13;
pub const HERMITIAN_TOL: f64 = 1e-13;
pub const NON_HERMITIAN_MIN: f64 = 1e-6;
pub const DENSITY_DRAWS: usize = 50;

/// Convexity on the diagonal.
pub const CONVEX_DIAG_TOL: f64 = 1e-12;
pub const CONVEX_OFFDIAG_MIN: f64 = 1e-6;

/// Homogeneity of the nonlinear right-hand side.
pub const HOMOGENEITY_TOL: f64 = 1e-12;

/// Linear solver sanity.
pub const NORM_DRIFT_TOL: f64 = 1e-10;
pub const PHASE_RATE_TOL: f64 = 1e-3;
pub const WIDTH_LAW_TOL: f64 = 1e-3;
