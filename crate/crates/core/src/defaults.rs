//! Central table of numerical defaults and tolerances.
//!
//! Every tunable threshold in the crate lives here so configurations can be
//! audited in one place. All values are overridable through the option
//! structs that consume them.

/// Standardized distance beyond which truncated-moment evaluation switches
/// to the tilted asymptotic series (both interval endpoints on the same side
/// of the evaluation point).
pub const TAIL_SWITCH_SIGMAS: f64 = 8.0;

/// Standardized interval width below which truncated moments are computed by
/// tilted Gauss-Legendre quadrature about the midpoint.
pub const NARROW_WIDTH_SIGMAS: f64 = 0.25;

/// Interval lengths below `factor * sigma_eps` are rejected as degenerate.
pub const DEGENERATE_RANGE_FACTOR: f64 = 1e-9;

/// Residual tolerance `|J(t) - p|` for the price-map inversion.
pub const INVERT_RESIDUAL_TOL: f64 = 1e-10;

/// Iteration cap for the safeguarded Newton inversion.
pub const INVERT_MAX_ITER: usize = 200;

/// Relative step scale for central finite differences: `eps^(1/3)`.
pub const FD_STEP_SCALE: f64 = 6.055_454_452_393_343e-6;

/// Grid points per round for the brute-force utility maximizer.
pub const GRID_POINTS: usize = 2001;

/// Bracket-shrinking rounds for the brute-force utility maximizer.
pub const GRID_REFINE_ROUNDS: usize = 2;

/// Demand bracket half-width factor: `10 * (1 + |closed form|)`.
pub const BRACKET_HALF_WIDTH_FACTOR: f64 = 10.0;

/// Gauss-Hermite node-count default and floor.
pub const GH_NODES_DEFAULT: usize = 200;
pub const GH_NODES_MIN: usize = 20;

/// Monte Carlo sample-count default and floor.
pub const MC_SAMPLES_DEFAULT: usize = 1_000_000;
pub const MC_SAMPLES_MIN: usize = 10_000;

/// Default Monte Carlo standard-error target.
pub const MC_TARGET_SE: f64 = 1e-2;

/// Midpoint classification: |v_m - B0| within this is Neutral.
pub const NEUTRAL_MIDPOINT_TOL: f64 = 1e-9;

/// Dominant-driver classification: |H - 1/(1+tau)| within this is a Tie.
pub const DRIVER_TIE_TOL: f64 = 1e-12;

/// Default convergence target for limit probes.
pub const PROBE_TARGET: f64 = 1e-8;
