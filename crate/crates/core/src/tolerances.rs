//! Numeric guards and quadrature parameters used across the crate.
//!
//! Every cutoff that affects a public result lives here with its rationale,
//! so changing one is a deliberate, reviewable act rather than a scattered
//! edit.

/// Rejection radius around the `s = 1` pole for [`crate::lfunc::hurwitz_zeta`],
/// [`crate::lfunc::zeta_q`], and principal-character L-values. Inside this
/// radius the undeflated value is meaningless in f64; callers that need the
/// neighborhood of the pole must use the deflated routines.
pub const POLE_GUARD_RADIUS: f64 = 1e-8;

/// `|α+β|` below which the even main term switches to the removable-
/// singularity evaluation. The generic closed form loses ~`|α+β|⁻¹`-scaled
/// digits to cancellation; at `1e-6` that is already a 1e-10 relative error,
/// while the series route is uniformly accurate.
pub const MAIN_TERM_LIMIT_SWITCH: f64 = 1e-6;

/// Largest `|α+β|` accepted by the series route of the even main term. The
/// Taylor coefficients are extracted on a radius-0.25 circle, so 1e-3 keeps
/// the truncated tail far below f64 noise.
pub const MAIN_TERM_LIMIT_DOMAIN: f64 = 1e-3;

/// Exponent `ε` used by the four-term error budget. Arbitrary but fixed, so
/// reported budgets are reproducible.
pub const ERROR_BUDGET_EPSILON: f64 = 0.05;

/// Error allowance for a single L-value evaluated by the deflated
/// Euler–Maclaurin route at desk scale (`|s − 1/2| ≤ 0.45`, `q ≲ 2000`).
/// Measured residuals against independent oracles sit below 1e-13; padded
/// an order of magnitude.
pub const L_VALUE_ERROR_BUDGET: f64 = 1e-12;

/// Polynomial weight `x^{power}` of one divisor-series period block relative
/// to the kernel's own decay: terms carry `d(n)/√n ≈ x^{-1/2} ln x` and a
/// period holds a fixed number of them, so the block envelope decays like
/// `x^{-1/2}` times a slowly growing log. `-0.4` leaves the log as headroom.
pub const TSERIES_BLOCK_POWER: f64 = -0.4;

/// Half-height `T` of the truncated vertical contour for the kernel
/// transform. Measured decay: `|K̂(1+12i, 0, 0)| ≈ 1.4e-30`, so truncating at
/// 12 contributes far below every quadrature target used here.
pub const KHAT_TRUNCATION_HEIGHT: f64 = 12.0;

/// Trapezoid step on the vertical contour. The aliasing error of the
/// trapezoid rule is the integrand's Fourier transform sampled at
/// `2π/step − |ln x|`; with the Gaussian factor `e^{-t²}` in every transform
/// here, that is `≲ e^{-u²/4+πu}` at `u = 2π/step − |ln x|`. The kernels are
/// evaluated at `|ln x| ≤ 34`, so `step = 0.02` (`u ≈ 280`) is already far
/// past the f64 noise floor while keeping contour sums 4× cheaper than the
/// `0.005` used during pilot validation (both steps agree to ~1e-13).
pub const KHAT_CONTOUR_STEP: f64 = 0.02;

/// Real part of the standard evaluation contour for kernel inversion.
pub const KERNEL_CONTOUR_SIGMA: f64 = 1.0;

/// Default absolute tolerance for the oscillatory quadrature oracle of the
/// combined kernel transform.
pub const OSC_QUAD_TOL: f64 = 1e-6;

/// Default certified-tail tolerance for the divisor-sum series
/// [`crate::moments::t_series`].
pub const TSERIES_TAIL_TOL: f64 = 1e-6;

/// Constant `c` in the log-normal decay model `e^{-c ln² x}` shared by both
/// kernel envelopes. It drives the certified-tail machinery in two ways: the
/// envelope tracker decays observed blocks at this rate through phase-node
/// dips, and the effective remaining width `W(x) = x / (4πc ln x)` converts
/// the tracked envelope into a tail bound. The saddle-point rate for both
/// kernels is `1/4`; pilot fits of the pre-asymptotic envelopes gave
/// `≈ 0.21` (divisor-series kernel) and `≈ 0.24` (pair kernel). `0.22`
/// keeps the tracker conservative for the pair kernel while staying within
/// a few percent of the divisor kernel's measured decay (crest snap-ups
/// re-anchor the tracker once per beat, so a small mismatch cannot
/// accumulate).
pub const TAIL_LOGNORMAL_C: f64 = 0.22;

/// Smallest kernel argument at which tail certification may trigger: below
/// this the kernel is still inside its oscillatory hump and three small
/// blocks in a row would not be evidence of decay.
pub const TSERIES_MIN_CERT_X: f64 = 1000.0;

/// Default kernel-argument cap for
/// [`crate::moments::divisor_component_series`]; reaching it without
/// certifying the tail is an error, never a silent truncation.
pub const TSERIES_MAX_X: f64 = 1.5e5;

/// Allowed gap between the oscillatory-series route to a divisor component
/// and its exact recovery from character moments. The series is truncated at
/// a certified 1e-6 tail, but the certification envelope is heuristic by a
/// logarithm, so the cross-route check keeps two orders of margin.
pub const SERIES_RECOVERY_TOL: f64 = 1e-4;

/// Imaginary parts of quantities that are real by symmetry (twisted moments,
/// parity-paired sums) must vanish to this absolute tolerance, checked at
/// runtime before the imaginary part is discarded.
pub const REALITY_TOL: f64 = 1e-9;

/// Step in `u = ln x` of the precomputed grid behind the interpolated
/// divisor-series kernel. The kernel's Fourier content in `u` dies by
/// `|t| ≈ 6`, so 0.005 oversamples by ~100x and 4-point interpolation sits
/// at the 1e-9 level.
pub const HB_GRID_STEP: f64 = 5e-3;
