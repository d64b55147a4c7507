//! Truncated-normal price-map kernel.
//!
//! The disclosed interval turns the market price into the mean of a normal
//! distribution truncated to that interval. This module evaluates the
//! truncated mean `j`, its derivative `h` (truncated variance over the noise
//! variance), the partial derivatives of `j` in each interval endpoint, and
//! the inverse of `j` in its first argument.
//!
//! Evaluation is split into three regimes so every quantity keeps close to
//! full relative precision all the way into deep tails:
//!
//! * general: one-sided `erfc` differences (CDF side below the interval
//!   midpoint, survival side above) plus an `expm1` form of the density
//!   difference;
//! * narrow intervals: tilted Gauss-Legendre quadrature about the midpoint,
//!   which avoids the catastrophic cancellation of the textbook variance
//!   formula when the interval is much shorter than the noise scale;
//! * deep tail (both standardized endpoints beyond a switch, default 8):
//!   a tilted-exponential series with incomplete-gamma corrections. This is
//!   the Mills-ratio asymptotic expansion generalized to two-sided
//!   truncation, and it keeps the distance of the mean from the nearer bound
//!   accurate at standardized distances of 1e8 and beyond.

use crate::defaults;
use crate::error::{ensure_finite, Error, Result};
use crate::normal;
use serde::{Deserialize, Serialize};

/// Disclosed interval for the asset's future value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub v_lo: f64,
    pub v_hi: f64,
}

impl Range {
    /// Validates `v_hi > v_lo` with both finite.
    pub fn new(v_lo: f64, v_hi: f64) -> Result<Self> {
        ensure_finite("v_lo", v_lo)?;
        ensure_finite("v_hi", v_hi)?;
        if v_hi <= v_lo {
            return Err(Error::InvalidParameter {
                name: "v_hi",
                value: v_hi,
                reason: "upper bound must exceed lower bound",
            });
        }
        Ok(Self { v_lo, v_hi })
    }

    /// Interval length.
    #[inline]
    pub fn length(&self) -> f64 {
        self.v_hi - self.v_lo
    }

    /// Interval midpoint.
    #[inline]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.v_lo + self.v_hi)
    }

    /// Interval translated by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            v_lo: self.v_lo + c,
            v_hi: self.v_hi + c,
        }
    }

    /// Interval with the same midpoint and the given length.
    pub fn with_length(midpoint: f64, length: f64) -> Result<Self> {
        Self::new(midpoint - 0.5 * length, midpoint + 0.5 * length)
    }

    #[inline]
    pub fn contains_open(&self, x: f64) -> bool {
        self.v_lo < x && x < self.v_hi
    }
}

/// Standard deviation of the signal error, carried with its square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseScale {
    sigma: f64,
    sigma2: f64,
}

impl NoiseScale {
    /// From the standard deviation.
    pub fn from_std(sigma: f64) -> Result<Self> {
        ensure_finite("sigma_eps", sigma)?;
        if sigma <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "sigma_eps",
                value: sigma,
                reason: "must be positive",
            });
        }
        Ok(Self {
            sigma,
            sigma2: sigma * sigma,
        })
    }

    /// From the variance.
    pub fn from_variance(sigma2: f64) -> Result<Self> {
        ensure_finite("sigma_eps2", sigma2)?;
        if sigma2 <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "sigma_eps2",
                value: sigma2,
                reason: "must be positive",
            });
        }
        Ok(Self {
            sigma: sigma2.sqrt(),
            sigma2,
        })
    }

    #[inline]
    pub fn std(&self) -> f64 {
        self.sigma
    }

    #[inline]
    pub fn variance(&self) -> f64 {
        self.sigma2
    }
}

/// Tunable kernel thresholds. `Default` mirrors the [`defaults`] table.
#[derive(Debug, Clone, Copy)]
pub struct KernelOpts {
    /// Standardized distance at which tail-series evaluation takes over.
    pub tail_switch: f64,
    /// Standardized width below which the narrow-interval quadrature is used.
    pub narrow_width: f64,
    /// Residual tolerance for `invert_j`.
    pub invert_tol: f64,
    /// Iteration cap for `invert_j`.
    pub invert_max_iter: usize,
}

impl Default for KernelOpts {
    fn default() -> Self {
        Self {
            tail_switch: defaults::TAIL_SWITCH_SIGMAS,
            narrow_width: defaults::NARROW_WIDTH_SIGMAS,
            invert_tol: defaults::INVERT_RESIDUAL_TOL,
            invert_max_iter: defaults::INVERT_MAX_ITER,
        }
    }
}

/// Which endpoint the truncated mass is piled against in the tail regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NearSide {
    Hi,
    Lo,
}

/// Moments of the standard normal truncated to a standardized interval.
#[derive(Debug, Clone, Copy)]
struct StdMoments {
    /// Truncated mean.
    mean: f64,
    /// Truncated variance.
    var: f64,
    /// `hi - mean`, full relative precision in every regime.
    gap_hi: f64,
    /// `mean - lo`, full relative precision in every regime.
    gap_lo: f64,
    /// Log of the truncated mass.
    ln_z: f64,
    /// Set when the tail series was used; names the mass-bearing endpoint.
    near: Option<NearSide>,
}

/// 16-point Gauss-Legendre rule on [-1, 1].
const GL16: [(f64, f64); 16] = [
    (-0.989_400_934_991_649_9, 0.027_152_459_411_754_095),
    (-0.944_575_023_073_232_6, 0.062_253_523_938_647_89),
    (-0.865_631_202_387_831_8, 0.095_158_511_682_492_78),
    (-0.755_404_408_355_003_0, 0.124_628_971_255_533_87),
    (-0.617_876_244_402_643_8, 0.149_595_988_816_576_73),
    (-0.458_016_777_657_227_37, 0.169_156_519_395_002_54),
    (-0.281_603_550_779_258_9, 0.182_603_415_044_923_58),
    (-0.095_012_509_837_637_44, 0.189_450_610_455_068_5),
    (0.095_012_509_837_637_44, 0.189_450_610_455_068_5),
    (0.281_603_550_779_258_9, 0.182_603_415_044_923_58),
    (0.458_016_777_657_227_37, 0.169_156_519_395_002_54),
    (0.617_876_244_402_643_8, 0.149_595_988_816_576_73),
    (0.755_404_408_355_003_0, 0.124_628_971_255_533_87),
    (0.865_631_202_387_831_8, 0.095_158_511_682_492_78),
    (0.944_575_023_073_232_6, 0.062_253_523_938_647_89),
    (0.989_400_934_991_649_9, 0.027_152_459_411_754_095),
];

/// Series order for the tilted tail expansion; moments need `G` up to 2 + 2*(KMAX-1).
const SERIES_KMAX: usize = 40;
const G_LEN: usize = 2 + 2 * SERIES_KMAX + 1;

/// `G[n] = P(Poisson(lambda) >= n + 1)`, the normalized lower incomplete
/// gamma `gamma(n+1, lambda) / n!`. For `lambda > 700` every entry we use is
/// 1 to beyond machine precision.
fn poisson_tail_factors(lambda: f64) -> Option<[f64; G_LEN]> {
    if lambda > 700.0 {
        return None;
    }
    let mut g = [0.0f64; G_LEN];
    // head probabilities accumulate to C_n; G_n = 1 - C_n. The complement
    // loses relative precision only where the corresponding series term is
    // itself negligible relative to the leading one.
    let mut t = (-lambda).exp();
    let mut head = t;
    g[0] = -(-lambda).exp_m1(); // 1 - e^-lambda without cancellation
    for (n, slot) in g.iter_mut().enumerate().skip(1) {
        t *= lambda / n as f64;
        head += t;
        *slot = (1.0 - head).max(0.0);
    }
    Some(g)
}

/// `I_k = \int_0^c s^k exp(-w s - s^2/2) ds` for `k = 0, 1, 2`, via the
/// expansion of `exp(-s^2/2)` with incomplete-gamma factors. Requires
/// `w >= tail_switch`.
fn tilted_integrals(w: f64, c: f64) -> [f64; 3] {
    let lambda = w * c;
    let g = poisson_tail_factors(lambda);
    let gfac = |n: usize| -> f64 {
        match &g {
            Some(table) => table[n],
            None => 1.0,
        }
    };
    let w2 = w * w;
    let mut out = [0.0f64; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        // term_j = (-1)^j (k + 2j)! / (2^j j! w^{k+2j+1}), times G_{k+2j}
        let mut term = 1.0 / w;
        for i in 1..=k {
            term *= i as f64 / w;
        }
        let mut sum = term * gfac(k);
        let mut prev = sum.abs();
        for j in 1..SERIES_KMAX {
            let n = k + 2 * j;
            term *= -((n - 1) as f64) * (n as f64) / (2.0 * j as f64 * w2);
            let t = term * gfac(n);
            if t.abs() >= prev {
                break; // asymptotic divergence onset: stop at the smallest term
            }
            sum += t;
            prev = t.abs();
            if t.abs() <= f64::EPSILON * 0.25 * sum.abs() {
                break;
            }
        }
        *slot = sum;
    }
    out
}

/// Core moment computation assuming `lo + hi <= 0` (mass side resolved).
fn std_moments_low(lo: f64, hi: f64, opts: &KernelOpts) -> StdMoments {
    let c = hi - lo;
    if hi <= -opts.tail_switch {
        // deep tail: substitute s = y - w for y = -x in [w, q]
        let w = -hi;
        let [i0, i1, i2] = tilted_integrals(w, c);
        let gap = i1 / i0;
        let var = i2 / i0 - gap * gap;
        return StdMoments {
            mean: hi - gap,
            var,
            gap_hi: gap,
            gap_lo: c - gap,
            ln_z: normal::LN_SQRT_2PI.mul_add(-1.0, -0.5 * w * w) + i0.ln(),
            near: Some(NearSide::Hi),
        };
    }
    let xm = 0.5 * (lo + hi);
    if c <= opts.narrow_width {
        // tilted Gauss-Legendre about the midpoint
        let half = 0.5 * c;
        let (mut s0, mut s1, mut s2) = (0.0f64, 0.0f64, 0.0f64);
        for (node, weight) in GL16 {
            let u = half * node;
            let g = weight * (-xm * u - 0.5 * u * u).exp();
            s0 += g;
            s1 += g * u;
            s2 += g * u * u;
        }
        let off = s1 / s0;
        let var = s2 / s0 - off * off;
        return StdMoments {
            mean: xm + off,
            var,
            gap_hi: half - off,
            gap_lo: half + off,
            ln_z: -0.5 * xm * xm - normal::LN_SQRT_2PI + (half * s0).ln(),
            near: None,
        };
    }
    // general regime: the CDF side is the small side since xm <= 0
    let z = normal::cdf(hi) - normal::cdf(lo);
    // pdf(lo) - pdf(hi) = pdf(hi) * expm1((hi - lo)(hi + lo) / 2), arg <= 0
    let num = normal::pdf(hi) * (0.5 * c * (hi + lo)).exp_m1();
    let mean = num / z;
    let var = 1.0 + (lo * normal::pdf(lo) - hi * normal::pdf(hi)) / z - mean * mean;
    StdMoments {
        mean,
        var,
        gap_hi: hi - mean,
        gap_lo: mean - lo,
        ln_z: z.ln(),
        near: None,
    }
}

/// Moments of the standard normal truncated to `[lo, hi]`.
fn std_moments(lo: f64, hi: f64, opts: &KernelOpts) -> StdMoments {
    if lo + hi > 0.0 {
        let r = std_moments_low(-hi, -lo, opts);
        StdMoments {
            mean: -r.mean,
            var: r.var,
            gap_hi: r.gap_lo,
            gap_lo: r.gap_hi,
            ln_z: r.ln_z,
            near: r.near.map(|s| match s {
                NearSide::Hi => NearSide::Lo,
                NearSide::Lo => NearSide::Hi,
            }),
        }
    } else {
        std_moments_low(lo, hi, opts)
    }
}

fn validate_inputs(range: Range, noise: NoiseScale, t: f64) -> Result<()> {
    ensure_finite("t", t)?;
    let min_length = defaults::DEGENERATE_RANGE_FACTOR * noise.std();
    if range.length() < min_length {
        return Err(Error::DegenerateRange {
            v_lo: range.v_lo,
            v_hi: range.v_hi,
            min_length,
        });
    }
    Ok(())
}

#[inline]
fn standardize(range: Range, noise: NoiseScale, t: f64) -> (f64, f64) {
    let inv = 1.0 / noise.std();
    ((range.v_lo - t) * inv, (range.v_hi - t) * inv)
}

/// Mean of a normal `N(t, sigma_eps^2)` truncated to the interval.
///
/// Strictly inside `(v_lo, v_hi)` for every finite `t`; increasing in `t`;
/// approaches the nearer bound at distance `sigma_eps^2 / d` as the
/// standardized distance `d` grows.
pub fn eval_j(range: Range, noise: NoiseScale, t: f64) -> Result<f64> {
    eval_j_with(range, noise, t, &KernelOpts::default())
}

/// [`eval_j`] with explicit options.
pub fn eval_j_with(range: Range, noise: NoiseScale, t: f64, opts: &KernelOpts) -> Result<f64> {
    validate_inputs(range, noise, t)?;
    let (lo, hi) = standardize(range, noise, t);
    let m = std_moments(lo, hi, opts);
    Ok(match m.near {
        // anchor at the mass-bearing bound so the residual keeps relative precision
        Some(NearSide::Hi) => range.v_hi - noise.std() * m.gap_hi,
        Some(NearSide::Lo) => range.v_lo + noise.std() * m.gap_lo,
        None => t + noise.std() * m.mean,
    })
}

/// Variance of the truncated normal divided by `sigma_eps^2`; equals the
/// derivative of [`eval_j`] in `t`. Strictly inside `(0, 1)`.
pub fn eval_h(range: Range, noise: NoiseScale, t: f64) -> Result<f64> {
    eval_h_with(range, noise, t, &KernelOpts::default())
}

/// [`eval_h`] with explicit options.
pub fn eval_h_with(range: Range, noise: NoiseScale, t: f64, opts: &KernelOpts) -> Result<f64> {
    validate_inputs(range, noise, t)?;
    let (lo, hi) = standardize(range, noise, t);
    Ok(std_moments(lo, hi, opts).var)
}

/// Partial derivative of [`eval_j`] in the upper bound; always positive.
pub fn dj_dupper(range: Range, noise: NoiseScale, t: f64) -> Result<f64> {
    dj_dupper_with(range, noise, t, &KernelOpts::default())
}

/// [`dj_dupper`] with explicit options.
pub fn dj_dupper_with(range: Range, noise: NoiseScale, t: f64, opts: &KernelOpts) -> Result<f64> {
    validate_inputs(range, noise, t)?;
    let (lo, hi) = standardize(range, noise, t);
    let m = std_moments(lo, hi, opts);
    Ok((-0.5 * hi * hi - normal::LN_SQRT_2PI - m.ln_z).exp() * m.gap_hi)
}

/// Partial derivative of [`eval_j`] in the lower bound; always positive.
pub fn dj_dlower(range: Range, noise: NoiseScale, t: f64) -> Result<f64> {
    dj_dlower_with(range, noise, t, &KernelOpts::default())
}

/// [`dj_dlower`] with explicit options.
pub fn dj_dlower_with(range: Range, noise: NoiseScale, t: f64, opts: &KernelOpts) -> Result<f64> {
    validate_inputs(range, noise, t)?;
    let (lo, hi) = standardize(range, noise, t);
    let m = std_moments(lo, hi, opts);
    Ok((-0.5 * lo * lo - normal::LN_SQRT_2PI - m.ln_z).exp() * m.gap_lo)
}

/// Log of the probability that `N(t, sigma_eps^2)` lands in the interval.
pub fn ln_truncated_mass(range: Range, noise: NoiseScale, t: f64) -> Result<f64> {
    ln_truncated_mass_with(range, noise, t, &KernelOpts::default())
}

/// [`ln_truncated_mass`] with explicit options.
pub fn ln_truncated_mass_with(
    range: Range,
    noise: NoiseScale,
    t: f64,
    opts: &KernelOpts,
) -> Result<f64> {
    validate_inputs(range, noise, t)?;
    let (lo, hi) = standardize(range, noise, t);
    Ok(std_moments(lo, hi, opts).ln_z)
}

/// Inverse of [`eval_j`] in `t`: returns `t` with `|eval_j(t) - p| <= tol`.
///
/// Safeguarded Newton (slope [`eval_h`]) inside an expanding bracket around
/// the midpoint, with bisection whenever a Newton step leaves the bracket.
pub fn invert_j(range: Range, noise: NoiseScale, p: f64) -> Result<f64> {
    invert_j_with(range, noise, p, &KernelOpts::default())
}

/// [`invert_j`] with explicit options.
pub fn invert_j_with(range: Range, noise: NoiseScale, p: f64, opts: &KernelOpts) -> Result<f64> {
    validate_inputs(range, noise, range.midpoint())?;
    ensure_finite("p", p)?;
    if !range.contains_open(p) {
        return Err(Error::OutOfImage {
            value: p,
            v_lo: range.v_lo,
            v_hi: range.v_hi,
        });
    }

    let j = |t: f64| eval_j_with(range, noise, t, opts).expect("validated inputs");
    let h = |t: f64| eval_h_with(range, noise, t, opts).expect("validated inputs");

    // expanding bracket around the midpoint; j is strictly increasing
    let mid = range.midpoint();
    let mut step = noise.std().max(range.length());
    let (mut t_lo, mut t_hi);
    if j(mid) < p {
        t_lo = mid;
        t_hi = mid + step;
        while j(t_hi) < p {
            t_lo = t_hi;
            step *= 2.0;
            t_hi += step;
            if !t_hi.is_finite() {
                return Err(Error::NoConvergence {
                    iterations: 0,
                    residual: f64::INFINITY,
                });
            }
        }
    } else {
        t_hi = mid;
        t_lo = mid - step;
        while j(t_lo) > p {
            t_hi = t_lo;
            step *= 2.0;
            t_lo -= step;
            if !t_lo.is_finite() {
                return Err(Error::NoConvergence {
                    iterations: 0,
                    residual: f64::INFINITY,
                });
            }
        }
    }

    let mut t = 0.5 * (t_lo + t_hi);
    let mut best_t = t;
    let mut best_residual = f64::INFINITY;
    let mut polish = 0u8;
    for iter in 0..opts.invert_max_iter {
        let f = j(t) - p;
        let residual = f.abs();
        if residual < best_residual {
            best_residual = residual;
            best_t = t;
        }
        if residual == 0.0 {
            return Ok(t);
        }
        if residual <= opts.invert_tol {
            // quadratic polish pushes the abscissa error to the rounding floor
            if polish >= 3 {
                return Ok(best_t);
            }
            polish += 1;
        }
        if f > 0.0 {
            t_hi = t;
        } else {
            t_lo = t;
        }
        let slope = h(t);
        let newton = t - f / slope;
        t = if slope > 0.0 && newton > t_lo && newton < t_hi {
            newton
        } else {
            0.5 * (t_lo + t_hi)
        };
        if t_hi - t_lo <= f64::EPSILON * (1.0 + t.abs()) {
            if best_residual <= opts.invert_tol {
                return Ok(best_t);
            }
            return Err(Error::NoConvergence {
                iterations: iter,
                residual: best_residual,
            });
        }
    }
    if best_residual <= opts.invert_tol {
        return Ok(best_t);
    }
    Err(Error::NoConvergence {
        iterations: opts.invert_max_iter,
        residual: best_residual,
    })
}
