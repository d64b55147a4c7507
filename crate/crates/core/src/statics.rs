//! Comparative statics of the equilibrium price and market liquidity.
//!
//! Sensitivities of the price to the private signal and to each disclosed
//! bound, the response to a rigid movement of the interval, liquidity with
//! and without disclosure, and numerical probes of the far-distance and
//! roughness limits.

use crate::defaults;
use crate::equilibrium::{EquilibriumCoefficients, MarketState};
use crate::error::Result;
use crate::kernel::{self, NoiseScale, Range};
use crate::probe::{limit_probe, ConvergenceReport, ProbeTarget};
use serde::Serialize;

/// Distances between the signal/volume mix `tau u + alpha y` and the
/// disclosed interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Distances {
    /// Zero inside the interval, otherwise distance to the nearer bound.
    pub d: f64,
    /// `|v_hi - x_hat|`.
    pub d_upper: f64,
    /// `|x_hat - v_lo|`.
    pub d_lower: f64,
}

impl Distances {
    /// Distances from the intercept-free mix `x_hat = tau u + alpha y`.
    pub fn from_x_hat(range: Range, x_hat: f64) -> Self {
        let d = if x_hat < range.v_lo {
            range.v_lo - x_hat
        } else if x_hat > range.v_hi {
            x_hat - range.v_hi
        } else {
            0.0
        };
        Self {
            d,
            d_upper: (range.v_hi - x_hat).abs(),
            d_lower: (x_hat - range.v_lo).abs(),
        }
    }
}

/// Which of the two information channels moves the price more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DominantDriver {
    /// A unit change in the private signal moves the price more than a unit
    /// movement of the interval.
    SignalDominates,
    /// A unit movement of the interval moves the price more.
    RangeDominates,
    /// The two responses are equal within tolerance.
    Tie,
}

/// Price sensitivity to the private signal without disclosure: the constant
/// signal loading, strictly inside (0, 1).
#[inline]
pub fn sensitivity_to_signal_baseline(coef: &EquilibriumCoefficients) -> f64 {
    coef.tau
}

/// Price sensitivity to the private signal with disclosure:
/// `tau * h(index)`, strictly inside `(0, tau)`.
pub fn sensitivity_to_signal_range(
    coef: &EquilibriumCoefficients,
    range: Range,
    noise: NoiseScale,
    state: MarketState,
) -> Result<f64> {
    Ok(coef.tau * kernel::eval_h(range, noise, coef.linear_index(state))?)
}

/// Price sensitivity to the disclosed upper bound; always positive.
pub fn sensitivity_to_upper(
    coef: &EquilibriumCoefficients,
    range: Range,
    noise: NoiseScale,
    state: MarketState,
) -> Result<f64> {
    kernel::dj_dupper(range, noise, coef.linear_index(state))
}

/// Price sensitivity to the disclosed lower bound; always positive.
pub fn sensitivity_to_lower(
    coef: &EquilibriumCoefficients,
    range: Range,
    noise: NoiseScale,
    state: MarketState,
) -> Result<f64> {
    kernel::dj_dlower(range, noise, coef.linear_index(state))
}

/// Price response to a rigid unit movement of the interval:
/// `1 - h(index)`, strictly inside (0, 1).
pub fn sensitivity_to_range_move(
    coef: &EquilibriumCoefficients,
    range: Range,
    noise: NoiseScale,
    state: MarketState,
) -> Result<f64> {
    Ok(1.0 - kernel::eval_h(range, noise, coef.linear_index(state))?)
}

/// Market liquidity without disclosure: inverse price impact of noise
/// trading, `1 / alpha`.
#[inline]
pub fn liquidity_baseline(coef: &EquilibriumCoefficients) -> f64 {
    1.0 / coef.alpha
}

/// Market liquidity with disclosure: `1 / (alpha * h(index))`; always above
/// the baseline.
pub fn liquidity_range(
    coef: &EquilibriumCoefficients,
    range: Range,
    noise: NoiseScale,
    state: MarketState,
) -> Result<f64> {
    Ok(1.0 / (coef.alpha * kernel::eval_h(range, noise, coef.linear_index(state))?))
}

/// Compares the signal response with the interval-movement response: the
/// signal dominates when `h(index) > 1 / (1 + tau)`.
pub fn classify_dominant_driver(
    coef: &EquilibriumCoefficients,
    range: Range,
    noise: NoiseScale,
    state: MarketState,
) -> Result<DominantDriver> {
    let h = kernel::eval_h(range, noise, coef.linear_index(state))?;
    let threshold = 1.0 / (1.0 + coef.tau);
    Ok(if (h - threshold).abs() <= defaults::DRIVER_TIE_TOL {
        DominantDriver::Tie
    } else if h < threshold {
        DominantDriver::RangeDominates
    } else {
        DominantDriver::SignalDominates
    })
}

/// State whose linear index equals `x` (zero noise volume).
pub fn state_with_index(coef: &EquilibriumCoefficients, x: f64) -> MarketState {
    MarketState {
        u_tilde: (x - coef.beta) / coef.tau,
        y_tilde: 0.0,
    }
}

fn interval_at_distance(anchor: f64, distance: f64, length: f64, above: bool) -> Range {
    if above {
        Range::new(anchor + distance, anchor + distance + length)
    } else {
        Range::new(anchor - distance - length, anchor - distance)
    }
    .expect("positive length")
}

/// Distance probe for the signal sensitivity: as the interval recedes from
/// the price-map argument the sensitivity falls to zero at rate
/// `(sigma / d)^2`.
///
/// Distances are measured in noise standard deviations between the map
/// argument and the nearer bound; the state-based definition differs only by
/// the constant intercept, so the limit is the same.
pub fn probe_signal_sensitivity_vs_distance(
    coef: &EquilibriumCoefficients,
    noise: NoiseScale,
    length_sigmas: f64,
    distances_sigmas: &[f64],
    tolerance: f64,
) -> ConvergenceReport {
    let x = coef.b0;
    let sd = noise.std();
    let state = state_with_index(coef, x);
    limit_probe(
        "signal sensitivity vs distance",
        distances_sigmas,
        |d| {
            let range = interval_at_distance(x, d * sd, length_sigmas * sd, true);
            sensitivity_to_signal_range(coef, range, noise, state).expect("valid geometry")
        },
        ProbeTarget::Finite(0.0),
        tolerance,
    )
}

/// Roughness probe for the signal sensitivity: widening the interval around
/// the map argument restores the no-disclosure loading.
pub fn probe_signal_sensitivity_vs_width(
    coef: &EquilibriumCoefficients,
    noise: NoiseScale,
    half_widths_sigmas: &[f64],
    tolerance: f64,
) -> ConvergenceReport {
    let x = coef.b0;
    let sd = noise.std();
    let state = state_with_index(coef, x);
    limit_probe(
        "signal sensitivity vs width",
        half_widths_sigmas,
        |w| {
            let range = Range::with_length(x, 2.0 * w * sd).expect("positive width");
            sensitivity_to_signal_range(coef, range, noise, state).expect("valid geometry")
        },
        ProbeTarget::Finite(coef.tau),
        tolerance,
    )
}

/// Distance probe for the interval-movement sensitivity: far from the map
/// argument a rigid interval movement passes one-for-one into the price.
pub fn probe_range_move_vs_distance(
    coef: &EquilibriumCoefficients,
    noise: NoiseScale,
    length_sigmas: f64,
    distances_sigmas: &[f64],
    tolerance: f64,
) -> ConvergenceReport {
    let x = coef.b0;
    let sd = noise.std();
    let state = state_with_index(coef, x);
    limit_probe(
        "range-move sensitivity vs distance",
        distances_sigmas,
        |d| {
            let range = interval_at_distance(x, d * sd, length_sigmas * sd, true);
            sensitivity_to_range_move(coef, range, noise, state).expect("valid geometry")
        },
        ProbeTarget::Finite(1.0),
        tolerance,
    )
}

/// Roughness probe for the interval-movement sensitivity: a very rough
/// interval barely moves the price when shifted.
pub fn probe_range_move_vs_width(
    coef: &EquilibriumCoefficients,
    noise: NoiseScale,
    half_widths_sigmas: &[f64],
    tolerance: f64,
) -> ConvergenceReport {
    let x = coef.b0;
    let sd = noise.std();
    let state = state_with_index(coef, x);
    limit_probe(
        "range-move sensitivity vs width",
        half_widths_sigmas,
        |w| {
            let range = Range::with_length(x, 2.0 * w * sd).expect("positive width");
            sensitivity_to_range_move(coef, range, noise, state).expect("valid geometry")
        },
        ProbeTarget::Finite(0.0),
        tolerance,
    )
}

/// Distance probe for the upper-bound sensitivity: pushing the upper bound
/// far above the map argument kills its price impact at Gaussian rate.
pub fn probe_upper_sensitivity_vs_distance(
    coef: &EquilibriumCoefficients,
    noise: NoiseScale,
    distances_sigmas: &[f64],
    tolerance: f64,
) -> ConvergenceReport {
    let x = coef.b0;
    let sd = noise.std();
    let state = state_with_index(coef, x);
    limit_probe(
        "upper-bound sensitivity vs distance",
        distances_sigmas,
        |d| {
            let range = Range::new(x - 2.0 * sd, x + d * sd).expect("ordered bounds");
            sensitivity_to_upper(coef, range, noise, state).expect("valid geometry")
        },
        ProbeTarget::Finite(0.0),
        tolerance,
    )
}

/// Distance probe for the lower-bound sensitivity, mirror case.
pub fn probe_lower_sensitivity_vs_distance(
    coef: &EquilibriumCoefficients,
    noise: NoiseScale,
    distances_sigmas: &[f64],
    tolerance: f64,
) -> ConvergenceReport {
    let x = coef.b0;
    let sd = noise.std();
    let state = state_with_index(coef, x);
    limit_probe(
        "lower-bound sensitivity vs distance",
        distances_sigmas,
        |d| {
            let range = Range::new(x - d * sd, x + 2.0 * sd).expect("ordered bounds");
            sensitivity_to_lower(coef, range, noise, state).expect("valid geometry")
        },
        ProbeTarget::Finite(0.0),
        tolerance,
    )
}

/// Distance probe for liquidity: the market depth diverges as the interval
/// recedes from the map argument.
pub fn probe_liquidity_vs_distance(
    coef: &EquilibriumCoefficients,
    noise: NoiseScale,
    length_sigmas: f64,
    distances_sigmas: &[f64],
    tolerance: f64,
) -> ConvergenceReport {
    let x = coef.b0;
    let sd = noise.std();
    let state = state_with_index(coef, x);
    limit_probe(
        "liquidity vs distance",
        distances_sigmas,
        |d| {
            let range = interval_at_distance(x, d * sd, length_sigmas * sd, true);
            liquidity_range(coef, range, noise, state).expect("valid geometry")
        },
        ProbeTarget::Infinite,
        tolerance,
    )
}

/// Default distance ladder for quantities decaying like `1/d^2`
/// (signal-sensitivity and interval-movement probes).
pub fn slow_decay_distances() -> Vec<f64> {
    (0..=11).map(|k| 5.0 * 2.0f64.powi(k)).collect()
}

/// Default distance ladder for quantities decaying at Gaussian rate
/// (endpoint-sensitivity probes); capped so values stay representable.
pub fn fast_decay_distances() -> Vec<f64> {
    vec![3.0, 5.0, 8.0, 12.0, 17.0, 23.0, 30.0, 36.0]
}

/// Default half-width ladder for roughness probes; capped so `1 - h` stays
/// above the f64 representability floor.
pub fn roughness_half_widths() -> Vec<f64> {
    vec![2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{price_with_range, solve_coefficients, MarketParams};

    fn setup() -> (MarketParams, EquilibriumCoefficients, Range, NoiseScale) {
        let params = MarketParams::default();
        let coef = solve_coefficients(&params).unwrap();
        (
            params,
            coef,
            Range::new(22.0, 28.0).unwrap(),
            NoiseScale::from_variance(1.0).unwrap(),
        )
    }

    #[test]
    fn canonical_sensitivities() {
        let (_, coef, range, noise) = setup();
        assert!((sensitivity_to_signal_baseline(&coef) - 0.824_629_773_967).abs() < 1e-10);
        let state = state_with_index(&coef, 25.0);
        let s = sensitivity_to_signal_range(&coef, range, noise, state).unwrap();
        // tau times the interval-center slope, frozen from the reference
        assert!((s - 0.802_642_608_178).abs() < 1e-9, "{s}");
        assert!(s < coef.tau);
        let liq0 = liquidity_baseline(&coef);
        assert!((liq0 - 0.161_688_720_857).abs() < 1e-10);
        let liq1 = liquidity_range(&coef, range, noise, state).unwrap();
        assert!(liq1 > liq0);
    }

    #[test]
    fn response_partition_identity() {
        // signal response over tau plus interval response is exactly one
        let (_, coef, range, noise) = setup();
        for x in [22.5, 25.0, 27.9, 31.0, 14.0] {
            let state = state_with_index(&coef, x);
            let u1 = sensitivity_to_signal_range(&coef, range, noise, state).unwrap();
            let rr = sensitivity_to_range_move(&coef, range, noise, state).unwrap();
            assert!((u1 / coef.tau + rr - 1.0).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn sensitivities_match_finite_differences() {
        let (_, coef, range, noise) = setup();
        let h_step = defaults::FD_STEP_SCALE;
        for x in [23.0, 25.0, 27.0, 30.0] {
            let state = state_with_index(&coef, x);
            // signal: perturb u directly
            let s = sensitivity_to_signal_range(&coef, range, noise, state).unwrap();
            let du = h_step / coef.tau;
            let up = MarketState {
                u_tilde: state.u_tilde + du,
                ..state
            };
            let dn = MarketState {
                u_tilde: state.u_tilde - du,
                ..state
            };
            let fd = (price_with_range(&coef, range, noise, up).unwrap()
                - price_with_range(&coef, range, noise, dn).unwrap())
                / (2.0 * du);
            assert!((fd / s - 1.0).abs() < 1e-6, "signal at x={x}: fd={fd} s={s}");

            // upper bound
            let su = sensitivity_to_upper(&coef, range, noise, state).unwrap();
            let wide = Range::new(range.v_lo, range.v_hi + h_step).unwrap();
            let tight = Range::new(range.v_lo, range.v_hi - h_step).unwrap();
            let fd = (price_with_range(&coef, wide, noise, state).unwrap()
                - price_with_range(&coef, tight, noise, state).unwrap())
                / (2.0 * h_step);
            assert!((fd / su - 1.0).abs() < 1e-6, "upper at x={x}");

            // lower bound
            let sl = sensitivity_to_lower(&coef, range, noise, state).unwrap();
            let wide = Range::new(range.v_lo - h_step, range.v_hi).unwrap();
            let tight = Range::new(range.v_lo + h_step, range.v_hi).unwrap();
            let fd = (price_with_range(&coef, tight, noise, state).unwrap()
                - price_with_range(&coef, wide, noise, state).unwrap())
                / (2.0 * h_step);
            assert!((fd / sl - 1.0).abs() < 1e-6, "lower at x={x}");

            // rigid movement: shift both bounds together
            let rr = sensitivity_to_range_move(&coef, range, noise, state).unwrap();
            let fd = (price_with_range(&coef, range.shifted(h_step), noise, state).unwrap()
                - price_with_range(&coef, range.shifted(-h_step), noise, state).unwrap())
                / (2.0 * h_step);
            assert!((fd / rr - 1.0).abs() < 1e-6, "move at x={x}");
        }
    }

    #[test]
    fn symmetric_geometry_equalizes_bound_sensitivities() {
        let (_, coef, range, noise) = setup();
        let state = state_with_index(&coef, 25.0);
        let su = sensitivity_to_upper(&coef, range, noise, state).unwrap();
        let sl = sensitivity_to_lower(&coef, range, noise, state).unwrap();
        assert!((su - sl).abs() < 1e-15);
        assert!(su > 0.0);
    }

    #[test]
    fn distant_upper_bound_sensitivity_vanishes() {
        let (_, coef, _, noise) = setup();
        let state = state_with_index(&coef, 25.0);
        let range = Range::new(23.0, 25.0 + 50.0 * noise.std()).unwrap();
        let su = sensitivity_to_upper(&coef, range, noise, state).unwrap();
        assert!(su < 1e-10, "{su:e}");
    }

    #[test]
    fn driver_classification() {
        let (_, coef, range, noise) = setup();
        // far interval: movement dominates
        let far = state_with_index(&coef, 25.0 + 50.0 * noise.std());
        assert_eq!(
            classify_dominant_driver(&coef, range, noise, far).unwrap(),
            DominantDriver::RangeDominates
        );
        // very wide interval around the argument: the signal dominates
        let wide = Range::with_length(25.0, 30.0 * noise.std()).unwrap();
        let center = state_with_index(&coef, 25.0);
        assert_eq!(
            classify_dominant_driver(&coef, wide, noise, center).unwrap(),
            DominantDriver::SignalDominates
        );
        // constructed tie: bisect the slope to the threshold
        let threshold = 1.0 / (1.0 + coef.tau);
        let (mut lo, mut hi) = (25.0, 45.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let h = kernel::eval_h(range, noise, mid).unwrap();
            if h > threshold {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tie_state = state_with_index(&coef, 0.5 * (lo + hi));
        assert_eq!(
            classify_dominant_driver(&coef, range, noise, tie_state).unwrap(),
            DominantDriver::Tie
        );
    }

    #[test]
    fn distance_probes_pass() {
        let (_, coef, _, noise) = setup();
        let slow = slow_decay_distances();
        let r = probe_signal_sensitivity_vs_distance(&coef, noise, 6.0, &slow, 1e-6);
        assert!(r.passed(), "{r:?}");
        let r = probe_range_move_vs_distance(&coef, noise, 6.0, &slow, 1e-6);
        assert!(r.passed(), "{r:?}");
        let fast = fast_decay_distances();
        let r = probe_upper_sensitivity_vs_distance(&coef, noise, &fast, 1e-8);
        assert!(r.passed(), "{r:?}");
        let r = probe_lower_sensitivity_vs_distance(&coef, noise, &fast, 1e-8);
        assert!(r.passed(), "{r:?}");
        let r = probe_liquidity_vs_distance(&coef, noise, 6.0, &slow, 1e-6);
        assert!(r.passed(), "{r:?}");
        // liquidity exceeds a billion once the interval is ~1e5 sigma away
        let far = probe_liquidity_vs_distance(&coef, noise, 6.0, &[1e5], 1e-9);
        assert!(far.points[0].value > 1e9, "{:?}", far.points[0]);
    }

    #[test]
    fn width_probes_pass() {
        let (_, coef, _, noise) = setup();
        let widths = roughness_half_widths();
        let r = probe_signal_sensitivity_vs_width(&coef, noise, &widths, 1e-6);
        assert!(r.passed(), "{r:?}");
        let r = probe_range_move_vs_width(&coef, noise, &widths, 1e-6);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn distances_follow_piecewise_definition() {
        let range = Range::new(10.0, 14.0).unwrap();
        let inside = Distances::from_x_hat(range, 11.0);
        assert_eq!(inside.d, 0.0);
        assert!((inside.d_upper - 3.0).abs() < 1e-15);
        assert!((inside.d_lower - 1.0).abs() < 1e-15);
        let below = Distances::from_x_hat(range, 7.0);
        assert!((below.d - 3.0).abs() < 1e-15);
        let above = Distances::from_x_hat(range, 15.5);
        assert!((above.d - 1.5).abs() < 1e-15);
    }
}
