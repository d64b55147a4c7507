//! Direct conditional-utility evaluation and brute-force maximization.
//!
//! These routines recompute both trader types' objectives from their
//! definitions and maximize them by grid search, independently of the
//! closed-form demand expressions they are used to validate.

use crate::defaults;
use crate::equilibrium::{EquilibriumCoefficients, MarketParams};
use crate::error::{ensure_finite, Error, Result};
use crate::kernel::{self, NoiseScale, Range};
use serde::{Deserialize, Serialize};

/// Bracket and resolution for the grid maximizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSearchSpec {
    pub theta_min: f64,
    pub theta_max: f64,
    pub n_points: usize,
    pub refine_rounds: usize,
}

impl Default for GridSearchSpec {
    fn default() -> Self {
        Self {
            theta_min: -20.0,
            theta_max: 20.0,
            n_points: defaults::GRID_POINTS,
            refine_rounds: defaults::GRID_REFINE_ROUNDS,
        }
    }
}

impl GridSearchSpec {
    pub fn validate(&self) -> Result<()> {
        ensure_finite("theta_min", self.theta_min)?;
        ensure_finite("theta_max", self.theta_max)?;
        if self.theta_max <= self.theta_min {
            return Err(Error::InvalidParameter {
                name: "theta_max",
                value: self.theta_max,
                reason: "bracket must have positive width",
            });
        }
        if self.n_points < 3 {
            return Err(Error::InvalidParameter {
                name: "n_points",
                value: self.n_points as f64,
                reason: "need at least 3 grid points",
            });
        }
        Ok(())
    }

    /// Bracket centered on a known approximate optimum, following the
    /// half-width rule `10 * (1 + |center|)`.
    pub fn around(center: f64) -> Self {
        let half = defaults::BRACKET_HALF_WIDTH_FACTOR * (1.0 + center.abs());
        Self {
            theta_min: center - half,
            theta_max: center + half,
            ..Self::default()
        }
    }

    /// Worst-case distance of the reported argmax from the true one.
    pub fn resolution(&self) -> f64 {
        let n = (self.n_points - 1) as f64;
        let mut step = (self.theta_max - self.theta_min) / n;
        for _ in 0..self.refine_rounds {
            step *= 2.0 / n;
        }
        step
    }
}

/// Log of the negated informed objective, `ln(-U_I)`.
///
/// Finite for every finite demand; minimizing it maximizes the utility.
/// The interval mass enters through the kernel's log-mass so deep-tail
/// demand values never produce infinities.
pub fn log_neg_utility_informed(
    theta: f64,
    price: f64,
    u_tilde: f64,
    range: Range,
    params: &MarketParams,
) -> Result<f64> {
    params.validate()?;
    ensure_finite("theta", theta)?;
    ensure_finite("u_tilde", u_tilde)?;
    if !range.contains_open(price) {
        return Err(Error::OutOfImage {
            value: price,
            v_lo: range.v_lo,
            v_hi: range.v_hi,
        });
    }
    let noise = params.noise();
    let g = params.gamma;
    let shift = g * params.sigma_eps2 * theta;
    let ln_num = kernel::ln_truncated_mass(range, noise, u_tilde - shift)?;
    let ln_den = kernel::ln_truncated_mass(range, noise, u_tilde)?;
    Ok(-g * params.d0 + g * (price - u_tilde) * theta + 0.5 * g * shift * theta + ln_num - ln_den)
}

/// Informed trader's conditional expected utility at demand `theta`.
/// Always strictly negative.
pub fn utility_informed(
    theta: f64,
    price: f64,
    u_tilde: f64,
    range: Range,
    params: &MarketParams,
) -> Result<f64> {
    Ok(-log_neg_utility_informed(theta, price, u_tilde, range, params)?.exp())
}

/// Posterior mean and payoff scale inferred by an uninformed trader from
/// the observed price.
fn uninformed_posterior(
    coef: &EquilibriumCoefficients,
    range: Range,
    noise: NoiseScale,
    mu0: f64,
    price: f64,
) -> Result<(f64, NoiseScale)> {
    let t = kernel::invert_j(range, noise, price)?;
    let mu_eta = coef.omega1 * mu0 + coef.omega2 * (t - coef.beta) / coef.tau;
    Ok((mu_eta, NoiseScale::from_variance(coef.sigma_eta2)?))
}

/// Log of the negated uninformed objective, `ln(-U_U)`.
///
/// Includes the bond-endowment factor `exp(-gamma d0)`, which scales the
/// utility level but never moves the argmax.
pub fn log_neg_utility_uninformed(
    theta: f64,
    price: f64,
    range: Range,
    coef: &EquilibriumCoefficients,
    params: &MarketParams,
) -> Result<f64> {
    params.validate()?;
    ensure_finite("theta", theta)?;
    let noise = params.noise();
    let (mu_eta, eta) = uninformed_posterior(coef, range, noise, params.mu0, price)?;
    let g = params.gamma;
    let shift = g * coef.sigma_eta2 * theta;
    let ln_num = kernel::ln_truncated_mass(range, eta, mu_eta - shift)?;
    let ln_den = kernel::ln_truncated_mass(range, eta, mu_eta)?;
    Ok(-g * params.d0 + g * (price - mu_eta) * theta + 0.5 * g * shift * theta + ln_num - ln_den)
}

/// Uninformed trader's conditional expected utility at demand `theta`.
pub fn utility_uninformed(
    theta: f64,
    price: f64,
    range: Range,
    coef: &EquilibriumCoefficients,
    params: &MarketParams,
) -> Result<f64> {
    Ok(-log_neg_utility_uninformed(theta, price, range, coef, params)?.exp())
}

/// Grid argmax of a unimodal curve with bracket-shrinking refinement.
///
/// Errors with [`Error::BracketEdge`] when the first pass peaks on the
/// bracket boundary, signalling that the bracket excludes the optimum.
pub fn argmax_utility<F: Fn(f64) -> f64>(f: F, spec: &GridSearchSpec) -> Result<f64> {
    spec.validate()?;
    let mut lo = spec.theta_min;
    let mut hi = spec.theta_max;
    let n = spec.n_points;
    let mut best_x = lo;
    for round in 0..=spec.refine_rounds {
        let step = (hi - lo) / (n - 1) as f64;
        let mut best_i = 0usize;
        let mut best_v = f64::NEG_INFINITY;
        for i in 0..n {
            let x = lo + step * i as f64;
            let v = f(x);
            if v > best_v {
                best_v = v;
                best_i = i;
            }
        }
        if round == 0 && (best_i == 0 || best_i == n - 1) {
            return Err(Error::BracketEdge { lo, hi });
        }
        best_x = lo + step * best_i as f64;
        let new_lo = lo + step * best_i.saturating_sub(1) as f64;
        let new_hi = (lo + step * (best_i + 1) as f64).min(hi);
        lo = new_lo;
        hi = new_hi;
    }
    Ok(best_x)
}

/// Brute-force informed demand: maximizes the informed objective on a
/// bracket centered at `center_hint` (widened once if the peak hits an
/// edge).
pub fn informed_demand_oracle(
    price: f64,
    u_tilde: f64,
    range: Range,
    params: &MarketParams,
    center_hint: f64,
) -> Result<f64> {
    let objective = |theta: f64| {
        -log_neg_utility_informed(theta, price, u_tilde, range, params)
            .expect("validated inputs and finite theta")
    };
    let spec = GridSearchSpec::around(center_hint);
    match argmax_utility(objective, &spec) {
        Err(Error::BracketEdge { lo, hi }) => {
            let wide = GridSearchSpec {
                theta_min: lo - 10.0 * (hi - lo),
                theta_max: hi + 10.0 * (hi - lo),
                ..spec
            };
            argmax_utility(objective, &wide)
        }
        other => other,
    }
}

/// Brute-force uninformed demand, same bracket policy.
pub fn uninformed_demand_oracle(
    price: f64,
    range: Range,
    coef: &EquilibriumCoefficients,
    params: &MarketParams,
    center_hint: f64,
) -> Result<f64> {
    let objective = |theta: f64| {
        -log_neg_utility_uninformed(theta, price, range, coef, params)
            .expect("validated inputs and finite theta")
    };
    let spec = GridSearchSpec::around(center_hint);
    match argmax_utility(objective, &spec) {
        Err(Error::BracketEdge { lo, hi }) => {
            let wide = GridSearchSpec {
                theta_min: lo - 10.0 * (hi - lo),
                theta_max: hi + 10.0 * (hi - lo),
                ..spec
            };
            argmax_utility(objective, &wide)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{informed_demand_at_price, solve_coefficients, uninformed_demand};

    fn setup() -> (MarketParams, EquilibriumCoefficients, Range) {
        let params = MarketParams::default();
        let coef = solve_coefficients(&params).unwrap();
        (params, coef, Range::new(22.0, 28.0).unwrap())
    }

    #[test]
    fn argmax_finds_parabola_peak() {
        let spec = GridSearchSpec {
            theta_min: -5.0,
            theta_max: 5.0,
            n_points: 1001,
            refine_rounds: 2,
        };
        let x = argmax_utility(|t| -(t - 1.0) * (t - 1.0), &spec).unwrap();
        assert!((x - 1.0).abs() <= spec.resolution(), "x = {x}");
    }

    #[test]
    fn argmax_reports_edge() {
        let spec = GridSearchSpec {
            theta_min: -5.0,
            theta_max: 5.0,
            n_points: 101,
            refine_rounds: 0,
        };
        assert!(matches!(
            argmax_utility(|t| t, &spec),
            Err(Error::BracketEdge { .. })
        ));
    }

    #[test]
    fn zero_position_utility_is_exact() {
        let (params, coef, range) = setup();
        // no risky position: utility is exactly -exp(-gamma d0)
        let u = utility_informed(0.0, 25.0, 26.0, range, &params).unwrap();
        assert_eq!(u, -1.0);
        let endowed = MarketParams { d0: 0.7, ..params };
        let u = utility_informed(0.0, 25.0, 26.0, range, &endowed).unwrap();
        assert!((u - (-(-params.gamma * 0.7f64).exp())).abs() < 1e-15);
        let u = utility_uninformed(0.0, 25.0, range, &coef, &params).unwrap();
        assert_eq!(u, -1.0);
    }

    #[test]
    fn utilities_are_strictly_negative() {
        let (params, coef, range) = setup();
        for theta in [-15.0, -2.0, 0.0, 0.5, 3.0, 18.0] {
            let ui = utility_informed(theta, 24.0, 27.0, range, &params).unwrap();
            assert!(ui < 0.0);
            let uu = utility_uninformed(theta, 24.0, range, &coef, &params).unwrap();
            assert!(uu < 0.0);
        }
    }

    #[test]
    fn first_order_factor_decreases_and_crosses_once() {
        // the stationarity factor j(u - gamma sigma^2 theta) - price is
        // strictly decreasing with limits (v_hi - p) and (v_lo - p)
        let (params, _, range) = setup();
        let noise = params.noise();
        let price = 25.0;
        let u_tilde = 26.0;
        let fac = |theta: f64| {
            kernel::eval_j(
                range,
                noise,
                u_tilde - params.gamma * params.sigma_eps2 * theta,
            )
            .unwrap()
                - price
        };
        let mut prev = f64::INFINITY;
        let mut sign_changes = 0;
        let mut last_sign = fac(-30.0) > 0.0;
        assert!(last_sign, "lower limit should be v_hi - p > 0");
        for k in 0..=600 {
            let theta = -30.0 + 0.1 * k as f64;
            let v = fac(theta);
            assert!(v < prev);
            prev = v;
            let sign = v > 0.0;
            if sign != last_sign {
                sign_changes += 1;
                last_sign = sign;
            }
        }
        assert_eq!(sign_changes, 1);
        assert!(fac(30.0) < 0.0, "upper limit should be v_lo - p < 0");
    }

    #[test]
    fn informed_grid_argmax_matches_closed_form() {
        let (params, _, range) = setup();
        let noise = params.noise();
        for (price, u_tilde) in [(25.0, 28.0), (23.5, 20.0), (27.0, 29.5)] {
            let closed =
                informed_demand_at_price(range, noise, params.gamma, u_tilde, price).unwrap();
            let grid = informed_demand_oracle(price, u_tilde, range, &params, closed).unwrap();
            let spec = GridSearchSpec::around(closed);
            assert!(
                (grid - closed).abs() <= spec.resolution(),
                "price {price}: grid {grid} vs closed {closed}"
            );
        }
        // the canonical example: price at the interval center, signal 3
        // noise variances above it gives a unit position
        let grid = informed_demand_oracle(25.0, 28.0, range, &params, 0.0).unwrap();
        assert!((grid - 1.0).abs() < 2e-3, "{grid}");
    }

    #[test]
    fn uninformed_grid_argmax_matches_closed_form() {
        let (params, coef, range) = setup();
        let noise = params.noise();
        for price in [23.0, 25.0, 26.8] {
            let closed =
                uninformed_demand(&coef, range, noise, params.gamma, params.mu0, price).unwrap();
            let grid = uninformed_demand_oracle(price, range, &coef, &params, closed).unwrap();
            let spec = GridSearchSpec::around(closed);
            assert!(
                (grid - closed).abs() <= spec.resolution(),
                "price {price}: grid {grid} vs closed {closed}"
            );
        }
    }

    #[test]
    fn uninformed_curve_is_unimodal() {
        let (params, coef, range) = setup();
        let noise = params.noise();
        let price = 24.5;
        let peak =
            uninformed_demand(&coef, range, noise, params.gamma, params.mu0, price).unwrap();
        let obj =
            |theta: f64| -log_neg_utility_uninformed(theta, price, range, &coef, &params).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=40 {
            let theta = peak - 4.0 + 0.1 * k as f64;
            if theta >= peak {
                break;
            }
            let v = obj(theta);
            assert!(v > prev, "rising branch at {theta}");
            prev = v;
        }
        prev = obj(peak);
        for k in 1..=40 {
            let theta = peak + 0.1 * k as f64;
            let v = obj(theta);
            assert!(v < prev, "falling branch at {theta}");
            prev = v;
        }
    }

    #[test]
    fn endowment_scales_utility_but_not_argmax() {
        let (params, _, range) = setup();
        let endowed = MarketParams { d0: 1.3, ..params };
        // utility ratio is exp(-gamma * delta_d0) at every theta
        for theta in [-2.0, 0.4, 3.7] {
            let a = log_neg_utility_informed(theta, 24.0, 26.0, range, &params).unwrap();
            let b = log_neg_utility_informed(theta, 24.0, 26.0, range, &endowed).unwrap();
            assert!((b - a + params.gamma * 1.3).abs() < 1e-12);
        }
        let base = informed_demand_oracle(24.0, 26.0, range, &params, 0.7).unwrap();
        let shifted = informed_demand_oracle(24.0, 26.0, range, &endowed, 0.7).unwrap();
        assert_eq!(base, shifted);
    }

    #[test]
    fn deep_tail_demands_stay_finite() {
        let (params, _, range) = setup();
        // |shift| of 90 noise standard deviations: naive mass ratio underflows
        let v = log_neg_utility_informed(30.0, 25.0, 26.0, range, &params).unwrap();
        assert!(v.is_finite());
        let v = log_neg_utility_informed(-30.0, 25.0, 26.0, range, &params).unwrap();
        assert!(v.is_finite());
    }
}
