//! Equilibrium coefficients, prices, and closed-form demands.
//!
//! The price conjecture is quasi-linear: the market price equals the
//! truncated-mean kernel applied to `tau * u + alpha * y + beta`. Matching
//! the market-clearing condition coefficient by coefficient pins down
//! `(tau, alpha, beta)` in closed form; without disclosure the same
//! coefficients give the linear benchmark price.

use crate::error::{ensure_finite, Error, Result};
use crate::kernel::{self, KernelOpts, NoiseScale, Range};
use serde::{Deserialize, Serialize};

/// Exogenous market parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketParams {
    /// Absolute risk-aversion coefficient of every trader.
    pub gamma: f64,
    /// Unconditional mean of the fundamental.
    pub mu0: f64,
    /// Variance of the fundamental (signal informativeness).
    pub sigma_u2: f64,
    /// Variance of the signal error (inverse signal precision).
    pub sigma_eps2: f64,
    /// Variance of noise-trading volume.
    pub sigma_y2: f64,
    /// Fraction of informed traders, strictly between 0 and 1.
    pub x_i: f64,
    /// Total supply of the risky asset.
    pub z: f64,
    /// Risk-free bond endowment. Cancels from every demand; kept so the
    /// utility oracle can report absolute utility levels.
    #[serde(default)]
    pub d0: f64,
}

impl Default for MarketParams {
    /// Canonical demonstration parameters used throughout the docs and the
    /// default CLI configuration.
    fn default() -> Self {
        Self {
            gamma: 3.0,
            mu0: 25.0,
            sigma_u2: 6.0,
            sigma_eps2: 1.0,
            sigma_y2: 5.0,
            x_i: 0.4,
            z: 25.0,
            d0: 0.0,
        }
    }
}

impl MarketParams {
    /// Checks positivity and the open-interval constraint on `x_i`.
    pub fn validate(&self) -> Result<()> {
        ensure_finite("gamma", self.gamma)?;
        ensure_finite("mu0", self.mu0)?;
        ensure_finite("sigma_u2", self.sigma_u2)?;
        ensure_finite("sigma_eps2", self.sigma_eps2)?;
        ensure_finite("sigma_y2", self.sigma_y2)?;
        ensure_finite("x_i", self.x_i)?;
        ensure_finite("z", self.z)?;
        ensure_finite("d0", self.d0)?;
        let positive = [
            ("gamma", self.gamma),
            ("sigma_u2", self.sigma_u2),
            ("sigma_eps2", self.sigma_eps2),
            ("sigma_y2", self.sigma_y2),
        ];
        for (name, value) in positive {
            if value <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be positive",
                });
            }
        }
        if self.x_i <= 0.0 || self.x_i >= 1.0 {
            return Err(Error::InvalidParameter {
                name: "x_i",
                value: self.x_i,
                reason: "must lie strictly between 0 and 1",
            });
        }
        Ok(())
    }

    /// Fraction of uninformed traders, structurally `1 - x_i`.
    #[inline]
    pub fn x_u(&self) -> f64 {
        1.0 - self.x_i
    }

    /// Signal-noise scale carried by the kernel.
    pub fn noise(&self) -> NoiseScale {
        NoiseScale::from_variance(self.sigma_eps2).expect("validated")
    }
}

/// Realized private signal and noise-trading volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketState {
    pub u_tilde: f64,
    pub y_tilde: f64,
}

impl MarketState {
    pub fn new(u_tilde: f64, y_tilde: f64) -> Result<Self> {
        ensure_finite("u_tilde", u_tilde)?;
        ensure_finite("y_tilde", y_tilde)?;
        Ok(Self { u_tilde, y_tilde })
    }
}

/// Solved price-map coefficients and the posterior quantities derived from
/// them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCoefficients {
    /// Loading of the price-map argument on the private signal.
    pub tau: f64,
    /// Loading on noise-trading volume.
    pub alpha: f64,
    /// Intercept.
    pub beta: f64,
    /// Posterior weight on the prior mean.
    pub omega1: f64,
    /// Posterior weight on the price-based inference, `1 - omega1`.
    pub omega2: f64,
    /// Posterior payoff variance of an uninformed trader.
    pub sigma_eta2: f64,
    /// Mean of the price-map argument, `beta + mu0 * tau`.
    pub b0: f64,
    /// Variance of the price-map argument, `tau^2 sigma_u2 + alpha^2 sigma_y2`.
    pub sigma_x2: f64,
    /// Supply-driven discount `b0 - mu0`.
    pub theta: f64,
}

impl EquilibriumCoefficients {
    /// Price-map argument `tau * u + alpha * y + beta` at a realized state.
    #[inline]
    pub fn linear_index(&self, state: MarketState) -> f64 {
        self.tau * state.u_tilde + self.alpha * state.y_tilde + self.beta
    }

    /// Signal/volume mix without the intercept, `tau * u + alpha * y`.
    #[inline]
    pub fn linear_combination(&self, state: MarketState) -> f64 {
        self.tau * state.u_tilde + self.alpha * state.y_tilde
    }
}

/// Solves the coefficient system in closed form.
pub fn solve_coefficients(params: &MarketParams) -> Result<EquilibriumCoefficients> {
    params.validate()?;
    let g = params.gamma;
    let se2 = params.sigma_eps2;
    let su2 = params.sigma_u2;
    let sy2 = params.sigma_y2;
    let x_i = params.x_i;
    let x_u = params.x_u();

    let denom = 1.0 + x_i * x_i * su2 / (g * g * se2 * se2 * sy2) + x_i * su2 / se2;
    let tau = 1.0 - x_u / denom;
    let alpha = g * se2 / x_i * tau;

    let tu2 = tau * tau * su2;
    let ay2 = alpha * alpha * sy2;
    let sigma_x2 = tu2 + ay2;
    let omega1 = ay2 / sigma_x2;
    let omega2 = 1.0 - omega1;
    let sigma_eta2 = se2 + omega1 * su2;

    let wu = x_u / (g * sigma_eta2);
    let wi = x_i / (g * se2);
    let beta = (wu * params.mu0 * omega1 - params.z) / (wu + wi);
    let b0 = beta + params.mu0 * tau;

    Ok(EquilibriumCoefficients {
        tau,
        alpha,
        beta,
        omega1,
        omega2,
        sigma_eta2,
        b0,
        sigma_x2,
        theta: b0 - params.mu0,
    })
}

/// Residuals of the three coefficient-matching equations (signal loading,
/// volume loading, intercept). All vanish at the solved coefficients.
pub fn clearing_system_residuals(
    params: &MarketParams,
    coef: &EquilibriumCoefficients,
) -> [f64; 3] {
    let g = params.gamma;
    let se2 = params.sigma_eps2;
    let x_i = params.x_i;
    let x_u = params.x_u();
    let slope = coef.omega2 / coef.tau - 1.0;
    let wu = x_u / (g * coef.sigma_eta2);
    [
        x_i * (1.0 - coef.tau) / (g * se2) + coef.tau * wu * slope,
        -coef.alpha * x_i / (g * se2) + coef.alpha * wu * slope + 1.0,
        -coef.beta * x_i / (g * se2) + wu * (coef.omega1 * params.mu0 - coef.beta) - params.z,
    ]
}

/// Equilibrium price with a disclosed interval: the truncated-mean kernel at
/// the linear index. Strictly inside the interval and increasing in both
/// state components.
pub fn price_with_range(
    coef: &EquilibriumCoefficients,
    range: Range,
    noise: NoiseScale,
    state: MarketState,
) -> Result<f64> {
    kernel::eval_j(range, noise, coef.linear_index(state))
}

/// [`price_with_range`] with explicit kernel options.
pub fn price_with_range_opts(
    coef: &EquilibriumCoefficients,
    range: Range,
    noise: NoiseScale,
    state: MarketState,
    opts: &KernelOpts,
) -> Result<f64> {
    kernel::eval_j_with(range, noise, coef.linear_index(state), opts)
}

/// Benchmark price without disclosure: the linear index itself.
#[inline]
pub fn price_baseline(coef: &EquilibriumCoefficients, state: MarketState) -> f64 {
    coef.linear_index(state)
}

/// Informed trader's demand in state form:
/// `((1 - tau) u - alpha y - beta) / (gamma sigma_eps2)`.
pub fn informed_demand(
    coef: &EquilibriumCoefficients,
    gamma: f64,
    sigma_eps2: f64,
    state: MarketState,
) -> f64 {
    ((1.0 - coef.tau) * state.u_tilde - coef.alpha * state.y_tilde - coef.beta)
        / (gamma * sigma_eps2)
}

/// Informed trader's demand in price form:
/// `(u - invert_j(price)) / (gamma sigma_eps2)`. Decreasing in the price.
pub fn informed_demand_at_price(
    range: Range,
    noise: NoiseScale,
    gamma: f64,
    u_tilde: f64,
    price: f64,
) -> Result<f64> {
    let t = kernel::invert_j(range, noise, price)?;
    Ok((u_tilde - t) / (gamma * noise.variance()))
}

/// Uninformed trader's demand at an observed price:
/// `(omega1 mu0 - omega2 beta / tau + (omega2 / tau - 1) invert_j(price))
///  / (gamma sigma_eta2)`.
pub fn uninformed_demand(
    coef: &EquilibriumCoefficients,
    range: Range,
    noise: NoiseScale,
    gamma: f64,
    mu0: f64,
    price: f64,
) -> Result<f64> {
    let t = kernel::invert_j(range, noise, price)?;
    Ok(
        (coef.omega1 * mu0 - coef.omega2 * coef.beta / coef.tau
            + (coef.omega2 / coef.tau - 1.0) * t)
            / (gamma * coef.sigma_eta2),
    )
}

/// Closed-form demands in the no-disclosure benchmark, `(informed, uninformed)`.
pub fn baseline_demands(
    coef: &EquilibriumCoefficients,
    params: &MarketParams,
    state: MarketState,
) -> (f64, f64) {
    let informed = informed_demand(coef, params.gamma, params.sigma_eps2, state);
    let uninformed = (coef.omega1 * params.mu0
        + (coef.omega2 - coef.tau) * state.u_tilde
        + (coef.omega2 / coef.tau - 1.0) * coef.alpha * state.y_tilde
        - coef.beta)
        / (params.gamma * coef.sigma_eta2);
    (informed, uninformed)
}

/// Excess demand `x_i theta_i + x_u theta_u + y - z` at the disclosed-range
/// equilibrium price implied by the state.
pub fn market_clearing_residual(
    params: &MarketParams,
    coef: &EquilibriumCoefficients,
    range: Range,
    state: MarketState,
) -> Result<f64> {
    let noise = params.noise();
    let price = price_with_range(coef, range, noise, state)?;
    let theta_i = informed_demand(coef, params.gamma, params.sigma_eps2, state);
    let theta_u = uninformed_demand(coef, range, noise, params.gamma, params.mu0, price)?;
    Ok(params.x_i * theta_i + params.x_u() * theta_u + state.y_tilde - params.z)
}
