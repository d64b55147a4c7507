//! Convergence probes for limit results.
//!
//! A probe evaluates a quantity along a monotone parameter sequence and
//! reports whether the deviations from a claimed limit shrink monotonically
//! below a target. Failures are report content, never panics or errors:
//! distinguishing slow convergence from implementation error is the point.

use serde::Serialize;

/// Claimed limit of a probed quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ProbeTarget {
    /// Converges to the given finite value; residual is `|value - limit|`.
    Finite(f64),
    /// Diverges to infinity; residual is `1 / |value|`.
    Infinite,
}

impl ProbeTarget {
    fn residual(&self, value: f64) -> f64 {
        match self {
            ProbeTarget::Finite(limit) => (value - limit).abs(),
            ProbeTarget::Infinite => {
                if value.is_infinite() {
                    0.0
                } else {
                    1.0 / value.abs()
                }
            }
        }
    }
}

/// One evaluation along the probe sequence.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProbePoint {
    pub parameter: f64,
    pub value: f64,
    pub residual: f64,
}

/// Outcome of a limit probe.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    /// What was probed, for human-readable reports.
    pub quantity: String,
    pub limit: ProbeTarget,
    /// Residual the terminal point must reach.
    pub tolerance: f64,
    pub points: Vec<ProbePoint>,
    /// Residuals never increase along the sequence.
    pub monotone: bool,
    /// Terminal residual is within tolerance.
    pub converged: bool,
}

impl ConvergenceReport {
    /// Monotone convergence to the claimed limit at the required tolerance.
    pub fn passed(&self) -> bool {
        self.monotone && self.converged
    }

    pub fn terminal_residual(&self) -> f64 {
        self.points.last().map(|p| p.residual).unwrap_or(f64::NAN)
    }
}

/// Runs a probe of `quantity` over `parameters` against a claimed limit.
pub fn limit_probe<F: FnMut(f64) -> f64>(
    name: &str,
    parameters: &[f64],
    mut quantity: F,
    limit: ProbeTarget,
    tolerance: f64,
) -> ConvergenceReport {
    let mut points = Vec::with_capacity(parameters.len());
    let mut monotone = !parameters.is_empty();
    let mut prev = f64::INFINITY;
    for &parameter in parameters {
        let value = quantity(parameter);
        let residual = limit.residual(value);
        if !(residual <= prev) {
            monotone = false;
        }
        prev = residual;
        points.push(ProbePoint {
            parameter,
            value,
            residual,
        });
    }
    let converged = points
        .last()
        .map(|p| p.residual <= tolerance)
        .unwrap_or(false);
    ConvergenceReport {
        quantity: name.to_string(),
        limit,
        tolerance,
        points,
        monotone,
        converged,
    }
}
