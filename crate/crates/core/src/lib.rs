//! Equilibrium analysis of a competitive asset market in which traders are
//! told a lower and an upper bound for the asset's future value.
//!
//! The disclosed interval turns the usual linear rational-expectations price
//! into a quasi-linear one: the price is the mean of a normal distribution,
//! centered at a linear mix of the private signal and noise-trading volume,
//! truncated to the interval. The crate provides:
//!
//! * [`kernel`] — numerically stable truncated-normal moment functions, their
//!   endpoint derivatives, and the inverse of the price map;
//! * [`equilibrium`] — the coefficient system, prices with and without
//!   disclosure, and both trader types' closed-form demands;
//! * [`oracle`] — direct conditional-utility evaluation and brute-force
//!   maximization, used to validate the closed-form demands;
//! * [`statics`] — price sensitivities, market liquidity, and limit probes;
//! * [`premium`] — expected premium with and without disclosure, the
//!   midpoint benchmark classification, and premium sensitivities;
//! * [`verify`] — the full property-check suite over seeded random draws.

pub mod defaults;
pub mod equilibrium;
pub mod error;
pub mod kernel;
pub mod normal;
pub mod oracle;
pub mod premium;
pub mod probe;
pub mod quad;
pub mod statics;
pub mod verify;

pub use equilibrium::{EquilibriumCoefficients, MarketParams, MarketState};
pub use error::{Error, Result};
pub use kernel::{KernelOpts, NoiseScale, Range};
pub use oracle::GridSearchSpec;
pub use probe::{ConvergenceReport, ProbeTarget};
pub use statics::{Distances, DominantDriver};
