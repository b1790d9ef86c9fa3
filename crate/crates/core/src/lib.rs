//! Two-period Kyle market with a front-running high-frequency trader.
//!
//! A large informed trader (IT) knows the asset value and sends an order that
//! executes at time 2. An HFT sees a noisy signal of that order, trades ahead
//! of it at time 1, and unwinds at time 2. Competitive dealers price each
//! period at the conditional expectation of the value given order flow.
//!
//! The crate provides:
//! - [`model`]: parameters and the dealers' Gaussian projection,
//! - [`sextic`]: the polynomial whose root is the equilibrium HFT intensity,
//! - [`equilibrium`]: closed forms, welfare regions, limiting regimes,
//! - [`fixed_point`]: an independent best-response solver (also for an HFT
//!   that predicts aggregate order flow),
//! - [`simulator`]: a seeded Monte Carlo play of the game,
//! - [`sweep`]: parameter grids and CSV output.

// Negated float comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod equilibrium;
pub mod error;
pub mod fixed_point;
pub mod model;
pub mod sextic;
pub mod simulator;
pub mod sweep;

pub use equilibrium::{
    classify_welfare, solve_equilibrium, theta_z_bar, theta_z_tilde, Equilibrium, WelfareClass,
};
pub use error::{Error, Result};
pub use fixed_point::{solve_fixed_point, FixedPointConfig, FixedPointSolution};
pub use model::{
    dealer_pricing, validate_params, LinearStrategies, ModelParams, PricingCoefficients, RawParams,
    SignalStructure, ThetaPair,
};
pub use sextic::{solve_beta, BetaPolynomial};
pub use simulator::{simulate_game, SimulationConfig, SimulationResult};
