//! Equilibrium by damped best-response iteration.
//!
//! Each round prices the current strategies by projection, lets the IT best
//! respond to that pricing, then the HFT best respond to the new IT
//! intensity, and moves a `damping` fraction of the way toward the responses.
//! This does not touch the equilibrium polynomial, so it doubles as an
//! independent check of the closed forms and is the only solver for the
//! aggregate-order signal.

use serde::Serialize;

use crate::equilibrium::Equilibrium;
use crate::error::{Error, Result};
use crate::model::{dealer_pricing, it_price_sensitivity, signal_weight, LinearStrategies, ModelParams, PricingCoefficients, SignalStructure};

const TAIL_LEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointConfig {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Starting strategies; `None` starts from the no-HFT Kyle intensity and `beta = 0.25`.
    pub init: Option<LinearStrategies>,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tol: 1e-10,
            max_iter: 10_000,
            init: None,
        }
    }
}

impl FixedPointConfig {
    fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidConfig(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointSolution {
    pub equilibrium: Equilibrium,
    pub iterations: usize,
    /// Largest relative change of `(alpha, beta, lambda_1, mu_1, mu_2)` in the last round.
    pub residual: f64,
}

/// IT intensity maximizing `E[(v - p2) i | v]` against `beta` and the pricing rule.
pub fn best_response_it(beta: f64, pricing: &PricingCoefficients) -> Result<f64> {
    let k = it_price_sensitivity(beta, pricing);
    if !(k > 0.0) {
        return Err(Error::NonConcaveObjective { agent: "IT", curvature: -k });
    }
    Ok(1.0 / (2.0 * k))
}

/// HFT intensity maximizing `E[(p2 - p1) x | signal]` against `alpha` and the pricing rule.
pub fn best_response_hft(
    alpha: f64,
    pricing: &PricingCoefficients,
    structure: SignalStructure,
    params: &ModelParams,
) -> Result<f64> {
    let curvature = pricing.mu_2 + pricing.lambda_1 - pricing.mu_1;
    if !(curvature > 0.0) {
        return Err(Error::NonConcaveObjective { agent: "HFT", curvature: -curvature });
    }
    let rho = signal_weight(alpha, structure, params);
    Ok(pricing.mu_2 * rho / (2.0 * curvature))
}

fn max_relative_change(prev: &[f64; 5], next: &[f64; 5]) -> f64 {
    prev.iter()
        .zip(next)
        .map(|(a, b)| (b - a).abs() / b.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

pub fn solve_fixed_point(
    params: &ModelParams,
    structure: SignalStructure,
    config: &FixedPointConfig,
) -> Result<FixedPointSolution> {
    config.validate()?;
    if !(params.sigma_1() > 0.0) {
        return Err(Error::ThetaOutOfDomain(
            "theta1 must be > 0: without fast noise there is no equilibrium to iterate towards".into(),
        ));
    }
    let mut state = config
        .init
        .unwrap_or(LinearStrategies { alpha: params.kyle_alpha(), beta: 0.25 });
    let d = config.damping;

    let mut prev: Option<[f64; 5]> = None;
    let mut tail: Vec<[f64; 5]> = Vec::with_capacity(TAIL_LEN);
    let mut residual = f64::INFINITY;

    for iteration in 1..=config.max_iter {
        let pricing = dealer_pricing(state, structure, params)?;
        let alpha_br = best_response_it(state.beta, &pricing)?;
        let beta_br = best_response_hft(alpha_br, &pricing, structure, params)?;
        state = LinearStrategies {
            alpha: (1.0 - d) * state.alpha + d * alpha_br,
            beta: (1.0 - d) * state.beta + d * beta_br,
        };
        let current = [state.alpha, state.beta, pricing.lambda_1, pricing.mu_1, pricing.mu_2];

        if tail.len() == TAIL_LEN {
            tail.remove(0);
        }
        tail.push(current);

        if let Some(p) = prev {
            residual = max_relative_change(&p, &current);
            if residual <= config.tol {
                let pricing = dealer_pricing(state, structure, params)?;
                let equilibrium = Equilibrium::assemble(params, structure, state, pricing)?;
                return Ok(FixedPointSolution { equilibrium, iterations: iteration, residual });
            }
        }
        prev = Some(current);
    }
    Err(Error::NoConvergence {
        iterations: config.max_iter,
        residual,
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::solve_equilibrium;
    use crate::model::ThetaPair;
    use approx::assert_relative_eq;

    fn unit(t1: f64, tz: f64) -> ModelParams {
        ModelParams::from_thetas(ThetaPair::new(t1, tz), 1.0, 1.0).unwrap()
    }

    #[test]
    fn it_best_response_examples() {
        let classic = PricingCoefficients { lambda_1: 0.0, mu_1: 0.0, mu_2: 0.5 };
        assert_eq!(best_response_it(0.0, &classic).unwrap(), 1.0);
        let flat = PricingCoefficients { lambda_1: 0.3, mu_1: 0.4, mu_2: 0.4 };
        for beta in [0.0, 0.2, 0.7] {
            assert_relative_eq!(best_response_it(beta, &flat).unwrap(), 1.25, max_relative = 1e-15);
        }
        let bad = PricingCoefficients { lambda_1: 0.0, mu_1: -1.0, mu_2: 0.1 };
        assert!(matches!(best_response_it(0.5, &bad), Err(Error::NonConcaveObjective { agent: "IT", .. })));
    }

    #[test]
    fn hft_best_response_examples() {
        let params = unit(1.0, 1e8);
        let eq = solve_equilibrium(&params).unwrap();
        let beta = best_response_hft(eq.strategies.alpha, &eq.pricing, SignalStructure::OwnOrder, &params).unwrap();
        assert!(beta > 0.0 && beta < 1e-4);

        assert_eq!(signal_weight(1.3, SignalStructure::OwnOrder, &unit(1.0, 0.0)), 1.0);

        let bad = PricingCoefficients { lambda_1: 0.0, mu_1: 1.0, mu_2: 0.5 };
        assert!(best_response_hft(1.0, &bad, SignalStructure::OwnOrder, &params).is_err());
    }

    #[test]
    fn best_responses_reproduce_closed_forms() {
        let params = unit(1.0, 0.04);
        let eq = solve_equilibrium(&params).unwrap();
        let a = best_response_it(eq.strategies.beta, &eq.pricing).unwrap();
        assert_relative_eq!(a, eq.strategies.alpha, max_relative = 1e-10);
        let b = best_response_hft(eq.strategies.alpha, &eq.pricing, SignalStructure::OwnOrder, &params).unwrap();
        assert_relative_eq!(b, eq.strategies.beta, max_relative = 1e-10);
    }

    #[test]
    fn own_order_iteration_matches_closed_forms() {
        let params = unit(1.0, 0.04);
        let sol = solve_fixed_point(&params, SignalStructure::OwnOrder, &FixedPointConfig::default()).unwrap();
        let eq = solve_equilibrium(&params).unwrap();
        assert_relative_eq!(sol.equilibrium.strategies.alpha, eq.strategies.alpha, max_relative = 1e-8);
        assert_relative_eq!(sol.equilibrium.strategies.beta, eq.strategies.beta, max_relative = 1e-8);
        assert!(sol.residual <= 1e-10);
        assert!(sol.iterations < 5000);
    }

    #[test]
    fn aggregate_signal_benefits_it() {
        for t1 in [0.05, 0.2, 1.0, 5.0] {
            for tz in [0.04, 1.0, 25.0] {
                let sol = solve_fixed_point(&unit(t1, tz), SignalStructure::AggregateOrder, &FixedPointConfig::default()).unwrap();
                let s = sol.equilibrium.strategies;
                assert!(s.beta > 0.0 && s.beta < 1.0);
                assert!(s.alpha > 1.0, "{t1} {tz} {}", s.alpha);
            }
        }
    }

    #[test]
    fn aggregate_signal_without_noise_leaves_it_indifferent() {
        for t1 in [0.05, 0.2, 1.0, 5.0] {
            let sol = solve_fixed_point(&unit(t1, 0.0), SignalStructure::AggregateOrder, &FixedPointConfig::default()).unwrap();
            let s = sol.equilibrium.strategies;
            assert!(s.beta > 0.0 && s.beta < 1.0);
            assert!((s.alpha - 1.0).abs() < 1e-9, "{}", s.alpha);
        }
    }

    #[test]
    fn refuses_missing_fast_noise() {
        let params = ModelParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            solve_fixed_point(&params, SignalStructure::OwnOrder, &FixedPointConfig::default()),
            Err(Error::ThetaOutOfDomain(_))
        ));
    }

    #[test]
    fn reports_non_convergence() {
        let cfg = FixedPointConfig { max_iter: 3, ..Default::default() };
        match solve_fixed_point(&unit(1.0, 0.04), SignalStructure::OwnOrder, &cfg) {
            Err(Error::NoConvergence { iterations, tail, .. }) => {
                assert_eq!(iterations, 3);
                assert_eq!(tail.len(), 3);
            }
            other => panic!("{other:?}"),
        }
        let cfg = FixedPointConfig { damping: 0.0, ..Default::default() };
        assert!(matches!(solve_fixed_point(&unit(1.0, 0.04), SignalStructure::OwnOrder, &cfg), Err(Error::InvalidConfig(_))));
    }
}
