//! Closed-form equilibrium, welfare classification, and limiting regimes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    dealer_pricing, hft_expected_profit_for, innovation_impact, LinearStrategies, ModelParams,
    PricingCoefficients, SignalStructure, ThetaPair,
};
use crate::sextic::{self, BetaRoot};

/// Default band on `alpha * sigma_v / sigma_2 - 1` inside which welfare is `Boundary`.
pub const WELFARE_TOL: f64 = 1e-9;

/// Fitted exponent of the small-`theta_1` limit of the IT intensity.
pub const SMALL_THETA1_EXPONENT: f64 = 0.3245;
/// Fitted scale of the small-`theta_1` limit of the IT intensity.
pub const SMALL_THETA1_SCALE: f64 = 1.3845;

/// `(2 sqrt(3) - 3) / 3`: above this much fast noise the IT always gains from the HFT.
pub fn welfare_theta1_threshold() -> f64 {
    (2.0 * 3.0_f64.sqrt() - 3.0) / 3.0
}

/// Fully solved market state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium {
    pub thetas: ThetaPair,
    pub structure: SignalStructure,
    pub strategies: LinearStrategies,
    pub pricing: PricingCoefficients,
    /// Impact on the time-2 order-flow innovation. Derived, interpretation-dependent.
    pub lambda_2: f64,
    pub profit_it: f64,
    pub profit_hft: f64,
}

impl Equilibrium {
    /// Assembles profits and `lambda_2` around already-solved strategies and prices.
    pub fn assemble(
        params: &ModelParams,
        structure: SignalStructure,
        strategies: LinearStrategies,
        pricing: PricingCoefficients,
    ) -> Result<Self> {
        let lambda_2 = innovation_impact(strategies, structure, params)?;
        Ok(Self {
            thetas: params.thetas(),
            structure,
            strategies,
            pricing,
            lambda_2,
            profit_it: 0.5 * params.sigma_v() * params.sigma_v() * strategies.alpha,
            profit_hft: hft_expected_profit_for(strategies, &pricing, structure, params),
        })
    }

    /// `alpha * sigma_v / sigma_2`; above one the IT gains from the HFT.
    pub fn alpha_normalized(&self, params: &ModelParams) -> f64 {
        self.strategies.alpha / params.kyle_alpha()
    }
}

/// Strategies and prices from the closed forms, given the solved HFT intensity.
pub fn closed_form_coefficients(
    thetas: ThetaPair,
    beta: f64,
    sigma_v: f64,
    sigma_2: f64,
) -> (LinearStrategies, PricingCoefficients) {
    let ThetaPair { theta_1: t1, theta_z: tz } = thetas;
    let b2 = beta * beta;
    let keep = 1.0 - beta;
    // Variance-like terms shared by every formula.
    let d = t1 * keep * keep + b2 * (tz + 1.0);
    let n = t1 + b2 * tz * (t1 + 1.0);
    let root = (n * d).sqrt();
    let half_ratio = sigma_v / (2.0 * sigma_2);

    let alpha = sigma_2 / sigma_v * (n / d).sqrt();
    let lambda_1 = half_ratio * 2.0 * beta * root / (b2 * n + (b2 * tz + t1) * d);
    let mu_1 = half_ratio * (b2 * tz + beta) / root;
    let mu_2 = half_ratio * (b2 * tz + keep * t1) / root;
    (
        LinearStrategies { alpha, beta },
        PricingCoefficients { lambda_1, mu_1, mu_2 },
    )
}

fn require_fast_noise(theta_1: f64) -> Result<()> {
    if theta_1 > 0.0 && theta_1.is_finite() {
        Ok(())
    } else {
        Err(Error::ThetaOutOfDomain(
            "theta1 must be > 0; see partial-equilibrium command".into(),
        ))
    }
}

/// Equilibrium with a front-running HFT that predicts the IT's own order.
pub fn solve_equilibrium(params: &ModelParams) -> Result<Equilibrium> {
    solve_equilibrium_detailed(params, sextic::DEFAULT_TOL).map(|(eq, _)| eq)
}

/// As [`solve_equilibrium`], also returning the polynomial root diagnostics.
pub fn solve_equilibrium_detailed(params: &ModelParams, tol: f64) -> Result<(Equilibrium, BetaRoot)> {
    let thetas = params.thetas();
    require_fast_noise(thetas.theta_1)?;
    let root = sextic::solve_beta_detailed(thetas, tol)?;
    let (strategies, pricing) = closed_form_coefficients(thetas, root.beta, params.sigma_v(), params.sigma_2());
    let eq = Equilibrium::assemble(params, SignalStructure::OwnOrder, strategies, pricing)?;
    Ok((eq, root))
}

/// Normalized IT intensity `alpha * sigma_v / sigma_2`, straight from the ratios.
pub fn alpha_normalized(thetas: ThetaPair) -> Result<f64> {
    require_fast_noise(thetas.theta_1)?;
    let beta = sextic::solve_beta(thetas, sextic::DEFAULT_TOL)?;
    Ok(closed_form_coefficients(thetas, beta, 1.0, 1.0).0.alpha)
}

/// `E[(p2 - p1) x]` at the equilibrium.
pub fn hft_expected_profit(eq: &Equilibrium, params: &ModelParams) -> f64 {
    hft_expected_profit_for(eq.strategies, &eq.pricing, eq.structure, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WelfareClass {
    Benefited,
    Harmed,
    Boundary,
}

impl WelfareClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            WelfareClass::Benefited => "benefited",
            WelfareClass::Harmed => "harmed",
            WelfareClass::Boundary => "boundary",
        }
    }
}

/// Welfare read off the normalized intensity alone.
pub fn welfare_from_alpha(alpha_norm: f64, tol: f64) -> WelfareClass {
    if (alpha_norm - 1.0).abs() <= tol {
        WelfareClass::Boundary
    } else if alpha_norm > 1.0 {
        WelfareClass::Benefited
    } else {
        WelfareClass::Harmed
    }
}

/// Welfare from the region formula alone, with no tolerance band.
pub fn welfare_region(thetas: ThetaPair) -> Result<WelfareClass> {
    require_fast_noise(thetas.theta_1)?;
    let benefited = thetas.theta_1 > welfare_theta1_threshold()
        || thetas.theta_z > theta_z_bar(thetas.theta_1)?;
    Ok(if benefited {
        WelfareClass::Benefited
    } else {
        WelfareClass::Harmed
    })
}

/// Classifies the IT's welfare and cross-checks the region formula against
/// the solved intensity.
pub fn classify_welfare(thetas: ThetaPair, tol: f64) -> Result<WelfareClass> {
    let region = welfare_region(thetas)?;
    let alpha_norm = alpha_normalized(thetas)?;
    match welfare_from_alpha(alpha_norm, tol) {
        WelfareClass::Boundary => Ok(WelfareClass::Boundary),
        solved if solved == region => Ok(solved),
        _ => Err(Error::WelfareDisagreement {
            theta_1: thetas.theta_1,
            theta_z: thetas.theta_z,
            alpha_norm,
        }),
    }
}

/// Signal-noise level above which the IT gains, for small `theta_1`.
pub fn theta_z_bar(theta_1: f64) -> Result<f64> {
    if !(theta_1 > 0.0 && theta_1 <= welfare_theta1_threshold()) {
        return Err(Error::ThetaOutOfDomain(format!(
            "theta_z_bar is defined for 0 < theta1 <= (2 sqrt 3 - 3)/3, got {theta_1}"
        )));
    }
    let t = theta_1;
    let numer = -(t + 5.0) + 2.0 * (4.0 * t * t + 10.0 * t + 5.0).sqrt();
    // At the top of the domain the numerator is zero up to rounding.
    Ok((numer / (-5.0 * t)).max(0.0))
}

/// Raw turning-point formula `(1 - t - 2 t^2) / (3 t)`, any `t > 0`.
pub fn turning_point_formula(theta_1: f64) -> f64 {
    (1.0 - theta_1 - 2.0 * theta_1 * theta_1) / (3.0 * theta_1)
}

/// Signal-noise level at which the IT intensity peaks, for `0 < theta_1 < 1/2`.
pub fn theta_z_tilde(theta_1: f64) -> Result<f64> {
    if !(theta_1 > 0.0 && theta_1 < 0.5) {
        return Err(Error::ThetaOutOfDomain(format!(
            "theta_z_tilde is defined for 0 < theta1 < 1/2, got {theta_1}"
        )));
    }
    Ok(turning_point_formula(theta_1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub theta_z_bar: Option<f64>,
    pub theta_z_tilde: Option<f64>,
}

pub fn thresholds(theta_1: f64) -> Thresholds {
    Thresholds {
        theta_z_bar: theta_z_bar(theta_1).ok(),
        theta_z_tilde: theta_z_tilde(theta_1).ok(),
    }
}

/// Outcome of the IT/dealer game when there is no fast noise and the HFT
/// intensity is exogenous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialEquilibrium {
    pub alpha: f64,
    pub profit_hft: f64,
}

/// Partial equilibrium for `sigma_1 = 0`. `theta_z` drives the formula;
/// `params` supplies the scales.
pub fn partial_equilibrium_no_fast_noise(beta: f64, theta_z: f64, params: &ModelParams) -> Result<PartialEquilibrium> {
    if params.sigma_1() != 0.0 {
        return Err(Error::ThetaOutOfDomain(format!(
            "partial equilibrium requires sigma_1 = 0, got {}",
            params.sigma_1()
        )));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidConfig(format!("beta must be finite and >= 0, got {beta}")));
    }
    if !(theta_z >= 0.0) || !theta_z.is_finite() {
        return Err(Error::ThetaOutOfDomain(format!("thetaz must be >= 0, got {theta_z}")));
    }
    let alpha = if beta > 0.0 {
        params.kyle_alpha() * (theta_z / (theta_z + 1.0)).sqrt()
    } else {
        params.kyle_alpha()
    };
    // y1 reveals the signal, so p1 already prices everything x is built from.
    Ok(PartialEquilibrium { alpha, profit_hft: 0.0 })
}

/// Fitted closed-form limit of the IT intensity as `theta_1 -> 0`.
pub fn limit_alpha_theta1_zero(theta_z: f64, params: &ModelParams) -> Result<f64> {
    if !(theta_z > 0.0) || !theta_z.is_finite() {
        return Err(Error::ThetaOutOfDomain(format!("thetaz must be > 0, got {theta_z}")));
    }
    let fitted = SMALL_THETA1_SCALE * SMALL_THETA1_SCALE * theta_z.powf(2.0 * SMALL_THETA1_EXPONENT);
    Ok(params.kyle_alpha() * ((fitted + theta_z) / (fitted + theta_z + 1.0)).sqrt())
}

/// Limit of the IT intensity as `theta_1 -> infinity`.
pub fn limit_alpha_theta1_infinity(theta_z: f64, params: &ModelParams) -> Result<f64> {
    let beta = sextic::limit_beta_theta1_infinity(theta_z, sextic::DEFAULT_TOL)?;
    let keep = 1.0 - beta;
    Ok(params.kyle_alpha() * ((beta * beta * theta_z + 1.0) / (keep * keep)).sqrt())
}

/// Market as `theta_z -> infinity`: the HFT's signal is worthless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoisySignalLimits {
    pub beta: f64,
    pub alpha: f64,
    pub profit_it: f64,
    pub profit_hft: f64,
    pub lambda_1: f64,
    pub mu_1: f64,
    pub mu_2: f64,
    pub lambda_2: f64,
}

pub fn theta_z_infinity_limits(params: &ModelParams) -> NoisySignalLimits {
    let impact = params.sigma_v() / (2.0 * params.sigma_2());
    NoisySignalLimits {
        beta: 0.0,
        alpha: params.kyle_alpha(),
        profit_it: params.profit_scale(),
        profit_hft: 0.0,
        lambda_1: 0.0,
        mu_1: 0.0,
        mu_2: impact,
        lambda_2: impact,
    }
}

/// Pricing the dealers would set under the equilibrium strategies; used to
/// cross-check the closed forms.
pub fn projected_pricing(eq: &Equilibrium, params: &ModelParams) -> Result<PricingCoefficients> {
    dealer_pricing(eq.strategies, eq.structure, params)
}
