//! Market primitives and the dealers' Gaussian linear projection.
//!
//! The asset value is `v ~ N(p0, sigma_v^2)`. The informed trader (IT) sends
//! `i = alpha * v`, the HFT observes a noisy signal of the upcoming flow and
//! trades `x = beta * signal` at time 1, unwinding at time 2. Order flows are
//!
//! ```text
//! y1 = x + u1
//! y2 = i + u2 - x
//! ```
//!
//! and dealers set `p1 = E[v | y1]`, `p2 = E[v | y1, y2]`. All second moments
//! are assembled in closed form; nothing here samples. Prices are deviations
//! from `p0`, so `v` is treated as centred throughout.

use serde::Serialize;

use crate::error::{Error, Result};

/// Primitive volatilities of one market instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    sigma_v: f64,
    sigma_1: f64,
    sigma_2: f64,
    sigma_z: f64,
    p_0: f64,
}

/// Unvalidated parameter record, e.g. straight from a command line.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RawParams {
    pub sigma_v: f64,
    pub sigma_1: f64,
    pub sigma_2: f64,
    pub sigma_z: f64,
    pub p_0: f64,
}

/// Validates a candidate record. Values are never clamped.
pub fn validate_params(raw: RawParams) -> Result<ModelParams> {
    let fields = [
        ("sigma_v", raw.sigma_v),
        ("sigma_1", raw.sigma_1),
        ("sigma_2", raw.sigma_2),
        ("sigma_z", raw.sigma_z),
        ("p_0", raw.p_0),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            return Err(Error::NonFinite { name });
        }
    }
    for (name, value) in [("sigma_v", raw.sigma_v), ("sigma_2", raw.sigma_2)] {
        if value <= 0.0 {
            return Err(Error::NonPositiveSigma { name, value });
        }
    }
    for (name, value) in [("sigma_1", raw.sigma_1), ("sigma_z", raw.sigma_z)] {
        if value < 0.0 {
            return Err(Error::NegativeSigma { name, value });
        }
    }
    Ok(ModelParams {
        sigma_v: raw.sigma_v,
        sigma_1: raw.sigma_1,
        sigma_2: raw.sigma_2,
        sigma_z: raw.sigma_z,
        p_0: raw.p_0,
    })
}

impl ModelParams {
    pub fn new(sigma_v: f64, sigma_1: f64, sigma_2: f64, sigma_z: f64) -> Result<Self> {
        validate_params(RawParams {
            sigma_v,
            sigma_1,
            sigma_2,
            sigma_z,
            p_0: 0.0,
        })
    }

    /// Builds raw volatilities from dimensionless ratios and the two scales.
    pub fn from_thetas(thetas: ThetaPair, sigma_v: f64, sigma_2: f64) -> Result<Self> {
        if !(thetas.theta_1.is_finite() && thetas.theta_z.is_finite()) {
            return Err(Error::NonFinite { name: "theta" });
        }
        if thetas.theta_1 < 0.0 || thetas.theta_z < 0.0 {
            return Err(Error::ThetaOutOfDomain(format!(
                "thetas must be non-negative, got theta1={}, thetaz={}",
                thetas.theta_1, thetas.theta_z
            )));
        }
        Self::new(
            sigma_v,
            thetas.theta_1.sqrt() * sigma_2,
            sigma_2,
            thetas.theta_z.sqrt() * sigma_2,
        )
    }

    pub fn with_p0(mut self, p_0: f64) -> Result<Self> {
        if !p_0.is_finite() {
            return Err(Error::NonFinite { name: "p_0" });
        }
        self.p_0 = p_0;
        Ok(self)
    }

    pub fn sigma_v(&self) -> f64 {
        self.sigma_v
    }
    pub fn sigma_1(&self) -> f64 {
        self.sigma_1
    }
    pub fn sigma_2(&self) -> f64 {
        self.sigma_2
    }
    pub fn sigma_z(&self) -> f64 {
        self.sigma_z
    }
    pub fn p_0(&self) -> f64 {
        self.p_0
    }

    pub fn thetas(&self) -> ThetaPair {
        thetas_from_params(self)
    }

    /// IT intensity without an HFT, `sigma_2 / sigma_v`.
    pub fn kyle_alpha(&self) -> f64 {
        self.sigma_2 / self.sigma_v
    }

    /// Normalizer for profits, `sigma_v * sigma_2 / 2` (IT profit without an HFT).
    pub fn profit_scale(&self) -> f64 {
        0.5 * self.sigma_v * self.sigma_2
    }
}

/// Relative size of fast noise trading and of signal noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaPair {
    pub theta_1: f64,
    pub theta_z: f64,
}

impl ThetaPair {
    pub fn new(theta_1: f64, theta_z: f64) -> Self {
        Self { theta_1, theta_z }
    }
}

pub fn thetas_from_params(params: &ModelParams) -> ThetaPair {
    let s2 = params.sigma_2 * params.sigma_2;
    ThetaPair {
        theta_1: params.sigma_1 * params.sigma_1 / s2,
        theta_z: params.sigma_z * params.sigma_z / s2,
    }
}

/// `i = alpha * v`, `x = beta * signal`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearStrategies {
    pub alpha: f64,
    pub beta: f64,
}

impl LinearStrategies {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::NonFinite { name: "alpha" });
        }
        if !beta.is_finite() {
            return Err(Error::NonFinite { name: "beta" });
        }
        if alpha <= 0.0 {
            return Err(Error::InvalidConfig(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self { alpha, beta })
    }
}

/// Dealer pricing rule `p1 = lambda_1 y1`, `p2 = mu_1 y1 + mu_2 y2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PricingCoefficients {
    pub lambda_1: f64,
    pub mu_1: f64,
    pub mu_2: f64,
}

/// What the HFT's signal is a noisy reading of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalStructure {
    /// `signal = i + z`
    OwnOrder,
    /// `signal = i + u2 + z`
    AggregateOrder,
}

impl SignalStructure {
    pub fn as_str(&self) -> &'static str {
        match self {
            SignalStructure::OwnOrder => "own",
            SignalStructure::AggregateOrder => "aggregate",
        }
    }
}

/// Second moments of `(v, signal, y1, y2)` under linear strategies.
///
/// With `q` the quantity the HFT predicts (`i` or `i + u2`) and `s = q + z`:
/// `y1 = beta q + beta z + u1` and `y2 = (1 - beta) q - beta z` plus `u2`
/// when `u2` is not already inside `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFlowMoments {
    pub var_v: f64,
    pub cov_v_y1: f64,
    pub cov_v_y2: f64,
    pub var_y1: f64,
    pub var_y2: f64,
    pub cov_y1_y2: f64,
    /// `Var(signal)`
    pub var_signal: f64,
    /// `Cov(signal, i + u2)`: what the HFT's time-2 unwind trades against.
    pub cov_signal_flow: f64,
}

impl OrderFlowMoments {
    pub fn new(strategies: LinearStrategies, structure: SignalStructure, params: &ModelParams) -> Self {
        let LinearStrategies { alpha, beta } = strategies;
        let var_v = params.sigma_v * params.sigma_v;
        let var_u1 = params.sigma_1 * params.sigma_1;
        let var_u2 = params.sigma_2 * params.sigma_2;
        let var_z = params.sigma_z * params.sigma_z;
        let var_i = alpha * alpha * var_v;

        let (var_q, residual_u2) = match structure {
            SignalStructure::OwnOrder => (var_i, var_u2),
            SignalStructure::AggregateOrder => (var_i + var_u2, 0.0),
        };
        let keep = 1.0 - beta;

        Self {
            var_v,
            cov_v_y1: beta * alpha * var_v,
            cov_v_y2: keep * alpha * var_v,
            var_y1: beta * beta * (var_q + var_z) + var_u1,
            var_y2: keep * keep * var_q + beta * beta * var_z + residual_u2,
            cov_y1_y2: beta * keep * var_q - beta * beta * var_z,
            var_signal: var_q + var_z,
            cov_signal_flow: var_i + var_u2 - residual_u2,
        }
    }

    /// Correlation of the two order flows.
    pub fn flow_correlation(&self) -> f64 {
        self.cov_y1_y2 / (self.var_y1 * self.var_y2).sqrt()
    }

    fn gram_determinant(&self) -> f64 {
        self.var_y1 * self.var_y2 - self.cov_y1_y2 * self.cov_y1_y2
    }
}

// Relative size below which the 2x2 Gram determinant is treated as zero.
const SINGULAR_RTOL: f64 = 1e-14;

/// Weak-efficiency pricing coefficients for arbitrary linear strategies.
pub fn dealer_pricing(
    strategies: LinearStrategies,
    structure: SignalStructure,
    params: &ModelParams,
) -> Result<PricingCoefficients> {
    let m = OrderFlowMoments::new(strategies, structure, params);
    if !(m.var_y1 > 0.0) {
        return Err(Error::SingularInformation("Var(y1) = 0".into()));
    }
    let det = m.gram_determinant();
    if !(det > SINGULAR_RTOL * m.var_y1 * m.var_y2) {
        return Err(Error::SingularInformation(format!(
            "Gram matrix of (y1, y2) is singular (det {det:e})"
        )));
    }
    Ok(PricingCoefficients {
        lambda_1: m.cov_v_y1 / m.var_y1,
        mu_1: (m.var_y2 * m.cov_v_y1 - m.cov_y1_y2 * m.cov_v_y2) / det,
        mu_2: (m.var_y1 * m.cov_v_y2 - m.cov_y1_y2 * m.cov_v_y1) / det,
    })
}

/// Time-2 impact on the order-flow innovation: `p2 = p1 + lambda_2 (y2 - E[y2 | y1])`.
///
/// This is an interpretation; the model only pins down `p2` as a function of
/// `(y1, y2)`. Under it `lambda_2` coincides with `mu_2` analytically.
pub fn innovation_impact(
    strategies: LinearStrategies,
    structure: SignalStructure,
    params: &ModelParams,
) -> Result<f64> {
    let m = OrderFlowMoments::new(strategies, structure, params);
    if !(m.var_y1 > 0.0) {
        return Err(Error::SingularInformation("Var(y1) = 0".into()));
    }
    let slope = m.cov_y1_y2 / m.var_y1;
    let var_innovation = m.var_y2 - slope * m.cov_y1_y2;
    if !(var_innovation > SINGULAR_RTOL * m.var_y2) {
        return Err(Error::SingularInformation("y2 is predictable from y1".into()));
    }
    let cov_v_innovation = m.cov_v_y2 - slope * m.cov_v_y1;
    Ok(cov_v_innovation / var_innovation)
}

/// Per unit of `i`, the expected time-2 price the IT pays: `E[p2 | v, i] = k i`.
pub fn it_price_sensitivity(beta: f64, pricing: &PricingCoefficients) -> f64 {
    pricing.mu_1 * beta + pricing.mu_2 * (1.0 - beta)
}

/// `E[(v - p2) i]` for the IT playing `alpha` against a fixed `beta` and pricing rule.
pub fn it_expected_profit(alpha: f64, beta: f64, pricing: &PricingCoefficients, params: &ModelParams) -> f64 {
    let var_v = params.sigma_v * params.sigma_v;
    alpha * var_v * (1.0 - it_price_sensitivity(beta, pricing) * alpha)
}

/// `E[(p2 - p1) x]` for the HFT playing `beta` against a fixed `alpha` and pricing rule.
///
/// Conditional on the signal `s`, the HFT earns
/// `x ((mu_1 - lambda_1 - mu_2) x + mu_2 E[i + u2 | s])`; integrating over `s`
/// with `x = beta s` gives the expression below.
pub fn hft_expected_profit_for(
    strategies: LinearStrategies,
    pricing: &PricingCoefficients,
    structure: SignalStructure,
    params: &ModelParams,
) -> f64 {
    let m = OrderFlowMoments::new(strategies, structure, params);
    let beta = strategies.beta;
    let curvature = pricing.mu_1 - pricing.lambda_1 - pricing.mu_2;
    curvature * beta * beta * m.var_signal + pricing.mu_2 * beta * m.cov_signal_flow
}

/// Projection weight of the predicted flow on the HFT's signal.
pub fn signal_weight(alpha: f64, structure: SignalStructure, params: &ModelParams) -> f64 {
    let var_i = alpha * alpha * params.sigma_v * params.sigma_v;
    let var_z = params.sigma_z * params.sigma_z;
    let var_q = match structure {
        SignalStructure::OwnOrder => var_i,
        SignalStructure::AggregateOrder => var_i + params.sigma_2 * params.sigma_2,
    };
    var_q / (var_q + var_z)
}
