use thiserror::Error;

/// Everything that can go wrong while building, solving or simulating a market.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be strictly positive, got {value}")]
    NonPositiveSigma { name: &'static str, value: f64 },

    #[error("{name} must be non-negative, got {value}")]
    NegativeSigma { name: &'static str, value: f64 },

    #[error("{name} must be finite")]
    NonFinite { name: &'static str },

    #[error("{0}")]
    ThetaOutOfDomain(String),

    #[error("{0}")]
    InvalidConfig(String),

    #[error("singular information set: {0}")]
    SingularInformation(String),

    #[error("no root of the beta polynomial in (0,1); real roots found: {roots:?}")]
    NoRootInUnitInterval { roots: Vec<f64> },

    #[error("{} roots of the beta polynomial in (0,1): {roots:?}", roots.len())]
    MultipleRootsInUnitInterval { roots: Vec<f64> },

    #[error("{agent} objective is not concave (curvature {curvature})")]
    NonConcaveObjective { agent: &'static str, curvature: f64 },

    #[error("fixed point did not converge after {iterations} iterations (residual {residual})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        /// Last few `(alpha, beta, lambda_1, mu_1, mu_2)` iterates.
        tail: Vec<[f64; 5]>,
    },

    #[error("welfare region formula disagrees with the solved alpha at theta1={theta_1}, thetaz={theta_z} (alpha_norm={alpha_norm})")]
    WelfareDisagreement { theta_1: f64, theta_z: f64, alpha_norm: f64 },

    #[error("degenerate regressor: {0}")]
    DegenerateRegressor(String),
}

impl Error {
    /// Stable machine-readable tag, used in CLI error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveSigma { .. } => "NonPositiveSigma",
            Error::NegativeSigma { .. } => "NegativeSigma",
            Error::NonFinite { .. } => "NonFinite",
            Error::ThetaOutOfDomain(_) => "ThetaOutOfDomain",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::SingularInformation(_) => "SingularInformation",
            Error::NoRootInUnitInterval { .. } => "NoRootInUnitInterval",
            Error::MultipleRootsInUnitInterval { .. } => "MultipleRootsInUnitInterval",
            Error::NonConcaveObjective { .. } => "NonConcaveObjective",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::WelfareDisagreement { .. } => "WelfareDisagreement",
            Error::DegenerateRegressor(_) => "DegenerateRegressor",
        }
    }

    /// True for errors caused by bad input rather than by a failing solver.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveSigma { .. }
                | Error::NegativeSigma { .. }
                | Error::NonFinite { .. }
                | Error::ThetaOutOfDomain(_)
                | Error::InvalidConfig(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
