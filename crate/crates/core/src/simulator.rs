//! Monte Carlo play of the literal two-period game.
//!
//! Paths are generated in fixed-size blocks, each from its own ChaCha stream
//! keyed by `(seed, block index)`. Blocks may run on any number of threads;
//! their sums are combined by a fixed pairwise tree in block order, so a
//! result depends only on `(seed, n_paths, antithetic)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{hft_expected_profit_for, it_expected_profit, LinearStrategies, ModelParams, PricingCoefficients, SignalStructure};

/// Sampling units (paths, or antithetic pairs) per random stream.
const BLOCK_UNITS: usize = 1 << 14;

pub const MIN_PATHS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub n_paths: usize,
    pub seed: u64,
    /// Pair each draw with its negation. Every per-path quantity here is an
    /// even function of the shocks, so pairs are exact duplicates: standard
    /// errors are computed over pairs and no variance is saved.
    pub antithetic: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            n_paths: 1_000_000,
            seed: 0,
            antithetic: false,
        }
    }
}

/// A sample estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Distance to `target` in standard errors. Zero when both coincide exactly.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = self.value - target;
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationResult {
    pub est_profit_it: Estimate,
    pub est_profit_hft: Estimate,
    /// Through-origin regression of `v` on `y1`.
    pub lambda_1: Estimate,
    /// Regression of `v` on `(y1, y2)`.
    pub mu_1: Estimate,
    pub mu_2: Estimate,
    /// Normal-equation residuals `sum((v - mu_1 y1 - mu_2 y2) y_k)`, relative to `sum(|v y_k|)`-scale.
    pub orthogonality: [f64; 2],
    pub n_paths: usize,
    pub seed: u64,
    pub antithetic: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    units: f64,
    it: f64,
    it2: f64,
    hft: f64,
    hft2: f64,
    y11: f64,
    y12: f64,
    y22: f64,
    vy1: f64,
    vy2: f64,
    vv: f64,
}

impl Sums {
    fn merge(self, o: Sums) -> Sums {
        Sums {
            units: self.units + o.units,
            it: self.it + o.it,
            it2: self.it2 + o.it2,
            hft: self.hft + o.hft,
            hft2: self.hft2 + o.hft2,
            y11: self.y11 + o.y11,
            y12: self.y12 + o.y12,
            y22: self.y22 + o.y22,
            vy1: self.vy1 + o.vy1,
            vy2: self.vy2 + o.vy2,
            vv: self.vv + o.vv,
        }
    }
}

fn pairwise_sum(parts: &[Sums]) -> Sums {
    match parts.len() {
        0 => Sums::default(),
        1 => parts[0],
        n => pairwise_sum(&parts[..n / 2]).merge(pairwise_sum(&parts[n / 2..])),
    }
}

struct Game<'a> {
    params: &'a ModelParams,
    strategies: LinearStrategies,
    pricing: &'a PricingCoefficients,
    structure: SignalStructure,
}

impl Game<'_> {
    /// One path from standard normal shocks; returns `(pi_it, pi_hft, v, y1, y2)`.
    fn play(&self, shocks: [f64; 4]) -> (f64, f64, f64, f64, f64) {
        let p = self.params;
        let v = p.sigma_v() * shocks[0];
        let z = p.sigma_z() * shocks[1];
        let u1 = p.sigma_1() * shocks[2];
        let u2 = p.sigma_2() * shocks[3];

        let i = self.strategies.alpha * v;
        let signal = match self.structure {
            SignalStructure::OwnOrder => i + z,
            SignalStructure::AggregateOrder => i + u2 + z,
        };
        let x = self.strategies.beta * signal;
        let y1 = x + u1;
        let y2 = i + u2 - x;
        let p1 = self.pricing.lambda_1 * y1;
        let p2 = self.pricing.mu_1 * y1 + self.pricing.mu_2 * y2;
        ((v - p2) * i, (p2 - p1) * x, v, y1, y2)
    }

    fn block(&self, seed: u64, index: usize, units: usize, antithetic: bool) -> Sums {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let mut s = Sums { units: units as f64, ..Sums::default() };
        let signs: &[f64] = if antithetic { &[1.0, -1.0] } else { &[1.0] };
        let weight = 1.0 / signs.len() as f64;
        for _ in 0..units {
            let shocks: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let (mut it, mut hft) = (0.0, 0.0);
            for &sign in signs {
                let (pi_it, pi_hft, v, y1, y2) = self.play(shocks.map(|e| sign * e));
                it += weight * pi_it;
                hft += weight * pi_hft;
                s.y11 += y1 * y1;
                s.y12 += y1 * y2;
                s.y22 += y2 * y2;
                s.vy1 += v * y1;
                s.vy2 += v * y2;
                s.vv += v * v;
            }
            s.it += it;
            s.it2 += it * it;
            s.hft += hft;
            s.hft2 += hft * hft;
        }
        s
    }
}

fn mean_estimate(sum: f64, sum_sq: f64, n: f64) -> Estimate {
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Estimate { value: mean, std_error: (var / n).sqrt() }
}

/// Simulates the game with mechanical dealers quoting `pricing`, and checks
/// weak efficiency by regressing `v` on the realized order flows.
pub fn simulate_game(
    params: &ModelParams,
    strategies: LinearStrategies,
    pricing: &PricingCoefficients,
    structure: SignalStructure,
    config: &SimulationConfig,
) -> Result<SimulationResult> {
    if config.n_paths < MIN_PATHS {
        return Err(Error::InvalidConfig(format!(
            "n_paths must be at least {MIN_PATHS}, got {}",
            config.n_paths
        )));
    }
    if config.antithetic && !config.n_paths.is_multiple_of(2) {
        return Err(Error::InvalidConfig("antithetic sampling needs an even n_paths".into()));
    }
    let per_unit = if config.antithetic { 2 } else { 1 };
    let units = config.n_paths / per_unit;
    let game = Game { params, strategies, pricing, structure };

    let n_blocks = units.div_ceil(BLOCK_UNITS);
    let parts: Vec<Sums> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK_UNITS.min(units - b * BLOCK_UNITS);
            game.block(config.seed, b, len, config.antithetic)
        })
        .collect();
    let s = pairwise_sum(&parts);

    let n = s.units;
    let paths = config.n_paths as f64;
    // Duplicated antithetic paths inflate the Gram matrix without adding information.
    let dup = per_unit as f64;

    if !(s.y11 > 0.0) {
        return Err(Error::DegenerateRegressor("y1 is identically zero".into()));
    }
    let det = s.y11 * s.y22 - s.y12 * s.y12;
    if !(det > 1e-12 * s.y11 * s.y22) {
        return Err(Error::DegenerateRegressor("sample Gram matrix of (y1, y2) is singular".into()));
    }

    let lambda_1 = s.vy1 / s.y11;
    let rss_1 = (s.vv - lambda_1 * s.vy1).max(0.0);
    let se_lambda_1 = (rss_1 / (paths - 1.0) / s.y11 * dup).sqrt();

    let mu_1 = (s.y22 * s.vy1 - s.y12 * s.vy2) / det;
    let mu_2 = (s.y11 * s.vy2 - s.y12 * s.vy1) / det;
    let rss_2 = (s.vv - mu_1 * s.vy1 - mu_2 * s.vy2).max(0.0);
    let s2 = rss_2 / (paths - 2.0) * dup;
    let orthogonality = [
        (s.vy1 - mu_1 * s.y11 - mu_2 * s.y12) / (s.vy1.abs() + (mu_1 * s.y11).abs() + (mu_2 * s.y12).abs()),
        (s.vy2 - mu_1 * s.y12 - mu_2 * s.y22) / (s.vy2.abs() + (mu_1 * s.y12).abs() + (mu_2 * s.y22).abs()),
    ];

    Ok(SimulationResult {
        est_profit_it: mean_estimate(s.it, s.it2, n),
        est_profit_hft: mean_estimate(s.hft, s.hft2, n),
        lambda_1: Estimate { value: lambda_1, std_error: se_lambda_1 },
        mu_1: Estimate { value: mu_1, std_error: (s2 * s.y22 / det).sqrt() },
        mu_2: Estimate { value: mu_2, std_error: (s2 * s.y11 / det).sqrt() },
        orthogonality,
        n_paths: config.n_paths,
        seed: config.seed,
        antithetic: config.antithetic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScanAxis {
    /// Vary the IT intensity; `fixed_other` is the HFT's `beta`.
    ItAlpha,
    /// Vary the HFT intensity; `fixed_other` is the IT's `alpha`.
    HftBeta,
}

/// Analytic expected profit of one deviating agent over `grid`, with the
/// other agent and the pricing rule held fixed.
pub fn profit_scan(
    params: &ModelParams,
    pricing: &PricingCoefficients,
    structure: SignalStructure,
    scan_axis: ScanAxis,
    fixed_other: f64,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("scan grid is empty".into()));
    }
    if !fixed_other.is_finite() || grid.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite { name: "scan grid" });
    }
    Ok(grid
        .iter()
        .map(|&g| {
            let profit = match scan_axis {
                ScanAxis::ItAlpha => it_expected_profit(g, fixed_other, pricing, params),
                ScanAxis::HftBeta => hft_expected_profit_for(
                    LinearStrategies { alpha: fixed_other, beta: g },
                    pricing,
                    structure,
                    params,
                ),
            };
            (g, profit)
        })
        .collect())
}
