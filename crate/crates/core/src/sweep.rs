//! Comparative-statics grids and their CSV rendering.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::equilibrium::{classify_welfare, solve_equilibrium, theta_z_bar, WelfareClass, WELFARE_TOL};
use crate::error::{Error, Result};
use crate::model::{ModelParams, ThetaPair};

pub const SWEEP_HEADER: &str = "theta1,thetaz,beta,alpha_norm,profit_it_norm,profit_hft_norm,lambda1,mu1,mu2,welfare";
pub const BASELINE_HEADER: &str = "alpha_norm_baseline,profit_it_norm_baseline";
pub const CLASSIFY_HEADER: &str = "theta1,thetaz,welfare,theta_z_bar";

/// 17 significant digits; parses back to the identical `f64`.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "NaN".to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Theta1,
    ThetaZ,
}

/// Evenly spaced points, on a linear or logarithmic scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub scale: Scale,
}

impl GridAxis {
    pub fn new(from: f64, to: f64, points: usize, scale: Scale) -> Result<Self> {
        let axis = Self { from, to, points, scale };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(Error::NonFinite { name: "grid bounds" });
        }
        if !(self.from < self.to) {
            return Err(Error::InvalidConfig(format!("grid needs from < to, got {} >= {}", self.from, self.to)));
        }
        if self.scale == Scale::Log && !(self.from > 0.0) {
            return Err(Error::InvalidConfig("log-scale grid needs from > 0".into()));
        }
        if self.points < 2 {
            return Err(Error::InvalidConfig("grid needs at least 2 points".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    return self.to;
                }
                let t = k as f64 / last;
                match self.scale {
                    Scale::Linear => self.from + t * (self.to - self.from),
                    Scale::Log => (self.from.ln() + t * (self.to.ln() - self.from.ln())).exp(),
                }
            })
            .collect()
    }
}

/// One comparative-statics sweep along a single theta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub grid: GridAxis,
    /// Value of the other theta.
    pub held: f64,
    pub sigma_v: f64,
    pub sigma_2: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !(self.held >= 0.0) || !self.held.is_finite() {
            return Err(Error::InvalidConfig(format!("held theta must be finite and >= 0, got {}", self.held)));
        }
        ModelParams::new(self.sigma_v, 0.0, self.sigma_2, 0.0).map(|_| ())
    }

    pub fn thetas(&self) -> Vec<ThetaPair> {
        self.grid
            .values()
            .into_iter()
            .map(|g| match self.axis {
                SweepAxis::Theta1 => ThetaPair::new(g, self.held),
                SweepAxis::ThetaZ => ThetaPair::new(self.held, g),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepValues {
    pub beta: f64,
    pub alpha_norm: f64,
    pub profit_it_norm: f64,
    pub profit_hft_norm: f64,
    pub lambda_1: f64,
    pub mu_1: f64,
    pub mu_2: f64,
    pub welfare: WelfareClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub thetas: ThetaPair,
    pub values: Result<SweepValues>,
}

fn sweep_point(thetas: ThetaPair, sigma_v: f64, sigma_2: f64) -> Result<SweepValues> {
    let params = ModelParams::from_thetas(thetas, sigma_v, sigma_2)?;
    let eq = solve_equilibrium(&params)?;
    let scale = params.profit_scale();
    Ok(SweepValues {
        beta: eq.strategies.beta,
        alpha_norm: eq.alpha_normalized(&params),
        profit_it_norm: eq.profit_it / scale,
        profit_hft_norm: eq.profit_hft / scale,
        lambda_1: eq.pricing.lambda_1,
        mu_1: eq.pricing.mu_1,
        mu_2: eq.pricing.mu_2,
        welfare: classify_welfare(thetas, WELFARE_TOL)?,
    })
}

/// Solves every grid point; failures are kept per row, in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    Ok(spec
        .thetas()
        .into_par_iter()
        .map(|thetas| SweepRow {
            thetas,
            values: sweep_point(thetas, spec.sigma_v, spec.sigma_2),
        })
        .collect())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], baseline: bool, mut out: W) -> io::Result<()> {
    if baseline {
        writeln!(out, "{SWEEP_HEADER},{BASELINE_HEADER}")?;
    } else {
        writeln!(out, "{SWEEP_HEADER}")?;
    }
    for row in rows {
        let mut fields = vec![format_number(row.thetas.theta_1), format_number(row.thetas.theta_z)];
        match &row.values {
            Ok(v) => {
                fields.extend(
                    [v.beta, v.alpha_norm, v.profit_it_norm, v.profit_hft_norm, v.lambda_1, v.mu_1, v.mu_2]
                        .map(format_number),
                );
                fields.push(v.welfare.as_str().to_string());
            }
            Err(e) => {
                fields.extend(std::iter::repeat_n("NaN".to_string(), 7));
                fields.push(format!("error:{}", e.kind()));
            }
        }
        if baseline {
            fields.push(format_number(1.0));
            fields.push(format_number(1.0));
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyRow {
    pub thetas: ThetaPair,
    pub welfare: Result<WelfareClass>,
    pub theta_z_bar: Option<f64>,
}

/// Welfare over the product grid `theta1 x thetaz`, theta1-major.
pub fn run_classify(theta_1: &GridAxis, theta_z: &GridAxis) -> Result<Vec<ClassifyRow>> {
    theta_1.validate()?;
    theta_z.validate()?;
    let zs = theta_z.values();
    let points: Vec<ThetaPair> = theta_1
        .values()
        .into_iter()
        .flat_map(|t1| zs.iter().map(move |&tz| ThetaPair::new(t1, tz)))
        .collect();
    Ok(points
        .into_par_iter()
        .map(|thetas| ClassifyRow {
            thetas,
            welfare: classify_welfare(thetas, WELFARE_TOL),
            theta_z_bar: theta_z_bar(thetas.theta_1).ok(),
        })
        .collect())
}

pub fn write_classify_csv<W: Write>(rows: &[ClassifyRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CLASSIFY_HEADER}")?;
    for row in rows {
        let welfare = match &row.welfare {
            Ok(w) => w.as_str().to_string(),
            Err(e) => format!("error:{}", e.kind()),
        };
        let bar = row.theta_z_bar.map(format_number).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{}",
            format_number(row.thetas.theta_1),
            format_number(row.thetas.theta_z),
            welfare,
            bar
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0_f64.sqrt() * 1e-300, 12345.678901234567, -0.0] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
        assert_eq!(format_number(f64::NAN), "NaN");
    }

    #[test]
    fn grid_validation_and_values() {
        assert!(GridAxis::new(1.0, 1.0, 5, Scale::Linear).is_err());
        assert!(GridAxis::new(0.0, 1.0, 5, Scale::Log).is_err());
        assert!(GridAxis::new(0.0, 1.0, 1, Scale::Linear).is_err());
        let g = GridAxis::new(1e-2, 25.0, 7, Scale::Log).unwrap().values();
        assert_eq!(g.len(), 7);
        assert!((g[0] - 1e-2).abs() < 1e-17);
        assert_eq!(g[6], 25.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(GridAxis::new(0.0, 1.0, 3, Scale::Linear).unwrap().values(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn failing_point_keeps_the_sweep_going() {
        let spec = SweepSpec {
            axis: SweepAxis::Theta1,
            grid: GridAxis::new(0.0, 1.0, 3, Scale::Linear).unwrap(),
            held: 0.04,
            sigma_v: 1.0,
            sigma_2: 1.0,
        };
        let rows = run_sweep(&spec).unwrap();
        assert!(rows[0].values.is_err());
        assert!(rows[1].values.is_ok() && rows[2].values.is_ok());
        let mut buf = Vec::new();
        write_sweep_csv(&rows, true, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("{SWEEP_HEADER},{BASELINE_HEADER}"));
        assert!(lines[1].contains("error:ThetaOutOfDomain"));
        assert_eq!(lines[2].split(',').count(), 12);
    }

    #[test]
    fn classify_rows_carry_threshold() {
        let t1 = GridAxis::new(0.1, 0.2, 2, Scale::Linear).unwrap();
        let tz = GridAxis::new(0.0, 5.0, 2, Scale::Linear).unwrap();
        let rows = run_classify(&t1, &tz).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].theta_z_bar, theta_z_bar(0.1).ok());
        assert_eq!(rows[3].theta_z_bar, None);
        assert_eq!(rows[3].welfare, Ok(WelfareClass::Benefited));
        assert_eq!(rows[0].welfare, Ok(WelfareClass::Harmed));
    }
}
