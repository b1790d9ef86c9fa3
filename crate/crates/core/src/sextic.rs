//! The equilibrium HFT intensity as the root of a degree-six polynomial.
//!
//! For `theta_1 > 0` the HFT intensity is the unique root in `(0, 1)` of a
//! sextic whose coefficients are polynomials in `(theta_1, theta_z)`. Roots are
//! isolated by splitting `[0, 1]` at the real roots of the derivative (found
//! recursively), so every monotone piece holds at most one root and none is
//! missed. Each sign change is then bisected and Newton-polished.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ThetaPair;

pub const DEFAULT_TOL: f64 = 1e-12;

// Coefficients below this magnitude do not count towards the degree.
const TRIM_EPS: f64 = 1e-300;

/// Coefficients of the equilibrium polynomial, degree-6 term first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaPolynomial {
    pub coefficients: [f64; 7],
    pub thetas: ThetaPair,
}

pub fn build_beta_polynomial(thetas: ThetaPair) -> Result<BetaPolynomial> {
    let ThetaPair { theta_1: a, theta_z: z } = thetas;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::ThetaOutOfDomain(format!(
            "theta1 must be > 0 for the equilibrium polynomial, got {a}"
        )));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::ThetaOutOfDomain(format!("thetaz must be >= 0, got {z}")));
    }
    let (a2, a3) = (a * a, a * a * a);
    let (z2, z3) = (z * z, z * z * z);

    // Term by term, in print order; at z = 0 the top three are exact zeros.
    let c6 = 4.0 * a * z2 + a * z3 + 2.0 * a2 * z2 + 2.0 * z2 + z3;
    let c5 = 4.0 * a * z + 4.0 * a * z2 + 2.0 * a * z3 + 8.0 * a2 * z + 4.0 * a2 * z2 + 4.0 * a3 * z;
    let c4 = 2.0 * a * z + a * z2 - 11.0 * a2 * z - 8.0 * a2 * z2 - 13.0 * a3 * z;
    let c3 = 2.0 * a2 + 2.0 * a3 + 8.0 * a2 * z + 4.0 * a2 * z2 + 16.0 * a3 * z;
    let c2 = -(a2 * z + 5.0 * a3 + 9.0 * a3 * z);
    let c1 = 4.0 * a3 + 2.0 * a3 * z;
    let c0 = -a3;

    Ok(BetaPolynomial {
        coefficients: [c6, c5, c4, c3, c2, c1, c0],
        thetas,
    })
}

impl BetaPolynomial {
    pub fn evaluate(&self, beta: f64) -> f64 {
        self.coefficients.iter().fold(0.0, |acc, &c| acc * beta + c)
    }

    /// Sum of absolute coefficients, the scale for residual checks.
    pub fn abs_sum(&self) -> f64 {
        self.coefficients.iter().map(|c| c.abs()).sum()
    }

    /// Coefficients lowest degree first.
    pub fn ascending(&self) -> Vec<f64> {
        self.coefficients.iter().rev().copied().collect()
    }

    pub fn degree(&self) -> usize {
        trim(&self.ascending()).len().saturating_sub(1)
    }

    pub fn roots_in_unit_interval(&self, tol: f64) -> UnitIntervalRoots {
        classify_unit_roots(&self.ascending(), tol)
    }
}

/// Real roots found on `[0, 1]`, split by whether they are interior.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitIntervalRoots {
    pub interior: Vec<f64>,
    /// Roots within `tol` of 0 or 1; never accepted as equilibria.
    pub at_endpoints: Vec<f64>,
}

impl UnitIntervalRoots {
    fn all(&self) -> Vec<f64> {
        let mut all = self.at_endpoints.clone();
        all.extend(&self.interior);
        all.sort_by(f64::total_cmp);
        all
    }

    fn into_unique(self) -> Result<f64> {
        match self.interior.len() {
            1 => Ok(self.interior[0]),
            0 => Err(Error::NoRootInUnitInterval { roots: self.all() }),
            _ => Err(Error::MultipleRootsInUnitInterval { roots: self.interior }),
        }
    }
}

/// A solved root plus its polynomial residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaRoot {
    pub beta: f64,
    pub residual: f64,
    pub abs_coefficient_sum: f64,
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= 1e-6 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("root tolerance must lie in (0, 1e-6], got {tol}")))
    }
}

/// Unique root of the equilibrium polynomial in `(0, 1)`.
pub fn solve_beta(thetas: ThetaPair, tol: f64) -> Result<f64> {
    solve_beta_detailed(thetas, tol).map(|r| r.beta)
}

pub fn solve_beta_detailed(thetas: ThetaPair, tol: f64) -> Result<BetaRoot> {
    check_tol(tol)?;
    let poly = build_beta_polynomial(thetas)?;
    let beta = poly.roots_in_unit_interval(tol).into_unique()?;
    Ok(BetaRoot {
        beta,
        residual: poly.evaluate(beta).abs(),
        abs_coefficient_sum: poly.abs_sum(),
    })
}

/// Limit polynomial as `theta_1 -> infinity`, lowest degree first.
pub fn theta1_infinity_polynomial(theta_z: f64) -> [f64; 6] {
    let z = theta_z;
    [
        -1.0,
        4.0 + 2.0 * z,
        -(5.0 + 9.0 * z),
        2.0 + 16.0 * z,
        -13.0 * z,
        4.0 * z,
    ]
}

/// HFT intensity in the limit of unbounded fast noise trading.
pub fn limit_beta_theta1_infinity(theta_z: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if !(theta_z >= 0.0) || !theta_z.is_finite() {
        return Err(Error::ThetaOutOfDomain(format!("thetaz must be >= 0, got {theta_z}")));
    }
    classify_unit_roots(&theta1_infinity_polynomial(theta_z), tol).into_unique()
}

fn classify_unit_roots(ascending: &[f64], tol: f64) -> UnitIntervalRoots {
    let (at_endpoints, interior) = real_roots_in(ascending, 0.0, 1.0, tol)
        .into_iter()
        .partition(|&r| r <= tol || r >= 1.0 - tol);
    UnitIntervalRoots { interior, at_endpoints }
}

fn trim(ascending: &[f64]) -> &[f64] {
    let len = ascending
        .iter()
        .rposition(|c| c.abs() >= TRIM_EPS)
        .map_or(0, |i| i + 1);
    &ascending[..len]
}

fn horner(ascending: &[f64], x: f64) -> f64 {
    ascending.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn derivative(ascending: &[f64]) -> Vec<f64> {
    ascending
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

/// All real roots in `[lo, hi]` of a polynomial given lowest degree first,
/// sorted ascending and each located to within `tol`.
///
/// Roots of even multiplicity are reported only when the polynomial evaluates
/// to exactly zero at a critical point.
pub fn real_roots_in(ascending: &[f64], lo: f64, hi: f64, tol: f64) -> Vec<f64> {
    let p = trim(ascending);
    match p.len() {
        0 | 1 => return Vec::new(),
        2 => {
            let r = -p[0] / p[1];
            return if (lo..=hi).contains(&r) { vec![r] } else { Vec::new() };
        }
        _ => {}
    }

    let mut knots = vec![lo];
    knots.extend(real_roots_in(&derivative(p), lo, hi, tol).into_iter().filter(|&c| c > lo && c < hi));
    knots.push(hi);

    let mut roots: Vec<f64> = Vec::new();
    let push = |r: f64, roots: &mut Vec<f64>| {
        if roots.last().is_none_or(|&last| r - last > tol) {
            roots.push(r);
        }
    };
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (horner(p, a), horner(p, b));
        if fa == 0.0 {
            push(a, &mut roots);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            push(bisect(p, a, b, fa, tol), &mut roots);
        }
    }
    if horner(p, hi) == 0.0 {
        push(hi, &mut roots);
    }
    roots
}

/// Root of `p` in `(a, b)` given `p(a)` and a sign change across the bracket.
fn bisect(p: &[f64], mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = horner(p, mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    newton_polish(p, a, b)
}

fn newton_polish(p: &[f64], a: f64, b: f64) -> f64 {
    let dp = derivative(p);
    let mut x = 0.5 * (a + b);
    let mut fx = horner(p, x);
    for _ in 0..8 {
        if fx == 0.0 {
            break;
        }
        let slope = horner(&dp, x);
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let next = x - fx / slope;
        if !(next >= a && next <= b) {
            break;
        }
        let fnext = horner(p, next);
        if fnext.abs() >= fx.abs() {
            break;
        }
        x = next;
        fx = fnext;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn th(a: f64, z: f64) -> ThetaPair {
        ThetaPair::new(a, z)
    }

    // Independent of the solver: plain bisection on the cubic 4b^3 - 5b^2 + 4b - 1.
    fn cubic_oracle() -> f64 {
        let f = |b: f64| ((4.0 * b - 5.0) * b + 4.0) * b - 1.0;
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        lo
    }

    // Frozen from `cubic_oracle`.
    const BETA_THETA1_1_THETAZ_0: f64 = 0.370_972_063_760_763_64;

    #[test]
    fn cubic_when_signal_is_perfect() {
        let p = build_beta_polynomial(th(1.0, 0.0)).unwrap();
        assert_eq!(p.coefficients, [0.0, 0.0, 0.0, 4.0, -5.0, 4.0, -1.0]);
        assert_eq!(p.degree(), 3);
    }

    #[test]
    fn perfect_signal_root_matches_oracle() {
        assert_abs_diff_eq!(cubic_oracle(), BETA_THETA1_1_THETAZ_0, epsilon = 1e-15);
        let beta = solve_beta(th(1.0, 0.0), DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(beta, BETA_THETA1_1_THETAZ_0, epsilon = 1e-12);
    }

    #[test]
    fn signs_of_extreme_coefficients() {
        for a in [1e-4, 0.1, 1.0, 30.0] {
            for z in [1e-3, 0.5, 20.0] {
                let p = build_beta_polynomial(th(a, z)).unwrap();
                assert!(p.coefficients[0] > 0.0);
                assert!(p.coefficients[6] < 0.0);
                assert_eq!(p.coefficients[6], -a * a * a);
                assert_eq!(p.degree(), 6);
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(build_beta_polynomial(th(0.0, 1.0)), Err(Error::ThetaOutOfDomain(_))));
        assert!(matches!(build_beta_polynomial(th(-1.0, 1.0)), Err(Error::ThetaOutOfDomain(_))));
        assert!(matches!(solve_beta(th(1.0, 1.0), 0.0), Err(Error::InvalidConfig(_))));
        assert!(matches!(solve_beta(th(1.0, 1.0), 1e-3), Err(Error::InvalidConfig(_))));
        assert!(limit_beta_theta1_infinity(-0.1, DEFAULT_TOL).is_err());
    }

    #[test]
    fn huge_theta1_approaches_one_half() {
        let beta = solve_beta(th(1e9, 0.0), DEFAULT_TOL).unwrap();
        assert!(beta < 0.5);
        assert_abs_diff_eq!(beta, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn huge_signal_noise_kills_front_running() {
        assert!(solve_beta(th(1.0, 1e6), DEFAULT_TOL).unwrap() < 1e-3);
    }

    #[test]
    fn quintic_limit() {
        assert_eq!(limit_beta_theta1_infinity(0.0, DEFAULT_TOL).unwrap(), 0.5);
        let lim = limit_beta_theta1_infinity(0.04, DEFAULT_TOL).unwrap();
        let finite = solve_beta(th(1e8, 0.04), DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(lim, finite, epsilon = 1e-4);

        let big = limit_beta_theta1_infinity(1e6, DEFAULT_TOL).unwrap();
        assert!(big < 1e-2);
        // Cross-check against a bare bracketing bisection on the same quintic.
        let q = theta1_infinity_polynomial(1e6);
        let (mut lo, mut hi) = (0.0_f64, 1e-2_f64);
        assert!(horner(&q, lo) < 0.0 && horner(&q, hi) > 0.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if horner(&q, mid) < 0.0 { lo = mid } else { hi = mid }
        }
        assert_abs_diff_eq!(big, lo, epsilon = 1e-12);
    }

    #[test]
    fn endpoint_roots_are_rejected() {
        // (b - 1)^2 (2b - 1): the double root at 1 is reported but not accepted.
        let roots = classify_unit_roots(&theta1_infinity_polynomial(0.0), DEFAULT_TOL);
        assert_eq!(roots.interior, vec![0.5]);
        assert_eq!(roots.at_endpoints, vec![1.0]);
    }

    #[test]
    fn multiple_roots_are_an_error() {
        // (b - 0.25)(b - 0.75)
        let roots = classify_unit_roots(&[0.1875, -1.0, 1.0], DEFAULT_TOL);
        assert!(matches!(roots.into_unique(), Err(Error::MultipleRootsInUnitInterval { roots }) if roots.len() == 2));
        let roots = classify_unit_roots(&[1.0, 0.0, 1.0], DEFAULT_TOL);
        assert!(matches!(roots.into_unique(), Err(Error::NoRootInUnitInterval { .. })));
    }

    #[test]
    fn isolates_close_roots() {
        // (x - 0.3)(x - 0.3001)(x - 0.9)
        let r = [0.3, 0.3001, 0.9];
        let p = [
            -r[0] * r[1] * r[2],
            r[0] * r[1] + r[0] * r[2] + r[1] * r[2],
            -(r[0] + r[1] + r[2]),
            1.0,
        ];
        let found = real_roots_in(&p, 0.0, 1.0, 1e-13);
        assert_eq!(found.len(), 3);
        for (f, e) in found.iter().zip(r) {
            assert_abs_diff_eq!(*f, e, epsilon = 1e-10);
        }
    }

    #[test]
    fn trimming_leading_zeros_changes_nothing() {
        let full = build_beta_polynomial(th(2.5, 0.0)).unwrap();
        let a = real_roots_in(&full.ascending(), 0.0, 1.0, DEFAULT_TOL);
        let b = real_roots_in(&full.ascending()[..4], 0.0, 1.0, DEFAULT_TOL);
        assert_eq!(a.len(), 1);
        assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-12);
    }

    #[test]
    fn residual_is_small() {
        for (a, z) in [(1e-6, 0.1), (1e-3, 25.0), (0.12, 0.04), (3.0, 1.0), (1e3, 1e3)] {
            let root = solve_beta_detailed(th(a, z), DEFAULT_TOL).unwrap();
            assert!(root.residual <= 1e-10 * root.abs_coefficient_sum, "{a} {z} {root:?}");
        }
    }
}
