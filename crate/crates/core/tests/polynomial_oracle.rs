//! Float assembly of the equilibrium polynomial against exact rational
//! evaluation of its monomials.

use frontrun_core::model::ThetaPair;
use frontrun_core::sextic::build_beta_polynomial;
use num_bigint::BigInt;
use num_rational::BigRational;

// (power of beta, integer coefficient, power of theta_1, power of theta_z)
const MONOMIALS: &[(usize, i64, u32, u32)] = &[
    (6, 4, 1, 2), (6, 1, 1, 3), (6, 2, 2, 2), (6, 2, 0, 2), (6, 1, 0, 3),
    (5, 4, 1, 1), (5, 4, 1, 2), (5, 2, 1, 3), (5, 8, 2, 1), (5, 4, 2, 2), (5, 4, 3, 1),
    (4, 2, 1, 1), (4, 1, 1, 2), (4, -11, 2, 1), (4, -8, 2, 2), (4, -13, 3, 1),
    (3, 2, 2, 0), (3, 2, 3, 0), (3, 8, 2, 1), (3, 4, 2, 2), (3, 16, 3, 1),
    (2, -1, 2, 1), (2, -5, 3, 0), (2, -9, 3, 1),
    (1, 4, 3, 0), (1, 2, 3, 1),
    (0, -1, 3, 0),
];

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pow(x: &BigRational, k: u32) -> BigRational {
    (0..k).fold(ratio(1, 1), |acc, _| acc * x)
}

fn exact_coefficients(t1: &BigRational, tz: &BigRational) -> Vec<BigRational> {
    let mut c = vec![ratio(0, 1); 7];
    for &(b, k, p1, pz) in MONOMIALS {
        c[6 - b] += ratio(k, 1) * pow(t1, p1) * pow(tz, pz);
    }
    c
}

fn to_f64(x: &BigRational) -> f64 {
    x.numer().to_string().parse::<f64>().unwrap() / x.denom().to_string().parse::<f64>().unwrap()
}

#[test]
fn unit_thetas_give_integer_coefficients() {
    let exact = exact_coefficients(&ratio(1, 1), &ratio(1, 1));
    let expected: Vec<BigRational> = [10, 26, -29, 32, -15, 6, -1].iter().map(|&k| ratio(k, 1)).collect();
    assert_eq!(exact, expected);
    let float = build_beta_polynomial(ThetaPair::new(1.0, 1.0)).unwrap();
    assert_eq!(float.coefficients, [10.0, 26.0, -29.0, 32.0, -15.0, 6.0, -1.0]);
}

#[test]
fn float_assembly_matches_exact_rationals() {
    // Dyadic inputs are exact in f64, so any gap is assembly rounding.
    for ((n1, d1), (nz, dz)) in [((1, 1), (1, 1)), ((3, 8), (5, 2)), ((1, 16), (1, 32)), ((2, 1), (0, 1)), ((13, 4), (7, 64)), ((1, 1024), (25, 1))] {
        let t1 = ratio(n1, d1);
        let tz = ratio(nz, dz);
        let exact = exact_coefficients(&t1, &tz);
        let float = build_beta_polynomial(ThetaPair::new(n1 as f64 / d1 as f64, nz as f64 / dz as f64)).unwrap();
        for (e, f) in exact.iter().zip(float.coefficients) {
            let e = to_f64(e);
            let gap = (e - f).abs();
            assert!(gap <= 1e-14 * e.abs(), "theta=({n1}/{d1},{nz}/{dz}): exact {e} float {f}");
        }
    }
}
