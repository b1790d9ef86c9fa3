use frontrun_core::equilibrium::{solve_equilibrium, welfare_region};
use frontrun_core::fixed_point::{best_response_hft, best_response_it};
use frontrun_core::model::{dealer_pricing, ModelParams, SignalStructure, ThetaPair};
use frontrun_core::sextic::{build_beta_polynomial, solve_beta, DEFAULT_TOL};
use frontrun_core::WelfareClass;
use proptest::prelude::*;

fn thetas() -> impl Strategy<Value = ThetaPair> {
    (-3.0f64..3.0, prop_oneof![Just(0.0), (-3.0f64..3.0).prop_map(|e| 10f64.powf(e))])
        .prop_map(|(e1, tz)| ThetaPair::new(10f64.powf(e1), tz))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn equilibrium_is_bounded_and_profitable(th in thetas(), sv in 0.1f64..10.0, s2 in 0.1f64..10.0) {
        let params = ModelParams::from_thetas(th, sv, s2).unwrap();
        let eq = solve_equilibrium(&params).unwrap();
        let beta = eq.strategies.beta;
        prop_assert!(beta > 0.0 && beta <= 0.5 + 1e-9);
        let norm = eq.alpha_normalized(&params);
        prop_assert!(norm > 0.0 && norm <= 2.0 + 1e-9);
        prop_assert!(eq.profit_hft >= 0.0);
        prop_assert!(close(eq.profit_it, 0.5 * sv * sv * eq.strategies.alpha, 1e-12));
    }

    #[test]
    fn closed_forms_are_mutual_best_responses(th in thetas()) {
        let params = ModelParams::from_thetas(th, 1.0, 1.0).unwrap();
        let eq = solve_equilibrium(&params).unwrap();
        let projected = dealer_pricing(eq.strategies, SignalStructure::OwnOrder, &params).unwrap();
        prop_assert!(close(projected.lambda_1, eq.pricing.lambda_1, 1e-8));
        prop_assert!(close(projected.mu_1, eq.pricing.mu_1, 1e-8));
        prop_assert!(close(projected.mu_2, eq.pricing.mu_2, 1e-8));
        let a = best_response_it(eq.strategies.beta, &eq.pricing).unwrap();
        prop_assert!(close(a, eq.strategies.alpha, 1e-8));
        let b = best_response_hft(eq.strategies.alpha, &eq.pricing, SignalStructure::OwnOrder, &params).unwrap();
        prop_assert!(close(b, eq.strategies.beta, 1e-8));
    }

    #[test]
    fn beta_is_the_unique_root(th in thetas()) {
        let poly = build_beta_polynomial(th).unwrap();
        let roots = poly.roots_in_unit_interval(DEFAULT_TOL);
        prop_assert_eq!(roots.interior.len(), 1);
        let beta = solve_beta(th, DEFAULT_TOL).unwrap();
        prop_assert!(poly.evaluate(beta).abs() <= 1e-10 * poly.abs_sum());
    }

    #[test]
    fn solutions_depend_only_on_thetas(th in thetas(), sv in 0.1f64..10.0, s2 in 0.1f64..10.0) {
        let unit = solve_equilibrium(&ModelParams::from_thetas(th, 1.0, 1.0).unwrap()).unwrap();
        let params = ModelParams::from_thetas(th, sv, s2).unwrap();
        let scaled = solve_equilibrium(&params).unwrap();
        prop_assert!(close(scaled.strategies.beta, unit.strategies.beta, 1e-9));
        prop_assert!(close(scaled.alpha_normalized(&params), unit.strategies.alpha, 1e-9));
        prop_assert!(close(scaled.profit_hft / params.profit_scale(), unit.profit_hft / 0.5, 1e-8));
    }

    #[test]
    fn welfare_region_matches_intensity(th in thetas()) {
        let params = ModelParams::from_thetas(th, 1.0, 1.0).unwrap();
        let alpha = solve_equilibrium(&params).unwrap().strategies.alpha;
        prop_assume!((alpha - 1.0).abs() > 1e-6);
        let expected = if alpha > 1.0 { WelfareClass::Benefited } else { WelfareClass::Harmed };
        prop_assert_eq!(welfare_region(th).unwrap(), expected);
    }
}
