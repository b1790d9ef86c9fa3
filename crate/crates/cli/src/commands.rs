use std::io::Write;

use frontrun_core::equilibrium::{
    classify_welfare, limit_alpha_theta1_infinity, limit_alpha_theta1_zero, partial_equilibrium_no_fast_noise,
    solve_equilibrium_detailed, theta_z_infinity_limits, welfare_from_alpha, WELFARE_TOL,
};
use frontrun_core::model::{hft_expected_profit_for, it_expected_profit};
use frontrun_core::sextic::{limit_beta_theta1_infinity, DEFAULT_TOL};
use frontrun_core::simulator::Estimate;
use frontrun_core::sweep::{run_classify, run_sweep, write_classify_csv, write_sweep_csv, GridAxis, Scale, SweepAxis, SweepSpec};
use frontrun_core::{
    dealer_pricing, simulate_game, solve_equilibrium, solve_fixed_point, Equilibrium, Error, FixedPointConfig,
    LinearStrategies, ModelParams, PricingCoefficients, SignalStructure, SimulationConfig, ThetaPair,
};
use serde_json::{json, Map, Value};

use crate::args::{
    AxisArg, ClassifyArgs, FixedPointArgs, LimitsArgs, PartialArgs, ScaleArg, SimulateArgs, SolveArgs, SweepArgs,
};
use crate::output::to_json;
use crate::CliError;

fn scale(s: ScaleArg) -> Scale {
    match s {
        ScaleArg::Linear => Scale::Linear,
        ScaleArg::Log => Scale::Log,
    }
}

fn emit(out: &mut dyn Write, doc: &Value) -> Result<(), CliError> {
    writeln!(out, "{}", to_json(doc))?;
    Ok(())
}

fn equilibrium_fields(eq: &Equilibrium, params: &ModelParams, thetas: ThetaPair) -> Map<String, Value> {
    let norm = params.profit_scale();
    let fields = json!({
        "theta1": thetas.theta_1,
        "thetaz": thetas.theta_z,
        "sigma_v": params.sigma_v(),
        "sigma_2": params.sigma_2(),
        "beta": eq.strategies.beta,
        "alpha": eq.strategies.alpha,
        "alpha_normalized": eq.alpha_normalized(params),
        "lambda1": eq.pricing.lambda_1,
        "mu1": eq.pricing.mu_1,
        "mu2": eq.pricing.mu_2,
        "lambda2": eq.lambda_2,
        "profit_it": eq.profit_it,
        "profit_hft": eq.profit_hft,
        "profit_it_normalized": eq.profit_it / norm,
        "profit_hft_normalized": eq.profit_hft / norm,
    });
    match fields {
        Value::Object(map) => map,
        _ => unreachable!(),
    }
}

pub fn solve(args: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = args.params.resolve(None)?;
    let (eq, root) = solve_equilibrium_detailed(&params, DEFAULT_TOL)?;
    let welfare = classify_welfare(params.thetas(), WELFARE_TOL)?;
    let mut doc = equilibrium_fields(&eq, &params, args.params.thetas(&params));
    doc.insert("welfare".into(), welfare.as_str().into());
    doc.insert(
        "solver".into(),
        json!({
            "method": "sextic root isolation + bisection/Newton",
            "residual": root.residual,
            "abs_coefficient_sum": root.abs_coefficient_sum,
        }),
    );
    emit(out, &Value::Object(doc))
}

pub fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = SweepSpec {
        axis: match args.axis {
            AxisArg::Theta1 => SweepAxis::Theta1,
            AxisArg::Thetaz => SweepAxis::ThetaZ,
        },
        grid: GridAxis::new(args.from, args.to, args.points, scale(args.scale))?,
        held: args.held,
        sigma_v: args.sigma_v,
        sigma_2: args.sigma_2,
    };
    let rows = run_sweep(&spec)?;
    write_sweep_csv(&rows, args.baseline, out)?;
    Ok(())
}

pub fn classify(args: &ClassifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let t1 = GridAxis::new(args.theta1_from, args.theta1_to, args.theta1_points, scale(args.theta1_scale))?;
    let tz = GridAxis::new(args.thetaz_from, args.thetaz_to, args.thetaz_points, scale(args.thetaz_scale))?;
    let rows = run_classify(&t1, &tz)?;
    write_classify_csv(&rows, out)?;
    Ok(())
}

/// Strategies and pricing to play, plus the analytic values to test against.
struct Scenario {
    mode: &'static str,
    structure: SignalStructure,
    strategies: LinearStrategies,
    pricing: PricingCoefficients,
    profit_it: f64,
    profit_hft: f64,
}

fn scenario(args: &SimulateArgs) -> Result<(ModelParams, Scenario), Error> {
    if args.no_hft {
        let params = args.params.resolve(Some(ThetaPair::new(1.0, 0.0)))?;
        let strategies = LinearStrategies::new(params.kyle_alpha(), 0.0)?;
        let pricing = dealer_pricing(strategies, SignalStructure::OwnOrder, &params)?;
        let profit_it = it_expected_profit(strategies.alpha, 0.0, &pricing, &params);
        let s = Scenario { mode: "no-hft", structure: SignalStructure::OwnOrder, strategies, pricing, profit_it, profit_hft: 0.0 };
        return Ok((params, s));
    }
    if let Some(beta) = args.partial_beta {
        let params = args.params.resolve(None)?;
        let pe = partial_equilibrium_no_fast_noise(beta, params.thetas().theta_z, &params)?;
        let strategies = LinearStrategies::new(pe.alpha, beta)?;
        let structure = SignalStructure::OwnOrder;
        let pricing = dealer_pricing(strategies, structure, &params)?;
        let s = Scenario {
            mode: "partial-equilibrium",
            structure,
            strategies,
            pricing,
            profit_it: it_expected_profit(pe.alpha, beta, &pricing, &params),
            profit_hft: hft_expected_profit_for(strategies, &pricing, structure, &params),
        };
        return Ok((params, s));
    }
    let params = args.params.resolve(None)?;
    let structure = SignalStructure::from(args.signal);
    let eq = match structure {
        SignalStructure::OwnOrder => solve_equilibrium(&params)?,
        SignalStructure::AggregateOrder => solve_fixed_point(&params, structure, &FixedPointConfig::default())?.equilibrium,
    };
    let s = Scenario {
        mode: "equilibrium",
        structure,
        strategies: eq.strategies,
        pricing: eq.pricing,
        profit_it: eq.profit_it,
        profit_hft: eq.profit_hft,
    };
    Ok((params, s))
}

fn scored(est: &Estimate, target: f64) -> Value {
    json!({
        "value": est.value,
        "std_error": est.std_error,
        "target": target,
        "z": est.z_score(target),
    })
}

pub fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (params, s) = scenario(args)?;
    let config = SimulationConfig { n_paths: args.paths, seed: args.seed, antithetic: args.antithetic };
    let r = simulate_game(&params, s.strategies, &s.pricing, s.structure, &config)?;
    let pairs = [
        ("profit_it", &r.est_profit_it, s.profit_it),
        ("profit_hft", &r.est_profit_hft, s.profit_hft),
        ("lambda1", &r.lambda_1, s.pricing.lambda_1),
        ("mu1", &r.mu_1, s.pricing.mu_1),
        ("mu2", &r.mu_2, s.pricing.mu_2),
    ];
    let max_abs_z = pairs.iter().map(|(_, e, t)| e.z_score(*t).abs()).fold(0.0, f64::max);
    let estimates: Map<String, Value> = pairs.iter().map(|(k, e, t)| (k.to_string(), scored(e, *t))).collect();
    let thetas = args.params.thetas(&params);
    let doc = json!({
        "mode": s.mode,
        "signal": s.structure.as_str(),
        "theta1": thetas.theta_1,
        "thetaz": thetas.theta_z,
        "sigma_v": params.sigma_v(),
        "sigma_2": params.sigma_2(),
        "alpha": s.strategies.alpha,
        "beta": s.strategies.beta,
        "n_paths": r.n_paths,
        "seed": r.seed,
        "antithetic": r.antithetic,
        "estimates": estimates,
        "orthogonality": r.orthogonality,
        "max_abs_z": max_abs_z,
    });
    emit(out, &doc)
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn fixed_point(args: &FixedPointArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = args.params.resolve(None)?;
    let structure = SignalStructure::from(args.signal);
    let init = match (args.init_alpha, args.init_beta) {
        (Some(a), Some(b)) => Some(LinearStrategies::new(a, b)?),
        _ => None,
    };
    let config = FixedPointConfig { damping: args.damping, tol: args.tol, max_iter: args.max_iter, init };
    let sol = solve_fixed_point(&params, structure, &config)?;
    let eq = sol.equilibrium;

    let mut doc = Map::new();
    doc.insert("signal".into(), structure.as_str().into());
    let thetas = args.params.thetas(&params);
    doc.extend(equilibrium_fields(&eq, &params, thetas));
    let welfare = welfare_from_alpha(eq.alpha_normalized(&params), WELFARE_TOL);
    doc.insert("welfare".into(), welfare.as_str().into());
    doc.insert("iterations".into(), sol.iterations.into());
    doc.insert("residual".into(), sol.residual.into());

    if structure == SignalStructure::OwnOrder {
        let (closed, _) = solve_equilibrium_detailed(&params, DEFAULT_TOL)?;
        let gap = [
            (eq.strategies.alpha, closed.strategies.alpha),
            (eq.strategies.beta, closed.strategies.beta),
            (eq.pricing.lambda_1, closed.pricing.lambda_1),
            (eq.pricing.mu_1, closed.pricing.mu_1),
            (eq.pricing.mu_2, closed.pricing.mu_2),
            (eq.lambda_2, closed.lambda_2),
            (eq.profit_it, closed.profit_it),
            (eq.profit_hft, closed.profit_hft),
        ]
        .iter()
        .map(|&(a, b)| relative_gap(a, b))
        .fold(0.0, f64::max);
        doc.insert("closed_form".into(), Value::Object(equilibrium_fields(&closed, &params, thetas)));
        doc.insert("max_relative_gap".into(), gap.into());
    }
    emit(out, &Value::Object(doc))
}

pub fn partial_equilibrium(args: &PartialArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = ModelParams::from_thetas(ThetaPair::new(0.0, args.thetaz), args.sigma_v, args.sigma_2)?;
    let pe = partial_equilibrium_no_fast_noise(args.beta, args.thetaz, &params)?;
    let mut doc = json!({
        "beta": args.beta,
        "thetaz": args.thetaz,
        "sigma_v": params.sigma_v(),
        "sigma_2": params.sigma_2(),
        "alpha": pe.alpha,
        "alpha_normalized": pe.alpha / params.kyle_alpha(),
        "profit_hft": pe.profit_hft,
    });
    if args.beta > 0.0 {
        let strategies = LinearStrategies::new(pe.alpha, args.beta)?;
        let pricing = dealer_pricing(strategies, SignalStructure::OwnOrder, &params)?;
        let extra = json!({
            "lambda1": pricing.lambda_1,
            "mu1": pricing.mu_1,
            "mu2": pricing.mu_2,
            "profit_it": it_expected_profit(pe.alpha, args.beta, &pricing, &params),
        });
        if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
            d.extend(e);
        }
    }
    emit(out, &doc)
}

pub fn limits(args: &LimitsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = ModelParams::new(args.sigma_v, 0.0, args.sigma_2, 0.0)?;
    let kyle = params.kyle_alpha();
    let mut doc = Map::new();
    doc.insert("sigma_v".into(), params.sigma_v().into());
    doc.insert("sigma_2".into(), params.sigma_2().into());

    if let Some(tz) = args.thetaz {
        doc.insert("thetaz".into(), tz.into());
        let beta = limit_beta_theta1_infinity(tz, DEFAULT_TOL)?;
        let alpha = limit_alpha_theta1_infinity(tz, &params)?;
        doc.insert(
            "theta1_to_infinity".into(),
            json!({"beta": beta, "alpha": alpha, "alpha_normalized": alpha / kyle}),
        );
        if tz > 0.0 {
            let alpha = limit_alpha_theta1_zero(tz, &params)?;
            doc.insert("theta1_to_zero".into(), json!({"alpha": alpha, "alpha_normalized": alpha / kyle}));
        }
    }
    let l = theta_z_infinity_limits(&params);
    doc.insert(
        "thetaz_to_infinity".into(),
        json!({
            "beta": l.beta,
            "alpha": l.alpha,
            "profit_it": l.profit_it,
            "profit_hft": l.profit_hft,
            "lambda1": l.lambda_1,
            "mu1": l.mu_1,
            "mu2": l.mu_2,
            "lambda2": l.lambda_2,
        }),
    );
    emit(out, &Value::Object(doc))
}
