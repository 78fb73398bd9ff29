use std::fs;
use std::path::Path;

use nekolab_core::envelope::{
    analytic_delta_from_gamma, analytic_gamma_from_delta, exponent_analytic, exponent_gevrey,
    gevrey_delta_from_gamma, gevrey_gamma_from_delta, predict_analytic, predict_gevrey,
    EnvelopeConstants,
};
use nekolab_core::hamiltonian::{check_derivative_bound, check_qc, SystemSpec};
use nekolab_core::lattice::{
    dirichlet_bound, dirichlet_rational, inverse_unimodular, lochak_bounds, module_volume,
    smith_normal_form, unimodular_completion, IntMatrix, IntVector, SubmoduleBasis,
};
use nekolab_core::resonance::DetectorConfig;
use nekolab_core::selftest::{run_selftest, SelftestOptions};
use nekolab_core::simulate::{
    self, initial_angles, integrate_watching, synthetic_sweep, write_events_json, write_sweep_csv,
    write_trajectory_csv, IntegratorConfig, Scheme, State, SweepConfig, SweepResult,
    TrajectoryRecord,
};
use nekolab_core::{Error, Result};
use serde_json::{json, Value};

use crate::{
    parse, EnvelopeArgs, FitArgs, IntegratorArgs, LatticeCmd, RegimeArg, SchemeArg, SelftestArgs,
    SimulateArgs, SweepArgs,
};

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) => 2,
        _ => 3,
    }
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json value"));
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

pub fn lattice(cmd: LatticeCmd) -> Result<u8> {
    let out = match cmd {
        LatticeCmd::Complete { k } => {
            let k = IntVector::from_i64s(&parse::int_list(&k)?)?;
            let a = unimodular_completion(&k)?;
            let l1 = k.ell1();
            let det = a.matrix().det()?;
            let norms = a.matrix().row_l1_norms();
            let inv = inverse_unimodular(&a)?;
            let bounds = lochak_bounds(&k)?;
            let checks = json!({
                "det_is_unit": det == 1.into() || det == (-1).into(),
                "first_row_is_k": a.matrix().row(0) == k.components(),
                "row_norms_bounded": norms.iter().all(|x| *x <= l1),
                "inverse_norm_bounded": inv.matrix().max_row_l1() <= bounds.c_upper,
                "inverse_verified": a.matrix().mul(inv.matrix())? == IntMatrix::identity(k.len()),
            });
            let all = checks
                .as_object()
                .expect("object")
                .values()
                .all(|v| v == &Value::Bool(true));
            json!({
                "k": to_value(&k),
                "l1": to_value(&IntVector::new(vec![l1])?)[0],
                "matrix": to_value(a.matrix()),
                "det": to_value(&IntVector::new(vec![det])?)[0],
                "row_norms": to_value(&IntVector::new(norms)?),
                "inverse": to_value(inv.matrix()),
                "inverse_norm": to_value(&IntVector::new(vec![inv.matrix().max_row_l1()])?)[0],
                "checks": checks,
                "all_checks": all,
            })
        }
        LatticeCmd::Smith { rows } => {
            let basis = SubmoduleBasis::new(IntMatrix::from_i64_rows(&parse::int_rows(&rows)?)?)?;
            let snf = smith_normal_form(&basis);
            let checks = json!({
                "reconstruction": snf.reconstruct() == *basis.matrix(),
                "divisibility": snf.divisibility_holds(),
                "b_unimodular": snf.b.det().magnitude() == &1u32.into(),
                "a_unimodular": snf.a.det().magnitude() == &1u32.into(),
            });
            let all = checks
                .as_object()
                .expect("object")
                .values()
                .all(|v| v == &Value::Bool(true));
            json!({
                "rows": to_value(basis.matrix()),
                "d": to_value(&IntVector::new(snf.diag.clone())?),
                "b": to_value(snf.b.matrix()),
                "a": to_value(snf.a.matrix()),
                "checks": checks,
                "all_checks": all,
            })
        }
        LatticeCmd::Dirichlet { center, length } => {
            let r = dirichlet_rational(center, length)?;
            let bound = dirichlet_bound(length);
            json!({
                "center": center,
                "length": length,
                "p": r.p,
                "q": r.q,
                "value": r.value(),
                "height": r.height(),
                "height_bound": bound,
                "in_interval": r.in_closed(center - length / 2.0, center + length / 2.0),
                "reduced": r.is_reduced(),
                "below_height_bound": (r.height() as f64) < bound,
            })
        }
        LatticeCmd::Volume { rows } => {
            let basis = SubmoduleBasis::new(IntMatrix::from_i64_rows(&parse::int_rows(&rows)?)?)?;
            json!({ "rows": to_value(basis.matrix()), "rank": basis.rank(), "volume": module_volume(&basis) })
        }
        LatticeCmd::Bounds { k } => {
            let k = IntVector::from_i64s(&parse::int_list(&k)?)?;
            let b = lochak_bounds(&k)?;
            json!({ "k": to_value(&k), "n": k.len(), "c_upper": to_value(&b)["c_upper"], "c_prime_upper": to_value(&b)["c_prime_upper"] })
        }
    };
    print(&out);
    Ok(0)
}

fn load_constants(path: Option<&Path>) -> Result<EnvelopeConstants> {
    let Some(path) = path else {
        return Ok(EnvelopeConstants::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Error::domain(format!("cannot read {}: {e}", path.display())))?;
    let c: EnvelopeConstants = serde_json::from_str(&text)
        .map_err(|e| Error::domain(format!("malformed constants file: {e}")))?;
    c.validate()?;
    Ok(c)
}

pub fn envelope(args: EnvelopeArgs) -> Result<u8> {
    let consts = load_constants(args.constants.as_deref())?;
    let alpha = args.alpha.unwrap_or(1.0);
    let gevrey = matches!(args.regime, RegimeArg::Gevrey) || alpha > 1.0;
    let n = args.n;
    if n < 2 {
        return Err(Error::domain(format!("n = {n} must be >= 2")));
    }
    let (gamma, delta) = match (args.gamma, args.delta, gevrey) {
        (Some(g), _, false) => (g, analytic_delta_from_gamma(n, g)),
        (Some(g), _, true) => (g, gevrey_delta_from_gamma(n, g)),
        (None, Some(d), false) => (analytic_gamma_from_delta(n, d), d),
        (None, Some(d), true) => (gevrey_gamma_from_delta(n, d), d),
        (None, None, _) => return Err(Error::domain("one of --delta or --gamma is required")),
    };
    let exponents = if gevrey {
        let (a, b) = exponent_gevrey(n, alpha, gamma)?;
        json!({ "a": a, "b": b })
    } else {
        let a = exponent_analytic(n, gamma)?;
        json!({ "a": a, "b": gamma })
    };
    let mut out = json!({
        "regime": if gevrey { "gevrey" } else { "analytic" },
        "n": n,
        "alpha": alpha,
        "gamma": gamma,
        "delta": delta,
        "exponents": exponents,
    });
    if let Some(eps) = args.eps {
        let p = if gevrey {
            predict_gevrey(n, alpha, delta, eps, &consts)?
        } else {
            predict_analytic(n, delta, eps, &consts)?
        };
        out["prediction"] = to_value(&p);
    }
    print(&out);
    Ok(0)
}

fn integrator_config(a: &IntegratorArgs, sample_stride: usize) -> IntegratorConfig {
    IntegratorConfig {
        scheme: match a.scheme {
            SchemeArg::ImplicitMidpoint => Scheme::ImplicitMidpoint,
            SchemeArg::Composed4 => Scheme::Composed4,
        },
        dt: a.dt,
        fp_tol: a.fp_tol,
        fp_max_iters: a.fp_max_iters,
        sample_stride,
        energy_slack: a.energy_slack,
    }
}

/// Quasi-convexity at the initial action and derivative bounds on the
/// corners and center of the action box.
fn spec_checks(spec: &SystemSpec, action: &[f64]) -> Result<Vec<String>> {
    let mut problems = Vec::new();
    let qc = check_qc(&spec.integrable, action, spec.m)?;
    if !qc.pass {
        problems.push(format!(
            "quasi-convexity margin {} below m = {}",
            qc.margin, spec.m
        ));
    }
    let n = spec.n.min(10);
    let mut grid = vec![vec![0.0; spec.n]];
    for mask in 0u32..(1 << n) {
        grid.push(
            (0..spec.n)
                .map(|i| {
                    if i < n && mask & (1 << i) != 0 {
                        spec.radius
                    } else {
                        -spec.radius
                    }
                })
                .collect(),
        );
    }
    let d = check_derivative_bound(&spec.integrable, &grid, spec.big_m)?;
    if !d.pass {
        problems.push(format!(
            "derivatives exceed M = {} (first {}, second {})",
            spec.big_m, d.max_first, d.max_second
        ));
    }
    Ok(problems)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))
}

fn trajectory_summary(rec: &TrajectoryRecord, rho: Option<f64>) -> Value {
    json!({
        "epsilon": rec.epsilon,
        "steps": rec.steps,
        "final_time": rec.final_time,
        "max_drift": rec.max_drift,
        "max_energy_error": rec.max_energy_error,
        "energy_deviation": rec.max_h_deviation,
        "energy_bound": rec.h_deviation_bound,
        "energy_within_bound": rec.monitor_ok,
        "first_crossing_time": rec.first_crossing_time(),
        "events": rec.events.len(),
        "escaped": rec.escaped,
        "censored": rec.censored,
        "rho": rho,
        "threshold_time": rec.threshold_time,
        "warnings": rec.warnings,
    })
}

pub fn simulate(args: SimulateArgs) -> Result<u8> {
    let spec = SystemSpec::load(&args.spec)?;
    let action = spec
        .initial
        .as_ref()
        .map(|i| i.action.clone())
        .unwrap_or_else(|| vec![0.0; spec.n]);
    let theta = spec
        .initial
        .as_ref()
        .and_then(|i| i.theta.clone())
        .unwrap_or_else(|| initial_angles(args.seed, spec.n));
    let state = State::new(theta, action)?;
    let problems = spec_checks(&spec, &state.action)?;
    if !problems.is_empty() && !args.force {
        return Err(Error::domain(format!(
            "{} (pass --force to continue)",
            problems.join("; ")
        )));
    }
    for p in &problems {
        eprintln!("warning: {p}");
    }
    let detector = DetectorConfig::new(args.order, args.tol)?;
    let cfg = integrator_config(&args.integrator, args.sample_stride);
    if let Some(rho) = args.rho {
        if !(rho >= 0.0) || rho >= spec.radius / 2.0 {
            return Err(Error::domain(format!(
                "rho = {rho} outside [0, R/2) with R = {}",
                spec.radius
            )));
        }
    }
    ensure_dir(&args.out)?;

    let (rec, failure) =
        match integrate_watching(&spec, &state, args.t, &cfg, Some(&detector), args.rho) {
            Ok(rec) => (rec, None),
            Err(f) if f.partial.steps == 0 && !matches!(f.error, Error::Integrator { .. }) => {
                return Err(f.error)
            }
            Err(f) => (*f.partial, Some(f.error)),
        };
    write_trajectory_csv(&args.out.join("trajectory.csv"), &rec)?;
    write_events_json(&args.out.join("events.json"), &rec.events)?;
    let mut summary = trajectory_summary(&rec, args.rho);
    summary["warnings"] = json!(rec.warnings.iter().chain(&problems).collect::<Vec<_>>());
    if let Some(e) = &failure {
        summary["error"] = json!({ "kind": e.kind(), "reason": e.to_string() });
    }
    let text = serde_json::to_string_pretty(&summary).expect("json value");
    fs::write(args.out.join("summary.json"), format!("{text}\n"))?;
    println!("{text}");
    Ok(match failure {
        Some(e) => exit_code(&e),
        None => 0,
    })
}

fn fit_summary(r: &SweepResult) -> Value {
    json!({
        "fit": r.fit,
        "fit_note": r.fit_note,
        "rows": r.rows.len(),
        "censored_rows": r.censored_rows,
        "failed_runs": r.failed_runs(),
    })
}

pub fn sweep(args: SweepArgs) -> Result<u8> {
    let spec = SystemSpec::load(&args.spec)?;
    let eps = parse::float_list(&args.eps)?;
    let seeds = parse::seeds(&args.seeds)?;
    let detector = args
        .order
        .map(|k| DetectorConfig::new(k, args.tol))
        .transpose()?;
    let cfg = SweepConfig {
        rho: args.rho,
        t_max: args.t_max,
        integrator: integrator_config(&args.integrator, 1),
        detector,
        seeds,
        workers: args.workers,
    };
    let result = simulate::sweep(&spec, &eps, &cfg)?;
    ensure_dir(&args.out)?;
    write_sweep_csv(&args.out.join("sweep.csv"), &result)?;
    fs::write(
        args.out.join("sweep.json"),
        serde_json::to_string_pretty(&result)? + "\n",
    )?;
    let summary = fit_summary(&result);
    fs::write(
        args.out.join("fit.json"),
        serde_json::to_string_pretty(&summary)? + "\n",
    )?;
    for r in result.runs.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "run epsilon = {} seed = {} failed: {}",
            r.epsilon,
            r.seed,
            r.error.as_deref().unwrap_or("")
        );
    }
    let mut out = summary;
    out["table"] = to_value(&result.rows);
    print(&out);
    Ok(if result.failed_runs() == result.runs.len() {
        3
    } else {
        0
    })
}

pub fn fit(args: FitArgs) -> Result<u8> {
    let result = if let Some(spec) = &args.synthetic {
        let (a, c2, c3) = parse::synthetic(spec)?;
        synthetic_sweep(&parse::float_list(&args.eps)?, a, c2, c3)?
    } else {
        let path = args.sweep.as_deref().expect("clap enforces one source");
        let text = fs::read_to_string(path)
            .map_err(|e| Error::domain(format!("cannot read {}: {e}", path.display())))?;
        let r: SweepResult = serde_json::from_str(&text)
            .map_err(|e| Error::domain(format!("malformed sweep file: {e}")))?;
        r
    };
    let fit = simulate::fit_exponent(&result)?;
    print(&json!({ "fit": fit, "rows": result.rows.len(), "censored_rows": result.censored_rows }));
    Ok(0)
}

pub fn selftest(args: SelftestArgs) -> Result<u8> {
    let opts = SelftestOptions {
        inject_completion_sign_fault: args.inject_fault.is_some(),
    };
    let report = run_selftest(opts);
    for s in &report.suites {
        eprintln!(
            "{}: {} cases, {} failures, {:.3} s",
            s.name,
            s.cases,
            s.failures,
            s.elapsed.as_secs_f64()
        );
    }
    print(&to_value(&report));
    Ok(if report.pass { 0 } else { 1 })
}
