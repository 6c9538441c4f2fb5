use leslie_core::conjugacy::f1d_derivative;
use leslie_core::fixed_points::{lambda1_status, lambda2_status};
use leslie_core::io::{write_sweep_csv, write_trajectory_csv};
use leslie_core::{
    axis_orbit, bifurcation_sweep, classify_lambda1, classify_lambda2, conjugacy, cycle2,
    cycle_multipliers, detect_cycle, detect_limit, f1d, iterate, lyapunov_1d, lyapunov_max_with,
    m2_condition2_xbound, p0, p0_preimage, regime_1d, verify_invariance, ConditionBranch,
    CycleDetection64, DetectOptions, LyapunovOptions, ModelError, ModelParams64, State64,
    SweepSpec,
};
use serde_json::{json, Value};

use crate::config::{
    BifurcateArgs, Command, ConjugacyArgs, CyclesArgs, DetectArgs, FixedPointsArgs, InvariantArgs,
    LyapunovArgs, SimulateArgs,
};
use crate::report::{render, write_atomic, write_summary};
use crate::Failure;

pub fn execute(cmd: &Command) -> Result<(), Failure> {
    match cmd {
        Command::Simulate(c) => simulate(c),
        Command::Bifurcate(c) => bifurcate(c),
        Command::FixedPoints(c) => emit(cmd, fixed_points(c)?),
        Command::Cycles(c) => emit(cmd, cycles(c)?),
        Command::Lyapunov(c) => emit(cmd, lyapunov(c)?),
        Command::Conjugacy(c) => emit(cmd, conjugacy_report(c)?),
        Command::InvariantCheck(c) => emit(cmd, invariant_check(c)?),
    }
}

fn emit(cmd: &Command, report: Value) -> Result<(), Failure> {
    let out = cmd.output();
    let bytes = render(&report, out.format).map_err(Failure::Io)?;
    write_atomic(out.output.as_deref(), &bytes).map_err(Failure::Io)
}

fn state(x: f64, y: f64) -> Result<State64, Failure> {
    State64::new(x, y).map_err(Failure::usage)
}

fn detect_options(d: &DetectArgs) -> Result<DetectOptions<f64>, Failure> {
    if !(d.tol.is_finite() && d.tol > 0.0) {
        return Err(Failure::usage(format!(
            "--tol {} must be finite and > 0",
            d.tol
        )));
    }
    Ok(DetectOptions {
        tol: d.tol,
        transient: d.transient,
        max_period: d.max_period as usize,
    })
}

fn cycle_json(p: &ModelParams64, c: &CycleDetection64) -> Value {
    let multipliers = cycle_multipliers(p, &c.points);
    let radius = multipliers.iter().map(|z| z.norm()).fold(0.0, f64::max);
    json!({
        "period": c.period,
        "points": c.points,
        "residual": c.residual,
        "multipliers": multipliers,
        "spectral_radius": radius,
        "attracting": radius < 1.0,
    })
}

fn simulate(c: &SimulateArgs) -> Result<(), Failure> {
    let p = c.params.model()?;
    let s0 = state(c.x0, c.y0)?;
    let opts = detect_options(&c.detect)?;
    let t = iterate(&p, s0, c.steps as usize);

    let mut csv = Vec::new();
    write_trajectory_csv(&mut csv, &t.states).map_err(|e| Failure::Io(e.into()))?;
    write_atomic(c.output.output.as_deref(), &csv).map_err(Failure::Io)?;

    let limit = match detect_limit(&t, &opts) {
        Ok(Some(found)) => cycle_json(&p, &found),
        Ok(None) => json!({"period": null, "note": "no period up to max-period"}),
        Err(e) => json!({"period": null, "note": e.to_string()}),
    };
    let report = json!({
        "params": p,
        "initial": s0,
        "steps": t.steps(),
        "final": t.last(),
        "termination": t.termination,
        "limit": limit,
    });
    let bytes = render(&report, c.output.format).map_err(Failure::Io)?;
    write_summary(c.summary.as_deref(), &bytes).map_err(Failure::Io)
}

fn fixed_points(c: &FixedPointsArgs) -> Result<Value, Failure> {
    let p = c.params.model()?;
    let lambda1 = match classify_lambda1(&p) {
        Ok(r) => json!(r),
        Err(_) => json!({"existence": lambda1_status(&p)}),
    };
    let lambda2 = match classify_lambda2(&p) {
        Ok(r) => json!(r),
        Err(_) => json!({"existence": lambda2_status(&p)}),
    };
    Ok(json!({"params": p, "lambda1": lambda1, "lambda2": lambda2}))
}

fn cycles(c: &CyclesArgs) -> Result<Value, Failure> {
    let opts = detect_options(&c.detect)?;
    if c.dim == 1 {
        let (a, b) = c.params.axis()?;
        let x0 = c.x0.unwrap_or((a - 1.0) / (2.0 * b));
        if !(x0 > 0.0 && x0 < (a - 1.0) / b) {
            return Err(Failure::usage(format!(
                "--x0 {x0} must lie in (0, (a-1)/b)"
            )));
        }
        let orbit = axis_orbit(a, b, x0, c.steps as usize);
        let states: Vec<State64> = orbit
            .points
            .iter()
            .map(|&x| State64::on_axis(x))
            .collect::<Result<_, _>>()
            .map_err(Failure::op)?;
        let detected = detect_cycle(&states, &opts)
            .map_err(Failure::op)?
            .map(|found| {
                let xs: Vec<f64> = found.points.iter().map(|s| s.x()).collect();
                let multiplier: f64 = xs.iter().map(|&x| f1d_derivative(a, b, x)).product();
                json!({
                    "period": found.period,
                    "points": xs,
                    "residual": found.residual,
                    "multiplier": multiplier,
                    "attracting": multiplier.abs() < 1.0,
                })
            });
        return Ok(json!({
            "dim": 1,
            "a": a,
            "b": b,
            "x0": x0,
            "regime": regime_1d(a),
            "escaped_at": orbit.escaped_at,
            "detected": detected,
            "closed_form_cycle2": cycle2(a, b),
        }));
    }
    let p = c.params.model()?;
    let (Some(x0), Some(y0)) = (c.x0, c.y0) else {
        return Err(Failure::usage("--x0 and --y0 are required when dim = 2"));
    };
    let t = iterate(&p, state(x0, y0)?, c.steps as usize);
    let detected = detect_limit(&t, &opts).map_err(Failure::op)?;
    Ok(json!({
        "dim": 2,
        "params": p,
        "initial": t.initial,
        "termination": t.termination,
        "detected": detected.map(|found| cycle_json(&p, &found)),
    }))
}

fn bifurcate(c: &BifurcateArgs) -> Result<(), Failure> {
    let p = c.params.model()?;
    let spec = SweepSpec {
        base: p,
        parameter: c.param,
        start: c.start,
        end: c.end,
        points: c.points as usize,
        initial: state(c.x0, c.y0)?,
    };
    // out-of-range grid values are rejected before any iteration
    let rows =
        bifurcation_sweep(&spec, c.transient as usize, c.samples as usize).map_err(
            |e| match e {
                ModelError::InvalidParams { .. } => Failure::usage(e),
                other => Failure::op(other),
            },
        )?;

    let mut csv = Vec::new();
    write_sweep_csv(&mut csv, &rows).map_err(|e| Failure::Io(e.into()))?;
    write_atomic(c.output.output.as_deref(), &csv).map_err(Failure::Io)?;

    let exits: Vec<Value> = rows
        .iter()
        .filter_map(|r| {
            r.exit.map(|(step, exit)| {
                json!({"value": r.value, "step": step, "violation": exit.violation.to_string()})
            })
        })
        .collect();
    let report = json!({
        "parameter": c.param,
        "points": rows.len(),
        "transient": c.transient,
        "samples": c.samples,
        "rows_with_exit": exits.len(),
        "exits": exits,
    });
    let bytes = render(&report, c.output.format).map_err(Failure::Io)?;
    write_summary(c.summary.as_deref(), &bytes).map_err(Failure::Io)
}

fn lyapunov(c: &LyapunovArgs) -> Result<Value, Failure> {
    let n = c.steps as usize;
    let est = if c.dim == 1 {
        let (a, b) = c.params.axis()?;
        lyapunov_1d(a, b, c.x0, n, c.transient).map_err(Failure::op)?
    } else {
        let p = c.params.model()?;
        let y0 =
            c.y0.ok_or_else(|| Failure::usage("--y0 is required when dim = 2"))?;
        let opts = LyapunovOptions {
            n,
            transient: c.transient,
            renorm_interval: c.renorm_interval as usize,
        };
        lyapunov_max_with(&p, state(c.x0, y0)?, &opts).map_err(Failure::op)?
    };
    let sign = if est.lambda_max > 0.0 {
        "positive"
    } else if est.lambda_max < 0.0 {
        "negative"
    } else {
        "zero"
    };
    Ok(json!({"dim": c.dim, "estimate": est, "sign": sign}))
}

fn conjugacy_report(c: &ConjugacyArgs) -> Result<Value, Failure> {
    let (a, b) = (c.a, c.b);
    let map = conjugacy(a, b).map_err(Failure::op)?;
    // the identity is algebraic, so it is checked over a grid wider than the unit interval
    let residual = (0..200)
        .map(|i| -1.0 + 3.0 * f64::from(i) / 199.0)
        .map(|x| (map.h(map.logistic(x)) - f1d(a, b, map.h(x))).abs())
        .fold(0.0, f64::max);
    let preimage = match p0_preimage(a, b) {
        Ok(x) => json!(x),
        Err(e) => json!({"none": e.to_string()}),
    };
    Ok(json!({
        "a": a,
        "b": b,
        "map": map,
        "identity_residual": residual,
        "p0": p0(a, b),
        "p0_preimage": preimage,
        "cycle2": cycle2(a, b),
        "regime": regime_1d(a),
    }))
}

fn invariant_check(c: &InvariantArgs) -> Result<Value, Failure> {
    let p = c.params.model()?;
    let v = verify_invariance(&p, c.set.into(), c.samples as usize, c.seed).map_err(Failure::op)?;
    let bound = match v.condition_branch {
        ConditionBranch::Case2 => m2_condition2_xbound(&p),
        _ => None,
    };
    Ok(json!({
        "params": p,
        "seed": c.seed,
        "verdict": v,
        "x_bound": bound,
    }))
}
