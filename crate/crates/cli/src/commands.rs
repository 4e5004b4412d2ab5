use std::path::{Path, PathBuf};

use grushin::analysis::{
    certified_bound, default_observation_time, gramian, hautus_margin, lambda_min, weighted_hautus, GramianKind,
};
use grushin::grushin::{inverse_residual, recover_inverse};
use grushin::iterate::{iterate_system, iterated_inverse_blocks, IterationSpec};
use grushin::lti::{
    grushin_at, grushin_problem, resolvent, simulate as run_simulation, transfer_function, InputSignal,
};
use grushin::riesz::{reachable_weights, ModalSystem};
use grushin::spectral::{spectral_projection, trace_counts, ContourSpec};
use grushin::wave::{decay_report, wave_margin_scan, WaveConfig};
use grushin::{ComplexVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::*;
use crate::input::{load_couplings, load_system, parse_json, parse_vector, SystemFile};
use crate::report::{report, to_value, write_csv, CliError};

pub struct Context {
    /// Directory that relative paths are resolved against.
    pub base: PathBuf,
    pub tol: f64,
    pub seed: u64,
}

impl Context {
    fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }
}

type Outcome = Result<Value, CliError>;

/// Runs one command and returns its report. Batch is handled by the caller.
pub fn run(command: &Command, ctx: &Context) -> Outcome {
    let name = command.name();
    let (inputs, payload) = match command {
        Command::Schur(a) => schur(a, ctx)?,
        Command::Transfer(a) => transfer(a, ctx)?,
        Command::Hautus(a) => hautus(a, ctx)?,
        Command::Gramian(a) => gramian_cmd(a, ctx)?,
        Command::Certify(a) => certify(a, ctx)?,
        Command::Trace(a) => trace(a, ctx)?,
        Command::Project(a) => project(a, ctx)?,
        Command::Iterate(a) => iterate(a, ctx)?,
        Command::Riesz(a) => riesz(a, ctx)?,
        Command::Wave(a) => wave(a, ctx)?,
        Command::Simulate(a) => simulate(a, ctx)?,
        Command::Normalize(a) => return normalize(a, ctx),
        Command::Batch(_) => return Err(CliError::Usage("batch files cannot nest batch".into())),
    };
    Ok(report(name, &inputs, payload))
}

fn system(args: &InputArgs, ctx: &Context) -> Result<(SystemFile, grushin::lti::StateSpaceSystem), CliError> {
    load_system(&ctx.path(&args.input))
}

fn linspace(grid: &GridArgs) -> Result<Vec<f64>, CliError> {
    let (lo, hi, steps) = (grid.omega_min, grid.omega_max, grid.omega_steps);
    if !(lo.is_finite() && hi.is_finite()) || hi < lo || steps == 0 {
        return Err(CliError::Usage(format!(
            "need finite omega-min <= omega-max and omega-steps >= 1, got {lo}, {hi}, {steps}"
        )));
    }
    Ok((0..=steps).map(|j| lo + (hi - lo) * j as f64 / steps as f64).collect())
}

fn contour(args: &ContourArgs) -> Result<ContourSpec, CliError> {
    Ok(ContourSpec::new(args.contour_center, args.contour_radius, args.nodes)?)
}

fn schur(a: &PointArgs, ctx: &Context) -> Result<(Value, Value), CliError> {
    let (file, sys) = system(&a.input, ctx)?;
    let direct = resolvent(&sys, a.lambda)?;
    let inv = grushin_at(&sys, a.lambda)?;
    let recovered = recover_inverse(&inv)?;
    let residual = inverse_residual(&grushin_problem(&sys, a.lambda)?, &inv);
    let payload = json!({
        "E": inv.e,
        "E_plus": inv.e_plus,
        "E_minus": inv.e_minus,
        "E_minus_plus": inv.e_minus_plus,
        "condition": inv.condition,
        "residual": residual,
        "resolvent": recovered,
        "recovery_error": (&recovered - &direct).norm_fro() / direct.norm_fro(),
    });
    Ok((json!({"system": file, "lambda": a.lambda}), payload))
}

fn transfer(a: &PointArgs, ctx: &Context) -> Result<(Value, Value), CliError> {
    let (file, sys) = system(&a.input, ctx)?;
    let h = transfer_function(&sys, a.lambda)?;
    Ok((json!({"system": file, "lambda": a.lambda}), json!({ "H": h })))
}

fn hautus(a: &HautusArgs, ctx: &Context) -> Result<(Value, Value), CliError> {
    let (file, sys) = system(&a.input, ctx)?;
    let grid = linspace(&a.grid)?;
    let r = match &a.weights {
        Some(w) => weighted_hautus(&sys, w, &grid)?,
        None => hautus_margin(&sys, &grid)?,
    };
    if let Some(path) = &a.csv {
        write_csv(&ctx.path(path), &r.grid, &r.per_freq_margin)?;
    }
    let payload = json!({
        "margin": r.margin,
        "argmin_freq": r.argmin_freq,
        "near_eigenfrequency": r.near_eigenfrequency,
        "grid_points": r.grid.len(),
        "observable": r.margin > ctx.tol,
        "weighted": a.weights.is_some(),
    });
    let inputs = json!({
        "system": file,
        "omega": [a.grid.omega_min, a.grid.omega_max, a.grid.omega_steps],
        "weights": a.weights,
        "tol": ctx.tol,
    });
    Ok((inputs, payload))
}

fn gramian_cmd(a: &GramianArgs, ctx: &Context) -> Result<(Value, Value), CliError> {
    let (file, sys) = system(&a.input, ctx)?;
    let t_end = match a.t_end {
        Some(t) => t,
        None => default_observation_time(&sys)?,
    };
    let kind: GramianKind = a.kind.into();
    let w = gramian(&sys, kind, t_end)?;
    let lmin = lambda_min(&w)?;
    let payload = json!({
        "kind": kind,
        "t_end": t_end,
        "W": w,
        "lambda_min": lmin,
        "positive_definite": lmin > ctx.tol,
    });
    Ok((json!({"system": file, "kind": kind, "t_end": a.t_end, "tol": ctx.tol}), payload))
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> ComplexVector {
    let v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let v = ComplexVector::new(v).expect("finite");
    let norm = v.norm();
    v.scale(C64::new(1.0 / norm, 0.0))
}

fn certify(a: &CertifyArgs, ctx: &Context) -> Result<(Value, Value), CliError> {
    let (file, sys) = system(&a.point.input, ctx)?;
    let bound = certified_bound(&sys, a.point.lambda)?;
    let op = grushin_problem(&sys, a.point.lambda)?.matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut min_ratio = f64::INFINITY;
    for _ in 0..a.samples {
        let x = random_vector(&mut rng, op.cols());
        min_ratio = min_ratio.min(op.mul_vec(&x)?.norm().powi(2));
    }
    let mut payload = to_value(&bound);
    payload["samples"] = json!(a.samples);
    payload["min_sampled_ratio"] = if a.samples > 0 { json!(min_ratio) } else { Value::Null };
    let inputs = json!({
        "system": file,
        "lambda": a.point.lambda,
        "samples": a.samples,
        "seed": ctx.seed,
    });
    Ok((inputs, payload))
}

fn contour_inputs(c: &ContourArgs) -> Value {
    json!({"center": c.contour_center, "radius": c.contour_radius, "nodes": c.nodes})
}

fn trace(a: &TraceArgs, ctx: &Context) -> Result<(Value, Value), CliError> {
    let (file, sys) = system(&a.input, ctx)?;
    let g: Vec<C64> = parse_json(&a.g, "--g")?;
    let r = trace_counts(&sys, &contour(&a.contour)?, &g)?;
    let inputs = json!({"system": file, "contour": contour_inputs(&a.contour), "g": g});
    Ok((inputs, to_value(&r)))
}

fn project(a: &ProjectArgs, ctx: &Context) -> Result<(Value, Value), CliError> {
    let (file, sys) = system(&a.input, ctx)?;
    let p = spectral_projection(&sys, &contour(&a.contour)?)?;
    let trace = p.trace();
    let payload = json!({"P": p, "trace": trace, "rank": trace.re.round() as i64});
    Ok((json!({"system": file, "contour": contour_inputs(&a.contour)}), payload))
}

fn iterate(a: &IterateArgs, ctx: &Context) -> Result<(Value, Value), CliError> {
    let (file, sys) = system(&a.point.input, ctx)?;
    let spec = match &a.couplings {
        Some(p) => load_couplings(&ctx.path(p))?,
        None => IterationSpec::identity(&sys),
    };
    let lambda = a.point.lambda;
    let h1 = transfer_function(&iterate_system(&sys, &spec)?, lambda)?;
    let inv = iterated_inverse_blocks(&sys, &spec, lambda)?;
    let payload = json!({
        "H1": h1,
        "E": inv.e,
        "E_plus": inv.e_plus,
        "E_minus": inv.e_minus,
        "E_minus_plus": inv.e_minus_plus,
        "condition": inv.condition,
    });
    Ok((json!({"system": file, "lambda": lambda, "couplings": spec}), payload))
}

fn riesz(a: &RieszArgs, ctx: &Context) -> Result<(Value, Value), CliError> {
    let (file, sys) = system(&a.input, ctx)?;
    let modal = ModalSystem::from_system(&sys)?;
    let d = reachable_weights(&modal, a.t_end)?;
    let payload = json!({
        "eigenvalues": modal.eigenvalues,
        "weights": d.weights,
        "frame_lower": d.frame_lower,
        "frame_upper": d.frame_upper,
        "time_horizon": d.time_horizon,
        "riesz_family": d.frame_lower > ctx.tol,
    });
    Ok((json!({"system": file, "t_end": a.t_end, "tol": ctx.tol}), payload))
}

fn wave(a: &WaveArgs, ctx: &Context) -> Result<(Value, Value), CliError> {
    let config = WaveConfig::new(a.modes)?
        .with_coordinates(a.coordinates.into())
        .with_damping(a.damping.into());
    let n = a.modes as f64;
    let grid_args = GridArgs {
        omega_min: a.omega_min.unwrap_or(0.5),
        omega_max: a.omega_max.unwrap_or(n + 0.5),
        omega_steps: a.omega_steps.unwrap_or(100 * a.modes),
    };
    let grid = linspace(&grid_args)?;
    let scan = wave_margin_scan(&config, &grid)?;
    let decay = decay_report(&config)?;
    if let Some(path) = &a.csv {
        write_csv(&ctx.path(path), &scan.grid, &scan.per_freq_margin)?;
    }
    let payload = json!({
        "n_modes": a.modes,
        "margin": scan.margin,
        "argmin_freq": scan.argmin_freq,
        "near_eigenfrequency": scan.near_eigenfrequency,
        "margin_times_n_squared": scan.margin * n * n,
        "spectral_abscissa": decay.spectral_abscissa,
        "modes": decay.modes,
    });
    let inputs = json!({
        "config": config,
        "omega": [grid_args.omega_min, grid_args.omega_max, grid_args.omega_steps],
    });
    Ok((inputs, payload))
}

fn simulate(a: &SimulateArgs, ctx: &Context) -> Result<(Value, Value), CliError> {
    let (file, sys) = system(&a.input, ctx)?;
    let z0 = match &a.z0 {
        Some(text) => parse_vector(text, "--z0")?,
        None => random_vector(&mut ChaCha8Rng::seed_from_u64(ctx.seed), sys.state_dim()),
    };
    let input = match &a.u {
        Some(text) => InputSignal::Constant(parse_vector(text, "--u")?),
        None => InputSignal::Zero,
    };
    let traj = run_simulation(&sys, &z0, &input, a.t_end, a.dt)?;
    let inputs = json!({
        "system": file,
        "t_end": a.t_end,
        "dt": a.dt,
        "z0": z0,
        "u": a.u.as_ref().map(|_| match &input {
            InputSignal::Constant(u) => to_value(u),
            _ => Value::Null,
        }),
    });
    Ok((inputs, to_value(&traj)))
}

fn normalize(a: &InputArgs, ctx: &Context) -> Outcome {
    let (file, _) = system(a, ctx)?;
    Ok(to_value(&file))
}
