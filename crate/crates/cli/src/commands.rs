use std::fmt;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use calogero::dynamics::{
    asymptotic_momenta_check, exact_flow, integrate_with, scattering, track_coordinates,
    IntegratorOptions, Trajectory,
};
use calogero::lift::{random_lifted_point, LiftedPoint};
use calogero::poisson::{CheckConfig, FdStep};
use calogero::sample::{random_state, seeded_rng};
use calogero::spectral::{
    conjecture_residual, conjecture_residual_scaled, default_probes, eigenvector_coords,
};
use calogero::{build_lax, spectral_coords, Complex64, Coupling, Error, PhaseState};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::suites::{
    is_input_error, run_lift_suite, run_state_suites, CheckOutcome, DEFAULT_VERIFY_TOLERANCE,
};
use crate::{Format, Global, Method, Suite};

const DEFAULT_ODE_TOLERANCE: f64 = 1e-10;
const DEFAULT_SCATTER_TOLERANCE: f64 = 1e-6;
const DEFAULT_CONJECTURE_TOLERANCE: f64 = 1e-8;

pub enum Status {
    Pass,
    Fail,
}

impl Status {
    fn from(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Core(e) if is_input_error(e) => 2,
            CliError::Core(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "USAGE: {m}"),
            CliError::Io(m) => write!(f, "IO: {m}"),
            CliError::Core(e) => write!(f, "{}: {e}", e.code()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult = Result<Status, CliError>;

pub fn validate(g: &Global) -> Result<(), CliError> {
    if g.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    for (name, v) in [
        ("--tol-fd", g.tol_fd),
        ("--tol-check", g.tol_check),
        ("--tol-ode", g.tol_ode),
    ] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("{name} must be positive")));
            }
        }
    }
    Ok(())
}

fn json_only(g: &Global) -> Result<(), CliError> {
    if g.format == Some(Format::Csv) {
        return Err(CliError::Usage(
            "csv output is only available for `evolve`".into(),
        ));
    }
    Ok(())
}

fn sink(g: &Global) -> Result<Box<dyn Write>, CliError> {
    Ok(match &g.out {
        Some(path) => Box::new(
            File::create(path)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?,
        ),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json<T: Serialize>(g: &Global, value: &T) -> Result<(), CliError> {
    let mut w = sink(g)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::Io(e.to_string()))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Io(e.to_string()))?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    }
    Ok(text)
}

/// The state file layout, parsed before validation so that physical
/// problems (collisions) keep their own error codes.
#[derive(Deserialize)]
struct StateFile {
    n: usize,
    coupling: Coupling,
    x: Vec<f64>,
    p: Vec<f64>,
}

fn read_state(path: &Path) -> Result<PhaseState, CliError> {
    let raw: StateFile = serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Usage(format!("malformed state {}: {e}", path.display())))?;
    if raw.x.len() != raw.n || raw.p.len() != raw.n {
        return Err(CliError::Usage(format!(
            "malformed state {}: n = {} but x has {} and p has {} entries",
            path.display(),
            raw.n,
            raw.x.len(),
            raw.p.len()
        )));
    }
    Ok(PhaseState::new(raw.x, raw.p, raw.coupling)?)
}

fn check_config(g: &Global) -> CheckConfig {
    CheckConfig {
        step: g.tol_fd.map(FdStep::new).unwrap_or_default(),
        tolerance: g.tol_check.unwrap_or(DEFAULT_VERIFY_TOLERANCE),
    }
}

pub fn generate(g: &Global) -> CliResult {
    json_only(g)?;
    let s = random_state(&mut seeded_rng(g.seed), g.n, g.coupling)?;
    emit_json(g, &s)?;
    Ok(Status::Pass)
}

pub fn coords(g: &Global, path: &Path) -> CliResult {
    json_only(g)?;
    let s = read_state(path)?;
    let pair = build_lax(&s)?;
    let sc = spectral_coords(&pair)?;
    let ev = eigenvector_coords(&pair)?;
    let deviation = sc
        .mu_tilde
        .iter()
        .zip(&ev)
        .map(|(a, b)| (a - b).norm() / a.norm().max(1.0))
        .fold(0.0, f64::max);
    emit_json(
        g,
        &json!({
            "lambda": sc.lambdas,
            "mu": sc.mu,
            "mu_tilde": sc.mu_tilde,
            "min_gap": sc.min_gap,
            "degenerate": sc.degenerate,
            "mu_tilde_eigenvector": ev,
            "route_deviation": deviation,
        }),
    )?;
    Ok(Status::Pass)
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    suite: &'a str,
    states: usize,
    pass: bool,
    checks: Vec<CheckOutcome>,
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Commutation => "commutation",
        Suite::Canonicity => "canonicity",
        Suite::Bracket1 => "bracket1",
        Suite::Table => "table",
        Suite::Lenard => "lenard",
        Suite::Superintegrability => "superintegrability",
        Suite::Euler => "euler",
        Suite::DeltaGenerator => "delta-generator",
        Suite::Lift => "lift",
        Suite::All => "all",
    }
}

pub fn verify(
    g: &Global,
    state: Option<&Path>,
    suite: Suite,
    random: Option<usize>,
    lambda_probe: Option<f64>,
    full: bool,
) -> CliResult {
    json_only(g)?;
    if state.is_some() && random.is_some() {
        return Err(CliError::Usage(
            "give either a state file or --random, not both".into(),
        ));
    }
    let cfg = check_config(g);
    let mut checks = Vec::new();
    let mut states = 0;
    if suite != Suite::Lift {
        let list: Vec<PhaseState> = match state {
            Some(p) => vec![read_state(p)?],
            None => {
                let mut rng = seeded_rng(g.seed);
                (0..random.unwrap_or(1))
                    .map(|_| random_state(&mut rng, g.n, g.coupling))
                    .collect::<calogero::Result<_>>()?
            }
        };
        states = list.len();
        for (k, s) in list.iter().enumerate() {
            checks.extend(run_state_suites(
                suite,
                s,
                Some(k),
                &cfg,
                lambda_probe,
                full,
            )?);
        }
    }
    if suite == Suite::Lift || (suite == Suite::All && g.n <= 3) {
        let pt = random_lifted_point(&mut seeded_rng(g.seed), g.n);
        checks.extend(run_lift_suite(&pt, g.tol_check, full)?);
    }
    let pass = checks.iter().all(|c| c.pass);
    emit_json(
        g,
        &VerifyReport {
            suite: suite_name(suite),
            states,
            pass,
            checks,
        },
    )?;
    Ok(Status::from(pass))
}

pub fn lift_verify(g: &Global, point: Option<&Path>, full: bool) -> CliResult {
    json_only(g)?;
    let pt: LiftedPoint = match point {
        Some(p) => serde_json::from_str(&read_text(p)?)
            .map_err(|e| CliError::Usage(format!("malformed lifted point {}: {e}", p.display())))?,
        None => random_lifted_point(&mut seeded_rng(g.seed), g.n),
    };
    let checks = run_lift_suite(&pt, g.tol_check, full)?;
    let pass = checks.iter().all(|c| c.pass);
    emit_json(
        g,
        &VerifyReport {
            suite: "lift",
            states: 0,
            pass,
            checks,
        },
    )?;
    Ok(Status::from(pass))
}

pub fn evolve(g: &Global, path: &Path, t_end: f64, method: Method, samples: usize) -> CliResult {
    let s = read_state(path)?;
    if !t_end.is_finite() {
        return Err(CliError::Usage("--t-end must be finite".into()));
    }
    if samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let times: Vec<f64> = (0..samples)
        .map(|k| t_end * k as f64 / (samples - 1) as f64)
        .collect();
    let traj = match method {
        Method::Exact => Trajectory::from_exact_flow(&s, &times)?,
        Method::Rk => {
            let opts = IntegratorOptions {
                tol: g.tol_ode.unwrap_or(DEFAULT_ODE_TOLERANCE),
                output_times: times,
                record_steps: false,
                ..Default::default()
            };
            integrate_with(&s, t_end, &opts)?
        }
    };
    let traj = track_coordinates(traj)?;
    let energy = traj.energy_drift();
    let iso = traj.isospectral_drift().unwrap_or(0.0);
    match g.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let w = sink(g)?;
            traj.write_csv(w)?;
        }
        Format::Json => emit_json(g, &traj)?,
    }
    let last = traj.states.last().expect("at least one sample");
    eprintln!(
        "evolve: t_end = {t_end}, samples = {}, final x = {:?}, max |H(t) - H(0)| = {energy:.3e}, max |lambda(t) - lambda(0)| = {iso:.3e}",
        traj.len(),
        last.x()
    );
    Ok(Status::Pass)
}

pub fn scatter(g: &Global, path: &Path, t_max: f64) -> CliResult {
    json_only(g)?;
    let s = read_state(path)?;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(CliError::Usage("--t-max must be positive".into()));
    }
    // Fails early with COUPLING_UNSUPPORTED for the real coupling.
    exact_flow(&s, 0.0)?;
    let data = scattering(&s, t_max)?;
    let check = asymptotic_momenta_check(&s, t_max)?;
    let tol = g.tol_check.unwrap_or(DEFAULT_SCATTER_TOLERANCE);
    let momenta_pass = check.momentum_deviation <= tol;
    let pass = momenta_pass && check.pass;
    emit_json(
        g,
        &json!({
            "t_max": t_max,
            "scattering": data,
            "momentum_tolerance": tol,
            "momenta_pass": momenta_pass,
            "asymptotic": check,
            "pass": pass,
        }),
    )?;
    Ok(Status::from(pass))
}

fn parse_range(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || {
        CliError::Usage(format!(
            "--n-range must look like a..b with 1 <= a <= b, got `{text}`"
        ))
    };
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn conjecture(g: &Global, n_range: &str, trials: usize) -> CliResult {
    json_only(g)?;
    let (a, b) = parse_range(n_range)?;
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let tol = g.tol_check.unwrap_or(DEFAULT_CONJECTURE_TOLERANCE);
    let c: Complex64 = g.coupling.c();
    let mut rng = seeded_rng(g.seed);
    let mut rows = Vec::new();
    let mut pass = true;
    for n in a..=b {
        let probes = default_probes(n);
        let (mut worst, mut worst_scaled) = (0.0f64, 0.0f64);
        for _ in 0..trials {
            let pair = build_lax(&random_state(&mut rng, n, g.coupling)?)?;
            worst = worst.max(conjecture_residual(&pair, &probes));
            worst_scaled = worst_scaled.max(conjecture_residual_scaled(&pair, &probes, c));
        }
        let ok = worst <= tol;
        pass &= ok;
        rows.push(json!({
            "n": n,
            "trials": trials,
            "max_residual": worst,
            "max_residual_c_scaled": worst_scaled,
            "pass": ok,
        }));
    }
    emit_json(
        g,
        &json!({
            "coupling": g.coupling,
            "tolerance": tol,
            "identity": "E - G - 1/2 Delta''",
            "scaled_identity": "E - G - c/2 Delta''",
            "rows": rows,
            "pass": pass,
        }),
    )?;
    Ok(Status::from(pass))
}
