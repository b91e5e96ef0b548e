use calogero::lift::{
    hierarchy_check, jacobi_check, jacobi_triples, nijenhuis_spectrum_check, LiftedPoint,
};
use calogero::poisson::{self, BracketEntry, BracketReport, CheckConfig};
use calogero::{build_lax, Complex64, Error, PhaseState};
use serde::Serialize;

use crate::commands::CliError;
use crate::Suite;

pub const DEFAULT_VERIFY_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_JACOBI_TOLERANCE: f64 = 1e-5;
const JACOBI_LAMBDAS: [f64; 3] = [-2.0, 0.0, 1.0];
const JACOBI_TRIALS: usize = 60;

/// Worst-case summary of one check on one state.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<usize>,
    pub pass: bool,
    pub worst: f64,
    pub tolerance: f64,
    pub relative: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<BracketEntry>>,
}

impl CheckOutcome {
    fn from_report(r: BracketReport, state: Option<usize>, full: bool) -> Self {
        CheckOutcome {
            check: r.check.clone(),
            state,
            pass: r.pass,
            worst: r.worst(),
            tolerance: r.tolerance,
            relative: r.relative,
            notes: r.notes.clone(),
            error: None,
            entries: full.then_some(r.entries),
        }
    }

    fn from_error(check: &str, state: Option<usize>, tolerance: f64, e: &Error) -> Self {
        CheckOutcome {
            check: check.into(),
            state,
            pass: false,
            worst: f64::NAN,
            tolerance,
            relative: false,
            notes: Vec::new(),
            error: Some(format!("{}: {e}", e.code())),
            entries: None,
        }
    }
}

/// Errors caused by the request itself rather than by the mathematics.
pub fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidInput(_)
            | Error::IndexOutOfRange { .. }
            | Error::PositionCollision { .. }
            | Error::Precondition(_)
    )
}

fn record(
    out: &mut Vec<CheckOutcome>,
    name: &str,
    state: Option<usize>,
    cfg: &CheckConfig,
    full: bool,
    result: calogero::Result<BracketReport>,
) -> Result<(), CliError> {
    match result {
        Ok(r) => out.push(CheckOutcome::from_report(r, state, full)),
        Err(e) if is_input_error(&e) => return Err(CliError::Core(e)),
        Err(e) => out.push(CheckOutcome::from_error(name, state, cfg.tolerance, &e)),
    }
    Ok(())
}

fn default_probe(s: &PhaseState) -> calogero::Result<Complex64> {
    let pair = build_lax(s)?;
    let radius = calogero::spectral::eigen(&pair.l, s.coupling())
        .lambdas
        .iter()
        .map(|l| l.norm())
        .fold(0.0, f64::max);
    Ok(Complex64::new(radius + 1.0, 0.0))
}

/// Runs the reduced-space suites selected by `suite` on one state.
pub fn run_state_suites(
    suite: Suite,
    s: &PhaseState,
    index: Option<usize>,
    cfg: &CheckConfig,
    lambda_probe: Option<f64>,
    full: bool,
) -> Result<Vec<CheckOutcome>, CliError> {
    let mut out = Vec::new();
    let want = |x: Suite| suite == x || suite == Suite::All;
    if want(Suite::Commutation) {
        record(
            &mut out,
            "commutation",
            index,
            cfg,
            full,
            poisson::verify_commutation(s, cfg),
        )?;
    }
    if want(Suite::Canonicity) {
        record(
            &mut out,
            "canonicity",
            index,
            cfg,
            full,
            poisson::verify_canonicity(s, cfg),
        )?;
    }
    if want(Suite::Bracket1) {
        record(
            &mut out,
            "bracket1",
            index,
            cfg,
            full,
            poisson::verify_bracket1_relations(s, cfg),
        )?;
    }
    if want(Suite::Table) {
        record(
            &mut out,
            "table",
            index,
            cfg,
            full,
            poisson::verify_bracket_table(s, cfg),
        )?;
    }
    if want(Suite::Lenard) {
        record(
            &mut out,
            "lenard",
            index,
            cfg,
            full,
            poisson::verify_lenard(s, cfg),
        )?;
    }
    if want(Suite::Superintegrability) && (s.n() >= 2 || suite == Suite::Superintegrability) {
        record(
            &mut out,
            "superintegrability",
            index,
            cfg,
            full,
            poisson::verify_superintegrability(s, cfg),
        )?;
    }
    if want(Suite::Euler) {
        record(
            &mut out,
            "euler",
            index,
            cfg,
            full,
            poisson::verify_euler_field(s, cfg),
        )?;
    }
    if want(Suite::DeltaGenerator) {
        let probe = match lambda_probe {
            Some(v) => Ok(Complex64::new(v, 0.0)),
            None => default_probe(s),
        };
        let result = probe.and_then(|p| poisson::verify_delta_generator(s, p, cfg));
        record(&mut out, "delta-generator", index, cfg, full, result)?;
    }
    Ok(out)
}

/// Jacobi identity of the pencil at three values of `lambda`, the
/// Hamiltonian hierarchy with the Lenard relation, and the spectrum of `N*`.
pub fn run_lift_suite(
    pt: &LiftedPoint,
    tol_check: Option<f64>,
    full: bool,
) -> Result<Vec<CheckOutcome>, CliError> {
    let n = pt.n();
    let jacobi_tol = tol_check.unwrap_or(DEFAULT_JACOBI_TOLERANCE);
    let hierarchy_tol = tol_check.unwrap_or(DEFAULT_VERIFY_TOLERANCE);
    let lift_err = CliError::Core;
    let mut out = Vec::new();
    let triples = jacobi_triples(n).len().min(JACOBI_TRIALS);
    for lambda in JACOBI_LAMBDAS {
        let r = jacobi_check(lambda, pt, triples).map_err(lift_err)?;
        out.push(CheckOutcome {
            check: format!("lift jacobi (lambda = {lambda})"),
            state: None,
            pass: r.max_residual <= jacobi_tol,
            worst: r.max_residual,
            tolerance: jacobi_tol,
            relative: false,
            notes: vec![format!("{} coordinate triples", r.triples)],
            error: None,
            entries: None,
        });
    }
    let h = hierarchy_check(pt, n, hierarchy_tol).map_err(lift_err)?;
    out.push(CheckOutcome::from_report(h, None, full));
    let nj = nijenhuis_spectrum_check(pt).map_err(lift_err)?;
    let mut notes: Vec<String> = nj
        .clusters
        .iter()
        .map(|c| {
            format!(
                "N* eigenvalue {} with multiplicity {}",
                c.value, c.multiplicity
            )
        })
        .collect();
    if nj.degenerate {
        notes.push("A has a repeated eigenvalue".into());
    }
    if !nj.even_multiplicity {
        notes.push("odd multiplicity found".into());
    }
    out.push(CheckOutcome {
        check: "lift nijenhuis spectrum".into(),
        state: None,
        pass: nj.pass,
        worst: nj.max_deviation,
        tolerance: nj.tolerance,
        relative: false,
        notes,
        error: None,
        entries: None,
    });
    Ok(out)
}
