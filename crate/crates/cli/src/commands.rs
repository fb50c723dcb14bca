//! `qfi`, `sweep` and `brachistochrone` tables.

use critsense::fock::{build_state, FockRepresentation, ProbeSpec};
use critsense::generator::cycloid_curve;
use critsense::models::{full_rabi_qfi, qrm_effective, QrmParameters};
use critsense::oracle::{oracle_qfi, representation, TruncationPolicy};
use critsense::qfi::{qfi_closed_form, qrm_asymptotic_factor};
use critsense::su11::casimir_radicand;
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{ModelId, ResolvedModel, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Runs `f` over `items` on `jobs` workers and returns results in input
/// order. The first error by position wins, independent of scheduling.
pub fn par_map<T, R, F>(jobs: usize, items: &[T], f: F) -> Result<Vec<R>, CliError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R, CliError> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} workers: {e}")))?;
    let results: Vec<Result<R, CliError>> = pool.install(|| items.par_iter().map(&f).collect());
    results.into_iter().collect()
}

pub(crate) fn header(table: &mut Table, command: &str, cfg: &RunConfig) {
    table.meta("critsense", VERSION);
    table.meta("command", command);
    let json = serde_json::to_string(cfg).expect("config serialises");
    table.meta("config", json);
    table.meta("units", "omega = 1; times are omega*t");
}

/// Representation large enough for the probe when evaluating closed forms.
fn closed_form_rep(model_modes: critsense::ModeCount, probe: &ProbeSpec, cutoff: TruncationPolicy) -> Result<FockRepresentation, CliError> {
    let n = match cutoff {
        TruncationPolicy::Fixed(n) => n,
        TruncationPolicy::Adaptive => match probe {
            ProbeSpec::Coherent { re, im } => {
                let a = re.hypot(*im);
                (a * a + 12.0 * a + 32.0).ceil() as usize
            }
            _ => probe.max_excitation().unwrap_or(0) + 2,
        },
    };
    Ok(representation(model_modes, n.max(2))?)
}

struct Point {
    zeta: Option<f64>,
    lambda: f64,
    t: f64,
    model: ResolvedModel,
}

fn grid_points(cfg: &RunConfig, default_time: Option<f64>) -> Result<Vec<Point>, CliError> {
    let zetas: Vec<Option<f64>> = match &cfg.zeta {
        Some(axis) => axis
            .points(None)
            .map_err(|e| CliError::Config(format!("zeta: {e}")))?
            .into_iter()
            .map(Some)
            .collect(),
        None => vec![None],
    };
    let times = match default_time {
        Some(t) => cfg.time_points(t)?,
        None if cfg.time.is_none() => return Err(CliError::Config("time is required for qfi".into())),
        None => cfg.time_points(0.0)?,
    };
    let mut points = Vec::new();
    for zeta in zetas {
        let model = cfg.resolve_model(zeta)?;
        let zeta = match cfg.model_id()? {
            ModelId::Qrm | ModelId::RabiFull => Some(zeta.unwrap_or(cfg.qrm_params()?.zeta)),
            _ => None,
        };
        for lambda in cfg.estimand_points(model.spec())? {
            model.spec().check_domain(lambda).map_err(|e| CliError::Config(format!("estimand: {e}")))?;
            for &t in &times {
                points.push(Point { zeta, lambda, t, model: model.clone() });
            }
        }
    }
    Ok(points)
}

fn qfi_columns(cfg: &RunConfig, factor: bool) -> Vec<&'static str> {
    let mut cols = vec!["zeta", "lambda", "t"];
    if cfg.model == Some(ModelId::RabiFull) {
        cols.extend(["F_full", "F_eff", "gap", "N_used"]);
        return cols;
    }
    cols.push("F_total");
    cols.extend(["F_zz", "F_yz", "F_xz", "F_yy", "F_xy", "F_xx"]);
    cols.extend(["crb", "regime", "period", "hx_dropped"]);
    if factor {
        cols.push("factor_A");
    }
    if cfg.with_oracle {
        cols.extend(["F_oracle", "oracle_rel_diff", "N_used"]);
    }
    cols
}

fn evaluate(cfg: &RunConfig, p: &Point, factor: bool) -> Result<Vec<Cell>, CliError> {
    let mut row: Vec<Cell> = vec![p.zeta.into(), p.lambda.into(), p.t.into()];
    match &p.model {
        ResolvedModel::RabiFull { params, spec } => {
            let mut full = *params;
            full.g_tilde = p.lambda;
            full.zeta = p.zeta.unwrap_or(full.zeta);
            let probe = cfg.probe_for(spec.modes);
            let (f_full, n) = full_rabi_qfi(&full, p.t, &probe, cfg.cutoff, &cfg.oracle)?;
            let rep = closed_form_rep(spec.modes, &probe, cfg.cutoff)?;
            let psi = build_state(&probe, &rep)?;
            let f_eff = qfi_closed_form(spec, p.lambda, p.t, &psi, &rep, cfg.compat_drop_critical_hx)?.total;
            let gap = if f_eff == 0.0 { 0.0 } else { (f_full - f_eff).abs() / f_eff };
            row.extend([f_full.into(), f_eff.into(), gap.into(), n.into()]);
        }
        ResolvedModel::Effective(model) => {
            let probe = cfg.probe_for(model.modes);
            let rep = closed_form_rep(model.modes, &probe, cfg.cutoff)?;
            let psi = build_state(&probe, &rep)?;
            let report = qfi_closed_form(model, p.lambda, p.t, &psi, &rep, cfg.compat_drop_critical_hx)?;
            row.push(report.total.into());
            row.extend(report.parts.to_array().map(Cell::from));
            row.push(report.crb_with(cfg.nu).into());
            row.push(report.regime.regime.as_str().into());
            row.push(report.regime.period.into());
            row.push(Cell::Int(report.compat_mode as u64));
            if factor {
                let cell = match &model.kind {
                    critsense::models::ModelKind::QrmEffective(q) => {
                        Cell::Num(qrm_asymptotic_factor(q.zeta, q.omega))
                    }
                    _ => Cell::Empty,
                };
                row.push(cell);
            }
            if cfg.with_oracle {
                let (f, n) = oracle_qfi(model, p.lambda, p.t, &probe, cfg.cutoff, &cfg.oracle)?;
                let diff = if f == 0.0 { (report.total - f).abs() } else { (report.total - f).abs() / f };
                row.extend([f.into(), diff.into(), n.into()]);
            }
        }
    }
    Ok(row)
}

fn qfi_table(cfg: &RunConfig, command: &str, default_time: Option<f64>, factor: bool) -> Result<Table, CliError> {
    cfg.validate()?;
    let points = grid_points(cfg, default_time)?;
    let mut table = Table::new(&qfi_columns(cfg, factor));
    header(&mut table, command, cfg);
    table.meta("parts", "F_total = 4*(F_zz+F_yz+F_xz+F_yy+F_xy+F_xx)");
    if let Some(spec) = points.first().map(|p| p.model.spec()) {
        table.meta("estimand", spec.estimand.clone());
        for flag in &spec.flags {
            table.meta("warning", flag.clone());
        }
    }
    for row in par_map(cfg.jobs, &points, |p| evaluate(cfg, p, factor))? {
        table.push(row);
    }
    Ok(table)
}

pub fn cmd_qfi(cfg: &RunConfig) -> Result<Table, CliError> {
    qfi_table(cfg, "qfi", None, false)
}

/// Sweep over the estimand and/or ζ; time defaults to `π/ω`.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let qrm = matches!(cfg.model, Some(ModelId::Qrm));
    qfi_table(cfg, "sweep", Some(std::f64::consts::PI), qrm)
}

pub fn cmd_brachistochrone(cfg: &RunConfig) -> Result<Table, CliError> {
    cfg.validate()?;
    match cfg.model {
        None | Some(ModelId::Qrm) => {}
        Some(other) => {
            return Err(CliError::Config(format!("brachistochrone needs the qrm model, got {}", other.as_str())))
        }
    }
    let b = &cfg.brachistochrone;
    if b.g_tilde.is_empty() {
        return Err(CliError::Config("brachistochrone.g_tilde must not be empty".into()));
    }
    let mut params = match &cfg.params {
        Value::Object(m) => m.clone(),
        _ => return Err(CliError::Config("params must be an object".into())),
    };
    params.entry("zeta").or_insert(Value::from(1.0));
    params.entry("g_tilde").or_insert(Value::from(b.g_tilde[0]));
    let p: QrmParameters = serde_json::from_value(Value::Object(params))
        .map_err(|e| CliError::Config(format!("params: {e}")))?;
    let times = b.time.points(None).map_err(|e| CliError::Config(format!("brachistochrone.time: {e}")))?;
    if times.iter().any(|&t| t < 0.0) {
        return Err(CliError::Config("brachistochrone.time: values must be >= 0".into()));
    }

    let mut table = Table::new(&["g_tilde", "t", "x", "y", "z"]);
    header(&mut table, "brachistochrone", cfg);
    table.meta("curve", "x = |r|t - sin|r|t, y = 1 - cos|r|t, z = |r|t (normal phase)");
    let curves = par_map(cfg.jobs, &b.g_tilde, |&g| {
        let model = qrm_effective(&QrmParameters { g_tilde: g, ..p })?;
        let s = casimir_radicand(&model.r(g));
        Ok(cycloid_curve(s, &times)?)
    })?;
    for (g, curve) in b.g_tilde.iter().zip(curves) {
        for pt in curve {
            table.push(vec![(*g).into(), pt.t.into(), pt.x.into(), pt.y.into(), pt.z.into()]);
        }
    }
    Ok(table)
}
