use conespec::asymptotics::{
    coefficient_a, default_eps_grid, exponent_for, rate_fit, rate_study, sharpness_report,
    ExpansionData, RateFit, GRID_FLOOR, GRID_POINTS, NOISE_FLOOR, SLOPE_TOLERANCE,
};
use conespec::charval::{
    characteristic_value_auto, sigma_beta, AngularMode, DIRECT_BETA_MAX, ROOT_TOL, SCAN_STEP,
};
use conespec::geometry::{inclusion_constant, mc_removed_volume, ConeGeometry, PerturbedCone};
use conespec::oracle::{
    polar_fd_eigen, radial_fd_detail, FdConfig, ITERATION_CAP, ITERATION_RESIDUAL,
};
use conespec::spectrum::{
    eigen, spectrum_merge, unperturbed_eigen, EigenvalueRecord, RESIDUAL_TOL,
};
use serde_json::{json, Map, Value};

use crate::args::{Command, RunConfig, Variant};
use crate::error::CliError;
use crate::output::{format_cell, to_value, Report, Table};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.command {
        Command::Charval => cmd_charval(cfg),
        Command::Eigen => cmd_eigen(cfg),
        Command::Rate => cmd_rate(cfg),
        Command::Sharpness => cmd_sharpness(cfg),
        Command::Oracle => cmd_oracle(cfg),
        Command::Volume => cmd_volume(cfg),
    }
}

fn geometry(cfg: &RunConfig) -> Result<ConeGeometry> {
    Ok(ConeGeometry::new(cfg.dim, cfg.beta)?)
}

fn tolerances(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

/// Mode l (or the characteristic value when `l` is absent, which is then
/// the first element of the angular sequence).
fn mode_for(g: &ConeGeometry, l: Option<f64>) -> Result<AngularMode> {
    Ok(match l {
        Some(l) => AngularMode::new(g.dim(), l, 0)?,
        None => AngularMode::new(g.dim(), characteristic_value_auto(g)?.0, 1)?,
    })
}

pub fn cmd_charval(cfg: &RunConfig) -> Result<Report> {
    let g = geometry(cfg)?;
    let (l, method) = characteristic_value_auto(&g)?;
    let count = cfg.count.unwrap_or(5);
    let method_name = to_value(&method);
    let method_str = method_name.as_str().unwrap_or_default().to_string();
    let mut table = Table::new("index,l,nu,method");
    let mut outputs = json!({
        "l_beta": l,
        "method": method_name,
        "exponent": exponent_for(g.dim(), l),
    });
    if g.dim() > 2 && cfg.beta > DIRECT_BETA_MAX {
        outputs["sigma_prefix"] = Value::Null;
        outputs["sigma_prefix_error"] = json!(
            "the angular sequence needs the Legendre root, which is unavailable this close to pi"
        );
        table.rows.push(vec![
            "1".into(),
            format_cell(l),
            format_cell(mode_for(&g, None)?.nu),
            method_str,
        ]);
    } else {
        let modes = sigma_beta(&g, count)?;
        for m in &modes {
            let how = if m.index == 1 {
                method_str.clone()
            } else if g.dim() == 2 {
                "closed-form".into()
            } else {
                "legendre-root".into()
            };
            table.rows.push(vec![
                m.index.to_string(),
                format_cell(m.l),
                format_cell(m.nu),
                how,
            ]);
        }
        outputs["sigma_prefix"] = modes
            .iter()
            .map(|m| json!({"index": m.index, "l": m.l, "nu": m.nu}))
            .collect();
    }
    Ok(Report {
        outputs,
        tolerances: tolerances(&[
            ("root_tol", json!(ROOT_TOL)),
            ("scan_step", json!(SCAN_STEP)),
        ]),
        table,
    })
}

fn record_json(rank: usize, r: &EigenvalueRecord) -> Value {
    json!({
        "rank": rank,
        "l": r.mode.l,
        "nu": r.mode.nu,
        "k": r.radial_index,
        "lambda": r.lambda,
        "eps": r.eps,
    })
}

pub fn cmd_eigen(cfg: &RunConfig) -> Result<Report> {
    let g = geometry(cfg)?;
    let eps = cfg.eps.unwrap_or(0.0);
    let count = cfg.count.unwrap_or(5);
    let mut outputs = Map::new();
    let records: Vec<EigenvalueRecord> = if cfg.raw_mode {
        let mode = match (cfg.nu, cfg.l) {
            (Some(nu), None) => AngularMode::from_nu(g.dim(), nu, 0)?,
            (None, Some(l)) => AngularMode::new(g.dim(), l, 0)?,
            _ => {
                return Err(CliError::Usage(
                    "--raw-mode needs exactly one of --nu or --l".into(),
                ))
            }
        };
        outputs.insert("sector".into(), json!("single-mode"));
        (1..=count)
            .map(|k| eigen(&mode, eps, k))
            .collect::<conespec::Result<_>>()?
    } else {
        let m = spectrum_merge(&g, eps, count)?;
        outputs.insert("sector".into(), to_value(&m.sector));
        m.records
    };
    let mut table = Table::new("rank,l,k,lambda,eps");
    for (i, r) in records.iter().enumerate() {
        table.rows.push(vec![
            (i + 1).to_string(),
            format_cell(r.mode.l),
            r.radial_index.to_string(),
            format_cell(r.lambda),
            format_cell(r.eps),
        ]);
    }
    outputs.insert(
        "eigenvalues".into(),
        records
            .iter()
            .enumerate()
            .map(|(i, r)| record_json(i + 1, r))
            .collect(),
    );
    Ok(Report {
        outputs: Value::Object(outputs),
        tolerances: tolerances(&[("residual_tol", json!(RESIDUAL_TOL))]),
        table,
    })
}

fn exact_volumes(g: &ConeGeometry, grid: &[f64]) -> Result<Vec<f64>> {
    Ok(grid
        .iter()
        .map(|&e| PerturbedCone::exact(*g, e)?.removed_volume())
        .collect::<conespec::Result<_>>()?)
}

const SYNTHETIC_EPS_MAX: f64 = 0.5;
const SYNTHETIC_EPS_MIN: f64 = 0.05;

struct RateRun {
    expansion: ExpansionData,
    grid: Vec<f64>,
    records: Vec<EigenvalueRecord>,
    volumes: Vec<f64>,
    fit: RateFit,
}

fn synthetic_run(
    g: &ConeGeometry,
    mode: &AngularMode,
    k: usize,
    power: f64,
    grid: Option<Vec<f64>>,
    points: usize,
) -> Result<RateRun> {
    let limit = unperturbed_eigen(mode, k)?.lambda;
    let expansion = coefficient_a(g, mode, limit)?;
    // gaps well above λ*·1e−3 so that λ − λ* is exact to rounding
    let grid = match grid {
        Some(g) => g,
        None => {
            if points < 2 {
                return Err(CliError::Usage("a grid needs at least two points".into()));
            }
            let ratio = (SYNTHETIC_EPS_MIN / SYNTHETIC_EPS_MAX).powf(1.0 / (points as f64 - 1.0));
            (0..points)
                .map(|i| SYNTHETIC_EPS_MAX * ratio.powi(i as i32))
                .collect()
        }
    };
    let volumes = exact_volumes(g, &grid)?;
    let records: Vec<EigenvalueRecord> = grid
        .iter()
        .zip(&volumes)
        .map(|(&eps, &v)| EigenvalueRecord {
            mode: *mode,
            radial_index: k,
            eps,
            lambda: limit + expansion.coefficient * v.powf(power),
            limit_lambda: Some(limit),
        })
        .collect();
    let fit = rate_fit(&records, &volumes)?;
    Ok(RateRun {
        expansion,
        grid,
        records,
        volumes,
        fit,
    })
}

pub fn cmd_rate(cfg: &RunConfig) -> Result<Report> {
    let g = geometry(cfg)?;
    let mode = mode_for(&g, cfg.l)?;
    let k = cfg.k.unwrap_or(1);
    let points = cfg.points.unwrap_or(GRID_POINTS);
    let run = if let Some(power) = cfg.synthetic {
        synthetic_run(&g, &mode, k, power, cfg.eps_grid.clone(), points)?
    } else {
        let grid = match (&cfg.eps_grid, cfg.points) {
            (Some(grid), _) => Some(grid.clone()),
            (None, Some(p)) => {
                let limit = unperturbed_eigen(&mode, k)?.lambda;
                Some(default_eps_grid(&coefficient_a(&g, &mode, limit)?, p)?)
            }
            (None, None) => None,
        };
        let s = rate_study(&g, &mode, k, grid)?;
        RateRun {
            expansion: s.expansion,
            grid: s.eps_grid,
            records: s.records,
            volumes: s.volumes,
            fit: s.fit,
        }
    };
    let tol = cfg.slope_tolerance.unwrap_or(SLOPE_TOLERANCE);
    let exp = &run.expansion;
    let mut table = Table::new("log_volume,log_gap");
    for &(x, y) in &run.fit.points {
        table.rows.push(vec![format_cell(x), format_cell(y)]);
    }
    let outputs = json!({
        "mode": {"l": mode.l, "nu": mode.nu, "k": k},
        "limit_lambda": exp.limit_lambda,
        "synthetic_power": cfg.synthetic,
        "eps_grid": run.grid,
        "lambdas": run.records.iter().map(|r| r.lambda).collect::<Vec<_>>(),
        "gaps": run.records.iter().map(|r| r.lambda - exp.limit_lambda).collect::<Vec<_>>(),
        "volumes": run.volumes,
        "fit": {
            "slope": run.fit.slope,
            "intercept": run.fit.intercept,
            "coefficient": run.fit.coefficient(),
            "max_residual": run.fit.max_residual,
        },
        "analytic": {
            "exponent": exp.exponent,
            "coefficient": exp.coefficient,
            "kind": to_value(&exp.kind),
        },
        "slope_match": (run.fit.slope - exp.exponent).abs() <= tol,
        "coefficient_ratio": run.fit.coefficient() / exp.coefficient,
    });
    Ok(Report {
        outputs,
        tolerances: tolerances(&[
            ("slope_tolerance", json!(tol)),
            ("noise_floor", json!(NOISE_FLOOR)),
            ("grid_floor", json!(GRID_FLOOR)),
        ]),
        table,
    })
}

pub fn cmd_sharpness(cfg: &RunConfig) -> Result<Report> {
    let g = geometry(cfg)?;
    let r = sharpness_report(&g)?;
    let mut table = Table::new(
        "dim,beta,l_beta,method,p_sup,exponent_limit,fitted_slope,slope_match,beta_to_pi_limit",
    );
    table.rows.push(vec![
        r.dim.to_string(),
        format_cell(r.beta),
        format_cell(r.l_beta),
        to_value(&r.l_beta_method)
            .as_str()
            .unwrap_or_default()
            .to_string(),
        format_cell(r.p_sup),
        format_cell(r.exponent_limit),
        format_cell(r.study.fit.slope),
        r.slope_match.to_string(),
        r.beta_to_pi_limit.map(format_cell).unwrap_or_default(),
    ]);
    Ok(Report {
        outputs: to_value(&r),
        tolerances: tolerances(&[
            ("slope_tolerance", json!(r.slope_tolerance)),
            ("noise_floor", json!(NOISE_FLOOR)),
        ]),
        table,
    })
}

pub fn cmd_oracle(cfg: &RunConfig) -> Result<Report> {
    let g = geometry(cfg)?;
    let mode = mode_for(&g, cfg.l)?;
    let k = cfg.k.unwrap_or(1);
    let eps = cfg.eps.unwrap_or(0.0);
    let shift = cfg.shift.unwrap_or(0.0);
    let fd = FdConfig {
        radial_nodes: cfg.nodes.unwrap_or(4096),
        angular_nodes: cfg.angular_nodes.unwrap_or(64),
        richardson: cfg.richardson,
        shift,
    };
    let spectral = eigen(&mode, eps, k)?.lambda;
    let radial = radial_fd_detail(&g, mode.l, eps, k, &fd)?;
    let rel = |v: f64| (v - spectral).abs() / spectral;
    let mut table =
        Table::new("solver,l,k,eps,spectral,fd,rel_diff,radial_nodes,angular_nodes,fine,coarse");
    table.rows.push(vec![
        "radial".into(),
        format_cell(mode.l),
        k.to_string(),
        format_cell(eps),
        format_cell(spectral),
        format_cell(radial.value),
        format_cell(rel(radial.value)),
        radial.nodes.to_string(),
        String::new(),
        format_cell(radial.fine),
        radial.coarse.map(format_cell).unwrap_or_default(),
    ]);
    let mut rows = vec![json!({
        "solver": "radial",
        "value": radial.value,
        "rel_diff": rel(radial.value),
        "radial_nodes": radial.nodes,
        "fine": radial.fine,
        "richardson": radial.coarse.map(|_| radial.value),
        "coarse": radial.coarse,
    })];
    // the planar solver sees the whole sector, so it only matches the
    // lowest eigenvalue, which lives on the characteristic mode
    if g.dim() == 2 && k == 1 && mode.index == 1 {
        let pc = FdConfig {
            radial_nodes: cfg.polar_nodes.unwrap_or(128),
            richardson: false,
            ..fd
        };
        let v = polar_fd_eigen(g.half_angle(), eps, &pc)?;
        table.rows.push(vec![
            "polar".into(),
            format_cell(mode.l),
            "1".into(),
            format_cell(eps),
            format_cell(spectral),
            format_cell(v),
            format_cell(rel(v)),
            pc.radial_nodes.to_string(),
            pc.angular_nodes.to_string(),
            String::new(),
            String::new(),
        ]);
        rows.push(json!({
            "solver": "polar",
            "value": v,
            "rel_diff": rel(v),
            "radial_nodes": pc.radial_nodes,
            "angular_nodes": pc.angular_nodes,
        }));
    }
    Ok(Report {
        outputs: json!({
            "mode": {"l": mode.l, "nu": mode.nu, "k": k},
            "eps": eps,
            "spectral": spectral,
            "rows": rows,
        }),
        tolerances: tolerances(&[
            ("iteration_residual", json!(ITERATION_RESIDUAL)),
            ("iteration_cap", json!(ITERATION_CAP)),
            ("spectral_residual_tol", json!(RESIDUAL_TOL)),
        ]),
        table,
    })
}

pub fn cmd_volume(cfg: &RunConfig) -> Result<Report> {
    let g = geometry(cfg)?;
    let eps = cfg
        .eps
        .ok_or_else(|| CliError::Usage("--eps is required".into()))?;
    let samples = cfg.samples.unwrap_or(100_000);
    let variant = cfg.variant.unwrap_or(Variant::Lipschitz);
    let cut = match variant {
        Variant::Exact => PerturbedCone::exact(g, eps)?,
        Variant::Lipschitz => PerturbedCone::lipschitz(g, eps)?,
    };
    let est = mc_removed_volume(&cut, samples, cfg.seed)?;
    let a = inclusion_constant(g.half_angle())?;
    let lower = PerturbedCone::exact(g, a * eps)?.removed_volume()?;
    let upper = PerturbedCone::exact(g, eps)?.removed_volume()?;
    let mut table = Table::new("eps,variant,estimate,std_error,samples,seed");
    table.rows.push(vec![
        format_cell(eps),
        to_value(&variant).as_str().unwrap_or_default().to_string(),
        format_cell(est.estimate),
        format_cell(est.std_error),
        samples.to_string(),
        cfg.seed.to_string(),
    ]);
    Ok(Report {
        outputs: json!({
            "variant": to_value(&variant),
            "estimate": est.estimate,
            "std_error": est.std_error,
            "samples": samples,
            "seed": cfg.seed,
            "inclusion_constant": a,
            "lower_bound": lower,
            "upper_bound": upper,
        }),
        tolerances: Map::new(),
        table,
    })
}
