use std::path::{Path, PathBuf};

use anyhow::Result;
use liouville_core::faa_di_bruno::verify_formulas;
use liouville_core::fd_oracle::{compare_and_order, fd_solve, GridField, Region};
use liouville_core::liouville_map::{build_quartet, diagnostics, restrict_initial};
use liouville_core::seminorm_topology::{convergence_study, GridSpec, SeminormIndex, StudyOptions};
use liouville_core::{
    FundamentalSolution, InitialData, JetField, PartialTable, Quartet, ScaledReal, SmoothExpr,
    SolutionField,
};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{ConfigError, Format, RunConfig};
use crate::report::{num, write_table_to, Cell, Report, Table};

pub const RESIDUAL_TOL: f64 = 1e-6;
pub const WRONSKIAN_TOL: f64 = 1e-8;
pub const ALEPH_TOL: f64 = 1e-8;
pub const DIAGNOSTIC_TOL: f64 = 1e-8;
pub const ROUNDTRIP_TOL: f64 = 1e-7;
pub const CONVERGENCE_RATIO: f64 = 1e-3;
pub const CONVERGENCE_LEVELS: usize = 11;
pub const FD_COURANT: f64 = 0.5;
pub const FD_ORDER_RANGE: (f64, f64) = (1.7, 2.2);
pub const FD_SUP_TOL: f64 = 5e-3;

fn field(cfg: &RunConfig) -> Result<(InitialData, SolutionField)> {
    let d = cfg.data()?;
    let q = build_quartet(&d, cfg.radius(), cfg.tol)?;
    Ok((d, SolutionField::new(q)))
}

fn points(cfg: &RunConfig) -> Vec<(f64, f64)> {
    let ts = cfg.nodes(cfg.tmax);
    let xs = cfg.nodes(f64::from(cfg.alpha));
    ts.iter().flat_map(|&t| xs.iter().map(move |&x| (t, x))).collect()
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |m: f64, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

fn partial_name(a: usize, b: usize) -> String {
    let n = a + b;
    let var = |name: &str, p: usize| match p {
        0 => String::new(),
        1 => format!("d{name}"),
        p => format!("d{name}{p}"),
    };
    let top = if n == 1 { "dF".to_string() } else { format!("d{n}F") };
    format!("{top}_{}{}", var("t", a), var("x", b))
}

pub fn solve(cfg: &RunConfig, dump_ode: Option<&Path>) -> Result<Report> {
    let (_, f) = field(cfg)?;
    let order = cfg.jet_order;
    let idx: Vec<(usize, usize)> = PartialTable::indices(order).collect();
    let rows: Vec<Vec<Cell>> = points(cfg)
        .par_iter()
        .map(|&(t, x)| {
            let p = f.partials(t, x, order)?;
            let mut row = vec![Cell::from(t), Cell::from(x)];
            row.extend(idx.iter().map(|&(a, b)| Cell::from(p.get(a, b))));
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut header = vec!["t".to_string(), "x".to_string(), "F".to_string()];
    header.extend(idx.iter().skip(1).map(|&(a, b)| partial_name(a, b)));

    let values = rows.iter().filter_map(|r| match r[2] {
        Cell::Num(v) => Some(v),
        _ => None,
    });
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let all_finite = rows.iter().all(|r| r.iter().all(|c| !matches!(c, Cell::Num(v) if !v.is_finite())));

    if let Some(path) = dump_ode {
        for (name, s) in [("g2", f.quartet().g2()), ("g4", f.quartet().g4())] {
            write_table_to(&trajectory_table(s), &stem_with(path, name))?;
        }
    }

    let mut metrics = Map::new();
    metrics.insert("points".into(), json!(rows.len()));
    metrics.insert("min_F".into(), num(lo));
    metrics.insert("max_F".into(), num(hi));
    metrics.insert("all_finite".into(), json!(all_finite));
    Ok(Report::new(cfg, metrics, all_finite).with_table(Table { header, rows }))
}

fn stem_with(path: &Path, name: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{name}.csv"))
}

fn trajectory_table(s: &FundamentalSolution) -> Table {
    let rows = s
        .trajectory()
        .into_iter()
        .map(|p| {
            vec![
                Cell::from(p.x),
                Cell::from(p.g.mantissa()),
                Cell::Int(i64::from(p.g.exponent())),
                Cell::from(p.gp.mantissa()),
                Cell::Int(i64::from(p.gp.exponent())),
            ]
        })
        .collect();
    Table {
        header: ["x", "g_mantissa", "g_exp", "gp_mantissa", "gp_exp"].map(String::from).to_vec(),
        rows,
    }
}

fn wronskians(q: &Quartet, samples: &[f64]) -> Result<(f64, f64)> {
    let pairs: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|&x| Ok((q.fundamental_wronskian_defect(x)?, q.derived_wronskian_defect(x)?)))
        .collect::<Result<_>>()?;
    Ok((max_of(pairs.iter().map(|p| p.0)), max_of(pairs.iter().map(|p| p.1))))
}

pub fn verify(cfg: &RunConfig) -> Result<Report> {
    let (d, f) = field(cfg)?;
    let q = f.quartet();
    let grid = points(cfg);

    let per_point: Vec<(f64, ScaledReal)> = grid
        .par_iter()
        .map(|&(t, x)| Ok((f.residual(t, x)?, f.h_value(t, x)?)))
        .collect::<Result<_>>()?;
    let residual_sup = max_of(per_point.iter().map(|p| p.0.abs()));
    let h_min = per_point
        .iter()
        .map(|p| p.1)
        .min_by(|a, b| {
            let key = |v: &ScaledReal| if v.signum() > 0.0 { v.ln_abs() } else { f64::NEG_INFINITY };
            key(a).total_cmp(&key(b))
        })
        .unwrap_or(ScaledReal::ZERO);
    let positive = per_point.iter().all(|p| p.1.signum() > 0.0);

    let reach = f64::from(cfg.alpha) + cfg.tmax;
    let (w_fund, w_derived) = wronskians(q, &cfg.nodes(reach))?;

    let xs = cfg.nodes(f64::from(cfg.alpha));
    let aleph_err = max_of(
        xs.par_iter()
            .map(|&x| q.aleph_relative_error(x))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter(),
    );
    let diag = diagnostics(&d, q, &xs)?;

    let checks = [
        ("residual", residual_sup <= RESIDUAL_TOL),
        ("wronskian_fundamental", w_fund <= WRONSKIAN_TOL),
        ("wronskian_derived", w_derived <= WRONSKIAN_TOL),
        ("positivity", positive),
        ("aleph", aleph_err <= ALEPH_TOL),
        ("diagnostics", diag.max_defect() <= DIAGNOSTIC_TOL),
    ];
    let pass = checks.iter().all(|c| c.1);

    let mut metrics = Map::new();
    metrics.insert("residual_sup".into(), num(residual_sup));
    metrics.insert("wronskian_fundamental_max".into(), num(w_fund));
    metrics.insert("wronskian_derived_max".into(), num(w_derived));
    metrics.insert("positivity_min".into(), num(h_min.to_f64().unwrap_or(0.0)));
    metrics.insert("positivity_min_log".into(), num(h_min.ln_abs()));
    metrics.insert("aleph_relative_error_max".into(), num(aleph_err));
    let mut dmap = Map::new();
    for e in &diag.entries {
        dmap.insert(
            e.name.clone(),
            json!({ "identity": e.identity, "max_defect": num(e.max_defect), "argmax_point": num(e.argmax_point) }),
        );
    }
    metrics.insert("diagnostics".into(), Value::Object(dmap));
    metrics.insert("points".into(), json!(grid.len()));
    metrics.insert(
        "checks".into(),
        Value::Object(checks.iter().map(|(k, v)| (k.to_string(), json!(v))).collect()),
    );
    Ok(Report::new(cfg, metrics, pass))
}

pub fn roundtrip(cfg: &RunConfig) -> Result<Report> {
    let (d, f) = field(cfg)?;
    let xs = cfg.nodes(f64::from(cfg.alpha));
    let traces = restrict_initial(&f, &xs)?;
    let mut e1: f64 = 0.0;
    let mut e2: f64 = 0.0;
    for (x, (v, vt)) in xs.iter().zip(&traces) {
        e1 = e1.max((v - d.f1.eval(*x)?).abs());
        e2 = e2.max((vt - d.f2.eval(*x)?).abs());
    }
    let pass = e1 <= ROUNDTRIP_TOL && e2 <= ROUNDTRIP_TOL;
    let mut metrics = Map::new();
    metrics.insert("f1_error_sup".into(), num(e1));
    metrics.insert("f2_error_sup".into(), num(e2));
    metrics.insert("points".into(), json!(xs.len()));
    Ok(Report::new(cfg, metrics, pass))
}

fn scaled(e: &SmoothExpr, n: usize) -> SmoothExpr {
    (0.5f64).powi(n as i32) * e.clone()
}

pub fn converge(cfg: &RunConfig) -> Result<Report> {
    let d = cfg.data()?;
    let family: Vec<InitialData> = (0..CONVERGENCE_LEVELS)
        .map(|n| InitialData::new(scaled(&d.f1, n), scaled(&d.f2, n), d.m))
        .collect::<Result<_, _>>()?;
    let target = InitialData::parse("0", "0", d.m)?;
    let indices = SeminormIndex::all_two_d(cfg.alpha, cfg.jet_order);
    let opts = StudyOptions {
        grid: GridSpec::new(cfg.grid).map_err(|e| ConfigError(e.to_string()))?,
        tol: cfg.tol,
    };
    let table = convergence_study(&family, &target, &indices, &opts)?;

    let pass = table
        .verdicts
        .iter()
        .all(|v| v.strictly_decreasing && v.ratio() <= CONVERGENCE_RATIO);
    let worst = table.verdicts.iter().map(|v| v.ratio()).fold(0.0, f64::max);
    let mut metrics = Map::new();
    metrics.insert("columns".into(), json!(table.verdicts.len()));
    metrics.insert(
        "monotone_columns".into(),
        json!(table.verdicts.iter().filter(|v| v.strictly_decreasing).count()),
    );
    metrics.insert("worst_ratio".into(), num(worst));
    metrics.insert("verdicts".into(), serde_json::to_value(&table.verdicts)?);

    let rows = table
        .rows
        .iter()
        .map(|r| {
            vec![
                Cell::from(r.n),
                Cell::from(r.alpha),
                Cell::from(r.beta1),
                Cell::from(r.beta2),
                Cell::from(r.input_dist),
                Cell::from(r.output_dist),
            ]
        })
        .collect();
    let header = ["n", "alpha", "beta1", "beta2", "input_dist", "output_dist"].map(String::from).to_vec();
    Ok(Report::new(cfg, metrics, pass).with_table(Table { header, rows }))
}

pub fn fdb(cfg: &RunConfig) -> Result<Report> {
    let max_order = cfg.max_order.unwrap_or(5);
    let report = verify_formulas(max_order)?;
    let pass = report.pass();
    let deviating: Vec<String> = report
        .checks
        .iter()
        .filter(|c| c.informational && !c.pass)
        .map(|c| format!("{}({},{})", c.formula, c.gamma, c.beta))
        .collect();
    let mut metrics = Map::new();
    metrics.insert("checks".into(), json!(report.checks.len()));
    metrics.insert("failures".into(), json!(report.failures().count()));
    metrics.insert("printed_form_deviations".into(), json!(deviating));

    let rows = report
        .checks
        .iter()
        .map(|c| {
            vec![
                Cell::from(c.formula.as_str()),
                Cell::from(c.gamma),
                Cell::from(c.beta),
                Cell::from(c.exact),
                Cell::from(c.max_abs_error),
                Cell::from(c.pass),
                Cell::from(c.informational),
            ]
        })
        .collect();
    let header = ["formula", "gamma", "beta", "exact", "max_abs_error", "pass", "informational"]
        .map(String::from)
        .to_vec();
    Ok(Report::new(cfg, metrics, pass).with_table(Table { header, rows }))
}

pub fn oracle(cfg: &RunConfig) -> Result<Report> {
    let (d, f) = field(cfg)?;
    let h0 = 1.0 / cfg.grid as f64;
    let x_ext = f64::from(cfg.alpha);
    let runs: Vec<GridField> = [h0, h0 / 2.0, h0 / 4.0]
        .par_iter()
        .map(|&h| fd_solve(&d, x_ext, cfg.tmax, h, FD_COURANT))
        .collect::<Result<_, _>>()?;
    let region = Region { t_max: cfg.tmax, x_max: x_ext };
    let cmp = compare_and_order(&f, &runs, region)?;

    let orders_ok = cmp
        .observed_orders
        .iter()
        .all(|o| (FD_ORDER_RANGE.0..=FD_ORDER_RANGE.1).contains(o));
    let finest = cmp.runs.last().map_or(f64::NAN, |r| r.sup);
    let pass = orders_ok && finest <= FD_SUP_TOL;

    let mut metrics = Map::new();
    metrics.insert("runs".into(), serde_json::to_value(&cmp.runs)?);
    metrics.insert(
        "observed_orders".into(),
        Value::Array(cmp.observed_orders.iter().map(|&o| num(o)).collect()),
    );
    metrics.insert("finest_sup".into(), num(finest));
    metrics.insert("courant".into(), num(FD_COURANT));

    let report = Report::new(cfg, metrics, pass);
    if cfg.format != Format::Csv {
        return Ok(report);
    }
    // CSV output is the finest grid, in the same layout as a field dump.
    let finest_run = runs.last().expect("three runs");
    let rows = finest_run
        .rows()
        .filter(|(t, x, _)| t.abs() <= cfg.tmax + 1e-12 && x.abs() <= x_ext + 1e-12)
        .map(|(t, x, v)| vec![Cell::from(t), Cell::from(x), Cell::from(v)])
        .collect();
    let header = ["t", "x", "F"].map(String::from).to_vec();
    Ok(report.with_table(Table { header, rows }))
}
