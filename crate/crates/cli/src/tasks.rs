//! Task execution: sweep fan-out, per-point numerics and a single collector
//! that writes every artifact.

use std::path::{Path, PathBuf};

use dicke_chaos::analysis::{auto_window, classify_longtime, fit_lyapunov};
use dicke_chaos::correlators::{alpha_t, classify_light, CorrelatorKind, CorrelatorSeries};
use dicke_chaos::dynamics::IntegratorDiagnostics;
use dicke_chaos::thermo::{ground_energy_in_time, ground_scan, TruncationReport, SCAN_CSV_HEADER};
use dicke_chaos::workflow::{run_otoc, run_relations, OtocRequest};
use dicke_chaos::{io, HilbertGeometry, Real};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Precision, RunConfig, RunPoint, ScanAxis, Task};
use crate::plot::{Chart, Curve};

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numerical(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(m) => write!(f, "configuration error: {m}"),
            Self::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

struct Table {
    name: String,
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(name: &str, header: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }
}

/// Everything one grid point produced.
struct PointOutput {
    label: String,
    geometry: Option<HilbertGeometry>,
    truncation: Option<TruncationReport>,
    diagnostics: Option<IntegratorDiagnostics>,
    tables: Vec<Table>,
    summary: Value,
    curves: Vec<Curve>,
}

impl PointOutput {
    fn new(label: &str) -> Self {
        Self {
            label: label.into(),
            geometry: None,
            truncation: None,
            diagnostics: None,
            tables: Vec::new(),
            summary: Value::Null,
            curves: Vec::new(),
        }
    }
}

#[derive(Serialize)]
struct PointRecord<'a> {
    label: &'a str,
    geometry: Option<HilbertGeometry>,
    dim: Option<usize>,
    truncation: &'a Option<TruncationReport>,
    diagnostics: &'a Option<IntegratorDiagnostics>,
    summary: &'a Value,
    files: Vec<String>,
}

/// Summary of a finished run.
#[derive(Debug)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summaries: Vec<Value>,
}

/// Validates, computes every point, then writes artifacts into `dir`.
/// Nothing is created on disk when validation fails.
pub fn run(config: &RunConfig, dir: &Path, jobs: Option<usize>) -> Result<RunSummary, RunError> {
    config.validate().map_err(RunError::Config)?;
    let task = config.task().map_err(RunError::Config)?;
    let points = config.points().map_err(RunError::Config)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| RunError::Config(format!("cannot build worker pool: {e}")))?;
    log::info!("{}: {} point(s)", task.name(), points.len());
    let results: Vec<Result<PointOutput, String>> = pool.install(|| {
        points
            .par_iter()
            .map(|p| match config.precision {
                Precision::F64 => compute::<f64>(config, task, p),
                Precision::F32 => compute::<f32>(config, task, p),
            })
            .collect()
    });

    std::fs::create_dir_all(dir).map_err(|e| RunError::Numerical(format!("cannot create {}: {e}", dir.display())))?;
    let failures: Vec<Value> = points
        .iter()
        .zip(&results)
        .filter_map(|(p, r)| r.as_ref().err().map(|e| json!({"point": p.label, "error": e})))
        .collect();
    if !failures.is_empty() {
        let completed: Vec<Value> = results
            .iter()
            .flatten()
            .map(|o| json!({"point": o.label, "diagnostics": o.diagnostics, "summary": o.summary}))
            .collect();
        let report = json!({
            "status": "failed",
            "task": task.name(),
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "failures": failures,
            "completed": completed,
        });
        io::write_json_file(&dir.join("diagnostics.json"), &report)
            .map_err(|e| RunError::Numerical(format!("cannot write diagnostics: {e}")))?;
        let first = failures[0]["error"].as_str().unwrap_or_default().to_string();
        return Err(RunError::Numerical(first));
    }
    let outputs: Vec<PointOutput> = results.into_iter().map(|r| r.expect("failures handled above")).collect();
    collect(config, task, dir, &outputs).map_err(|e| RunError::Numerical(format!("writing outputs: {e}")))
}

fn collect(config: &RunConfig, task: Task, dir: &Path, outputs: &[PointOutput]) -> dicke_chaos::Result<RunSummary> {
    let swept = config.sweep.is_some();
    let mut written = Vec::new();
    let mut records = Vec::new();
    for out in outputs {
        let mut files = Vec::new();
        for table in &out.tables {
            let name = if swept {
                format!("{}_{}.csv", table.name, file_tag(&out.label))
            } else {
                format!("{}.csv", table.name)
            };
            let header: Vec<&str> = table.header.iter().map(String::as_str).collect();
            let path = dir.join(&name);
            io::write_csv_file(&path, &header, &table.rows)?;
            written.push(path);
            files.push(name);
        }
        records.push(PointRecord {
            label: &out.label,
            geometry: out.geometry,
            dim: out.geometry.map(|g| g.total_dim()),
            truncation: &out.truncation,
            diagnostics: &out.diagnostics,
            summary: &out.summary,
            files,
        });
    }

    let mut chart = chart_for(task, config);
    for out in outputs {
        for curve in &out.curves {
            let mut c = curve.clone();
            if swept {
                c.name = format!("{} {}", out.label, c.name).trim().to_string();
            }
            chart.push(c);
        }
    }
    let svg = dir.join(format!("{}.svg", task.name()));
    std::fs::write(&svg, chart.render())?;
    written.push(svg);

    let meta = json!({
        "tool": "dicke-chaos",
        "version": env!("CARGO_PKG_VERSION"),
        "task": task.name(),
        "config": config,
        "points": records,
    });
    let meta_path = dir.join("metadata.json");
    io::write_json_file(&meta_path, &meta)?;
    written.push(meta_path);
    Ok(RunSummary {
        dir: dir.to_path_buf(),
        files: written,
        summaries: outputs.iter().map(|o| o.summary.clone()).collect(),
    })
}

fn file_tag(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

fn chart_for(task: Task, config: &RunConfig) -> Chart {
    let title = config.label();
    match task {
        Task::GroundScan => match config.scan.map(|s| s.axis) {
            Some(ScanAxis::Time) => Chart::new(title, "t", "E0 / (omega_a j)"),
            _ => Chart::new(title, "lambda", "E0 / (omega_a j)"),
        },
        Task::PhaseDiagram => Chart::new(title, "lambda", "lambda'"),
        Task::Otoc | Task::LongTime | Task::Lyapunov => Chart::new(title, "t", "C(t)").log_y(true),
        Task::OtocSuite => Chart::new(title, "t", "OTOC"),
        Task::SkewRelations => Chart::new(title, "t", "value"),
        Task::Alpha => Chart::new(title, "t", "value"),
        Task::G2 => Chart::new(title, "t", "value").log_y(true),
    }
}

fn numeric<T>(r: dicke_chaos::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn compute<R: Real>(config: &RunConfig, task: Task, point: &RunPoint) -> Result<PointOutput, String> {
    let mut out = PointOutput::new(&point.label);
    match task {
        Task::PhaseDiagram => phase_diagram(config, &mut out)?,
        Task::GroundScan => {
            let scan = config.scan.ok_or("missing scan block")?;
            let grid = scan.grid.points()?;
            let probe = match scan.axis {
                ScanAxis::Coupling => point.model.with_lambda(grid.iter().copied().fold(f64::MIN, f64::max)),
                ScanAxis::Time => point.model.clone(),
            };
            let (geom, trunc) = numeric(config.geometry.resolve::<R>(&probe))?;
            out.geometry = Some(geom);
            out.truncation = trunc;
            match scan.axis {
                ScanAxis::Coupling => {
                    let res = numeric(ground_scan::<R>(&point.model, geom, &grid))?;
                    out.summary = json!({
                        "second_derivative_discontinuity": res.second_derivative_discontinuity(),
                        "departure_from_normal": res.departure_from_normal(scan.normal_tol),
                        "normal_tol": scan.normal_tol,
                    });
                    out.curves.push(Curve::new("E0/(omega_a j)", &res.coupling, &res.scaled_energy));
                    out.curves.push(Curve::new("d/dlambda", &res.coupling, &res.first_derivative).dashed());
                    out.curves.push(Curve::new("d2/dlambda2", &res.coupling, &res.second_derivative).dashed());
                    let mut rows = res.csv_rows();
                    for (row, normal) in rows.iter_mut().zip(res.normal_phase_mask(scan.normal_tol)) {
                        row.push(if normal { 1.0 } else { 0.0 });
                    }
                    let mut header = SCAN_CSV_HEADER.to_vec();
                    header.push("normal_phase");
                    out.tables.push(Table::new("ground_scan", &header, rows));
                }
                ScanAxis::Time => {
                    let e = numeric(ground_energy_in_time::<R>(&point.model, geom, &grid))?;
                    let coupling: Vec<f64> = grid.iter().map(|&t| point.model.coupling_at(t)).collect();
                    let normal: Vec<bool> = e.iter().map(|v| (v + 1.0).abs() <= scan.normal_tol).collect();
                    let rows = (0..grid.len())
                        .map(|k| vec![grid[k], coupling[k], e[k], if normal[k] { 1.0 } else { 0.0 }])
                        .collect();
                    out.summary = json!({
                        "normal_fraction": normal.iter().filter(|n| **n).count() as f64 / normal.len() as f64,
                        "min_scaled_energy": e.iter().copied().fold(f64::INFINITY, f64::min),
                        "normal_tol": scan.normal_tol,
                    });
                    out.curves.push(Curve::new("E0/(omega_a j)", &grid, &e));
                    out.tables.push(Table::new(
                        "ground_scan_time",
                        &["t", "coupling", "scaled_E0", "normal_phase"],
                        rows,
                    ));
                }
            }
        }
        _ => dynamics_task::<R>(config, task, point, &mut out)?,
    }
    Ok(out)
}

fn phase_diagram(config: &RunConfig, out: &mut PointOutput) -> Result<(), String> {
    let phase = config.phase.ok_or("missing phase block")?;
    let params = phase.params;
    let lambdas = phase.lambda.points()?;
    let primes = phase.lambda_prime.points()?;
    let ratios = phase.ratios.points()?;
    let boundary = params.boundary(&ratios);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let rows: Vec<Vec<f64>> = boundary
        .iter()
        .map(|&(r, lc)| {
            let lc = lc.unwrap_or(f64::NAN);
            if lc.is_finite() {
                xs.push(lc);
                ys.push(r * lc);
            }
            vec![r, lc, r * lc]
        })
        .collect();
    out.tables.push(Table::new("boundary", &["ratio", "lambda_c", "lambda_prime_c"], rows));
    let diagram = params.diagram(&lambdas, &primes);
    let mut cells = Vec::with_capacity(lambdas.len() * primes.len());
    let mut superradiant = 0usize;
    for (i, l) in lambdas.iter().enumerate() {
        for (k, lp) in primes.iter().enumerate() {
            let s = diagram[i][k];
            superradiant += s as usize;
            cells.push(vec![*l, *lp, if s { 1.0 } else { 0.0 }]);
        }
    }
    out.tables.push(Table::new("diagram", &["lambda", "lambda_prime", "superradiant"], cells));
    out.summary = json!({
        "lambda_c_at_equal_couplings": params.critical(1.0),
        "superradiant_cells": superradiant,
        "total_cells": lambdas.len() * primes.len(),
    });
    out.curves.push(Curve::new("boundary", &xs, &ys));
    Ok(())
}

fn request(config: &RunConfig, point: &RunPoint, geometry: HilbertGeometry) -> Result<OtocRequest, String> {
    Ok(OtocRequest {
        spec: point.model.clone(),
        bath: point.bath,
        geometry,
        times: config.times.ok_or("missing times")?.points()?,
        pair: config.pair,
        t_prime: config.t_prime,
        integrator: config.integrator(),
        composite: true,
    })
}

fn dynamics_task<R: Real>(config: &RunConfig, task: Task, point: &RunPoint, out: &mut PointOutput) -> Result<(), String> {
    let (geom, trunc) = numeric(config.geometry.resolve::<R>(&point.model))?;
    out.geometry = Some(geom);
    out.truncation = trunc;
    let req = request(config, point, geom)?;
    let times = req.times.clone();

    if matches!(task, Task::OtocSuite | Task::SkewRelations) {
        let (report, diag) = numeric(run_relations::<R>(&req))?;
        out.diagnostics = Some(diag);
        let s = &report.samples;
        let col = |f: &dyn Fn(&dicke_chaos::correlators::RelationSample) -> f64| s.iter().map(f).collect::<Vec<f64>>();
        out.summary = json!({
            "max_commutator_residual": report.max_commutator_residual,
            "max_anticommutator_residual": report.max_anticommutator_residual,
            "max_mixed_residual": report.max_mixed_residual,
        });
        if task == Task::OtocSuite {
            let rows = (0..times.len())
                .map(|k| {
                    let r = &s[k];
                    vec![
                        times[k],
                        r.reg_comm.re,
                        r.phys_comm.re,
                        r.reg_anti.re,
                        r.phys_anti.re,
                        r.reg_mixed.re,
                        r.reg_mixed.im,
                        r.phys_anti_comm.re,
                        r.phys_anti_comm.im,
                        r.phys_comm_anti.re,
                        r.phys_comm_anti.im,
                    ]
                })
                .collect();
            out.tables.push(Table::new(
                "otoc_suite",
                &[
                    "t",
                    "reg_comm",
                    "phys_comm",
                    "reg_anti",
                    "phys_anti",
                    "reg_mixed_re",
                    "reg_mixed_im",
                    "phys_anti_comm_re",
                    "phys_anti_comm_im",
                    "phys_comm_anti_re",
                    "phys_comm_anti_im",
                ],
                rows,
            ));
            out.curves.push(Curve::new("reg [,]", &times, &col(&|r| r.reg_comm.re)));
            out.curves.push(Curve::new("-phys [,]", &times, &col(&|r| -r.phys_comm.re)));
            out.curves.push(Curve::new("reg {,}", &times, &col(&|r| r.reg_anti.re)));
            out.curves.push(Curve::new("phys {,}", &times, &col(&|r| r.phys_anti.re)));
            out.curves.push(Curve::new("Im reg {,}[,]", &times, &col(&|r| r.reg_mixed.im)));
        } else {
            let rows = (0..times.len())
                .map(|k| {
                    let r = &s[k];
                    vec![
                        times[k],
                        r.skew_comm,
                        r.skew_anti,
                        r.skew_plus,
                        r.skew_minus,
                        r.commutator_residual(),
                        r.anticommutator_residual(),
                        r.mixed_residual(),
                    ]
                })
                .collect();
            out.tables.push(Table::new(
                "skew_relations",
                &[
                    "t",
                    "skew_comm",
                    "skew_anti",
                    "skew_plus",
                    "skew_minus",
                    "residual_comm",
                    "residual_anti",
                    "residual_mixed",
                ],
                rows,
            ));
            out.curves.push(Curve::new("I(i[q_t,p])", &times, &col(&|r| r.skew_comm)));
            out.curves.push(Curve::new("I({q_t,p})", &times, &col(&|r| r.skew_anti)));
            out.curves.push(Curve::new("I(K+iM)", &times, &col(&|r| r.skew_plus)).dashed());
            out.curves.push(Curve::new("I(K-iM)", &times, &col(&|r| r.skew_minus)).dashed());
        }
        return Ok(());
    }

    let run = numeric(run_otoc::<R>(&req))?;
    out.diagnostics = Some(run.diagnostics.clone());
    let dec = numeric(run.decomposition())?;
    let c = &dec.c;
    let c_vals = c.real();
    let c_max = c_vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let base = json!({
        "max_reconstruction_residual": dec.max_reconstruction_residual(),
        "max_otoc": c_max,
        "min_envelope_slack": run.samples.iter().map(|s| s.envelope_slack()).fold(f64::INFINITY, f64::min),
    });
    let otoc_table = || {
        let rows = run
            .samples
            .iter()
            .zip(&times)
            .map(|(s, t)| {
                vec![
                    *t,
                    s.c,
                    s.d,
                    s.i,
                    s.f.re,
                    s.f.im,
                    s.d_composite.unwrap_or(f64::NAN),
                    s.reconstruction_residual(),
                ]
            })
            .collect();
        Table::new("otoc", &["t", "C", "D", "I", "F_re", "F_im", "D_composite", "residual"], rows)
    };

    match task {
        Task::Otoc => {
            out.tables.push(otoc_table());
            out.curves.push(Curve::new("C(t)", &times, &c_vals));
            out.summary = base;
        }
        Task::Alpha => {
            let alpha = numeric(alpha_t(c, &dec.d, &dec.i))?;
            let ratio_id: Vec<f64> = run.samples.iter().map(|s| (s.i / s.d).sqrt()).collect();
            let ratio_ci: Vec<f64> = run.samples.iter().map(|s| (s.c / s.i).sqrt()).collect();
            let a = alpha.real();
            let abs_alpha: Vec<f64> = a.iter().map(|v| v.abs()).collect();
            let rows = (0..times.len())
                .map(|k| vec![times[k], a[k], ratio_id[k], ratio_ci[k], run.samples[k].envelope_slack()])
                .collect();
            out.tables.push(Table::new(
                "alpha",
                &["t", "alpha", "sqrt_I_over_D", "sqrt_C_over_I", "envelope_slack"],
                rows,
            ));
            let max_abs = abs_alpha.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
            let mut summary = base;
            summary["max_abs_alpha"] = json!(max_abs);
            summary["undefined_alpha"] = json!(alpha.len() - alpha.defined_count());
            out.summary = summary;
            out.curves.push(Curve::new("|alpha_t|", &times, &abs_alpha));
            out.curves.push(Curve::new("sqrt(I/D)", &times, &ratio_id).dashed());
            out.curves.push(Curve::new("sqrt(C/I)", &times, &ratio_ci).dashed());
        }
        Task::G2 => {
            let bridge = numeric(run.bridge())?;
            let light = numeric(classify_light(&bridge.g2, 1e-6))?;
            let g2 = bridge.g2.real();
            let n = bridge.photon_number.real();
            let rows = (0..times.len())
                .map(|k| {
                    let s = &run.coherence[k];
                    vec![times[k], s.otoc.c, s.numerator, n[k], g2[k], s.bridge_residual()]
                })
                .collect();
            out.tables.push(Table::new(
                "g2",
                &["t", "C_aa", "numerator", "photon_number", "g2", "bridge_residual"],
                rows,
            ));
            let mut summary = base;
            summary["max_bridge_residual"] = json!(bridge.max_residual);
            summary["light"] = serde_json::to_value(&light).unwrap_or(Value::Null);
            out.summary = summary;
            out.curves.push(Curve::new("C_aa(t)", &times, &c_vals));
            out.curves.push(Curve::new("g2(t)", &times, &g2));
        }
        Task::Lyapunov => {
            let spec = config.fit.unwrap_or_default();
            let kind = match config.pair {
                dicke_chaos::workflow::OperatorPair::Qp => CorrelatorKind::CHerm,
                dicke_chaos::workflow::OperatorPair::Aa => CorrelatorKind::CAa,
            };
            let series = numeric(CorrelatorSeries::from_real(kind, times.clone(), &c_vals))?;
            let window = match spec.window {
                Some(w) => w,
                None => numeric(auto_window(&series, &spec.search))?,
            };
            let fit = numeric(fit_lyapunov(&series, window, spec.mode, point.bath.temperature))?;
            out.tables.push(otoc_table());
            let (w0, w1) = fit.window;
            let line_t = [w0, w1];
            let line_c = [
                (fit.intercept + fit.slope * w0).exp(),
                (fit.intercept + fit.slope * w1).exp(),
            ];
            out.curves.push(Curve::new("C(t)", &times, &c_vals));
            out.curves.push(Curve::new(format!("fit slope {:.3}", fit.slope), &line_t, &line_c).dashed());
            let mut summary = base;
            summary["fit"] = serde_json::to_value(&fit).unwrap_or(Value::Null);
            summary["window_source"] = json!(if spec.window.is_some() { "fixed" } else { "auto" });
            out.summary = summary;
        }
        Task::LongTime => {
            let series = numeric(CorrelatorSeries::from_real(CorrelatorKind::CHerm, times.clone(), &c_vals))?;
            let report = numeric(classify_longtime(&series, &config.longtime))?;
            out.tables.push(otoc_table());
            out.curves.push(Curve::new("C(t)", &times, &c_vals));
            let mut summary = base;
            summary["long_time"] = serde_json::to_value(report).unwrap_or(Value::Null);
            out.summary = summary;
        }
        Task::GroundScan | Task::PhaseDiagram | Task::OtocSuite | Task::SkewRelations => unreachable!("handled above"),
    }
    Ok(())
}
