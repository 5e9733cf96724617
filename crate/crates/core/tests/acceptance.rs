//! Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//!
//! Criteria 13, 15 and 16 need long propagations at large dimension and run
//! only with `DICKE_CHAOS_ACCEPTANCE_HEAVY=1`. Criteria 1-7 are exact
//! properties of the numerics and fail the process; the reproductions
//! (8-17) are reported, and fail the process only with
//! `DICKE_CHAOS_ACCEPTANCE_STRICT=1`.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use dicke_chaos::analysis::{
    auto_window, classify_longtime, fit_lyapunov, FitMode, LongTimeBehavior, LongTimeOptions, WindowSearch,
};
use dicke_chaos::correlators::{classify_light, CorrelatorKind, CorrelatorSeries};
use dicke_chaos::dynamics::{propagate, propagate_with, GeneratorContext, IntegratorOptions, Picture};
use dicke_chaos::hilbert::{boson_ops, quadrature_ops};
use dicke_chaos::models::hamiltonian;
use dicke_chaos::thermo::{
    converge_truncation, critical_coupling_gd, ground_scan, thermal_critical_beta, PhaseDiagramParams,
    TruncationSearch,
};
use dicke_chaos::workflow::{run_otoc, run_relations, uniform_grid, OperatorPair, OtocRequest, OtocRun};
use dicke_chaos::{BathSpec, Cx, HilbertGeometry, ModelSpec, Operator};
use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

// Tolerances, pinned.
const GENERATOR_FIXED_POINT_TOL: f64 = 1e-12;
const DUALITY_TOL: f64 = 1e-6;
const CLOSED_ORACLE_TOL: f64 = 1e-7;
const DAMPED_CAVITY_TOL: f64 = 1e-6;
const IDENTITY_TOL: f64 = 1e-8;
const ENVELOPE_TOL: f64 = 1e-8;
const ALPHA_TOL: f64 = 1e-6;
const G2_TOL: f64 = 1e-6;
const DICKE_KINK: (f64, f64) = (1.0, 0.05);
const TC_NORMAL_TOL: f64 = 1e-6;
const TC_DEPARTURE: (f64, f64) = (2.0, 0.1);
const CLOSED_FORM_TOL: f64 = 1e-10;
const THERMAL_TC: (f64, f64) = (1.0, 0.02);
const GD_SLOPE: (f64, f64) = (0.30, 0.06);
const DICKE25_SLOPE: (f64, f64) = (0.36, 0.08);
const DICKE25_FALLBACK: (f64, f64) = (0.2, 0.5);
const TC_SLOPE: (f64, f64) = (0.12, 0.05);
const AA_SLOPE: (f64, f64) = (0.51, 0.1);
const WINDOW_MIN_DURATION: f64 = 1.5;

const OMEGA: f64 = 2.0;

#[derive(Clone, Copy, PartialEq)]
enum Status {
    Pass,
    Fail,
    Skip,
}

struct Suite {
    heavy: bool,
    failures_exact: usize,
    failures_reproduction: usize,
    series: Vec<(String, f64, f64)>,
}

impl Suite {
    fn report(&mut self, id: u32, status: Status, title: &str, detail: String) {
        let tag = match status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        println!("[{tag}] criterion {id:>2}: {title} | {detail}");
        let _ = std::io::stdout().flush();
        if status == Status::Fail {
            if id <= 7 {
                self.failures_exact += 1;
            } else {
                self.failures_reproduction += 1;
            }
        }
    }

    /// Records the envelope slack and the largest |α| of a produced series.
    fn track(&mut self, name: &str, run: &OtocRun) {
        let slack = run
            .samples
            .iter()
            .map(|s| s.envelope_slack())
            .fold(f64::INFINITY, f64::min);
        let alpha = run
            .samples
            .iter()
            .filter_map(|s| s.alpha())
            .map(f64::abs)
            .fold(0.0, f64::max);
        self.series.push((name.to_string(), slack, alpha));
    }
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn within(x: f64, (target, tol): (f64, f64)) -> bool {
    (x - target).abs() <= tol
}

fn dissipative_bath() -> BathSpec {
    BathSpec::new(0.01, 0.01, 1.0)
}

fn collective(n: usize, nf: usize) -> HilbertGeometry {
    HilbertGeometry::collective(n, nf).unwrap()
}

fn otoc_run(spec: ModelSpec, bath: BathSpec, geom: HilbertGeometry, times: Vec<f64>, pair: OperatorPair) -> OtocRun {
    run_otoc::<f64>(&OtocRequest {
        spec,
        bath,
        geometry: geom,
        times,
        pair,
        t_prime: 0.0,
        integrator: IntegratorOptions::default(),
        composite: true,
    })
    .expect("OTOC propagation")
}

fn series(run: &OtocRun, kind: CorrelatorKind) -> CorrelatorSeries {
    CorrelatorSeries::from_real(kind, run.times.clone(), &run.otoc_values()).unwrap()
}

fn max_abs_diff(a: &Array2<Cx<f64>>, b: &Array2<Cx<f64>>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn random_hermitian(runner: &mut TestRunner, geom: HilbertGeometry) -> Operator {
    let d = geom.total_dim();
    let values = proptest::collection::vec(-1.0..1.0f64, 2 * d * d)
        .new_tree(runner)
        .unwrap()
        .current();
    let m = Array2::from_shape_fn((d, d), |(i, j)| Cx::new(values[2 * (i * d + j)], values[2 * (i * d + j) + 1]));
    let h = (&m + &m.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
    Operator::new_hermitian(h, geom).unwrap()
}

fn all_models() -> Vec<ModelSpec> {
    vec![
        ModelSpec::generalized(OMEGA, OMEGA, 1.5, 1.8),
        ModelSpec::dicke(OMEGA, OMEGA, 1.2),
        ModelSpec::tavis_cummings(OMEGA, OMEGA, 2.5),
        ModelSpec::floquet(OMEGA, OMEGA, 0.65, 0.75, PI),
    ]
}

fn criterion_1(suite: &mut Suite) {
    let geom = collective(3, 5);
    let id = Operator::identity(geom);
    let mut worst: f64 = 0.0;
    for spec in all_models() {
        for gamma in [0.0, 1e-2, 0.5] {
            for kappa in [0.0, 1e-2, 0.5] {
                for temperature in [0.0, 1.0] {
                    let ctx = GeneratorContext::<f64>::new(&spec, &BathSpec::new(gamma, kappa, temperature), geom).unwrap();
                    for t in [0.0, 0.37, 1.3] {
                        worst = worst.max(ctx.apply_adjoint_generator(&id, t).unwrap().max_abs());
                    }
                }
            }
        }
    }
    suite.report(
        1,
        status(worst <= GENERATOR_FIXED_POINT_TOL),
        "adjoint generator annihilates the identity",
        format!("max ‖L†(I)‖ = {worst:.2e} (tol {GENERATOR_FIXED_POINT_TOL:.0e})"),
    );
}

fn criterion_2(suite: &mut Suite) {
    let geom = collective(2, 4);
    let spec = ModelSpec::generalized(OMEGA, OMEGA, 1.5, 1.8);
    let bath = BathSpec::new(0.3, 0.5, 1.0);
    let ctx = GeneratorContext::<f64>::new(&spec, &bath, geom).unwrap();
    let mut runner = TestRunner::deterministic();
    let observables: Vec<Operator> = (0..20).map(|_| random_hermitian(&mut runner, geom)).collect();
    let seed = random_hermitian(&mut runner, geom);
    let rho0 = {
        let m = seed.data();
        let mut r = m.dot(m) + Array2::<Cx<f64>>::eye(geom.total_dim()).mapv(|z| z * 0.1);
        let tr: Cx<f64> = r.diag().sum();
        r.mapv_inplace(|z| z / tr);
        Operator::new_hermitian(r, geom).unwrap()
    };
    let times = [0.5, 1.0, 2.0];
    let opts = IntegratorOptions::default();
    let mut evolved = Vec::new();
    propagate_with(&ctx, Picture::Heisenberg, &observables, 0.0, &times, &opts, |_, _, ops| {
        evolved.push(ops.to_vec());
        Ok(())
    })
    .unwrap();
    let states = dicke_chaos::dynamics::propagate_state(&ctx, &rho0, &times, &opts).unwrap();
    let tr = |a: &Operator, b: &Operator| -> Cx<f64> { a.data().dot(b.data()).diag().sum() };
    let mut worst: f64 = 0.0;
    for (k, rho_t) in states.operators.iter().enumerate() {
        for (a0, a_t) in observables.iter().zip(&evolved[k]) {
            worst = worst.max((tr(&rho0, a_t) - tr(rho_t, a0)).norm());
        }
    }
    suite.report(
        2,
        status(worst <= DUALITY_TOL),
        "Heisenberg/Schrodinger duality, 20 random observables",
        format!("max |Tr(ρ0 A_t) − Tr(ρ_t A0)| = {worst:.2e} (tol {DUALITY_TOL:.0e})"),
    );
}

fn criterion_3(suite: &mut Suite) {
    let geom = collective(2, 4);
    let spec = ModelSpec::generalized(OMEGA, OMEGA, 1.5, 1.8);
    let ctx = GeneratorContext::<f64>::new(&spec, &BathSpec::closed(1.0), geom).unwrap();
    let (q, _) = quadrature_ops::<f64>(geom);
    let times = uniform_grid(0.5, 10.0, 0.5).unwrap();
    let res = propagate(&ctx, &q, &times, &IntegratorOptions::default()).unwrap();

    let h = hamiltonian::<f64>(&spec, geom, 0.0).unwrap();
    let (energies, vectors) = h.data().eigh(UPLO::Lower).unwrap();
    let vd = vectors.t().mapv(|z| z.conj());
    let q_eig = vd.dot(q.data()).dot(&vectors);
    let mut worst: f64 = 0.0;
    for (t, a_t) in times.iter().zip(&res.operators) {
        let evolved = Array2::from_shape_fn(q_eig.dim(), |(i, j)| {
            q_eig[(i, j)] * Cx::from_polar(1.0, (energies[i] - energies[j]) * t)
        });
        let exact = vectors.dot(&evolved).dot(&vd);
        worst = worst.max(max_abs_diff(&exact, a_t.data()));
    }
    suite.report(
        3,
        status(worst <= CLOSED_ORACLE_TOL),
        "closed-system propagation matches the eigendecomposition oracle on [0, 10]",
        format!("max |Δ| = {worst:.2e} (tol {CLOSED_ORACLE_TOL:.0e})"),
    );
}

fn criterion_4(suite: &mut Suite) {
    let geom = collective(1, 8);
    let (omega, kappa) = (OMEGA, 0.3);
    let spec = ModelSpec::dicke(1.0, omega, 0.0);
    let ctx = GeneratorContext::<f64>::new(&spec, &BathSpec::new(0.0, kappa, 0.0), geom).unwrap();
    let (a, _) = boson_ops::<f64>(geom);
    let times = uniform_grid(0.5, 10.0, 0.5).unwrap();
    let res = propagate(&ctx, &a, &times, &IntegratorOptions::default()).unwrap();
    let mut worst: f64 = 0.0;
    for (t, a_t) in times.iter().zip(&res.operators) {
        let factor = (Cx::new(-kappa / 2.0, -omega) * *t).exp();
        worst = worst.max(max_abs_diff(&a.data().mapv(|z| z * factor), a_t.data()));
    }
    suite.report(
        4,
        status(worst <= DAMPED_CAVITY_TOL),
        "damped cavity a(t) = exp((−iω−κ/2)t) a",
        format!("max |Δ| = {worst:.2e} (tol {DAMPED_CAVITY_TOL:.0e})"),
    );
}

fn criterion_5(suite: &mut Suite) {
    let geom = collective(3, 6);
    let spec = ModelSpec::generalized(OMEGA, OMEGA, 1.5, 1.8);
    let times = uniform_grid(0.0, 5.0, 0.25).unwrap();
    let qp = otoc_run(spec.clone(), dissipative_bath(), geom, times.clone(), OperatorPair::Qp);
    suite.track("N=3 (q,p)", &qp);
    let decomposition = qp.decomposition().unwrap().max_reconstruction_residual();
    let (relations, _) = run_relations::<f64>(&OtocRequest {
        spec: spec.clone(),
        bath: dissipative_bath(),
        geometry: geom,
        times: times.clone(),
        pair: OperatorPair::Qp,
        t_prime: 0.0,
        integrator: IntegratorOptions::default(),
        composite: false,
    })
    .unwrap();
    let aa = otoc_run(spec, dissipative_bath(), geom, times, OperatorPair::Aa);
    suite.track("N=3 (a,a)", &aa);
    let bridge = aa.bridge().unwrap().max_residual;
    let worst = decomposition.max(relations.max_residual()).max(bridge);
    suite.report(
        5,
        status(worst <= IDENTITY_TOL),
        "C = D + I − 2ReF, regularized/physical relations and the g2 bridge",
        format!(
            "decomposition {decomposition:.1e}, relations {:.1e}, bridge {bridge:.1e} (tol {IDENTITY_TOL:.0e})",
            relations.max_residual()
        ),
    );
}

fn criterion_6(suite: &mut Suite) {
    let worst_slack = suite.series.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let worst_alpha = suite.series.iter().map(|s| s.2).fold(0.0, f64::max);
    let names: Vec<&str> = suite.series.iter().map(|s| s.0.as_str()).collect();
    let ok = worst_slack >= -ENVELOPE_TOL && worst_alpha <= 1.0 + ALPHA_TOL;
    suite.report(
        6,
        status(ok),
        "Cauchy-Schwarz envelope and |α_t| ≤ 1 on every produced series",
        format!(
            "{} series [{}]: min slack {worst_slack:.2e}, max |α| {worst_alpha:.6}",
            names.len(),
            names.join(", ")
        ),
    );
}

fn criterion_7(suite: &mut Suite) {
    let nf = 60;
    let geom = collective(1, nf);
    let (omega_c, temperature) = (OMEGA, 1.0);
    let run = otoc_run(
        ModelSpec::dicke(1.0, omega_c, 0.0),
        BathSpec::closed(temperature),
        geom,
        vec![0.0, 0.5, 1.0],
        OperatorPair::Aa,
    );
    suite.track("free cavity (a,a)", &run);
    let g2 = run.coherence[0].g2.unwrap();
    let weights: Vec<f64> = (0..nf).map(|n| (-(n as f64) * omega_c / temperature).exp()).collect();
    let z: f64 = weights.iter().sum();
    let mean: f64 = weights.iter().enumerate().map(|(n, w)| n as f64 * w).sum::<f64>() / z;
    let second: f64 = weights.iter().enumerate().map(|(n, w)| (n * n.saturating_sub(1)) as f64 * w).sum::<f64>() / z;
    let oracle = second / (mean * mean);
    let ok = (g2 - 2.0).abs() <= G2_TOL && (g2 - oracle).abs() <= 1e-10;
    suite.report(
        7,
        status(ok),
        "free-cavity thermal g2(0) = 2",
        format!("g2(0) = {g2:.12}, Fock-sum oracle {oracle:.12} (tol {G2_TOL:.0e})"),
    );
}

fn criterion_8(suite: &mut Suite) {
    let start = Instant::now();
    let grid = uniform_grid(0.8, 1.2, 0.01).unwrap();
    let spec = ModelSpec::dicke(OMEGA, OMEGA, 1.0);
    let search = TruncationSearch {
        tol: 1e-6,
        start: 12,
        cap: 64,
    };
    let report = converge_truncation::<f64>(&spec.with_lambda(1.2), collective(20, 12), search).unwrap();
    let scan = ground_scan::<f64>(&spec, collective(20, report.fock_dim), &grid).unwrap();
    let kink = scan.second_derivative_discontinuity();
    suite.report(
        8,
        status(within(kink, DICKE_KINK)),
        "Dicke N=20 second-derivative discontinuity near λ = 1",
        format!("kink at λ = {kink:.3}, n_f = {}, {:.1} s", report.fock_dim, start.elapsed().as_secs_f64()),
    );
}

fn criterion_9(suite: &mut Suite) {
    let grid = uniform_grid(0.0, 3.0, 0.02).unwrap();
    let scan = ground_scan::<f64>(&ModelSpec::tavis_cummings(OMEGA, OMEGA, 1.0), collective(7, 16), &grid).unwrap();
    let below = scan
        .coupling
        .iter()
        .zip(&scan.scaled_energy)
        .filter(|(l, _)| **l < 2.0)
        .map(|(_, e)| (e + 1.0).abs())
        .fold(0.0, f64::max);
    let departure = scan.departure_from_normal(TC_NORMAL_TOL);
    let ok = below <= TC_NORMAL_TOL && departure.is_some_and(|d| within(d, TC_DEPARTURE));
    suite.report(
        9,
        status(ok),
        "Tavis-Cummings N=7 scaled E0 = −1 below λ = 2 and departs at λ ≈ 2",
        format!("max |E0/(ω_a j) + 1| for λ<2: {below:.1e}, departure at {departure:?}"),
    );
}

fn criterion_10(suite: &mut Suite) {
    let params = PhaseDiagramParams {
        omega_a: 1.0,
        omega_c: 1.0,
        kappa: 1.0,
        gamma: 0.0,
        s_z: -0.5,
    };
    let step = 1e-3;
    let ratios = uniform_grid(step, 3.0, step).unwrap();
    let (argmin, min) = params
        .boundary(&ratios)
        .into_iter()
        .filter_map(|(r, l)| l.map(|l| (r, l)))
        .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    let at_equal = params.critical(1.0).unwrap_or(f64::NAN);
    let closed = (-(params.omega_c.powi(2) + params.kappa.powi(2)) * (params.omega_a.powi(2) + params.gamma.powi(2))
        / (8.0 * params.omega_a * params.omega_c * params.s_z))
        .sqrt();
    let tc_limit = critical_coupling_gd(1.0, 1.0, 1.0, 0.0, -0.5, 0.0);
    let min_ok = (argmin - 1.0).abs() <= step;
    let closed_ok = (at_equal - closed).abs() <= CLOSED_FORM_TOL;
    suite.report(
        10,
        status(min_ok && closed_ok && tc_limit.is_none()),
        "phase boundary minimum at λ = λ′, closed form there, no TC root",
        format!(
            "argmin λ′/λ = {argmin:.3} (λ_c = {min:.6}); λ_c(1) = {at_equal:.12} vs {closed:.12}; TC limit {tc_limit:?}"
        ),
    );
}

fn criterion_11(suite: &mut Suite) {
    let beta = thermal_critical_beta(2.0, 2.0, 1.15).unwrap_or(f64::NAN);
    let tc = 1.0 / beta;
    suite.report(
        11,
        status(within(tc, THERMAL_TC)),
        "thermal critical temperature for ω_a = ω_c = 2, λ = 1.15",
        format!("T_c = {tc:.4}"),
    );
}

fn fit_line(s: &CorrelatorSeries, window: (f64, f64), temperature: f64) -> dicke_chaos::analysis::FitResult {
    fit_lyapunov(s, window, FitMode::Raw, temperature).expect("fit")
}

fn criterion_12(suite: &mut Suite) {
    let start = Instant::now();
    let run = otoc_run(
        ModelSpec::generalized(OMEGA, OMEGA, 1.5, 1.8),
        dissipative_bath(),
        collective(7, 30),
        uniform_grid(0.0, 10.0, 0.05).unwrap(),
        OperatorPair::Qp,
    );
    suite.track("generalized N=7 (q,p), t ≤ 10", &run);
    let fit = fit_line(&series(&run, CorrelatorKind::CHerm), (1.5, 3.5), 1.0);
    let ok = within(fit.slope, GD_SLOPE) && fit.slope <= 2.0 * PI;
    suite.report(
        12,
        status(ok),
        "generalized Dicke slope of log C on [1.5, 3.5] = 0.30 ± 0.06",
        format!(
            "slope = {:.4} (r² {:.4}), slope/2 = {:.4}, 2πT = {:.3}, n_f = 30, {:.0} s",
            fit.slope,
            fit.r_squared,
            fit.slope / 2.0,
            2.0 * PI,
            start.elapsed().as_secs_f64()
        ),
    );
}

fn criterion_13(suite: &mut Suite) {
    let title = "Dicke N=25, λ = 1.2, slope on [2.0, 4.5] = 0.36 ± 0.08";
    if !suite.heavy {
        suite.report(13, Status::Skip, title, "heavy; set DICKE_CHAOS_ACCEPTANCE_HEAVY=1".into());
        return;
    }
    let start = Instant::now();
    let spec = ModelSpec::dicke(OMEGA, OMEGA, 1.2);
    let search = TruncationSearch {
        tol: 1e-6,
        start: 16,
        cap: 64,
    };
    let base = converge_truncation::<f64>(&spec, collective(25, 16), search);
    let times = uniform_grid(0.0, 5.0, 0.05).unwrap();
    let mut slopes = Vec::new();
    let nf0 = base.as_ref().map(|r| r.fock_dim).unwrap_or(search.cap);
    for nf in [nf0, nf0 + 6] {
        let run = otoc_run(spec.clone(), dissipative_bath(), collective(25, nf), times.clone(), OperatorPair::Qp);
        suite.track(&format!("Dicke N=25 n_f={nf}"), &run);
        let s = series(&run, CorrelatorKind::CHerm);
        slopes.push((nf, fit_line(&s, (2.0, 4.5), 1.0), auto_window(&s, &WindowSearch::new(WINDOW_MIN_DURATION))));
    }
    let converged = base.is_ok() && (slopes[0].1.slope - slopes[1].1.slope).abs() <= 0.01;
    let slope = slopes[1].1.slope;
    let ok = if converged {
        within(slope, DICKE25_SLOPE)
    } else {
        slopes[1].2.is_ok() && slope >= DICKE25_FALLBACK.0 && slope <= DICKE25_FALLBACK.1
    };
    suite.report(
        13,
        status(ok),
        title,
        format!(
            "n_f {} → slope {:.4}, n_f {} → slope {:.4} (r² {:.4}), slope/2 = {:.4}, converged: {converged}, {:.0} s",
            slopes[0].0,
            slopes[0].1.slope,
            slopes[1].0,
            slope,
            slopes[1].1.r_squared,
            slope / 2.0,
            start.elapsed().as_secs_f64()
        ),
    );
}

fn criterion_14(suite: &mut Suite) {
    let times = uniform_grid(0.0, 10.0, 0.05).unwrap();
    let search = WindowSearch::new(WINDOW_MIN_DURATION);
    let above = otoc_run(
        ModelSpec::tavis_cummings(OMEGA, OMEGA, 4.5),
        dissipative_bath(),
        collective(7, 30),
        times.clone(),
        OperatorPair::Qp,
    );
    suite.track("Tavis-Cummings λ=4.5", &above);
    let below = otoc_run(
        ModelSpec::tavis_cummings(OMEGA, OMEGA, 1.5),
        dissipative_bath(),
        collective(7, 30),
        times,
        OperatorPair::Qp,
    );
    suite.track("Tavis-Cummings λ=1.5", &below);
    let s_above = series(&above, CorrelatorKind::CHerm);
    let window = auto_window(&s_above, &search);
    let fit = window.as_ref().ok().map(|w| fit_line(&s_above, *w, 1.0));
    let none_below = auto_window(&series(&below, CorrelatorKind::CHerm), &search);
    let ok = fit.as_ref().is_some_and(|f| within(f.slope, TC_SLOPE)) && none_below.is_err();
    let detail = match &fit {
        Some(f) => format!(
            "λ=4.5 auto window {:?}: slope {:.4} (r² {:.4}), slope/2 {:.4}; λ=1.5 window: {:?}",
            f.window,
            f.slope,
            f.r_squared,
            f.slope / 2.0,
            none_below.map_err(|e| e.to_string())
        ),
        None => format!("λ=4.5: no window ({:?})", window.err().map(|e| e.to_string())),
    };
    suite.report(14, status(ok), "Tavis-Cummings λ=4.5 slope 0.12 ± 0.05, none at λ=1.5", detail);
}

fn criterion_15(suite: &mut Suite) {
    let title = "long-time: TC and Floquet decay, generalized and Dicke saturate";
    if !suite.heavy {
        suite.report(15, Status::Skip, title, "heavy; set DICKE_CHAOS_ACCEPTANCE_HEAVY=1".into());
        return;
    }
    let start = Instant::now();
    let times = uniform_grid(0.0, 60.0, 0.1).unwrap();
    let cases = [
        ("TC", ModelSpec::tavis_cummings(OMEGA, OMEGA, 4.5), 30, LongTimeBehavior::DecaysToZero),
        ("FD", ModelSpec::floquet(OMEGA, OMEGA, 0.65, 0.75, PI), 24, LongTimeBehavior::DecaysToZero),
        ("GD", ModelSpec::generalized(OMEGA, OMEGA, 1.5, 1.2), 24, LongTimeBehavior::SaturatesNonzero),
        ("Dicke", ModelSpec::dicke(OMEGA, OMEGA, 1.5), 24, LongTimeBehavior::SaturatesNonzero),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, spec, nf, expected) in cases {
        let run = otoc_run(spec, dissipative_bath(), collective(7, nf), times.clone(), OperatorPair::Qp);
        suite.track(&format!("{name} long-time"), &run);
        let report = classify_longtime(&series(&run, CorrelatorKind::CHerm), &LongTimeOptions::default()).unwrap();
        ok &= report.behavior == expected;
        parts.push(format!(
            "{name}: {:?} (tail mean {:.3}, max {:.3})",
            report.behavior, report.tail_mean, report.series_max
        ));
    }
    parts.push(format!("{:.0} s", start.elapsed().as_secs_f64()));
    suite.report(15, status(ok), title, parts.join("; "));
}

fn criterion_16(suite: &mut Suite) {
    let title = "Dicke N=25, λ = 1.2: max C strictly decreasing in κ, κ = 0.5 decays";
    if !suite.heavy {
        suite.report(16, Status::Skip, title, "heavy; set DICKE_CHAOS_ACCEPTANCE_HEAVY=1".into());
        return;
    }
    let start = Instant::now();
    let times = uniform_grid(0.0, 10.0, 0.05).unwrap();
    let mut maxima = Vec::new();
    let mut last = None;
    for kappa in [0.01, 0.05, 0.1, 0.2, 0.5] {
        let run = otoc_run(
            ModelSpec::dicke(OMEGA, OMEGA, 1.2),
            BathSpec::new(0.01, kappa, 1.0),
            collective(25, 28),
            times.clone(),
            OperatorPair::Qp,
        );
        suite.track(&format!("Dicke N=25 κ={kappa}"), &run);
        let s = series(&run, CorrelatorKind::CHerm);
        maxima.push((kappa, run.otoc_values().into_iter().fold(f64::NEG_INFINITY, f64::max)));
        last = Some(classify_longtime(&s, &LongTimeOptions::default()).unwrap());
    }
    let decreasing = maxima.windows(2).all(|w| w[1].1 < w[0].1);
    let last = last.unwrap();
    let ok = decreasing && last.behavior == LongTimeBehavior::DecaysToZero;
    suite.report(
        16,
        status(ok),
        title,
        format!(
            "max C by κ: {:?}; κ=0.5: {:?} (tail mean {:.4}); {:.0} s",
            maxima,
            last.behavior,
            last.tail_mean,
            start.elapsed().as_secs_f64()
        ),
    );
}

fn criterion_17(suite: &mut Suite) {
    let times = uniform_grid(0.0, 10.0, 0.05).unwrap();
    let search = WindowSearch::new(WINDOW_MIN_DURATION);
    let above = otoc_run(
        ModelSpec::dicke(OMEGA, OMEGA, 1.5),
        dissipative_bath(),
        collective(7, 24),
        times.clone(),
        OperatorPair::Aa,
    );
    suite.track("Dicke (a,a) λ=1.5", &above);
    let below = otoc_run(
        ModelSpec::dicke(OMEGA, OMEGA, 0.5),
        dissipative_bath(),
        collective(7, 24),
        times,
        OperatorPair::Aa,
    );
    suite.track("Dicke (a,a) λ=0.5", &below);
    let s_above = series(&above, CorrelatorKind::CAa);
    let window_above = auto_window(&s_above, &search);
    let window_below = auto_window(&series(&below, CorrelatorKind::CAa), &search);
    let fit = fit_line(&s_above, (1.0, 3.5), 1.0);
    let light = classify_light(&above.bridge().unwrap().g2, 1e-6).unwrap();
    let ok = window_above.is_ok() && window_below.is_err() && within(fit.slope, AA_SLOPE) && light.bunched;
    suite.report(
        17,
        status(ok),
        "(a,a) OTOC window at λ=1.5 not 0.5, slope 0.51 ± 0.1, g2(t) < g2(0)",
        format!(
            "λ=1.5 window {:?}; λ=0.5 window {:?}; slope on [1, 3.5] {:.4} (r² {:.4}), slope/2 {:.4}; g2(0) {:.4}, bunched {}",
            window_above.map_err(|e| e.to_string()),
            window_below.map_err(|e| e.to_string()),
            fit.slope,
            fit.r_squared,
            fit.slope / 2.0,
            light.g2_zero,
            light.bunched
        ),
    );
}

fn main() {
    let flag = |name: &str| std::env::var(name).is_ok_and(|v| v == "1");
    let mut suite = Suite {
        heavy: flag("DICKE_CHAOS_ACCEPTANCE_HEAVY"),
        failures_exact: 0,
        failures_reproduction: 0,
        series: Vec::new(),
    };
    let start = Instant::now();
    criterion_1(&mut suite);
    criterion_2(&mut suite);
    criterion_3(&mut suite);
    criterion_4(&mut suite);
    criterion_5(&mut suite);
    criterion_7(&mut suite);
    criterion_8(&mut suite);
    criterion_9(&mut suite);
    criterion_10(&mut suite);
    criterion_11(&mut suite);
    criterion_12(&mut suite);
    criterion_13(&mut suite);
    criterion_14(&mut suite);
    criterion_15(&mut suite);
    criterion_16(&mut suite);
    criterion_17(&mut suite);
    criterion_6(&mut suite);
    println!(
        "acceptance: {} exact-property failure(s), {} reproduction failure(s), {:.0} s",
        suite.failures_exact,
        suite.failures_reproduction,
        start.elapsed().as_secs_f64()
    );
    let strict = flag("DICKE_CHAOS_ACCEPTANCE_STRICT");
    if suite.failures_exact > 0 || (strict && suite.failures_reproduction > 0) {
        std::process::exit(1);
    }
}
