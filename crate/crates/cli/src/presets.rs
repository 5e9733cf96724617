//! Bundled run configurations, one per figure.

use dicke_chaos::analysis::{FitMode, LongTimeOptions};
use dicke_chaos::dynamics::IntegratorOptions;
use dicke_chaos::thermo::{PhaseDiagramParams, TruncationSearch};
use dicke_chaos::workflow::{GeometryPlan, OperatorPair, Truncation};
use dicke_chaos::{BathSpec, ModelSpec, SpinMode};

use crate::config::{
    FitSpec, GridSpec, PhaseSpec, Precision, RunConfig, ScanAxis, ScanSpec, Sweep, SweepParameter, Task,
};

/// Every preset id with a one-line description.
pub const PRESETS: [(&str, &str); 17] = [
    ("fig1", "generalized Dicke phase diagram, N=7, omega=1, kappa=1, gamma=0"),
    ("fig2", "Dicke ground-state scan, N=20, omega=2"),
    ("fig3", "Tavis-Cummings ground-state scan, N=7, omega=2"),
    ("fig4", "Floquet Dicke ground energy in time, N=7"),
    ("fig5", "generalized Dicke OTOC C_qp(t), N=7, lambda=1.5, lambda'=1.8"),
    ("fig6", "generalized Dicke Lyapunov fit on [1.5, 3.5]"),
    ("fig7", "regularized/physical OTOCs and skew information, generalized Dicke"),
    ("fig8", "|alpha_t| and the ratios sqrt(I/D), sqrt(C/I), generalized Dicke"),
    ("fig9", "Dicke N=25 OTOC for kappa in {0.01, ..., 0.5} at lambda=1.2"),
    ("fig10", "Dicke N=25 Lyapunov fit on [2.0, 4.5] at lambda=1.2"),
    ("fig11", "Tavis-Cummings OTOC for several lambda and the lambda=4.5 fit"),
    ("fig12", "long-time OTOC of the four models, N=7"),
    ("fig13", "all-sector Dicke OTOC, N=4: lambda and kappa sweeps"),
    ("fig14", "(a, a) OTOC for lambda=0.5 and 1.5 with the lambda=1.5 fit, N=7"),
    ("fig15", "g2(t) and C_aa(t), Dicke N=7, lambda=1.5"),
    ("dicke-lambda-sweep", "Dicke N=25 OTOC for several lambda"),
    ("floquet-otoc", "Floquet Dicke OTOC, N=7"),
];

const OMEGA: f64 = 2.0;
const RATE: f64 = 1e-2;

fn bath() -> BathSpec {
    BathSpec::new(RATE, RATE, 1.0)
}

fn auto(n_atoms: usize, spin_mode: SpinMode, start: usize) -> GeometryPlan {
    GeometryPlan {
        n_atoms,
        spin_mode,
        truncation: Truncation::Auto(TruncationSearch {
            tol: 1e-6,
            start,
            cap: 64,
        }),
    }
}

fn base(task: Task, label: &str, model: ModelSpec, geometry: GeometryPlan) -> RunConfig {
    RunConfig {
        task: Some(task),
        label: Some(label.into()),
        model,
        bath: bath(),
        geometry,
        times: None,
        pair: OperatorPair::Qp,
        t_prime: 0.0,
        integrator: IntegratorOptions::default(),
        scan: None,
        phase: None,
        sweep: None,
        fit: None,
        longtime: LongTimeOptions::default(),
        precision: Precision::F64,
        output: None,
    }
}

fn dynamics(task: Task, label: &str, model: ModelSpec, geometry: GeometryPlan, end: f64, step: f64) -> RunConfig {
    RunConfig {
        times: Some(GridSpec::new(0.0, end, step)),
        ..base(task, label, model, geometry)
    }
}

fn swept(mut cfg: RunConfig, parameter: SweepParameter, values: &[f64]) -> RunConfig {
    cfg.sweep = Some(Sweep {
        parameter,
        values: values.to_vec(),
    });
    cfg
}

fn fitted(mut cfg: RunConfig, window: Option<(f64, f64)>) -> RunConfig {
    cfg.fit = Some(FitSpec {
        window,
        mode: FitMode::Raw,
        ..FitSpec::default()
    });
    cfg
}

fn gd() -> ModelSpec {
    ModelSpec::generalized(OMEGA, OMEGA, 1.5, 1.8)
}

fn floquet() -> ModelSpec {
    ModelSpec::floquet(OMEGA, OMEGA, 0.65, 0.75, std::f64::consts::PI)
}

fn seven_atoms() -> GeometryPlan {
    auto(7, SpinMode::Collective, 24)
}

fn gd_geometry() -> GeometryPlan {
    auto(7, SpinMode::Collective, 30)
}

fn large_dicke() -> GeometryPlan {
    auto(25, SpinMode::Collective, 30)
}

/// Configurations of a preset; several runs for multi-panel figures.
pub fn preset(id: &str) -> Option<Vec<RunConfig>> {
    let id = id.to_ascii_lowercase();
    let runs = match id.as_str() {
        "fig1" => {
            let mut cfg = base(
                Task::PhaseDiagram,
                "phase_diagram",
                ModelSpec::generalized(1.0, 1.0, 1.0, 1.0),
                GeometryPlan::fixed(7, SpinMode::Collective, 2),
            );
            cfg.bath = BathSpec::new(0.0, 1.0, 0.0);
            cfg.phase = Some(PhaseSpec {
                params: PhaseDiagramParams {
                    omega_a: 1.0,
                    omega_c: 1.0,
                    kappa: 1.0,
                    gamma: 0.0,
                    s_z: -0.5,
                },
                lambda: GridSpec::new(0.0, 3.0, 0.02),
                lambda_prime: GridSpec::new(0.0, 3.0, 0.02),
                ratios: GridSpec::new(0.0, 3.0, 0.01),
            });
            vec![cfg]
        }
        "fig2" => {
            let mut cfg = base(
                Task::GroundScan,
                "ground_scan",
                ModelSpec::dicke(OMEGA, OMEGA, 1.0),
                auto(20, SpinMode::Collective, 30),
            );
            cfg.bath = BathSpec::closed(0.0);
            cfg.scan = Some(ScanSpec {
                axis: ScanAxis::Coupling,
                grid: GridSpec::new(0.5, 1.5, 0.01),
                normal_tol: 1e-2,
            });
            vec![cfg]
        }
        "fig3" => {
            let mut cfg = base(
                Task::GroundScan,
                "ground_scan",
                ModelSpec::tavis_cummings(OMEGA, OMEGA, 1.0),
                auto(7, SpinMode::Collective, 16),
            );
            cfg.bath = BathSpec::closed(0.0);
            cfg.scan = Some(ScanSpec {
                axis: ScanAxis::Coupling,
                grid: GridSpec::new(0.0, 4.0, 0.02),
                normal_tol: 1e-6,
            });
            vec![cfg]
        }
        "fig4" => {
            let mut cfg = base(Task::GroundScan, "ground_scan", floquet(), auto(7, SpinMode::Collective, 16));
            cfg.bath = BathSpec::closed(0.0);
            cfg.scan = Some(ScanSpec {
                axis: ScanAxis::Time,
                grid: GridSpec::new(0.0, 6.0, 0.01),
                normal_tol: 1e-2,
            });
            vec![cfg]
        }
        "fig5" => vec![dynamics(Task::Otoc, "otoc", gd(), gd_geometry(), 10.0, 0.05)],
        "fig6" => vec![fitted(
            dynamics(Task::Lyapunov, "lyapunov", gd(), gd_geometry(), 10.0, 0.05),
            Some((1.5, 3.5)),
        )],
        "fig7" => vec![
            dynamics(Task::OtocSuite, "otoc_suite", gd(), gd_geometry(), 10.0, 0.05),
            dynamics(Task::SkewRelations, "skew_relations", gd(), gd_geometry(), 10.0, 0.05),
        ],
        "fig8" => vec![dynamics(Task::Alpha, "alpha", gd(), gd_geometry(), 10.0, 0.05)],
        "fig9" => vec![swept(
            dynamics(Task::Otoc, "kappa_sweep", ModelSpec::dicke(OMEGA, OMEGA, 1.2), large_dicke(), 10.0, 0.05),
            SweepParameter::Kappa,
            &[0.01, 0.05, 0.1, 0.2, 0.5],
        )],
        "fig10" => vec![fitted(
            dynamics(Task::Lyapunov, "lyapunov", ModelSpec::dicke(OMEGA, OMEGA, 1.2), large_dicke(), 6.0, 0.05),
            Some((2.0, 4.5)),
        )],
        "fig11" => vec![
            swept(
                dynamics(
                    Task::Otoc,
                    "lambda_sweep",
                    ModelSpec::tavis_cummings(OMEGA, OMEGA, 4.5),
                    auto(7, SpinMode::Collective, 30),
                    10.0,
                    0.05,
                ),
                SweepParameter::Lambda,
                &[1.5, 2.5, 3.5, 4.5],
            ),
            fitted(
                dynamics(
                    Task::Lyapunov,
                    "lyapunov",
                    ModelSpec::tavis_cummings(OMEGA, OMEGA, 4.5),
                    auto(7, SpinMode::Collective, 30),
                    10.0,
                    0.05,
                ),
                None,
            ),
        ],
        "fig12" => {
            let long = |label: &str, model: ModelSpec, start: usize| {
                dynamics(Task::LongTime, label, model, auto(7, SpinMode::Collective, start), 60.0, 0.1)
            };
            vec![
                long("generalized", ModelSpec::generalized(OMEGA, OMEGA, 1.5, 1.2), 24),
                long("dicke", ModelSpec::dicke(OMEGA, OMEGA, 1.5), 24),
                long("tavis_cummings", ModelSpec::tavis_cummings(OMEGA, OMEGA, 4.5), 30),
                long("floquet", floquet(), 24),
            ]
        }
        "fig13" => {
            let geometry = auto(4, SpinMode::FullSectors, 16);
            let model = ModelSpec::dicke(OMEGA, OMEGA, 1.5);
            vec![
                swept(
                    dynamics(Task::Otoc, "lambda_sweep", model.clone(), geometry, 10.0, 0.05),
                    SweepParameter::Lambda,
                    &[0.5, 1.0, 1.5],
                ),
                swept(
                    dynamics(Task::Otoc, "kappa_sweep", model, geometry, 10.0, 0.05),
                    SweepParameter::Kappa,
                    &[0.01, 0.1, 0.5],
                ),
            ]
        }
        "fig14" => {
            let aa = |mut cfg: RunConfig| {
                cfg.pair = OperatorPair::Aa;
                cfg
            };
            vec![
                swept(
                    aa(dynamics(Task::Otoc, "c_aa", ModelSpec::dicke(OMEGA, OMEGA, 1.5), seven_atoms(), 10.0, 0.05)),
                    SweepParameter::Lambda,
                    &[0.5, 1.5],
                ),
                fitted(
                    aa(dynamics(
                        Task::Lyapunov,
                        "lyapunov",
                        ModelSpec::dicke(OMEGA, OMEGA, 1.5),
                        seven_atoms(),
                        10.0,
                        0.05,
                    )),
                    Some((1.0, 3.5)),
                ),
            ]
        }
        "fig15" => {
            let mut cfg = dynamics(Task::G2, "g2", ModelSpec::dicke(OMEGA, OMEGA, 1.5), seven_atoms(), 10.0, 0.05);
            cfg.pair = OperatorPair::Aa;
            vec![cfg]
        }
        "dicke-lambda-sweep" => vec![swept(
            dynamics(Task::Otoc, "lambda_sweep", ModelSpec::dicke(OMEGA, OMEGA, 1.2), large_dicke(), 10.0, 0.05),
            SweepParameter::Lambda,
            &[0.5, 1.0, 1.2, 1.5],
        )],
        "floquet-otoc" => vec![dynamics(Task::Otoc, "otoc", floquet(), seven_atoms(), 10.0, 0.05)],
        _ => return None,
    };
    Some(runs)
}
