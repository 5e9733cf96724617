//! Run configuration: one JSON document per job.

use std::path::PathBuf;

use dicke_chaos::analysis::{FitMode, LongTimeOptions, WindowSearch};
use dicke_chaos::dynamics::IntegratorOptions;
use dicke_chaos::thermo::PhaseDiagramParams;
use dicke_chaos::workflow::{uniform_grid, GeometryPlan, OperatorPair, Truncation};
use dicke_chaos::{BathSpec, ModelSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    GroundScan,
    PhaseDiagram,
    Otoc,
    OtocSuite,
    Alpha,
    SkewRelations,
    G2,
    Lyapunov,
    LongTime,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Self::GroundScan => "ground_scan",
            Self::PhaseDiagram => "phase_diagram",
            Self::Otoc => "otoc",
            Self::OtocSuite => "otoc_suite",
            Self::Alpha => "alpha",
            Self::SkewRelations => "skew_relations",
            Self::G2 => "g2",
            Self::Lyapunov => "lyapunov",
            Self::LongTime => "long_time",
        }
    }

    fn needs_dynamics(&self) -> bool {
        !matches!(self, Self::GroundScan | Self::PhaseDiagram)
    }
}

/// `start, start + step, …, end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(start: f64, end: f64, step: f64) -> Self {
        Self { start, end, step }
    }

    pub fn points(&self) -> Result<Vec<f64>, String> {
        if !(self.start.is_finite() && self.end.is_finite() && self.step.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        uniform_grid(self.start, self.end, self.step).map_err(|e| e.to_string())
    }
}

/// What a ground scan varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanAxis {
    /// λ (λ₀ for the Floquet model).
    #[default]
    Coupling,
    /// Time, through `H(t)`.
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    #[serde(default)]
    pub axis: ScanAxis,
    pub grid: GridSpec,
    /// Tolerance of the normal-phase label `|E₀/(ω_a j) + 1| ≤ tol`.
    #[serde(default = "default_normal_tol")]
    pub normal_tol: f64,
}

fn default_normal_tol() -> f64 {
    1e-2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpec {
    pub params: PhaseDiagramParams,
    pub lambda: GridSpec,
    pub lambda_prime: GridSpec,
    /// `λ′/λ` values along the boundary curve.
    pub ratios: GridSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Lambda,
    LambdaPrime,
    Kappa,
    Gamma,
    Temperature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    /// Fixed window; searched automatically when absent.
    #[serde(default)]
    pub window: Option<(f64, f64)>,
    #[serde(default)]
    pub mode: FitMode,
    #[serde(default = "default_search")]
    pub search: WindowSearch,
}

fn default_search() -> WindowSearch {
    WindowSearch::new(1.5)
}

impl Default for FitSpec {
    fn default() -> Self {
        Self {
            window: None,
            mode: FitMode::Raw,
            search: default_search(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    #[default]
    F64,
    F32,
}

/// One job. Exactly one task; every field is resolved before any compute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub task: Option<Task>,
    #[serde(default)]
    pub label: Option<String>,
    pub model: ModelSpec,
    #[serde(default = "default_bath")]
    pub bath: BathSpec,
    pub geometry: GeometryPlan,
    #[serde(default)]
    pub times: Option<GridSpec>,
    #[serde(default)]
    pub pair: OperatorPair,
    #[serde(default)]
    pub t_prime: f64,
    #[serde(default)]
    pub integrator: IntegratorOptions,
    #[serde(default)]
    pub scan: Option<ScanSpec>,
    #[serde(default)]
    pub phase: Option<PhaseSpec>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub fit: Option<FitSpec>,
    #[serde(default)]
    pub longtime: LongTimeOptions,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_bath() -> BathSpec {
    BathSpec::closed(0.0)
}

/// One expanded sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunPoint {
    pub label: String,
    pub model: ModelSpec,
    pub bath: BathSpec,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid config: {e}"))
    }

    pub fn task(&self) -> Result<Task, String> {
        self.task.ok_or_else(|| "config does not name a task".to_string())
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.task.map_or("run", |t| t.name()).to_string())
    }

    /// Sweep points in grid order (a single point without a sweep).
    pub fn points(&self) -> Result<Vec<RunPoint>, String> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![RunPoint {
                label: "base".into(),
                model: self.model.clone(),
                bath: self.bath,
            }]);
        };
        if sweep.values.is_empty() {
            return Err("sweep has no values".into());
        }
        Ok(sweep
            .values
            .iter()
            .map(|&v| {
                let mut model = self.model.clone();
                let mut bath = self.bath;
                let name = match sweep.parameter {
                    SweepParameter::Lambda => {
                        model = model.with_lambda(v);
                        "lambda"
                    }
                    SweepParameter::LambdaPrime => {
                        model.lambda_prime = Some(v);
                        "lambda_prime"
                    }
                    SweepParameter::Kappa => {
                        bath.kappa = v;
                        "kappa"
                    }
                    SweepParameter::Gamma => {
                        bath.gamma = v;
                        "gamma"
                    }
                    SweepParameter::Temperature => {
                        bath.temperature = v;
                        "temperature"
                    }
                };
                RunPoint {
                    label: format!("{name}={v}"),
                    model,
                    bath,
                }
            })
            .collect())
    }

    /// Everything that can be checked without heavy numerics.
    pub fn validate(&self) -> Result<(), String> {
        let task = self.task()?;
        if let Some(label) = &self.label {
            if label.is_empty() || label.contains(['/', '\\']) || label == "." || label == ".." {
                return Err(format!("label {label:?} is not a plain directory name"));
            }
        }
        for point in self.points()? {
            point.model.validate().map_err(|e| format!("{}: {e}", point.label))?;
            point.bath.validate().map_err(|e| format!("{}: {e}", point.label))?;
        }
        match self.geometry.truncation {
            Truncation::Fixed(nf) => {
                dicke_chaos::HilbertGeometry::new(self.geometry.n_atoms, self.geometry.spin_mode, nf).map_err(|e| e.to_string())?;
            }
            Truncation::Auto(search) => {
                if !(search.tol > 0.0) || search.cap < 2 {
                    return Err("auto truncation needs tol > 0 and cap >= 2".into());
                }
                dicke_chaos::HilbertGeometry::new(self.geometry.n_atoms, self.geometry.spin_mode, search.start.max(2))
                    .map_err(|e| e.to_string())?;
            }
        }
        if task.needs_dynamics() {
            let times = self.times.ok_or("task needs a `times` grid")?.points()?;
            if times[0] < self.t_prime || self.t_prime < 0.0 {
                return Err(format!("times must start at or after t_prime = {}", self.t_prime));
            }
            if !(self.integrator.rtol > 0.0 && self.integrator.atol >= 0.0) {
                return Err("integrator tolerances must be positive".into());
            }
        }
        match task {
            Task::GroundScan => {
                let scan = self.scan.ok_or("ground_scan needs a `scan` block")?;
                let pts = scan.grid.points()?;
                if pts.len() < 5 {
                    return Err("ground scan needs at least 5 grid points".into());
                }
                if scan.axis == ScanAxis::Time && !self.model.is_time_dependent() {
                    return Err("a time-axis scan needs the Floquet model".into());
                }
            }
            Task::PhaseDiagram => {
                let phase = self.phase.ok_or("phase_diagram needs a `phase` block")?;
                phase.lambda.points()?;
                phase.lambda_prime.points()?;
                phase.ratios.points()?;
                if !(phase.params.s_z < 0.0) {
                    return Err("s_z must be negative".into());
                }
            }
            Task::G2 => {
                if self.pair != OperatorPair::Aa {
                    return Err("g2 needs \"pair\": \"aa\"".into());
                }
            }
            Task::OtocSuite | Task::SkewRelations | Task::Alpha => {
                if self.pair != OperatorPair::Qp {
                    return Err(format!("{} is defined for the Hermitian (q, p) pair", task.name()));
                }
            }
            Task::Lyapunov => {
                if let Some(FitSpec { window: Some((a, b)), .. }) = self.fit {
                    if !(b > a) {
                        return Err("fit window must satisfy start < end".into());
                    }
                }
            }
            Task::Otoc | Task::LongTime => {}
        }
        if self.longtime.tail_fraction <= 0.0 || self.longtime.tail_fraction > 1.0 {
            return Err("longtime.tail_fraction must lie in (0, 1]".into());
        }
        Ok(())
    }

    pub fn integrator(&self) -> IntegratorOptions {
        self.integrator
    }
}
