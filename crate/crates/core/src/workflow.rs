//! End-to-end runs: truncation choice, thermal state, propagation and
//! per-sample correlator evaluation in one streaming pass.

use serde::{Deserialize, Serialize};

use crate::correlators::{
    coherence_sample, relation_sample, Bridge, CoherenceSample, Decomposition, OtocProbe, OtocSample, RelationReport,
    RelationSample,
};
use crate::dynamics::{propagate_with, GeneratorContext, IntegratorDiagnostics, IntegratorOptions, Picture};
use crate::error::{Error, Result};
use crate::hilbert::{boson_ops, quadrature_ops, HilbertGeometry, SpinMode};
use crate::models::{hamiltonian, BathSpec, ModelSpec};
use crate::operator::OperatorMatrix;
use crate::scalar::Real;
use crate::thermo::{converge_truncation, State, TruncationReport, TruncationSearch};

/// Probe operators of an OTOC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorPair {
    /// Cavity quadratures `q = (a+a†)/√2`, `p = i(a†−a)/√2`.
    #[default]
    Qp,
    /// `(a, a)`, used for the coherence bridge.
    Aa,
}

/// Boson truncation: fixed, or the smallest converged one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    Fixed(usize),
    Auto(TruncationSearch),
}

/// Hilbert-space layout before the boson cutoff is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryPlan {
    pub n_atoms: usize,
    #[serde(default = "default_spin_mode")]
    pub spin_mode: SpinMode,
    pub truncation: Truncation,
}

fn default_spin_mode() -> SpinMode {
    SpinMode::Collective
}

impl GeometryPlan {
    pub fn fixed(n_atoms: usize, spin_mode: SpinMode, fock_dim: usize) -> Self {
        Self {
            n_atoms,
            spin_mode,
            truncation: Truncation::Fixed(fock_dim),
        }
    }

    /// Geometry plus the convergence evidence when the cutoff was searched.
    pub fn resolve<R: Real>(&self, spec: &ModelSpec) -> Result<(HilbertGeometry, Option<TruncationReport>)> {
        match self.truncation {
            Truncation::Fixed(nf) => Ok((HilbertGeometry::new(self.n_atoms, self.spin_mode, nf)?, None)),
            Truncation::Auto(search) => {
                let template = HilbertGeometry::new(self.n_atoms, self.spin_mode, search.start.max(2))?;
                let report = converge_truncation::<R>(spec, template, search)?;
                Ok((template.with_fock_dim(report.fock_dim)?, Some(report)))
            }
        }
    }
}

/// Equilibrium state of `H(0)` at the bath temperature.
pub fn thermal_state<R: Real>(spec: &ModelSpec, bath: &BathSpec, geom: HilbertGeometry) -> Result<State<R>> {
    let h = hamiltonian::<R>(spec, geom, 0.0)?;
    State::thermal(&h, bath.temperature)
}

/// Inputs of a two-time correlator run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtocRequest {
    pub spec: ModelSpec,
    pub bath: BathSpec,
    pub geometry: HilbertGeometry,
    /// Sample times `t ≥ t′`.
    pub times: Vec<f64>,
    #[serde(default)]
    pub pair: OperatorPair,
    /// Time of the second operator.
    #[serde(default)]
    pub t_prime: f64,
    #[serde(default)]
    pub integrator: IntegratorOptions,
    /// Also propagate the composite `(A†A)_t`.
    #[serde(default = "default_true")]
    pub composite: bool,
}

fn default_true() -> bool {
    true
}

/// Per-sample correlator output of [`run_otoc`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtocRun {
    pub times: Vec<f64>,
    pub samples: Vec<OtocSample>,
    /// Filled for the `(a, a)` pair.
    pub coherence: Vec<CoherenceSample>,
    pub diagnostics: IntegratorDiagnostics,
    pub dim: usize,
}

impl OtocRun {
    pub fn decomposition(&self) -> Result<Decomposition> {
        Decomposition::from_samples(&self.times, &self.samples)
    }

    pub fn bridge(&self) -> Result<Bridge> {
        if self.coherence.len() != self.times.len() {
            return Err(Error::Missing("coherence samples (run with the (a, a) pair)".into()));
        }
        Bridge::from_samples(&self.times, &self.coherence)
    }

    pub fn otoc_values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.c).collect()
    }
}

/// `(A, B, A†A)` for the pair.
fn pair_operators<R: Real>(
    pair: OperatorPair,
    geom: HilbertGeometry,
) -> Result<(OperatorMatrix<R>, OperatorMatrix<R>, OperatorMatrix<R>)> {
    Ok(match pair {
        OperatorPair::Qp => {
            let (q, p) = quadrature_ops::<R>(geom);
            let q2 = q.matmul(&q)?.with_hermitian_hint()?;
            (q, p, q2)
        }
        OperatorPair::Aa => {
            let (a, ad) = boson_ops::<R>(geom);
            let n = ad.matmul(&a)?.with_hermitian_hint()?;
            (a.clone(), a, n)
        }
    })
}

fn check_request(req: &OtocRequest) -> Result<()> {
    req.spec.validate()?;
    req.bath.validate()?;
    if req.times.is_empty() {
        return Err(Error::Grid("empty time grid".into()));
    }
    if !(req.t_prime >= 0.0) || req.times[0] < req.t_prime {
        return Err(Error::Grid(format!("times must start at or after t' = {}", req.t_prime)));
    }
    Ok(())
}

/// Propagates `A` (and `(A†A)_t`, and `B` when `t′ > 0`) once, evaluating
/// every correlator at each sample as the trajectory streams past.
pub fn run_otoc<R: Real>(req: &OtocRequest) -> Result<OtocRun> {
    check_request(req)?;
    let state = thermal_state::<R>(&req.spec, &req.bath, req.geometry)?;
    let ctx = GeneratorContext::<R>::new(&req.spec, &req.bath, req.geometry)?;
    run_otoc_with(&ctx, &state, req)
}

/// [`run_otoc`] with a prepared generator and state.
pub fn run_otoc_with<R: Real>(ctx: &GeneratorContext<R>, state: &State<R>, req: &OtocRequest) -> Result<OtocRun> {
    check_request(req)?;
    let (a, b, composite) = pair_operators::<R>(req.pair, req.geometry)?;
    let number = match req.pair {
        OperatorPair::Aa => Some(composite.clone()),
        OperatorPair::Qp => None,
    };
    let need_composite = req.composite || number.is_some();
    let mut initial = vec![a];
    if need_composite {
        initial.push(composite);
    }
    let b_slot = if req.t_prime > 0.0 {
        initial.push(b.clone());
        Some(initial.len() - 1)
    } else {
        None
    };

    let mut grid = Vec::with_capacity(req.times.len() + 1);
    let prime_sample = req.t_prime > 0.0 && req.times[0] > req.t_prime;
    if prime_sample {
        grid.push(req.t_prime);
    }
    grid.extend_from_slice(&req.times);

    let mut frozen_b: Option<OperatorMatrix<R>> = if b_slot.is_none() { Some(b) } else { None };
    let mut samples = Vec::with_capacity(req.times.len());
    let mut coherence = Vec::new();
    let diagnostics = propagate_with(ctx, Picture::Heisenberg, &initial, 0.0, &grid, &req.integrator, |_, t, ops| {
        if let Some(slot) = b_slot {
            if frozen_b.is_none() && (t - req.t_prime).abs() <= 1e-12 * (1.0 + t.abs()) {
                frozen_b = Some(ops[slot].clone());
            }
        }
        if prime_sample && t < req.times[0] {
            return Ok(());
        }
        let b_now = frozen_b.as_ref().ok_or_else(|| Error::Missing("B at t'".into()))?;
        let comp = if need_composite { Some(&ops[1]) } else { None };
        let probe = OtocProbe::new(state, b_now)?;
        samples.push(probe.sample(&ops[0], comp.filter(|_| req.composite))?);
        if let Some(_) = &number {
            coherence.push(coherence_sample(state, &ops[0], b_now, &ops[1])?);
        }
        log::debug!("t = {t:.4}: C = {:.6e}", samples.last().map_or(f64::NAN, |s| s.c));
        Ok(())
    })?;
    Ok(OtocRun {
        times: req.times.clone(),
        samples,
        coherence,
        diagnostics,
        dim: ctx.dim(),
    })
}

/// Relation identities along a `(q, p)` trajectory with `t′ = 0`.
pub fn run_relations<R: Real>(req: &OtocRequest) -> Result<(RelationReport, IntegratorDiagnostics)> {
    check_request(req)?;
    let state = thermal_state::<R>(&req.spec, &req.bath, req.geometry)?;
    let ctx = GeneratorContext::<R>::new(&req.spec, &req.bath, req.geometry)?;
    let (a, b, _) = pair_operators::<R>(OperatorPair::Qp, req.geometry)?;
    let mut initial = vec![a];
    if req.t_prime > 0.0 {
        initial.push(b.clone());
    }
    let mut grid = Vec::new();
    let prime_sample = req.t_prime > 0.0 && req.times[0] > req.t_prime;
    if prime_sample {
        grid.push(req.t_prime);
    }
    grid.extend_from_slice(&req.times);
    let mut frozen_b = if req.t_prime > 0.0 { None } else { Some(b) };
    let mut samples: Vec<RelationSample> = Vec::new();
    let diag = propagate_with(&ctx, Picture::Heisenberg, &initial, 0.0, &grid, &req.integrator, |_, t, ops| {
        if frozen_b.is_none() && (t - req.t_prime).abs() <= 1e-12 * (1.0 + t.abs()) {
            frozen_b = Some(ops[1].clone());
        }
        if prime_sample && t < req.times[0] {
            return Ok(());
        }
        let b_now = frozen_b.as_ref().ok_or_else(|| Error::Missing("B at t'".into()))?;
        samples.push(relation_sample(&state, &ops[0], b_now)?);
        Ok(())
    })?;
    Ok((RelationReport::from_samples(req.times.clone(), samples), diag))
}

/// Uniform grid `start, start+step, …` up to and including `end`.
pub fn uniform_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && end >= start) {
        return Err(Error::Grid(format!("invalid grid [{start}, {end}] step {step}")));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + step * k as f64).collect())
}
