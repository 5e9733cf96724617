//! Operator (Heisenberg) and state (Schrödinger) propagation under the
//! Lindblad generator.
//!
//! The adjoint generator is written as
//! `𝓛†(A) = G A + A G† + Σ_k c_k Y_k† A Y_k` with
//! `G = iH − ½ Σ_k c_k Y_k† Y_k`, where each jump channel `L` contributes an
//! emission term `(Y, c) = (L, ν(N_th+1))` and an absorption term
//! `(Y, c) = (L†, ν N_th)`.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::HilbertGeometry;
use crate::models::{hamiltonian_parts, jump_operators, BathSpec, ModelSpec};
use crate::operator::{conj_transpose, hermiticity_deviation, kron, symmetrize, OperatorMatrix};
use crate::scalar::{Cx, Real};
use crate::sparse::CsrMatrix;

/// Drift above which a Hermitian trajectory is re-symmetrized.
pub const HERMITICITY_DRIFT_TOL: f64 = 1e-6;

/// Largest Hilbert dimension accepted by the superoperator path.
pub const MAX_SUPEROPERATOR_DIM: usize = 32;

/// One `c · Y† · Y` dissipator term.
#[derive(Debug, Clone)]
struct DissipatorTerm<R: Real> {
    jump: CsrMatrix<R>,
    jump_adj: CsrMatrix<R>,
    coeff: R,
}

/// Everything needed to evaluate the generator at any time.
#[derive(Debug, Clone)]
pub struct GeneratorContext<R: Real> {
    spec: ModelSpec,
    bath: BathSpec,
    geom: HilbertGeometry,
    h_static: OperatorMatrix<R>,
    drive: Option<OperatorMatrix<R>>,
    /// `(L, L†, L†L, L L†, ν, N_th)` per channel.
    channels: Vec<ChannelCache<R>>,
    g_static: CsrMatrix<R>,
    g_static_adj: CsrMatrix<R>,
    drive_sparse: Option<CsrMatrix<R>>,
    terms: Vec<DissipatorTerm<R>>,
    spectral_bound: f64,
}

/// Cached channel products.
#[derive(Debug, Clone)]
pub struct ChannelCache<R: Real> {
    pub jump: OperatorMatrix<R>,
    pub jump_adj: OperatorMatrix<R>,
    pub out_rate_op: OperatorMatrix<R>,
    pub in_rate_op: OperatorMatrix<R>,
    pub rate: f64,
    pub occupation: f64,
}

impl<R: Real> GeneratorContext<R> {
    pub fn new(spec: &ModelSpec, bath: &BathSpec, geom: HilbertGeometry) -> Result<Self> {
        let parts = hamiltonian_parts::<R>(spec, geom)?;
        let jumps = jump_operators::<R>(spec, bath, geom)?;
        let d = geom.total_dim();
        let mut g = parts.static_part.data().mapv(|z| z * Cx::new(R::zero(), R::one()));
        let mut channels = Vec::with_capacity(jumps.len());
        let mut terms = Vec::new();
        for ch in jumps {
            let l = ch.op.data().clone();
            let ld = conj_transpose(&l);
            let ldl = ld.dot(&l);
            let lld = l.dot(&ld);
            let n_th = bath.occupation(ch.bath_freq);
            for (y, y_adj, prod, c) in [
                (&l, &ld, &ldl, ch.rate * (n_th + 1.0)),
                (&ld, &l, &lld, ch.rate * n_th),
            ] {
                if c == 0.0 {
                    continue;
                }
                let half = R::lit(0.5 * c);
                g.zip_mut_with(prod, |x, p| *x -= *p * half);
                terms.push(DissipatorTerm {
                    jump: CsrMatrix::from_dense(y.view()),
                    jump_adj: CsrMatrix::from_dense(y_adj.view()),
                    coeff: R::lit(c),
                });
            }
            channels.push(ChannelCache {
                jump: OperatorMatrix::from_parts(l, geom, false),
                jump_adj: OperatorMatrix::from_parts(ld, geom, false),
                out_rate_op: OperatorMatrix::from_parts(ldl, geom, true),
                in_rate_op: OperatorMatrix::from_parts(lld, geom, true),
                rate: ch.rate,
                occupation: n_th,
            });
        }
        debug_assert_eq!(g.nrows(), d);
        let g_static = CsrMatrix::from_dense(g.view());
        let g_static_adj = g_static.adjoint();
        let drive_sparse = parts.drive.as_ref().map(|v| CsrMatrix::from_dense(v.data().view()));
        let drive_amplitude = if spec.is_time_dependent() {
            spec.lambda0.unwrap_or(0.0).abs() + spec.delta_lambda.unwrap_or(0.0).abs()
        } else {
            0.0
        };
        let spectral_bound = 2.0 * (g_static.row_sum_bound() + drive_amplitude * drive_sparse.as_ref().map_or(0.0, |v| v.row_sum_bound()))
            + terms
                .iter()
                .map(|t| t.coeff.to_f64().unwrap_or(0.0) * t.jump.row_sum_bound() * t.jump_adj.row_sum_bound())
                .sum::<f64>();
        Ok(Self {
            spec: spec.clone(),
            bath: *bath,
            geom,
            h_static: parts.static_part,
            drive: parts.drive,
            channels,
            g_static,
            g_static_adj,
            drive_sparse,
            terms,
            spectral_bound,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    pub fn geometry(&self) -> HilbertGeometry {
        self.geom
    }

    pub fn dim(&self) -> usize {
        self.geom.total_dim()
    }

    pub fn channels(&self) -> &[ChannelCache<R>] {
        &self.channels
    }

    /// Gershgorin-type bound on the spectral radius of the generator.
    pub fn spectral_bound(&self) -> f64 {
        self.spectral_bound
    }

    pub fn is_time_dependent(&self) -> bool {
        self.drive.is_some()
    }

    /// `H(t)`.
    pub fn hamiltonian_at(&self, time: f64) -> OperatorMatrix<R> {
        match &self.drive {
            None => self.h_static.clone(),
            Some(v) => {
                let c = R::lit(self.spec.coupling_at(time));
                let mut h = self.h_static.data().clone();
                h.zip_mut_with(v.data(), |x, y| *x += *y * c);
                OperatorMatrix::from_parts(h, self.geom, true)
            }
        }
    }

    fn drive_coeff(&self, time: f64) -> R {
        R::lit(self.spec.coupling_at(time))
    }

    /// `out = 𝓛†(a)` at `time`; `scratch` is overwritten.
    fn adjoint_into(&self, a: &Array2<Cx<R>>, time: f64, out: &mut Array2<Cx<R>>, scratch: &mut Array2<Cx<R>>) {
        let one = Cx::new(R::one(), R::zero());
        out.fill(Cx::new(R::zero(), R::zero()));
        self.g_static.left_mul_acc(one, a, out);
        self.g_static_adj.right_mul_acc(one, a, out);
        if let Some(v) = &self.drive_sparse {
            let f = self.drive_coeff(time);
            v.left_mul_acc(Cx::new(R::zero(), f), a, out);
            v.right_mul_acc(Cx::new(R::zero(), -f), a, out);
        }
        for term in &self.terms {
            scratch.fill(Cx::new(R::zero(), R::zero()));
            term.jump_adj.left_mul_acc(one, a, scratch);
            term.jump.right_mul_acc(Cx::new(term.coeff, R::zero()), scratch, out);
        }
    }

    /// `out = 𝓛(ρ)` at `time`; `scratch` is overwritten.
    fn forward_into(&self, rho: &Array2<Cx<R>>, time: f64, out: &mut Array2<Cx<R>>, scratch: &mut Array2<Cx<R>>) {
        let one = Cx::new(R::one(), R::zero());
        out.fill(Cx::new(R::zero(), R::zero()));
        self.g_static_adj.left_mul_acc(one, rho, out);
        self.g_static.right_mul_acc(one, rho, out);
        if let Some(v) = &self.drive_sparse {
            let f = self.drive_coeff(time);
            v.left_mul_acc(Cx::new(R::zero(), -f), rho, out);
            v.right_mul_acc(Cx::new(R::zero(), f), rho, out);
        }
        for term in &self.terms {
            scratch.fill(Cx::new(R::zero(), R::zero()));
            term.jump.left_mul_acc(one, rho, scratch);
            term.jump_adj.right_mul_acc(Cx::new(term.coeff, R::zero()), scratch, out);
        }
    }

    fn check_dim(&self, a: &OperatorMatrix<R>) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: a.dim(),
            });
        }
        Ok(())
    }

    /// `𝓛†(A)` at `time`.
    pub fn apply_adjoint_generator(&self, a: &OperatorMatrix<R>, time: f64) -> Result<OperatorMatrix<R>> {
        self.check_dim(a)?;
        let mut out = Array2::zeros((self.dim(), self.dim()));
        let mut scratch = out.clone();
        self.adjoint_into(&a.data().as_standard_layout().to_owned(), time, &mut out, &mut scratch);
        Ok(OperatorMatrix::from_parts(out, self.geom, a.hermitian_hint()))
    }

    /// `𝓛(ρ)` at `time`.
    pub fn apply_generator(&self, rho: &OperatorMatrix<R>, time: f64) -> Result<OperatorMatrix<R>> {
        self.check_dim(rho)?;
        let mut out = Array2::zeros((self.dim(), self.dim()));
        let mut scratch = out.clone();
        self.forward_into(&rho.data().as_standard_layout().to_owned(), time, &mut out, &mut scratch);
        Ok(OperatorMatrix::from_parts(out, self.geom, rho.hermitian_hint()))
    }

    /// Dense `d² × d²` matrix of `𝓛†` acting on row-major `vec(A)`.
    pub fn adjoint_superoperator(&self, time: f64) -> Result<Array2<Cx<R>>> {
        let d = self.dim();
        if d > MAX_SUPEROPERATOR_DIM {
            return Err(Error::Spec(format!(
                "superoperator path limited to dim <= {MAX_SUPEROPERATOR_DIM}, got {d}"
            )));
        }
        let id = crate::operator::identity::<R>(d);
        let h = self.hamiltonian_at(time).into_data();
        let i = Cx::new(R::zero(), R::one());
        // i[H, A] → i (H⊗I − I⊗Hᵀ)
        let mut s = (kron(&h, &id) - kron(&id, &h.t().to_owned())).mapv(|z| z * i);
        for ch in &self.channels {
            for (y, y_adj, prod, c) in [
                (ch.jump.data(), ch.jump_adj.data(), ch.out_rate_op.data(), ch.rate * (ch.occupation + 1.0)),
                (ch.jump_adj.data(), ch.jump.data(), ch.in_rate_op.data(), ch.rate * ch.occupation),
            ] {
                if c == 0.0 {
                    continue;
                }
                let c = R::lit(c);
                let half = R::lit(0.5) * c;
                s += &kron(y_adj, &y.t().to_owned()).mapv(|z| z * c);
                s -= &kron(prod, &id).mapv(|z| z * half);
                s -= &kron(&id, &prod.t().to_owned()).mapv(|z| z * half);
            }
        }
        Ok(s)
    }
}

/// Adaptive integrator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    /// First trial step; chosen from the RHS norm when absent.
    #[serde(default)]
    pub h_init: Option<f64>,
    #[serde(default = "default_h_min")]
    pub h_min: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_rtol() -> f64 {
    1e-8
}
fn default_atol() -> f64 {
    1e-10
}
fn default_h_min() -> f64 {
    1e-12
}
fn default_max_steps() -> usize {
    2_000_000
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: default_rtol(),
            atol: default_atol(),
            h_init: None,
            h_min: default_h_min(),
            max_steps: default_max_steps(),
        }
    }
}

impl IntegratorOptions {
    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self
    }

    pub fn with_atol(mut self, atol: f64) -> Self {
        self.atol = atol;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol >= 0.0 && self.h_min > 0.0 && self.max_steps > 0) {
            return Err(Error::Spec(format!("invalid integrator options {self:?}")));
        }
        Ok(())
    }
}

/// Counters reported by a propagation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegratorDiagnostics {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
    /// Largest scaled local error estimate of any accepted step (≤ 1).
    pub max_error_estimate: f64,
    pub max_hermiticity_drift: f64,
    pub symmetrizations: usize,
    pub final_step: f64,
}

/// Which generator drives the propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Picture {
    /// `dA/dt = 𝓛†(A)`.
    Heisenberg,
    /// `dρ/dt = 𝓛(ρ)`.
    Schrodinger,
}

/// Sampled trajectory.
#[derive(Debug, Clone)]
pub struct PropagationResult<R: Real> {
    pub times: Vec<f64>,
    pub operators: Vec<OperatorMatrix<R>>,
    pub diagnostics: IntegratorDiagnostics,
}

/// Conservative extent of the Dormand–Prince stability region.
const STABILITY_RADIUS: f64 = 2.5;

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn check_grid(start: f64, times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Grid("time grid is empty".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Grid("time grid contains non-finite values".into()));
    }
    if times[0] < start {
        return Err(Error::Grid(format!("grid starts at {} before {start}", times[0])));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Grid("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Integrates a list of operators jointly from `start`, calling `visitor`
/// at every grid time with the sample index and current operators.
///
/// Steps are shortened to land exactly on grid times, so no interpolation
/// enters the sampled values.
pub fn propagate_with<R, F>(
    ctx: &GeneratorContext<R>,
    picture: Picture,
    initial: &[OperatorMatrix<R>],
    start: f64,
    times: &[f64],
    opts: &IntegratorOptions,
    mut visitor: F,
) -> Result<IntegratorDiagnostics>
where
    R: Real,
    F: FnMut(usize, f64, &[OperatorMatrix<R>]) -> Result<()>,
{
    opts.validate()?;
    check_grid(start, times)?;
    if initial.is_empty() {
        return Err(Error::Spec("nothing to propagate".into()));
    }
    for op in initial {
        ctx.check_dim(op)?;
    }
    let d = ctx.dim();
    let n = initial.len();
    let hermitian: Vec<bool> = initial.iter().map(|o| o.hermitian_hint()).collect();
    let geom = ctx.geometry();

    let rhs = |t: f64, y: &[Array2<Cx<R>>], out: &mut [Array2<Cx<R>>], scratch: &mut Array2<Cx<R>>| {
        for (yi, oi) in y.iter().zip(out.iter_mut()) {
            match picture {
                Picture::Heisenberg => ctx.adjoint_into(yi, t, oi, scratch),
                Picture::Schrodinger => ctx.forward_into(yi, t, oi, scratch),
            }
        }
    };

    let zero = || vec![Array2::<Cx<R>>::zeros((d, d)); n];
    let mut y: Vec<Array2<Cx<R>>> = initial.iter().map(|o| o.data().as_standard_layout().to_owned()).collect();
    let mut k: Vec<Vec<Array2<Cx<R>>>> = (0..7).map(|_| zero()).collect();
    let mut y_stage = zero();
    let mut y_new = zero();
    let mut scratch = Array2::<Cx<R>>::zeros((d, d));
    let mut diag = IntegratorDiagnostics::default();

    // keeps `h·|eigenvalue|` inside the explicit stability region even when
    // the error estimate vanishes (e.g. for fixed points)
    let h_max = STABILITY_RADIUS / ctx.spectral_bound().max(f64::MIN_POSITIVE);
    let mut t = start;
    rhs(t, &y, &mut k[0], &mut scratch);
    diag.rhs_evaluations += 1;

    let mut h = match opts.h_init {
        Some(h) => h.min(h_max),
        None => {
            let ny: f64 = y.iter().map(|m| norm_f64(m)).fold(0.0, f64::max);
            let nf: f64 = k[0].iter().map(|m| norm_f64(m)).fold(0.0, f64::max);
            if nf > 0.0 {
                (0.01 * ny.max(1e-5) / nf).clamp(opts.h_min, 0.1).min(h_max)
            } else {
                0.1f64.min(h_max)
            }
        }
    };

    let emit = |idx: usize,
                t: f64,
                y: &mut [Array2<Cx<R>>],
                diag: &mut IntegratorDiagnostics,
                visitor: &mut F|
     -> Result<()> {
        for (m, &herm) in y.iter_mut().zip(&hermitian) {
            if herm {
                let drift = hermiticity_deviation(m);
                diag.max_hermiticity_drift = diag.max_hermiticity_drift.max(drift);
                if drift > HERMITICITY_DRIFT_TOL {
                    log::warn!("hermiticity drift {drift:.3e} at t = {t}; symmetrizing");
                    symmetrize(m);
                    diag.symmetrizations += 1;
                }
            }
        }
        let ops: Vec<OperatorMatrix<R>> = y
            .iter()
            .zip(&hermitian)
            .map(|(m, &herm)| OperatorMatrix::from_parts(m.clone(), geom, herm))
            .collect();
        visitor(idx, t, &ops)
    };

    let mut next = 0;
    while next < times.len() && times[next] <= start {
        emit(next, start, &mut y, &mut diag, &mut visitor)?;
        next += 1;
    }

    while next < times.len() {
        let target = times[next];
        if diag.accepted_steps + diag.rejected_steps >= opts.max_steps {
            return Err(Error::TooManySteps {
                max_steps: opts.max_steps,
                time: t,
            });
        }
        let remaining = target - t;
        let landing = h >= remaining * (1.0 - 1e-12);
        let step = if landing { remaining } else { h };

        for s in 1..7 {
            for i in 0..n {
                let ys = &mut y_stage[i];
                ys.assign(&y[i]);
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        let w = R::lit(step * a);
                        ys.zip_mut_with(&kj[i], |x, v| *x += *v * w);
                    }
                }
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            rhs(t + C[s] * step, &y_stage, &mut tail[0], &mut scratch);
            diag.rhs_evaluations += 1;
            if s == 6 {
                for i in 0..n {
                    y_new[i].assign(&y_stage[i]);
                }
            }
        }

        let mut err: f64 = 0.0;
        let weights: Vec<(usize, R)> = E
            .iter()
            .enumerate()
            .filter(|(_, e)| **e != 0.0)
            .map(|(s, e)| (s, R::lit(*e * step)))
            .collect();
        for i in 0..n {
            let yi = y[i].as_slice().expect("standard layout");
            let yn = y_new[i].as_slice().expect("standard layout");
            let stages: Vec<&[Cx<R>]> = weights.iter().map(|(s, _)| k[*s][i].as_slice().expect("standard layout")).collect();
            for idx in 0..d * d {
                let mut e = Cx::new(R::zero(), R::zero());
                for (st, (_, w)) in stages.iter().zip(&weights) {
                    e += st[idx] * *w;
                }
                let e = e.norm().to_f64().unwrap_or(f64::INFINITY);
                let mag = yi[idx].norm().max(yn[idx].norm()).to_f64().unwrap_or(0.0);
                err = err.max(e / (opts.atol + opts.rtol * mag));
            }
        }
        if !err.is_finite() {
            return Err(Error::StepUnderflow { time: t, step });
        }

        if err <= 1.0 {
            t = if landing { target } else { t + step };
            std::mem::swap(&mut y, &mut y_new);
            // FSAL: the last stage is the derivative at the new point
            let last = std::mem::take(&mut k[6]);
            k[0] = last;
            k[6] = zero();
            diag.accepted_steps += 1;
            diag.max_error_estimate = diag.max_error_estimate.max(err);
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !landing || step >= h {
                h = step * factor;
            } else {
                h = h.max(step * factor);
            }
            h = h.min(h_max);
            diag.final_step = step;
            if landing {
                emit(next, t, &mut y, &mut diag, &mut visitor)?;
                next += 1;
            }
        } else {
            diag.rejected_steps += 1;
            h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if h < opts.h_min {
                return Err(Error::StepUnderflow { time: t, step: h });
            }
        }
    }
    Ok(diag)
}

fn norm_f64<R: Real>(m: &Array2<Cx<R>>) -> f64 {
    m.iter()
        .map(|z| z.norm_sqr().to_f64().unwrap_or(0.0))
        .sum::<f64>()
        .sqrt()
}

fn collect<R: Real>(
    ctx: &GeneratorContext<R>,
    picture: Picture,
    initial: &OperatorMatrix<R>,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<PropagationResult<R>> {
    let mut operators = Vec::with_capacity(times.len());
    let diagnostics = propagate_with(ctx, picture, std::slice::from_ref(initial), 0.0, times, opts, |_, _, ops| {
        operators.push(ops[0].clone());
        Ok(())
    })?;
    Ok(PropagationResult {
        times: times.to_vec(),
        operators,
        diagnostics,
    })
}

/// Heisenberg-picture snapshots `A_t` from `t = 0`.
pub fn propagate<R: Real>(
    ctx: &GeneratorContext<R>,
    initial: &OperatorMatrix<R>,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<PropagationResult<R>> {
    collect(ctx, Picture::Heisenberg, initial, times, opts)
}

/// Schrödinger-picture snapshots `ρ_t` from `t = 0`.
pub fn propagate_state<R: Real>(
    ctx: &GeneratorContext<R>,
    rho: &OperatorMatrix<R>,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<PropagationResult<R>> {
    collect(ctx, Picture::Schrodinger, rho, times, opts)
}

/// `e^{tM}` by scaling and squaring of a truncated Taylor series.
pub fn expm<R: Real>(m: &Array2<Cx<R>>, t: f64) -> Array2<Cx<R>> {
    let n = m.nrows();
    let norm1 = (0..n)
        .map(|c| m.column(c).iter().map(|z| z.norm().to_f64().unwrap_or(0.0)).sum::<f64>())
        .fold(0.0, f64::max)
        * t.abs();
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as i32 } else { 0 };
    let scale = R::lit(t / 2f64.powi(squarings));
    let x = m.mapv(|z| z * scale);
    let mut result = crate::operator::identity::<R>(n);
    let mut term = result.clone();
    for k in 1..=20 {
        term = term.dot(&x).mapv(|z| z / R::lit(k as f64));
        result += &term;
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// Heisenberg evolution by exponentiating the adjoint superoperator
/// (time-independent generators, small dimensions only).
pub fn propagate_superoperator<R: Real>(
    ctx: &GeneratorContext<R>,
    initial: &OperatorMatrix<R>,
    times: &[f64],
) -> Result<Vec<OperatorMatrix<R>>> {
    if ctx.is_time_dependent() {
        return Err(Error::Spec("superoperator path requires a time-independent generator".into()));
    }
    ctx.check_dim(initial)?;
    check_grid(0.0, times)?;
    let d = ctx.dim();
    let s = ctx.adjoint_superoperator(0.0)?;
    let v0 = initial.data().as_standard_layout().to_owned().into_shape((d * d,)).map_err(|e| Error::Spec(e.to_string()))?;
    times
        .iter()
        .map(|&t| {
            let v = expm(&s, t).dot(&v0);
            let m = v.into_shape((d, d)).map_err(|e| Error::Spec(e.to_string()))?;
            Ok(OperatorMatrix::from_parts(m, ctx.geometry(), initial.hermitian_hint()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use crate::hilbert::{boson_ops, HilbertGeometry};
    use crate::operator::max_abs;

    fn small() -> HilbertGeometry {
        HilbertGeometry::collective(2, 4).unwrap()
    }

    #[test]
    fn identity_is_fixed_point_of_generator() {
        let g = small();
        let specs = [
            ModelSpec::generalized(2.0, 2.0, 1.5, 1.8),
            ModelSpec::dicke(2.0, 2.0, 1.2),
            ModelSpec::tavis_cummings(2.0, 2.0, 1.5),
            ModelSpec::floquet(2.0, 2.0, 0.65, 0.75, 3.0),
        ];
        for spec in &specs {
            for rate in [0.0, 1e-2, 0.5] {
                for temp in [0.0, 1.0] {
                    let ctx = GeneratorContext::<f64>::new(spec, &BathSpec::new(rate, rate, temp), g).unwrap();
                    let out = ctx.apply_adjoint_generator(&OperatorMatrix::identity(g), 0.7).unwrap();
                    assert!(out.norm() <= 1e-12, "{spec:?} {rate} {temp}");
                }
            }
        }
    }

    #[test]
    fn damped_cavity_generator_on_annihilator() {
        let g = HilbertGeometry::collective(1, 6).unwrap();
        let spec = ModelSpec::dicke(1.0, 1.5, 0.0);
        let ctx = GeneratorContext::<f64>::new(&spec, &BathSpec::new(0.0, 0.3, 0.0), g).unwrap();
        let (a, _) = boson_ops::<f64>(g);
        let out = ctx.apply_adjoint_generator(&a, 0.0).unwrap();
        let expected = a.scale(cx(-0.15, -1.5));
        assert!(max_abs((&out - &expected).data()) < 1e-13);
    }

    #[test]
    fn closed_system_reduces_to_commutator() {
        let g = small();
        let spec = ModelSpec::generalized(2.0, 2.0, 1.5, 1.8);
        let ctx = GeneratorContext::<f64>::new(&spec, &BathSpec::closed(1.0), g).unwrap();
        let (q, _) = crate::hilbert::quadrature_ops::<f64>(g);
        let h = ctx.hamiltonian_at(0.0);
        let expected = h.commutator(&q).unwrap().scale(cx(0.0, 1.0));
        let out = ctx.apply_adjoint_generator(&q, 0.0).unwrap();
        assert!(max_abs((&out - &expected).data()) < 1e-12);
    }

    #[test]
    fn cached_products_match_fresh() {
        let g = small();
        let ctx = GeneratorContext::<f64>::new(&ModelSpec::dicke(2.0, 2.0, 1.0), &BathSpec::new(0.1, 0.2, 1.0), g).unwrap();
        for ch in ctx.channels() {
            let fresh = ch.jump.dagger().matmul(&ch.jump).unwrap();
            assert!(max_abs((&fresh - &ch.out_rate_op).data()) < 1e-14);
            let fresh = ch.jump.matmul(&ch.jump.dagger()).unwrap();
            assert!(max_abs((&fresh - &ch.in_rate_op).data()) < 1e-14);
        }
    }

    #[test]
    fn superoperator_matches_product_form() {
        let g = small();
        let ctx = GeneratorContext::<f64>::new(&ModelSpec::generalized(2.0, 2.0, 1.5, 1.8), &BathSpec::new(0.1, 0.3, 1.0), g)
            .unwrap();
        let d = g.total_dim();
        let a = Array2::from_shape_fn((d, d), |(i, j)| cx((i * 3 + j) as f64 * 0.1, (i as f64 - j as f64) * 0.05));
        let op = OperatorMatrix::new(a.clone(), g).unwrap();
        let direct = ctx.apply_adjoint_generator(&op, 0.0).unwrap();
        let s = ctx.adjoint_superoperator(0.0).unwrap();
        let v = s.dot(&a.into_shape((d * d,)).unwrap()).into_shape((d, d)).unwrap();
        assert!(max_abs(&(v - direct.data())) < 1e-12);
    }

    #[test]
    fn identity_stays_identity() {
        let g = small();
        let ctx = GeneratorContext::<f64>::new(&ModelSpec::dicke(2.0, 2.0, 1.2), &BathSpec::new(0.1, 0.1, 1.0), g).unwrap();
        let id = OperatorMatrix::identity(g);
        let r = propagate(&ctx, &id, &[0.0, 1.0, 2.0], &IntegratorOptions::default()).unwrap();
        assert_eq!(r.operators.len(), 3);
        for op in &r.operators {
            let dev = max_abs((op - &id).data());
            assert!(dev < 1e-12, "{dev}");
        }
    }

    #[test]
    fn damped_cavity_closed_form() {
        let g = HilbertGeometry::collective(1, 8).unwrap();
        let (omega, kappa) = (1.5, 0.4);
        let ctx = GeneratorContext::<f64>::new(&ModelSpec::dicke(1.0, omega, 0.0), &BathSpec::new(0.0, kappa, 0.0), g).unwrap();
        let (a, _) = boson_ops::<f64>(g);
        let r = propagate(&ctx, &a, &[1.0, 5.0], &IntegratorOptions::default()).unwrap();
        for (t, op) in r.times.iter().zip(&r.operators) {
            let f = (cx(-kappa / 2.0, -omega) * *t).exp();
            let expected = a.scale(f);
            let rel = max_abs((op - &expected).data()) / expected.max_abs();
            assert!(rel <= 1e-6, "t = {t}: {rel}");
        }
    }

    #[test]
    fn grid_validation() {
        let g = small();
        let ctx = GeneratorContext::<f64>::new(&ModelSpec::dicke(2.0, 2.0, 1.0), &BathSpec::closed(0.0), g).unwrap();
        let id = OperatorMatrix::identity(g);
        let o = IntegratorOptions::default();
        assert!(propagate(&ctx, &id, &[], &o).is_err());
        assert!(propagate(&ctx, &id, &[1.0, 0.5], &o).is_err());
        assert!(propagate(&ctx, &id, &[-1.0], &o).is_err());
    }

    #[test]
    fn step_budget_is_enforced() {
        let g = small();
        let ctx = GeneratorContext::<f64>::new(&ModelSpec::dicke(2.0, 2.0, 1.0), &BathSpec::closed(0.0), g).unwrap();
        let (q, _) = crate::hilbert::quadrature_ops::<f64>(g);
        let mut o = IntegratorOptions::default();
        o.max_steps = 3;
        assert!(matches!(propagate(&ctx, &q, &[50.0], &o), Err(Error::TooManySteps { .. })));
    }

    #[test]
    fn superoperator_path_matches_integrator() {
        let g = small();
        let ctx = GeneratorContext::<f64>::new(&ModelSpec::dicke(2.0, 2.0, 1.2), &BathSpec::new(0.05, 0.1, 1.0), g).unwrap();
        let (q, _) = crate::hilbert::quadrature_ops::<f64>(g);
        let times = [0.5, 2.0];
        let a = propagate(&ctx, &q, &times, &IntegratorOptions::default().with_rtol(1e-10)).unwrap();
        let b = propagate_superoperator(&ctx, &q, &times).unwrap();
        for (x, y) in a.operators.iter().zip(&b) {
            assert!(max_abs((x - y).data()) < 1e-7);
        }
    }
}
