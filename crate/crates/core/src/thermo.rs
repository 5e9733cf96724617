//! Equilibrium and spectral quantities: thermal states, ground-state scans,
//! critical couplings and Fock-truncation convergence.

use ndarray::{Array1, Array2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::HilbertGeometry;
use crate::models::{hamiltonian, ModelSpec};
use crate::operator::{conj_transpose, OperatorMatrix, HERMITIAN_TOL};
use crate::scalar::{Cx, Real};

/// Relative gap below which ground levels count as degenerate at `T = 0`.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Density matrix together with its square root and eigendecomposition.
#[derive(Debug, Clone)]
pub struct State<R: Real> {
    rho: OperatorMatrix<R>,
    sqrt_rho: OperatorMatrix<R>,
    weights: Array1<R>,
    vectors: Array2<Cx<R>>,
}

impl<R: Real> State<R> {
    /// `ρ = e^{−H/T}/Z` (ground-state projector at `T = 0`).
    pub fn thermal(h: &OperatorMatrix<R>, temperature: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::Spec(format!("temperature must be finite and >= 0, got {temperature}")));
        }
        let dev = h.hermiticity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let (energies, vectors) = R::eigh(h.data())?;
        let e0 = energies[0];
        let weights = if temperature > 0.0 {
            let t = R::lit(temperature);
            let w = energies.mapv(|e| (-(e - e0) / t).exp());
            let z: R = w.sum();
            w.mapv(|x| x / z)
        } else {
            let scale = e0.abs().max(R::one());
            let tol = R::lit(DEGENERACY_TOL) * scale;
            let degenerate = energies.iter().take_while(|&&e| e - e0 < tol).count();
            let share = R::one() / R::from_usize_lossy(degenerate);
            Array1::from_shape_fn(energies.len(), |k| if k < degenerate { share } else { R::zero() })
        };
        Ok(Self::from_spectral(weights, vectors, h.geometry()))
    }

    /// Wraps an arbitrary density matrix; tiny negative eigenvalues are clipped.
    pub fn from_density(rho: &OperatorMatrix<R>) -> Result<Self> {
        let dev = rho.hermiticity_deviation();
        if dev > 1e-10 {
            return Err(Error::NotHermitian(dev));
        }
        let (w, vectors) = R::eigh(rho.data())?;
        let w = w.mapv(|x| x.max(R::zero()));
        let z: R = w.sum();
        let w = w.mapv(|x| x / z);
        Ok(Self::from_spectral(w, vectors, rho.geometry()))
    }

    /// `ρ = I/d`.
    pub fn maximally_mixed(geom: HilbertGeometry) -> Self {
        let d = geom.total_dim();
        let w = Array1::from_elem(d, R::one() / R::from_usize_lossy(d));
        Self::from_spectral(w, Array2::eye(d), geom)
    }

    fn from_spectral(weights: Array1<R>, vectors: Array2<Cx<R>>, geom: HilbertGeometry) -> Self {
        let build = |f: &dyn Fn(R) -> R| {
            let mut scaled = vectors.clone();
            for (mut col, &w) in scaled.columns_mut().into_iter().zip(weights.iter()) {
                let s = f(w);
                col.mapv_inplace(|z| z * s);
            }
            let mut m = scaled.dot(&conj_transpose(&vectors));
            crate::operator::symmetrize(&mut m);
            m
        };
        let rho = build(&|w| w);
        let sqrt_rho = build(&|w: R| w.sqrt());
        Self {
            rho: OperatorMatrix::from_parts(rho, geom, true),
            sqrt_rho: OperatorMatrix::from_parts(sqrt_rho, geom, true),
            weights,
            vectors,
        }
    }

    pub fn rho(&self) -> &OperatorMatrix<R> {
        &self.rho
    }

    pub fn sqrt_rho(&self) -> &OperatorMatrix<R> {
        &self.sqrt_rho
    }

    /// Eigenvalues of ρ in the order of [`Self::eigenvectors`].
    pub fn weights(&self) -> &Array1<R> {
        &self.weights
    }

    pub fn eigenvectors(&self) -> &Array2<Cx<R>> {
        &self.vectors
    }

    pub fn geometry(&self) -> HilbertGeometry {
        self.rho.geometry()
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    /// `Tr(ρ X)`.
    pub fn expect(&self, x: &OperatorMatrix<R>) -> Cx<R> {
        crate::operator::trace_of_product(self.rho.data(), x.data())
    }

    pub fn trace(&self) -> Cx<R> {
        self.rho.trace()
    }
}

/// Scaled ground energy and its finite-difference derivatives along a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundScanResult {
    pub coupling: Vec<f64>,
    /// `E₀/(ω_a j)`.
    pub scaled_energy: Vec<f64>,
    pub first_derivative: Vec<f64>,
    pub second_derivative: Vec<f64>,
}

impl GroundScanResult {
    pub fn from_values(coupling: Vec<f64>, scaled_energy: Vec<f64>) -> Result<Self> {
        check_grid(&coupling, 5)?;
        if scaled_energy.len() != coupling.len() {
            return Err(Error::Dimension {
                expected: coupling.len(),
                got: scaled_energy.len(),
            });
        }
        let first_derivative = derivative(&coupling, &scaled_energy);
        let second_derivative = second_derivative(&coupling, &scaled_energy);
        Ok(Self {
            coupling,
            scaled_energy,
            first_derivative,
            second_derivative,
        })
    }

    /// Coupling at the midpoint of the largest jump between consecutive
    /// second-derivative samples.
    pub fn second_derivative_discontinuity(&self) -> f64 {
        let d2 = &self.second_derivative;
        let (k, _) = d2
            .windows(2)
            .enumerate()
            .map(|(k, w)| (k, (w[1] - w[0]).abs()))
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        0.5 * (self.coupling[k] + self.coupling[k + 1])
    }

    /// First coupling whose scaled energy leaves `−1` by more than `tol`.
    pub fn departure_from_normal(&self, tol: f64) -> Option<f64> {
        self.coupling
            .iter()
            .zip(&self.scaled_energy)
            .find(|(_, e)| (**e + 1.0).abs() > tol)
            .map(|(c, _)| *c)
    }

    /// Normal-phase labels: `|E₀/(ω_a j) + 1| ≤ tol`.
    pub fn normal_phase_mask(&self, tol: f64) -> Vec<bool> {
        self.scaled_energy.iter().map(|e| (e + 1.0).abs() <= tol).collect()
    }

    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        (0..self.coupling.len())
            .map(|k| {
                vec![
                    self.coupling[k],
                    self.scaled_energy[k],
                    self.first_derivative[k],
                    self.second_derivative[k],
                ]
            })
            .collect()
    }
}

pub const SCAN_CSV_HEADER: [&str; 4] = ["coupling", "scaled_E0", "dE", "dE2"];

fn check_grid(grid: &[f64], min_len: usize) -> Result<()> {
    if grid.len() < min_len {
        return Err(Error::Grid(format!("need at least {min_len} points, got {}", grid.len())));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Grid("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Second-order finite-difference derivative on a (possibly non-uniform) grid.
fn derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            // three-point stencil centred where possible, shifted at the ends
            let c = k.clamp(1, n - 2);
            let (x0, x1, x2) = (x[c - 1], x[c], x[c + 1]);
            let (y0, y1, y2) = (y[c - 1], y[c], y[c + 1]);
            let t = x[k];
            y0 * (2.0 * t - x1 - x2) / ((x0 - x1) * (x0 - x2))
                + y1 * (2.0 * t - x0 - x2) / ((x1 - x0) * (x1 - x2))
                + y2 * (2.0 * t - x0 - x1) / ((x2 - x0) * (x2 - x1))
        })
        .collect()
}

/// Three-point second difference; end points copy their neighbours.
fn second_derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d2 = vec![0.0; n];
    for k in 1..n - 1 {
        let (h0, h1) = (x[k] - x[k - 1], x[k + 1] - x[k]);
        d2[k] = 2.0 * (y[k - 1] / (h0 * (h0 + h1)) - y[k] / (h0 * h1) + y[k + 1] / (h1 * (h0 + h1)));
    }
    d2[0] = d2[1];
    d2[n - 1] = d2[n - 2];
    d2
}

/// Lowest eigenvalue of `H(t)`.
pub fn ground_energy<R: Real>(spec: &ModelSpec, geom: HilbertGeometry, time: f64) -> Result<f64> {
    let h = hamiltonian::<R>(spec, geom, time)?;
    let ev = R::eigvalsh(h.data())?;
    Ok(ev[0].to_f64().unwrap_or(f64::NAN))
}

/// Scans the coupling λ (λ₀ for the Floquet model) over `grid`.
pub fn ground_scan<R: Real>(template: &ModelSpec, geom: HilbertGeometry, grid: &[f64]) -> Result<GroundScanResult> {
    check_grid(grid, 5)?;
    let norm = template.omega_a * geom.j();
    let energies: Vec<f64> = grid
        .par_iter()
        .map(|&l| ground_energy::<R>(&template.with_lambda(l), geom, 0.0).map(|e| e / norm))
        .collect::<Result<_>>()?;
    GroundScanResult::from_values(grid.to_vec(), energies)
}

/// Scaled ground energy of the instantaneous `H(t)` along a time grid.
pub fn ground_energy_in_time<R: Real>(spec: &ModelSpec, geom: HilbertGeometry, times: &[f64]) -> Result<Vec<f64>> {
    let norm = spec.omega_a * geom.j();
    times
        .par_iter()
        .map(|&t| ground_energy::<R>(spec, geom, t).map(|e| e / norm))
        .collect()
}

/// Dissipative critical coupling of the generalized model for a fixed
/// `λ′/λ` ratio; `None` when no positive real root exists.
///
/// Uses `1 − √(1−u) = u/(1 + √(1−u))` so the `R → 0` limit is exact.
pub fn critical_coupling_gd(omega_a: f64, omega_c: f64, kappa: f64, gamma: f64, s_z: f64, ratio: f64) -> Option<f64> {
    if !(ratio >= 0.0) || !(s_z < 0.0) {
        return None;
    }
    let r2 = ratio * ratio;
    let big_r = (1.0 - r2) / (1.0 + r2);
    let base = omega_a * omega_c + big_r * kappa * gamma;
    let spread = (omega_c * omega_c + kappa * kappa) * (gamma * gamma + omega_a * omega_a);
    let u = big_r * big_r * spread / (base * base);
    if !(u <= 1.0) {
        return None;
    }
    let lc2 = (big_r - 1.0) * spread / (4.0 * s_z * base * (1.0 + (1.0 - u).sqrt()));
    if lc2.is_finite() && lc2 > 0.0 {
        Some(lc2.sqrt())
    } else {
        None
    }
}

/// `λ_c² = −(ω_c² + κ²)(ω_a² + γ²)/(8 ω_a ω_c s_z)` at `λ′ = λ`.
pub fn critical_coupling_dicke(omega_a: f64, omega_c: f64, kappa: f64, gamma: f64, s_z: f64) -> f64 {
    (-(omega_c * omega_c + kappa * kappa) * (omega_a * omega_a + gamma * gamma) / (8.0 * omega_a * omega_c * s_z)).sqrt()
}

/// Parameters of the dissipative phase diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagramParams {
    pub omega_a: f64,
    pub omega_c: f64,
    pub kappa: f64,
    pub gamma: f64,
    #[serde(default = "default_s_z")]
    pub s_z: f64,
}

pub fn default_s_z() -> f64 {
    -0.5
}

impl PhaseDiagramParams {
    pub fn critical(&self, ratio: f64) -> Option<f64> {
        critical_coupling_gd(self.omega_a, self.omega_c, self.kappa, self.gamma, self.s_z, ratio)
    }

    /// Superradiant when `λ ≥ λ_c(λ′/λ)`.
    pub fn is_superradiant(&self, lambda: f64, lambda_prime: f64) -> bool {
        if lambda <= 0.0 {
            return false;
        }
        self.critical(lambda_prime / lambda).is_some_and(|lc| lambda >= lc)
    }

    /// `(ratio, λ_c)` along the boundary.
    pub fn boundary(&self, ratios: &[f64]) -> Vec<(f64, Option<f64>)> {
        ratios.iter().map(|&r| (r, self.critical(r))).collect()
    }

    /// Grid of superradiant flags indexed `[λ index][λ′ index]`.
    pub fn diagram(&self, lambdas: &[f64], lambda_primes: &[f64]) -> Vec<Vec<bool>> {
        lambdas
            .iter()
            .map(|&l| lambda_primes.iter().map(|&lp| self.is_superradiant(l, lp)).collect())
            .collect()
    }
}

/// `β_c = (2/ω_a) artanh(ω_a ω_c / 4λ²)`, `None` when the argument is ≥ 1.
pub fn thermal_critical_beta(omega_a: f64, omega_c: f64, lambda: f64) -> Option<f64> {
    if !(lambda > 0.0) {
        return None;
    }
    let arg = omega_a * omega_c / (4.0 * lambda * lambda);
    if arg < 1.0 {
        Some(2.0 / omega_a * arg.atanh())
    } else {
        None
    }
}

/// Settings for [`converge_truncation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationSearch {
    pub tol: f64,
    #[serde(default = "default_start")]
    pub start: usize,
    #[serde(default = "default_cap")]
    pub cap: usize,
}

fn default_start() -> usize {
    2
}

fn default_cap() -> usize {
    64
}

impl TruncationSearch {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            start: default_start(),
            cap: default_cap(),
        }
    }
}

/// Chosen boson truncation with the energies that justified it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub fock_dim: usize,
    pub tol: f64,
    /// `(n_f, E₀(n_f))` pairs in the order evaluated.
    pub evidence: Vec<(usize, f64)>,
}

/// Smallest `n_f ≥ start` with `|E₀(n_f+1) − E₀(n_f)| < tol`.
pub fn converge_truncation<R: Real>(
    spec: &ModelSpec,
    template: HilbertGeometry,
    search: TruncationSearch,
) -> Result<TruncationReport> {
    if !(search.tol > 0.0) {
        return Err(Error::Spec("truncation tolerance must be positive".into()));
    }
    let start = search.start.max(2);
    let mut evidence = Vec::new();
    let mut prev = ground_energy::<R>(spec, template.with_fock_dim(start)?, 0.0)?;
    evidence.push((start, prev));
    for n in start..search.cap {
        let next = ground_energy::<R>(spec, template.with_fock_dim(n + 1)?, 0.0)?;
        evidence.push((n + 1, next));
        if (next - prev).abs() < search.tol {
            return Ok(TruncationReport {
                fock_dim: n,
                tol: search.tol,
                evidence,
            });
        }
        prev = next;
    }
    Err(Error::TruncationNotConverged {
        tol: search.tol,
        cap: search.cap,
    })
}
