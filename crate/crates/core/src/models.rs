//! Dicke-family Hamiltonians and their dissipation channels.
//!
//! All four variants share one form,
//!
//! ```text
//! H = ω_c a†a + ω_a J_z + g/√N (J_+ a + J_− a†) + g'/√N (J_− a + J_+ a†)
//! ```
//!
//! with `(g, g')` equal to `(λ, λ′)` for the generalized model, `(λ, λ)` for
//! the N-qubit Dicke model, `(λ, 0)` for Tavis–Cummings and
//! `(λ(t), λ(t))`, `λ(t) = λ₀ + Δλ cos Ωt`, for the Floquet model.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{fock_annihilation, spin_factor_ops, HilbertGeometry};
use crate::operator::{conj_transpose, identity, kron, OperatorMatrix};
use crate::scalar::{Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    GeneralizedDicke,
    NQubitDicke,
    TavisCummings,
    FloquetDicke,
}

impl Variant {
    pub fn label(&self) -> &'static str {
        match self {
            Variant::GeneralizedDicke => "generalized_dicke",
            Variant::NQubitDicke => "n_qubit_dicke",
            Variant::TavisCummings => "tavis_cummings",
            Variant::FloquetDicke => "floquet_dicke",
        }
    }
}

/// Physical parameters of one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub variant: Variant,
    pub omega_a: f64,
    pub omega_c: f64,
    /// Co-rotating coupling λ (unused by the Floquet variant).
    #[serde(default)]
    pub lambda: f64,
    /// Counter-rotating coupling λ′ (generalized model only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_lambda: Option<f64>,
    /// Drive frequency Ω of the Floquet coupling.
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "big_omega")]
    pub drive_omega: Option<f64>,
}

impl ModelSpec {
    fn base(variant: Variant, omega_a: f64, omega_c: f64, lambda: f64) -> Self {
        Self {
            variant,
            omega_a,
            omega_c,
            lambda,
            lambda_prime: None,
            lambda0: None,
            delta_lambda: None,
            drive_omega: None,
        }
    }

    pub fn generalized(omega_a: f64, omega_c: f64, lambda: f64, lambda_prime: f64) -> Self {
        Self {
            lambda_prime: Some(lambda_prime),
            ..Self::base(Variant::GeneralizedDicke, omega_a, omega_c, lambda)
        }
    }

    pub fn dicke(omega_a: f64, omega_c: f64, lambda: f64) -> Self {
        Self::base(Variant::NQubitDicke, omega_a, omega_c, lambda)
    }

    pub fn tavis_cummings(omega_a: f64, omega_c: f64, lambda: f64) -> Self {
        Self::base(Variant::TavisCummings, omega_a, omega_c, lambda)
    }

    pub fn floquet(omega_a: f64, omega_c: f64, lambda0: f64, delta_lambda: f64, drive_omega: f64) -> Self {
        Self {
            lambda0: Some(lambda0),
            delta_lambda: Some(delta_lambda),
            drive_omega: Some(drive_omega),
            ..Self::base(Variant::FloquetDicke, omega_a, omega_c, lambda0)
        }
    }

    /// Same model with a different co-rotating (or Floquet base) coupling.
    pub fn with_lambda(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        match self.variant {
            Variant::FloquetDicke => {
                out.lambda0 = Some(lambda);
                out.lambda = lambda;
            }
            Variant::NQubitDicke => {
                out.lambda = lambda;
                if out.lambda_prime.is_some() {
                    out.lambda_prime = Some(lambda);
                }
            }
            _ => out.lambda = lambda,
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Spec(format!("{name} must be a positive frequency, got {v}")))
            }
        };
        let non_negative = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::Spec(format!("{name} must be a non-negative coupling, got {v}")))
            }
        };
        positive("omega_a", self.omega_a)?;
        positive("omega_c", self.omega_c)?;
        non_negative("lambda", self.lambda)?;
        match self.variant {
            Variant::GeneralizedDicke => {
                let lp = self
                    .lambda_prime
                    .ok_or_else(|| Error::Spec("generalized Dicke model needs lambda_prime".into()))?;
                non_negative("lambda_prime", lp)?;
            }
            Variant::NQubitDicke => {
                if let Some(lp) = self.lambda_prime {
                    if lp != self.lambda {
                        return Err(Error::Spec("N-qubit Dicke model requires lambda_prime = lambda".into()));
                    }
                }
            }
            Variant::TavisCummings => {
                if let Some(lp) = self.lambda_prime {
                    if lp != 0.0 {
                        return Err(Error::Spec("Tavis-Cummings model requires lambda_prime = 0".into()));
                    }
                }
            }
            Variant::FloquetDicke => {
                let l0 = self.lambda0.ok_or_else(|| Error::Spec("Floquet model needs lambda0".into()))?;
                let dl = self
                    .delta_lambda
                    .ok_or_else(|| Error::Spec("Floquet model needs delta_lambda".into()))?;
                let om = self
                    .drive_omega
                    .ok_or_else(|| Error::Spec("Floquet model needs big_omega".into()))?;
                non_negative("lambda0", l0)?;
                non_negative("delta_lambda", dl)?;
                positive("big_omega", om)?;
            }
        }
        Ok(())
    }

    pub fn is_time_dependent(&self) -> bool {
        self.variant == Variant::FloquetDicke
    }

    /// `λ(t) = λ₀ + Δλ cos Ωt` for the Floquet model, λ otherwise.
    pub fn coupling_at(&self, t: f64) -> f64 {
        match self.variant {
            Variant::FloquetDicke => {
                let l0 = self.lambda0.unwrap_or(self.lambda);
                l0 + self.delta_lambda.unwrap_or(0.0) * (self.drive_omega.unwrap_or(0.0) * t).cos()
            }
            _ => self.lambda,
        }
    }

    /// `(co-rotating, counter-rotating)` couplings at time `t`.
    pub fn couplings_at(&self, t: f64) -> (f64, f64) {
        match self.variant {
            Variant::GeneralizedDicke => (self.lambda, self.lambda_prime.unwrap_or(0.0)),
            Variant::NQubitDicke => (self.lambda, self.lambda),
            Variant::TavisCummings => (self.lambda, 0.0),
            Variant::FloquetDicke => {
                let l = self.coupling_at(t);
                (l, l)
            }
        }
    }
}

/// Dissipation and temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    /// Atomic spontaneous-emission rate γ.
    pub gamma: f64,
    /// Cavity leakage rate κ.
    pub kappa: f64,
    pub temperature: f64,
}

impl BathSpec {
    pub fn new(gamma: f64, kappa: f64, temperature: f64) -> Self {
        Self {
            gamma,
            kappa,
            temperature,
        }
    }

    pub fn closed(temperature: f64) -> Self {
        Self::new(0.0, 0.0, temperature)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma", self.gamma), ("kappa", self.kappa), ("temperature", self.temperature)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Spec(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        Ok(())
    }

    /// Bose occupation `1/(e^{ω/T} − 1)`, zero at `T = 0`.
    pub fn occupation(&self, omega: f64) -> f64 {
        if self.temperature <= 0.0 {
            0.0
        } else {
            1.0 / (omega / self.temperature).exp_m1()
        }
    }

    /// Thermal occupation of the atomic bath at `ω_a`.
    pub fn n_th_atom(&self, spec: &ModelSpec) -> f64 {
        self.occupation(spec.omega_a)
    }

    /// Thermal occupation of the cavity bath at `ω_c`.
    pub fn n_th_cavity(&self, spec: &ModelSpec) -> f64 {
        self.occupation(spec.omega_c)
    }
}

/// One Lindblad channel `(L, ν, ω)`.
#[derive(Debug, Clone)]
pub struct JumpChannel<R: Real> {
    pub op: OperatorMatrix<R>,
    pub rate: f64,
    pub bath_freq: f64,
}

/// Building blocks of `H(t) = static + c(t) · drive`.
#[derive(Debug, Clone)]
pub struct HamiltonianParts<R: Real> {
    pub static_part: OperatorMatrix<R>,
    /// `(J_+ + J_−)(a + a†)/√N` for the Floquet variant.
    pub drive: Option<OperatorMatrix<R>>,
}

struct Factors<R: Real> {
    jz: Array2<Cx<R>>,
    jp: Array2<Cx<R>>,
    jm: Array2<Cx<R>>,
    a: Array2<Cx<R>>,
    ad: Array2<Cx<R>>,
    num: Array2<Cx<R>>,
    id_s: Array2<Cx<R>>,
    id_f: Array2<Cx<R>>,
}

impl<R: Real> Factors<R> {
    fn new(geom: HilbertGeometry) -> Result<Self> {
        let (jz, jp) = spin_factor_ops::<R>(geom)?;
        let jm = conj_transpose(&jp);
        let a = fock_annihilation::<R>(geom.fock_dim());
        let ad = conj_transpose(&a);
        let num = ad.dot(&a);
        Ok(Self {
            jz,
            jp,
            jm,
            a,
            ad,
            num,
            id_s: identity(geom.spin_dim()),
            id_f: identity(geom.fock_dim()),
        })
    }

    fn bare(&self, spec: &ModelSpec) -> Array2<Cx<R>> {
        let mut h = kron(&self.id_s, &self.num).mapv(|z| z * R::lit(spec.omega_c));
        h += &kron(&self.jz, &self.id_f).mapv(|z| z * R::lit(spec.omega_a));
        h
    }

    /// `J_+ a + J_− a†`
    fn rotating(&self) -> Array2<Cx<R>> {
        kron(&self.jp, &self.a) + kron(&self.jm, &self.ad)
    }

    /// `J_− a + J_+ a†`
    fn counter_rotating(&self) -> Array2<Cx<R>> {
        kron(&self.jm, &self.a) + kron(&self.jp, &self.ad)
    }
}

fn check_geometry(spec: &ModelSpec, geom: HilbertGeometry) -> Result<()> {
    spec.validate()?;
    if geom.fock_dim() < 2 {
        return Err(Error::Geometry("fock_dim must be at least 2".into()));
    }
    Ok(())
}

/// Static and driven parts of the Hamiltonian.
pub fn hamiltonian_parts<R: Real>(spec: &ModelSpec, geom: HilbertGeometry) -> Result<HamiltonianParts<R>> {
    check_geometry(spec, geom)?;
    let f = Factors::<R>::new(geom)?;
    let scale = 1.0 / (geom.n_atoms() as f64).sqrt();
    let mut h = f.bare(spec);
    let drive = if spec.is_time_dependent() {
        let d = (f.rotating() + f.counter_rotating()).mapv(|z| z * R::lit(scale));
        Some(OperatorMatrix::from_parts(d, geom, true))
    } else {
        let (g, gp) = spec.couplings_at(0.0);
        if g != 0.0 {
            h += &f.rotating().mapv(|z| z * R::lit(g * scale));
        }
        if gp != 0.0 {
            h += &f.counter_rotating().mapv(|z| z * R::lit(gp * scale));
        }
        None
    };
    Ok(HamiltonianParts {
        static_part: OperatorMatrix::from_parts(h, geom, true),
        drive,
    })
}

/// `H(t)`; `time` only matters for the Floquet variant.
pub fn hamiltonian<R: Real>(spec: &ModelSpec, geom: HilbertGeometry, time: f64) -> Result<OperatorMatrix<R>> {
    let parts = hamiltonian_parts::<R>(spec, geom)?;
    Ok(match parts.drive {
        None => parts.static_part,
        Some(drive) => {
            let c = R::lit(spec.coupling_at(time));
            let mut h = parts.static_part.into_data();
            h.zip_mut_with(drive.data(), |x, y| *x += *y * c);
            OperatorMatrix::from_parts(h, geom, true)
        }
    })
}

/// `[(J_−, γ, ω_a), (a, κ, ω_c)]`.
pub fn jump_operators<R: Real>(spec: &ModelSpec, bath: &BathSpec, geom: HilbertGeometry) -> Result<Vec<JumpChannel<R>>> {
    check_geometry(spec, geom)?;
    bath.validate()?;
    let f = Factors::<R>::new(geom)?;
    let jminus = OperatorMatrix::from_parts(kron(&f.jm, &f.id_f), geom, false);
    let a = OperatorMatrix::from_parts(kron(&f.id_s, &f.a), geom, false);
    Ok(vec![
        JumpChannel {
            op: jminus,
            rate: bath.gamma,
            bath_freq: spec.omega_a,
        },
        JumpChannel {
            op: a,
            rate: bath.kappa,
            bath_freq: spec.omega_c,
        },
    ])
}
