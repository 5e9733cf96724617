//! Out-of-time-ordered correlators, their decomposition, skew information
//! and second-order coherence.
//!
//! Every expectation value is `Tr(ρ X)` with ρ fixed at `t = 0`; time
//! dependence lives entirely in the propagated operators. Quantities of the
//! form `⟨X†X⟩` are evaluated as `‖X ρ^{1/2}‖²`, which keeps them
//! non-negative by construction.

use ndarray::Array2;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{anticommutator, commutator, hermiticity_deviation, inner, trace_of_product, OperatorMatrix};
use crate::scalar::{Cx, Real};
use crate::thermo::State;

/// Values below this count as zero in denominators.
pub const UNDEFINED_TOL: f64 = 1e-12;

/// Relative anti-Hermitian part tolerated for observables.
pub const OBSERVABLE_HERMITIAN_TOL: f64 = 1e-8;

/// What a [`CorrelatorSeries`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelatorKind {
    /// `⟨[A_t,B]†[A_t,B]⟩`.
    CHerm,
    CReg,
    CPhys,
    /// `⟨B† A_t† A_t B⟩`.
    D,
    /// `⟨B† (A†A)_t B⟩` with the composite evolved as one operator.
    DComposite,
    I,
    F,
    Alpha,
    WySkew,
    G2,
    /// `⟨a†a⟩_t` from the evolved composite.
    PhotonNumber,
    CAa,
}

impl CorrelatorKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::CHerm => "C_herm",
            Self::CReg => "C_reg",
            Self::CPhys => "C_phys",
            Self::D => "D",
            Self::DComposite => "D_composite",
            Self::I => "I",
            Self::F => "F",
            Self::Alpha => "alpha",
            Self::WySkew => "WY_skew",
            Self::G2 => "g2",
            Self::PhotonNumber => "n_photon",
            Self::CAa => "C_aa",
        }
    }
}

/// Commutator (`−`) or anticommutator (`+`) bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bracket {
    Commutator,
    Anticommutator,
}

impl Bracket {
    fn apply<R: Real>(&self, a: &Array2<Cx<R>>, b: &Array2<Cx<R>>) -> Array2<Cx<R>> {
        match self {
            Self::Commutator => commutator(a, b),
            Self::Anticommutator => anticommutator(a, b),
        }
    }

    pub fn symbol(&self) -> char {
        match self {
            Self::Commutator => '-',
            Self::Anticommutator => '+',
        }
    }
}

/// Time series of one correlator; `None` marks an undefined point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSeries {
    pub kind: CorrelatorKind,
    pub times: Vec<f64>,
    pub values: Vec<Option<Complex<f64>>>,
    #[serde(default)]
    pub meta: serde_json::Value,
}

impl CorrelatorSeries {
    pub fn new(kind: CorrelatorKind, times: Vec<f64>, values: Vec<Option<Complex<f64>>>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Dimension {
                expected: times.len(),
                got: values.len(),
            });
        }
        Ok(Self {
            kind,
            times,
            values,
            meta: serde_json::Value::Null,
        })
    }

    pub fn from_real(kind: CorrelatorKind, times: Vec<f64>, values: &[f64]) -> Result<Self> {
        Self::new(kind, times, values.iter().map(|v| Some(Complex::new(*v, 0.0))).collect())
    }

    pub fn with_meta(mut self, meta: serde_json::Value) -> Self {
        self.meta = meta;
        self
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Real parts, NaN at undefined points.
    pub fn real(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.map_or(f64::NAN, |z| z.re)).collect()
    }

    pub fn defined_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// `(t, Re, Im)` rows; undefined points become NaN.
    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        self.times
            .iter()
            .zip(&self.values)
            .map(|(t, v)| match v {
                Some(z) => vec![*t, z.re, z.im],
                None => vec![*t, f64::NAN, f64::NAN],
            })
            .collect()
    }

    fn check_aligned(&self, other: &Self) -> Result<()> {
        if self.times != other.times {
            return Err(Error::Grid(format!(
                "series {} and {} are sampled on different grids",
                self.kind.label(),
                other.kind.label()
            )));
        }
        Ok(())
    }
}

pub const SERIES_CSV_HEADER: [&str; 3] = ["t", "re", "im"];

fn to_c64<R: Real>(z: Cx<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}

fn to_f64<R: Real>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn frob_sq<R: Real>(x: &Array2<Cx<R>>) -> R {
    x.iter().fold(R::zero(), |acc, z| acc + z.norm_sqr())
}

fn check_dims<R: Real>(state: &State<R>, ops: &[&OperatorMatrix<R>]) -> Result<()> {
    for op in ops {
        if op.dim() != state.dim() {
            return Err(Error::Dimension {
                expected: state.dim(),
                got: op.dim(),
            });
        }
    }
    Ok(())
}

fn require_observable<R: Real>(o: &Array2<Cx<R>>) -> Result<()> {
    let dev = hermiticity_deviation(o);
    if dev > OBSERVABLE_HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// `⟨[A_t,B]†[A_t,B]⟩`, equal to `−⟨[A_t,B]²⟩` for Hermitian operators.
pub fn otoc<R: Real>(state: &State<R>, a_t: &OperatorMatrix<R>, b: &OperatorMatrix<R>) -> Result<f64> {
    check_dims(state, &[a_t, b])?;
    let m = commutator(a_t.data(), b.data());
    Ok(to_f64(frob_sq(&m.dot(state.sqrt_rho().data()))))
}

/// Ingredients of `𝓒 = D + I − 2 Re F` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OtocSample {
    pub c: f64,
    /// `⟨B† A_t† A_t B⟩`.
    pub d: f64,
    pub i: f64,
    pub f: Complex<f64>,
    /// `⟨B† (A†A)_t B⟩` when the composite was propagated.
    pub d_composite: Option<f64>,
}

impl OtocSample {
    /// `C − (D + I − 2 Re F)`.
    pub fn reconstruction_residual(&self) -> f64 {
        self.c - (self.d + self.i - 2.0 * self.f.re)
    }

    /// `(√C − √I)/√D`, `None` when `D` vanishes.
    pub fn alpha(&self) -> Option<f64> {
        alpha_value(self.c, self.d, self.i)
    }

    /// Slack of `(√D−√I)² ≤ C ≤ (√D+√I)²`; non-negative when satisfied.
    pub fn envelope_slack(&self) -> f64 {
        let (sd, si) = (self.d.max(0.0).sqrt(), self.i.max(0.0).sqrt());
        let lower = (sd - si).powi(2);
        let upper = (sd + si).powi(2);
        (self.c - lower).min(upper - self.c)
    }
}

fn alpha_value(c: f64, d: f64, i: f64) -> Option<f64> {
    if !(d >= UNDEFINED_TOL) {
        return None;
    }
    Some((c.max(0.0).sqrt() - i.max(0.0).sqrt()) / d.sqrt())
}

/// Precomputed `B ρ^{1/2}` for repeated evaluation against many `A_t`.
#[derive(Debug, Clone)]
pub struct OtocProbe<'a, R: Real> {
    state: &'a State<R>,
    b: &'a OperatorMatrix<R>,
    b_sqrt_rho: Array2<Cx<R>>,
}

impl<'a, R: Real> OtocProbe<'a, R> {
    pub fn new(state: &'a State<R>, b: &'a OperatorMatrix<R>) -> Result<Self> {
        check_dims(state, &[b])?;
        Ok(Self {
            state,
            b,
            b_sqrt_rho: b.data().dot(state.sqrt_rho().data()),
        })
    }

    /// All decomposition terms at one time; `composite` is `(A†A)_t`.
    pub fn sample(&self, a_t: &OperatorMatrix<R>, composite: Option<&OperatorMatrix<R>>) -> Result<OtocSample> {
        check_dims(self.state, &[a_t])?;
        // X = A_t B ρ^{1/2}, Y = B A_t ρ^{1/2}: C = ‖X−Y‖², D = ‖X‖², I = ‖Y‖², F = ⟨Y, X⟩
        let x = a_t.data().dot(&self.b_sqrt_rho);
        let y = self.b.data().dot(&a_t.data().dot(self.state.sqrt_rho().data()));
        let d = frob_sq(&x);
        let i = frob_sq(&y);
        let f = inner(&y, &x);
        let c = frob_sq(&(&x - &y));
        let d_composite = match composite {
            None => None,
            Some(q) => {
                check_dims(self.state, &[q])?;
                let qb = q.data().dot(&self.b_sqrt_rho);
                Some(to_f64(inner(&self.b_sqrt_rho, &qb).re))
            }
        };
        Ok(OtocSample {
            c: to_f64(c),
            d: to_f64(d),
            i: to_f64(i),
            f: to_c64(f),
            d_composite,
        })
    }
}

/// `𝓒(t)` over propagated snapshots.
pub fn otoc_hermitian<R: Real>(
    state: &State<R>,
    a_t: &[OperatorMatrix<R>],
    b: &OperatorMatrix<R>,
    times: &[f64],
) -> Result<CorrelatorSeries> {
    check_snapshots(a_t.len(), times)?;
    let values = a_t.iter().map(|a| otoc(state, a, b)).collect::<Result<Vec<_>>>()?;
    CorrelatorSeries::from_real(CorrelatorKind::CHerm, times.to_vec(), &values)
}

fn check_snapshots(n: usize, times: &[f64]) -> Result<()> {
    if n != times.len() {
        return Err(Error::Dimension {
            expected: times.len(),
            got: n,
        });
    }
    Ok(())
}

/// `D`, `I`, `F` and the composite `D` over snapshots of `A_t` and `(A†A)_t`.
pub struct Decomposition {
    pub c: CorrelatorSeries,
    pub d: CorrelatorSeries,
    pub i: CorrelatorSeries,
    pub f: CorrelatorSeries,
    pub d_composite: CorrelatorSeries,
}

impl Decomposition {
    pub fn from_samples(times: &[f64], samples: &[OtocSample]) -> Result<Self> {
        check_snapshots(samples.len(), times)?;
        let t = times.to_vec();
        let real = |f: &dyn Fn(&OtocSample) -> f64| samples.iter().map(|s| Some(Complex::new(f(s), 0.0))).collect();
        Ok(Self {
            c: CorrelatorSeries::new(CorrelatorKind::CHerm, t.clone(), real(&|s| s.c))?,
            d: CorrelatorSeries::new(CorrelatorKind::D, t.clone(), real(&|s| s.d))?,
            i: CorrelatorSeries::new(CorrelatorKind::I, t.clone(), real(&|s| s.i))?,
            f: CorrelatorSeries::new(CorrelatorKind::F, t.clone(), samples.iter().map(|s| Some(s.f)).collect())?,
            d_composite: CorrelatorSeries::new(
                CorrelatorKind::DComposite,
                t,
                samples.iter().map(|s| s.d_composite.map(|v| Complex::new(v, 0.0))).collect(),
            )?,
        })
    }

    /// Largest `|C − (D + I − 2 Re F)|`.
    pub fn max_reconstruction_residual(&self) -> f64 {
        let (c, d, i, f) = (self.c.real(), self.d.real(), self.i.real(), self.f.real());
        (0..c.len()).map(|k| (c[k] - (d[k] + i[k] - 2.0 * f[k])).abs()).fold(0.0, f64::max)
    }
}

/// Full decomposition; the composite `(A†A)_t` snapshots are mandatory.
pub fn otoc_decomposition<R: Real>(
    state: &State<R>,
    a_t: &[OperatorMatrix<R>],
    composite_t: &[OperatorMatrix<R>],
    b: &OperatorMatrix<R>,
    times: &[f64],
) -> Result<Decomposition> {
    check_snapshots(a_t.len(), times)?;
    if composite_t.len() != a_t.len() {
        return Err(Error::Missing(format!(
            "composite (A†A)_t snapshots: expected {}, got {}",
            a_t.len(),
            composite_t.len()
        )));
    }
    let probe = OtocProbe::new(state, b)?;
    let samples = a_t
        .iter()
        .zip(composite_t)
        .map(|(a, q)| probe.sample(a, Some(q)))
        .collect::<Result<Vec<_>>>()?;
    Decomposition::from_samples(times, &samples)
}

/// `α_t = √(I/D)(√(C/I) − 1)`, evaluated as `(√C − √I)/√D`.
pub fn alpha_t(c: &CorrelatorSeries, d: &CorrelatorSeries, i: &CorrelatorSeries) -> Result<CorrelatorSeries> {
    c.check_aligned(d)?;
    c.check_aligned(i)?;
    let values = c
        .values
        .iter()
        .zip(&d.values)
        .zip(&i.values)
        .map(|((c, d), i)| match (c, d, i) {
            (Some(c), Some(d), Some(i)) => alpha_value(c.re, d.re, i.re).map(|a| Complex::new(a, 0.0)),
            _ => None,
        })
        .collect();
    CorrelatorSeries::new(CorrelatorKind::Alpha, c.times.clone(), values)
}

/// `Tr(ρ^{1/2} X ρ^{1/2} Y)` with `X = [A_t,B]_x`, `Y = [A_t,B]_y`.
pub fn otoc_regularized<R: Real>(
    state: &State<R>,
    a_t: &OperatorMatrix<R>,
    b: &OperatorMatrix<R>,
    x: Bracket,
    y: Bracket,
) -> Result<Complex<f64>> {
    check_dims(state, &[a_t, b])?;
    let s = state.sqrt_rho().data();
    let xs = s.dot(&x.apply(a_t.data(), b.data()));
    let ys = s.dot(&y.apply(a_t.data(), b.data()));
    Ok(to_c64(trace_of_product(&xs, &ys)))
}

/// `Tr(ρ X Y)` with `X = [A_t,B]_x`, `Y = [A_t,B]_y`.
pub fn otoc_physical<R: Real>(
    state: &State<R>,
    a_t: &OperatorMatrix<R>,
    b: &OperatorMatrix<R>,
    x: Bracket,
    y: Bracket,
) -> Result<Complex<f64>> {
    check_dims(state, &[a_t, b])?;
    let rx = state.rho().data().dot(&x.apply(a_t.data(), b.data()));
    Ok(to_c64(trace_of_product(&rx, &y.apply(a_t.data(), b.data()))))
}

fn skew_raw<R: Real>(state: &State<R>, o: &Array2<Cx<R>>) -> Cx<R> {
    let s = state.sqrt_rho().data();
    let so = s.dot(o);
    let ro = state.rho().data().dot(o);
    trace_of_product(&ro, o) - trace_of_product(&so, &so)
}

/// Wigner–Yanase skew information `Tr(ρO²) − Tr(ρ^{1/2}Oρ^{1/2}O)`.
pub fn wy_skew<R: Real>(state: &State<R>, o: &OperatorMatrix<R>) -> Result<f64> {
    check_dims(state, &[o])?;
    require_observable(o.data())?;
    Ok(to_f64(skew_raw(state, o.data()).re))
}

/// Both sides of the three regularized/physical identities at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationSample {
    pub reg_comm: Complex<f64>,
    pub phys_comm: Complex<f64>,
    /// `I(ρ, i[A_t,B])`.
    pub skew_comm: f64,
    pub reg_anti: Complex<f64>,
    pub phys_anti: Complex<f64>,
    /// `I(ρ, {A_t,B})`.
    pub skew_anti: f64,
    pub reg_mixed: Complex<f64>,
    pub phys_anti_comm: Complex<f64>,
    pub phys_comm_anti: Complex<f64>,
    /// `I(ρ, {A_t,B} + i[A_t,B])`.
    pub skew_plus: f64,
    /// `I(ρ, {A_t,B} − i[A_t,B])`.
    pub skew_minus: f64,
}

impl RelationSample {
    /// `|reg − phys − I(ρ, i[A,B])|` for the commutator flavour.
    pub fn commutator_residual(&self) -> f64 {
        (self.reg_comm - self.phys_comm - self.skew_comm).norm()
    }

    /// `|reg − phys + I(ρ, {A,B})|` for the anticommutator flavour.
    pub fn anticommutator_residual(&self) -> f64 {
        (self.reg_anti - self.phys_anti + self.skew_anti).norm()
    }

    /// Mixed flavour with the two skew terms.
    pub fn mixed_residual(&self) -> f64 {
        let i = Complex::new(0.0, 1.0);
        let rhs = (self.phys_anti_comm + self.phys_comm_anti) * 0.5 + i * 0.25 * self.skew_plus - i * 0.25 * self.skew_minus;
        (self.reg_mixed - rhs).norm()
    }
}

/// Evaluates every term of the three identities for Hermitian `A_t`, `B`.
pub fn relation_sample<R: Real>(state: &State<R>, a_t: &OperatorMatrix<R>, b: &OperatorMatrix<R>) -> Result<RelationSample> {
    check_dims(state, &[a_t, b])?;
    require_observable(a_t.data())?;
    require_observable(b.data())?;
    let m = commutator(a_t.data(), b.data());
    let k = anticommutator(a_t.data(), b.data());
    let i = Cx::new(R::zero(), R::one());
    let im = m.mapv(|z| z * i);
    let s = state.sqrt_rho().data();
    let rho = state.rho().data();
    let (sm, sk) = (s.dot(&m), s.dot(&k));
    let (rm, rk) = (rho.dot(&m), rho.dot(&k));
    let skew = |o: &Array2<Cx<R>>| to_f64(skew_raw(state, o).re);
    Ok(RelationSample {
        reg_comm: to_c64(trace_of_product(&sm, &sm)),
        phys_comm: to_c64(trace_of_product(&rm, &m)),
        skew_comm: skew(&im),
        reg_anti: to_c64(trace_of_product(&sk, &sk)),
        phys_anti: to_c64(trace_of_product(&rk, &k)),
        skew_anti: skew(&k),
        reg_mixed: to_c64(trace_of_product(&sk, &sm)),
        phys_anti_comm: to_c64(trace_of_product(&rk, &m)),
        phys_comm_anti: to_c64(trace_of_product(&rm, &k)),
        skew_plus: skew(&(&k + &im)),
        skew_minus: skew(&(&k - &im)),
    })
}

/// Per-identity maximum residuals over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub times: Vec<f64>,
    pub samples: Vec<RelationSample>,
    pub max_commutator_residual: f64,
    pub max_anticommutator_residual: f64,
    pub max_mixed_residual: f64,
}

impl RelationReport {
    pub fn from_samples(times: Vec<f64>, samples: Vec<RelationSample>) -> Self {
        let max = |f: fn(&RelationSample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
        Self {
            max_commutator_residual: max(RelationSample::commutator_residual),
            max_anticommutator_residual: max(RelationSample::anticommutator_residual),
            max_mixed_residual: max(RelationSample::mixed_residual),
            times,
            samples,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.max_commutator_residual
            .max(self.max_anticommutator_residual)
            .max(self.max_mixed_residual)
    }
}

/// Relations over snapshots `A_t` against `B_{t'}` (one `B` per time).
pub fn relation_suite<R: Real>(
    state: &State<R>,
    a_t: &[OperatorMatrix<R>],
    b_t: &[OperatorMatrix<R>],
    times: &[f64],
) -> Result<RelationReport> {
    check_snapshots(a_t.len(), times)?;
    check_snapshots(b_t.len(), times)?;
    let samples = a_t
        .iter()
        .zip(b_t)
        .map(|(a, b)| relation_sample(state, a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(RelationReport::from_samples(times.to_vec(), samples))
}

/// `g²` ingredients at one time for the pair `(a_t, a_{t'})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceSample {
    /// `⟨a†(t′) a†(t) a(t) a(t′)⟩`.
    pub numerator: f64,
    /// `⟨(a†a)_t⟩`.
    pub photon_number: f64,
    pub g2: Option<f64>,
    pub otoc: OtocSample,
}

impl CoherenceSample {
    /// `𝓒_aa − (⟨a†a⟩² g² + I − 2 Re F)`; zero photon number falls back to
    /// the plain decomposition.
    pub fn bridge_residual(&self) -> f64 {
        let first = match self.g2 {
            Some(g) => self.photon_number * self.photon_number * g,
            None => self.numerator,
        };
        self.otoc.c - (first + self.otoc.i - 2.0 * self.otoc.f.re)
    }
}

/// `g²(t)` and the OTOC bridge from `a_t`, `a_{t'}` and `(a†a)_t`.
pub fn coherence_sample<R: Real>(
    state: &State<R>,
    a_t: &OperatorMatrix<R>,
    a_tp: &OperatorMatrix<R>,
    number_t: &OperatorMatrix<R>,
) -> Result<CoherenceSample> {
    check_dims(state, &[a_t, a_tp, number_t])?;
    let probe = OtocProbe::new(state, a_tp)?;
    let otoc = probe.sample(a_t, None)?;
    let photon_number = to_f64(state.expect(number_t).re);
    let denom = photon_number * photon_number;
    let g2 = if denom >= UNDEFINED_TOL { Some(otoc.d / denom) } else { None };
    Ok(CoherenceSample {
        numerator: otoc.d,
        photon_number,
        g2,
        otoc,
    })
}

/// Series produced by [`otoc_g2_bridge`].
pub struct Bridge {
    pub c_aa: CorrelatorSeries,
    pub d: CorrelatorSeries,
    pub i: CorrelatorSeries,
    pub f: CorrelatorSeries,
    pub g2: CorrelatorSeries,
    pub photon_number: CorrelatorSeries,
    pub max_residual: f64,
}

impl Bridge {
    pub fn from_samples(times: &[f64], samples: &[CoherenceSample]) -> Result<Self> {
        check_snapshots(samples.len(), times)?;
        let t = times.to_vec();
        let real = |f: &dyn Fn(&CoherenceSample) -> f64| samples.iter().map(|s| Some(Complex::new(f(s), 0.0))).collect();
        Ok(Self {
            c_aa: CorrelatorSeries::new(CorrelatorKind::CAa, t.clone(), real(&|s| s.otoc.c))?,
            d: CorrelatorSeries::new(CorrelatorKind::D, t.clone(), real(&|s| s.otoc.d))?,
            i: CorrelatorSeries::new(CorrelatorKind::I, t.clone(), real(&|s| s.otoc.i))?,
            f: CorrelatorSeries::new(CorrelatorKind::F, t.clone(), samples.iter().map(|s| Some(s.otoc.f)).collect())?,
            g2: CorrelatorSeries::new(
                CorrelatorKind::G2,
                t.clone(),
                samples.iter().map(|s| s.g2.map(|g| Complex::new(g, 0.0))).collect(),
            )?,
            photon_number: CorrelatorSeries::new(CorrelatorKind::PhotonNumber, t, real(&|s| s.photon_number))?,
            max_residual: samples.iter().map(|s| s.bridge_residual().abs()).fold(0.0, f64::max),
        })
    }
}

/// `𝓒_aa`, its decomposition and `g²` over snapshots; `a_tp` holds
/// `a_{t'}` per sample (the bare `a` for `t′ = 0`).
pub fn otoc_g2_bridge<R: Real>(
    state: &State<R>,
    a_t: &[OperatorMatrix<R>],
    a_tp: &[OperatorMatrix<R>],
    number_t: &[OperatorMatrix<R>],
    times: &[f64],
) -> Result<Bridge> {
    check_snapshots(a_t.len(), times)?;
    check_snapshots(a_tp.len(), times)?;
    if number_t.len() != times.len() {
        return Err(Error::Missing("composite (a†a)_t snapshots".into()));
    }
    let samples = (0..times.len())
        .map(|k| coherence_sample(state, &a_t[k], &a_tp[k], &number_t[k]))
        .collect::<Result<Vec<_>>>()?;
    Bridge::from_samples(times, &samples)
}

/// Photon statistics from `g²(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonStatistics {
    SuperPoissonian,
    Poissonian,
    SubPoissonian,
}

/// Light classification derived from a `g²` series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightReport {
    pub g2_zero: f64,
    pub statistics: PhotonStatistics,
    /// `g²(t) < g²(0)` at every later defined sample.
    pub bunched: bool,
    pub tolerance: f64,
}

/// Labels the light; the first sample is taken as `t = 0`.
pub fn classify_light(g2: &CorrelatorSeries, tolerance: f64) -> Result<LightReport> {
    let g0 = g2
        .values
        .first()
        .copied()
        .flatten()
        .ok_or_else(|| Error::Missing("g2 at the first sample is undefined".into()))?
        .re;
    let statistics = if g0 > 1.0 + tolerance {
        PhotonStatistics::SuperPoissonian
    } else if g0 < 1.0 - tolerance {
        PhotonStatistics::SubPoissonian
    } else {
        PhotonStatistics::Poissonian
    };
    let bunched = g2.values.iter().skip(1).flatten().all(|v| v.re < g0);
    Ok(LightReport {
        g2_zero: g0,
        statistics,
        bunched,
        tolerance,
    })
}
