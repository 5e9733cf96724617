//! Truncated spin ⊗ boson Hilbert spaces and their elementary operators.
//!
//! Basis ordering is spin-index-major, Fock-index-minor: the basis vector
//! `|s⟩ ⊗ |n⟩` sits at index `s · fock_dim + n`. In collective mode the spin
//! index runs over `m = −j, …, +j` in ascending order; in full-sector mode it
//! is the binary label of the 2^N product states with site 0 as the most
//! significant bit and bit value 1 meaning spin up.

use std::io::{BufRead, Write};

use ndarray::Array2;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{identity, kron, OperatorMatrix};
use crate::scalar::{Cx, Real};

/// Largest atom count accepted in full-sector mode unless overridden.
pub const DEFAULT_MAX_FULL_ATOMS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinMode {
    /// Maximal pseudospin sector `j = N/2`, dimension `N + 1`.
    Collective,
    /// All angular-momentum sectors, dimension `2^N`.
    FullSectors,
}

/// Dimensions of a truncated spin ⊗ boson space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GeometryRepr", into = "GeometryRepr")]
pub struct HilbertGeometry {
    n_atoms: usize,
    spin_mode: SpinMode,
    fock_dim: usize,
}

#[derive(Serialize, Deserialize)]
struct GeometryRepr {
    n_atoms: usize,
    spin_mode: SpinMode,
    fock_dim: usize,
}

impl TryFrom<GeometryRepr> for HilbertGeometry {
    type Error = Error;
    fn try_from(r: GeometryRepr) -> Result<Self> {
        HilbertGeometry::new(r.n_atoms, r.spin_mode, r.fock_dim)
    }
}

impl From<HilbertGeometry> for GeometryRepr {
    fn from(g: HilbertGeometry) -> Self {
        GeometryRepr {
            n_atoms: g.n_atoms,
            spin_mode: g.spin_mode,
            fock_dim: g.fock_dim,
        }
    }
}

impl HilbertGeometry {
    pub fn new(n_atoms: usize, spin_mode: SpinMode, fock_dim: usize) -> Result<Self> {
        if n_atoms < 1 {
            return Err(Error::Geometry("n_atoms must be at least 1".into()));
        }
        if fock_dim < 2 {
            return Err(Error::Geometry("fock_dim must be at least 2".into()));
        }
        if spin_mode == SpinMode::FullSectors && n_atoms > 24 {
            return Err(Error::Geometry(format!(
                "full-sector space with {n_atoms} atoms is not addressable"
            )));
        }
        Ok(Self {
            n_atoms,
            spin_mode,
            fock_dim,
        })
    }

    pub fn collective(n_atoms: usize, fock_dim: usize) -> Result<Self> {
        Self::new(n_atoms, SpinMode::Collective, fock_dim)
    }

    pub fn full_sectors(n_atoms: usize, fock_dim: usize) -> Result<Self> {
        Self::new(n_atoms, SpinMode::FullSectors, fock_dim)
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn spin_mode(&self) -> SpinMode {
        self.spin_mode
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn spin_dim(&self) -> usize {
        match self.spin_mode {
            SpinMode::Collective => self.n_atoms + 1,
            SpinMode::FullSectors => 1 << self.n_atoms,
        }
    }

    pub fn total_dim(&self) -> usize {
        self.spin_dim() * self.fock_dim
    }

    /// Pseudospin length `j = N/2`.
    pub fn j(&self) -> f64 {
        self.n_atoms as f64 / 2.0
    }

    /// Same spin space with a different boson truncation.
    pub fn with_fock_dim(&self, fock_dim: usize) -> Result<Self> {
        Self::new(self.n_atoms, self.spin_mode, fock_dim)
    }

    /// Lifts a Fock-space matrix to the full space (identity on spin).
    pub fn lift_fock<R: Real>(&self, fock: &Array2<Cx<R>>) -> Array2<Cx<R>> {
        kron(&identity(self.spin_dim()), fock)
    }

    /// Lifts a spin-space matrix to the full space (identity on the boson).
    pub fn lift_spin<R: Real>(&self, spin: &Array2<Cx<R>>) -> Array2<Cx<R>> {
        kron(spin, &identity(self.fock_dim))
    }

    fn header(&self) -> String {
        let mode = match self.spin_mode {
            SpinMode::Collective => "collective",
            SpinMode::FullSectors => "full_sectors",
        };
        format!(
            "# geometry n_atoms={} spin_mode={} fock_dim={} total_dim={}",
            self.n_atoms,
            mode,
            self.fock_dim,
            self.total_dim()
        )
    }

    fn parse_header(line: &str) -> Result<Self> {
        let bad = || Error::Geometry(format!("malformed dump header: {line}"));
        let rest = line.strip_prefix("# geometry").ok_or_else(bad)?;
        let (mut n, mut mode, mut f) = (None, None, None);
        for field in rest.split_whitespace() {
            let (k, v) = field.split_once('=').ok_or_else(bad)?;
            match k {
                "n_atoms" => n = v.parse::<usize>().ok(),
                "fock_dim" => f = v.parse::<usize>().ok(),
                "spin_mode" => {
                    mode = match v {
                        "collective" => Some(SpinMode::Collective),
                        "full_sectors" => Some(SpinMode::FullSectors),
                        _ => None,
                    }
                }
                "total_dim" => {}
                _ => return Err(bad()),
            }
        }
        Self::new(n.ok_or_else(bad)?, mode.ok_or_else(bad)?, f.ok_or_else(bad)?)
    }
}

/// Fock-space annihilation operator of size `n_f`.
pub(crate) fn fock_annihilation<R: Real>(n_f: usize) -> Array2<Cx<R>> {
    let mut a = Array2::zeros((n_f, n_f));
    for n in 1..n_f {
        a[[n - 1, n]] = Complex::new(R::from_usize_lossy(n).sqrt(), R::zero());
    }
    a
}

/// `(a, a†)` lifted to the full space.
pub fn boson_ops<R: Real>(geom: HilbertGeometry) -> (OperatorMatrix<R>, OperatorMatrix<R>) {
    let a = OperatorMatrix::from_parts(geom.lift_fock(&fock_annihilation::<R>(geom.fock_dim)), geom, false);
    let ad = a.dagger();
    (a, ad)
}

/// `q = (a† + a)/√2` and `p = i(a† − a)/√2`.
pub fn quadrature_ops<R: Real>(geom: HilbertGeometry) -> (OperatorMatrix<R>, OperatorMatrix<R>) {
    let (a, ad) = boson_ops::<R>(geom);
    let s = R::one() / R::lit(2.0).sqrt();
    let q = (&ad + &a).scale_real(s);
    let p = (&ad - &a).scale(Complex::new(R::zero(), s));
    (
        OperatorMatrix::from_parts(q.into_data(), geom, true),
        OperatorMatrix::from_parts(p.into_data(), geom, true),
    )
}

/// Collective angular-momentum operators `J_z, J_+, J_−`.
#[derive(Debug, Clone)]
pub struct SpinOps<R: Real> {
    pub jz: OperatorMatrix<R>,
    pub jplus: OperatorMatrix<R>,
    pub jminus: OperatorMatrix<R>,
}

/// Spin-`j = N/2` matrices in the ascending `|j, m⟩` basis.
fn collective_spin_factor<R: Real>(n_atoms: usize) -> (Array2<Cx<R>>, Array2<Cx<R>>) {
    let dim = n_atoms + 1;
    let j = R::from_usize_lossy(n_atoms) / R::lit(2.0);
    let mut jz = Array2::zeros((dim, dim));
    let mut jp = Array2::zeros((dim, dim));
    for k in 0..dim {
        let m = R::from_usize_lossy(k) - j;
        jz[[k, k]] = Complex::new(m, R::zero());
        if k + 1 < dim {
            let amp = (j * (j + R::one()) - m * (m + R::one())).sqrt();
            jp[[k + 1, k]] = Complex::new(amp, R::zero());
        }
    }
    (jz, jp)
}

pub fn collective_spin_ops<R: Real>(geom: HilbertGeometry) -> Result<SpinOps<R>> {
    if geom.spin_mode() != SpinMode::Collective {
        return Err(Error::Geometry(
            "collective spin operators need a Collective geometry; use pauli_sum_ops".into(),
        ));
    }
    let (jz, jp) = collective_spin_factor::<R>(geom.n_atoms());
    let jz = OperatorMatrix::from_parts(geom.lift_spin(&jz), geom, true);
    let jplus = OperatorMatrix::from_parts(geom.lift_spin(&jp), geom, false);
    let jminus = jplus.dagger();
    Ok(SpinOps { jz, jplus, jminus })
}

pub fn pauli_sum_ops<R: Real>(geom: HilbertGeometry) -> Result<SpinOps<R>> {
    pauli_sum_ops_with_limit(geom, DEFAULT_MAX_FULL_ATOMS)
}

/// `J_z = ½Σσ_z`, `J_± = Σσ_±` on the full 2^N spin space.
pub fn pauli_sum_ops_with_limit<R: Real>(geom: HilbertGeometry, max_atoms: usize) -> Result<SpinOps<R>> {
    if geom.spin_mode() != SpinMode::FullSectors {
        return Err(Error::Geometry(
            "Pauli-sum operators need a FullSectors geometry; use collective_spin_ops".into(),
        ));
    }
    let (jz, jp) = pauli_sum_factor::<R>(geom.n_atoms(), max_atoms)?;
    let jz = OperatorMatrix::from_parts(geom.lift_spin(&jz), geom, true);
    let jplus = OperatorMatrix::from_parts(geom.lift_spin(&jp), geom, false);
    let jminus = jplus.dagger();
    Ok(SpinOps { jz, jplus, jminus })
}

fn pauli_sum_factor<R: Real>(n: usize, max_atoms: usize) -> Result<(Array2<Cx<R>>, Array2<Cx<R>>)> {
    if n > max_atoms {
        return Err(Error::Geometry(format!(
            "full-sector mode limited to {max_atoms} atoms, got {n}"
        )));
    }
    let dim = 1usize << n;
    let half = R::lit(0.5);
    let mut jz = Array2::<Cx<R>>::zeros((dim, dim));
    let mut jp = Array2::<Cx<R>>::zeros((dim, dim));
    for state in 0..dim {
        for site in 0..n {
            let bit = 1usize << (n - 1 - site);
            if state & bit != 0 {
                jz[[state, state]] += Complex::new(half, R::zero());
            } else {
                jz[[state, state]] -= Complex::new(half, R::zero());
                // σ_+ on this site: |↓⟩ → |↑⟩
                jp[[state | bit, state]] += Complex::new(R::one(), R::zero());
            }
        }
    }
    Ok((jz, jp))
}

/// Spin-factor matrices `(J_z, J_+)` on the spin space alone (not lifted).
pub(crate) fn spin_factor_ops<R: Real>(geom: HilbertGeometry) -> Result<(Array2<Cx<R>>, Array2<Cx<R>>)> {
    match geom.spin_mode() {
        SpinMode::Collective => Ok(collective_spin_factor(geom.n_atoms())),
        SpinMode::FullSectors => pauli_sum_factor(geom.n_atoms(), DEFAULT_MAX_FULL_ATOMS),
    }
}

/// Spin operators appropriate for the geometry's mode.
pub fn spin_ops<R: Real>(geom: HilbertGeometry) -> Result<SpinOps<R>> {
    match geom.spin_mode() {
        SpinMode::Collective => collective_spin_ops(geom),
        SpinMode::FullSectors => pauli_sum_ops(geom),
    }
}

/// Diagonal of `a†a + J_z` in the product basis.
fn excitation_diagonal(geom: HilbertGeometry) -> Vec<f64> {
    let nf = geom.fock_dim();
    let n = geom.n_atoms();
    (0..geom.total_dim())
        .map(|idx| {
            let (s, photons) = (idx / nf, idx % nf);
            let m = match geom.spin_mode() {
                SpinMode::Collective => s as f64 - n as f64 / 2.0,
                SpinMode::FullSectors => s.count_ones() as f64 - n as f64 / 2.0,
            };
            photons as f64 + m
        })
        .collect()
}

/// `𝒩 = a†a + J_z`.
pub fn excitation_number_op<R: Real>(geom: HilbertGeometry) -> OperatorMatrix<R> {
    let diag: Vec<Cx<R>> = excitation_diagonal(geom)
        .into_iter()
        .map(|x| Complex::new(R::lit(x), R::zero()))
        .collect();
    OperatorMatrix::from_parts(Array2::from_diag(&ndarray::Array1::from(diag)), geom, true)
}

/// `Π = exp[−iπ(a†a + J_z)]`, exponentiated on the diagonal.
pub fn parity_op<R: Real>(geom: HilbertGeometry) -> OperatorMatrix<R> {
    let diag: Vec<Cx<R>> = excitation_diagonal(geom)
        .into_iter()
        .map(|x| {
            // x is an integer or half-integer, so the phase is one of {±1, ±i};
            // evaluate it exactly rather than through sin/cos of a large angle.
            let twice = (2.0 * x).round() as i64;
            let phase = match twice.rem_euclid(4) {
                0 => (1.0, 0.0),
                1 => (0.0, -1.0),
                2 => (-1.0, 0.0),
                _ => (0.0, 1.0),
            };
            Complex::new(R::lit(phase.0), R::lit(phase.1))
        })
        .collect();
    OperatorMatrix::from_parts(Array2::from_diag(&ndarray::Array1::from(diag)), geom, false)
}

/// Writes the debug dump: one geometry header line, then one line per matrix
/// row holding interleaved `re,im` pairs with 17 significant digits.
pub fn write_dump<R: Real, W: Write>(op: &OperatorMatrix<R>, mut out: W) -> Result<()> {
    writeln!(out, "{}", op.geometry().header())?;
    let mut line = String::new();
    for row in op.data().rows() {
        line.clear();
        for (k, z) in row.iter().enumerate() {
            if k > 0 {
                line.push(',');
            }
            line.push_str(&crate::io::fmt_f64(z.re.to_f64().unwrap_or(f64::NAN)));
            line.push(',');
            line.push_str(&crate::io::fmt_f64(z.im.to_f64().unwrap_or(f64::NAN)));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_dump<R: Real, B: BufRead>(input: B) -> Result<OperatorMatrix<R>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Geometry("empty dump".into()))??;
    let geom = HilbertGeometry::parse_header(&header)?;
    let d = geom.total_dim();
    let mut data = Array2::<Cx<R>>::zeros((d, d));
    for i in 0..d {
        let line = lines
            .next()
            .ok_or_else(|| Error::Dimension { expected: d, got: i })??;
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Geometry(format!("bad number in dump row {i}: {e}")))?;
        if vals.len() != 2 * d {
            return Err(Error::Dimension {
                expected: 2 * d,
                got: vals.len(),
            });
        }
        for j in 0..d {
            data[[i, j]] = Complex::new(R::lit(vals[2 * j]), R::lit(vals[2 * j + 1]));
        }
    }
    OperatorMatrix::new(data, geom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::max_abs;

    fn c(re: f64) -> Cx<f64> {
        Complex::new(re, 0.0)
    }

    /// Restriction of an operator to Fock levels `0..n_f−1` in every spin block.
    fn below_edge(op: &OperatorMatrix<f64>) -> Vec<(usize, usize)> {
        let g = op.geometry();
        let nf = g.fock_dim();
        let keep: Vec<usize> = (0..g.total_dim()).filter(|i| i % nf < nf - 1).collect();
        keep.iter()
            .flat_map(|&i| keep.iter().map(move |&j| (i, j)))
            .collect()
    }

    #[test]
    fn geometry_dimensions() {
        let g = HilbertGeometry::collective(7, 20).unwrap();
        assert_eq!(g.total_dim(), 160);
        let g = HilbertGeometry::full_sectors(4, 10).unwrap();
        assert_eq!(g.total_dim(), 160);
        assert!(HilbertGeometry::collective(0, 4).is_err());
        assert!(HilbertGeometry::collective(2, 1).is_err());
    }

    #[test]
    fn two_level_fock_annihilator() {
        let g = HilbertGeometry::collective(1, 2).unwrap();
        let (a, ad) = boson_ops::<f64>(g);
        // spin factor is 2-dim: check the Fock block of each spin state
        for s in 0..2 {
            let o = 2 * s;
            assert_eq!(a.get(o, o + 1), c(1.0));
            assert_eq!(a.get(o + 1, o), c(0.0));
            assert_eq!(a.get(o, o), c(0.0));
        }
        assert_eq!(ad, a.dagger());
        let nonzero = a.data().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn canonical_commutators_below_edge() {
        let g = HilbertGeometry::collective(2, 6).unwrap();
        let (a, ad) = boson_ops::<f64>(g);
        let comm = a.commutator(&ad).unwrap();
        let (q, p) = quadrature_ops::<f64>(g);
        let qp = q.commutator(&p).unwrap();
        for (i, j) in below_edge(&comm) {
            let delta = if i == j { 1.0 } else { 0.0 };
            assert!((comm.get(i, j) - c(delta)).norm() <= 1e-12);
            assert!((qp.get(i, j) - Complex::new(0.0, delta)).norm() <= 1e-12);
        }
    }

    #[test]
    fn number_operator_diagonal() {
        let g = HilbertGeometry::collective(1, 5).unwrap();
        let (a, ad) = boson_ops::<f64>(g);
        let n = ad.matmul(&a).unwrap();
        for idx in 0..g.total_dim() {
            assert!((n.get(idx, idx) - c((idx % 5) as f64)).norm() < 1e-14);
        }
    }

    #[test]
    fn quadratures_are_hermitian() {
        let g = HilbertGeometry::collective(1, 2).unwrap();
        let (q, p) = quadrature_ops::<f64>(g);
        assert!(q.hermitian_hint() && p.hermitian_hint());
        assert!(q.hermiticity_deviation() <= 1e-12);
        assert!(p.hermiticity_deviation() <= 1e-12);
        let s = 1.0 / 2f64.sqrt();
        assert!((q.get(0, 1) - c(s)).norm() < 1e-15);
        assert!((q.get(1, 0) - c(s)).norm() < 1e-15);
    }

    #[test]
    fn single_spin_collective() {
        let g = HilbertGeometry::collective(1, 2).unwrap();
        let s = collective_spin_ops::<f64>(g).unwrap();
        // spin index 0 ↔ m = −1/2
        assert_eq!(s.jz.get(0, 0), c(-0.5));
        assert_eq!(s.jz.get(2, 2), c(0.5));
    }

    fn check_su2(s: &SpinOps<f64>) {
        let pm = s.jplus.commutator(&s.jminus).unwrap();
        let two_jz = s.jz.scale_real(2.0);
        assert!(max_abs((&pm - &two_jz).data()) <= 1e-12);
        let zp = s.jz.commutator(&s.jplus).unwrap();
        assert!(max_abs((&zp - &s.jplus).data()) <= 1e-12);
        assert!(s.jz.trace().norm() < 1e-12);
    }

    #[test]
    fn su2_algebra_both_modes() {
        for n in 1..=5 {
            check_su2(&collective_spin_ops(HilbertGeometry::collective(n, 3).unwrap()).unwrap());
        }
        for n in 1..=3 {
            check_su2(&pauli_sum_ops(HilbertGeometry::full_sectors(n, 3).unwrap()).unwrap());
        }
    }

    #[test]
    fn full_and_collective_agree_for_one_atom() {
        let gc = HilbertGeometry::collective(1, 4).unwrap();
        let gf = HilbertGeometry::full_sectors(1, 4).unwrap();
        let sc = collective_spin_ops::<f64>(gc).unwrap();
        let sf = pauli_sum_ops::<f64>(gf).unwrap();
        assert_eq!(sc.jz.data(), sf.jz.data());
        assert_eq!(sc.jplus.data(), sf.jplus.data());
        assert_eq!(sc.jminus.data(), sf.jminus.data());
    }

    #[test]
    fn wrong_mode_rejected() {
        let gc = HilbertGeometry::collective(2, 3).unwrap();
        let gf = HilbertGeometry::full_sectors(2, 3).unwrap();
        assert!(pauli_sum_ops::<f64>(gc).is_err());
        assert!(collective_spin_ops::<f64>(gf).is_err());
        let big = HilbertGeometry::full_sectors(9, 2).unwrap();
        assert!(pauli_sum_ops::<f64>(big).is_err());
        assert!(pauli_sum_ops_with_limit::<f64>(HilbertGeometry::full_sectors(3, 2).unwrap(), 2).is_err());
    }

    #[test]
    fn lifted_boson_and_spin_commute() {
        let g = HilbertGeometry::collective(3, 4).unwrap();
        let (a, _) = boson_ops::<f64>(g);
        let s = collective_spin_ops::<f64>(g).unwrap();
        assert!(a.commutator(&s.jz).unwrap().max_abs() == 0.0);
        assert!(a.commutator(&s.jplus).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn excitation_number_spectrum() {
        let g = HilbertGeometry::collective(1, 2).unwrap();
        let n = excitation_number_op::<f64>(g);
        let mut ev: Vec<f64> = n.data().diag().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(ev, vec![-0.5, 0.5, 0.5, 1.5]);
    }

    #[test]
    fn parity_is_unitary() {
        for g in [
            HilbertGeometry::collective(3, 5).unwrap(),
            HilbertGeometry::collective(4, 5).unwrap(),
            HilbertGeometry::full_sectors(2, 3).unwrap(),
        ] {
            let p = parity_op::<f64>(g);
            let pp = p.matmul(&p.dagger()).unwrap();
            assert!(max_abs((&pp - &OperatorMatrix::identity(g)).data()) < 1e-15);
        }
    }

    #[test]
    fn dump_round_trip() {
        let g = HilbertGeometry::collective(1, 3).unwrap();
        let (_, p) = quadrature_ops::<f64>(g);
        let mut buf = Vec::new();
        write_dump(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# geometry n_atoms=1 spin_mode=collective fock_dim=3 total_dim=6\n"));
        let back: OperatorMatrix<f64> = read_dump(buf.as_slice()).unwrap();
        assert_eq!(back.data(), p.data());
    }
}
