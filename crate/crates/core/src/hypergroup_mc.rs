//! Monte-Carlo samplers for the two convolutions on the type-A chamber and
//! the checks built on them.
//!
//! `*` is the orbit convolution (spectra of `diag(x) + U diag(y) U*`); `•` is
//! the double-coset convolution of SL(d, C) (log-singular spectra of
//! `e^x U e^y`). Both use Haar `U` in SU(d).

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, GradedRows};
use crate::matrix_kernels::{close_log_spectrum, conjugate_diag, haar_unitary, hermitian_spectrum, HermitianTraceless};
use crate::rng::{derive_seed, run_blocks, Rng as StreamRng};
use crate::root_system::{build_root_system, ChamberPoint, RootFamily, RootSystem};
use crate::special_functions::{check_weights, log_semicharacter, semicharacter, spherical_phi_real, spherical_psi_real};
use crate::stats::{hausdorff, VecMoments};

pub const SUPPORT_EPS: f64 = 1e-3;
pub const MIN_SUPPORT_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convolution {
    Hermitian,
    Group,
}

impl std::str::FromStr for Convolution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hermitian" => Ok(Convolution::Hermitian),
            "group" => Ok(Convolution::Group),
            _ => Err(Error::Parse(format!("unknown convolution '{s}' (expected hermitian or group)"))),
        }
    }
}

/// The type-A root system for `d x d` matrices.
pub fn type_a(d: usize) -> Result<RootSystem> {
    if d < 2 {
        return Err(Error::RankOutOfBounds { family: RootFamily::A, rank: d.saturating_sub(1), requirement: "d >= 2" });
    }
    build_root_system(RootFamily::A, d - 1)
}

fn check_pair(rs: &RootSystem, x: &ChamberPoint, y: &ChamberPoint) -> Result<()> {
    for p in [x, y] {
        rs.check_dim(p.dim())?;
        if !rs.in_chamber(p.coords(), 1e-12) {
            return Err(Error::NotInChamber { coords: p.coords().to_vec() });
        }
    }
    Ok(())
}

fn hermitian_draw<R: Rng + ?Sized>(x: &ChamberPoint, y: &ChamberPoint, rng: &mut R) -> Result<ChamberPoint> {
    if y.is_zero() {
        return Ok(x.clone());
    }
    let u = haar_unitary(x.dim(), true, rng);
    let sum = ComplexMatrix::from_real_diag(x.coords()).add(&conjugate_diag(&u, y.coords()));
    hermitian_spectrum(&HermitianTraceless::from_rounded(&sum))
}

fn group_draw<R: Rng + ?Sized>(x: &ChamberPoint, y: &ChamberPoint, rng: &mut R) -> Result<ChamberPoint> {
    if y.is_zero() {
        return Ok(x.clone());
    }
    let u = haar_unitary(x.dim(), true, rng);
    let ey: Vec<f64> = y.coords().iter().map(|v| v.exp()).collect();
    let mut rows = GradedRows::from_matrix(&u.scale_columns(&ey))?;
    rows.log_scale.iter_mut().zip(x.coords()).for_each(|(l, v)| *l += v);
    Ok(close_log_spectrum(rows.log_singular_values()?))
}

/// One draw from `delta_x * delta_y`.
pub fn conv_hermitian_sample<R: Rng + ?Sized>(d: usize, x: &ChamberPoint, y: &ChamberPoint, rng: &mut R) -> Result<ChamberPoint> {
    check_pair(&type_a(d)?, x, y)?;
    hermitian_draw(x, y, rng)
}

/// One draw from `delta_x • delta_y`.
pub fn conv_group_sample<R: Rng + ?Sized>(d: usize, x: &ChamberPoint, y: &ChamberPoint, rng: &mut R) -> Result<ChamberPoint> {
    check_pair(&type_a(d)?, x, y)?;
    group_draw(x, y, rng)
}

fn draw<R: Rng + ?Sized>(mode: Convolution, x: &ChamberPoint, y: &ChamberPoint, rng: &mut R) -> Result<ChamberPoint> {
    match mode {
        Convolution::Hermitian => hermitian_draw(x, y, rng),
        Convolution::Group => group_draw(x, y, rng),
    }
}

/// `n` draws in a fixed order determined by `seed`.
pub fn sample_cloud(mode: Convolution, d: usize, x: &ChamberPoint, y: &ChamberPoint, n: usize, seed: u64) -> Result<Vec<ChamberPoint>> {
    check_pair(&type_a(d)?, x, y)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    run_blocks(
        n,
        seed,
        |rng, k| (0..k).map(|_| draw(mode, x, y, rng)).collect::<Result<Vec<_>>>(),
        |a, b| {
            let mut a = a?;
            a.extend(b?);
            Ok(a)
        },
    )
    .expect("n > 0")
}

/// Moments of `f(draw)` over `n` draws; `f` writes `width` values.
fn draw_moments<F>(mode: Convolution, x: &ChamberPoint, y: &ChamberPoint, n: usize, seed: u64, width: usize, f: F) -> Result<VecMoments>
where
    F: Fn(&ChamberPoint, &mut [f64]) -> Result<()> + Sync,
{
    if n == 0 {
        return Err(Error::TooFewSamples { n, min: 1 });
    }
    run_blocks(
        n,
        seed,
        |rng: &mut StreamRng, k| -> Result<VecMoments> {
            let mut m = VecMoments::new(width);
            let mut buf = vec![0.0; width];
            for _ in 0..k {
                let z = draw(mode, x, y, rng)?;
                f(&z, &mut buf)?;
                m.push(&buf);
            }
            Ok(m)
        },
        |a, b| Ok(a?.merge(b?)),
    )
    .expect("n > 0")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<(ChamberPoint, f64)>,
    pub normalized: bool,
}

impl EmpiricalMeasure {
    pub fn uniform(points: Vec<ChamberPoint>) -> Self {
        let w = 1.0 / points.len().max(1) as f64;
        let normalized = !points.is_empty();
        EmpiricalMeasure { atoms: points.into_iter().map(|p| (p, w)).collect(), normalized }
    }

    pub fn from_atoms(atoms: Vec<(ChamberPoint, f64)>) -> Self {
        let normalized = check_weights(atoms.iter().map(|a| a.1)).is_ok();
        EmpiricalMeasure { atoms, normalized }
    }

    pub fn point_mass(x: ChamberPoint) -> Self {
        EmpiricalMeasure { atoms: vec![(x, 1.0)], normalized: true }
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.atoms.iter().map(|(p, _)| p.coords().to_vec()).collect()
    }

    /// One row per atom: coordinates then weight.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let d = self.atoms.first().map_or(0, |a| a.0.dim());
        let header: Vec<String> = (1..=d).map(|i| format!("c{i}")).chain(["weight".to_string()]).collect();
        writeln!(w, "{}", header.join(","))?;
        for (p, wt) in &self.atoms {
            let row: Vec<String> = p.coords().iter().chain(std::iter::once(wt)).map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Per-coordinate mean and range of a cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudSummary {
    pub n: usize,
    pub mean: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

pub fn summarize(points: &[ChamberPoint]) -> CloudSummary {
    let d = points.first().map_or(0, |p| p.dim());
    let mut m = VecMoments::new(d);
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in points {
        m.push(p.coords());
        for (i, &v) in p.coords().iter().enumerate() {
            lo[i] = lo[i].min(v);
            hi[i] = hi[i].max(v);
        }
    }
    CloudSummary { n: points.len(), mean: m.mean, min: lo, max: hi }
}

/// Bounded test functions for the deformation identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `e^{-|z|^2}`
    GaussianBump,
    /// `phi_lambda(z)` for real `lambda`
    Phi { lambda: Vec<f64> },
}

impl TestFunction {
    pub fn eval(&self, rs: &RootSystem, z: &[f64]) -> Result<Complex64> {
        match self {
            TestFunction::GaussianBump => Ok(Complex64::new((-z.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)),
            TestFunction::Phi { lambda } => Ok(spherical_phi_real(rs, lambda, z)?.value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub stderr_lhs: f64,
    pub stderr_rhs: f64,
    pub pass: bool,
}

fn complex_mean(m: &VecMoments) -> (Complex64, f64) {
    let se = m.stderr();
    (Complex64::new(m.mean[0], m.mean[1]), (se[0] * se[0] + se[1] * se[1]).sqrt())
}

/// Compare `E f` under `•` with the semicharacter-weighted `E f` under `*`.
pub fn deformation_check(d: usize, x: &ChamberPoint, y: &ChamberPoint, f: &TestFunction, n: usize, seed: u64) -> Result<DeformationReport> {
    let rs = type_a(d)?;
    check_pair(&rs, x, y)?;
    let lhs = draw_moments(Convolution::Group, x, y, n, derive_seed(seed, 0), 2, |z, out| {
        let v = f.eval(&rs, z.coords())?;
        out[0] = v.re;
        out[1] = v.im;
        Ok(())
    })?;
    let offset = log_semicharacter(&rs, x.coords())? + log_semicharacter(&rs, y.coords())?;
    let rhs = draw_moments(Convolution::Hermitian, x, y, n, derive_seed(seed, 1), 2, |z, out| {
        let w = (log_semicharacter(&rs, z.coords())? - offset).exp();
        let v = f.eval(&rs, z.coords())? * w;
        out[0] = v.re;
        out[1] = v.im;
        Ok(())
    })?;
    let (lhs, stderr_lhs) = complex_mean(&lhs);
    let (rhs, stderr_rhs) = complex_mean(&rhs);
    let pass = (lhs - rhs).norm() <= 3.0 * (stderr_lhs + stderr_rhs) + 1e-12;
    Ok(DeformationReport { lhs, rhs, stderr_lhs, stderr_rhs, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicativityReport {
    pub mean: f64,
    pub stderr: f64,
    pub target: f64,
    pub pass: bool,
}

/// `E[semicharacter(z)]` for `z ~ delta_x * delta_y` against the product of
/// semicharacters.
pub fn semicharacter_multiplicativity(d: usize, x: &ChamberPoint, y: &ChamberPoint, n: usize, seed: u64) -> Result<MultiplicativityReport> {
    let rs = type_a(d)?;
    check_pair(&rs, x, y)?;
    let target = semicharacter(&rs, x.coords())? * semicharacter(&rs, y.coords())?;
    let m = draw_moments(Convolution::Hermitian, x, y, n, seed, 1, |z, out| {
        out[0] = semicharacter(&rs, z.coords())?;
        Ok(())
    })?;
    let (mean, stderr) = (m.mean[0], m.stderr()[0]);
    Ok(MultiplicativityReport { mean, stderr, target, pass: (mean - target).abs() <= 3.0 * stderr + 1e-12 * target })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub hausdorff: f64,
    pub self_a: f64,
    pub self_b: f64,
    pub pass: bool,
}

impl SupportReport {
    pub fn new(hausdorff: f64, self_a: f64, self_b: f64) -> Self {
        let pass = hausdorff <= 2.0 * self_a.max(self_b) + SUPPORT_EPS;
        SupportReport { hausdorff, self_a, self_b, pass }
    }
}

fn split_half_distance(points: &[Vec<f64>]) -> f64 {
    let (a, b) = points.split_at(points.len() / 2);
    hausdorff(a, b)
}

/// Both clouds and the support comparison between them.
pub fn support_clouds(d: usize, x: &ChamberPoint, y: &ChamberPoint, n: usize, seed: u64) -> Result<(Vec<ChamberPoint>, Vec<ChamberPoint>, SupportReport)> {
    if n < MIN_SUPPORT_SAMPLES {
        return Err(Error::TooFewSamples { n, min: MIN_SUPPORT_SAMPLES });
    }
    let herm = sample_cloud(Convolution::Hermitian, d, x, y, n, derive_seed(seed, 0))?;
    let group = sample_cloud(Convolution::Group, d, x, y, n, derive_seed(seed, 1))?;
    let a: Vec<Vec<f64>> = herm.iter().map(|p| p.coords().to_vec()).collect();
    let b: Vec<Vec<f64>> = group.iter().map(|p| p.coords().to_vec()).collect();
    let report = SupportReport::new(hausdorff(&a, &b), split_half_distance(&a), split_half_distance(&b));
    Ok((herm, group, report))
}

pub fn support_equivalence(d: usize, x: &ChamberPoint, y: &ChamberPoint, n: usize, seed: u64) -> Result<SupportReport> {
    Ok(support_clouds(d, x, y, n, seed)?.2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Psi,
    Phi,
}

/// `sum_i w_i conj(f_lambda(x_i))` with `f = psi` or `phi`.
pub fn spherical_transform_empirical(rs: &RootSystem, measure: &EmpiricalMeasure, lambda: &[f64], which: Transform) -> Result<Complex64> {
    check_weights(measure.atoms.iter().map(|a| a.1))?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, w) in &measure.atoms {
        let v = match which {
            Transform::Psi => spherical_psi_real(rs, lambda, p.coords())?,
            Transform::Phi => spherical_phi_real(rs, lambda, p.coords())?,
        };
        acc += v.value.conj() * *w;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomomorphismSide {
    pub mean: Complex64,
    pub stderr: f64,
    pub target: Complex64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomomorphismReport {
    /// `E phi_lambda` over `delta_x • delta_y` against `phi_lambda(x) phi_lambda(y)`.
    pub group: HomomorphismSide,
    /// `E psi_lambda` over `delta_x * delta_y` against `psi_lambda(x) psi_lambda(y)`.
    pub hermitian: HomomorphismSide,
    pub pass: bool,
}

/// Character multiplicativity of `phi` under `•` and of `psi` under `*`.
pub fn transform_homomorphism(d: usize, x: &ChamberPoint, y: &ChamberPoint, lambda: &[f64], n: usize, seed: u64) -> Result<HomomorphismReport> {
    let rs = type_a(d)?;
    check_pair(&rs, x, y)?;
    rs.check_dim(lambda.len())?;
    let side = |mode: Convolution, which: Transform, tag: u64| -> Result<HomomorphismSide> {
        let f = |z: &[f64]| -> Result<Complex64> {
            Ok(match which {
                Transform::Psi => spherical_psi_real(&rs, lambda, z)?.value,
                Transform::Phi => spherical_phi_real(&rs, lambda, z)?.value,
            })
        };
        let target = f(x.coords())? * f(y.coords())?;
        let m = draw_moments(mode, x, y, n, derive_seed(seed, tag), 2, |z, out| {
            let v = f(z.coords())?;
            out[0] = v.re;
            out[1] = v.im;
            Ok(())
        })?;
        let (mean, stderr) = complex_mean(&m);
        Ok(HomomorphismSide { mean, stderr, target, pass: (mean - target).norm() <= 3.0 * stderr + 1e-12 })
    };
    let group = side(Convolution::Group, Transform::Phi, 0)?;
    let hermitian = side(Convolution::Hermitian, Transform::Psi, 1)?;
    let pass = group.pass && hermitian.pass;
    Ok(HomomorphismReport { group, hermitian, pass })
}
