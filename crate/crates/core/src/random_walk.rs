//! Biinvariant random walks on SL(d, C) and their Euclidean counterpart.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergroup_mc::type_a;
use crate::linalg::{dist2, dot, norm2, ComplexMatrix, GradedRows};
use crate::matrix_kernels::{
    close_log_spectrum, conjugate_diag, haar_unitary, hermitian_spectrum, sample_biinvariant, HermitianTraceless,
    UnimodularMatrix,
};
use crate::rng::{derive_seed, substream, Rng as StreamRng};
use crate::root_system::{ChamberPoint, RootFamily, RootSystem};
use crate::special_functions::{check_weights, log_semicharacter, m1_expectation};
use crate::stats::{ks_critical, ks_two_sample, theil_sen_slope, VecMoments};

pub const MAX_ATOM_NORM: f64 = 5.0;
pub const REJECTION_BOUND: f64 = 30.0;
pub const LLN_TOL: f64 = 0.05;
pub const KS_ALPHA: f64 = 0.01;
const KS_RESOLUTION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: Vec<f64>,
    pub weight: f64,
}

fn default_renorm() -> usize {
    1
}

fn default_r() -> f64 {
    1.0
}

fn default_replicas() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkConfig {
    pub d: usize,
    pub mu: Vec<Atom>,
    pub n_steps: usize,
    #[serde(default = "default_replicas")]
    pub n_replicas: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_renorm")]
    pub renorm_period: usize,
    #[serde(default = "default_r")]
    pub r_exponent: f64,
}

impl WalkConfig {
    pub fn point_mass(d: usize, x: Vec<f64>, n_steps: usize, n_replicas: usize, seed: u64) -> Self {
        WalkConfig { d, mu: vec![Atom { point: x, weight: 1.0 }], n_steps, n_replicas, seed, renorm_period: 1, r_exponent: 1.0 }
    }

    /// Check the configuration and return the atoms as chamber points.
    pub fn validate(&self) -> Result<(RootSystem, Vec<(ChamberPoint, f64)>)> {
        let rs = type_a(self.d)?;
        if self.n_steps == 0 {
            return Err(Error::InvalidConfig("n_steps must be at least 1".into()));
        }
        if self.n_replicas == 0 {
            return Err(Error::InvalidConfig("n_replicas must be at least 1".into()));
        }
        if self.renorm_period == 0 {
            return Err(Error::InvalidConfig("renorm_period must be at least 1".into()));
        }
        if !(1.0..2.0).contains(&self.r_exponent) {
            return Err(Error::InvalidConfig(format!("r_exponent must lie in [1, 2), got {}", self.r_exponent)));
        }
        if self.mu.is_empty() {
            return Err(Error::InvalidConfig("mu needs at least one atom".into()));
        }
        check_weights(self.mu.iter().map(|a| a.weight))?;
        let atoms = self
            .mu
            .iter()
            .map(|a| {
                let p = ChamberPoint::new(&rs, a.point.clone(), 1e-12)?;
                if p.norm() > MAX_ATOM_NORM {
                    return Err(Error::InvalidConfig(format!("atom norm {} exceeds {MAX_ATOM_NORM}", p.norm())));
                }
                Ok((p, a.weight))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((rs, atoms))
    }
}

fn pick_atom<'a, R: Rng + ?Sized>(atoms: &'a [(ChamberPoint, f64)], rng: &mut R) -> &'a ChamberPoint {
    if atoms.len() == 1 {
        return &atoms[0].0;
    }
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (p, w) in atoms {
        acc += w;
        if u < acc {
            return p;
        }
    }
    &atoms[atoms.len() - 1].0
}

/// Checkpoints `1, 2, 4, ...` below `n`, then `n`.
pub fn checkpoints(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(1usize), |k| k.checked_mul(2)).take_while(|&k| k < n).collect();
    out.push(n);
    out
}

/// Running product `S_n = Z_1 ... Z_n`, stored as `S_n* = Q diag(e^L) U`
/// with `Q` unitary and `U` upper triangular with unit-modulus diagonal.
#[derive(Debug, Clone)]
pub struct QrAccumulator {
    q: ComplexMatrix,
    log_diag: Vec<f64>,
    upper: ComplexMatrix,
    pending: Option<ComplexMatrix>,
    pending_len: usize,
    period: usize,
    steps: usize,
}

impl QrAccumulator {
    pub fn new(d: usize, renorm_period: usize) -> Self {
        QrAccumulator {
            q: ComplexMatrix::identity(d),
            log_diag: vec![0.0; d],
            upper: ComplexMatrix::identity(d),
            pending: None,
            pending_len: 0,
            period: renorm_period.max(1),
            steps: 0,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn log_diag(&self) -> &[f64] {
        &self.log_diag
    }

    /// Right-multiply the product by `z`.
    pub fn push(&mut self, z: &UnimodularMatrix) -> Result<()> {
        let zs = z.matrix().adjoint();
        self.pending = Some(match self.pending.take() {
            None => zs,
            Some(p) => zs.matmul(&p),
        });
        self.pending_len += 1;
        self.steps += 1;
        if self.pending_len >= self.period {
            self.flush()?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        let Some(p) = self.pending.take() else {
            return Ok(());
        };
        self.pending_len = 0;
        let d = self.q.dim();
        let (q, r) = p.matmul(&self.q).qr();
        // M = diag(e^{-L}) R diag(e^{L}) U
        let mut scaled = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in i..d {
                scaled[(i, j)] = r[(i, j)] * (self.log_diag[j] - self.log_diag[i]).exp();
            }
        }
        let m = scaled.matmul(&self.upper);
        for i in 0..d {
            let a = m[(i, i)].norm();
            if a == 0.0 {
                return Err(Error::Underflow { step: self.steps });
            }
            if !a.is_finite() || !m.is_finite() {
                return Err(Error::Overflow { step: self.steps, detail: format!("non-finite R entry in row {i}") });
            }
        }
        let mut upper = m;
        for i in 0..d {
            let a = upper[(i, i)].norm();
            self.log_diag[i] += a.ln();
            for j in i..d {
                upper[(i, j)] /= a;
            }
        }
        self.q = q;
        self.upper = upper;
        Ok(())
    }

    /// `q(S_n)`: exact log-singular spectrum of the accumulated product.
    pub fn readout(&mut self) -> Result<ChamberPoint> {
        self.flush()?;
        let mut rows = GradedRows::from_matrix(&self.upper)?;
        rows.log_scale.iter_mut().zip(&self.log_diag).for_each(|(l, v)| *l += v);
        Ok(close_log_spectrum(rows.log_singular_values()?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaReport {
    /// `q(S_n) / n` at each checkpoint.
    pub trajectory: Vec<Vec<f64>>,
    pub final_error: f64,
    /// `n^{-1/r} |q(S_n) - n c|` at each checkpoint.
    pub mz_scaled_deviation: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkReport {
    pub d: usize,
    pub n_steps: usize,
    pub checkpoints: Vec<usize>,
    pub limit_c: Vec<f64>,
    pub replicas: Vec<ReplicaReport>,
    /// Largest final error over replicas.
    pub final_error: f64,
    pub step_dispersion: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl WalkReport {
    /// One row per checkpoint and replica.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let coords: Vec<String> = (1..=self.d).map(|i| format!("q{i}_over_n")).collect();
        writeln!(w, "replica,n,{},scaled_deviation", coords.join(","))?;
        for (r, rep) in self.replicas.iter().enumerate() {
            for ((n, q), dev) in self.checkpoints.iter().zip(&rep.trajectory).zip(&rep.mz_scaled_deviation) {
                let vals: Vec<String> = q.iter().map(|v| format!("{v:e}")).collect();
                writeln!(w, "{r},{n},{},{dev:e}", vals.join(","))?;
            }
        }
        Ok(())
    }
}

fn step_dispersion(atoms: &[(ChamberPoint, f64)]) -> f64 {
    let d = atoms[0].0.dim();
    let mut mean = vec![0.0; d];
    for (p, w) in atoms {
        mean.iter_mut().zip(p.coords()).for_each(|(m, v)| *m += w * v);
    }
    atoms.iter().map(|(p, w)| w * dist2(p.coords(), &mean).powi(2)).sum::<f64>().sqrt()
}

fn run_replica(atoms: &[(ChamberPoint, f64)], cfg: &WalkConfig, c: &[f64], marks: &[usize], rng: &mut StreamRng) -> Result<ReplicaReport> {
    let mut acc = QrAccumulator::new(cfg.d, cfg.renorm_period);
    let mut trajectory = Vec::with_capacity(marks.len());
    let mut mz = Vec::with_capacity(marks.len());
    let mut next = 0;
    for n in 1..=cfg.n_steps {
        let x = pick_atom(atoms, rng);
        acc.push(&sample_biinvariant(x, rng)?)?;
        if n == marks[next] {
            let q = acc.readout()?;
            let nf = n as f64;
            trajectory.push(q.coords().iter().map(|v| v / nf).collect::<Vec<f64>>());
            let dev: Vec<f64> = q.coords().iter().zip(c).map(|(a, b)| a - nf * b).collect();
            mz.push(nf.powf(-1.0 / cfg.r_exponent) * norm2(&dev));
            next += 1;
        }
    }
    let last = trajectory.last().expect("final checkpoint");
    Ok(ReplicaReport { final_error: dist2(last, c), trajectory: trajectory.clone(), mz_scaled_deviation: mz })
}

/// Run `n_replicas` independent walks with steps `U diag(e^{x_i}) V`.
pub fn run_group_walk(cfg: &WalkConfig) -> Result<WalkReport> {
    let (rs, atoms) = cfg.validate()?;
    let limit_c = m1_expectation(&rs, &atoms)?;
    let marks = checkpoints(cfg.n_steps);
    let replicas = (0..cfg.n_replicas)
        .into_par_iter()
        .map(|r| run_replica(&atoms, cfg, &limit_c, &marks, &mut substream(cfg.seed, r as u64)))
        .collect::<Result<Vec<_>>>()?;
    let final_error = replicas.iter().map(|r| r.final_error).fold(0.0, f64::max);
    let sigma = step_dispersion(&atoms);
    let tolerance = LLN_TOL.max(5.0 * sigma / (cfg.n_steps as f64).sqrt());
    Ok(WalkReport {
        d: cfg.d,
        n_steps: cfg.n_steps,
        checkpoints: marks,
        limit_c,
        replicas,
        final_error,
        step_dispersion: sigma,
        tolerance,
        pass: final_error <= tolerance,
    })
}

/// A draw `k.x` with density `e^{<rho, k.x>} / semicharacter(x)` against Haar.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedOrbitSample {
    pub element: HermitianTraceless,
    pub attempts: u64,
}

fn rejection_setup(rs: &RootSystem, x: &ChamberPoint) -> Result<f64> {
    if rs.family() != RootFamily::A {
        return Err(Error::InvalidConfig(format!("weighted orbit sampling is implemented for family A, not {}", rs.family())));
    }
    rs.check_dim(x.dim())?;
    let top = dot(rs.rho(), x.coords());
    if top > REJECTION_BOUND {
        return Err(Error::RejectionInfeasible { value: top, bound: REJECTION_BOUND });
    }
    Ok(top)
}

fn weighted_draw<R: Rng + ?Sized>(rs: &RootSystem, x: &ChamberPoint, top: f64, rng: &mut R) -> Result<WeightedOrbitSample> {
    let mut attempts = 0u64;
    loop {
        attempts += 1;
        let u = haar_unitary(x.dim(), true, rng);
        let m = conjugate_diag(&u, x.coords());
        let diag: Vec<f64> = (0..x.dim()).map(|i| m[(i, i)].re).collect();
        let excess = dot(rs.rho(), &diag) - top;
        if excess > 1e-9 * top.abs().max(1.0) {
            return Err(Error::EnvelopeExceeded { excess });
        }
        if rng.random::<f64>() < excess.min(0.0).exp() {
            return Ok(WeightedOrbitSample { element: HermitianTraceless::from_rounded(&m), attempts });
        }
    }
}

/// Rejection sampler with envelope `e^{<rho, x>}`.
pub fn sample_orbit_weighted<R: Rng + ?Sized>(rs: &RootSystem, x: &ChamberPoint, rng: &mut R) -> Result<WeightedOrbitSample> {
    let top = rejection_setup(rs, x)?;
    weighted_draw(rs, x, top, rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub accepted: u64,
    pub attempts: u64,
    pub rate: f64,
    pub stderr: f64,
    pub target: f64,
    /// Mean Cartan component of the accepted draws.
    pub mean_projection: Vec<f64>,
    pub mean_projection_stderr: Vec<f64>,
    pub pass: bool,
}

/// Acceptance frequency of the rejection sampler against `semicharacter(x) e^{-<rho,x>}`.
pub fn rejection_acceptance(rs: &RootSystem, x: &ChamberPoint, n_accepted: usize, seed: u64) -> Result<AcceptanceReport> {
    let top = rejection_setup(rs, x)?;
    let target = (log_semicharacter(rs, x.coords())? - top).exp();
    let mut rng = substream(seed, 0);
    let mut attempts = 0u64;
    let mut m = VecMoments::new(x.dim());
    for _ in 0..n_accepted {
        let s = weighted_draw(rs, x, top, &mut rng)?;
        attempts += s.attempts;
        let diag: Vec<f64> = (0..x.dim()).map(|i| s.element.matrix()[(i, i)].re).collect();
        m.push(&diag);
    }
    let rate = n_accepted as f64 / attempts as f64;
    let stderr = (target * (1.0 - target) / attempts as f64).sqrt();
    Ok(AcceptanceReport {
        accepted: n_accepted as u64,
        attempts,
        rate,
        stderr,
        target,
        mean_projection_stderr: m.stderr(),
        mean_projection: m.mean,
        pass: (rate - target).abs() <= 3.0 * stderr + 1e-12,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub n_steps: usize,
    pub n_replicas: usize,
    /// Per-coordinate two-sample KS distance between `p(T_n)` and `q(S_n)`.
    pub ks: Vec<f64>,
    pub critical: f64,
    pub mean_euclidean: Vec<f64>,
    pub mean_group: Vec<f64>,
    pub pass: bool,
}

/// Compare the laws of the Euclidean walk `p(X_1 + ... + X_n)` with
/// e_rho-weighted increments and of `q(Z_1 ... Z_n)`.
pub fn euclidean_walk_crosscheck(cfg: &WalkConfig) -> Result<CrosscheckReport> {
    let (rs, atoms) = cfg.validate()?;
    let d = cfg.d;
    let tops = atoms.iter().map(|(p, _)| rejection_setup(&rs, p)).collect::<Result<Vec<_>>>()?;
    let pairs = (0..cfg.n_replicas)
        .into_par_iter()
        .map(|r| -> Result<(Vec<f64>, Vec<f64>)> {
            let mut rng = substream(derive_seed(cfg.seed, 0), r as u64);
            let mut sum = ComplexMatrix::zeros(d);
            for _ in 0..cfg.n_steps {
                let k = pick_index(&atoms, &mut rng);
                let s = weighted_draw(&rs, &atoms[k].0, tops[k], &mut rng)?;
                sum = sum.add(s.element.matrix());
            }
            let e = hermitian_spectrum(&HermitianTraceless::from_rounded(&sum))?;
            let mut rng = substream(derive_seed(cfg.seed, 1), r as u64);
            let mut acc = QrAccumulator::new(d, cfg.renorm_period);
            for _ in 0..cfg.n_steps {
                let x = pick_atom(&atoms, &mut rng);
                acc.push(&sample_biinvariant(x, &mut rng)?)?;
            }
            Ok((e.into_inner(), acc.readout()?.into_inner()))
        })
        .collect::<Result<Vec<_>>>()?;
    // values closer than rounding noise count as ties
    let snap = |v: f64| (v / KS_RESOLUTION).round() * KS_RESOLUTION;
    let ks: Vec<f64> = (0..d)
        .map(|i| {
            let a: Vec<f64> = pairs.iter().map(|p| snap(p.0[i])).collect();
            let b: Vec<f64> = pairs.iter().map(|p| snap(p.1[i])).collect();
            ks_two_sample(&a, &b)
        })
        .collect();
    let critical = ks_critical(KS_ALPHA, cfg.n_replicas, cfg.n_replicas);
    let mean = |sel: fn(&(Vec<f64>, Vec<f64>)) -> &Vec<f64>| -> Vec<f64> {
        let mut m = vec![0.0; d];
        for p in &pairs {
            m.iter_mut().zip(sel(p)).for_each(|(a, b)| *a += b / pairs.len() as f64);
        }
        m
    };
    let degenerate = ks.iter().all(|&k| k == 0.0);
    Ok(CrosscheckReport {
        n_steps: cfg.n_steps,
        n_replicas: cfg.n_replicas,
        pass: degenerate || ks.iter().all(|&k| k < critical),
        ks,
        critical,
        mean_euclidean: mean(|p| &p.0),
        mean_group: mean(|p| &p.1),
    })
}

fn pick_index<R: Rng + ?Sized>(atoms: &[(ChamberPoint, f64)], rng: &mut R) -> usize {
    if atoms.len() == 1 {
        return 0;
    }
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, (_, w)) in atoms.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    atoms.len() - 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MzScan {
    pub r_exponent: f64,
    pub checkpoints: Vec<usize>,
    /// Root-mean-square over replicas of `n^{-1/r} |q(S_n) - n c|`.
    pub rms_deviation: Vec<f64>,
    pub slope: f64,
    pub degenerate: bool,
    pub pass: bool,
}

/// Trend of the scaled deviations; the Theil-Sen slope of log deviation
/// against log n must be negative.
pub fn mz_rate_scan(cfg: &WalkConfig) -> Result<MzScan> {
    let report = run_group_walk(cfg)?;
    let k = report.checkpoints.len();
    let rms: Vec<f64> = (0..k)
        .map(|i| {
            let s: f64 = report.replicas.iter().map(|r| r.mz_scaled_deviation[i].powi(2)).sum();
            (s / report.replicas.len() as f64).sqrt()
        })
        .collect();
    let degenerate = rms.iter().all(|&v| v <= 1e-12);
    let (slope, pass) = if degenerate {
        (0.0, true)
    } else {
        let (lx, ly): (Vec<f64>, Vec<f64>) = report
            .checkpoints
            .iter()
            .zip(&rms)
            .filter(|(_, &v)| v > 0.0)
            .map(|(&n, &v)| ((n as f64).ln(), v.ln()))
            .unzip();
        let s = theil_sen_slope(&lx, &ly);
        (s, s < 0.0)
    };
    Ok(MzScan { r_exponent: cfg.r_exponent, checkpoints: report.checkpoints, rms_deviation: rms, slope, degenerate, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_kernels::log_singular_spectrum;
    use crate::special_functions::m1_closed;

    fn cp(v: &[f64]) -> ChamberPoint {
        ChamberPoint::from_dominant(v.to_vec())
    }

    #[test]
    fn checkpoint_grid() {
        assert_eq!(checkpoints(1), vec![1]);
        assert_eq!(checkpoints(8), vec![1, 2, 4, 8]);
        assert_eq!(checkpoints(10), vec![1, 2, 4, 8, 10]);
    }

    #[test]
    fn single_step_readout_is_exact() {
        let mut rng = substream(1, 0);
        let x = cp(&[1.5, 0.25, -1.75]);
        let z = sample_biinvariant(&x, &mut rng).unwrap();
        let mut acc = QrAccumulator::new(3, 1);
        acc.push(&z).unwrap();
        let q = acc.readout().unwrap();
        for (a, b) in q.coords().iter().zip(x.coords()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn short_products_match_direct_spectrum() {
        let mut rng = substream(2, 0);
        for d in [2, 3] {
            for period in [1, 3] {
                let x = if d == 2 { cp(&[0.6, -0.6]) } else { cp(&[0.7, -0.1, -0.6]) };
                let mut acc = QrAccumulator::new(d, period);
                let mut direct = UnimodularMatrix::new(ComplexMatrix::identity(d)).unwrap();
                for _ in 0..30 {
                    let z = sample_biinvariant(&x, &mut rng).unwrap();
                    acc.push(&z).unwrap();
                    direct = direct.mul(&z).unwrap();
                }
                let want = log_singular_spectrum(&direct).unwrap();
                let got = acc.readout().unwrap();
                for (a, b) in got.coords().iter().zip(want.coords()) {
                    assert!((a - b).abs() < 1e-6, "{:?} vs {:?}", got.coords(), want.coords());
                }
            }
        }
    }

    #[test]
    fn null_walk_stays_at_zero() {
        let report = run_group_walk(&WalkConfig::point_mass(3, vec![0.0; 3], 64, 2, 3)).unwrap();
        for rep in &report.replicas {
            for q in &rep.trajectory {
                assert!(q.iter().all(|v| v.abs() < 1e-12));
            }
        }
        let mut acc = QrAccumulator::new(2, 1);
        let mut rng = substream(3, 0);
        for _ in 0..10 {
            acc.push(&sample_biinvariant(&ChamberPoint::zero(2), &mut rng).unwrap()).unwrap();
        }
        assert!(acc.log_diag().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn long_walk_does_not_overflow() {
        let mut cfg = WalkConfig::point_mass(3, vec![3.5, 0.0, -3.5], 3000, 1, 4);
        cfg.renorm_period = 4;
        let report = run_group_walk(&cfg).unwrap();
        assert!(report.pass, "{}", report.final_error);
    }

    #[test]
    fn strong_law_rank_one() {
        let report = run_group_walk(&WalkConfig::point_mass(2, vec![0.5, -0.5], 5000, 2, 5)).unwrap();
        assert!((report.limit_c[0] - 0.1565176).abs() < 1e-7);
        assert!(report.pass && report.final_error <= LLN_TOL, "{report:?}");
        let again = run_group_walk(&WalkConfig::point_mass(2, vec![0.5, -0.5], 5000, 2, 5)).unwrap();
        assert_eq!(report, again);
    }

    #[test]
    fn config_validation() {
        let mut cfg = WalkConfig::point_mass(2, vec![0.5, -0.5], 10, 1, 0);
        assert!(cfg.validate().is_ok());
        cfg.r_exponent = 2.0;
        assert!(cfg.validate().is_err());
        let cfg = WalkConfig::point_mass(2, vec![-0.5, 0.5], 10, 1, 0);
        assert!(matches!(cfg.validate(), Err(Error::NotInChamber { .. })));
        let cfg = WalkConfig::point_mass(2, vec![4.0, -4.0], 10, 1, 0);
        assert!(cfg.validate().is_err());
        let json = r#"{"d":2,"mu":[{"point":[0.5,-0.5],"weight":1.0}],"n_steps":5}"#;
        let parsed: WalkConfig = serde_json::from_str(json).unwrap();
        assert_eq!(parsed, WalkConfig::point_mass(2, vec![0.5, -0.5], 5, 1, 0));
    }

    #[test]
    fn rejection_rate_and_mean() {
        let rs = type_a(2).unwrap();
        let x = cp(&[1.0, -1.0]);
        let r = rejection_acceptance(&rs, &x, 40_000, 6).unwrap();
        assert!((r.target - 2f64.sinh() / (2.0 * 2f64.exp())).abs() < 1e-12);
        assert!((r.target - 0.2454).abs() < 1e-4);
        assert!(r.pass, "{r:?}");
        let m1 = m1_closed(&rs, &x).unwrap();
        for i in 0..2 {
            assert!((r.mean_projection[i] - m1.coords()[i]).abs() < 3.0 * r.mean_projection_stderr[i]);
        }
        let z = rejection_acceptance(&rs, &ChamberPoint::zero(2), 100, 6).unwrap();
        assert_eq!(z.rate, 1.0);
        assert!(matches!(
            sample_orbit_weighted(&rs, &cp(&[16.0, -16.0]), &mut substream(0, 0)),
            Err(Error::RejectionInfeasible { .. })
        ));
    }

    #[test]
    fn crosscheck_small() {
        let r = euclidean_walk_crosscheck(&WalkConfig::point_mass(2, vec![0.5, -0.5], 10, 600, 7)).unwrap();
        assert!(r.pass, "{r:?}");
        let r = euclidean_walk_crosscheck(&WalkConfig::point_mass(2, vec![0.0, 0.0], 5, 100, 7)).unwrap();
        assert!(r.pass && r.ks.iter().all(|&k| k == 0.0));
    }

    #[test]
    fn mz_trend() {
        let scan = mz_rate_scan(&WalkConfig::point_mass(2, vec![0.5, -0.5], 2048, 8, 8)).unwrap();
        assert!(scan.pass && scan.slope < 0.0, "{scan:?}");
        let scan = mz_rate_scan(&WalkConfig::point_mass(2, vec![0.0, 0.0], 64, 2, 8)).unwrap();
        assert!(scan.degenerate && scan.pass);
    }
}
