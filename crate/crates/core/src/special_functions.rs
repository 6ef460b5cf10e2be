//! Semicharacter, spherical functions and the modified moment function.
//!
//! Everything reduces to the alternating exponential sum
//! `F(mu; x) = sum_w det(w) e^{<mu, w x>}`. For small arguments the sum is
//! expanded in powers, dropping the terms of degree below the number of
//! positive roots (they cancel identically); otherwise it is accumulated with
//! a max shift.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::logsum::{accurate_dot, log_sinhc, CompensatedSum, ScaledComplex};
use crate::matrix_kernels::sample_orbit_projection;
use crate::rng::run_blocks;
use crate::root_system::{alt_polynomial, alt_polynomial_real, ChamberPoint, RootFamily, RootSystem};
use crate::stats::VecMoments;

pub const WALL_EPS: f64 = 1e-8;
pub const WALL_PERTURBATION: f64 = 1e-5;
const WALL_SEED: u64 = 0x5eed_0f_3a11;
const MEASURE_TOL: f64 = 1e-12;

const C0: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalValue {
    pub value: Complex64,
    pub regularized: bool,
    pub est_abs_error: f64,
}

impl SphericalValue {
    fn exact(value: Complex64) -> Self {
        SphericalValue { value, regularized: false, est_abs_error: 0.0 }
    }
}

fn series_cutoff(npos: usize) -> f64 {
    // below this the dropped low-order terms dominate the rounding error
    let log_fact: f64 = (1..=npos).map(|k| (k as f64).ln()).sum();
    (log_fact / npos.max(1) as f64).exp().max(2.0)
}

#[derive(Default, Clone, Copy)]
struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    fn value(self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `<mu, w x>` for every `w`, rounded independently of coordinate order.
fn weyl_pairings(rs: &RootSystem, mu: &[Complex64], x: &[f64]) -> Result<Vec<Complex64>> {
    let re: Vec<f64> = mu.iter().map(|z| z.re).collect();
    let im: Vec<f64> = mu.iter().map(|z| z.im).collect();
    let real = im.iter().all(|&v| v == 0.0);
    Ok(rs
        .weyl()?
        .iter()
        .map(|w| {
            let img = w.apply_unchecked(x);
            Complex64::new(accurate_dot(&re, &img), if real { 0.0 } else { accurate_dot(&im, &img) })
        })
        .collect())
}

/// `F(mu; x)` as a scaled complex number.
pub(crate) fn alternating_sum(rs: &RootSystem, mu: &[Complex64], x: &[f64]) -> Result<ScaledComplex> {
    let weyl = rs.weyl()?;
    let t = weyl_pairings(rs, mu, x)?;
    let s = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if s == 0.0 {
        return Ok(ScaledComplex { mantissa: C0, log_scale: 0.0 });
    }
    let npos = rs.num_positive_roots();
    if s <= series_cutoff(npos) {
        let u: Vec<Complex64> = t.iter().map(|z| z / s).collect();
        let mut pow = vec![Complex64::new(1.0, 0.0); u.len()];
        let mut coef = 1.0 / (1..=npos).map(|k| k as f64).product::<f64>();
        let mut sum = C0;
        let order = weyl.len() as f64;
        for k in 0.. {
            if k >= npos {
                let mut p = ComplexSum::default();
                weyl.iter().zip(&pow).for_each(|(w, z)| p.add(z * f64::from(w.det_sign)));
                sum += p.value() * coef;
                let bound = coef * order;
                if k > npos + 2 && (bound <= 1e-18 * sum.norm() || bound < 1e-300) || k > npos + 400 {
                    break;
                }
                coef *= s / (k + 1) as f64;
            }
            pow.iter_mut().zip(&u).for_each(|(p, z)| *p *= z);
        }
        Ok(ScaledComplex { mantissa: sum, log_scale: npos as f64 * s.ln() })
    } else {
        let shift = t.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let mut sum = ComplexSum::default();
        weyl.iter().zip(&t).for_each(|(w, z)| sum.add((z - shift).exp() * f64::from(w.det_sign)));
        Ok(ScaledComplex { mantissa: sum.value(), log_scale: shift })
    }
}

/// `sum_w det(w) e^{<mu, wx>} wx / F(mu; x)` for real `mu`.
fn alternating_gradient_ratio(rs: &RootSystem, mu: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let weyl = rs.weyl()?;
    let dim = x.len();
    let t: Vec<f64> = weyl.iter().map(|w| accurate_dot(mu, &w.apply_unchecked(x))).collect();
    let s = t.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let npos = rs.num_positive_roots();
    let images: Vec<Vec<f64>> = weyl.iter().map(|w| w.apply_unchecked(x)).collect();
    let mut num = vec![0.0; dim];
    let den;
    if s <= series_cutoff(npos) {
        let u: Vec<f64> = t.iter().map(|v| v / s).collect();
        let mut pow = vec![1.0; u.len()];
        // coef_p = s^{k-N}/k!, coef_q = s^{k-N}/(k-1)!
        let fact_n: f64 = (1..=npos).map(|k| k as f64).product();
        let mut coef_p = 1.0 / fact_n;
        let mut coef_q = npos as f64 / fact_n;
        let mut p_sum = 0.0;
        let order = weyl.len() as f64;
        let mut k = npos;
        let max_norm = crate::linalg::norm2(x);
        // start at u^{N-1}
        for _ in 0..npos.saturating_sub(1) {
            pow.iter_mut().zip(&u).for_each(|(p, z)| *p *= z);
        }
        loop {
            // pow holds u^{k-1}
            for ((w, img), q) in weyl.iter().zip(&images).zip(&pow) {
                let c = f64::from(w.det_sign) * q * coef_q;
                num.iter_mut().zip(img).for_each(|(n, v)| *n += c * v);
            }
            pow.iter_mut().zip(&u).for_each(|(p, z)| *p *= z);
            let mut p = CompensatedSum::default();
            weyl.iter().zip(&pow).for_each(|(w, z)| p.add(z * f64::from(w.det_sign)));
            p_sum += p.value() * coef_p;
            let bound = coef_q * order * max_norm.max(1.0);
            if k > npos + 2 && (bound <= 1e-18 * p_sum.abs() || bound < 1e-300) || k > npos + 400 {
                break;
            }
            coef_q *= s / k as f64;
            coef_p *= s / (k + 1) as f64;
            k += 1;
        }
        num.iter_mut().for_each(|n| *n /= s);
        den = p_sum;
    } else {
        let shift = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut d = CompensatedSum::default();
        let mut acc = vec![CompensatedSum::default(); dim];
        for ((w, img), tv) in weyl.iter().zip(&images).zip(&t) {
            let e = f64::from(w.det_sign) * (tv - shift).exp();
            d.add(e);
            acc.iter_mut().zip(img).for_each(|(n, v)| n.add(e * v));
        }
        num = acc.into_iter().map(CompensatedSum::value).collect();
        den = d.value();
    }
    Ok(num.into_iter().map(|n| n / den).collect())
}

/// `ln psi_{-i rho}(x) = sum_{alpha > 0} ln(sinh<alpha,x> / <alpha,x>)`.
pub fn log_semicharacter(rs: &RootSystem, x: &[f64]) -> Result<f64> {
    rs.check_vector(x)?;
    Ok(rs.positive_roots().iter().map(|a| log_sinhc(dot(a, x))).sum())
}

pub fn semicharacter(rs: &RootSystem, x: &[f64]) -> Result<f64> {
    Ok(log_semicharacter(rs, x)?.exp())
}

fn half_rho(rs: &RootSystem) -> Vec<f64> {
    rs.rho().iter().map(|r| 0.5 * r).collect()
}

fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&r| Complex64::new(r, 0.0)).collect()
}

fn times_i(v: &[Complex64]) -> Vec<Complex64> {
    v.iter().map(|z| z * Complex64::i()).collect()
}

fn psi_regular(rs: &RootSystem, lambda: &[Complex64], x: &[f64]) -> Result<Complex64> {
    let il = times_i(lambda);
    let f = alternating_sum(rs, &il, x)?;
    let norm = alt_polynomial_real(rs, &half_rho(rs));
    let denom = alt_polynomial_real(rs, x) * alt_polynomial(rs, &il)?;
    Ok((f.mantissa * norm / denom) * f.log_scale.exp())
}

fn phi_regular(rs: &RootSystem, lambda: &[Complex64], x: &[f64]) -> Result<Complex64> {
    let il = times_i(lambda);
    let top = alternating_sum(rs, &il, x)?;
    let bottom = alternating_sum(rs, &to_complex(rs.rho()), x)?;
    let ratio = alt_polynomial_real(rs, rs.rho()) / alt_polynomial(rs, &il)?;
    Ok(top.mantissa / bottom.mantissa * ratio * (top.log_scale - bottom.log_scale).exp())
}

/// Four deterministic perturbations `v +- delta_1`, `v +- delta_2`.
fn perturbations(rs: &RootSystem, v: &[f64], tag: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(WALL_SEED ^ tag);
    let mut out = Vec::with_capacity(4);
    for _ in 0..2 {
        let mut d: Vec<f64> = (0..v.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
        if rs.family() == RootFamily::A {
            let mean = d.iter().sum::<f64>() / d.len() as f64;
            d.iter_mut().for_each(|c| *c -= mean);
        }
        let n = crate::linalg::norm2(&d);
        d.iter_mut().for_each(|c| *c *= WALL_PERTURBATION / n);
        out.push(v.iter().zip(&d).map(|(a, b)| a + b).collect());
        out.push(v.iter().zip(&d).map(|(a, b)| a - b).collect());
    }
    out
}

fn average(values: &[Complex64]) -> SphericalValue {
    let n = values.len() as f64;
    let mean: Complex64 = values.iter().sum::<Complex64>() / n;
    let spread = (values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n - 1.0)).sqrt();
    SphericalValue { value: mean, regularized: true, est_abs_error: spread }
}

fn evaluate_with_fallback<F>(rs: &RootSystem, lambda: &[Complex64], x: &[f64], f: F) -> Result<SphericalValue>
where
    F: Fn(&RootSystem, &[Complex64], &[f64]) -> Result<Complex64>,
{
    let x_wall = rs.min_root_pairing(x) < WALL_EPS;
    let l_wall = rs.min_root_pairing_complex(lambda) < WALL_EPS;
    if !x_wall && !l_wall {
        return Ok(SphericalValue::exact(f(rs, lambda, x)?));
    }
    let xs = if x_wall { perturbations(rs, x, 1) } else { vec![x.to_vec(); 4] };
    let ls: Vec<Vec<Complex64>> = if l_wall {
        let re: Vec<f64> = lambda.iter().map(|z| z.re).collect();
        perturbations(rs, &re, 2)
            .into_iter()
            .map(|p| p.iter().zip(lambda).map(|(r, z)| Complex64::new(*r, z.im)).collect())
            .collect()
    } else {
        vec![lambda.to_vec(); 4]
    };
    let values = xs.iter().zip(&ls).map(|(xv, lv)| f(rs, lv, xv)).collect::<Result<Vec<_>>>()?;
    Ok(average(&values))
}

/// Euclidean spherical function `psi_lambda(x)`.
pub fn spherical_psi(rs: &RootSystem, lambda: &[Complex64], x: &[f64]) -> Result<SphericalValue> {
    rs.check_vector_complex(lambda)?;
    rs.check_vector(x)?;
    if x.iter().all(|&c| c == 0.0) || lambda.iter().all(|z| z.norm() == 0.0) {
        return Ok(SphericalValue::exact(Complex64::new(1.0, 0.0)));
    }
    evaluate_with_fallback(rs, lambda, x, psi_regular)
}

/// Group spherical function `phi_lambda(x)`.
pub fn spherical_phi(rs: &RootSystem, lambda: &[Complex64], x: &[f64]) -> Result<SphericalValue> {
    rs.check_vector_complex(lambda)?;
    rs.check_vector(x)?;
    if x.iter().all(|&c| c == 0.0) {
        return Ok(SphericalValue::exact(Complex64::new(1.0, 0.0)));
    }
    evaluate_with_fallback(rs, lambda, x, phi_regular)
}

pub fn spherical_psi_real(rs: &RootSystem, lambda: &[f64], x: &[f64]) -> Result<SphericalValue> {
    spherical_psi(rs, &to_complex(lambda), x)
}

pub fn spherical_phi_real(rs: &RootSystem, lambda: &[f64], x: &[f64]) -> Result<SphericalValue> {
    spherical_phi(rs, &to_complex(lambda), x)
}

fn m1_regular(rs: &RootSystem, x: &[f64]) -> Result<Vec<f64>> {
    let mut g = alternating_gradient_ratio(rs, rs.rho(), x)?;
    for a in rs.positive_roots() {
        let c = 1.0 / dot(a, rs.rho());
        g.iter_mut().zip(a).for_each(|(v, ai)| *v -= c * ai);
    }
    Ok(g)
}

/// Modified moment function `m_1(x)`.
pub fn m1_closed(rs: &RootSystem, x: &ChamberPoint) -> Result<ChamberPoint> {
    rs.check_dim(x.dim())?;
    let xv = x.coords();
    if x.is_zero() {
        return Ok(ChamberPoint::zero(x.dim()));
    }
    if rs.min_root_pairing(xv) >= WALL_EPS {
        return Ok(ChamberPoint::from_dominant(m1_regular(rs, xv)?));
    }
    let samples = perturbations(rs, xv, 3)
        .iter()
        .map(|p| crate::root_system::chamber_project(rs, p).and_then(|c| m1_regular(rs, c.coords())))
        .collect::<Result<Vec<_>>>()?;
    let mut mean = vec![0.0; xv.len()];
    for s in &samples {
        mean.iter_mut().zip(s).for_each(|(m, v)| *m += v / samples.len() as f64);
    }
    Ok(ChamberPoint::from_dominant(mean))
}

/// `sum_i w_i m_1(x_i)` for a finitely supported probability measure.
pub fn m1_expectation(rs: &RootSystem, atoms: &[(ChamberPoint, f64)]) -> Result<Vec<f64>> {
    check_weights(atoms.iter().map(|a| a.1))?;
    let mut out = vec![0.0; rs.ambient_dim()];
    for (x, w) in atoms {
        let m = m1_closed(rs, x)?;
        out.iter_mut().zip(m.coords()).for_each(|(o, v)| *o += w * v);
    }
    Ok(out)
}

pub(crate) fn check_weights(weights: impl Iterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    for w in weights {
        if !(w >= 0.0) {
            return Err(Error::NotNormalized { total: f64::NAN });
        }
        total += w;
    }
    if (total - 1.0).abs() > MEASURE_TOL {
        return Err(Error::NotNormalized { total });
    }
    Ok(())
}

/// Monte-Carlo estimate with standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate<T> {
    pub mean: T,
    pub stderr: T,
    pub n: usize,
}

impl McEstimate<Complex64> {
    /// `sqrt((var_re + var_im) / n)`.
    pub fn abs_stderr(&self) -> f64 {
        self.stderr.norm()
    }
}

/// Haar average of `e^{i<lambda, k.x>}` over the compact group.
pub fn psi_mc(rs: &RootSystem, lambda: &[f64], x: &[f64], n: usize, seed: u64) -> Result<McEstimate<Complex64>> {
    rs.check_vector(lambda)?;
    rs.check_vector(x)?;
    let m = orbit_moments(rs, x, n, seed, 2, |y, out| {
        let z = Complex64::from_polar(1.0, dot(lambda, y));
        out[0] = z.re;
        out[1] = z.im;
    })?;
    let se = m.stderr();
    Ok(McEstimate { mean: Complex64::new(m.mean[0], m.mean[1]), stderr: Complex64::new(se[0], se[1]), n })
}

/// Haar average of `e^{<rho, k.x>}`.
pub fn semicharacter_mc(rs: &RootSystem, x: &[f64], n: usize, seed: u64) -> Result<McEstimate<f64>> {
    rs.check_dim(x.len())?;
    let m = orbit_moments(rs, x, n, seed, 1, |y, out| out[0] = dot(rs.rho(), y).exp())?;
    Ok(McEstimate { mean: m.mean[0], stderr: m.stderr()[0], n })
}

/// Haar average of `k.x e^{<rho, k.x>}` divided by the semicharacter.
pub fn m1_mc(rs: &RootSystem, x: &ChamberPoint, n: usize, seed: u64) -> Result<McEstimate<Vec<f64>>> {
    rs.check_dim(x.dim())?;
    let log_norm = log_semicharacter(rs, x.coords())?;
    let m = orbit_moments(rs, x.coords(), n, seed, x.dim(), |y, out| {
        let w = (dot(rs.rho(), y) - log_norm).exp();
        out.iter_mut().zip(y).for_each(|(o, v)| *o = w * v);
    })?;
    Ok(McEstimate { stderr: m.stderr(), mean: m.mean, n })
}

fn orbit_moments<F>(rs: &RootSystem, x: &[f64], n: usize, seed: u64, width: usize, f: F) -> Result<VecMoments>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    if rs.family() == RootFamily::C {
        return Err(Error::NoMatrixRealization { family: RootFamily::C });
    }
    if n == 0 {
        return Err(Error::TooFewSamples { n, min: 1 });
    }
    run_blocks(
        n,
        seed,
        |rng, count| -> Result<VecMoments> {
            let mut m = VecMoments::new(width);
            let mut buf = vec![0.0; width];
            for _ in 0..count {
                let y = sample_orbit_projection(rs, x, rng)?;
                f(&y, &mut buf);
                m.push(&buf);
            }
            Ok(m)
        },
        |a, b| Ok(a?.merge(b?)),
    )
    .expect("n > 0")
}
