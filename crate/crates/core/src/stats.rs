//! Sample statistics used by the Monte-Carlo checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::dist2;

/// Running mean and variance of a vector-valued sample (Welford / Chan).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecMoments {
    pub count: u64,
    pub mean: Vec<f64>,
    m2: Vec<f64>,
}

impl VecMoments {
    pub fn new(dim: usize) -> Self {
        VecMoments { count: 0, mean: vec![0.0; dim], m2: vec![0.0; dim] }
    }

    pub fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let d = v - *m;
            *m += d / n;
            *s += d * (v - *m);
        }
    }

    pub fn merge(mut self, other: VecMoments) -> VecMoments {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return other;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * nb / n;
            self.m2[i] += other.m2[i] + d * d * na * nb / n;
        }
        self.count += other.count;
        self
    }

    pub fn variance(&self) -> Vec<f64> {
        let denom = (self.count.max(2) - 1) as f64;
        self.m2.iter().map(|s| s / denom).collect()
    }

    /// Standard error of each mean coordinate.
    pub fn stderr(&self) -> Vec<f64> {
        let n = self.count.max(1) as f64;
        self.variance().into_iter().map(|v| (v / n).sqrt()).collect()
    }
}

/// Two-sided two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic critical value of the two-sample KS statistic at level `alpha`.
pub fn ks_critical(alpha: f64, n: usize, m: usize) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Directed Hausdorff distance `sup_{a in A} inf_{b in B} |a - b|`.
pub fn directed_hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.par_iter()
        .map(|p| b.iter().map(|q| dist2(p, q)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
}

pub fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// Theil-Sen estimator: median of pairwise slopes.
pub fn theil_sen_slope(x: &[f64], y: &[f64]) -> f64 {
    let mut slopes = Vec::new();
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            if x[j] != x[i] {
                slopes.push((y[j] - y[i]) / (x[j] - x[i]));
            }
        }
    }
    median(&mut slopes)
}

pub fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}
