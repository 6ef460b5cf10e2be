//! Root data for the classical families A, B, C and D.
//!
//! Vectors live in coordinates on `R^ambient_dim` and are paired with the
//! standard dot product. For type A the ambient space is `R^(rank+1)` and
//! everything of interest sits in the zero-sum hyperplane.

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;
use std::sync::OnceLock;

use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest Weyl group we are willing to enumerate.
pub const WEYL_GUARD: u64 = 1_000_000;

/// Type-A inputs may drift from the zero-sum hyperplane by at most this much.
pub const ZERO_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootFamily {
    A,
    B,
    C,
    D,
}

impl RootFamily {
    pub const ALL: [RootFamily; 4] = [RootFamily::A, RootFamily::B, RootFamily::C, RootFamily::D];

    pub fn min_rank(self) -> usize {
        match self {
            RootFamily::A => 1,
            RootFamily::B => 2,
            RootFamily::C => 3,
            RootFamily::D => 4,
        }
    }

    fn requirement(self) -> &'static str {
        match self {
            RootFamily::A => "A_{d-1} needs rank >= 1 (d >= 2)",
            RootFamily::B => "B_n needs n >= 2 (G = SO(2n+1, C))",
            RootFamily::C => "C_n needs n >= 3 (G = Sp(n, C))",
            RootFamily::D => "D_n needs n >= 4 (G = SO(2n, C))",
        }
    }
}

impl fmt::Display for RootFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RootFamily::A => "A",
            RootFamily::B => "B",
            RootFamily::C => "C",
            RootFamily::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for RootFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(RootFamily::A),
            "B" => Ok(RootFamily::B),
            "C" => Ok(RootFamily::C),
            "D" => Ok(RootFamily::D),
            other => Err(Error::Parse(format!("unknown root family {other:?} (expected A, B, C or D)"))),
        }
    }
}

/// A signed permutation acting on coordinates by
/// `(w.v)[i] = signs[i] * v[perm[i]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeylElement {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
    pub det_sign: i8,
}

impl WeylElement {
    pub fn identity(dim: usize) -> Self {
        WeylElement {
            perm: (0..dim).collect(),
            signs: vec![1; dim],
            det_sign: 1,
        }
    }

    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Self {
        let det_sign = permutation_sign(&perm) * signs.iter().product::<i8>();
        WeylElement { perm, signs, det_sign }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// `w.v` without a dimension check; callers in hot loops validate once.
    #[inline]
    pub fn apply_unchecked<T>(&self, v: &[T]) -> Vec<T>
    where
        T: Copy + Neg<Output = T>,
    {
        self.perm
            .iter()
            .zip(&self.signs)
            .map(|(&p, &s)| if s < 0 { -v[p] } else { v[p] })
            .collect()
    }

    /// `<u, w.v>` without materializing `w.v`.
    #[inline]
    pub fn pair(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, (&p, &s)) in self.perm.iter().zip(&self.signs).enumerate() {
            acc += u[i] * f64::from(s) * v[p];
        }
        acc
    }

    #[inline]
    pub fn pair_complex(&self, u: &[Complex64], v: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (&p, &s)) in self.perm.iter().zip(&self.signs).enumerate() {
            acc += u[i] * (f64::from(s) * v[p]);
        }
        acc
    }
}

fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1i8;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Apply a Weyl element to a vector, checking dimensions.
pub fn apply_weyl<T>(w: &WeylElement, v: &[T]) -> Result<Vec<T>>
where
    T: Copy + Neg<Output = T>,
{
    if v.len() != w.dim() {
        return Err(Error::DimensionMismatch { expected: w.dim(), got: v.len() });
    }
    Ok(w.apply_unchecked(v))
}

/// A dominant vector: an element of the closed chamber `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChamberPoint {
    coords: Vec<f64>,
}

impl ChamberPoint {
    /// Wrap coordinates after checking chamber membership with tolerance `tol`.
    pub fn new(rs: &RootSystem, coords: Vec<f64>, tol: f64) -> Result<Self> {
        rs.check_dim(coords.len())?;
        if !rs.in_chamber(&coords, tol) {
            return Err(Error::NotInChamber { coords });
        }
        Ok(ChamberPoint { coords })
    }

    /// Wrap coordinates that are dominant by construction.
    pub fn from_dominant(coords: Vec<f64>) -> Self {
        ChamberPoint { coords }
    }

    pub fn zero(dim: usize) -> Self {
        ChamberPoint { coords: vec![0.0; dim] }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm2(&self.coords)
    }
}

impl AsRef<[f64]> for ChamberPoint {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

#[derive(Debug, Clone)]
pub struct RootSystem {
    family: RootFamily,
    rank: usize,
    ambient_dim: usize,
    positive_roots: Vec<Vec<f64>>,
    rho: Vec<f64>,
    weyl_order: u64,
    weyl: OnceLock<Vec<WeylElement>>,
}

/// JSON dump of the root data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootData {
    pub family: RootFamily,
    pub rank: usize,
    pub positive_roots: Vec<Vec<f64>>,
    pub rho: Vec<f64>,
    pub weyl_order: u64,
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn unit(dim: usize, i: usize, scale: f64) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = scale;
    v
}

/// Build the positive roots and `rho = sum of positive roots`.
pub fn build_root_system(family: RootFamily, rank: usize) -> Result<RootSystem> {
    if rank < family.min_rank() {
        return Err(Error::RankOutOfBounds { family, rank, requirement: family.requirement() });
    }
    let n = rank;
    let ambient_dim = if family == RootFamily::A { n + 1 } else { n };
    let mut roots = Vec::new();
    for i in 0..ambient_dim {
        for j in (i + 1)..ambient_dim {
            let mut minus = vec![0.0; ambient_dim];
            minus[i] = 1.0;
            minus[j] = -1.0;
            roots.push(minus);
            if family != RootFamily::A {
                let mut plus = vec![0.0; ambient_dim];
                plus[i] = 1.0;
                plus[j] = 1.0;
                roots.push(plus);
            }
        }
    }
    match family {
        RootFamily::B => roots.extend((0..n).map(|i| unit(n, i, 1.0))),
        RootFamily::C => roots.extend((0..n).map(|i| unit(n, i, 2.0))),
        RootFamily::A | RootFamily::D => {}
    }
    let mut rho = vec![0.0; ambient_dim];
    for root in &roots {
        for (r, a) in rho.iter_mut().zip(root) {
            *r += a;
        }
    }
    let weyl_order = match family {
        RootFamily::A => factorial(n + 1),
        RootFamily::B | RootFamily::C => (1u64 << n) * factorial(n),
        RootFamily::D => (1u64 << (n - 1)) * factorial(n),
    };
    Ok(RootSystem {
        family,
        rank,
        ambient_dim,
        positive_roots: roots,
        rho,
        weyl_order,
        weyl: OnceLock::new(),
    })
}

impl RootSystem {
    pub fn family(&self) -> RootFamily {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn positive_roots(&self) -> &[Vec<f64>] {
        &self.positive_roots
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn weyl_order(&self) -> u64 {
        self.weyl_order
    }

    /// Number of positive roots.
    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn root_data(&self) -> RootData {
        RootData {
            family: self.family,
            rank: self.rank,
            positive_roots: self.positive_roots.clone(),
            rho: self.rho.clone(),
            weyl_order: self.weyl_order,
        }
    }

    /// A copy with the first coordinate of `rho` shifted; used by the
    /// self-test mutation run.
    #[doc(hidden)]
    pub fn with_shifted_rho(&self, delta: f64) -> Self {
        let mut out = self.clone();
        out.rho[0] += delta;
        out
    }

    pub fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, got });
        }
        Ok(())
    }

    /// Dimension check plus, for type A, the zero-sum constraint.
    pub fn check_vector(&self, v: &[f64]) -> Result<()> {
        self.check_dim(v.len())?;
        if self.family == RootFamily::A {
            let sum: f64 = v.iter().sum();
            if !(sum.abs() <= ZERO_SUM_TOL) {
                return Err(Error::NotZeroSum { sum });
            }
        }
        Ok(())
    }

    pub fn check_vector_complex(&self, v: &[Complex64]) -> Result<()> {
        self.check_dim(v.len())?;
        if self.family == RootFamily::A {
            let sum: Complex64 = v.iter().sum();
            if !(sum.norm() <= ZERO_SUM_TOL) {
                return Err(Error::NotZeroSum { sum: sum.norm() });
            }
        }
        Ok(())
    }

    /// The Weyl group, enumerated once and cached.
    pub fn weyl(&self) -> Result<&[WeylElement]> {
        if let Some(w) = self.weyl.get() {
            return Ok(w);
        }
        let elements = enumerate_weyl(self)?;
        Ok(self.weyl.get_or_init(|| elements))
    }

    /// Chamber membership with slack `tol`.
    pub fn in_chamber(&self, v: &[f64], tol: f64) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        let descending = v.windows(2).all(|p| p[0] >= p[1] - tol);
        match self.family {
            RootFamily::A => descending && v.iter().sum::<f64>().abs() <= tol.max(ZERO_SUM_TOL),
            RootFamily::B | RootFamily::C => descending && v[v.len() - 1] >= -tol,
            RootFamily::D => {
                let n = v.len();
                v[..n - 1].windows(2).all(|p| p[0] >= p[1] - tol) && v[n - 2] >= v[n - 1].abs() - tol
            }
        }
    }

    /// Smallest `|<alpha, v>|` over the positive roots (distance-to-wall proxy).
    pub fn min_root_pairing(&self, v: &[f64]) -> f64 {
        self.positive_roots
            .iter()
            .map(|a| crate::linalg::dot(a, v).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_root_pairing_complex(&self, v: &[Complex64]) -> f64 {
        self.positive_roots
            .iter()
            .map(|a| a.iter().zip(v).map(|(&x, &y)| y * x).sum::<Complex64>().norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// All elements of the Weyl group as signed permutations. The identity comes first.
pub fn enumerate_weyl(rs: &RootSystem) -> Result<Vec<WeylElement>> {
    if rs.weyl_order > WEYL_GUARD {
        return Err(Error::WeylOrderTooLarge { order: rs.weyl_order, guard: WEYL_GUARD });
    }
    let dim = rs.ambient_dim;
    let perms: Vec<Vec<usize>> = (0..dim).permutations(dim).collect();
    let sign_patterns: Vec<Vec<i8>> = match rs.family {
        RootFamily::A => vec![vec![1; dim]],
        RootFamily::B | RootFamily::C | RootFamily::D => (0u32..(1 << dim))
            .map(|mask| (0..dim).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect::<Vec<i8>>())
            .filter(|s| rs.family != RootFamily::D || s.iter().product::<i8>() == 1)
            .collect(),
    };
    let mut out = Vec::with_capacity(rs.weyl_order as usize);
    for signs in &sign_patterns {
        for perm in &perms {
            out.push(WeylElement::new(perm.clone(), signs.clone()));
        }
    }
    debug_assert_eq!(out.len() as u64, rs.weyl_order);
    Ok(out)
}

/// The unique dominant representative of the W-orbit of `v`.
pub fn chamber_project(rs: &RootSystem, v: &[f64]) -> Result<ChamberPoint> {
    rs.check_dim(v.len())?;
    let mut out: Vec<f64>;
    match rs.family {
        RootFamily::A => {
            let sum: f64 = v.iter().sum();
            if sum.abs() > ZERO_SUM_TOL {
                return Err(Error::NotZeroSum { sum });
            }
            out = v.to_vec();
            if sum != 0.0 {
                let mean = sum / v.len() as f64;
                out.iter_mut().for_each(|c| *c -= mean);
            }
            sort_descending(&mut out);
        }
        RootFamily::B | RootFamily::C => {
            out = v.iter().map(|c| c.abs()).collect();
            sort_descending(&mut out);
        }
        RootFamily::D => {
            let negatives = v.iter().filter(|&&c| c < 0.0).count();
            out = v.iter().map(|c| c.abs()).collect();
            sort_descending(&mut out);
            let last = out.len() - 1;
            if negatives % 2 == 1 && out[last] != 0.0 {
                out[last] = -out[last];
            }
        }
    }
    Ok(ChamberPoint::from_dominant(out))
}

fn sort_descending(v: &mut [f64]) {
    v.sort_by(|a, b| b.total_cmp(a));
}

/// The alternating polynomial `pi(v) = prod_{alpha > 0} <alpha, v>`.
pub fn alt_polynomial(rs: &RootSystem, v: &[Complex64]) -> Result<Complex64> {
    rs.check_dim(v.len())?;
    Ok(rs
        .positive_roots
        .iter()
        .map(|a| a.iter().zip(v).map(|(&x, &y)| y * x).sum::<Complex64>())
        .product())
}

/// `pi` on a real vector.
pub fn alt_polynomial_real(rs: &RootSystem, v: &[f64]) -> f64 {
    rs.positive_roots.iter().map(|a| crate::linalg::dot(a, v)).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rs(f: RootFamily, n: usize) -> RootSystem {
        build_root_system(f, n).unwrap()
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rs(RootFamily::A, 2).rho(), &[2.0, 0.0, -2.0]);
        assert_eq!(rs(RootFamily::B, 2).rho(), &[3.0, 1.0]);
        assert_eq!(rs(RootFamily::C, 3).rho(), &[6.0, 4.0, 2.0]);
        assert_eq!(rs(RootFamily::D, 4).rho(), &[6.0, 4.0, 2.0, 0.0]);
    }

    #[test]
    fn rank_bounds_rejected() {
        for (f, bad) in [(RootFamily::A, 0), (RootFamily::B, 1), (RootFamily::C, 2), (RootFamily::D, 3)] {
            let err = build_root_system(f, bad).unwrap_err();
            assert!(matches!(err, Error::RankOutOfBounds { .. }), "{err}");
            assert!(err.to_string().contains(&format!("family {f}")));
        }
    }

    #[test]
    fn weyl_orders() {
        assert_eq!(enumerate_weyl(&rs(RootFamily::A, 2)).unwrap().len(), 6);
        assert_eq!(enumerate_weyl(&rs(RootFamily::B, 2)).unwrap().len(), 8);
        assert_eq!(enumerate_weyl(&rs(RootFamily::D, 4)).unwrap().len(), 192);
        assert_eq!(enumerate_weyl(&rs(RootFamily::C, 3)).unwrap().len(), 48);
    }

    #[test]
    fn weyl_guard() {
        let big = rs(RootFamily::A, 9);
        assert!(matches!(enumerate_weyl(&big), Err(Error::WeylOrderTooLarge { .. })));
    }

    #[test]
    fn weyl_elements_distinct_with_identity_first() {
        for (f, n) in [(RootFamily::A, 3), (RootFamily::B, 3), (RootFamily::D, 4)] {
            let r = rs(f, n);
            let w = enumerate_weyl(&r).unwrap();
            assert_eq!(w[0], WeylElement::identity(r.ambient_dim()));
            let unique: std::collections::HashSet<_> = w.iter().collect();
            assert_eq!(unique.len(), w.len());
            for e in &w {
                let expect = permutation_sign(&e.perm) * e.signs.iter().product::<i8>();
                assert_eq!(e.det_sign, expect);
                if f == RootFamily::D {
                    assert_eq!(e.signs.iter().product::<i8>(), 1);
                }
            }
        }
    }

    #[test]
    fn det_signs_sum_to_zero() {
        for f in RootFamily::ALL {
            for n in f.min_rank()..f.min_rank() + 2 {
                let w = enumerate_weyl(&rs(f, n)).unwrap();
                assert_eq!(w.iter().map(|e| i64::from(e.det_sign)).sum::<i64>(), 0, "{f}{n}");
            }
        }
    }

    #[test]
    fn apply_examples() {
        let id = WeylElement::identity(3);
        assert_eq!(apply_weyl(&id, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let swap = WeylElement::new(vec![1, 0, 2], vec![1, 1, 1]);
        assert_eq!(swap.det_sign, -1);
        assert_eq!(apply_weyl(&swap, &[5.0, 3.0, -8.0]).unwrap(), vec![3.0, 5.0, -8.0]);
        let flip = WeylElement::new(vec![0, 1], vec![-1, -1]);
        assert_eq!(flip.det_sign, 1);
        assert_eq!(apply_weyl(&flip, &[1.0, 2.0]).unwrap(), vec![-1.0, -2.0]);
        assert!(matches!(apply_weyl(&id, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn project_examples() {
        let a = rs(RootFamily::A, 2);
        assert_eq!(chamber_project(&a, &[-1.0, 2.0, -1.0]).unwrap().coords(), &[2.0, -1.0, -1.0]);
        let b = rs(RootFamily::B, 2);
        assert_eq!(chamber_project(&b, &[-3.0, 1.0]).unwrap().coords(), &[3.0, 1.0]);
        assert!(matches!(chamber_project(&a, &[1.0, 1.0, 1.0]), Err(Error::NotZeroSum { .. })));
        // drift within tolerance is re-centred
        let p = chamber_project(&a, &[1.0 + 3e-10, 0.0, -1.0]).unwrap();
        assert!(p.coords().iter().sum::<f64>().abs() < 1e-15);
    }

    /// Brute force: the orbit element lying in the chamber, found by scanning W.
    fn brute_dominant(r: &RootSystem, v: &[f64]) -> Vec<f64> {
        let w = enumerate_weyl(r).unwrap();
        let mut hits: Vec<Vec<f64>> = w
            .iter()
            .map(|e| e.apply_unchecked(v))
            .filter(|u| r.in_chamber(u, 0.0))
            .collect();
        hits.sort_by(|a, b| a.partial_cmp(b).unwrap());
        hits.dedup();
        assert_eq!(hits.len(), 1, "orbit meets the chamber once: {hits:?}");
        hits.pop().unwrap()
    }

    #[test]
    fn d4_projection_matches_brute_force() {
        let d = rs(RootFamily::D, 4);
        let v = [-1.0, -2.0, -3.0, -5.0];
        let brute = brute_dominant(&d, &v);
        // four sign flips are an even number, so the orbit reaches all-positive
        assert_eq!(brute, vec![5.0, 3.0, 2.0, 1.0]);
        assert_eq!(chamber_project(&d, &v).unwrap().coords(), brute.as_slice());
        let odd = [-1.0, 2.0, 3.0, 5.0];
        assert_eq!(chamber_project(&d, &odd).unwrap().coords(), brute_dominant(&d, &odd).as_slice());
        assert_eq!(brute_dominant(&d, &odd), vec![5.0, 3.0, 2.0, -1.0]);
    }

    #[test]
    fn projection_matches_brute_force_randomly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for f in RootFamily::ALL {
            let r = rs(f, f.min_rank().max(3).min(4));
            for _ in 0..50 {
                let mut v: Vec<f64> = (0..r.ambient_dim()).map(|_| rng.random_range(-3.0..3.0)).collect();
                if f == RootFamily::A {
                    let m = v.iter().sum::<f64>() / v.len() as f64;
                    v.iter_mut().for_each(|c| *c -= m);
                }
                let fast = chamber_project(&r, &v).unwrap();
                let brute = brute_dominant(&r, fast.coords());
                assert_eq!(fast.coords(), brute.as_slice());
                assert!(r.in_chamber(fast.coords(), 0.0));
                let again = chamber_project(&r, fast.coords()).unwrap();
                for (a, b) in again.coords().iter().zip(fast.coords()) {
                    assert!((a - b).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn alt_polynomial_examples() {
        let a = rs(RootFamily::A, 2);
        let rho: Vec<Complex64> = a.rho().iter().map(|&c| Complex64::new(c, 0.0)).collect();
        // independent: pair each constructed root with rho and multiply
        let by_hand: f64 = a.positive_roots().iter().map(|r| r.iter().zip(a.rho()).map(|(x, y)| x * y).sum::<f64>()).product();
        assert_eq!(by_hand, 16.0);
        assert_eq!(alt_polynomial(&a, &rho).unwrap(), Complex64::new(16.0, 0.0));
        let zero = vec![Complex64::new(0.0, 0.0); 3];
        assert_eq!(alt_polynomial(&a, &zero).unwrap().norm(), 0.0);
        let wall: Vec<Complex64> = [1.0, 1.0, -2.0].iter().map(|&c| Complex64::new(c, 0.0)).collect();
        assert_eq!(alt_polynomial(&a, &wall).unwrap().norm(), 0.0);
    }

    #[test]
    fn root_data_json_shape() {
        let json = serde_json::to_value(rs(RootFamily::B, 2).root_data()).unwrap();
        assert_eq!(json["family"], "B");
        assert_eq!(json["rank"], 2);
        assert_eq!(json["weyl_order"], 8);
        assert_eq!(json["rho"], serde_json::json!([3.0, 1.0]));
        assert_eq!(json["positive_roots"].as_array().unwrap().len(), 4);
    }
}
