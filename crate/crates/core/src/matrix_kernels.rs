//! Matrix models: Haar samplers, the spectrum map `p` on Hermitian matrices,
//! the log-singular map `q` on SL(d, C), and orbit samplers for A, B and D.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, pfaffian, ComplexMatrix, GradedRows, RealMatrix};
use crate::root_system::{ChamberPoint, RootFamily, RootSystem};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const UNIMODULAR_TOL: f64 = 1e-8;
/// Largest `ln(sigma_max / sigma_min)` accepted for an explicitly stored matrix.
pub const MAX_LOG_CONDITION: f64 = 34.538_776_394_910_684; // ln 1e15

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed element of U(d), or of SU(d) when `special`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, special: bool, rng: &mut R) -> ComplexMatrix {
    assert!(d >= 1, "haar_unitary needs d >= 1");
    let g = ComplexMatrix::from_row_major(d, (0..d * d).map(|_| complex_gaussian(rng)).collect())
        .expect("d*d entries");
    let (mut q, r) = g.qr();
    for j in 0..d {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { rjj / rjj.norm() };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    if special {
        let theta = q.det().arg();
        q = q.scale(Complex64::from_polar(1.0, -theta / d as f64));
    }
    q
}

/// Haar-distributed element of SO(m).
pub fn haar_orthogonal<R: Rng + ?Sized>(m: usize, rng: &mut R) -> RealMatrix {
    assert!(m >= 1, "haar_orthogonal needs m >= 1");
    let mut g = RealMatrix::zeros(m);
    for i in 0..m {
        for j in 0..m {
            g[(i, j)] = rng.sample(StandardNormal);
        }
    }
    let (mut q, r) = g.qr();
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            for i in 0..m {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if q.det() < 0.0 {
        for i in 0..m {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// `U diag(x) U*`.
pub fn conjugate_diag(u: &ComplexMatrix, x: &[f64]) -> ComplexMatrix {
    u.scale_columns(x).matmul(&u.adjoint())
}

/// The diagonal of `U diag(x) U*`: `sum_j |U_ij|^2 x_j`.
pub fn conjugated_diagonal(u: &ComplexMatrix, x: &[f64]) -> Vec<f64> {
    (0..u.dim()).map(|i| u.row(i).iter().zip(x).map(|(z, &v)| z.norm_sqr() * v).sum()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct HermitianTraceless(ComplexMatrix);

impl HermitianTraceless {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let n = m.dim();
        let scale = m.frobenius_norm().max(1.0);
        for i in 0..n {
            for j in i..n {
                let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
                if dev > HERMITIAN_TOL * scale {
                    return Err(Error::NotHermitianTraceless { reason: format!("entry ({i},{j}) deviates by {dev:e}") });
                }
            }
        }
        let tr = m.trace().norm();
        if tr > TRACE_TOL * scale {
            return Err(Error::NotHermitianTraceless { reason: format!("trace {tr:e}") });
        }
        Ok(HermitianTraceless(m))
    }

    /// Symmetrize and remove the trace; for matrices Hermitian up to rounding.
    pub fn from_rounded(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        let mut h = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            }
        }
        let shift = h.trace().re / n as f64;
        for i in 0..n {
            h[(i, i)] = Complex64::new(h[(i, i)].re - shift, 0.0);
        }
        HermitianTraceless(h)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

impl TryFrom<ComplexMatrix> for HermitianTraceless {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        HermitianTraceless::new(m)
    }
}

impl From<HermitianTraceless> for ComplexMatrix {
    fn from(h: HermitianTraceless) -> ComplexMatrix {
        h.0
    }
}

fn center_descending(mut v: Vec<f64>) -> ChamberPoint {
    v.sort_by(|a, b| b.total_cmp(a));
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|c| *c -= mean);
    ChamberPoint::from_dominant(v)
}

/// `p(A)`: eigenvalues in descending order, re-centred to sum 0.
pub fn hermitian_spectrum(a: &HermitianTraceless) -> Result<ChamberPoint> {
    let (vals, _) = hermitian_eigen(a.matrix())?;
    Ok(center_descending(vals))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct UnimodularMatrix(ComplexMatrix);

impl UnimodularMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let deviation = (m.det() - Complex64::new(1.0, 0.0)).norm();
        if !(deviation <= UNIMODULAR_TOL) {
            return Err(Error::NotUnimodular { deviation });
        }
        Ok(UnimodularMatrix(m))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn mul(&self, other: &UnimodularMatrix) -> Result<UnimodularMatrix> {
        UnimodularMatrix::new(self.0.matmul(&other.0))
    }
}

impl TryFrom<ComplexMatrix> for UnimodularMatrix {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        UnimodularMatrix::new(m)
    }
}

impl From<UnimodularMatrix> for ComplexMatrix {
    fn from(u: UnimodularMatrix) -> ComplexMatrix {
        u.0
    }
}

/// Descending log singular values, closed so the coordinates sum to 0.
pub(crate) fn close_log_spectrum(mut logs: Vec<f64>) -> ChamberPoint {
    logs.sort_by(|a, b| b.total_cmp(a));
    let n = logs.len();
    let head: f64 = logs[..n - 1].iter().sum();
    logs[n - 1] = -head;
    ChamberPoint::from_dominant(logs)
}

/// `q(B)`: descending logs of the singular values of `B`.
pub fn log_singular_spectrum(b: &UnimodularMatrix) -> Result<ChamberPoint> {
    product_log_spectrum(b.matrix())
}

/// As `log_singular_spectrum` for a matrix known to have determinant 1 in
/// exact arithmetic, such as a long product of unimodular factors whose
/// computed determinant has drifted.
pub(crate) fn product_log_spectrum(m: &ComplexMatrix) -> Result<ChamberPoint> {
    let logs = GradedRows::from_matrix(m)?.log_singular_values()?;
    let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    if hi - lo > MAX_LOG_CONDITION {
        return Err(Error::IllConditioned { log_condition: hi - lo });
    }
    Ok(close_log_spectrum(logs))
}

fn check_zero_sum(x: &ChamberPoint) -> Result<()> {
    let sum: f64 = x.coords().iter().sum();
    if sum.abs() > crate::root_system::ZERO_SUM_TOL {
        return Err(Error::NotZeroSum { sum });
    }
    Ok(())
}

/// One biinvariant step `U diag(e^x) V` with independent Haar `U, V` in SU(d).
pub fn sample_biinvariant<R: Rng + ?Sized>(x: &ChamberPoint, rng: &mut R) -> Result<UnimodularMatrix> {
    check_zero_sum(x)?;
    let d = x.dim();
    let u = haar_unitary(d, true, rng);
    let v = haar_unitary(d, true, rng);
    let e: Vec<f64> = x.coords().iter().map(|c| c.exp()).collect();
    UnimodularMatrix::new(u.scale_columns(&e).matmul(&v))
}

/// The block embedding of `x` into so(m): blocks `[[0, x_j], [-x_j, 0]]`,
/// padded with a zero row and column when `m` is odd.
pub fn antisymmetric_embedding(x: &[f64], m: usize) -> RealMatrix {
    let mut e = RealMatrix::zeros(m);
    for (j, &v) in x.iter().enumerate() {
        e[(2 * j, 2 * j + 1)] = v;
        e[(2 * j + 1, 2 * j)] = -v;
    }
    e
}

/// An element of the orbit model for the family's compact group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "matrix", rename_all = "snake_case")]
pub enum OrbitElement {
    Hermitian(HermitianTraceless),
    Antisymmetric(RealMatrix),
}

impl OrbitElement {
    /// Orthogonal projection onto the Cartan subspace, in chamber coordinates.
    pub fn cartan_component(&self) -> Vec<f64> {
        match self {
            OrbitElement::Hermitian(h) => (0..h.dim()).map(|i| h.matrix()[(i, i)].re).collect(),
            OrbitElement::Antisymmetric(a) => (0..a.dim() / 2).map(|j| a[(2 * j, 2 * j + 1)]).collect(),
        }
    }
}

fn orbit_dim(rs: &RootSystem) -> Result<usize> {
    match rs.family() {
        RootFamily::A => Ok(rs.ambient_dim()),
        RootFamily::B => Ok(2 * rs.rank() + 1),
        RootFamily::D => Ok(2 * rs.rank()),
        RootFamily::C => Err(Error::NoMatrixRealization { family: RootFamily::C }),
    }
}

/// `k.x` for Haar-random `k` in SU(d) (A) or SO(m) (B, D).
pub fn sample_orbit<R: Rng + ?Sized>(rs: &RootSystem, x: &ChamberPoint, rng: &mut R) -> Result<OrbitElement> {
    rs.check_dim(x.dim())?;
    let m = orbit_dim(rs)?;
    match rs.family() {
        RootFamily::A => {
            check_zero_sum(x)?;
            let u = haar_unitary(m, true, rng);
            Ok(OrbitElement::Hermitian(HermitianTraceless::from_rounded(&conjugate_diag(&u, x.coords()))))
        }
        _ => {
            let q = haar_orthogonal(m, rng);
            let e = antisymmetric_embedding(x.coords(), m);
            Ok(OrbitElement::Antisymmetric(q.matmul(&e).matmul(&q.transpose())))
        }
    }
}

/// Cartan component of `k.x` for Haar `k`, without forming the full matrix
/// in the A case.
pub fn sample_orbit_projection<R: Rng + ?Sized>(rs: &RootSystem, x: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let m = orbit_dim(rs)?;
    match rs.family() {
        RootFamily::A => Ok(conjugated_diagonal(&haar_unitary(m, false, rng), x)),
        _ => {
            let q = haar_orthogonal(m, rng);
            // (Q E Q^T)_{2j,2j+1} = sum_k x_k (Q_{2j,2k} Q_{2j+1,2k+1} - Q_{2j,2k+1} Q_{2j+1,2k})
            Ok((0..x.len())
                .map(|j| {
                    x.iter()
                        .enumerate()
                        .map(|(k, &v)| {
                            v * (q[(2 * j, 2 * k)] * q[(2 * j + 1, 2 * k + 1)]
                                - q[(2 * j, 2 * k + 1)] * q[(2 * j + 1, 2 * k)])
                        })
                        .sum()
                })
                .collect())
        }
    }
}

/// The chamber point of the orbit through `el`.
pub fn recover_chamber_point(rs: &RootSystem, el: &OrbitElement) -> Result<ChamberPoint> {
    match (rs.family(), el) {
        (RootFamily::A, OrbitElement::Hermitian(h)) => hermitian_spectrum(h),
        (RootFamily::B | RootFamily::D, OrbitElement::Antisymmetric(a)) => {
            let n = rs.rank();
            if a.dim() != orbit_dim(rs)? {
                return Err(Error::DimensionMismatch { expected: orbit_dim(rs)?, got: a.dim() });
            }
            let (mut vals, _) = hermitian_eigen(&a.to_complex().scale(Complex64::new(0.0, 1.0)))?;
            vals.sort_by(|p, q| q.total_cmp(p));
            let mut out: Vec<f64> = vals[..n].iter().map(|v| v.abs()).collect();
            if rs.family() == RootFamily::D && pfaffian(a) < 0.0 {
                out[n - 1] = -out[n - 1];
            }
            Ok(ChamberPoint::from_dominant(out))
        }
        (RootFamily::C, _) => Err(Error::NoMatrixRealization { family: RootFamily::C }),
        _ => Err(Error::InvalidConfig("orbit element does not match the root family".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use crate::root_system::build_root_system;
    use crate::stats::VecMoments;

    #[test]
    fn haar_unitary_contracts() {
        let mut rng = substream(1, 0);
        for d in 2..=6 {
            for _ in 0..50 {
                let u = haar_unitary(d, true, &mut rng);
                assert!(u.unitarity_defect() < 1e-12);
                assert!((u.det() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn haar_unitary_first_moment() {
        let d = 3;
        let fixed = haar_unitary(d, false, &mut substream(77, 0));
        for seed in [3u64, 4] {
            let mut rng = substream(seed, 0);
            let mut m = VecMoments::new(2);
            for _ in 0..100_000 {
                let u = haar_unitary(d, false, &mut rng);
                let vu = fixed.matmul(&u);
                m.push(&[u[(0, 0)].norm_sqr(), vu[(0, 0)].norm_sqr()]);
            }
            for k in 0..2 {
                assert!((m.mean[k] - 1.0 / d as f64).abs() < 3.0 * m.stderr()[k] + 1e-12, "{:?}", m.mean);
            }
        }
    }

    #[test]
    fn haar_orthogonal_contracts() {
        let mut rng = substream(2, 0);
        let m = 5;
        let mut mom = VecMoments::new(1);
        for _ in 0..100_000 {
            let q = haar_orthogonal(m, &mut rng);
            mom.push(&[q[(0, 0)] * q[(0, 0)]]);
        }
        assert!((mom.mean[0] - 0.2).abs() < 3.0 * mom.stderr()[0]);
        for _ in 0..100 {
            let q = haar_orthogonal(m, &mut rng);
            assert!(q.orthogonality_defect() < 1e-12);
            assert!((q.det() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn spectrum_examples() {
        let a = HermitianTraceless::new(ComplexMatrix::from_real_diag(&[-1.0, 2.0, -1.0])).unwrap();
        assert_eq!(hermitian_spectrum(&a).unwrap().coords(), &[2.0, -1.0, -1.0]);
        let mut rng = substream(3, 0);
        for _ in 0..100 {
            let u = haar_unitary(3, true, &mut rng);
            let h = HermitianTraceless::from_rounded(&conjugate_diag(&u, &[1.0, 0.0, -1.0]));
            let p = hermitian_spectrum(&h).unwrap();
            for (a, b) in p.coords().iter().zip([1.0, 0.0, -1.0]) {
                assert!((a - b).abs() < 1e-10);
            }
        }
        assert!(HermitianTraceless::new(ComplexMatrix::from_real_diag(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn spectrum_is_homogeneous() {
        let mut rng = substream(4, 0);
        for i in 0..100 {
            let t = 0.1 + 0.1 * i as f64;
            let u = haar_unitary(4, false, &mut rng);
            let x = [1.3, 0.2, -0.4, -1.1];
            let a = HermitianTraceless::from_rounded(&conjugate_diag(&u, &x));
            let ta = HermitianTraceless::from_rounded(&a.matrix().scale(Complex64::new(t, 0.0)));
            let p = hermitian_spectrum(&a).unwrap();
            let pt = hermitian_spectrum(&ta).unwrap();
            for (a, b) in p.coords().iter().zip(pt.coords()) {
                assert!((t * a - b).abs() < 1e-10 * t.max(1.0));
            }
        }
    }

    #[test]
    fn log_singular_examples() {
        let id = UnimodularMatrix::new(ComplexMatrix::identity(4)).unwrap();
        assert!(log_singular_spectrum(&id).unwrap().coords().iter().all(|c| c.abs() < 1e-15));
        let b = UnimodularMatrix::new(ComplexMatrix::from_real_diag(&[1f64.exp(), (-1f64).exp()])).unwrap();
        let q = log_singular_spectrum(&b).unwrap();
        assert!((q.coords()[0] - 1.0).abs() < 1e-14 && (q.coords()[1] + 1.0).abs() < 1e-14);
        let mut rng = substream(5, 0);
        for _ in 0..200 {
            let x = ChamberPoint::from_dominant(vec![2.5, 0.5, -0.25, -2.75]);
            let z = sample_biinvariant(&x, &mut rng).unwrap();
            let q = log_singular_spectrum(&z).unwrap();
            for (a, b) in q.coords().iter().zip(x.coords()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
        let huge = ComplexMatrix::from_real_diag(&[20f64.exp(), (-20f64).exp()]);
        assert!(matches!(
            log_singular_spectrum(&UnimodularMatrix::new(huge).unwrap()),
            Err(Error::IllConditioned { .. })
        ));
        assert!(UnimodularMatrix::new(ComplexMatrix::from_real_diag(&[2.0, 1.0])).is_err());
    }

    #[test]
    fn biinvariance_moment() {
        let x = ChamberPoint::from_dominant(vec![0.5, 0.0, -0.5]);
        let k = haar_unitary(3, true, &mut substream(99, 0));
        let mut means = Vec::new();
        for seed in [6u64, 7] {
            let mut rng = substream(seed, 0);
            let mut m = VecMoments::new(2);
            for _ in 0..50_000 {
                let z = sample_biinvariant(&x, &mut rng).unwrap();
                let kz = k.matmul(z.matrix());
                m.push(&[z.matrix()[(0, 0)].norm_sqr(), kz[(0, 0)].norm_sqr()]);
            }
            let se = m.stderr();
            assert!((m.mean[0] - m.mean[1]).abs() < 3.0 * (se[0] + se[1]));
            means.push((m.mean[0], se[0]));
        }
        assert!((means[0].0 - means[1].0).abs() < 3.0 * (means[0].1 + means[1].1));
    }

    #[test]
    fn submultiplicative_top_singular_value() {
        let mut rng = substream(8, 0);
        for _ in 0..1000 {
            let x = ChamberPoint::from_dominant(vec![1.0, 0.2, -1.2]);
            let y = ChamberPoint::from_dominant(vec![0.7, -0.1, -0.6]);
            let b1 = sample_biinvariant(&x, &mut rng).unwrap();
            let b2 = sample_biinvariant(&y, &mut rng).unwrap();
            let q = log_singular_spectrum(&b1.mul(&b2).unwrap()).unwrap();
            assert!(q.coords()[0] <= 1.7 + 1e-12);
        }
    }

    #[test]
    fn orbit_recovery() {
        let mut rng = substream(9, 0);
        let cases: [(RootFamily, usize, Vec<f64>); 4] = [
            (RootFamily::A, 2, vec![1.0, 0.0, -1.0]),
            (RootFamily::B, 2, vec![2.0, 1.0]),
            (RootFamily::D, 4, vec![3.0, 2.0, 1.0, -0.5]),
            (RootFamily::D, 4, vec![3.0, 2.0, 1.0, 0.5]),
        ];
        for (f, n, x) in cases {
            let rs = build_root_system(f, n).unwrap();
            let xp = ChamberPoint::new(&rs, x.clone(), 0.0).unwrap();
            for _ in 0..1000 {
                let el = sample_orbit(&rs, &xp, &mut rng).unwrap();
                let back = recover_chamber_point(&rs, &el).unwrap();
                for (a, b) in back.coords().iter().zip(&x) {
                    assert!((a - b).abs() < 1e-10, "{f}{n}: {:?} vs {x:?}", back.coords());
                }
            }
        }
        let c = build_root_system(RootFamily::C, 3).unwrap();
        assert!(matches!(
            sample_orbit(&c, &ChamberPoint::zero(3), &mut rng),
            Err(Error::NoMatrixRealization { .. })
        ));
    }

    #[test]
    fn b2_embedding_spectrum() {
        let e = antisymmetric_embedding(&[2.0, 1.0], 5);
        let (mut vals, _) = hermitian_eigen(&e.to_complex().scale(Complex64::new(0.0, 1.0))).unwrap();
        vals.sort_by(|a, b| b.total_cmp(a));
        let want = [2.0, 1.0, 0.0, -1.0, -2.0];
        for (a, b) in vals.iter().zip(want) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn projection_shortcut_matches_matrix() {
        for (f, n) in [(RootFamily::B, 3), (RootFamily::D, 4)] {
            let rs = build_root_system(f, n).unwrap();
            let x = vec![2.0, 1.0, 0.5, 0.25][..n].to_vec();
            let el = sample_orbit(&rs, &ChamberPoint::from_dominant(x.clone()), &mut substream(10, 0)).unwrap();
            let fast = sample_orbit_projection(&rs, &x, &mut substream(10, 0)).unwrap();
            for (a, b) in el.cartan_component().iter().zip(&fast) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let h = HermitianTraceless::new(ComplexMatrix::from_real_diag(&[1.0, -1.0])).unwrap();
        let s = serde_json::to_string(&OrbitElement::Hermitian(h.clone())).unwrap();
        let back: OrbitElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, OrbitElement::Hermitian(h));
        assert!(serde_json::from_str::<HermitianTraceless>(r#"{"dim":1,"data":[[1.0,0.0]]}"#).is_err());
    }
}
