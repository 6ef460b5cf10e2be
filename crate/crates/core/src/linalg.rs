//! Small dense linear algebra: enough for d <= 10 matrix models.
//!
//! Nothing here is blocked or vectorized. The eigensolver is a cyclic complex
//! Jacobi method and singular values come from a one-sided Jacobi sweep over
//! log-scaled rows, which keeps graded products representable.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const JACOBI_MAX_SWEEPS: usize = 30;
const ONE_SIDED_MAX_SWEEPS: usize = 80;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixWire<T> {
    dim: usize,
    data: Vec<T>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixWire { dim: self.dim, data: self.data.iter().map(|z| [z.re, z.im]).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = MatrixWire::<[f64; 2]>::deserialize(d)?;
        if wire.data.len() != wire.dim * wire.dim {
            return Err(serde::de::Error::custom(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                wire.dim * wire.dim,
                wire.dim,
                wire.dim,
                wire.data.len()
            )));
        }
        Ok(ComplexMatrix { dim: wire.dim, data: wire.data.into_iter().map(|[re, im]| Complex64::new(re, im)).collect() })
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix { dim, data: vec![C0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C1;
        }
        m
    }

    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: data.len() });
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim;
        assert_eq!(n, other.dim, "matmul dimension mismatch");
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// `self * diag(d)`.
    pub fn scale_columns(&self, d: &[f64]) -> ComplexMatrix {
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] *= d[j];
            }
        }
        out
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius distance of `U U*` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        self.matmul(&self.adjoint()).sub(&ComplexMatrix::identity(self.dim)).frobenius_norm()
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = C1;
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                return C0;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in (k + 1)..n {
                let f = a[i * n + k] / pivot;
                if f == C0 {
                    continue;
                }
                for j in k..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        det
    }

    /// Householder QR: `self = Q R` with `Q` unitary and `R` upper triangular.
    pub fn qr(&self) -> (ComplexMatrix, ComplexMatrix) {
        let n = self.dim;
        let mut r = self.clone();
        let mut q = ComplexMatrix::identity(n);
        let mut v = vec![C0; n];
        for k in 0..n.saturating_sub(1) {
            let xnorm = (k..n).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            if xnorm == 0.0 {
                continue;
            }
            let x0 = r[(k, k)];
            let phase = if x0.norm() == 0.0 { C1 } else { x0 / x0.norm() };
            let alpha = -phase * xnorm;
            for i in 0..n {
                v[i] = if i < k { C0 } else { r[(i, k)] };
            }
            v[k] -= alpha;
            let vnorm2: f64 = (k..n).map(|i| v[i].norm_sqr()).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            // r <- (I - 2 v v* / |v|^2) r
            for j in k..n {
                let s: Complex64 = (k..n).map(|i| v[i].conj() * r[(i, j)]).sum::<Complex64>() * (2.0 / vnorm2);
                for i in k..n {
                    let t = v[i] * s;
                    r[(i, j)] -= t;
                }
            }
            // q <- q (I - 2 v v* / |v|^2)
            for i in 0..n {
                let s: Complex64 = (k..n).map(|j| q[(i, j)] * v[j]).sum::<Complex64>() * (2.0 / vnorm2);
                for j in k..n {
                    let t = s * v[j].conj();
                    q[(i, j)] -= t;
                }
            }
            for i in (k + 1)..n {
                r[(i, k)] = C0;
            }
        }
        (q, r)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Square real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl Serialize for RealMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixWire { dim: self.dim, data: self.data.iter().map(|&x| [x, 0.0]).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RealMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let c = ComplexMatrix::deserialize(d)?;
        if c.data.iter().any(|z| z.im != 0.0) {
            return Err(serde::de::Error::custom("real matrix has a nonzero imaginary part"));
        }
        Ok(RealMatrix { dim: c.dim, data: c.data.into_iter().map(|z| z.re).collect() })
    }
}

impl RealMatrix {
    pub fn zeros(dim: usize) -> Self {
        RealMatrix { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, other: &RealMatrix) -> RealMatrix {
        let n = self.dim;
        assert_eq!(n, other.dim, "matmul dimension mismatch");
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn orthogonality_defect(&self) -> f64 {
        let mut p = self.matmul(&self.transpose());
        for i in 0..self.dim {
            p[(i, i)] -= 1.0;
        }
        p.frobenius_norm()
    }

    pub fn det(&self) -> f64 {
        self.to_complex().det().re
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    /// Householder QR for real matrices.
    pub fn qr(&self) -> (RealMatrix, RealMatrix) {
        let n = self.dim;
        let mut r = self.clone();
        let mut q = RealMatrix::identity(n);
        let mut v = vec![0.0; n];
        for k in 0..n.saturating_sub(1) {
            let xnorm = (k..n).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
            if xnorm == 0.0 {
                continue;
            }
            let alpha = if r[(k, k)] >= 0.0 { -xnorm } else { xnorm };
            for i in 0..n {
                v[i] = if i < k { 0.0 } else { r[(i, k)] };
            }
            v[k] -= alpha;
            let vnorm2: f64 = (k..n).map(|i| v[i] * v[i]).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            for j in k..n {
                let s = (k..n).map(|i| v[i] * r[(i, j)]).sum::<f64>() * (2.0 / vnorm2);
                for i in k..n {
                    r[(i, j)] -= v[i] * s;
                }
            }
            for i in 0..n {
                let s = (k..n).map(|j| q[(i, j)] * v[j]).sum::<f64>() * (2.0 / vnorm2);
                for j in k..n {
                    q[(i, j)] -= s * v[j];
                }
            }
            for i in (k + 1)..n {
                r[(i, k)] = 0.0;
            }
        }
        (q, r)
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns the (unsorted) eigenvalues and the unitary whose columns are the
/// matching eigenvectors. Converges when the off-diagonal Frobenius mass drops
/// below `1e-14 * |A|_F`.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = a.dim();
    let mut a = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let threshold = 1e-14 * scale;
    let off = |m: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual: off(&a) });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // V = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane
                let vpp = Complex64::new(c, 0.0);
                let vpq = Complex64::new(s, 0.0);
                let vqp = -phase.conj() * s;
                let vqq = phase.conj() * c;
                // A <- A V
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * vpp + aiq * vqp;
                    a[(i, q)] = aip * vpq + aiq * vqq;
                }
                // A <- V* A
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = vpp.conj() * apj + vqp.conj() * aqj;
                    a[(q, j)] = vpq.conj() * apj + vqq.conj() * aqj;
                }
                a[(p, q)] = C0;
                a[(q, p)] = C0;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * vpp + viq * vqp;
                    v[(i, q)] = vip * vpq + viq * vqq;
                }
            }
        }
    }
    Ok(((0..n).map(|i| a[(i, i)].re).collect(), v))
}

/// Rows `e^{log_scale[i]} * rows[i]` of a square matrix, each stored with unit norm.
#[derive(Debug, Clone)]
pub struct GradedRows {
    pub log_scale: Vec<f64>,
    pub rows: Vec<Vec<Complex64>>,
}

impl GradedRows {
    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        let mut g = GradedRows { log_scale: vec![0.0; m.dim()], rows: (0..m.dim()).map(|i| m.row(i).to_vec()).collect() };
        g.normalize()?;
        Ok(g)
    }

    /// Fold the current row norms into `log_scale`.
    pub fn normalize(&mut self) -> Result<()> {
        (0..self.rows.len()).try_for_each(|i| self.normalize_row(i))
    }

    fn normalize_row(&mut self, i: usize) -> Result<()> {
        let row = &mut self.rows[i];
        let nrm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(nrm > 0.0 && nrm.is_finite()) {
            return Err(Error::IllConditioned { log_condition: f64::INFINITY });
        }
        self.log_scale[i] += nrm.ln();
        row.iter_mut().for_each(|z| *z /= nrm);
        Ok(())
    }

    /// Log singular values (unsorted) by one-sided Jacobi on the rows.
    ///
    /// All rotation coefficients are formed relative to the row scales so the
    /// sweep works for matrices whose singular values span far more than the
    /// double exponent range.
    pub fn log_singular_values(mut self) -> Result<Vec<f64>> {
        let n = self.rows.len();
        let tol = 4.0 * f64::EPSILON * n as f64;
        for _sweep in 0..ONE_SIDED_MAX_SWEEPS {
            let mut rotated = false;
            for i in 0..n {
                for j in (i + 1)..n {
                    let g: Complex64 = self.rows[i].iter().zip(&self.rows[j]).map(|(a, b)| a * b.conj()).sum();
                    let gabs = g.norm();
                    if gabs <= tol {
                        continue;
                    }
                    rotated = true;
                    let phase = g / gabs;
                    let delta = self.log_scale[j] - self.log_scale[i];
                    let (c, coef_i, coef_j) = if delta.abs() < 30.0 {
                        let zeta = delta.sinh() / gabs;
                        let t = if zeta == 0.0 { 1.0 } else { zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt()) };
                        let c = 1.0 / (1.0 + t * t).sqrt();
                        let s = c * t;
                        (c, s * delta.exp(), s * (-delta).exp())
                    } else if delta > 0.0 {
                        (1.0, gabs, gabs * (-2.0 * delta).exp())
                    } else {
                        (1.0, -gabs * (2.0 * delta).exp(), -gabs)
                    };
                    let (ri, rj) = (self.rows[i].clone(), &self.rows[j]);
                    let new_i: Vec<Complex64> = ri.iter().zip(rj).map(|(a, b)| a * c - phase * b * coef_i).collect();
                    let new_j: Vec<Complex64> = ri.iter().zip(rj).map(|(a, b)| a * coef_j + phase * b * c).collect();
                    self.rows[i] = new_i;
                    self.rows[j] = new_j;
                    self.normalize_row(i)?;
                    self.normalize_row(j)?;
                }
            }
            if !rotated {
                return Ok(self.log_scale);
            }
        }
        Err(Error::NoConvergence { sweeps: ONE_SIDED_MAX_SWEEPS, residual: f64::NAN })
    }
}

/// Pfaffian of a real antisymmetric matrix (Parlett-Reid style elimination).
pub fn pfaffian(m: &RealMatrix) -> f64 {
    let n = m.dim();
    if n % 2 == 1 {
        return 0.0;
    }
    let mut a = m.clone();
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        let (kp, amax) = ((k + 1)..n)
            .map(|i| (i, a[(i, k)].abs()))
            .fold((k + 1, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if amax == 0.0 {
            return 0.0;
        }
        if kp != k + 1 {
            for j in 0..n {
                let t = a[(k + 1, j)];
                a[(k + 1, j)] = a[(kp, j)];
                a[(kp, j)] = t;
            }
            for i in 0..n {
                let t = a[(i, k + 1)];
                a[(i, k + 1)] = a[(i, kp)];
                a[(i, kp)] = t;
            }
            pf = -pf;
        }
        pf *= a[(k, k + 1)];
        if k + 2 < n {
            let akk1 = a[(k, k + 1)];
            let tau: Vec<f64> = ((k + 2)..n).map(|j| a[(k, j)] / akk1).collect();
            let col: Vec<f64> = ((k + 2)..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in ((k + 2)..n).enumerate() {
                for (jj, j) in ((k + 2)..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}
