//! Overflow-safe accumulation of alternating exponential sums.

use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `sign * e^{log_magnitude}`; `log_magnitude` is ignored when `sign == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedLogValue {
    pub sign: i8,
    pub log_magnitude: f64,
}

impl SignedLogValue {
    pub const ZERO: SignedLogValue = SignedLogValue { sign: 0, log_magnitude: f64::NEG_INFINITY };
    pub const ONE: SignedLogValue = SignedLogValue { sign: 1, log_magnitude: 0.0 };

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            SignedLogValue { sign: if v > 0.0 { 1 } else { -1 }, log_magnitude: v.abs().ln() }
        }
    }

    /// `sign * e^{log}` for an exponent known only in log form.
    pub fn exp_signed(sign: i8, log: f64) -> Self {
        if sign == 0 {
            Self::ZERO
        } else {
            SignedLogValue { sign, log_magnitude: log }
        }
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_magnitude.exp()
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        SignedLogValue { sign: self.sign, log_magnitude: -self.log_magnitude }
    }

    pub fn div(self, other: Self) -> Self {
        self * other.recip()
    }
}

impl Mul for SignedLogValue {
    type Output = SignedLogValue;
    fn mul(self, rhs: SignedLogValue) -> SignedLogValue {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        SignedLogValue { sign: self.sign * rhs.sign, log_magnitude: self.log_magnitude + rhs.log_magnitude }
    }
}

/// Sign-aware log-sum-exp with a running max shift.
#[derive(Debug, Clone, Copy)]
pub struct SignedLogSum {
    shift: f64,
    acc: f64,
}

impl Default for SignedLogSum {
    fn default() -> Self {
        SignedLogSum { shift: f64::NEG_INFINITY, acc: 0.0 }
    }
}

impl SignedLogSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: SignedLogValue) {
        if term.sign == 0 {
            return;
        }
        let l = term.log_magnitude;
        if l > self.shift {
            self.acc = self.acc * (self.shift - l).exp() + f64::from(term.sign);
            self.shift = l;
        } else {
            self.acc += f64::from(term.sign) * (l - self.shift).exp();
        }
    }

    pub fn value(&self) -> SignedLogValue {
        if self.acc == 0.0 || self.shift == f64::NEG_INFINITY {
            return SignedLogValue::ZERO;
        }
        SignedLogValue { sign: if self.acc > 0.0 { 1 } else { -1 }, log_magnitude: self.shift + self.acc.abs().ln() }
    }
}

/// Complex value `mantissa * e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl ScaledComplex {
    pub fn to_complex(self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }

    /// `ln |value|`.
    pub fn log_abs(self) -> f64 {
        self.log_scale + self.mantissa.norm().ln()
    }

    /// `value / |value|`.
    pub fn phase(self) -> Complex64 {
        let n = self.mantissa.norm();
        if n == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.mantissa / n
        }
    }
}

/// Neumaier summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(self) -> f64 {
        self.sum + self.comp
    }
}

/// Dot product with exact products and compensated accumulation.
pub fn accurate_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = CompensatedSum::default();
    for (&x, &y) in a.iter().zip(b) {
        let p = x * y;
        acc.add(p);
        acc.add(x.mul_add(y, -p));
    }
    acc.value()
}

/// `ln(sinh(t) / t)`, even in `t`, with the removable singularity at 0.
pub fn log_sinhc(t: f64) -> f64 {
    let a = t.abs();
    if a < 1e-4 {
        let t2 = a * a;
        (t2 / 6.0 + t2 * t2 / 120.0).ln_1p()
    } else if a < 20.0 {
        (a.sinh() / a).ln()
    } else {
        // ln sinh a = a - ln 2 + ln(1 - e^{-2a})
        a - std::f64::consts::LN_2 + (-(-2.0 * a).exp()).ln_1p() - a.ln()
    }
}

/// `sinh(t) / t`.
pub fn sinhc(t: f64) -> f64 {
    let a = t.abs();
    if a < 1e-4 {
        let t2 = a * a;
        1.0 + t2 / 6.0 + t2 * t2 / 120.0
    } else {
        log_sinhc(a).exp()
    }
}
