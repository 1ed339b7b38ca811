//! Truncated power series `c_0 + c_1 z + ... + c_N z^N`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    /// Build from coefficients `c_0..=c_N`. Rejects empty and non-finite input.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("power series needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter("power series coefficients must be finite".into()));
        }
        Ok(PowerSeries { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        PowerSeries::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(degree: usize) -> Self {
        PowerSeries { coeffs: vec![ZERO; degree + 1] }
    }

    pub fn constant(c: Complex64, degree: usize) -> Self {
        let mut s = PowerSeries::zero(degree);
        s.coeffs[0] = c;
        s
    }

    /// `z` truncated at `degree` (which must be at least 1 to be exact).
    pub fn identity(degree: usize) -> Self {
        let mut s = PowerSeries::zero(degree);
        if degree >= 1 {
            s.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        s
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or(ZERO)
    }

    /// Truncate or zero-pad to exactly `degree`.
    pub fn resized(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(degree + 1, ZERO);
        PowerSeries { coeffs }
    }

    /// Horner evaluation of the polynomial part.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &PowerSeries) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        PowerSeries { coeffs: (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect() }
    }

    /// Product truncated at `degree`.
    pub fn mul_truncated(&self, other: &PowerSeries, degree: usize) -> Self {
        let mut out = vec![ZERO; degree + 1];
        mul_into(&self.coeffs, &other.coeffs, &mut out);
        PowerSeries { coeffs: out }
    }

    /// Product truncated at the larger of the two degrees.
    pub fn mul(&self, other: &PowerSeries) -> Self {
        self.mul_truncated(other, self.degree().max(other.degree()))
    }

    /// Multiply by `z`, keeping the degree (the top coefficient drops out).
    pub fn shift_up(&self) -> Self {
        let mut coeffs = vec![ZERO; self.coeffs.len()];
        coeffs[1..].copy_from_slice(&self.coeffs[..self.coeffs.len() - 1]);
        PowerSeries { coeffs }
    }

    /// `self(other(z))` truncated at the larger of the two degrees.
    ///
    /// Both inputs are treated as exact polynomials, so the result is exact
    /// through the output degree when neither input was itself truncated.
    pub fn compose(&self, inner: &PowerSeries) -> Self {
        self.compose_to(inner, self.degree().max(inner.degree()))
    }

    /// `self(other(z))` truncated at `degree`, by Horner's scheme.
    pub fn compose_to(&self, inner: &PowerSeries, degree: usize) -> Self {
        let inner = inner.resized(degree);
        let mut acc = vec![ZERO; degree + 1];
        let mut scratch = vec![ZERO; degree + 1];
        for c in self.coeffs.iter().rev() {
            scratch.iter_mut().for_each(|s| *s = ZERO);
            mul_into(&acc, &inner.coeffs, &mut scratch);
            std::mem::swap(&mut acc, &mut scratch);
            acc[0] += c;
        }
        PowerSeries { coeffs: acc }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `out += a * b`, truncated at `out.len() - 1`.
fn mul_into(a: &[Complex64], b: &[Complex64], out: &mut [Complex64]) {
    let n = out.len();
    for (i, ai) in a.iter().enumerate().take(n) {
        if *ai == ZERO {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
}

impl TryFrom<Vec<Complex64>> for PowerSeries {
    type Error = Error;

    fn try_from(coeffs: Vec<Complex64>) -> Result<Self> {
        PowerSeries::new(coeffs)
    }
}

impl From<PowerSeries> for Vec<Complex64> {
    fn from(s: PowerSeries) -> Self {
        s.coeffs
    }
}
