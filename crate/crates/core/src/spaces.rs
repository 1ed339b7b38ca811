//! Reproducing kernel Hilbert spaces on the disk, polydisc and ball.
//!
//! A [`SpaceDescriptor`] owns the kernel formula of its space. One-variable
//! families additionally expose their coefficient weights through a
//! [`WeightSequence`], so that `||f||^2 = sum |a_n|^2 beta_n^2` for
//! `f = sum a_n z^n`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Points closer than this to the boundary are rejected.
pub const DOMAIN_MARGIN: f64 = 1e-15;

/// Bergman weights up to this index use the finite product, beyond it log-gamma.
const PRODUCT_LIMIT: usize = 512;

/// A point of the disk, polydisc or ball as a tuple of complex coordinates.
///
/// One-variable spaces use points of dimension one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<Complex64>);

impl Point {
    pub fn new(coords: Vec<Complex64>) -> Self {
        Point(coords)
    }

    /// A point of the unit disk.
    pub fn disk(z: Complex64) -> Self {
        Point(vec![z])
    }

    pub fn real(x: f64) -> Self {
        Point(vec![Complex64::new(x, 0.0)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    /// First coordinate; the whole point for one-variable spaces.
    pub fn z(&self) -> Complex64 {
        self.0[0]
    }

    /// Largest coordinate modulus (the polydisc "norm").
    pub fn max_modulus(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Hermitian inner product `<self, other> = sum self_i conj(other_i)`.
    pub fn inner(&self, other: &Point) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b.conj()).sum()
    }
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        Point::disk(z)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}{:+}i", c.re, c.im)?;
        }
        write!(f, ")")
    }
}

/// Coefficient weights `beta_n` of a weighted Hardy space `H^2(beta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightSequence {
    /// `beta_n = 1`.
    Hardy,
    /// `beta_n^2 = n! Gamma(2 + alpha) / Gamma(n + 2 + alpha)`.
    Bergman { alpha: f64 },
    /// Explicitly listed weights. Indices past the end reuse the last value,
    /// which keeps the space equivalent to `H^2` beyond the listed range.
    Explicit { beta: Vec<f64> },
}

impl WeightSequence {
    pub fn bergman(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(WeightSequence::Bergman { alpha })
    }

    pub fn explicit(beta: Vec<f64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::InvalidParameter("explicit weight list is empty".into()));
        }
        if beta[0] != 1.0 {
            return Err(Error::InvalidParameter(format!("beta_0 must be 1, got {}", beta[0])));
        }
        if let Some((n, b)) = beta.iter().enumerate().find(|(_, b)| !(b.is_finite() && **b > 0.0)) {
            return Err(Error::InvalidParameter(format!("beta_{n} = {b} is not a positive real")));
        }
        Ok(WeightSequence::Explicit { beta })
    }

    /// `beta_n^2`.
    pub fn beta_sq(&self, n: usize) -> f64 {
        match self {
            WeightSequence::Hardy => 1.0,
            WeightSequence::Bergman { alpha } => {
                if n == 0 {
                    return 1.0;
                }
                if n <= PRODUCT_LIMIT {
                    // prod_{k=1}^n k / (k + 1 + alpha), exact to a few ulps
                    return (1..=n).map(|k| k as f64 / (k as f64 + 1.0 + alpha)).product();
                }
                let nf = n as f64;
                (ln_gamma(nf + 1.0) + ln_gamma(2.0 + alpha) - ln_gamma(nf + 2.0 + alpha)).exp()
            }
            WeightSequence::Explicit { beta } => {
                let b = beta[n.min(beta.len() - 1)];
                b * b
            }
        }
    }

    pub fn beta(&self, n: usize) -> f64 {
        self.beta_sq(n).sqrt()
    }

    /// `beta_0..=beta_degree`.
    pub fn betas(&self, degree: usize) -> Vec<f64> {
        (0..=degree).map(|n| self.beta(n)).collect()
    }

    /// `sum_n x^n / beta_n^2`, the one-variable kernel with `x = conj(w) z`.
    fn kernel_series(&self, x: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self {
            WeightSequence::Hardy => (one - x).inv(),
            WeightSequence::Bergman { alpha } => (one - x).powf(-(alpha + 2.0)),
            WeightSequence::Explicit { beta } => {
                let mut sum = Complex64::new(0.0, 0.0);
                let mut pow = one;
                for b in beta {
                    sum += pow / (b * b);
                    pow *= x;
                }
                let last = beta[beta.len() - 1];
                sum + pow / ((one - x) * last * last)
            }
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > -1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must exceed -1, got {alpha}")))
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidParameter("dimension must be at least 1".into()))
    }
}

/// Truncation control for the star-norm kernel series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiIndexTruncation {
    pub max_total_degree: usize,
    pub tail_tol: f64,
}

impl Default for MultiIndexTruncation {
    fn default() -> Self {
        MultiIndexTruncation { max_total_degree: 2000, tail_tol: 1e-12 }
    }
}

impl MultiIndexTruncation {
    pub fn new(max_total_degree: usize, tail_tol: f64) -> Result<Self> {
        if !(tail_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tail_tol must be positive, got {tail_tol}")));
        }
        Ok(MultiIndexTruncation { max_total_degree, tail_tol })
    }
}

/// `sum_k x^k (k+1)^exponent`, summed until a geometric bound on the tail
/// falls below `tail_tol` times the partial sum.
pub fn weighted_geometric_series(
    x: Complex64,
    exponent: f64,
    trunc: &MultiIndexTruncation,
) -> Result<Complex64> {
    let r = x.norm();
    if r >= 1.0 {
        return Err(Error::PointOutsideDomain(format!("series argument {x} has modulus >= 1")));
    }
    let mut sum = Complex64::new(1.0, 0.0);
    if r == 0.0 {
        return Ok(sum);
    }
    let mut pow = Complex64::new(1.0, 0.0);
    for k in 1..=trunc.max_total_degree {
        pow *= x;
        let kf = k as f64;
        let term = pow * (kf + 1.0).powf(exponent);
        sum += term;
        // Later term ratios are bounded by |x| ((k+3)/(k+2))^max(exponent, 0).
        let ratio = r * ((kf + 3.0) / (kf + 2.0)).powf(exponent.max(0.0));
        if ratio < 1.0 {
            let next = term.norm() * r * ((kf + 2.0) / (kf + 1.0)).powf(exponent);
            if next / (1.0 - ratio) < trunc.tail_tol * sum.norm() {
                return Ok(sum);
            }
        }
    }
    Err(Error::TruncationNotConverged { tol: trunc.tail_tol, max_degree: trunc.max_total_degree })
}

/// Which reproducing kernel Hilbert space an operation works in.
#[derive(Clone, Debug, PartialEq)]
pub enum SpaceDescriptor {
    HardyDisk,
    BergmanDisk { alpha: f64 },
    WeightedHardy(WeightSequence),
    HardyPolydisc { n: usize },
    BergmanPolydisc { n: usize, alpha: f64 },
    /// Bergman polydisc space with the equivalent coefficient norm
    /// `sum |f_s|^2 prod (s_i + 1)^(-1-alpha)`.
    BergmanPolydiscStar { n: usize, alpha: f64, trunc: MultiIndexTruncation },
    HardyBall { n: usize },
}

impl SpaceDescriptor {
    pub fn bergman_disk(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(SpaceDescriptor::BergmanDisk { alpha })
    }

    pub fn hardy_polydisc(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(SpaceDescriptor::HardyPolydisc { n })
    }

    pub fn bergman_polydisc(n: usize, alpha: f64) -> Result<Self> {
        check_dim(n)?;
        check_alpha(alpha)?;
        Ok(SpaceDescriptor::BergmanPolydisc { n, alpha })
    }

    pub fn bergman_polydisc_star(n: usize, alpha: f64) -> Result<Self> {
        check_dim(n)?;
        check_alpha(alpha)?;
        Ok(SpaceDescriptor::BergmanPolydiscStar { n, alpha, trunc: MultiIndexTruncation::default() })
    }

    pub fn hardy_ball(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(SpaceDescriptor::HardyBall { n })
    }

    pub fn weighted_hardy(beta: WeightSequence) -> Self {
        SpaceDescriptor::WeightedHardy(beta)
    }

    pub fn name(&self) -> &'static str {
        match self {
            SpaceDescriptor::HardyDisk => "hardy_disk",
            SpaceDescriptor::BergmanDisk { .. } => "bergman_disk",
            SpaceDescriptor::WeightedHardy(_) => "weighted_hardy",
            SpaceDescriptor::HardyPolydisc { .. } => "hardy_polydisc",
            SpaceDescriptor::BergmanPolydisc { .. } => "bergman_polydisc",
            SpaceDescriptor::BergmanPolydiscStar { .. } => "bergman_polydisc_star",
            SpaceDescriptor::HardyBall { .. } => "hardy_ball",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SpaceDescriptor::HardyDisk
            | SpaceDescriptor::BergmanDisk { .. }
            | SpaceDescriptor::WeightedHardy(_) => 1,
            SpaceDescriptor::HardyPolydisc { n }
            | SpaceDescriptor::BergmanPolydisc { n, .. }
            | SpaceDescriptor::BergmanPolydiscStar { n, .. }
            | SpaceDescriptor::HardyBall { n } => *n,
        }
    }

    /// Coefficient weights of the one-variable families.
    pub fn weights(&self) -> Option<WeightSequence> {
        match self {
            SpaceDescriptor::HardyDisk => Some(WeightSequence::Hardy),
            SpaceDescriptor::BergmanDisk { alpha } => Some(WeightSequence::Bergman { alpha: *alpha }),
            SpaceDescriptor::WeightedHardy(beta) => Some(beta.clone()),
            _ => None,
        }
    }

    pub fn require_weights(&self) -> Result<WeightSequence> {
        self.weights().ok_or_else(|| Error::WrongSpaceFamily(self.name().into()))
    }

    pub fn contains(&self, z: &Point) -> bool {
        if z.dim() != self.dim() || z.0.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return false;
        }
        match self {
            SpaceDescriptor::HardyBall { .. } => z.norm_sqr().sqrt() < 1.0 - DOMAIN_MARGIN,
            _ => z.max_modulus() < 1.0 - DOMAIN_MARGIN,
        }
    }

    pub fn check_point(&self, z: &Point) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::PointOutsideDomain(format!("{z} for space {}", self.name())))
        }
    }

    /// The reproducing kernel `kappa(z, w)`, i.e. the kernel section at `w`
    /// evaluated at `z`.
    pub fn kernel_eval(&self, z: &Point, w: &Point) -> Result<Complex64> {
        self.check_point(z)?;
        self.check_point(w)?;
        let one = Complex64::new(1.0, 0.0);
        let products = z.0.iter().zip(&w.0).map(|(zi, wi)| wi.conj() * zi);
        Ok(match self {
            SpaceDescriptor::HardyDisk => WeightSequence::Hardy.kernel_series(w.z().conj() * z.z()),
            SpaceDescriptor::BergmanDisk { alpha } => {
                WeightSequence::Bergman { alpha: *alpha }.kernel_series(w.z().conj() * z.z())
            }
            SpaceDescriptor::WeightedHardy(beta) => beta.kernel_series(w.z().conj() * z.z()),
            SpaceDescriptor::HardyPolydisc { .. } => products.map(|x| (one - x).inv()).product(),
            SpaceDescriptor::BergmanPolydisc { alpha, .. } => {
                products.map(|x| (one - x).powf(-(alpha + 2.0))).product()
            }
            SpaceDescriptor::BergmanPolydiscStar { alpha, trunc, .. } => {
                let mut k = one;
                for x in products {
                    k *= weighted_geometric_series(x, 1.0 + alpha, trunc)?;
                }
                k
            }
            SpaceDescriptor::HardyBall { n } => (one - z.inner(w)).powi(-(*n as i32)),
        })
    }

    /// `kappa(z, z)`, real and at least one.
    pub fn kernel_diag(&self, z: &Point) -> Result<f64> {
        Ok(self.kernel_eval(z, z)?.re)
    }

    /// Norm of the kernel section at `z`, `sqrt(kappa(z, z))`.
    pub fn kernel_norm(&self, z: &Point) -> Result<f64> {
        Ok(self.kernel_diag(z)?.sqrt())
    }

    /// `sum |a_n|^2 beta_n^2`.
    pub fn coeff_norm_sq(&self, coeffs: &[Complex64]) -> Result<f64> {
        let beta = self.require_weights()?;
        Ok(coeffs.iter().enumerate().map(|(n, a)| a.norm_sqr() * beta.beta_sq(n)).sum())
    }

    /// Taylor coefficients `conj(w)^n / beta_n^2` of the kernel section at
    /// `w`, for `n = 0..=degree`.
    pub fn kernel_coefficients(&self, w: Complex64, degree: usize) -> Result<Vec<Complex64>> {
        let beta = self.require_weights()?;
        self.check_point(&Point::disk(w))?;
        let wc = w.conj();
        let mut pow = Complex64::new(1.0, 0.0);
        Ok((0..=degree)
            .map(|n| {
                let c = pow / beta.beta_sq(n);
                pow *= wc;
                c
            })
            .collect())
    }

    /// Kernel section at `w` in the orthonormal basis `e_n = z^n / beta_n`,
    /// truncated at `degree`.
    pub fn kernel_coords(&self, w: Complex64, degree: usize) -> Result<Vec<Complex64>> {
        let beta = self.require_weights()?;
        let coeffs = self.kernel_coefficients(w, degree)?;
        Ok(coeffs.into_iter().enumerate().map(|(n, c)| c * beta.beta(n)).collect())
    }

    /// Parse the JSON descriptor form
    /// `{"family": ..., "alpha": ..., "n": ..., "beta": [...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpace = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.try_into()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw = RawSpace::from(self);
        serde_json::to_value(raw).expect("space descriptor serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<Vec<f64>>,
}

impl TryFrom<RawSpace> for SpaceDescriptor {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        let RawSpace { family, alpha, n, beta } = raw;
        let forbid = |name: &str, present: bool| {
            if present {
                Err(Error::Parse(format!("field `{name}` does not apply to family `{family}`")))
            } else {
                Ok(())
            }
        };
        let need_alpha = || alpha.ok_or_else(|| Error::Parse(format!("family `{family}` needs `alpha`")));
        let need_n = || n.ok_or_else(|| Error::Parse(format!("family `{family}` needs `n`")));
        match family.as_str() {
            "hardy_disk" => {
                forbid("alpha", alpha.is_some())?;
                forbid("n", n.is_some())?;
                forbid("beta", beta.is_some())?;
                Ok(SpaceDescriptor::HardyDisk)
            }
            "bergman_disk" => {
                forbid("n", n.is_some())?;
                forbid("beta", beta.is_some())?;
                SpaceDescriptor::bergman_disk(need_alpha()?)
            }
            "weighted_hardy" => {
                forbid("alpha", alpha.is_some())?;
                forbid("n", n.is_some())?;
                let beta = beta.ok_or_else(|| Error::Parse("family `weighted_hardy` needs `beta`".into()))?;
                Ok(SpaceDescriptor::WeightedHardy(WeightSequence::explicit(beta)?))
            }
            "hardy_polydisc" => {
                forbid("alpha", alpha.is_some())?;
                forbid("beta", beta.is_some())?;
                SpaceDescriptor::hardy_polydisc(need_n()?)
            }
            "bergman_polydisc" => {
                forbid("beta", beta.is_some())?;
                SpaceDescriptor::bergman_polydisc(need_n()?, need_alpha()?)
            }
            "bergman_polydisc_star" => {
                forbid("beta", beta.is_some())?;
                SpaceDescriptor::bergman_polydisc_star(need_n()?, need_alpha()?)
            }
            "hardy_ball" => {
                forbid("alpha", alpha.is_some())?;
                forbid("beta", beta.is_some())?;
                SpaceDescriptor::hardy_ball(need_n()?)
            }
            other => Err(Error::Parse(format!("unknown space family `{other}`"))),
        }
    }
}

impl From<&SpaceDescriptor> for RawSpace {
    fn from(space: &SpaceDescriptor) -> Self {
        let mut raw = RawSpace { family: space.name().into(), alpha: None, n: None, beta: None };
        match space {
            SpaceDescriptor::HardyDisk => {}
            SpaceDescriptor::BergmanDisk { alpha } => raw.alpha = Some(*alpha),
            SpaceDescriptor::WeightedHardy(w) => match w {
                WeightSequence::Hardy => raw.beta = Some(vec![1.0]),
                WeightSequence::Bergman { alpha } => {
                    raw.family = "bergman_disk".into();
                    raw.alpha = Some(*alpha);
                }
                WeightSequence::Explicit { beta } => raw.beta = Some(beta.clone()),
            },
            SpaceDescriptor::HardyPolydisc { n } | SpaceDescriptor::HardyBall { n } => raw.n = Some(*n),
            SpaceDescriptor::BergmanPolydisc { n, alpha }
            | SpaceDescriptor::BergmanPolydiscStar { n, alpha, .. } => {
                raw.n = Some(*n);
                raw.alpha = Some(*alpha);
            }
        }
        raw
    }
}
