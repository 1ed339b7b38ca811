//! Closed-form norms and kernel ratios for composition operators on the Hardy
//! space of the disk.
//!
//! Complex centres `p` are reduced to `|p|` by a rotation, which is unitary,
//! so every formula below is real.

use num_complex::Complex64;
use serde::Serialize;

use crate::oracle::{self, BoundaryFunction};
use crate::series::PowerSeries;
use crate::symbols::{SymbolMap, AFFINE_SLACK};
use crate::{Error, Result};

fn open_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::DomainError(format!("{name} must lie in [0, 1), got {x}")))
    }
}

fn positive_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!("{name} must lie in (0, 1), got {x}")))
    }
}

/// `||C_phi||` on the Hardy space for inner `phi` with `|phi(0)| = p_mod`.
pub fn inner_norm(p_mod: f64) -> Result<f64> {
    open_unit("|phi(0)|", p_mod)?;
    Ok(((1.0 + p_mod) / (1.0 - p_mod)).sqrt())
}

/// Lower companion `sqrt((1 - p)/(1 + p))`, the infimum of `||C_phi f|| / ||f||`.
pub fn inner_lower(p_mod: f64) -> Result<f64> {
    open_unit("|phi(0)|", p_mod)?;
    Ok(((1.0 - p_mod) / (1.0 + p_mod)).sqrt())
}

/// `||C_phi||` for `phi = a psi + b` with `psi` inner and `psi(0) = 0`.
pub fn affine_inner_norm(a: Complex64, b: Complex64) -> Result<f64> {
    let (ma, mb) = (a.norm(), b.norm());
    if ma + mb > 1.0 + AFFINE_SLACK || mb >= 1.0 {
        return Err(Error::HypothesisViolated(format!("need |a| + |b| <= 1 and |b| < 1, got |a| = {ma}, |b| = {mb}")));
    }
    // (1 - |a|^2 + |b|^2)^2 - 4|b|^2 in factored form, exact zero on |a| + |b| = 1
    let disc = (((1.0 - mb).powi(2) - ma * ma) * ((1.0 + mb).powi(2) - ma * ma)).max(0.0);
    Ok((2.0 / (1.0 + ma * ma - mb * mb + disc.sqrt())).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioPair {
    /// `||C k_w||^2 / ||k_w||^2` at `w = -r`.
    pub forward_ratio_sq: f64,
    /// `||C^* k_{-w}||^2 / ||k_{-w}||^2`.
    pub adjoint_ratio_sq: f64,
}

impl RatioPair {
    pub fn margin(&self) -> f64 {
        self.adjoint_ratio_sq - self.forward_ratio_sq
    }
}

/// Squared kernel ratios for `alpha_p` along the ray through `-p`.
pub fn ratio_pair(p: f64, r: f64) -> Result<RatioPair> {
    positive_unit("p", p)?;
    open_unit("r", r)?;
    Ok(RatioPair {
        forward_ratio_sq: (1.0 - p * p * r * r) / (1.0 + r * p).powi(2),
        adjoint_ratio_sq: (1.0 - p * r).powi(2) / (1.0 - p * p),
    })
}

/// `||F||^2` for `F(z) = (1 - p z)/(1 - beta z)` with `beta = (p + r)/(1 + p r)`.
pub fn residue_norm_f(p: f64, r: f64) -> Result<f64> {
    positive_unit("p", p)?;
    open_unit("r", r)?;
    Ok((1.0 - p * p * r * r) / (1.0 - r * r))
}

/// The rational function `F` whose norm [`residue_norm_f`] evaluates.
pub fn residue_function(p: f64, r: f64) -> Result<BoundaryFunction> {
    positive_unit("p", p)?;
    open_unit("r", r)?;
    let beta = (p + r) / (1.0 + p * r);
    BoundaryFunction::rational(PowerSeries::from_real(&[1.0, -p])?, PowerSeries::from_real(&[1.0, -beta])?)
}

/// Poisson weight `(1 - |p|^2)/|1 - conj(p) e^{it}|^2`.
pub fn boundary_weight(p: Complex64, t: f64) -> Result<f64> {
    let m = p.norm_sqr();
    if m >= 1.0 {
        return Err(Error::DomainError(format!("|p| must be below 1, got {}", m.sqrt())));
    }
    Ok((1.0 - m) / (Complex64::new(1.0, 0.0) - p.conj() * Complex64::from_polar(1.0, t)).norm_sqr())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproachSequenceSpec {
    p: Complex64,
    radii: Vec<f64>,
}

impl ApproachSequenceSpec {
    pub fn new(p: Complex64, radii: Vec<f64>) -> Result<Self> {
        let m = p.norm();
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::DomainError(format!("need 0 < |p| < 1, got {m}")));
        }
        if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) || radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("radii must be strictly increasing in (0, 1)".into()));
        }
        Ok(ApproachSequenceSpec { p, radii })
    }

    pub fn p(&self) -> Complex64 {
        self.p
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApproachTerm {
    pub r: f64,
    /// `-(p/|p|) r`, where the adjoint ratio tends to its supremum.
    pub w: Complex64,
    pub upper_ratio: f64,
    pub lower_ratio: f64,
}

/// Squared ratios `||C^* k_w||^2 / ||k_w||^2` at `w = -(p/|p|) r` (upper) and
/// `w = (p/|p|) r` (lower).
pub fn approach_sequence(spec: &ApproachSequenceSpec) -> Vec<ApproachTerm> {
    let m = spec.p.norm();
    let dir = spec.p / m;
    spec.radii
        .iter()
        .map(|&r| ApproachTerm {
            r,
            w: -dir * r,
            upper_ratio: (1.0 + m * r).powi(2) / (1.0 - m * m),
            lower_ratio: (1.0 - m * r).powi(2) / (1.0 - m * m),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NonattainmentGap {
    /// `((1+p)/(1-p)) ||f||^2 - ||C f||^2`.
    pub gap: f64,
    /// `||C f||^2 - ((1-p)/(1+p)) ||f||^2`.
    pub lower_gap: f64,
    /// `||C f|| / ||f||`.
    pub ratio: f64,
    pub nodes: usize,
}

impl NonattainmentGap {
    /// Smaller of the two gaps after normalizing `f` to unit norm.
    pub fn two_sided_margin(&self, norm_sq: f64) -> f64 {
        self.gap.min(self.lower_gap) / norm_sq
    }
}

/// Node count that resolves `|f o alpha_p|^2` on the circle to rounding.
pub fn default_nodes(p: f64, degree: usize) -> usize {
    let geometric = if p > 0.0 { (1e-17f64).ln() / p.ln() } else { 0.0 };
    let m = (4 * (degree + 1)).max((degree as f64 + geometric).ceil() as usize).max(16);
    m.div_ceil(4) * 4
}

/// Gap between `||C_{alpha_p} f||^2` and the two extremal bounds for a
/// polynomial `f`, with the composed norm taken by circle quadrature.
pub fn nonattainment_gap(p: f64, f: &PowerSeries, nodes: Option<usize>) -> Result<NonattainmentGap> {
    positive_unit("p", p)?;
    let norm_sq: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
    if norm_sq == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let m = nodes.unwrap_or_else(|| default_nodes(p, f.degree()));
    let composed = BoundaryFunction::composed(f.clone(), SymbolMap::automorphism(Complex64::new(p, 0.0))?);
    let image = oracle::circle_norm_sq(&composed, m)?;
    let hi = (1.0 + p) / (1.0 - p);
    Ok(NonattainmentGap {
        gap: hi * norm_sq - image,
        lower_gap: image - norm_sq / hi,
        ratio: (image / norm_sq).sqrt(),
        nodes: m,
    })
}
