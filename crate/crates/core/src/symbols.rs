//! Analytic self-maps of the disk and polydisc, and multiplier weights.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::series::PowerSeries;
use crate::spaces::Point;
use crate::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Slack on `|a| + |b| <= 1` for affine symbols and on unimodularity.
pub const AFFINE_SLACK: f64 = 1e-12;
/// `|phi| > 1 + SELF_MAP_SLACK` on a sample fails the self-map screen.
pub const SELF_MAP_SLACK: f64 = 1e-9;

/// An analytic map of the unit disk into itself.
///
/// Every constructor enforces the invariants of its kind; [`SymbolMap::Series`]
/// carries no certification and is only screened by [`SymbolMap::self_map_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawSymbol")]
pub enum SymbolMap {
    Affine { a: Complex64, b: Complex64 },
    /// `alpha_p(z) = (p - z) / (1 - conj(p) z)`, the involution swapping 0 and p.
    Automorphism { p: Complex64 },
    Rotation { zeta: f64 },
    Constant { b: Complex64 },
    /// `u * prod (z - a_k) / (1 - conj(a_k) z)`.
    Blaschke { zeros: Vec<Complex64>, unimodular_factor: Complex64 },
    ZTimes { inner: Box<SymbolMap> },
    Series { coeffs: PowerSeries },
    /// `outer(inner(z))`.
    Composite { outer: Box<SymbolMap>, inner: Box<SymbolMap> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawSymbol {
    Affine { a: Complex64, b: Complex64 },
    Automorphism { p: Complex64 },
    Rotation { zeta: f64 },
    Constant { b: Complex64 },
    Blaschke { zeros: Vec<Complex64>, #[serde(default = "unit")] unimodular_factor: Complex64 },
    ZTimes { inner: Box<SymbolMap> },
    Series { coeffs: PowerSeries },
    Composite { outer: Box<SymbolMap>, inner: Box<SymbolMap> },
}

fn unit() -> Complex64 {
    ONE
}

impl TryFrom<RawSymbol> for SymbolMap {
    type Error = Error;

    fn try_from(raw: RawSymbol) -> Result<Self> {
        match raw {
            RawSymbol::Affine { a, b } => SymbolMap::affine(a, b),
            RawSymbol::Automorphism { p } => SymbolMap::automorphism(p),
            RawSymbol::Rotation { zeta } => SymbolMap::rotation(zeta),
            RawSymbol::Constant { b } => SymbolMap::constant(b),
            RawSymbol::Blaschke { zeros, unimodular_factor } => SymbolMap::blaschke(zeros, unimodular_factor),
            RawSymbol::ZTimes { inner } => Ok(SymbolMap::z_times(*inner)),
            RawSymbol::Series { coeffs } => Ok(SymbolMap::Series { coeffs }),
            RawSymbol::Composite { outer, inner } => Ok(SymbolMap::composite(*outer, *inner)),
        }
    }
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl SymbolMap {
    pub fn affine(a: Complex64, b: Complex64) -> Result<Self> {
        if !finite(a) || !finite(b) || a.norm() + b.norm() > 1.0 + AFFINE_SLACK {
            return Err(Error::InvalidParameter(format!("affine symbol needs |a| + |b| <= 1, got a = {a}, b = {b}")));
        }
        Ok(SymbolMap::Affine { a, b })
    }

    pub fn automorphism(p: Complex64) -> Result<Self> {
        if !finite(p) || p.norm() >= 1.0 {
            return Err(Error::InvalidParameter(format!("automorphism needs |p| < 1, got {p}")));
        }
        Ok(SymbolMap::Automorphism { p })
    }

    pub fn rotation(zeta: f64) -> Result<Self> {
        if !zeta.is_finite() {
            return Err(Error::InvalidParameter("rotation angle must be finite".into()));
        }
        Ok(SymbolMap::Rotation { zeta })
    }

    pub fn constant(b: Complex64) -> Result<Self> {
        if !finite(b) || b.norm() >= 1.0 {
            return Err(Error::InvalidParameter(format!("constant symbol needs |b| < 1, got {b}")));
        }
        Ok(SymbolMap::Constant { b })
    }

    pub fn blaschke(zeros: Vec<Complex64>, unimodular_factor: Complex64) -> Result<Self> {
        if let Some(a) = zeros.iter().find(|a| !finite(**a) || a.norm() >= 1.0) {
            return Err(Error::InvalidParameter(format!("Blaschke zero {a} is not inside the disk")));
        }
        if !finite(unimodular_factor) || (unimodular_factor.norm() - 1.0).abs() > AFFINE_SLACK {
            return Err(Error::InvalidParameter(format!("Blaschke factor {unimodular_factor} is not unimodular")));
        }
        Ok(SymbolMap::Blaschke { zeros, unimodular_factor })
    }

    pub fn z_times(inner: SymbolMap) -> Self {
        SymbolMap::ZTimes { inner: Box::new(inner) }
    }

    pub fn series(coeffs: PowerSeries) -> Self {
        SymbolMap::Series { coeffs }
    }

    pub fn composite(outer: SymbolMap, inner: SymbolMap) -> Self {
        SymbolMap::Composite { outer: Box::new(outer), inner: Box::new(inner) }
    }

    /// The identity map `z`.
    pub fn identity() -> Self {
        SymbolMap::Rotation { zeta: 0.0 }
    }

    /// `delta * z`.
    pub fn scaled_identity(delta: Complex64) -> Result<Self> {
        SymbolMap::affine(delta, ZERO)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SymbolMap::Affine { .. } => "affine",
            SymbolMap::Automorphism { .. } => "automorphism",
            SymbolMap::Rotation { .. } => "rotation",
            SymbolMap::Constant { .. } => "constant",
            SymbolMap::Blaschke { .. } => "blaschke",
            SymbolMap::ZTimes { .. } => "z_times",
            SymbolMap::Series { .. } => "series",
            SymbolMap::Composite { .. } => "composite",
        }
    }

    /// Certified inner function (unimodular boundary values).
    pub fn is_inner(&self) -> bool {
        match self {
            SymbolMap::Automorphism { .. } | SymbolMap::Rotation { .. } | SymbolMap::Blaschke { .. } => true,
            SymbolMap::ZTimes { inner } => inner.is_inner(),
            SymbolMap::Composite { outer, inner } => outer.is_inner() && inner.is_inner(),
            _ => false,
        }
    }

    /// Whether the closed form extends analytically across the unit circle.
    pub fn boundary_evaluable(&self) -> bool {
        match self {
            SymbolMap::Series { .. } => false,
            SymbolMap::ZTimes { inner } => inner.boundary_evaluable(),
            SymbolMap::Composite { outer, inner } => outer.boundary_evaluable() && inner.boundary_evaluable(),
            _ => true,
        }
    }

    /// `phi(z)` for `|z| < 1`, or `|z| = 1` for kinds that extend across the
    /// circle.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !finite(z) || z.norm() > 1.0 + AFFINE_SLACK {
            return Err(Error::PointOutsideDomain(format!("{z} is outside the closed disk")));
        }
        if z.norm() >= 1.0 - crate::spaces::DOMAIN_MARGIN && !self.boundary_evaluable() {
            return Err(Error::BoundaryEvalUnsupported(self.kind_name()));
        }
        Ok(self.eval_unchecked(z))
    }

    /// Evaluate the closed form (or polynomial) anywhere it is defined,
    /// without domain checks.
    pub(crate) fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        match self {
            SymbolMap::Affine { a, b } => a * z + b,
            SymbolMap::Automorphism { p } => (p - z) / (ONE - p.conj() * z),
            SymbolMap::Rotation { zeta } => Complex64::from_polar(1.0, *zeta) * z,
            SymbolMap::Constant { b } => *b,
            SymbolMap::Blaschke { zeros, unimodular_factor } => zeros
                .iter()
                .fold(*unimodular_factor, |acc, a| acc * (z - a) / (ONE - a.conj() * z)),
            SymbolMap::ZTimes { inner } => z * inner.eval_unchecked(z),
            SymbolMap::Series { coeffs } => coeffs.eval(z),
            SymbolMap::Composite { outer, inner } => outer.eval_unchecked(inner.eval_unchecked(z)),
        }
    }

    /// Taylor coefficients at the origin through `degree`.
    pub fn to_series(&self, degree: usize) -> PowerSeries {
        match self {
            SymbolMap::Affine { a, b } => {
                let mut s = PowerSeries::constant(*b, degree).into_coeffs();
                if degree >= 1 {
                    s[1] = *a;
                }
                PowerSeries::new(s).expect("finite")
            }
            SymbolMap::Automorphism { p } => {
                let scale = -(1.0 - p.norm_sqr());
                let pc = p.conj();
                let mut coeffs = Vec::with_capacity(degree + 1);
                coeffs.push(*p);
                let mut pow = ONE;
                for _ in 1..=degree {
                    coeffs.push(pow * scale);
                    pow *= pc;
                }
                PowerSeries::new(coeffs).expect("finite")
            }
            SymbolMap::Rotation { zeta } => {
                let mut s = PowerSeries::zero(degree).into_coeffs();
                if degree >= 1 {
                    s[1] = Complex64::from_polar(1.0, *zeta);
                }
                PowerSeries::new(s).expect("finite")
            }
            SymbolMap::Constant { b } => PowerSeries::constant(*b, degree),
            SymbolMap::Blaschke { zeros, unimodular_factor } => {
                let mut acc = PowerSeries::constant(*unimodular_factor, degree);
                for a in zeros {
                    acc = acc.mul_truncated(&blaschke_factor_series(*a, degree), degree);
                }
                acc
            }
            SymbolMap::ZTimes { inner } => inner.to_series(degree).shift_up(),
            SymbolMap::Series { coeffs } => coeffs.resized(degree),
            SymbolMap::Composite { outer, inner } => {
                let g = inner.to_series(degree);
                let outer_degree = composite_working_degree(g.coeff(0).norm(), degree);
                outer.to_series(outer_degree).compose_to(&g, degree)
            }
        }
    }

    /// Sup of `|phi|` over `grid_size` equally spaced points of the unit
    /// circle. By the maximum modulus principle this screens the self-map
    /// property; polynomial symbols are evaluated as polynomials.
    pub fn self_map_check(&self, grid_size: usize) -> Result<SelfMapReport> {
        check_grid(grid_size)?;
        let mut report = SelfMapReport { sup_modulus: 0.0, worst_point: Point::disk(ONE), passed: true };
        for k in 0..grid_size {
            let z = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / grid_size as f64);
            let m = self.eval_unchecked(z).norm();
            if m > report.sup_modulus {
                report.sup_modulus = m;
                report.worst_point = Point::disk(z);
            }
        }
        report.passed = report.sup_modulus <= 1.0 + SELF_MAP_SLACK;
        Ok(report)
    }
}

/// Degree to which the outer series of a composite is expanded, so that the
/// neglected tail `sum_{k > K} |c_k| |q|^k` is below double precision.
fn composite_working_degree(q: f64, degree: usize) -> usize {
    if q == 0.0 {
        return degree;
    }
    if q >= 1.0 {
        return 4 * degree + 64;
    }
    let extra = (1e-17f64.ln() / q.ln()).ceil() as usize;
    degree + extra.min(4 * degree + 64)
}

/// Taylor coefficients of `(z - a) / (1 - conj(a) z)`.
fn blaschke_factor_series(a: Complex64, degree: usize) -> PowerSeries {
    let ac = a.conj();
    let scale = 1.0 - a.norm_sqr();
    let mut coeffs = Vec::with_capacity(degree + 1);
    coeffs.push(-a);
    let mut pow = ONE;
    for _ in 1..=degree {
        coeffs.push(pow * scale);
        pow *= ac;
    }
    PowerSeries::new(coeffs).expect("finite")
}

fn check_grid(grid_size: usize) -> Result<()> {
    if grid_size < 8 {
        Err(Error::InvalidParameter(format!("self-map screen needs grid_size >= 8, got {grid_size}")))
    } else {
        Ok(())
    }
}

/// Outcome of the boundary self-map screen.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfMapReport {
    pub sup_modulus: f64,
    pub worst_point: Point,
    pub passed: bool,
}

/// Both sides of `1 - |alpha_p(z)|^2 = (1 - |p|^2)(1 - |z|^2) / |1 - conj(p) z|^2`.
pub fn alpha_identity_check(p: Complex64, z: Complex64) -> Result<(f64, f64)> {
    if p.norm() >= 1.0 || z.norm() >= 1.0 {
        return Err(Error::PointOutsideDomain(format!("p = {p}, z = {z}")));
    }
    let a = SymbolMap::Automorphism { p }.eval_unchecked(z);
    let lhs = 1.0 - a.norm_sqr();
    let rhs = (1.0 - p.norm_sqr()) * (1.0 - z.norm_sqr()) / (ONE - p.conj() * z).norm_sqr();
    Ok((lhs, rhs))
}

/// A multiplier `psi` for weighted composition operators. Unlike a symbol it
/// need not map the disk into itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    Symbol(SymbolMap),
    Series(PowerSeries),
}

impl Weight {
    pub fn constant(c: Complex64) -> Self {
        Weight::Series(PowerSeries::constant(c, 0))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Weight::Symbol(s) => s.eval(z),
            Weight::Series(s) => Ok(s.eval(z)),
        }
    }

    pub fn to_series(&self, degree: usize) -> PowerSeries {
        match self {
            Weight::Symbol(s) => s.to_series(degree),
            Weight::Series(s) => s.resized(degree),
        }
    }
}

/// A polynomial in several variables, `sum c_s z^s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiPoly {
    pub terms: Vec<(Vec<u32>, Complex64)>,
}

impl MultiPoly {
    pub fn new(terms: Vec<(Vec<u32>, Complex64)>) -> Self {
        MultiPoly { terms }
    }

    pub fn constant(c: Complex64, n: usize) -> Self {
        MultiPoly { terms: vec![(vec![0; n], c)] }
    }

    /// The coordinate function `z_axis`.
    pub fn coordinate(axis: usize, n: usize) -> Self {
        let mut e = vec![0; n];
        e[axis] = 1;
        MultiPoly { terms: vec![(e, ONE)] }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(exps, c)| exps.iter().zip(z).fold(*c, |acc, (&e, zi)| acc * zi.powu(e)))
            .sum()
    }
}

/// One coordinate function of a several-variable symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Component {
    Poly(MultiPoly),
    /// A one-variable symbol applied to coordinate `axis`.
    Axis { axis: usize, map: SymbolMap },
}

impl Component {
    fn eval_unchecked(&self, z: &[Complex64]) -> Complex64 {
        match self {
            Component::Poly(p) => p.eval(z),
            Component::Axis { axis, map } => map.eval_unchecked(z[*axis]),
        }
    }
}

/// `phi = (phi_1, ..., phi_n)` mapping the polydisc into itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolySymbol {
    components: Vec<Component>,
}

impl PolySymbol {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::InvalidParameter("several-variable symbol needs a component".into()));
        }
        for c in &components {
            match c {
                Component::Poly(p) => {
                    if p.terms.iter().any(|(e, c)| e.len() != n || !finite(*c)) {
                        return Err(Error::InvalidParameter(format!(
                            "polynomial component needs {n} finite exponents per term"
                        )));
                    }
                }
                Component::Axis { axis, .. } => {
                    if *axis >= n {
                        return Err(Error::InvalidParameter(format!("axis {axis} out of range for dimension {n}")));
                    }
                }
            }
        }
        Ok(PolySymbol { components })
    }

    pub fn identity(n: usize) -> Result<Self> {
        PolySymbol::new((0..n).map(|i| Component::Poly(MultiPoly::coordinate(i, n))).collect())
    }

    /// `(phi_1(z_1), ..., phi_n(z_n))`.
    pub fn coordinatewise(maps: Vec<SymbolMap>) -> Result<Self> {
        PolySymbol::new(maps.into_iter().enumerate().map(|(axis, map)| Component::Axis { axis, map }).collect())
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn eval(&self, z: &Point) -> Result<Point> {
        if z.dim() != self.dim() {
            return Err(Error::InvalidParameter(format!(
                "point of dimension {} for a symbol of dimension {}",
                z.dim(),
                self.dim()
            )));
        }
        Ok(Point::new(self.components.iter().map(|c| c.eval_unchecked(z.coords())).collect()))
    }

    /// Sup over the `grid_size^n` torus grid of the largest coordinate modulus.
    pub fn self_map_check(&self, grid_size: usize) -> Result<SelfMapReport> {
        check_grid(grid_size)?;
        let n = self.dim();
        let total = grid_size.checked_pow(n as u32).filter(|t| *t <= 10_000_000).ok_or_else(|| {
            Error::InvalidParameter(format!("torus grid {grid_size}^{n} exceeds the point budget"))
        })?;
        let circle: Vec<Complex64> = (0..grid_size)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / grid_size as f64))
            .collect();
        let mut report = SelfMapReport { sup_modulus: 0.0, worst_point: Point::new(vec![ONE; n]), passed: true };
        let mut z = vec![ONE; n];
        for mut idx in 0..total {
            for zi in z.iter_mut() {
                *zi = circle[idx % grid_size];
                idx /= grid_size;
            }
            let m = self.components.iter().map(|c| c.eval_unchecked(&z).norm()).fold(0.0, f64::max);
            if m > report.sup_modulus {
                report.sup_modulus = m;
                report.worst_point = Point::new(z.clone());
            }
        }
        report.passed = report.sup_modulus <= 1.0 + SELF_MAP_SLACK;
        Ok(report)
    }
}
