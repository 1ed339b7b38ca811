//! Positive-semidefinite certificates on finite point sets.
//!
//! A kernel is tested through its Gram matrices. Finite data can refute
//! positivity or boundedness, and it can bound an operator norm from below.
//! It can never prove global positivity, so a `psd` verdict only says the
//! sample is consistent with the claim.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eigen, trace_re, CMatrix};
use crate::spaces::{Point, SpaceDescriptor};
use crate::symbols::{MultiPoly, PolySymbol, SymbolMap, Weight};
use crate::{Error, Result};

/// Points closer than this are treated as duplicates.
pub const MIN_SEPARATION: f64 = 1e-10;
/// Relative spectral cutoff for whitening and pseudo-inverses.
pub const SPECTRAL_CUTOFF: f64 = 1e-12;
const RANGE_TOL: f64 = 1e-8;

/// `1e-12 * max(1, trace)`, the tolerance used for every PSD verdict.
pub fn tau_psd(g: &CMatrix) -> f64 {
    1e-12 * trace_re(g).max(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Explicit,
    RadialGrid { radii: usize, angles: usize, min_radius: f64, max_radius: f64 },
    Random { count: usize, seed: u64 },
    /// Radial grid plus points on the ray where kernel ratios of an
    /// automorphism approach the norm.
    TargetedGrid { radii: usize, angles: usize, ray: Complex64, ray_radii: Vec<f64> },
    Union,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointSet {
    points: Vec<Point>,
    provenance: Provenance,
}

impl PointSet {
    pub fn new(points: Vec<Point>, provenance: Provenance) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let dim = points[0].dim();
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::InvalidParameter("points of mixed dimension".into()));
            }
            if p.coords().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::InvalidParameter(format!("non-finite point {p}")));
            }
            for q in &points[..i] {
                if separation(p, q) < MIN_SEPARATION {
                    return Err(Error::InvalidParameter(format!("points {q} and {p} are closer than {MIN_SEPARATION:e}")));
                }
            }
        }
        Ok(PointSet { points, provenance })
    }

    pub fn explicit(points: Vec<Point>) -> Result<Self> {
        PointSet::new(points, Provenance::Explicit)
    }

    /// `radii` equally spaced radii in `[min_radius, max_radius]` times
    /// `angles` equally spaced angles.
    pub fn radial_grid(radii: usize, angles: usize, min_radius: f64, max_radius: f64) -> Result<Self> {
        if radii == 0 || angles == 0 || !(0.0 < min_radius && min_radius <= max_radius && max_radius < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "grid needs radii, angles >= 1 and 0 < {min_radius} <= {max_radius} < 1"
            )));
        }
        let pts = grid_points(radii, angles, min_radius, max_radius);
        PointSet::new(pts, Provenance::RadialGrid { radii, angles, min_radius, max_radius })
    }

    /// The default grid (8 radii from 0.1 to 0.95 by 16 angles), extended by
    /// points `-(p/|p|) r` for `r` in `ray_radii` when `p` is nonzero.
    pub fn targeted_grid(radii: usize, angles: usize, p: Complex64, ray_radii: &[f64]) -> Result<Self> {
        if radii == 0 || angles == 0 {
            return Err(Error::InvalidParameter("grid needs radii, angles >= 1".into()));
        }
        let mut pts = grid_points(radii, angles, 0.1, 0.95);
        let ray = if p.norm() > 0.0 { -p / p.norm() } else { Complex64::new(-1.0, 0.0) };
        for &r in ray_radii {
            if !(0.0 < r && r < 1.0) {
                return Err(Error::InvalidParameter(format!("ray radius {r} outside (0, 1)")));
            }
            pts.push(Point::disk(ray * r));
        }
        PointSet::new(pts, Provenance::TargetedGrid { radii, angles, ray, ray_radii: ray_radii.to_vec() })
    }

    /// The default certificate grid for a symbol with `phi(0) = p`.
    pub fn default_grid(p: Complex64) -> Result<Self> {
        PointSet::targeted_grid(8, 16, p, &[0.99, 0.995, 0.999])
    }

    /// `count` points of the `dim`-fold polydisc, each coordinate uniform in
    /// the disk, from a ChaCha8 stream seeded with `seed`.
    pub fn random(count: usize, seed: u64, dim: usize) -> Result<Self> {
        if count == 0 || dim == 0 {
            return Err(Error::InvalidParameter("random point set needs count, dim >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..count).map(|_| Point::new((0..dim).map(|_| random_disk_point(&mut rng)).collect())).collect();
        PointSet::new(pts, Provenance::Random { count, seed })
    }

    /// Union of two point sets, for refinement studies; `other` goes last.
    pub fn union(&self, other: &PointSet) -> Result<Self> {
        let mut pts = self.points.clone();
        pts.extend(other.points.iter().cloned());
        PointSet::new(pts, Provenance::Union)
    }

    /// Union that skips points of `other` already present in `self`, so
    /// overlapping grids can be chained into a refinement sequence.
    pub fn refine(&self, other: &PointSet) -> Result<Self> {
        let mut pts = self.points.clone();
        for q in other.points() {
            if !pts.iter().any(|x| separation(x, q) < MIN_SEPARATION) {
                pts.push(q.clone());
            }
        }
        PointSet::new(pts, Provenance::Union)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Parse `{"points": [...]}`, `{"grid": {"radii": k, "angles": m}}` or
    /// `{"random": {"count": k, "seed": s}}`. Points are `[re, im]` pairs or
    /// lists of pairs for several variables.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawPointSet = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        match raw {
            RawPointSet::Points { points } => PointSet::explicit(
                points
                    .into_iter()
                    .map(|p| match p {
                        RawPoint::Disk(z) => Point::disk(z),
                        RawPoint::Poly(zs) => Point::new(zs),
                    })
                    .collect(),
            ),
            RawPointSet::Grid { grid } => PointSet::radial_grid(
                grid.radii,
                grid.angles,
                grid.min_radius.unwrap_or(0.1),
                grid.max_radius.unwrap_or(0.95),
            ),
            RawPointSet::Random { random } => PointSet::random(random.count, random.seed, random.dim.unwrap_or(1)),
        }
    }
}

fn grid_points(radii: usize, angles: usize, lo: f64, hi: f64) -> Vec<Point> {
    let mut pts = Vec::with_capacity(radii * angles);
    for i in 0..radii {
        let r = if radii == 1 { hi } else { lo + (hi - lo) * i as f64 / (radii - 1) as f64 };
        for j in 0..angles {
            pts.push(Point::disk(Complex64::from_polar(r, 2.0 * PI * j as f64 / angles as f64)));
        }
    }
    pts
}

fn separation(p: &Point, q: &Point) -> f64 {
    p.coords().iter().zip(q.coords()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn random_disk_point(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawPoint {
    Disk(Complex64),
    Poly(Vec<Complex64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    radii: usize,
    angles: usize,
    min_radius: Option<f64>,
    max_radius: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRandom {
    count: usize,
    seed: u64,
    dim: Option<usize>,
}

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum RawPointSet {
    Points { points: Vec<RawPoint> },
    Grid { grid: RawGrid },
    Random { random: RawRandom },
}

/// A map of the domain into itself, in one or several variables.
#[derive(Clone, Debug, PartialEq)]
pub enum PointMap {
    Disk(SymbolMap),
    Poly(PolySymbol),
}

impl PointMap {
    pub fn apply(&self, x: &Point) -> Result<Point> {
        match self {
            PointMap::Disk(phi) => Ok(Point::disk(phi.eval(x.z())?)),
            PointMap::Poly(phi) => phi.eval(x),
        }
    }

    fn describe(&self) -> String {
        match self {
            PointMap::Disk(phi) => phi.kind_name().to_string(),
            PointMap::Poly(phi) => format!("poly[{}]", phi.dim()),
        }
    }
}

/// A scalar function on the domain, used for multipliers and rank-one kernels.
#[derive(Clone, Debug, PartialEq)]
pub enum PointFunction {
    Disk(Weight),
    Poly(MultiPoly),
}

impl PointFunction {
    pub fn constant(c: Complex64) -> Self {
        PointFunction::Disk(Weight::constant(c))
    }

    pub fn eval(&self, x: &Point) -> Result<Complex64> {
        match self {
            PointFunction::Disk(w) => w.eval(x.z()),
            PointFunction::Poly(p) => Ok(p.eval(x.coords())),
        }
    }
}

/// Expressions built from space kernels by the operations that preserve
/// positivity, plus a difference for certificate matrices.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelExpr {
    Space(SpaceDescriptor),
    Constant(f64),
    Sum(Box<KernelExpr>, Box<KernelExpr>),
    Product(Box<KernelExpr>, Box<KernelExpr>),
    Scale(f64, Box<KernelExpr>),
    /// Not a kernel in general; used for `c^2 k_2 - k_1` and multiplier kernels.
    Diff(Box<KernelExpr>, Box<KernelExpr>),
    /// `f(x) conj(f(y))`.
    RankOne(PointFunction),
    /// `psi(x) conj(psi(y)) k(phi(x), phi(y))`.
    Pullback { base: Box<KernelExpr>, phi: PointMap, psi: Option<PointFunction> },
}

impl KernelExpr {
    pub fn space(s: SpaceDescriptor) -> Self {
        KernelExpr::Space(s)
    }

    pub fn sum(a: KernelExpr, b: KernelExpr) -> Self {
        KernelExpr::Sum(Box::new(a), Box::new(b))
    }

    pub fn product(a: KernelExpr, b: KernelExpr) -> Self {
        KernelExpr::Product(Box::new(a), Box::new(b))
    }

    pub fn scale(c: f64, a: KernelExpr) -> Self {
        KernelExpr::Scale(c, Box::new(a))
    }

    pub fn diff(a: KernelExpr, b: KernelExpr) -> Self {
        KernelExpr::Diff(Box::new(a), Box::new(b))
    }

    pub fn rank_one(f: PointFunction) -> Self {
        KernelExpr::RankOne(f)
    }

    /// `(1 - psi(x) conj(psi(y))) k(x, y)`; positive exactly when `psi` is a
    /// contractive multiplier of `H(k)`.
    pub fn multiplier(base: KernelExpr, psi: PointFunction) -> Self {
        KernelExpr::product(KernelExpr::diff(KernelExpr::Constant(1.0), KernelExpr::RankOne(psi)), base)
    }

    pub fn eval(&self, x: &Point, y: &Point) -> Result<Complex64> {
        Ok(match self {
            KernelExpr::Space(s) => s.kernel_eval(x, y)?,
            KernelExpr::Constant(c) => Complex64::new(*c, 0.0),
            KernelExpr::Sum(a, b) => a.eval(x, y)? + b.eval(x, y)?,
            KernelExpr::Product(a, b) => a.eval(x, y)? * b.eval(x, y)?,
            KernelExpr::Scale(c, a) => a.eval(x, y)? * *c,
            KernelExpr::Diff(a, b) => a.eval(x, y)? - b.eval(x, y)?,
            KernelExpr::RankOne(f) => f.eval(x)? * f.eval(y)?.conj(),
            KernelExpr::Pullback { base, phi, psi } => {
                let k = base.eval(&phi.apply(x)?, &phi.apply(y)?)?;
                match psi {
                    Some(psi) => psi.eval(x)? * psi.eval(y)?.conj() * k,
                    None => k,
                }
            }
        })
    }

    /// Whether the construction guarantees positivity.
    pub fn is_kernel(&self) -> bool {
        match self {
            KernelExpr::Space(_) | KernelExpr::RankOne(_) => true,
            KernelExpr::Constant(c) => *c >= 0.0,
            KernelExpr::Sum(a, b) | KernelExpr::Product(a, b) => a.is_kernel() && b.is_kernel(),
            KernelExpr::Scale(c, a) => *c >= 0.0 && a.is_kernel(),
            KernelExpr::Diff(..) => false,
            KernelExpr::Pullback { base, .. } => base.is_kernel(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            KernelExpr::Space(s) => s.name().to_string(),
            KernelExpr::Constant(c) => format!("{c}"),
            KernelExpr::Sum(a, b) => format!("({} + {})", a.describe(), b.describe()),
            KernelExpr::Product(a, b) => format!("({} * {})", a.describe(), b.describe()),
            KernelExpr::Scale(c, a) => format!("{c} * {}", a.describe()),
            KernelExpr::Diff(a, b) => format!("({} - {})", a.describe(), b.describe()),
            KernelExpr::RankOne(_) => "rank_one".to_string(),
            KernelExpr::Pullback { base, phi, psi } => format!(
                "pullback({}, {}{})",
                base.describe(),
                phi.describe(),
                if psi.is_some() { ", weighted" } else { "" }
            ),
        }
    }
}

/// `psi(x) conj(psi(y)) k(phi(x), phi(y))`, the kernel of the image of `H(k)`
/// under the weighted composition operator.
pub fn pullback_kernel(base: KernelExpr, phi: PointMap, psi: Option<PointFunction>) -> KernelExpr {
    KernelExpr::Pullback { base: Box::new(base), phi, psi }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramMatrix {
    #[serde(serialize_with = "serialize_matrix")]
    pub entries: CMatrix,
    pub points: PointSet,
    pub kernel_id: String,
}

fn serialize_matrix<S: serde::Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<Complex64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(s)
}

/// `G[i][j] = k(x_i, x_j)`, assembled on the upper triangle and mirrored so
/// the result is exactly Hermitian with a real diagonal.
pub fn gram(kernel: &KernelExpr, points: &PointSet) -> Result<GramMatrix> {
    let pts = points.points();
    let n = pts.len();
    if n == 0 {
        return Err(Error::EmptyPointSet);
    }
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| (i..n).map(|j| kernel.eval(&pts[i], &pts[j])).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut entries = CMatrix::zeros(n, n);
    for (i, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + off;
            if i == j {
                entries[(i, i)] = Complex64::new(v.re, 0.0);
            } else {
                entries[(i, j)] = v;
                entries[(j, i)] = v.conj();
            }
        }
    }
    Ok(GramMatrix { entries, points: points.clone(), kernel_id: kernel.describe() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Psd,
    NotPsd,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    /// The constant under test, when there is one.
    pub c: Option<f64>,
    pub min_eigenvalue: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
    pub regularization: f64,
    pub point_count: usize,
    pub provenance: Provenance,
    pub kernel_id: String,
}

impl Certificate {
    pub fn is_psd(&self) -> bool {
        self.verdict == Verdict::Psd
    }
}

/// Smallest eigenvalue of a Hermitian matrix and the verdict against
/// `tol` (default [`tau_psd`]).
pub fn psd_verdict(m: &CMatrix, tol: Option<f64>) -> Result<(f64, Verdict, f64)> {
    let tol = tol.unwrap_or_else(|| tau_psd(m));
    let eig = hermitian_eigen(m)?;
    let min = eig.min();
    let verdict = if min >= -tol { Verdict::Psd } else { Verdict::NotPsd };
    Ok((min, verdict, tol))
}

fn certificate(m: &CMatrix, c: Option<f64>, points: &PointSet, kernel_id: String, tol: Option<f64>) -> Result<Certificate> {
    let (min_eigenvalue, verdict, tolerance) = psd_verdict(m, tol)?;
    Ok(Certificate {
        c,
        min_eigenvalue,
        verdict,
        tolerance,
        regularization: 0.0,
        point_count: points.len(),
        provenance: points.provenance().clone(),
        kernel_id,
    })
}

pub fn psd_check(g: &GramMatrix, tol: Option<f64>) -> Result<Certificate> {
    certificate(&g.entries, None, &g.points, g.kernel_id.clone(), tol)
}

/// PSD test of `c^2 k(x_i, x_j) - f(x_i) conj(f(x_j))`. Failure proves
/// `||f|| > c`; success is consistent with `||f|| <= c`.
pub fn membership_test(kernel: &KernelExpr, f_values: &[Complex64], points: &PointSet, c: f64) -> Result<Certificate> {
    check_c(c)?;
    if f_values.len() != points.len() {
        return Err(Error::InvalidParameter(format!("{} values for {} points", f_values.len(), points.len())));
    }
    let g = gram(kernel, points)?;
    let m = CMatrix::from_fn(points.len(), points.len(), |i, j| g.entries[(i, j)] * (c * c) - f_values[i] * f_values[j].conj());
    certificate(&m, Some(c), points, format!("c^2 {} - f f*", g.kernel_id), None)
}

/// PSD test of `c^2 k_2 - k_1`, the finite form of `H(k_1) in H(k_2)` with
/// inclusion norm at most `c`.
pub fn inclusion_test(k1: &KernelExpr, k2: &KernelExpr, c: f64, points: &PointSet) -> Result<Certificate> {
    check_c(c)?;
    let g1 = gram(k1, points)?;
    let g2 = gram(k2, points)?;
    let m = g2.entries.scale(c * c) - &g1.entries;
    certificate(&m, Some(c), points, format!("c^2 {} - {}", g2.kernel_id, g1.kernel_id), None)
}

fn check_c(c: f64) -> Result<()> {
    if c >= 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("c must be a finite nonnegative number, got {c}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinC {
    pub c_min: f64,
    /// `lambda_max / |lambda_min|` of `G_2 + reg I`; `lambda_min` may round
    /// to a tiny negative number when the Gram is numerically singular.
    pub condition_number: f64,
    /// Set when whitening dropped directions below the spectral cutoff.
    pub ill_conditioned: bool,
    pub kept_rank: usize,
    pub point_count: usize,
    pub regularization: f64,
}

/// Smallest `c` with `c^2 G_2 - G_w` PSD on the sample, where `G_2` is the
/// Gram of `k_2` and `G_w` that of the pullback of `k_1`. This is a lower
/// bound for the norm of `W_{phi,psi} : H(k_1) -> H(k_2)` when bounded.
///
/// Solved as `sqrt(lambda_max(G_2^{-1} G_w))` by whitening with the
/// eigenvectors of `G_2 + reg I` above `1e-12 lambda_max`. Restricting to a
/// subspace can only lower the Rayleigh quotient, so the cutoff keeps the
/// lower-bound property.
pub fn min_c(
    k2: &KernelExpr,
    k1: &KernelExpr,
    phi: &PointMap,
    psi: Option<&PointFunction>,
    points: &PointSet,
    reg: f64,
) -> Result<MinC> {
    if !(reg >= 0.0) {
        return Err(Error::InvalidParameter(format!("regularization must be nonnegative, got {reg}")));
    }
    let g2 = gram(k2, points)?.entries;
    let n = points.len();
    // G_w = m^2 D K_phi D^H with D = diag(psi) / m and m = max |psi|, so a
    // constant multiplier leaves the eigenproblem bit-for-bit unchanged
    let k_phi = gram(&pullback_kernel(k1.clone(), phi.clone(), None), points)?.entries;
    let psi_vals: Vec<Complex64> = match psi {
        Some(f) => points.points().iter().map(|x| f.eval(x)).collect::<Result<_>>()?,
        None => vec![Complex64::new(1.0, 0.0); n],
    };
    let m = psi_vals.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    if m == 0.0 {
        return Ok(MinC { c_min: 0.0, condition_number: f64::NAN, ill_conditioned: false, kept_rank: 0, point_count: n, regularization: reg });
    }
    let d: Vec<Complex64> = psi_vals.iter().map(|v| v / m).collect();
    let gw = CMatrix::from_fn(n, n, |i, j| d[i] * k_phi[(i, j)] * d[j].conj());
    let shifted = &g2 + CMatrix::identity(n, n).scale(reg);
    let eig = hermitian_eigen(&shifted)?;
    let top = eig.max();
    if !(top > 0.0) {
        return Err(Error::NumericalBreakdown("Gram matrix of the target kernel has no positive eigenvalue".into()));
    }
    let keep: Vec<usize> = (0..n).filter(|&k| eig.values[k] > SPECTRAL_CUTOFF * top).collect();
    let w = CMatrix::from_fn(n, keep.len(), |i, j| eig.vectors[(i, keep[j])] / eig.values[keep[j]].sqrt());
    let b = w.adjoint() * &gw * &w;
    let lam = hermitian_eigen(&b)?.max();
    Ok(MinC {
        c_min: m * lam.max(0.0).sqrt(),
        condition_number: top / eig.min().abs(),
        ill_conditioned: keep.len() < n,
        kept_rank: keep.len(),
        point_count: n,
        regularization: reg,
    })
}

/// `sqrt(g^H G^+ g)`, the norm in the finite RKHS with Gram `G` of the
/// function with values `g`. Fails with `NotInSpace` when `g` has a
/// component outside the numerical range of `G`.
pub fn finite_rkhs_norm(g_matrix: &CMatrix, g: &[Complex64]) -> Result<f64> {
    let n = g_matrix.nrows();
    if g.len() != n {
        return Err(Error::InvalidParameter(format!("{} values for a {n}x{n} Gram matrix", g.len())));
    }
    let eig = hermitian_eigen(g_matrix)?;
    let top = eig.max().max(0.0);
    let mut norm_sq = 0.0;
    let mut outside = 0.0;
    for k in 0..n {
        let c: Complex64 = (0..n).map(|i| eig.vectors[(i, k)].conj() * g[i]).sum();
        if eig.values[k] > SPECTRAL_CUTOFF * top {
            norm_sq += c.norm_sqr() / eig.values[k];
        } else {
            outside += c.norm_sqr();
        }
    }
    let gnorm = g.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let resid = if gnorm > 0.0 { outside.sqrt() / gnorm } else { 0.0 };
    if resid > RANGE_TOL {
        return Err(Error::NotInSpace(resid));
    }
    Ok(norm_sq.sqrt())
}

/// Gram of the pullback kernel on a finite set `S`, with `phi` given as
/// indices into the points of `X` carrying `kappa`.
pub fn finite_pullback_gram(kappa: &CMatrix, phi: &[usize], psi: &[Complex64]) -> Result<CMatrix> {
    if phi.len() != psi.len() {
        return Err(Error::InvalidParameter("phi and psi must have the same length".into()));
    }
    if let Some(&bad) = phi.iter().find(|&&i| i >= kappa.nrows()) {
        return Err(Error::InvalidParameter(format!("phi maps to index {bad} outside X")));
    }
    let m = phi.len();
    Ok(CMatrix::from_fn(m, m, |s, t| psi[s] * psi[t].conj() * kappa[(phi[s], phi[t])]))
}

fn draw(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
}

/// A random finite weighted-composition instance on a 5-point set.
#[derive(Clone, Debug)]
pub struct FiniteInstance {
    pub kappa: CMatrix,
    pub phi: Vec<usize>,
    pub psi: Vec<Complex64>,
    /// Values of `g = psi (f o phi)` for a random `f` in `H(kappa)`.
    pub g: Vec<Complex64>,
}

impl FiniteInstance {
    /// Draw an instance: `kappa = B B^H` with `B` of random rank 2 to 5, a
    /// random self-map `phi`, a random multiplier and `f = kappa c`.
    pub fn random(rng: &mut impl Rng) -> Self {
        let n = 5;
        let rank = rng.gen_range(2..=n);
        let b = CMatrix::from_fn(n, rank, |_, _| draw(rng));
        let kappa = &b * b.adjoint();
        let phi: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let psi: Vec<Complex64> = (0..n).map(|_| draw(rng)).collect();
        let coef = crate::linalg::CVector::from_fn(n, |_, _| draw(rng));
        let f = &kappa * coef;
        let g = (0..n).map(|s| psi[s] * f[phi[s]]).collect();
        FiniteInstance { kappa, phi, psi, g }
    }
}
