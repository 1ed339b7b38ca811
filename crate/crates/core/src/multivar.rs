//! Lower bounds for composition operators in several variables: Hardy and
//! Bergman spaces of the polydisc, the star-norm comparison and the ball.
//!
//! Every bound here is a supremum over a finite grid, hence itself a lower
//! bound of the true supremum. Grid points are evaluated in parallel and
//! reduced in index order, so reports do not depend on the thread count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spaces::{weighted_geometric_series, MultiIndexTruncation, Point};
use crate::symbols::PolySymbol;
use crate::{Error, Result};

pub const DEFAULT_POINT_BUDGET: usize = 1_000_000;

/// Per-axis grid `{0} + {r_k e^{i theta_j}}` with `r_k = k max_radius / (R-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub radii_per_axis: usize,
    pub angles_per_axis: usize,
    pub max_radius: f64,
}

impl GridSpec {
    pub fn new(radii_per_axis: usize, angles_per_axis: usize, max_radius: f64) -> Result<Self> {
        if radii_per_axis == 0 || angles_per_axis == 0 {
            return Err(Error::InvalidParameter("grid needs at least one radius and one angle".into()));
        }
        if !(0.0..1.0).contains(&max_radius) {
            return Err(Error::InvalidParameter(format!("max_radius must lie in [0, 1), got {max_radius}")));
        }
        Ok(GridSpec { radii_per_axis, angles_per_axis, max_radius })
    }

    /// `R x A` grid with the default radius 0.99.
    pub fn square(radii: usize, angles: usize) -> Result<Self> {
        GridSpec::new(radii, angles, 0.99)
    }

    /// Points of one axis. Radius zero is listed once.
    pub fn axis_points(&self) -> Vec<Complex64> {
        let mut pts = vec![Complex64::new(0.0, 0.0)];
        let r = self.radii_per_axis;
        for k in 1..r {
            let radius = self.max_radius * k as f64 / (r - 1) as f64;
            for j in 0..self.angles_per_axis {
                pts.push(Complex64::from_polar(radius, 2.0 * PI * j as f64 / self.angles_per_axis as f64));
            }
        }
        pts
    }

    pub fn point_count(&self, n: usize) -> Option<usize> {
        self.axis_points().len().checked_pow(n as u32)
    }

    fn check_budget(&self, n: usize, budget: usize) -> Result<usize> {
        match self.point_count(n) {
            Some(c) if c <= budget => Ok(c),
            _ => Err(Error::InvalidParameter(format!("grid exceeds the point budget of {budget} in dimension {n}"))),
        }
    }
}

/// The `index`-th point of the product grid, first axis varying fastest.
fn product_point(axis: &[Complex64], n: usize, mut index: usize) -> Point {
    let mut z = Vec::with_capacity(n);
    for _ in 0..n {
        z.push(axis[index % axis.len()]);
        index /= axis.len();
    }
    Point::new(z)
}

/// Evaluate `f` on every grid point and return the first maximizer.
fn grid_sup<F>(n: usize, grid: &GridSpec, budget: usize, f: F) -> Result<(f64, Point, Vec<f64>)>
where
    F: Fn(&Point) -> Result<f64> + Sync,
{
    let count = grid.check_budget(n, budget)?;
    let axis = grid.axis_points();
    let values: Vec<f64> = (0..count).into_par_iter().map(|i| f(&product_point(&axis, n, i))).collect::<Result<_>>()?;
    let (best, val) = values.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
    Ok((val, product_point(&axis, n, best), values))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridBound {
    pub sup: f64,
    pub argmax: Point,
    pub grid: GridSpec,
}

fn image_inside(phi: &PolySymbol, z: &Point) -> Result<Point> {
    let w = phi.eval(z)?;
    for (i, c) in w.coords().iter().enumerate() {
        if c.norm() >= 1.0 {
            return Err(Error::SelfMapViolationDetected { coordinate: i + 1, modulus: c.norm(), point: z.to_string() });
        }
    }
    Ok(w)
}

fn product_ratio(phi: &PolySymbol, z: &Point) -> Result<f64> {
    let w = image_inside(phi, z)?;
    Ok(z.coords().iter().zip(w.coords()).map(|(a, b)| (1.0 - a.norm_sqr()) / (1.0 - b.norm_sqr())).product())
}

/// Grid sup of `prod (1 - |z_i|^2) / (1 - |phi_i(z)|^2)`, a lower bound for
/// `||C_phi||^2` on the Hardy space of the polydisc.
pub fn polydisc_hardy_lower(phi: &PolySymbol, grid: &GridSpec) -> Result<GridBound> {
    let (sup, argmax, _) = grid_sup(phi.dim(), grid, DEFAULT_POINT_BUDGET, |z| product_ratio(phi, z))?;
    Ok(GridBound { sup, argmax, grid: *grid })
}

/// The same product raised to `alpha + 2`, for the weighted Bergman space.
pub fn polydisc_bergman_lower(phi: &PolySymbol, alpha: f64, grid: &GridSpec) -> Result<GridBound> {
    check_alpha(alpha)?;
    let (sup, argmax, _) =
        grid_sup(phi.dim(), grid, DEFAULT_POINT_BUDGET, |z| Ok(product_ratio(phi, z)?.powf(alpha + 2.0)))?;
    Ok(GridBound { sup, argmax, grid: *grid })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > -1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must exceed -1, got {alpha}")))
    }
}

/// `prod_i sum_k |z_i|^{2k} (k+1)^exponent`.
fn weight_product(z: &Point, exponent: f64, trunc: &MultiIndexTruncation) -> Result<f64> {
    let mut acc = 1.0;
    for c in z.coords() {
        acc *= weighted_geometric_series(Complex64::new(c.norm_sqr(), 0.0), exponent, trunc)?.re;
    }
    Ok(acc)
}

/// Ratio of star-norm kernel diagonals at `phi(z)` and `z`.
pub fn star_ratio(phi: &PolySymbol, alpha: f64, z: &Point, trunc: &MultiIndexTruncation) -> Result<f64> {
    check_alpha(alpha)?;
    let w = image_inside(phi, z)?;
    Ok(weight_product(&w, 1.0 + alpha, trunc)? / weight_product(z, 1.0 + alpha, trunc)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    /// Sup of the quantity with weights `(s+1)^{-1-alpha}` above and
    /// `(s+1)^{1+alpha}` below, exponents as in the published statement.
    pub a: f64,
    /// Sup of [`star_ratio`], the improved lower bound.
    pub improved: f64,
    /// Variant with `(s+1)^{-1-alpha}` in both sums. Not part of the
    /// published statement; kept for comparison. The other symmetric choice,
    /// `(s+1)^{1+alpha}` in both, coincides with `improved`.
    pub a_symmetric: f64,
    pub grid_argmax: Point,
    pub a_argmax: Point,
    /// Largest `A(z) - star_ratio(z)` over the grid; never positive in exact
    /// arithmetic since `(s+1)^{-1-alpha} <= (s+1)^{1+alpha}`.
    pub max_chain_excess: f64,
    pub truncation: MultiIndexTruncation,
    pub grid: Option<GridSpec>,
}

struct JafariPoint {
    a: f64,
    star: f64,
    sym: f64,
}

fn jafari_point(phi: &PolySymbol, alpha: f64, z: &Point, trunc: &MultiIndexTruncation) -> Result<JafariPoint> {
    let w = image_inside(phi, z)?;
    let num_minus = weight_product(&w, -1.0 - alpha, trunc)?;
    let num_plus = weight_product(&w, 1.0 + alpha, trunc)?;
    let den_plus = weight_product(z, 1.0 + alpha, trunc)?;
    let den_minus = weight_product(z, -1.0 - alpha, trunc)?;
    Ok(JafariPoint { a: num_minus / den_plus, star: num_plus / den_plus, sym: num_minus / den_minus })
}

/// Jafari's quantity `A` against the star-ratio bound on explicit points.
pub fn jafari_a(phi: &PolySymbol, alpha: f64, points: &[Point], trunc: &MultiIndexTruncation) -> Result<BoundReport> {
    check_alpha(alpha)?;
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let vals: Vec<JafariPoint> = points.par_iter().map(|z| jafari_point(phi, alpha, z, trunc)).collect::<Result<_>>()?;
    Ok(summarize(&vals, |i| points[i].clone(), trunc, None))
}

/// [`jafari_a`] over a product grid.
pub fn jafari_a_grid(phi: &PolySymbol, alpha: f64, grid: &GridSpec, trunc: &MultiIndexTruncation) -> Result<BoundReport> {
    check_alpha(alpha)?;
    let n = phi.dim();
    let count = grid.check_budget(n, DEFAULT_POINT_BUDGET)?;
    let axis = grid.axis_points();
    let vals: Vec<JafariPoint> = (0..count)
        .into_par_iter()
        .map(|i| jafari_point(phi, alpha, &product_point(&axis, n, i), trunc))
        .collect::<Result<_>>()?;
    Ok(summarize(&vals, |i| product_point(&axis, n, i), trunc, Some(*grid)))
}

fn summarize(vals: &[JafariPoint], point: impl Fn(usize) -> Point, trunc: &MultiIndexTruncation, grid: Option<GridSpec>) -> BoundReport {
    let argmax = |key: &dyn Fn(&JafariPoint) -> f64| {
        vals.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, v)| if key(v) > acc.1 { (i, key(v)) } else { acc })
    };
    let (ia, a) = argmax(&|v| v.a);
    let (is, improved) = argmax(&|v| v.star);
    let (_, a_symmetric) = argmax(&|v| v.sym);
    let max_chain_excess = vals.iter().map(|v| v.a - v.star).fold(f64::NEG_INFINITY, f64::max);
    BoundReport {
        a,
        improved,
        a_symmetric,
        grid_argmax: point(is),
        a_argmax: point(ia),
        max_chain_excess,
        truncation: *trunc,
        grid,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BallBound {
    /// `(1 - |phi(0)|^2)^{-n/2}`.
    pub bound: f64,
    /// `{2 (1 - |phi(0)|)}^{-n/2}`, the earlier and weaker estimate.
    pub weaker: f64,
}

/// Lower bounds for `||C_phi||` on the Hardy space of the unit ball of `C^n`.
pub fn ball_lower(phi0: &Point, n: usize) -> Result<BallBound> {
    if n == 0 || phi0.dim() != n {
        return Err(Error::DomainError(format!("phi(0) has dimension {} but n = {n}", phi0.dim())));
    }
    let m2 = phi0.norm_sqr();
    if m2 >= 1.0 {
        return Err(Error::DomainError(format!("|phi(0)| = {} is not inside the ball", m2.sqrt())));
    }
    let e = -(n as f64) / 2.0;
    Ok(BallBound { bound: (1.0 - m2).powf(e), weaker: (2.0 * (1.0 - m2.sqrt())).powf(e) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::SpaceDescriptor;
    use crate::symbols::{Component, MultiPoly, SymbolMap};
    use crate::c64;

    fn const_first() -> PolySymbol {
        PolySymbol::new(vec![
            Component::Poly(MultiPoly::constant(c64(0.6, 0.0), 2)),
            Component::Poly(MultiPoly::coordinate(1, 2)),
        ])
        .unwrap()
    }

    fn z1z2_z2() -> PolySymbol {
        PolySymbol::new(vec![
            Component::Poly(MultiPoly::new(vec![(vec![1, 1], c64(1.0, 0.0))])),
            Component::Poly(MultiPoly::coordinate(1, 2)),
        ])
        .unwrap()
    }

    fn grid20() -> GridSpec {
        GridSpec::square(20, 20).unwrap()
    }

    #[test]
    fn hardy_examples() {
        assert_eq!(polydisc_hardy_lower(&PolySymbol::identity(2).unwrap(), &grid20()).unwrap().sup, 1.0);
        let b = polydisc_hardy_lower(&z1z2_z2(), &grid20()).unwrap();
        assert!((b.sup - 1.0).abs() < 1e-15);
        let b = polydisc_hardy_lower(&const_first(), &grid20()).unwrap();
        assert!((b.sup - 1.5625).abs() < 1e-12);
        assert_eq!(b.argmax.coords()[0], c64(0.0, 0.0));
    }

    #[test]
    fn bergman_examples() {
        assert_eq!(polydisc_bergman_lower(&PolySymbol::identity(2).unwrap(), 0.0, &grid20()).unwrap().sup, 1.0);
        let b = polydisc_bergman_lower(&const_first(), 0.0, &grid20()).unwrap();
        assert!((b.sup - 2.44140625).abs() < 1e-12);
        let auto = PolySymbol::coordinatewise(vec![SymbolMap::automorphism(c64(0.5, 0.0)).unwrap()]).unwrap();
        let b = polydisc_bergman_lower(&auto, 0.0, &GridSpec::new(100, 64, 0.999).unwrap()).unwrap();
        let at_edge = ((1.0 + 0.5 * 0.999f64).powi(2) / 0.75).powi(2);
        assert!((b.sup - at_edge).abs() < 1e-10 && b.sup < 9.0, "{}", b.sup);
    }

    #[test]
    fn product_structure() {
        let maps = vec![SymbolMap::automorphism(c64(0.3, 0.2)).unwrap(), SymbolMap::affine(c64(0.5, 0.0), c64(0.0, 0.4)).unwrap()];
        let grid = GridSpec::square(12, 12).unwrap();
        let joint = polydisc_hardy_lower(&PolySymbol::coordinatewise(maps.clone()).unwrap(), &grid).unwrap().sup;
        let single: f64 = maps
            .into_iter()
            .map(|m| polydisc_hardy_lower(&PolySymbol::coordinatewise(vec![m]).unwrap(), &grid).unwrap().sup)
            .product();
        assert!((joint.ln() - single.ln()).abs() < 1e-12);
    }

    #[test]
    fn grid_refinement_is_monotone() {
        let phi = PolySymbol::coordinatewise(vec![SymbolMap::automorphism(c64(0.4, 0.0)).unwrap()]).unwrap();
        // radii of the coarse grid are a subset of those of the fine grid
        let coarse = polydisc_hardy_lower(&phi, &GridSpec::new(5, 8, 0.98).unwrap()).unwrap().sup;
        let fine = polydisc_hardy_lower(&phi, &GridSpec::new(9, 16, 0.98).unwrap()).unwrap().sup;
        assert!(fine >= coarse);
    }

    #[test]
    fn self_map_violation_detected() {
        let bad = PolySymbol::new(vec![Component::Poly(MultiPoly::new(vec![(vec![1], c64(2.0, 0.0))]))]).unwrap();
        assert!(matches!(
            polydisc_hardy_lower(&bad, &GridSpec::square(5, 4).unwrap()),
            Err(Error::SelfMapViolationDetected { coordinate: 1, .. })
        ));
    }

    #[test]
    fn star_ratio_examples() {
        let t = MultiIndexTruncation::default();
        let id = PolySymbol::identity(2).unwrap();
        let z = Point::new(vec![c64(0.3, 0.1), c64(-0.5, 0.2)]);
        assert!((star_ratio(&id, 0.5, &z, &t).unwrap() - 1.0).abs() < 1e-15);
        let zero = PolySymbol::coordinatewise(vec![SymbolMap::scaled_identity(c64(0.0, 0.0)).unwrap()]).unwrap();
        assert_eq!(star_ratio(&zero, 0.0, &Point::real(0.0), &t).unwrap(), 1.0);
        let c = PolySymbol::coordinatewise(vec![SymbolMap::constant(c64(0.6, 0.0)).unwrap()]).unwrap();
        assert!((star_ratio(&c, 0.0, &Point::real(0.0), &t).unwrap() - 2.44140625).abs() < 1e-10);
    }

    #[test]
    fn star_ratio_matches_bergman_closed_form() {
        let t = MultiIndexTruncation::default();
        let phi = SymbolMap::automorphism(c64(0.2, -0.3)).unwrap();
        let poly = PolySymbol::coordinatewise(vec![phi.clone()]).unwrap();
        for k in 0..20 {
            let z = Complex64::from_polar(0.045 * k as f64, 0.9 * k as f64);
            let w = phi.eval(z).unwrap();
            let want = ((1.0 - z.norm_sqr()) / (1.0 - w.norm_sqr())).powi(2);
            assert!((star_ratio(&poly, 0.0, &Point::disk(z), &t).unwrap() - want).abs() < 1e-10 * want);
        }
        // the star kernel in one variable is the A^2_0 kernel
        let s = SpaceDescriptor::bergman_polydisc_star(1, 0.0).unwrap();
        let b = SpaceDescriptor::bergman_disk(0.0).unwrap();
        let p = Point::disk(c64(0.4, 0.3));
        assert!((s.kernel_diag(&p).unwrap() - b.kernel_diag(&p).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn jafari_examples() {
        let t = MultiIndexTruncation::default();
        let id = PolySymbol::identity(1).unwrap();
        let r = jafari_a(&id, 0.0, &[Point::real(0.5)], &t).unwrap();
        let want = (-(0.75f64.ln()) / 0.25) * 0.5625;
        assert!((r.a - want).abs() < 1e-10 && (r.a - 0.647285).abs() < 1e-6);
        assert!((r.improved - 1.0).abs() < 1e-15);
        let zero = PolySymbol::coordinatewise(vec![SymbolMap::scaled_identity(c64(0.0, 0.0)).unwrap()]).unwrap();
        let r = jafari_a(&zero, 0.0, &[Point::real(0.0)], &t).unwrap();
        assert_eq!((r.a, r.improved), (1.0, 1.0));
        let c = PolySymbol::coordinatewise(vec![SymbolMap::constant(c64(0.6, 0.0)).unwrap()]).unwrap();
        let r = jafari_a(&c, 0.0, &[Point::real(0.0)], &t).unwrap();
        assert!((r.a - (-(0.64f64.ln()) / 0.36)).abs() < 1e-10, "{}", r.a);
        assert!((r.improved - 2.44140625).abs() < 1e-10);
    }

    #[test]
    fn jafari_chain_on_grid() {
        let t = MultiIndexTruncation::default();
        for phi in [z1z2_z2(), const_first()] {
            for alpha in [0.0, 0.5, 1.5] {
                let r = jafari_a_grid(&phi, alpha, &GridSpec::new(8, 8, 0.9).unwrap(), &t).unwrap();
                assert!(r.max_chain_excess <= 1e-10 && r.a <= r.improved + 1e-10, "{r:?}");
            }
        }
    }

    #[test]
    fn ball_examples() {
        let b = ball_lower(&Point::new(vec![c64(0.0, 0.0); 3]), 3).unwrap();
        assert_eq!(b.bound, 1.0);
        assert!((b.weaker - 2f64.powf(-1.5)).abs() < 1e-15);
        let h = 0.5f64.sqrt();
        let b = ball_lower(&Point::new(vec![c64(h, 0.0), c64(0.0, 0.0)]), 2).unwrap();
        assert!((b.bound - 2.0).abs() < 1e-15);
        assert!((b.weaker - 1.0 / (2.0 * (1.0 - h))).abs() < 1e-12 && (b.weaker - 1.70711).abs() < 1e-5);
        let b = ball_lower(&Point::real(0.8), 1).unwrap();
        assert!((b.bound - 1.0 / 0.6).abs() < 1e-14);
        assert!(ball_lower(&Point::real(1.0), 1).is_err() && ball_lower(&Point::real(0.2), 2).is_err());
    }

    #[test]
    fn budget_enforced() {
        let g = GridSpec::square(100, 100).unwrap();
        assert!(polydisc_hardy_lower(&PolySymbol::identity(3).unwrap(), &g).is_err());
    }
}
