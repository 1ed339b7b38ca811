//! Independent verification routes: circle and area quadrature for norms, and
//! a least-squares solve for the finite min-norm problem.
//!
//! Nothing here reuses the coefficient formulas of [`crate::spaces`], so an
//! agreement between the two is a genuine cross-check.

use std::f64::consts::PI;

use gauss_quad::jacobi::GaussJacobi;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{CMatrix, CVector};
use crate::series::PowerSeries;
use crate::symbols::SymbolMap;
use crate::{Error, Result};

/// Denominators smaller than this on the circle are treated as poles.
pub const POLE_TOL: f64 = 1e-8;
/// Relative singular-value cutoff for pseudo-inverses.
pub const PINV_CUTOFF: f64 = 1e-12;
const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Trapezoid nodes on the circle.
    pub nodes: usize,
    /// Gauss-Jacobi nodes in the radial variable.
    pub radial_nodes: usize,
    pub seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { nodes: 1024, radial_nodes: 32, seed: 0 }
    }
}

impl QuadratureSpec {
    pub fn new(nodes: usize, radial_nodes: usize, seed: u64) -> Result<Self> {
        check_nodes(nodes)?;
        if radial_nodes < 8 {
            return Err(Error::InvalidParameter(format!("need at least 8 radial nodes, got {radial_nodes}")));
        }
        Ok(QuadratureSpec { nodes, radial_nodes, seed })
    }
}

fn check_nodes(m: usize) -> Result<()> {
    if m < 16 || !m.is_multiple_of(4) {
        return Err(Error::InvalidParameter(format!("circle node count must be a multiple of 4 and at least 16, got {m}")));
    }
    Ok(())
}

/// A function that can be evaluated on the closed unit disk.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryFunction {
    Poly(PowerSeries),
    Rational { num: PowerSeries, den: PowerSeries },
    Symbol(SymbolMap),
    /// `f o phi` for a polynomial `f`.
    Composed { f: PowerSeries, phi: SymbolMap },
}

impl BoundaryFunction {
    pub fn poly(f: PowerSeries) -> Self {
        BoundaryFunction::Poly(f)
    }

    pub fn rational(num: PowerSeries, den: PowerSeries) -> Result<Self> {
        if den.max_abs() == 0.0 {
            return Err(Error::InvalidParameter("rational function with zero denominator".into()));
        }
        Ok(BoundaryFunction::Rational { num, den })
    }

    /// Hardy kernel section `1 / (1 - conj(w) z)`.
    pub fn hardy_kernel(w: Complex64) -> Result<Self> {
        BoundaryFunction::rational(
            PowerSeries::from_real(&[1.0])?,
            PowerSeries::new(vec![Complex64::new(1.0, 0.0), -w.conj()])?,
        )
    }

    pub fn symbol(phi: SymbolMap) -> Result<Self> {
        if !phi.boundary_evaluable() {
            return Err(Error::BoundaryEvalUnsupported(phi.kind_name()));
        }
        Ok(BoundaryFunction::Symbol(phi))
    }

    pub fn composed(f: PowerSeries, phi: SymbolMap) -> Self {
        BoundaryFunction::Composed { f, phi }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            BoundaryFunction::Poly(f) => Ok(f.eval(z)),
            BoundaryFunction::Rational { num, den } => {
                let d = den.eval(z);
                if d.norm() < POLE_TOL {
                    return Err(Error::PoleNearBoundary(d.norm()));
                }
                Ok(num.eval(z) / d)
            }
            BoundaryFunction::Symbol(phi) => phi.eval(z),
            BoundaryFunction::Composed { f, phi } => Ok(f.eval(phi.eval(z)?)),
        }
    }
}

/// Sum by recursive halving down to blocks of eight, so the rounding pattern
/// depends only on the length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn circle_mean(m: usize, f: impl Fn(Complex64, f64) -> Result<f64> + Sync) -> Result<f64> {
    check_nodes(m)?;
    let vals: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|k| {
            let t = 2.0 * PI * k as f64 / m as f64;
            f(Complex64::from_polar(1.0, t), t)
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&vals) / m as f64)
}

/// Trapezoid mean of `|f|^2` over `m` equally spaced points of the circle.
pub fn circle_norm_sq(f: &BoundaryFunction, m: usize) -> Result<f64> {
    circle_mean(m, |z, _| Ok(f.eval(z)?.norm_sqr()))
}

/// Mean of `|f|^2` against the Poisson weight at `p`, which equals
/// `||f o alpha_p||^2` by the change of variable `e^{it} = alpha_p(e^{is})`.
pub fn weighted_circle_norm_sq(f: &BoundaryFunction, p: Complex64, m: usize) -> Result<f64> {
    if p.norm() >= 1.0 {
        return Err(Error::DomainError(format!("|p| must be below 1, got {}", p.norm())));
    }
    let scale = 1.0 - p.norm_sqr();
    circle_mean(m, |z, _| {
        let w = scale / (Complex64::new(1.0, 0.0) - p.conj() * z).norm_sqr();
        Ok(f.eval(z)?.norm_sqr() * w)
    })
}

/// Mean of `|f|^2` over the circle after the substitution
/// `e^{it} = alpha_q(e^{is})`, which clusters the `m` nodes near `q/|q|`.
///
/// The plain trapezoid rule converges like `rho^{-m}` when `|f|^2` extends
/// to the annulus `1/rho < |z| < rho`; a pole just outside the circle at
/// `1/beta` makes that slow. With real `q = (1 - sqrt(1 - beta^2)) / beta`
/// the pole and the Jacobian singularity both move to radius `1/q`.
pub fn mobius_circle_norm_sq(f: &BoundaryFunction, q: Complex64, m: usize) -> Result<f64> {
    if q.norm() >= 1.0 {
        return Err(Error::DomainError(format!("|q| must be below 1, got {}", q.norm())));
    }
    let auto = SymbolMap::automorphism(q)?;
    let scale = 1.0 - q.norm_sqr();
    circle_mean(m, |z, _| {
        let jac = scale / (Complex64::new(1.0, 0.0) - q.conj() * z).norm_sqr();
        Ok(f.eval(auto.eval_unchecked(z))?.norm_sqr() * jac)
    })
}

/// Substitution centre that balances a single pole at radius `1/beta`.
pub fn balancing_center(beta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::DomainError(format!("pole parameter must lie in [0, 1), got {beta}")));
    }
    Ok(if beta == 0.0 { 0.0 } else { (1.0 - (1.0 - beta * beta).sqrt()) / beta })
}

/// `int |f|^2 (alpha+1)(1-|z|^2)^alpha dA/pi` for a polynomial `f`, by the
/// trapezoid rule in angle and Gauss-Jacobi in `u = r^2`.
pub fn bergman_norm_sq(f: &PowerSeries, alpha: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must exceed -1, got {alpha}")));
    }
    check_nodes(spec.nodes)?;
    let rule = GaussJacobi::new(spec.radial_nodes, alpha, 0.0)
        .map_err(|e| Error::InvalidParameter(format!("Gauss-Jacobi rule: {e}")))?;
    let m = spec.nodes;
    let angular = |u: f64| -> f64 {
        let r = u.max(0.0).sqrt();
        let vals: Vec<f64> =
            (0..m).map(|k| f.eval(Complex64::from_polar(r, 2.0 * PI * k as f64 / m as f64)).norm_sqr()).collect();
        pairwise_sum(&vals) / m as f64
    };
    // the rule integrates (1 - x)^alpha on [-1, 1]; mapped to [0, 1] it picks up 2^alpha
    Ok((alpha + 1.0) * rule.integrate(0.0, 1.0, angular) / 2f64.powf(alpha))
}

/// Minimum of `||f||_{H(kappa)}` over functions `f` on a finite set with
/// `psi(s) f(phi(s)) = g(s)` for every `s`.
///
/// Writing `kappa = L L^H`, every `f` is `L u` with `||f|| = min ||u||`, so the
/// answer is the length of the minimum-norm least-squares solution of
/// `diag(psi) P_phi L u = g`.
pub fn brute_force_min_norm(kappa: &CMatrix, phi: &[usize], psi: &[Complex64], g: &[Complex64]) -> Result<f64> {
    let n = kappa.nrows();
    if kappa.ncols() != n || n == 0 {
        return Err(Error::InvalidParameter("kernel matrix must be square and nonempty".into()));
    }
    if phi.len() != psi.len() || phi.len() != g.len() || phi.is_empty() {
        return Err(Error::InvalidParameter("phi, psi and g must have one entry per point of S".into()));
    }
    if let Some(&bad) = phi.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidParameter(format!("phi maps to index {bad} outside X")));
    }
    let eig = crate::linalg::hermitian_eigen(kappa)?;
    let top = eig.max().max(0.0);
    let mut l = eig.vectors.clone();
    for (j, &lam) in eig.values.iter().enumerate() {
        let s = if lam > PINV_CUTOFF * top { lam.sqrt() } else { 0.0 };
        l.column_mut(j).scale_mut(s);
    }
    let a = CMatrix::from_fn(phi.len(), n, |s, k| psi[s] * l[(phi[s], k)]);
    let rhs = CVector::from_column_slice(g);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let u = svd
        .solve(&rhs, PINV_CUTOFF * smax.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::NumericalBreakdown(e.to_string()))?;
    let scale = rhs.norm().max(1.0);
    let resid = (&a * &u - &rhs).norm() / scale;
    if resid > FEASIBILITY_TOL {
        return Err(Error::Infeasible(resid));
    }
    Ok(u.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::SpaceDescriptor;
    use crate::c64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn circle_examples() {
        let one = BoundaryFunction::poly(PowerSeries::from_real(&[1.0]).unwrap());
        assert!((circle_norm_sq(&one, 16).unwrap() - 1.0).abs() < 1e-15);
        let a = BoundaryFunction::symbol(SymbolMap::automorphism(c64(0.5, 0.0)).unwrap()).unwrap();
        assert!((circle_norm_sq(&a, 512).unwrap() - 1.0).abs() < 1e-12);
        let f = BoundaryFunction::rational(
            PowerSeries::from_real(&[1.0, -0.5]).unwrap(),
            PowerSeries::from_real(&[1.0, -0.8]).unwrap(),
        )
        .unwrap();
        assert!((circle_norm_sq(&f, 1024).unwrap() - 1.25).abs() < 1e-10);
        assert!(circle_norm_sq(&one, 18).is_err() && circle_norm_sq(&one, 8).is_err());
    }

    #[test]
    fn trapezoid_aliasing_near_a_pole() {
        // F = (1 - pz)/(1 - beta z) at p = r = 0.9; the trapezoid error is
        // 2 sum_j c_{jM} = 2 c_M / (1 - beta^M), with
        // c_M = beta^{M-1} (beta - p) (1 + (beta - p) beta / (1 - beta^2))
        let (p, r) = (0.9f64, 0.9f64);
        let beta = (p + r) / (1.0 + p * r);
        let f = BoundaryFunction::rational(
            PowerSeries::from_real(&[1.0, -p]).unwrap(),
            PowerSeries::from_real(&[1.0, -beta]).unwrap(),
        )
        .unwrap();
        let exact = (1.0 - p * p * r * r) / (1.0 - r * r);
        let m = 1024;
        let c_m = beta.powi(m as i32 - 1) * (beta - p) * (1.0 + (beta - p) * beta / (1.0 - beta * beta));
        let err = circle_norm_sq(&f, m).unwrap() - exact;
        let predicted = 2.0 * c_m / (1.0 - beta.powi(m as i32));
        assert!((err - predicted).abs() < 1e-9 * predicted, "{err} vs {predicted}");
        let q = balancing_center(beta).unwrap();
        let mapped = mobius_circle_norm_sq(&f, c64(q, 0.0), m).unwrap();
        assert!((mapped - exact).abs() < 1e-12, "{mapped} vs {exact}");
    }

    #[test]
    fn mobius_substitution_preserves_the_mean() {
        let f = BoundaryFunction::poly(PowerSeries::new(vec![c64(1.0, 0.5), c64(-0.3, 0.2), c64(0.0, 0.7)]).unwrap());
        let plain = circle_norm_sq(&f, 64).unwrap();
        for q in [c64(0.5, 0.0), c64(-0.2, 0.6)] {
            assert!((mobius_circle_norm_sq(&f, q, 512).unwrap() - plain).abs() < 1e-12);
        }
        assert!(mobius_circle_norm_sq(&f, c64(1.0, 0.0), 64).is_err());
        assert_eq!(balancing_center(0.0).unwrap(), 0.0);
    }

    #[test]
    fn monomials_are_exact() {
        for k in 0..20 {
            let mut c = vec![0.0; k + 1];
            c[k] = 1.0;
            let f = BoundaryFunction::poly(PowerSeries::from_real(&c).unwrap());
            assert!((circle_norm_sq(&f, 64).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pole_on_circle_rejected() {
        let f = BoundaryFunction::hardy_kernel(c64(1.0, 0.0)).unwrap();
        assert!(matches!(circle_norm_sq(&f, 16), Err(Error::PoleNearBoundary(_))));
        let s = BoundaryFunction::symbol(SymbolMap::series(PowerSeries::from_real(&[0.0, 0.5]).unwrap()));
        assert!(matches!(s, Err(Error::BoundaryEvalUnsupported(_))));
    }

    #[test]
    fn weighted_examples() {
        let p = c64(0.5, 0.0);
        let one = BoundaryFunction::poly(PowerSeries::from_real(&[1.0]).unwrap());
        assert!((weighted_circle_norm_sq(&one, c64(-0.3, 0.7), 1024).unwrap() - 1.0).abs() < 1e-12);
        let z = BoundaryFunction::poly(PowerSeries::from_real(&[0.0, 1.0]).unwrap());
        assert!((weighted_circle_norm_sq(&z, p, 256).unwrap() - 1.0).abs() < 1e-13);
        let k = BoundaryFunction::hardy_kernel(c64(-0.5, 0.0)).unwrap();
        assert!((weighted_circle_norm_sq(&k, p, 1024).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn change_of_variable_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..6 {
            let d = rng.gen_range(1..=50);
            let coeffs: Vec<Complex64> = (0..=d).map(|_| c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
            let f = PowerSeries::new(coeffs).unwrap();
            let p = Complex64::from_polar(0.9 * rng.gen::<f64>(), 2.0 * PI * rng.gen::<f64>());
            let direct = circle_norm_sq(&BoundaryFunction::composed(f.clone(), SymbolMap::automorphism(p).unwrap()), 4096).unwrap();
            let weighted = weighted_circle_norm_sq(&BoundaryFunction::poly(f), p, 4096).unwrap();
            assert!((direct - weighted).abs() < 1e-10, "{direct} vs {weighted}");
        }
    }

    #[test]
    fn bergman_examples() {
        let spec = QuadratureSpec::default();
        let one = PowerSeries::from_real(&[1.0]).unwrap();
        assert!((bergman_norm_sq(&one, 0.0, &spec).unwrap() - 1.0).abs() < 1e-14);
        assert!((bergman_norm_sq(&one, 2.5, &spec).unwrap() - 1.0).abs() < 1e-13);
        let z = PowerSeries::from_real(&[0.0, 1.0]).unwrap();
        assert!((bergman_norm_sq(&z, 0.0, &spec).unwrap() - 0.5).abs() < 1e-14);
        let z2 = PowerSeries::from_real(&[0.0, 0.0, 1.0]).unwrap();
        assert!((bergman_norm_sq(&z2, 1.0, &spec).unwrap() - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn bergman_matches_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spec = QuadratureSpec::new(64, 24, 0).unwrap();
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            let space = SpaceDescriptor::bergman_disk(alpha).unwrap();
            let coeffs: Vec<Complex64> = (0..=20).map(|_| c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
            let want = space.coeff_norm_sq(&coeffs).unwrap();
            let got = bergman_norm_sq(&PowerSeries::new(coeffs).unwrap(), alpha, &spec).unwrap();
            assert!((got - want).abs() < 1e-10 * want.max(1.0), "alpha {alpha}: {got} vs {want}");
        }
    }

    #[test]
    fn min_norm_examples() {
        // phi = identity, psi = 1: the min norm is the H(kappa) norm of g
        let k = CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(4.0 / 3.0, 0.0)]);
        let g = [c64(1.0, 0.0), c64(4.0 / 3.0, 0.0)];
        let one = [c64(1.0, 0.0); 2];
        let v = brute_force_min_norm(&k, &[0, 1], &one, &g).unwrap();
        assert!((v - (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
        // phi constant to x_1, g constant c: |c| / sqrt(kappa(x_1, x_1))
        let c = c64(0.6, -0.8);
        let v = brute_force_min_norm(&k, &[1, 1], &one, &[c, c]).unwrap();
        assert!((v - 1.0 / (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
        // two different values at the same image point cannot be matched
        assert!(matches!(brute_force_min_norm(&k, &[1, 1], &one, &[c, -c]), Err(Error::Infeasible(_))));
    }
}
