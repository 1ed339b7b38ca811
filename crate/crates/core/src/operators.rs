//! Truncated matrices of composition and weighted composition operators on
//! one-variable weighted Hardy spaces.
//!
//! Entries are taken in the orthonormal basis `e_n = z^n / beta_n`, so entry
//! `(i, j)` is the `z^i` coefficient of `psi * phi^j` times `beta_i / beta_j`.
//! A truncation of order `N` keeps degrees `0..=N`; it is the compression
//! `P_N W P_N`, so its norm never exceeds the operator norm and never
//! decreases as `N` grows.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::{vec_norm, CMatrix, CVector};
use crate::series::PowerSeries;
use crate::spaces::{Point, SpaceDescriptor, WeightSequence};
use crate::symbols::{SelfMapReport, SymbolMap, Weight};
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 100_000;

#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub entries: CMatrix,
    pub space: SpaceDescriptor,
    pub symbol: SymbolMap,
    pub weight: Option<Weight>,
    /// Truncation order; the matrix is `(degree + 1) x (degree + 1)`.
    pub degree: usize,
    /// Boundary screen of the symbol, recorded rather than enforced.
    pub screen: SelfMapReport,
    betas: Vec<f64>,
}

pub fn build_matrix(
    space: &SpaceDescriptor,
    symbol: &SymbolMap,
    weight: Option<&Weight>,
    degree: usize,
) -> Result<OperatorMatrix> {
    let beta = space.require_weights()?;
    if degree < 1 {
        return Err(Error::InvalidParameter("truncation order must be at least 1".into()));
    }
    let screen = symbol.self_map_check((4 * (degree + 1)).max(64))?;
    let betas = beta.betas(degree);
    let phi = symbol.to_series(degree);
    let mut column = match weight {
        Some(w) => w.to_series(degree),
        None => PowerSeries::constant(Complex64::new(1.0, 0.0), degree),
    };
    let dim = degree + 1;
    let mut entries = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        for (i, c) in column.coeffs().iter().enumerate() {
            entries[(i, j)] = c * (betas[i] / betas[j]);
        }
        if j + 1 < dim {
            column = column.mul_truncated(&phi, degree);
        }
    }
    Ok(OperatorMatrix { entries, space: space.clone(), symbol: symbol.clone(), weight: weight.cloned(), degree, screen, betas })
}

/// Certified estimate of the largest singular value of a truncation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormEstimate {
    pub sigma_max: f64,
    pub iterations: usize,
    /// `||M^H M v - lambda v|| / lambda` at the returned vector.
    pub residual: f64,
    pub degree: usize,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Normalized all-ones start vector, nudged along `e_0` when `M` kills it.
    fn start_vector(&self) -> CVector {
        let n = self.dim();
        let mut v = CVector::from_element(n, Complex64::new(1.0, 0.0)).unscale((n as f64).sqrt());
        if (&self.entries * &v).norm() == 0.0 {
            v[0] += Complex64::new(1.0, 0.0);
            v.unscale_mut(v.norm());
        }
        v
    }

    /// Largest singular value by Lanczos on `M^H M` with full
    /// reorthogonalization, started from the normalized all-ones vector.
    ///
    /// The returned value is the Rayleigh quotient of the final Ritz vector
    /// and `residual` is its relative eigen-residual, recomputed explicitly.
    /// The top of the spectrum of these truncations is tightly clustered,
    /// which is why plain power iteration ([`Self::power_iteration`]) is
    /// too slow beyond a few hundred degrees.
    pub fn norm_estimate(&self, tol: f64, max_iters: usize) -> Result<NormEstimate> {
        check_tol(tol)?;
        let m = &self.entries;
        let mh = m.adjoint();
        let apply = |x: &CVector| -> CVector { &mh * (m * x) };
        let n = self.dim();
        let q0 = self.start_vector();
        let mut est = NormEstimate { sigma_max: 0.0, iterations: 0, residual: f64::INFINITY, degree: self.degree };
        if (m * &q0).norm() == 0.0 {
            est.residual = 0.0;
            return Ok(est);
        }
        let steps = max_iters.min(n);
        let mut basis: Vec<CVector> = vec![q0];
        let (mut alpha, mut beta) = (Vec::<f64>::new(), Vec::<f64>::new());
        for j in 0..steps {
            let mut w = apply(&basis[j]);
            alpha.push(basis[j].dotc(&w).re);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dotc(&w);
                    w.axpy(-c, q, Complex64::new(1.0, 0.0));
                }
            }
            let b = w.norm();
            let k = j + 1;
            let exhausted = k == n || b <= 1e-14 * alpha.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            if exhausted || k % 4 == 0 || k == steps {
                let (theta, y) = top_ritz_pair(&alpha, &beta);
                let bound = b * y[k - 1].abs() / theta;
                if exhausted || bound < 0.5 * tol || k == steps {
                    let mut x = CVector::zeros(n);
                    for (yi, q) in y.iter().zip(&basis) {
                        x.axpy(Complex64::new(*yi, 0.0), q, Complex64::new(1.0, 0.0));
                    }
                    x.unscale_mut(x.norm());
                    let mx = m * &x;
                    let lambda = mx.norm_squared();
                    let residual = ((&mh * &mx) - x.scale(lambda)).norm() / lambda;
                    est = NormEstimate { sigma_max: lambda.sqrt(), iterations: k, residual, degree: self.degree };
                    if residual < tol {
                        return Ok(est);
                    }
                    if exhausted || k == steps {
                        break;
                    }
                }
            }
            beta.push(b);
            basis.push(w.unscale(b));
        }
        Err(Error::NotConverged { estimate: est })
    }

    /// Plain power iteration on `M^H M` from the same start vector; kept as an
    /// independent route for small truncations.
    pub fn power_iteration(&self, tol: f64, max_iters: usize) -> Result<NormEstimate> {
        check_tol(tol)?;
        let m = &self.entries;
        let mh = m.adjoint();
        let mut v = self.start_vector();
        let mut est = NormEstimate { sigma_max: 0.0, iterations: 0, residual: f64::INFINITY, degree: self.degree };
        let mut mv = m * &v;
        if mv.norm() == 0.0 {
            est.residual = 0.0;
            return Ok(est);
        }
        for it in 1..=max_iters {
            let w = &mh * &mv;
            let lambda = mv.norm_squared();
            let residual = (&w - v.scale(lambda)).norm() / lambda;
            est = NormEstimate { sigma_max: lambda.sqrt(), iterations: it, residual, degree: self.degree };
            if residual < tol {
                return Ok(est);
            }
            v = w.unscale(w.norm());
            mv = m * &v;
        }
        Err(Error::NotConverged { estimate: est })
    }

    /// Orthonormal coordinates of the truncated kernel section at `w`.
    pub fn kernel_coords(&self, w: Complex64) -> Result<Vec<Complex64>> {
        self.space.kernel_coords(w, self.degree)
    }

    /// `M^H k_w` in orthonormal coordinates.
    pub fn adjoint_on_kernel(&self, w: Complex64) -> Result<Vec<Complex64>> {
        let k = CVector::from_vec(self.kernel_coords(w)?);
        Ok((self.entries.adjoint() * k).iter().copied().collect())
    }

    /// `|| M^H k_w - conj(psi(w)) k_{phi(w)} ||` in orthonormal coordinates.
    pub fn adjoint_kernel_residual(&self, w: Complex64) -> Result<f64> {
        let lhs = self.adjoint_on_kernel(w)?;
        let rhs = adjoint_apply_kernel(&self.space, &self.symbol, self.weight.as_ref(), w, self.degree)?;
        let diff: Vec<Complex64> =
            lhs.iter().zip(rhs.iter()).zip(&self.betas).map(|((l, r), b)| l - r * b).collect();
        Ok(vec_norm(&diff))
    }

    /// `||M k|| / ||k||` for the truncated kernel section `k` at `v`.
    pub fn kernel_section_ratio(&self, v: Complex64) -> Result<f64> {
        let k = CVector::from_vec(self.kernel_coords(v)?);
        Ok((&self.entries * &k).norm() / k.norm())
    }

    /// Row-major CSV with one quoted `re,im` cell per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if j > 0 {
                    out.push(',');
                }
                let c = self.entries[(i, j)];
                write!(out, "\"{:e},{:e}\"", c.re, c.im).expect("write to string");
            }
            out.push('\n');
        }
        out
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")))
    }
}

/// Largest eigenpair of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`.
fn top_ritz_pair(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let t = DMatrix::<f64>::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    let (idx, theta) = eig.eigenvalues.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, v)| {
        if v > best.1 {
            (i, v)
        } else {
            best
        }
    });
    (theta, eig.eigenvectors.column(idx).iter().copied().collect())
}

/// Truncated Taylor coefficients of `conj(psi(w)) * kappa_{phi(w)}`, the image
/// of the kernel section at `w` under the adjoint.
pub fn adjoint_apply_kernel(
    space: &SpaceDescriptor,
    symbol: &SymbolMap,
    weight: Option<&Weight>,
    w: Complex64,
    degree: usize,
) -> Result<Vec<Complex64>> {
    space.check_point(&Point::disk(w))?;
    let image = symbol.eval(w)?;
    let scale = match weight {
        Some(psi) => psi.eval(w)?.conj(),
        None => Complex64::new(1.0, 0.0),
    };
    Ok(space.kernel_coefficients(image, degree)?.into_iter().map(|c| c * scale).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBound {
    pub sup_ratio: f64,
    pub argmax: Point,
}

/// `sup_x sqrt(kappa_src(phi(x), phi(x)) / kappa_dst(x, x))`, a lower bound
/// for the norm of `C_phi : H(kappa_src) -> H(kappa_dst)` when bounded.
pub fn kernel_lower_bound(
    space_src: &SpaceDescriptor,
    space_dst: &SpaceDescriptor,
    symbol: &SymbolMap,
    points: &[Point],
) -> Result<LowerBound> {
    let mut best: Option<LowerBound> = None;
    for x in points {
        space_dst.check_point(x)?;
        let image = Point::disk(symbol.eval(x.z())?);
        let ratio = (space_src.kernel_diag(&image)? / space_dst.kernel_diag(x)?).sqrt();
        if best.as_ref().is_none_or(|b| ratio > b.sup_ratio) {
            best = Some(LowerBound { sup_ratio: ratio, argmax: x.clone() });
        }
    }
    best.ok_or(Error::EmptyPointSet)
}

/// `||C_phi k|| / ||k||` with `k` the truncated kernel section at `phi(x)`.
pub fn kernel_image_ratio(space: &SpaceDescriptor, symbol: &SymbolMap, x: Complex64, degree: usize) -> Result<f64> {
    space.check_point(&Point::disk(x))?;
    let m = build_matrix(space, symbol, None, degree)?;
    m.kernel_section_ratio(symbol.eval(x)?)
}

/// `||C_phi^* k_x|| / ||k_x|| = sqrt(kappa(phi(x), phi(x)) / kappa(x, x))`.
pub fn kernel_adjoint_ratio(space: &SpaceDescriptor, symbol: &SymbolMap, x: Complex64) -> Result<f64> {
    let p = Point::disk(x);
    let image = Point::disk(symbol.eval(x)?);
    Ok((space.kernel_diag(&image)? / space.kernel_diag(&p)?).sqrt())
}

/// Weights of the space a matrix lives in; exposed for callers that need to
/// convert between monomial and orthonormal coordinates.
pub fn to_orthonormal(beta: &WeightSequence, coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs.iter().enumerate().map(|(n, c)| c * beta.beta(n)).collect()
}
