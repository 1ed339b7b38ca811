//! Decide whether the adjoint of `C_phi` on a weighted Hardy space is again a
//! composition operator.
//!
//! That happens exactly for `phi(z) = delta z` with `|delta| <= 1`, and then
//! `C_phi^* = C_psi` with `psi(z) = conj(delta) z`. The test expands `phi`,
//! checks `phi(0) = 0` and then the vanishing of every coefficient beyond the
//! linear one. A positive verdict is verified on kernel sections. A negative
//! one carries a witness: the offending coefficient plus the failure of the
//! relation `conj(phi(w)) / conj(w) = const` that `C_phi^* = C_psi` would force.

use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::vec_norm;
use crate::operators::{adjoint_apply_kernel, build_matrix};
use crate::series::PowerSeries;
use crate::spaces::SpaceDescriptor;
use crate::symbols::SymbolMap;
use crate::{Error, Result};

pub const DEFAULT_TAU: f64 = 1e-10;
pub const DEFAULT_DEGREE: usize = 32;

/// Points where kernel identities and the consistency relation are sampled.
pub const WITNESS_POINTS: [Complex64; 5] = [
    Complex64::new(0.5, 0.0),
    Complex64::new(-0.5, 0.0),
    Complex64::new(0.0, 0.3),
    Complex64::new(0.25, 0.2),
    Complex64::new(-0.8, 0.1),
];
const Z_RADIUS: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessReason {
    NonzeroAtOrigin,
    NonlinearCoefficients,
    ConsistencyResidual,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub reason: WitnessReason,
    /// Modulus of the offending coefficient, or the consistency residual.
    pub residual: f64,
    /// Degree of the largest offending coefficient.
    pub degree: Option<usize>,
    pub coefficients: Vec<Complex64>,
    /// Largest failure of the relation `conj(phi(w)) / conj(w) = const` over
    /// pairs of witness points.
    pub consistency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum AdjointClassification {
    IsComposition { delta: Complex64, verify_residual: f64, margin: f64 },
    NotComposition { witness: Witness },
}

impl AdjointClassification {
    pub fn is_composition(&self) -> bool {
        matches!(self, AdjointClassification::IsComposition { .. })
    }
}

/// Classify `phi` with threshold `tau` relative to its largest coefficient.
pub fn classify(space: &SpaceDescriptor, phi: &SymbolMap, degree: usize, tau: f64) -> Result<AdjointClassification> {
    space.require_weights()?;
    if degree < 4 {
        return Err(Error::TruncationTooSmall(degree));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    let series = phi.to_series(degree);
    let c = series.coeffs();
    let threshold = tau * series.max_abs();
    let not = |reason, residual, deg: Option<usize>| -> Result<AdjointClassification> {
        Ok(AdjointClassification::NotComposition {
            witness: Witness {
                reason,
                residual,
                degree: deg,
                coefficients: c.to_vec(),
                consistency: max_consistency(space, phi)?,
            },
        })
    };
    if c[0].norm() > threshold {
        return not(WitnessReason::NonzeroAtOrigin, c[0].norm(), Some(0));
    }
    let (worst_deg, worst) = c.iter().enumerate().skip(2).fold((2, 0.0f64), |best, (n, v)| {
        if v.norm() > best.1 {
            (n, v.norm())
        } else {
            best
        }
    });
    if worst > threshold {
        return not(WitnessReason::NonlinearCoefficients, worst, Some(worst_deg));
    }
    let delta = c[1];
    if delta.norm() > 1.0 + crate::symbols::AFFINE_SLACK {
        return Err(Error::HypothesisViolated(format!("|delta| = {} exceeds 1", delta.norm())));
    }
    let verify_residual = verify_adjoint_pair(space, delta, &WITNESS_POINTS, degree)?;
    if verify_residual > 1e-10 {
        return not(WitnessReason::ConsistencyResidual, verify_residual, None);
    }
    Ok(AdjointClassification::IsComposition { delta, verify_residual, margin: threshold - c[0].norm().max(worst) })
}

/// Largest discrepancy between `C_phi^* k_w` and `k_w o psi` for
/// `phi = delta z`, `psi = conj(delta) z`, in orthonormal coordinates. Both
/// the coefficient formula and the truncated matrix route are compared.
pub fn verify_adjoint_pair(space: &SpaceDescriptor, delta: Complex64, ws: &[Complex64], degree: usize) -> Result<f64> {
    let beta = space.require_weights()?;
    let betas = beta.betas(degree);
    let phi = SymbolMap::scaled_identity(delta)?;
    let psi = PowerSeries::new(vec![Complex64::new(0.0, 0.0), delta.conj()])?;
    let m = build_matrix(space, &phi, None, degree)?;
    let mut worst: f64 = 0.0;
    for &w in ws {
        let kernel = PowerSeries::new(space.kernel_coefficients(w, degree)?)?;
        let composed = kernel.compose_to(&psi, degree);
        let lhs = adjoint_apply_kernel(space, &phi, None, w, degree)?;
        let matrix = m.adjoint_on_kernel(w)?;
        let coef_diff: Vec<Complex64> =
            lhs.iter().zip(composed.coeffs()).zip(&betas).map(|((a, b), s)| (a - b) * s).collect();
        let matrix_diff: Vec<Complex64> =
            matrix.iter().zip(composed.coeffs()).zip(&betas).map(|((a, b), s)| a - b * s).collect();
        worst = worst.max(vec_norm(&coef_diff)).max(vec_norm(&matrix_diff));
    }
    Ok(worst)
}

/// Failure of the relation forced by `C_phi^* = C_psi` between two witness
/// points, `sup_z |z| |w_2| |phi(w_2)/w_2 - phi(w_1)/w_1| / beta_1^2`. On the
/// Hardy space this is `sup_z |conj(phi(w_2)) z - conj(w_2) psi_hat(z)|` with
/// `psi_hat` extracted at `w_1`.
pub fn consistency_residual(
    space: &SpaceDescriptor,
    phi: &SymbolMap,
    w1: Complex64,
    w2: Complex64,
    z_grid: &[Complex64],
) -> Result<f64> {
    let beta = space.require_weights()?;
    if w1.norm() == 0.0 || w2.norm() == 0.0 {
        return Err(Error::DegenerateWitness);
    }
    if z_grid.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let slope = |w: Complex64| -> Result<Complex64> { Ok(phi.eval(w)? / w) };
    let gap = (slope(w2)? - slope(w1)?).norm() * w2.norm() / beta.beta_sq(1);
    let zmax = z_grid.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    Ok(zmax * gap)
}

/// Circle of radius 0.9 sampled at 64 points.
pub fn default_z_grid() -> Vec<Complex64> {
    (0..64).map(|k| Complex64::from_polar(Z_RADIUS, 2.0 * std::f64::consts::PI * k as f64 / 64.0)).collect()
}

fn max_consistency(space: &SpaceDescriptor, phi: &SymbolMap) -> Result<f64> {
    let grid = default_z_grid();
    let mut worst: f64 = 0.0;
    for (i, &w1) in WITNESS_POINTS.iter().enumerate() {
        for &w2 in &WITNESS_POINTS[i + 1..] {
            worst = worst.max(consistency_residual(space, phi, w1, w2, &grid)?);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::WeightSequence;
    use crate::{c64, I};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spaces() -> Vec<SpaceDescriptor> {
        vec![
            SpaceDescriptor::HardyDisk,
            SpaceDescriptor::bergman_disk(0.0).unwrap(),
            SpaceDescriptor::weighted_hardy(WeightSequence::explicit(vec![1.0, 2.0, 3.0]).unwrap()),
        ]
    }

    fn scaled(d: Complex64) -> SymbolMap {
        SymbolMap::scaled_identity(d).unwrap()
    }

    fn z_sq() -> SymbolMap {
        SymbolMap::z_times(SymbolMap::identity())
    }

    fn z_half_plus_half_z() -> SymbolMap {
        SymbolMap::series(PowerSeries::from_real(&[0.0, 0.5, 0.5]).unwrap())
    }

    #[test]
    fn classify_examples() {
        for s in spaces() {
            for d in [c64(0.5, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), 0.7 * I] {
                match classify(&s, &scaled(d), DEFAULT_DEGREE, DEFAULT_TAU).unwrap() {
                    AdjointClassification::IsComposition { delta, verify_residual, .. } => {
                        assert_eq!(delta, d);
                        assert!(verify_residual < 1e-10);
                    }
                    other => panic!("{} {d}: {other:?}", s.name()),
                }
            }
            match classify(&s, &z_sq(), DEFAULT_DEGREE, DEFAULT_TAU).unwrap() {
                AdjointClassification::NotComposition { witness } => {
                    assert_eq!(witness.reason, WitnessReason::NonlinearCoefficients);
                    assert_eq!((witness.residual, witness.degree), (1.0, Some(2)));
                    assert!(witness.consistency > 0.0);
                }
                other => panic!("{other:?}"),
            }
            let auto = SymbolMap::automorphism(c64(0.5, 0.0)).unwrap();
            match classify(&s, &auto, DEFAULT_DEGREE, DEFAULT_TAU).unwrap() {
                AdjointClassification::NotComposition { witness } => {
                    assert_eq!(witness.reason, WitnessReason::NonzeroAtOrigin);
                    assert_eq!(witness.residual, 0.5);
                }
                other => panic!("{other:?}"),
            }
            assert!(!classify(&s, &z_half_plus_half_z(), DEFAULT_DEGREE, DEFAULT_TAU).unwrap().is_composition());
        }
        assert!(matches!(
            classify(&SpaceDescriptor::HardyDisk, &z_sq(), 3, DEFAULT_TAU),
            Err(Error::TruncationTooSmall(3))
        ));
        assert!(classify(&SpaceDescriptor::hardy_ball(2).unwrap(), &z_sq(), 8, DEFAULT_TAU).is_err());
    }

    #[test]
    fn verify_examples() {
        let h = SpaceDescriptor::HardyDisk;
        assert!(verify_adjoint_pair(&h, c64(0.5, 0.0), &[c64(0.8, 0.0)], 32).unwrap() < 1e-12);
        assert!(verify_adjoint_pair(&h, c64(0.0, 0.0), &[c64(0.8, 0.0)], 32).unwrap() < 1e-15);
        assert!(verify_adjoint_pair(&h, I, &[c64(0.5, 0.0)], 32).unwrap() < 1e-12);
        for s in spaces() {
            assert!(verify_adjoint_pair(&s, c64(0.3, -0.6), &WITNESS_POINTS, 48).unwrap() < 1e-10);
        }
    }

    #[test]
    fn consistency_examples() {
        let h = SpaceDescriptor::HardyDisk;
        let grid = default_z_grid();
        assert!(consistency_residual(&h, &scaled(c64(0.5, 0.0)), c64(0.3, 0.1), c64(-0.7, 0.2), &grid).unwrap() < 1e-16);
        let r = consistency_residual(&h, &z_sq(), c64(0.5, 0.0), c64(0.25, 0.0), &grid).unwrap();
        assert!((r - 0.05625).abs() < 1e-15, "{r}");
        assert!(consistency_residual(&h, &z_half_plus_half_z(), c64(0.5, 0.0), c64(-0.5, 0.0), &grid).unwrap() > 0.0);
        assert!(matches!(
            consistency_residual(&h, &z_sq(), c64(0.0, 0.0), c64(0.5, 0.0), &grid),
            Err(Error::DegenerateWitness)
        ));
    }

    #[test]
    fn random_polynomials_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..500 {
            let deg = rng.gen_range(2..=8);
            let mut c: Vec<Complex64> =
                (0..=deg).map(|_| c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
            c[deg] += c64(0.5, 0.0);
            let total: f64 = c.iter().map(|v| v.norm()).sum();
            let c: Vec<Complex64> = c.into_iter().map(|v| v / total).collect();
            let phi = SymbolMap::series(PowerSeries::new(c).unwrap());
            match classify(&SpaceDescriptor::HardyDisk, &phi, DEFAULT_DEGREE, DEFAULT_TAU).unwrap() {
                AdjointClassification::NotComposition { witness } => assert!(witness.consistency > 0.0),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn verdict_stable_under_tiny_perturbations() {
        let eps = DEFAULT_TAU / 10.0 * 0.5;
        let phi = SymbolMap::series(PowerSeries::new(vec![c64(eps, 0.0), c64(0.5, 0.0), c64(0.0, eps)]).unwrap());
        assert!(classify(&SpaceDescriptor::HardyDisk, &phi, DEFAULT_DEGREE, DEFAULT_TAU).unwrap().is_composition());
    }

    #[test]
    fn verdicts_agree_across_spaces() {
        let symbols = [scaled(c64(0.4, 0.3)), z_sq(), z_half_plus_half_z(), SymbolMap::automorphism(c64(0.2, 0.1)).unwrap()];
        for phi in &symbols {
            let verdicts: Vec<bool> =
                spaces().iter().map(|s| classify(s, phi, DEFAULT_DEGREE, DEFAULT_TAU).unwrap().is_composition()).collect();
            assert!(verdicts.windows(2).all(|w| w[0] == w[1]), "{verdicts:?}");
        }
    }
}
