//! Checks that tie two modules together through the public API.

use kernelcomp::certify::{self, KernelExpr, PointMap, PointSet};
use kernelcomp::closedforms;
use kernelcomp::operators::{build_matrix, DEFAULT_MAX_ITERS, DEFAULT_TOL};
use kernelcomp::{c64, oracle, parse, report, SpaceDescriptor, SymbolMap};

#[test]
fn truncated_norm_stays_below_the_inner_closed_form() {
    let phi = SymbolMap::automorphism(c64(0.5, 0.0)).unwrap();
    let exact = closedforms::inner_norm(0.5).unwrap();
    let m = build_matrix(&SpaceDescriptor::HardyDisk, &phi, None, 128).unwrap();
    let est = m.norm_estimate(DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap().sigma_max;
    assert!(est <= exact + 1e-9 && exact - est < 1e-3, "{est} vs {exact}");
}

#[test]
fn min_c_is_a_lower_bound_for_the_estimate() {
    let phi = parse::symbol("affine:0.25,0.25").unwrap();
    let k = KernelExpr::space(SpaceDescriptor::HardyDisk);
    let grid = PointSet::radial_grid(6, 12, 0.1, 0.9).unwrap();
    let c = certify::min_c(&k, &k, &PointMap::Disk(phi.clone()), None, &grid, 0.0).unwrap().c_min;
    let exact = closedforms::affine_inner_norm(c64(0.25, 0.0), c64(0.25, 0.0)).unwrap();
    assert!(c <= exact + 1e-9 && c > 0.9, "{c} vs {exact}");
}

#[test]
fn residue_identity_holds_away_from_the_circle() {
    for (p, r) in [(0.3, 0.2), (0.5, 0.5), (0.7, 0.6)] {
        let q = oracle::circle_norm_sq(&closedforms::residue_function(p, r).unwrap(), 1024).unwrap();
        let closed = (1.0 - p * p * r * r) / (1.0 - r * r);
        assert!((q - closed).abs() < 1e-10, "({p}, {r}): {q} vs {closed}");
    }
}

#[test]
fn report_round_trips_through_json() {
    let rep = report::reproduce(3);
    let back: report::Report = serde_json::from_str(&rep.to_json()).unwrap();
    assert_eq!(back.items.len(), rep.items.len());
    assert_eq!(back.summary.pass, rep.summary.pass);
    assert!(rep.to_csv().lines().count() > rep.items.len());
}
