use hardy_ground::closed_form::synchronized_pair;
use hardy_ground::minimize::{minimize_nehari, SolveOptions};
use hardy_ground::verify::*;
use hardy_ground::*;

fn report(checks: &[CheckResult]) -> String {
    checks.iter().map(|c| format!("{}: {} vs {} ({})\n", c.name, c.computed, c.claimed, c.passed)).collect()
}

#[test]
fn identities_pass_at_default_resolution() {
    let mut all = check_identities(&[4], &[0.0, 0.5]).unwrap();
    all.extend(check_identities(&[3], &[0.1]).unwrap());
    all.extend(check_identities(&[5, 6], &[1.0]).unwrap());
    assert!(all.iter().all(|c| c.passed), "{}", report(&all));
    assert!(all.iter().all(|c| !c.provenance.is_empty()));
    let names: Vec<&str> = all.iter().map(|c| c.name.as_str()).collect();
    assert!(names.iter().any(|n| n.contains("instanton")));
}

#[test]
fn identity_error_shrinks_under_refinement() {
    let coarse = check_identities_at(&[4], &[0.5], Some(0.2)).unwrap();
    let fine = check_identities_at(&[4], &[0.5], Some(0.1)).unwrap();
    for (c, f) in coarse.iter().zip(&fine) {
        assert_eq!(c.name, f.name);
        assert!(c.error().abs() >= 4.0 * f.error().abs(), "{}: {:e} -> {:e}", c.name, c.error(), f.error());
    }
}

#[test]
fn identities_reject_invalid_input() {
    assert!(matches!(check_identities(&[2], &[0.0]), Err(Error::DimensionTooSmall(2))));
    assert!(matches!(check_identities(&[3], &[0.3]), Err(Error::HardyOutOfRange { .. })));
}

#[test]
fn thresholds_hold() {
    let p = make_params(4, 0.2, 0.5, 2.0, 2.0, 1.0).unwrap();
    let checks = check_thresholds(&p, &SolveOptions::default()).unwrap();
    assert_eq!(checks.len(), 3);
    assert!(checks.iter().all(|c| c.passed), "{}", report(&checks));
}

#[test]
fn symmetry_of_closed_form_and_minimizer() {
    let p = make_params(4, 0.5, 0.5, 2.0, 2.0, 1.0).unwrap();
    let g = EFGrid::for_params(&p).shared();
    let sync = synchronized_pair(&p, &g, None).unwrap();
    let c = check_symmetry_state(&sync).unwrap();
    assert!(c.computed < 1e-10 && c.passed);
    assert!(c.detail.contains("violations: 0"));

    let r = minimize_nehari(&p, &SolveOptions::default()).unwrap();
    let c = check_symmetry_profile(&r).unwrap();
    assert!(c.computed < 1e-3, "{}", c.computed);

    let moved = sync.shifted(400);
    assert!(matches!(check_symmetry_state(&moved), Err(Error::NotRecentered(400))));
}

#[test]
fn small_coupling_limits() {
    let p = make_params(4, 0.3, 0.6, 2.0, 2.0, 0.2).unwrap();
    let opts = SolveOptions { separations: vec![4.0, 8.0], ..Default::default() };
    let checks = check_limits(&p, &[0.2, 0.1, 0.05], &opts).unwrap();
    assert!(checks.iter().all(|c| c.passed), "{}", report(&checks));
    let names = report(&checks);
    assert!(names.contains("mountain pass d0") && names.contains("first-order gap"));
}
