mod common;

use torus_scan::critical::{eps_crit, min_det_df};
use torus_scan::maps::{parameter_catalog, Torus2Params, CATALOG_LEN};

#[test]
fn determinant_changes_sign_at_eps_crit() {
    for case in 0..CATALOG_LEN {
        let p = parameter_catalog(case).unwrap();
        let e = eps_crit(&p).unwrap().eps_crit;
        assert!(min_det_df(&p, e - 1e-3).value > 0.0, "case {case}");
        assert!(min_det_df(&p, e + 1e-3).value < 0.0, "case {case}");
        assert!(min_det_df(&p, 2.0 * e).value < 0.0, "case {case}");
    }
}

#[test]
fn agrees_with_pointwise_roots() {
    for case in 0..CATALOG_LEN {
        let p = parameter_catalog(case).unwrap();
        let e = eps_crit(&p).unwrap().eps_crit;
        let oracle = common::grid_root_eps_crit(&p, 1024);
        // the grid oracle can only overestimate
        assert!(oracle >= e - 1e-6 && oracle - e < 1e-3, "case {case}: {e} vs {oracle}");
    }
}

#[test]
fn closed_forms() {
    let p4 = parameter_catalog(4).unwrap();
    let p5 = parameter_catalog(5).unwrap();
    let p7 = parameter_catalog(7).unwrap();
    let cases = [
        (p4, 1.0 / p4.amps[0].max(p4.amps[3])),
        (p5, 1.0 / (p5.amps[1] * p5.amps[2]).sqrt()),
        (p7, 1.0 / p7.amps[3]),
    ];
    for (p, expected) in cases {
        let e = eps_crit(&p).unwrap().eps_crit;
        assert!((e - expected).abs() < 1e-5, "{e} vs {expected}");
    }
}

#[test]
fn integer_phase_shifts_do_not_matter() {
    let p = parameter_catalog(0).unwrap();
    let shifted = Torus2Params::new(
        p.omega,
        p.eps,
        p.amps,
        [p.phases[0] + 3.0, p.phases[1] - 2.0, p.phases[2] + 1.0, p.phases[3] - 7.0],
    )
    .unwrap();
    let a = eps_crit(&p).unwrap().eps_crit;
    let b = eps_crit(&shifted).unwrap().eps_crit;
    assert!((a - b).abs() <= 1e-6);
}
