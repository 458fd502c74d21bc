use cubepsc_core::geomcurv::*;

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../fixtures/{}", env!("CARGO_MANIFEST_DIR"), name)).unwrap()
}

fn family(name: &str) -> MetricFamily {
    MetricFamily::parse(&fixture(name)).unwrap()
}

#[test]
fn flat_metric_has_zero_curvature() {
    let fam = family("flat.met");
    let report = curvature_check(&fam, 20, 1, 1e-5).unwrap();
    assert!(report.passed);
    assert!(report.samples.iter().all(|s| s.formula == 0.0 && s.oracle.abs() < 1e-9));
}

#[test]
fn exponential_family_is_hyperbolic() {
    let fam = family("hyperbolic.met");
    for y in fam.samples(20, 9) {
        let terms = warped_terms(&fam, &y).unwrap();
        assert!((terms.total + 6.0).abs() < 1e-10, "{:?}", terms);
        assert!((terms.tr_hdot - 4.0).abs() < 1e-12);
        assert!((scal_direct(&WarpedMetric::new(&fam), &y, FdSteps::default()).unwrap() + 6.0).abs() < 1e-5);
    }
}

#[test]
fn stereographic_sphere_of_radius_r() {
    for r in [0.5, 1.0, 3.0] {
        let e = format!("4*{}/(1 + x1^2 + x2^2)^2", r * r);
        let m = ExprMetric::from_strs(2, &[&e, "0", "0", &e]).unwrap();
        for y in [[0.0, 0.0], [0.3, -0.7], [1.2, 0.4]] {
            assert!((scal_direct(&m, &y, FdSteps::default()).unwrap() - 2.0 / (r * r)).abs() < 1e-5);
            assert!((curvature_jet(&m, &y).unwrap().scal - 2.0 / (r * r)).abs() < 1e-10);
        }
    }
}

#[test]
fn polar_plane_is_flat() {
    // the Laplacian of the warping function enters with −2f⁻¹, not through |df|²
    let fam = family("polar.met");
    let report = curvature_check(&fam, 30, 2, 1e-5).unwrap();
    assert!(report.passed, "{}", report.max_rel_error);
    assert!(report.samples.iter().all(|s| s.formula.abs() < 1e-10));
}

#[test]
fn formula_matches_oracle_on_fixtures() {
    for name in ["flat.met", "hyperbolic.met", "sphere.met", "generic.met", "annulus.met", "polar.met"] {
        let fam = family(name);
        let report = curvature_check(&fam, 100, fam.seed, 1e-5).unwrap();
        assert!(report.passed, "{}: {}", name, report.max_rel_error);
    }
}

#[test]
fn constant_family_reduces_to_slice() {
    let fam = MetricFamily::parse(
        "d = 2\nn = 1\nh[1][1] = \"4/(1 + x1^2 + x2^2)^2\"\nh[2][2] = \"4/(1 + x1^2 + x2^2)^2\"\n\
         domain x1 in [-1, 1]\ndomain x2 in [-1, 1]\ndomain t1 in [0, 1]\n",
    )
    .unwrap();
    for y in fam.samples(10, 3) {
        let t = warped_terms(&fam, &y).unwrap();
        assert_eq!((t.second_fundamental, t.laplacian), (0.0, 0.0));
        assert!((t.total - 2.0).abs() < 1e-10);
    }
    let susp = suspension_check(&fam, 10, 3, SlownessMode::Eighth).unwrap();
    assert!(susp.passed && susp.accepted == 10);
    assert!(susp.samples.iter().all(|s| s.correction == 0.0 && s.error_norm_sq == 0.0));
}

#[test]
fn curvature_components_match_oracle() {
    for name in ["generic.met", "sphere.met", "hyperbolic.met"] {
        let fam = family(name);
        for (k, y) in fam.samples(10, 4).into_iter().enumerate() {
            let s = k as f64;
            let r = warped_components(&fam, &y, &[1.0, 0.3 * s], &[-0.2, 1.0], &[0.5, -s / 10.0], &[0.7, 0.4]).unwrap();
            assert!(r.max_error() < 1e-5, "{} {:?}: {:?}", name, y, r);
        }
    }
}

#[test]
fn rescaling_identity_and_decay() {
    for name in ["hyperbolic.met", "generic.met", "sphere.met"] {
        let fam = family(name);
        let report = rescaling_check(&fam, &[1.0, 2.0, 4.0, 8.0], 20, 5, 1e-5).unwrap();
        assert!(report.passed, "{}: {:?}", name, report);
        let e = &report.entries;
        let ratio = e[3].max_abs_scal / e[2].max_abs_scal;
        assert!((0.24..=0.26).contains(&ratio), "{}: {}", name, ratio);
    }
    let flat = rescaling_check(&family("flat.met"), &[1.0, 2.0, 4.0, 8.0], 10, 5, 1e-5).unwrap();
    assert!(flat.passed && flat.entries.iter().all(|e| e.max_abs_scal == 0.0));
}

#[test]
fn slow_sphere_suspension() {
    let fam = family("sphere.met");
    for mode in [SlownessMode::Eighth, SlownessMode::Chapter7] {
        let report = suspension_check(&fam, 100, 6, mode).unwrap();
        assert!(report.passed, "{:?}", report.max_residual);
        assert_eq!(report.accepted, 100);
        assert!(report.min_bound_margin.unwrap() > 0.0);
        assert!(report.samples.iter().all(|s| s.scal_susp > 7.0 / 8.0 * s.scal_slice));
    }
    let err = error_term_check(&fam, 100, 6).unwrap();
    assert!(err.passed && err.min_margin > 0.0);
}

#[test]
fn two_parameter_suspension_identity() {
    let fam = family("torus_family.met");
    let report = suspension_check(&fam, 50, 7, SlownessMode::Eighth).unwrap();
    assert!(report.passed, "{} {}", report.max_residual, report.max_oracle_error);
}

#[test]
fn annulus_suspension_is_flat() {
    let fam = family("annulus.met");
    let report = suspension_check(&fam, 50, 8, SlownessMode::Eighth).unwrap();
    assert!(report.max_residual < SUSPENSION_RESIDUAL_TOL);
    assert!(report.samples.iter().all(|s| s.scal_susp.abs() < 1e-9 && s.scal_slice > 0.0));
    assert!(report.samples.iter().all(|s| s.predicate_holds == Some(false)));
    assert!(matches!(error_term_check(&fam, 10, 8), Err(CurvError::Precondition(_))));
}

#[test]
fn fast_family_is_refused() {
    let fam = family("sphere_fast.met");
    assert!(matches!(error_term_check(&fam, 50, 9), Err(CurvError::Precondition(_))));
    let report = suspension_check(&fam, 50, 9, SlownessMode::Eighth).unwrap();
    assert!(report.accepted < 50);
    assert!(report.max_residual < SUSPENSION_RESIDUAL_TOL);
}

#[test]
fn suspension_needs_unit_warp() {
    assert!(matches!(suspension_check(&family("generic.met"), 5, 1, SlownessMode::Eighth), Err(CurvError::Precondition(_))));
}

#[test]
fn pre_gauge_on_random_pairs() {
    let report = pre_gauge_check(200, 11, 6, 1e4, 1e-9).unwrap();
    assert!(report.passed, "{} {}", report.max_residual, report.max_naturality);
}

#[test]
fn angle_charts() {
    for (name, tol) in [("line.ang", 1e-6), ("circle.ang", 1e-6), ("square.ang", 1e-5)] {
        let chart = AngleChart::parse(&fixture(name)).unwrap();
        let report = angle_chart_check(&chart, 100, chart.seed, tol).unwrap();
        assert!(report.passed, "{}: {} {:?}", name, report.max_error, report.polar_radius_error);
        assert_eq!(report.polar_radius_error.is_some(), name == "circle.ang");
    }
}

#[test]
fn angle_chart_rejects_folded_strip() {
    let chart = AngleChart::parse("kappa = \"2\"\ndomain phi in [0, 1]\ndomain r in [-1, 1]\n").unwrap();
    assert!(matches!(angle_chart_check(&chart, 50, 1, 1e-5), Err(CurvError::Degenerate(_))));
}

#[test]
fn angle_chart_positions() {
    match AngleChart::parse("kappa = \"x1\"\ndomain phi in [0, 1]\ndomain r in [0, 1]\n") {
        Err(CurvError::Format { line: 1, col, .. }) => assert_eq!(col, 10),
        other => panic!("{:?}", other),
    }
}
