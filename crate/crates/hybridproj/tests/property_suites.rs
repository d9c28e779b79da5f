//! Full property-suite runs at the sample sizes the suites ship with.

use hybridproj::props;

fn assert_clean(reports: &[props::PropertyReport]) {
    for report in reports {
        assert!(
            report.passed(),
            "{}: {} of {} samples violated (worst margin {:.3e}, tolerance {:.1e})",
            report.name,
            report.violations,
            report.samples,
            report.worst_margin,
            report.tolerance
        );
    }
}

#[test]
fn geometry_properties_hold() {
    assert_clean(&props::geometry_suite(0).unwrap());
}

#[test]
fn projection_properties_hold() {
    assert_clean(&props::sets_suite(0).unwrap());
}

#[test]
fn catalog_properties_hold() {
    assert_clean(&props::catalog_suite(0).unwrap());
}

#[test]
fn resolvent_properties_hold() {
    assert_clean(&props::resolvent_suite(0).unwrap());
}

#[test]
fn solver_properties_hold() {
    assert_clean(&props::solver_suite(0).unwrap());
}

#[test]
fn suites_are_deterministic() {
    let a = props::geometry_suite(7).unwrap();
    let b = props::geometry_suite(7).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.name, y.name);
        assert_eq!(x.violations, y.violations);
        assert_eq!(x.worst_margin.to_bits(), y.worst_margin.to_bits());
    }
}
