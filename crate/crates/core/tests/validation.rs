use manhattan_cox::analytic::QuadSpec;
use manhattan_cox::montecarlo::{analytic_curve, default_grid, estimate_cdf, ks_compare, validate};
use manhattan_cox::{CurveKind, ModelParams, Palm};

#[test]
fn matching_parameters_pass() {
    let params = ModelParams::new(1.0, 3.0).unwrap();
    let v = validate(
        "sl-dp",
        &params,
        Palm::TypicalIntersection,
        20_000,
        8,
        100,
        &QuadSpec::default(),
    )
    .unwrap();
    assert!(v.report.pass, "{:?}", v.report);
    assert_eq!(v.empirical.kind(), CurveKind::Empirical);
    assert_eq!(v.analytic.kind(), CurveKind::Analytic);
    assert_eq!(v.report.regime, "sl-dp");
}

#[test]
fn mismatched_parameters_fail() {
    let quad = QuadSpec::default();
    let sim = ModelParams::new(1.0, 0.5).unwrap();
    let theory = ModelParams::new(1.0, 5.0).unwrap();
    for mode in [Palm::TypicalIntersection, Palm::TypicalPoint] {
        let grid = default_grid(mode, &sim, &quad, 100).unwrap();
        let emp = estimate_cdf(&sim, mode, 5_000, &grid, 1).unwrap();
        let ana = analytic_curve(mode, &theory, &grid, &quad).unwrap();
        let r = ks_compare(&emp, &ana).unwrap();
        assert!(!r.pass);
        assert!(r.ks_statistic > 0.5);
    }
}

#[test]
fn default_grid_spans_the_bulk() {
    let quad = QuadSpec::default();
    let params = ModelParams::new(10.0, 0.5).unwrap();
    let grid = default_grid(Palm::TypicalPoint, &params, &quad, 200).unwrap();
    assert_eq!(grid.len(), 200);
    assert_eq!(grid[0], 0.0);
    let top = analytic_curve(Palm::TypicalPoint, &params, &grid[199..], &quad)
        .unwrap()
        .values()[0];
    assert!((top - 0.999).abs() < 1e-5);
}
