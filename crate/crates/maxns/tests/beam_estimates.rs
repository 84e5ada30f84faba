use maxns::beam::{beam_estimates, beam_grid_nx, build_beam, observability_experiment, Geometry};
use maxns::PhysicalParams;
use std::f64::consts::PI;

#[test]
fn concentration_tail_and_means_over_ladder() {
    let p = PhysicalParams::unit();
    for k in [64u64, 256, 1024, 4096] {
        let b = build_beam(k, 1.2, 0.5, &p).unwrap();
        let row = beam_estimates(&b, 1.0, beam_grid_nx(k)).unwrap();
        let sk = (k as f64).sqrt();
        assert!(row.log_tail_mass <= -sk / 2.0 + 3.0, "k={k}: {}", row.log_tail_mass);
        assert!(row.mean_sigma0 < 1e-10 && row.mean_s0 < 1e-10);
        assert_eq!(row.boundary_trace, 0.0);
    }
}

#[test]
fn corrected_terminal_energy_stays_large() {
    let p = PhysicalParams::unit();
    let g = Geometry { o1: (2.2, 2.8), o2: (0.0, PI), o3: (2.2, 2.8) };
    let b = build_beam(1024, 1.2, 0.5, &p).unwrap();
    let row = observability_experiment(&b, &g, 1.0, None).unwrap();
    assert!(row.numerator >= b.sigma_limit(1.0) / 4.0);
    assert!(row.correction_norm < 1e-3);
}
