use maxns::ingham::{coefficient_recovery, synthesize_observation};
use maxns::state::ModalFrame;
use maxns::PhysicalParams;

#[test]
fn eight_mode_recovery_on_small_window() {
    let frame = ModalFrame::new(&PhysicalParams::unit(), 8).unwrap();
    let alpha = frame.random_state(8, 77);
    let obs = synthesize_observation(&alpha, (0.3, 0.6), 9.0, 33, 513, &frame);
    let r = coefficient_recovery(&obs, 8, &frame).unwrap();
    let err = alpha.sub(&r.alpha).coef_norm() / alpha.coef_norm();
    assert!(err < 1e-6, "relative error {err}, cond {}", r.cond);
    assert_eq!(r.rank, 25);
}

#[test]
fn nothing_nonzero_is_invisible_on_the_window() {
    // every unit coefficient vector produces an observation well above 1e-10
    let frame = ModalFrame::new(&PhysicalParams::unit(), 8).unwrap();
    let alpha = frame.random_state(8, 1);
    let obs = synthesize_observation(&alpha, (0.3, 0.6), 9.0, 33, 513, &frame);
    let r = coefficient_recovery(&obs, 8, &frame).unwrap();
    assert!(r.min_gain > 1e-10, "{}", r.min_gain);
}
