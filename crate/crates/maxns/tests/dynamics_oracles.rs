mod common;

use common::expm;
use maxns::control::mode_matrices;
use maxns::dynamics::{adjoint_solve, evolve_modal, fd_solve, min_steps, FdOptions};
use maxns::spectrum::Multiplicity;
use maxns::state::{inner_product, reconstruct, z_norm_grid, GridField, ModalFrame, ModalState};
use maxns::{PhysicalParams, RawParams};
use num_complex::Complex64 as C;

fn fd_vs_modal(nx: usize, frame: &ModalFrame, z0: &ModalState) -> f64 {
    let p = &frame.params;
    let modal = evolve_modal(z0, None, 1.0, frame, 2).unwrap();
    let exact = reconstruct(modal.last_modal().unwrap(), frame, nx).unwrap();
    let g0 = reconstruct(z0, frame, nx).unwrap();
    let tr = fd_solve(&g0, None, 1.0, min_steps(1.0, nx, p), p, FdOptions { n_snap: Some(2), observer: None }).unwrap();
    let mut d = tr.last_grid().unwrap().clone();
    d.axpy(C::new(-1.0, 0.0), &exact);
    z_norm_grid(&d, p) / z_norm_grid(&exact, p)
}

#[test]
fn modal_and_fd_agree_with_second_order() {
    let frame = ModalFrame::new(&PhysicalParams::unit(), 16).unwrap();
    let z0 = frame.random_state(16, 41);
    let e1 = fd_vs_modal(2001, &frame, &z0);
    let e2 = fd_vs_modal(4001, &frame, &z0);
    assert!(e1 < 1e-3, "{e1}");
    assert!(e1 / e2 > 3.5, "order: {e1} -> {e2}");
}

#[test]
fn forward_adjoint_duality() {
    let p = PhysicalParams::unit();
    let frame = ModalFrame::new(&p, 12).unwrap();
    let nx = 513;
    let z = reconstruct(&frame.random_state(12, 1), &frame, nx).unwrap();
    let q = reconstruct(&frame.random_state(12, 2), &frame, nx).unwrap();
    let t = 1.0;
    let nt = min_steps(t, nx, &p).div_ceil(32) * 32;
    let opts = || FdOptions { n_snap: Some(33), observer: None };
    let fwd = fd_solve(&z, None, t, nt, &p, opts()).unwrap();
    let adj = adjoint_solve(&q, None, None, t, nt, &p, opts()).unwrap();
    let (fz, aq) = (fwd.grid().unwrap(), adj.grid().unwrap());
    let pairs: Vec<C> = (0..33).map(|k| inner_product(&fz[k], &aq[32 - k], &p).unwrap()).collect();
    let dev = pairs.iter().map(|v| (v - pairs[0]).norm()).fold(0.0, f64::max);
    assert!(dev < 1e-5 * pairs[0].norm().max(1.0), "{dev}");
}

#[test]
fn jordan_mode_evolution_matches_dense_exponential() {
    let kappa = 1.0 / 27f64.sqrt();
    let p = PhysicalParams::new(RawParams { rho_s: 1.0, a: 1.0, gamma: 1.0, mu: 8.0 * kappa, kappa }).unwrap();
    let frame = ModalFrame::new(&p, 3).unwrap();
    assert_eq!(frame.spectra[0].multiplicity, Multiplicity::Triple);
    let mut z0 = ModalState::zeros(3);
    z0.coeffs[0] = [C::new(0.3, 0.1), C::new(-1.0, 0.0), C::new(0.5, 2.0)];
    let tr = evolve_modal(&z0, None, 2.0, &frame, 5).unwrap();
    let a = mode_matrices(frame.basis(1), &p).a;
    for (t, st) in tr.times.iter().zip(tr.modal().unwrap()) {
        let e = expm(&a.map(|v| v * *t)) * z0.mode(1);
        assert!((st.mode(1) - e).norm() < 1e-10 * e.norm().max(1.0));
    }
}

#[test]
fn dirichlet_data_preserved() {
    let p = PhysicalParams::unit();
    let frame = ModalFrame::new(&p, 8).unwrap();
    let g: GridField = reconstruct(&frame.random_state(8, 3), &frame, 257).unwrap();
    let tr = fd_solve(&g, None, 0.5, min_steps(0.5, 257, &p), &p, FdOptions::default()).unwrap();
    for s in tr.grid().unwrap() {
        assert_eq!(s.u[0], C::new(0.0, 0.0));
        assert_eq!(s.u[256], C::new(0.0, 0.0));
    }
    assert_eq!(tr.times.len(), 33);
    assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
}
