//! Time evolution: exact modal propagation and a finite-difference oracle.

use nalgebra::Vector3;
use num_complex::Complex64 as C;

use crate::control::{mode_matrices, mode_zero_pair, ControlSignal, ProjectedPair, Support};
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::quad::{gl_panels, trapezoid_weights};
use crate::state::{GridField, ModalFrame, ModalState};

const ZERO: C = C { re: 0.0, im: 0.0 };

pub const DEFAULT_SNAPSHOTS: usize = 33;
pub const CFL: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub enum Snapshots {
    Modal(Vec<ModalState>),
    Grid(Vec<GridField>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    Modal,
    Grid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Snapshots,
}

impl Trajectory {
    pub fn kind(&self) -> TrajectoryKind {
        match self.states {
            Snapshots::Modal(_) => TrajectoryKind::Modal,
            Snapshots::Grid(_) => TrajectoryKind::Grid,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn modal(&self) -> Option<&[ModalState]> {
        match &self.states {
            Snapshots::Modal(v) => Some(v),
            _ => None,
        }
    }

    pub fn grid(&self) -> Option<&[GridField]> {
        match &self.states {
            Snapshots::Grid(v) => Some(v),
            _ => None,
        }
    }

    pub fn last_modal(&self) -> Option<&ModalState> {
        self.modal().and_then(|v| v.last())
    }

    pub fn last_grid(&self) -> Option<&GridField> {
        self.grid().and_then(|v| v.last())
    }
}

fn snapshot_times(t_final: f64, n_snap: usize) -> Vec<f64> {
    (0..n_snap).map(|k| t_final * k as f64 / (n_snap - 1) as f64).collect()
}

fn check_horizon(t_final: f64, n_snap: usize) -> Result<()> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::validation("T", format!("must be positive, got {t_final}")));
    }
    if n_snap < 2 {
        return Err(Error::validation("snapshots", "need at least 2"));
    }
    Ok(())
}

/// `z <- e^{(s1 - s0)A} z + int_{s0}^{s1} e^{(s1 - s)A} B g(s) ds`.
fn step_mode(pair: &ProjectedPair, z: &mut Vector3<C>, s0: f64, s1: f64, g: Option<&dyn Fn(f64) -> C>) {
    let dt = s1 - s0;
    if dt <= 0.0 {
        return;
    }
    *z = pair.exp(dt) * *z;
    if let Some(g) = g {
        let rate = pair.eigenvalues().iter().map(|l| l.norm()).fold(0.0, f64::max);
        let panels = ((rate * dt / 0.5).ceil() as usize).max(1);
        let mut acc = Vector3::<C>::zeros();
        for (s, w) in gl_panels(s0, s1, panels, 8) {
            let v = g(s);
            if v != ZERO {
                acc += pair.exp(s1 - s) * pair.b * (v * w);
            }
        }
        *z += acc;
    }
}

/// Modal propagation by variation of constants, mode by mode.
pub fn evolve_modal(
    z0: &ModalState,
    f: Option<&ControlSignal>,
    t_final: f64,
    frame: &ModalFrame,
    n_snap: usize,
) -> Result<Trajectory> {
    check_horizon(t_final, n_snap)?;
    let nmax = z0.nmax();
    if nmax > frame.nmax() {
        return Err(Error::validation("n_max", format!("only {} bases available", frame.nmax())));
    }
    if let Some(sig) = f {
        if sig.support != Support::Everywhere && sig.localized.is_some() && sig.modal.is_empty() {
            return Err(Error::validation("control", "modal evolution needs modal samples"));
        }
        if (sig.t_final() - t_final).abs() > 1e-12 * t_final.max(1.0) {
            return Err(Error::validation("T", format!("control horizon {} differs from T = {t_final}", sig.t_final())));
        }
    }
    let times = snapshot_times(t_final, n_snap);
    let mut breaks: Vec<f64> = times.clone();
    if let Some(sig) = f {
        if sig.laws.is_none() {
            breaks.extend(sig.t.iter().copied());
            breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
            breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        }
    }
    let p = &frame.params;
    let modes: Vec<usize> = (0..=nmax).collect();
    let paths = crate::par::map(&modes, |&n| {
        let (pair, mut z) = if n == 0 {
            (mode_zero_pair(p), Vector3::new(z0.alpha0, ZERO, ZERO))
        } else {
            (mode_matrices(frame.basis(n), p), z0.mode(n))
        };
        let g_fn = |s: f64| f.map(|sig| sig.mode_value(n, s)).unwrap_or(ZERO);
        let g: Option<&dyn Fn(f64) -> C> = match f {
            Some(sig) if n < sig.modal.len() => Some(&g_fn),
            _ => None,
        };
        let mut out = Vec::with_capacity(times.len());
        out.push(z);
        let mut k = 1;
        for w in breaks.windows(2) {
            step_mode(&pair, &mut z, w[0], w[1], g);
            while k < times.len() && (times[k] - w[1]).abs() < 1e-14 {
                out.push(z);
                k += 1;
            }
        }
        out
    });
    let states = (0..times.len())
        .map(|k| {
            let mut st = ModalState::zeros(nmax);
            st.alpha0 = paths[0][k][0];
            for n in 1..=nmax {
                st.set_mode(n, &paths[n][k]);
            }
            st
        })
        .collect();
    Ok(Trajectory { times, states: Snapshots::Modal(states) })
}

/// Fewest RK4 steps on `[0, T]` allowed by the CFL bound.
pub fn min_steps(t_final: f64, nx: usize, p: &PhysicalParams) -> usize {
    let h = std::f64::consts::PI / (nx - 1) as f64;
    (t_final * p.c_wave / (CFL * h) * (1.0 - 1e-12)).ceil() as usize
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum System {
    Forward,
    Adjoint,
}

/// Source terms `(zeta_1, zeta_2, zeta_3)` added to the right-hand side at time `t`.
pub type SourceFn<'a> = &'a (dyn Fn(f64, &mut [Vec<C>; 3]) + Sync);
/// Prescribed velocity at `x = 0` and `x = pi`.
pub type BoundaryFn<'a> = &'a (dyn Fn(f64) -> (C, C) + Sync);
/// Called with every accepted state, including the initial one.
pub type Observer<'a> = &'a mut dyn FnMut(f64, &GridField);

/// Central difference of a field with an even reflection at both ends.
fn d_even(f: &[C], h: f64, out: &mut [C]) {
    let n = f.len();
    let k = 0.5 / h;
    out[0] = ZERO;
    out[n - 1] = ZERO;
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) * k;
    }
}

/// Central difference with an odd reflection about the boundary values.
fn d_odd(f: &[C], h: f64, out: &mut [C]) {
    let n = f.len();
    let k = 0.5 / h;
    out[0] = (f[1] - f[0]) / h;
    out[n - 1] = (f[n - 1] - f[n - 2]) / h;
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) * k;
    }
}

struct Engine<'a> {
    sys: System,
    p: &'a PhysicalParams,
    h: f64,
    source: Option<SourceFn<'a>>,
    control: Option<crate::control::ControlSampler<'a>>,
    boundary: Option<BoundaryFn<'a>>,
    scratch: [Vec<C>; 3],
    d_r: Vec<C>,
    d_u: Vec<C>,
    d_s: Vec<C>,
}

impl Engine<'_> {
    fn boundary_at(&self, t: f64) -> (C, C) {
        self.boundary.map(|b| b(t)).unwrap_or((ZERO, ZERO))
    }

    fn impose(&self, y: &mut GridField, t: f64) {
        let (a, b) = self.boundary_at(t);
        let n = y.u.len();
        y.u[0] = a;
        y.u[n - 1] = b;
    }

    fn rhs(&mut self, t: f64, y: &GridField, k: &mut GridField) {
        let (b, rs, mu, kappa) = (self.p.b, self.p.rho_s, self.p.mu, self.p.kappa);
        d_even(&y.rho, self.h, &mut self.d_r);
        d_odd(&y.u, self.h, &mut self.d_u);
        d_even(&y.s, self.h, &mut self.d_s);
        let sg = if self.sys == System::Forward { 1.0 } else { -1.0 };
        let n = y.rho.len();
        for i in 0..n {
            k.rho[i] = -sg * rs * self.d_u[i];
            k.u[i] = -sg * b * self.d_r[i] + sg * self.d_s[i] / rs;
            k.s[i] = -y.s[i] / kappa + sg * (mu / kappa) * self.d_u[i];
        }
        if let Some(c) = &self.control {
            c.eval(t, &mut self.scratch[0]);
            for i in 0..n {
                k.rho[i] += self.scratch[0][i];
            }
        }
        if let Some(src) = self.source {
            for v in self.scratch.iter_mut() {
                v.iter_mut().for_each(|c| *c = ZERO);
            }
            src(t, &mut self.scratch);
            for i in 0..n {
                k.rho[i] += self.scratch[0][i];
                k.u[i] += self.scratch[1][i];
                k.s[i] += self.scratch[2][i];
            }
        }
        // the boundary velocity is imposed, not evolved
        k.u[0] = ZERO;
        k.u[n - 1] = ZERO;
    }
}

fn combine(y: &GridField, a: f64, k: &GridField, out: &mut GridField) {
    for i in 0..y.rho.len() {
        out.rho[i] = y.rho[i] + k.rho[i] * a;
        out.u[i] = y.u[i] + k.u[i] * a;
        out.s[i] = y.s[i] + k.s[i] * a;
    }
}

struct RunSpec<'a> {
    sys: System,
    nt: usize,
    t_final: f64,
    n_snap: usize,
    p: &'a PhysicalParams,
}

fn run(
    spec: RunSpec<'_>,
    y0: &GridField,
    control: Option<&ControlSignal>,
    source: Option<SourceFn<'_>>,
    boundary: Option<BoundaryFn<'_>>,
    mut observer: Option<Observer<'_>>,
) -> Result<Trajectory> {
    y0.check()?;
    check_horizon(spec.t_final, spec.n_snap)?;
    let nx = y0.nx();
    let need = min_steps(spec.t_final, nx, spec.p);
    if spec.nt < need {
        return Err(Error::Config(format!(
            "nt = {} violates the CFL bound {CFL} (need nt >= {need} for nx = {nx}, T = {})",
            spec.nt, spec.t_final
        )));
    }
    if spec.nt + 1 < spec.n_snap {
        return Err(Error::Config(format!("nt = {} cannot hold {} snapshots", spec.nt, spec.n_snap)));
    }
    if let Some(c) = control {
        if (c.t_final() - spec.t_final).abs() > 1e-12 * spec.t_final.max(1.0) {
            return Err(Error::validation("T", "control horizon differs from T"));
        }
    }
    let dt = spec.t_final / spec.nt as f64;
    let x = y0.x.clone();
    let mut eng = Engine {
        sys: spec.sys,
        p: spec.p,
        h: y0.h(),
        source,
        control: control.map(|c| c.sampler(&x)),
        boundary,
        scratch: [vec![ZERO; nx], vec![ZERO; nx], vec![ZERO; nx]],
        d_r: vec![ZERO; nx],
        d_u: vec![ZERO; nx],
        d_s: vec![ZERO; nx],
    };
    let mut y = y0.clone();
    eng.impose(&mut y, 0.0);
    let snap_steps: Vec<usize> =
        (0..spec.n_snap).map(|k| ((k * spec.nt) as f64 / (spec.n_snap - 1) as f64).round() as usize).collect();
    let mut times = vec![0.0];
    let mut snaps = vec![y.clone()];
    if let Some(obs) = observer.as_mut() {
        obs(0.0, &y);
    }
    let mut k1 = y.clone();
    let mut k2 = y.clone();
    let mut k3 = y.clone();
    let mut k4 = y.clone();
    let mut tmp = y.clone();
    let mut next = 1;
    for step in 1..=spec.nt {
        let t = (step - 1) as f64 * dt;
        eng.rhs(t, &y, &mut k1);
        combine(&y, 0.5 * dt, &k1, &mut tmp);
        eng.impose(&mut tmp, t + 0.5 * dt);
        eng.rhs(t + 0.5 * dt, &tmp, &mut k2);
        combine(&y, 0.5 * dt, &k2, &mut tmp);
        eng.impose(&mut tmp, t + 0.5 * dt);
        eng.rhs(t + 0.5 * dt, &tmp, &mut k3);
        combine(&y, dt, &k3, &mut tmp);
        eng.impose(&mut tmp, t + dt);
        eng.rhs(t + dt, &tmp, &mut k4);
        let w = dt / 6.0;
        for i in 0..nx {
            y.rho[i] += (k1.rho[i] + k2.rho[i] * 2.0 + k3.rho[i] * 2.0 + k4.rho[i]) * w;
            y.u[i] += (k1.u[i] + k2.u[i] * 2.0 + k3.u[i] * 2.0 + k4.u[i]) * w;
            y.s[i] += (k1.s[i] + k2.s[i] * 2.0 + k3.s[i] * 2.0 + k4.s[i]) * w;
        }
        let tn = step as f64 * dt;
        eng.impose(&mut y, tn);
        if !y.rho[nx / 2].is_finite() {
            return Err(Error::Numerical { n: 0, reason: format!("finite-difference blow-up at t = {tn}") });
        }
        if let Some(obs) = observer.as_mut() {
            obs(tn, &y);
        }
        while next < snap_steps.len() && snap_steps[next] == step {
            times.push(tn);
            snaps.push(y.clone());
            next += 1;
        }
    }
    Ok(Trajectory { times, states: Snapshots::Grid(snaps) })
}

#[derive(Default)]
pub struct FdOptions<'a> {
    pub n_snap: Option<usize>,
    pub observer: Option<Observer<'a>>,
}

/// RK4 with central differences for
/// `rho_t = -rho_s u_x + f`, `u_t = -b rho_x + S_x / rho_s`, `S_t = -S/kappa + (mu/kappa) u_x`,
/// `u = 0` at both ends.
pub fn fd_solve(
    z0: &GridField,
    f: Option<&ControlSignal>,
    t_final: f64,
    nt: usize,
    p: &PhysicalParams,
    opts: FdOptions<'_>,
) -> Result<Trajectory> {
    let spec = RunSpec { sys: System::Forward, nt, t_final, n_snap: opts.n_snap.unwrap_or(DEFAULT_SNAPSHOTS), p };
    run(spec, z0, f, None, None, opts.observer)
}

/// RK4 for the adjoint system
/// `sigma_t = rho_s v_x + z1`, `v_t = b sigma_x - S_x / rho_s + z2`, `S_t = -S/kappa - (mu/kappa) v_x + z3`
/// with `v(t, 0) = h0(t)`, `v(t, pi) = h_pi(t)`.
pub fn adjoint_solve(
    q0: &GridField,
    source: Option<SourceFn<'_>>,
    boundary: Option<BoundaryFn<'_>>,
    t_final: f64,
    nt: usize,
    p: &PhysicalParams,
    opts: FdOptions<'_>,
) -> Result<Trajectory> {
    let spec = RunSpec { sys: System::Adjoint, nt, t_final, n_snap: opts.n_snap.unwrap_or(DEFAULT_SNAPSHOTS), p };
    run(spec, q0, None, source, boundary, opts.observer)
}

/// Energy norm squared with trapezoid weights, the quantity the scheme dissipates.
pub fn discrete_energy(y: &GridField, p: &PhysicalParams) -> f64 {
    let w = trapezoid_weights(y.nx(), y.h());
    let [wb, wr, ws] = p.weights();
    (0..y.nx()).map(|i| w[i] * (wb * y.rho[i].norm_sqr() + wr * y.u[i].norm_sqr() + ws * y.s[i].norm_sqr())).sum()
}

/// `(int rho, int S)` with trapezoid weights; both are exact invariants of the scheme
/// (the second up to the factor `e^{-t/kappa}`).
pub fn discrete_means(y: &GridField) -> (C, C) {
    let w = trapezoid_weights(y.nx(), y.h());
    let m = |f: &[C]| f.iter().zip(&w).map(|(a, b)| a * b).sum::<C>();
    (m(&y.rho), m(&y.s))
}
