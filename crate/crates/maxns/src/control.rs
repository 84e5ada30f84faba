//! Projected mode pairs, Gramians and control synthesis.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use num_complex::Complex64 as C;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::basis::BasisPair;
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::quad::gl_panels;
use crate::spectrum::Multiplicity;
use crate::state::{ModalFrame, ModalState};

const ZERO: C = C { re: 0.0, im: 0.0 };
const ONE: C = C { re: 1.0, im: 0.0 };

/// Matrix representation `(A_n, B_n)` of the generator and of the density control
/// restricted to mode `n`. Mode 0 is the scalar pair `(0, sqrt(b))`, stored in the
/// leading entry with `dim == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedPair {
    pub n: u64,
    pub dim: usize,
    pub a: Matrix3<C>,
    pub b: Vector3<C>,
    pub structure: Multiplicity,
}

pub fn mode_zero_pair(p: &PhysicalParams) -> ProjectedPair {
    ProjectedPair {
        n: 0,
        dim: 1,
        a: Matrix3::zeros(),
        b: Vector3::new(C::new(p.b.sqrt(), 0.0), ZERO, ZERO),
        structure: Multiplicity::Simple,
    }
}

pub fn mode_matrices(basis: &BasisPair, p: &PhysicalParams) -> ProjectedPair {
    let k = p.b * FRAC_PI_2.sqrt();
    let b = Vector3::from_fn(|l, _| k * basis.adjoint[l].rho.conj());
    ProjectedPair { n: basis.n, dim: 3, a: basis.modal_generator(), b, structure: basis.structure }
}

impl ProjectedPair {
    /// `e^{tA}` from the diagonal/nilpotent split `A = D + N`, `DN = ND`.
    pub fn exp(&self, t: f64) -> Matrix3<C> {
        let mut e = Matrix3::<C>::zeros();
        for i in 0..self.dim {
            e[(i, i)] = (self.a[(i, i)] * t).exp();
        }
        if self.structure == Multiplicity::Simple || self.dim == 1 {
            return e;
        }
        let mut nil = self.a;
        for i in 0..3 {
            nil[(i, i)] = ZERO;
        }
        let nt = nil * C::new(t, 0.0);
        let poly = Matrix3::identity() + nt + nt * nt * C::new(0.5, 0.0);
        e * poly
    }

    pub fn exp_adjoint(&self, t: f64) -> Matrix3<C> {
        self.exp(t).adjoint()
    }

    pub fn eigenvalues(&self) -> Vec<C> {
        (0..self.dim).map(|i| self.a[(i, i)]).collect()
    }

    pub fn b_norm(&self) -> f64 {
        self.b.norm()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HautusReport {
    pub ok: bool,
    pub rank: Vec<usize>,
    pub min_sv: Vec<f64>,
}

/// Rank test of `[lambda I - A ; B^T]` at every eigenvalue of `A`.
pub fn hautus_check(pair: &ProjectedPair) -> HautusReport {
    let d = pair.dim;
    let scale = 1.0 + pair.a.norm() + pair.b.norm();
    let mut rank = Vec::new();
    let mut min_sv = Vec::new();
    for lam in pair.eigenvalues() {
        let m = DMatrix::<C>::from_fn(d + 1, d, |r, c| {
            if r < d {
                let id = if r == c { lam } else { ZERO };
                id - pair.a[(r, c)]
            } else {
                pair.b[c]
            }
        });
        let sv = m.singular_values();
        let tol = 1e-10 * scale;
        rank.push(sv.iter().filter(|s| **s > tol).count());
        min_sv.push(sv.min());
    }
    let ok = rank.iter().all(|r| *r == d);
    HautusReport { ok, rank, min_sv }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramianBlock {
    pub n: u64,
    pub t_final: f64,
    pub dim: usize,
    pub w: Matrix3<C>,
    pub w_inv: Matrix3<C>,
    pub norm: f64,
    pub inv_norm: f64,
    pub min_eig: f64,
}

/// `(e^{T z} - 1)/z`, with the limit `T` near `z = 0`.
pub fn exp_quotient(z: C, t: f64) -> C {
    if z.norm() < 1e-12 {
        C::new(t, 0.0)
    } else {
        ((z * t).exp() - 1.0) / z
    }
}

fn hermitian_eigs(w: &Matrix3<C>, dim: usize) -> Vec<f64> {
    if dim == 1 {
        return vec![w[(0, 0)].re];
    }
    let h = (w + w.adjoint()) * C::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().collect()
}

/// Controllability Gramian of the mode pair on `[0, T]`.
pub fn gramian(pair: &ProjectedPair, t_final: f64) -> Result<GramianBlock> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::validation("T", format!("must be positive, got {t_final}")));
    }
    let d = pair.dim;
    let mut w = Matrix3::<C>::zeros();
    if pair.structure == Multiplicity::Simple || d == 1 {
        for i in 0..d {
            for j in 0..d {
                let z = pair.a[(i, i)] + pair.a[(j, j)].conj();
                w[(i, j)] = pair.b[i] * pair.b[j].conj() * exp_quotient(z, t_final);
            }
        }
    } else {
        let rate = pair.eigenvalues().iter().map(|l| l.norm()).fold(0.0, f64::max);
        let panels = ((rate * t_final / 0.5).ceil() as usize).max(8);
        let bb = pair.b * pair.b.adjoint();
        for (s, wt) in gl_panels(0.0, t_final, panels, 8) {
            let e = pair.exp(s);
            w += e * bb * e.adjoint() * C::new(wt, 0.0);
        }
    }
    let eig = hermitian_eigs(&w, d);
    let min_eig = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max_eig = eig.iter().copied().fold(0.0, f64::max);
    if !(min_eig > 1e-14 * max_eig) {
        return Err(Error::SingularGramian { n: pair.n, min_eig, norm: max_eig });
    }
    let w_inv = if d == 1 {
        let mut m = Matrix3::zeros();
        m[(0, 0)] = ONE / w[(0, 0)];
        m
    } else {
        w.try_inverse().ok_or(Error::SingularGramian { n: pair.n, min_eig, norm: max_eig })?
    };
    Ok(GramianBlock { n: pair.n, t_final, dim: d, w, w_inv, norm: max_eig, inv_norm: 1.0 / min_eig, min_eig })
}

/// Minimum-energy control law of one mode,
/// `f_n(t) = -B^* e^{(T - t) A^*} eta` with `eta = W^{-1} e^{TA} z0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeLaw {
    pub pair: ProjectedPair,
    pub eta: Vector3<C>,
    pub t_final: f64,
    /// `int_0^T |f_n|^2`, evaluated as `x^* W^{-1} x` with `x = e^{TA} z0`.
    pub energy: f64,
}

impl ModeLaw {
    pub fn eval(&self, t: f64) -> C {
        let e = self.pair.exp_adjoint(self.t_final - t);
        -(self.pair.b.adjoint() * e * self.eta)[0]
    }
}

pub fn mode_control(pair: &ProjectedPair, gram: &GramianBlock, z0n: &Vector3<C>) -> ModeLaw {
    let t = gram.t_final;
    let x = pair.exp(t) * z0n;
    let eta = gram.w_inv * x;
    let energy = (x.adjoint() * eta)[0].re.max(0.0);
    ModeLaw { pair: pair.clone(), eta, t_final: t, energy }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Support {
    Everywhere,
    Interval(f64, f64),
}

/// Samples of a localized control on a tensor grid; bilinear in between, zero
/// outside `[x[0], x[last]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizedField {
    pub x: Vec<f64>,
    /// `values[j][k]` at `(t[j], x[k])`.
    pub values: Vec<Vec<C>>,
}

/// Density control `f(t, x) = sum_n g_n(t) E_n(x)` on `[0, T]`, with
/// `E_0 = 1/sqrt(pi)` and `E_n = sqrt(2/pi) cos(nx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSignal {
    pub t: Vec<f64>,
    /// `modal[n][j] = g_n(t[j])` for `n = 0..=nmax`.
    pub modal: Vec<Vec<C>>,
    pub support: Support,
    pub laws: Option<Vec<ModeLaw>>,
    pub localized: Option<LocalizedField>,
}

pub fn e_n(n: usize, x: f64) -> f64 {
    if n == 0 {
        1.0 / PI.sqrt()
    } else {
        (2.0 / PI).sqrt() * (n as f64 * x).cos()
    }
}

fn locate(t: &[f64], s: f64) -> (usize, f64) {
    let last = t.len() - 1;
    if s <= t[0] {
        return (0, 0.0);
    }
    if s >= t[last] {
        return (last - 1, 1.0);
    }
    let mut lo = 0;
    let mut hi = last;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if t[mid] <= s { lo = mid } else { hi = mid }
    }
    (lo, (s - t[lo]) / (t[lo + 1] - t[lo]))
}

impl ControlSignal {
    pub fn zero(t_final: f64, nt: usize, nmax: usize) -> Self {
        let t = (0..=nt).map(|j| t_final * j as f64 / nt as f64).collect();
        ControlSignal {
            t,
            modal: vec![vec![ZERO; nt + 1]; nmax + 1],
            support: Support::Everywhere,
            laws: None,
            localized: None,
        }
    }

    pub fn nmax(&self) -> usize {
        self.modal.len() - 1
    }

    pub fn t_final(&self) -> f64 {
        *self.t.last().unwrap()
    }

    /// `g_n(t)`: exact when a law is attached, else linear interpolation.
    pub fn mode_value(&self, n: usize, t: f64) -> C {
        if n >= self.modal.len() {
            return ZERO;
        }
        if let Some(laws) = &self.laws {
            return laws[n].eval(t);
        }
        let (j, a) = locate(&self.t, t);
        self.modal[n][j] * (1.0 - a) + self.modal[n][j + 1] * a
    }

    /// Sample `f(t, .)` on `x`.
    pub fn sampler<'a>(&'a self, x: &'a [f64]) -> ControlSampler<'a> {
        let table = if self.localized.is_none() {
            (0..=self.nmax()).map(|n| x.iter().map(|&xi| e_n(n, xi)).collect()).collect()
        } else {
            Vec::new()
        };
        ControlSampler { signal: self, x, table }
    }

    /// `sum_n int |g_n|^2 dt` (trapezoid on the samples, or exact from laws).
    pub fn energy(&self) -> f64 {
        if let Some(laws) = &self.laws {
            return laws.iter().map(|l| l.energy).sum();
        }
        self.per_mode_energy().iter().sum()
    }

    pub fn per_mode_energy(&self) -> Vec<f64> {
        if let Some(laws) = &self.laws {
            return laws.iter().map(|l| l.energy).collect();
        }
        self.modal
            .iter()
            .map(|g| {
                let mut e = 0.0;
                for j in 0..self.t.len() - 1 {
                    let dt = self.t[j + 1] - self.t[j];
                    // exact for piecewise-linear g
                    let (a, b) = (g[j], g[j + 1]);
                    e += dt / 3.0 * (a.norm_sqr() + (a * b.conj()).re + b.norm_sqr());
                }
                e
            })
            .collect()
    }

    pub fn scale(&self, k: C) -> Self {
        let mut out = self.clone();
        for g in out.modal.iter_mut() {
            for v in g.iter_mut() {
                *v *= k;
            }
        }
        if let Some(laws) = out.laws.as_mut() {
            for l in laws.iter_mut() {
                l.eta *= k;
                l.energy *= k.norm_sqr();
            }
        }
        if let Some(loc) = out.localized.as_mut() {
            for row in loc.values.iter_mut() {
                for v in row.iter_mut() {
                    *v *= k;
                }
            }
        }
        out
    }
}

pub struct ControlSampler<'a> {
    signal: &'a ControlSignal,
    x: &'a [f64],
    table: Vec<Vec<f64>>,
}

impl ControlSampler<'_> {
    pub fn eval(&self, t: f64, out: &mut [C]) {
        out.iter_mut().for_each(|v| *v = ZERO);
        let sig = self.signal;
        if let Some(loc) = &sig.localized {
            let (j, a) = locate(&sig.t, t);
            let (x0, x1) = (loc.x[0], *loc.x.last().unwrap());
            for (i, &xi) in self.x.iter().enumerate() {
                if xi <= x0 || xi >= x1 {
                    continue;
                }
                let (k, b) = locate(&loc.x, xi);
                let v0 = loc.values[j][k] * (1.0 - b) + loc.values[j][k + 1] * b;
                let v1 = loc.values[j + 1][k] * (1.0 - b) + loc.values[j + 1][k + 1] * b;
                out[i] = v0 * (1.0 - a) + v1 * a;
            }
            return;
        }
        for n in 0..=sig.nmax() {
            let g = sig.mode_value(n, t);
            if g == ZERO {
                continue;
            }
            for (o, e) in out.iter_mut().zip(&self.table[n]) {
                *o += g * *e;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct NullControl {
    pub signal: ControlSignal,
    pub energy: f64,
    pub per_mode_energy: Vec<f64>,
    pub gramians: Vec<GramianBlock>,
}

pub const DEFAULT_NT: usize = 512;

/// Everywhere-supported density control steering the modal state `z0` to zero at `T`.
pub fn assemble_control(z0: &ModalState, t_final: f64, frame: &ModalFrame, nt: usize) -> Result<NullControl> {
    let nmax = z0.nmax();
    if nmax > frame.nmax() {
        return Err(Error::validation("n_max", format!("only {} bases available", frame.nmax())));
    }
    if nt < 2 {
        return Err(Error::validation("nt", "need at least two time intervals"));
    }
    let p = &frame.params;
    let modes: Vec<usize> = (0..=nmax).collect();
    let built = crate::par::map(&modes, |&n| -> Result<(ModeLaw, GramianBlock)> {
        let (pair, z) = if n == 0 {
            (mode_zero_pair(p), Vector3::new(z0.alpha0, ZERO, ZERO))
        } else {
            (mode_matrices(frame.basis(n), p), z0.mode(n))
        };
        let g = gramian(&pair, t_final)?;
        Ok((mode_control(&pair, &g, &z), g))
    });
    let mut laws = Vec::with_capacity(nmax + 1);
    let mut gramians = Vec::with_capacity(nmax + 1);
    for r in built {
        let (l, g) = r?;
        laws.push(l);
        gramians.push(g);
    }
    let mut signal = ControlSignal::zero(t_final, nt, nmax);
    for (n, law) in laws.iter().enumerate() {
        for (j, &t) in signal.t.iter().enumerate() {
            signal.modal[n][j] = law.eval(t);
        }
    }
    let per_mode_energy: Vec<f64> = laws.iter().map(|l| l.energy).collect();
    let energy = per_mode_energy.iter().sum();
    signal.laws = Some(laws);
    Ok(NullControl { signal, energy, per_mode_energy, gramians })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxOptions {
    pub nt_hats: usize,
    pub nx_hats: usize,
    pub reg: f64,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions { nt_hats: 64, nx_hats: 16, reg: 1e-8 }
    }
}

#[derive(Debug, Clone)]
pub struct ApproxControl {
    pub signal: ControlSignal,
    pub terminal: ModalState,
    /// `||z(T) - zT||_Z`.
    pub terminal_error: f64,
    pub energy: f64,
    pub per_mode_energy: Vec<f64>,
    /// `coeffs[a * nx_hats + b]` multiplies `h_a(t) s_b(x)`.
    pub coeffs: Vec<C>,
}

/// `int hat(x) E_n(x) dx` for the hat of half-width `d` centred at `c`.
fn hat_projection(n: usize, c: f64, d: f64) -> f64 {
    if n == 0 {
        return d / PI.sqrt();
    }
    let h = 0.5 * n as f64 * d;
    let sinc = if h.abs() < 1e-8 { 1.0 - h * h / 6.0 } else { h.sin() / h };
    (2.0 / PI).sqrt() * (n as f64 * c).cos() * d * sinc * sinc
}

/// `int_0^T e^{(T - s)A} B h_a(s) ds` for the time hat with node `a`.
fn hat_response(pair: &ProjectedPair, nodes: &[f64], a: usize, t_final: f64) -> Vector3<C> {
    let rate = pair.eigenvalues().iter().map(|l| l.norm()).fold(0.0, f64::max);
    let mut acc = Vector3::<C>::zeros();
    let mut pieces = Vec::new();
    if a > 0 {
        pieces.push((nodes[a - 1], nodes[a], true));
    }
    if a + 1 < nodes.len() {
        pieces.push((nodes[a], nodes[a + 1], false));
    }
    for (lo, hi, rising) in pieces {
        let panels = ((rate * (hi - lo) / 0.5).ceil() as usize).max(1);
        for (s, w) in gl_panels(lo, hi, panels, 8) {
            let h = if rising { (s - lo) / (hi - lo) } else { (hi - s) / (hi - lo) };
            acc += pair.exp(t_final - s) * pair.b * C::new(w * h, 0.0);
        }
    }
    acc
}

/// Free evolution `e^{TA} z0` of a modal state.
pub fn free_evolution(z0: &ModalState, t: f64, frame: &ModalFrame) -> ModalState {
    let p = &frame.params;
    let mut out = ModalState::zeros(z0.nmax());
    out.alpha0 = z0.alpha0;
    for n in 1..=z0.nmax() {
        let pair = mode_matrices(frame.basis(n), p);
        out.set_mode(n, &(pair.exp(t) * z0.mode(n)));
    }
    out
}

/// Tikhonov least squares for a density control supported in `o1`, built from
/// tensor products of time hats and space hats.
pub fn approx_control(
    z0: &ModalState,
    z_target: &ModalState,
    o1: (f64, f64),
    t_final: f64,
    frame: &ModalFrame,
    opts: ApproxOptions,
) -> Result<ApproxControl> {
    let (lo, hi) = o1;
    if !(0.0 <= lo && lo < hi && hi <= PI) {
        return Err(Error::validation("O1", format!("need 0 <= lo < hi <= pi, got ({lo}, {hi})")));
    }
    if !(t_final > 0.0) {
        return Err(Error::validation("T", "must be positive"));
    }
    if !(opts.reg >= 0.0) {
        return Err(Error::validation("reg", "must be non-negative"));
    }
    if opts.nt_hats < 2 || opts.nx_hats < 1 {
        return Err(Error::validation("hats", "need >= 2 time hats and >= 1 space hat"));
    }
    let nmax = z0.nmax();
    if z_target.nmax() != nmax || nmax > frame.nmax() {
        return Err(Error::validation("n_max", "initial and target states must share the truncation"));
    }
    let p = &frame.params;
    let (nta, nxb) = (opts.nt_hats, opts.nx_hats);
    let tn: Vec<f64> = (0..nta).map(|a| t_final * a as f64 / (nta - 1) as f64).collect();
    let dx = (hi - lo) / (nxb + 1) as f64;
    let xn: Vec<f64> = (0..nxb).map(|b| lo + (b + 1) as f64 * dx).collect();
    let ncol = nta * nxb;
    let nrow = 1 + 3 * nmax;

    let pairs: Vec<ProjectedPair> = std::iter::once(mode_zero_pair(p))
        .chain((1..=nmax).map(|n| mode_matrices(frame.basis(n), p)))
        .collect();
    let sproj: Vec<Vec<f64>> = (0..=nmax).map(|n| xn.iter().map(|&c| hat_projection(n, c, dx)).collect()).collect();
    let responses: Vec<Vec<Vector3<C>>> =
        crate::par::map(&pairs, |pair| (0..nta).map(|a| hat_response(pair, &tn, a, t_final)).collect());

    // Cholesky factors of the per-mode Gram matrices, so that ||r||_Z = ||L^H r||.
    let mut lh = Vec::with_capacity(nmax);
    for n in 1..=nmax {
        let g = frame.grams[n - 1];
        let h = (g + g.adjoint()) * C::new(0.5, 0.0);
        let ch = h.cholesky().ok_or_else(|| Error::Numerical { n: n as u64, reason: "Gram matrix not positive".into() })?;
        lh.push(ch.l().adjoint());
    }

    let mut k = DMatrix::<C>::zeros(nrow, ncol);
    for a in 0..nta {
        for b in 0..nxb {
            let col = a * nxb + b;
            k[(0, col)] = responses[0][a][0] * sproj[0][b];
            for n in 1..=nmax {
                let v = lh[n - 1] * responses[n][a] * C::new(sproj[n][b], 0.0);
                for l in 0..3 {
                    k[(1 + 3 * (n - 1) + l, col)] = v[l];
                }
            }
        }
    }
    let free = free_evolution(z0, t_final, frame);
    let mut y = DVector::<C>::zeros(nrow);
    y[0] = z_target.alpha0 - free.alpha0;
    for n in 1..=nmax {
        let v = lh[n - 1] * (z_target.mode(n) - free.mode(n));
        for l in 0..3 {
            y[1 + 3 * (n - 1) + l] = v[l];
        }
    }

    // mass matrices of the hat families
    let dt = t_final / (nta - 1) as f64;
    let mt = |a: usize, c: usize| -> f64 {
        if a == c {
            if a == 0 || a == nta - 1 { dt / 3.0 } else { 2.0 * dt / 3.0 }
        } else if a.abs_diff(c) == 1 {
            dt / 6.0
        } else {
            0.0
        }
    };
    let mx = |b: usize, d: usize| -> f64 {
        if b == d {
            2.0 * dx / 3.0
        } else if b.abs_diff(d) == 1 {
            dx / 6.0
        } else {
            0.0
        }
    };
    let mass = DMatrix::<C>::from_fn(ncol, ncol, |r, c| {
        let (a, b) = (r / nxb, r % nxb);
        let (a2, b2) = (c / nxb, c % nxb);
        C::new(mt(a, a2) * mx(b, b2), 0.0)
    });
    let kh = k.adjoint();
    let normal = &kh * &k + &mass * C::new(opts.reg, 0.0);
    let rhs = &kh * &y;
    let coeffs = match normal.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => normal
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical { n: 0, reason: "normal system is singular".into() })?,
    };

    // terminal state with the exact (unweighted) response
    let mut terminal = free.clone();
    let mut signal_modal = vec![vec![ZERO; nta]; nmax + 1];
    for n in 0..=nmax {
        let mut acc = Vector3::<C>::zeros();
        for a in 0..nta {
            let mut g = ZERO;
            for b in 0..nxb {
                g += coeffs[a * nxb + b] * sproj[n][b];
            }
            signal_modal[n][a] = g;
            acc += responses[n][a] * g;
        }
        if n == 0 {
            terminal.alpha0 += acc[0];
        } else {
            let v = terminal.mode(n) + acc;
            terminal.set_mode(n, &v);
        }
    }
    let terminal_error = frame.z_norm(&terminal.sub(z_target));
    let energy = (coeffs.adjoint() * &mass * &coeffs)[0].re;

    let mut xs = vec![lo];
    xs.extend(&xn);
    xs.push(hi);
    let values = (0..nta)
        .map(|a| {
            let mut row = vec![ZERO];
            row.extend((0..nxb).map(|b| coeffs[a * nxb + b]));
            row.push(ZERO);
            row
        })
        .collect();
    let mut signal = ControlSignal {
        t: tn,
        modal: signal_modal,
        support: Support::Interval(lo, hi),
        laws: None,
        localized: Some(LocalizedField { x: xs, values }),
    };
    let per_mode_energy = signal.per_mode_energy();
    signal.laws = None;
    Ok(ApproxControl {
        signal,
        terminal,
        terminal_error,
        energy,
        per_mode_energy,
        coeffs: coeffs.iter().copied().collect(),
    })
}
