//! Per-mode characteristic cubic: roots, ordering, multiplicity and asymptotics.

use nalgebra::Matrix3;
use num_complex::Complex64 as C;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::PhysicalParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Multiplicity {
    Simple,
    /// `lambda2 == lambda3`; `lambda1` stays the simple root.
    Double,
    Triple,
}

impl Multiplicity {
    pub fn tag(&self) -> &'static str {
        match self {
            Multiplicity::Simple => "simple",
            Multiplicity::Double => "double",
            Multiplicity::Triple => "triple",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeSpectrum {
    pub n: u64,
    pub lambda: [C; 3],
    pub multiplicity: Multiplicity,
}

impl ModeSpectrum {
    pub fn lambda1(&self) -> C {
        self.lambda[0]
    }
    pub fn lambda2(&self) -> C {
        self.lambda[1]
    }
    pub fn lambda3(&self) -> C {
        self.lambda[2]
    }
}

/// Coefficients `(c2, c1, c0)` of the monic cubic `l^3 + c2 l^2 + c1 l + c0`.
pub fn charpoly_coeffs(n: u64, p: &PhysicalParams) -> (f64, f64, f64) {
    let n2 = (n as f64) * (n as f64);
    let c2 = 1.0 / p.kappa;
    let c1 = (p.mu / (p.kappa * p.rho_s) + p.b * p.rho_s) * n2;
    let c0 = p.b * p.rho_s / p.kappa * n2;
    (c2, c1, c0)
}

pub fn charpoly_eval(n: u64, lambda: C, p: &PhysicalParams) -> C {
    let (c2, c1, c0) = charpoly_coeffs(n, p);
    ((lambda + c2) * lambda + c1) * lambda + c0
}

fn eval_with_derivs(c: (f64, f64, f64), z: C) -> (C, C, C) {
    let (c2, c1, c0) = c;
    let f = ((z + c2) * z + c1) * z + c0;
    let df = (3.0 * z + 2.0 * c2) * z + c1;
    let ddf = 6.0 * z + 2.0 * c2;
    (f, df, ddf)
}

/// Magnitude scale of the terms of `F(z)`, used for relative residuals.
fn term_scale(c: (f64, f64, f64), z: C) -> f64 {
    let r = z.norm();
    r * r * r + c.0 * r * r + c.1 * r + c.2
}

/// The double-root indicator `q_n(lambda)`; it vanishes exactly when `lambda`
/// is a multiple root.
pub fn q_n(n: u64, lambda: C, p: &PhysicalParams) -> C {
    let n2 = (n as f64) * (n as f64);
    let d = 1.0 + p.kappa * lambda;
    -p.b + lambda * lambda / (p.rho_s * n2)
        - p.mu * p.kappa * lambda * lambda / (p.rho_s * p.rho_s * d * d)
}

fn newton_polish(c: (f64, f64, f64), mut z: C, max_iter: usize) -> C {
    let (mut f, mut df, _) = eval_with_derivs(c, z);
    for _ in 0..max_iter {
        if df.norm() == 0.0 || f.norm() == 0.0 {
            break;
        }
        let cand = z - f / df;
        let (fc, dfc, _) = eval_with_derivs(c, cand);
        if fc.norm() >= f.norm() {
            break;
        }
        z = cand;
        f = fc;
        df = dfc;
    }
    z
}

fn real_newton(c: (f64, f64, f64), mut x: f64) -> f64 {
    let (c2, c1, c0) = c;
    let f = |x: f64| ((x + c2) * x + c1) * x + c0;
    let df = |x: f64| (3.0 * x + 2.0 * c2) * x + c1;
    for _ in 0..50 {
        let d = df(x);
        if d == 0.0 {
            break;
        }
        let step = f(x) / d;
        let next = x - step;
        if f(next).abs() > f(x).abs() {
            break;
        }
        x = next;
        if step.abs() <= 1e-16 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

fn bisect_real(c: (f64, f64, f64), mut lo: f64, mut hi: f64) -> f64 {
    let (c2, c1, c0) = c;
    let f = |x: f64| ((x + c2) * x + c1) * x + c0;
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * (1.0 + mid.abs()) {
            break;
        }
    }
    real_newton(c, 0.5 * (lo + hi))
}

fn companion_roots(c: (f64, f64, f64)) -> [C; 3] {
    let (c2, c1, c0) = c;
    let m = Matrix3::new(0.0, 0.0, -c0, 1.0, 0.0, -c1, 0.0, 1.0, -c2);
    let ev = m.complex_eigenvalues();
    [ev[0], ev[1], ev[2]]
}

const SNAP_EPS: f64 = 64.0 * f64::EPSILON;
const CLUSTER_REL: f64 = 1e-3;

/// Snap a cluster of nearly coincident roots onto the exact multiple root when
/// the polynomial data are consistent with one at rounding level.
fn snap_clusters(c: (f64, f64, f64), roots: &mut [C; 3]) {
    let close = |a: C, b: C| (a - b).norm() <= CLUSTER_REL * (1.0 + a.norm());
    let m3 = C::new(-c.0 / 3.0, 0.0);
    if roots.iter().all(|r| close(*r, m3)) {
        let (f, df, _) = eval_with_derivs(c, m3);
        let r = m3.norm();
        let dscale = 3.0 * r * r + 2.0 * c.0 * r + c.1;
        if f.norm() <= SNAP_EPS * term_scale(c, m3) && df.norm() <= SNAP_EPS * dscale {
            *roots = [m3; 3];
            return;
        }
    }
    // closest pair
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    let (i, j) = pairs
        .iter()
        .copied()
        .min_by(|a, b| {
            let da = (roots[a.0] - roots[a.1]).norm();
            let db = (roots[b.0] - roots[b.1]).norm();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    if !close(roots[i], roots[j]) {
        return;
    }
    let mid = 0.5 * (roots[i] + roots[j]);
    // critical points of F: 3 l^2 + 2 c2 l + c1 = 0
    let disc = C::new(4.0 * c.0 * c.0 - 12.0 * c.1, 0.0).sqrt();
    let cps = [(-2.0 * c.0 + disc) / 6.0, (-2.0 * c.0 - disc) / 6.0];
    let mut m = if (cps[0] - mid).norm() < (cps[1] - mid).norm() { cps[0] } else { cps[1] };
    // one Newton step on F' sharpens the critical point
    let (_, dfm, ddfm) = eval_with_derivs(c, m);
    if ddfm.norm() > 0.0 {
        m -= dfm / ddfm;
    }
    if m.im.abs() <= 1e-12 * (1.0 + m.norm()) {
        m = C::new(m.re, 0.0);
    }
    let (f, _, _) = eval_with_derivs(c, m);
    if f.norm() <= SNAP_EPS * term_scale(c, m) {
        roots[i] = m;
        roots[j] = m;
    }
}

fn is_real(z: C) -> bool {
    z.im.abs() <= 1e-10 * (1.0 + z.norm())
}

pub fn solve_mode(n: u64, p: &PhysicalParams) -> Result<ModeSpectrum> {
    if n == 0 {
        return Err(Error::validation("n", "mode index must be >= 1"));
    }
    let c = charpoly_coeffs(n, p);
    let mut roots = companion_roots(c);
    for r in roots.iter_mut() {
        *r = newton_polish(c, *r, 8);
        if is_real(*r) {
            *r = C::new(real_newton(c, r.re), 0.0);
        }
    }
    let polished = roots;
    snap_clusters(c, &mut roots);

    let nf = n as f64;
    let gap_tol = 1e-7 * (1.0 + nf);
    let multiplicity_of = |roots: &[C; 3]| -> (Multiplicity, Option<(usize, usize)>) {
        let d01 = (roots[0] - roots[1]).norm();
        let d02 = (roots[0] - roots[2]).norm();
        let d12 = (roots[1] - roots[2]).norm();
        if d01 < gap_tol && d02 < gap_tol && d12 < gap_tol {
            let m = (roots[0] + roots[1] + roots[2]) / 3.0;
            if q_n(n, m, p).norm() < 1e-7 {
                return (Multiplicity::Triple, None);
            }
        }
        for (i, j, d) in [(0, 1, d01), (0, 2, d02), (1, 2, d12)] {
            if d < gap_tol {
                let m = 0.5 * (roots[i] + roots[j]);
                if q_n(n, m, p).norm() < 1e-7 {
                    return (Multiplicity::Double, Some((i, j)));
                }
            }
        }
        (Multiplicity::Simple, None)
    };

    let (mut mult, mut pair) = multiplicity_of(&roots);
    if mult == Multiplicity::Simple && roots != polished {
        roots = polished;
        (mult, pair) = multiplicity_of(&roots);
    }

    let lo = -1.0 / p.kappa;
    let lambda = match mult {
        Multiplicity::Triple => {
            let m = C::new(((roots[0] + roots[1] + roots[2]) / 3.0).re, 0.0);
            [m; 3]
        }
        Multiplicity::Double => {
            let (i, j) = pair.unwrap();
            let k = 3 - i - j;
            let mut m = 0.5 * (roots[i] + roots[j]);
            if is_real(m) {
                m = C::new(m.re, 0.0);
            }
            let mut s = roots[k];
            if is_real(s) {
                s = C::new(real_newton(c, s.re), 0.0);
            }
            [s, m, m]
        }
        Multiplicity::Simple => {
            let omega0 = p.omega0;
            let mut best: Option<usize> = None;
            for (idx, r) in roots.iter().enumerate() {
                if r.im == 0.0 && r.re > lo && r.re < 0.0 {
                    best = match best {
                        None => Some(idx),
                        Some(b) => {
                            let db = (roots[b].re - omega0).abs();
                            let dr = (r.re - omega0).abs();
                            if dr < db || (dr == db && r.re > roots[b].re) { Some(idx) } else { Some(b) }
                        }
                    }
                }
            }
            let (l1, rest) = match best {
                Some(b) => {
                    let rest: Vec<C> = (0..3).filter(|&i| i != b).map(|i| roots[i]).collect();
                    (roots[b].re, [rest[0], rest[1]])
                }
                None => {
                    // bisection fallback: F(-1/kappa) < 0 < F(0)
                    let l1 = bisect_real(c, lo, 0.0);
                    let s = -c.0 - l1;
                    let prod = -c.2 / l1;
                    let disc = C::new(s * s - 4.0 * prod, 0.0).sqrt();
                    let r2 = newton_polish(c, (s + disc) / 2.0, 8);
                    let r3 = newton_polish(c, (s - disc) / 2.0, 8);
                    (l1, [r2, r3])
                }
            };
            let l1 = C::new(l1, 0.0);
            let (a, b) = (rest[0], rest[1]);
            if !is_real(a) || !is_real(b) {
                let up = if a.im >= b.im { a } else { b };
                let up = newton_polish(c, up, 8);
                let up = C::new(up.re, up.im.abs());
                [l1, up, up.conj()]
            } else {
                let (x, y) = (C::new(a.re, 0.0), C::new(b.re, 0.0));
                if x.re >= y.re { [l1, x, y] } else { [l1, y, x] }
            }
        }
    };

    let tol = 1e-9 * (1.0 + nf * nf * nf);
    for l in lambda.iter() {
        let res = charpoly_eval(n, *l, p).norm();
        if !(res < tol) && mult == Multiplicity::Simple {
            return Err(Error::Numerical {
                n,
                reason: format!("root polishing did not converge, residual {res:e} at {l}"),
            });
        }
    }
    Ok(ModeSpectrum { n, lambda, multiplicity: mult })
}

/// Roots for modes `1..=n_max`.
pub fn spectrum(n_max: u64, p: &PhysicalParams) -> Result<Vec<ModeSpectrum>> {
    let modes: Vec<u64> = (1..=n_max).collect();
    crate::par::map(&modes, |&n| solve_mode(n, p)).into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticPrediction {
    pub lambda1: f64,
    pub lambda2: C,
    pub lambda3: C,
}

pub fn asymptotic_prediction(n: u64, p: &PhysicalParams) -> AsymptoticPrediction {
    let re = -0.5 * (p.omega0 + 1.0 / p.kappa);
    let im = n as f64 * p.c_wave;
    AsymptoticPrediction { lambda1: p.omega0, lambda2: C::new(re, im), lambda3: C::new(re, -im) }
}
