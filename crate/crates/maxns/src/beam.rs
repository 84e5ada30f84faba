//! Gaussian-beam solutions of the adjoint system concentrated at a point `x0`,
//! their boundary correction, and the observability ratio they produce.

use num_complex::Complex64 as C;
use serde::Serialize;
use std::f64::consts::{E, PI};

use crate::dynamics::{adjoint_solve, discrete_energy, min_steps, FdOptions};
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::quad::{dot_weights, gl_panels, interval_weights, simpson_weights};
use crate::state::GridField;

const ZERO: C = C { re: 0.0, im: 0.0 };

/// Beam of frequency `k` built on the bump `zeta` centred at `x0` with radius `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamFamily {
    pub k: u64,
    pub x0: f64,
    pub radius: f64,
    pub amplitude: f64,
    pub omega0: f64,
    #[serde(skip)]
    pub params: PhysicalParams,
}

pub fn build_beam(k: u64, x0: f64, radius: f64, p: &PhysicalParams) -> Result<BeamFamily> {
    if k == 0 {
        return Err(Error::validation("k", "must be >= 1"));
    }
    if !(radius > 0.0) {
        return Err(Error::validation("r", format!("must be positive, got {radius}")));
    }
    if !(x0 - radius > 0.0 && x0 + radius < PI) {
        return Err(Error::Geometry(format!("bump support [{}, {}] must lie inside (0, pi)", x0 - radius, x0 + radius)));
    }
    Ok(BeamFamily { k, x0, radius, amplitude: 1.0, omega0: p.omega0, params: *p })
}

impl BeamFamily {
    pub fn with_amplitude(mut self, a: f64) -> Self {
        self.amplitude = a;
        self
    }

    fn kf(&self) -> f64 {
        self.k as f64
    }

    /// `(zeta, zeta')`, with `zeta(x0) = amplitude`.
    pub fn zeta(&self, x: f64) -> (f64, f64) {
        let s = (x - self.x0) / self.radius;
        if s.abs() >= 1.0 {
            return (0.0, 0.0);
        }
        let q = 1.0 - s * s;
        let z = self.amplitude * E * (-1.0 / q).exp();
        (z, z * (-2.0 * s / (q * q)) / self.radius)
    }

    /// `phi(x) = (i/2)(x - x0)^2 + (x - x0)`.
    pub fn phase(&self, x: f64) -> C {
        let s = x - self.x0;
        C::new(s, 0.5 * s * s)
    }

    pub fn phase_derivative(&self, x: f64) -> C {
        C::new(1.0, x - self.x0)
    }

    /// `eta(t, x) = e^{omega0 t} zeta(x)` and its x-derivative.
    pub fn eta(&self, t: f64, x: f64) -> (f64, f64) {
        let g = (self.omega0 * t).exp();
        let (z, dz) = self.zeta(x);
        (g * z, g * dz)
    }

    pub fn theta(&self, t: f64, x: f64) -> f64 {
        self.omega0 * self.eta(t, x).0 / self.params.rho_s
    }

    pub fn upsilon(&self, t: f64, x: f64) -> f64 {
        self.params.b * self.params.rho_s * self.eta(t, x).0
    }

    fn carrier(&self, x: f64) -> C {
        (C::new(0.0, self.kf()) * self.phase(x)).exp()
    }

    /// `(sigma_k, v_k, S_k)` at `(t, x)`.
    pub fn fields_at(&self, t: f64, x: f64) -> [C; 3] {
        let (eta, deta) = self.eta(t, x);
        if eta == 0.0 && deta == 0.0 {
            return [ZERO; 3];
        }
        let scale = self.kf().powf(-0.75);
        let e = self.carrier(x) * scale;
        let ikphi = C::new(0.0, self.kf()) * self.phase_derivative(x);
        let d_eta = e * (ikphi * eta + deta);
        let by = self.params.b * self.params.rho_s;
        [d_eta, e * self.theta(t, x), d_eta * by]
    }

    /// Components of the adjoint operator applied to the beam. The first and third
    /// vanish because of the profile relations; see [`BeamFamily::closure_defects`].
    pub fn residual_at(&self, t: f64, x: f64) -> [C; 3] {
        let (eta, _) = self.eta(t, x);
        let scale = self.kf().powf(-0.75);
        let dtheta = self.omega0 * self.omega0 * eta / self.params.rho_s;
        [ZERO, self.carrier(x) * scale * dtheta, ZERO]
    }

    /// Profile identities behind the vanishing residual components:
    /// `eta_t - rho_s theta`, `Upsilon_t + Upsilon/kappa + (mu/kappa) theta`, and the
    /// amplitude equation `(b rho_s + mu/(kappa rho_s)) eta_t + (b rho_s/kappa) eta`.
    pub fn closure_defects(&self, t: f64, x: f64) -> [f64; 3] {
        let p = &self.params;
        let (eta, _) = self.eta(t, x);
        let eta_t = self.omega0 * eta;
        let th = self.theta(t, x);
        let ups = self.upsilon(t, x);
        let ups_t = p.b * p.rho_s * eta_t;
        [
            eta_t - p.rho_s * th,
            ups_t + ups / p.kappa + p.mu / p.kappa * th,
            (p.b * p.rho_s + p.mu / (p.kappa * p.rho_s)) * eta_t + p.b * p.rho_s / p.kappa * eta,
        ]
    }

    /// `sqrt(pi) |eta(t, x0)|^2`, the large-k value of `int |sigma_k(t)|^2`.
    pub fn sigma_limit(&self, t: f64) -> f64 {
        PI.sqrt() * self.eta(t, self.x0).0.powi(2)
    }

    /// `int_{|x - x0| > k^{-1/4}} |sigma_k(t)|^2` by Gauss-Legendre on the two tails.
    pub fn tail_mass(&self, t: f64) -> f64 {
        let cut = self.kf().powf(-0.25);
        if cut >= self.radius {
            return 0.0;
        }
        let mut m = 0.0;
        for (a, b) in [(self.x0 - self.radius, self.x0 - cut), (self.x0 + cut, self.x0 + self.radius)] {
            for (x, w) in gl_panels(a, b, 256, 8) {
                m += w * self.fields_at(t, x)[0].norm_sqr();
            }
        }
        m
    }
}

/// Odd grid size resolving the carrier of frequency `k`.
pub fn beam_grid_nx(k: u64) -> usize {
    let kf = k as f64;
    let n = 4097usize.max((64.0 * kf.sqrt()).ceil() as usize).max(6 * k as usize);
    if n % 2 == 0 { n + 1 } else { n }
}

pub fn beam_fields(beam: &BeamFamily, t: f64, nx: usize) -> Result<GridField> {
    let mut g = GridField::zeros(nx)?;
    for i in 0..nx {
        let [s, v, st] = beam.fields_at(t, g.x[i]);
        g.rho[i] = s;
        g.u[i] = v;
        g.s[i] = st;
    }
    Ok(g)
}

/// `L^2(0, pi)` norm of the residual at time `t`, by Simpson on an `nx` grid.
pub fn beam_residual(beam: &BeamFamily, t: f64, nx: usize) -> f64 {
    let x = crate::quad::uniform_grid(nx);
    let w = simpson_weights(nx, x[1]);
    let mut s = 0.0;
    for i in 0..nx {
        let r = beam.residual_at(t, x[i]);
        s += w[i] * (r[0].norm_sqr() + r[1].norm_sqr() + r[2].norm_sqr());
    }
    s.sqrt()
}

fn l2_sq(w: &[f64], f: &[C]) -> f64 {
    w.iter().zip(f).map(|(a, b)| a * b.norm_sqr()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Geometry {
    pub o1: (f64, f64),
    pub o2: (f64, f64),
    pub o3: (f64, f64),
}

impl Geometry {
    pub fn validate(&self, beam: &BeamFamily) -> Result<()> {
        for (name, (a, b)) in [("O1", self.o1), ("O2", self.o2), ("O3", self.o3)] {
            if !(0.0 <= a && a < b && b <= PI) {
                return Err(Error::validation(name, format!("need 0 <= lo < hi <= pi, got ({a}, {b})")));
            }
        }
        let (lo, hi) = (beam.x0 - beam.radius, beam.x0 + beam.radius);
        for (name, (a, b)) in [("O1", self.o1), ("O3", self.o3)] {
            if hi >= a && lo <= b {
                return Err(Error::Geometry(format!("bump support [{lo}, {hi}] meets closure of {name} = [{a}, {b}]")));
            }
        }
        Ok(())
    }
}

/// Per-k summary of the beam estimates and of the corrected observability ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamRow {
    pub k: u64,
    pub nx: usize,
    pub nt: usize,
    /// Residual norm at `t = 0`, where it is largest.
    pub residual: f64,
    pub k_residual: f64,
    pub v_norm_sq: f64,
    pub k2_v_norm_sq: f64,
    pub sigma_norm_sq_t: f64,
    pub sigma_limit_t: f64,
    pub tail_mass: f64,
    pub log_tail_mass: f64,
    pub mean_sigma0: f64,
    pub mean_s0: f64,
    pub boundary_trace: f64,
    pub correction_norm: f64,
    pub correction_scaled: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

/// Static beam estimates on the grid (no time stepping).
pub fn beam_estimates(beam: &BeamFamily, t_final: f64, nx: usize) -> Result<BeamRow> {
    let kf = beam.k as f64;
    let f0 = beam_fields(beam, 0.0, nx)?;
    let ft = beam_fields(beam, t_final, nx)?;
    let w = simpson_weights(nx, f0.h());
    let residual = beam_residual(beam, 0.0, nx);
    let v_norm_sq = l2_sq(&w, &ft.u);
    let tail = beam.tail_mass(t_final);
    let trace = [0.0, PI]
        .iter()
        .map(|&x| beam.fields_at(0.0, x)[1].norm().max(beam.fields_at(t_final, x)[1].norm()))
        .fold(0.0, f64::max);
    Ok(BeamRow {
        k: beam.k,
        nx,
        nt: 0,
        residual,
        k_residual: kf * residual,
        v_norm_sq,
        k2_v_norm_sq: kf * kf * v_norm_sq,
        sigma_norm_sq_t: l2_sq(&w, &ft.rho),
        sigma_limit_t: beam.sigma_limit(t_final),
        tail_mass: tail,
        log_tail_mass: tail.ln(),
        mean_sigma0: dot_weights(&w, &f0.rho).norm(),
        mean_s0: dot_weights(&w, &f0.s).norm(),
        boundary_trace: trace,
        correction_norm: f64::NAN,
        correction_scaled: f64::NAN,
        numerator: f64::NAN,
        denominator: f64::NAN,
        ratio: f64::NAN,
    })
}

/// Correct the beam to an exact adjoint solution and compare its terminal energy
/// with its observation on `O1 x O2 x O3`.
///
/// The correction solves the adjoint system with the beam residual as source, zero
/// initial data and the beam's boundary traces; the corrected solution is
/// `beam - correction`.
pub fn observability_experiment(beam: &BeamFamily, geom: &Geometry, t_final: f64, nx: Option<usize>) -> Result<BeamRow> {
    geom.validate(beam)?;
    if !(t_final > 0.0) {
        return Err(Error::validation("T", "must be positive"));
    }
    let nx = nx.unwrap_or_else(|| beam_grid_nx(beam.k));
    let p = &beam.params;
    let mut row = beam_estimates(beam, t_final, nx)?;
    let sharp0 = beam_fields(beam, 0.0, nx)?;
    let x = sharp0.x.clone();
    let support: Vec<usize> = (0..nx).filter(|&i| (x[i] - beam.x0).abs() < beam.radius).collect();
    let src0: Vec<C> = support.iter().map(|&i| beam.residual_at(0.0, x[i])[1]).collect();
    let om = beam.omega0;
    let source = |t: f64, out: &mut [Vec<C>; 3]| {
        let g = (om * t).exp();
        for (j, &i) in support.iter().enumerate() {
            out[1][i] = src0[j] * g;
        }
    };
    // the bump has compact support inside (0, pi), so the traces vanish identically
    let boundary = |_t: f64| (ZERO, ZERO);

    let w1 = interval_weights(&x, geom.o1.0, geom.o1.1);
    let w2 = interval_weights(&x, geom.o2.0, geom.o2.1);
    let w3 = interval_weights(&x, geom.o3.0, geom.o3.1);
    let mut denom = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    let mut corr_max: f64 = 0.0;
    let mut observe = |t: f64, dag: &GridField| {
        let g = C::new((om * t).exp(), 0.0);
        let obs = |wts: &[(usize, f64)], sharp: &[C], d: &[C]| -> f64 {
            wts.iter().map(|&(i, wi)| wi * (sharp[i] * g - d[i]).norm_sqr()).sum()
        };
        let val = obs(&w1, &sharp0.rho, &dag.rho) + obs(&w2, &sharp0.u, &dag.u) + obs(&w3, &sharp0.s, &dag.s);
        if let Some((tp, vp)) = prev {
            denom += 0.5 * (t - tp) * (val + vp);
        }
        prev = Some((t, val));
        corr_max = corr_max.max(discrete_energy(dag, p));
    };
    let nt = min_steps(t_final, nx, p);
    let q0 = GridField::zeros(nx)?;
    let tr = adjoint_solve(
        &q0,
        Some(&source),
        Some(&boundary),
        t_final,
        nt,
        p,
        FdOptions { n_snap: Some(2), observer: Some(&mut observe) },
    )?;
    let dag = tr.last_grid().expect("grid trajectory");
    let g = C::new((om * t_final).exp(), 0.0);
    let w = simpson_weights(nx, x[1]);
    let diff = |a: &[C], d: &[C]| -> Vec<C> { a.iter().zip(d).map(|(s, q)| s * g - q).collect() };
    let numerator = l2_sq(&w, &diff(&sharp0.rho, &dag.rho)) + l2_sq(&w, &diff(&sharp0.u, &dag.u)) + l2_sq(&w, &diff(&sharp0.s, &dag.s));
    row.nt = nt;
    row.correction_norm = corr_max.sqrt();
    row.correction_scaled = row.correction_norm * (beam.k as f64).powf(0.75);
    row.numerator = numerator;
    row.denominator = denom;
    row.ratio = numerator / denom;
    Ok(row)
}

/// Run the experiment for every `k` in the ladder, in parallel.
pub fn beam_ladder(ks: &[u64], x0: f64, radius: f64, geom: &Geometry, t_final: f64, p: &PhysicalParams) -> Result<Vec<BeamRow>> {
    let beams = ks.iter().map(|&k| build_beam(k, x0, radius, p)).collect::<Result<Vec<_>>>()?;
    for b in &beams {
        geom.validate(b)?;
    }
    crate::par::map(&beams, |b| observability_experiment(b, geom, t_final, None)).into_iter().collect()
}
