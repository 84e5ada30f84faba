//! Ingham-type Gram bounds for the hyperbolic frequency family, and coefficient
//! recovery from localized observations of the adjoint density.

use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64 as C;
use serde::Serialize;
use std::f64::consts::PI;

use crate::control::{exp_quotient, mode_matrices};
use crate::error::{Error, Result};
use crate::quad::{simpson_weights, trapezoid_weights};
use crate::spectrum::{ModeSpectrum, Multiplicity};
use crate::state::{ModalFrame, ModalState};

const I: C = C { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyEntry {
    /// Signed index: `mu_n = -i lambda2(n)` for `n >= M`, `-i lambda3(|n|)` for `n <= -M`.
    pub n: i64,
    pub mu: C,
    /// `Re lambda2(|n|) + (omega0 + 1/kappa)/2`.
    pub epsilon: f64,
    /// `Im lambda2(|n|) - |n| c`.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyFamily {
    pub m: u64,
    pub n_max: u64,
    /// Sorted by `n`.
    pub entries: Vec<FrequencyEntry>,
    pub gamma: f64,
    /// Smallest gap `Re mu_{n+1} - Re mu_n` between consecutive indices of the same sign.
    pub min_gap: f64,
    pub max_abs_delta: f64,
}

impl FrequencyFamily {
    pub fn mus(&self) -> Vec<C> {
        self.entries.iter().map(|e| e.mu).collect()
    }

    pub fn epsilon(&self, n: i64) -> Option<f64> {
        self.entries.iter().find(|e| e.n == n).map(|e| e.epsilon)
    }
}

/// Frequency family for `M <= |n| <= n_max` from `spectra[n - 1]`.
pub fn frequencies(m: u64, n_max: u64, spectra: &[ModeSpectrum], c_wave: f64, omega0: f64, kappa: f64) -> Result<FrequencyFamily> {
    if m == 0 || m > n_max {
        return Err(Error::validation("M", format!("need 1 <= M <= n_max, got M = {m}, n_max = {n_max}")));
    }
    if (spectra.len() as u64) < n_max {
        return Err(Error::validation("n_max", format!("only {} spectra available", spectra.len())));
    }
    let gamma = 0.5 * c_wave;
    let shift = 0.5 * (omega0 + 1.0 / kappa);
    let mut pos = Vec::new();
    for n in m..=n_max {
        let sp = &spectra[(n - 1) as usize];
        let l2 = sp.lambda[1];
        if sp.multiplicity != Multiplicity::Simple || l2.im <= 0.0 {
            return Err(Error::Numerical { n, reason: "lambda2, lambda3 are not a complex conjugate pair; increase M".into() });
        }
        pos.push(FrequencyEntry { n: n as i64, mu: -I * l2, epsilon: l2.re + shift, delta: l2.im - n as f64 * c_wave });
    }
    let mut entries: Vec<FrequencyEntry> = pos
        .iter()
        .rev()
        .map(|e| {
            let l3 = spectra[(e.n - 1) as usize].lambda[2];
            FrequencyEntry { n: -e.n, mu: -I * l3, ..*e }
        })
        .collect();
    entries.extend(pos);
    let mut min_gap = f64::INFINITY;
    for w in entries.windows(2) {
        if w[1].n - w[0].n != 1 {
            continue;
        }
        let gap = w[1].mu.re - w[0].mu.re;
        min_gap = min_gap.min(gap);
        if gap < gamma {
            return Err(Error::Numerical { n: w[0].n.unsigned_abs(), reason: format!("gap {gap} below {gamma}; increase M") });
        }
    }
    let max_abs_delta = entries.iter().map(|e| e.delta.abs()).fold(0.0, f64::max);
    Ok(FrequencyFamily { m, n_max, entries, gamma, min_gap, max_abs_delta })
}

pub fn family_from_frame(m: u64, n_max: u64, frame: &ModalFrame) -> Result<FrequencyFamily> {
    let p = &frame.params;
    frequencies(m, n_max, &frame.spectra, p.c_wave, p.omega0, p.kappa)
}

/// `G[l][j] = int_0^T e^{i (mu_j - conj(mu_l)) t} dt` in closed form.
pub fn gram_matrix(mus: &[C], t_final: f64) -> DMatrix<C> {
    let n = mus.len();
    DMatrix::from_fn(n, n, |l, j| exp_quotient(I * (mus[j] - mus[l].conj()), t_final))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InghamConstants {
    pub t_final: f64,
    pub c_low: f64,
    pub c_high: f64,
    pub hermitian_defect: f64,
}

/// Extreme eigenvalues of the Gram matrix: the best constants in
/// `C_low sum |beta|^2 <= int_0^T |sum beta_n e^{i mu_n t}|^2 <= C_high sum |beta|^2`.
pub fn ingham_constants(mus: &[C], t_final: f64) -> Result<InghamConstants> {
    if !(t_final > 0.0) {
        return Err(Error::validation("T", "must be positive"));
    }
    if mus.is_empty() {
        return Err(Error::validation("frequencies", "empty family"));
    }
    let g = gram_matrix(mus, t_final);
    let scale = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let defect = (&g - g.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
    if defect > 1e-12 * scale.max(1.0) {
        return Err(Error::Numerical { n: 0, reason: format!("Gram assembly not Hermitian (defect {defect})") });
    }
    let h = (&g + g.adjoint()) * C::new(0.5, 0.0);
    let ev = h.symmetric_eigenvalues();
    Ok(InghamConstants { t_final, c_low: ev.min(), c_high: ev.max(), hermitian_defect: defect })
}

/// Samples `sigma(t_j, x_i)` of the adjoint density on a tensor grid over `O1 x [0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    /// `sigma[j][i]`.
    pub sigma: Vec<Vec<C>>,
}

pub fn observation_grid(o1: (f64, f64), t_final: f64, nx: usize, nt: usize) -> (Vec<f64>, Vec<f64>) {
    let x = (0..nx).map(|i| o1.0 + (o1.1 - o1.0) * i as f64 / (nx - 1) as f64).collect();
    let t = (0..nt).map(|j| t_final * j as f64 / (nt - 1) as f64).collect();
    (x, t)
}

/// Density amplitudes of mode `n` at time `t`: with adjoint coordinates evolving by
/// `e^{t G^*}` (`G` the modal generator), `sigma_n(t) = sum_j r_j alpha_j`. In the simple
/// case `r_j = e^{conj(lambda_j) t} xi*_j.rho`.
fn density_response(frame: &ModalFrame, n: usize, t: f64) -> [C; 3] {
    let b = frame.basis(n);
    let pair = mode_matrices(b, &frame.params);
    let e: Matrix3<C> = pair.exp_adjoint(t);
    let mut r = [C::new(0.0, 0.0); 3];
    for (j, rj) in r.iter_mut().enumerate() {
        for l in 0..3 {
            *rj += e[(l, j)] * b.adjoint[l].rho;
        }
    }
    r
}

fn mode_zero_density(frame: &ModalFrame) -> f64 {
    // the constant density mode, normalized in the energy norm
    1.0 / (frame.params.b * PI).sqrt()
}

/// Adjoint density generated by the coefficients `alpha` (in the adjoint eigenbasis).
pub fn synthesize_observation(alpha: &ModalState, o1: (f64, f64), t_final: f64, nx: usize, nt: usize, frame: &ModalFrame) -> Observation {
    let (x, t) = observation_grid(o1, t_final, nx, nt);
    let z0 = mode_zero_density(frame);
    let sigma = t
        .iter()
        .map(|&tj| {
            let resp: Vec<[C; 3]> = (1..=alpha.nmax()).map(|n| density_response(frame, n, tj)).collect();
            x.iter()
                .map(|&xi| {
                    let mut s = alpha.alpha0 * z0;
                    for n in 1..=alpha.nmax() {
                        let r = resp[n - 1];
                        let a = alpha.coeffs[n - 1];
                        s += (r[0] * a[0] + r[1] * a[1] + r[2] * a[2]) * (n as f64 * xi).cos();
                    }
                    s
                })
                .collect()
        })
        .collect();
    Observation { t, x, sigma }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub alpha: ModalState,
    /// Weighted residual of the fit relative to the weighted observation norm.
    pub relative_residual: f64,
    pub cond: f64,
    pub rank: usize,
    /// Smallest singular value of the weighted design matrix: no coefficient vector of
    /// unit norm produces an observation with smaller weighted `L^2` norm.
    pub min_gain: f64,
}

/// Least-squares fit of the modal exponential model to an observation on `O1`, with
/// truncated SVD (singular values below `1e-10 sigma_max` dropped after column scaling).
pub fn coefficient_recovery(obs: &Observation, n_max: usize, frame: &ModalFrame) -> Result<RecoveryReport> {
    if n_max > frame.nmax() {
        return Err(Error::validation("n_max", format!("only {} bases available", frame.nmax())));
    }
    let (nt, nx) = (obs.t.len(), obs.x.len());
    if nt < 2 || nx < 2 || obs.sigma.len() != nt || obs.sigma.iter().any(|r| r.len() != nx) {
        return Err(Error::Shape("observation must be a full t x x grid".into()));
    }
    let wt = trapezoid_weights(nt, obs.t[1] - obs.t[0]);
    let wx = if nx % 2 == 1 { simpson_weights(nx, obs.x[1] - obs.x[0]) } else { trapezoid_weights(nx, obs.x[1] - obs.x[0]) };
    let ncol = 1 + 3 * n_max;
    let nrow = nt * nx;
    let z0 = mode_zero_density(frame);
    let mut a = DMatrix::<C>::zeros(nrow, ncol);
    let mut y = DVector::<C>::zeros(nrow);
    for j in 0..nt {
        let resp: Vec<[C; 3]> = (1..=n_max).map(|n| density_response(frame, n, obs.t[j])).collect();
        for i in 0..nx {
            let r = j * nx + i;
            let w = (wt[j] * wx[i]).sqrt();
            y[r] = obs.sigma[j][i] * w;
            a[(r, 0)] = C::new(z0 * w, 0.0);
            for n in 1..=n_max {
                let c = (n as f64 * obs.x[i]).cos() * w;
                for l in 0..3 {
                    a[(r, 1 + 3 * (n - 1) + l)] = resp[n - 1][l] * c;
                }
            }
        }
    }
    let raw_sv = a.clone().singular_values();
    let min_gain = raw_sv.min();
    let scales: Vec<f64> = (0..ncol).map(|c| a.column(c).norm().max(f64::MIN_POSITIVE)).collect();
    for (c, s) in scales.iter().enumerate() {
        a.column_mut(c).scale_mut(1.0 / s);
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let tol = 1e-10 * smax;
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    let cond = smax / svd.singular_values.min();
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let mut coef = DVector::<C>::zeros(ncol);
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= tol {
            continue;
        }
        let proj = (u.column(k).adjoint() * &y)[0] / *s;
        coef += vt.row(k).adjoint() * proj;
    }
    let resid = (&svd.u.unwrap() * DMatrix::from_diagonal(&svd.singular_values.map(|s| C::new(s, 0.0))) * vt * &coef - &y).norm();
    let ynorm = y.norm();
    let mut alpha = ModalState::zeros(n_max);
    alpha.alpha0 = coef[0] / scales[0];
    for n in 1..=n_max {
        for l in 0..3 {
            let c = 1 + 3 * (n - 1) + l;
            alpha.coeffs[n - 1][l] = coef[c] / scales[c];
        }
    }
    Ok(RecoveryReport {
        alpha,
        relative_residual: if ynorm > 0.0 { resid / ynorm } else { 0.0 },
        cond,
        rank,
        min_gain,
    })
}
