//! Grid fields, modal states and the maps between them.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::basis::{build_basis, gamma_matrix, mode_zero, BasisPair, GammaMatrix};
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::quad::{dot_weights, simpson_weights, uniform_grid};
use crate::spectrum::{spectrum, ModeSpectrum};

pub const MIN_NX: usize = 16;

/// Complex samples of `(rho, u, S)` on a uniform grid of `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub x: Vec<f64>,
    pub rho: Vec<C>,
    pub u: Vec<C>,
    pub s: Vec<C>,
}

impl GridField {
    pub fn zeros(nx: usize) -> Result<Self> {
        if nx < MIN_NX {
            return Err(Error::validation("nx", format!("must be >= {MIN_NX}, got {nx}")));
        }
        let z = vec![C::new(0.0, 0.0); nx];
        Ok(GridField { x: uniform_grid(nx), rho: z.clone(), u: z.clone(), s: z })
    }

    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn h(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    pub fn check(&self) -> Result<()> {
        let nx = self.x.len();
        if nx < MIN_NX {
            return Err(Error::validation("nx", format!("must be >= {MIN_NX}, got {nx}")));
        }
        if self.rho.len() != nx || self.u.len() != nx || self.s.len() != nx {
            return Err(Error::Shape("field arrays must match the grid length".into()));
        }
        Ok(())
    }

    pub fn axpy(&mut self, a: C, other: &GridField) {
        for i in 0..self.nx() {
            self.rho[i] += a * other.rho[i];
            self.u[i] += a * other.u[i];
            self.s[i] += a * other.s[i];
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.rho.iter().chain(&self.u).chain(&self.s).map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Coefficients of a state in the eigenbasis: `alpha0 xi_0 + sum d_{n,l} xi_{n,l}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModalState {
    pub alpha0: C,
    /// `coeffs[n - 1]` holds `(d_{n,1}, d_{n,2}, d_{n,3})`.
    pub coeffs: Vec<[C; 3]>,
}

impl ModalState {
    pub fn zeros(nmax: usize) -> Self {
        ModalState { alpha0: C::new(0.0, 0.0), coeffs: vec![[C::new(0.0, 0.0); 3]; nmax] }
    }

    pub fn nmax(&self) -> usize {
        self.coeffs.len()
    }

    pub fn mode(&self, n: usize) -> Vector3<C> {
        let c = self.coeffs[n - 1];
        Vector3::new(c[0], c[1], c[2])
    }

    pub fn set_mode(&mut self, n: usize, v: &Vector3<C>) {
        self.coeffs[n - 1] = [v[0], v[1], v[2]];
    }

    pub fn scale(&self, k: C) -> Self {
        ModalState {
            alpha0: self.alpha0 * k,
            coeffs: self.coeffs.iter().map(|c| [c[0] * k, c[1] * k, c[2] * k]).collect(),
        }
    }

    pub fn sub(&self, o: &ModalState) -> Self {
        ModalState {
            alpha0: self.alpha0 - o.alpha0,
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| [a[0] - b[0], a[1] - b[1], a[2] - b[2]])
                .collect(),
        }
    }

    /// Plain l2 norm of the coefficient sequence.
    pub fn coef_norm(&self) -> f64 {
        (self.alpha0.norm_sqr() + self.coeffs.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn max_abs_diff(&self, o: &ModalState) -> f64 {
        self.sub(o).coeffs.iter().flatten().map(|c| c.norm()).fold((self.alpha0 - o.alpha0).norm(), f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszBounds {
    pub c1: f64,
    pub c2: f64,
}

/// Spectra, bases and Gram matrices for modes `1..=nmax` under fixed parameters.
#[derive(Debug, Clone)]
pub struct ModalFrame {
    pub params: PhysicalParams,
    pub spectra: Vec<ModeSpectrum>,
    pub bases: Vec<BasisPair>,
    pub grams: Vec<Matrix3<C>>,
    pub gammas: Vec<GammaMatrix>,
}

impl ModalFrame {
    pub fn new(p: &PhysicalParams, nmax: usize) -> Result<Self> {
        let spectra = spectrum(nmax as u64, p)?;
        let bases: Vec<BasisPair> = spectra.iter().map(|s| build_basis(s, p)).collect::<Result<_>>()?;
        let grams = bases.iter().map(|b| b.gram(p)).collect();
        let gammas = bases.iter().map(|b| gamma_matrix(b, p)).collect::<Result<_>>()?;
        Ok(ModalFrame { params: *p, spectra, bases, grams, gammas })
    }

    pub fn nmax(&self) -> usize {
        self.bases.len()
    }

    pub fn basis(&self, n: usize) -> &BasisPair {
        &self.bases[n - 1]
    }

    /// Energy inner product of two modal states in closed form.
    pub fn z_inner(&self, a: &ModalState, b: &ModalState) -> C {
        let mut s = a.alpha0 * b.alpha0.conj();
        for n in 1..=a.nmax().min(b.nmax()).min(self.nmax()) {
            let x = a.mode(n);
            let y = b.mode(n);
            s += (y.adjoint() * self.grams[n - 1] * x)[0];
        }
        s
    }

    pub fn z_norm(&self, a: &ModalState) -> f64 {
        self.z_inner(a, a).re.max(0.0).sqrt()
    }

    /// Extreme eigenvalues of the per-mode Gram matrices (mode 0 contributes 1).
    pub fn riesz_bounds(&self) -> RieszBounds {
        let (mut c1, mut c2) = (1.0f64, 1.0f64);
        for g in &self.grams {
            let ev = g.symmetric_eigenvalues();
            for e in ev.iter() {
                c1 = c1.min(*e);
                c2 = c2.max(*e);
            }
        }
        RieszBounds { c1, c2 }
    }

    /// Seeded random state: complex Gaussian modal coefficients with variance
    /// `1/(1+n^2)` per mode (variance 1 for `alpha0`).
    pub fn random_state(&self, nmax: usize, seed: u64) -> ModalState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gauss = |var: f64| {
            let s = (var / 2.0).sqrt();
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C::new(s * re, s * im)
        };
        let mut st = ModalState::zeros(nmax);
        st.alpha0 = gauss(1.0);
        for n in 1..=nmax {
            let var = 1.0 / (1.0 + (n * n) as f64);
            let d = Vector3::new(gauss(var), gauss(var), gauss(var));
            st.set_mode(n, &d);
        }
        st
    }
}

fn check_pair(x: &GridField, y: &GridField) -> Result<()> {
    x.check()?;
    y.check()?;
    if x.nx() != y.nx() {
        return Err(Error::Shape(format!("nx mismatch: {} vs {}", x.nx(), y.nx())));
    }
    Ok(())
}

/// Simpson approximation of the energy inner product.
pub fn inner_product(x: &GridField, y: &GridField, p: &PhysicalParams) -> Result<C> {
    check_pair(x, y)?;
    let nx = x.nx();
    let w = simpson_weights(nx, x.h());
    let [wb, wr, ws] = p.weights();
    let mut s = C::new(0.0, 0.0);
    for i in 0..nx {
        s += w[i] * (wb * x.rho[i] * y.rho[i].conj() + wr * x.u[i] * y.u[i].conj() + ws * x.s[i] * y.s[i].conj());
    }
    Ok(s)
}

pub fn z_norm_grid(x: &GridField, p: &PhysicalParams) -> f64 {
    inner_product(x, x, p).map(|c| c.re.max(0.0).sqrt()).unwrap_or(f64::NAN)
}

/// Quadrature projection onto modes `0..=nmax`.
pub fn project(x: &GridField, frame: &ModalFrame, nmax: usize) -> Result<ModalState> {
    x.check()?;
    if nmax > frame.nmax() {
        return Err(Error::validation("nmax", format!("only {} bases available", frame.nmax())));
    }
    let nx = x.nx();
    if nx < 8 * nmax {
        return Err(Error::Resolution(format!("nx = {nx} cannot resolve {nmax} modes (need >= {})", 8 * nmax)));
    }
    let p = &frame.params;
    let w = simpson_weights(nx, x.h());
    let [wb, wr, ws] = p.weights();
    let z0 = mode_zero(p);
    let mut st = ModalState::zeros(nmax);
    st.alpha0 = dot_weights(&w, &x.rho.iter().map(|r| wb * r * z0.rho.conj()).collect::<Vec<_>>());
    let per_mode = crate::par::map(&(1..=nmax).collect::<Vec<_>>(), |&n| {
        let b = frame.basis(n);
        let (mut rc, mut us, mut sc) = (C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0));
        for i in 0..nx {
            let (sn, cs) = (n as f64 * x.x[i]).sin_cos();
            rc += w[i] * cs * x.rho[i];
            us += w[i] * sn * x.u[i];
            sc += w[i] * cs * x.s[i];
        }
        let mut d = [C::new(0.0, 0.0); 3];
        for (l, a) in b.adjoint.iter().enumerate() {
            d[l] = wb * rc * a.rho.conj() + wr * us * a.u.conj() + ws * sc * a.s.conj();
        }
        d
    });
    st.coeffs = per_mode;
    Ok(st)
}

/// Sample `alpha0 xi_0 + sum d_{n,l} xi_{n,l}` on an `nx`-point grid.
pub fn reconstruct(s: &ModalState, frame: &ModalFrame, nx: usize) -> Result<GridField> {
    let mut g = GridField::zeros(nx)?;
    if s.nmax() > frame.nmax() {
        return Err(Error::validation("nmax", format!("only {} bases available", frame.nmax())));
    }
    let z0 = mode_zero(&frame.params);
    let mut coef = Vec::with_capacity(s.nmax());
    for n in 1..=s.nmax() {
        let b = frame.basis(n);
        let d = s.coeffs[n - 1];
        let mut v = crate::basis::CoefVector::default();
        for l in 0..3 {
            v = v.add(&b.forward[l].scale(d[l]));
        }
        coef.push(v);
    }
    for i in 0..nx {
        let x = g.x[i];
        let mut r = s.alpha0 * z0.rho;
        let (mut u, mut sv) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
        for (k, v) in coef.iter().enumerate() {
            let (sn, cs) = ((k + 1) as f64 * x).sin_cos();
            r += v.rho * cs;
            u += v.u * sn;
            sv += v.s * cs;
        }
        g.rho[i] = r;
        g.u[i] = u;
        g.s[i] = sv;
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanReport {
    pub rho_mean: C,
    pub s_mean: C,
}

/// `int rho` and `int S` by Simpson.
pub fn mean_checks(x: &GridField) -> MeanReport {
    let w = simpson_weights(x.nx(), x.h());
    MeanReport { rho_mean: dot_weights(&w, &x.rho), s_mean: dot_weights(&w, &x.s) }
}

/// Render a single mode-`n` coefficient vector on a grid.
pub fn render_mode(n: u64, v: &crate::basis::CoefVector, nx: usize) -> Result<GridField> {
    let mut g = GridField::zeros(nx)?;
    for i in 0..nx {
        let (r, u, s) = v.eval(n, g.x[i]);
        g.rho[i] = r;
        g.u[i] = u;
        g.s[i] = s;
    }
    Ok(g)
}
