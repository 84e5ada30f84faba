//! Eigenfunctions, adjoint eigenfunctions and Riesz matrices, mode by mode.
//!
//! A mode-`n` field is stored as three coefficients
//! `(rho cos nx, u sin nx, S cos nx)`; mode 0 uses only the density slot.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::spectrum::{ModeSpectrum, Multiplicity};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CoefVector {
    pub rho: C,
    pub u: C,
    pub s: C,
}

impl CoefVector {
    pub fn new(rho: C, u: C, s: C) -> Self {
        CoefVector { rho, u, s }
    }

    pub fn real(rho: f64, u: f64, s: f64) -> Self {
        CoefVector { rho: C::new(rho, 0.0), u: C::new(u, 0.0), s: C::new(s, 0.0) }
    }

    pub fn scale(&self, k: C) -> Self {
        CoefVector { rho: self.rho * k, u: self.u * k, s: self.s * k }
    }

    pub fn to_vector(&self) -> Vector3<C> {
        Vector3::new(self.rho, self.u, self.s)
    }

    pub fn from_vector(v: &Vector3<C>) -> Self {
        CoefVector { rho: v[0], u: v[1], s: v[2] }
    }

    pub fn add(&self, o: &CoefVector) -> Self {
        CoefVector { rho: self.rho + o.rho, u: self.u + o.u, s: self.s + o.s }
    }

    pub fn max_abs_diff(&self, o: &CoefVector) -> f64 {
        (self.rho - o.rho).norm().max((self.u - o.u).norm()).max((self.s - o.s).norm())
    }

    /// Field values `(rho, u, S)` at `x` for mode `n`.
    pub fn eval(&self, n: u64, x: f64) -> (C, C, C) {
        let (s, c) = (n as f64 * x).sin_cos();
        (self.rho * c, self.u * s, self.s * c)
    }
}

/// Closed-form energy inner product of two mode-`n` coefficient vectors.
pub fn pairing(n: u64, x: &CoefVector, y: &CoefVector, p: &PhysicalParams) -> C {
    let [wb, wr, ws] = p.weights();
    if n == 0 {
        PI * (wb * x.rho * y.rho.conj() + ws * x.s * y.s.conj())
    } else {
        FRAC_PI_2 * (wb * x.rho * y.rho.conj() + wr * x.u * y.u.conj() + ws * x.s * y.s.conj())
    }
}

/// Closed-form pairing across modes: zero by trigonometric orthogonality.
pub fn pairing_modes(n: u64, x: &CoefVector, k: u64, y: &CoefVector, p: &PhysicalParams) -> C {
    if n != k {
        C::new(0.0, 0.0)
    } else {
        pairing(n, x, y, p)
    }
}

/// `xi_0 = xi_0^* = (1/sqrt(b pi)) (1, 0, 0)`.
pub fn mode_zero(p: &PhysicalParams) -> CoefVector {
    CoefVector::real(1.0 / (p.b * PI).sqrt(), 0.0, 0.0)
}

/// Orthonormal Fourier frame of mode `n >= 1`.
pub fn fourier_frame(p: &PhysicalParams) -> [CoefVector; 3] {
    [
        CoefVector::real((2.0 / (p.b * PI)).sqrt(), 0.0, 0.0),
        CoefVector::real(0.0, (2.0 / (p.rho_s * PI)).sqrt(), 0.0),
        CoefVector::real(0.0, 0.0, (2.0 * p.mu / (p.kappa * PI)).sqrt()),
    ]
}

/// Action of the generator on mode-`n` coefficients.
pub fn generator_matrix(n: u64, p: &PhysicalParams) -> Matrix3<C> {
    let nf = n as f64;
    let r = |x: f64| C::new(x, 0.0);
    Matrix3::new(
        r(0.0), r(-p.rho_s * nf), r(0.0),
        r(p.b * nf), r(0.0), r(-nf / p.rho_s),
        r(0.0), r(p.mu * nf / p.kappa), r(-1.0 / p.kappa),
    )
}

/// Action of the adjoint generator on mode-`n` coefficients.
pub fn adjoint_generator_matrix(n: u64, p: &PhysicalParams) -> Matrix3<C> {
    let nf = n as f64;
    let r = |x: f64| C::new(x, 0.0);
    Matrix3::new(
        r(0.0), r(p.rho_s * nf), r(0.0),
        r(-p.b * nf), r(0.0), r(nf / p.rho_s),
        r(0.0), r(-p.mu * nf / p.kappa), r(-1.0 / p.kappa),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisPair {
    pub n: u64,
    pub lambda: [C; 3],
    pub structure: Multiplicity,
    pub forward: [CoefVector; 3],
    pub adjoint: [CoefVector; 3],
    pub theta: [C; 3],
    pub psi: [C; 3],
}

fn theta_of(n: u64, l: C, p: &PhysicalParams) -> f64 {
    let n2 = (n as f64).powi(2);
    let d = (1.0 + p.kappa * l).norm_sqr();
    let l2 = l.norm_sqr();
    (FRAC_PI_2 * (p.b + l2 / (p.rho_s * n2) + p.kappa * p.mu * l2 / (p.rho_s * p.rho_s * d))).sqrt()
}

fn check_normalizer(n: u64, l: C, p: &PhysicalParams) -> Result<()> {
    let v = (1.0 + p.kappa * l).norm();
    if v < 1e-12 {
        return Err(Error::DegenerateNormalizer { n, value: v });
    }
    Ok(())
}

fn eigenvector(n: u64, l: C, p: &PhysicalParams) -> CoefVector {
    let nf = n as f64;
    CoefVector::new(C::new(-1.0, 0.0), l / (p.rho_s * nf), p.mu * l / (p.rho_s * (1.0 + p.kappa * l)))
}

fn adjoint_eigenvector(n: u64, l: C, p: &PhysicalParams) -> CoefVector {
    let nf = n as f64;
    let lc = l.conj();
    CoefVector::new(C::new(1.0, 0.0), lc / (p.rho_s * nf), -p.mu * lc / (p.rho_s * (1.0 + p.kappa * lc)))
}

/// Simple-eigenvalue pieces `(xi, xi*, theta, psi)`.
fn simple_pieces(n: u64, l: C, p: &PhysicalParams) -> Result<(CoefVector, CoefVector, C, C)> {
    check_normalizer(n, l, p)?;
    let theta = theta_of(n, l, p);
    let fwd = eigenvector(n, l, p).scale(C::new(1.0 / theta, 0.0));
    let psi = FRAC_PI_2 * crate::spectrum::q_n(n, l.conj(), p) / theta;
    if psi.norm() < 1e-12 {
        return Err(Error::NotSimple { n, value: psi.norm() });
    }
    let adj = adjoint_eigenvector(n, l, p).scale(1.0 / psi);
    Ok((fwd, adj, C::new(theta, 0.0), psi))
}

pub fn build_basis(mode: &ModeSpectrum, p: &PhysicalParams) -> Result<BasisPair> {
    let n = mode.n;
    let nf = n as f64;
    let (b, rho, mu, kappa) = (p.b, p.rho_s, p.mu, p.kappa);
    let lam = mode.lambda;
    match mode.multiplicity {
        Multiplicity::Simple => {
            let mut forward = [CoefVector::default(); 3];
            let mut adjoint = [CoefVector::default(); 3];
            let mut theta = [C::default(); 3];
            let mut psi = [C::default(); 3];
            for l in 0..3 {
                let (f, a, t, s) = simple_pieces(n, lam[l], p)?;
                // rescale so the pairing is exactly one
                let pr = pairing(n, &f, &a, p);
                let k = (C::new(1.0, 0.0) / pr).conj();
                forward[l] = f;
                adjoint[l] = a.scale(k);
                theta[l] = t;
                psi[l] = s / k;
            }
            Ok(BasisPair { n, lambda: lam, structure: Multiplicity::Simple, forward, adjoint, theta, psi })
        }
        Multiplicity::Double => {
            let (f1, a1, t1, s1) = simple_pieces(n, lam[0], p)?;
            let l = lam[1];
            check_normalizer(n, l, p)?;
            let d = 1.0 + kappa * l;
            let th = theta_of(n, l, p);
            let inv = C::new(1.0 / th, 0.0);
            let f2 = eigenvector(n, l, p).scale(inv);
            let cn = (b * rho * rho * d.powi(4) + mu * kappa.powi(3) * l.powi(4))
                / (l * d * (b * rho * rho * d.powi(3) + mu * kappa * kappa * l.powi(3)));
            let f3 = CoefVector::new(
                cn - 1.0 / l,
                -cn * l / (rho * nf),
                (mu * kappa * l - cn * mu * l * d) / (rho * d * d),
            )
            .scale(inv);
            let psi2 = -FRAC_PI_2 * (b / l + mu * kappa * kappa * l * l / (rho * rho * d.powi(3))) / th;
            if psi2.norm() < 1e-300 {
                return Err(Error::NotSimple { n, value: psi2.norm() });
            }
            let a2 = CoefVector::new(1.0 / l, C::new(0.0, 0.0), -mu * kappa * l / (rho * d * d)).scale(1.0 / psi2);
            let a3 = CoefVector::new(C::new(1.0, 0.0), l / (rho * nf), -mu * l / (rho * d)).scale(1.0 / psi2);
            let k1 = (C::new(1.0, 0.0) / pairing(n, &f1, &a1, p)).conj();
            Ok(BasisPair {
                n,
                lambda: lam,
                structure: Multiplicity::Double,
                forward: [f1, f2, f3],
                adjoint: [a1.scale(k1), a2, a3],
                theta: [t1, C::new(th, 0.0), C::new(th, 0.0)],
                psi: [s1 / k1, psi2, psi2],
            })
        }
        Multiplicity::Triple => {
            let th = (3.0 * PI * b).sqrt();
            let psi = -27.0 * b * kappa * kappa * PI / 4.0 / th;
            let f = |x: f64, y: f64, z: f64| CoefVector::real(x / th, y / th, z / th);
            let g = |x: f64, y: f64, z: f64| CoefVector::real(x / psi, y / psi, z / psi);
            let forward = [
                f(-1.0, -1.0 / (3.0 * kappa * rho * nf), -mu / (2.0 * kappa * rho)),
                f(1.5 * kappa, -1.0 / (2.0 * rho * nf), -1.5 * mu / rho),
                f(-27.0 * kappa * kappa / 4.0, -3.0 * kappa / (4.0 * rho * nf), -27.0 * mu * kappa / (8.0 * rho)),
            ];
            let adjoint = [
                g(9.0 * kappa * kappa / 4.0, 9.0 * kappa / (4.0 * rho * nf), -9.0 * mu * kappa / (4.0 * rho)),
                g(-3.0 * kappa, 0.0, 3.0 * mu / (4.0 * rho)),
                g(1.0, -1.0 / (3.0 * kappa * rho * nf), mu / (2.0 * kappa * rho)),
            ];
            let t = C::new(th, 0.0);
            let s = C::new(psi, 0.0);
            Ok(BasisPair { n, lambda: lam, structure: Multiplicity::Triple, forward, adjoint, theta: [t; 3], psi: [s; 3] })
        }
    }
}

impl BasisPair {
    /// `P[l][p] = <xi_l, xi*_p>`.
    pub fn pairing_table(&self, p: &PhysicalParams) -> [[C; 3]; 3] {
        let mut t = [[C::default(); 3]; 3];
        for l in 0..3 {
            for q in 0..3 {
                t[l][q] = pairing(self.n, &self.forward[l], &self.adjoint[q], p);
            }
        }
        t
    }

    pub fn biortho_deviation(&self, p: &PhysicalParams) -> f64 {
        let t = self.pairing_table(p);
        let mut dev: f64 = 0.0;
        for l in 0..3 {
            for q in 0..3 {
                let target = if l == q { 1.0 } else { 0.0 };
                dev = dev.max((t[l][q] - target).norm());
            }
        }
        dev
    }

    /// Gram matrix `M[p][l] = <xi_l, xi_p>`, so that `||sum d_l xi_l||^2 = d^H M d`.
    pub fn gram(&self, p: &PhysicalParams) -> Matrix3<C> {
        Matrix3::from_fn(|r, c| pairing(self.n, &self.forward[c], &self.forward[r], p))
    }

    /// Matrix whose columns are the forward coefficient vectors.
    pub fn forward_matrix(&self) -> Matrix3<C> {
        Matrix3::from_columns(&[self.forward[0].to_vector(), self.forward[1].to_vector(), self.forward[2].to_vector()])
    }

    /// Matrix of the generator in the eigenbasis: diagonal in the simple case,
    /// Jordan-type otherwise.
    pub fn modal_generator(&self) -> Matrix3<C> {
        let l = self.lambda;
        let z = C::new(0.0, 0.0);
        let m1 = C::new(-1.0, 0.0);
        match self.structure {
            Multiplicity::Simple => Matrix3::from_diagonal(&Vector3::new(l[0], l[1], l[2])),
            Multiplicity::Double => Matrix3::new(l[0], z, z, z, l[1], m1, z, z, l[1]),
            Multiplicity::Triple => Matrix3::new(l[0], m1, z, z, l[0], m1, z, z, l[0]),
        }
    }

    /// Largest violation of the eigen/chain relations for the forward and adjoint families.
    pub fn chain_residual(&self, p: &PhysicalParams) -> f64 {
        let a = generator_matrix(self.n, p);
        let ad = adjoint_generator_matrix(self.n, p);
        let x: Vec<Vector3<C>> = self.forward.iter().map(|v| v.to_vector()).collect();
        let y: Vec<Vector3<C>> = self.adjoint.iter().map(|v| v.to_vector()).collect();
        let l = self.lambda;
        let id = Matrix3::<C>::identity();
        let norm = |v: Vector3<C>| v.iter().map(|c| c.norm()).fold(0.0, f64::max);
        match self.structure {
            Multiplicity::Simple => (0..3)
                .map(|i| norm(a * x[i] - x[i] * l[i]).max(norm(ad * y[i] - y[i] * l[i].conj())))
                .fold(0.0, f64::max),
            Multiplicity::Double => {
                let li = id * l[1];
                [
                    norm(a * x[0] - x[0] * l[0]),
                    norm(ad * y[0] - y[0] * l[0].conj()),
                    norm(a * x[1] - x[1] * l[1]),
                    norm((li - a) * x[2] - x[1]),
                    norm(ad * y[2] - y[2] * l[1].conj()),
                    norm((li - ad) * y[1] - y[2]),
                ]
                .into_iter()
                .fold(0.0, f64::max)
            }
            Multiplicity::Triple => {
                let li = id * l[0];
                [
                    norm(a * x[0] - x[0] * l[0]),
                    norm((li - a) * x[1] - x[0]),
                    norm((li - a) * x[2] - x[1]),
                    norm(ad * y[2] - y[2] * l[0]),
                    norm((li - ad) * y[1] - y[2]),
                    norm((li - ad) * y[0] - y[1]),
                ]
                .into_iter()
                .fold(0.0, f64::max)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaMatrix {
    pub n: u64,
    pub matrix: Matrix3<C>,
    pub inverse: Matrix3<C>,
    pub norm: f64,
    pub inverse_norm: f64,
}

/// Largest singular value of a 3x3 complex matrix.
pub fn spectral_norm(m: &Matrix3<C>) -> f64 {
    m.singular_values().max()
}

/// Change of coordinates from the orthonormal Fourier frame to eigen coordinates.
pub fn gamma_matrix(basis: &BasisPair, p: &PhysicalParams) -> Result<GammaMatrix> {
    let phi = fourier_frame(p);
    let n = basis.n;
    let matrix = Matrix3::from_fn(|l, q| pairing(n, &phi[q], &basis.adjoint[l], p));
    let inverse = Matrix3::from_fn(|q, l| pairing(n, &basis.forward[l], &phi[q], p));
    let norm = spectral_norm(&matrix);
    let inverse_norm = spectral_norm(&inverse);
    let cond = norm * inverse_norm;
    if !(cond <= 1e12) {
        return Err(Error::NearSingularFrame { n, cond });
    }
    Ok(GammaMatrix { n, matrix, inverse, norm, inverse_norm })
}

/// Large-`n` limits of `|theta_{n,1}|` and `|theta_{n,2}|, |theta_{n,3}|`
/// (the same values bound `|psi|`).
pub fn normalizer_limits(p: &PhysicalParams) -> (f64, f64) {
    let l1 = (FRAC_PI_2 * (p.b + p.kappa * p.b * p.b * p.rho_s * p.rho_s / p.mu)).sqrt();
    let l2 = (PI * (p.b + p.mu / (p.kappa * p.rho_s * p.rho_s))).sqrt();
    (l1, l2)
}
