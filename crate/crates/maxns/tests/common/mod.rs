//! Independent reference computations for the integration tests. Nothing here calls
//! into the crate's numerics.
#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64 as C;

/// Gauss-Legendre nodes/weights on [-1, 1] from the Golub-Welsch eigenproblem.
pub fn golub_welsch(m: usize) -> (Vec<f64>, Vec<f64>) {
    let j = DMatrix::<f64>::from_fn(m, m, |r, c| {
        if r.abs_diff(c) == 1 {
            let k = r.max(c) as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = j.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> =
        (0..m).map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Composite rule on [a, b]: `panels` panels of the `m`-point rule.
pub fn composite(a: f64, b: f64, panels: usize, m: usize) -> Vec<(f64, f64)> {
    let (z, w) = golub_welsch(m);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * m);
    for k in 0..panels {
        let c = a + (k as f64 + 0.5) * h;
        for i in 0..m {
            out.push((c + 0.5 * h * z[i], 0.5 * h * w[i]));
        }
    }
    out
}

/// Simpson weights for an odd number of samples.
pub fn simpson(n: usize, h: f64) -> Vec<f64> {
    assert!(n % 2 == 1);
    (0..n)
        .map(|i| {
            let c = if i == 0 || i == n - 1 { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            c * h / 3.0
        })
        .collect()
}

/// Dense matrix exponential: Taylor series with scaling and squaring.
pub fn expm(a: &Matrix3<C>) -> Matrix3<C> {
    let s = (a.norm().max(1.0).log2().ceil() as i32) + 3;
    let m = a.map(|v| v / 2f64.powi(s));
    let mut term = Matrix3::<C>::identity();
    let mut sum = term;
    for k in 1..25 {
        term = term * m;
        term = term.map(|v| v / k as f64);
        sum += term;
    }
    for _ in 0..s {
        sum = sum * sum;
    }
    sum
}

/// Coefficient-space generator of mode n built from the PDE directly: a field
/// `(r cos nx, v sin nx, s cos nx)` is mapped to its time derivative.
pub fn generator(n: f64, b: f64, rho_s: f64, mu: f64, kappa: f64) -> Matrix3<C> {
    let r = |v: f64| C::new(v, 0.0);
    Matrix3::new(
        r(0.0), r(-rho_s * n), r(0.0),
        r(b * n), r(0.0), r(-n / rho_s),
        r(0.0), r(mu * n / kappa), r(-1.0 / kappa),
    )
}

/// Elementary symmetric functions of the eigenvalues of a 3x3 matrix:
/// trace, sum of principal 2x2 minors, determinant.
pub fn invariants(a: &Matrix3<C>) -> (C, C, C) {
    let tr = a[(0, 0)] + a[(1, 1)] + a[(2, 2)];
    let m = |i: usize, j: usize| a[(i, i)] * a[(j, j)] - a[(i, j)] * a[(j, i)];
    (tr, m(0, 1) + m(0, 2) + m(1, 2), a.determinant())
}

pub struct Timer(std::time::Instant);

impl Timer {
    pub fn start() -> Self {
        Timer(std::time::Instant::now())
    }
    pub fn secs(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}
