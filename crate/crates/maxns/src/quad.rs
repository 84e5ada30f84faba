//! Quadrature rules on uniform grids and Gauss-Legendre panels.

use num_complex::Complex64 as C;
use std::f64::consts::PI;

/// Uniform grid on `[0, pi]` with `nx` points, endpoints included.
pub fn uniform_grid(nx: usize) -> Vec<f64> {
    let h = PI / (nx - 1) as f64;
    (0..nx).map(|i| i as f64 * h).collect()
}

/// Composite Simpson weights for `n` uniformly spaced samples with spacing `h`.
///
/// With an odd number of intervals the last three intervals use the 3/8 rule.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 2, "need at least two samples");
    let mut w = vec![0.0; n];
    let intervals = n - 1;
    if intervals == 1 {
        w[0] = h / 2.0;
        w[1] = h / 2.0;
        return w;
    }
    let (simpson_end, tail) = if intervals % 2 == 0 { (n - 1, false) } else { (n - 4, true) };
    let mut i = 0;
    while i + 2 <= simpson_end {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if tail {
        let s = simpson_end;
        let c = 3.0 * h / 8.0;
        w[s] += c;
        w[s + 1] += 3.0 * c;
        w[s + 2] += 3.0 * c;
        w[s + 3] += c;
    }
    w
}

/// Trapezoid weights for `n` uniformly spaced samples with spacing `h`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] = h / 2.0;
    w[n - 1] = h / 2.0;
    w
}

pub fn dot_weights(w: &[f64], f: &[C]) -> C {
    w.iter().zip(f).map(|(wi, fi)| fi * *wi).sum()
}

pub fn dot_weights_real(w: &[f64], f: &[f64]) -> f64 {
    w.iter().zip(f).map(|(wi, fi)| wi * fi).sum()
}

/// Trapezoid integral of samples `f` on the uniform grid `x` restricted to `[a, b]`,
/// with linear interpolation on the partially covered end cells.
pub fn integrate_interval(x: &[f64], f: &[f64], a: f64, b: f64) -> f64 {
    let n = x.len();
    if n < 2 || b <= a {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..n - 1 {
        let (x0, x1) = (x[i], x[i + 1]);
        let lo = x0.max(a);
        let hi = x1.min(b);
        if hi <= lo {
            continue;
        }
        let dx = x1 - x0;
        let at = |s: f64| f[i] + (f[i + 1] - f[i]) * (s - x0) / dx;
        total += 0.5 * (at(lo) + at(hi)) * (hi - lo);
    }
    total
}

/// Weights `(index, w)` with `sum w f[index] == integrate_interval(x, f, a, b)`.
pub fn interval_weights(x: &[f64], a: f64, b: f64) -> Vec<(usize, f64)> {
    let n = x.len();
    let mut out: Vec<(usize, f64)> = Vec::new();
    if n < 2 || b <= a {
        return out;
    }
    let mut push = |i: usize, w: f64| match out.last_mut() {
        Some(last) if last.0 == i => last.1 += w,
        _ => out.push((i, w)),
    };
    for i in 0..n - 1 {
        let (x0, x1) = (x[i], x[i + 1]);
        let lo = x0.max(a);
        let hi = x1.min(b);
        if hi <= lo {
            continue;
        }
        let dx = x1 - x0;
        let (t0, t1) = ((lo - x0) / dx, (hi - x0) / dx);
        let half = 0.5 * (hi - lo);
        push(i, half * ((1.0 - t0) + (1.0 - t1)));
        push(i + 1, half * (t0 + t1));
    }
    out
}

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if m == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[m - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre rule: `(node, weight)` pairs covering `[a, b]` with
/// `panels` equal panels of `m` points each.
pub fn gl_panels(a: f64, b: f64, panels: usize, m: usize) -> Vec<(f64, f64)> {
    let (z, w) = gauss_legendre(m);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * m);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (zi, wi) in z.iter().zip(&w) {
            out.push((mid + 0.5 * h * zi, 0.5 * h * wi));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_exact_on_cubics() {
        for n in [5usize, 6, 9, 10, 17] {
            let h = 2.0 / (n - 1) as f64;
            let w = simpson_weights(n, h);
            let s: f64 = (0..n).map(|i| {
                let x = i as f64 * h;
                w[i] * (x * x * x - 2.0 * x + 1.0)
            }).sum();
            assert!((s - (4.0 - 4.0 + 2.0)).abs() < 1e-13, "n={n} s={s}");
        }
    }

    #[test]
    fn simpson_trig_products_exact() {
        let nx = 129;
        let x = uniform_grid(nx);
        let w = simpson_weights(nx, x[1]);
        for n in 0..20 {
            for m in 0..20 {
                let s: f64 = (0..nx).map(|i| w[i] * (n as f64 * x[i]).cos() * (m as f64 * x[i]).cos()).sum();
                let exact = if n != m { 0.0 } else if n == 0 { PI } else { PI / 2.0 };
                assert!((s - exact).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn gauss_legendre_moments() {
        for m in [1usize, 2, 5, 8, 16] {
            let (z, w) = gauss_legendre(m);
            for deg in 0..(2 * m) {
                let s: f64 = z.iter().zip(&w).map(|(zi, wi)| wi * zi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((s - exact).abs() < 1e-14, "m={m} deg={deg}");
            }
        }
    }

    #[test]
    fn interval_integral() {
        let x: Vec<f64> = (0..101).map(|i| i as f64 * 0.01).collect();
        let f: Vec<f64> = x.iter().map(|&v| 2.0 * v).collect();
        let s = integrate_interval(&x, &f, 0.205, 0.7);
        assert!((s - (0.49 - 0.042025)).abs() < 1e-12);
    }

    #[test]
    fn interval_weights_agree() {
        let x: Vec<f64> = (0..57).map(|i| i as f64 * 0.05).collect();
        let f: Vec<f64> = x.iter().map(|&v| (3.0 * v).sin() + v * v).collect();
        for (a, b) in [(0.0, 2.8), (0.33, 1.01), (0.4, 0.41), (1.0, 0.5)] {
            let w: f64 = interval_weights(&x, a, b).iter().map(|(i, wi)| wi * f[*i]).sum();
            assert!((w - integrate_interval(&x, &f, a, b)).abs() < 1e-14);
        }
    }
}
