//! Physical constants of the linearized system and the scalars derived from them.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Raw constants as they appear in a configuration file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    pub rho_s: f64,
    pub a: f64,
    pub gamma: f64,
    pub mu: f64,
    pub kappa: f64,
}

impl RawParams {
    /// The unit parameter set used throughout the tests (`rho_s = a = gamma = mu = kappa = 1`).
    pub const fn unit() -> Self {
        RawParams { rho_s: 1.0, a: 1.0, gamma: 1.0, mu: 1.0, kappa: 1.0 }
    }
}

impl Default for RawParams {
    fn default() -> Self {
        Self::unit()
    }
}

/// Validated constants together with every derived scalar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalParams {
    pub rho_s: f64,
    pub a: f64,
    pub gamma: f64,
    pub mu: f64,
    pub kappa: f64,
    /// `a * gamma * rho_s^(gamma - 2)`
    pub b: f64,
    /// Accumulation point of the real eigenvalue branch.
    pub omega0: f64,
    pub c_wave: f64,
    /// `4 pi / c_wave`
    pub t_star: f64,
}

fn check_positive(field: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::validation(field, format!("must be finite, got {v}")));
    }
    if v <= 0.0 {
        return Err(Error::validation(field, format!("must be strictly positive, got {v}")));
    }
    Ok(())
}

pub fn derive_constants(raw: &RawParams) -> Result<PhysicalParams> {
    check_positive("rho_s", raw.rho_s)?;
    check_positive("a", raw.a)?;
    check_positive("gamma", raw.gamma)?;
    if raw.gamma < 1.0 {
        return Err(Error::validation("gamma", format!("must be >= 1, got {}", raw.gamma)));
    }
    check_positive("mu", raw.mu)?;
    check_positive("kappa", raw.kappa)?;

    let RawParams { rho_s, a, gamma, mu, kappa } = *raw;
    let b = a * gamma * rho_s.powf(gamma - 2.0);
    let omega0 = -b * rho_s * rho_s / (mu + kappa * b * rho_s * rho_s);
    let c_wave = (b * rho_s + mu / (kappa * rho_s)).sqrt();
    let t_star = 4.0 * PI / c_wave;
    let p = PhysicalParams { rho_s, a, gamma, mu, kappa, b, omega0, c_wave, t_star };
    for (name, v) in [("b", b), ("omega0", omega0), ("c_wave", c_wave), ("t_star", t_star)] {
        if !v.is_finite() {
            return Err(Error::validation(name, "derived value overflowed"));
        }
    }
    Ok(p)
}

impl PhysicalParams {
    pub fn new(raw: RawParams) -> Result<Self> {
        derive_constants(&raw)
    }

    pub fn unit() -> Self {
        derive_constants(&RawParams::unit()).expect("unit parameters are valid")
    }

    pub fn raw(&self) -> RawParams {
        RawParams { rho_s: self.rho_s, a: self.a, gamma: self.gamma, mu: self.mu, kappa: self.kappa }
    }

    /// Residual of `(b rho_s + mu/(kappa rho_s)) omega0 + b rho_s / kappa`.
    pub fn omega0_residual(&self) -> f64 {
        let coef = self.b * self.rho_s + self.mu / (self.kappa * self.rho_s);
        coef * self.omega0 + self.b * self.rho_s / self.kappa
    }

    /// Weights of the energy inner product: `(b, rho_s, kappa/mu)`.
    pub fn weights(&self) -> [f64; 3] {
        [self.b, self.rho_s, self.kappa / self.mu]
    }
}
