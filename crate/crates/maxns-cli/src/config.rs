//! Run configuration: one optional block per command, validated before any work.

use maxns::{Error, PhysicalParams, RawParams, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub params: RawParams,
    pub output_dir: Option<String>,
    pub seed: u64,
    pub spectrum: SpectrumCfg,
    pub basis_check: BasisCfg,
    pub null_control: NullCfg,
    pub approx_control: ApproxCfg,
    pub simulate: SimulateCfg,
    pub beam: BeamCfg,
    pub ingham: InghamCfg,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: RawParams::unit(),
            output_dir: None,
            seed: 0,
            spectrum: SpectrumCfg::default(),
            basis_check: BasisCfg::default(),
            null_control: NullCfg::default(),
            approx_control: ApproxCfg::default(),
            simulate: SimulateCfg::default(),
            beam: BeamCfg::default(),
            ingham: InghamCfg::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumCfg {
    pub n_max: u64,
}

impl Default for SpectrumCfg {
    fn default() -> Self {
        SpectrumCfg { n_max: 50 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisCfg {
    pub n_max: usize,
}

impl Default for BasisCfg {
    fn default() -> Self {
        BasisCfg { n_max: 50 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct NullCfg {
    #[serde(rename = "T")]
    pub t: f64,
    pub n_max: usize,
    pub seed: Option<u64>,
    /// Grid of the finite-difference replay; 0 skips it.
    pub nx_oracle: usize,
    pub nt: usize,
}

impl Default for NullCfg {
    fn default() -> Self {
        NullCfg { t: 1.0, n_max: 64, seed: None, nx_oracle: 2001, nt: 512 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApproxCfg {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "O1")]
    pub o1: (f64, f64),
    pub n_max: usize,
    pub reg: f64,
    pub seed: Option<u64>,
    pub nt_hats: usize,
    pub nx_hats: usize,
}

impl Default for ApproxCfg {
    fn default() -> Self {
        ApproxCfg { t: 9.0, o1: (0.3, 0.6), n_max: 32, reg: 1e-8, seed: None, nt_hats: 64, nx_hats: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Modal,
    Fd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlKind {
    None,
    Null,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateCfg {
    #[serde(rename = "T")]
    pub t: f64,
    pub n_max: usize,
    pub nx: usize,
    /// 0 picks the smallest step count allowed by the CFL bound.
    pub nt: usize,
    pub method: Method,
    pub control: ControlKind,
    pub snapshots: usize,
    pub seed: Option<u64>,
    /// Optional modal-state JSON used instead of a random state.
    pub initial: Option<String>,
}

impl Default for SimulateCfg {
    fn default() -> Self {
        SimulateCfg {
            t: 1.0,
            n_max: 16,
            nx: 257,
            nt: 0,
            method: Method::Fd,
            control: ControlKind::None,
            snapshots: 33,
            seed: None,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeamCfg {
    pub k_ladder: Vec<u64>,
    pub x0: f64,
    pub r: f64,
    #[serde(rename = "O1")]
    pub o1: (f64, f64),
    #[serde(rename = "O2")]
    pub o2: (f64, f64),
    #[serde(rename = "O3")]
    pub o3: (f64, f64),
    #[serde(rename = "T")]
    pub t: f64,
}

impl Default for BeamCfg {
    fn default() -> Self {
        BeamCfg { k_ladder: vec![64, 256, 1024, 4096], x0: 1.2, r: 0.5, o1: (2.2, 2.8), o2: (0.0, PI), o3: (2.2, 2.8), t: 1.0 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct InghamCfg {
    #[serde(rename = "M")]
    pub m: u64,
    pub n_max: u64,
    #[serde(rename = "T_list")]
    pub t_list: Vec<f64>,
}

impl Default for InghamCfg {
    fn default() -> Self {
        InghamCfg { m: 10, n_max: 200, t_list: vec![9.0, 12.0, 15.0] }
    }
}

fn positive(section: &str, field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(format!("{section}.{field}"), format!("must be positive and finite, got {v}")))
    }
}

fn at_least(section: &str, field: &str, v: usize, min: usize) -> Result<()> {
    if v >= min {
        Ok(())
    } else {
        Err(Error::validation(format!("{section}.{field}"), format!("must be >= {min}, got {v}")))
    }
}

fn interval(section: &str, field: &str, (a, b): (f64, f64)) -> Result<()> {
    if 0.0 <= a && a < b && b <= PI {
        Ok(())
    } else {
        Err(Error::validation(format!("{section}.{field}"), format!("need 0 <= lo < hi <= pi, got ({a}, {b})")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    BasisCheck,
    NullControl,
    ApproxControl,
    Simulate,
    Beam,
    Ingham,
}

impl RunConfig {
    pub fn physical(&self) -> Result<PhysicalParams> {
        PhysicalParams::new(self.params).map_err(|e| e.in_section("params"))
    }

    /// Validate the parameters and the block used by `cmd`.
    pub fn validate(&self, cmd: Command) -> Result<PhysicalParams> {
        let p = self.physical()?;
        match cmd {
            Command::Spectrum => {
                at_least("spectrum", "n_max", self.spectrum.n_max as usize, 1)?;
            }
            Command::BasisCheck => {
                at_least("basis_check", "n_max", self.basis_check.n_max, 1)?;
            }
            Command::NullControl => {
                let c = &self.null_control;
                positive("null_control", "T", c.t)?;
                at_least("null_control", "n_max", c.n_max, 1)?;
                at_least("null_control", "nt", c.nt, 2)?;
                if c.nx_oracle != 0 {
                    at_least("null_control", "nx_oracle", c.nx_oracle, 8 * c.n_max.max(2))?;
                }
            }
            Command::ApproxControl => {
                let c = &self.approx_control;
                positive("approx_control", "T", c.t)?;
                interval("approx_control", "O1", c.o1)?;
                at_least("approx_control", "n_max", c.n_max, 1)?;
                if !(c.reg >= 0.0 && c.reg.is_finite()) {
                    return Err(Error::validation("approx_control.reg", "must be finite and >= 0"));
                }
                at_least("approx_control", "nt_hats", c.nt_hats, 2)?;
                at_least("approx_control", "nx_hats", c.nx_hats, 1)?;
            }
            Command::Simulate => {
                let c = &self.simulate;
                positive("simulate", "T", c.t)?;
                at_least("simulate", "n_max", c.n_max, 1)?;
                at_least("simulate", "nx", c.nx, 8 * c.n_max.max(2))?;
                at_least("simulate", "snapshots", c.snapshots, 2)?;
                if c.method == Method::Fd && c.nt != 0 {
                    let need = maxns::dynamics::min_steps(c.t, c.nx, &p);
                    if c.nt < need {
                        return Err(Error::validation("simulate.nt", format!("violates the CFL bound: need >= {need}")));
                    }
                }
            }
            Command::Beam => {
                let c = &self.beam;
                if c.k_ladder.is_empty() || c.k_ladder.contains(&0) {
                    return Err(Error::validation("beam.k_ladder", "need a non-empty list of positive integers"));
                }
                positive("beam", "T", c.t)?;
                positive("beam", "r", c.r)?;
                interval("beam", "O1", c.o1)?;
                interval("beam", "O2", c.o2)?;
                interval("beam", "O3", c.o3)?;
                let b = maxns::beam::build_beam(c.k_ladder[0], c.x0, c.r, &p).map_err(|e| e.in_section("beam"))?;
                let g = maxns::beam::Geometry { o1: c.o1, o2: c.o2, o3: c.o3 };
                g.validate(&b).map_err(|e| e.in_section("beam"))?;
            }
            Command::Ingham => {
                let c = &self.ingham;
                if c.m == 0 || c.m > c.n_max {
                    return Err(Error::validation("ingham.M", format!("need 1 <= M <= n_max, got {}", c.m)));
                }
                if c.t_list.is_empty() {
                    return Err(Error::validation("ingham.T_list", "must not be empty"));
                }
                for t in &c.t_list {
                    positive("ingham", "T_list", *t)?;
                }
            }
        }
        Ok(p)
    }
}
