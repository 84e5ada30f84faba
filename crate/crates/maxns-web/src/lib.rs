//! wasm-bindgen surface for the static demo page in `www/`.
//!
//! Every export takes plain numbers plus the constants as a JSON object and
//! returns a JSON string, so the page needs nothing beyond `JSON.parse`.

use maxns::beam::{beam_fields, build_beam};
use maxns::control::assemble_control;
use maxns::dynamics::evolve_modal;
use maxns::spectrum::spectrum;
use maxns::state::ModalFrame;
use maxns::{PhysicalParams, RawParams};
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_MODES: u64 = 400;
const MAX_NX: usize = 20001;

fn params(text: &str) -> Result<PhysicalParams, String> {
    let raw: RawParams = if text.trim().is_empty() {
        RawParams::unit()
    } else {
        serde_json::from_str(text).map_err(|e| format!("params: {e}"))?
    };
    PhysicalParams::new(raw).map_err(|e| e.in_section("params").to_string())
}

fn pair(z: maxns::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Eigenvalues of modes `1..=n_max` and the derived constants.
#[wasm_bindgen]
pub fn spectrum_json(params_json: &str, n_max: u32) -> Result<String, String> {
    let p = params(params_json)?;
    let n_max = u64::from(n_max);
    if n_max == 0 || n_max > MAX_MODES {
        return Err(format!("n_max must be in 1..={MAX_MODES}"));
    }
    let sp = spectrum(n_max, &p).map_err(|e| e.to_string())?;
    let modes: Vec<_> = sp
        .iter()
        .map(|m| json!({ "n": m.n, "lambda": m.lambda.map(pair), "multiplicity": m.multiplicity.tag() }))
        .collect();
    Ok(json!({
        "b": p.b, "omega0": p.omega0, "c_wave": p.c_wave, "t_star": p.t_star,
        "modes": modes,
    })
    .to_string())
}

/// Gaussian-beam profile at time `t` sampled on `nx` points of `[0, pi]`.
#[wasm_bindgen]
pub fn beam_profile_json(params_json: &str, k: u32, x0: f64, r: f64, t: f64, nx: u32) -> Result<String, String> {
    let p = params(params_json)?;
    let nx = nx as usize;
    if !(3..=MAX_NX).contains(&nx) {
        return Err(format!("nx must be in 3..={MAX_NX}"));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err("t must be finite and >= 0".into());
    }
    let beam = build_beam(u64::from(k), x0, r, &p).map_err(|e| e.to_string())?;
    let g = beam_fields(&beam, t, nx).map_err(|e| e.to_string())?;
    let abs = |v: &[maxns::Complex64]| v.iter().map(|z| z.norm()).collect::<Vec<_>>();
    let re = |v: &[maxns::Complex64]| v.iter().map(|z| z.re).collect::<Vec<_>>();
    Ok(json!({
        "x": g.x,
        "rho_re": re(&g.rho), "rho_abs": abs(&g.rho),
        "u_abs": abs(&g.u), "s_abs": abs(&g.s),
    })
    .to_string())
}

/// Minimal-energy null control of a seeded random state: per-mode costs and the replayed terminal norm.
#[wasm_bindgen]
pub fn null_control_json(params_json: &str, n_max: u32, t_final: f64, seed: u32) -> Result<String, String> {
    let p = params(params_json)?;
    let n_max = n_max as usize;
    if n_max == 0 || n_max > MAX_MODES as usize {
        return Err(format!("n_max must be in 1..={MAX_MODES}"));
    }
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err("T must be positive and finite".into());
    }
    let frame = ModalFrame::new(&p, n_max).map_err(|e| e.to_string())?;
    let z0 = frame.random_state(n_max, u64::from(seed));
    let ctl = assemble_control(&z0, t_final, &frame, 256).map_err(|e| e.to_string())?;
    let tr = evolve_modal(&z0, Some(&ctl.signal), t_final, &frame, 2).map_err(|e| e.to_string())?;
    let z_t = frame.z_norm(tr.last_modal().ok_or("empty trajectory")?);
    let z0n = frame.z_norm(&z0);
    Ok(json!({
        "T": t_final,
        "initial_norm": z0n,
        "terminal_norm": z_t,
        "energy": ctl.energy,
        "energy_constant": ctl.energy / (z0n * z0n),
        "per_mode_energies": ctl.per_mode_energy,
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: Result<String, String>) -> serde_json::Value {
        serde_json::from_str(&s.unwrap()).unwrap()
    }

    #[test]
    fn spectrum_unit_constants() {
        let v = parse(spectrum_json("", 5));
        assert_eq!(v["omega0"], -0.5);
        assert_eq!(v["modes"].as_array().unwrap().len(), 5);
        let l1 = v["modes"][0]["lambda"][0][0].as_f64().unwrap();
        assert!(l1 < -0.5 && l1 > -1.0);
    }

    #[test]
    fn rejects_bad_input() {
        let e = spectrum_json(r#"{"rho_s":1,"a":1,"gamma":1,"mu":1,"kappa":0}"#, 5).unwrap_err();
        assert!(e.contains("params.kappa"), "{e}");
        assert!(spectrum_json("", 0).is_err());
        assert!(beam_profile_json("", 64, 0.1, 0.5, 0.0, 101).is_err());
        assert!(null_control_json("", 4, -1.0, 0).is_err());
    }

    #[test]
    fn beam_profile_is_localized() {
        let v = parse(beam_profile_json("", 64, 1.2, 0.5, 0.0, 1001));
        let x = v["x"].as_array().unwrap();
        let a = v["rho_abs"].as_array().unwrap();
        assert_eq!(x.len(), 1001);
        for (xi, ai) in x.iter().zip(a) {
            if (xi.as_f64().unwrap() - 1.2).abs() > 0.5 {
                assert_eq!(ai.as_f64().unwrap(), 0.0);
            }
        }
        assert!(a.iter().any(|ai| ai.as_f64().unwrap() > 0.0));
    }

    #[test]
    fn null_control_drives_to_rest() {
        let v = parse(null_control_json("", 6, 1.0, 2));
        assert_eq!(v["per_mode_energies"].as_array().unwrap().len(), 7);
        assert!(v["terminal_norm"].as_f64().unwrap() < 1e-6 * v["initial_norm"].as_f64().unwrap());
        assert!(v["energy"].as_f64().unwrap() > 0.0);
    }
}
