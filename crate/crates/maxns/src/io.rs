//! File formats: grid fields and controls as CSV, modal states as JSON.

use num_complex::Complex64 as C;
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};

use crate::control::ControlSignal;
use crate::dynamics::{Snapshots, Trajectory};
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::state::{z_norm_grid, GridField, ModalFrame, ModalState};

/// 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| io_err(path, e))?;
    s.push('\n');
    fs::write(path, s).map_err(|e| io_err(path, e))
}

pub const GRID_HEADER: [&str; 7] = ["x", "rho_re", "rho_im", "u_re", "u_im", "S_re", "S_im"];

pub fn grid_rows(g: &GridField) -> Vec<Vec<String>> {
    (0..g.nx())
        .map(|i| {
            vec![
                fmt17(g.x[i]),
                fmt17(g.rho[i].re),
                fmt17(g.rho[i].im),
                fmt17(g.u[i].re),
                fmt17(g.u[i].im),
                fmt17(g.s[i].re),
                fmt17(g.s[i].im),
            ]
        })
        .collect()
}

pub fn write_grid_csv(path: &Path, g: &GridField) -> Result<()> {
    write_csv(path, &GRID_HEADER, &grid_rows(g))
}

pub fn read_grid_csv(path: &Path) -> Result<GridField> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let header: Vec<String> = r.headers().map_err(|e| io_err(path, e))?.iter().map(str::to_string).collect();
    if header != GRID_HEADER {
        return Err(Error::Shape(format!("{}: expected columns {:?}", path.display(), GRID_HEADER)));
    }
    let mut x = Vec::new();
    let (mut rho, mut u, mut s) = (Vec::new(), Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        let v: Vec<f64> = rec
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|e| io_err(path, e)))
            .collect::<Result<_>>()?;
        x.push(v[0]);
        rho.push(C::new(v[1], v[2]));
        u.push(C::new(v[3], v[4]));
        s.push(C::new(v[5], v[6]));
    }
    let g = GridField { x, rho, u, s };
    g.check()?;
    let h = std::f64::consts::PI / (g.nx() - 1) as f64;
    if g.x.iter().enumerate().any(|(i, xi)| (xi - i as f64 * h).abs() > 1e-9) {
        return Err(Error::Shape("grid must be uniform on [0, pi] with endpoints".into()));
    }
    Ok(g)
}

fn cjson(c: C) -> Value {
    json!([c.re, c.im])
}

fn parse_c(v: &Value, what: &str) -> Result<C> {
    let a = v.as_array().filter(|a| a.len() == 2);
    match a.map(|a| (a[0].as_f64(), a[1].as_f64())) {
        Some((Some(re), Some(im))) => Ok(C::new(re, im)),
        _ => Err(Error::validation(what, "expected [re, im]")),
    }
}

/// `{"alpha0": [re, im], "modes": [[n, d1, d2, d3], ...]}`.
pub fn modal_to_json(s: &ModalState) -> Value {
    let modes: Vec<Value> = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, d)| json!([k + 1, cjson(d[0]), cjson(d[1]), cjson(d[2])]))
        .collect();
    json!({ "alpha0": cjson(s.alpha0), "modes": modes })
}

pub fn modal_from_json(v: &Value) -> Result<ModalState> {
    let alpha0 = parse_c(v.get("alpha0").ok_or_else(|| Error::validation("alpha0", "missing"))?, "alpha0")?;
    let modes = v.get("modes").and_then(Value::as_array).ok_or_else(|| Error::validation("modes", "missing array"))?;
    let mut st = ModalState::zeros(modes.len());
    st.alpha0 = alpha0;
    for (k, m) in modes.iter().enumerate() {
        let a = m.as_array().filter(|a| a.len() == 4).ok_or_else(|| Error::validation("modes", "entries are [n, d1, d2, d3]"))?;
        if a[0].as_u64() != Some(k as u64 + 1) {
            return Err(Error::validation("modes", format!("entry {k} must have n = {}", k + 1)));
        }
        for l in 0..3 {
            st.coeffs[k][l] = parse_c(&a[l + 1], "modes")?;
        }
    }
    Ok(st)
}

/// Control samples as CSV: `t, n, re, im` for modal signals, `t, x, re, im` for
/// localized ones.
pub fn write_control_csv(path: &Path, sig: &ControlSignal) -> Result<()> {
    let mut rows = Vec::new();
    if let Some(loc) = &sig.localized {
        for (j, t) in sig.t.iter().enumerate() {
            for (k, x) in loc.x.iter().enumerate() {
                let v = loc.values[j][k];
                rows.push(vec![fmt17(*t), fmt17(*x), fmt17(v.re), fmt17(v.im)]);
            }
        }
        return write_csv(path, &["t", "x", "f_re", "f_im"], &rows);
    }
    for (j, t) in sig.t.iter().enumerate() {
        for (n, g) in sig.modal.iter().enumerate() {
            rows.push(vec![fmt17(*t), n.to_string(), fmt17(g[j].re), fmt17(g[j].im)]);
        }
    }
    write_csv(path, &["t", "mode", "g_re", "g_im"], &rows)
}

/// One file per snapshot plus `manifest.json` with `{times, files, norms}`.
pub fn write_trajectory(dir: &Path, tr: &Trajectory, p: &PhysicalParams, frame: Option<&ModalFrame>) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut files = Vec::new();
    let mut norms = Vec::new();
    match &tr.states {
        Snapshots::Grid(v) => {
            for (k, g) in v.iter().enumerate() {
                let f = dir.join(format!("snapshot_{k:03}.csv"));
                write_grid_csv(&f, g)?;
                norms.push(z_norm_grid(g, p));
                files.push(f);
            }
        }
        Snapshots::Modal(v) => {
            for (k, s) in v.iter().enumerate() {
                let f = dir.join(format!("snapshot_{k:03}.json"));
                write_json(&f, &modal_to_json(s))?;
                norms.push(frame.map(|fr| fr.z_norm(s)).unwrap_or_else(|| s.coef_norm()));
                files.push(f);
            }
        }
    }
    let names: Vec<String> = files.iter().map(|f| f.file_name().unwrap().to_string_lossy().into_owned()).collect();
    let manifest = dir.join("manifest.json");
    write_json(&manifest, &json!({ "times": tr.times, "files": names, "norms": norms }))?;
    files.push(manifest);
    Ok(files)
}
