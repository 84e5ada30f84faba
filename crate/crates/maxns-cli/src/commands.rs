//! One function per subcommand. Each returns the files it wrote.

use maxns::basis::spectral_norm;
use maxns::beam::{beam_ladder, Geometry};
use maxns::control::{approx_control, assemble_control, ApproxOptions};
use maxns::dynamics::{evolve_modal, fd_solve, min_steps, FdOptions, Trajectory};
use maxns::ingham::{frequencies, ingham_constants};
use maxns::io::{fmt17, modal_from_json, modal_to_json, write_control_csv, write_csv, write_json, write_trajectory};
use maxns::spectrum::{asymptotic_prediction, spectrum};
use maxns::state::{reconstruct, z_norm_grid, ModalFrame, ModalState};
use maxns::{Error, PhysicalParams, Result};
use serde_json::json;
use std::path::{Path, PathBuf};

use crate::config::{ControlKind, Method, RunConfig};

pub fn spectrum_cmd(cfg: &RunConfig, p: &PhysicalParams, out: &Path) -> Result<Vec<PathBuf>> {
    let sp = spectrum(cfg.spectrum.n_max, p)?;
    let mut rows = Vec::with_capacity(sp.len());
    for m in &sp {
        let pred = asymptotic_prediction(m.n, p);
        let pr = [maxns::Complex64::new(pred.lambda1, 0.0), pred.lambda2, pred.lambda3];
        let mut r = vec![m.n.to_string()];
        for l in m.lambda {
            r.push(fmt17(l.re));
            r.push(fmt17(l.im));
        }
        r.push(m.multiplicity.tag().to_string());
        for l in pr {
            r.push(fmt17(l.re));
            r.push(fmt17(l.im));
        }
        for (l, q) in m.lambda.iter().zip(pr) {
            r.push(fmt17((l - q).norm()));
        }
        rows.push(r);
    }
    let header = [
        "n", "l1_re", "l1_im", "l2_re", "l2_im", "l3_re", "l3_im", "multiplicity", "pred1_re", "pred1_im", "pred2_re",
        "pred2_im", "pred3_re", "pred3_im", "dev1", "dev2", "dev3",
    ];
    let f = out.join("spectrum.csv");
    write_csv(&f, &header, &rows)?;
    Ok(vec![f])
}

pub fn basis_check_cmd(cfg: &RunConfig, p: &PhysicalParams, out: &Path) -> Result<Vec<PathBuf>> {
    let frame = ModalFrame::new(p, cfg.basis_check.n_max)?;
    let modes: Vec<_> = (1..=frame.nmax())
        .map(|n| {
            let b = frame.basis(n);
            let g = &frame.gammas[n - 1];
            json!({
                "n": n,
                "max_biortho_deviation": b.biortho_deviation(p),
                "gamma_norm": g.norm,
                "gamma_inv_norm": g.inverse_norm,
                "structure": b.structure.tag(),
            })
        })
        .collect();
    let rb = frame.riesz_bounds();
    let worst = (1..=frame.nmax()).map(|n| frame.basis(n).biortho_deviation(p)).fold(0.0, f64::max);
    let gmax = frame.gammas.iter().map(|g| spectral_norm(&g.matrix)).fold(0.0, f64::max);
    let f = out.join("basis_check.json");
    write_json(
        &f,
        &json!({
            "n_max": frame.nmax(),
            "max_biortho_deviation": worst,
            "max_gamma_norm": gmax,
            "riesz_bounds": { "c1": rb.c1, "c2": rb.c2 },
            "modes": modes,
        }),
    )?;
    Ok(vec![f])
}

fn seed_for(cfg: &RunConfig, block: Option<u64>, cli: Option<u64>) -> u64 {
    cli.or(block).unwrap_or(cfg.seed)
}

pub fn null_control_cmd(cfg: &RunConfig, p: &PhysicalParams, out: &Path, cli_seed: Option<u64>) -> Result<Vec<PathBuf>> {
    let c = &cfg.null_control;
    let seed = seed_for(cfg, c.seed, cli_seed);
    let frame = ModalFrame::new(p, c.n_max)?;
    let z0 = frame.random_state(c.n_max, seed);
    let ctl = assemble_control(&z0, c.t, &frame, c.nt)?;
    let tr = evolve_modal(&z0, Some(&ctl.signal), c.t, &frame, 2)?;
    let zt = tr.last_modal().expect("modal trajectory");
    let z0n = frame.z_norm(&z0);
    let terminal_error = frame.z_norm(zt);
    let mut files = Vec::new();
    let f = out.join("control.csv");
    write_control_csv(&f, &ctl.signal)?;
    files.push(f);
    let f = out.join("initial_state.json");
    write_json(&f, &modal_to_json(&z0))?;
    files.push(f);
    let mut summary = json!({
        "T": c.t,
        "n_max": c.n_max,
        "seed": seed,
        "nt": c.nt,
        "initial_norm": z0n,
        "terminal_error": terminal_error,
        "relative_terminal_error": terminal_error / z0n,
        "control_energy": ctl.energy,
        "energy_constant": ctl.energy / (z0n * z0n),
        "per_mode_energies": ctl.per_mode_energy,
    });
    if c.nx_oracle > 0 {
        let g0 = reconstruct(&z0, &frame, c.nx_oracle)?;
        let nt = min_steps(c.t, c.nx_oracle, p);
        let fd = fd_solve(&g0, Some(&ctl.signal), c.t, nt, p, FdOptions { n_snap: Some(2), observer: None })?;
        let e = z_norm_grid(fd.last_grid().expect("grid trajectory"), p);
        summary["fd_oracle"] = json!({ "nx": c.nx_oracle, "nt": nt, "terminal_error": e, "relative_terminal_error": e / z_norm_grid(&g0, p) });
    }
    let f = out.join("summary.json");
    write_json(&f, &summary)?;
    files.push(f);
    Ok(files)
}

pub fn approx_control_cmd(cfg: &RunConfig, p: &PhysicalParams, out: &Path, cli_seed: Option<u64>) -> Result<Vec<PathBuf>> {
    let c = &cfg.approx_control;
    let seed = seed_for(cfg, c.seed, cli_seed);
    let frame = ModalFrame::new(p, c.n_max)?;
    let z0 = frame.random_state(c.n_max, seed);
    let target = ModalState::zeros(c.n_max);
    let opts = ApproxOptions { nt_hats: c.nt_hats, nx_hats: c.nx_hats, reg: c.reg };
    let r = approx_control(&z0, &target, c.o1, c.t, &frame, opts)?;
    let z0n = frame.z_norm(&z0);
    let mut files = Vec::new();
    let f = out.join("control.csv");
    write_control_csv(&f, &r.signal)?;
    files.push(f);
    let f = out.join("summary.json");
    write_json(
        &f,
        &json!({
            "T": c.t,
            "O1": [c.o1.0, c.o1.1],
            "n_max": c.n_max,
            "reg": c.reg,
            "seed": seed,
            "initial_norm": z0n,
            "terminal_error": r.terminal_error,
            "relative_terminal_error": r.terminal_error / z0n,
            "control_energy": r.energy,
            "per_mode_energies": r.per_mode_energy,
        }),
    )?;
    files.push(f);
    Ok(files)
}

pub fn simulate_cmd(cfg: &RunConfig, p: &PhysicalParams, out: &Path, cli_seed: Option<u64>) -> Result<Vec<PathBuf>> {
    let c = &cfg.simulate;
    let seed = seed_for(cfg, c.seed, cli_seed);
    let z0 = match &c.initial {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{path}: {e}")))?;
            let v: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::validation("simulate.initial", e.to_string()))?;
            modal_from_json(&v).map_err(|e| e.in_section("simulate.initial"))?
        }
        None => ModalFrame::new(p, c.n_max)?.random_state(c.n_max, seed),
    };
    let nmax = z0.nmax();
    let frame = ModalFrame::new(p, nmax)?;
    let ctl = match c.control {
        ControlKind::None => None,
        ControlKind::Null => Some(assemble_control(&z0, c.t, &frame, maxns::control::DEFAULT_NT)?),
    };
    let signal = ctl.as_ref().map(|u| &u.signal);
    let tr: Trajectory = match c.method {
        Method::Modal => evolve_modal(&z0, signal, c.t, &frame, c.snapshots)?,
        Method::Fd => {
            let g0 = reconstruct(&z0, &frame, c.nx)?;
            let nt = if c.nt == 0 { min_steps(c.t, c.nx, p) } else { c.nt };
            fd_solve(&g0, signal, c.t, nt, p, FdOptions { n_snap: Some(c.snapshots), observer: None })?
        }
    };
    write_trajectory(&out.join("trajectory"), &tr, p, Some(&frame))
}

pub fn beam_cmd(cfg: &RunConfig, p: &PhysicalParams, out: &Path) -> Result<Vec<PathBuf>> {
    let c = &cfg.beam;
    let geom = Geometry { o1: c.o1, o2: c.o2, o3: c.o3 };
    let rows = beam_ladder(&c.k_ladder, c.x0, c.r, &geom, c.t, p)?;
    let f = out.join("beam.json");
    write_json(
        &f,
        &json!({
            "x0": c.x0, "r": c.r, "T": c.t,
            "O1": [c.o1.0, c.o1.1], "O2": [c.o2.0, c.o2.1], "O3": [c.o3.0, c.o3.1],
            "rows": rows,
        }),
    )?;
    Ok(vec![f])
}

pub fn ingham_cmd(cfg: &RunConfig, p: &PhysicalParams, out: &Path) -> Result<Vec<PathBuf>> {
    let c = &cfg.ingham;
    // only the spectra are needed, not the eigenfamilies
    let sp = spectrum(c.n_max, p)?;
    let fam = frequencies(c.m, c.n_max, &sp, p.c_wave, p.omega0, p.kappa)?;
    let mus = fam.mus();
    let eps: Vec<f64> = fam.entries.iter().map(|e| e.epsilon.abs()).collect();
    let min_eps = eps.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_eps = eps.iter().cloned().fold(0.0, f64::max);
    let mut rows = Vec::new();
    for &t in &c.t_list {
        let k = ingham_constants(&mus, t)?;
        rows.push(vec![
            fmt17(t),
            c.m.to_string(),
            c.n_max.to_string(),
            fmt17(k.c_low),
            fmt17(k.c_high),
            fmt17(fam.min_gap),
            fmt17(fam.gamma),
            fmt17(min_eps),
            fmt17(max_eps),
            fmt17(fam.max_abs_delta),
        ]);
    }
    let f = out.join("ingham.csv");
    write_csv(&f, &["T", "M", "n_max", "C_low", "C_high", "min_gap", "gamma", "min_abs_eps", "max_abs_eps", "max_abs_delta"], &rows)?;
    Ok(vec![f])
}
