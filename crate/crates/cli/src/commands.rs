//! One function per subcommand. Each writes its CSV files into the output
//! directory and returns the details recorded in meta.json.

use std::path::PathBuf;

use pathstitch::jn::{build_jn_table, jbar, JnMode};
use pathstitch::oracles::{
    caustics, crank_nicolson_evolve, error_epsilon, exact_rm_grid, exact_rm_propagator, RosenMorseSpectral,
};
use pathstitch::stitcher::{evolve_gaussian, run_stitch_with, StitchOptions};
use pathstitch::{PotentialSpec, SpatialLattice};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{linspace, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, CsvWriter};

pub struct Report {
    pub files: Vec<PathBuf>,
    pub details: Value,
}

fn options(cfg: &RunConfig, low_memory: bool) -> StitchOptions {
    StitchOptions { padding: cfg.padding, low_memory }
}

fn spectral(cfg: &RunConfig, command: &str) -> Result<RosenMorseSpectral, CliError> {
    match cfg.potential {
        PotentialSpec::RosenMorse { v0 } => Ok(RosenMorseSpectral::new(v0, cfg.physical.mass(), cfg.physical.hbar())?),
        _ => Err(CliError::Config(format!("potential.name: {command} requires rosen-morse"))),
    }
}

/// Lattice indices with x in [lo, hi].
fn window(lattice: &SpatialLattice, lo: f64, hi: f64) -> Vec<usize> {
    (0..lattice.points()).filter(|&j| (lo..=hi).contains(&lattice.x(j))).collect()
}

pub fn propagate(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = &cfg.physical;
    let (stack, diag) = run_stitch_with(p, &cfg.potential, &cfg.lattice, cfg.mode, &cfg.method, &options(cfg, false))?;
    let mut w = CsvWriter::create(&cfg.output, "propagator.csv", &["n", "t", "x1", "re_G", "im_G", "abs2_G"])?;
    let a = p.lattice_spacing();
    for n in 1..=p.slices() {
        let slice = stack.slice(n);
        for (j, z) in slice.values().iter().enumerate() {
            w.row(&[
                n.into(),
                (a * n as f64).into(),
                cfg.lattice.x(j).into(),
                z.re.into(),
                z.im.into(),
                z.norm_sqr().into(),
            ])?;
        }
    }
    Ok(Report { files: vec![w.finish()?], details: json!({ "diagnostics": diag }) })
}

pub fn field(cfg: &RunConfig) -> Result<Report, CliError> {
    let grid = cfg.field;
    let cols = window(&cfg.lattice, grid.x1_min, grid.x1_max);
    let mut w = CsvWriter::create(&cfg.output, "field.csv", &["x0", "x1", "re_G", "im_G", "abs2_G"])?;
    let mut edge = Vec::new();
    for x0 in grid.x0_values() {
        let p = cfg.physical.with_x0(x0)?;
        let (stack, diag) =
            run_stitch_with(&p, &cfg.potential, &cfg.lattice, cfg.mode, &cfg.method, &options(cfg, true))?;
        let last = stack.last();
        for &j in &cols {
            w.complex_row(&[x0, cfg.lattice.x(j)], last.values()[j])?;
        }
        edge.push(json!({ "x0": x0, "max_edge_ratio": diag.max_edge_ratio, "edge_leakage": diag.edge_leakage.len() }));
    }
    Ok(Report { files: vec![w.finish()?], details: json!({ "diagnostics": edge }) })
}

/// Exact Rosen-Morse propagator at time T, from physical.x0 over the whole
/// lattice, or over the field grid when `as_field` is set.
pub fn exact_rm(cfg: &RunConfig, as_field: bool) -> Result<Report, CliError> {
    let s = spectral(cfg, "exact-rm")?;
    let time = cfg.physical.total_time();
    let mut w = CsvWriter::create(&cfg.output, "exact.csv", &["x0", "x1", "re_G", "im_G", "abs2_G"])?;
    if as_field {
        let cols = window(&cfg.lattice, cfg.field.x1_min, cfg.field.x1_max);
        for x0 in cfg.field.x0_values() {
            let values = cols
                .par_iter()
                .map(|&j| exact_rm_propagator(cfg.lattice.x(j), x0, time, &s))
                .collect::<Result<Vec<_>, _>>()?;
            for (&j, z) in cols.iter().zip(values) {
                w.complex_row(&[x0, cfg.lattice.x(j)], z)?;
            }
        }
    } else {
        let x0 = cfg.physical.x0();
        let g = exact_rm_grid(&cfg.lattice, x0, time, &s)?;
        for (j, &z) in g.values().iter().enumerate() {
            w.complex_row(&[x0, cfg.lattice.x(j)], z)?;
        }
    }
    let details = json!({ "nu": [s.nu.re, s.nu.im], "above_threshold": s.above_threshold() });
    Ok(Report { files: vec![w.finish()?], details })
}

pub fn caustic_curves(cfg: &RunConfig) -> Result<Report, CliError> {
    let c = cfg.caustics;
    let p = &cfg.physical;
    let set = caustics(&cfg.potential, p, p.total_time(), c.x0, c.v0)?;
    let mut w = CsvWriter::create(&cfg.output, "caustics.csv", &["x0", "x1"])?;
    for &(x0, x1) in &set.caustic_points {
        w.row(&[x0.into(), x1.into()])?;
    }
    let mut files = vec![w.finish()?];
    if c.time_steps > 0 {
        let times: Vec<f64> = linspace(0.0, p.total_time(), c.time_steps + 1).into_iter().skip(1).collect();
        let sets =
            times.par_iter().map(|&t| caustics(&cfg.potential, p, t, c.x0, c.v0)).collect::<Result<Vec<_>, _>>()?;
        let mut w = CsvWriter::create(&cfg.output, "caustics_time.csv", &["t", "x0", "x1"])?;
        for (t, set) in times.iter().zip(&sets) {
            for &(x0, x1) in &set.caustic_points {
                w.row(&[(*t).into(), x0.into(), x1.into()])?;
            }
        }
        files.push(w.finish()?);
    }
    Ok(Report { files, details: json!({ "caustic_points": set.caustic_points.len() }) })
}

/// ε_N against the exact propagator for every size of the sweep.
pub fn converge(cfg: &RunConfig) -> Result<Report, CliError> {
    let s = spectral(cfg, "converge")?;
    let p = &cfg.physical;
    let sweep = &cfg.converge;
    let exact = exact_rm_grid(&cfg.lattice, p.x0(), p.total_time(), &s)?;
    let mode_for = |n: usize| match sweep.eikonal_from {
        Some(from) if n >= from => JnMode::Eikonal,
        _ => cfg.mode,
    };
    let rows = sweep
        .sizes
        .par_iter()
        .map(|&n| {
            let pn = p.with_slices(n)?;
            let (stack, _) =
                run_stitch_with(&pn, &cfg.potential, &cfg.lattice, mode_for(n), &cfg.method, &options(cfg, true))?;
            Ok((n, pn.lattice_spacing(), error_epsilon(stack.last(), &exact, sweep.a, sweep.b)?))
        })
        .collect::<Result<Vec<_>, pathstitch::Error>>()?;
    let mut w = CsvWriter::create(&cfg.output, "converge.csv", &["N", "a", "epsilon"])?;
    for &(n, a, eps) in &rows {
        w.row(&[n.into(), a.into(), eps.into()])?;
    }
    let modes: Vec<_> = sweep.sizes.iter().map(|&n| mode_for(n)).collect();
    Ok(Report { files: vec![w.finish()?], details: json!({ "max_abs_exact": exact.max_abs(), "modes": modes }) })
}

pub fn evolve(cfg: &RunConfig) -> Result<Report, CliError> {
    let state = cfg.state.packet.ok_or_else(|| CliError::Config("state.mu: required, finite".into()))?;
    let p = &cfg.physical;
    let (psi, leaks) = evolve_gaussian(p, &cfg.potential, &state, &cfg.lattice)?;
    let mut w = CsvWriter::create(&cfg.output, "evolve.csv", &["n", "t", "x", "re_psi", "im_psi", "abs2_psi"])?;
    let a = p.lattice_spacing();
    for (i, slice) in psi.iter().enumerate() {
        let n = i + 1;
        for (j, z) in slice.values().iter().enumerate() {
            w.row(&[
                n.into(),
                (a * n as f64).into(),
                cfg.lattice.x(j).into(),
                z.re.into(),
                z.im.into(),
                z.norm_sqr().into(),
            ])?;
        }
    }
    let last = psi.last().expect("N >= 2 slices");
    let mut files = vec![w.finish()?];
    let mut details = json!({ "norm_drift": (last.l2_norm() - 1.0).abs(), "edge_leakage": leaks });
    if let Some(steps) = cfg.state.crank_steps {
        let refine = cfg.state.crank_refine;
        let l = cfg.lattice;
        // Every `refine`-th point of the fine lattice is a point of the coarse one.
        let fine = SpatialLattice::new(l.x_min(), l.x_max(), l.points() * refine)?;
        let cn = crank_nicolson_evolve(&state.sample(&fine, p.hbar()), p, &cfg.potential, steps)?;
        let mut w = CsvWriter::create(&cfg.output, "crank.csv", &["x", "re_psi", "im_psi", "abs2_psi"])?;
        let mut diff = 0.0;
        for j in 0..l.points() {
            let z = cn.psi.values()[refine * j];
            diff += (z - last.values()[j]).norm_sqr();
            w.complex_row(&[l.x(j)], z)?;
        }
        files.push(w.finish()?);
        details["crank_nicolson"] =
            json!({ "steps": steps, "l2_difference": (diff * l.dx()).sqrt(), "norm_drift": cn.norm_drift });
    }
    Ok(Report { files, details })
}

pub fn dump_jn(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = &cfg.physical;
    let table = build_jn_table(p, &cfg.potential, &cfg.lattice, cfg.mode, &cfg.method)?;
    let mut w = CsvWriter::create(&cfg.output, "jn.csv", &["n", "q", "re_J", "im_J", "re_Jbar", "im_Jbar"])?;
    for n in 2..=p.slices() {
        let bar = jbar(n, &cfg.lattice, p, &cfg.potential);
        for (j, (z, b)) in table.get(n).values().iter().zip(bar.values()).enumerate() {
            let cells: [Cell; 6] =
                [n.into(), cfg.lattice.x(j).into(), z.re.into(), z.im.into(), b.re.into(), b.im.into()];
            w.row(&cells)?;
        }
    }
    Ok(Report { files: vec![w.finish()?], details: json!({}) })
}
