//! Benchmark runner for the MOF advection schemes.

pub mod config;
pub mod export;
pub mod kernels;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mof_core::advection::{decompose_velocity_3d, step, step_decomposed, AdvectionError, Scheme};
use mof_core::benchcases::{base_velocity, geometric_error, init_fractions, mass_error, BenchCase, BenchError};
use mof_core::fields::{Grid, MofState};
use thiserror::Error;

pub use config::{load_config, parse_config, RunConfig};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Advection(#[from] AdvectionError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Bench(_) => 2,
            RunError::Advection(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

pub const CSV_HEADER: &str =
    "case,scheme,N,CFL,E_g,E_m,steps,repair_count,runtime_total_s,runtime_advection_s";

/// A finished simulation of one case over its full period.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub grid: Grid,
    pub initial: MofState,
    pub final_state: MofState,
    /// States at t = T/2, present when snapshots were requested.
    pub half: Option<MofState>,
    pub steps: usize,
    pub repairs: usize,
    pub advection_seconds: f64,
    /// Decomposition amplification, EILE3D only.
    pub amplification: Option<f64>,
}

/// Step sizes covering [0, T]: full CFL steps with a shortened last one.
/// A still flow takes a single step.
pub fn time_steps(period: f64, rate: f64, cfl: f64) -> Vec<f64> {
    if rate <= 0.0 {
        return vec![period];
    }
    let dt = cfl / rate;
    let n = ((period / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let mut out = vec![dt; n];
    out[n - 1] = period - dt * (n - 1) as f64;
    out
}

/// Advect the case's initial shape over one period.
pub fn simulate(
    bench: &BenchCase,
    scheme: Scheme,
    n: usize,
    cfl: f64,
    depth: u32,
    keep_half: bool,
) -> Result<Outcome, RunError> {
    let grid = bench.grid(n)?;
    if !scheme.supports(grid.dim) {
        return Err(AdvectionError::Dimension {
            scheme,
            dim: grid.dim,
        }
        .into());
    }
    let initial = init_fractions(&bench.shape, &grid, depth);
    let base = base_velocity(&bench.flow, &grid);
    let dec = if scheme == Scheme::Eile3d {
        Some(decompose_velocity_3d(&grid, &base)?)
    } else {
        None
    };
    let dts = time_steps(bench.period, base.max_rate(&grid), cfl);

    let mut state = initial.clone();
    let mut half = None;
    let mut repairs = 0;
    let mut t = 0.0;
    let started = Instant::now();
    for (s, &dt) in dts.iter().enumerate() {
        let f = bench.time_factor(t + 0.5 * dt);
        repairs += match &dec {
            Some(d) => step_decomposed(&grid, &mut state, &d.scaled(f), dt, s + 1)?,
            None => step(&grid, &mut state, &base.scaled(f), dt, scheme, s + 1)?,
        };
        let before = t;
        t += dt;
        if keep_half && half.is_none() && before < 0.5 * bench.period && t >= 0.5 * bench.period {
            half = Some(state.clone());
        }
    }
    Ok(Outcome {
        grid,
        initial,
        final_state: state,
        half,
        steps: dts.len(),
        repairs,
        advection_seconds: started.elapsed().as_secs_f64(),
        amplification: dec.map(|d| d.amplification),
    })
}

/// One CSV row of results.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub case: String,
    pub scheme: Scheme,
    pub n: usize,
    pub cfl: f64,
    pub e_g: f64,
    pub e_m: f64,
    pub steps: usize,
    pub repair_count: usize,
    pub runtime_total_s: f64,
    pub runtime_advection_s: f64,
}

impl ErrorReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.16e},{:.16e},{:.16e},{},{},{:.16e},{:.16e}",
            self.case,
            self.scheme,
            self.n,
            self.cfl,
            self.e_g,
            self.e_m,
            self.steps,
            self.repair_count,
            self.runtime_total_s,
            self.runtime_advection_s
        )
    }
}

fn write_snapshot(cfg: &RunConfig, tag: &str, state: &MofState, grid: &Grid) -> Result<(), RunError> {
    // the stem holds the CFL's decimal point, so extensions are appended
    let file = |ext: &str| cfg.output.join(format!("{}_{tag}.{ext}", cfg.stem()));
    if cfg.emit_interfaces {
        let ext = if grid.dim == 2 { "txt" } else { "vtk" };
        export::export_interfaces(state, grid, &file(ext))?;
    }
    if cfg.emit_fields {
        export::export_fields(state, grid, &file("fields"))?;
    }
    Ok(())
}

/// Run one configuration, writing snapshots if asked. The CSV row is
/// returned, not written.
pub fn run(cfg: &RunConfig) -> Result<ErrorReport, RunError> {
    let started = Instant::now();
    let bench = cfg.bench_case()?;
    let snapshots = cfg.emit_interfaces || cfg.emit_fields;
    let out = simulate(&bench, cfg.scheme, cfg.n, cfg.cfl, cfg.depth, snapshots)?;
    let e_g = geometric_error(&out.final_state, &out.initial, &out.grid)?;
    let e_m = mass_error(&out.final_state, &out.initial, &out.grid)?;
    if snapshots {
        std::fs::create_dir_all(&cfg.output)?;
        write_snapshot(cfg, "t0", &out.initial, &out.grid)?;
        if let Some(h) = &out.half {
            write_snapshot(cfg, "thalf", h, &out.grid)?;
        }
        write_snapshot(cfg, "tT", &out.final_state, &out.grid)?;
    }
    Ok(ErrorReport {
        case: cfg.case.clone(),
        scheme: cfg.scheme,
        n: cfg.n,
        cfl: cfg.cfl,
        e_g,
        e_m,
        steps: out.steps,
        repair_count: out.repairs,
        runtime_total_s: started.elapsed().as_secs_f64(),
        runtime_advection_s: out.advection_seconds,
    })
}

/// Append rows to `<output>/results.csv`, writing the header on a new file.
pub fn append_rows(output: &Path, rows: &[ErrorReport]) -> Result<PathBuf, RunError> {
    std::fs::create_dir_all(output)?;
    let path = output.join("results.csv");
    let fresh = std::fs::metadata(&path).map(|m| m.len() == 0).unwrap_or(true);
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(&path)?;
    if fresh {
        writeln!(f, "{CSV_HEADER}")?;
    }
    for r in rows {
        writeln!(f, "{}", r.csv_row())?;
    }
    Ok(path)
}

/// Run every config expanded from one file and record the rows.
pub fn run_file(path: &Path, overrides: &[String]) -> Result<Vec<ErrorReport>, RunError> {
    let configs = load_config(path, overrides)?;
    let mut rows = Vec::new();
    for cfg in &configs {
        let r = run(cfg)?;
        append_rows(&cfg.output, std::slice::from_ref(&r))?;
        rows.push(r);
    }
    Ok(rows)
}

/// Run every `*.cfg` file in `dir`, in name order.
pub fn sweep(dir: &Path) -> Result<Vec<ErrorReport>, RunError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| RunError::Config(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cfg"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(RunError::Config(format!("no .cfg files in {}", dir.display())));
    }
    let mut rows = Vec::new();
    for f in &files {
        rows.extend(run_file(f, &[])?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_cover_the_period() {
        let dts = time_steps(1.0, 3.0, 0.5);
        assert_eq!(dts.len(), 6);
        assert!((dts.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(dts.iter().all(|&d| d <= 0.5 / 3.0 + 1e-15));
        let dts = time_steps(1.0, 4.0, 0.5);
        assert_eq!(dts.len(), 8);
        assert_eq!(time_steps(2.0, 0.0, 0.5), vec![2.0]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(RunError::Config("x".into()).exit_code(), 2);
        let e = RunError::Advection(AdvectionError::Cfl { axis: 0, courant: 2.0 });
        assert_eq!(e.exit_code(), 3);
    }
}
