//! Timing of the analytic cut kernels against polyhedron clipping.

use std::fmt::Write as _;
use std::hint::black_box;
use std::time::Instant;

use mof_core::geometry::{cut_centroid, cut_volume, oracle_clip, CutSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::RunError;

pub const MIN_SAMPLES: usize = 100_000;

/// Random plane/cell pairs; alpha spans the whole cell.
pub fn workload(samples: usize, seed: u64) -> Vec<CutSpec<3>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let m: [f64; 3] = loop {
                let m = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                if m.iter().map(|v| v * v).sum::<f64>() > 1e-6 {
                    break m;
                }
            };
            let dx: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.25..2.0));
            let lo: f64 = (0..3).map(|a| (m[a] * dx[a]).min(0.0)).sum();
            let hi: f64 = (0..3).map(|a| (m[a] * dx[a]).max(0.0)).sum();
            CutSpec {
                m,
                dx,
                alpha: rng.gen_range(lo..=hi),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelTiming {
    pub samples: usize,
    pub seed: u64,
    pub analytic_ns: f64,
    pub oracle_ns: f64,
}

impl KernelTiming {
    pub fn speedup(&self) -> f64 {
        self.oracle_ns / self.analytic_ns
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("kernel,samples,seed,ns_per_op,speedup\n");
        let _ = writeln!(
            s,
            "analytic,{},{},{:.16e},{:.16e}",
            self.samples,
            self.seed,
            self.analytic_ns,
            self.speedup()
        );
        let _ = writeln!(
            s,
            "oracle_clip,{},{},{:.16e},{:.16e}",
            self.samples, self.seed, self.oracle_ns, 1.0
        );
        s
    }
}

pub fn bench_kernels(samples: usize, seed: u64) -> Result<KernelTiming, RunError> {
    if samples < MIN_SAMPLES {
        return Err(RunError::Config(format!(
            "sample count must be at least {MIN_SAMPLES}, got {samples}"
        )));
    }
    let work = workload(samples, seed);

    let t = Instant::now();
    for spec in &work {
        black_box(cut_volume(black_box(spec)));
        let _ = black_box(cut_centroid(black_box(spec)));
    }
    let analytic = t.elapsed().as_secs_f64();

    let t = Instant::now();
    for spec in &work {
        let p = oracle_clip(black_box(spec.dx), black_box(spec.m), black_box(spec.alpha));
        black_box(p.volume());
        black_box(p.centroid());
    }
    let oracle = t.elapsed().as_secs_f64();

    let per = |s: f64| s * 1e9 / samples as f64;
    Ok(KernelTiming {
        samples,
        seed,
        analytic_ns: per(analytic),
        oracle_ns: per(oracle),
    })
}
