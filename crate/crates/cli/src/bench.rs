//! Timing runs for the scaling claims: `O(n d μ ⌈log_μ k⌉)` for the
//! partitioner and `O(n k² d)` for the colorful partitioner.
//!
//! Each measurement repeats the call until at least [`MIN_SAMPLE`] has
//! elapsed and divides by the number of calls; the reported value is the
//! median of `reps` such measurements. The partitioner runs with the
//! linear-time diameter upper bound so that the quadratic exact diameter
//! does not dominate small inputs.

use std::time::{Duration, Instant};

use serde::Serialize;
use tverberg_core::colorful::{partition_colorful, ColorInstance};
use tverberg_core::geom::DiameterPolicy;
use tverberg_core::tverberg::{partition_general, PartitionOptions, SizeSpec};
use tverberg_core::PointSet;

use crate::gen::{self, Distribution};

pub const MIN_SAMPLE: Duration = Duration::from_millis(2);

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub size: usize,
    pub median_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub algo: String,
    /// The quantity varied: `n` for tverberg, `k` for colorful.
    pub variable: String,
    pub fixed: Vec<(String, usize)>,
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of `ln(time)` against `ln(size)`.
    pub exponent: f64,
}

fn time_call(reps: usize, mut f: impl FnMut()) -> f64 {
    let mut samples: Vec<f64> = (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            let mut calls = 0u32;
            while start.elapsed() < MIN_SAMPLE || calls == 0 {
                f();
                calls += 1;
            }
            start.elapsed().as_secs_f64() * 1e3 / calls as f64
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    samples[samples.len() / 2]
}

pub fn fit_exponent(rows: &[BenchRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.median_ms > 0.0)
        .map(|r| ((r.size as f64).ln(), r.median_ms.ln()))
        .collect();
    let m = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn bench_tverberg(n_grid: &[usize], k: usize, d: usize, reps: usize, seed: u64) -> anyhow::Result<BenchReport> {
    let options = PartitionOptions {
        diameter: DiameterPolicy { exact_limit: 0 },
        ..Default::default()
    };
    let mut rows = Vec::new();
    for &n in n_grid {
        let k = k.min(n);
        let set = PointSet::from_rows(&gen::points(Distribution::Uniform, n, d, seed))?;
        let sizes = SizeSpec::nearly_balanced(n, k)?;
        let median_ms = time_call(reps, || {
            std::hint::black_box(partition_general(&set, &sizes, &options).expect("valid sizes"));
        });
        rows.push(BenchRow { size: n, median_ms });
    }
    Ok(BenchReport {
        algo: "tverberg".into(),
        variable: "n".into(),
        fixed: vec![("k".into(), k), ("d".into(), d)],
        exponent: fit_exponent(&rows),
        rows,
    })
}

pub fn bench_colorful(k_grid: &[usize], n: usize, d: usize, reps: usize, seed: u64) -> anyhow::Result<BenchReport> {
    let mut rows = Vec::new();
    for &k in k_grid {
        let classes = gen::classes(Distribution::Uniform, n, k, d, seed)
            .iter()
            .map(|c| PointSet::from_rows(c))
            .collect::<Result<Vec<_>, _>>()?;
        let inst = ColorInstance::new(classes)?;
        let policy = DiameterPolicy::default();
        let median_ms = time_call(reps, || {
            std::hint::black_box(partition_colorful(&inst, &policy).expect("valid instance"));
        });
        rows.push(BenchRow { size: k, median_ms });
    }
    Ok(BenchReport {
        algo: "colorful".into(),
        variable: "k".into(),
        fixed: vec![("n".into(), n), ("d".into(), d)],
        exponent: fit_exponent(&rows),
        rows,
    })
}

impl std::fmt::Display for BenchReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let fixed: Vec<String> = self.fixed.iter().map(|(a, b)| format!("{a}={b}")).collect();
        writeln!(f, "algo {} {}", self.algo, fixed.join(" "))?;
        writeln!(f, "{:>10} {:>14}", self.variable, "median_ms")?;
        for r in &self.rows {
            writeln!(f, "{:>10} {:>14.6}", r.size, r.median_ms)?;
        }
        writeln!(f, "fitted exponent {:.3}", self.exponent)
    }
}
