//! Throughput study: decode time as a function of cross-section size, one
//! curve per physical error rate. Volumes are generated up front; timing
//! covers graph building, matching and output processing only.

use std::time::Instant;

use tqc_core::lattice::{CellClass, LatticeDims};
use tqc_core::matching::{build_graph, mwpm};
use tqc_core::noise::{reduce_to_z, sample_errors, NoiseChannel};
use tqc_core::pipeline::corrections_from_matching;
use tqc_core::syndrome::{syndrome_from_errors, SyndromeSet};

use crate::experiment::trial_seed;

/// One row of the bench CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRecord {
    /// Face qubits per 2D cross-section (both classes): 3·lx·ly.
    pub qubit_count: u64,
    pub p: f64,
    /// Median wall time to decode one volume, seconds.
    pub wall_time: f64,
    pub flips_matched: u64,
    pub total_weight: u64,
}

/// CSV schema used by `tqc bench`.
pub const BENCH_CSV_HEADER: &str = "qubit_count,p,median_seconds,flips_matched,total_weight";

pub fn bench_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(BENCH_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.qubit_count, r.p, r.wall_time, r.flips_matched, r.total_weight
        ));
    }
    out
}

/// Qubits per cross-section of an lx×ly periodic lattice (both classes).
pub fn cross_section_qubits(lx: u32, ly: u32) -> u64 {
    3 * lx as u64 * ly as u64
}

fn decode_once(volumes: &[(SyndromeSet, LatticeDims)]) -> (u64, u64) {
    let mut flips = 0;
    let mut weight = 0;
    for (syn, dims) in volumes {
        let g = build_graph(syn.flips.iter().copied(), syn.class, *dims);
        let m = mwpm(&g).expect("even flip count on periodic lattices");
        let corr = corrections_from_matching(&m, &g, *dims);
        std::hint::black_box(corr);
        flips += syn.len() as u64;
        weight += m.total_weight;
    }
    (flips, weight)
}

/// Benchmark one sweep point: lattice lx=ly=l, depth lt, pure-Z noise at p.
/// Reports the median of `repeats` timed decodes; if a decode finishes in
/// under ~1 ms the run is auto-batched over several pre-generated volumes
/// to amortize timer resolution.
pub fn bench_point(l: u32, lt: u32, p: f64, repeats: usize, seed: u64) -> BenchRecord {
    let dims = LatticeDims::periodic(l, l, lt).unwrap();
    let channel = NoiseChannel::pure_z(p).unwrap();

    let make_volumes = |count: usize, salt: u64| -> Vec<(SyndromeSet, LatticeDims)> {
        (0..count)
            .flat_map(|i| {
                let pat =
                    sample_errors(dims, &channel, trial_seed(seed, salt + i as u64)).unwrap();
                let (pz, dz) = reduce_to_z(&pat, dims);
                [
                    (syndrome_from_errors(&pz, dims, CellClass::Primal).unwrap(), dims),
                    (syndrome_from_errors(&dz, dims, CellClass::Dual).unwrap(), dims),
                ]
            })
            .collect()
    };

    // Calibrate: batch enough volumes that one timed run exceeds ~1 ms.
    let mut batch = 1usize;
    loop {
        let volumes = make_volumes(batch, 0);
        let start = Instant::now();
        decode_once(&volumes);
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed >= 1e-3 || batch >= 4096 {
            break;
        }
        batch = (batch * 4).min(4096);
    }

    let mut times = Vec::with_capacity(repeats);
    let mut flips = 0;
    let mut weight = 0;
    for r in 0..repeats {
        let volumes = make_volumes(batch, (r as u64 + 1) << 32);
        let start = Instant::now();
        let (f, w) = decode_once(&volumes);
        times.push(start.elapsed().as_secs_f64() / batch as f64);
        if r == 0 {
            flips = f / batch as u64;
            weight = w / batch as u64;
        }
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    BenchRecord {
        qubit_count: cross_section_qubits(l, l),
        p,
        wall_time: times[times.len() / 2].max(f64::MIN_POSITIVE),
        flips_matched: flips,
        total_weight: weight,
    }
}

/// Full sweep: the cartesian product of cross-section sizes and error rates,
/// sizes ascending within each p. Single-threaded by design: timing runs
/// must not contend with each other.
pub fn run_throughput_bench(
    sizes: &[u32],
    lt: u32,
    ps: &[f64],
    repeats: usize,
    seed: u64,
) -> Vec<BenchRecord> {
    let mut out = Vec::new();
    for &p in ps {
        for &l in sizes {
            out.push(bench_point(l, lt, p, repeats, seed));
        }
    }
    out
}

/// Least-squares slope of log(time) against log(qubit_count).
pub fn log_log_slope(records: &[BenchRecord]) -> f64 {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .map(|r| ((r.qubit_count as f64).ln(), r.wall_time.ln()))
        .collect();
    let n = pts.len() as f64;
    let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (sxx, sxy): (f64, f64) =
        pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x * x, b + x * y));
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
