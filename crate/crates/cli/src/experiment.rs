//! Monte-Carlo logical-error experiments: independent seeded trials run in
//! parallel, per-class failure counts with Wilson confidence intervals, CSV
//! output.

use rayon::prelude::*;

use tqc_core::lattice::{Axis, CellClass};
use tqc_core::noise::{reduce_to_z, sample_errors};
use tqc_core::pipeline::{decode_batch, decode_stream, verify, PipelineError};
use tqc_core::syndrome::DetectorSheet;

use crate::config::{ConfigError, DecodeMode, ExperimentConfig};

#[derive(Debug)]
pub enum ExperimentError {
    Config(ConfigError),
    Pipeline(PipelineError),
}

impl std::fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExperimentError::Config(e) => write!(f, "{e}"),
            ExperimentError::Pipeline(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ExperimentError {}

impl From<ConfigError> for ExperimentError {
    fn from(e: ConfigError) -> Self {
        ExperimentError::Config(e)
    }
}

impl From<PipelineError> for ExperimentError {
    fn from(e: PipelineError) -> Self {
        ExperimentError::Pipeline(e)
    }
}

impl From<tqc_core::LatticeError> for ExperimentError {
    fn from(e: tqc_core::LatticeError) -> Self {
        ExperimentError::Pipeline(PipelineError::Lattice(e))
    }
}

/// Per-class tally over all trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassTally {
    pub trials: u64,
    pub residual_failures: u64,
    pub logical_failures: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExperimentSummary {
    pub primal: ClassTally,
    pub dual: ClassTally,
}

/// 95% Wilson score interval for `k` successes in `n` draws.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64; // two-sided 95%
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let margin = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (((center - margin) / denom).max(0.0), ((center + margin) / denom).min(1.0))
}

/// SplitMix64: decorrelates per-trial seeds from the master seed so trial
/// order and thread assignment cannot matter.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut z = master ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn run_one_trial(cfg: &ExperimentConfig, trial: u64) -> Result<(bool, bool, bool, bool), ExperimentError> {
    let dims = cfg.dims()?;
    let channel = cfg.noise()?;
    let seed = trial_seed(cfg.seed, trial);
    let pattern = sample_errors(dims, &channel, seed)
        .map_err(|_| ConfigError::InvalidField("invalid noise channel"))?;
    let (pz, dz) = reduce_to_z(&pattern, dims);

    let (pcorr, dcorr) = match cfg.mode {
        DecodeMode::Batch => {
            let out = decode_batch(&pattern, dims)?;
            (out.primal, out.dual)
        }
        DecodeMode::Stream => {
            // Feed the reduced errors through the streaming path as raw
            // indicator sheets (the volume is finite, t stays absolute).
            let tmax = dims.extent(Axis::T);
            let quiet_tail = 2 * cfg.window.window_sheets as i64 + 4;
            let sheets: Vec<DetectorSheet> = (0..tmax + quiet_tail)
                .map(|t| {
                    let mut s = DetectorSheet::for_dims(dims, t);
                    for &q in pz.iter().chain(dz.iter()) {
                        if q.t == t {
                            s.toggle(q.x, q.y);
                        }
                    }
                    s
                })
                .collect();
            let p = decode_stream(sheets.iter().cloned(), dims, CellClass::Primal, cfg.window)?;
            let d = decode_stream(sheets.into_iter(), dims, CellClass::Dual, cfg.window)?;
            // Stream t is absolute; flips near the trailing edge may match
            // into the virtual layer just past the volume. Fold those
            // corrections back into the periodic volume before verifying.
            let fold = |corr: tqc_core::pipeline::CorrectionSet| {
                let mut folded = tqc_core::pipeline::CorrectionSet::new();
                for &q in &corr.qubits {
                    folded.toggle(dims.canon_qubit(q));
                }
                folded
            };
            (fold(p), fold(d))
        }
    };

    let prep = verify(&pz, &pcorr, CellClass::Primal, dims)?;
    let drep = verify(&dz, &dcorr, CellClass::Dual, dims)?;
    Ok((
        !prep.residual_syndrome_empty,
        prep.logical_failure(),
        !drep.residual_syndrome_empty,
        drep.logical_failure(),
    ))
}

/// Run all trials in parallel. Aggregation is a commutative sum of counts,
/// so the summary is identical regardless of thread count or scheduling.
pub fn run_logical_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary, ExperimentError> {
    cfg.validate()?;
    let counts = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_one_trial(cfg, trial).map(|(pr, pl, dr, dl)| {
            [pr as u64, pl as u64, dr as u64, dl as u64]
        }))
        .try_reduce(
            || [0u64; 4],
            |a, b| Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]),
        )?;
    Ok(ExperimentSummary {
        primal: ClassTally {
            trials: cfg.trials,
            residual_failures: counts[0],
            logical_failures: counts[1],
        },
        dual: ClassTally {
            trials: cfg.trials,
            residual_failures: counts[2],
            logical_failures: counts[3],
        },
    })
}

/// CSV schema: class,trials,residual_failures,logical_failures,logical_rate,
/// wilson_low,wilson_high — one row per class, primal first.
pub fn summary_csv(s: &ExperimentSummary) -> String {
    let mut out = String::from(
        "class,trials,residual_failures,logical_failures,logical_rate,wilson_low,wilson_high\n",
    );
    for (name, t) in [("primal", s.primal), ("dual", s.dual)] {
        let (lo, hi) = wilson_interval(t.logical_failures, t.trials);
        let rate = t.logical_failures as f64 / t.trials as f64;
        out.push_str(&format!(
            "{name},{},{},{},{rate},{lo},{hi}\n",
            t.trials, t.residual_failures, t.logical_failures
        ));
    }
    out
}
