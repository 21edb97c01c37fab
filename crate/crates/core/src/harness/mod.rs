//! Seeded experiment orchestration, verification suites and figure data.
//!
//! Every random quantity in a sweep is derived from the master seed and the
//! trial index via [`derive_seed`], so records do not depend on thread count
//! or scheduling.

pub mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::gap_curves;
use crate::codebook::{count_good_codewords, nullity_cap};
use crate::encoder::{encode_local_search, encode_optimal};
use crate::ensembles::{CompoundCode, EnsembleSpec};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::seed::{derive_seed, seeded};
use crate::stats::{mean_interval, wilson_interval, Interval, MeanEstimate, Z99};

pub use verify::{
    exact_conditional_probability, expected_good_lower_bound, run_suite, success_floor, verify_expected_good,
    verify_flip_frequency, verify_success_floor, FlipFrequencyReport, SuccessFloorReport, Suite, SuiteReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EncoderChoice {
    Optimal,
    LocalSearch { restarts: usize, max_iters: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec: EnsembleSpec,
    pub target_distortion: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub encoder: EncoderChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Spec(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.trials == 0 {
            return Err(Error::Spec("trials must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.target_distortion) {
            return Err(Error::OutOfRange {
                value: self.target_distortion,
                domain: "[0, 1]",
            });
        }
        if self.encoder == EncoderChoice::Optimal {
            let nullity = self.spec.m - self.spec.k;
            if nullity > nullity_cap() {
                return Err(Error::EnumerationInfeasible {
                    nullity,
                    cap: nullity_cap(),
                });
            }
        }
        Ok(())
    }
}

/// Seeds of one trial: code, source and encoder randomness.
pub fn trial_seeds(master_seed: u64, trial_index: u64) -> (u64, u64, u64) {
    let trial = derive_seed(master_seed, trial_index);
    (derive_seed(trial, 0), derive_seed(trial, 1), derive_seed(trial, 2))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub code_seed: u64,
    pub source_seed: u64,
    pub source_hex: String,
    pub distance: usize,
    pub achieved_distortion: f64,
    /// Present when the codebook could be enumerated.
    pub good_codeword_count: Option<u64>,
    /// Seconds; kept out of the CSV so that output is reproducible.
    pub wall_time: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub trials: usize,
    pub target_distortion: f64,
    pub distortion: MeanEstimate,
    pub successes: usize,
    pub success_fraction: f64,
    pub success_interval: Interval,
    pub good_codewords: Option<MeanEstimate>,
    pub wall_time: f64,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: SweepSummary,
}

/// Runs one trial: sample the code and a uniform source, encode, count.
pub fn run_trial(config: &ExperimentConfig, trial_index: u64) -> Result<TrialRecord> {
    let start = Instant::now();
    let (code_seed, source_seed, encoder_seed) = trial_seeds(config.master_seed, trial_index);
    let code = CompoundCode::sample(config.spec, code_seed)?;
    let source = BitVector::random(config.spec.n, &mut seeded(source_seed));
    let result = match config.encoder {
        EncoderChoice::Optimal => encode_optimal(&code, &source)?,
        EncoderChoice::LocalSearch { restarts, max_iters } => {
            encode_local_search(&code, &source, restarts, max_iters, &mut seeded(encoder_seed))?
        }
    };
    let good_codeword_count = if code.nullity() <= nullity_cap() {
        Some(count_good_codewords(&code, &source, config.target_distortion)?.count)
    } else {
        None
    };
    Ok(TrialRecord {
        trial_index,
        code_seed,
        source_seed,
        source_hex: source.to_hex(),
        distance: result.distance,
        achieved_distortion: result.distortion,
        good_codeword_count,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Runs all trials on up to `jobs` threads (all cores when `None`) and
/// summarizes them in trial order.
pub fn run_quantization_sweep(config: &ExperimentConfig, jobs: Option<usize>) -> Result<SweepOutcome> {
    config.validate()?;
    let start = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    let records = pool.install(|| {
        (0..config.trials as u64)
            .into_par_iter()
            .map(|t| run_trial(config, t))
            .collect::<Result<Vec<_>>>()
    })?;
    let summary = summarize(config, &records, start.elapsed().as_secs_f64());
    Ok(SweepOutcome { records, summary })
}

fn summarize(config: &ExperimentConfig, records: &[TrialRecord], wall_time: f64) -> SweepSummary {
    let distortions: Vec<f64> = records.iter().map(|r| r.achieved_distortion).collect();
    let successes = distortions.iter().filter(|&&d| d <= config.target_distortion).count();
    let counts: Option<Vec<f64>> = records
        .iter()
        .map(|r| r.good_codeword_count.map(|c| c as f64))
        .collect();
    SweepSummary {
        trials: records.len(),
        target_distortion: config.target_distortion,
        distortion: mean_interval(&distortions, Z99),
        successes,
        success_fraction: successes as f64 / records.len() as f64,
        success_interval: wilson_interval(successes, records.len(), Z99),
        good_codewords: counts.map(|c| mean_interval(&c, Z99)),
        wall_time,
    }
}

/// Decimal rendering rounded to 12 significant digits.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("round trip of a formatted float");
    rounded.to_string()
}

pub const TRIAL_CSV_HEADER: [&str; 7] = [
    "trial_index",
    "code_seed",
    "source_seed",
    "source_hex",
    "distance",
    "achieved_distortion",
    "good_codeword_count",
];

pub fn write_trials_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Numeric(format!("csv: {e}"));
    w.write_record(TRIAL_CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.trial_index.to_string(),
            r.code_seed.to_string(),
            r.source_seed.to_string(),
            r.source_hex.clone(),
            r.distance.to_string(),
            format_float(r.achieved_distortion),
            r.good_codeword_count.map(|c| c.to_string()).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Numeric(format!("csv: {e}")))?;
    Ok(())
}

/// Writes `trials.csv` and `summary.json` into `dir`, returning their paths.
pub fn write_sweep(outcome: &SweepOutcome, config: &ExperimentConfig, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join("trials.csv");
    let file = fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    write_trials_csv(&outcome.records, std::io::BufWriter::new(file))?;
    let json_path = dir.join("summary.json");
    let json = serde_json::json!({ "config": config, "summary": outcome.summary });
    let text = serde_json::to_string_pretty(&json).expect("summary serializes");
    fs::write(&json_path, text + "\n").map_err(|e| Error::io(&json_path, e))?;
    Ok((csv_path, json_path))
}

pub const GAP_CSV_HEADER: &str = "omega,kl_bound,weight_exponent,excess_integrand";

/// Gap-figure curves as CSV text.
pub fn gap_figure_csv(distortion: f64, d: usize, lambda: usize, gamma: usize, grid: usize) -> Result<String> {
    let curves = gap_curves(distortion, d, lambda, gamma, grid)?;
    let mut out = String::from(GAP_CSV_HEADER);
    out.push('\n');
    for (i, w) in curves.kl_bound.omega_grid.iter().enumerate() {
        let row = [
            *w,
            curves.kl_bound.values[i],
            curves.weight_exponent.values[i],
            curves.excess_integrand.values[i],
        ];
        out.push_str(&row.map(format_float).join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn emit_gap_figure(
    distortion: f64,
    d: usize,
    lambda: usize,
    gamma: usize,
    grid: usize,
    output_path: &Path,
) -> Result<()> {
    let text = gap_figure_csv(distortion, d, lambda, gamma, grid)?;
    fs::write(output_path, text).map_err(|e| Error::io(output_path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::critical_weight;

    fn config(trials: usize, target: f64) -> ExperimentConfig {
        ExperimentConfig {
            spec: EnsembleSpec::new(12, 12, 6, 4, 4, 8).unwrap(),
            target_distortion: target,
            trials,
            master_seed: 42,
            encoder: EncoderChoice::Optimal,
            output_path: None,
        }
    }

    #[test]
    fn format_float_examples() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(0.25), "0.25");
        assert_eq!(format_float(0.1 + 0.2), "0.3");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(format_float(123_456_789.123_456_79), "123456789.123");
        assert_eq!(format_float(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
            target_distortion = 0.25
            trials = 10
            master_seed = 7
            output_path = "out"

            [spec]
            n = 12
            m = 12
            k = 6
            d = 4
            lambda = 4
            gamma = 8

            [encoder]
            kind = "local_search"
            restarts = 8
            max_iters = 100
        "#;
        let c = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(
            c.encoder,
            EncoderChoice::LocalSearch {
                restarts: 8,
                max_iters: 100
            }
        );
        assert_eq!(ExperimentConfig::from_toml_str(&c.to_toml_string()).unwrap(), c);
    }

    #[test]
    fn invalid_configs_rejected_before_running() {
        assert!(run_quantization_sweep(&config(0, 0.2), None).is_err());
        assert!(run_quantization_sweep(&config(1, 1.5), None).is_err());
        let mut big = config(1, 0.2);
        big.spec = EnsembleSpec::ldgm(80, 60, 4).unwrap();
        assert!(matches!(
            run_quantization_sweep(&big, None),
            Err(Error::EnumerationInfeasible { .. })
        ));
        assert!(ExperimentConfig::from_toml_str("trials = 3").is_err());
    }

    #[test]
    fn single_trial_is_reproducible() {
        let a = run_quantization_sweep(&config(1, 0.2), Some(1)).unwrap();
        let b = run_quantization_sweep(&config(1, 0.2), Some(3)).unwrap();
        let strip = |r: &TrialRecord| TrialRecord {
            wall_time: 0.0,
            ..r.clone()
        };
        assert_eq!(strip(&a.records[0]), strip(&b.records[0]));
    }

    #[test]
    fn records_do_not_depend_on_job_count() {
        let mut bytes = Vec::new();
        for jobs in [1, 4] {
            let out = run_quantization_sweep(&config(40, 0.2), Some(jobs)).unwrap();
            let mut buf = Vec::new();
            write_trials_csv(&out.records, &mut buf).unwrap();
            bytes.push(buf);
        }
        assert_eq!(bytes[0], bytes[1]);
    }

    #[test]
    fn full_target_always_succeeds() {
        let out = run_quantization_sweep(&config(20, 1.0), None).unwrap();
        assert_eq!(out.summary.success_fraction, 1.0);
    }

    #[test]
    fn records_replay_from_seeds() {
        let cfg = config(10, 0.25);
        let out = run_quantization_sweep(&cfg, None).unwrap();
        for r in &out.records {
            let code = CompoundCode::sample(cfg.spec, r.code_seed).unwrap();
            let s = BitVector::from_hex(&r.source_hex, cfg.spec.n).unwrap();
            assert_eq!(s, BitVector::random(12, &mut seeded(r.source_seed)));
            assert_eq!(encode_optimal(&code, &s).unwrap().distortion, r.achieved_distortion);
            assert!((0.0..=1.0).contains(&r.achieved_distortion));
            let good = r.good_codeword_count.unwrap();
            assert_eq!(good > 0, r.achieved_distortion <= 0.25);
        }
    }

    #[test]
    fn local_search_sweep_runs() {
        let mut cfg = config(8, 0.25);
        cfg.encoder = EncoderChoice::LocalSearch {
            restarts: 4,
            max_iters: 50,
        };
        let out = run_quantization_sweep(&cfg, Some(2)).unwrap();
        let opt = run_quantization_sweep(&config(8, 0.25), Some(2)).unwrap();
        for (a, b) in out.records.iter().zip(&opt.records) {
            assert!(a.distance >= b.distance);
        }
    }

    #[test]
    fn gap_figure_columns() {
        let csv = gap_figure_csv(0.11, 4, 4, 8, 501).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(GAP_CSV_HEADER));
        let rows: Vec<Vec<f64>> = lines
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 501);
        let w_star = critical_weight(0.11, 4);
        for r in &rows {
            if r[0] < w_star - 1e-3 {
                assert_eq!(r[1], 0.0);
            }
            if r[0] > w_star + 1e-3 {
                assert!(r[1] < 0.0);
            }
            assert!(r[3] <= 1e-3, "{r:?}");
        }
        let last = rows.last().unwrap();
        assert_eq!(last[0], 0.5);
        assert!((last[2] - 0.5).abs() < 1e-9);
        assert!(gap_figure_csv(0.11, 3, 4, 8, 10).is_err());
    }

    #[test]
    fn gap_figure_unwritable_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("fig.csv");
        assert!(matches!(
            emit_gap_figure(0.11, 4, 4, 8, 11, &path),
            Err(Error::Io { .. })
        ));
    }
}
