//! Acceptance criteria, run in order with one PASS/FAIL line each.
//!
//! Built with `harness = false`; the process exits nonzero if any
//! criterion fails or overruns its time budget.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use ldq::bounds::{
    binary_entropy, critical_weight, degree_check, excess_rate_exponent, min_distance_ratio, rd_distortion,
    weight_enum_exact, weight_enum_exponent, DegreeTriple, WeightEnumerator,
};
use ldq::codebook::second_moment_identity;
use ldq::ensembles::EnsembleSpec;
use ldq::harness::verify::{conditional_dominance, exact_suite_codes, verify_expected_good, EXACT_SUITE_DISTORTIONS};
use ldq::harness::{
    run_quantization_sweep, verify_flip_frequency, verify_success_floor, EncoderChoice, ExperimentConfig,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c1_rate_distortion_anchor() -> Outcome {
    let d = rd_distortion(0.5);
    let h = binary_entropy(0.11).map_err(|e| e.to_string())?;
    ensure(
        (d - 0.11).abs() <= 5e-4 && (h - 0.5).abs() <= 5e-4,
        format!("rd_distortion(0.5) = {d:.6}, h(0.11) = {h:.6}"),
    )
}

fn c2_headline_gap() -> Outcome {
    let exponent = excess_rate_exponent(0.11, 4, 4, 8, 2000).map_err(|e| e.to_string())?;
    let triple = DegreeTriple::new(4, 4, 8).map_err(|e| e.to_string())?;
    let check = degree_check(0.5, 0.11, triple).map_err(|e| e.to_string())?;
    ensure(
        exponent <= 1e-3 && check.feasible,
        format!("exponent = {exponent:.3e}, feasible = {}", check.feasible),
    )
}

fn c3_flip_frequency() -> Outcome {
    let r = verify_flip_frequency(1000, 4, 0.25, 100_000, 3).map_err(|e| e.to_string())?;
    ensure(
        r.passed && r.predicted == 0.46875,
        format!(
            "empirical {:.5} vs {}, z = {:.2}",
            r.empirical_freq, r.predicted, r.z_score
        ),
    )
}

fn c4_second_moment_identity() -> Outcome {
    let codes = exact_suite_codes(4, 20).map_err(|e| e.to_string())?;
    let mut failures = 0;
    for (_, code) in &codes {
        for dist in EXACT_SUITE_DISTORTIONS {
            let sm = second_moment_identity(code, dist).map_err(|e| e.to_string())?;
            failures += usize::from(sm.lhs != sm.rhs);
        }
    }
    ensure(
        failures == 0,
        format!("{} code/distortion pairs, {failures} mismatches", codes.len() * 3),
    )
}

fn c5_shepp() -> Outcome {
    let codes = exact_suite_codes(4, 20).map_err(|e| e.to_string())?;
    let mut failures = 0;
    let mut tightest = f64::INFINITY;
    for (_, code) in &codes {
        for dist in EXACT_SUITE_DISTORTIONS {
            let sm = second_moment_identity(code, dist).map_err(|e| e.to_string())?;
            failures += usize::from(!sm.shepp_holds());
            let gap = (&sm.pr_positive - sm.shepp_lower_bound()).to_f64().unwrap_or(f64::NAN);
            tightest = tightest.min(gap);
        }
    }
    ensure(
        failures == 0,
        format!("{failures} violations, smallest slack {tightest:.4}"),
    )
}

fn c6_expected_good() -> Outcome {
    let spec = EnsembleSpec::new(16, 16, 8, 4, 4, 8).map_err(|e| e.to_string())?;
    let r = verify_expected_good(spec, 0.2, 10_000, 6).map_err(|e| e.to_string())?;
    ensure(
        r.passed,
        format!(
            "E[N] = {:.3}, 99% lower {:.3} vs bound {:.4}",
            r.estimate.mean, r.estimate.interval.lower, r.bound
        ),
    )
}

fn c7_conditional_dominance() -> Outcome {
    let mut worst = 0.0f64;
    let mut violations = 0;
    for dist in [0.11, 0.2] {
        for p in conditional_dominance(20, dist, 4, 50) {
            violations += usize::from(!p.holds);
            if p.bound > 0.0 {
                worst = worst.max(p.exact / p.bound);
            }
        }
    }
    ensure(
        violations == 0,
        format!("{violations} violations, max exact/bound = {worst:.4}"),
    )
}

/// `[x^{2t}] g(x)^k` for `g = ((1+x)^γ + (1−x)^γ)/2`, by repeated
/// polynomial multiplication.
fn even_coefficient(k: usize, gamma: usize, power: usize) -> BigInt {
    let mut g = vec![BigInt::from(0); gamma + 1];
    let mut binom = BigInt::from(1);
    for (j, slot) in g.iter_mut().enumerate() {
        if j % 2 == 0 {
            *slot = binom.clone();
        }
        binom = binom * (gamma - j) / (j + 1);
    }
    let mut acc = vec![BigInt::from(1)];
    for _ in 0..k {
        let mut next = vec![BigInt::from(0); acc.len() + gamma];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in g.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    acc.get(power).cloned().unwrap_or_default()
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
}

fn c8_weight_enumerator() -> Outcome {
    let exact = weight_enum_exact(8, 2, 2, 4).map_err(|e| e.to_string())?;
    let (m, w, lambda, gamma) = (8, 2, 2, 4);
    let oracle = BigRational::new(
        binomial(m, w) * even_coefficient(m * lambda / gamma, gamma, w * lambda),
        binomial(m * lambda, w * lambda),
    );
    let target = BigRational::new(44.into(), 13.into());
    let half = weight_enum_exponent(0.5, 4, 8).map_err(|e| e.to_string())?;
    let en = WeightEnumerator::new(128, 4, 8).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for omega in [0.1, 0.3, 0.5] {
        let wt = (omega * 128.0f64).round() as usize;
        let finite = en.log2_expected(wt) / 128.0;
        let asym = weight_enum_exponent(wt as f64 / 128.0, 4, 8).map_err(|e| e.to_string())?;
        worst = worst.max((finite - asym).abs());
    }
    ensure(
        exact == target && oracle == target && (half - 0.5).abs() <= 1e-9 && worst <= 0.05,
        format!("E[A_2] = {exact}, oracle {oracle}, a(1/2) = {half:.12}, max finite-m gap {worst:.4}"),
    )
}

fn c9_feasibility_ordering() -> Outcome {
    let md = min_distance_ratio(4, 8).map_err(|e| e.to_string())?;
    let ws = critical_weight(0.11, 4);
    ensure(
        md > ws && (ws - 0.0301).abs() <= 5e-4,
        format!("min distance {md:.4} > critical weight {ws:.4}"),
    )
}

fn c10_success_floor() -> Outcome {
    let spec = EnsembleSpec::new(20, 20, 10, 4, 4, 8).map_err(|e| e.to_string())?;
    let r = verify_success_floor(spec, 0.25, 10_000, 10).map_err(|e| e.to_string())?;
    ensure(
        r.passed,
        format!(
            "Pr[N>0] = {:.4}, 99% lower {:.4} vs floor {:.5}",
            r.success.estimate, r.success.interval.lower, r.floor
        ),
    )
}

fn sweep_config(n: usize, trials: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        spec: EnsembleSpec::new(n, n, n / 2, 4, 4, 8).unwrap(),
        target_distortion: 0.25,
        trials,
        master_seed: seed,
        encoder: EncoderChoice::Optimal,
        output_path: None,
    }
}

fn c11_distortion_trend() -> Outcome {
    let mut means = Vec::new();
    for n in [12, 18, 24] {
        let out = run_quantization_sweep(&sweep_config(n, 500, 11), None).map_err(|e| e.to_string())?;
        means.push(out.summary.distortion.mean);
    }
    let decreasing = means.windows(2).all(|w| w[1] < w[0]);
    let in_band = means.iter().all(|m| (0.11..=0.30).contains(m));
    ensure(
        decreasing && in_band,
        format!("mean distortion at n = 12, 18, 24: {means:.4?}"),
    )
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("sweep.toml");
    std::fs::write(&config, sweep_config(16, 64, 12).to_toml_string()).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for (run, jobs) in [(0, "1"), (1, "4")] {
        let out = dir.path().join(format!("run{run}"));
        let status = Command::new(env!("CARGO_BIN_EXE_ldq"))
            .args(["sweep", "--config"])
            .arg(&config)
            .args(["--jobs", jobs, "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        outputs.push(std::fs::read(out.join("trials.csv")).map_err(|e| e.to_string())?);
    }
    ensure(
        outputs[0] == outputs[1] && !outputs[0].is_empty(),
        format!("two runs (1 and 4 jobs), {} CSV bytes each", outputs[0].len()),
    )
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (
            "1 rate-distortion anchor",
            Duration::from_secs(1),
            c1_rate_distortion_anchor,
        ),
        ("2 headline gap", Duration::from_secs(10), c2_headline_gap),
        ("3 induced flip frequency", Duration::from_secs(5), c3_flip_frequency),
        (
            "4 second-moment identity",
            Duration::from_secs(60),
            c4_second_moment_identity,
        ),
        ("5 Shepp inequality", Duration::from_secs(60), c5_shepp),
        ("6 expected good codewords", Duration::from_secs(120), c6_expected_good),
        (
            "7 conditional dominance",
            Duration::from_secs(120),
            c7_conditional_dominance,
        ),
        ("8 weight enumerator", Duration::from_secs(30), c8_weight_enumerator),
        (
            "9 feasibility ordering",
            Duration::from_secs(5),
            c9_feasibility_ordering,
        ),
        ("10 success floor", Duration::from_secs(300), c10_success_floor),
        ("11 distortion trend", Duration::from_secs(600), c11_distortion_trend),
        ("12 sweep determinism", Duration::from_secs(60), c12_determinism),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) => (elapsed <= budget, d),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {name}: {} ({:.2}s of {}s) {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
