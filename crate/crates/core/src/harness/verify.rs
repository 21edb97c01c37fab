//! Statistical and exact verification suites.
//!
//! Each suite compares an implementation against an independent oracle and
//! returns a report; [`run_suite`] bundles the standard parameter choices
//! used by the CLI.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::bounds::{
    binary_entropy, conditional_prob_bound, degree_check, induced_flip_prob, DegreeCheck, DegreeTriple,
};
use crate::codebook::{count_good_codewords, estimate_expected_good, radius, second_moment_identity};
use crate::ensembles::{sample_ldgm, CompoundCode, EnsembleSpec};
use crate::error::{Error, Result};
use crate::gf2::{gf2_matvec, BitVector};
use crate::seed::{derive_seed, seeded};
use crate::stats::{wilson_interval, Interval, MeanEstimate, Z99};

/// Agreement threshold for the one-frequency test, in standard errors.
pub const FLIP_Z_LIMIT: f64 = 4.0;

#[derive(Clone, Debug, Serialize)]
pub struct FlipFrequencyReport {
    pub m: usize,
    pub d: usize,
    pub omega: f64,
    pub samples: usize,
    pub empirical_freq: f64,
    pub predicted: f64,
    pub z_score: f64,
    pub passed: bool,
}

/// Fraction of ones in `z·G` for a fixed weight-`ω·m` middle word over
/// `samples` freshly drawn LDGM columns, against `δ(ω; d)`.
pub fn verify_flip_frequency(m: usize, d: usize, omega: f64, samples: usize, seed: u64) -> Result<FlipFrequencyReport> {
    let weight = omega * m as f64;
    if !(0.0..=1.0).contains(&omega) || (weight - weight.round()).abs() > 1e-9 {
        return Err(Error::Precondition(format!("omega * m = {weight} is not an integer")));
    }
    if m == 0 || d == 0 || samples == 0 {
        return Err(Error::Precondition("m, d and samples must be positive".into()));
    }
    let z = BitVector::from_positions(m, &(0..weight.round() as usize).collect::<Vec<_>>());
    let g = sample_ldgm(samples, m, d, &mut seeded(seed));
    let ones = gf2_matvec(&z, &g)?.weight();
    let empirical_freq = ones as f64 / samples as f64;
    let predicted = induced_flip_prob(omega, d);
    let sd = (predicted * (1.0 - predicted) / samples as f64).sqrt();
    let z_score = if sd > 0.0 {
        (empirical_freq - predicted) / sd
    } else if empirical_freq == predicted {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(FlipFrequencyReport {
        m,
        d,
        omega,
        samples,
        empirical_freq,
        predicted,
        z_score,
        passed: z_score.abs() < FLIP_Z_LIMIT,
    })
}

/// `2^{n(R − 1 + h(D))} / (n + 1)²`.
pub fn expected_good_lower_bound(n: usize, rate: f64, distortion: f64) -> Result<f64> {
    let exponent = n as f64 * (rate - 1.0 + binary_entropy(distortion)?);
    Ok(exponent.exp2() / ((n + 1) * (n + 1)) as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpectedGoodReport {
    pub spec: EnsembleSpec,
    pub distortion: f64,
    pub estimate: MeanEstimate,
    pub bound: f64,
    pub passed: bool,
}

/// Passes when the 99% lower confidence bound on `E[N]` clears
/// [`expected_good_lower_bound`].
pub fn verify_expected_good(
    spec: EnsembleSpec,
    distortion: f64,
    trials: usize,
    seed: u64,
) -> Result<ExpectedGoodReport> {
    let estimate = estimate_expected_good(spec, distortion, trials, &mut seeded(seed))?;
    let bound = expected_good_lower_bound(spec.n, spec.rate(), distortion)?;
    Ok(ExpectedGoodReport {
        spec,
        distortion,
        estimate,
        bound,
        passed: estimate.interval.lower >= bound,
    })
}

/// Exact `Pr[d(ŝ, s) ≤ ⌊D·n⌋ | wt(s) ≤ ⌊D·n⌋]` for a uniform source `s`
/// and a word `ŝ` with i.i.d. Bernoulli(`delta`) bits, which is the law of a
/// codeword produced by a fixed middle word through a random LDGM generator.
///
/// Only the source weight `t` matters: `ŝ` disagrees with `s` on
/// `Bin(n − t, δ)` positions outside the support and on `t − Bin(t, δ)`
/// inside it.
pub fn exact_conditional_probability(n: usize, distortion: f64, delta: f64) -> f64 {
    let r = radius(distortion, n);
    let binom = binomial_table(n);
    let pmf = |len: usize, k: usize| binom[len][k] * delta.powi(k as i32) * (1.0 - delta).powi((len - k) as i32);
    let mut numer = 0.0;
    let mut ball = 0.0;
    for (t, &weight_count) in binom[n].iter().enumerate().take(r + 1) {
        ball += weight_count;
        let mut inner = 0.0;
        for outside in 0..=(n - t) {
            for inside in 0..=t {
                if outside + t - inside <= r {
                    inner += pmf(n - t, outside) * pmf(t, inside);
                }
            }
        }
        numer += weight_count * inner;
    }
    numer / ball
}

fn binomial_table(n: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![1.0]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![1.0; i + 1];
        for j in 1..i {
            row[j] = prev[j - 1] + prev[j];
        }
        rows.push(row);
    }
    rows
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionalPoint {
    pub omega: f64,
    pub delta: f64,
    pub exact: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Exact conditional probability against the bound on `grid` evenly spaced
/// relative weights in `[0, 1]`.
pub fn conditional_dominance(n: usize, distortion: f64, d: usize, grid: usize) -> Vec<ConditionalPoint> {
    (0..grid)
        .map(|i| {
            let omega = if grid > 1 { i as f64 / (grid - 1) as f64 } else { 0.0 };
            let delta = induced_flip_prob(omega, d);
            let exact = exact_conditional_probability(n, distortion, delta);
            let bound = conditional_prob_bound(omega, distortion, d, n);
            ConditionalPoint {
                omega,
                delta,
                exact,
                bound,
                holds: exact <= bound * (1.0 + 1e-9),
            }
        })
        .collect()
}

/// `1 / (2(n + 1)²)`.
pub fn success_floor(n: usize) -> f64 {
    1.0 / (2.0 * ((n + 1) * (n + 1)) as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct SuccessEstimate {
    pub successes: usize,
    pub trials: usize,
    pub estimate: f64,
    pub interval: Interval,
}

/// Monte Carlo `Pr[N(D) > 0]` over fresh codes from `sample_code(seed)` and
/// uniform sources, with a 99% Wilson interval.
pub fn estimate_success_with<F>(
    n: usize,
    distortion: f64,
    trials: usize,
    seed: u64,
    sample_code: F,
) -> Result<SuccessEstimate>
where
    F: Fn(u64) -> Result<CompoundCode> + Sync,
{
    if trials == 0 {
        return Err(Error::Precondition("at least one trial required".into()));
    }
    let successes = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let trial = derive_seed(seed, t);
            let code = sample_code(derive_seed(trial, 0))?;
            let source = BitVector::random(n, &mut seeded(derive_seed(trial, 1)));
            Ok(usize::from(count_good_codewords(&code, &source, distortion)?.count > 0))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(SuccessEstimate {
        successes,
        trials,
        estimate: successes as f64 / trials as f64,
        interval: wilson_interval(successes, trials, Z99),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SuccessFloorReport {
    pub spec: EnsembleSpec,
    pub distortion: f64,
    pub degree_check: DegreeCheck,
    pub success: SuccessEstimate,
    pub floor: f64,
    pub passed: bool,
}

/// Checks that `Pr[N(D) > 0]` has a 99% lower confidence bound of at least
/// `1/(2(n + 1)²)`. The degree triple must be feasible at `(R, D)`.
pub fn verify_success_floor(
    spec: EnsembleSpec,
    distortion: f64,
    trials: usize,
    seed: u64,
) -> Result<SuccessFloorReport> {
    if spec.m != spec.n {
        return Err(Error::Precondition("success floor assumes m = n".into()));
    }
    let triple = DegreeTriple::new(spec.d, spec.lambda, spec.gamma)?;
    let check = degree_check(spec.rate(), distortion, triple)?;
    if !check.feasible {
        return Err(Error::Precondition(format!(
            "degrees ({}, {}, {}) are not feasible at R = {}, D = {distortion}: {:?}",
            spec.d,
            spec.lambda,
            spec.gamma,
            spec.rate(),
            check.reasons
        )));
    }
    let success = estimate_success_with(spec.n, distortion, trials, seed, |s| CompoundCode::sample(spec, s))?;
    let floor = success_floor(spec.n);
    Ok(SuccessFloorReport {
        spec,
        distortion,
        degree_check: check,
        passed: success.interval.lower >= floor,
        success,
        floor,
    })
}

/// Codes used by the exact second-moment suites.
pub fn exact_suite_codes(seed: u64, count: usize) -> Result<Vec<(u64, CompoundCode)>> {
    let spec = EnsembleSpec::new(10, 10, 5, 4, 4, 8)?;
    (0..count as u64)
        .map(|i| {
            let s = derive_seed(seed, i);
            Ok((s, CompoundCode::sample(spec, s)?))
        })
        .collect()
}

pub const EXACT_SUITE_DISTORTIONS: [f64; 3] = [0.1, 0.2, 0.3];

/// Verification suites, named on the command line `lemma1`..`lemma5` and
/// `shepp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Suite {
    #[serde(rename = "lemma1")]
    FlipFrequency,
    #[serde(rename = "lemma2")]
    ExpectedGood,
    #[serde(rename = "lemma3")]
    SecondMoment,
    #[serde(rename = "lemma4")]
    ConditionalBound,
    #[serde(rename = "lemma5")]
    SuccessFloor,
    #[serde(rename = "shepp")]
    Shepp,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::FlipFrequency,
        Suite::ExpectedGood,
        Suite::SecondMoment,
        Suite::ConditionalBound,
        Suite::SuccessFloor,
        Suite::Shepp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::FlipFrequency => "lemma1",
            Suite::ExpectedGood => "lemma2",
            Suite::SecondMoment => "lemma3",
            Suite::ConditionalBound => "lemma4",
            Suite::SuccessFloor => "lemma5",
            Suite::Shepp => "shepp",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Spec(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn check<T: Serialize>(name: String, passed: bool, detail: &T) -> Check {
    Check {
        name,
        passed,
        detail: serde_json::to_value(detail).expect("report serializes"),
    }
}

/// Runs one suite with its standard parameters.
pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::FlipFrequency => [0.0, 0.25, 0.5]
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let r = verify_flip_frequency(1000, 4, w, 100_000, derive_seed(seed, i as u64))?;
                Ok(check(format!("omega={w}"), r.passed, &r))
            })
            .collect::<Result<Vec<_>>>()?,
        Suite::ExpectedGood => {
            let r = verify_expected_good(EnsembleSpec::new(16, 16, 8, 4, 4, 8)?, 0.2, 10_000, seed)?;
            vec![check("n=16 D=0.2".into(), r.passed, &r)]
        }
        Suite::SecondMoment | Suite::Shepp => {
            let codes = exact_suite_codes(seed, 20)?;
            let mut out = Vec::new();
            for (code_seed, code) in &codes {
                for dist in EXACT_SUITE_DISTORTIONS {
                    let sm = second_moment_identity(code, dist)?;
                    let (passed, detail) = if suite == Suite::SecondMoment {
                        (
                            sm.lhs == sm.rhs,
                            json!({ "lhs": sm.lhs.to_string(), "rhs": sm.rhs.to_string() }),
                        )
                    } else {
                        (
                            sm.shepp_holds(),
                            json!({
                                "pr_positive": sm.pr_positive.to_string(),
                                "lower_bound": sm.shepp_lower_bound().to_string(),
                            }),
                        )
                    };
                    out.push(check(format!("code_seed={code_seed} D={dist}"), passed, &detail));
                }
            }
            out
        }
        Suite::ConditionalBound => [0.11, 0.2]
            .iter()
            .map(|&dist| {
                let points = conditional_dominance(20, dist, 4, 50);
                let passed = points.iter().all(|p| p.holds);
                check(format!("n=20 d=4 D={dist}"), passed, &points)
            })
            .collect(),
        Suite::SuccessFloor => {
            let r = verify_success_floor(EnsembleSpec::new(20, 20, 10, 4, 4, 8)?, 0.25, 10_000, seed)?;
            vec![check("n=20 D=0.25".into(), r.passed, &r)]
        }
    };
    Ok(SuiteReport {
        suite,
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
