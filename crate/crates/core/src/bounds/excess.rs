//! Excess rate of the compound construction and degree feasibility.
//!
//! The second-moment argument succeeds when the weighted count of nonzero
//! bottom codewords
//!
//! ```text
//! Σ_t E[A_t] · min{1, 2^{−n·KL(D ‖ δ(t/n; d))}}
//! ```
//!
//! grows no faster than `2^{n(R − [1 − h(D)])}`. The trivial factor 1 is
//! used exactly when `δ(t/n; d) < D`, which for even `d` covers both the
//! low-weight band and its mirror image near `t = n`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

use super::enumerator::{min_distance_ratio, weight_enum_exponent, WeightEnumerator};
use super::{binary_entropy, critical_weight, induced_flip_prob, kl_bernoulli};

/// Slack used when comparing numerically evaluated exponents against zero.
pub const NUMERICAL_TOLERANCE: f64 = 1e-3;

/// Grid size used by [`degree_check`] for the asymptotic exponent.
const CHECK_GRID: usize = 2000;

fn log2_sum_exp2(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.filter(|t| *t > f64::NEG_INFINITY).collect();
    let Some(max) = terms.iter().copied().reduce(f64::max) else {
        return f64::NEG_INFINITY;
    };
    max + terms.iter().map(|t| (t - max).exp2()).sum::<f64>().log2()
}

/// Log-domain penalty `−n·KL(D ‖ δ)` from the conditional bound, 0 in the
/// trivial band.
fn log2_conditional_bound(omega: f64, distortion: f64, d: usize, n: f64) -> f64 {
    let delta = induced_flip_prob(omega, d);
    if delta < distortion {
        0.0
    } else {
        -n * kl_bernoulli(distortion, delta)
    }
}

/// `(1/n)·log₂ Σ_{t=1..n} 2^{log2_counts[t]} · bound(t/n)`, for a bottom code
/// described by `log2_counts[t] = log₂ (number of weight-t middle words)`
/// over `t = 0..=n`. Returns `−∞` when no nonzero weight carries mass.
pub fn excess_rate_from_log_counts(distortion: f64, d: usize, log2_counts: &[f64]) -> f64 {
    let n = log2_counts.len().saturating_sub(1);
    if n == 0 {
        return f64::NEG_INFINITY;
    }
    let nf = n as f64;
    let total =
        log2_sum_exp2((1..=n).map(|t| log2_counts[t] + log2_conditional_bound(t as f64 / nf, distortion, d, nf)));
    total / nf
}

/// Finite-`n` excess rate for `R_t = 1` (`m = n`) using the exact
/// ensemble-average weight enumerator. All weights contribute.
pub fn excess_rate_finite(n: usize, distortion: f64, d: usize, lambda: usize, gamma: usize) -> Result<f64> {
    if d == 0 || !d.is_multiple_of(2) {
        return Err(Error::Precondition(format!("LDGM degree d = {d} must be even")));
    }
    let en = WeightEnumerator::new(n, lambda, gamma)?;
    Ok(excess_rate_from_log_counts(distortion, d, &en.log2_counts()))
}

/// Integrand of the asymptotic excess rate, `None` where `a(ω) < 0` (weights
/// at which typical ensemble members have no codewords).
fn excess_integrand(omega: f64, distortion: f64, d: usize, lambda: usize, gamma: usize) -> Result<Option<f64>> {
    let a = weight_enum_exponent(omega, lambda, gamma)?;
    if a < 0.0 {
        return Ok(None);
    }
    Ok(Some(a + log2_conditional_bound(omega, distortion, d, 1.0)))
}

/// Maximum of the asymptotic excess-rate integrand over `ω ∈ (0, 1)` and
/// where it is attained. The grid of `grid_size` interior points is refined
/// around the best point until the spacing drops below 1e-4.
pub fn excess_rate_maximizer(
    distortion: f64,
    d: usize,
    lambda: usize,
    gamma: usize,
    grid_size: usize,
) -> Result<(f64, f64)> {
    let grid_size = grid_size.max(3);
    let eval = |w: f64| excess_integrand(w, distortion, d, lambda, gamma);
    let points: Vec<f64> = (1..=grid_size).map(|i| i as f64 / (grid_size + 1) as f64).collect();
    let values = points.par_iter().map(|&w| eval(w)).collect::<Result<Vec<_>>>()?;
    let best = values.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).fold(
        None,
        |acc: Option<(usize, f64)>, (i, v)| match acc {
            Some((_, bv)) if bv >= v => acc,
            _ => Some((i, v)),
        },
    );
    let Some((idx, mut best_val)) = best else {
        return Ok((f64::NEG_INFINITY, f64::NAN));
    };
    let mut best_w = points[idx];
    const SUB: usize = 20;
    let mut step = points[0];
    while step > 1e-4 {
        let lo = (best_w - step).max(step / SUB as f64);
        let hi = (best_w + step).min(1.0 - step / SUB as f64);
        step = (hi - lo) / SUB as f64;
        for j in 0..=SUB {
            let w = lo + j as f64 * step;
            if let Some(v) = eval(w)? {
                if v > best_val {
                    best_val = v;
                    best_w = w;
                }
            }
        }
    }
    Ok((best_val, best_w))
}

/// Asymptotic excess-rate exponent: `max_ω [a(ω) − KL(D ‖ δ(ω; d))·1{δ ≥ D}]`
/// over weights with `a(ω) ≥ 0`.
pub fn excess_rate_exponent(distortion: f64, d: usize, lambda: usize, gamma: usize, grid_size: usize) -> Result<f64> {
    excess_rate_maximizer(distortion, d, lambda, gamma, grid_size).map(|(v, _)| v)
}

/// Rate above the rate-distortion bound, `R − [1 − h(D)]`.
pub fn rate_slack(rate: f64, distortion: f64) -> Result<f64> {
    Ok(rate - (1.0 - binary_entropy(distortion)?))
}

/// LDGM degree and LDPC degrees of a compound ensemble with `R_t = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DegreeTriple {
    pub d: usize,
    pub lambda: usize,
    pub gamma: usize,
}

impl DegreeTriple {
    pub fn new(d: usize, lambda: usize, gamma: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Spec("LDGM degree d must be at least 1".into()));
        }
        if !gamma.is_multiple_of(2) || lambda == 0 || lambda >= gamma {
            return Err(Error::Spec(format!(
                "need even gamma > lambda >= 1 (lambda = {lambda}, gamma = {gamma})"
            )));
        }
        Ok(Self { d, lambda, gamma })
    }

    pub fn bottom_rate(&self) -> f64 {
        1.0 - self.lambda as f64 / self.gamma as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Infeasibility {
    /// Rate below `1 − h(D)`: no code can reach the target.
    BelowRateDistortion,
    /// The conditional bound needs an even LDGM degree.
    OddLdgmDegree,
    /// The bottom ensemble has no linear minimum distance (`λ ≤ 2`).
    NoLinearDistance,
    /// Low-weight bottom codewords fall inside the trivial-bound band and
    /// there is no rate slack to absorb them.
    LowWeightBand,
    /// Excess-rate exponent exceeds the rate slack.
    ExcessRate,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeCheck {
    pub triple: DegreeTriple,
    pub feasible: bool,
    /// `(R − [1 − h(D)]) − exponent`; nonnegative (up to tolerance) when the
    /// excess-rate condition holds.
    pub margin: f64,
    pub exponent: f64,
    pub slack: f64,
    pub critical_weight: f64,
    pub min_distance_ratio: Option<f64>,
    pub reasons: Vec<Infeasibility>,
}

/// Checks whether `triple` makes the excess rate negligible at `(R, D)`.
///
/// Feasible when the asymptotic exponent does not exceed the rate slack
/// `R − [1 − h(D)]` (both up to [`NUMERICAL_TOLERANCE`]) and, when the rate
/// sits at the rate-distortion bound, the relative minimum distance of the
/// bottom ensemble exceeds `ω*(D; d)`.
pub fn degree_check(rate: f64, distortion: f64, triple: DegreeTriple) -> Result<DegreeCheck> {
    if (rate - triple.bottom_rate()).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "rate {rate} differs from 1 - lambda/gamma = {}",
            triple.bottom_rate()
        )));
    }
    if !(0.0..=0.5).contains(&distortion) {
        return Err(Error::OutOfRange {
            value: distortion,
            domain: "[0, 1/2]",
        });
    }
    let slack = rate_slack(rate, distortion)?;
    let w_star = critical_weight(distortion, triple.d);
    let mut reasons = Vec::new();
    if slack < -NUMERICAL_TOLERANCE {
        reasons.push(Infeasibility::BelowRateDistortion);
    }
    if !triple.d.is_multiple_of(2) {
        reasons.push(Infeasibility::OddLdgmDegree);
    }
    let min_dist = match min_distance_ratio(triple.lambda, triple.gamma) {
        Ok(v) => Some(v),
        Err(Error::NoLinearDistance { .. }) => {
            reasons.push(Infeasibility::NoLinearDistance);
            None
        }
        Err(e) => return Err(e),
    };
    if let Some(md) = min_dist {
        if md <= w_star && slack <= NUMERICAL_TOLERANCE {
            reasons.push(Infeasibility::LowWeightBand);
        }
    }
    let exponent = excess_rate_exponent(distortion, triple.d, triple.lambda, triple.gamma, CHECK_GRID)?;
    let margin = slack - exponent;
    if margin < -NUMERICAL_TOLERANCE {
        reasons.push(Infeasibility::ExcessRate);
    }
    Ok(DegreeCheck {
        triple,
        feasible: reasons.is_empty(),
        margin,
        exponent,
        slack,
        critical_weight: w_star,
        min_distance_ratio: min_dist,
        reasons,
    })
}

/// First feasible triple in the order (d, then γ), with `λ = (1 − R)·γ`.
pub fn degree_search(rate: f64, distortion: f64, d_max: usize, gamma_max: usize) -> Result<Option<DegreeTriple>> {
    for d in 1..=d_max {
        for gamma in (2..=gamma_max).step_by(2) {
            let lambda = (1.0 - rate) * gamma as f64;
            let rounded = lambda.round();
            if (lambda - rounded).abs() > 1e-9 || rounded < 1.0 || rounded as usize >= gamma {
                continue;
            }
            let triple = DegreeTriple::new(d, rounded as usize, gamma)?;
            if degree_check(triple.bottom_rate(), distortion, triple)?.feasible {
                return Ok(Some(triple));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    WeightExponent,
    KlBound,
    ExcessIntegrand,
}

/// A function of relative weight sampled on an increasing grid.
#[derive(Clone, Debug, Serialize)]
pub struct BoundCurve {
    pub kind: CurveKind,
    pub omega_grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// The two curves compared in the gap figure, plus their sum.
#[derive(Clone, Debug, Serialize)]
pub struct GapCurves {
    /// `−KL(D ‖ δ(ω; d))`, clipped to 0 in the trivial band.
    pub kl_bound: BoundCurve,
    /// `a(ω)`, with the limit value 0 at `ω = 0`.
    pub weight_exponent: BoundCurve,
    /// `a(ω) + kl_bound(ω)`; nonpositive everywhere when the excess rate
    /// vanishes.
    pub excess_integrand: BoundCurve,
}

/// Samples the gap-figure curves on `grid` evenly spaced points of `[0, 1/2]`.
pub fn gap_curves(distortion: f64, d: usize, lambda: usize, gamma: usize, grid: usize) -> Result<GapCurves> {
    if d == 0 || !d.is_multiple_of(2) {
        return Err(Error::Precondition(format!("LDGM degree d = {d} must be even")));
    }
    if grid < 2 {
        return Err(Error::Precondition("grid needs at least two points".into()));
    }
    let omega_grid: Vec<f64> = (0..grid).map(|i| 0.5 * i as f64 / (grid - 1) as f64).collect();
    let rows = omega_grid
        .par_iter()
        .map(|&w| -> Result<(f64, f64)> {
            let kl = log2_conditional_bound(w, distortion, d, 1.0);
            let a = if w == 0.0 {
                0.0
            } else {
                weight_enum_exponent(w, lambda, gamma)?
            };
            Ok((kl, a))
        })
        .collect::<Result<Vec<_>>>()?;
    let curve = |kind, values| BoundCurve {
        kind,
        omega_grid: omega_grid.clone(),
        values,
    };
    Ok(GapCurves {
        kl_bound: curve(CurveKind::KlBound, rows.iter().map(|r| r.0).collect()),
        weight_exponent: curve(CurveKind::WeightExponent, rows.iter().map(|r| r.1).collect()),
        excess_integrand: curve(CurveKind::ExcessIntegrand, rows.iter().map(|r| r.0 + r.1).collect()),
    })
}
