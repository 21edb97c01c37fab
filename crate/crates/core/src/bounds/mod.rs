//! Analytical quantities of the compound construction.
//!
//! Everything here is a pure function of its arguments. Logarithms are
//! base 2 throughout. Closed forms are evaluated in `f64`; the exact
//! ensemble-average weight enumerator uses big-integer rationals and lives
//! in [`enumerator`], the excess-rate machinery and degree feasibility in
//! [`excess`].

pub mod enumerator;
pub mod excess;

pub use enumerator::{
    log2_biguint, log2_ratio, min_distance_ratio, weight_enum_exact, weight_enum_exponent, WeightEnumerator,
};
pub use excess::{
    degree_check, degree_search, excess_rate_exponent, excess_rate_finite, excess_rate_from_log_counts,
    excess_rate_maximizer, gap_curves, rate_slack, BoundCurve, CurveKind, DegreeCheck, DegreeTriple, GapCurves,
    Infeasibility, NUMERICAL_TOLERANCE,
};

use crate::error::{Error, Result};

/// `h(t) = −t·log₂t − (1−t)·log₂(1−t)`, with `0·log 0 = 0`.
pub fn binary_entropy(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange {
            value: t,
            domain: "[0, 1]",
        });
    }
    Ok(-(xlog2y(t, t) + xlog2y(1.0 - t, 1.0 - t)))
}

/// `x·log₂y` with `0·log 0 = 0`.
#[inline]
fn xlog2y(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.log2()
    }
}

/// One term `x·log₂(x/y)` of a relative entropy, `+∞` when `y = 0 < x`.
#[inline]
fn kl_term(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if y == 0.0 {
        f64::INFINITY
    } else {
        x * (x / y).log2()
    }
}

/// Relative entropy between Bernoulli(a) and Bernoulli(b), in bits.
///
/// Takes the value `+∞` when `b ∈ {0, 1}` puts zero mass where `a` does not.
pub fn kl_bernoulli(a: f64, b: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
    let v = kl_term(a, b) + kl_term(1.0 - a, 1.0 - b);
    // Rounding can leave a tiny negative value near a = b.
    v.max(0.0)
}

/// Distortion on the binary rate-distortion curve: the `D ∈ [0, 1/2]` with
/// `1 − h(D) = R`, by bisection to 1e-10. Rates outside `(0, 1]` clamp to the
/// endpoints.
pub fn rd_distortion(rate: f64) -> f64 {
    if rate >= 1.0 {
        return 0.0;
    }
    if rate <= 0.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    // 1 − h(D) decreases on [0, 1/2].
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        let r = 1.0 - binary_entropy(mid).expect("mid lies in [0, 1/2]");
        if r > rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bernoulli parameter of `z·G` for a weight-`ω` middle word and random
/// degree-`d` LDGM columns: `δ(ω; d) = ½[1 − (1 − 2ω)^d]`.
#[inline]
pub fn induced_flip_prob(omega: f64, d: usize) -> f64 {
    0.5 * (1.0 - (1.0 - 2.0 * omega).powi(d as i32))
}

/// `ω*(D; d) = ½[1 − (1 − 2D)^{1/d}]`, the inverse of [`induced_flip_prob`]
/// on `[0, 1/2]`.
#[inline]
pub fn critical_weight(distortion: f64, d: usize) -> f64 {
    0.5 * (1.0 - (1.0 - 2.0 * distortion).powf(1.0 / d as f64))
}

/// Upper bound on `Pr[I_j = 1 | I_0 = 1]` for a codeword generated by a
/// weight-`ω` middle word: 1 while `δ(ω; d) < D`, else `2^{−n·KL(D ‖ δ)}`.
///
/// Valid for even `d`, where `δ ≤ 1/2` and the trivial band covers both
/// `ω ≤ ω*` and `ω ≥ 1 − ω*`.
pub fn conditional_prob_bound(omega: f64, distortion: f64, d: usize, n: usize) -> f64 {
    let delta = induced_flip_prob(omega, d);
    if delta < distortion {
        1.0
    } else {
        (-(n as f64) * kl_bernoulli(distortion, delta)).exp2()
    }
}
