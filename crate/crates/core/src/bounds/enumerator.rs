//! Weight enumerators of the `(λ, γ)`-regular LDPC ensemble.
//!
//! The exact ensemble average over the configuration model is
//!
//! ```text
//! E[A_w] = C(m, w) · [x^{wλ}] g(x)^k / C(mλ, wλ),   g(x) = ((1+x)^γ + (1−x)^γ)/2
//! ```
//!
//! with `k = mλ/γ`: a weight-`w` word occupies `wλ` variable sockets, the
//! matching places them uniformly among the `mλ` check sockets, and every
//! check must see an even number of them.
//!
//! The growth rate `a(ω) = lim (1/m)·log₂ E[A_{ωm}]` follows from the saddle
//! point of the coefficient extraction.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

use super::binary_entropy;

/// `log₂ x`, exact in the exponent for integers far beyond `f64` range.
pub fn log2_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().expect("fits in f64").log2()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().expect("64-bit value").log2() + shift as f64
    }
}

/// `log₂` of a nonnegative rational.
pub fn log2_ratio(x: &BigRational) -> f64 {
    let num = x.numer().to_biguint().expect("nonnegative ratio");
    let den = x.denom().to_biguint().expect("positive denominator");
    log2_biguint(&num) - log2_biguint(&den)
}

fn binomial_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::from(1u32)];
    for i in 0..n {
        let next = &row[i] * BigUint::from(n - i) / BigUint::from(i + 1);
        row.push(next);
    }
    row
}

fn check_degrees(m: usize, lambda: usize, gamma: usize) -> Result<usize> {
    if !gamma.is_multiple_of(2) {
        return Err(Error::Spec(format!("check degree gamma = {gamma} must be even")));
    }
    if lambda == 0 {
        return Ok(0);
    }
    if gamma == 0 || !(m * lambda).is_multiple_of(gamma) {
        return Err(Error::Spec(format!(
            "m*lambda = {} is not a multiple of gamma = {gamma}",
            m * lambda
        )));
    }
    Ok(m * lambda / gamma)
}

/// Exact ensemble-average weight distribution for one `(m, λ, γ)`.
#[derive(Clone, Debug)]
pub struct WeightEnumerator {
    m: usize,
    lambda: usize,
    counts: Vec<BigRational>,
}

impl WeightEnumerator {
    pub fn new(m: usize, lambda: usize, gamma: usize) -> Result<Self> {
        let k = check_degrees(m, lambda, gamma)?;
        // g(x) has only even powers; work in y = x² to halve the degrees.
        let g: Vec<BigUint> = binomial_row(gamma).into_iter().step_by(2).collect();
        let mut poly = vec![BigUint::from(1u32)];
        for _ in 0..k {
            let mut next = vec![BigUint::zero(); poly.len() + g.len() - 1];
            for (i, a) in poly.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in g.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            poly = next;
        }
        let sockets = binomial_row(m * lambda);
        let words = binomial_row(m);
        let counts = (0..=m)
            .map(|w| {
                let edges = w * lambda;
                let coef = if edges.is_multiple_of(2) {
                    poly.get(edges / 2).cloned().unwrap_or_default()
                } else {
                    BigUint::zero()
                };
                BigRational::new((&words[w] * coef).into(), sockets[edges].clone().into())
            })
            .collect();
        Ok(Self { m, lambda, counts })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// `E[A_w]` as an exact rational.
    pub fn expected(&self, w: usize) -> &BigRational {
        &self.counts[w]
    }

    pub fn log2_expected(&self, w: usize) -> f64 {
        log2_ratio(&self.counts[w])
    }

    /// `log₂ E[A_w]` for every `w = 0..=m`.
    pub fn log2_counts(&self) -> Vec<f64> {
        self.counts.iter().map(log2_ratio).collect()
    }

    /// `Σ_w E[A_w] = E[2^{nullity(H)}]`.
    pub fn total(&self) -> BigRational {
        self.counts.iter().fold(BigRational::zero(), |acc, c| acc + c)
    }
}

/// Exact `E[A_w]` over the `(λ, γ)`-regular ensemble with `m` variables.
pub fn weight_enum_exact(m: usize, w: usize, lambda: usize, gamma: usize) -> Result<BigRational> {
    if w > m {
        return Err(Error::OutOfRange {
            value: w as f64,
            domain: "weights 0..=m",
        });
    }
    Ok(WeightEnumerator::new(m, lambda, gamma)?.counts.swap_remove(w))
}

/// `s·g′(s)/g(s)`: mean number of ones per check under the tilted measure.
fn edge_load(s: f64, gamma: usize) -> f64 {
    let g = gamma as f64;
    if s <= 1.0 {
        // r = (1−s)/(1+s) ∈ [0, 1); expm1/ln_1p keep precision for small s.
        let ln_r = (-2.0 * s / (1.0 + s)).ln_1p();
        let one_minus_rp = -((g - 1.0) * ln_r).exp_m1();
        let rg = (g * ln_r).exp();
        g * s / (1.0 + s) * one_minus_rp / (1.0 + rg)
    } else {
        // r < 0: r^{γ−1} = −|r|^{γ−1} since γ is even.
        let abs_r = (s - 1.0) / (s + 1.0);
        g * s / (1.0 + s) * (1.0 + abs_r.powf(g - 1.0)) / (1.0 + abs_r.powf(g))
    }
}

/// `log₂ g(s)`.
fn log2_g(s: f64, gamma: usize) -> f64 {
    let g = gamma as f64;
    let abs_r = ((1.0 - s) / (1.0 + s)).abs();
    g * (1.0 + s).log2() + ((1.0 + abs_r.powf(g)) / 2.0).log2()
}

/// Solves `s·g′(s)/g(s) = γω` by bisection.
fn saddle_point(omega: f64, gamma: usize) -> Result<f64> {
    let target = gamma as f64 * omega;
    let mut lo = 1e-12;
    let mut hi = 1.0;
    let mut doublings = 0;
    while edge_load(hi, gamma) < target {
        hi *= 2.0;
        doublings += 1;
        if doublings > 1000 || !hi.is_finite() {
            return Err(Error::Numeric(format!("no saddle-point bracket for omega = {omega}")));
        }
    }
    if edge_load(lo, gamma) > target {
        return Err(Error::Numeric(format!("omega = {omega} below saddle-point bracket")));
    }
    for _ in 0..400 {
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if edge_load(mid, gamma) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Asymptotic growth rate `a(ω)` of the ensemble weight enumerator:
///
/// `a(ω) = (1−λ)·h(ω) + (λ/γ)·log₂ g(s*) − λω·log₂ s*`.
pub fn weight_enum_exponent(omega: f64, lambda: usize, gamma: usize) -> Result<f64> {
    if !(omega > 0.0 && omega < 1.0) {
        return Err(Error::OutOfRange {
            value: omega,
            domain: "(0, 1)",
        });
    }
    if gamma < 2 || !gamma.is_multiple_of(2) || lambda == 0 {
        return Err(Error::Spec(format!(
            "need lambda >= 1 and even gamma >= 2 (lambda = {lambda}, gamma = {gamma})"
        )));
    }
    let s = saddle_point(omega, gamma)?;
    let l = lambda as f64;
    Ok((1.0 - l) * binary_entropy(omega)? + l / gamma as f64 * log2_g(s, gamma) - l * omega * s.log2())
}

/// Smallest `ω₀ ∈ (0, 1/2)` with `a(ω₀) = 0`: the relative minimum distance
/// of typical ensemble members.
pub fn min_distance_ratio(lambda: usize, gamma: usize) -> Result<f64> {
    if lambda >= gamma {
        return Err(Error::Spec(format!(
            "bottom rate 1 - lambda/gamma must be positive (lambda = {lambda}, gamma = {gamma})"
        )));
    }
    let a = |w: f64| weight_enum_exponent(w, lambda, gamma);
    // Log-spaced scan from 1e-8 up to 1/2 for the first sign change.
    const STEPS: usize = 4000;
    let ratio = (0.5f64 / 1e-8).powf(1.0 / STEPS as f64);
    let mut prev = 1e-8;
    if a(prev)? >= 0.0 {
        return Err(Error::NoLinearDistance { lambda, gamma });
    }
    for i in 1..=STEPS {
        let w = if i == STEPS { 0.5 } else { 1e-8 * ratio.powi(i as i32) };
        if a(w)? >= 0.0 {
            let (mut lo, mut hi) = (prev, w);
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                if a(mid)? < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev = w;
    }
    Err(Error::NoLinearDistance { lambda, gamma })
}
