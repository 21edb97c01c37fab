//! Exhaustive codebook enumeration and good-codeword counting.
//!
//! Codewords are indexed by middle-layer words `z` in the span of the
//! cached null-space basis of `H`; when `G` maps two such words to the same
//! reconstruction, that reconstruction is counted once per `z`. The walk
//! visits the `2^r` coefficient vectors in reflected Gray-code order, so each
//! step XORs a single basis image into the running reconstruction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::{CompoundCode, EnsembleSpec};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::seed::{derive_seed, seeded};
use crate::stats::{mean_interval, MeanEstimate, Z99};

pub const DEFAULT_NULLITY_CAP: usize = 26;
/// Coefficient vectors are packed into a `u64`.
const HARD_NULLITY_CAP: usize = 63;
pub const NULLITY_CAP_ENV: &str = "LDQ_NULLITY_CAP";

/// Largest nullity enumerated exhaustively; `LDQ_NULLITY_CAP` overrides the
/// default of 26.
pub fn nullity_cap() -> usize {
    std::env::var(NULLITY_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(DEFAULT_NULLITY_CAP)
        .min(HARD_NULLITY_CAP)
}

fn check_feasible(code: &CompoundCode, cap: usize) -> Result<()> {
    let cap = cap.min(HARD_NULLITY_CAP);
    if code.nullity() > cap {
        return Err(Error::EnumerationInfeasible {
            nullity: code.nullity(),
            cap,
        });
    }
    Ok(())
}

/// Covering radius used for distortion `D`: `⌊D·n⌋`, so that a codeword
/// inside the radius never exceeds distortion `D`.
pub fn radius(distortion: f64, n: usize) -> usize {
    // The epsilon absorbs products such as 0.29 * 100 = 28.999999999999996.
    ((distortion * n as f64 + 1e-9).floor().max(0.0) as usize).min(n)
}

/// Calls `visit(coefficients, reconstruction)` for every codeword in Gray
/// order, starting from the zero word.
pub(crate) fn walk_codewords<F>(code: &CompoundCode, cap: usize, mut visit: F) -> Result<()>
where
    F: FnMut(u64, &BitVector),
{
    check_feasible(code, cap)?;
    let images = code.basis_images();
    let mut shat = BitVector::zeros(code.n());
    let mut coeffs = 0u64;
    visit(coeffs, &shat);
    for step in 1..(1u64 << images.len()) {
        let flip = step.trailing_zeros() as usize;
        coeffs ^= 1 << flip;
        shat.xor_words(&images[flip]);
        visit(coeffs, &shat);
    }
    Ok(())
}

/// Like [`walk_codewords`] but tracks the distance to `source` incrementally.
pub(crate) fn walk_distances<F>(code: &CompoundCode, source: &BitVector, cap: usize, mut visit: F) -> Result<()>
where
    F: FnMut(u64, usize),
{
    if source.len() != code.n() {
        return Err(Error::Dimension {
            expected: code.n(),
            found: source.len(),
        });
    }
    check_feasible(code, cap)?;
    let images = code.basis_images();
    let mut diff = source.clone();
    let mut coeffs = 0u64;
    visit(coeffs, diff.weight());
    for step in 1..(1u64 << images.len()) {
        let flip = step.trailing_zeros() as usize;
        coeffs ^= 1 << flip;
        diff.xor_words(&images[flip]);
        visit(coeffs, diff.weight());
    }
    Ok(())
}

/// Iterator over `(z, ẑ·G)` pairs in Gray order.
pub struct Codewords<'a> {
    code: &'a CompoundCode,
    step: u64,
    end: u64,
    z: BitVector,
    shat: BitVector,
}

impl Iterator for Codewords<'_> {
    type Item = (BitVector, BitVector);

    fn next(&mut self) -> Option<Self::Item> {
        if self.step >= self.end {
            return None;
        }
        if self.step > 0 {
            let flip = self.step.trailing_zeros() as usize;
            self.z.xor_words(&self.code.null_basis()[flip]);
            self.shat.xor_words(&self.code.basis_images()[flip]);
        }
        self.step += 1;
        Some((self.z.clone(), self.shat.clone()))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.step) as usize;
        (left, Some(left))
    }
}

/// All `2^nullity` codewords, first `(0, 0)`, using [`nullity_cap`].
pub fn enumerate_codewords(code: &CompoundCode) -> Result<Codewords<'_>> {
    enumerate_codewords_with_cap(code, nullity_cap())
}

pub fn enumerate_codewords_with_cap(code: &CompoundCode, cap: usize) -> Result<Codewords<'_>> {
    check_feasible(code, cap)?;
    Ok(Codewords {
        code,
        step: 0,
        end: 1u64 << code.nullity(),
        z: BitVector::zeros(code.m()),
        shat: BitVector::zeros(code.n()),
    })
}

/// `N(C, s, D)` together with the radius and codebook size it refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GoodWordCount {
    pub count: u64,
    pub threshold: usize,
    pub total_codewords: u64,
}

/// Number of codewords within Hamming distance `⌊D·n⌋` of `source`.
pub fn count_good_codewords(code: &CompoundCode, source: &BitVector, distortion: f64) -> Result<GoodWordCount> {
    count_good_codewords_with_cap(code, source, distortion, nullity_cap())
}

pub fn count_good_codewords_with_cap(
    code: &CompoundCode,
    source: &BitVector,
    distortion: f64,
    cap: usize,
) -> Result<GoodWordCount> {
    if !(0.0..=1.0).contains(&distortion) {
        return Err(Error::OutOfRange {
            value: distortion,
            domain: "[0, 1]",
        });
    }
    let threshold = radius(distortion, code.n());
    let mut count = 0;
    walk_distances(code, source, cap, |_, dist| {
        if dist <= threshold {
            count += 1;
        }
    })?;
    Ok(GoodWordCount {
        count,
        threshold,
        total_codewords: 1 << code.nullity(),
    })
}

/// Number of valid middle-layer words of each weight `0..=m`.
pub fn middle_weight_distribution(code: &CompoundCode) -> Result<Vec<u64>> {
    check_feasible(code, nullity_cap())?;
    let mut hist = vec![0u64; code.m() + 1];
    let mut z = BitVector::zeros(code.m());
    hist[0] += 1;
    let basis = code.null_basis();
    for step in 1..(1u64 << basis.len()) {
        z.xor_words(&basis[step.trailing_zeros() as usize]);
        hist[z.weight()] += 1;
    }
    Ok(hist)
}

/// Largest blocklength for which all `2^n` sources are enumerated.
pub const MAX_EXACT_BLOCKLENGTH: usize = 22;

/// Exact moments of `N` over a uniform source for one fixed code.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondMoment {
    /// `E_s[N²]`, summed directly over sources.
    pub lhs: BigRational,
    /// `E[N] + E[N]·Σ_{j≠0} Pr[I_j = 1 | I_0 = 1]`.
    pub rhs: BigRational,
    pub mean: BigRational,
    /// `Pr_s[N > 0]`.
    pub pr_positive: BigRational,
}

impl SecondMoment {
    /// `Pr[N > 0] ≥ E[N]²/E[N²]`, compared exactly.
    pub fn shepp_holds(&self) -> bool {
        if self.lhs.is_zero() {
            return self.mean.is_zero();
        }
        self.pr_positive >= &self.mean * &self.mean / &self.lhs
    }

    pub fn shepp_lower_bound(&self) -> BigRational {
        if self.lhs.is_zero() {
            BigRational::zero()
        } else {
            &self.mean * &self.mean / &self.lhs
        }
    }
}

fn to_mask(v: &BitVector) -> u64 {
    v.support().iter().fold(0u64, |acc, &i| acc | 1 << i)
}

fn ratio(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Both sides of the second-moment decomposition, each computed by
/// enumerating every source word.
pub fn second_moment_identity(code: &CompoundCode, distortion: f64) -> Result<SecondMoment> {
    let n = code.n();
    if n > MAX_EXACT_BLOCKLENGTH {
        return Err(Error::Precondition(format!(
            "exact second moment needs n <= {MAX_EXACT_BLOCKLENGTH}, got {n}"
        )));
    }
    let mut words = Vec::with_capacity(1 << code.nullity());
    walk_codewords(code, nullity_cap(), |c, shat| words.push((c, to_mask(shat))))?;
    // Index by coefficient vector so that j = 0 is the zero middle word.
    words.sort_unstable_by_key(|&(c, _)| c);
    let words: Vec<u64> = words.into_iter().map(|(_, w)| w).collect();
    let r = radius(distortion, n) as u32;
    let sources = 1u64 << n;

    // Left side: Σ_s N(s)², N(s)·1 and 1{N(s) > 0}.
    let (sum_n, sum_n2, positive) = (0..sources)
        .into_par_iter()
        .map(|s| {
            let count = words.iter().filter(|&&w| (w ^ s).count_ones() <= r).count() as u128;
            (count, count * count, u128::from(count > 0))
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));

    // Right side: conditional probabilities given the zero codeword is good.
    let ball: Vec<u64> = (0..sources).filter(|s| s.count_ones() <= r).collect();
    let joint: u128 = words[1..]
        .par_iter()
        .map(|&w| ball.iter().filter(|&&s| (w ^ s).count_ones() <= r).count() as u128)
        .sum();
    let space = u128::from(sources);
    let mean = ratio(sum_n, space);
    let conditional_sum = ratio(joint, ball.len() as u128);
    let rhs = &mean + &mean * conditional_sum;
    Ok(SecondMoment {
        lhs: ratio(sum_n2, space),
        rhs,
        mean,
        pr_positive: ratio(positive, space),
    })
}

/// Monte Carlo estimate of `E[N]` over fresh `(code, source)` pairs with a
/// 99% normal-approximation interval. Trial `t` uses seeds derived from a
/// base seed drawn from `rng`, so trials run in parallel reproducibly.
pub fn estimate_expected_good<R: Rng + ?Sized>(
    spec: EnsembleSpec,
    distortion: f64,
    trials: usize,
    rng: &mut R,
) -> Result<MeanEstimate> {
    if trials == 0 {
        return Err(Error::Precondition("at least one trial required".into()));
    }
    spec.validate()?;
    let base: u64 = rng.gen();
    let counts = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let trial = derive_seed(base, t);
            let code = CompoundCode::sample(spec, derive_seed(trial, 0))?;
            let source = BitVector::random(spec.n, &mut seeded(derive_seed(trial, 1)));
            Ok(count_good_codewords(&code, &source, distortion)?.count as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean_interval(&counts, Z99))
}

/// Exact `Pr[wt(s) ≤ ⌊D·n⌋]` for a uniform source: `E[N]` of the code `{0}`.
pub fn ball_probability(n: usize, distortion: f64) -> BigRational {
    let r = radius(distortion, n);
    let mut binom = BigInt::one();
    let mut total = BigInt::zero();
    for t in 0..=r {
        total += &binom;
        binom = binom * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    BigRational::new(total, BigInt::one() << n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{assemble_compound, sample_ldgm};
    use crate::gf2::{gf2_matvec, SparseGF2Matrix};

    fn spec12() -> EnsembleSpec {
        EnsembleSpec::new(12, 12, 6, 4, 4, 8).unwrap()
    }

    #[test]
    fn radius_rounds_down() {
        assert_eq!(radius(0.25, 12), 3);
        assert_eq!(radius(0.2, 10), 2);
        assert_eq!(radius(0.29, 100), 29);
        assert_eq!(radius(0.3, 10), 3);
        assert_eq!(radius(1.0, 7), 7);
        assert_eq!(radius(0.0, 7), 0);
    }

    #[test]
    fn identity_bottom_code_has_single_word() {
        let g = sample_ldgm(10, 6, 3, &mut seeded(1));
        let code = assemble_compound(g, SparseGF2Matrix::identity(6)).unwrap();
        let all: Vec<_> = enumerate_codewords(&code).unwrap().collect();
        assert_eq!(all, vec![(BitVector::zeros(6), BitVector::zeros(10))]);
    }

    #[test]
    fn nullity_three_gives_eight_distinct_words() {
        let g = sample_ldgm(9, 5, 3, &mut seeded(2));
        let h = SparseGF2Matrix::from_dense_rows(5, &["11000".parse().unwrap(), "00111".parse().unwrap()]).unwrap();
        let code = assemble_compound(g, h).unwrap();
        assert_eq!(code.nullity(), 3);
        let zs: std::collections::HashSet<_> = enumerate_codewords(&code).unwrap().map(|(z, _)| z).collect();
        assert_eq!(zs.len(), 8);
    }

    #[test]
    fn enumeration_matches_brute_force_null_space() {
        let g = sample_ldgm(8, 6, 3, &mut seeded(3));
        let h = SparseGF2Matrix::from_dense_rows(6, &["110110".parse().unwrap(), "011011".parse().unwrap()]).unwrap();
        let code = assemble_compound(g.clone(), h.clone()).unwrap();
        let mut found: Vec<_> = enumerate_codewords(&code).unwrap().collect();
        let mut brute: Vec<_> = (0..64u64)
            .map(|mask| BitVector::from_u64(6, mask))
            .filter(|z| h.syndrome(z).unwrap().is_zero())
            .map(|z| {
                let s = gf2_matvec(&z, &g).unwrap();
                (z, s)
            })
            .collect();
        found.sort();
        brute.sort();
        assert_eq!(found, brute);
    }

    #[test]
    fn nullity_cap_enforced() {
        let code = CompoundCode::sample(EnsembleSpec::ldgm(40, 30, 3).unwrap(), 0).unwrap();
        assert!(matches!(
            enumerate_codewords_with_cap(&code, 20),
            Err(Error::EnumerationInfeasible { nullity: 30, cap: 20 })
        ));
        let s = BitVector::zeros(40);
        assert!(count_good_codewords_with_cap(&code, &s, 0.1, 20).is_err());
    }

    #[test]
    fn count_edge_cases() {
        let code = CompoundCode::sample(spec12(), 42).unwrap();
        let zero = BitVector::zeros(12);
        assert!(count_good_codewords(&code, &zero, 0.0).unwrap().count >= 1);
        let all = count_good_codewords(&code, &"010101010101".parse().unwrap(), 1.0).unwrap();
        assert_eq!(all.count, all.total_codewords);
        assert!(count_good_codewords(&code, &zero, 1.5).is_err());
        assert!(count_good_codewords(&code, &BitVector::zeros(11), 0.2).is_err());
    }

    #[test]
    fn seed42_golden_count() {
        let code = CompoundCode::sample(spec12(), 42).unwrap();
        let s: BitVector = "010101010101".parse().unwrap();
        let got = count_good_codewords(&code, &s, 0.25).unwrap();
        // Independent re-count straight from the definition.
        let brute = (0..1u64 << code.nullity())
            .filter(|&c| {
                let z = code.middle_word(c);
                let shat = gf2_matvec(&z, code.generator()).unwrap();
                crate::gf2::hamming_distance(&shat, &s).unwrap() <= 3
            })
            .count() as u64;
        assert_eq!(got.count, brute);
        assert_eq!(got.threshold, 3);
        assert_eq!(got.count, GOLDEN_SEED42_COUNT);
    }

    const GOLDEN_SEED42_COUNT: u64 = 2;

    #[test]
    fn count_monotone_in_distortion() {
        let code = CompoundCode::sample(spec12(), 5).unwrap();
        let s = BitVector::random(12, &mut seeded(6));
        let mut prev = 0;
        for i in 0..=12 {
            let c = count_good_codewords(&code, &s, i as f64 / 12.0).unwrap().count;
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn count_invariant_under_codeword_shift() {
        let code = CompoundCode::sample(spec12(), 8).unwrap();
        let mut rng = seeded(9);
        for _ in 0..20 {
            let s = BitVector::random(12, &mut rng);
            let c = code.reconstruction(rng.gen::<u64>() & ((1 << code.nullity()) - 1));
            for dist in [0.1, 0.25, 0.4] {
                let a = count_good_codewords(&code, &s, dist).unwrap();
                let b = count_good_codewords(&code, &s.xor(&c).unwrap(), dist).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn second_moment_single_codeword() {
        let g = sample_ldgm(8, 4, 3, &mut seeded(4));
        let code = assemble_compound(g, SparseGF2Matrix::identity(4)).unwrap();
        let sm = second_moment_identity(&code, 0.25).unwrap();
        let p = ball_probability(8, 0.25);
        assert_eq!(sm.lhs, p);
        assert_eq!(sm.rhs, p);
        assert_eq!(sm.mean, p);
        assert!(sm.shepp_holds());
    }

    #[test]
    fn second_moment_full_space() {
        let n = 6;
        let code = assemble_compound(SparseGF2Matrix::identity(n), SparseGF2Matrix::zeros(0, n)).unwrap();
        let sm = second_moment_identity(&code, 1.0 / 3.0).unwrap();
        // N(s) = |ball| = 1 + 6 + 15 = 22 for every s.
        assert_eq!(sm.mean, BigRational::from_integer(22.into()));
        assert_eq!(sm.lhs, BigRational::from_integer(484.into()));
        assert_eq!(sm.lhs, sm.rhs);
        assert_eq!(sm.pr_positive, BigRational::one());
    }

    /// Double sum over codeword pairs and sources, straight from the
    /// definition of E[N²] and the conditional probabilities.
    fn moments_by_definition(code: &CompoundCode, distortion: f64) -> (BigRational, BigRational) {
        let n = code.n();
        let r = radius(distortion, n);
        let words: Vec<BitVector> = enumerate_codewords(code).unwrap().map(|(_, s)| s).collect();
        let sources: Vec<BitVector> = (0..1u64 << n).map(|m| BitVector::from_u64(n, m)).collect();
        let good = |c: &BitVector, s: &BitVector| crate::gf2::hamming_distance(c, s).unwrap() <= r;
        let mut pairs = 0u128;
        let mut singles = 0u128;
        for s in &sources {
            for a in &words {
                if good(a, s) {
                    singles += 1;
                    pairs += words.iter().filter(|b| good(b, s)).count() as u128;
                }
            }
        }
        let total = 1u128 << n;
        let zero = BitVector::zeros(n);
        let conditioned: Vec<&BitVector> = sources.iter().filter(|s| good(&zero, s)).collect();
        let mut cond = BigRational::zero();
        // Index 0 of the Gray walk is the zero middle word.
        for c in words.iter().skip(1) {
            let hits = conditioned.iter().filter(|s| good(c, s)).count();
            cond += ratio(hits as u128, conditioned.len() as u128);
        }
        let mean = ratio(singles, total);
        (ratio(pairs, total), &mean + &mean * cond)
    }

    #[test]
    fn second_moment_matches_definition() {
        let spec = EnsembleSpec::new(10, 10, 5, 4, 4, 8).unwrap();
        let code = CompoundCode::sample(spec, 7).unwrap();
        let sm = second_moment_identity(&code, 0.2).unwrap();
        let (lhs, rhs) = moments_by_definition(&code, 0.2);
        assert_eq!(sm.lhs, lhs);
        assert_eq!(sm.rhs, rhs);
        assert_eq!(sm.lhs, sm.rhs);
    }

    #[test]
    fn second_moment_blocklength_cap() {
        let code = CompoundCode::sample(EnsembleSpec::new(24, 24, 12, 4, 4, 8).unwrap(), 0).unwrap();
        assert!(matches!(
            second_moment_identity(&code, 0.2),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn expected_good_full_radius() {
        let spec = EnsembleSpec::ldgm(10, 6, 3).unwrap();
        let est = estimate_expected_good(spec, 1.0, 50, &mut seeded(1)).unwrap();
        assert_eq!(est.mean, 64.0);
        assert_eq!(est.interval.lower, est.interval.upper);
    }

    #[test]
    fn expected_good_at_zero_distortion() {
        // Each codeword equals a uniform source with probability 2^-n, so
        // E[N] = E[2^nullity]·2^-n; for a plain LDGM code nullity = m.
        let spec = EnsembleSpec::ldgm(8, 4, 3).unwrap();
        let est = estimate_expected_good(spec, 0.0, 20_000, &mut seeded(2)).unwrap();
        let exact = 2f64.powi(4 - 8);
        assert!(
            (est.mean - exact).abs() < 4.0 * est.std_err.max(1e-3),
            "{} vs {exact}",
            est.mean
        );
    }

    #[test]
    fn weight_distribution_sums_to_codebook() {
        let code = CompoundCode::sample(spec12(), 3).unwrap();
        let hist = middle_weight_distribution(&code).unwrap();
        assert_eq!(hist.iter().sum::<u64>(), 1 << code.nullity());
        assert_eq!(hist[0], 1);
    }
}
