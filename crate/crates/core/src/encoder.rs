//! Quantizers: map a source word to a nearby compound-code reconstruction.
//!
//! Both encoders work in the coordinates of the cached null-space basis of
//! `H`, so every candidate middle word satisfies `H·zᵀ = 0` by construction.

use rand::Rng;
use rayon::prelude::*;

use crate::codebook::{nullity_cap, walk_distances};
use crate::ensembles::CompoundCode;
use crate::error::{Error, Result};
use crate::gf2::{hamming_distance, BitVector};
use crate::seed::{derive_seed, seeded};

#[derive(Clone, Debug, PartialEq)]
pub struct EncodeResult {
    /// Middle-layer word, a codeword of the bottom code.
    pub z: BitVector,
    pub reconstruction: BitVector,
    /// `distance / n`.
    pub distortion: f64,
    pub distance: usize,
    /// Set only by the exhaustive encoder.
    pub optimal: bool,
}

/// Fraction of positions where `s` and `shat` differ.
pub fn distortion(s: &BitVector, shat: &BitVector) -> Result<f64> {
    let dist = hamming_distance(s, shat)?;
    Ok(if s.is_empty() {
        0.0
    } else {
        dist as f64 / s.len() as f64
    })
}

fn check_source(code: &CompoundCode, s: &BitVector) -> Result<()> {
    if s.len() != code.n() {
        return Err(Error::Dimension {
            expected: code.n(),
            found: s.len(),
        });
    }
    Ok(())
}

/// Lexicographic rank of a coefficient mask with coefficient 0 most
/// significant.
fn lex_key(mask: u64, nullity: usize) -> u64 {
    if nullity == 0 {
        0
    } else {
        mask.reverse_bits() >> (64 - nullity)
    }
}

fn combine(vectors: &[BitVector], coefficients: &BitVector, len: usize) -> BitVector {
    let mut out = BitVector::zeros(len);
    for i in coefficients.support() {
        out.xor_words(&vectors[i]);
    }
    out
}

fn result_from_coefficients(
    code: &CompoundCode,
    s: &BitVector,
    coefficients: &BitVector,
    optimal: bool,
) -> EncodeResult {
    let z = combine(code.null_basis(), coefficients, code.m());
    let reconstruction = combine(code.basis_images(), coefficients, code.n());
    let distance = s.distance_words(&reconstruction);
    EncodeResult {
        z,
        reconstruction,
        distortion: if s.is_empty() {
            0.0
        } else {
            distance as f64 / s.len() as f64
        },
        distance,
        optimal,
    }
}

/// Nearest codeword by exhaustive search. Among equidistant codewords the
/// one with the lexicographically smallest basis-coefficient vector wins.
pub fn encode_optimal(code: &CompoundCode, s: &BitVector) -> Result<EncodeResult> {
    check_source(code, s)?;
    let r = code.nullity();
    let mut best = (usize::MAX, u64::MAX, 0u64);
    walk_distances(code, s, nullity_cap(), |mask, dist| {
        if dist <= best.0 {
            let key = lex_key(mask, r);
            if dist < best.0 || key < best.1 {
                best = (dist, key, mask);
            }
        }
    })?;
    let coefficients = BitVector::from_u64(r, best.2);
    Ok(result_from_coefficients(code, s, &coefficients, true))
}

/// One steepest-descent run: the final coefficients and the distance after
/// each accepted move, starting with the initial distance.
#[derive(Clone, Debug)]
pub struct Descent {
    pub coefficients: BitVector,
    pub trace: Vec<usize>,
}

/// Repeatedly flips the basis coefficient giving the largest distance
/// reduction (lowest index on ties) until no flip helps or `max_iters`
/// moves have been made.
pub fn descend(code: &CompoundCode, s: &BitVector, start: BitVector, max_iters: usize) -> Result<Descent> {
    check_source(code, s)?;
    if start.len() != code.nullity() {
        return Err(Error::Dimension {
            expected: code.nullity(),
            found: start.len(),
        });
    }
    let images = code.basis_images();
    let mut coefficients = start;
    let mut diff = combine(images, &coefficients, code.n());
    diff.xor_words(s);
    let mut current = diff.weight();
    let mut trace = vec![current];
    for _ in 0..max_iters {
        let best = images
            .iter()
            .enumerate()
            .map(|(i, img)| (diff.distance_words(img), i))
            .min();
        match best {
            Some((dist, i)) if dist < current => {
                coefficients.flip(i);
                diff.xor_words(&images[i]);
                current = dist;
                trace.push(current);
            }
            _ => break,
        }
    }
    Ok(Descent { coefficients, trace })
}

/// Best of `restarts` independent descents from uniformly random
/// coefficient vectors. Restart `i` is seeded from a base seed drawn from
/// `rng`, so results do not depend on scheduling; ties go to the lowest
/// restart index.
pub fn encode_local_search<R: Rng + ?Sized>(
    code: &CompoundCode,
    s: &BitVector,
    restarts: usize,
    max_iters: usize,
    rng: &mut R,
) -> Result<EncodeResult> {
    check_source(code, s)?;
    let base: u64 = rng.gen();
    let r = code.nullity();
    let runs = (0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|i| {
            let start = BitVector::random(r, &mut seeded(derive_seed(base, i)));
            let run = descend(code, s, start, max_iters)?;
            Ok((*run.trace.last().expect("trace is never empty"), i, run.coefficients))
        })
        .collect::<Result<Vec<_>>>()?;
    let (_, _, coefficients) = runs
        .into_iter()
        .min_by_key(|(dist, i, _)| (*dist, *i))
        .expect("at least one restart");
    Ok(result_from_coefficients(code, s, &coefficients, false))
}
