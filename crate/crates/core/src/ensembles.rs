//! Random LDGM and regular LDPC ensembles and the compound code built from them.
//!
//! The top code is an LDGM code with an `m × n` generator `G`: every one of
//! the `n` columns picks `d` rows independently and uniformly *with*
//! replacement, and repeated picks cancel mod 2. The bottom code is drawn
//! from Gallager's `(λ, γ)`-regular ensemble by a uniform matching of
//! variable sockets to check sockets (configuration model); multi-edges
//! cancel mod 2 and are kept.
//!
//! A [`CompoundCode`] joins the two: reconstructions are `z·G` for every
//! middle-layer word `z` with `H·zᵀ = 0`.

pub mod alist;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{gf2_matvec, gf2_rank, null_space_basis, BitVector, SparseGF2Matrix};
use crate::seed::seeded;

/// Parameters of the compound ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    /// Source blocklength.
    pub n: usize,
    /// Middle-layer size.
    pub m: usize,
    /// Number of bottom parity checks.
    pub k: usize,
    /// LDGM check degree.
    pub d: usize,
    /// LDPC variable degree.
    pub lambda: usize,
    /// LDPC check degree (even).
    pub gamma: usize,
}

impl EnsembleSpec {
    pub fn new(n: usize, m: usize, k: usize, d: usize, lambda: usize, gamma: usize) -> Result<Self> {
        let spec = Self {
            n,
            m,
            k,
            d,
            lambda,
            gamma,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Plain LDGM ensemble (no bottom checks, `R_b = 1`).
    pub fn ldgm(n: usize, m: usize, d: usize) -> Result<Self> {
        Self::new(n, m, 0, d, 0, 0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::Spec("n and m must be positive".into()));
        }
        if self.d == 0 {
            return Err(Error::Spec("LDGM degree d must be at least 1".into()));
        }
        if self.m > self.n {
            return Err(Error::Spec(format!("top rate m/n = {}/{} exceeds 1", self.m, self.n)));
        }
        if self.k >= self.m {
            return Err(Error::Spec(format!(
                "bottom rate 1 - k/m must be positive (k = {}, m = {})",
                self.k, self.m
            )));
        }
        check_sockets(self.m, self.k, self.lambda, self.gamma)?;
        if self.k > 0 && self.lambda == 0 {
            return Err(Error::Spec("bottom checks need a positive variable degree".into()));
        }
        Ok(())
    }

    /// Top rate `m/n`.
    pub fn top_rate(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    /// Nominal bottom rate `1 − k/m`.
    pub fn bottom_rate(&self) -> f64 {
        1.0 - self.k as f64 / self.m as f64
    }

    /// Nominal overall rate `R_t·R_b = (m − k)/n`.
    pub fn rate(&self) -> f64 {
        (self.m - self.k) as f64 / self.n as f64
    }
}

fn check_sockets(m: usize, k: usize, lambda: usize, gamma: usize) -> Result<()> {
    if !gamma.is_multiple_of(2) {
        return Err(Error::Spec(format!("check degree gamma = {gamma} must be even")));
    }
    if m * lambda != k * gamma {
        return Err(Error::Spec(format!(
            "socket counts differ: m*lambda = {} but k*gamma = {}",
            m * lambda,
            k * gamma
        )));
    }
    Ok(())
}

/// Samples an `m × n` LDGM generator: each column takes `d` independent
/// uniform row draws, reduced mod 2.
pub fn sample_ldgm<R: Rng + ?Sized>(n: usize, m: usize, d: usize, rng: &mut R) -> SparseGF2Matrix {
    assert!(d >= 1 && m >= 1, "sample_ldgm needs d >= 1 and m >= 1");
    let columns = (0..n).map(|_| (0..d).map(|_| rng.gen_range(0..m)).collect()).collect();
    SparseGF2Matrix::from_columns(m, columns).expect("draws lie in 0..m")
}

/// Samples a `k × m` parity-check matrix from the `(λ, γ)`-regular
/// configuration-model ensemble.
pub fn sample_ldpc<R: Rng + ?Sized>(
    m: usize,
    k: usize,
    lambda: usize,
    gamma: usize,
    rng: &mut R,
) -> Result<SparseGF2Matrix> {
    check_sockets(m, k, lambda, gamma)?;
    let matching = sample_socket_matching(m, lambda, rng);
    let entries: Vec<(usize, usize)> = matching
        .iter()
        .enumerate()
        .map(|(socket, &var)| (socket / gamma.max(1), var))
        .collect();
    SparseGF2Matrix::from_entries(k, m, &entries)
}

/// Variable attached to each check socket, check sockets ordered so that
/// check `c` owns sockets `c·γ .. (c+1)·γ`. Returned before any mod-2
/// reduction, so callers can inspect pre-reduction degrees.
pub fn sample_socket_matching<R: Rng + ?Sized>(m: usize, lambda: usize, rng: &mut R) -> Vec<usize> {
    let mut sockets: Vec<usize> = (0..m).flat_map(|v| std::iter::repeat_n(v, lambda)).collect();
    sockets.shuffle(rng);
    sockets
}

/// A compound LDGM/LDPC code with its middle-layer null-space basis cached.
#[derive(Clone, Debug)]
pub struct CompoundCode {
    g: SparseGF2Matrix,
    h: SparseGF2Matrix,
    rank_h: usize,
    null_basis: Vec<BitVector>,
    /// `b·G` for every basis vector `b`.
    basis_images: Vec<BitVector>,
    spec: Option<EnsembleSpec>,
    seed: Option<u64>,
}

/// Joins generator `g` (m × n) and parity checks `h` (k × m).
pub fn assemble_compound(g: SparseGF2Matrix, h: SparseGF2Matrix) -> Result<CompoundCode> {
    if g.rows() != h.cols() {
        return Err(Error::Dimension {
            expected: g.rows(),
            found: h.cols(),
        });
    }
    let rank_h = gf2_rank(&h);
    let null_basis = null_space_basis(&h);
    let basis_images = null_basis
        .iter()
        .map(|b| gf2_matvec(b, &g))
        .collect::<Result<Vec<_>>>()?;
    Ok(CompoundCode {
        g,
        h,
        rank_h,
        null_basis,
        basis_images,
        spec: None,
        seed: None,
    })
}

impl CompoundCode {
    /// Draws `G` then `H` from one stream seeded with `seed`.
    pub fn sample(spec: EnsembleSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut rng = seeded(seed);
        let g = sample_ldgm(spec.n, spec.m, spec.d, &mut rng);
        let h = sample_ldpc(spec.m, spec.k, spec.lambda, spec.gamma, &mut rng)?;
        Ok(assemble_compound(g, h)?.with_provenance(Some(spec), Some(seed)))
    }

    /// Attaches the ensemble parameters and seed recorded in metadata.
    pub fn with_provenance(mut self, spec: Option<EnsembleSpec>, seed: Option<u64>) -> Self {
        self.spec = spec;
        self.seed = seed;
        self
    }

    pub fn generator(&self) -> &SparseGF2Matrix {
        &self.g
    }

    pub fn parity_check(&self) -> &SparseGF2Matrix {
        &self.h
    }

    pub fn spec(&self) -> Option<&EnsembleSpec> {
        self.spec.as_ref()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Source blocklength.
    pub fn n(&self) -> usize {
        self.g.cols()
    }

    /// Middle-layer size.
    pub fn m(&self) -> usize {
        self.g.rows()
    }

    /// Number of bottom checks.
    pub fn k(&self) -> usize {
        self.h.rows()
    }

    pub fn rank_h(&self) -> usize {
        self.rank_h
    }

    /// `m − rank(H)`: log₂ of the number of valid middle-layer words.
    pub fn nullity(&self) -> usize {
        self.null_basis.len()
    }

    pub fn null_basis(&self) -> &[BitVector] {
        &self.null_basis
    }

    pub fn basis_images(&self) -> &[BitVector] {
        &self.basis_images
    }

    /// Nominal rate `(m − k)/n`.
    pub fn nominal_rate(&self) -> f64 {
        (self.m() as f64 - self.k() as f64) / self.n() as f64
    }

    /// Rate from the true codebook size, `(m − rank H)/n`.
    pub fn true_rate(&self) -> f64 {
        self.nullity() as f64 / self.n() as f64
    }

    /// Middle-layer word `Σ cᵢ·bᵢ` for coefficient mask `c` (bit `i` ↔ basis `i`).
    pub fn middle_word(&self, coefficients: u64) -> BitVector {
        let mut z = BitVector::zeros(self.m());
        for (i, b) in self.null_basis.iter().enumerate() {
            if coefficients >> i & 1 == 1 {
                z.xor_words(b);
            }
        }
        z
    }

    /// Reconstruction `z·G` for coefficient mask `c`, built from cached images.
    pub fn reconstruction(&self, coefficients: u64) -> BitVector {
        let mut s = BitVector::zeros(self.n());
        for (i, img) in self.basis_images.iter().enumerate() {
            if coefficients >> i & 1 == 1 {
                s.xor_words(img);
            }
        }
        s
    }

    /// Whether `z` satisfies every bottom check.
    pub fn is_valid_middle(&self, z: &BitVector) -> Result<bool> {
        Ok(self.h.syndrome(z)?.is_zero())
    }

    /// `z·G`, checking that `z` satisfies the bottom code.
    pub fn encode_middle(&self, z: &BitVector) -> Result<BitVector> {
        if !self.is_valid_middle(z)? {
            return Err(Error::Precondition("middle word violates parity checks".into()));
        }
        gf2_matvec(z, &self.g)
    }
}
