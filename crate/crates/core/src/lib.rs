//! Compound LDGM/LDPC codes for lossy compression of binary sources.
//!
//! - [`gf2`]: bit vectors, sparse binary matrices, rank and null space.
//! - [`ensembles`]: random LDGM and regular LDPC ensembles, compound codes,
//!   alist I/O.
//! - [`codebook`]: exhaustive codebook enumeration and good-codeword counts.
//! - [`encoder`]: optimal and local-search quantizers.
//! - [`bounds`]: entropy, weight enumerators, excess rate, degree feasibility.
//! - [`harness`]: seeded sweeps, statistical verification suites, figure data.

pub mod bounds;
pub mod codebook;
pub mod encoder;
pub mod ensembles;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
