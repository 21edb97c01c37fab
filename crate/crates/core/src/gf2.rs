//! Dense bit vectors and sparse matrices over GF(2).
//!
//! [`BitVector`] packs bits into `u64` words so that XOR and Hamming
//! distance run a word at a time. [`SparseGF2Matrix`] keeps, for every
//! column, the sorted list of rows holding a one; entries are always
//! reduced mod 2, so an index appears at most once per column.
//!
//! Rank and null space are computed by Gaussian elimination on a dense
//! copy of the rows. Pivots are chosen column by column from the left,
//! swapping rows as needed, which makes the returned null-space basis
//! deterministic.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A fixed-length binary word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; word_count(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            words: vec![!0; word_count(len)],
            len,
        };
        v.clear_tail();
        v
    }

    /// Unit vector with only bit `i` set.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD_BITS == 0 {
                words.push(0);
            }
            if b {
                words[len / WORD_BITS] |= 1 << (len % WORD_BITS);
            }
            len += 1;
        }
        Self { words, len }
    }

    /// Builds a vector of length `len` with ones at the given positions.
    /// A position listed twice cancels.
    pub fn from_positions(len: usize, positions: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &p in positions {
            v.flip(p);
        }
        v
    }

    /// Uniformly random word, i.e. a Bernoulli(1/2) source.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self {
            words: (0..word_count(len)).map(|_| rng.gen()).collect(),
            len,
        };
        v.clear_tail();
        v
    }

    /// The low `len` bits of `mask`, bit `i` of the mask becoming entry `i`.
    pub fn from_u64(len: usize, mask: u64) -> Self {
        assert!(len <= WORD_BITS);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = mask;
            v.clear_tail();
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// Number of ones.
    #[inline]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Positions of the ones, increasing.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * WORD_BITS + b);
                w &= w - 1;
            }
        }
        out
    }

    pub fn complement(&self) -> Self {
        let mut v = Self {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        v.clear_tail();
        v
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &Self) -> Result<()> {
        check_len(self.len, other.len)?;
        self.xor_words(other);
        Ok(())
    }

    /// XOR without the length check; callers guarantee equal lengths.
    #[inline]
    pub(crate) fn xor_words(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Weight of `self ⊕ other` without allocating.
    #[inline]
    pub(crate) fn distance_words(&self, other: &Self) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Parity of the bits at `positions`.
    #[inline]
    pub fn parity_at(&self, positions: &[usize]) -> bool {
        positions.iter().fold(false, |acc, &p| acc ^ self.get(p))
    }

    /// Hex encoding, most significant bit of each nibble first; the last
    /// nibble is zero-padded.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.len.div_ceil(4));
        for chunk in 0..self.len.div_ceil(4) {
            let mut nibble = 0u8;
            for j in 0..4 {
                let i = chunk * 4 + j;
                if i < self.len && self.get(i) {
                    nibble |= 8 >> j;
                }
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    /// Inverse of [`BitVector::to_hex`]. Whitespace is ignored; the padding
    /// bits of the final nibble must be zero.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let digits: Vec<char> = hex.chars().filter(|c| !c.is_whitespace()).collect();
        if digits.len() != len.div_ceil(4) {
            return Err(Error::Parse {
                line: 1,
                msg: format!(
                    "expected {} hex digits for {len} bits, found {}",
                    len.div_ceil(4),
                    digits.len()
                ),
            });
        }
        let mut v = Self::zeros(len);
        for (chunk, c) in digits.iter().enumerate() {
            let nibble = c.to_digit(16).ok_or_else(|| Error::Parse {
                line: 1,
                msg: format!("invalid hex digit {c:?}"),
            })?;
            for j in 0..4 {
                let i = chunk * 4 + j;
                let bit = nibble & (8 >> j) != 0;
                if i < len {
                    v.set(i, bit);
                } else if bit {
                    return Err(Error::Parse {
                        line: 1,
                        msg: "nonzero padding bits in final hex digit".into(),
                    });
                }
            }
        }
        Ok(v)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BitVector {
    type Err = Error;

    /// Parses a string of `0`/`1` characters.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse {
                    line: 1,
                    msg: format!("invalid bit character {c:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_bits)
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension { expected, found });
    }
    Ok(())
}

/// Number of positions where `a` and `b` differ.
pub fn hamming_distance(a: &BitVector, b: &BitVector) -> Result<usize> {
    check_len(a.len(), b.len())?;
    Ok(a.distance_words(b))
}

/// Sparse binary matrix stored by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseGF2Matrix {
    rows: usize,
    cols: usize,
    column_support: Vec<Vec<usize>>,
}

impl SparseGF2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            column_support: vec![Vec::new(); cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        Self {
            rows: size,
            cols: size,
            column_support: (0..size).map(|i| vec![i]).collect(),
        }
    }

    /// Builds a matrix from per-column row lists. Lists need not be sorted;
    /// repeated indices within a column cancel in pairs.
    pub fn from_columns(rows: usize, columns: Vec<Vec<usize>>) -> Result<Self> {
        let cols = columns.len();
        let column_support = columns
            .into_iter()
            .map(|c| reduce_mod2(c, rows))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            rows,
            cols,
            column_support,
        })
    }

    /// Builds a matrix from `(row, col)` incidences, cancelling repeats mod 2.
    pub fn from_entries(rows: usize, cols: usize, entries: &[(usize, usize)]) -> Result<Self> {
        let mut columns = vec![Vec::new(); cols];
        for &(r, c) in entries {
            if c >= cols {
                return Err(Error::IndexOutOfRange { index: c, bound: cols });
            }
            columns[c].push(r);
        }
        Self::from_columns(rows, columns)
    }

    /// Builds a matrix from dense rows (each of length `cols`).
    pub fn from_dense_rows(cols: usize, dense: &[BitVector]) -> Result<Self> {
        let mut columns = vec![Vec::new(); cols];
        for (r, row) in dense.iter().enumerate() {
            check_len(cols, row.len())?;
            for c in row.support() {
                columns[c].push(r);
            }
        }
        Self::from_columns(dense.len(), columns)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Sorted row indices of the ones in column `j`.
    #[inline]
    pub fn column(&self, j: usize) -> &[usize] {
        &self.column_support[j]
    }

    pub fn columns(&self) -> &[Vec<usize>] {
        &self.column_support
    }

    /// Sorted column indices of the ones in each row.
    pub fn row_supports(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![Vec::new(); self.rows];
        for (c, col) in self.column_support.iter().enumerate() {
            for &r in col {
                rows[r].push(c);
            }
        }
        rows
    }

    pub fn nnz(&self) -> usize {
        self.column_support.iter().map(Vec::len).sum()
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            column_support: self.row_supports(),
        }
    }

    /// Dense copies of the rows.
    pub fn dense_rows(&self) -> Vec<BitVector> {
        let mut rows = vec![BitVector::zeros(self.cols); self.rows];
        for (c, col) in self.column_support.iter().enumerate() {
            for &r in col {
                rows[r].set(c, true);
            }
        }
        rows
    }

    /// `H·zᵀ`: the syndrome of a length-`cols` word.
    pub fn syndrome(&self, z: &BitVector) -> Result<BitVector> {
        check_len(self.cols, z.len())?;
        let mut out = BitVector::zeros(self.rows);
        for c in z.support() {
            for &r in &self.column_support[c] {
                out.flip(r);
            }
        }
        Ok(out)
    }
}

fn reduce_mod2(mut col: Vec<usize>, rows: usize) -> Result<Vec<usize>> {
    if let Some(&bad) = col.iter().find(|&&r| r >= rows) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            bound: rows,
        });
    }
    col.sort_unstable();
    let mut out = Vec::with_capacity(col.len());
    for r in col {
        if out.last() == Some(&r) {
            out.pop();
        } else {
            out.push(r);
        }
    }
    Ok(out)
}

/// `z·G`: output bit `j` is the parity of `z` over the support of column `j`.
pub fn gf2_matvec(z: &BitVector, g: &SparseGF2Matrix) -> Result<BitVector> {
    check_len(g.rows(), z.len())?;
    Ok(BitVector::from_bits(g.columns().iter().map(|col| z.parity_at(col))))
}

/// Reduced row echelon form with the list of pivot columns.
struct Echelon {
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
}

fn row_reduce(h: &SparseGF2Matrix) -> Echelon {
    let mut rows = h.dense_rows();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..h.cols() {
        if next == rows.len() {
            break;
        }
        let Some(p) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(next, p);
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row.get(col) {
                row.xor_words(&pivot_row);
            }
        }
        pivots.push(col);
        next += 1;
    }
    rows.truncate(next);
    Echelon { rows, pivots }
}

/// Rank over GF(2).
pub fn gf2_rank(h: &SparseGF2Matrix) -> usize {
    row_reduce(h).pivots.len()
}

/// Basis of `{z : H·zᵀ = 0}`, one vector per free column in increasing
/// column order. Each vector has a one at its free column and is zero on
/// every other free column.
pub fn null_space_basis(h: &SparseGF2Matrix) -> Vec<BitVector> {
    let ech = row_reduce(h);
    let mut is_pivot = vec![false; h.cols()];
    for &p in &ech.pivots {
        is_pivot[p] = true;
    }
    let basis: Vec<BitVector> = (0..h.cols())
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut b = BitVector::unit(h.cols(), free);
            for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                if row.get(free) {
                    b.set(p, true);
                }
            }
            b
        })
        .collect();
    for b in &basis {
        assert!(
            h.syndrome(b).expect("basis length matches").is_zero(),
            "null-space basis vector fails parity checks"
        );
    }
    basis
}
