//! Bit-packed binary vectors and column matrices over {0,1}.
//!
//! Bits are stored least-significant-first inside `u64` words. Bits past
//! `dim` in the last word are always zero, so the derived `Hash`/`Eq` only
//! ever see the payload.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

const WORD: usize = 64;

type Words = SmallVec<[u64; 2]>;

fn words_for(dim: usize) -> usize {
    dim.div_ceil(WORD)
}

/// The binary gates that can combine two vectors elementwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    Xor,
    And,
    Or,
    Xnor,
    Nand,
    Nor,
}

impl Gate {
    pub const ALL: [Gate; 6] = [
        Gate::Xor,
        Gate::And,
        Gate::Or,
        Gate::Xnor,
        Gate::Nand,
        Gate::Nor,
    ];

    /// Scalar truth table.
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            Gate::Xor => a ^ b,
            Gate::And => a & b,
            Gate::Or => a | b,
            Gate::Xnor => !(a ^ b),
            Gate::Nand => !(a & b),
            Gate::Nor => !(a | b),
        }
    }

    #[inline]
    fn apply_word(self, a: u64, b: u64) -> u64 {
        match self {
            Gate::Xor => a ^ b,
            Gate::And => a & b,
            Gate::Or => a | b,
            Gate::Xnor => !(a ^ b),
            Gate::Nand => !(a & b),
            Gate::Nor => !(a | b),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::Xor => "XOR",
            Gate::And => "AND",
            Gate::Or => "OR",
            Gate::Xnor => "XNOR",
            Gate::Nand => "NAND",
            Gate::Nor => "NOR",
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryVector {
    dim: usize,
    words: Words,
}

impl BinaryVector {
    pub fn zeros(dim: usize) -> Self {
        BinaryVector {
            dim,
            words: smallvec![0; words_for(dim)],
        }
    }

    pub fn ones(dim: usize) -> Self {
        let mut v = BinaryVector {
            dim,
            words: smallvec![u64::MAX; words_for(dim)],
        };
        v.clear_padding();
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector of `dim` bits from the low bits of `value` (bit 0 first).
    pub fn from_u64(dim: usize, value: u64) -> Self {
        assert!(dim <= WORD, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(dim);
        if dim > 0 {
            v.words[0] = value;
            v.clear_padding();
        }
        v
    }

    pub(crate) fn from_words(dim: usize, words: &[u64]) -> Self {
        debug_assert_eq!(words.len(), words_for(dim));
        let mut v = BinaryVector {
            dim,
            words: SmallVec::from_slice(words),
        };
        v.clear_padding();
        v
    }

    fn clear_padding(&mut self) {
        let rem = self.dim % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// Low 64 bits as an integer; only meaningful when `dim <= 64`.
    pub fn as_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.dim, "bit {i} out of range for dim {}", self.dim);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.dim, "bit {i} out of range for dim {}", self.dim);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.dim).map(move |i| self.get(i))
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::dim(self.dim, other.dim));
        }
        Ok(())
    }

    /// Elementwise `gate(self[i], other[i])`.
    pub fn op(&self, other: &Self, gate: Gate) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.op_unchecked(other, gate))
    }

    pub(crate) fn op_unchecked(&self, other: &Self, gate: Gate) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = BinaryVector {
            dim: self.dim,
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(&a, &b)| gate.apply_word(a, b))
                .collect(),
        };
        out.clear_padding();
        out
    }

    pub fn not(&self) -> Self {
        let mut out = BinaryVector {
            dim: self.dim,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_padding();
        out
    }

    pub(crate) fn xor(&self, other: &Self) -> Self {
        self.op_unchecked(other, Gate::Xor)
    }

    pub(crate) fn and(&self, other: &Self) -> Self {
        self.op_unchecked(other, Gate::And)
    }

    /// Also used as the row-wise max of exponent columns.
    pub(crate) fn or(&self, other: &Self) -> Self {
        self.op_unchecked(other, Gate::Or)
    }

    pub(crate) fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a ^= b;
        }
    }

    /// `self` with `other`'s bits appended after it.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.dim + other.dim);
        out.write_at(0, self);
        out.write_at(self.dim, other);
        out
    }

    /// Copies `src` into `self` starting at bit `offset`.
    pub(crate) fn write_at(&mut self, offset: usize, src: &Self) {
        assert!(offset + src.dim <= self.dim);
        if offset.is_multiple_of(WORD) {
            let base = offset / WORD;
            for (i, &w) in src.words.iter().enumerate() {
                self.words[base + i] |= w;
            }
        } else {
            for i in 0..src.dim {
                if src.get(i) {
                    self.set(offset + i, true);
                }
            }
        }
    }

    /// Bits `start..start+len`.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        assert!(start + len <= self.dim);
        let mut out = Self::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    /// Zero-extends to `dim` by appending zero bits.
    pub(crate) fn extend_to(&self, dim: usize) -> Self {
        assert!(dim >= self.dim);
        let mut out = Self::zeros(dim);
        out.write_at(0, self);
        out
    }
}

/// Lexicographic on the bit string, after dimension.
impl Ord for BinaryVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim.cmp(&other.dim).then_with(|| {
            for (a, b) in self.words.iter().zip(other.words.iter()) {
                match a.reverse_bits().cmp(&b.reverse_bits()) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for BinaryVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for BinaryVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::BitString(s.to_string()));
        }
        let mut v = Self::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => v.set(i, true),
                _ => return Err(Error::BitString(s.to_string())),
            }
        }
        Ok(v)
    }
}

impl Serialize for BinaryVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BinaryVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A matrix stored as a list of columns, each of `rows` bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    columns: Vec<BinaryVector>,
}

impl BinaryMatrix {
    pub fn empty(rows: usize) -> Self {
        BinaryMatrix {
            rows,
            columns: Vec::new(),
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<BinaryVector>) -> Result<Self> {
        if let Some(bad) = columns.iter().find(|c| c.dim() != rows) {
            return Err(Error::dim(rows, bad.dim()));
        }
        Ok(BinaryMatrix { rows, columns })
    }

    pub(crate) fn from_columns_unchecked(rows: usize, columns: Vec<BinaryVector>) -> Self {
        debug_assert!(columns.iter().all(|c| c.dim() == rows));
        BinaryMatrix { rows, columns }
    }

    pub fn identity(n: usize) -> Self {
        let columns = (0..n)
            .map(|i| {
                let mut c = BinaryVector::zeros(n);
                c.set(i, true);
                c
            })
            .collect();
        BinaryMatrix { rows: n, columns }
    }

    /// Builds from row-major nested bits, e.g. `[[1,1],[0,1]]`.
    pub fn from_rows(rows: &[&[u8]]) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, |r| r.len());
        let mut columns = vec![BinaryVector::zeros(n); cols];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::dim(cols, row.len()));
            }
            for (j, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => columns[j].set(i, true),
                    _ => return Err(Error::BitString(format!("{b}"))),
                }
            }
        }
        Ok(BinaryMatrix { rows: n, columns })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &BinaryVector {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[BinaryVector] {
        &self.columns
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.columns[j].get(i)
    }

    pub fn into_columns(self) -> Vec<BinaryVector> {
        self.columns
    }

    pub fn row(&self, i: usize) -> BinaryVector {
        BinaryVector::from_bits(&self.columns.iter().map(|c| c.get(i)).collect::<Vec<_>>())
    }

    pub fn push(&mut self, column: BinaryVector) -> Result<()> {
        if column.dim() != self.rows {
            return Err(Error::dim(self.rows, column.dim()));
        }
        self.columns.push(column);
        Ok(())
    }

    /// Side-by-side `[self, other]`.
    pub fn hconcat(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::dim(self.rows, other.rows));
        }
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        Ok(BinaryMatrix {
            rows: self.rows,
            columns,
        })
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryMatrix({}x{})[", self.rows, self.cols())?;
        for (k, c) in self.columns.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}
