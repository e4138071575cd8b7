//! Plain bitvector with O(1) rank and O(log n) select.
//!
//! Rank support is a cumulative popcount per 64-bit word; select binary
//! searches the cumulative table and scans the final word. Positions are
//! 0-based throughout.

use crate::{Error, Result};

/// An immutable sequence of bits with rank/select support.
#[derive(Debug, Clone, PartialEq)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
    // ones in words[..i], one entry per word plus a trailing total
    cum: Vec<u64>,
}

impl BitVector {
    /// Build from explicit bits.
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Self::from_words(words, bits.len())
    }

    /// A bitvector of `len` ones.
    pub fn ones(len: usize) -> Self {
        let mut words = vec![!0u64; len.div_ceil(64)];
        if len % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        Self::from_words(words, len)
    }

    fn from_words(words: Vec<u64>, len: usize) -> Self {
        let mut cum = Vec::with_capacity(words.len() + 1);
        let mut total = 0u64;
        for &w in &words {
            cum.push(total);
            total += w.count_ones() as u64;
        }
        cum.push(total);
        Self { words, len, cum }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of set bits.
    pub fn count_ones(&self) -> usize {
        *self.cum.last().unwrap() as usize
    }

    /// Bit at position `i`. Panics if `i >= len`.
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of bounds (len {})", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Number of set bits in positions `[0, i)`. `i` may equal `len`.
    pub fn rank1(&self, i: usize) -> usize {
        assert!(i <= self.len, "rank index {i} out of bounds (len {})", self.len);
        let w = i / 64;
        let mut r = self.cum[w];
        let rem = i % 64;
        if rem != 0 {
            r += (self.words[w] & ((1u64 << rem) - 1)).count_ones() as u64;
        }
        r as usize
    }

    /// Position of the `k`-th set bit, `k >= 1`.
    pub fn select1(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.count_ones() {
            return Err(Error::OutOfRange(format!(
                "select1({k}) with {} ones",
                self.count_ones()
            )));
        }
        let k = k as u64;
        // last word index with cum[w] < k
        let mut lo = 0usize;
        let mut hi = self.words.len();
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            if self.cum[mid] < k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut remaining = (k - self.cum[lo]) as u32;
        let mut w = self.words[lo];
        let mut pos = lo * 64;
        loop {
            if w & 1 == 1 {
                remaining -= 1;
                if remaining == 0 {
                    return Ok(pos);
                }
            }
            w >>= 1;
            pos += 1;
        }
    }
}
