//! Text ingestion, suffix array, Burrows-Wheeler transform, LF-mapping and
//! entropy.
//!
//! Bytes are shifted up by one so that symbol 0 is free for the sentinel,
//! which is appended at ingestion and is the unique smallest symbol. All
//! positions are 0-based.

mod sais;

use crate::{Error, Result, Symbol, ALPHABET, SENTINEL};

/// A sentinel-terminated symbol sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Text {
    data: Vec<Symbol>,
}

impl Text {
    /// Ingest raw bytes: shift each byte by +1 and append the sentinel.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut data = Vec::with_capacity(bytes.len() + 1);
        data.extend(bytes.iter().map(|&b| b as Symbol + 1));
        data.push(SENTINEL);
        Text { data }
    }

    /// Wrap a symbol sequence, validating the sentinel invariant.
    pub fn from_symbols(data: Vec<Symbol>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidInput("text must not be empty".into()));
        }
        if *data.last().unwrap() != SENTINEL {
            return Err(Error::InvalidInput("text must end with the sentinel".into()));
        }
        if data.iter().filter(|&&c| c == SENTINEL).count() != 1 {
            return Err(Error::InvalidInput(
                "text must contain exactly one sentinel".into(),
            ));
        }
        if data.iter().any(|&c| c as usize >= ALPHABET) {
            return Err(Error::InvalidInput("symbol out of alphabet".into()));
        }
        Ok(Text { data })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always holds the sentinel
    }

    /// Recover the original bytes (drops the sentinel, shifts back down).
    pub fn to_bytes(&self) -> Vec<u8> {
        self.data[..self.data.len() - 1]
            .iter()
            .map(|&c| (c - 1) as u8)
            .collect()
    }
}

/// Lexicographically sorted suffix start positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SuffixArray {
    positions: Vec<u32>,
}

impl SuffixArray {
    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Build the suffix array of `text` with SA-IS.
pub fn build_suffix_array(text: &Text) -> SuffixArray {
    let widened: Vec<u32> = text.symbols().iter().map(|&c| c as u32).collect();
    SuffixArray {
        positions: sais::suffix_array(&widened, ALPHABET),
    }
}

/// The Burrows-Wheeler transform of a [`Text`].
#[derive(Debug, Clone, PartialEq)]
pub struct Bwt {
    symbols: Vec<Symbol>,
    sigma: usize,
}

impl Bwt {
    /// Wrap a symbol sequence as a BWT, validating the sentinel invariant.
    pub fn from_symbols(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidInput("BWT must not be empty".into()));
        }
        if symbols.iter().filter(|&&c| c == SENTINEL).count() != 1 {
            return Err(Error::InvalidInput(
                "BWT must contain exactly one sentinel".into(),
            ));
        }
        if symbols.iter().any(|&c| c as usize >= ALPHABET) {
            return Err(Error::InvalidInput("symbol out of alphabet".into()));
        }
        Ok(Bwt {
            symbols,
            sigma: ALPHABET,
        })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }
}

/// Read the BWT off a text and its suffix array: position `i` holds the
/// symbol cyclically preceding the `i`-th smallest suffix.
pub fn bwt_from_sa(text: &Text, sa: &SuffixArray) -> Result<Bwt> {
    if text.len() != sa.len() {
        return Err(Error::InvalidInput(format!(
            "text length {} does not match suffix array length {}",
            text.len(),
            sa.len()
        )));
    }
    let symbols = sa
        .positions()
        .iter()
        .map(|&p| {
            if p == 0 {
                SENTINEL
            } else {
                text.symbols()[p as usize - 1]
            }
        })
        .collect();
    Bwt::from_symbols(symbols)
}

/// Per-symbol occurrence counts plus the cumulative table `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharCounts {
    counts: Vec<u64>,
    c: Vec<u64>,
    total: u64,
}

impl CharCounts {
    /// Count occurrences of values in `[0, sigma)`.
    pub fn from_values<I: IntoIterator<Item = usize>>(values: I, sigma: usize) -> Self {
        let mut counts = vec![0u64; sigma];
        let mut total = 0u64;
        for v in values {
            counts[v] += 1;
            total += 1;
        }
        let mut c = Vec::with_capacity(sigma);
        let mut acc = 0u64;
        for &k in &counts {
            c.push(acc);
            acc += k;
        }
        CharCounts { counts, c, total }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of values strictly smaller than `v`.
    pub fn smaller(&self, v: usize) -> u64 {
        self.c[v]
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// The LF-mapping: position `i` in L maps to the position of the same
/// character occurrence in the sorted column F.
pub fn lf_mapping(bwt: &Bwt) -> Vec<u32> {
    let counts = CharCounts::from_values(bwt.symbols().iter().map(|&c| c as usize), bwt.sigma());
    let mut next = vec![0u32; bwt.sigma()];
    for (c, slot) in next.iter_mut().enumerate() {
        *slot = counts.smaller(c) as u32;
    }
    let mut lf = Vec::with_capacity(bwt.len());
    for &c in bwt.symbols() {
        let c = c as usize;
        lf.push(next[c]);
        next[c] += 1;
    }
    lf
}

/// Invert a BWT by walking the LF-mapping backwards from the sentinel row.
pub fn invert_bwt(bwt: &Bwt) -> Result<Text> {
    let n = bwt.len();
    let lf = lf_mapping(bwt);
    let mut out = vec![SENTINEL; n];
    let mut visited = vec![false; n];
    let mut j = 0usize;
    for i in (0..n - 1).rev() {
        if visited[j] {
            return Err(Error::corrupt(
                "LF walk revisits a position before reconstructing the text",
            ));
        }
        visited[j] = true;
        out[i] = bwt.symbols()[j];
        j = lf[j] as usize;
    }
    Text::from_symbols(out)
        .map_err(|_| Error::corrupt("LF walk produced a malformed text"))
}

/// Shannon entropy in bits per symbol: `log n - (1/n) * sum c_c * log c_c`.
pub fn entropy(counts: &CharCounts) -> Result<f64> {
    let n = counts.total();
    if n == 0 {
        return Err(Error::InvalidInput("entropy of an empty string".into()));
    }
    let n = n as f64;
    let mut acc = 0.0;
    for &k in counts.counts() {
        if k > 0 {
            acc += k as f64 * (k as f64).log2();
        }
    }
    Ok(n.log2() - acc / n)
}
