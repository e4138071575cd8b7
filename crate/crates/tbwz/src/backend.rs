//! The compression backend: run-length encoding for the estimator model,
//! and the wire pipeline MTF -> zero-run coding -> canonical Huffman, plus
//! the container format.
//!
//! The same pipeline encodes both the (tunneled) BWT and the aux vector.
//! Everything here is deterministic and bit-exact: ties in the Huffman
//! construction break by (count, symbol), codes are canonical, and the
//! container layout is fixed.

use crate::blocks::Run;
use crate::{Error, Result, Symbol};

/// Number of binary digit symbols the run-length encoding spends on a run
/// of height `h` (the leading one bit is cut).
pub fn digit_count(h: u64) -> u32 {
    debug_assert!(h >= 1);
    63 - h.leading_zeros()
}

/// First digit symbol of the run-length alphabet (value bit 0).
pub const RLE_DIGIT0: u16 = 257;
/// Second digit symbol of the run-length alphabet (value bit 1).
pub const RLE_DIGIT1: u16 = 258;

/// Run-length encode: each maximal run of symbol `c` and height `h` becomes
/// `c` followed by the binary digits of `h` with the leading one removed,
/// most significant first.
pub fn rl_encode(seq: &[Symbol]) -> Vec<u16> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < seq.len() {
        let mut j = i + 1;
        while j < seq.len() && seq[j] == seq[i] {
            j += 1;
        }
        let h = (j - i) as u64;
        out.push(seq[i]);
        let digits = digit_count(h);
        for k in (0..digits).rev() {
            out.push(if h >> k & 1 == 1 { RLE_DIGIT1 } else { RLE_DIGIT0 });
        }
        i = j;
    }
    out
}

/// Inverse of [`rl_encode`].
pub fn rl_decode(rle: &[u16]) -> Result<Vec<Symbol>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < rle.len() {
        let head = rle[i];
        if head >= RLE_DIGIT0 {
            return Err(Error::corrupt("run-length digits without a run head"));
        }
        i += 1;
        let mut h = 1u64;
        while i < rle.len() && rle[i] >= RLE_DIGIT0 {
            if h > 1 << 40 {
                return Err(Error::corrupt("run height overflow"));
            }
            h = h * 2 + (rle[i] - RLE_DIGIT0) as u64;
            i += 1;
        }
        out.extend(std::iter::repeat(head as Symbol).take(h as usize));
    }
    Ok(out)
}

/// Length of `rl_encode` of a BWT with these runs; the single source for
/// the estimator quantities.
pub fn rl_encoded_len(runs: &[Run]) -> u64 {
    runs.iter()
        .map(|r| 1 + digit_count(r.height as u64) as u64)
        .sum()
}

/// Move-to-front over a fixed alphabet `[0, sigma)`, table initially in
/// ascending symbol order.
pub fn mtf_encode(seq: &[u16], sigma: usize) -> Result<Vec<u16>> {
    let mut table: Vec<u16> = (0..sigma as u16).collect();
    let mut out = Vec::with_capacity(seq.len());
    for &s in seq {
        if s as usize >= sigma {
            return Err(Error::corrupt("symbol outside the MTF alphabet"));
        }
        let idx = table.iter().position(|&t| t == s).unwrap();
        out.push(idx as u16);
        table[..=idx].rotate_right(1);
    }
    Ok(out)
}

/// Inverse of [`mtf_encode`].
pub fn mtf_decode(indices: &[u16], sigma: usize) -> Result<Vec<u16>> {
    let mut table: Vec<u16> = (0..sigma as u16).collect();
    let mut out = Vec::with_capacity(indices.len());
    for &idx in indices {
        let idx = idx as usize;
        if idx >= sigma {
            return Err(Error::corrupt("MTF index outside the alphabet"));
        }
        out.push(table[idx]);
        table[..=idx].rotate_right(1);
    }
    Ok(out)
}

/// Zero-run symbol emitted for a bijective-base-2 digit of value 1.
pub const RLE0_Z0: u16 = 0;
/// Zero-run symbol emitted for a bijective-base-2 digit of value 2.
pub const RLE0_Z1: u16 = 1;

fn push_zero_run(out: &mut Vec<u16>, mut m: u64) {
    // bijective base 2, least significant digit first
    while m > 0 {
        let d = (m - 1) % 2 + 1;
        out.push(if d == 1 { RLE0_Z0 } else { RLE0_Z1 });
        m = (m - d) / 2;
    }
}

/// Replace maximal zero-runs of an MTF index stream by their bijective
/// base-2 numeral over {Z0, Z1}; nonzero indices shift up by one.
pub fn rle0_encode(indices: &[u16]) -> Vec<u16> {
    let mut out = Vec::with_capacity(indices.len());
    let mut zeros = 0u64;
    for &idx in indices {
        if idx == 0 {
            zeros += 1;
        } else {
            push_zero_run(&mut out, zeros);
            zeros = 0;
            out.push(idx + 1);
        }
    }
    push_zero_run(&mut out, zeros);
    out
}

/// Inverse of [`rle0_encode`]. `max_len` bounds the decoded length so
/// corrupt input cannot balloon memory.
pub fn rle0_decode(syms: &[u16], max_len: usize) -> Result<Vec<u16>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < syms.len() {
        if syms[i] <= RLE0_Z1 {
            let mut m = 0u64;
            let mut pow = 1u64;
            while i < syms.len() && syms[i] <= RLE0_Z1 {
                if pow > 1 << 48 {
                    return Err(Error::corrupt("zero-run length overflow"));
                }
                m += (syms[i] + 1) as u64 * pow;
                pow *= 2;
                i += 1;
            }
            if out.len() as u64 + m > max_len as u64 {
                return Err(Error::corrupt("zero-run expands past the declared length"));
            }
            out.extend(std::iter::repeat(0u16).take(m as usize));
        } else {
            if out.len() >= max_len {
                return Err(Error::corrupt("stream expands past the declared length"));
            }
            out.push(syms[i] - 1);
            i += 1;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// canonical Huffman
// ---------------------------------------------------------------------------

const MAX_CODE_LEN: u8 = 31;

/// Optimal code lengths for the given frequencies, ties broken by
/// (count, symbol), depth-limited to [`MAX_CODE_LEN`].
fn code_lengths(freqs: &[u64]) -> Vec<u8> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let sigma = freqs.len();
    let mut lengths = vec![0u8; sigma];
    let used: Vec<usize> = (0..sigma).filter(|&c| freqs[c] > 0).collect();
    match used.len() {
        0 => return lengths,
        1 => {
            lengths[used[0]] = 1;
            return lengths;
        }
        _ => {}
    }

    // nodes: leaves are (freq, symbol); internal nodes get ids past sigma so
    // that merging order, and therefore the code lengths, are deterministic
    let mut parent = vec![usize::MAX; 2 * used.len()];
    let mut heap: BinaryHeap<Reverse<(u64, usize, usize)>> = used
        .iter()
        .enumerate()
        .map(|(node, &c)| Reverse((freqs[c], c, node)))
        .collect();
    let mut next_node = used.len();
    let mut next_tie = sigma;
    while heap.len() > 1 {
        let Reverse((fa, _, na)) = heap.pop().unwrap();
        let Reverse((fb, _, nb)) = heap.pop().unwrap();
        parent[na] = next_node;
        parent[nb] = next_node;
        heap.push(Reverse((fa + fb, next_tie, next_node)));
        next_node += 1;
        next_tie += 1;
    }

    for (node, &c) in used.iter().enumerate() {
        let mut depth = 0u32;
        let mut p = parent[node];
        while p != usize::MAX {
            depth += 1;
            p = parent[p];
        }
        lengths[c] = depth.min(255) as u8;
    }
    limit_lengths(&mut lengths, MAX_CODE_LEN);
    lengths
}

/// Clamp code lengths to `max` and restore the Kraft inequality by
/// lengthening the deepest still-extendable codes.
fn limit_lengths(lengths: &mut [u8], max: u8) {
    if lengths.iter().all(|&l| l <= max) {
        return;
    }
    for l in lengths.iter_mut() {
        if *l > max {
            *l = max;
        }
    }
    let unit = |l: u8| 1u64 << (max - l);
    let mut kraft: u64 = lengths.iter().filter(|&&l| l > 0).map(|&l| unit(l)).sum();
    while kraft > 1u64 << max {
        let i = (0..lengths.len())
            .filter(|&i| lengths[i] > 0 && lengths[i] < max)
            .max_by_key(|&i| (lengths[i], std::cmp::Reverse(i)))
            .expect("kraft overflow with all codes at max length");
        kraft -= unit(lengths[i]) / 2;
        lengths[i] += 1;
    }
}

/// Canonical code assignment: codes ordered by (length, symbol).
fn canonical_codes(lengths: &[u8]) -> Vec<(u32, u8)> {
    let mut symbols: Vec<usize> = (0..lengths.len()).filter(|&c| lengths[c] > 0).collect();
    symbols.sort_by_key(|&c| (lengths[c], c));
    let mut codes = vec![(0u32, 0u8); lengths.len()];
    let mut code = 0u32;
    let mut prev_len = 0u8;
    for &c in &symbols {
        code <<= lengths[c] - prev_len;
        codes[c] = (code, lengths[c]);
        code += 1;
        prev_len = lengths[c];
    }
    codes
}

struct BitWriter {
    bytes: Vec<u8>,
    bit: u8,
}

impl BitWriter {
    fn new(bytes: Vec<u8>) -> Self {
        BitWriter { bytes, bit: 8 }
    }

    fn push(&mut self, code: u32, len: u8) {
        for k in (0..len).rev() {
            if self.bit == 8 {
                self.bytes.push(0);
                self.bit = 0;
            }
            let b = (code >> k & 1) as u8;
            let last = self.bytes.len() - 1;
            self.bytes[last] |= b << (7 - self.bit);
            self.bit += 1;
        }
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    fn next(&mut self) -> Result<u8> {
        let byte = self
            .bytes
            .get(self.pos / 8)
            .ok_or_else(|| Error::corrupt("bit stream truncated"))?;
        let b = byte >> (7 - self.pos % 8) & 1;
        self.pos += 1;
        Ok(b)
    }
}

/// Encode a symbol stream with a canonical Huffman code built from its own
/// statistics. Layout: symbol count (u64 LE), stored table length (u16 LE),
/// one code length byte per stored alphabet slot, then the packed codes.
pub fn huffman_encode(symbols: &[u16], sigma: usize) -> Vec<u8> {
    assert!(!symbols.is_empty(), "empty streams are handled by the caller");
    let mut freqs = vec![0u64; sigma];
    for &s in symbols {
        freqs[s as usize] += 1;
    }
    let lengths = code_lengths(&freqs);
    let codes = canonical_codes(&lengths);
    let table_len = lengths
        .iter()
        .rposition(|&l| l > 0)
        .map(|p| p + 1)
        .unwrap_or(0);

    let mut out = Vec::with_capacity(16 + table_len + symbols.len() / 4);
    out.extend_from_slice(&(symbols.len() as u64).to_le_bytes());
    out.extend_from_slice(&(table_len as u16).to_le_bytes());
    out.extend_from_slice(&lengths[..table_len]);
    let mut writer = BitWriter::new(out);
    for &s in symbols {
        let (code, len) = codes[s as usize];
        writer.push(code, len);
    }
    writer.bytes
}

/// Decode a [`huffman_encode`] stream. `max_symbols` rejects absurd symbol
/// counts before any allocation.
pub fn huffman_decode(bytes: &[u8], sigma: usize, max_symbols: usize) -> Result<Vec<u16>> {
    if bytes.len() < 10 {
        return Err(Error::corrupt_at(bytes.len() as u64, "entropy header truncated"));
    }
    let n_symbols = u64::from_le_bytes(bytes[0..8].try_into().unwrap());
    let table_len = u16::from_le_bytes(bytes[8..10].try_into().unwrap()) as usize;
    if n_symbols > max_symbols as u64 {
        return Err(Error::corrupt("declared symbol count is implausible"));
    }
    if table_len > sigma {
        return Err(Error::corrupt("code table larger than the alphabet"));
    }
    if bytes.len() < 10 + table_len {
        return Err(Error::corrupt_at(bytes.len() as u64, "code table truncated"));
    }
    let mut lengths = vec![0u8; sigma];
    lengths[..table_len].copy_from_slice(&bytes[10..10 + table_len]);
    if lengths.iter().any(|&l| l > MAX_CODE_LEN) {
        return Err(Error::corrupt("code length out of range"));
    }
    let kraft: u64 = lengths
        .iter()
        .filter(|&&l| l > 0)
        .map(|&l| 1u64 << (MAX_CODE_LEN - l))
        .sum();
    if kraft > 1u64 << MAX_CODE_LEN {
        return Err(Error::corrupt("code lengths overflow the code space"));
    }
    if n_symbols > 0 && kraft == 0 {
        return Err(Error::corrupt("empty code table for a nonempty stream"));
    }

    // canonical decode tables per length
    let mut sorted: Vec<usize> = (0..sigma).filter(|&c| lengths[c] > 0).collect();
    sorted.sort_by_key(|&c| (lengths[c], c));
    let mut first_code = [0u32; MAX_CODE_LEN as usize + 1];
    let mut first_index = [0usize; MAX_CODE_LEN as usize + 1];
    let mut count = [0usize; MAX_CODE_LEN as usize + 1];
    for &c in &sorted {
        count[lengths[c] as usize] += 1;
    }
    {
        let mut code = 0u32;
        let mut index = 0usize;
        for len in 1..=MAX_CODE_LEN as usize {
            code <<= 1;
            first_code[len] = code;
            first_index[len] = index;
            code += count[len] as u32;
            index += count[len];
        }
    }

    let mut reader = BitReader {
        bytes: &bytes[10 + table_len..],
        pos: 0,
    };
    let mut out = Vec::with_capacity(n_symbols as usize);
    for _ in 0..n_symbols {
        let mut code = 0u32;
        let mut len = 0usize;
        loop {
            code = code << 1 | reader.next()? as u32;
            len += 1;
            if len > MAX_CODE_LEN as usize {
                return Err(Error::corrupt("code word exceeds the maximum length"));
            }
            let offset = code.wrapping_sub(first_code[len]) as usize;
            if count[len] > 0 && code >= first_code[len] && offset < count[len] {
                out.push(sorted[first_index[len] + offset] as u16);
                break;
            }
        }
    }
    // nothing but zero padding may remain
    let trailing = reader.bytes.len() * 8 - reader.pos;
    if trailing >= 8 {
        return Err(Error::corrupt("trailing bytes after the entropy stream"));
    }
    while reader.pos < reader.bytes.len() * 8 {
        if reader.next()? != 0 {
            return Err(Error::corrupt("nonzero padding after the entropy stream"));
        }
    }
    Ok(out)
}

/// Encode a payload (BWT symbols or aux symbols) with the full pipeline.
/// An empty payload encodes to zero bytes.
pub fn encode_payload(seq: &[u16], sigma: usize) -> Result<Vec<u8>> {
    if seq.is_empty() {
        return Ok(Vec::new());
    }
    let mtf = mtf_encode(seq, sigma)?;
    let zr = rle0_encode(&mtf);
    Ok(huffman_encode(&zr, sigma + 1))
}

/// Decode a payload produced by [`encode_payload`]; `expected_len` is the
/// exact symbol count the payload must decode to.
pub fn decode_payload(bytes: &[u8], sigma: usize, expected_len: usize) -> Result<Vec<u16>> {
    if bytes.is_empty() {
        return if expected_len == 0 {
            Ok(Vec::new())
        } else {
            Err(Error::corrupt("payload missing"))
        };
    }
    let zr = huffman_decode(bytes, sigma + 1, expected_len)?;
    let mtf = rle0_decode(&zr, expected_len)?;
    let out = mtf_decode(&mtf, sigma)?;
    if out.len() != expected_len {
        return Err(Error::corrupt(format!(
            "payload decodes to {} symbols, expected {expected_len}",
            out.len()
        )));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// container
// ---------------------------------------------------------------------------

const MAGIC: [u8; 4] = *b"TBWZ";
const VERSION: u8 = 1;
const FLAG_TUNNELED: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 1 + 8 + 8 + 8 + 8;

/// The parsed container: header fields plus the two encoded payloads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    /// Whether the payload holds a tunneled BWT plus aux vector.
    pub tunneled: bool,
    /// Length of the BWT before tunneling (text length including sentinel).
    pub orig_len: u64,
    /// Length of the stored (possibly shortened) BWT.
    pub bwt_len: u64,
    /// Number of aux symbols.
    pub aux_len: u64,
    /// Encoded BWT payload.
    pub enc_l: Vec<u8>,
    /// Encoded aux payload; empty in plain mode.
    pub enc_aux: Vec<u8>,
}

/// Serialize a container; the layout is fixed and versioned.
pub fn write_container(c: &Container) -> Vec<u8> {
    debug_assert!(c.tunneled || (c.aux_len == 0 && c.enc_aux.is_empty()));
    let mut out = Vec::with_capacity(HEADER_LEN + c.enc_l.len() + c.enc_aux.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(if c.tunneled { FLAG_TUNNELED } else { 0 });
    out.extend_from_slice(&c.orig_len.to_le_bytes());
    out.extend_from_slice(&c.bwt_len.to_le_bytes());
    out.extend_from_slice(&c.aux_len.to_le_bytes());
    out.extend_from_slice(&(c.enc_l.len() as u64).to_le_bytes());
    out.extend_from_slice(&c.enc_l);
    out.extend_from_slice(&c.enc_aux);
    out
}

/// Parse and validate a container, reporting the byte offset of the first
/// inconsistency.
pub fn read_container(bytes: &[u8]) -> Result<Container> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::corrupt_at(bytes.len() as u64, "header truncated"));
    }
    if bytes[0..4] != MAGIC {
        return Err(Error::corrupt_at(0, "bad magic"));
    }
    if bytes[4] != VERSION {
        return Err(Error::corrupt_at(4, format!("unsupported version {}", bytes[4])));
    }
    let flags = bytes[5];
    if flags & !FLAG_TUNNELED != 0 {
        return Err(Error::corrupt_at(5, "unknown flag bits"));
    }
    let tunneled = flags & FLAG_TUNNELED != 0;
    let field = |k: usize| u64::from_le_bytes(bytes[6 + 8 * k..14 + 8 * k].try_into().unwrap());
    let orig_len = field(0);
    let bwt_len = field(1);
    let aux_len = field(2);
    let enc_l_len = field(3);

    if bwt_len == 0 || bwt_len > orig_len {
        return Err(Error::corrupt_at(14, "inconsistent length fields"));
    }
    if tunneled && aux_len == 0 {
        return Err(Error::corrupt_at(22, "tunneled container without aux symbols"));
    }
    if !tunneled && (aux_len != 0 || bwt_len != orig_len) {
        return Err(Error::corrupt_at(22, "plain container with tunneling fields set"));
    }
    let body = &bytes[HEADER_LEN..];
    if (body.len() as u64) < enc_l_len {
        return Err(Error::corrupt_at(
            bytes.len() as u64,
            "BWT payload truncated",
        ));
    }
    let (enc_l, enc_aux) = body.split_at(enc_l_len as usize);
    if !tunneled && !enc_aux.is_empty() {
        return Err(Error::corrupt_at(
            (HEADER_LEN as u64) + enc_l_len,
            "trailing bytes after a plain container",
        ));
    }
    if tunneled && enc_aux.is_empty() {
        return Err(Error::corrupt_at(bytes.len() as u64, "aux payload truncated"));
    }
    Ok(Container {
        tunneled,
        orig_len,
        bwt_len,
        aux_len,
        enc_l: enc_l.to_vec(),
        enc_aux: enc_aux.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bwt::{entropy, CharCounts};
    use crate::SENTINEL;
    use proptest::prelude::*;

    fn syms(s: &str) -> Vec<Symbol> {
        s.chars()
            .map(|ch| {
                if ch == '$' {
                    SENTINEL
                } else {
                    ch as Symbol + 1
                }
            })
            .collect()
    }

    fn rle_display(rle: &[u16]) -> String {
        rle.iter()
            .map(|&s| match s {
                RLE_DIGIT0 => '0',
                RLE_DIGIT1 => '1',
                SENTINEL => '$',
                c => (c - 1) as u8 as char,
            })
            .collect()
    }

    #[test]
    fn digit_counts() {
        assert_eq!(digit_count(1), 0);
        assert_eq!(digit_count(2), 1);
        assert_eq!(digit_count(3), 1);
        assert_eq!(digit_count(4), 2);
        assert_eq!(digit_count(8), 3);
    }

    #[test]
    fn rl_encode_running_example() {
        let rle = rl_encode(&syms("yeep$yaass"));
        assert_eq!(rle_display(&rle), "ye0p$ya0s0");
        assert_eq!(rl_decode(&rle).unwrap(), syms("yeep$yaass"));
    }

    #[test]
    fn rl_encode_binary_expansion() {
        let rle = rl_encode(&syms("aaaaa"));
        // 5 = 101 in binary, leading one cut -> digits 0, 1
        assert_eq!(rle, vec![syms("a")[0], RLE_DIGIT0, RLE_DIGIT1]);
        assert_eq!(rle_display(&rl_encode(&syms("x"))), "x");
    }

    #[test]
    fn rl_decode_rejects_dangling_digits() {
        assert!(matches!(
            rl_decode(&[RLE_DIGIT0]),
            Err(Error::Corrupt { .. })
        ));
        assert!(matches!(
            rl_decode(&[RLE_DIGIT1, 5]),
            Err(Error::Corrupt { .. })
        ));
    }

    #[test]
    fn mtf_examples() {
        assert_eq!(mtf_encode(&[0, 0, 0, 0], 2).unwrap(), vec![0, 0, 0, 0]);
        // "ba" over alphabet {a, b}: b is at index 1, then a is at index 1
        assert_eq!(mtf_encode(&[1, 0], 2).unwrap(), vec![1, 1]);
        assert!(mtf_encode(&[2], 2).is_err());
        assert!(mtf_decode(&[2], 2).is_err());
    }

    #[test]
    fn rle0_examples() {
        assert_eq!(rle0_encode(&[0]), vec![RLE0_Z0]);
        assert_eq!(rle0_encode(&[0, 0, 0]), vec![RLE0_Z0, RLE0_Z0]);
        assert_eq!(rle0_encode(&[5, 0, 0, 7]), vec![6, RLE0_Z1, 8]);
        assert_eq!(rle0_decode(&[6, RLE0_Z1, 8], 4).unwrap(), vec![5, 0, 0, 7]);
        // expansion past the declared length is rejected
        assert!(rle0_decode(&[6, RLE0_Z1, 8], 3).is_err());
    }

    #[test]
    fn huffman_single_symbol_stream() {
        let symbols = vec![7u16; 20];
        let bytes = huffman_encode(&symbols, 16);
        // 8 count + 2 table len + 8 lengths + ceil(20 / 8) payload
        assert_eq!(bytes.len(), 8 + 2 + 8 + 3);
        assert_eq!(huffman_decode(&bytes, 16, 20).unwrap(), symbols);
    }

    #[test]
    fn huffman_respects_the_entropy_bound() {
        let mut rng = rand::thread_rng();
        use rand::Rng;
        for _ in 0..40 {
            let n = rng.gen_range(1..4000);
            let sigma = rng.gen_range(2..40usize);
            let skew = rng.gen_range(1..6);
            let symbols: Vec<u16> = (0..n)
                .map(|_| {
                    let mut v = sigma;
                    while v >= sigma {
                        v = rng.gen_range(0..sigma).min(rng.gen_range(0..sigma)) * skew % sigma;
                    }
                    v as u16
                })
                .collect();
            let bytes = huffman_encode(&symbols, sigma);
            let header = 8 + 2 + {
                let table_len = u16::from_le_bytes(bytes[8..10].try_into().unwrap()) as usize;
                table_len
            };
            let payload_bits = ((bytes.len() - header) * 8) as f64;
            let h = entropy(&CharCounts::from_values(
                symbols.iter().map(|&s| s as usize),
                sigma,
            ))
            .unwrap();
            let n = symbols.len() as f64;
            assert!(payload_bits + 7.0 >= h * n, "below the entropy bound");
            assert!(payload_bits <= (h + 1.0) * n + 7.0, "worse than H + 1");
            assert_eq!(huffman_decode(&bytes, sigma, symbols.len()).unwrap(), symbols);
        }
    }

    #[test]
    fn huffman_depth_limit_on_fibonacci_frequencies() {
        // fibonacci frequencies force maximal depth; the limiter must keep
        // lengths within range and the Kraft sum valid
        let mut freqs = vec![0u64; 50];
        let (mut a, mut b) = (1u64, 1u64);
        for f in freqs.iter_mut() {
            *f = a;
            let c = a + b;
            a = b;
            b = c;
        }
        let lengths = code_lengths(&freqs);
        assert!(lengths.iter().all(|&l| l > 0 && l <= MAX_CODE_LEN));
        let kraft: f64 = lengths.iter().map(|&l| 0.5f64.powi(l as i32)).sum();
        assert!(kraft <= 1.0 + 1e-12);
    }

    #[test]
    fn huffman_rejects_corrupt_tables() {
        let symbols = vec![1u16, 2, 3, 1, 2, 1];
        let mut bytes = huffman_encode(&symbols, 4);
        bytes[10] = 77; // invalid code length
        assert!(huffman_decode(&bytes, 4, 6).is_err());
        let bytes = huffman_encode(&symbols, 4);
        assert!(huffman_decode(&bytes[..bytes.len() - 1], 4, 6).is_err());
    }

    #[test]
    fn payload_pipeline_examples() {
        // a uniform aux vector collapses to almost nothing
        let aux = vec![3u16; 500];
        let enc = encode_payload(&aux, 4).unwrap();
        assert!(enc.len() < 32, "uniform aux should encode tiny, got {}", enc.len());
        assert_eq!(decode_payload(&enc, 4, 500).unwrap(), aux);

        // empty payload encodes to zero bytes
        assert!(encode_payload(&[], 4).unwrap().is_empty());
        assert_eq!(decode_payload(&[], 4, 0).unwrap(), Vec::<u16>::new());
        assert!(decode_payload(&[], 4, 3).is_err());

        // the shortened BWT of the running example roundtrips bit-exactly
        let l = syms("yeep$yass");
        let l16: Vec<u16> = l.to_vec();
        let enc = encode_payload(&l16, crate::ALPHABET).unwrap();
        let enc2 = encode_payload(&l16, crate::ALPHABET).unwrap();
        assert_eq!(enc, enc2);
        assert_eq!(decode_payload(&enc, crate::ALPHABET, 9).unwrap(), l16);
    }

    #[test]
    fn container_roundtrip_and_validation() {
        let c = Container {
            tunneled: true,
            orig_len: 10,
            bwt_len: 9,
            aux_len: 2,
            enc_l: vec![1, 2, 3],
            enc_aux: vec![4, 5],
        };
        let bytes = write_container(&c);
        assert_eq!(read_container(&bytes).unwrap(), c);
        // re-serialization is byte-identical
        assert_eq!(write_container(&read_container(&bytes).unwrap()), bytes);

        // every truncation fails cleanly
        for k in 0..bytes.len() {
            assert!(read_container(&bytes[..k]).is_err(), "truncation at {k}");
        }

        // header corruption
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            read_container(&bad),
            Err(Error::Corrupt { offset: Some(0), .. })
        ));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(read_container(&bad).is_err());
        let mut bad = bytes.clone();
        bad[5] = 0xFE;
        assert!(read_container(&bad).is_err());

        // tunneled with aux_len 0 is inconsistent
        let mut c2 = c.clone();
        c2.aux_len = 0;
        assert!(read_container(&write_container(&c2)).is_err());

        // plain mode must have n == orig_len and no aux bytes
        let plain = Container {
            tunneled: false,
            orig_len: 9,
            bwt_len: 9,
            aux_len: 0,
            enc_l: vec![1, 2, 3],
            enc_aux: vec![],
        };
        let bytes = write_container(&plain);
        assert_eq!(read_container(&bytes).unwrap(), plain);
        let mut trailing = bytes.clone();
        trailing.push(0);
        assert!(read_container(&trailing).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn rl_roundtrip(seq in proptest::collection::vec(0u16..257, 1..400)) {
            prop_assert_eq!(rl_decode(&rl_encode(&seq)).unwrap(), seq);
        }

        #[test]
        fn mtf_rle0_huffman_roundtrip(seq in proptest::collection::vec(0u16..50, 0..600)) {
            let sigma = 50usize;
            let enc = encode_payload(&seq, sigma).unwrap();
            prop_assert_eq!(decode_payload(&enc, sigma, seq.len()).unwrap(), seq);
        }

        #[test]
        fn mutated_payload_never_panics(
            seq in proptest::collection::vec(0u16..50, 1..200),
            flips in proptest::collection::vec((0usize..4096, 0u8..8), 1..8)
        ) {
            let sigma = 50usize;
            let mut enc = encode_payload(&seq, sigma).unwrap();
            for (pos, bit) in flips {
                let len = enc.len();
                enc[pos % len] ^= 1 << bit;
            }
            // either decodes to something or errors; must not panic
            let _ = decode_payload(&enc, sigma, seq.len());
        }
    }
}
