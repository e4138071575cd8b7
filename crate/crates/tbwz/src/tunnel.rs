//! Tunneling, the generalized LF-mapping, stack-based inversion and the
//! aux-vector serialization of the marking bitvectors.
//!
//! Tunneling a block crosses out its start-interval rows below the top in L
//! (`cnt_l` zeros), its end-interval rows below the top in F (`cnt_f`
//! zeros), and removes the doubly crossed interior. The generalized
//! LF-mapping ignores crossed L characters and skips crossed F slots, which
//! keeps the mapping of the surviving rows intact; inversion rides the top
//! row of each tunnel and restores the entry offset from a stack on exit.

use crate::backend::digit_count;
use crate::bits::BitVector;
use crate::blocks::{build_collision_graph, compute_runs, Block};
use crate::bwt::{Bwt, Text};
use crate::{Error, Result, Symbol, ALPHABET};

/// Marker for a generalized-LF target that the defining sums leave
/// undefined (an uncrossed predecessor does not exist). Such positions are
/// never visited by inversion of a valid tunneled BWT.
pub const NO_TARGET: u32 = u32::MAX;

/// A shortened BWT plus the two marking bitvectors.
///
/// Both bitvectors have length `len() + 1` with the last bit set, so lookups
/// at `j + 1` are always valid during inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct TunneledBwt {
    l: Vec<Symbol>,
    cnt_l: BitVector,
    cnt_f: BitVector,
    orig_len: usize,
}

impl TunneledBwt {
    /// Assemble from raw parts, checking the structural invariants.
    pub fn from_parts(
        l: Vec<Symbol>,
        cnt_l: BitVector,
        cnt_f: BitVector,
        orig_len: usize,
    ) -> Result<Self> {
        let n = l.len();
        if n == 0 {
            return Err(Error::InvalidInput("tunneled BWT must not be empty".into()));
        }
        if cnt_l.len() != n + 1 || cnt_f.len() != n + 1 {
            return Err(Error::InvalidInput(
                "marking bitvectors must have length n + 1".into(),
            ));
        }
        if !cnt_l.get(n) || !cnt_f.get(n) {
            return Err(Error::corrupt("marking bitvectors must end in a set bit"));
        }
        if n > orig_len {
            return Err(Error::corrupt(
                "tunneled BWT longer than the original length",
            ));
        }
        if cnt_l.rank1(n) != cnt_f.rank1(n) {
            return Err(Error::corrupt(
                "L and F markings must pair up one to one",
            ));
        }
        let mut prev: Option<Symbol> = None;
        for i in 0..n {
            if !cnt_l.get(i) && !cnt_f.get(i) {
                return Err(Error::corrupt(
                    "position crossed out on both sides was not removed",
                ));
            }
            let head = prev != Some(l[i]);
            if head && (!cnt_l.get(i) || !cnt_f.get(i)) {
                return Err(Error::corrupt("run head carries a marking"));
            }
            prev = Some(l[i]);
        }
        Ok(TunneledBwt {
            l,
            cnt_l,
            cnt_f,
            orig_len,
        })
    }

    /// The untunneled representation of a BWT: all-ones markings.
    pub fn plain(bwt: &Bwt) -> Self {
        let n = bwt.len();
        TunneledBwt {
            l: bwt.symbols().to_vec(),
            cnt_l: BitVector::ones(n + 1),
            cnt_f: BitVector::ones(n + 1),
            orig_len: n,
        }
    }

    pub fn l(&self) -> &[Symbol] {
        &self.l
    }

    pub fn cnt_l(&self) -> &BitVector {
        &self.cnt_l
    }

    pub fn cnt_f(&self) -> &BitVector {
        &self.cnt_f
    }

    /// Current (shortened) length.
    pub fn len(&self) -> usize {
        self.l.len()
    }

    pub fn is_empty(&self) -> bool {
        self.l.is_empty()
    }

    /// Length of the BWT before tunneling.
    pub fn orig_len(&self) -> usize {
        self.orig_len
    }

    /// The generalized LF-mapping of this tunneled BWT.
    pub fn generalized_lf(&self) -> Result<Vec<u32>> {
        generalized_lf(&self.l, &self.cnt_l, &self.cnt_f)
    }
}

/// Tunnel a set of blocks out of a BWT.
///
/// The blocks must be run-blocks free of critical collisions (which holds
/// for any subset of the width-maximal run-blocks); anything else is
/// rejected with an invalid-block-set error. All crossings are applied
/// before the doubly crossed positions are removed.
pub fn tunnel(bwt: &Bwt, blocks: &[Block]) -> Result<TunneledBwt> {
    let n = bwt.len();
    let runs = compute_runs(bwt);

    for b in blocks {
        if b.columns.len() != b.depth + 1 || b.end >= n || b.height() < 2 || b.depth < 1 {
            return Err(Error::InvalidBlockSet(
                "block shape out of range for this BWT".into(),
            ));
        }
        let h = b.height();
        for (x, col) in b.columns.iter().enumerate() {
            let run = &runs[col.run];
            if col.top < run.start || col.top + h > run.end() {
                return Err(Error::InvalidBlockSet(
                    "block column does not stay within a run".into(),
                ));
            }
            let aligned = col.top == run.start && h == run.height;
            if (x == 0 || x == b.depth) && !aligned {
                return Err(Error::InvalidBlockSet(
                    "block start or end interval is not a maximal run".into(),
                ));
            }
        }
        if b.columns[0].top != b.start {
            return Err(Error::InvalidBlockSet("column list inconsistent".into()));
        }
    }
    // the laminar sweep rejects the remaining critical configurations
    build_collision_graph(blocks, &runs)
        .map_err(|e| Error::InvalidBlockSet(format!("critical collision: {e}")))?;

    let mut cnt_l = vec![true; n];
    let mut cnt_f = vec![true; n];
    for b in blocks {
        let h = b.height();
        for x in 0..b.depth {
            let top = b.columns[x].top;
            cnt_l[top + 1..top + h].fill(false);
        }
        for x in 1..=b.depth {
            let top = b.columns[x].top;
            cnt_f[top + 1..top + h].fill(false);
        }
    }

    let mut l = Vec::with_capacity(n);
    let mut kept_l = Vec::with_capacity(n + 1);
    let mut kept_f = Vec::with_capacity(n + 1);
    for i in 0..n {
        if cnt_l[i] || cnt_f[i] {
            l.push(bwt.symbols()[i]);
            kept_l.push(cnt_l[i]);
            kept_f.push(cnt_f[i]);
        }
    }
    kept_l.push(true);
    kept_f.push(true);
    TunneledBwt::from_parts(
        l,
        BitVector::from_bits(&kept_l),
        BitVector::from_bits(&kept_f),
        n,
    )
}

/// The generalized LF-mapping over raw parts: characters with `cnt_l = 0`
/// are ignored by the counting sums and slots with `cnt_f = 0` are skipped
/// by the select. Runs in O(n + sigma).
///
/// A crossed-out position with no counted occurrence of its symbol before it
/// maps to the slot just before its symbol's range, or [`NO_TARGET`] when
/// that is undefined.
pub fn generalized_lf(l: &[Symbol], cnt_l: &BitVector, cnt_f: &BitVector) -> Result<Vec<u32>> {
    let n = l.len();
    if cnt_l.len() != n + 1 || cnt_f.len() != n + 1 {
        return Err(Error::InvalidInput(
            "marking bitvectors must have length n + 1".into(),
        ));
    }
    if cnt_l.rank1(n) != cnt_f.rank1(n) {
        return Err(Error::corrupt("L and F markings must pair up one to one"));
    }

    let mut counts = vec![0u32; ALPHABET];
    for i in 0..n {
        if cnt_l.get(i) {
            counts[l[i] as usize] += 1;
        }
    }

    // start slot per symbol (first counted F slot of its range) and the slot
    // just before it
    let mut start = vec![NO_TARGET; ALPHABET];
    let mut last_target = vec![NO_TARGET; ALPHABET];
    let mut j = 0usize;
    let mut last_one = NO_TARGET;
    for c in 0..ALPHABET {
        if counts[c] == 0 {
            continue;
        }
        last_target[c] = last_one;
        while j < n && !cnt_f.get(j) {
            j += 1;
        }
        if j >= n {
            return Err(Error::corrupt("too few counted F slots"));
        }
        start[c] = j as u32;
        let mut remaining = counts[c];
        while remaining > 0 {
            if cnt_f.get(j) {
                remaining -= 1;
                last_one = j as u32;
            }
            j += 1;
        }
    }

    let mut cur = start;
    let mut lf = vec![NO_TARGET; n];
    for i in 0..n {
        let c = l[i] as usize;
        if cnt_l.get(i) {
            let target = cur[c];
            if target == NO_TARGET || target as usize >= n {
                return Err(Error::corrupt("counted position has no F slot"));
            }
            lf[i] = target;
            last_target[c] = target;
            let mut next = target as usize + 1;
            while next < n && !cnt_f.get(next) {
                next += 1;
            }
            cur[c] = next as u32; // may be n when the symbol is exhausted
        } else {
            lf[i] = last_target[c];
        }
    }
    Ok(lf)
}

/// Invert a tunneled BWT back to its text.
///
/// Walks the generalized LF-mapping from the smallest row. Entering a
/// tunnel (a crossed-out L region) pushes the offset to the top row;
/// reaching a tunnel end (the row above a crossed-out F region) pops it and
/// steps back down to the entry lane.
pub fn invert_tunneled(t: &TunneledBwt) -> Result<Text> {
    let n = t.len();
    let orig_len = t.orig_len();
    let lf = t.generalized_lf()?;

    // nearest position at or before i that is counted in L
    let mut prev_counted = vec![NO_TARGET; n];
    let mut last = NO_TARGET;
    for i in 0..n {
        if t.cnt_l.get(i) {
            last = i as u32;
        }
        prev_counted[i] = last;
    }

    let mut out = vec![crate::SENTINEL; orig_len];
    let mut stack: Vec<usize> = Vec::new();
    let mut j = 0usize;
    for i in (0..orig_len.saturating_sub(1)).rev() {
        if !t.cnt_f.get(j + 1) {
            let offset = stack.pop().ok_or_else(|| {
                Error::corrupt("tunnel end without a matching tunnel start")
            })?;
            j += offset;
            if j >= n {
                return Err(Error::corrupt("tunnel exit leaves the BWT"));
            }
        }
        out[i] = t.l[j];
        if !t.cnt_l.get(j) || !t.cnt_l.get(j + 1) {
            let top = prev_counted[j];
            if top == NO_TARGET {
                return Err(Error::corrupt("tunnel start without a top row"));
            }
            stack.push(j - top as usize);
        }
        let next = lf[j];
        if next == NO_TARGET || next as usize >= n {
            return Err(Error::corrupt("LF walk left the mapping"));
        }
        j = next as usize;
    }
    if !stack.is_empty() {
        return Err(Error::corrupt("unterminated tunnels at end of inversion"));
    }
    Text::from_symbols(out).map_err(|_| Error::corrupt("inversion produced a malformed text"))
}

/// The serialized form of the marking bitvectors: one symbol from {1, 2, 3}
/// per run of height > 1, in run order. 1 marks a tunnel start (`cnt_l`
/// zeros), 2 a tunnel end (`cnt_f` zeros), 3 an unmarked run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxVector {
    symbols: Vec<u8>,
}

impl AuxVector {
    pub fn from_symbols(symbols: Vec<u8>) -> Result<Self> {
        if symbols.iter().any(|&s| !(1..=3).contains(&s)) {
            return Err(Error::corrupt("aux symbol outside {1, 2, 3}"));
        }
        Ok(AuxVector { symbols })
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Number of tunnels: the count of start markers (equals the count of
    /// end markers in a valid vector).
    pub fn tunnel_count(&self) -> usize {
        self.symbols.iter().filter(|&&s| s == 1).count()
    }
}

/// Merge the marking bitvectors into the per-run aux vector.
///
/// Within a run, every row below the head carries the same combined marking
/// `2*cnt_l + cnt_f`, so one symbol per run of height > 1 suffices.
pub fn encode_aux(t: &TunneledBwt) -> Result<AuxVector> {
    let n = t.len();
    let mut symbols = Vec::new();
    let mut i = 0usize;
    while i < n {
        let mut j = i + 1;
        while j < n && t.l[j] == t.l[i] {
            j += 1;
        }
        if !t.cnt_l.get(i) || !t.cnt_f.get(i) {
            return Err(Error::InvariantViolation("marked run head".into()));
        }
        if j - i > 1 {
            let body_symbol = |p: usize| 2 * t.cnt_l.get(p) as u8 + t.cnt_f.get(p) as u8;
            let s = body_symbol(i + 1);
            if (i + 2..j).any(|p| body_symbol(p) != s) {
                return Err(Error::InvariantViolation(
                    "non-uniform markings within a run body".into(),
                ));
            }
            debug_assert!(s != 0, "doubly crossed positions are removed");
            symbols.push(s);
        }
        i = j;
    }
    AuxVector::from_symbols(symbols)
}

/// Rebuild the marking bitvectors from a shortened BWT and its aux vector.
pub fn decode_aux(l: Vec<Symbol>, aux: &AuxVector, orig_len: usize) -> Result<TunneledBwt> {
    let n = l.len();
    let mut cnt_l = vec![true; n + 1];
    let mut cnt_f = vec![true; n + 1];
    let mut next_aux = 0usize;
    let mut i = 0usize;
    while i < n {
        let mut j = i + 1;
        while j < n && l[j] == l[i] {
            j += 1;
        }
        if j - i > 1 {
            let s = *aux
                .symbols()
                .get(next_aux)
                .ok_or_else(|| Error::corrupt("aux vector shorter than the run count"))?;
            next_aux += 1;
            match s {
                1 => cnt_l[i + 1..j].fill(false),
                2 => cnt_f[i + 1..j].fill(false),
                3 => {}
                _ => return Err(Error::corrupt("aux symbol outside {1, 2, 3}")),
            }
        }
        i = j;
    }
    if next_aux != aux.len() {
        return Err(Error::corrupt("aux vector longer than the run count"));
    }
    TunneledBwt::from_parts(
        l,
        BitVector::from_bits(&cnt_l),
        BitVector::from_bits(&cnt_f),
        orig_len,
    )
}

/// Positions tunneling removes for a block set: the union of every block's
/// interior rows below the top. Colliding blocks share interior positions,
/// so this is computed as a set, not a per-block sum.
pub fn removed_positions(blocks: &[Block], n: usize) -> usize {
    let mut cnt_l = vec![true; n];
    let mut cnt_f = vec![true; n];
    for b in blocks {
        let h = b.height();
        for x in 0..b.depth {
            let top = b.columns[x].top;
            cnt_l[top + 1..top + h].fill(false);
        }
        for x in 1..=b.depth {
            let top = b.columns[x].top;
            cnt_f[top + 1..top + h].fill(false);
        }
    }
    (0..n).filter(|&i| !cnt_l[i] && !cnt_f[i]).count()
}

/// Digit symbols the run-length encoding loses when `blocks` are tunneled,
/// also accounting for overlaps: recomputed from the surviving row counts
/// per run rather than per block.
pub fn exact_digit_removal(bwt: &Bwt, t: &TunneledBwt) -> i64 {
    let before: i64 = compute_runs(bwt)
        .iter()
        .map(|r| digit_count(r.height as u64) as i64)
        .sum();
    let after: i64 = {
        let mut sum = 0i64;
        let l = t.l();
        let mut i = 0;
        while i < l.len() {
            let mut j = i + 1;
            while j < l.len() && l[j] == l[i] {
                j += 1;
            }
            sum += digit_count((j - i) as u64) as i64;
            i = j;
        }
        sum
    };
    before - after
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::compute_run_blocks;
    use crate::bwt::{build_suffix_array, bwt_from_sa, invert_bwt, lf_mapping};
    use crate::SENTINEL;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bwt_of_str(s: &str) -> Bwt {
        let symbols = s
            .chars()
            .map(|ch| {
                if ch == '$' {
                    SENTINEL
                } else {
                    ch as Symbol + 1
                }
            })
            .collect();
        Bwt::from_symbols(symbols).unwrap()
    }

    fn bwt_of_text(bytes: &[u8]) -> Bwt {
        let t = Text::from_bytes(bytes);
        bwt_from_sa(&t, &build_suffix_array(&t)).unwrap()
    }

    fn bits(v: &BitVector) -> Vec<u8> {
        (0..v.len()).map(|i| v.get(i) as u8).collect()
    }

    fn tunneled_running_example() -> TunneledBwt {
        let bwt = bwt_of_str("yeep$yaass");
        let runs = compute_runs(&bwt);
        let blocks = compute_run_blocks(&lf_mapping(&bwt), &runs);
        tunnel(&bwt, &blocks).unwrap()
    }

    #[test]
    fn tunnel_running_example_golden() {
        let t = tunneled_running_example();
        let expect = bwt_of_str("yeep$yass");
        assert_eq!(t.l(), expect.symbols());
        assert_eq!(bits(t.cnt_l()), &[1, 1, 1, 1, 1, 1, 1, 1, 0, 1]);
        assert_eq!(bits(t.cnt_f()), &[1, 1, 0, 1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(t.orig_len(), 10);
        assert_eq!(t.len(), 9);
        let bwt = bwt_of_str("yeep$yaass");
        let blocks = compute_run_blocks(&lf_mapping(&bwt), &compute_runs(&bwt));
        assert_eq!(removed_positions(&blocks, 10), 1);
    }

    #[test]
    fn tunnel_empty_set_is_identity() {
        let bwt = bwt_of_str("yeep$yaass");
        let t = tunnel(&bwt, &[]).unwrap();
        assert_eq!(t.l(), bwt.symbols());
        assert_eq!(t.len(), t.orig_len());
        assert!(bits(t.cnt_l()).iter().all(|&b| b == 1));
        assert!(bits(t.cnt_f()).iter().all(|&b| b == 1));
    }

    #[test]
    fn width_two_blocks_remove_nothing() {
        // bb$aa has a single width-maximal run-block of width 2 (the b-run
        // extends exactly onto the a-run); its interior is empty, so
        // tunneling it shortens nothing and only adds markings
        let bwt = bwt_of_str("bb$aa");
        let blocks = compute_run_blocks(&lf_mapping(&bwt), &compute_runs(&bwt));
        assert_eq!(blocks.len(), 1);
        assert_eq!((blocks[0].depth, blocks[0].start, blocks[0].end), (1, 0, 1));
        assert_eq!(removed_positions(&blocks, 5), 0);
        let t = tunnel(&bwt, &blocks).unwrap();
        assert_eq!(t.l(), bwt.symbols());
        assert_eq!(t.len(), t.orig_len());
        assert_eq!(invert_tunneled(&t).unwrap().to_bytes(), b"abab".to_vec());
    }

    #[test]
    fn tunnel_rejects_critical_block_sets() {
        let bwt = bwt_of_str("yeep$yaass");
        let runs = compute_runs(&bwt);
        let blocks = compute_run_blocks(&lf_mapping(&bwt), &runs);
        // the same block twice is a same-height collision
        let doubled = vec![blocks[0].clone(), blocks[0].clone()];
        assert!(matches!(
            tunnel(&bwt, &doubled),
            Err(Error::InvalidBlockSet(_))
        ));
        // a non-run-block (start interval narrower than its run) is rejected
        let lf = lf_mapping(&bwt);
        let thin = Block::materialize(&lf, &runs, 2, 8, 8).unwrap();
        assert!(matches!(
            tunnel(&bwt, &[thin]),
            Err(Error::InvalidBlockSet(_))
        ));
    }

    #[test]
    fn generalized_lf_golden() {
        let t = tunneled_running_example();
        let lf = t.generalized_lf().unwrap();
        assert_eq!(lf, &[7, 3, 4, 5, 0, 8, 1, 6, 6]);
    }

    #[test]
    fn generalized_lf_all_ones_equals_lf() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let len = rng.gen_range(1..200);
            let bytes: Vec<u8> = (0..len).map(|_| b'a' + rng.gen_range(0..4)).collect();
            let bwt = bwt_of_text(&bytes);
            let t = TunneledBwt::plain(&bwt);
            assert_eq!(t.generalized_lf().unwrap(), lf_mapping(&bwt));
        }
    }

    /// Direct evaluation of the defining formula via rank over counted
    /// symbols and select over counted F slots.
    fn generalized_lf_oracle(l: &[Symbol], cnt_l: &BitVector, cnt_f: &BitVector) -> Vec<u32> {
        let n = l.len();
        let mut smaller = vec![0u64; ALPHABET + 1];
        for i in 0..n {
            if cnt_l.get(i) {
                smaller[l[i] as usize + 1] += 1;
            }
        }
        for c in 0..ALPHABET {
            smaller[c + 1] += smaller[c];
        }
        let mut seen = vec![0u64; ALPHABET];
        let mut out = vec![NO_TARGET; n];
        for i in 0..n {
            let c = l[i] as usize;
            if cnt_l.get(i) {
                seen[c] += 1;
            }
            let arg = smaller[c] + seen[c];
            if arg > 0 && arg <= cnt_f.rank1(n) as u64 {
                out[i] = cnt_f.select1(arg as usize).unwrap() as u32;
            }
        }
        out
    }

    #[test]
    fn generalized_lf_matches_defining_formula() {
        let t = tunneled_running_example();
        let oracle = generalized_lf_oracle(t.l(), t.cnt_l(), t.cnt_f());
        assert_eq!(t.generalized_lf().unwrap(), oracle);

        let mut rng = ChaCha8Rng::seed_from_u64(0xFEED);
        for _ in 0..300 {
            let len = rng.gen_range(2..150);
            let bytes: Vec<u8> = (0..len).map(|_| b'a' + rng.gen_range(0..3)).collect();
            let bwt = bwt_of_text(&bytes);
            let blocks = compute_run_blocks(&lf_mapping(&bwt), &compute_runs(&bwt));
            let t = tunnel(&bwt, &blocks).unwrap();
            let oracle = generalized_lf_oracle(t.l(), t.cnt_l(), t.cnt_f());
            assert_eq!(t.generalized_lf().unwrap(), oracle);
        }
    }

    /// Random valid crossing sequence: pick i with cnt_l[i] = 1 and
    /// cnt_f[LF[i]] = 1, clear both.
    fn random_crossings(
        bwt: &Bwt,
        rng: &mut ChaCha8Rng,
    ) -> (Vec<bool>, Vec<bool>) {
        let n = bwt.len();
        let lf = lf_mapping(bwt);
        let mut cl = vec![true; n + 1];
        let mut cf = vec![true; n + 1];
        let tries = rng.gen_range(0..=n);
        for _ in 0..tries {
            let i = rng.gen_range(0..n);
            if cl[i] && cf[lf[i] as usize] {
                cl[i] = false;
                cf[lf[i] as usize] = false;
            }
        }
        (cl, cf)
    }

    #[test]
    fn crossing_pairs_preserve_the_mapping_on_counted_positions() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xAB1E);
        for _ in 0..400 {
            let len = rng.gen_range(1..120);
            let bytes: Vec<u8> = (0..len).map(|_| b'a' + rng.gen_range(0..3)).collect();
            let bwt = bwt_of_text(&bytes);
            let lf = lf_mapping(&bwt);
            let (cl, cf) = random_crossings(&bwt, &mut rng);
            let glf = generalized_lf(
                bwt.symbols(),
                &BitVector::from_bits(&cl),
                &BitVector::from_bits(&cf),
            )
            .unwrap();
            for i in 0..bwt.len() {
                if cl[i] {
                    assert_eq!(glf[i], lf[i], "counted position {i} moved");
                }
            }
        }
    }

    #[test]
    fn removing_a_doubly_crossed_position_reindexes_the_mapping() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EAF);
        let mut exercised = 0usize;
        for _ in 0..400 {
            let len = rng.gen_range(2..100);
            let bytes: Vec<u8> = (0..len).map(|_| b'a' + rng.gen_range(0..3)).collect();
            let bwt = bwt_of_text(&bytes);
            let (mut cl, mut cf) = random_crossings(&bwt, &mut rng);
            let n = bwt.len();
            // force one position to be doubly crossed, as tunneling would
            let Some(i) = (0..n).find(|&i| !cl[i] && cf[i]) else {
                continue;
            };
            // pair up: i is crossed in L; cross i in F as well by crossing
            // the L-position mapping onto i, if it is still counted
            let lf = lf_mapping(&bwt);
            let Some(p) = (0..n).find(|&p| lf[p] as usize == i && cl[p]) else {
                continue;
            };
            cl[p] = false;
            cf[i] = false;
            exercised += 1;

            let before = generalized_lf(
                bwt.symbols(),
                &BitVector::from_bits(&cl),
                &BitVector::from_bits(&cf),
            )
            .unwrap();

            // remove position i everywhere
            let mut l2: Vec<Symbol> = bwt.symbols().to_vec();
            l2.remove(i);
            let mut cl2 = cl.clone();
            let mut cf2 = cf.clone();
            cl2.remove(i);
            cf2.remove(i);
            let after = generalized_lf(
                &l2,
                &BitVector::from_bits(&cl2),
                &BitVector::from_bits(&cf2),
            )
            .unwrap();

            for j in 0..n - 1 {
                let old = before[j + (j >= i) as usize];
                if old == NO_TARGET {
                    assert_eq!(after[j], NO_TARGET);
                } else {
                    let expected = old - (old >= i as u32) as u32;
                    assert_eq!(after[j], expected, "position {j} after removing {i}");
                }
            }
        }
        assert!(exercised > 50, "too few removal instances exercised");
    }

    #[test]
    fn invert_running_example() {
        let t = tunneled_running_example();
        assert_eq!(
            invert_tunneled(&t).unwrap().to_bytes(),
            b"easypeasy".to_vec()
        );
    }

    #[test]
    fn invert_plain_equals_normal_inversion() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..60 {
            let len = rng.gen_range(0..500);
            let bytes: Vec<u8> = (0..len).map(|_| b'a' + rng.gen_range(0..4)).collect();
            let bwt = bwt_of_text(&bytes);
            let t = TunneledBwt::plain(&bwt);
            assert_eq!(
                invert_tunneled(&t).unwrap(),
                invert_bwt(&bwt).unwrap()
            );
        }
    }

    #[test]
    fn invert_randomized_end_to_end() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xE2E);
        for _ in 0..1000 {
            let len = rng.gen_range(1..400);
            let sigma = [2u8, 2, 3, 4, 16][rng.gen_range(0..5)];
            let bytes: Vec<u8> = (0..len).map(|_| b'a' + rng.gen_range(0..sigma)).collect();
            let bwt = bwt_of_text(&bytes);
            let blocks = compute_run_blocks(&lf_mapping(&bwt), &compute_runs(&bwt));
            let t = tunnel(&bwt, &blocks).unwrap();
            assert_eq!(t.orig_len() - t.len(), removed_positions(&blocks, bwt.len()));
            // the per-block interior sum bounds the union from above
            let per_block_sum: usize = blocks
                .iter()
                .map(|b| (b.depth - 1) * (b.height() - 1))
                .sum();
            assert!(removed_positions(&blocks, bwt.len()) <= per_block_sum);
            assert_eq!(
                invert_tunneled(&t).unwrap().to_bytes(),
                bytes,
                "tunneled roundtrip failed"
            );
        }
    }

    #[test]
    fn aux_encoding_golden() {
        let t = tunneled_running_example();
        let aux = encode_aux(&t).unwrap();
        assert_eq!(aux.symbols(), &[2, 1]);
        assert_eq!(aux.tunnel_count(), 1);

        // untunneled: every run of height > 1 is unmarked
        let plain = TunneledBwt::plain(&bwt_of_str("yeep$yaass"));
        assert_eq!(encode_aux(&plain).unwrap().symbols(), &[3, 3, 3]);
        let plain = TunneledBwt::plain(&bwt_of_str("aaaa$"));
        assert_eq!(encode_aux(&plain).unwrap().symbols(), &[3]);
    }

    #[test]
    fn aux_decoding_golden_and_roundtrip() {
        let l = bwt_of_str("yeep$yass").symbols().to_vec();
        let aux = AuxVector::from_symbols(vec![2, 1]).unwrap();
        let t = decode_aux(l, &aux, 10).unwrap();
        assert_eq!(t, tunneled_running_example());

        // all-3 aux rebuilds all-ones bitvectors
        let l = bwt_of_str("yeep$yaass").symbols().to_vec();
        let aux = AuxVector::from_symbols(vec![3, 3, 3]).unwrap();
        let t = decode_aux(l, &aux, 10).unwrap();
        assert!((0..t.cnt_l().len()).all(|i| t.cnt_l().get(i)));
        assert!((0..t.cnt_f().len()).all(|i| t.cnt_f().get(i)));
    }

    #[test]
    fn aux_roundtrip_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA0C);
        for _ in 0..500 {
            let len = rng.gen_range(1..300);
            let bytes: Vec<u8> = (0..len).map(|_| b'a' + rng.gen_range(0..3)).collect();
            let bwt = bwt_of_text(&bytes);
            let blocks = compute_run_blocks(&lf_mapping(&bwt), &compute_runs(&bwt));
            let t = tunnel(&bwt, &blocks).unwrap();
            let aux = encode_aux(&t).unwrap();
            let rebuilt = decode_aux(t.l().to_vec(), &aux, t.orig_len()).unwrap();
            assert_eq!(rebuilt, t);
            assert_eq!(encode_aux(&rebuilt).unwrap(), aux);
        }
    }

    #[test]
    fn aux_length_mismatch_is_rejected() {
        let l = bwt_of_str("yeep$yass").symbols().to_vec();
        let short = AuxVector::from_symbols(vec![2]).unwrap();
        assert!(matches!(
            decode_aux(l.clone(), &short, 10),
            Err(Error::Corrupt { .. })
        ));
        let long = AuxVector::from_symbols(vec![2, 1, 3]).unwrap();
        assert!(matches!(
            decode_aux(l, &long, 10),
            Err(Error::Corrupt { .. })
        ));
    }
}
