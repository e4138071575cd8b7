//! Block scoring, the benefit/tax estimators and greedy block selection.
//!
//! Scores count the run-length digit symbols a tunnel removes. The
//! estimators translate removed digits into encoded bits saved (gross
//! benefit) and bits spent on the auxiliary marking vector (tax); greedy
//! selection picks blocks by descending score and keeps the prefix with the
//! best net benefit.

use crate::backend::digit_count;
use crate::blocks::{Block, CollisionGraph, Run};
use crate::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// A block index paired with its current score: the estimated count of
/// run-length digit symbols removed if the block is tunneled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredBlock {
    pub block: usize,
    pub score: f64,
}

/// Initial score of a block: each interior column passes through a run of
/// height `h` and shrinks it to `h - h_B + 1` rows (the top row survives),
/// so the run loses `digits(h) - digits(h - h_B + 1)` digit symbols. The
/// start and end columns keep their characters and contribute nothing.
pub fn initial_score(block: &Block, runs: &[Run]) -> f64 {
    if block.depth < 2 {
        return 0.0;
    }
    let hb = block.height() as u64;
    let mut score = 0u64;
    for col in &block.columns[1..block.depth] {
        let h = runs[col.run].height as u64;
        score += (digit_count(h) - digit_count(h - hb + 1)) as u64;
    }
    score as f64
}

/// Score every block of a set.
pub fn score_blocks(blocks: &[Block], runs: &[Run]) -> Vec<ScoredBlock> {
    blocks
        .iter()
        .enumerate()
        .map(|(i, b)| ScoredBlock {
            block: i,
            score: initial_score(b, runs),
        })
        .collect()
}

/// The quantities the benefit/tax estimators run on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorState {
    /// Length of the run-length encoded BWT.
    pub n_rle: u64,
    /// Digit symbols in the run-length encoding (everything but run heads).
    pub rc: u64,
    /// Digit symbols removed by the tunnels chosen so far.
    pub tc: f64,
    /// Number of tunnels chosen so far.
    pub t: u64,
    /// Runs of height greater than one.
    pub r_gt1: u64,
}

impl EstimatorState {
    /// Derive the static quantities from the runs of a BWT.
    pub fn from_runs(runs: &[Run]) -> Self {
        let mut rc = 0u64;
        let mut r_gt1 = 0u64;
        for r in runs {
            rc += digit_count(r.height as u64) as u64;
            if r.height > 1 {
                r_gt1 += 1;
            }
        }
        EstimatorState {
            n_rle: runs.len() as u64 + rc,
            rc,
            tc: 0.0,
            t: 0,
            r_gt1,
        }
    }
}

/// Estimated bits saved on the encoded BWT by removing `tc` digit symbols:
/// `n*log(n/(n-tc)) - rc*log(rc/(rc-tc)) + tc*(1 + log((n-tc)/(rc-tc)))`
/// with `n` the run-length encoded length.
pub fn gross_benefit(state: &EstimatorState) -> Result<f64> {
    let n = state.n_rle as f64;
    let rc = state.rc as f64;
    let tc = state.tc;
    if tc == 0.0 {
        return Ok(0.0);
    }
    if tc >= rc || tc >= n {
        return Err(Error::EstimatorDomain(format!(
            "tc = {tc} out of domain (rc = {rc}, n = {n})"
        )));
    }
    Ok(n * (n / (n - tc)).log2() - rc * (rc / (rc - tc)).log2()
        + tc * (1.0 + ((n - tc) / (rc - tc)).log2()))
}

/// Estimated bits spent encoding the marking vector for `t` tunnels:
/// `2t*(1 + log(h^2 - 1)) + 2*t*h*log(1 + 2/(h-1))` where `h` is the
/// average logarithmic run height `log((r_gt1 - 2t)/(2t))`. The ratio is
/// clamped below at 3 so the formula stays finite on tiny inputs; the clamp
/// only overestimates the tax, which can only delay tunneling.
pub fn tax(state: &EstimatorState) -> f64 {
    let t = state.t as f64;
    if state.t == 0 {
        return 0.0;
    }
    let ratio = ((state.r_gt1 as f64 - 2.0 * t) / (2.0 * t)).max(3.0);
    let h = ratio.log2();
    2.0 * t * (1.0 + (h * h - 1.0).log2()) + 2.0 * t * h * (1.0 + 2.0 / (h - 1.0)).log2()
}

/// The outcome of greedy block selection.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceResult {
    /// All blocks in pick order (descending current score).
    pub order: Vec<usize>,
    /// The score each block had when it was picked.
    pub picked_scores: Vec<f64>,
    /// Prefix length of `order` with the best net benefit; 0 means do not
    /// tunnel.
    pub t_best: usize,
    /// The best net benefit in bits, non-negative.
    pub b_best: f64,
}

impl ChoiceResult {
    /// Digit symbols removed by the first `t` picks.
    pub fn tc_at(&self, t: usize) -> f64 {
        self.picked_scores[..t].iter().sum()
    }
}

struct HeapEntry {
    score: f64,
    block: usize,
    version: u32,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // max score first, ties broken by smallest block index
        self.score
            .partial_cmp(&other.score)
            .expect("block scores must not be NaN")
            .then_with(|| other.block.cmp(&self.block))
    }
}

/// Greedy block choice: repeatedly pick the block with the maximum current
/// score, reduce the scores of its colliding neighbors, and track the pick
/// count that maximizes `gross_benefit - tax`.
///
/// When the picked block is the inner side of an edge, the outer neighbor's
/// score is scaled by its remaining width fraction; when it is the outer
/// side, the inner neighbor loses the picked score weighted by the width
/// ratio. Scores are floored at zero.
pub fn greedy_choice(
    blocks: &[Block],
    scored: &[ScoredBlock],
    graph: &CollisionGraph,
    state: &EstimatorState,
) -> ChoiceResult {
    assert_eq!(blocks.len(), scored.len());
    assert_eq!(blocks.len(), graph.node_count());

    let m = blocks.len();
    let mut current: Vec<f64> = vec![0.0; m];
    let mut version = vec![0u32; m];
    let mut alive = vec![true; m];
    let mut edge_alive = vec![true; graph.edges().len()];

    let mut heap = BinaryHeap::with_capacity(m);
    for sb in scored {
        current[sb.block] = sb.score;
        heap.push(HeapEntry {
            score: sb.score,
            block: sb.block,
            version: 0,
        });
    }

    let mut result = ChoiceResult {
        order: Vec::with_capacity(m),
        picked_scores: Vec::with_capacity(m),
        t_best: 0,
        b_best: 0.0,
    };
    let mut running = EstimatorState { ..*state };
    running.tc = 0.0;
    running.t = 0;

    while let Some(entry) = heap.pop() {
        let b = entry.block;
        if !alive[b] || entry.version != version[b] {
            continue;
        }
        alive[b] = false;
        let score_b = current[b];
        let w_b = blocks[b].width() as f64;

        for &eid in graph.edge_ids_of(b) {
            if !edge_alive[eid] {
                continue;
            }
            edge_alive[eid] = false;
            let edge = graph.edges()[eid];
            let nb = if edge.inner == b { edge.outer } else { edge.inner };
            if !alive[nb] {
                continue;
            }
            let w_n = blocks[nb].width() as f64;
            let updated = if edge.inner == b {
                // the picked block's tunnel shortens the outer neighbor
                current[nb] * ((w_n - w_b) / w_n)
            } else {
                // the picked outer block already removes the shared share
                current[nb] - (w_n / w_b) * score_b
            };
            current[nb] = updated.max(0.0);
            version[nb] += 1;
            heap.push(HeapEntry {
                score: current[nb],
                block: nb,
                version: version[nb],
            });
        }

        result.order.push(b);
        result.picked_scores.push(score_b);
        running.t += 1;
        running.tc += score_b;

        if running.tc < running.rc as f64 {
            let net = gross_benefit(&running).expect("domain checked") - tax(&running);
            if net > result.b_best {
                result.b_best = net;
                result.t_best = running.t as usize;
            }
        }
    }
    result
}
