//! Runs, width-maximal run-blocks and their collision structure.
//!
//! A block pairs a depth `d` with a start interval `[start, end]` such that
//! the interval stays within one symbol per column through `d` applications
//! of the LF-mapping. A run-block starts and ends exactly on maximal runs.
//! Only width-maximal run-blocks with height and width both greater than one
//! are worth tunneling, and those are what [`compute_run_blocks`] returns.

use crate::bwt::Bwt;
use crate::{Error, Result, Symbol};
use std::collections::HashSet;

/// A maximal run of one symbol in the BWT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    /// Position of the run head (topmost row).
    pub start: usize,
    /// Number of rows in the run.
    pub height: usize,
    /// The repeated symbol.
    pub symbol: Symbol,
}

impl Run {
    /// One past the last row of the run.
    pub fn end(&self) -> usize {
        self.start + self.height
    }
}

/// Partition the BWT into maximal runs.
pub fn compute_runs(bwt: &Bwt) -> Vec<Run> {
    let s = bwt.symbols();
    let mut runs = Vec::new();
    let mut i = 0;
    while i < s.len() {
        let mut j = i + 1;
        while j < s.len() && s[j] == s[i] {
            j += 1;
        }
        runs.push(Run {
            start: i,
            height: j - i,
            symbol: s[i],
        });
        i = j;
    }
    runs
}

/// Index of the run containing `pos`, by binary search over run heads.
pub fn run_containing(runs: &[Run], pos: usize) -> usize {
    debug_assert!(!runs.is_empty());
    runs.partition_point(|r| r.start <= pos) - 1
}

/// One column of a block: the run it passes through and its topmost row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockColumn {
    /// Index into the run list.
    pub run: usize,
    /// Position of the column's topmost row.
    pub top: usize,
}

/// A `d`-block over the start interval `[start, end]`, with all columns
/// materialized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    /// Number of LF applications the interval survives; width is `depth + 1`.
    pub depth: usize,
    /// First row of the start interval.
    pub start: usize,
    /// Last row of the start interval (inclusive).
    pub end: usize,
    /// Column tops, `depth + 1` entries, leftmost first.
    pub columns: Vec<BlockColumn>,
}

impl Block {
    pub fn height(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn width(&self) -> usize {
        self.depth + 1
    }

    /// Materialize a block from its coordinates by walking the LF-mapping.
    /// Fails if some column does not stay within a single run (i.e. the
    /// coordinates do not describe a block).
    pub fn materialize(
        lf: &[u32],
        runs: &[Run],
        depth: usize,
        start: usize,
        end: usize,
    ) -> Result<Block> {
        if end < start || end >= lf.len() {
            return Err(Error::InvalidInput("bad block interval".into()));
        }
        let height = end - start + 1;
        let mut columns = Vec::with_capacity(depth + 1);
        let mut top = start;
        for _ in 0..=depth {
            let run = run_containing(runs, top);
            if top + height > runs[run].end() {
                return Err(Error::InvalidInput(
                    "interval does not stay within one run per column".into(),
                ));
            }
            columns.push(BlockColumn { run, top });
            top = lf[top] as usize;
        }
        Ok(Block {
            depth,
            start,
            end,
            columns,
        })
    }
}

/// Compute all width-maximal run-blocks with height > 1 and width > 1.
///
/// Walks each run's block along the LF-mapping with a stack; a run that can
/// be extended into is processed first and the waiting block's frontier then
/// jumps over the whole walked span, so every BWT position is visited at
/// most once. A block whose walk passes exactly through a same-height run
/// inherits that run's end pointer and marks it as not width-maximal.
pub fn compute_run_blocks(lf: &[u32], runs: &[Run]) -> Vec<Block> {
    let n = lf.len();
    // frontier: LF-image of each run's block so far
    let mut be: Vec<u32> = runs.iter().map(|r| lf[r.start]).collect();
    // one past the last run-aligned column, or LF[head] when none
    let mut rbe = be.clone();
    let mut stack: Vec<usize> = Vec::new();

    for r0 in 0..runs.len() {
        if runs[r0].height <= 1 {
            continue;
        }
        stack.push(r0);
        while let Some(&b) = stack.last() {
            let target = be[b] as usize;
            let bt = run_containing(runs, target);
            if target + runs[b].height <= runs[bt].end() {
                // rows fit inside run bt: extend through it
                stack.push(bt);
            } else {
                stack.pop();
                if let Some(&p) = stack.last() {
                    // p's rows rode along b's walk; jump p's frontier
                    be[p] = (be[b] as usize + be[p] as usize - runs[b].start) as u32;
                    if runs[b].height == runs[p].height {
                        rbe[p] = rbe[b];
                        rbe[b] = lf[runs[b].start]; // b is not width-maximal
                    }
                }
            }
        }
    }

    let mut blocks = Vec::new();
    for (r0, run) in runs.iter().enumerate() {
        if run.height <= 1 || rbe[r0] == lf[run.start] {
            continue;
        }
        // walk out the columns until the end pointer
        let mut columns = Vec::new();
        let mut top = run.start;
        loop {
            columns.push(BlockColumn {
                run: run_containing(runs, top),
                top,
            });
            assert!(columns.len() <= n, "run-block walk exceeded BWT length");
            if lf[top] == rbe[r0] {
                break;
            }
            top = lf[top] as usize;
        }
        debug_assert!(columns.len() > 1);
        blocks.push(Block {
            depth: columns.len() - 1,
            start: run.start,
            end: run.start + run.height - 1,
            columns,
        });
    }
    blocks
}

/// How two blocks relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Collision {
    /// No shared positions.
    None,
    /// A proper crossing; `inner`/`outer` index the arguments of
    /// [`classify_collision`] (0 = first, 1 = second). The inner block is
    /// the higher of the two.
    Compensable { inner: u8, outer: u8 },
    /// Any collision that tunneling cannot compensate, including
    /// self-collisions.
    Critical,
}

fn columns_overlap(a: &BlockColumn, ha: usize, b: &BlockColumn, hb: usize) -> usize {
    let lo = a.top.max(b.top);
    let hi = (a.top + ha).min(b.top + hb);
    hi.saturating_sub(lo)
}

/// Evaluate the collision taxonomy for a pair of blocks.
///
/// Calling with the same block twice performs the self-collision check.
pub fn classify_collision(a: &Block, b: &Block) -> Collision {
    let ha = a.height();
    let hb = b.height();

    if a == b {
        for x in 0..a.columns.len() {
            for y in x + 1..a.columns.len() {
                if columns_overlap(&a.columns[x], ha, &a.columns[y], ha) > 0 {
                    return Collision::Critical;
                }
            }
        }
        return Collision::None;
    }

    let mut any_shared = false;
    'outer: for ca in &a.columns {
        for cb in &b.columns {
            if columns_overlap(ca, ha, cb, hb) > 0 {
                any_shared = true;
                break 'outer;
            }
        }
    }
    if !any_shared {
        return Collision::None;
    }

    // the higher block is the inner one
    let (inner, outer, labels) = if ha >= hb {
        (a, b, (0u8, 1u8))
    } else {
        (b, a, (1u8, 0u8))
    };
    let hi = inner.height();
    let ho = outer.height();

    // condition 1: the outer block's leftmost and rightmost columns are unshared
    for oc in [&outer.columns[0], &outer.columns[outer.depth]] {
        for ic in &inner.columns {
            if columns_overlap(ic, hi, oc, ho) > 0 {
                return Collision::Critical;
            }
        }
    }

    // condition 2: at least one full row of the inner block is unshared
    let mut row_shared = vec![false; hi];
    for ic in &inner.columns {
        for oc in &outer.columns {
            let lo = ic.top.max(oc.top);
            let hi_pos = (ic.top + hi).min(oc.top + ho);
            for p in lo..hi_pos {
                row_shared[p - ic.top] = true;
            }
        }
    }
    if row_shared.iter().all(|&s| s) {
        return Collision::Critical;
    }

    // condition 3: every intersecting column pair leaves the inner column
    // with exactly 0 or h_inner - h_outer unshared rows
    for ic in &inner.columns {
        for oc in &outer.columns {
            let ov = columns_overlap(ic, hi, oc, ho);
            if ov > 0 {
                let leftover = hi - ov;
                if leftover != 0 && leftover != hi - ho {
                    return Collision::Critical;
                }
            }
        }
    }

    Collision::Compensable {
        inner: labels.0,
        outer: labels.1,
    }
}

/// An edge of the collision graph; `inner` is the higher block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollisionEdge {
    pub inner: usize,
    pub outer: usize,
}

/// Colliding block pairs whose intersection is not overlaid by a third
/// block, as immediate-nesting edges per run.
#[derive(Debug, Clone)]
pub struct CollisionGraph {
    node_count: usize,
    edges: Vec<CollisionEdge>,
    adj: Vec<Vec<usize>>,
}

impl CollisionGraph {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[CollisionEdge] {
        &self.edges
    }

    /// Edge ids incident to `block`.
    pub fn edge_ids_of(&self, block: usize) -> &[usize] {
        &self.adj[block]
    }
}

/// Build the collision graph of a width-maximal run-block set.
///
/// Column intervals of such blocks form a laminar family inside every run;
/// an edge connects each column to its immediate enclosing column from
/// another block. Any non-laminar or equal-height sharing would be a
/// critical collision, which width-maximal run-blocks cannot produce, so it
/// is reported as an invariant violation.
pub fn build_collision_graph(blocks: &[Block], runs: &[Run]) -> Result<CollisionGraph> {
    // bucket column intervals by run
    let mut per_run: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); runs.len()];
    for (id, b) in blocks.iter().enumerate() {
        let h = b.height();
        for c in &b.columns {
            per_run[c.run].push((c.top, c.top + h, id));
        }
    }

    let mut edge_set: HashSet<(usize, usize)> = HashSet::new();
    let mut edges = Vec::new();
    for intervals in per_run.iter_mut() {
        if intervals.len() < 2 {
            continue;
        }
        intervals.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        let mut open: Vec<(usize, usize, usize)> = Vec::new();
        for &(lo, hi, id) in intervals.iter() {
            while let Some(&(_, thi, _)) = open.last() {
                if thi <= lo {
                    open.pop();
                } else {
                    break;
                }
            }
            if let Some(&(tlo, thi, tid)) = open.last() {
                if hi > thi {
                    return Err(Error::InvariantViolation(
                        "critical collision: partially overlapping block columns".into(),
                    ));
                }
                if tid == id {
                    return Err(Error::InvariantViolation(
                        "critical collision: block overlays itself".into(),
                    ));
                }
                if hi - lo == thi - tlo {
                    return Err(Error::InvariantViolation(
                        "critical collision: equal-height blocks share positions".into(),
                    ));
                }
                if edge_set.insert((tid, id)) {
                    debug_assert!(blocks[tid].height() > blocks[id].height());
                    edges.push(CollisionEdge {
                        inner: tid,
                        outer: id,
                    });
                }
            }
            open.push((lo, hi, id));
        }
    }

    let mut adj = vec![Vec::new(); blocks.len()];
    for (eid, e) in edges.iter().enumerate() {
        adj[e.inner].push(eid);
        adj[e.outer].push(eid);
    }
    Ok(CollisionGraph {
        node_count: blocks.len(),
        edges,
        adj,
    })
}
