//! Configuration and label digraphs.
//!
//! For a fixed spatial period `sigma` every word of length `sigma` has
//! exactly one down-extension, so the configuration digraph on raw words is
//! a functional graph. Its cycles whose words are aperiodic are exactly the
//! periodic solutions of spatial period `sigma`, the cycle length being the
//! temporal period. The traversal works on raw words rather than on rotation
//! classes: a trajectory can return to a nontrivial rotation of itself, and
//! a class-level cycle would then understate the temporal period.
//!
//! For a fixed temporal period `tau` the label digraph on length-`tau`
//! columns has out-degree between 0 and `n`. Closed walks of length `sigma`
//! whose induced tile has minimal periods `(tau, sigma)` are the periodic
//! solutions of those periods.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rule::Rule;
use crate::tile::Tile;
use crate::word::{slice_period, State, Word};

/// Default limit on the number of indexed words.
pub const DEFAULT_INDEX_CAP: u64 = 1 << 31;

/// Default depth bound for the label-digraph search.
pub const DEFAULT_SIGMA_MAX: usize = 6;

/// Dense base-`n` indexing of `Z_n^len`, most significant symbol first, so
/// index order is lexicographic word order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WordIndexer {
    n: u32,
    len: usize,
    size: usize,
}

impl WordIndexer {
    pub fn new(n: u32, len: usize) -> Result<Self> {
        Self::with_cap(n, len, DEFAULT_INDEX_CAP)
    }

    pub fn with_cap(n: u32, len: usize, cap: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroStates);
        }
        if len == 0 {
            return Err(Error::EmptyWord);
        }
        let limit = cap.min(1 << 63);
        let overflow = Error::IndexOverflow { n, len, limit };
        let mut size: u64 = 1;
        for _ in 0..len {
            size = size.checked_mul(n as u64).ok_or(overflow.clone())?;
            if size > limit {
                return Err(overflow);
            }
        }
        let size = usize::try_from(size).map_err(|_| overflow)?;
        Ok(WordIndexer { n, len, size })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn encode(&self, states: &[State]) -> usize {
        debug_assert_eq!(states.len(), self.len);
        states
            .iter()
            .fold(0, |acc, &s| acc * self.n as usize + s as usize)
    }

    pub fn decode_into(&self, mut index: usize, out: &mut [State]) {
        let n = self.n as usize;
        for slot in out.iter_mut().rev() {
            *slot = (index % n) as State;
            index /= n;
        }
    }

    pub fn word(&self, index: usize) -> Word {
        let mut states = vec![0; self.len];
        self.decode_into(index, &mut states);
        Word::new(states).expect("len >= 1")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    Configuration,
    Label,
}

/// A cycle of one of the digraphs and the periodic solution it induces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub kind: CycleKind,
    /// Number of arcs on the cycle.
    pub period: usize,
    pub words: Vec<Word>,
    /// Canonical tile of the induced solution, reduced to its minimal periods.
    pub tile: Tile,
    pub spatial_period: usize,
    pub temporal_period: usize,
}

/// The down-extension of `w`: `b[i+1] = f(a[i], a[i+1])`, indices mod `sigma`.
pub fn config_successor(rule: &Rule, w: &Word) -> Word {
    rule.step(w)
}

const UNVISITED: u8 = 0;
const ON_PATH: u8 = 1;
const DONE: u8 = 2;

/// Reusable buffers for walking configuration digraphs.
///
/// Every node is visited once: successors are followed from each unvisited
/// start while nodes on the current path are marked, and a cycle is
/// reported when the walk re-enters its own path.
#[derive(Debug, Default)]
pub struct ConfigScanner {
    color: Vec<u8>,
    path: Vec<usize>,
}

impl ConfigScanner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Calls `on_cycle` once for every cycle of the raw-word configuration
    /// digraph, with the cycle's word indices in successor order.
    pub fn for_each_cycle<F>(&mut self, rule: &Rule, sigma: usize, mut on_cycle: F) -> Result<()>
    where
        F: FnMut(&WordIndexer, &[usize]),
    {
        let ix = WordIndexer::new(rule.n(), sigma)?;
        let size = ix.size();
        let n = rule.n();
        let color = &mut self.color;
        let path = &mut self.path;
        color.clear();
        color.resize(size, UNVISITED);

        let mut odometer: Vec<State> = vec![0; sigma];
        let mut cur: Vec<State> = vec![0; sigma];
        let mut next: Vec<State> = vec![0; sigma];
        for start in 0..size {
            if start > 0 {
                for d in odometer.iter_mut().rev() {
                    *d += 1;
                    if *d < n {
                        break;
                    }
                    *d = 0;
                }
            }
            if color[start] != UNVISITED {
                continue;
            }
            cur.copy_from_slice(&odometer);
            path.clear();
            let mut idx = start;
            loop {
                color[idx] = ON_PATH;
                path.push(idx);
                let mut left = cur[sigma - 1];
                let mut succ = 0usize;
                for (slot, &right) in next.iter_mut().zip(cur.iter()) {
                    let v = rule.at(left, right);
                    *slot = v;
                    succ = succ * n as usize + v as usize;
                    left = right;
                }
                std::mem::swap(&mut cur, &mut next);
                match color[succ] {
                    UNVISITED => idx = succ,
                    ON_PATH => {
                        let pos = path
                            .iter()
                            .rposition(|&p| p == succ)
                            .expect("on-path node is on the path");
                        on_cycle(&ix, &path[pos..]);
                        break;
                    }
                    _ => break,
                }
            }
            for &p in path.iter() {
                color[p] = DONE;
            }
        }
        Ok(())
    }

    /// Smallest temporal period of a solution with spatial period exactly `sigma`.
    pub fn min_temporal_period(&mut self, rule: &Rule, sigma: usize) -> Result<Option<usize>> {
        let mut best: Option<usize> = None;
        let mut buf = vec![0; sigma];
        self.for_each_cycle(rule, sigma, |ix, cycle| {
            if best.is_some_and(|b| b <= cycle.len()) {
                return;
            }
            ix.decode_into(cycle[0], &mut buf);
            if slice_period(&buf) == sigma {
                best = Some(cycle.len());
            }
        })?;
        Ok(best)
    }

    /// Whether a solution with periods exactly `(tau, sigma)` exists.
    pub fn existence(&mut self, rule: &Rule, tau: usize, sigma: usize) -> Result<bool> {
        let mut found = false;
        let mut buf = vec![0; sigma];
        self.for_each_cycle(rule, sigma, |ix, cycle| {
            if found || cycle.len() != tau {
                return;
            }
            ix.decode_into(cycle[0], &mut buf);
            found = slice_period(&buf) == sigma;
        })?;
        Ok(found)
    }

    /// Canonical tiles of all solutions with spatial period exactly `sigma`.
    pub fn ps_with_spatial_period(&mut self, rule: &Rule, sigma: usize) -> Result<BTreeSet<Tile>> {
        let mut tiles = BTreeSet::new();
        self.for_each_cycle(rule, sigma, |ix, cycle| {
            let rows: Vec<Word> = cycle.iter().map(|&i| ix.word(i)).collect();
            if !rows[0].is_aperiodic() {
                return;
            }
            let tile = Tile::from_row_words(&rows).expect("rectangular");
            debug_assert!(tile.is_valid());
            tiles.insert(tile.canonical());
        })?;
        Ok(tiles)
    }

    /// Canonical tiles of all solutions with periods exactly `(tau, sigma)`.
    pub fn tiles_with_periods(
        &mut self,
        rule: &Rule,
        tau: usize,
        sigma: usize,
    ) -> Result<BTreeSet<Tile>> {
        let mut tiles = BTreeSet::new();
        let mut buf = vec![0; sigma];
        self.for_each_cycle(rule, sigma, |ix, cycle| {
            if cycle.len() != tau {
                return;
            }
            ix.decode_into(cycle[0], &mut buf);
            if slice_period(&buf) != sigma {
                return;
            }
            let rows: Vec<Word> = cycle.iter().map(|&i| ix.word(i)).collect();
            let tile = Tile::from_row_words(&rows).expect("rectangular");
            tiles.insert(tile.canonical());
        })?;
        Ok(tiles)
    }
}

/// Every cycle of the raw-word configuration digraph, each reported once.
pub fn find_config_cycles(rule: &Rule, sigma: usize) -> Result<Vec<CycleRecord>> {
    let mut out = Vec::new();
    ConfigScanner::new().for_each_cycle(rule, sigma, |ix, cycle| {
        let words: Vec<Word> = cycle.iter().map(|&i| ix.word(i)).collect();
        out.push(config_record(words));
    })?;
    Ok(out)
}

fn config_record(words: Vec<Word>) -> CycleRecord {
    // All words on a cycle share one period; the solution lives on it.
    let p = words[0].period();
    let rows: Vec<Vec<State>> = words.iter().map(|w| w.states()[..p].to_vec()).collect();
    let tile = Tile::from_rows(rows).expect("rectangular").canonical();
    debug_assert!(tile.is_valid());
    CycleRecord {
        kind: CycleKind::Configuration,
        period: words.len(),
        temporal_period: words.len(),
        spatial_period: p,
        words,
        tile,
    }
}

/// Groups configuration cycles by the solution they induce.
pub fn group_by_tile(
    records: Vec<CycleRecord>,
) -> std::collections::BTreeMap<Tile, Vec<CycleRecord>> {
    let mut groups = std::collections::BTreeMap::<Tile, Vec<CycleRecord>>::new();
    for r in records {
        groups.entry(r.tile.clone()).or_default().push(r);
    }
    groups
}

pub fn ps_with_spatial_period(rule: &Rule, sigma: usize) -> Result<BTreeSet<Tile>> {
    ConfigScanner::new().ps_with_spatial_period(rule, sigma)
}

/// `Y_{sigma,n}(f)`: the least temporal period among solutions of spatial
/// period `sigma`, or `None` if there are none.
pub fn min_temporal_period(rule: &Rule, sigma: usize) -> Result<Option<usize>> {
    ConfigScanner::new().min_temporal_period(rule, sigma)
}

pub fn existence(rule: &Rule, tau: usize, sigma: usize) -> Result<bool> {
    ConfigScanner::new().existence(rule, tau, sigma)
}

/// Labels `B` that `a` right-extends to: `f(a[i], b[i]) = b[i+1]` for all
/// `i`, indices mod `tau`. Ordered by `b[0]`.
pub fn label_successors(rule: &Rule, a: &Word) -> Vec<Word> {
    let mut out = Vec::new();
    let mut buf = vec![0; a.len()];
    for b0 in 0..rule.n() {
        if right_extend(rule, a.states(), b0, &mut buf) {
            out.push(Word::new(buf.clone()).expect("nonempty"));
        }
    }
    out
}

fn right_extend(rule: &Rule, a: &[State], b0: State, out: &mut [State]) -> bool {
    let tau = a.len();
    out[0] = b0;
    for i in 0..tau - 1 {
        out[i + 1] = rule.at(a[i], out[i]);
    }
    rule.at(a[tau - 1], out[tau - 1]) == b0
}

/// Adjacency of the label digraph in compressed form.
#[derive(Clone, Debug)]
pub struct LabelGraph {
    ix: WordIndexer,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl LabelGraph {
    pub fn new(rule: &Rule, tau: usize) -> Result<Self> {
        let ix = WordIndexer::new(rule.n(), tau)?;
        let mut offsets = Vec::with_capacity(ix.size() + 1);
        let mut targets = Vec::new();
        let mut a = vec![0; tau];
        let mut b = vec![0; tau];
        offsets.push(0);
        for idx in 0..ix.size() {
            ix.decode_into(idx, &mut a);
            for b0 in 0..rule.n() {
                if right_extend(rule, &a, b0, &mut b) {
                    targets.push(ix.encode(&b));
                }
            }
            offsets.push(targets.len());
        }
        Ok(LabelGraph {
            ix,
            offsets,
            targets,
        })
    }

    pub fn indexer(&self) -> &WordIndexer {
        &self.ix
    }

    pub fn successors(&self, idx: usize) -> &[usize] {
        &self.targets[self.offsets[idx]..self.offsets[idx + 1]]
    }

    /// Visits every closed walk of exactly `len` arcs. Each walk is
    /// reported from its least-index vertex, so starts are processed in index
    /// order and vertices below the start are pruned. A walk through its
    /// least vertex several times is reported once per such visit.
    pub fn for_each_closed_walk<F>(&self, len: usize, mut visit: F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        let mut walk = Vec::with_capacity(len);
        for start in 0..self.ix.size() {
            walk.clear();
            walk.push(start);
            self.extend_walk(start, len, &mut walk, &mut visit)?;
        }
        ControlFlow::Continue(())
    }

    fn extend_walk<F>(
        &self,
        start: usize,
        len: usize,
        walk: &mut Vec<usize>,
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        let last = *walk.last().expect("nonempty walk");
        for &next in self.successors(last) {
            if walk.len() == len {
                if next == start {
                    visit(walk)?;
                }
                continue;
            }
            if next < start {
                continue;
            }
            walk.push(next);
            let flow = self.extend_walk(start, len, walk, visit);
            walk.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    /// The induced tile (columns = labels) if its periods are exactly
    /// `(tau, walk.len())`.
    fn minimal_tile(&self, walk: &[usize]) -> Option<(Vec<Word>, Tile)> {
        let labels: Vec<Word> = walk.iter().map(|&i| self.ix.word(i)).collect();
        let tile = Tile::from_column_words(&labels).expect("rectangular");
        tile.is_valid().then_some((labels, tile))
    }
}

/// Canonical tiles with periods exactly `(tau, sigma)`, found as closed
/// walks of length `sigma` in the label digraph.
pub fn ps_via_labels(rule: &Rule, tau: usize, sigma: usize) -> Result<BTreeSet<Tile>> {
    if sigma == 0 {
        return Err(Error::InvalidArgument("sigma must be positive".into()));
    }
    let graph = LabelGraph::new(rule, tau)?;
    let mut tiles = BTreeSet::new();
    let _ = graph.for_each_closed_walk(sigma, |walk| {
        if let Some((_, tile)) = graph.minimal_tile(walk) {
            tiles.insert(tile.canonical());
        }
        ControlFlow::Continue(())
    });
    Ok(tiles)
}

/// The first label cycle, by increasing length up to `sigma_max`, that
/// induces a solution of temporal period `tau`.
pub fn min_spatial_witness(
    rule: &Rule,
    tau: usize,
    sigma_max: usize,
) -> Result<Option<CycleRecord>> {
    if sigma_max == 0 {
        return Err(Error::InvalidArgument(
            "sigma_max must be at least 1".into(),
        ));
    }
    let graph = LabelGraph::new(rule, tau)?;
    for len in 1..=sigma_max {
        let mut found = None;
        let _ = graph.for_each_closed_walk(len, |walk| match graph.minimal_tile(walk) {
            Some((labels, tile)) => {
                found = Some(CycleRecord {
                    kind: CycleKind::Label,
                    period: len,
                    words: labels,
                    tile: tile.canonical(),
                    spatial_period: len,
                    temporal_period: tau,
                });
                ControlFlow::Break(())
            }
            None => ControlFlow::Continue(()),
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// `Y'_{tau,n}(f)` searched up to `sigma_max`. `None` means "not found
/// within the bound", not "nonexistent".
pub fn min_spatial_period(rule: &Rule, tau: usize, sigma_max: usize) -> Result<Option<usize>> {
    Ok(min_spatial_witness(rule, tau, sigma_max)?.map(|r| r.spatial_period))
}
