//! Tiles of periodic solutions.
//!
//! A tile is a `tau x sigma` matrix `a[i][j]` read on the discrete torus
//! (both indices wrap). Each horizontal pair `(a[i][j], a[i][j+1])` pins the
//! rule value `f(a[i][j], a[i][j+1]) = a[i+1][j+1]`. Two tiles related by a
//! space-time rotation describe the same periodic solution.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rule::Rule;
use crate::word::{shift_order, slice_period, State, Word};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<State>>", into = "Vec<Vec<State>>")]
pub struct Tile {
    tau: usize,
    sigma: usize,
    // row-major
    cells: Vec<State>,
}

/// State count `s`, assignment number `p` and lag `p - s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileMetrics {
    pub states: usize,
    pub assignments: usize,
    pub lag: usize,
}

impl Tile {
    pub fn from_rows(rows: Vec<Vec<State>>) -> Result<Self> {
        let tau = rows.len();
        let sigma = rows.first().map_or(0, Vec::len);
        if tau == 0 || sigma == 0 || rows.iter().any(|r| r.len() != sigma) {
            return Err(Error::RaggedTile);
        }
        Ok(Tile {
            tau,
            sigma,
            cells: rows.into_iter().flatten().collect(),
        })
    }

    /// Rows are successive configurations.
    pub fn from_row_words(rows: &[Word]) -> Result<Self> {
        Tile::from_rows(rows.iter().map(|w| w.states().to_vec()).collect())
    }

    /// Columns are successive temporal labels.
    pub fn from_column_words(columns: &[Word]) -> Result<Self> {
        Ok(Tile::from_row_words(columns)?.transpose())
    }

    fn from_raw(tau: usize, sigma: usize, cells: Vec<State>) -> Tile {
        debug_assert_eq!(cells.len(), tau * sigma);
        Tile { tau, sigma, cells }
    }

    /// Number of rows.
    pub fn tau(&self) -> usize {
        self.tau
    }

    /// Number of columns.
    pub fn sigma(&self) -> usize {
        self.sigma
    }

    /// Entry at `(i, j)` with both indices taken on the torus.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> State {
        self.cells[(i % self.tau) * self.sigma + (j % self.sigma)]
    }

    pub fn row(&self, i: usize) -> &[State] {
        let i = i % self.tau;
        &self.cells[i * self.sigma..(i + 1) * self.sigma]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[State]> {
        self.cells.chunks(self.sigma)
    }

    pub fn to_rows(&self) -> Vec<Vec<State>> {
        self.rows().map(<[State]>::to_vec).collect()
    }

    pub fn row_word(&self, i: usize) -> Word {
        Word::new(self.row(i).to_vec()).expect("nonempty row")
    }

    pub fn column_word(&self, j: usize) -> Word {
        Word::new((0..self.tau).map(|i| self.get(i, j)).collect()).expect("nonempty column")
    }

    pub fn transpose(&self) -> Tile {
        let cells = (0..self.sigma)
            .flat_map(|j| (0..self.tau).map(move |i| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        Tile::from_raw(self.sigma, self.tau, cells)
    }

    /// Re-anchors the tile so that `(dr, dc)` becomes `(0, 0)`.
    pub fn rotate(&self, dr: usize, dc: usize) -> Tile {
        let cells = (0..self.tau)
            .flat_map(|i| (0..self.sigma).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i + dr, j + dc))
            .collect();
        Tile::from_raw(self.tau, self.sigma, cells)
    }

    pub fn states(&self) -> BTreeSet<State> {
        self.cells.iter().copied().collect()
    }

    /// Distinct horizontal wraparound pairs.
    pub fn pairs(&self) -> BTreeSet<(State, State)> {
        (0..self.tau)
            .flat_map(|i| (0..self.sigma).map(move |j| (i, j)))
            .map(|(i, j)| (self.get(i, j), self.get(i, j + 1)))
            .collect()
    }

    /// The rule values pinned by the tile, or `None` if two equal pairs
    /// demand different values.
    pub fn assignments(&self) -> Option<BTreeMap<(State, State), State>> {
        let mut out = BTreeMap::new();
        for i in 0..self.tau {
            for j in 0..self.sigma {
                let key = (self.get(i, j), self.get(i, j + 1));
                let value = self.get(i + 1, j + 1);
                if *out.entry(key).or_insert(value) != value {
                    return None;
                }
            }
        }
        Some(out)
    }

    pub fn metrics(&self) -> TileMetrics {
        let states = self.states().len();
        let assignments = self.pairs().len();
        TileMetrics {
            states,
            assignments,
            lag: assignments - states,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.assignments().is_some()
    }

    /// Consistent, every row aperiodic, and the row sequence aperiodic.
    pub fn is_valid(&self) -> bool {
        self.rows().all(|r| slice_period(r) == self.sigma)
            && self.temporal_period() == self.tau
            && self.is_consistent()
    }

    /// Smallest divisor `d` of `tau` with `row[i] = row[i + d]` for all `i`.
    pub fn temporal_period(&self) -> usize {
        let tau = self.tau;
        crate::word::divisors(tau)
            .into_iter()
            .find(|&d| (0..tau).all(|i| self.row(i) == self.row(i + d)))
            .unwrap_or(tau)
    }

    /// Smallest divisor `d` of `sigma` with every row `d`-periodic.
    pub fn spatial_period(&self) -> usize {
        let sigma = self.sigma;
        crate::word::divisors(sigma)
            .into_iter()
            .find(|&d| {
                (0..self.tau).all(|i| (0..sigma).all(|j| self.get(i, j) == self.get(i, j + d)))
            })
            .unwrap_or(sigma)
    }

    /// Lexicographically least matrix over all `tau * sigma` torus rotations.
    pub fn canonical(&self) -> Tile {
        let mut best: Option<Vec<State>> = None;
        let mut buf = vec![0; self.cells.len()];
        for dr in 0..self.tau {
            for dc in 0..self.sigma {
                for (k, slot) in buf.iter_mut().enumerate() {
                    *slot = self.get(dr + k / self.sigma, dc + k % self.sigma);
                }
                if best.as_ref().is_none_or(|b| buf < *b) {
                    best = Some(buf.clone());
                }
            }
        }
        Tile::from_raw(self.tau, self.sigma, best.expect("nonempty tile"))
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    pub fn is_simple(&self) -> bool {
        self.metrics().lag == 0
    }

    /// No shared horizontal pair.
    pub fn is_orthogonal_to(&self, other: &Tile) -> bool {
        self.pairs().is_disjoint(&other.pairs())
    }

    /// No shared state.
    pub fn is_disjoint_from(&self, other: &Tile) -> bool {
        self.states().is_disjoint(&other.states())
    }

    /// Order of the circular shift carrying `row_0` to the first later row
    /// that is a rotation of it; 1 when no other row is.
    pub fn row_shift_order(&self) -> Result<usize> {
        if !self.is_simple() {
            return Err(Error::NotSimple);
        }
        let first = self.row_word(0);
        let shift = (1..self.tau).find_map(|i| first.rotation_to(&self.row_word(i)));
        Ok(shift.map_or(1, |amount| shift_order(amount, self.sigma)))
    }

    /// Column analogue of [`Tile::row_shift_order`].
    pub fn column_shift_order(&self) -> Result<usize> {
        self.transpose().row_shift_order()
    }

    /// Every pinned value agrees with `rule`.
    pub fn is_realized_by(&self, rule: &Rule) -> bool {
        self.cells.iter().all(|&s| s < rule.n())
            && (0..self.tau).all(|i| {
                (0..self.sigma)
                    .all(|j| rule.at(self.get(i, j), self.get(i, j + 1)) == self.get(i + 1, j + 1))
            })
    }
}

impl TryFrom<Vec<Vec<State>>> for Tile {
    type Error = Error;

    fn try_from(rows: Vec<Vec<State>>) -> Result<Self> {
        Tile::from_rows(rows)
    }
}

impl From<Tile> for Vec<Vec<State>> {
    fn from(t: Tile) -> Self {
        t.to_rows()
    }
}
