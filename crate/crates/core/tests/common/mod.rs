//! Naive reference implementations shared by integration and acceptance
//! tests. Nothing here calls the library's dynamics, indexing or tile code;
//! rules are only read through `Rule::apply`.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use ca_ps::Rule;

pub type Matrix = Vec<Vec<u32>>;

/// Every word of length `len` over `0..n`, in lexicographic order.
pub fn all_words(n: u32, len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n).map(move |s| {
                    let mut w = w.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn step(rule: &Rule, w: &[u32]) -> Vec<u32> {
    let k = w.len();
    (0..k)
        .map(|j| rule.apply(w[(j + k - 1) % k], w[j]).unwrap())
        .collect()
}

pub fn rotate<T: Clone>(w: &[T], i: usize) -> Vec<T> {
    let k = w.len();
    (0..k).map(|j| w[(i + j) % k].clone()).collect()
}

/// Least `d >= 1` with `rotate(w, d) == w`.
pub fn period<T: Clone + PartialEq>(w: &[T]) -> usize {
    (1..=w.len()).find(|&d| rotate(w, d) == w).unwrap()
}

/// Least matrix over all cyclic row and column shifts.
pub fn canonical(m: &Matrix) -> Matrix {
    let mut best: Option<Matrix> = None;
    for dr in 0..m.len() {
        let rows = rotate(m, dr);
        for dc in 0..m[0].len() {
            let cand: Matrix = rows.iter().map(|r| rotate(r, dc)).collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap()
}

/// Evolves every initial word until a configuration repeats and keeps the
/// eventual cycles whose words have minimal period `sigma`.
pub fn periodic_solutions(rule: &Rule, sigma: usize) -> BTreeSet<Matrix> {
    let mut out = BTreeSet::new();
    for start in all_words(rule.n(), sigma) {
        let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut trail = vec![];
        let mut w = start;
        while !seen.contains_key(&w) {
            seen.insert(w.clone(), trail.len());
            trail.push(w.clone());
            w = step(rule, &w);
        }
        let cycle = trail.split_off(seen[&w]);
        if period(&cycle[0]) == sigma {
            out.insert(canonical(&cycle));
        }
    }
    out
}

pub fn min_temporal(rule: &Rule, sigma: usize) -> Option<usize> {
    periodic_solutions(rule, sigma).iter().map(Vec::len).min()
}

pub fn states(m: &Matrix) -> BTreeSet<u32> {
    m.iter().flatten().copied().collect()
}

/// Horizontal pair `(a[i][j], a[i][j+1])` mapped to `a[i+1][j+1]`, or
/// `None` when one pair is asked for two values.
pub fn assignments(m: &Matrix) -> Option<BTreeMap<(u32, u32), u32>> {
    let (t, s) = (m.len(), m[0].len());
    let mut out = BTreeMap::new();
    for i in 0..t {
        for j in 0..s {
            let key = (m[i][j], m[i][(j + 1) % s]);
            let v = m[(i + 1) % t][(j + 1) % s];
            if *out.entry(key).or_insert(v) != v {
                return None;
            }
        }
    }
    Some(out)
}

pub fn is_valid(m: &Matrix) -> bool {
    let s = m[0].len();
    m.iter().all(|r| period(r) == s) && period(m) == m.len() && assignments(m).is_some()
}

pub fn lag(m: &Matrix) -> usize {
    assignments(m).unwrap().len() - states(m).len()
}

/// All valid canonical `tau x sigma` tiles over `0..n`.
pub fn tiles(n: u32, tau: usize, sigma: usize) -> Vec<Matrix> {
    all_words(n, tau * sigma)
        .into_iter()
        .map(|cells| cells.chunks(sigma).map(<[u32]>::to_vec).collect::<Matrix>())
        .filter(|m| is_valid(m) && canonical(m) == *m)
        .collect()
}

pub fn simple_tiles(n: u32, tau: usize, sigma: usize) -> Vec<Matrix> {
    tiles(n, tau, sigma)
        .into_iter()
        .filter(|m| lag(m) == 0)
        .collect()
}

/// Simple tiles for every `n <= max_n` and `tau * sigma <= max_cells`.
pub fn simple_tile_catalog(max_n: u32, max_cells: usize) -> Vec<(u32, Matrix)> {
    let mut out = vec![];
    for n in 1..=max_n {
        for tau in 1..=max_cells {
            for sigma in 1..=max_cells / tau {
                out.extend(simple_tiles(n, tau, sigma).into_iter().map(|m| (n, m)));
            }
        }
    }
    out
}

fn transpose(m: &Matrix) -> Matrix {
    (0..m[0].len())
        .map(|j| m.iter().map(|r| r[j]).collect())
        .collect()
}

fn is_rotation(a: &[u32], b: &[u32]) -> bool {
    (0..a.len()).any(|i| rotate(a, i) == b)
}

fn lines_repeat_by_rotation(lines: &Matrix) -> bool {
    lines
        .iter()
        .all(|r| states(&vec![r.clone()]).len() == r.len())
        && lines.iter().enumerate().all(|(i, a)| {
            lines[i + 1..].iter().all(|b| {
                let shared = a.iter().any(|x| b.contains(x));
                !shared || is_rotation(a, b)
            })
        })
}

/// Rows have distinct states and rows sharing a state are rotations of
/// each other; likewise for columns.
pub fn repeat_structure_holds(m: &Matrix) -> bool {
    lines_repeat_by_rotation(m) && lines_repeat_by_rotation(&transpose(m))
}

/// Both tiles can be realized by one rule.
pub fn compatible(a: &Matrix, b: &Matrix) -> bool {
    let (x, y) = (assignments(a).unwrap(), assignments(b).unwrap());
    x.iter().all(|(k, v)| y.get(k).is_none_or(|w| w == v))
}

/// Some cell of `a` and some cell of `b` hold the same state but have
/// different right neighbors.
pub fn has_diverging_neighbor(a: &Matrix, b: &Matrix) -> bool {
    let pairs = |m: &Matrix| -> Vec<(u32, u32)> {
        m.iter()
            .flat_map(|r| (0..r.len()).map(move |j| (r[j], r[(j + 1) % r.len()])))
            .collect()
    };
    let pb = pairs(b);
    pairs(a)
        .iter()
        .any(|&(x, xr)| pb.iter().any(|&(y, yr)| x == y && xr != yr))
}
