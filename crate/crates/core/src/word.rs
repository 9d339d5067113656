//! Cyclic words over `Z_n` and circular shifts.
//!
//! A word of length `k` is either a spatial configuration of period `k` or a
//! temporal label of length `k`. All index arithmetic is modulo `k`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A cell state in `0..n`.
pub type State = u32;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<State>", into = "Vec<State>")]
pub struct Word(Vec<State>);

impl Word {
    pub fn new(states: Vec<State>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Word(states))
    }

    /// Builds a word and checks every state is below `n`.
    pub fn with_states(states: Vec<State>, n: u32) -> Result<Self> {
        if let Some(&bad) = states.iter().find(|&&s| s >= n) {
            return Err(Error::StateOutOfRange {
                state: bad as u64,
                n,
            });
        }
        Word::new(states)
    }

    pub fn constant(state: State, len: usize) -> Self {
        assert!(len > 0, "word length must be positive");
        Word(vec![state; len])
    }

    /// Parses `"120"` style digit strings when `n <= 10` and comma-separated
    /// decimal lists otherwise.
    pub fn parse(text: &str, n: u32) -> Result<Self> {
        Word::with_states(parse_states(text, n)?, n)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn states(&self) -> &[State] {
        &self.0
    }

    pub fn into_states(self) -> Vec<State> {
        self.0
    }

    pub fn get(&self, i: usize) -> State {
        self.0[i % self.0.len()]
    }

    /// Circular shift by `amount`: `w.rotate(i)[j] = w[i + j]`.
    pub fn rotate(&self, amount: usize) -> Word {
        let k = self.0.len();
        let mut out = self.0.clone();
        out.rotate_left(amount % k);
        Word(out)
    }

    /// Smallest divisor `d` of the length with `w[j] = w[j + d]` for all `j`.
    pub fn period(&self) -> usize {
        slice_period(&self.0)
    }

    pub fn is_aperiodic(&self) -> bool {
        self.period() == self.len()
    }

    /// Lexicographically least rotation.
    pub fn canonical_rotation(&self) -> Word {
        let k = self.len();
        (0..k).map(|i| self.rotate(i)).min().expect("nonempty word")
    }

    /// Smallest `i` with `self.rotate(i) == *other`, if any.
    pub fn rotation_to(&self, other: &Word) -> Option<usize> {
        if self.len() != other.len() {
            return None;
        }
        let k = self.len();
        (0..k).find(|&i| (0..k).all(|j| self.0[(i + j) % k] == other.0[j]))
    }

    /// Text form accepted by [`Word::parse`] for the given state count.
    pub fn format(&self, n: u32) -> String {
        format_states(&self.0, n)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&s| s < 10) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl TryFrom<Vec<State>> for Word {
    type Error = Error;

    fn try_from(states: Vec<State>) -> Result<Self> {
        Word::new(states)
    }
}

impl From<Word> for Vec<State> {
    fn from(w: Word) -> Self {
        w.0
    }
}

/// Order of the circular shift by `amount` on words of length `len`.
pub fn shift_order(amount: usize, len: usize) -> usize {
    assert!(len > 0 && amount < len, "shift amount must lie in [0, len)");
    len / amount.gcd(&len)
}

pub(crate) fn slice_period(s: &[State]) -> usize {
    let k = s.len();
    divisors(k)
        .into_iter()
        .find(|&d| (0..k).all(|j| s[j] == s[(j + d) % k]))
        .unwrap_or(k)
}

/// Positive divisors of `k` in increasing order.
pub fn divisors(k: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= k {
        if k.is_multiple_of(d) {
            small.push(d);
            if d * d != k {
                large.push(k / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub(crate) fn parse_states(text: &str, n: u32) -> Result<Vec<State>> {
    if n == 0 {
        return Err(Error::ZeroStates);
    }
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Malformed("empty input".into()));
    }
    if n <= 10 {
        text.chars()
            .map(|c| {
                c.to_digit(10)
                    .ok_or_else(|| Error::Malformed(format!("unexpected character {c:?}")))
            })
            .collect()
    } else {
        text.split(',')
            .map(|part| {
                let part = part.trim();
                part.parse::<State>()
                    .map_err(|_| Error::Malformed(format!("bad list entry {part:?}")))
            })
            .collect()
    }
}

pub(crate) fn format_states(states: &[State], n: u32) -> String {
    if n <= 10 {
        states.iter().map(|s| char::from(b'0' + *s as u8)).collect()
    } else {
        let parts: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        parts.join(",")
    }
}
