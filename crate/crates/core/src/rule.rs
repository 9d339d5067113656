//! Two-neighbor rules `f: Z_n x Z_n -> Z_n`.
//!
//! Text encoding lists the values for all pairs in reverse lexicographic
//! order, from `(n-1, n-1)` down to `(0, 0)`. For `n <= 10` each value is a
//! single digit (`"021102022"`); for larger `n` the values are a
//! comma-separated decimal list.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{format_states, parse_states, State, Word};

/// Dense rule table: entry `a * n + b` holds `f(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    n: u32,
    table: Vec<State>,
}

impl Rule {
    pub fn new(n: u32, table: Vec<State>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroStates);
        }
        let expected = (n as usize) * (n as usize);
        if table.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: table.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&s| s >= n) {
            return Err(Error::StateOutOfRange {
                state: bad as u64,
                n,
            });
        }
        Ok(Rule { n, table })
    }

    pub fn from_fn(n: u32, f: impl Fn(State, State) -> State) -> Result<Self> {
        let table = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| f(a, b))
            .collect();
        Rule::new(n, table)
    }

    /// `f(a, b) = (alpha * a + beta * b) mod n`.
    pub fn additive(n: u32, alpha: State, beta: State) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroStates);
        }
        let n64 = n as u64;
        Rule::from_fn(n, |a, b| {
            ((alpha as u64 * a as u64 + beta as u64 * b as u64) % n64) as State
        })
    }

    pub fn parse(text: &str, n: u32) -> Result<Self> {
        let mut listing = parse_states(text, n)?;
        let expected = (n as usize) * (n as usize);
        if listing.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: listing.len(),
            });
        }
        // Listing position (n-1-a)*n + (n-1-b) is exactly the reversed table.
        listing.reverse();
        Rule::new(n, listing)
    }

    /// Inverse of [`Rule::parse`].
    pub fn format(&self) -> String {
        let listing: Vec<State> = self.table.iter().rev().copied().collect();
        format_states(&listing, self.n)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn table(&self) -> &[State] {
        &self.table
    }

    pub fn apply(&self, a: State, b: State) -> Result<State> {
        for s in [a, b] {
            if s >= self.n {
                return Err(Error::StateOutOfRange {
                    state: s as u64,
                    n: self.n,
                });
            }
        }
        Ok(self.at(a, b))
    }

    /// Table lookup for states already known to be in range.
    #[inline(always)]
    pub fn at(&self, a: State, b: State) -> State {
        debug_assert!(a < self.n && b < self.n);
        self.table[(a * self.n + b) as usize]
    }

    /// Every column map `a -> f(a, b)` is a bijection.
    pub fn is_left_permutative(&self) -> bool {
        let n = self.n as usize;
        let mut seen = vec![false; n];
        (0..self.n).all(|b| {
            seen.iter_mut().for_each(|s| *s = false);
            (0..self.n).all(|a| !std::mem::replace(&mut seen[self.at(a, b) as usize], true))
        })
    }

    /// `(alpha, beta)` if the rule is additive.
    pub fn additive_coefficients(&self) -> Option<(State, State)> {
        if self.at(0, 0) != 0 {
            return None;
        }
        let alpha = self.at(1 % self.n, 0);
        let beta = self.at(0, 1 % self.n);
        let candidate = Rule::additive(self.n, alpha, beta).ok()?;
        (candidate == *self).then_some((alpha, beta))
    }

    /// One update of a configuration on a circle of `w.len()` sites.
    pub fn step(&self, w: &Word) -> Word {
        let s = w.states();
        let k = s.len();
        let next = (0..k).map(|j| self.at(s[(j + k - 1) % k], s[j])).collect();
        Word::new(next).expect("nonempty")
    }

    /// The trajectory `xi_0, ..., xi_steps` on a circle of `initial.len()` sites.
    pub fn evolve(&self, initial: &Word, steps: usize) -> Result<Vec<Word>> {
        if let Some(&bad) = initial.states().iter().find(|&&s| s >= self.n) {
            return Err(Error::StateOutOfRange {
                state: bad as u64,
                n: self.n,
            });
        }
        let mut out = Vec::with_capacity(steps + 1);
        out.push(initial.clone());
        for _ in 0..steps {
            let next = self.step(out.last().expect("nonempty"));
            out.push(next);
        }
        Ok(out)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

/// Distribution a random rule is drawn from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleClass {
    /// All `n^(n^2)` rules equally likely.
    #[default]
    Uniform,
    /// Independent uniform permutation in every column `a -> f(a, b)`.
    LeftPermutative,
    /// `f(a, b) = alpha * a + beta * b` with uniform `alpha, beta`.
    Additive,
}

impl fmt::Display for RuleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleClass::Uniform => "uniform",
            RuleClass::LeftPermutative => "left-permutative",
            RuleClass::Additive => "additive",
        })
    }
}

impl FromStr for RuleClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(RuleClass::Uniform),
            "left-permutative" | "left_permutative" => Ok(RuleClass::LeftPermutative),
            "additive" => Ok(RuleClass::Additive),
            other => Err(Error::Malformed(format!("unknown rule class {other:?}"))),
        }
    }
}

/// Draws a rule from `class`. Panics if `n == 0`.
pub fn sample_rule<R: Rng + ?Sized>(n: u32, class: RuleClass, rng: &mut R) -> Rule {
    assert!(n >= 1, "state count must be at least 1");
    let nn = n as usize;
    let table = match class {
        RuleClass::Uniform => (0..nn * nn).map(|_| rng.random_range(0..n)).collect(),
        RuleClass::LeftPermutative => {
            let mut table = vec![0; nn * nn];
            let mut column: Vec<State> = (0..n).collect();
            for b in 0..nn {
                column.shuffle(rng);
                for (a, &v) in column.iter().enumerate() {
                    table[a * nn + b] = v;
                }
            }
            table
        }
        RuleClass::Additive => {
            let alpha = rng.random_range(0..n);
            let beta = rng.random_range(0..n);
            return Rule::additive(n, alpha, beta).expect("n >= 1");
        }
    };
    Rule { n, table }
}
