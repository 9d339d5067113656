//! Jointly periodic solutions of one-dimensional two-neighbor cellular
//! automata with `n` states.
//!
//! A rule `f: Z_n x Z_n -> Z_n` updates a configuration by
//! `xi_{t+1}(x) = f(xi_t(x - 1), xi_t(x))`. A periodic solution (PS) is a
//! space-time configuration periodic in both directions with minimal
//! periods `(tau, sigma)`; it is identified with its tile, a `tau x sigma`
//! matrix on the discrete torus.
//!
//! * [`rule`]: rule tables, text encodings, random rule classes, evolution.
//! * [`word`] and [`tile`]: cyclic words, circular shifts, tile algebra.
//! * [`digraph`]: configuration and label digraphs, PS enumeration, `Y` and `Y'`.
//! * [`theory`]: exact limit quantities and the brute-force tile census.
//! * [`experiments`] and [`stats`]: seeded parallel Monte Carlo.
//! * [`render`]: deterministic SVG/PPM output.

pub mod digraph;
pub mod error;
pub mod experiments;
pub mod render;
pub mod rule;
pub mod stats;
pub mod theory;
pub mod tile;
pub mod word;

pub use digraph::{CycleKind, CycleRecord, WordIndexer};
pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, ExperimentResult, Mode};
pub use rule::{Rule, RuleClass};
pub use theory::{PeriodSet, Rational};
pub use tile::{Tile, TileMetrics};
pub use word::{State, Word};
