//! Mining of high average-utility sequential patterns (HAUSPs) from
//! quantitative sequence databases.
//!
//! The crate is organized around four layers:
//!
//! * [`model`]: the quantitative sequence data model and the exact
//!   utility / average-utility semantics, independent of any acceleration
//!   structure. Everything here is definitional and brute-force friendly.
//! * [`projection`]: the projected-database machinery: per-sequence
//!   occurrence arrays with suffix remaining utilities, item-index head
//!   tables, and per-pattern extension lists.
//! * [`bounds`]: the overestimation measures used for pruning
//!   (the PEAU family, RSAU/TRSAU and their Advance variants) plus the
//!   remaining-rising-sequence machinery. All of them are sorting-free.
//! * [`miner`]: the recursive pattern-growth search with dual pruning
//!   and instrumentation counters.
//!
//! All utilities are exact: occurrence utilities are 64-bit integers and
//! averages are exact rationals. Floating point appears only in output
//! formatting, never in comparisons.

pub mod bounds;
pub mod miner;
pub mod model;
pub mod projection;
pub mod samples;

pub use model::{Database, Item, Pattern, Position, Rational, Threshold, Utility};
