//! Exact dynamics of piecewise-linear interval maps and of the maps they
//! induce on the hyperspace of compact sets.
//!
//! All arithmetic is over arbitrary-precision rationals. Tests that quantify
//! over infinite time report `pass (sampled)`, `fail` only with a finite
//! certificate, or `inconclusive`.

pub mod criteria;
pub mod error;
pub mod hyperspace;
pub mod interval;
pub mod mapfile;
pub mod pair_class;
pub mod partner;
pub mod pl_map;
pub mod plot;
pub mod rational;
pub mod shift_space;

pub use error::{Error, Result};
pub use hyperspace::{CompactSet, OpenInterval, VietorisBox};
pub use interval::Interval;
pub use pair_class::{OrbitStats, PairClass, PairParams, PairVerdict};
pub use pl_map::PLMap;
pub use rational::Rational;
