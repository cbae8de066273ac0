//! Spiral coordinates for the odd Collatz dynamics.
//!
//! Odd numbers `6x +- 1` are encoded as integers on a logarithmic spiral. One
//! odd-to-odd Collatz step becomes one of a family of affine maps `f_k`, each
//! exact on a residue class modulo `2^|k|`. The crate provides the encoding,
//! the map family, trajectories, exact composition of maps with domain
//! tracking, bounded chain searches, and the predecessor tree rooted at 0.

pub mod affine;
pub mod composition;
pub mod dyadic;
pub mod error;
pub mod residue;
pub mod sequences;
pub(crate) mod serde_util;
pub mod spiral;
pub mod step;
pub mod trajectory;
pub mod tree;

pub use affine::{AffineMap, Category, FixedPoint};
pub use composition::{chain, compose, CompositionChain, SearchConfig};
pub use dyadic::DyadicRational;
pub use error::{Error, Result};
pub use residue::{Domain, ResidueClass, SignConstraint};
pub use sequences::{level_of_index, Level, RayIndex, Sequence, SequenceIndex};
pub use spiral::{canonical_index, decode, encode, SpiralValue};
pub use step::{classify, next, step_map, FamilyIndex, OutputFamily, StepMap};
