//! Countable posets with finite levels, handled through finite growable
//! truncations.
//!
//! The crate represents such a poset by its levels `P_0 .. P_d` and the order
//! between them, and builds decision procedures on top: bands and caps with a
//! brute-force oracle for finite instances, structural predicates (graded,
//! predetermined, level-injective, branching, ...), the wedge/star machinery
//! (star-refinement, regularity, snakes, clusters, tangled refinements), an
//! approximation layer for points of the induced compactum, and relations
//! between posets acting as continuous maps.  Every answer that genuinely
//! depends on levels beyond the truncation is reported as `Unknown` rather
//! than guessed.

mod bits;

pub mod combinatorics;
pub mod generators;
pub mod io;
pub mod poset;
pub mod predicates;
pub mod refiners;
pub mod spectrum;
pub mod stars;
pub mod verdict;

pub use poset::{BuildError, DepthExceeded, Elem, ElementId, Flag, Flags, TruncatedPoset};
pub use verdict::{Outcome, Verdict, Witness};
