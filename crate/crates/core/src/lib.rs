//! Exact computation with automorphisms of colored regular trees.
//!
//! Elements are branch-constant portraits ([`portrait::TreeAutomorphism`]);
//! groups with prescribed local action are described by
//! [`portrait::GroupClass`]. On top of that sit isometry classification and
//! ping-pong ([`dynamics`]), piecewise elements over Bass-Serre trees
//! ([`piecewise`]) and the disjoint-support pipeline that produces
//! certificates ([`obstruction`], [`certificate`]).

pub mod certificate;
pub mod dynamics;
pub mod obstruction;
pub mod perm;
pub mod piecewise;
pub mod portrait;
pub mod presets;
pub mod tree;
