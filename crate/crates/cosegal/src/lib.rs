//! A finite, degree-truncated engine for lax diagrams indexed by the free
//! monoidal path categories of a coarse category, together with the
//! combinatorics of monotone surjections, free/forgetful adjunctions,
//! Reedy-style skeleta, local-to-global gluing, and the associated operads.
//!
//! Everything is computed exactly over a small cartesian base category
//! (finite sets by default) so that universal properties can be certified by
//! enumeration rather than trusted.

pub mod base;
pub mod cosegalify;
pub mod fincat;
pub mod freelax;
pub mod laxdiag;
pub mod operads;
pub mod reedy_skel;
pub mod sx;
