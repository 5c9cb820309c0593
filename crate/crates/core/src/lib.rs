//! Self-avoiding polygons in `L x M` tubes of the cubic lattice.
//!
//! The crate builds the transfer-matrix machinery over 1-patterns (a slice of
//! a polygon in one lattice plane plus the connectivity of its left side),
//! computes growth rates of Hamiltonian polygons and of full blocks from the
//! strongly connected components of that transfer graph, locates the
//! force-dependent free energy, and checks everything against an independent
//! brute-force enumeration of polygons.

pub mod analysis;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod patterns;
pub mod transfer;

pub use error::{Error, Result};
pub use geometry::{CrossSection, OneBlock, TubeSpec};
pub use patterns::{PairPartition, PatternKind, PatternSystem, StateSpace};
