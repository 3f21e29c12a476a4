//! Z2 topological invariants of one-dimensional, translation-invariant
//! tight-binding insulators with chiral or particle-hole symmetry.
//!
//! The pipeline samples the fiber Hamiltonians `H(k)` over the Brillouin
//! circle, builds the negative-energy spectral projections, integrates the
//! parallel-transport equation `T'(k) = [P'(k), P(k)] T(k)`, extracts the
//! holonomy logarithm, and evaluates Berry phases of the resulting symmetric
//! Bloch frames. The parity of the occupied-band Berry phase is the Z2 class.
//! Independent cross-checks come from winding numbers of determinant loops
//! and from zero-energy edge modes of truncated chains.

pub mod chains;
pub mod edge;
pub mod error;
pub mod frame;
pub mod invariant;
pub mod linalg;
pub mod model;
pub mod spectral;
pub mod transport;
pub mod winding;

pub use error::{Error, Result};
pub use model::{FiberSample, SymmetryDescriptor, SymmetryKind, TightBindingModel};

/// Absolute tolerance for structural checks (hermiticity, unitarity,
/// idempotency, orthonormality). All fiber matrices are small and O(1) in
/// norm, so an absolute tolerance is adequate.
pub const STRUCTURAL_TOL: f64 = 1e-10;

/// Models whose certified spectral gap falls below this threshold are
/// rejected: transport conditioning degrades as 1/g.
pub const GAP_THRESHOLD: f64 = 1e-6;
