//! Exact combinatorial invariants of simple normal crossing pairs.
//!
//! The crate is layered bottom-up:
//!
//! - [`exactalg`]: rationals, graded Laurent polynomials, reduced rational functions.
//! - [`pairs`]: SNC pairs `(X, D)` as Poincaré classes of strata, with constructors and
//!   the blow-up transform.
//! - [`invariants`]: weights `w^J_d` and weighted strata sums `φ_d`.
//! - [`motivic`]: Igusa zeta specializations, Gorenstein volume, stringy invariants and
//!   the change-of-variables certificate.
//! - [`tauledger`]: formal linear combinations over `τ(CP¹)`, `τ(CP²)` and opaque atoms,
//!   with the birational normalization and functional-equation certificates.

pub mod exactalg;
pub mod invariants;
pub mod motivic;
pub mod pairs;
pub mod tauledger;

pub use exactalg::{ExactError, GradedPoly, Rat, RatFunc};
pub use invariants::{InvariantKind, InvariantValue, InvariantVector};
pub use pairs::{BlowupRecord, CenterDescriptor, MotClass, PairError, SncPair, Subset};
pub use tauledger::{TauAtom, TauExpr};

