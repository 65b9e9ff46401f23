//! Executable topological dynamics around the gluing orbit property.
//!
//! The crate provides exact symbolic systems (full shifts, subshifts of
//! finite type, Sturmian shifts) and numerically sampled torus systems
//! (rotations and the Anzai skew product), together with:
//!
//! * [`entropy`]: dynamical distances, separated sets and ε-entropy estimates,
//! * [`properties`]: scale-bounded probes for rigidity, equicontinuity,
//!   minimality and unique ergodicity,
//! * [`gluing`]: ε-tracing checks, bounded-gap tracing searches and
//!   refutation certificates,
//! * [`constructions`]: separated families built from non-rigidity
//!   witnesses, the induced gap shift and small-entropy invariant sets.
//!
//! Every probe is a semi-decision at a finite scale. Verdicts record the
//! parameters they were obtained at and never claim more than that.

// `!(a <= b)` is deliberate throughout: NaN must fail the comparison.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructions;
pub mod entropy;
pub mod error;
pub mod gluing;
pub mod properties;
pub mod systems;

pub use error::{Error, Result};
pub use systems::{
    make_system, Alpha, DynSystem, Exactness, Point, Sft, SymbolicPoint, SystemDescriptor, SystemKind,
    TorusPoint,
};
