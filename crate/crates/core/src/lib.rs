//! Explicit finite-volume schemes for hyperbolic systems of conservation laws
//! on periodic unstructured meshes, with the entropy, weak-BV and
//! relative-entropy diagnostics used to verify them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod initial;
pub mod mesh;
pub mod numflux;
pub mod reference;
pub mod solver;
pub mod systems;

pub use error::{Error, Result};
