//! Computational toolkit for perception pairs and spaces of group equivariant
//! non-expansive operators (GENEOs).
//!
//! The crate is organised bottom-up:
//!
//! - [`metric`]: pseudo-metric validation, quotients, greedy ε-nets, Hausdorff
//!   distance and certified ε-approximations of metric completions.
//! - [`perception`]: signals, signal spaces, Φ-operations, automorphism search,
//!   `D_Aut` and the natural pseudo-distance.
//! - [`geneo`]: extensional GENEO tables, the three operator distances,
//!   collectionwise surjectivity and non-expansivity of the homomorphism.
//! - [`compactify`]: extension to completions, induced isometries and
//!   operators, closures as certified nets, and the verification report.
//! - [`scenarios`]: the rotation-invariant circle scenario and seeded random
//!   finite instances.
//!
//! All floating point comparisons go through an explicit tolerance; the
//! default is [`DEFAULT_TOLERANCE`].

pub mod compactify;
pub mod error;
pub mod geneo;
pub mod json;
pub mod metric;
pub mod perception;
pub mod scenarios;

pub use error::{Error, Result};

/// Default comparison tolerance τ.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
