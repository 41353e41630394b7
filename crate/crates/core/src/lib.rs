//! Fusion rules of group-graded extensions of fusion categories.
//!
//! The generic path builds the convolution and composition products on the
//! endomorphisms of the canonical Lagrangian algebra, extracts minimal
//! convolution idempotents and reads off the fusion coefficients. Pointed
//! and cyclic permutation extensions also have closed forms.

pub mod engine;
pub mod error;
pub mod group;
pub mod modular;
pub mod permutation;
pub mod pointed;
pub mod ring;

pub use error::{Error, Result};
pub use group::FiniteGroup;
pub use modular::ModularData;
pub use ring::{Axiom, FusionRing, GradedFusionRing, Violation};

/// Version tag written into every serialized document.
pub const SCHEMA_VERSION: u32 = 1;

pub(crate) fn schema_version() -> u32 {
    SCHEMA_VERSION
}

/// Default rounding tolerance for integer-valued formulas.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Library version recorded in result documents.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
