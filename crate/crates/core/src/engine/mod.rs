//! The generic recovery engine on convolution/composition structure constants.

pub mod idempotents;
pub mod modular_spec;
pub mod recover;
pub mod spec;

pub use idempotents::{extract_idempotents, IdempotentBasis, Provenance};
pub use modular_spec::{modular_idempotents, modular_spec};
pub use recover::{composition_check, recover_fusion, recover_with, RecoveryOutput};
pub use spec::GradedAlgebraSpec;
