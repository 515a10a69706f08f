//! The integration suites share the crate's deterministic samplers.

#[allow(unused_imports)]
pub use mukai_core::sampling::*;
