//! Library side of the `cprsim` runner: the scenario schema, the artifact
//! writers, and the error-to-exit-code mapping.  The binary in `main.rs` is
//! a thin argument-parsing layer over these.

pub mod error;
pub mod output;
pub mod scenario;
