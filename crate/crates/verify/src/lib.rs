//! Hosts the `acceptance` test target; there is no library code.
//!
//! The package sorts after the others in the workspace, so `cargo test
//! --workspace` reaches it last.
