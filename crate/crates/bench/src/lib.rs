//! Shared helpers for the pipeline benchmarks.

use std::path::PathBuf;

/// Absolute path of a file in the workspace `fixtures/` directory.
pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}
