//! Library backing the `tqkd` command-line tool.
//!
//! Kept separate from the binary so the serialization contract (strict JSON
//! configs, 17-significant-digit reports, fixed CSV columns) is directly
//! testable.

pub mod config;
pub mod output;
pub mod sweep;
