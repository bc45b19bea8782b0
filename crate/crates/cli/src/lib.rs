//! File format and command implementations behind the `pel` binary.

pub mod commands;
pub mod document;
