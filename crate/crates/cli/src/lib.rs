//! Command-line driver for the `tverberg-core` algorithms.

pub mod bench;
pub mod commands;
pub mod document;
pub mod error;
pub mod gen;
pub mod io;
pub mod svg;
pub mod verify;
