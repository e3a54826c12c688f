//! Library surface of the `estimkit` binary: argument grammar, subcommand
//! implementations, and the CSV/JSON I/O they share. Kept as a library so
//! integration tests exercise the exact shipping code.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
