//! Library surface of the `frep` command-line tool: file formats,
//! deterministic report emission, digests, and the subcommand
//! implementations. The binary in `main.rs` is a thin clap wrapper.

pub mod cmd;
pub mod digest;
pub mod error;
pub mod formats;
pub mod report;
