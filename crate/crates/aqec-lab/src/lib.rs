//! Driver layer over the `aqec` library: sweep configuration, family
//! selection, CSV/JSON emission, learning-run orchestration, and the
//! verification suite behind the `verify` subcommand.

pub mod codeword_io;
pub mod config;
pub mod families;
pub mod learn;
pub mod sweep;
pub mod verify;
