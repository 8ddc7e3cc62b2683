//! Experiments, file formats and the command-line front end for
//! [`degcrit_core`].
//!
//! * [`config`]: `key = value` experiment files;
//! * [`experiment`]: seeded parallel trials and per-point aggregates;
//! * [`compare`]: aggregates against the predictions;
//! * [`io`]: CSV, JSON and JSONL graph files;
//! * [`verify`]: the invariant suite of the `verify` command.

pub mod compare;
pub mod config;
pub mod experiment;
pub mod io;
pub mod verify;

pub use degcrit_core as core;
