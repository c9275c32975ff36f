//! Library side of the `sleepmis` binary: sweep templates, experiment and
//! verification drivers, and trace files.

pub mod cell;
pub mod error;
pub mod experiment;
pub mod sweep;
pub mod threads;
pub mod verify;

pub use error::CliError;
