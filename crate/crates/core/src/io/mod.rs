//! Configuration, persistence and report formatting.

pub mod config;
pub mod diagnostics_csv;
pub mod mms;
pub mod report;
pub mod snapshot;

pub use config::{load_config, parse_config, InitialCondition, RunConfig};
pub use diagnostics_csv::{append_diagnostics, read_diagnostics, DiagnosticsWriter};
pub use mms::{manufactured_case, ManufacturedCase};
pub use snapshot::{read_snapshot, read_snapshot_into, write_snapshot, Snapshot};
