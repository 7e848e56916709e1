//! Command-line front end: scenario files, figure grids, rate reports and
//! event generation.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod commands;
pub mod quantity;
pub mod scenario;

pub use commands::{CliError, CliResult, ReportDocument};
pub use scenario::Scenario;

/// Directory holding the bundled preset scenarios.
pub fn presets_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("presets")
}

/// Path of a bundled preset such as `fig2`.
pub fn preset_path(name: &str) -> std::path::PathBuf {
    presets_dir().join(format!("{name}.toml"))
}
