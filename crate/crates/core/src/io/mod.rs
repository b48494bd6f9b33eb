//! Configuration files, tables and plots.

pub mod config;
pub mod plot;
pub mod table;

pub use config::{load_config, parse_config, regime_warnings, OutputFormat, OutputSpec, RunConfig};
pub use plot::emit_plot;
pub use table::{
    emit_table, parse_table_json, regenerate, table_csv, table_json, Artifact, ArtifactKind, TableDocument, TableFormat,
};
