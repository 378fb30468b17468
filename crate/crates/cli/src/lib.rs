//! Driver for the `crt` binary: argument parsing, grid files, heatmaps and
//! run reports around the algorithms in `crt_core`.

pub mod args;
pub mod gridio;
pub mod heatmap;
pub mod report;
pub mod run;

pub use args::{parse_angle, parse_domain, Cli, Command, Domain};
pub use gridio::{decode, encode, encode_csv, read_grid, write_grid, FormatError, Grid, ReadError};
pub use heatmap::{encode_p5, export_heatmap, HeatmapBounds};
pub use report::Report;
pub use run::{configure_threads, run, CliError};
