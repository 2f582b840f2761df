//! Metrics, experiment drivers, image and result I/O.

pub mod config;
pub mod experiment;
pub mod io;
pub mod metrics;
pub mod output;

pub use config::{spec_from_config, Config};
pub use experiment::{
    run_bounds, run_compare, run_image, run_phase, run_sweep, BoundRow, DataSource, ExperimentKind,
    ExperimentSpec, OperatorFamily, PhaseGrid, ResultRow, SyntheticData,
};
pub use io::{read_image, write_image};
pub use metrics::{snr, support_f1};
pub use output::{emit_outputs, rows_to_csv, svg_chart};
