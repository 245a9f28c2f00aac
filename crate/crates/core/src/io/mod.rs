//! File formats, curve comparison, sweeps and synthetic data.

pub mod compare;
pub mod config;
pub mod record_csv;
pub mod sweep;
pub mod synthetic;

pub use compare::{compare, max_relative_difference, Alignment, FitMetric};
pub use config::{
    load_params, load_program, params_to_string, parse_params, parse_program, program_to_string,
    write_params, write_program, ParamsFile, ProgramFile,
};
pub use record_csv::{
    parse_experiment, read_experiment, read_record, read_record_from, write_experiment,
    write_experiment_to, write_record, write_record_to, ExperimentCurve, RECORD_COLUMNS,
    RECORD_HEADER_COMMENT,
};
pub use sweep::{sweep, SweepAxis, SweepRun, SweepSummary};
pub use synthetic::{synthetic_curve, SYNTHETIC_SPECIMEN};
