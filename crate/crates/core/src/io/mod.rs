//! File formats: libsvm datasets, return matrices, trace CSVs and run
//! configuration files.

pub mod config;
pub mod libsvm;
pub mod portfolio_csv;
pub mod trace_csv;

pub use config::{config_to_flags, parse_config_str, read_config_file};
pub use libsvm::{parse_libsvm, parse_libsvm_str, to_libsvm_string, write_libsvm};
pub use portfolio_csv::{parse_returns_csv, read_returns_csv, write_returns_csv};
pub use trace_csv::{read_trace, read_trace_csv, write_trace, write_trace_csv, TRACE_HEADER};
