//! Measurement harness for the pospopcnt kernels: reproducible inputs,
//! best-of-N timing with an oracle gate, optional hardware counters and
//! CSV output.

pub mod data;
pub mod error;
pub mod measure;
pub mod perf;

pub use data::{generate_stream, DataSpec};
pub use error::BenchError;
pub use measure::{measure, sweep, write_csv, BenchRecord, Harness, SweepCell, CSV_HEADER};
