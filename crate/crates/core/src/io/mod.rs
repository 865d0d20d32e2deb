//! Data formats, caching transport, and the batch pipeline.
//!
//! Everything the library consumes from the outside world comes through
//! here: newform eigenvalue packs (structured text), elliptic-curve tables
//! (CSV on disk, JSON over HTTP), per-case TOML configuration, and the JSON
//! reports the pipeline emits. Parsers validate on load and fail with
//! line-level diagnostics; writers round-trip exactly, so a report can be
//! regenerated bit-for-bit from the same inputs.

pub mod config;
pub mod curves;
pub mod newforms;
pub mod pipeline;
pub mod report;
pub mod transport;

pub use config::{load_case_config, CaseConfig, FreyValuation, Nebentypus};
pub use curves::{load_curve_table, parse_curve_table, write_curve_table, LoadedCurveTable};
pub use newforms::{load_newforms, parse_newforms, write_newforms, NewformPack, NewformRecord};
pub use pipeline::{run_pipeline, PipelineOptions};
pub use report::{
    sha256_hex, FilterKind, FilterWitness, FormVerdict, ReportBody, ReportMeta, SieveReport,
};
pub use transport::{
    fetch_curves, FetchOptions, HttpTransport, OfflineTransport, RecordingTransport,
    StaticTransport, Transport,
};
