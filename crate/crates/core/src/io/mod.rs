//! File formats: tick and deal input, TOML specs, JSON reports.

pub mod config;
pub mod report;
pub mod ticks;

pub use config::{load_genspec, parse_genspec, CompositeSpec};
pub use report::{report_json, to_canonical_string, write_report};
pub use ticks::{parse_ticks, read_deals, read_ticks, write_deals, write_ticks, Format, TickReader, TickSchema};
