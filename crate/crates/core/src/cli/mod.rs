//! Config-driven front end: parsing, request execution, reports and the
//! bundled example fixtures.

pub mod config;
pub mod examples;
pub mod expr;
pub mod report;
pub mod run;

pub use config::{parse_config, AnalysisConfig, ConfigError, ConfigErrors, Kind, Request};
pub use report::{Entry, Format, Report};
pub use run::run;
