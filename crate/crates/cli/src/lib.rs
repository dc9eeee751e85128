//! Library surface of the framelab CLI, exposed so integration tests can
//! drive suite runs and instance generation directly.

pub mod config;
pub mod suite;

pub use config::{parse_algebra, OutputFormat, SuiteConfig, SEED_ENV_VAR};
pub use suite::{generate_instance, run_suite, SuiteRecord, SuiteReport};
