//! Batch front-end for `snc-core`: pair-spec ingestion, invariant reports, certificate
//! generation and the seeded verification suite.

pub mod commands;
pub mod encode;
pub mod spec;
pub mod suite;

pub use commands::{run, Cli, Outcome};
pub use spec::{load_pair_spec, Loaded, SpecError};
pub use suite::{run_verification_suite, Limits, Report, SuiteConfig};
