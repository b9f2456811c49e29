//! Command-line front end: spec files in, reports and plots out. `main` only forwards to [`run`].

pub mod app;
pub mod error;
pub mod output;
pub mod spec;
pub mod svg;

pub use app::run;
pub use error::CliError;
