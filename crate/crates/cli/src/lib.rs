//! Command-line driver for the barrier spectra library: run configuration,
//! result envelopes, CSV/JSON/SVG output and figure emission.

pub mod cache;
pub mod config;
pub mod contour;
pub mod envelope;
pub mod error;
pub mod output;
pub mod plot;
pub mod run;

/// Version string recorded in every result envelope and cache key.
pub const TOOL_VERSION: &str = concat!("barrier-spectra ", env!("CARGO_PKG_VERSION"));
