//! HTTP API and batch command line over the `newscog` library.

pub mod api;
pub mod cli;
pub mod config;
pub mod pipeline;

pub use config::{Resources, ServiceConfig};
