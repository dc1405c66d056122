//! HTTP service and command-line front end for `insight-core`.

pub mod cli;
pub mod report;
pub mod server;
