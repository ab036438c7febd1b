//! Library surface of the command-line tool: the spec-file language, the
//! run report format, and the command pipelines. The binary in `main.rs` is
//! a thin argument layer over [`commands`].

pub mod commands;
pub mod dsl;
pub mod runreport;
