//! Configuration and file formats of the `hopflab` command line.

pub mod config;
pub mod scene;
