//! Library surface of the CLI: configuration, command implementations and
//! the exact binomial intervals, reusable by the acceptance suite.

pub mod binomial;
pub mod commands;
pub mod config;
