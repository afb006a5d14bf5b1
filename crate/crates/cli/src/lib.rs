//! Command line front end: expression parsing and subcommands.

pub mod commands;
pub mod parse;
