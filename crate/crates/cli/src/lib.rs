//! Command-line front end: form syntax, subcommands and JSON reports.

pub mod commands;
pub mod expr;

pub use commands::{field_from_args, run, Cli, Command, Exit};
pub use expr::{format_form, parse_form, ParseError};
