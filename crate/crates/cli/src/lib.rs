//! Text grammar for map expressions and the `awr` command dispatcher.

pub mod commands;
pub mod grammar;
pub mod output;

pub use commands::{run_command, run_with, Cli, Command};
pub use grammar::{parse_complex, parse_map_expr, print_map_expr, ParseError};
