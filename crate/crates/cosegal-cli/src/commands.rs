//! Subcommand dispatch. Filled in as the engine modules land.

use clap::Parser;
use std::ffi::OsString;

#[derive(Parser, Debug)]
#[command(name = "cosegal", version, about = "finite lax-diagram engine")]
struct Cli {}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(_) => 0,
        Err(e) => {
            let _ = e.print();
            2
        }
    }
}
