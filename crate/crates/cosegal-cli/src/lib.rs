//! Library surface of the `cosegal` command-line tool; `main` is a thin
//! wrapper around [`run`] so integration tests can drive the CLI in-process.

use std::ffi::OsString;

pub mod commands;

/// Run the CLI on `argv` (not including the program name is fine; both are
/// accepted). Returns the process exit code: 0 = success / all checks pass,
/// 1 = checks ran and failed, 2 = usage or input error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    commands::run(argv)
}
