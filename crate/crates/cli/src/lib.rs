pub mod app;
pub mod commands;
pub mod fixtures;
pub mod parse;
pub mod selftest;

pub use app::{execute, Execution};

/// Runs the command line `args` (including the program name) with the
/// built-in command table.
pub fn run<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    execute(&commands::registry(), args)
}
