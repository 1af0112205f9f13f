//! Process exit codes (sysexits-style for input problems).

use clap::error::ErrorKind;

pub const SUCCESS: u8 = 0;
/// A scientific check did not hold.
pub const FAILURE: u8 = 1;
/// The constraint nullspace is not one-dimensional.
pub const AMBIGUOUS: u8 = 2;
pub const USAGE: u8 = 64;
/// Input file parsed but failed validation.
pub const DATA_ERR: u8 = 65;
/// Input file missing or unreadable.
pub const NO_INPUT: u8 = 66;
/// Could not write an output file.
pub const CANT_CREATE: u8 = 73;

pub fn from_clap_error(error: &clap::Error) -> u8 {
    match error.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            let _ = error.print();
            SUCCESS
        }
        _ => {
            let _ = error.print();
            USAGE
        }
    }
}
