//! Library side of the `discourse` binary. Each subcommand is a plain
//! function over its parsed arguments so tests can drive it directly.

pub mod args;
pub mod lacan;
pub mod output;
pub mod prepare;
pub mod serve;
pub mod traits;

use std::fmt;

/// Ambiguous annotations or a failed classifier check. The binary maps this
/// to exit status 2; every other error exits with 1.
#[derive(Debug)]
pub struct VerificationFailure(pub String);

impl fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailure {}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<VerificationFailure>().is_some() {
        2
    } else {
        1
    }
}
