//! Library side of the `ayrel` command: verification suites, reports and
//! SVG output, shared by the binary and the acceptance test.

pub mod report;
pub mod suites;
pub mod svg;

use ayrel::NfElem;

/// Parse a rel time such as `3/2`, `a^3` or `1 - a + 2*a^2`.
pub fn parse_time(text: &str) -> Result<NfElem, String> {
    NfElem::parse(text).map_err(|e| format!("cannot parse rel time {text:?}: {e}"))
}
