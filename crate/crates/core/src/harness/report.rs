//! Versioned report types shared by the checks, the suite, and the CLI.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Bumped whenever a serialized report or ledger layout changes shape.
pub const SCHEMA_VERSION: &str = "1";

/// Outcome of one empirical check on one solved problem.
///
/// `vacuous` marks runs whose hypotheses (gates) were not met: nothing was
/// asserted, so `pass` is true but carries no weight. `inputs_digest` is a
/// stable hash of everything that determined the run, so reports can be
/// deduplicated and compared across machines.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema_version: String,
    pub check: String,
    pub inputs_digest: String,
    /// Constants the check was asked to verify against.
    pub constants: BTreeMap<String, f64>,
    /// Quantities measured on the discrete solution.
    pub measured: BTreeMap<String, f64>,
    /// Signed slack for each asserted inequality (>= -tolerance passes).
    pub margins: BTreeMap<String, f64>,
    pub pass: bool,
    pub vacuous: bool,
    pub reason: String,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn new(check: &str, digest_parts: &[String], tolerance: f64) -> CheckReport {
        CheckReport {
            schema_version: SCHEMA_VERSION.to_string(),
            check: check.to_string(),
            inputs_digest: fnv1a_hex(digest_parts),
            constants: BTreeMap::new(),
            measured: BTreeMap::new(),
            margins: BTreeMap::new(),
            pass: false,
            vacuous: false,
            reason: String::new(),
            tolerance,
        }
    }

    pub fn set_vacuous(&mut self, reason: impl Into<String>) {
        self.vacuous = true;
        self.pass = true;
        self.reason = reason.into();
    }

    /// Pass iff every recorded margin clears -tolerance.
    pub fn settle_from_margins(&mut self) {
        let worst = self
            .margins
            .values()
            .copied()
            .fold(f64::INFINITY, f64::min);
        self.pass = worst >= -self.tolerance;
        if self.reason.is_empty() {
            self.reason = if self.pass {
                format!("worst margin {worst:.3e}")
            } else {
                format!("margin {worst:.3e} below -{:.1e}", self.tolerance)
            };
        }
    }

    /// Counts toward the verdict: failed, and not for lack of hypotheses.
    pub fn hard_fail(&self) -> bool {
        !self.vacuous && !self.pass
    }
}

/// 64-bit FNV-1a over the parts, separator-framed; hex string.
pub fn fnv1a_hex(parts: &[String]) -> String {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for part in parts {
        for b in part.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(PRIME);
        }
        h ^= 0x1f; // unit separator between parts
        h = h.wrapping_mul(PRIME);
    }
    format!("{h:016x}")
}
