//! Structured pass/fail records for the identities the library checks.
//!
//! An entry is a finding, not an error: `fail` and `measured-discrepancy`
//! describe the mathematics, while [`crate::Error`] is reserved for misuse
//! of the library or broken internal invariants.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// The identity holds exactly.
    Pass,
    /// The identity is refuted; the evidence carries a counterexample.
    Fail,
    /// A stated value was recomputed and differs from the measured one.
    MeasuredDiscrepancy,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// `Pass` when the values agree, `MeasuredDiscrepancy` otherwise.
    pub fn compare<T: PartialEq>(stated: &T, measured: &T) -> Status {
        if stated == measured {
            Status::Pass
        } else {
            Status::MeasuredDiscrepancy
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub claim: String,
    pub anchor: String,
    pub status: Status,
    pub evidence: Value,
}

impl AuditEntry {
    pub fn new(
        claim: impl Into<String>,
        anchor: impl Into<String>,
        status: Status,
        evidence: Value,
    ) -> Self {
        AuditEntry {
            claim: claim.into(),
            anchor: anchor.into(),
            status,
            evidence,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn push(&mut self, entry: AuditEntry) {
        self.entries.push(entry);
    }

    pub fn extend(&mut self, other: AuditReport) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, claim: &str) -> Option<&AuditEntry> {
        self.entries.iter().find(|e| e.claim == claim)
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.status == Status::Pass)
    }

    pub fn count(&self, status: Status) -> usize {
        self.entries.iter().filter(|e| e.status == status).count()
    }
}
