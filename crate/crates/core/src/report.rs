//! Shared report shape: a status plus a list of JSON witnesses.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Inconclusive,
    Violation,
}

impl Status {
    /// The worse of two statuses.
    pub fn and(self, other: Status) -> Status {
        self.max(other)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Inconclusive => "inconclusive",
            Status::Violation => "violation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub status: Status,
    pub summary: String,
    pub witnesses: Vec<Value>,
}

impl Report {
    pub fn new(summary: impl Into<String>) -> Self {
        Report {
            status: Status::Ok,
            summary: summary.into(),
            witnesses: Vec::new(),
        }
    }

    pub fn witness(&mut self, w: Value) {
        self.witnesses.push(w);
    }

    pub fn flag(&mut self, status: Status, w: Value) {
        self.status = self.status.and(status);
        self.witnesses.push(w);
    }

    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}
