//! Machine-readable check reports.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub config: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub data: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), ..Default::default() }
    }

    pub fn config(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.config.insert(key.to_string(), value.into());
        self
    }

    pub fn data(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.data.insert(key.to_string(), value.into());
        self
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Record a pass/fail check; the witness is kept only on failure.
    pub fn check(&mut self, id: &str, ok: bool, detail: impl Into<String>, witness: impl FnOnce() -> String) -> bool {
        let witness = if ok { None } else { Some(witness()) };
        self.push(Check {
            id: id.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
            witness,
        });
        ok
    }

    pub fn pass(&mut self, id: &str, detail: impl Into<String>) {
        self.push(Check { id: id.to_string(), status: Status::Pass, detail: detail.into(), witness: None });
    }

    pub fn fail(&mut self, id: &str, detail: impl Into<String>, witness: Option<String>) {
        self.push(Check { id: id.to_string(), status: Status::Fail, detail: detail.into(), witness });
    }

    pub fn undetermined(&mut self, id: &str, detail: impl Into<String>) {
        self.push(Check { id: id.to_string(), status: Status::Undetermined, detail: detail.into(), witness: None });
    }

    /// Append another report's checks and data under a prefix.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.id = format!("{prefix}{}", c.id);
            self.checks.push(c);
        }
        for (k, v) in other.data {
            self.data.insert(format!("{prefix}{k}"), v);
        }
    }

    /// No check failed (undetermined checks do not count as failures).
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.status == Status::Fail)
    }

    pub fn find(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn status_of(&self, id: &str) -> Option<Status> {
        self.find(id).map(|c| c.status)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Undetermined => "UNDETERMINED",
            };
            writeln!(f, "  [{tag}] {}: {}", c.id, c.detail)?;
            if let Some(w) = &c.witness {
                writeln!(f, "         witness: {w}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_and_prefixes() {
        let mut r = Report::new("t");
        r.pass("a", "ok");
        let mut s = Report::new("s");
        s.check("b", false, "bad", || "w".into());
        s.undetermined("c", "?");
        r.absorb("sub.", s);
        assert!(!r.all_pass());
        assert_eq!(r.first_failure().unwrap().id, "sub.b");
        assert_eq!(r.status_of("sub.c"), Some(Status::Undetermined));
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
