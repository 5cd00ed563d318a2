//! Check results and their JSON form.
//!
//! A report is a list of checks in a fixed order; its status is the worst
//! check status, and the JSON carries only exact witnesses so two runs
//! produce identical bytes.

use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    /// A search ran out of budget before deciding.
    Budget,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Budget => "budget",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Budget => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub id: String,
    /// One-line statement of what is verified.
    pub claim: String,
    pub status: Status,
    pub witness: Value,
}

impl Check {
    pub fn new(id: &str, claim: &str, passed: bool, witness: Value) -> Self {
        let status = if passed { Status::Pass } else { Status::Fail };
        Check { id: id.into(), claim: claim.into(), status, witness }
    }

    /// A check that could not run; the error text is the witness.
    pub fn error(id: &str, claim: &str, err: impl std::fmt::Display) -> Self {
        Check { id: id.into(), claim: claim.into(), status: Status::Fail, witness: json!({ "error": err.to_string() }) }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> Value {
        json!({ "id": self.id, "claim": self.claim, "status": self.status.name(), "witness": self.witness })
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl Report {
    /// Worst status; a failure outranks budget exhaustion.
    pub fn status(&self) -> Status {
        let s = self.checks.iter().map(|c| c.status);
        if s.clone().any(|x| x == Status::Fail) {
            Status::Fail
        } else if s.clone().any(|x| x == Status::Budget) {
            Status::Budget
        } else {
            Status::Pass
        }
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed()).map(|c| c.id.as_str()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "status": self.status().name(),
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        })
    }

    /// `id<TAB>status` lines, one per check.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("id\tstatus\tclaim\n");
        for c in &self.checks {
            out.push_str(&format!("{}\t{}\t{}\n", c.id, c.status.name(), c.claim));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failure_outranks_budget() {
        let mut r = Report { suite: "t".into(), checks: vec![Check::new("a", "", true, Value::Null)] };
        assert_eq!(r.status(), Status::Pass);
        r.checks.push(Check { status: Status::Budget, ..Check::new("b", "", true, Value::Null) });
        assert_eq!(r.status().exit_code(), 2);
        r.checks.push(Check::new("c", "", false, Value::Null));
        assert_eq!(r.status().exit_code(), 1);
        assert_eq!(r.failing(), ["b", "c"]);
    }
}
