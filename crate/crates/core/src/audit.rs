//! Reports produced by the randomized axiom audits.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct AuditCheck {
    pub name: String,
    pub samples: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl AuditCheck {
    pub fn new(name: &str, violations: &[f64], tolerance: f64) -> Self {
        let max_violation = violations.iter().copied().fold(0.0, f64::max);
        let finite = violations.iter().all(|v| v.is_finite());
        Self {
            name: name.to_string(),
            samples: violations.len(),
            max_violation,
            tolerance,
            passed: finite && max_violation <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&AuditCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_violation(&self) -> f64 {
        self.checks.iter().map(|c| c.max_violation).fold(0.0, f64::max)
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<24} {} samples={} max_violation={:.3e} tolerance={:.1e}",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.samples,
                c.max_violation,
                c.tolerance
            )?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}
