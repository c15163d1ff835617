use std::fmt::Write;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

/// One verdict. `passed == None` marks an informational block.
#[derive(Clone, Debug)]
pub struct Check {
    pub subject: String,
    pub check: String,
    pub passed: Option<bool>,
    pub fields: Vec<(String, String)>,
}

impl Check {
    pub fn new(subject: impl Into<String>, check: impl Into<String>, passed: bool) -> Self {
        Check {
            subject: subject.into(),
            check: check.into(),
            passed: Some(passed),
            fields: Vec::new(),
        }
    }

    pub fn info(subject: impl Into<String>, check: impl Into<String>) -> Self {
        Check {
            passed: None,
            ..Check::new(subject, check, true)
        }
    }

    pub fn field(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.fields.push((key.into(), value.to_string()));
        self
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn failed(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.passed == Some(false))
            .count()
    }

    fn verdicts(&self) -> usize {
        self.checks.iter().filter(|c| c.passed.is_some()).count()
    }

    pub fn exit_code(&self) -> u8 {
        u8::from(self.failed() > 0)
    }

    pub fn render(&self, format: Format) -> String {
        let mut s = String::new();
        match format {
            Format::Human => {
                for c in &self.checks {
                    let tag = match c.passed {
                        Some(true) => "PASS",
                        Some(false) => "FAIL",
                        None => "    ",
                    };
                    let _ = writeln!(s, "{tag}  {} {}", c.check, c.subject);
                    for (k, v) in &c.fields {
                        let _ = writeln!(s, "      {k}: {v}");
                    }
                }
                let _ = writeln!(
                    s,
                    "{}: {} of {} checks passed",
                    self.command,
                    self.verdicts() - self.failed(),
                    self.verdicts()
                );
            }
            Format::Machine => {
                for c in &self.checks {
                    let _ = writeln!(s, "[check]");
                    let _ = writeln!(s, "command: {}", self.command);
                    let _ = writeln!(s, "check: {}", c.check);
                    let _ = writeln!(s, "subject: {}", c.subject);
                    let status = match c.passed {
                        Some(true) => "pass",
                        Some(false) => "fail",
                        None => "info",
                    };
                    let _ = writeln!(s, "status: {status}");
                    for (k, v) in &c.fields {
                        let _ = writeln!(s, "{k}: {}", v.replace('\n', " "));
                    }
                    s.push('\n');
                }
                let _ = writeln!(s, "[summary]");
                let _ = writeln!(s, "command: {}", self.command);
                let _ = writeln!(s, "checks: {}", self.verdicts());
                let _ = writeln!(s, "passed: {}", self.verdicts() - self.failed());
                let _ = writeln!(s, "failed: {}", self.failed());
                let _ = writeln!(s, "exit: {}", self.exit_code());
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn machine_blocks_have_stable_keys() {
        let mut r = Report::new("verify");
        r.push(Check::new("m", "conservation", true).field("residual", "0"));
        r.push(Check::info("eq", "euler-lagrange").field("u", "v_t"));
        let out = r.render(Format::Machine);
        assert!(out.starts_with("[check]\ncommand: verify\ncheck: conservation\nsubject: m\nstatus: pass\nresidual: 0\n"));
        assert!(out.ends_with("checks: 1\npassed: 1\nfailed: 0\nexit: 0\n"));
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn failures_set_exit_one() {
        let mut r = Report::new("verify");
        r.push(Check::new("m", "conservation", false));
        assert_eq!(r.exit_code(), 1);
        assert!(r.render(Format::Human).contains("FAIL  conservation m"));
    }
}
