use std::fmt;
use std::io::{self, Write};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported for review; does not affect the exit code.
    Flagged,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Flagged => "flagged",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub check_id: String,
    pub subject: String,
    pub verdict: Verdict,
    pub residual: String,
    pub anchor: String,
    /// Excluded from the exit code even when failing.
    #[serde(skip)]
    pub informational: bool,
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

impl Record {
    pub fn new(
        check_id: &str,
        subject: impl Into<String>,
        verdict: Verdict,
        residual: impl Into<String>,
        anchor: &str,
    ) -> Self {
        Self {
            check_id: check_id.to_string(),
            subject: subject.into(),
            verdict,
            residual: residual.into(),
            anchor: anchor.to_string(),
            informational: false,
        }
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    /// `check_id<TAB>subject<TAB>verdict<TAB>residual<TAB>anchor`.
    pub fn line(&self) -> String {
        [
            clean(&self.check_id),
            clean(&self.subject),
            self.verdict.to_string(),
            clean(&self.residual),
            clean(&self.anchor),
        ]
        .join("\t")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub flagged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub command: String,
    pub entries: Vec<Record>,
}

impl VerificationReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, r: Record) {
        self.entries.push(r);
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for e in &self.entries {
            match e.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Flagged => s.flagged += 1,
            }
        }
        s
    }

    /// True when no counted entry failed.
    pub fn ok(&self) -> bool {
        !self
            .entries
            .iter()
            .any(|e| e.verdict == Verdict::Fail && !e.informational)
    }

    pub fn write_records<W: Write>(&self, mut w: W) -> io::Result<()> {
        for e in &self.entries {
            writeln!(w, "{}", e.line())?;
        }
        Ok(())
    }

    pub fn summary_line(&self) -> String {
        let s = self.summary();
        format!(
            "{}: {} pass, {} fail, {} flagged{}",
            self.command,
            s.pass,
            s.fail,
            s.flagged,
            if self.ok() { "" } else { " (FAILED)" }
        )
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            command: &'a str,
            summary: Summary,
            ok: bool,
            entries: &'a [Record],
        }
        serde_json::to_string_pretty(&Out {
            command: &self.command,
            summary: self.summary(),
            ok: self.ok(),
            entries: &self.entries,
        })
        .expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_line_is_tab_separated_and_single_line() {
        let r = Record::new("verify.x", "a\tb", Verdict::Pass, "0\n1", "anchor");
        assert_eq!(r.line(), "verify.x\ta b\tpass\t0 1\tanchor");
    }

    #[test]
    fn informational_failures_do_not_fail_the_report() {
        let mut rep = VerificationReport::new("t");
        rep.push(Record::new("a", "s", Verdict::Flagged, "", ""));
        rep.push(Record::new("a", "s", Verdict::Fail, "", "").informational());
        assert!(rep.ok());
        rep.push(Record::new("a", "s", Verdict::Fail, "", ""));
        assert!(!rep.ok());
        assert_eq!(
            rep.summary(),
            Summary {
                pass: 0,
                fail: 2,
                flagged: 1
            }
        );
        assert!(rep.to_json().contains("\"verdict\": \"flagged\""));
    }
}
