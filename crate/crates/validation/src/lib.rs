//! Bookkeeping for the acceptance run: each check prints exactly one
//! `PASS`/`FAIL` line and the run fails if any check did.

use std::fmt::Display;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

/// What a single check reports back.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(pass: bool, detail: impl Display) -> Verdict {
        Verdict { pass, detail: detail.to_string() }
    }
}

#[derive(Debug, Default)]
pub struct Run {
    lines: Vec<String>,
    failed: usize,
}

impl Run {
    pub fn new() -> Run {
        Run::default()
    }

    /// Runs `check` under a time budget. A panic or an overrun counts as a
    /// failure.
    pub fn check(&mut self, id: &str, title: &str, budget: Duration, check: impl FnOnce() -> Verdict) {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check));
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(v) => (v.pass, v.detail),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panicked".into());
                (false, format!("panicked: {msg}"))
            }
        };
        let in_time = elapsed <= budget;
        let pass = pass && in_time;
        let timing = if in_time {
            format!("{:.2}s", elapsed.as_secs_f64())
        } else {
            format!("{:.2}s over the {:.0}s budget", elapsed.as_secs_f64(), budget.as_secs_f64())
        };
        let line = format!("{} {id} {title} [{timing}]: {detail}", if pass { "PASS" } else { "FAIL" });
        println!("{line}");
        if !pass {
            self.failed += 1;
        }
        self.lines.push(line);
    }

    pub fn failed(&self) -> usize {
        self.failed
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    /// Summary line; exits non-zero when anything failed.
    pub fn finish(self) {
        println!("\n{} checks, {} failed", self.lines.len(), self.failed);
        if self.failed > 0 {
            std::process::exit(1);
        }
    }
}

/// `|a/b − 1| ≤ tol`.
pub fn within_rel(a: f64, b: f64, tol: f64) -> bool {
    (a / b - 1.0).abs() <= tol
}

/// `b/f ≤ a ≤ b·f`.
pub fn within_factor(a: f64, b: f64, f: f64) -> bool {
    a >= b / f && a <= b * f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helpers() {
        assert!(within_rel(1.05, 1.0, 0.1));
        assert!(!within_rel(1.2, 1.0, 0.1));
        assert!(within_factor(0.5, 1.0, 2.0));
        assert!(!within_factor(0.49, 1.0, 2.0));
    }

    #[test]
    fn panics_and_overruns_fail() {
        let mut run = Run::new();
        run.check("a", "ok", Duration::from_secs(5), || Verdict::new(true, "fine"));
        run.check("b", "panics", Duration::from_secs(5), || panic!("boom"));
        run.check("c", "slow", Duration::ZERO, || {
            std::thread::sleep(Duration::from_millis(2));
            Verdict::new(true, "late")
        });
        assert_eq!(run.failed(), 2);
        assert!(run.lines()[1].contains("boom"));
        assert!(run.lines()[2].starts_with("FAIL"));
    }
}
