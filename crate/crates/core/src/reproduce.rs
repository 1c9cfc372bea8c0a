//! Recomputes the published counterexamples and the lower-bound arithmetic,
//! reporting computed against expected values.

use std::fmt;

use serde::Serialize;

use crate::audit::{builtin_instance, lowerbound_diagnostics, BuiltinInstance};
use crate::error::Result;
use crate::model::{DataSet, Hyperplane};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Fig1a,
    Fig1b,
    Quantile,
    Lowerbound,
    All,
}

impl std::str::FromStr for Target {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fig1a" => Target::Fig1a,
            "fig1b" => Target::Fig1b,
            "quantile" => Target::Quantile,
            "lowerbound" => Target::Lowerbound,
            "all" => Target::All,
            _ => return Err(crate::Error::InvalidInput(format!("unknown target `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub claim: String,
    pub computed: String,
    pub expected: String,
    pub pass: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: computed {}, expected {}", self.claim, self.computed, self.expected)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub target: String,
    pub checks: Vec<Check>,
    /// Observations that do not affect the outcome.
    pub notes: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}]", self.target)?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

fn check(claim: &str, computed: impl fmt::Display, expected: impl fmt::Display, pass: bool) -> Check {
    Check { claim: claim.into(), computed: computed.to_string(), expected: expected.to_string(), pass }
}

/// Truthful fit, fit after the builtin's misreport, and the manipulator's
/// true absolute residual under both.
pub fn manipulation_outcome(which: BuiltinInstance) -> Result<(DataSet, Hyperplane, Hyperplane, f64, f64)> {
    let (data, spec) = builtin_instance(which);
    let (agent, report) = which.manipulation();
    let prepared = spec.prepare(&data)?;
    let truthful = prepared.fit(&data)?;
    let lied = prepared.fit(&data.with_report(agent, report)?)?;
    let x = data.x(agent);
    let before = (data.y(agent) - truthful.eval(x)).abs();
    let after = (data.y(agent) - lied.eval(x)).abs();
    Ok((data, truthful, lied, before, after))
}

pub fn fig1a() -> Result<Report> {
    let (_, truthful, lied, before, after) = manipulation_outcome(BuiltinInstance::CrmDisjoint)?;
    Ok(Report {
        target: "fig1a".into(),
        checks: vec![
            check("truthful line is y = 1", &truthful, Hyperplane::line(0.0, 1.0), truthful == Hyperplane::line(0.0, 1.0)),
            check("deviation line", &lied, Hyperplane::line(0.1, 1.4), lied.approx_eq(&Hyperplane::line(0.1, 1.4), 1e-9)),
            check(
                "manipulator residual drops",
                format!("{before} -> {after}"),
                "2 -> 1.2",
                (before - 2.0).abs() <= 1e-9 && (after - 1.2).abs() <= 1e-9,
            ),
        ],
        notes: vec![],
    })
}

pub fn fig1b() -> Result<Report> {
    let (_, truthful, lied, before, after) = manipulation_outcome(BuiltinInstance::CrmSubset)?;
    let figure = Hyperplane::line(0.5, 3.5);
    let text = Hyperplane::line(2.0 / 3.0, 8.0 / 3.0);
    let verdict = |h: &Hyperplane| if truthful.approx_eq(h, 1e-9) { "matches" } else { "does not match" };
    Ok(Report {
        target: "fig1b".into(),
        checks: vec![check(
            "reporting 0 strictly helps the agent at (12, 11)",
            format!("{before} -> {after}"),
            "a decrease of at least 1e-6",
            after <= before - 1e-6,
        )],
        notes: vec![
            format!("truthful line {truthful}, deviation line {lied}"),
            format!("truthful line {} the plotted 0.5x + 3.5", verdict(&figure)),
            format!("truthful line {} the text's 3y = 2x + 8", verdict(&text)),
        ],
    })
}

pub fn quantile() -> Result<Report> {
    let (_, truthful, lied, before, after) = manipulation_outcome(BuiltinInstance::Quantile04)?;
    Ok(Report {
        target: "quantile".into(),
        checks: vec![
            check(
                "truthful line matches the plotted line",
                &truthful,
                "y = +0.5519·x1 -6.0929 (within 1e-4)",
                (truthful.beta1[0] - 0.5518672).abs() <= 1e-4 && (truthful.beta0 + 6.0929461).abs() <= 1e-4,
            ),
            check(
                "reporting 2000 strictly helps the agent at (13.9, 7.4)",
                format!("{before} -> {after} (line {lied})"),
                "a decrease of at least 1e-3",
                after <= before - 1e-3,
            ),
        ],
        notes: vec![],
    })
}

pub fn lowerbound(n: usize) -> Result<Report> {
    let d = lowerbound_diagnostics(n, 1.0, 1.0)?;
    Ok(Report {
        target: format!("lowerbound n={n}"),
        checks: vec![
            check("T(X) = 1", d.t, 1, (d.t - 1.0).abs() <= 1e-9),
            check("OLS risk f0(1) = 1/2", d.f0, d.f0_expected, (d.f0 - d.f0_expected).abs() <= 1e-9 * d.f0_expected),
            check("constrained risk f1 = h^2", d.f1, d.f1_expected, (d.f1 - d.f1_expected).abs() <= 1e-6 * d.f1_expected),
            check("f1 / f0(h) = 2", d.ratio, 2, (d.ratio - 2.0).abs() <= 1e-6),
        ],
        notes: vec![format!("X = {}", d.x)],
    })
}

pub fn reproduce(target: Target, n: usize) -> Result<Vec<Report>> {
    Ok(match target {
        Target::Fig1a => vec![fig1a()?],
        Target::Fig1b => vec![fig1b()?],
        Target::Quantile => vec![quantile()?],
        Target::Lowerbound => vec![lowerbound(n)?],
        Target::All => vec![fig1a()?, fig1b()?, quantile()?, lowerbound(n)?],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crm_figures_reproduce() {
        assert!(fig1a().unwrap().passed());
        let r = fig1b().unwrap();
        assert!(r.passed());
        assert!(r.notes[1].contains("matches the plotted"));
        assert!(r.notes[2].contains("does not match"));
    }

    #[test]
    fn lowerbound_reproduces() {
        for n in 3..=10 {
            assert!(lowerbound(n).unwrap().passed());
        }
        assert!(lowerbound(2).is_err());
    }

    #[test]
    fn report_lines() {
        let r = fig1a().unwrap().to_string();
        assert!(r.starts_with("[fig1a]"));
        assert_eq!(r.matches("PASS").count(), 3);
    }
}
