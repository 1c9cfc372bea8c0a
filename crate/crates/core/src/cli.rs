//! The `spreg` command line.
//!
//! Exit codes: 0 success (including "no violation found"), 1 a reproduction
//! check failed, 2 malformed input, 3 a mechanism precondition failed.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::audit::{
    audit_gsp_with, audit_sp_with, builtin_instance, default_candidates, efficiency_ratio, BuiltinInstance, GspOptions,
    MechanismSpec, PreferenceModel,
};
use crate::audit::{influence_bounds_with, InfluenceBounds};
use crate::erm::fit_ols;
use crate::io::{parse_mechanism, read_csv_path, to_sorted_json};
use crate::model::{outcomes, rss, DataSet};
use crate::plot::{render_svg, Deviation, LineStyle, PlotLine};
use crate::reproduce::{reproduce, Target};

#[derive(Debug, Parser)]
#[command(name = "spreg", version, about = "Fit, audit and plot strategyproof linear regression mechanisms")]
struct Cli {
    /// Worker threads for audits; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Write the result to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Input {
    /// Mechanism kind (ols, l1-erm, quantile, crm, grl, grh, brown-mood, tukey,
    /// impartial, impartial-swap, generalized-median).
    #[arg(long)]
    mechanism: Option<String>,
    /// CSV file with header x1,...,xd,y.
    #[arg(long)]
    data: Option<PathBuf>,
    /// JSON mechanism parameters (0-based agent indices).
    #[arg(long)]
    config: Option<PathBuf>,
    /// A bundled instance: crm-disjoint, crm-subset or quantile04.
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a mechanism and print coefficients, predictions and residuals.
    Fit(Input),
    /// Search for profitable misreports.
    Audit {
        #[command(subcommand)]
        kind: AuditKind,
    },
    /// Influence bounds of a traversal mechanism.
    Influence {
        #[command(flatten)]
        input: Input,
        /// Agent index; all agents when omitted.
        #[arg(long)]
        agent: Option<usize>,
    },
    /// Residual sum of squares relative to OLS.
    Efficiency(Input),
    /// Render points and fitted lines as SVG (d = 1).
    Plot {
        #[command(flatten)]
        input: Input,
        /// Agent whose misreport is drawn (with --report).
        #[arg(long, requires = "report")]
        agent: Option<usize>,
        #[arg(long, requires = "agent", allow_hyphen_values = true)]
        report: Option<f64>,
    },
    /// Recompute the published counterexamples and lower-bound arithmetic.
    Reproduce {
        #[arg(value_parser = ["fig1a", "fig1b", "quantile", "lowerbound", "all"])]
        target: String,
        /// Agents at x = 1..n for the lower-bound instance.
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
enum AuditKind {
    /// Single-agent misreports.
    Sp {
        #[command(flatten)]
        input: Input,
        /// Agent index; every agent in turn when omitted (or the builtin's manipulator).
        #[arg(long)]
        agent: Option<usize>,
        /// Comma-separated misreports; defaults to a grid plus crossing points.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        candidates: Vec<f64>,
        #[arg(long, value_parser = parse_preference, default_value = "residual")]
        preference: PreferenceModel,
    },
    /// Coalition misreports.
    Gsp {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        max_coalition: usize,
        #[arg(long, default_value_t = 6)]
        candidates_per_agent: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = parse_preference, default_value = "residual")]
        preference: PreferenceModel,
    },
}

fn parse_preference(s: &str) -> Result<PreferenceModel, String> {
    serde_json::from_value(json!(s)).map_err(|_| format!("unknown preference `{s}` (residual or any-single-peaked)"))
}

enum Failure {
    Input(String),
    Contract(String),
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        if e.is_contract_violation() {
            Failure::Contract(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

struct Loaded {
    data: DataSet,
    spec: MechanismSpec,
    builtin: Option<BuiltinInstance>,
}

fn load(input: &Input) -> CliResult<Loaded> {
    let config = match &input.config {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?),
        None => None,
    };
    if let Some(name) = &input.builtin {
        if input.data.is_some() {
            return Err(Failure::Input("--builtin and --data are exclusive".into()));
        }
        let which: BuiltinInstance = name.parse()?;
        let (data, spec) = builtin_instance(which);
        let spec = if input.mechanism.is_some() || config.is_some() {
            parse_mechanism(input.mechanism.as_deref(), config.as_deref(), data.n())?
        } else {
            spec
        };
        return Ok(Loaded { data, spec, builtin: Some(which) });
    }
    let path = input.data.as_ref().ok_or_else(|| Failure::Input("one of --data or --builtin is required".into()))?;
    let data = read_csv_path(path)?;
    let spec = parse_mechanism(input.mechanism.as_deref(), config.as_deref(), data.n())?;
    Ok(Loaded { data, spec, builtin: None })
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    if cli.threads == 0 {
        let _ = writeln!(stderr, "error: --threads must be positive");
        return 2;
    }
    // Fails harmlessly when a pool already exists in this process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();

    match execute(&cli.command).and_then(|(text, ok)| {
        match &cli.out {
            Some(p) => std::fs::write(p, &text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
            None => {
                let _ = stdout.write_all(text.as_bytes());
            }
        }
        Ok(ok)
    }) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Input(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            2
        }
        Err(Failure::Contract(m)) => {
            let _ = writeln!(stderr, "error: contract violation: {m}");
            3
        }
    }
}

/// Runs with the process arguments and standard streams.
pub fn main_exit_code() -> i32 {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run(std::env::args_os(), &mut out, &mut err)
}

fn json_line(v: &serde_json::Value) -> String {
    let mut s = to_sorted_json(v);
    s.push('\n');
    s
}

/// Output text and whether the command succeeded.
fn execute(cmd: &Command) -> CliResult<(String, bool)> {
    match cmd {
        Command::Fit(input) => {
            let l = load(input)?;
            let h = l.spec.fit(&l.data)?;
            let o = outcomes(&h, &l.data)?;
            Ok((
                json_line(&json!({
                    "beta1": h.beta1,
                    "beta0": h.beta0,
                    "predictions": o.predictions,
                    "residuals": o.residuals,
                    "mechanism": l.spec,
                })),
                true,
            ))
        }
        Command::Audit { kind: AuditKind::Sp { input, agent, candidates, preference } } => {
            let l = load(input)?;
            let prepared = l.spec.prepare(&l.data)?;
            let agents: Vec<usize> = match (agent, l.builtin) {
                (Some(a), _) => vec![*a],
                (None, Some(b)) => vec![b.manipulation().0],
                (None, None) => (0..l.data.n()).collect(),
            };
            let mut found = None;
            for a in agents {
                l.data.check_index(a)?;
                let cands = if !candidates.is_empty() {
                    candidates.clone()
                } else {
                    let mut c = Vec::new();
                    if let Some(b) = l.builtin.filter(|b| b.manipulation().0 == a) {
                        c.push(b.manipulation().1);
                    }
                    c.extend(default_candidates(&l.data, a)?);
                    c
                };
                if let Some(cert) = audit_sp_with(&prepared, &l.data, a, &cands, *preference)? {
                    found = Some(cert);
                    break;
                }
            }
            Ok((json_line(&json!({ "violation": found })), true))
        }
        Command::Audit { kind: AuditKind::Gsp { input, max_coalition, candidates_per_agent, seed, preference } } => {
            let l = load(input)?;
            let prepared = l.spec.prepare(&l.data)?;
            let mut opts = GspOptions::new((*max_coalition).min(l.data.n()), *candidates_per_agent, *seed);
            opts.preference = *preference;
            let found = audit_gsp_with(&prepared, &l.data, &opts)?;
            Ok((json_line(&json!({ "violation": found })), true))
        }
        Command::Influence { input, agent } => {
            let l = load(input)?;
            let prepared = l.spec.prepare(&l.data)?;
            let entry = |i: usize| -> CliResult<serde_json::Value> {
                let InfluenceBounds { lower, upper } = influence_bounds_with(&prepared, &l.data, i)?;
                Ok(json!({ "agent": i, "lower": lower, "upper": upper }))
            };
            let v = match agent {
                Some(i) => entry(*i)?,
                None => json!({ "bounds": (0..l.data.n()).map(entry).collect::<CliResult<Vec<_>>>()? }),
            };
            Ok((json_line(&v), true))
        }
        Command::Efficiency(input) => {
            let l = load(input)?;
            let ratio = efficiency_ratio(&l.spec, &l.data)?;
            let h = l.spec.fit(&l.data)?;
            Ok((
                json_line(&json!({
                    "ratio": ratio,
                    "rss": rss(&l.data, &h)?,
                    "ols_rss": rss(&l.data, &fit_ols(&l.data))?,
                    "mechanism": l.spec,
                })),
                true,
            ))
        }
        Command::Plot { input, agent, report } => {
            let l = load(input)?;
            if l.data.dim() != 1 {
                return Err(Failure::Contract(format!("plots need d = 1, data has d = {}", l.data.dim())));
            }
            let prepared = l.spec.prepare(&l.data)?;
            let truthful = prepared.fit(&l.data)?;
            let mut lines = vec![PlotLine { hyperplane: truthful, style: LineStyle::Solid, label: "truthful".into() }];
            let deviation = match (agent, report, l.builtin) {
                (Some(a), Some(r), _) => Some((*a, *r)),
                (None, None, Some(b)) => Some(b.manipulation()),
                _ => None,
            };
            let mut marker = None;
            if let Some((a, r)) = deviation {
                l.data.check_index(a)?;
                let h = prepared.fit(&l.data.with_report(a, r)?)?;
                lines.push(PlotLine { hyperplane: h, style: LineStyle::Dashed, label: "deviation".into() });
                marker = Some(Deviation { x: l.data.x(a)[0], truth: l.data.y(a), report: r });
            }
            Ok((render_svg(&l.data, &lines, marker)?, true))
        }
        Command::Reproduce { target, n } => {
            let target: Target = target.parse()?;
            let reports = reproduce(target, *n)?;
            let mut text = String::new();
            for r in &reports {
                text.push_str(&r.to_string());
            }
            let ok = reports.iter().all(|r| r.passed());
            text.push_str(if ok { "overall: PASS\n" } else { "overall: FAIL\n" });
            Ok((text, ok))
        }
    }
}
