//! Batch front-end: load an experiment config, run one command, emit
//! CSV/JSON artifacts.
//!
//! Exit codes: 0 success, 2 config error, 3 numeric failure, 4 verification
//! failure.

mod commands;
mod config;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub use commands::{synthesis_grid, Outcome, SCHEMA_VERSION};
pub use config::{
    set_pointer, BoundsConfig, ExperimentConfig, MonotoneCase, Overrides, RotationCase,
    SandwichCase, SweepAxis, SweepConfig, SynthesisConfig, VolterraConfig, VolterraVector,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "qnlab", version, about = "Resolvent asymptotics of quasinilpotent operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Estimate k_x along a radial λ grid.
    EstimateK,
    /// Check the shift-norm sandwich, rotation invariance and monotonicity.
    VerifyBounds,
    /// Build a direct sum of scaled shifts realizing a right-closed set.
    Synthesize,
    /// Compare the discretized Volterra resolvent with its closed forms.
    VolterraCompare,
    /// Run a command over the cartesian product of config variations.
    Sweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::EstimateK => "estimate-k",
            Command::VerifyBounds => "verify-bounds",
            Command::Synthesize => "synthesize",
            Command::VolterraCompare => "volterra-compare",
            Command::Sweep => "sweep",
        }
    }

    fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "estimate-k" => Command::EstimateK,
            "verify-bounds" => Command::VerifyBounds,
            "synthesize" => Command::Synthesize,
            "volterra-compare" => Command::VolterraCompare,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown command {other:?}"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Mantissa bits of the extended-precision arithmetic.
    #[arg(long, global = true)]
    pub bits: Option<usize>,
    /// Relative tolerance of the power iteration.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for CSV/JSON artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub grid_max: Option<f64>,
    #[arg(long, global = true)]
    pub grid_ratio: Option<f64>,
    #[arg(long, global = true)]
    pub grid_count: Option<usize>,
    #[arg(long, global = true)]
    pub theta: Option<f64>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            bits: self.bits,
            tol: self.tol,
            seed: self.seed,
            grid_max: self.grid_max,
            grid_ratio: self.grid_ratio,
            grid_count: self.grid_count,
            theta: self.theta,
        }
    }
}

/// Exit code for an error: numeric failures are 3, everything else 2.
pub fn exit_code_for(e: &Error) -> i32 {
    if e.is_numeric() {
        EXIT_NUMERIC
    } else {
        EXIT_CONFIG
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e.root() {
        Error::NonConvergence { .. } => "non_convergence",
        Error::TooFewSamples { .. } => "too_few_samples",
        Error::DegenerateRegression => "degenerate_regression",
        Error::NoWitness => "no_witness",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
        Error::Csv(_) => "csv",
        Error::MissingOne => "missing_one",
        Error::NotRightClosed(_) => "not_right_closed",
        _ => "invalid_input",
    }
}

pub fn error_report(e: &Error) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "error": { "kind": error_kind(e), "message": e.to_string() },
    })
}

fn run_parsed(cmd: Command, cfg: &ExperimentConfig, o: &Overrides) -> Result<Outcome> {
    match cmd {
        Command::EstimateK => commands::estimate_k_cmd(cfg, o),
        Command::VerifyBounds => commands::verify_bounds_cmd(cfg, o),
        Command::Synthesize => commands::synthesize_cmd(cfg, o),
        Command::VolterraCompare => commands::volterra_compare_cmd(cfg, o),
        Command::Sweep => Err(Error::InvalidArgument("sweeps do not nest".into())),
    }
}

fn write_outcome(out: Option<&Path>, outcome: &Outcome) -> Result<()> {
    let Some(dir) = out else {
        return Ok(());
    };
    fs::create_dir_all(dir)?;
    for (name, bytes) in &outcome.files {
        fs::write(dir.join(name), bytes)?;
    }
    let mut report = serde_json::to_vec_pretty(&outcome.report)?;
    report.push(b'\n');
    fs::write(dir.join("report.json"), report)?;
    Ok(())
}

fn cartesian(axes: &[SweepAxis]) -> Vec<Vec<Value>> {
    let mut combos: Vec<Vec<Value>> = vec![vec![]];
    for axis in axes {
        let mut next = Vec::with_capacity(combos.len() * axis.values.len());
        for c in &combos {
            for v in &axis.values {
                let mut c = c.clone();
                c.push(v.clone());
                next.push(c);
            }
        }
        combos = next;
    }
    combos
}

fn sweep(base: &Value, cfg: &ExperimentConfig, o: &Overrides, out: Option<&Path>) -> Result<(Outcome, i32)> {
    let sw = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("sweep needs a \"sweep\" section".into()))?;
    let cmd = Command::parse(&sw.command)?;
    let mut runs = Vec::new();
    let mut worst = EXIT_OK;
    for (i, combo) in cartesian(&sw.axes).into_iter().enumerate() {
        let mut doc = base.clone();
        if let Value::Object(map) = &mut doc {
            map.remove("sweep");
        }
        let mut assignments = serde_json::Map::new();
        for (axis, value) in sw.axes.iter().zip(combo) {
            set_pointer(&mut doc, &axis.pointer, value.clone())?;
            assignments.insert(axis.pointer.clone(), value);
        }
        let result = serde_json::from_value::<ExperimentConfig>(doc)
            .map_err(Error::from)
            .and_then(|mut c| {
                c.apply(o);
                run_parsed(cmd, &c, o)
            });
        let run_dir = out.map(|d| d.join(format!("run_{i:03}")));
        let (code, report) = match result {
            Ok(outcome) => {
                write_outcome(run_dir.as_deref(), &outcome)?;
                let code = if outcome.verified { EXIT_OK } else { EXIT_VERIFY };
                (code, outcome.report)
            }
            Err(e) => (exit_code_for(&e), error_report(&e)),
        };
        worst = worst.max(code);
        runs.push(json!({
            "index": i,
            "assignments": Value::Object(assignments),
            "exit_code": code,
            "report": report,
        }));
    }
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "sweep",
        "swept_command": cmd.name(),
        "runs": runs,
    });
    Ok((
        Outcome {
            report,
            files: vec![],
            verified: worst == EXIT_OK,
        },
        worst,
    ))
}

/// Runs `command` (a subcommand name, including `sweep`) on a config given
/// as JSON text, without touching the filesystem.
pub fn run_command(command: &str, config_json: &str) -> Result<Outcome> {
    let base: Value = serde_json::from_str(config_json)?;
    let cfg: ExperimentConfig = serde_json::from_value(base.clone())?;
    cfg.precision.validate()?;
    let o = Overrides::default();
    if command == "sweep" {
        return Ok(sweep(&base, &cfg, &o, None)?.0);
    }
    run_parsed(Command::parse(command)?, &cfg, &o)
}

/// Runs one parsed invocation; returns the exit code and the JSON document
/// printed on stdout (report) or stderr (error).
pub fn execute(cli: &Cli) -> (i32, Value) {
    match execute_inner(cli) {
        Ok(v) => v,
        Err(e) => (exit_code_for(&e), error_report(&e)),
    }
}

fn execute_inner(cli: &Cli) -> Result<(i32, Value)> {
    let o = cli.common.overrides();
    let base: Value = match &cli.common.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => json!({}),
    };
    let mut cfg: ExperimentConfig = serde_json::from_value(base.clone())?;
    cfg.apply(&o);
    cfg.precision.validate()?;
    let out = cli.common.out.as_deref();
    if cli.command == Command::Sweep {
        let (outcome, code) = sweep(&base, &cfg, &o, out)?;
        write_outcome(out, &outcome)?;
        return Ok((code, outcome.report));
    }
    let outcome = run_parsed(cli.command, &cfg, &o)?;
    write_outcome(out, &outcome)?;
    let code = if outcome.verified { EXIT_OK } else { EXIT_VERIFY };
    Ok((code, outcome.report))
}

/// Entry point used by the binary: parses `args`, prints the report and
/// returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (code, doc) = execute(&cli);
    let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    if doc.get("error").is_some() {
        eprintln!("{text}");
    } else {
        println!("{text}");
    }
    code
}
