//! Argument handling for the `symbreak` binary, kept in a library so tests
//! can drive it without spawning processes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use symbreak::alphabetic::{
    brute_force_optimal, dp_optimal_cost, hu_tucker, reconstruct_from_depths, tree_cost,
};
use symbreak::alphabetic::{SolveResult, TiePolicy};
use symbreak::harness::{run_campaign, CampaignConfig};
use symbreak::partition::{
    brute_force_partition, greedy_partition, partition_value, MAX_BRUTE_FORCE_ITEMS,
};
use symbreak::{
    dyadic_shadow, parse_weights, verify_policy, DecisionTrace, Error, Orientation, WeightVector,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "symbreak",
    version,
    about = "Exact alphabetic-tree solvers with symbolic tie breaking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Leftmost,
    Rightmost,
}

impl From<PolicyArg> for TiePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Leftmost => TiePolicy::Leftmost,
            PolicyArg::Rightmost => TiePolicy::Rightmost,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrientationArg {
    Pos,
    Neg,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::Pos => Orientation::Positive,
            OrientationArg::Neg => Orientation::Negative,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an optimal alphabetic tree with Hu-Tucker.
    Solve {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long, value_enum)]
        policy: PolicyArg,
        /// Write the comparison trace as JSON lines.
        #[arg(long)]
        emit_trace: Option<PathBuf>,
    },
    /// Exact optimum by interval DP, optionally by enumeration as well.
    Oracle {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        brute_force: bool,
    },
    /// Rebuild an alphabetic tree from leaf depths, e.g. "3,2,2,3,2".
    Reconstruct {
        #[arg(long, allow_hyphen_values = true)]
        depths: String,
    },
    /// Check every tie in a trace against a dyadic shadow direction.
    VerifyTrace {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long, value_enum)]
        orientation: OrientationArg,
    },
    /// Greedy two-way partition with instrumented comparisons.
    Partition {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long, value_enum, default_value = "pos")]
        orientation: OrientationArg,
        /// Also report the exact optimum (at most 16 weights).
        #[arg(long)]
        brute_force: bool,
        #[arg(long)]
        emit_trace: Option<PathBuf>,
    },
    /// Run a seeded robustness campaign.
    Fuzz {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// A failure that ends the command with a message on stderr.
struct Abort {
    code: i32,
    message: String,
}

impl Abort {
    fn usage(message: impl Into<String>) -> Self {
        Abort {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn in_file(path: &Path) -> impl Fn(Error) -> Abort + '_ {
    move |e| Abort::usage(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Abort> {
    fs::read_to_string(path)
        .map_err(|e| Abort::usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Abort> {
    fs::write(path, contents)
        .map_err(|e| Abort::usage(format!("cannot write {}: {e}", path.display())))
}

fn load_weights(path: &Path) -> Result<WeightVector, Abort> {
    parse_weights(&read(path)?).map_err(in_file(path))
}

fn lib_error(e: Error) -> Abort {
    Abort::usage(e.to_string())
}

/// Comma-separated positive integers; errors name the column.
fn parse_depths(text: &str) -> Result<Vec<usize>, Abort> {
    let mut out = Vec::new();
    let mut offset = 0;
    for token in text.split(',') {
        let lead = token.len() - token.trim_start().len();
        let value = token.trim();
        match value.parse::<usize>() {
            Ok(d) => out.push(d),
            Err(_) => {
                return Err(Abort::usage(format!(
                    "--depths: line 1, column {}: expected a nonnegative integer, found `{value}`",
                    offset + lead + 1
                )))
            }
        }
        offset += token.len() + 1;
    }
    Ok(out)
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<i32, Abort> {
    let mut lines: Vec<String> = Vec::new();
    let code = match cli.command {
        Command::Solve {
            weights,
            policy,
            emit_trace,
        } => {
            let w = load_weights(&weights)?;
            let (result, trace) = hu_tucker(&w, policy.into()).map_err(in_file(&weights))?;
            if let Some(path) = emit_trace {
                write(&path, &trace.to_jsonl())?;
            }
            match result {
                SolveResult::Solution(tree) => {
                    let cost = tree_cost(&tree, &w).map_err(lib_error)?;
                    lines.push(tree.to_string());
                    lines.push(format!("cost = {cost}"));
                    EXIT_OK
                }
                SolveResult::Failure => {
                    lines.push("INFEASIBLE".into());
                    EXIT_FAIL
                }
            }
        }
        Command::Oracle {
            weights,
            brute_force,
        } => {
            let w = load_weights(&weights)?;
            w.check_nonnegative().map_err(in_file(&weights))?;
            lines.push(format!("dp = {}", dp_optimal_cost(&w).map_err(lib_error)?));
            if brute_force {
                let (cost, count) = brute_force_optimal(&w).map_err(lib_error)?;
                lines.push(format!("brute-force = {cost}"));
                lines.push(format!("optimal trees = {count}"));
            }
            EXIT_OK
        }
        Command::Reconstruct { depths } => match reconstruct_from_depths(&parse_depths(&depths)?) {
            SolveResult::Solution(tree) => {
                lines.push(tree.to_string());
                EXIT_OK
            }
            SolveResult::Failure => {
                lines.push("INFEASIBLE".into());
                EXIT_FAIL
            }
        },
        Command::VerifyTrace {
            trace,
            weights,
            orientation,
        } => {
            let w = load_weights(&weights)?;
            let t = DecisionTrace::from_jsonl(&read(&trace)?, w.len()).map_err(in_file(&trace))?;
            let s = dyadic_shadow(w.len(), orientation.into()).map_err(lib_error)?;
            let report = verify_policy(&t, &w, &s).map_err(in_file(&trace))?;
            for c in &report.checks {
                let verdict = if c.consistent { "PASS" } else { "FAIL" };
                let kind = if c.tie { "tie" } else { "strict" };
                lines.push(format!("step {}: {verdict} ({kind})", c.step));
            }
            lines.push(report.verdict.to_string());
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_FAIL
            }
        }
        Command::Partition {
            weights,
            orientation,
            brute_force,
            emit_trace,
        } => {
            let w = load_weights(&weights)?;
            if brute_force && w.len() > MAX_BRUTE_FORCE_ITEMS {
                return Err(Abort::usage(format!(
                    "--brute-force supports at most {MAX_BRUTE_FORCE_ITEMS} weights, got {}",
                    w.len()
                )));
            }
            let s = dyadic_shadow(w.len(), orientation.into()).map_err(lib_error)?;
            let (assignment, trace) = greedy_partition(&w, &s).map_err(in_file(&weights))?;
            if let Some(path) = emit_trace {
                write(&path, &trace.to_jsonl())?;
            }
            lines.push(format!("assignment = {assignment}"));
            lines.push(format!(
                "value = {}",
                partition_value(&assignment, &w).map_err(lib_error)?
            ));
            if brute_force {
                lines.push(format!(
                    "optimum = {}",
                    brute_force_partition(&w).map_err(lib_error)?
                ));
            }
            EXIT_OK
        }
        Command::Fuzz {
            config,
            out: report_path,
        } => {
            let cfg = CampaignConfig::parse(&read(&config)?).map_err(in_file(&config))?;
            let report = run_campaign(&cfg).map_err(lib_error)?;
            write(&report_path, &report.to_text())?;
            lines.extend(report.summary().lines().map(str::to_string));
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_FAIL
            }
        }
    };
    for line in lines {
        writeln!(out, "{line}").map_err(|e| Abort::usage(e.to_string()))?;
    }
    Ok(code)
}

/// Runs one invocation; `args` includes the program name.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run(cli, out) {
        Ok(code) => code,
        Err(abort) => {
            let _ = writeln!(err, "error: {}", abort.message);
            abort.code
        }
    }
}
