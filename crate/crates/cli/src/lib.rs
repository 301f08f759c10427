//! The `mrsc` command-line tool.
//!
//! Inputs are either a bundled example id (`double_append`, `kmp`,
//! `eqbool_sym`, `exp_growth`) or a path to a program file whose optional
//! `expression:` line gives the configuration to supercompile.

use std::io::{self, Write};
use std::path::Path;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use mrsc::check::{check_equivalence, CheckConfig};
use mrsc::graphs::{count_graphs, gset2graphs, ConfGraph};
use mrsc::interp::eval_with_stats;
use mrsc::lang::{parse_expression, parse_source, substitute, Expr, ParseError, Program, Subst};
use mrsc::mrsc::Supercompiler;
use mrsc::queries::{first_graph, last_graph, max_size_graph, min_size_graph, size_summary};
use mrsc::residual::residualize;
use mrsc::{corpus, EvalError, Fuel, GraphSet, MrscError, ResidualError, SizeMode, Value};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "mrsc", version, about = "Multi-result supercompiler")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Size measure used by min/max selectors.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Standard)]
    pub mode: Mode,
    /// Interpreter fuel, in function unfoldings.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub fuel: u64,
    /// Seed for random inputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Abort supercompilation past this configuration depth.
    #[arg(long, global = true)]
    pub max_depth: Option<usize>,
    /// Abort supercompilation after this many configurations.
    #[arg(long, global = true)]
    pub max_steps: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Graph sizes (first, last, min, max in both modes), count and timings.
    Stats {
        /// Example ids or program files; all bundled examples if omitted.
        inputs: Vec<String>,
        /// Expression to supercompile instead of the file's own.
        #[arg(long)]
        expr: Option<String>,
    },
    /// Print the residual program of a selected graph.
    Residualize {
        input: String,
        #[arg(value_enum)]
        selector: Selector,
        #[arg(long)]
        expr: Option<String>,
    },
    /// Compare residual programs with the source on random inputs.
    Check {
        input: String,
        /// Graph to residualize; all four if omitted.
        #[arg(long, value_enum)]
        selector: Option<Selector>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Maximum number of constructors in each random input.
        #[arg(long, default_value_t = 8)]
        size_bound: usize,
        /// Check this program file (with its `expression:`) instead of a
        /// residual.
        #[arg(long)]
        residual: Option<String>,
        #[arg(long)]
        expr: Option<String>,
    },
    /// Print configuration graphs in order, with their sizes.
    Enumerate {
        input: String,
        #[arg(long, default_value_t = 10)]
        limit: usize,
        /// Print the first `limit` graphs even when there are more.
        #[arg(long)]
        force: bool,
        #[arg(long)]
        expr: Option<String>,
    },
    /// Evaluate an expression with the reference interpreter.
    Eval {
        input: String,
        #[arg(long)]
        expr: Option<String>,
        /// Instantiate a free variable, e.g. `--bind xs=Cons(A,Nil)`.
        #[arg(long = "bind", value_name = "VAR=VALUE")]
        bindings: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Standard,
    SkipUnfold,
}

impl From<Mode> for SizeMode {
    fn from(m: Mode) -> SizeMode {
        match m {
            Mode::Standard => SizeMode::Standard,
            Mode::SkipUnfold => SizeMode::SkipUnfold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Selector {
    First,
    Last,
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Read { path: String, source: io::Error },
    #[error("{what}: {source}")]
    Parse { what: String, source: ParseError },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Supercompile(#[from] MrscError),
    #[error(transparent)]
    Residual(#[from] ResidualError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Output(#[from] io::Error),
}

impl CliError {
    /// 1 for bad input, 3 when a resource cap was hit.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Supercompile(MrscError::DepthCap(_) | MrscError::StepBudget(_))
            | CliError::Eval(EvalError::Timeout(_)) => 3,
            _ => 1,
        }
    }
}

/// A program with the expression to work on.
struct Task {
    label: String,
    program: Program,
    root: Expr,
}

fn load(input: &str, expr: Option<&str>) -> Result<Task, CliError> {
    let (label, text) = match corpus::Example::by_id(input) {
        Some(ex) => (ex.id.to_string(), ex.source.to_string()),
        None => {
            let text = std::fs::read_to_string(input).map_err(|source| CliError::Read {
                path: input.to_string(),
                source,
            })?;
            let stem = Path::new(input)
                .file_stem()
                .map_or(input.to_string(), |s| s.to_string_lossy().into_owned());
            (stem, text)
        }
    };
    let src = parse_source(&text).map_err(|source| CliError::Parse {
        what: input.to_string(),
        source,
    })?;
    let root = match expr {
        Some(e) => parse_expression(e).map_err(|source| CliError::Parse {
            what: "--expr".to_string(),
            source,
        })?,
        None => src
            .expression
            .ok_or_else(|| CliError::Input(format!("{input} has no `expression:` line; pass --expr")))?,
    };
    src.program
        .check_expr(&root)
        .map_err(|e| CliError::Input(format!("{input}: {e}")))?;
    Ok(Task {
        label,
        program: src.program,
        root,
    })
}

fn build(cli: &Cli, task: &Task) -> Result<GraphSet, CliError> {
    Ok(Supercompiler::new(&task.program, &task.root)
        .max_depth(cli.max_depth)
        .step_budget(cli.max_steps)
        .run(&task.root)?)
}

fn select(gs: &GraphSet, selector: Selector, mode: SizeMode) -> Option<ConfGraph> {
    match selector {
        Selector::First => first_graph(gs),
        Selector::Last => last_graph(gs),
        Selector::Min => min_size_graph(gs, mode).map(|r| r.graph),
        Selector::Max => max_size_graph(gs, mode).map(|r| r.graph),
    }
}

fn selector_name(s: Selector) -> &'static str {
    match s {
        Selector::First => "first",
        Selector::Last => "last",
        Selector::Min => "min",
        Selector::Max => "max",
    }
}

/// Runs one command, returning the process exit code for non-error outcomes
/// (0, or 2 when a property check failed).
pub fn run(cli: &Cli, out: &mut impl Write) -> Result<u8, CliError> {
    match &cli.command {
        Command::Stats { inputs, expr } => stats(cli, inputs, expr.as_deref(), out),
        Command::Residualize { input, selector, expr } => {
            let task = load(input, expr.as_deref())?;
            let gs = build(cli, &task)?;
            let g = select(&gs, *selector, cli.mode.into())
                .ok_or_else(|| CliError::Input(format!("{}: no configuration graphs", task.label)))?;
            writeln!(out, "{}", residualize(&g, &task.root)?)?;
            Ok(0)
        }
        Command::Check {
            input,
            selector,
            trials,
            size_bound,
            residual,
            expr,
        } => {
            let cfg = CheckConfig {
                trials: *trials,
                size_bound: *size_bound,
                fuel: Fuel::new(cli.fuel),
                seed: cli.seed,
            };
            check(cli, input, *selector, residual.as_deref(), expr.as_deref(), &cfg, out)
        }
        Command::Enumerate {
            input,
            limit,
            force,
            expr,
        } => enumerate(cli, input, *limit, *force, expr.as_deref(), out),
        Command::Eval { input, expr, bindings } => {
            let task = load(input, expr.as_deref())?;
            let mut s = Subst::new();
            for b in bindings {
                let (var, value) = b
                    .split_once('=')
                    .ok_or_else(|| CliError::Input(format!("--bind expects VAR=VALUE, got `{b}`")))?;
                let e = parse_expression(value).map_err(|source| CliError::Parse {
                    what: format!("--bind {var}"),
                    source,
                })?;
                let v = Value::from_expr(&e)
                    .ok_or_else(|| CliError::Input(format!("--bind {var}: `{value}` is not a constructor value")))?;
                s.insert(var.trim().to_string(), v.to_expr());
            }
            let r = eval_with_stats(&task.program, &substitute(&task.root, &s), Fuel::new(cli.fuel))?;
            match cli.format {
                Format::Text => writeln!(out, "{}\nunfoldings: {}", r.value, r.unfolds)?,
                Format::Csv => writeln!(out, "value,unfolds\n\"{}\",{}", r.value, r.unfolds)?,
            }
            Ok(0)
        }
    }
}

fn stats(cli: &Cli, inputs: &[String], expr: Option<&str>, out: &mut impl Write) -> Result<u8, CliError> {
    let inputs: Vec<String> = if inputs.is_empty() {
        corpus::ALL.iter().map(|e| e.id.to_string()).collect()
    } else {
        inputs.to_vec()
    };
    let header = [
        "example",
        "first",
        "last",
        "min",
        "max",
        "min_skip_unfold",
        "max_skip_unfold",
        "count",
        "build_ms",
        "query_ms",
    ];
    match cli.format {
        Format::Csv => writeln!(out, "{}", header.join(","))?,
        Format::Text => writeln!(
            out,
            "{:<16} {:>6} {:>6} {:>6} {:>6} {:>9} {:>9} {:>20} {:>9} {:>9}",
            "example", "first", "last", "min", "max", "min_skip", "max_skip", "count", "build_ms", "query_ms"
        )?,
    }
    for input in &inputs {
        let task = load(input, expr)?;
        let t = Instant::now();
        let gs = build(cli, &task)?;
        let build_ms = t.elapsed().as_millis();
        let t = Instant::now();
        let standard = size_summary(&gs, SizeMode::Standard);
        let skip = size_summary(&gs, SizeMode::SkipUnfold);
        let count = count_graphs(&gs);
        let query_ms = t.elapsed().as_millis();
        let cells: Vec<String> = match (standard, skip) {
            (Some(s), Some(k)) => [s.first, s.last, s.min, s.max, k.min, k.max].iter().map(|n| n.to_string()).collect(),
            _ => vec!["-".to_string(); 6],
        };
        match cli.format {
            Format::Csv => writeln!(out, "{},{},{count},{build_ms},{query_ms}", task.label, cells.join(","))?,
            Format::Text => writeln!(
                out,
                "{:<16} {:>6} {:>6} {:>6} {:>6} {:>9} {:>9} {:>20} {:>9} {:>9}",
                task.label, cells[0], cells[1], cells[2], cells[3], cells[4], cells[5], count, build_ms, query_ms
            )?,
        }
    }
    Ok(0)
}

fn check(
    cli: &Cli,
    input: &str,
    selector: Option<Selector>,
    residual: Option<&str>,
    expr: Option<&str>,
    cfg: &CheckConfig,
    out: &mut impl Write,
) -> Result<u8, CliError> {
    let task = load(input, expr)?;
    let mut candidates: Vec<(String, Program, Expr)> = Vec::new();
    if let Some(path) = residual {
        let r = load(path, None)?;
        candidates.push((format!("{} (from {path})", r.label), r.program, r.root));
    } else {
        let gs = build(cli, &task)?;
        let selectors = match selector {
            Some(s) => vec![s],
            None => vec![Selector::First, Selector::Last, Selector::Min, Selector::Max],
        };
        for s in selectors {
            let Some(g) = select(&gs, s, cli.mode.into()) else {
                writeln!(out, "{}: no configuration graphs", task.label)?;
                return Ok(0);
            };
            let r = residualize(&g, &task.root)?;
            let program = r.program().map_err(ResidualError::Invalid)?;
            candidates.push((selector_name(s).to_string(), program, r.root));
        }
    }
    if cfg.trials == 0 {
        writeln!(out, "warning: 0 trials, the check is vacuous")?;
    }
    let mut failed = false;
    for (label, program, root) in &candidates {
        let report = check_equivalence(&task.program, &task.root, program, root, cfg);
        failed |= !report.passed();
        writeln!(out, "{} {label}: {report}", task.label)?;
    }
    Ok(if failed { 2 } else { 0 })
}

fn enumerate(
    cli: &Cli,
    input: &str,
    limit: usize,
    force: bool,
    expr: Option<&str>,
    out: &mut impl Write,
) -> Result<u8, CliError> {
    let task = load(input, expr)?;
    let gs = build(cli, &task)?;
    let count = count_graphs(&gs);
    let csv = cli.format == Format::Csv;
    if csv {
        writeln!(out, "index,size,size_skip_unfold")?;
    } else {
        writeln!(out, "# {}: {count} configuration graphs", task.label)?;
    }
    if count > num_bigint::BigUint::from(limit) && !force {
        if !csv {
            writeln!(out, "# more than --limit {limit}; pass --force to print the first {limit}")?;
        }
        return Ok(0);
    }
    for (i, g) in gset2graphs(&gs).take(limit).enumerate() {
        let (standard, skip) = (g.size(SizeMode::Standard), g.size(SizeMode::SkipUnfold));
        if csv {
            writeln!(out, "{i},{standard},{skip}")?;
        } else {
            writeln!(out, "== graph {i}: size {standard} (skip-unfold {skip})\n{g}")?;
        }
    }
    Ok(0)
}
