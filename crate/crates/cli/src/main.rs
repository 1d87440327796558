//! `ck`: evaluate, tabulate and validate heat and Poisson kernels.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use ck_core::analysis::{Flag, ValidationReport};
use ck_core::suites::{self, Axis, Suite, SuiteOptions, TolProfile};
use ck_core::{
    evaluate, Convention, Error, EvalOptions, Execution, KernelKind, KernelQuery, Representation, Space, Warning,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_CONVERGENCE: u8 = 4;

#[derive(Parser)]
#[command(name = "ck", version, about = "Heat and Poisson kernels on constant-curvature spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate kernels at the given points (each of --t/--y/--r may be a grid).
    Eval(EvalArgs),
    /// Tabulate kernels over a grid.
    Table(TableArgs),
    /// Run validation suites, or re-check a saved JSON table.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, value_parser = parse_space)]
    space: Space,
    #[arg(long)]
    dim: u32,
    #[arg(long, value_parser = parse_kind)]
    kind: KernelKind,
    /// Representations, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "auto", value_parser = parse_rep)]
    rep: Vec<Representation>,
    #[arg(long, default_value = "paper", value_parser = parse_convention)]
    convention: Convention,
    /// Relative tolerance.
    #[arg(long, env = "CK_DEFAULT_TOL")]
    tol: Option<f64>,
    /// Abscissa of the Bromwich line for contour representations.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Evaluate cells one at a time.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    y: Option<String>,
    #[arg(long, default_value = "0")]
    r: String,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    /// start:stop:count, geometric unless suffixed `l`.
    #[arg(long)]
    t_grid: Option<String>,
    #[arg(long)]
    y_grid: Option<String>,
    /// start:stop:count, linear unless suffixed `g`.
    #[arg(long)]
    r_grid: String,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value = "all", value_parser = parse_suite)]
    suite: Suite,
    /// Restrict to one space.
    #[arg(long, value_parser = parse_space)]
    space: Option<Space>,
    /// Restrict to these dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    dim: Vec<u32>,
    #[arg(long, default_value = "default", value_parser = parse_profile)]
    tol_profile: TolProfile,
    /// Re-evaluate every record of a JSON table written by `table`/`eval`.
    #[arg(long, conflicts_with_all = ["suite", "space", "dim"])]
    from_file: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

fn parse_space(s: &str) -> Result<Space, String> {
    s.parse().map_err(|e: Error| e.to_string())
}
fn parse_kind(s: &str) -> Result<KernelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}
fn parse_rep(s: &str) -> Result<Representation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}
fn parse_convention(s: &str) -> Result<Convention, String> {
    s.parse().map_err(|e: Error| e.to_string())
}
fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}
fn parse_profile(s: &str) -> Result<TolProfile, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// One evaluated kernel value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct OutputRecord {
    space: Space,
    dim: u32,
    kind: KernelKind,
    param: f64,
    r: f64,
    rep: Representation,
    value: f64,
    err: f64,
    n_evals: usize,
    convention: Convention,
    #[serde(default)]
    warnings: Vec<Warning>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    version: String,
    convention: Convention,
    tol: f64,
    sigma: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Table {
    meta: Meta,
    records: Vec<OutputRecord>,
}

/// A usage problem detected after clap has parsed the flags.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn exit_code_for(e: &Error) -> u8 {
    if e.is_convergence() || matches!(e, Error::Contour(_)) {
        EXIT_CONVERGENCE
    } else {
        EXIT_DOMAIN
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn open_output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn param_flag(kind: KernelKind, t: Option<String>, y: Option<String>, name: &str) -> anyhow::Result<String> {
    match (kind, t, y) {
        (KernelKind::Heat, Some(t), None) => Ok(t),
        (KernelKind::Poisson, None, Some(y)) => Ok(y),
        (KernelKind::Heat, _, _) => Err(usage(format!("the heat kernel takes --{name}t and not --{name}y"))),
        (KernelKind::Poisson, _, _) => Err(usage(format!("the Poisson kernel takes --{name}y and not --{name}t"))),
    }
}

fn run_kernels(k: KernelArgs, params: Axis, rs: Axis) -> anyhow::Result<u8> {
    let tol = k.tol.unwrap_or(ck_core::DEFAULT_TOL);
    if k.dim == 0 {
        return Err(usage("--dim must be at least 1"));
    }
    let opts = EvalOptions { tol, sigma: k.sigma, convention: k.convention };
    let mut jobs = vec![];
    for &rep in &k.rep {
        for (p, r) in suites::cells(&params, &rs) {
            jobs.push((rep, KernelQuery { space: k.space, n: k.dim, kind: k.kind, param: p, r }));
        }
    }
    let results = execution(k.sequential).map(&jobs, |(rep, q)| evaluate(q, *rep, &opts));
    let mut code = 0;
    let mut records = vec![];
    for ((rep, q), res) in jobs.iter().zip(results) {
        match res {
            Ok(e) => {
                for w in &e.warnings {
                    eprintln!("warning: {rep} at {}={}, r={}: {w}", q.kind.param_name(), q.param, q.r);
                }
                records.push(OutputRecord {
                    space: q.space,
                    dim: q.n,
                    kind: q.kind,
                    param: q.param,
                    r: q.r,
                    rep: *rep,
                    value: e.value,
                    err: e.err_estimate,
                    n_evals: e.n_evals,
                    convention: k.convention,
                    warnings: e.warnings,
                });
            }
            Err(e) => {
                eprintln!("error: {rep} at {}={}, r={}: {e}", q.kind.param_name(), q.param, q.r);
                code = code.max(exit_code_for(&e));
            }
        }
    }
    let mut out = open_output(&k.output)?;
    match k.format {
        Format::Csv => write_csv(&mut out, &records)?,
        Format::Json => {
            let table = Table {
                meta: Meta { version: env!("CARGO_PKG_VERSION").into(), convention: k.convention, tol, sigma: k.sigma },
                records,
            };
            serde_json::to_writer_pretty(&mut out, &table)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(code)
}

fn write_csv(out: &mut dyn Write, records: &[OutputRecord]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["space", "dim", "kind", "param", "r", "rep", "value", "err", "convention"])?;
    for rec in records {
        w.write_record([
            rec.space.name().to_string(),
            rec.dim.to_string(),
            rec.kind.name().to_string(),
            format!("{:.16e}", rec.param),
            format!("{:.16e}", rec.r),
            rec.rep.name().to_string(),
            format!("{:.16e}", rec.value),
            format!("{:.16e}", rec.err),
            rec.convention.name().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> anyhow::Result<u8> {
    let p = param_flag(a.kernel.kind, a.t, a.y, "")?;
    let params = Axis::parse(&p, true).map_err(|e| usage(e.to_string()))?;
    let rs = Axis::parse(&a.r, false).map_err(|e| usage(e.to_string()))?;
    run_kernels(a.kernel, params, rs)
}

fn cmd_table(a: TableArgs) -> anyhow::Result<u8> {
    let p = param_flag(a.kernel.kind, a.t_grid, a.y_grid, "")?;
    let params = Axis::parse(&p, true).map_err(|e| usage(e.to_string()))?;
    let rs = Axis::parse(&a.r_grid, false).map_err(|e| usage(e.to_string()))?;
    run_kernels(a.kernel, params, rs)
}

/// Output of `validate`.
#[derive(Serialize)]
struct ValidationOutput {
    passed: bool,
    reports: Vec<ValidationReport>,
}

fn recheck(path: &PathBuf, exec: Execution) -> anyhow::Result<ValidationReport> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let table: Table = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let Some(first) = table.records.first() else {
        bail!(usage(format!("{} has no records", path.display())));
    };
    let mut report = ValidationReport::new(first.space, first.dim, first.kind);
    let opts = EvalOptions { tol: table.meta.tol, sigma: table.meta.sigma, convention: table.meta.convention };
    let fresh = exec.map(&table.records, |rec| {
        let q = KernelQuery { space: rec.space, n: rec.dim, kind: rec.kind, param: rec.param, r: rec.r };
        evaluate(&q, rec.rep, &EvalOptions { convention: rec.convention, ..opts })
    });
    let mut worst: f64 = 0.0;
    for (rec, f) in table.records.iter().zip(fresh) {
        report.grid.push((rec.param, rec.r));
        match f {
            Ok(e) => {
                let d = (e.value - rec.value).abs() / rec.value.abs().max(f64::MIN_POSITIVE);
                worst = worst.max(d);
            }
            Err(e) => report.notes.push(format!("{} at ({}, {}): {e}", rec.rep, rec.param, rec.r)),
        }
    }
    report.flags.push(Flag::below("reproduced", worst, 0.0));
    report.flags.push(Flag::below("errors", report.notes.len() as f64, 0.0));
    Ok(report)
}

fn cmd_validate(a: ValidateArgs) -> anyhow::Result<u8> {
    let exec = execution(a.sequential);
    let reports = match &a.from_file {
        Some(path) => vec![recheck(path, exec)?],
        None => {
            let opts = SuiteOptions { spaces: a.space.into_iter().collect(), dims: a.dim, profile: a.tol_profile, exec };
            suites::run(a.suite, &opts)
        }
    };
    let passed = reports.iter().all(|r| r.passed());
    for r in &reports {
        for f in r.flags.iter().filter(|f| !f.passed) {
            eprintln!("FAIL {} n={} {}: {} = {:e} (threshold {:e})", r.space, r.n, r.kind, f.name, f.value, f.threshold);
        }
    }
    let mut out = open_output(&a.output)?;
    serde_json::to_writer_pretty(&mut out, &ValidationOutput { passed, reports })?;
    writeln!(out)?;
    out.flush()?;
    Ok(if passed { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Table(a) => cmd_table(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<Usage>() { EXIT_USAGE } else { 1 })
        }
    }
}
