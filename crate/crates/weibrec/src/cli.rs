//! `weibrec` command-line interface.
//!
//! Exit codes: 0 success, 2 bad data or arguments, 3 numerical failure
//! (for example a root bracket that cannot be found), 1 output I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use weibrec_core::weibull::mle_beta;
use weibrec_core::{
    gci_percentile, gpv_one_sided, gpv_two_sided, mle_records, pooled_mle, run_cell,
    table1_grid, PivotalKind, PivotalSampler, SimConfig, SimReport,
};

use crate::io::{self, DataError, DataKind, LabelledRecords};
use crate::report::{self, cell, sig6, Report};

#[derive(Debug, Parser)]
#[command(
    name = "weibrec",
    version,
    about = "Generalized inference on the shape parameters of two Weibull populations from upper record values"
)]
pub struct Cli {
    /// Worker threads for Monte Carlo loops; results do not depend on it.
    #[arg(long, global = true, env = "WEIBREC_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract upper records from raw observation sequences.
    Extract(BasicArgs),
    /// Separate maximum likelihood fit per population.
    Mle(BasicArgs),
    /// Equal-shape maximum likelihood fit of two populations.
    PooledMle(BasicArgs),
    /// Generalized confidence interval for beta1 / beta2.
    CiRatio(CiArgs),
    /// Generalized confidence interval for beta1 - beta2.
    CiDiff(CiArgs),
    /// Generalized p-value for the shape ratio (or difference).
    Test(TestArgs),
    /// Coverage and expected length of the ratio interval by simulation.
    Simulate(SimArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// File of raw observation sequences (CSV or .json); records are extracted.
    #[arg(long, conflicts_with = "records", required_unless_present = "records")]
    pub data: Option<PathBuf>,
    /// File of already-extracted upper records (CSV or .json).
    #[arg(long)]
    pub records: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format [default: json; text for extract].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BasicArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Monte Carlo draws M.
    #[arg(long = "M", default_value_t = 10_000)]
    pub draws: usize,
    /// Master seed; drawn from entropy and printed when absent.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CiArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Miscoverage; the interval has level 1 - gamma.
    #[arg(long, default_value_t = 0.05)]
    pub gamma: f64,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sided {
    /// H0: pi <= pi0 against H1: pi > pi0
    One,
    /// H0: pi = pi0 against H1: pi != pi0
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimandArg {
    Ratio,
    Diff,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Hypothesized ratio (or difference with --estimand diff).
    #[arg(long)]
    pub pi0: f64,
    #[arg(long, value_enum, default_value_t = Sided::Two)]
    pub sided: Sided,
    #[arg(long, value_enum, default_value_t = EstimandArg::Ratio)]
    pub estimand: EstimandArg,
    /// Significance level used for the stated conclusion.
    #[arg(long, default_value_t = 0.05)]
    pub gamma: f64,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Grid {
    /// The 63-cell standard grid.
    Table1,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// One cell as n1,n2,beta1,beta2 (repeatable).
    #[arg(long = "cell", value_parser = parse_cell)]
    pub cells: Vec<(usize, usize, f64, f64)>,
    /// JSON file with a list of cell configs; missing fields come from the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named grid; the default when no --cell or --config is given.
    #[arg(long, value_enum)]
    pub grid: Option<Grid>,
    /// Outer replications N.
    #[arg(long = "N", default_value_t = weibrec_core::sim::DESK_REPLICATIONS)]
    pub replications: usize,
    /// Inner pivotal draws M.
    #[arg(long = "M", default_value_t = weibrec_core::sim::DESK_DRAWS)]
    pub draws: usize,
    #[arg(long, default_value_t = 0.05)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha2: f64,
    /// Master seed for every cell; drawn from entropy and printed when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print the standard grid table to stdout (the report goes to --out).
    #[arg(long)]
    pub table: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_cell(s: &str) -> Result<(usize, usize, f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err("expected n1,n2,beta1,beta2".into());
    }
    let n = |p: &str| p.parse::<usize>().map_err(|e| format!("'{p}': {e}"));
    let b = |p: &str| p.parse::<f64>().map_err(|e| format!("'{p}': {e}"));
    Ok((n(parts[0])?, n(parts[1])?, b(parts[2])?, b(parts[3])?))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] weibrec_core::Error),
    #[error("writing {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Data(_) | CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::Write { .. } => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Runs a parsed command; returns the exit code on success paths that still
/// need a nonzero status (failed simulation cells).
pub fn run(cli: &Cli) -> CliResult<u8> {
    match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| dispatch(&cli.command)),
        None => dispatch(&cli.command),
    }
}

fn dispatch(command: &Command) -> CliResult<u8> {
    match command {
        Command::Extract(a) => cmd_extract(a),
        Command::Mle(a) => cmd_mle(a),
        Command::PooledMle(a) => cmd_pooled(a),
        Command::CiRatio(a) => cmd_ci(a, PivotalKind::Ratio),
        Command::CiDiff(a) => cmd_ci(a, PivotalKind::Difference),
        Command::Test(a) => cmd_test(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
    .map(|code| code.unwrap_or(0))
}

struct Loaded {
    kind: DataKind,
    source: String,
    records: Vec<LabelledRecords>,
}

impl Loaded {
    fn request(&self) -> Value {
        json!({
            "data_kind": self.kind,
            "source": self.source,
            "digest": report::digest(&self.records),
            "populations": report::echo(&self.records),
        })
    }

    fn pair(&self) -> CliResult<(&LabelledRecords, &LabelledRecords)> {
        match self.records.as_slice() {
            [a, b] => Ok((a, b)),
            other => Err(CliError::Usage(format!(
                "this command needs exactly two populations, found {}",
                other.len()
            ))),
        }
    }
}

fn load(input: &InputArgs) -> CliResult<Loaded> {
    let (path, kind) = match (&input.data, &input.records) {
        (Some(p), _) => (p, DataKind::RawSequences),
        (None, Some(p)) => (p, DataKind::Records),
        (None, None) => return Err(CliError::Usage("one of --data or --records is required".into())),
    };
    let dataset = io::load(path, kind)?;
    Ok(Loaded {
        kind,
        source: dataset.source.clone(),
        records: dataset.records(kind)?,
    })
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

fn emit(output: &OutputArgs, text: &str) -> CliResult<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Write {
            path: path.display().to_string(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// CSV with a header from the keys of the first row.
fn rows_csv(rows: &[Value]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(Value::Object(first)) = rows.first() {
        w.write_record(first.keys()).expect("in-memory write");
        for r in rows {
            if let Value::Object(m) = r {
                w.write_record(m.values().map(cell)).expect("in-memory write");
            }
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 csv")
}

fn cmd_extract(a: &BasicArgs) -> CliResult<Option<u8>> {
    let loaded = load(&a.input)?;
    let text = match a.output.format.unwrap_or(Format::Text) {
        Format::Text => loaded
            .records
            .iter()
            .map(|r| {
                let vals: Vec<String> = r.series.values().iter().map(|v| sig6(*v)).collect();
                format!("{}: {}\n", r.label, vals.join(", "))
            })
            .collect(),
        Format::Csv => io::records_to_csv(&loaded.records),
        Format::Json => Report::new(
            "extract",
            loaded.request(),
            json!({ "populations": report::echo(&loaded.records) }),
        )
        .to_json(),
    };
    emit(&a.output, &text)?;
    Ok(None)
}

fn cmd_mle(a: &BasicArgs) -> CliResult<Option<u8>> {
    let loaded = load(&a.input)?;
    let fits: Vec<Value> = loaded
        .records
        .iter()
        .map(|r| {
            let f = mle_records(&r.series)?;
            Ok(json!({
                "label": r.label,
                "n": r.series.n(),
                "alpha": f.params.alpha,
                "beta": f.params.beta,
                "se_alpha": f.se_alpha,
                "se_beta": f.se_beta,
                "loglik": f.loglik,
                "model": f.model,
            }))
        })
        .collect::<CliResult<_>>()?;
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => Report::new("mle", loaded.request(), json!({ "fits": fits })).to_json(),
        Format::Csv => rows_csv(&fits),
        Format::Text => fits
            .iter()
            .map(|f| {
                let g = |k: &str| sig6(f[k].as_f64().unwrap_or(f64::NAN));
                format!(
                    "{}: alpha = {} (se {}), beta = {} (se {}), loglik = {}\n",
                    cell(&f["label"]),
                    g("alpha"),
                    g("se_alpha"),
                    g("beta"),
                    g("se_beta"),
                    g("loglik")
                )
            })
            .collect(),
    };
    emit(&a.output, &text)?;
    Ok(None)
}

fn cmd_pooled(a: &BasicArgs) -> CliResult<Option<u8>> {
    let loaded = load(&a.input)?;
    let (r1, r2) = loaded.pair()?;
    let p = pooled_mle(&r1.series, &r2.series)?;
    let fit = json!({
        "labels": [r1.label, r2.label],
        "beta": p.beta,
        "alpha1": p.alpha1,
        "alpha2": p.alpha2,
        "se_beta": p.se_beta,
        "se_alpha1": p.se_alpha1,
        "se_alpha2": p.se_alpha2,
        "loglik": p.loglik,
    });
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => Report::new("pooled-mle", loaded.request(), json!({ "pooled": fit })).to_json(),
        Format::Csv => {
            let mut row = fit.clone();
            row["labels"] = json!(format!("{}|{}", r1.label, r2.label));
            rows_csv(&[row])
        }
        Format::Text => format!(
            "common beta = {} (se {})\n{}: alpha = {} (se {})\n{}: alpha = {} (se {})\nloglik = {}\n",
            sig6(p.beta),
            sig6(p.se_beta),
            r1.label,
            sig6(p.alpha1),
            sig6(p.se_alpha1),
            r2.label,
            sig6(p.alpha2),
            sig6(p.se_alpha2),
            sig6(p.loglik)
        ),
    };
    emit(&a.output, &text)?;
    Ok(None)
}

fn estimand_name(kind: PivotalKind) -> &'static str {
    match kind {
        PivotalKind::Ratio => "beta1/beta2",
        _ => "beta1-beta2",
    }
}

fn point_estimate(r1: &LabelledRecords, r2: &LabelledRecords, kind: PivotalKind) -> CliResult<f64> {
    let b1 = mle_beta(&r1.series)?;
    let b2 = mle_beta(&r2.series)?;
    Ok(match kind {
        PivotalKind::Ratio => b1 / b2,
        _ => b1 - b2,
    })
}

fn cmd_ci(a: &CiArgs, kind: PivotalKind) -> CliResult<Option<u8>> {
    let loaded = load(&a.input)?;
    let (r1, r2) = loaded.pair()?;
    let seed = resolve_seed(a.mc.seed);
    let draws = PivotalSampler::new(kind, a.mc.draws, seed).run(&r1.series, &r2.series)?;
    let ci = gci_percentile(&draws, a.gamma)?;
    let estimate = point_estimate(r1, r2, kind)?;
    let command = if kind == PivotalKind::Ratio { "ci-ratio" } else { "ci-diff" };
    let mut request = loaded.request();
    request["gamma"] = json!(a.gamma);
    request["draws"] = json!(a.mc.draws);
    request["seed"] = json!(seed);
    let result = json!({
        "estimand": estimand_name(kind),
        "point_estimate": estimate,
        "pivot_median": draws.median(),
        "interval": ci,
    });
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => Report::new(command, request, result).to_json(),
        Format::Csv => rows_csv(&[json!({
            "estimand": estimand_name(kind),
            "point_estimate": estimate,
            "lower": ci.lower,
            "upper": ci.upper,
            "level": ci.level,
            "draws": ci.draws,
            "seed": seed,
        })]),
        Format::Text => format!(
            "{}: estimate {}, {}% generalized CI ({}, {}) from M = {} draws, seed {}\n",
            estimand_name(kind),
            sig6(estimate),
            sig6(100.0 * ci.level),
            sig6(ci.lower),
            sig6(ci.upper),
            ci.draws,
            seed
        ),
    };
    emit(&a.output, &text)?;
    Ok(None)
}

fn cmd_test(a: &TestArgs) -> CliResult<Option<u8>> {
    if !(a.gamma > 0.0 && a.gamma < 1.0) {
        return Err(CliError::Usage(format!("--gamma {} must lie in (0, 1)", a.gamma)));
    }
    if !a.pi0.is_finite() {
        return Err(CliError::Usage("--pi0 must be finite".into()));
    }
    let loaded = load(&a.input)?;
    let (r1, r2) = loaded.pair()?;
    let kind = match a.estimand {
        EstimandArg::Ratio => PivotalKind::Ratio,
        EstimandArg::Diff => PivotalKind::Difference,
    };
    let seed = resolve_seed(a.mc.seed);
    let draws = PivotalSampler::new(kind, a.mc.draws, seed).run(&r1.series, &r2.series)?;
    let test = match a.sided {
        Sided::One => gpv_one_sided(&draws, a.pi0),
        Sided::Two => gpv_two_sided(&draws, a.pi0),
    };
    let reject = test.p_value < a.gamma;
    let conclusion = format!(
        "{} at {}",
        if reject { "reject" } else { "fail to reject" },
        a.gamma
    );
    let mut request = loaded.request();
    request["pi0"] = json!(a.pi0);
    request["gamma"] = json!(a.gamma);
    request["draws"] = json!(a.mc.draws);
    request["seed"] = json!(seed);
    let result = json!({
        "estimand": estimand_name(kind),
        "test": test,
        "reject": reject,
        "conclusion": conclusion,
    });
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => Report::new("test", request, result).to_json(),
        Format::Csv => rows_csv(&[json!({
            "estimand": estimand_name(kind),
            "pi0": a.pi0,
            "sidedness": test.sidedness,
            "p_value": test.p_value,
            "draws": test.draws,
            "seed": seed,
            "conclusion": conclusion,
        })]),
        Format::Text => format!(
            "{} = {} ({}): generalized p-value {} from M = {} draws, seed {}; {}\n",
            estimand_name(kind),
            sig6(a.pi0),
            match a.sided {
                Sided::One => "one-sided, H1: greater",
                Sided::Two => "two-sided",
            },
            sig6(test.p_value),
            test.draws,
            seed,
            conclusion
        ),
    };
    emit(&a.output, &text)?;
    Ok(None)
}

fn load_sim_configs(path: &Path, base: &SimConfig) -> CliResult<Vec<SimConfig>> {
    let source = path.display().to_string();
    let fmt_err = |message: String| {
        CliError::Data(DataError::Format {
            path: source.clone(),
            message,
        })
    };
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Data(DataError::Io {
            path: source.clone(),
            source: e,
        })
    })?;
    let root: Value = serde_json::from_str(&text).map_err(|e| fmt_err(e.to_string()))?;
    let items = match root {
        Value::Array(items) => items,
        Value::Object(mut m) => match m.remove("cells") {
            Some(Value::Array(items)) => items,
            _ => return Err(fmt_err("expected a list of cells or {\"cells\": [...]}".into())),
        },
        _ => return Err(fmt_err("expected a list of cells".into())),
    };
    let base_value = serde_json::to_value(base).expect("config serializes");
    items
        .into_iter()
        .enumerate()
        .map(|(i, item)| {
            let Value::Object(fields) = item else {
                return Err(fmt_err(format!("cell {i} is not an object")));
            };
            let mut merged = base_value.clone();
            for (k, v) in fields {
                if merged.get(&k).is_none() {
                    return Err(fmt_err(format!("cell {i}: unknown field '{k}'")));
                }
                merged[k] = v;
            }
            serde_json::from_value(merged).map_err(|e| fmt_err(format!("cell {i}: {e}")))
        })
        .collect()
}

fn cmd_simulate(a: &SimArgs) -> CliResult<Option<u8>> {
    let seed = resolve_seed(a.seed);
    let base = SimConfig {
        draws: a.draws,
        replications: a.replications,
        gamma: a.gamma,
        alpha1: a.alpha1,
        alpha2: a.alpha2,
        seed,
        ..SimConfig::default()
    };
    let mut grid: Vec<SimConfig> = a
        .cells
        .iter()
        .map(|&(n1, n2, beta1, beta2)| SimConfig {
            n1,
            n2,
            beta1,
            beta2,
            ..base
        })
        .collect();
    if let Some(path) = &a.config {
        grid.extend(load_sim_configs(path, &base)?);
    }
    if a.grid == Some(Grid::Table1) || grid.is_empty() {
        grid.extend(table1_grid(&base));
    }
    let total = grid.len();
    let outcomes: Vec<(SimConfig, Result<SimReport, String>)> = grid
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let r = run_cell(&c).map_err(|e| e.to_string());
            eprintln!("cell {}/{} (n1={}, n2={}, beta1={}, beta2={}) done", i + 1, total, c.n1, c.n2, c.beta1, c.beta2);
            (c, r)
        })
        .collect();
    let failed = outcomes.iter().filter(|(_, r)| r.is_err()).count();
    let cells: Vec<Value> = outcomes
        .iter()
        .map(|(c, r)| match r {
            Ok(rep) => json!({ "config": c, "report": rep }),
            Err(e) => json!({ "config": c, "error": e }),
        })
        .collect();
    let request = json!({
        "seed": seed,
        "draws": a.draws,
        "replications": a.replications,
        "gamma": a.gamma,
        "cells": total,
    });
    let format = a.output.format.unwrap_or(Format::Json);
    let body = match format {
        Format::Json => Report::new("simulate", request, json!({ "cells": cells })).to_json(),
        Format::Csv => report::sim_csv(&outcomes),
        Format::Text => outcomes
            .iter()
            .map(|(c, r)| match r {
                Ok(r) => format!(
                    "n1={} n2={} beta1={} beta2={}: coverage {} (se {}), expected length {}\n",
                    c.n1,
                    c.n2,
                    sig6(c.beta1),
                    sig6(c.beta2),
                    sig6(r.coverage),
                    sig6(r.mc_se_coverage),
                    sig6(r.expected_length)
                ),
                Err(e) => format!("n1={} n2={} beta1={} beta2={}: error: {e}\n", c.n1, c.n2, c.beta1, c.beta2),
            })
            .collect(),
    };
    if a.table {
        if a.output.out.is_some() {
            emit(&a.output, &body)?;
        }
        print!("{}", report::table1_text(&outcomes));
    } else {
        emit(&a.output, &body)?;
    }
    for (c, r) in &outcomes {
        if let Err(e) = r {
            eprintln!("error: cell n1={} n2={} beta1={} beta2={}: {e}", c.n1, c.n2, c.beta1, c.beta2);
        }
    }
    Ok(Some(if failed > 0 { 3 } else { 0 }))
}
