// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! `scatterwalk` command-line driver.

mod phase;

use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use scatterwalk::circuit::{probe_state, verify_circuit};
use scatterwalk::classical::{comparison_row, write_comparison_csv, ClassicalSearchSpec, Variant};
use scatterwalk::collapsed::{bipartite_model, complete_model, mpartite_model, verify_collapse, CollapsedModel};
use scatterwalk::graph::{bipartite_graph, complete_graph, mpartite_graph};
use scatterwalk::search::{
    average_vs_phase, collapsed_trace, default_m_max, phase_grid, phase_sweep, probability_trace, CostModel, InitialState,
    SearchOutcome, SweepConfig, SweepMethod, DEFAULT_PHASE_POINTS, DEFAULT_WORK_CAP,
};
use scatterwalk::{Criterion, Family, Graph, StepOperator};
use serde::Serialize;

/// Exit status for a verification that ran but did not pass.
const VERIFICATION_FAILED: u8 = 2;

#[derive(Parser)]
#[command(name = "scatterwalk", version, about = "Scattering quantum walk search experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Probability trace of one search.
    Simulate(SimulateArgs),
    /// P(φ, m) over a phase grid on the complete graph.
    Sweep(SweepArgs),
    /// Classical blind and memory search averages.
    CompareClassical(ClassicalArgs),
    /// Check a collapsed model against full edge-space evolution.
    VerifyCollapse(VerifyCollapseArgs),
    /// Check the oracle circuit against the walk.
    VerifyCircuit(VerifyCircuitArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Complete,
    Bipartite,
    Mpartite,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Full,
    Collapsed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Start {
    Uniform,
    /// Bipartite: edges entering set 1.
    Entering1,
    /// Bipartite: edges entering set 2.
    Entering2,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long, value_enum)]
    family: Option<FamilyKind>,
    /// Vertices (complete) or vertices per set (M-partite).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    /// Number of sets of an M-partite graph.
    #[arg(long = "m-sets")]
    m_sets: Option<usize>,
    /// Special vertices (complete, M-partite).
    #[arg(long, default_value_t = 1)]
    v: usize,
    #[arg(long, default_value_t = 1)]
    v1: usize,
    #[arg(long, default_value_t = 1)]
    v2: usize,
    /// Graph in JSON form instead of a family.
    #[arg(long, conflicts_with = "family")]
    graph_file: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    /// Phase of the special vertices: a number or an expression like pi/2.
    #[arg(long, default_value = "pi", value_parser = phase::parse_phase)]
    phi: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    out: OutputFormat,
    /// Output file; standard output when omitted.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    common: Common,
    /// Largest step count; defaults to four times the predicted peak for
    /// complete graphs and 100 otherwise.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, default_value = "incident", value_parser = parse_criterion)]
    criterion: Criterion,
    #[arg(long, default_value = "walk-only", value_parser = parse_cost)]
    cost_model: CostModel,
    #[arg(long, value_enum, default_value_t = Start::Uniform)]
    start: Start,
    #[arg(long, value_enum, default_value_t = Method::Full)]
    method: Method,
    /// Also write the final edge state as CSV (full method only).
    #[arg(long)]
    state_output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    v: usize,
    #[arg(long, default_value_t = DEFAULT_PHASE_POINTS)]
    phi_points: usize,
    /// Largest step count; defaults to 4·⌈π/(2θ)⌉.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum, default_value_t = Method::Collapsed)]
    method: Method,
    #[arg(long, default_value_t = DEFAULT_WORK_CAP)]
    work_cap: f64,
    #[arg(long, default_value = "incident", value_parser = parse_criterion)]
    criterion: Criterion,
    #[arg(long, default_value = "walk-only", value_parser = parse_cost)]
    cost_model: CostModel,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    out: OutputFormat,
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    /// Also write average steps against phase, with classical references.
    #[arg(long)]
    curve_output: Option<PathBuf>,
}

#[derive(Args)]
struct ClassicalArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    v: usize,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    out: OutputFormat,
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyCollapseArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 50)]
    steps: usize,
    /// Include the model matrix and basis in the JSON report.
    #[arg(long)]
    dump: bool,
}

#[derive(Args)]
struct VerifyCircuitArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 20)]
    steps: usize,
}

fn parse_criterion(s: &str) -> std::result::Result<Criterion, String> {
    s.parse().map_err(|e: scatterwalk::WalkError| e.to_string())
}

fn parse_cost(s: &str) -> std::result::Result<CostModel, String> {
    s.parse().map_err(|e: scatterwalk::WalkError| e.to_string())
}

impl GraphArgs {
    fn family(&self) -> Result<Family> {
        let need = |value: Option<usize>, flag: &str| value.with_context(|| format!("--{flag} is required for this family"));
        Ok(match self.family.context("either --family or --graph-file is required")? {
            FamilyKind::Complete => Family::Complete { n: need(self.n, "n")?, v: self.v },
            FamilyKind::Bipartite => {
                Family::Bipartite { n1: need(self.n1, "n1")?, n2: need(self.n2, "n2")?, v1: self.v1, v2: self.v2 }
            }
            FamilyKind::Mpartite => Family::MPartite { m: need(self.m_sets, "m-sets")?, n: need(self.n, "n")?, v: self.v },
        })
    }

    fn graph(&self) -> Result<Graph> {
        if let Some(path) = &self.graph_file {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return Ok(Graph::from_json(&text)?);
        }
        Ok(build_graph(self.family()?)?)
    }
}

fn build_graph(family: Family) -> scatterwalk::Result<Graph> {
    match family {
        Family::Complete { n, v } => complete_graph(n, v),
        Family::Bipartite { n1, n2, v1, v2 } => bipartite_graph(n1, n2, v1, v2),
        Family::MPartite { m, n, v } => mpartite_graph(m, n, v),
    }
}

fn build_model(family: Family, phase: f64) -> Result<CollapsedModel> {
    Ok(match family {
        Family::Complete { n, v } => complete_model(n, v, phase)?,
        Family::Bipartite { n1, n2, v1, v2 } => bipartite_model(n1, n2, v1, v2, phase)?,
        Family::MPartite { m, n, v } => {
            if v != 1 {
                bail!("the M-partite model supports exactly one special vertex");
            }
            mpartite_model(m, n, phase)?
        }
    })
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn default_steps(family: Option<Family>) -> usize {
    match family {
        Some(Family::Complete { n, v }) if v < n => default_m_max(n, v),
        _ => 100,
    }
}

fn simulate(args: SimulateArgs) -> Result<ExitCode> {
    let phase = args.common.phi;
    let start = match args.start {
        Start::Uniform => InitialState::Uniform,
        Start::Entering1 => InitialState::Entering(1),
        Start::Entering2 => InitialState::Entering(2),
    };
    let trace = match args.method {
        Method::Full => {
            let g = args.graph.graph()?;
            let steps = args.steps.unwrap_or_else(|| default_steps(g.family()));
            if let Some(path) = &args.state_output {
                let psi = StepOperator::new(&g, phase).evolve(&start.prepare(&g)?, steps)?;
                psi.write_csv(&g, File::create(path).with_context(|| format!("creating {}", path.display()))?)?;
            }
            probability_trace(&g, phase, steps, start)?
        }
        Method::Collapsed => {
            if !matches!(start, InitialState::Uniform) {
                bail!("the collapsed method starts from the uniform state only");
            }
            if args.state_output.is_some() {
                bail!("--state-output needs the full method");
            }
            let family = args.graph.family()?;
            let model = build_model(family, phase)?;
            collapsed_trace(&model, &model.uniform_components(), args.steps.unwrap_or_else(|| default_steps(Some(family))))?
        }
    };
    let output = args.common.output.as_deref();
    match args.common.out {
        OutputFormat::Csv => trace.write_csv(sink(output)?)?,
        OutputFormat::Json => write_json(&SearchOutcome::new(trace, args.criterion, args.cost_model)?, output)?,
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SweepReport<'a> {
    grid: &'a scatterwalk::search::SweepGrid,
    ridge: Vec<scatterwalk::search::RidgePoint>,
}

fn sweep(args: SweepArgs) -> Result<ExitCode> {
    let mut config = SweepConfig::new(args.n, args.v);
    config.phis = phase_grid(args.phi_points);
    if let Some(steps) = args.steps {
        config.m_max = steps;
    }
    config.method = match args.method {
        Method::Full => SweepMethod::Full,
        Method::Collapsed => SweepMethod::Collapsed,
    };
    config.work_cap = args.work_cap;
    let grid = phase_sweep(&config)?;
    let output = args.output.as_deref();
    match args.out {
        OutputFormat::Csv => grid.write_csv(sink(output)?)?,
        OutputFormat::Json => write_json(&SweepReport { grid: &grid, ridge: grid.ridge(args.criterion, args.cost_model)? }, output)?,
    }
    if let Some(path) = &args.curve_output {
        let curve = average_vs_phase(&grid, args.criterion, args.cost_model)?;
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        match args.out {
            OutputFormat::Csv => curve.write_csv(file)?,
            OutputFormat::Json => serde_json::to_writer_pretty(file, &curve)?,
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn compare_classical(args: ClassicalArgs) -> Result<ExitCode> {
    let rows = [Variant::Blind, Variant::Memory]
        .into_iter()
        .map(|variant| comparison_row(&ClassicalSearchSpec::new(args.n, args.v, variant)?, args.trials, args.seed))
        .collect::<scatterwalk::Result<Vec<_>>>()?;
    let output = args.output.as_deref();
    match args.out {
        OutputFormat::Csv => write_comparison_csv(&rows, sink(output)?)?,
        OutputFormat::Json => write_json(&rows, output)?,
    }
    Ok(ExitCode::SUCCESS)
}

/// Writes a flat report and maps `passed` to the exit status.
fn finish<T: Serialize>(report: &T, passed: bool, common: &Common, csv_row: &[(&str, String)]) -> Result<ExitCode> {
    let output = common.output.as_deref();
    match common.out {
        OutputFormat::Json => write_json(report, output)?,
        OutputFormat::Csv => {
            let mut out = sink(output)?;
            writeln!(out, "{}", csv_row.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(","))?;
            writeln!(out, "{}", csv_row.iter().map(|(_, v)| v.as_str()).collect::<Vec<_>>().join(","))?;
        }
    }
    eprintln!("{}", if passed { "PASS" } else { "FAIL" });
    Ok(ExitCode::from(verification_status(passed)))
}

fn verification_status(passed: bool) -> u8 {
    if passed {
        0
    } else {
        VERIFICATION_FAILED
    }
}

#[derive(Serialize)]
struct CollapseOutput {
    #[serde(flatten)]
    report: scatterwalk::collapsed::CollapseReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<scatterwalk::collapsed::ModelDump>,
}

fn verify_collapse_cmd(args: VerifyCollapseArgs) -> Result<ExitCode> {
    let g = args.graph.graph()?;
    let family = g.family().context("collapsed models need a graph built from a family")?;
    let model = build_model(family, args.common.phi)?;
    let report = verify_collapse(&model, &g, args.steps)?;
    let row = [
        ("family", family.name().to_string()),
        ("phi", report.phi.to_string()),
        ("steps", report.steps.to_string()),
        ("dim", report.dim.to_string()),
        ("max_abs_dev", format!("{:e}", report.max_abs_dev)),
        ("max_residual", format!("{:e}", report.max_residual)),
        ("transcription_dev", format!("{:e}", report.transcription_dev)),
        ("passed", report.passed.to_string()),
    ];
    let passed = report.passed;
    let output = CollapseOutput { report, model: args.dump.then(|| model.dump()) };
    finish(&output, passed, &args.common, &row)
}

fn verify_circuit_cmd(args: VerifyCircuitArgs) -> Result<ExitCode> {
    let g = args.graph.graph()?;
    let report = verify_circuit(&g, args.common.phi, &probe_state(&g)?, args.steps)?;
    let row = [
        ("family", report.family.clone()),
        ("phi", report.phi.to_string()),
        ("steps", report.steps.to_string()),
        ("max_abs_dev", format!("{:e}", report.max_abs_dev)),
        ("oracle_calls", report.oracle_calls.to_string()),
        ("ancilla_residue", format!("{:e}", report.ancilla_residue)),
        ("passed", report.passed.to_string()),
    ];
    finish(&report, report.passed, &args.common, &row)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Sweep(args) => sweep(args),
        Command::CompareClassical(args) => compare_classical(args),
        Command::VerifyCollapse(args) => verify_collapse_cmd(args),
        Command::VerifyCircuit(args) => verify_circuit_cmd(args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::FAILURE;
        }
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// The reader of standard output went away, as with `| head`.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|cause| {
        let kind = cause
            .downcast_ref::<io::Error>()
            .map(io::Error::kind)
            .or_else(|| cause.downcast_ref::<serde_json::Error>().and_then(serde_json::Error::io_error_kind))
            .or_else(|| cause.downcast_ref::<scatterwalk::WalkError>().and_then(scatterwalk::WalkError::io_kind));
        kind == Some(io::ErrorKind::BrokenPipe)
    })
}
