use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sublevel::bench::{
    build_config, load_instance, run_config, sweep, write_csv, write_json, Prepared, Problem, Reference, RunRecord,
    SweepGrid,
};
use sublevel::problems::gen_random_nn;
use sublevel::sdp::{assemble, to_sdpa_string, SolverOptions};
use sublevel::sparsity::summarize;
use sublevel::sublevel::{Heuristic, Mode, SublevelConfig};
use sublevel::Result;

#[derive(Parser)]
#[command(name = "sublevel", version, about = "Sublevel moment-SOS relaxations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sparsity summary: nVar, density, nCliques, MaxClique, MinClique.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Build and solve (or export) one relaxation.
    Run {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        relax: Relax,
        #[command(flatten)]
        solver: Solver,
        #[arg(long = "solver", value_enum, default_value_t = Backend::Internal)]
        backend: Backend,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve every cell of a (heuristic, level, depth) grid.
    Sweep {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        order: u32,
        #[arg(long, value_delimiter = ',', default_value = "0,4,6,8")]
        level: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        depth: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "h2")]
        heuristic: Vec<Heuristic>,
        #[arg(long, value_delimiter = ',', default_value = "sparse")]
        mode: Vec<Mode>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        solver: Solver,
        /// Sidecar JSON with the reference value, for RI and RG.
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Leave solve times out so repeated sweeps give identical files.
        #[arg(long)]
        no_timing: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Write the relaxation as an SDPA sparse file.
    Export {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        relax: Relax,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random ReLU network in the JSON format read by `--problem lip|cert`.
    GenNn {
        #[arg(long)]
        p1: usize,
        #[arg(long)]
        p2: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    problem: Problem,
}

#[derive(Args)]
struct Relax {
    #[arg(long, default_value_t = 1)]
    order: u32,
    #[arg(long, default_value_t = 0)]
    level: usize,
    #[arg(long, default_value_t = 0)]
    depth: usize,
    #[arg(long, default_value = "auto")]
    heuristic: Heuristic,
    #[arg(long, default_value = "sparse")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Relax {
    fn config(&self) -> SublevelConfig {
        SublevelConfig::new(self.order, self.level, self.depth)
            .with_heuristic(self.heuristic)
            .with_mode(self.mode)
            .with_seed(self.seed)
    }
}

#[derive(Args)]
struct Solver {
    #[arg(long, default_value_t = 1e-7)]
    gap_tol: f64,
    #[arg(long, default_value_t = 1e-7)]
    feas_tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
}

impl Solver {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            gap_tol: self.gap_tol,
            feas_tol: self.feas_tol,
            max_iter: self.max_iter,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Backend {
    Internal,
    Export,
}

#[derive(Serialize)]
struct RunJson {
    bound: f64,
    status: String,
    iterations: usize,
    solve_seconds: f64,
    primal_obj: f64,
    dual_obj: f64,
    gap: f64,
    nblocks: usize,
    max_block: usize,
    #[serde(skip_serializing_if = "String::is_empty")]
    message: String,
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn prepare(input: &Input) -> Result<Prepared> {
    Prepared::new(load_instance(input.problem, &input.instance)?)
}

fn export(prep: &Prepared, relax: &Relax, out: &Option<PathBuf>) -> Result<()> {
    let relaxation = build_config(prep, &relax.config(), &SolverOptions::default())?;
    let sdp = assemble(&relaxation)?;
    sink(out)?.write_all(to_sdpa_string(&sdp, prep.instance.name()).as_bytes())?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Analyze { input, output } => {
            let prep = prepare(&input)?;
            let row = summarize(&prep.instance.pop)?;
            let mut w = sink(&output.out)?;
            match output.format {
                Format::Csv => {
                    let mut c = csv::Writer::from_writer(w);
                    c.serialize(&row)?;
                    c.flush()?;
                }
                Format::Json => {
                    serde_json::to_writer_pretty(&mut w, &row)?;
                    writeln!(w)?;
                }
            }
        }
        Cmd::Run {
            input,
            relax,
            solver,
            backend,
            out,
        } => {
            let prep = prepare(&input)?;
            if backend == Backend::Export {
                return export(&prep, &relax, &out);
            }
            let o = run_config(&prep, &relax.config(), &solver.options())?;
            let r = &o.report;
            let row = RunJson {
                bound: o.bound(),
                status: r.status.to_string(),
                iterations: r.iterations,
                solve_seconds: r.solve_seconds,
                primal_obj: r.primal_obj,
                dual_obj: r.dual_obj,
                gap: r.gap,
                nblocks: o.relaxation.nblocks(),
                max_block: o.relaxation.block_sizes().into_iter().max().unwrap_or(0),
                message: r.message.clone(),
            };
            let mut w = sink(&out)?;
            serde_json::to_writer_pretty(&mut w, &row)?;
            writeln!(w)?;
        }
        Cmd::Sweep {
            input,
            order,
            level,
            depth,
            heuristic,
            mode,
            seed,
            solver,
            reference,
            jobs,
            no_timing,
            output,
        } => {
            let prep = prepare(&input)?;
            let reference = reference.map(Reference::read).transpose()?;
            let grid = SweepGrid {
                modes: mode,
                heuristics: heuristic,
                orders: vec![order],
                levels: level,
                depths: depth,
                seed,
            };
            let mut rows = sweep(&prep, &grid.cells(), &solver.options(), jobs, reference.as_ref())?;
            if no_timing {
                rows = rows.into_iter().map(RunRecord::without_timing).collect();
            }
            let w = sink(&output.out)?;
            match output.format {
                Format::Csv => write_csv(&rows, w)?,
                Format::Json => write_json(&rows, w)?,
            }
        }
        Cmd::Export { input, relax, out } => export(&prepare(&input)?, &relax, &out)?,
        Cmd::GenNn { p1, p2, seed, out } => {
            let nn = gen_random_nn(p1, p2, seed)?;
            writeln!(sink(&out)?, "{}", nn.to_json_string())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
