//! The `polyqubo` command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::compiler::format::{read_decode_map, read_qubo, write_decode_map, write_qubo};
use crate::compiler::{compile, DecodeRegistry, QuboMatrix};
use crate::problem::{ProblemDescription, ProblemError};
use crate::showcase::{
    generate_logreg_dataset, run_logreg_experiment, solve_ratio_cut, write_dataset, Graph, LogRegConfig,
    RatioCutConfig,
};
use crate::solvers::{brute_force_with_limit, simulated_anneal, AnnealParams, AnnealSchedule, SolveError, Solution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_SIZE_LIMIT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "polyqubo", version, about = "Compile polynomial objectives to QUBO, solve and decode them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a JSON problem into a QUBO file and a decode map.
    Compile {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Decode-map path (default: <output>.map).
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Minimize a QUBO file.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "brute")]
        method: Method,
        #[command(flatten)]
        anneal: AnnealArgs,
        /// Largest bit count accepted by the brute-force solver.
        #[arg(long, default_value_t = crate::solvers::BRUTE_FORCE_LIMIT)]
        limit: usize,
        /// Decode map written by `compile`.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Run one of the built-in showcase problems.
    #[command(subcommand)]
    Demo(Demo),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Brute,
    Anneal,
}

#[derive(Debug, Args)]
pub struct AnnealArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = AnnealParams::DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, default_value_t = AnnealParams::DEFAULT_SWEEPS)]
    pub sweeps: usize,
    /// Starting temperature (default: the penalty weight or largest entry).
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long, default_value_t = AnnealParams::DEFAULT_T_FINAL)]
    pub t1: f64,
}

impl AnnealArgs {
    fn schedule(&self) -> AnnealSchedule {
        AnnealSchedule {
            restarts: self.restarts,
            sweeps: self.sweeps,
            t_initial: self.t0,
            t_final: self.t1,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Demo {
    /// Ratio-cut partitioning (default graph: two 4-cliques joined by one edge).
    RatioCut {
        /// Edge list, one `u v` pair per line.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 2.0)]
        c1: f64,
        #[arg(long, default_value_t = 8.0)]
        c2: f64,
        #[arg(long, default_value_t = 8.0)]
        c3: f64,
        #[arg(long, default_value_t = 1.0)]
        d1: f64,
        #[arg(long, default_value_t = 1.0)]
        d2: f64,
        #[arg(long, default_value_t = 1.0)]
        d3: f64,
        /// Weight of the assignment constraints.
        #[arg(long, default_value_t = 100.0)]
        weight: f64,
        /// Drop the constraint that keeps both sides nonempty.
        #[arg(long)]
        allow_empty: bool,
        #[command(flatten)]
        anneal: AnnealArgs,
    },
    /// Logistic regression on synthetic data.
    Logreg {
        /// Comma-separated label-fidelity probabilities.
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5])]
        p: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        dims: usize,
        #[arg(long, default_value_t = 3)]
        outputs: usize,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 20)]
        runs: usize,
        #[arg(long, default_value_t = 0.6)]
        train_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = AnnealParams::DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = AnnealParams::DEFAULT_SWEEPS)]
        sweeps: usize,
        /// Also write the dataset of the first probability to this file.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

/// A failed command: message and exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl ToString) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

impl From<ProblemError> for Failure {
    fn from(e: ProblemError) -> Self {
        let code = match e {
            ProblemError::Parse(_) => EXIT_PARSE,
            ProblemError::Invalid(_) => EXIT_INVALID,
        };
        Self::new(code, e)
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::TooManyBits { .. } | SolveError::TooManyCandidates { .. } => EXIT_SIZE_LIMIT,
            _ => EXIT_INVALID,
        };
        Self::new(code, e)
    }
}

type CmdResult = Result<(), Failure>;

/// Formats with six significant digits, dropping trailing zeros.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{x:.5e}")
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn io(e: std::io::Error) -> Failure {
    Failure::new(EXIT_IO, e)
}

fn cmd_compile(input: &Path, output: &Path, map: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let desc = ProblemDescription::from_json(&read_file(input)?)?;
    let (p, domains) = desc.to_model()?;
    let art = compile(&p, &domains).map_err(|e| Failure::new(EXIT_INVALID, e))?;
    let q = art.assemble();
    let map_path = map.map(Path::to_path_buf).unwrap_or_else(|| {
        let mut s = output.as_os_str().to_owned();
        s.push(".map");
        PathBuf::from(s)
    });
    write_file(output, &write_qubo(&q))?;
    write_file(&map_path, &write_decode_map(&art.registry))?;
    writeln!(out, "bits: {}", q.n()).map_err(io)?;
    writeln!(out, "auxiliaries: {}", art.aux_count()).map_err(io)?;
    writeln!(out, "penalty weight A: {}", sig6(art.penalty_weight)).map_err(io)?;
    let s = art.shape;
    writeln!(out, "aux upper bound: {} (p={}, n={}, q={}, r={})", s.aux_bound(), s.p, s.n, s.q, s.r).map_err(io)?;
    writeln!(out, "wrote {} and {}", output.display(), map_path.display()).map_err(io)?;
    Ok(())
}

fn print_solution(sol: &Solution, out: &mut dyn Write) -> CmdResult {
    writeln!(out, "energy: {}", sig6(sol.energy)).map_err(io)?;
    writeln!(out, "bits: {}", sol.bitstring()).map_err(io)?;
    for (var, value) in &sol.decoded {
        writeln!(out, "{var} = {}", sig6(*value)).map_err(io)?;
    }
    if !sol.decoded.is_empty() {
        writeln!(out, "consistent: {}", sol.consistent).map_err(io)?;
    }
    Ok(())
}

fn load_qubo(path: &Path, map: Option<&Path>) -> Result<(QuboMatrix, Option<DecodeRegistry>), Failure> {
    let q = read_qubo(&read_file(path)?).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let registry = match map {
        None => None,
        Some(m) => {
            let r = read_decode_map(&read_file(m)?)
                .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", m.display())))?;
            if r.bit_count() != q.n() {
                return Err(Failure::new(
                    EXIT_INVALID,
                    format!("decode map has {} bits, QUBO has {}", r.bit_count(), q.n()),
                ));
            }
            Some(r)
        }
    };
    Ok((q, registry))
}

fn cmd_solve(
    input: &Path,
    method: Method,
    anneal: &AnnealArgs,
    limit: usize,
    map: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let (q, registry) = load_qubo(input, map)?;
    let mut sol = match method {
        Method::Brute => brute_force_with_limit(&q, limit)?,
        Method::Anneal => simulated_anneal(&q, &anneal.schedule().params_for(&q, None, anneal.seed))?,
    };
    if let Some(r) = &registry {
        sol = sol.decode_with(r).map_err(|e| Failure::new(EXIT_INVALID, e))?;
    }
    print_solution(&sol, out)
}

fn run_demo(demo: &Demo, out: &mut dyn Write) -> CmdResult {
    match demo {
        Demo::RatioCut {
            graph,
            c1,
            c2,
            c3,
            d1,
            d2,
            d3,
            weight,
            allow_empty,
            anneal,
        } => {
            let g = match graph {
                Some(path) => Graph::parse(&read_file(path)?)
                    .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?,
                None => Graph::two_cliques(),
            };
            let cfg = RatioCutConfig {
                c1: *c1,
                c2: *c2,
                c3: *c3,
                d1: *d1,
                d2: *d2,
                d3: *d3,
                weight: *weight,
                require_nonempty: !allow_empty,
            };
            let r = solve_ratio_cut(&g, &cfg, &anneal.schedule(), anneal.seed)
                .map_err(|e| Failure::new(EXIT_INVALID, e))?;
            writeln!(
                out,
                "vertices: {}, edges: {}, bits: {} ({} auxiliary)",
                g.vertex_count(),
                g.edge_count(),
                r.bit_count,
                r.aux_count
            )
            .map_err(io)?;
            writeln!(out, "energy: {}", sig6(r.energy)).map_err(io)?;
            match &r.partition {
                Some(side) => {
                    let list = |b: bool| -> String {
                        let ids: Vec<String> =
                            side.iter().enumerate().filter(|(_, &s)| s == b).map(|(v, _)| v.to_string()).collect();
                        ids.join(" ")
                    };
                    writeln!(out, "partition A: {}", list(false)).map_err(io)?;
                    writeln!(out, "partition B: {}", list(true)).map_err(io)?;
                    match r.rcut {
                        Some(v) => writeln!(out, "rcut: {}", sig6(v)).map_err(io)?,
                        None => writeln!(out, "rcut: undefined (empty side)").map_err(io)?,
                    }
                }
                None => writeln!(out, "partition: infeasible (assignment constraint violated)").map_err(io)?,
            }
            Ok(())
        }
        Demo::Logreg {
            p,
            dims,
            outputs,
            points,
            runs,
            train_fraction,
            seed,
            restarts,
            sweeps,
            export,
        } => {
            let schedule = AnnealSchedule {
                restarts: *restarts,
                sweeps: *sweeps,
                ..Default::default()
            };
            let base = LogRegConfig {
                d: *dims,
                g: *outputs,
                n_points: *points,
                train_fraction: *train_fraction,
                seed: *seed,
                ..Default::default()
            };
            if let (Some(path), Some(&p0)) = (export, p.first()) {
                let data = generate_logreg_dataset(&LogRegConfig { p: p0, ..base.clone() })
                    .map_err(|e| Failure::new(EXIT_INVALID, e))?;
                let mut buf = Vec::new();
                write_dataset(&data, &mut buf).map_err(io)?;
                fs::write(path, buf).map_err(io)?;
            }
            writeln!(out, "{:<8}{:<12}{:<12}", "p", "mu", "sigma").map_err(io)?;
            for &prob in p {
                let cfg = LogRegConfig { p: prob, ..base.clone() };
                let rep = run_logreg_experiment(&cfg, *runs, &schedule).map_err(|e| Failure::new(EXIT_INVALID, e))?;
                writeln!(
                    out,
                    "{:<8}{:<12}{:<12}",
                    sig6(prob),
                    sig6(rep.accuracy_mean),
                    sig6(rep.accuracy_std)
                )
                .map_err(io)?;
            }
            Ok(())
        }
    }
}

/// Runs a parsed command, writing the report to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    match &cli.command {
        Command::Compile { input, output, map } => cmd_compile(input, output, map.as_deref(), out),
        Command::Solve {
            input,
            method,
            anneal,
            limit,
            map,
        } => cmd_solve(input, *method, anneal, *limit, map.as_deref(), out),
        Command::Demo(demo) => run_demo(demo, out),
    }
}
