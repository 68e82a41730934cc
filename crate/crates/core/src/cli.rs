//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 a negative answer (an `Artificial` label, no
//! program within the exhaustive bound), 2 usage error, 3 execution or
//! analysis error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::aesthetics::{beauty_report, PatternDictionary};
use crate::designer::{optimize_islands, SearchParams};
use crate::fleet::{build_fleet, find_attack, transfer_rate, BuilderModel, DEFAULT_COLLAPSE_THRESHOLD};
use crate::naturalness::{naturalness_report, Label, NaturalnessConfig};
use crate::synthesis::{exhaustive_min, synthesize_min};
use crate::vm::{execute, parse, placement_bounds, serialize, ExecutionLimits, Program};
use crate::world::{parse_structure, render, ConstraintSet, Dims, VoxelStructure};

pub const DEFAULT_DIM: usize = 64;
pub const MAX_PLACEMENTS_VAR: &str = "DOMUS_MAX_PLACEMENTS";

#[derive(Parser, Debug)]
#[command(name = "domus", version, about = "Build, measure and attack voxel buildings described as programs")]
pub struct Cli {
    /// World size for programs; defaults to 64 per axis, grown to fit.
    #[arg(long, num_args = 3, value_names = ["NX", "NY", "NZ"], global = true)]
    pub dims: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Output file (a directory for `optimize`); standard output if absent.
    #[arg(short, long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Threads for parallel work; results do not depend on it.
    #[arg(long, default_value_t = 1, global = true)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BuilderKind {
    Robot,
    Human,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a program and write the structure as layered text.
    Build { program: PathBuf },
    /// Print a structure (or a program's output) as layered text.
    Render { input: PathBuf },
    /// Upper bound on the shortest program for a structure.
    Complexity {
        input: PathBuf,
        /// Search exhaustively up to this many bytes instead.
        #[arg(long, value_name = "BYTES")]
        exhaustive: Option<usize>,
    },
    /// Beauty score under a pattern dictionary.
    Beauty {
        input: PathBuf,
        #[arg(long)]
        dict: PathBuf,
    },
    /// Regularity metrics and fractal dimension; exits 1 when artificial.
    Natural {
        input: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long, default_value_t = 4)]
        min_patch: usize,
    },
    /// Search for a design; writes best.cvm, best.vox.txt and trace.csv.
    Optimize {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        constraints: PathBuf,
        #[arg(long, default_value_t = 5000)]
        iters: usize,
        #[arg(long, default_value_t = 10.0)]
        temperature: f64,
        #[arg(long, default_value_t = 0.999)]
        cooling: f64,
        #[arg(long, default_value_t = 4096)]
        max_bytes: usize,
        /// Independent annealing runs, seeded seed, seed + 1, ...
        #[arg(long, default_value_t = 1)]
        islands: usize,
    },
    /// Find an attack on a program's building and apply it to a fleet.
    Attack {
        program: PathBuf,
        #[arg(long, default_value_t = 50)]
        fleet: usize,
        #[arg(long, value_enum, default_value_t = BuilderKind::Robot)]
        builder: BuilderKind,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_COLLAPSE_THRESHOLD)]
        threshold: f64,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Error(String),
}

fn error(e: impl std::fmt::Display) -> Failure {
    Failure::Error(e.to_string())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "domus: {e}");
            return 3;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok((text, code)) => {
            if let Err(e) = emit(&cli, &text, out) {
                let _ = writeln!(err, "domus: {e}");
                return 3;
            }
            code
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "domus: {m}");
            2
        }
        Err(Failure::Error(m)) => {
            let _ = writeln!(err, "domus: {m}");
            3
        }
    }
}

fn emit(cli: &Cli, text: &str, out: &mut dyn Write) -> io::Result<()> {
    match (&cli.out, &cli.command) {
        (_, Command::Optimize { .. }) | (None, _) => out.write_all(text.as_bytes()),
        (Some(path), _) => fs::write(path, text),
    }
}

fn limits() -> Result<ExecutionLimits, Failure> {
    match std::env::var(MAX_PLACEMENTS_VAR) {
        Err(_) => Ok(ExecutionLimits::default()),
        Ok(v) => {
            let n: u64 = v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{MAX_PLACEMENTS_VAR} must be a positive integer, got `{v}`")))?;
            ExecutionLimits::new(n, ExecutionLimits::default().max_call_depth)
                .map_err(|_| Failure::Usage(format!("{MAX_PLACEMENTS_VAR} must be positive")))
        }
    }
}

fn explicit_dims(cli: &Cli) -> Result<Option<Dims>, Failure> {
    match cli.dims.as_deref() {
        None => Ok(None),
        Some([x, y, z]) => {
            let d = Dims::new(*x, *y, *z);
            if !d.is_positive() {
                return Err(Failure::Usage("dims must be positive".into()));
            }
            Ok(Some(d))
        }
        Some(_) => Err(Failure::Usage("--dims takes three values".into())),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(error)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn is_program(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "cvm")
}

/// `--dims` if given; otherwise 64 per axis, widened to the program's reach.
fn program_dims(cli: &Cli, p: &Program, limits: ExecutionLimits) -> Result<Dims, Failure> {
    if let Some(d) = explicit_dims(cli)? {
        return Ok(d);
    }
    let reach = |i: usize| match placement_bounds(p, limits) {
        Ok(Some((_, hi))) => (hi.get(i).max(0) as usize + 1).max(DEFAULT_DIM),
        _ => DEFAULT_DIM,
    };
    Ok(Dims::new(reach(0), reach(1), reach(2)))
}

fn load_program(cli: &Cli, path: &Path) -> Result<(Program, Dims, ExecutionLimits), Failure> {
    let text = read_input(path)?;
    let p = parse(&text).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))?;
    let limits = limits()?;
    let dims = program_dims(cli, &p, limits)?;
    Ok((p, dims, limits))
}

fn load_structure(cli: &Cli, path: &Path) -> Result<VoxelStructure, Failure> {
    if is_program(path) {
        let (p, dims, limits) = load_program(cli, path)?;
        return execute(&p, dims, limits).map_err(|e| Failure::Error(format!("{}: {e}", path.display())));
    }
    parse_structure(&read_input(path)?).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn report(cli: &Cli, value: &impl Serialize) -> Result<String, Failure> {
    let v = serde_json::to_value(value).map_err(error)?;
    Ok(match cli.format {
        Format::Json => serde_json::to_string_pretty(&v).map_err(error)? + "\n",
        Format::Text => {
            let mut lines = Vec::new();
            flatten("", &v, &mut lines);
            lines.join("\n") + "\n"
        }
    })
}

fn flatten(prefix: &str, v: &Value, lines: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, lines);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, lines);
            }
        }
        Value::String(s) => lines.push(format!("{prefix}: {}", s.replace('\n', "\\n"))),
        other => lines.push(format!("{prefix}: {other}")),
    }
}

fn dispatch(cli: &Cli) -> Result<(String, i32), Failure> {
    explicit_dims(cli)?;
    match &cli.command {
        Command::Build { program } => {
            let (p, dims, limits) = load_program(cli, program)?;
            let s = execute(&p, dims, limits).map_err(|e| Failure::Error(format!("{}: {e}", program.display())))?;
            Ok((render(&s) + "\n", 0))
        }
        Command::Render { input } => Ok((render(&load_structure(cli, input)?) + "\n", 0)),
        Command::Complexity { input, exhaustive } => {
            let s = load_structure(cli, input)?;
            let bound = match exhaustive {
                None => synthesize_min(&s).map_err(error)?,
                Some(max_len) => match exhaustive_min(&s, *max_len).map_err(error)? {
                    Some(b) => b,
                    None => {
                        let v = json!({ "length": null, "max_len": max_len, "cells": s.len() });
                        return Ok((report(cli, &v)?, 1));
                    }
                },
            };
            let v = json!({
                "length": bound.length,
                "method": bound.method,
                "program_text": serialize(&bound.program),
                "cells": s.len(),
            });
            Ok((report(cli, &v)?, 0))
        }
        Command::Beauty { input, dict } => {
            let s = load_structure(cli, input)?;
            let d = PatternDictionary::parse(&read_input(dict)?)
                .map_err(|e| Failure::Error(format!("{}: {e}", dict.display())))?;
            Ok((report(cli, &beauty_report(&s, &d).map_err(error)?)?, 0))
        }
        Command::Natural { input, threshold, min_patch } => {
            let s = load_structure(cli, input)?;
            let config = NaturalnessConfig { min_patch: *min_patch, threshold: *threshold };
            let r = naturalness_report(&s, &config).map_err(error)?;
            let code = if r.label == Label::Natural { 0 } else { 1 };
            Ok((report(cli, &r)?, code))
        }
        Command::Optimize { dict, constraints, iters, temperature, cooling, max_bytes, islands } => {
            let d = PatternDictionary::parse(&read_input(dict)?)
                .map_err(|e| Failure::Error(format!("{}: {e}", dict.display())))?;
            let cs = ConstraintSet::from_json(&read_input(constraints)?)
                .map_err(|e| Failure::Error(format!("{}: {e}", constraints.display())))?;
            let dims = explicit_dims(cli)?.unwrap_or(Dims::new(DEFAULT_DIM, DEFAULT_DIM, DEFAULT_DIM));
            let mut params = SearchParams::new(cli.seed, *iters, dims);
            params.initial_temperature = *temperature;
            params.cooling = *cooling;
            params.max_program_bytes = *max_bytes;
            params.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let result = optimize_islands(&d, &cs, &params, *islands).map_err(error)?;
            let built = execute(&result.best, dims, limits()?).map_err(error)?;

            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir).map_err(|e| Failure::Error(format!("{}: {e}", dir.display())))?;
            let write = |name: &str, text: String| {
                let path = dir.join(name);
                fs::write(&path, text).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
            };
            write("best.cvm", serialize(&result.best) + "\n")?;
            write("best.vox.txt", render(&built) + "\n")?;
            write("trace.csv", result.trace.to_csv())?;
            let v = json!({
                "objective": result.best_objective,
                "program_bytes": crate::vm::program_length(&result.best),
                "iterations": iters,
                "cells": built.len(),
            });
            Ok((report(cli, &v)?, 0))
        }
        Command::Attack { program, fleet, builder, p, k, threshold } => {
            let (prog, dims, limits) = load_program(cli, program)?;
            let model = match builder {
                BuilderKind::Robot => BuilderModel::Robot,
                BuilderKind::Human => BuilderModel::human(*p, cli.seed).map_err(|e| Failure::Usage(e.to_string()))?,
            };
            if *fleet == 0 {
                return Err(Failure::Usage("--fleet must be at least 1".into()));
            }
            let prototype = execute(&prog, dims, limits).map_err(error)?;
            let attack = find_attack(&prototype, *k).map_err(error)?;
            let members = build_fleet(&prog, *fleet, model, dims, limits).map_err(error)?;
            let r = transfer_rate(&attack, &members, *threshold).map_err(error)?;
            Ok((report(cli, &json!({ "attack": attack, "report": r }))?, 0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(std::iter::once("domus").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["build"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["build", "x.cvm", "--bogus"]).0, 2);
        assert_eq!(call(&["build", "x.cvm", "--dims", "0", "1", "1"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn missing_file_names_it() {
        let (code, _, err) = call(&["build", "missing.cvm"]);
        assert_eq!(code, 3);
        assert!(err.contains("missing.cvm"), "{err}");
    }

    #[test]
    fn text_format_flattens() {
        let mut lines = Vec::new();
        flatten("", &json!({"a": 1, "b": {"c": [true]}, "t": "x\ny"}), &mut lines);
        assert_eq!(lines, ["a: 1", "b.c[0]: true", "t: x\\ny"]);
    }
}
