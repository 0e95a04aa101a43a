//! The `topoloom` command line.

use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bench::{random_circuit, render_json, render_table, run_bench, verify_field, BenchParams};
use crate::bounded::synth_bounded;
use crate::circuit::Circuit;
use crate::field::Field;
use crate::geometry::{field_to_geometry, render_ascii, render_svg};
use crate::junction::{check_junction_cnot, check_teleport, correction_table, StateVector, Teleport};
use crate::unbounded::synth_unbounded;

#[derive(Parser, Debug)]
#[command(name = "topoloom", version, about = "Synthesize CNOT circuits into fields of topological primitives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algo {
    Bounded,
    Unbounded,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RenderFormat {
    Ascii,
    Svg,
    Geometry,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a random circuit netlist.
    Gen {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        gates: usize,
        #[arg(long)]
        max_targets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Index of the circuit within the seeded ensemble.
        #[arg(long, default_value_t = 0)]
        trial: usize,
    },
    /// Synthesize a circuit into a field.
    Synth {
        #[arg(long, value_enum)]
        algo: Algo,
        /// Always use full three-column weaves (bounded only).
        #[arg(long)]
        no_heuristic: bool,
        /// Netlist file, `-` for standard input.
        circuit: String,
    },
    /// Check that a field is valid and implements a circuit.
    Verify { circuit: String, field: String },
    /// Run the area benchmark. List options take comma-separated values.
    Bench {
        #[arg(long, value_delimiter = ',')]
        qubits: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        gates: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        max_targets: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        format: ReportFormat,
        #[arg(long)]
        no_heuristic: bool,
        /// |Q| = 10, |G| in 10,100,1000, MT in 2,5,9.
        #[arg(long, conflicts_with_all = ["qubits", "gates", "max_targets", "full"])]
        table1: bool,
        /// Every benchmark row that fits in memory with dense fields (slow).
        #[arg(long, conflicts_with_all = ["qubits", "gates", "max_targets"])]
        full: bool,
    },
    /// Render a field.
    Render {
        #[arg(long, value_enum, default_value_t = RenderFormat::Ascii)]
        format: RenderFormat,
        /// Unit cells per field cell, for geometry output.
        #[arg(long, default_value_t = 4)]
        pitch: u64,
        field: String,
    },
    /// Check the teleportation and junction identities.
    VerifyJunctions {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

fn read_input(path: &str) -> Result<String, CliError> {
    let mut s = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Usage(format!("stdin: {e}")))?;
    } else {
        s = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
    }
    Ok(s)
}

fn load_circuit(path: &str) -> Result<Circuit, CliError> {
    Circuit::parse(&read_input(path)?).map_err(|e| CliError::Usage(format!("{path}: {e}")))
}

fn load_field(path: &str) -> Result<Field, CliError> {
    Field::parse(&read_input(path)?).map_err(|e| CliError::Usage(format!("{path}: {e}")))
}

fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Failed(format!("stdout: {e}")))
}

/// Parameter rows of the reference table that fit in memory with dense fields.
fn full_grid() -> Vec<(usize, usize, usize)> {
    let mut rows = Vec::new();
    for g in [10, 100, 1000] {
        for mt in [2, 5, 9] {
            rows.push((10, g, mt));
        }
    }
    for g in [10, 100] {
        for mt in [20, 50, 99] {
            rows.push((100, g, mt));
        }
    }
    for mt in [200, 500, 999] {
        rows.push((1000, 10, mt));
    }
    rows
}

fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Gen { qubits, gates, max_targets, seed, trial } => {
            let p = BenchParams::new(qubits, gates, max_targets, 1, seed);
            let c = random_circuit(&p, trial).map_err(|e| CliError::Usage(e.to_string()))?;
            emit(&c.to_netlist())
        }
        Command::Synth { algo, no_heuristic, circuit } => {
            let c = load_circuit(&circuit)?;
            let f = match algo {
                Algo::Bounded => synth_bounded(&c, !no_heuristic),
                Algo::Unbounded => synth_unbounded(&c),
            };
            eprintln!("rows {} cols {} area {}", f.rows(), f.cols(), f.area());
            emit(&f.to_text())
        }
        Command::Verify { circuit, field } => {
            if circuit == "-" && field == "-" {
                return Err(CliError::Usage("only one input can come from stdin".into()));
            }
            let c = load_circuit(&circuit)?;
            let f = load_field(&field)?;
            verify_field(&c, &f).map_err(CliError::Failed)?;
            eprintln!("ok: field implements the circuit (area {})", f.area());
            Ok(())
        }
        Command::Bench { qubits, gates, max_targets, trials, seed, format, no_heuristic, table1, full } => {
            let grid: Vec<(usize, usize, usize)> = if table1 {
                full_grid().into_iter().filter(|&(q, _, _)| q == 10).collect()
            } else if full {
                full_grid()
            } else {
                if qubits.is_empty() || gates.is_empty() || max_targets.is_empty() {
                    return Err(CliError::Usage(
                        "bench needs --qubits, --gates and --max-targets (or --table1/--full)".into(),
                    ));
                }
                let mut g = Vec::new();
                for &q in &qubits {
                    for &n in &gates {
                        for &m in &max_targets {
                            g.push((q, n, m));
                        }
                    }
                }
                g
            };
            let mut reports = Vec::new();
            for (q, g, mt) in grid {
                let mut p = BenchParams::new(q, g, mt, trials, seed);
                p.heuristic = !no_heuristic;
                p.check().map_err(|e| CliError::Usage(e.to_string()))?;
                let start = std::time::Instant::now();
                let r = run_bench(&p).map_err(|e| CliError::Failed(e.to_string()))?;
                eprintln!("|Q|={q} |G|={g} MT={mt}: {:.2}s", start.elapsed().as_secs_f64());
                reports.push(r);
            }
            emit(&match format {
                ReportFormat::Table => render_table(&reports),
                ReportFormat::Json => render_json(&reports),
            })
        }
        Command::Render { format, pitch, field } => {
            let f = load_field(&field)?;
            let text = match format {
                RenderFormat::Ascii => render_ascii(&f),
                RenderFormat::Svg => render_svg(&f),
                RenderFormat::Geometry => {
                    field_to_geometry(&f, pitch).map_err(|e| CliError::Failed(e.to_string()))?.to_string()
                }
            };
            emit(&text)
        }
        Command::VerifyJunctions { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut failures = 0;
            let mut one: Vec<StateVector> = (0..2).map(|i| StateVector::basis(1, i).unwrap()).collect();
            let mut two: Vec<StateVector> = (0..4).map(|i| StateVector::basis(2, i).unwrap()).collect();
            for _ in 0..samples {
                one.push(StateVector::random(1, &mut rng).unwrap());
                two.push(StateVector::random(2, &mut rng).unwrap());
            }
            for v in [Teleport::XMeasured, Teleport::ZMeasured] {
                let bad = one.iter().filter(|s| !check_teleport(v, s)).count();
                println!("teleport {v:?}: {}/{} states pass", one.len() - bad, one.len());
                failures += bad;
            }
            let bad = two.iter().filter(|s| !check_junction_cnot(s)).count();
            println!("junction CNOT: {}/{} states pass", two.len() - bad, two.len());
            failures += bad;
            println!();
            emit(&correction_table())?;
            if failures > 0 {
                return Err(CliError::Failed(format!("{failures} identity checks failed")));
            }
            Ok(())
        }
    }
}

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}
