//! Command-line driver for the dlsmc library.
//!
//! Exit codes: `solve` returns 0 when the target clique size was
//! reached and 1 when it was not; every subcommand returns 2 on usage,
//! parse, or I/O errors.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dlsmc::bench::{
    aggregate_instrumentation, cdf_to_csv, pd_sweep, rank_algorithms, records_to_csv,
    records_to_jsonl, run_experiment, run_experiment_instrumented, steps_per_second, summarize,
    summary_from_csv, Dominance,
};
use dlsmc::graph::{Graph, Parsed};
use dlsmc::oracle::{enumerate_maximum_cliques, max_clique_exact};
use dlsmc::solver::{solve, SolverConfig};

#[derive(Parser)]
#[command(name = "dlsmc", version, about = "Stochastic local search for maximum cliques")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one search and report the clique it found.
    Solve {
        /// DIMACS clique instance (ASCII, or binary with --binary).
        file: PathBuf,
        /// Target clique size at which the search stops.
        #[arg(long)]
        tcs: u32,
        /// Penalty delay; 1 disables penalties.
        #[arg(long, default_value_t = 1)]
        pd: u32,
        /// Step budget (vertex additions).
        #[arg(long, default_value_t = 100_000_000)]
        max_steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Read the instance in DIMACS binary format.
        #[arg(long)]
        binary: bool,
    },
    /// Run a campaign of independent searches and summarize it.
    Bench {
        file: PathBuf,
        #[arg(long)]
        tcs: u32,
        /// Number of runs; run i uses seed ^ i.
        #[arg(long)]
        runs: usize,
        #[arg(long, default_value_t = 1)]
        pd: u32,
        #[arg(long, default_value_t = 100_000_000)]
        max_steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write one CSV row per run to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write one JSON object per run to this path.
        #[arg(long)]
        jsonl: Option<PathBuf>,
        /// Collect perturbation traces and export their CDFs next to
        /// the --csv/--jsonl path (or summarize them to stdout).
        #[arg(long)]
        instrument: bool,
        #[arg(long)]
        binary: bool,
    },
    /// Benchmark one instance across several penalty delays.
    Sweep {
        file: PathBuf,
        #[arg(long)]
        tcs: u32,
        /// Comma-separated penalty delays, e.g. 1,2,5,15.
        #[arg(long)]
        pd_list: String,
        #[arg(long)]
        runs: usize,
        #[arg(long, default_value_t = 100_000_000)]
        max_steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the sweep table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        binary: bool,
    },
    /// Exact maximum clique via branch and bound (small graphs).
    Oracle {
        file: PathBuf,
        /// List every maximum clique instead of a single witness.
        #[arg(long)]
        enumerate: bool,
        #[arg(long)]
        binary: bool,
    },
    /// Decide which of two algorithm summary CSVs dominates each
    /// instance they share.
    Rank {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Solve { file, tcs, pd, max_steps, seed, binary } => {
            let g = load(&file, binary)?;
            let cfg = SolverConfig { tcs, pd, max_steps, seed };
            let r = solve(&g, &cfg).map_err(|e| e.to_string())?;
            let secs = r.elapsed.as_secs_f64();
            let rate = if secs > 0.0 { r.steps as f64 / secs } else { 0.0 };
            if r.success {
                println!(
                    "found clique of size {} in {} steps ({:.6} s, {:.0} steps/s)",
                    r.clique.len(),
                    r.steps,
                    secs,
                    rate
                );
            } else {
                println!(
                    "failed: best clique size {} after {} steps ({:.6} s, {:.0} steps/s)",
                    r.clique.len(),
                    r.steps,
                    secs,
                    rate
                );
            }
            println!("clique: {}", one_based(&r.clique));
            Ok(ExitCode::from(if r.success { 0 } else { 1 }))
        }
        Command::Bench { file, tcs, runs, pd, max_steps, seed, csv, jsonl, instrument, binary } => {
            let g = load(&file, binary)?;
            let instance = stem(&file);
            let cfg = SolverConfig { tcs, pd, max_steps, seed };

            let (records, traces) = if instrument {
                let (r, t) = run_experiment_instrumented(&g, &instance, runs, &cfg).map_err(err)?;
                (r, Some(t))
            } else {
                (run_experiment(&g, &instance, runs, &cfg).map_err(err)?, None)
            };

            let s = summarize(&records);
            println!("{instance}: {}/{} runs reached size {tcs} (pd {pd})", s.successes, s.runs);
            if let Some(st) = &s.steps {
                println!(
                    "steps over successes: mean {:.1}, median {:.1}, sd {:.1}, cv {:.2}",
                    st.mean, st.median, st.sd, st.cv
                );
                println!("distinct solutions: {}", s.distinct_solutions);
            }
            if let Some(rate) = steps_per_second(&records) {
                println!("throughput: {rate:.0} steps/s across the campaign");
            }
            if let Some(path) = &csv {
                fs::write(path, records_to_csv(&records).map_err(err)?).map_err(err)?;
                println!("wrote {}", path.display());
            }
            if let Some(path) = &jsonl {
                fs::write(path, records_to_jsonl(&records).map_err(err)?).map_err(err)?;
                println!("wrote {}", path.display());
            }
            if let Some(traces) = traces {
                export_instrumentation(&traces, csv.as_deref().or(jsonl.as_deref()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { file, tcs, pd_list, runs, max_steps, seed, csv, binary } => {
            let g = load(&file, binary)?;
            let pd_values: Vec<u32> = pd_list
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| format!("bad pd value {t:?}")))
                .collect::<Result<_, _>>()?;
            let cfg = SolverConfig { tcs, pd: 1, max_steps, seed };
            let rows = pd_sweep(&g, &stem(&file), runs, &cfg, &pd_values).map_err(err)?;

            println!(
                "{:>4}  {:>12}  {:>12}  {:>13}",
                "pd", "success_rate", "median_steps", "median_time_s"
            );
            for row in &rows {
                println!(
                    "{:>4}  {:>12.2}  {:>12}  {:>13}",
                    row.pd,
                    row.success_rate,
                    row.median_steps.map_or(String::from("-"), |v| format!("{v:.1}")),
                    row.median_time_s.map_or(String::from("-"), |v| format!("{v:.6}")),
                );
            }
            if let Some(path) = csv {
                let mut out = String::from("pd,success_rate,median_steps,median_time_s\n");
                for row in &rows {
                    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        row.pd,
                        row.success_rate,
                        opt(row.median_steps),
                        opt(row.median_time_s)
                    ));
                }
                fs::write(&path, out).map_err(err)?;
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { file, enumerate, binary } => {
            let g = load(&file, binary)?;
            if enumerate {
                let cliques = enumerate_maximum_cliques(&g);
                println!(
                    "maximum clique size {}: {} distinct maximum cliques",
                    cliques.first().map_or(0, Vec::len),
                    cliques.len()
                );
                for c in &cliques {
                    println!("clique: {}", one_based(c));
                }
            } else {
                let (omega, witness) = max_clique_exact(&g);
                println!("maximum clique size {omega}");
                println!("clique: {}", one_based(&witness));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Rank { a, b } => {
            let sa = summary_from_csv(&fs::read_to_string(&a).map_err(err)?).map_err(err)?;
            let sb = summary_from_csv(&fs::read_to_string(&b).map_err(err)?).map_err(err)?;
            let shared: Vec<&String> =
                sa.instances.keys().filter(|k| sb.instances.contains_key(*k)).collect();
            if shared.is_empty() {
                return Err("the two summaries share no instances".into());
            }
            for instance in shared {
                let verdict = match rank_algorithms(&sa, &sb, instance).map_err(err)? {
                    Dominance::A => format!("{} dominates", sa.algorithm),
                    Dominance::B => format!("{} dominates", sb.algorithm),
                    Dominance::Inconclusive => "inconclusive".into(),
                };
                println!("{instance}: {verdict}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn one_based(clique: &[u32]) -> String {
    clique.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ")
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into())
}

fn load(path: &Path, binary: bool) -> Result<Graph, String> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let Parsed { graph, warnings } = if binary {
        Graph::parse_dimacs_binary(BufReader::new(file))
    } else {
        Graph::parse_dimacs_ascii(BufReader::new(file))
    }
    .map_err(|e| format!("{}: {e}", path.display()))?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(graph)
}

/// Writes the four perturbation-measure CDFs as two-column CSVs next
/// to `base` (e.g. runs.csv -> runs.improving_steps.csv), or prints
/// event counts when no output path was given.
fn export_instrumentation(
    traces: &[Vec<dlsmc::solver::PerturbationEvent>],
    base: Option<&Path>,
) -> Result<(), String> {
    let cdfs = aggregate_instrumentation(traces);
    let named = [
        ("improving_steps", &cdfs.improving_steps),
        ("plateau_swaps", &cdfs.plateau_swaps),
        ("penalized_vertices", &cdfs.penalized_vertices),
        ("relative_mobility", &cdfs.relative_mobility),
    ];
    match base {
        Some(base) => {
            for (name, cdf) in named {
                let path = base.with_extension(format!("{name}.csv"));
                fs::write(&path, cdf_to_csv(cdf)).map_err(err)?;
                println!("wrote {}", path.display());
            }
        }
        None => {
            let events: usize = traces.iter().map(Vec::len).sum();
            println!("instrumentation: {events} perturbation events across {} runs", traces.len());
            for (name, cdf) in named {
                let median = cdf.get(cdf.len() / 2).map(|(x, _)| *x);
                match median {
                    Some(m) => println!("  {name}: {} points, median {m}", cdf.len()),
                    None => println!("  {name}: no data"),
                }
            }
        }
    }
    Ok(())
}
