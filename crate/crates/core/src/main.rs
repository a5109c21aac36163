//! Command-line front end: generation, formulation, solving, verification
//! and benchmarking as reproducible pipelines. Every artifact-producing
//! command writes a `.manifest` sidecar with argv, seeds and digests.

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use settleq::anneal::{gain_report, read_stats_string, run_experiment, write_stats_string, AnnealConfig};
use settleq::manifest::RunManifest;
use settleq::model::{
    generate_instance, read_instance, validate_instance, write_instance, GenParams,
};
use settleq::qubo::{read_qubo, write_qubo, BlockIndex};
use settleq::rat::{format_rat, parse_rat, Rat};
use settleq::registry::{lookup_formulation, lookup_solver, FormulationParams, SolverOpts};
use settleq::Error;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "settleq",
    version,
    about = "QUBO formulation toolkit for balanced-settlement problems on multigraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance file
    Gen {
        #[arg(long)]
        arcs: usize,
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Integer weight range lo:hi
        #[arg(long, default_value = "1:18")]
        weights: String,
        /// Net-value window fl:cap per node
        #[arg(long, default_value = "-7:8")]
        window: String,
        #[arg(long, default_value_t = 5)]
        max_degree: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn an instance into a QUBO file and print the slack summary
    Formulate {
        #[arg(long)]
        method: String,
        #[arg(long, default_value = "2")]
        gamma: String,
        #[arg(long, default_value = "local")]
        lambda: String,
        /// Synthesize penalties for nodes with more than 5 arcs
        #[arg(long)]
        generic_fallback: bool,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Maximize a QUBO file exactly or by simulated annealing
    Solve {
        #[arg(long)]
        method: String,
        #[arg(long)]
        qubo: PathBuf,
        #[arg(long, default_value_t = 24)]
        cap: usize,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[arg(long, default_value_t = 1000)]
        sweeps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check that a QUBO file represents an instance exactly
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        qubo: PathBuf,
    },
    /// Compare formulation methods with the block annealing protocol
    Bench {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "standard,iqpms")]
        methods: String,
        #[arg(long, default_value_t = 16)]
        blocks: usize,
        #[arg(long, default_value_t = 250)]
        runs: usize,
        #[arg(long, default_value_t = 200)]
        sweeps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "2")]
        gamma: String,
        #[arg(long, default_value = "local")]
        lambda: String,
        /// Write raw counts here (stats v1) in addition to the gain table
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the gain table from one or more stats files
    Report {
        #[arg(long = "in", required = true)]
        inputs: Vec<PathBuf>,
    },
}

fn parse_pair(s: &str, what: &str) -> anyhow::Result<(Rat, Rat)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("{what} must look like lo:hi, got '{s}'"))?;
    let lo = parse_rat(a).ok_or_else(|| anyhow!("bad rational '{a}' in {what}"))?;
    let hi = parse_rat(b).ok_or_else(|| anyhow!("bad rational '{b}' in {what}"))?;
    Ok((lo, hi))
}

fn parse_gamma(s: &str) -> anyhow::Result<Rat> {
    parse_rat(s).ok_or_else(|| anyhow!("gamma must be an integer or p/q, got '{s}'"))
}

fn run(cmd: Cmd) -> anyhow::Result<()> {
    match cmd {
        Cmd::Gen {
            arcs,
            nodes,
            seed,
            weights,
            window,
            max_degree,
            out,
        } => {
            let (wlo, whi) = parse_pair(&weights, "--weights")?;
            let (fl, cap) = parse_pair(&window, "--window")?;
            let wlo = settleq::rat::to_i64(&wlo).ok_or_else(|| anyhow!("--weights must be integers"))?;
            let whi = settleq::rat::to_i64(&whi).ok_or_else(|| anyhow!("--weights must be integers"))?;
            let inst = generate_instance(&GenParams {
                n_arcs: arcs,
                n_nodes: nodes,
                weight_lo: wlo,
                weight_hi: whi,
                fl,
                cap,
                max_degree,
                seed,
            })?;
            let report = validate_instance(&inst);
            if !report.is_empty() {
                return Err(Error::Validation(report).into());
            }
            write_instance(&inst, &out)?;
            RunManifest::new("gen")
                .seed(seed)
                .output(&out)?
                .write_alongside(&out)?;
            println!(
                "wrote {} ({} nodes, {} arcs)",
                out.display(),
                inst.graph.nodes.len(),
                inst.n_arcs()
            );
            Ok(())
        }
        Cmd::Formulate {
            method,
            gamma,
            lambda,
            generic_fallback,
            input,
            out,
        } => {
            let inst = read_instance(&input)?;
            let report = validate_instance(&inst);
            if !report.is_empty() {
                return Err(Error::Validation(report).into());
            }
            let params = FormulationParams {
                gamma: parse_gamma(&gamma)?,
                lambda,
                generic_fallback,
            };
            let m = lookup_formulation(&method)?;
            let formulated = m.formulate(&inst, &params)?;
            write_qubo(&formulated.qubo, &out)?;
            RunManifest::new("formulate")
                .input(&input)?
                .output(&out)?
                .write_alongside(&out)?;
            print!("{}", formulated.summary.render());
            println!("wrote {}", out.display());
            Ok(())
        }
        Cmd::Solve {
            method,
            qubo,
            cap,
            runs,
            sweeps,
            seed,
        } => {
            let q = read_qubo(&qubo)?;
            let blocks = BlockIndex::from_qubo(&q);
            let solver = lookup_solver(&method)?;
            let out = solver.solve(
                &q,
                &blocks,
                &SolverOpts {
                    cap,
                    runs,
                    sweeps,
                    seed,
                },
            )?;
            let bits: String = out.x.iter().map(|&b| if b { '1' } else { '0' }).collect();
            println!("x={bits}");
            println!("W={}", format_rat(&out.value));
            Ok(())
        }
        Cmd::Verify { input, qubo } => {
            let inst = read_instance(&input)?;
            let q = read_qubo(&qubo)?;
            let blocks = BlockIndex::from_qubo(&q);
            let report = settleq::iqpms::verify_formulation(&inst, &q, &blocks)?;
            if report.ok {
                println!(
                    "ok: qubo max {} equals instance optimum over {} assignments",
                    format_rat(&report.qubo_max),
                    1u64 << inst.n_arcs()
                );
                Ok(())
            } else {
                for v in &report.violations {
                    eprintln!("violation: {v}");
                }
                Err(Error::Validation(vec![format!(
                    "{} formulation violations (first {} shown)",
                    report.violation_count,
                    report.violations.len()
                )])
                .into())
            }
        }
        Cmd::Bench {
            input,
            methods,
            blocks,
            runs,
            sweeps,
            seed,
            gamma,
            lambda,
            out,
        } => {
            let inst = read_instance(&input)?;
            let name = input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "instance".into());
            let methods: Vec<&str> = methods.split(',').map(|s| s.trim()).collect();
            let params = FormulationParams {
                gamma: parse_gamma(&gamma)?,
                lambda,
                generic_fallback: false,
            };
            let config = AnnealConfig {
                sweeps,
                runs_per_block: runs,
                blocks,
                t_hi: None,
                t_lo: None,
                seed,
            };
            let stats = run_experiment(&inst, &name, &methods, &params, &config)?;
            let all = vec![stats];
            print!("{}", gain_report(&all));
            if let Some(path) = out {
                std::fs::write(&path, write_stats_string(&all))?;
                RunManifest::new("bench")
                    .seed(seed)
                    .input(&input)?
                    .output(&path)?
                    .write_alongside(&path)?;
            }
            Ok(())
        }
        Cmd::Report { inputs } => {
            let mut all = Vec::new();
            for path in &inputs {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                all.extend(read_stats_string(&text, &path.display().to_string())?);
            }
            print!("{}", gain_report(&all));
            Ok(())
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(Error::SlackBudgetExhausted { .. }) | Some(Error::GeneratorStuck(_)) => 3,
        Some(_) => 2,
        None => 2,
    }
}

fn main() {
    if let Ok(threads) = std::env::var("SETTLEQ_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .ok();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            e.print().ok();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e:#}");
        std::process::exit(exit_code_for(&e));
    }
}
