//! Command-line entry point: sweeps, learning runs, verification, basis
//! search, and codeword export. Exit codes: 0 success, 1 verification or
//! runtime failure, 2 usage/config errors.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use aqec::codes::search_sc_basis;
use aqec_lab::codeword_io;
use aqec_lab::config::SweepConfig;
use aqec_lab::families::FamilySelection;
use aqec_lab::learn::{classification_line, run_learn, LearnArgs};
use aqec_lab::sweep::{sweep_fidelity, sweep_loss, write_fidelity_csv, write_loss_csv};
use aqec_lab::verify::{run_all, REDISCOVERY_SEEDS};

#[derive(Parser)]
#[command(name = "aqec-lab", version, about = "Noise-adapted code laboratory: sweeps, fits, learning, verification")]
struct Cli {
    /// JSON config file; every command-line flag overrides its field.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct SweepFlags {
    #[arg(long)]
    gamma_min: Option<f64>,
    #[arg(long)]
    gamma_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Comma-separated family tags, e.g. LNCY,NSA_SC,NSA_PC.
    #[arg(long, value_delimiter = ',')]
    families: Option<Vec<String>>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    q: Option<u8>,
    /// Adds a frozen-code curve per adapted family to loss sweeps.
    #[arg(long)]
    gamma0: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fit window as "min,max".
    #[arg(long)]
    window: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep L1/L2 losses per family over the noise grid (CSV).
    SweepLoss(SweepFlags),
    /// Sweep plan, oracle, and closed-form fidelities per family (CSV).
    SweepFidelity(SweepFlags),
    /// Run variational code learning for one or more seeds.
    Learn {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = aqec_lab::verify::REDISCOVERY_GAMMA0)]
        gamma0: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20000)]
        max_steps: usize,
        /// Number of consecutive seeds to run in parallel.
        #[arg(long, default_value_t = 1)]
        batch: usize,
        /// Output directory for JSON reports and codeword files.
        #[arg(long, default_value = "learn-out")]
        out: PathBuf,
    },
    /// Run the full verification suite; exit 0 only if every check passes.
    Verify {
        /// Seeds in the rediscovery batch.
        #[arg(long, default_value_t = REDISCOVERY_SEEDS)]
        seeds: usize,
    },
    /// Deterministic shift-orbit basis search.
    SearchBasis {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        q: u8,
        /// Stop as soon as q^k classes are found.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Write one family's codewords at a fixed strength as JSON.
    ExportCode {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        q: u8,
        #[arg(long, default_value_t = 0.05)]
        gamma: f64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

type CmdResult = Result<ExitCode, Failure>;

fn usage<T>(e: anyhow::Error) -> Result<T, Failure> {
    Err(Failure::Usage(e))
}

fn merge_config(config: Option<&PathBuf>, flags: &SweepFlags) -> Result<SweepConfig, Failure> {
    let mut cfg = match config {
        Some(path) => SweepConfig::from_file(path).map_err(Failure::Usage)?,
        None => SweepConfig::default(),
    };
    if let Some(v) = flags.gamma_min {
        cfg.gamma_min = v;
    }
    if let Some(v) = flags.gamma_max {
        cfg.gamma_max = v;
    }
    if let Some(v) = flags.points {
        cfg.points = v;
    }
    if let Some(v) = &flags.families {
        cfg.families = v.clone();
    }
    if let Some(v) = flags.n {
        cfg.n = v;
    }
    if let Some(v) = flags.k {
        cfg.k = v;
    }
    if let Some(v) = flags.q {
        cfg.q = v;
    }
    if let Some(v) = flags.gamma0 {
        cfg.gamma0 = Some(v);
    }
    if let Some(v) = flags.seed {
        cfg.seed = v;
    }
    if let Some(v) = &flags.out {
        cfg.out = Some(v.clone());
    }
    if let Some(spec) = &flags.window {
        let parts: Vec<&str> = spec.split(',').collect();
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| anyhow!("bad window value {s}: {e}"));
        match parts.as_slice() {
            [lo, hi] => cfg.window = Some((parse(lo).map_err(Failure::Usage)?, parse(hi).map_err(Failure::Usage)?)),
            _ => return usage(anyhow!("--window expects \"min,max\", got {spec}")),
        }
    }
    cfg.validate().map_err(Failure::Usage)?;
    // Surface unknown family tags as usage errors before any work starts.
    FamilySelection::resolve_all(&cfg).map_err(Failure::Usage)?;
    Ok(cfg)
}

fn to_output(out: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    match out {
        Some(path) => {
            let f = File::create(path)
                .with_context(|| format!("creating {}", path.display()))
                .map_err(Failure::Runtime)?;
            Ok(Box::new(f))
        }
        None => Ok(Box::new(io::stdout())),
    }
}

fn cmd_sweep_loss(cfg: &SweepConfig) -> CmdResult {
    let rows = sweep_loss(cfg).map_err(Failure::Runtime)?;
    let out = to_output(cfg.out.as_ref())?;
    write_loss_csv(&rows, out).map_err(Failure::Runtime)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep_fidelity(cfg: &SweepConfig) -> CmdResult {
    let rows = sweep_fidelity(cfg).map_err(Failure::Runtime)?;
    let out = to_output(cfg.out.as_ref())?;
    write_fidelity_csv(&rows, out).map_err(Failure::Runtime)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_learn(args: LearnArgs, out: &PathBuf) -> CmdResult {
    if args.k > args.n {
        return usage(anyhow!("k = {} exceeds n = {}", args.k, args.n));
    }
    if args.n == 0 || args.n > 8 {
        return usage(anyhow!("learning supports 1 <= n <= 8, got {}", args.n));
    }
    if !(args.gamma0 > 0.0 && args.gamma0 < 1.0) {
        return usage(anyhow!("gamma0 = {} outside (0, 1)", args.gamma0));
    }
    if args.max_steps == 0 || args.batch == 0 {
        return usage(anyhow!("max_steps and batch must be positive"));
    }
    let summaries = run_learn(&args, out).map_err(Failure::Runtime)?;
    for s in &summaries {
        println!("{}", classification_line(s));
    }
    let best = summaries
        .iter()
        .min_by(|a, b| a.final_loss.total_cmp(&b.final_loss))
        .expect("batch is non-empty");
    println!(
        "best: seed {} with final L1 {:.6e} ({})",
        best.seed, best.final_loss, best.code_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(seeds: usize) -> CmdResult {
    if seeds == 0 {
        return usage(anyhow!("--seeds must be positive"));
    }
    let reports = run_all(seeds).map_err(Failure::Runtime)?;
    let mut all_passed = true;
    for (i, rep) in reports.iter().enumerate() {
        let tag = if rep.passed { "[PASS]" } else { "[FAIL]" };
        println!("{tag} criterion {}: {}", i + 1, rep.name);
        for line in &rep.lines {
            println!("    {line}");
        }
        all_passed &= rep.passed;
    }
    if all_passed {
        println!("verification: all {} criteria passed", reports.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("verification: FAILURES present");
        Ok(ExitCode::from(1))
    }
}

fn cmd_search_basis(n: usize, q: u8, k: Option<usize>) -> CmdResult {
    let basis = search_sc_basis(n, q, k).map_err(|e| Failure::Usage(e.into()))?;
    for (i, class) in basis.classes().iter().enumerate() {
        let members: Vec<String> = class.iter().map(|d| d.to_string()).collect();
        println!("class {i}: {}", members.join(" "));
    }
    println!("classes = {}, k = {}", basis.num_classes(), basis.k());
    Ok(ExitCode::SUCCESS)
}

fn cmd_export_code(family: &str, n: usize, q: u8, gamma: f64, out: Option<&PathBuf>) -> CmdResult {
    let cfg = SweepConfig { n, q, families: vec![family.to_string()], ..SweepConfig::default() };
    let sel = FamilySelection::resolve(family, &cfg).map_err(Failure::Usage)?;
    let code = sel.build_code(gamma).map_err(Failure::Runtime)?;
    let mut w = to_output(out)?;
    w.write_all(codeword_io::to_json_string(&code).as_bytes())
        .context("writing codeword JSON")
        .map_err(Failure::Runtime)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> CmdResult {
    match &cli.command {
        Command::SweepLoss(flags) => {
            let cfg = merge_config(cli.config.as_ref(), flags)?;
            cmd_sweep_loss(&cfg)
        }
        Command::SweepFidelity(flags) => {
            let cfg = merge_config(cli.config.as_ref(), flags)?;
            cmd_sweep_fidelity(&cfg)
        }
        Command::Learn { n, k, gamma0, seed, max_steps, batch, out } => cmd_learn(
            LearnArgs {
                n: *n,
                k: *k,
                gamma0: *gamma0,
                seed: *seed,
                max_steps: *max_steps,
                batch: *batch,
            },
            out,
        ),
        Command::Verify { seeds } => cmd_verify(*seeds),
        Command::SearchBasis { n, q, k } => cmd_search_basis(*n, *q, *k),
        Command::ExportCode { family, n, q, gamma, out } => {
            cmd_export_code(family, *n, *q, *gamma, out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            eprintln!("usage error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
