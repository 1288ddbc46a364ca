use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use m2m_cogmac::experiments::{self, io, ExperimentConfig, ExperimentKind};
use m2m_cogmac::Result;

#[derive(Parser)]
#[command(name = "cogmac", version, about = "Estimation and cognitive MAC experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean estimation slots of Method I, Method II and repeated LoF against q.
    EstimateSweep(Common),
    /// Activity probability where each method stops beating repeated LoF.
    ThresholdSweep(Common),
    /// Per-class throughput, delay and energy against λ, proposed and ideal.
    MacSim(Common),
    /// Closed forms next to oracles and Monte Carlo.
    AnalysisTable(Common),
    /// Oracle cross-checks; exits nonzero if any fails.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; defaults apply to anything left out.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Replications per sweep point.
    #[arg(long)]
    reps: Option<u32>,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    jobs: Option<usize>,
}

impl Common {
    fn load(&self, kind: ExperimentKind) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        cfg.require_kind(kind)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(r) = self.reps {
            cfg.reps = r;
        }
        cfg.check()?;
        if let Some(j) = self.jobs {
            rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build_global()
                .expect("thread pool is configured once");
        }
        std::fs::create_dir_all(&self.out)?;
        Ok(cfg)
    }
}

/// `Ok(true)` when every check passed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::EstimateSweep(c) => {
            let cfg = c.load(ExperimentKind::EstimationSweep)?;
            let rows = experiments::estimation_sweep(&cfg)?;
            io::write_estimation(&c.out, &cfg, &rows)?;
            println!("{} rows -> {}", rows.len(), c.out.join("estimation_sweep.csv").display());
            Ok(true)
        }
        Command::ThresholdSweep(c) => {
            let cfg = c.load(ExperimentKind::ThresholdSweep)?;
            let rows = experiments::threshold_sweep(&cfg)?;
            io::write_threshold(&c.out, &cfg, &rows)?;
            for r in &rows {
                println!(
                    "T={} D={}: q_I = {:.3}, q_II = {:.3}",
                    r.types, r.nodes_per_type, r.q_threshold_method1, r.q_threshold_method2
                );
            }
            Ok(true)
        }
        Command::MacSim(c) => {
            let cfg = c.load(ExperimentKind::MacSim)?;
            let runs = experiments::mac_sim_runs(&cfg)?;
            let rows = io::write_mac(&c.out, &cfg, &runs)?;
            println!("{} rows -> {}", rows.len(), c.out.join("mac_sim.csv").display());
            Ok(true)
        }
        Command::AnalysisTable(c) => {
            let cfg = c.load(ExperimentKind::AnalysisTable)?;
            let rows = experiments::analysis_table(&cfg)?;
            io::write_table(&c.out, &cfg, &rows)?;
            let failed: Vec<_> = rows.iter().filter(|r| r.status == "FAIL").collect();
            for r in &failed {
                println!("FAIL {} [{}]: {} vs {:?}", r.quantity, r.params, r.analytic, r.reference);
            }
            println!(
                "{} rows, {} outside tolerance -> {}",
                rows.len(),
                failed.len(),
                c.out.join("analysis_table.csv").display()
            );
            Ok(failed.is_empty())
        }
        Command::Validate(c) => {
            let cfg = c.load(ExperimentKind::Validate)?;
            let report = experiments::validate(&cfg)?;
            for check in &report.checks {
                println!("{check}");
            }
            experiments::write_csv(
                &c.out.join("validate.csv"),
                experiments::CsvTable {
                    experiment: "validate",
                    rows: &report.checks,
                },
                &cfg.to_toml(),
            )?;
            Ok(report.all_passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
