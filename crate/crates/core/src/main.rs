use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fdcrn::harness::{
    emit_plot_script, lemma_suite, phase_check, resolve_jobs, run_experiment, run_fixed_power_sweep,
    summary_path, ExperimentConfig, RunOptions,
};
use fdcrn::optimizer::{ConcavityProbe, Mechanism};
use fdcrn::{Error, Result, SolverConfig};

/// Power control and relay selection experiments for full-duplex cognitive
/// relay networks.
///
/// Exit codes: 0 success, 1 config or argument error, 2 I/O error,
/// 3 internal invariant violation or failed check.
#[derive(Parser)]
#[command(name = "fdcrn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment definition (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV; the summary goes to `<out>.summary.csv`.
    #[arg(long)]
    out: PathBuf,
    /// Omit the timestamp comment so reruns are byte-identical.
    #[arg(long)]
    deterministic: bool,
    /// Worker threads (overrides FDCRN_JOBS; default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep mechanisms, QSIC levels, interference caps and power caps.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Also run the brute-force oracle and report the gap.
        #[arg(long)]
        oracle: bool,
    },
    /// Rate along one power with the other fixed (needs [fixed_power_sweep]).
    FixedPower {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check coordinate concavity and joint (non-)concavity numerically.
    VerifyLemmas {
        /// Takes zeta levels and solver settings from this experiment file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Random scenarios per mechanism.
        #[arg(long, default_value_t = 100)]
        scenarios: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Compare the closed-form optimal relay phase against a phase grid.
    PhaseCheck {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a matplotlib script for a result CSV.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn options(run: &RunArgs) -> Result<(ExperimentConfig, RunOptions)> {
    let config = ExperimentConfig::load(&run.config)?;
    let opts = RunOptions {
        deterministic: run.deterministic,
        jobs: resolve_jobs(run.jobs)?,
    };
    Ok((config, opts))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep { run, oracle } => {
            let (mut config, opts) = options(&run)?;
            config.oracle |= oracle;
            let summary = run_experiment(&config, &run.out, opts)?;
            print!("{summary}");
            println!("rows: {}  summary: {}", run.out.display(), summary_path(&run.out).display());
        }
        Command::FixedPower { run } => {
            let (config, opts) = options(&run)?;
            let summary = run_fixed_power_sweep(&config, &run.out, opts)?;
            print!("{summary}");
            println!("rows: {}  summary: {}", run.out.display(), summary_path(&run.out).display());
        }
        Command::VerifyLemmas {
            config,
            scenarios,
            seed,
            jobs,
        } => {
            let (zetas, solver) = match config {
                Some(path) => {
                    let c = ExperimentConfig::load(&path)?;
                    (c.zeta_list, c.solver)
                }
                None => (vec![0.0, 0.001, 0.01, 0.4], SolverConfig::default()),
            };
            if scenarios == 0 {
                return Err(Error::Config("--scenarios must be at least 1".into()));
            }
            let jobs = resolve_jobs(jobs)?;
            let mut ok = true;
            for mech in [Mechanism::NonCoherent, Mechanism::Coherent] {
                let r = lemma_suite(mech, scenarios, &zetas, seed, &ConcavityProbe::default(), &solver, jobs)?;
                // a zeta list without 0 (or without a positive level) cannot
                // exercise both joint statements
                let need_ideal = zetas.contains(&0.0);
                let need_si = zetas.iter().any(|&z| z > 0.0);
                let pass = r.slices_checked > 0
                    && r.slice_violations == 0
                    && (!need_si || r.witnesses > 0)
                    && (!need_ideal || (r.segments_ideal > 0 && r.ideal_violations == 0));
                ok &= pass;
                println!(
                    "{} {}: {} scenarios, slices {} (violations {}), self-interference segments {} (witnesses {}), ideal segments {} (violations {})",
                    if pass { "PASS" } else { "FAIL" },
                    mech.name(),
                    r.scenarios,
                    r.slices_checked,
                    r.slice_violations,
                    r.segments_with_si,
                    r.witnesses,
                    r.segments_ideal,
                    r.ideal_violations,
                );
            }
            if !ok {
                return Err(Error::Invariant("concavity checks failed".into()));
            }
        }
        Command::PhaseCheck { samples, grid, seed } => {
            if samples == 0 || grid == 0 {
                return Err(Error::Config("--samples and --grid must be at least 1".into()));
            }
            let r = phase_check(samples, grid, seed)?;
            let pass = r.passes(1e-6, 1e-9);
            println!(
                "{} phase: {} components x {} phases, worst grid deficit {:.3e} (tol 1e-6), worst optimum error {:.3e} (tol 1e-9)",
                if pass { "PASS" } else { "FAIL" },
                r.components,
                r.grid_points,
                r.worst_grid_deficit,
                r.worst_optimum_error
            );
            if !pass {
                return Err(Error::Invariant("phase check failed".into()));
            }
        }
        Command::Plot { csv, out } => {
            emit_plot_script(&csv, &out)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
