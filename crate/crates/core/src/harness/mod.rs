//! Seeded Monte-Carlo sweeps.
//!
//! Trial `t` draws its channels from seed `base_seed + t` and reuses them in
//! every sweep cell, so cells can be compared trial by trial. Trials run on
//! a worker pool and rows are sorted by (cell, trial) before writing.

mod checks;
mod config;
mod fixed_power;
mod plot;
mod row;
mod sweep;

use std::fmt;
use std::path::{Path, PathBuf};

pub use checks::{lemma_suite, phase_check, LemmaSuiteReport, PhaseCheckReport};
pub use config::{ExperimentConfig, FixedPowerSweep, FixedVar, MechanismKind};
pub use fixed_power::{curves, run_fixed_power_sweep};
pub use plot::emit_plot_script;
pub use row::{format_float, gap_percent, read_rows, write_rows, ResultRow, COLUMNS, SCHEMA_VERSION};
pub use sweep::{run_experiment, run_trial};

use crate::error::{Error, Result};

pub const JOBS_ENV: &str = "FDCRN_JOBS";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Omit the timestamp comment so reruns are byte-identical.
    pub deterministic: bool,
    /// Worker count; `None` uses every core.
    pub jobs: Option<usize>,
}

/// Worker count from the command line, else from `FDCRN_JOBS`.
pub fn resolve_jobs(cli: Option<usize>) -> Result<Option<usize>> {
    let jobs = match cli {
        Some(n) => Some(n),
        None => match std::env::var(JOBS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("{JOBS_ENV}={v:?} is not a worker count")))?,
            ),
            Err(_) => None,
        },
    };
    if jobs == Some(0) {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    Ok(jobs)
}

pub(crate) fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Aggregates of one sweep cell over its trials.
#[derive(Debug, Clone, PartialEq)]
#[allow(non_snake_case)]
pub struct CellSummary {
    pub mechanism: MechanismKind,
    pub zeta: f64,
    pub I_bar_P_dB: f64,
    pub P_max_dB: f64,
    pub sweep_dB: Option<f64>,
    pub trials: usize,
    pub mean_rate: f64,
    pub mean_gap_percent: Option<f64>,
    pub max_gap_percent: Option<f64>,
    /// Share of rows whose solve converged (feasible, for sweep points).
    pub converged_fraction: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub cells: Vec<CellSummary>,
}

impl Summary {
    /// Groups consecutive rows of equal cell; rows come sorted by cell.
    pub fn from_rows(rows: &[ResultRow]) -> Self {
        let same = |a: &ResultRow, b: &ResultRow| {
            a.mechanism == b.mechanism
                && a.zeta == b.zeta
                && a.I_bar_P_dB == b.I_bar_P_dB
                && a.P_max_dB == b.P_max_dB
                && a.sweep_dB == b.sweep_dB
        };
        let cells = rows
            .chunk_by(|a, b| same(a, b))
            .map(|group| {
                let n = group.len() as f64;
                let gaps: Vec<f64> = group.iter().filter_map(|r| r.gap_percent).collect();
                let r0 = &group[0];
                CellSummary {
                    mechanism: r0.mechanism,
                    zeta: r0.zeta,
                    I_bar_P_dB: r0.I_bar_P_dB,
                    P_max_dB: r0.P_max_dB,
                    sweep_dB: r0.sweep_dB,
                    trials: group.len(),
                    mean_rate: group.iter().map(|r| r.rate).sum::<f64>() / n,
                    mean_gap_percent: (!gaps.is_empty())
                        .then(|| gaps.iter().sum::<f64>() / gaps.len() as f64),
                    max_gap_percent: gaps.iter().copied().reduce(f64::max),
                    converged_fraction: group.iter().filter(|r| r.converged).count() as f64 / n,
                }
            })
            .collect();
        Self { cells }
    }

    pub fn cell(&self, mechanism: MechanismKind, zeta: f64, i_bar_db: f64, p_max_db: f64) -> Option<&CellSummary> {
        self.cells.iter().find(|c| {
            c.mechanism == mechanism && c.zeta == zeta && c.I_bar_P_dB == i_bar_db && c.P_max_dB == p_max_db
        })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
        w.write_record([
            "schema_version",
            "mechanism",
            "zeta",
            "I_bar_P_dB",
            "P_max_dB",
            "sweep_dB",
            "trials",
            "mean_rate",
            "mean_gap_percent",
            "max_gap_percent",
            "converged_fraction",
        ])?;
        let opt = |x: Option<f64>| x.map(format_float).unwrap_or_default();
        for c in &self.cells {
            w.write_record([
                SCHEMA_VERSION.to_string(),
                c.mechanism.name().to_string(),
                format_float(c.zeta),
                format_float(c.I_bar_P_dB),
                format_float(c.P_max_dB),
                opt(c.sweep_dB),
                c.trials.to_string(),
                format_float(c.mean_rate),
                opt(c.mean_gap_percent),
                opt(c.max_gap_percent),
                format_float(c.converged_fraction),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<12} {:>7} {:>8} {:>8} {:>8} {:>7} {:>10} {:>9} {:>9} {:>6}",
            "mechanism", "zeta", "Ibar_dB", "Pmax_dB", "sweep_dB", "trials", "mean_rate", "mean_gap%", "max_gap%", "conv"
        )?;
        let opt = |x: Option<f64>, p: usize| x.map_or("-".to_string(), |v| format!("{v:.p$}"));
        for c in &self.cells {
            writeln!(
                f,
                "{:<12} {:>7} {:>8} {:>8} {:>8} {:>7} {:>10.4} {:>9} {:>9} {:>6.3}",
                c.mechanism.name(),
                format_float(c.zeta),
                format_float(c.I_bar_P_dB),
                format_float(c.P_max_dB),
                opt(c.sweep_dB, 1),
                c.trials,
                c.mean_rate,
                opt(c.mean_gap_percent, 4),
                opt(c.max_gap_percent, 4),
                c.converged_fraction,
            )?;
        }
        Ok(())
    }
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        kind => Error::Invariant(format!("CSV writer on {}: {kind:?}", path.display())),
    }
}

/// `<out>.summary.csv`, next to the row CSV.
pub fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".summary.csv");
    out.with_file_name(name)
}
