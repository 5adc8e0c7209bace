//! Rate-versus-cap sweeps.
//!
//! Within one trial the cells of a full-duplex mechanism are solved in an
//! order where each feasible set contains its predecessors': interference
//! cap and power cap ascending and, non-coherently, `zeta` descending (a
//! larger `zeta` both tightens the constraint and lowers the rate
//! pointwise). Every cell is warm-started from the solutions of its direct
//! predecessors, and the solver only accepts improvements, so the per-trial
//! rate is exactly monotone along those axes.

use std::path::Path;

use rayon::prelude::*;

use super::config::{ExperimentConfig, MechanismKind};
use super::row::{gap_percent, write_rows, ResultRow};
use super::{summary_path, with_pool, RunOptions, Summary};
use crate::error::{Error, Result};
use crate::model::{gen_channels, ChannelSet, SystemParams};
use crate::optimizer::{brute_force, Scenario};
use crate::selection::{select_half_duplex, select_relay_from, SelectionResult};

/// Position of a row in the output: indices into the config lists.
pub(crate) type CellKey = (usize, usize, usize, usize, usize);

pub(crate) fn params(zeta: f64, p_max_db: f64, i_bar_db: f64) -> SystemParams {
    SystemParams::from_db(zeta, p_max_db, i_bar_db)
}

/// Indices of `values` in ascending (or descending) value order, stable.
pub(crate) fn order(values: &[f64], descending: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        let o = values[a].total_cmp(&values[b]);
        if descending {
            o.reverse()
        } else {
            o
        }
    });
    idx
}

fn previous(ord: &[usize], i: usize) -> Option<usize> {
    let pos = ord.iter().position(|&j| j == i)?;
    pos.checked_sub(1).map(|p| ord[p])
}

struct Cell<'a> {
    config: &'a ExperimentConfig,
    trial: usize,
    mechanism: MechanismKind,
    zeta: f64,
    i_bar_db: f64,
    p_max_db: f64,
}

impl Cell<'_> {
    fn row(&self, sel: &SelectionResult, oracle: Option<f64>) -> ResultRow {
        let best = &sel.best;
        ResultRow {
            mechanism: self.mechanism,
            zeta: self.zeta,
            I_bar_P_dB: self.i_bar_db,
            P_max_dB: self.p_max_db,
            trial: self.trial,
            trial_seed: self.config.trial_seed(self.trial),
            selected_relay: best.relay_index,
            P_S: best.p_s,
            P_Rk: best.p_r,
            phi_opt: best.phi_opt,
            rate: best.rate,
            oracle_rate: oracle,
            gap_percent: oracle.and_then(|o| gap_percent(best.rate, o)),
            iterations: best.iterations,
            converged: best.converged,
            fixed: None,
            sweep_dB: None,
        }
    }
}

/// All rows of one trial, keyed by cell.
pub fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<Vec<(CellKey, ResultRow)>> {
    let channels = gen_channels(config.trial_seed(trial), config.K, &config.channels)?;
    let mut out = Vec::new();
    for (mi, &mechanism) in config.mechanisms.iter().enumerate() {
        match mechanism {
            MechanismKind::HalfDuplex => half_duplex_cells(config, trial, mi, &channels, &mut out)?,
            _ => full_duplex_cells(config, trial, mi, mechanism, &channels, &mut out)?,
        }
    }
    Ok(out)
}

fn half_duplex_cells(
    config: &ExperimentConfig,
    trial: usize,
    mi: usize,
    channels: &ChannelSet,
    out: &mut Vec<(CellKey, ResultRow)>,
) -> Result<()> {
    for (zi, &zeta) in config.zeta_list.iter().enumerate() {
        for (ii, &i_bar_db) in config.I_bar_P_dB_list.iter().enumerate() {
            for (pi, &p_max_db) in config.P_max_dB_list.iter().enumerate() {
                let sc = Scenario::new(
                    channels.clone(),
                    params(zeta, p_max_db, i_bar_db),
                    MechanismKind::HalfDuplex.mechanism(),
                )?;
                let sel = select_half_duplex(&sc)?;
                let cell = Cell {
                    config,
                    trial,
                    mechanism: MechanismKind::HalfDuplex,
                    zeta,
                    i_bar_db,
                    p_max_db,
                };
                out.push(((mi, zi, ii, pi, 0), cell.row(&sel, None)));
            }
        }
    }
    Ok(())
}

fn full_duplex_cells(
    config: &ExperimentConfig,
    trial: usize,
    mi: usize,
    mechanism: MechanismKind,
    channels: &ChannelSet,
    out: &mut Vec<(CellKey, ResultRow)>,
) -> Result<()> {
    let (nz, ni, np) = (
        config.zeta_list.len(),
        config.I_bar_P_dB_list.len(),
        config.P_max_dB_list.len(),
    );
    // the coherent interference is not monotone in zeta, so only the
    // non-coherent cells chain across it
    let chain_zeta = mechanism == MechanismKind::NonCoherent;
    let z_ord = order(&config.zeta_list, true);
    let i_ord = order(&config.I_bar_P_dB_list, false);
    let p_ord = order(&config.P_max_dB_list, false);
    let mut solved: Vec<Option<SelectionResult>> = vec![None; nz * ni * np];
    let at = |z: usize, i: usize, p: usize| (z * ni + i) * np + p;

    for &zi in &z_ord {
        for &ii in &i_ord {
            for &pi in &p_ord {
                let (zeta, i_bar_db, p_max_db) = (
                    config.zeta_list[zi],
                    config.I_bar_P_dB_list[ii],
                    config.P_max_dB_list[pi],
                );
                let sc = Scenario::new(
                    channels.clone(),
                    params(zeta, p_max_db, i_bar_db),
                    mechanism.mechanism(),
                )?;
                let mut warm_idx = Vec::with_capacity(3);
                if chain_zeta {
                    warm_idx.extend(previous(&z_ord, zi).map(|z| at(z, ii, pi)));
                }
                warm_idx.extend(previous(&i_ord, ii).map(|i| at(zi, i, pi)));
                warm_idx.extend(previous(&p_ord, pi).map(|p| at(zi, ii, p)));
                let warm: Vec<&SelectionResult> =
                    warm_idx.iter().filter_map(|&j| solved[j].as_ref()).collect();
                let sel = select_relay_from(&sc, &config.solver, &warm)?;
                check_solution(&sc, &sel)?;

                let oracle = if config.oracle {
                    let mut best = 0.0f64;
                    for k in 0..sc.relay_count() {
                        best = best.max(brute_force(&sc, k, &config.solver)?.rate);
                    }
                    Some(best)
                } else {
                    None
                };
                let cell = Cell {
                    config,
                    trial,
                    mechanism,
                    zeta,
                    i_bar_db,
                    p_max_db,
                };
                out.push(((mi, zi, ii, pi, 0), cell.row(&sel, oracle)));
                solved[at(zi, ii, pi)] = Some(sel);
            }
        }
    }
    Ok(())
}

fn check_solution(sc: &Scenario, sel: &SelectionResult) -> Result<()> {
    for s in &sel.per_relay {
        let link = sc.link(s.relay_index)?;
        if !(s.rate.is_finite() && s.rate >= 0.0) {
            return Err(Error::Invariant(format!("relay {} rate {}", s.relay_index, s.rate)));
        }
        if s.rate > 0.0 && !sc.is_feasible(&link, s.alloc()) {
            return Err(Error::Invariant(format!(
                "relay {} solution ({}, {}) violates its constraints",
                s.relay_index, s.p_s, s.p_r
            )));
        }
    }
    Ok(())
}

/// Runs every (mechanism, zeta, cap, power) cell for every trial, writes the
/// rows to `out_path` and the per-cell summary next to it.
pub fn run_experiment(config: &ExperimentConfig, out_path: &Path, opts: RunOptions) -> Result<Summary> {
    config.validate()?;
    let rows = collect_rows(config, opts, run_trial)?;
    check_monotone(config, &rows)?;
    write_rows(out_path, &rows, opts.deterministic)?;
    let summary = Summary::from_rows(&rows);
    summary.write_csv(&summary_path(out_path))?;
    Ok(summary)
}

pub(crate) fn collect_rows(
    config: &ExperimentConfig,
    opts: RunOptions,
    trial_fn: impl Fn(&ExperimentConfig, usize) -> Result<Vec<(CellKey, ResultRow)>> + Sync,
) -> Result<Vec<ResultRow>> {
    let per_trial = with_pool(opts.jobs, || {
        (0..config.trials)
            .into_par_iter()
            .map(|t| trial_fn(config, t))
            .collect::<Result<Vec<_>>>()
    })??;
    let mut keyed: Vec<(CellKey, usize, ResultRow)> = per_trial
        .into_iter()
        .flatten()
        .map(|(key, row)| (key, row.trial, row))
        .collect();
    keyed.sort_by_key(|(key, trial, _)| (*key, *trial));
    Ok(keyed.into_iter().map(|(_, _, r)| r).collect())
}

/// Per-trial monotonicity guaranteed by the warm-start chain.
fn check_monotone(config: &ExperimentConfig, rows: &[ResultRow]) -> Result<()> {
    use std::collections::HashMap;
    let mut by_trial: HashMap<(MechanismKind, usize), Vec<&ResultRow>> = HashMap::new();
    for r in rows {
        by_trial.entry((r.mechanism, r.trial)).or_default().push(r);
    }
    let lookup = |list: &[&ResultRow], z: f64, i: f64, p: f64| {
        list.iter()
            .find(|r| r.zeta == z && r.I_bar_P_dB == i && r.P_max_dB == p)
            .map(|r| r.rate)
    };
    let z_vals = &config.zeta_list;
    let i_vals = &config.I_bar_P_dB_list;
    let p_vals = &config.P_max_dB_list;
    for ((mech, trial), list) in &by_trial {
        for &z in z_vals {
            for &i in i_vals {
                for &p in p_vals {
                    let Some(rate) = lookup(list, z, i, p) else { continue };
                    let mut lower = Vec::new();
                    for &i2 in i_vals.iter().filter(|&&i2| i2 < i) {
                        lower.extend(lookup(list, z, i2, p).map(|r| ("I_bar_P_dB", i2, r)));
                    }
                    for &p2 in p_vals.iter().filter(|&&p2| p2 < p) {
                        lower.extend(lookup(list, z, i, p2).map(|r| ("P_max_dB", p2, r)));
                    }
                    if *mech == MechanismKind::NonCoherent {
                        for &z2 in z_vals.iter().filter(|&&z2| z2 > z) {
                            lower.extend(lookup(list, z2, i, p).map(|r| ("zeta", z2, r)));
                        }
                    }
                    if let Some((axis, v, r)) = lower.into_iter().find(|&(_, _, r)| r > rate) {
                        return Err(Error::Invariant(format!(
                            "{} trial {trial}: rate {rate} at (zeta {z}, I_bar {i} dB, P_max {p} dB) below {r} at {axis} = {v}",
                            mech.name()
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}
