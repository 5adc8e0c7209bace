//! Rate along one power with the other held fixed.
//!
//! Per trial and series the relay is chosen once, as the best one-dimensional
//! optimum over the swept power, and its rate is then evaluated at every
//! sweep value. Sweep values outside the feasible set give rate 0 and
//! `converged = false`. The two-phase baseline is always included.

use std::path::Path;

use super::config::{ExperimentConfig, FixedVar, MechanismKind};
use super::row::{write_rows, ResultRow};
use super::sweep::{collect_rows, params, CellKey};
use super::{summary_path, RunOptions, Summary};
use crate::error::{Error, Result};
use crate::model::{db_to_linear, gen_channels, RelayLink};
use crate::optimizer::{feasible_segments, solve_1d, Scenario, Variable};

fn free_variable(fix: FixedVar) -> Variable {
    match fix {
        FixedVar::SourcePower => Variable::RelayPower,
        FixedVar::RelayPower => Variable::SourcePower,
    }
}

/// Series of the sweep: the configured ones plus the two-phase baseline.
fn series(config: &ExperimentConfig) -> Vec<MechanismKind> {
    let mut s = config.mechanisms.clone();
    if !s.contains(&MechanismKind::HalfDuplex) {
        s.push(MechanismKind::HalfDuplex);
    }
    s
}

/// Best rate of relay `k` over the free power, for relay selection.
fn best_full_duplex(sc: &Scenario, k: usize, free: Variable, fixed: f64, config: &ExperimentConfig) -> Result<f64> {
    let mut best = 0.0f64;
    for seg in feasible_segments(sc, k, free, fixed, None, &config.solver)? {
        let (v, _) = solve_1d(sc, k, free, fixed, seg, &config.solver)?;
        best = best.max(sc.link(k)?.exact_rate(free.compose(v, fixed)));
    }
    Ok(best)
}

/// The two-phase rate increases in each power, so its best point caps the
/// free power at its own phase limit.
fn best_half_duplex(link: &RelayLink, free: Variable, fixed: f64) -> f64 {
    let p = &link.params;
    let ((gain, max), fixed_gain) = match free {
        Variable::SourcePower => ((link.g_sp, p.p_s_max), link.g_rp),
        Variable::RelayPower => ((link.g_rp, p.p_r_max), link.g_sp),
    };
    if fixed_gain * fixed > p.i_bar {
        return 0.0;
    }
    let mut v = if gain > 0.0 { (p.i_bar / gain).min(max) } else { max };
    // shave rounding so the free phase sits inside its cap
    while v > 0.0 && gain * v > p.i_bar {
        v = v.next_down();
    }
    let a = free.compose(v, fixed);
    if link.hd_feasible(a) {
        link.hd_rate(a)
    } else {
        0.0
    }
}

fn first_argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
        .0
}

fn fixed_power_trial(config: &ExperimentConfig, trial: usize) -> Result<Vec<(CellKey, ResultRow)>> {
    let fp = config
        .fixed_power_sweep
        .as_ref()
        .ok_or_else(|| Error::Config("config has no [fixed_power_sweep] table".into()))?;
    let free = free_variable(fp.fix);
    let fixed = db_to_linear(fp.value_dB);
    let channels = gen_channels(config.trial_seed(trial), config.K, &config.channels)?;
    let mut out = Vec::new();
    for (mi, mechanism) in series(config).into_iter().enumerate() {
        for (zi, &zeta) in config.zeta_list.iter().enumerate() {
            for (ii, &i_bar_db) in config.I_bar_P_dB_list.iter().enumerate() {
                for (pi, &p_max_db) in config.P_max_dB_list.iter().enumerate() {
                    let sc = Scenario::new(
                        channels.clone(),
                        params(zeta, p_max_db, i_bar_db),
                        mechanism.mechanism(),
                    )?;
                    let scores = (0..sc.relay_count())
                        .map(|k| match mechanism {
                            MechanismKind::HalfDuplex => Ok(best_half_duplex(&sc.link(k)?, free, fixed)),
                            _ => best_full_duplex(&sc, k, free, fixed, config),
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    let k = first_argmax(&scores);
                    let link = sc.link(k)?;
                    for (si, &s_db) in fp.sweep_dB.iter().enumerate() {
                        let a = free.compose(db_to_linear(s_db), fixed);
                        let (feasible, rate) = match mechanism {
                            MechanismKind::HalfDuplex => {
                                let ok = a.within_box(&sc.params) && link.hd_feasible(a);
                                (ok, if ok { link.hd_rate(a) } else { 0.0 })
                            }
                            _ => {
                                let ok = sc.is_feasible(&link, a);
                                (ok, if ok { link.exact_rate(a) } else { 0.0 })
                            }
                        };
                        let phi_opt = match mechanism {
                            MechanismKind::Coherent if feasible => sc.solution(k, &link, a, 0, true).phi_opt,
                            _ => None,
                        };
                        let row = ResultRow {
                            mechanism,
                            zeta,
                            I_bar_P_dB: i_bar_db,
                            P_max_dB: p_max_db,
                            trial,
                            trial_seed: config.trial_seed(trial),
                            selected_relay: k,
                            P_S: a.p_s,
                            P_Rk: a.p_r,
                            phi_opt,
                            rate,
                            oracle_rate: None,
                            gap_percent: None,
                            iterations: 0,
                            converged: feasible,
                            fixed: Some(fp.fix),
                            sweep_dB: Some(s_db),
                        };
                        out.push(((mi, zi, ii, pi, si), row));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Writes one row per (series, zeta, cap, power cap, sweep value, trial) and
/// a per-point summary next to `out_path`.
pub fn run_fixed_power_sweep(config: &ExperimentConfig, out_path: &Path, opts: RunOptions) -> Result<Summary> {
    config.validate()?;
    let fp = config
        .fixed_power_sweep
        .as_ref()
        .ok_or_else(|| Error::Config("config has no [fixed_power_sweep] table".into()))?;
    if let Some(p) = config.P_max_dB_list.iter().find(|&&p| fp.value_dB > p) {
        return Err(Error::Config(format!(
            "fixed {} = {} dB exceeds P_max = {p} dB",
            fp.fix.name(),
            fp.value_dB
        )));
    }
    let rows = collect_rows(config, opts, fixed_power_trial)?;
    if let Some(r) = rows.iter().find(|r| !(r.rate.is_finite() && r.rate >= 0.0)) {
        return Err(Error::Invariant(format!("trial {} rate {}", r.trial, r.rate)));
    }
    write_rows(out_path, &rows, opts.deterministic)?;
    let summary = Summary::from_rows(&rows);
    summary.write_csv(&summary_path(out_path))?;
    Ok(summary)
}

/// Per-trial curves of one series, in sweep order: `(trial, rates, feasible)`.
pub fn curves(rows: &[ResultRow], mechanism: MechanismKind, zeta: f64) -> Vec<(usize, Vec<f64>, Vec<bool>)> {
    use std::collections::BTreeMap;
    let mut by_trial: BTreeMap<usize, Vec<&ResultRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.mechanism == mechanism && r.zeta == zeta && r.sweep_dB.is_some()) {
        by_trial.entry(r.trial).or_default().push(r);
    }
    by_trial
        .into_iter()
        .map(|(t, mut list)| {
            list.sort_by(|a, b| a.sweep_dB.unwrap().total_cmp(&b.sweep_dB.unwrap()));
            (t, list.iter().map(|r| r.rate).collect(), list.iter().map(|r| r.converged).collect())
        })
        .collect()
}
