//! Relay selection: solve every relay independently and keep the best.

use crate::error::Result;
use crate::model::{PowerAllocation, RelayLink, RelaySolution};
use crate::optimizer::alternating::{ideal_with, optimize_with, ProfileCache};
use crate::optimizer::{Scenario, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub best: RelaySolution,
    pub per_relay: Vec<RelaySolution>,
}

impl SelectionResult {
    /// Highest rate, smallest index among ties.
    pub fn from_per_relay(per_relay: Vec<RelaySolution>) -> Self {
        let best = per_relay
            .iter()
            .copied()
            .reduce(|b, s| if s.rate > b.rate { s } else { b })
            .expect("selection needs at least one relay");
        Self { best, per_relay }
    }
}

/// Solves relay `k`, trying the default starts plus every feasible
/// allocation in `extra_inits`, and keeps the best rate (earliest on ties).
pub fn solve_relay(
    scenario: &Scenario,
    k: usize,
    config: &SolverConfig,
    extra_inits: &[PowerAllocation],
) -> Result<RelaySolution> {
    let link = scenario.link(k)?;
    let cache = ProfileCache::default();
    let mut best = if link.zeta_hat == 0.0 {
        ideal_with(scenario, k, config, &cache)?
    } else {
        optimize_with(scenario, k, config, None, &cache)?
    };
    for &init in extra_inits {
        if !scenario.is_feasible(&link, init) {
            continue;
        }
        let sol = optimize_with(scenario, k, config, Some(init), &cache)?;
        if sol.rate > best.rate {
            best = sol;
        }
    }
    Ok(best)
}

/// Optimises every relay and returns the rate-maximising one.
pub fn select_relay(scenario: &Scenario, config: &SolverConfig) -> Result<SelectionResult> {
    select_relay_from(scenario, config, &[])
}

/// [`select_relay`] with extra warm starts: relay `k` is also started from
/// `k`'s solution in each of `warm`, when that point is feasible here.
///
/// A warm start's objective can only improve, so if `warm` holds the
/// solution of a scenario whose feasible set is contained in this one the
/// result rate is at least that solution's rate.
pub fn select_relay_from(
    scenario: &Scenario,
    config: &SolverConfig,
    warm: &[&SelectionResult],
) -> Result<SelectionResult> {
    let per_relay = (0..scenario.relay_count())
        .map(|k| {
            let inits: Vec<PowerAllocation> = warm
                .iter()
                .filter_map(|w| w.per_relay.get(k))
                .filter(|s| s.rate > 0.0)
                .map(|s| s.alloc())
                .collect();
            solve_relay(scenario, k, config, &inits)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SelectionResult::from_per_relay(per_relay))
}

/// Half-duplex baseline for relay `k`: the rate increases in both powers and
/// each phase is capped on its own, so the optimum is the per-phase corner.
pub fn solve_half_duplex(scenario: &Scenario, k: usize) -> Result<RelaySolution> {
    let link = scenario.link(k)?;
    Ok(half_duplex_corner(&link, k))
}

fn half_duplex_corner(link: &RelayLink, k: usize) -> RelaySolution {
    let p = &link.params;
    let cap = |gain: f64, max: f64| if gain > 0.0 { (p.i_bar / gain).min(max) } else { max };
    let mut a = PowerAllocation::new(cap(link.g_sp, p.p_s_max), cap(link.g_rp, p.p_r_max));
    // shave rounding so each phase sits inside its cap
    while link.g_sp * a.p_s > p.i_bar {
        a.p_s = a.p_s.next_down();
    }
    while link.g_rp * a.p_r > p.i_bar {
        a.p_r = a.p_r.next_down();
    }
    if !(a.p_s >= 0.0 && a.p_r >= 0.0) {
        return RelaySolution::infeasible(k);
    }
    RelaySolution {
        relay_index: k,
        p_s: a.p_s,
        p_r: a.p_r,
        phi_opt: None,
        rate: link.hd_rate(a),
        interference: (link.g_sp * a.p_s).max(link.g_rp * a.p_r),
        iterations: 0,
        converged: true,
    }
}

pub fn select_half_duplex(scenario: &Scenario) -> Result<SelectionResult> {
    let per_relay = (0..scenario.relay_count())
        .map(|k| solve_half_duplex(scenario, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(SelectionResult::from_per_relay(per_relay))
}
