use super::{Mechanism, Scenario, SolverConfig};
use crate::error::Result;
use crate::model::{PowerAllocation, RelayLink, RelaySolution};

/// Subdivisions per axis of each local refinement grid.
const REFINE_N: usize = 20;

struct Axis {
    amplitude: bool,
    max: f64,
    /// Upper end of the scanned range, in powers; at most `max`.
    hi: f64,
}

impl Axis {
    fn power(&self, t: f64) -> f64 {
        if self.amplitude {
            (t * t).min(self.max)
        } else {
            t
        }
    }

    fn param_max(&self) -> f64 {
        if self.amplitude {
            self.hi.sqrt()
        } else {
            self.hi
        }
    }
}

/// Best feasible point of a `(n+1) x (n+1)` grid over `[s0, s1] x [r0, r1]`
/// in search coordinates, scanning source-major so that equal rates keep the
/// lexicographically smallest point.
#[allow(clippy::too_many_arguments)]
fn scan(
    scenario: &Scenario,
    link: &RelayLink,
    sa: &Axis,
    ra: &Axis,
    (s0, s1): (f64, f64),
    (r0, r1): (f64, f64),
    n: usize,
    best: &mut Option<(f64, f64, f64)>,
) {
    let at = |lo: f64, hi: f64, i: usize| {
        if i == n {
            hi
        } else {
            lo + (hi - lo) * i as f64 / n as f64
        }
    };
    for i in 0..=n {
        let ts = at(s0, s1, i);
        let p_s = sa.power(ts);
        for j in 0..=n {
            let tr = at(r0, r1, j);
            let a = PowerAllocation::new(p_s, ra.power(tr));
            if !scenario.is_feasible(link, a) {
                continue;
            }
            let rate = link.exact_rate(a);
            let better = match best {
                None => true,
                Some((bs, br, bv)) => {
                    rate > *bv || (rate == *bv && (ts, tr) < (*bs, *br))
                }
            };
            if better {
                *best = Some((ts, tr, rate));
            }
        }
    }
}

/// Grid-search oracle for relay `k`.
///
/// Evaluates the exact rate on a `grid_n x grid_n` grid over the power box
/// (amplitudes for the coherent mechanism), keeps the best feasible point,
/// then refines `refine_rounds` times on a local grid spanning one step
/// either side of the incumbent.
///
/// Non-coherently each power alone must respect the interference cap, so
/// the grid spans only the box part below those single-power limits; every
/// dropped point is infeasible. At tight caps this keeps the grid from
/// stepping over the whole feasible set.
pub fn brute_force(scenario: &Scenario, k: usize, config: &SolverConfig) -> Result<RelaySolution> {
    config.validate()?;
    let link = scenario.link(k)?;
    let p = &scenario.params;
    let amplitude = scenario.mechanism == Mechanism::Coherent;
    let limit = |gain: f64, max: f64| {
        if amplitude || gain <= 0.0 {
            max
        } else {
            (p.i_bar / gain).clamp(0.0, max)
        }
    };
    let sa = Axis {
        amplitude,
        max: p.p_s_max,
        hi: limit(link.g_sp, p.p_s_max),
    };
    let ra = Axis {
        amplitude,
        max: p.p_r_max,
        hi: limit(link.g_rp * (1.0 + p.zeta), p.p_r_max),
    };
    let n = config.grid_n;
    let mut best = None;
    scan(
        scenario,
        &link,
        &sa,
        &ra,
        (0.0, sa.param_max()),
        (0.0, ra.param_max()),
        n,
        &mut best,
    );

    let mut step_s = sa.param_max() / n as f64;
    let mut step_r = ra.param_max() / n as f64;
    for _ in 0..config.refine_rounds {
        let Some((ts, tr, _)) = best else { break };
        let s_rng = ((ts - step_s).max(0.0), (ts + step_s).min(sa.param_max()));
        let r_rng = ((tr - step_r).max(0.0), (tr + step_r).min(ra.param_max()));
        scan(scenario, &link, &sa, &ra, s_rng, r_rng, REFINE_N, &mut best);
        step_s = (s_rng.1 - s_rng.0) / REFINE_N as f64;
        step_r = (r_rng.1 - r_rng.0) / REFINE_N as f64;
    }

    Ok(match best {
        Some((ts, tr, _)) => {
            let a = PowerAllocation::new(sa.power(ts), ra.power(tr));
            scenario.solution(k, &link, a, config.refine_rounds + 1, true)
        }
        None => RelaySolution::infeasible(k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gen_channels, ChannelSet, ChannelVariances, SystemParams};
    use num_complex::Complex64;

    #[test]
    fn unconstrained_corner() {
        let ch = ChannelSet::uniform(1, Complex64::new(1.0, 0.0));
        let params = SystemParams {
            zeta: 0.0,
            sigma2_r: 1.0,
            sigma2_d: 1.0,
            p_s_max: 10.0,
            p_r_max: 10.0,
            i_bar: f64::INFINITY,
        };
        for mech in [Mechanism::NonCoherent, Mechanism::Coherent] {
            let sc = Scenario::new(ch.clone(), params, mech).unwrap();
            let sol = brute_force(&sc, 0, &SolverConfig::default()).unwrap();
            assert_eq!((sol.p_s, sol.p_r), (10.0, 10.0));
            assert!(sol.converged);
        }
    }

    #[test]
    fn result_is_feasible_and_deterministic() {
        let cfg = SolverConfig {
            grid_n: 60,
            ..SolverConfig::default()
        };
        for seed in 0..20 {
            let ch = gen_channels(seed, 1, &ChannelVariances::default()).unwrap();
            let mech = if seed % 2 == 0 {
                Mechanism::Coherent
            } else {
                Mechanism::NonCoherent
            };
            let sc = Scenario::new(ch, SystemParams::from_db(0.01, 20.0, 3.0), mech).unwrap();
            let a = brute_force(&sc, 0, &cfg).unwrap();
            let b = brute_force(&sc, 0, &cfg).unwrap();
            assert_eq!(a, b);
            assert!(a.interference <= sc.params.i_bar * (1.0 + 1e-9));
            assert!(a.p_s <= sc.params.p_s_max && a.p_r <= sc.params.p_r_max);
        }
    }

    #[test]
    fn infeasible_grid() {
        let ch = ChannelSet::uniform(1, Complex64::new(1.0, 0.0));
        let mut params = SystemParams::from_db(0.0, 10.0, 0.0);
        params.i_bar = -1.0;
        let sc = Scenario {
            channels: ch,
            params,
            mechanism: Mechanism::NonCoherent,
        };
        let sol = brute_force(&sc, 0, &SolverConfig::default()).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.rate, 0.0);
    }
}
