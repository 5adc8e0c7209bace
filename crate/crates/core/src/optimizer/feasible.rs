use super::golden::{bisect_boundary, golden_max};
use super::slice::Slice;
use super::{Mechanism, Scenario, SolverConfig, Variable};
use crate::error::{Error, Result};

/// Closed power interval `[lo, hi]`; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const EMPTY: Self = Self {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    // NaN bounds count as empty
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn is_empty(&self) -> bool {
        !(self.lo <= self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// The feasible set of `free_var` with the other power fixed, when it is a
/// single interval.
///
/// `Ok(None)` means nothing on the slice is feasible. A coherent slice whose
/// feasible set splits into several pieces is reported as
/// [`Error::NonContiguousFeasibleSet`]; the solvers use
/// [`feasible_segments`] instead, which returns every piece.
pub fn feasible_interval(
    scenario: &Scenario,
    k: usize,
    free_var: Variable,
    fixed_value: f64,
    config: &SolverConfig,
) -> Result<Option<Interval>> {
    let segs = feasible_segments(scenario, k, free_var, fixed_value, None, config)?;
    match segs.len() {
        0 => Ok(None),
        1 => Ok(Some(segs[0])),
        n => Err(Error::NonContiguousFeasibleSet { segments: n }),
    }
}

/// Disjoint feasible intervals of `free_var` along the slice, ascending.
///
/// Non-coherent slices are solved in closed form. Coherent slices are
/// sampled on `config.guard_samples` amplitudes (plus `hint`, a power known
/// to be feasible), local minima of the interference between samples are
/// probed for narrow feasible windows, and every feasible/infeasible
/// transition is bisected to `config.bisect_tol`. Endpoints are always on
/// the feasible side.
pub fn feasible_segments(
    scenario: &Scenario,
    k: usize,
    free_var: Variable,
    fixed_value: f64,
    hint: Option<f64>,
    config: &SolverConfig,
) -> Result<Vec<Interval>> {
    let slice = Slice::new(scenario, k, free_var, fixed_value)?;
    Ok(match scenario.mechanism {
        Mechanism::NonCoherent => noncoherent_segment(&slice).into_iter().collect(),
        Mechanism::Coherent => coherent_segments(&slice, hint, config),
    })
}

fn noncoherent_segment(slice: &Slice<'_>) -> Option<Interval> {
    let link = &slice.link;
    let params = &slice.scenario.params;
    let (own_gain, used) = match slice.free {
        Variable::SourcePower => (
            link.g_sp,
            link.g_rp * slice.fixed * (1.0 + params.zeta),
        ),
        Variable::RelayPower => (link.g_rp * (1.0 + params.zeta), link.g_sp * slice.fixed),
    };
    let residual = params.i_bar - used;
    if residual < 0.0 {
        return None;
    }
    let box_max = slice.box_max();
    let mut hi = if own_gain == 0.0 {
        box_max
    } else {
        (residual / own_gain).min(box_max)
    };
    // rounding in the division can land a hair outside the constraint
    while hi > 0.0 && !slice.feasible(hi) {
        hi = f64::min(hi * (1.0 - 4.0 * f64::EPSILON), hi - f64::MIN_POSITIVE).max(0.0);
    }
    if !slice.feasible(hi) {
        return None;
    }
    Some(Interval::new(0.0, hi))
}

fn coherent_segments(slice: &Slice<'_>, hint: Option<f64>, config: &SolverConfig) -> Vec<Interval> {
    let t_max = slice.param_of(slice.box_max());
    let n = config.guard_samples;
    let slack_at = |t: f64| slice.slack(slice.power_at(t));

    let mut pts: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let t = if i == n { t_max } else { t_max * i as f64 / n as f64 };
            (t, slack_at(t))
        })
        .collect();
    if let Some(h) = hint {
        let t = slice.param_of(h);
        if (0.0..=t_max).contains(&t) {
            pts.push((t, slack_at(t)));
        }
    }

    // Narrow feasible windows can hide between two infeasible samples around
    // a sampled local minimum of the slack.
    let width = t_max / n as f64;
    let mut probes = Vec::new();
    for i in 0..=n {
        let s = pts[i].1;
        if s <= 0.0 {
            continue;
        }
        let left = if i > 0 { pts[i - 1].1 } else { f64::INFINITY };
        let right = if i < n { pts[i + 1].1 } else { f64::INFINITY };
        if s <= left && s <= right {
            let a = (pts[i].0 - width).max(0.0);
            let b = (pts[i].0 + width).min(t_max);
            let (t, neg_slack) = golden_max(|t| -slack_at(t), a, b, 1e-6);
            if -neg_slack <= 0.0 {
                probes.push((t, -neg_slack));
            }
        }
    }
    pts.extend(probes);
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);

    let feasible_t = |t: f64| slice.feasible(slice.power_at(t));
    let tol = config.bisect_tol * t_max.max(f64::MIN_POSITIVE);
    let mut out: Vec<Interval> = Vec::new();
    let mut i = 0;
    while i < pts.len() {
        if pts[i].1 > 0.0 || !feasible_t(pts[i].0) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < pts.len() && pts[j + 1].1 <= 0.0 && feasible_t(pts[j + 1].0) {
            j += 1;
        }
        let lo_t = if i == 0 {
            pts[0].0
        } else {
            bisect_boundary(feasible_t, pts[i].0, pts[i - 1].0, tol)
        };
        let hi_t = if j + 1 == pts.len() {
            pts[j].0
        } else {
            bisect_boundary(feasible_t, pts[j].0, pts[j + 1].0, tol)
        };
        let seg = Interval::new(slice.power_at(lo_t), slice.power_at(hi_t));
        match out.last_mut() {
            Some(last) if seg.lo <= last.hi => last.hi = last.hi.max(seg.hi),
            _ => out.push(seg),
        }
        i = j + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gen_channels, ChannelSet, ChannelVariances, PowerAllocation, SystemParams};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_noncoherent(i_bar: f64, p_max: f64) -> Scenario {
        let ch = ChannelSet::uniform(1, Complex64::new(1.0, 0.0));
        let params = SystemParams {
            zeta: 0.0,
            sigma2_r: 1.0,
            sigma2_d: 1.0,
            p_s_max: p_max,
            p_r_max: p_max,
            i_bar,
        };
        Scenario::new(ch, params, Mechanism::NonCoherent).unwrap()
    }

    #[test]
    fn constraint_consumed_by_fixed_power() {
        let sc = unit_noncoherent(2.0, 5.0);
        let cfg = SolverConfig::default();
        let iv = feasible_interval(&sc, 0, Variable::RelayPower, 2.0, &cfg).unwrap();
        assert_eq!(iv, Some(Interval::new(0.0, 0.0)));
    }

    #[test]
    fn linear_solve() {
        let sc = unit_noncoherent(2.0, 5.0);
        let cfg = SolverConfig::default();
        let iv = feasible_interval(&sc, 0, Variable::RelayPower, 1.0, &cfg).unwrap();
        assert_eq!(iv, Some(Interval::new(0.0, 1.0)));
        let iv = feasible_interval(&sc, 0, Variable::SourcePower, 0.5, &cfg).unwrap();
        assert_eq!(iv, Some(Interval::new(0.0, 1.5)));
        let iv = feasible_interval(&sc, 0, Variable::SourcePower, 0.0, &cfg).unwrap();
        assert_eq!(iv, Some(Interval::new(0.0, 2.0)));
    }

    #[test]
    fn box_clips_and_overshoot_empties() {
        let sc = unit_noncoherent(100.0, 5.0);
        let cfg = SolverConfig::default();
        let iv = feasible_interval(&sc, 0, Variable::RelayPower, 1.0, &cfg).unwrap();
        assert_eq!(iv, Some(Interval::new(0.0, 5.0)));
        let sc = unit_noncoherent(1.0, 5.0);
        let iv = feasible_interval(&sc, 0, Variable::RelayPower, 3.0, &cfg).unwrap();
        assert_eq!(iv, None);
    }

    #[test]
    fn fixed_value_outside_box_rejected() {
        let sc = unit_noncoherent(1.0, 5.0);
        let r = feasible_interval(&sc, 0, Variable::RelayPower, 6.0, &SolverConfig::default());
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn coherent_segments_are_tight() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let cfg = SolverConfig::default();
        let mut seen = 0;
        for trial in 0..60 {
            let ch = gen_channels(trial, 1, &ChannelVariances::default()).unwrap();
            let i_db = [0.0, 4.0, 10.0][trial as usize % 3];
            let params = SystemParams::from_db(0.01, 20.0, i_db);
            let sc = Scenario::new(ch, params, Mechanism::Coherent).unwrap();
            let link = sc.link(0).unwrap();
            let free = if rng.random::<bool>() {
                Variable::SourcePower
            } else {
                Variable::RelayPower
            };
            let fixed = rng.random_range(0.0..params.p_s_max);
            let segs = feasible_segments(&sc, 0, free, fixed, None, &cfg).unwrap();
            let feasible = |v: f64| {
                sc.interference(&link, free.compose(v, fixed)) <= params.i_bar + 1e-8
            };
            for s in &segs {
                seen += 1;
                for i in 0..=200 {
                    let v = s.lo + (s.hi - s.lo) * i as f64 / 200.0;
                    assert!(feasible(v), "trial {trial}: {v} in {s:?} infeasible");
                }
                let eps = 1e-6 * params.p_s_max;
                if s.lo > eps {
                    assert!(!feasible(s.lo - eps), "trial {trial}: below {s:?} feasible");
                }
                if s.hi < params.p_s_max - eps {
                    assert!(!feasible(s.hi + eps), "trial {trial}: above {s:?} feasible");
                }
            }
        }
        assert!(seen > 30);
    }

    #[test]
    fn hint_point_is_covered() {
        let cfg = SolverConfig::default();
        for trial in 0..30 {
            let ch = gen_channels(100 + trial, 1, &ChannelVariances::default()).unwrap();
            let params = SystemParams::from_db(0.001, 20.0, 2.0);
            let sc = Scenario::new(ch, params, Mechanism::Coherent).unwrap();
            let link = sc.link(0).unwrap();
            // a feasible point on the |A| = |B| ridge, found by scanning
            let fixed = 40.0;
            let hint = (0..=20_000)
                .map(|i| 100.0 * i as f64 / 20_000.0)
                .find(|&v| sc.is_feasible(&link, PowerAllocation::new(fixed, v)) && v > 0.0);
            if let Some(h) = hint {
                let segs =
                    feasible_segments(&sc, 0, Variable::RelayPower, fixed, Some(h), &cfg).unwrap();
                assert!(segs.iter().any(|s| s.contains(h)), "trial {trial}");
            }
        }
    }
}
