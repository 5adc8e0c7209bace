use std::cell::RefCell;

use super::feasible::{feasible_segments, Interval};
use super::golden::golden_max;
use super::slice::Slice;
use super::{Mechanism, Objective, Scenario, SolverConfig, Variable};
use crate::error::{Error, Result};
use crate::model::{PowerAllocation, RelaySolution};

/// A single alternating run with its per-sweep objective values.
#[derive(Debug, Clone)]
pub struct AlternatingTrace {
    pub solution: RelaySolution,
    /// Slice objective after initialisation and after every sweep.
    pub objective: Vec<f64>,
}

/// Picks the segment whose midpoint scores best, given the slice.
fn best_midpoint(slice: &Slice<'_>, segs: &[Interval], objective: Objective) -> Option<f64> {
    segs.iter()
        .map(|s| s.midpoint().clamp(s.lo, s.hi))
        .filter(|&v| slice.feasible(v))
        .map(|v| (v, slice.objective(objective, v)))
        .fold(None, |best: Option<(f64, f64)>, c| match best {
            Some(b) if b.1 >= c.1 => Some(b),
            _ => Some(c),
        })
        .map(|(v, _)| v)
}

/// Deterministic starting points for relay `k`.
///
/// The first puts the source at its largest feasible power with the relay
/// silent and then moves the relay to the middle of its feasible interval.
/// When the constraint binds that start sits on a zero-rate corner, so a
/// second start uses the middle of the source interval instead.
pub fn default_inits(
    scenario: &Scenario,
    k: usize,
    config: &SolverConfig,
) -> Result<Vec<PowerAllocation>> {
    let src_segs = feasible_segments(scenario, k, Variable::SourcePower, 0.0, None, config)?;
    let Some(src) = src_segs.iter().find(|s| s.lo == 0.0).or(src_segs.first()).copied() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity(2);
    for p_s in [src.hi, src.midpoint().clamp(src.lo, src.hi)] {
        let slice = Slice::new(scenario, k, Variable::RelayPower, p_s)?;
        let segs = feasible_segments(scenario, k, Variable::RelayPower, p_s, Some(0.0), config)?;
        let p_r = best_midpoint(&slice, &segs, config.objective).unwrap_or(0.0);
        let a = PowerAllocation::new(p_s, p_r);
        if scenario.is_feasible(&slice.link, a) && !out.contains(&a) {
            out.push(a);
        }
    }
    Ok(out)
}

/// Best relay power and slice objective with the source at `p_s`.
fn relay_profile(
    scenario: &Scenario,
    k: usize,
    config: &SolverConfig,
    p_s: f64,
) -> Result<Option<(f64, f64)>> {
    let slice = Slice::new(scenario, k, Variable::RelayPower, p_s)?;
    let mut best: Option<(f64, f64)> = None;
    for seg in feasible_segments(scenario, k, Variable::RelayPower, p_s, None, config)? {
        let (x, v) = slice.maximize(seg, config);
        if slice.feasible(x) && best.is_none_or(|b| v > b.1) {
            best = Some((x, v));
        }
    }
    Ok(best)
}

/// Maximises the relay profile over the source power: a coarse grid of
/// `config.profile_grid` intervals, then golden section around the best
/// sample. Coordinate steps cannot travel along a constraint that couples
/// both powers; this step can.
fn profile_step(
    scenario: &Scenario,
    k: usize,
    config: &SolverConfig,
) -> Result<Option<(PowerAllocation, f64)>> {
    let src = Slice::new(scenario, k, Variable::SourcePower, 0.0)?;
    // non-coherently every feasible source power is feasible with the relay
    // silent; coherent cancellation can admit any source power
    let hi = match scenario.mechanism {
        Mechanism::NonCoherent => {
            match feasible_segments(scenario, k, Variable::SourcePower, 0.0, None, config)?.last() {
                Some(seg) => seg.hi,
                None => return Ok(None),
            }
        }
        Mechanism::Coherent => src.box_max(),
    };
    let t_hi = src.param_of(hi);
    let power = |t: f64| src.power_at(t).clamp(0.0, hi);
    let error = RefCell::new(None);
    let value = |t: f64| match relay_profile(scenario, k, config, power(t)) {
        Ok(Some((_, v))) => v,
        Ok(None) => f64::NEG_INFINITY,
        Err(e) => {
            error.borrow_mut().get_or_insert(e);
            f64::NEG_INFINITY
        }
    };

    let n = config.profile_grid;
    let at = |i: usize| if i == n { t_hi } else { t_hi * i as f64 / n as f64 };
    let (mut bi, mut bv) = (0, f64::NEG_INFINITY);
    for i in 0..=n {
        let v = value(at(i));
        if v > bv {
            (bi, bv) = (i, v);
        }
    }
    if bv == f64::NEG_INFINITY {
        return match error.into_inner() {
            Some(e) => Err(e),
            None => Ok(None),
        };
    }
    let (t, _) = golden_max(value, at(bi.saturating_sub(1)), at((bi + 1).min(n)), config.golden_tol);
    if let Some(e) = error.into_inner() {
        return Err(e);
    }
    let mut best: Option<(PowerAllocation, f64)> = None;
    for p_s in [power(t), power(at(bi))] {
        if let Some((p_r, v)) = relay_profile(scenario, k, config, p_s)? {
            if best.is_none_or(|b| v > b.1) {
                best = Some((PowerAllocation::new(p_s, p_r), v));
            }
        }
    }
    Ok(best)
}

/// Profile-step result for one relay. The step does not depend on the
/// current point, so every run on the same scenario and objective shares it.
#[derive(Debug, Default)]
pub(crate) struct ProfileCache(RefCell<Option<(Objective, ProfilePoint)>>);

type ProfilePoint = Option<(PowerAllocation, f64)>;

impl ProfileCache {
    fn get(&self, scenario: &Scenario, k: usize, config: &SolverConfig) -> Result<ProfilePoint> {
        if let Some((objective, r)) = *self.0.borrow() {
            if objective == config.objective {
                return Ok(r);
            }
        }
        let r = profile_step(scenario, k, config)?;
        *self.0.borrow_mut() = Some((config.objective, r));
        Ok(r)
    }
}

/// Runs alternating optimisation from one feasible starting point.
///
/// Each iteration optimises the relay power, then the source power, over
/// every feasible segment of the slice, keeping strict improvements only.
/// With `config.profile_search` a stalled sweep is followed by a profile
/// step before convergence is declared.
pub fn alternating_trace(
    scenario: &Scenario,
    k: usize,
    config: &SolverConfig,
    init: PowerAllocation,
) -> Result<AlternatingTrace> {
    trace_with(scenario, k, config, init, &ProfileCache::default())
}

pub(crate) fn trace_with(
    scenario: &Scenario,
    k: usize,
    config: &SolverConfig,
    init: PowerAllocation,
    cache: &ProfileCache,
) -> Result<AlternatingTrace> {
    config.validate()?;
    let link = scenario.link(k)?;
    if !scenario.is_feasible(&link, init) {
        return Err(Error::InvalidArgument(format!(
            "initial allocation {init:?} is infeasible for relay {k}"
        )));
    }
    let objective = config.objective;
    let score = |a: PowerAllocation| {
        Slice::new(scenario, k, Variable::RelayPower, a.p_s).map(|s| s.objective(objective, a.p_r))
    };

    let mut cur = init;
    let mut f = score(cur)?;
    let mut trace = vec![f];
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=config.max_iters {
        iterations = it;
        let prev = f;
        for var in [Variable::RelayPower, Variable::SourcePower] {
            let fixed = var.other().get(cur);
            let slice = Slice::new(scenario, k, var, fixed)?;
            let segs = feasible_segments(scenario, k, var, fixed, Some(var.get(cur)), config)?;
            for seg in segs {
                let (x, v) = slice.maximize(seg, config);
                if v > f && slice.feasible(x) {
                    f = v;
                    var.set(&mut cur, x);
                }
            }
        }
        if config.profile_search && f - prev <= config.rel_tol * prev.abs() {
            if let Some((a, v)) = cache.get(scenario, k, config)? {
                if v > f && scenario.is_feasible(&link, a) {
                    f = v;
                    cur = a;
                }
            }
        }
        trace.push(f);
        if f - prev <= config.rel_tol * prev.abs() {
            converged = true;
            break;
        }
    }

    if !scenario.is_feasible(&link, cur) {
        return Err(Error::Invariant(format!(
            "alternating optimisation left the feasible set at {cur:?}"
        )));
    }
    Ok(AlternatingTrace {
        solution: scenario.solution(k, &link, cur, iterations, converged),
        objective: trace,
    })
}

/// Maximises relay `k`'s rate by alternating one-dimensional searches over
/// the source and relay powers.
///
/// Without `init` every start from [`default_inits`] is run and the best
/// rate kept (earliest start on ties). A scenario with no feasible point
/// returns a zero solution with `converged = false`.
pub fn alternating_optimize(
    scenario: &Scenario,
    k: usize,
    config: &SolverConfig,
    init: Option<PowerAllocation>,
) -> Result<RelaySolution> {
    optimize_with(scenario, k, config, init, &ProfileCache::default())
}

pub(crate) fn optimize_with(
    scenario: &Scenario,
    k: usize,
    config: &SolverConfig,
    init: Option<PowerAllocation>,
    cache: &ProfileCache,
) -> Result<RelaySolution> {
    let inits = match init {
        Some(a) => vec![a],
        None => default_inits(scenario, k, config)?,
    };
    let mut best: Option<RelaySolution> = None;
    for a in inits {
        let sol = trace_with(scenario, k, config, a, cache)?.solution;
        if best.is_none_or(|b| sol.rate > b.rate) {
            best = Some(sol);
        }
    }
    Ok(best.unwrap_or_else(|| RelaySolution::infeasible(k)))
}

/// Relay `k` with ideal self-interference cancellation, where the problem
/// is equivalent to a jointly convex one and the alternating fixed point is
/// the global optimum.
pub fn solve_ideal(scenario: &Scenario, k: usize, config: &SolverConfig) -> Result<RelaySolution> {
    ideal_with(scenario, k, config, &ProfileCache::default())
}

pub(crate) fn ideal_with(
    scenario: &Scenario,
    k: usize,
    config: &SolverConfig,
    cache: &ProfileCache,
) -> Result<RelaySolution> {
    let link = scenario.link(k)?;
    if link.zeta_hat != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "relay {k} has residual self-interference {}; use alternating_optimize",
            link.zeta_hat
        )));
    }
    let exact = SolverConfig {
        objective: Objective::Exact,
        ..*config
    };
    optimize_with(scenario, k, &exact, None, cache)
}
