//! Numerical checks of the convexity structure the solver relies on.
//!
//! Maximising the rate is the same problem as minimising the inverse
//! end-to-end SINR `1/x + 1/y + 1/(xy)`. With residual self-interference the
//! relay-noise-free surrogate of that quantity is convex along each
//! coordinate but not jointly (the `P_R / P_S` cross term); with ideal
//! cancellation the exact one is jointly convex. The probe samples the
//! negated inverse SINR, which is concave wherever those statements hold.
//! The rate itself is only quasi-concave along a slice, so it is not the
//! function probed here.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::feasible::feasible_segments;
use super::{Mechanism, Scenario, SolverConfig, Variable};
use crate::error::{Error, Result};
use crate::model::{PowerAllocation, RelayLink};

/// Sampling plan of [`verify_coordinate_concavity`].
#[derive(Debug, Clone, Copy)]
pub struct ConcavityProbe {
    pub n_slices: usize,
    pub n_points: usize,
    /// Random 2-D segments probed for joint (non-)concavity.
    pub n_segments: usize,
    pub seed: u64,
    /// Second differences above `tolerance * max|objective|` count as
    /// violations.
    pub tolerance: f64,
}

impl Default for ConcavityProbe {
    fn default() -> Self {
        Self {
            n_slices: 100,
            n_points: 50,
            n_segments: 1000,
            seed: 0,
            tolerance: 1e-7,
        }
    }
}

/// A sampled segment whose second differences went positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub start: PowerAllocation,
    pub end: PowerAllocation,
    pub max_second_difference: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ConcavityReport {
    pub zeta_hat: f64,
    pub slices_checked: usize,
    pub slice_violations: Vec<Violation>,
    pub segments_checked: usize,
    pub joint_violations: Vec<Violation>,
}

impl ConcavityReport {
    /// Joint concavity expected (ideal cancellation) or its failure expected.
    pub fn expects_joint_concavity(&self) -> bool {
        self.zeta_hat == 0.0
    }
}

/// Maps search coordinates to powers: amplitudes for the coherent mechanism.
fn power(amplitude: bool, t: f64) -> f64 {
    if amplitude {
        t * t
    } else {
        t
    }
}

fn check_segment(
    link: &RelayLink,
    approx: bool,
    amplitude: bool,
    start: (f64, f64),
    end: (f64, f64),
    n_points: usize,
    tolerance: f64,
) -> Option<Violation> {
    let values: Vec<f64> = (0..n_points)
        .map(|i| {
            let u = i as f64 / (n_points - 1) as f64;
            let ts = start.0 + (end.0 - start.0) * u;
            let tr = start.1 + (end.1 - start.1) * u;
            let a = PowerAllocation::new(power(amplitude, ts), power(amplitude, tr));
            -link.inverse_sinr(a, approx)
        })
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let worst = values
        .windows(3)
        .map(|w| w[2] - 2.0 * w[1] + w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    (worst > tolerance * scale).then(|| Violation {
        start: PowerAllocation::new(power(amplitude, start.0), power(amplitude, start.1)),
        end: PowerAllocation::new(power(amplitude, end.0), power(amplitude, end.1)),
        max_second_difference: worst,
        scale,
    })
}

/// Probes relay `k` for slice concavity and joint (non-)concavity.
///
/// Slices pick a random free variable and a random fixed value, restrict to
/// each feasible segment (left endpoint nudged off zero, where the inverse
/// SINR is infinite) and test second differences on `n_points` samples.
/// Joint segments join two random feasible points and are kept only when
/// every sample on them is feasible. Coordinates are amplitudes for the
/// coherent mechanism and powers otherwise.
pub fn verify_coordinate_concavity(
    scenario: &Scenario,
    k: usize,
    probe: &ConcavityProbe,
    config: &SolverConfig,
) -> Result<ConcavityReport> {
    if probe.n_points < 3 {
        return Err(Error::InvalidArgument("n_points must be at least 3".into()));
    }
    let link = scenario.link(k)?;
    let approx = link.zeta_hat > 0.0;
    let amplitude = scenario.mechanism == Mechanism::Coherent;
    let param_of = |v: f64| if amplitude { v.sqrt() } else { v };
    let s_max = param_of(scenario.params.p_s_max);
    let r_max = param_of(scenario.params.p_r_max);
    let mut rng = ChaCha8Rng::seed_from_u64(probe.seed);
    let mut report = ConcavityReport {
        zeta_hat: link.zeta_hat,
        ..Default::default()
    };

    let mut attempts = 0;
    while report.slices_checked < probe.n_slices && attempts < probe.n_slices * 50 {
        attempts += 1;
        let free = if rng.random::<bool>() {
            Variable::SourcePower
        } else {
            Variable::RelayPower
        };
        let fixed_max = if free == Variable::SourcePower { r_max } else { s_max };
        let fixed_t = rng.random_range(0.0..=fixed_max);
        if fixed_t == 0.0 {
            continue;
        }
        let fixed = power(amplitude, fixed_t).min(free.other().box_max(&scenario.params));
        let segs = feasible_segments(scenario, k, free, fixed, None, config)?;
        for seg in segs {
            let (lo, hi) = (param_of(seg.lo), param_of(seg.hi));
            if hi - lo <= 1e-9 * fixed_max.max(1.0) || report.slices_checked >= probe.n_slices {
                continue;
            }
            let lo = if lo == 0.0 { (hi - lo) / (probe.n_points as f64) } else { lo };
            let (start, end) = match free {
                Variable::SourcePower => ((lo, fixed_t), (hi, fixed_t)),
                Variable::RelayPower => ((fixed_t, lo), (fixed_t, hi)),
            };
            report.slices_checked += 1;
            if let Some(v) =
                check_segment(&link, approx, amplitude, start, end, probe.n_points, probe.tolerance)
            {
                report.slice_violations.push(v);
            }
        }
    }

    let feasible = |ts: f64, tr: f64| {
        let a = PowerAllocation::new(power(amplitude, ts), power(amplitude, tr));
        scenario.is_feasible(&link, a)
    };
    // A feasible endpoint: random source coordinate within the span the cap
    // allows, then a uniform point of a random feasible relay segment there.
    let source_span = feasible_segments(scenario, k, Variable::SourcePower, 0.0, None, config)?
        .iter()
        .fold(0.0f64, |m, seg| m.max(param_of(seg.hi)));
    let endpoint = |rng: &mut ChaCha8Rng| -> Result<Option<(f64, f64)>> {
        if source_span <= 0.0 {
            return Ok(None);
        }
        let ts = rng.random_range(0.0..=source_span);
        if ts == 0.0 {
            return Ok(None);
        }
        let p_s = power(amplitude, ts).min(scenario.params.p_s_max);
        let segs = feasible_segments(scenario, k, Variable::RelayPower, p_s, None, config)?;
        if segs.is_empty() {
            return Ok(None);
        }
        let seg = segs[rng.random_range(0..segs.len())];
        let tr = rng.random_range(param_of(seg.lo)..=param_of(seg.hi));
        Ok((tr > 0.0).then_some((ts, tr)))
    };
    let mut attempts = 0;
    while report.segments_checked < probe.n_segments && attempts < probe.n_segments * 50 {
        attempts += 1;
        let (Some(start), Some(end)) = (endpoint(&mut rng)?, endpoint(&mut rng)?) else {
            continue;
        };
        let all_feasible = (0..probe.n_points).all(|i| {
            let u = i as f64 / (probe.n_points - 1) as f64;
            feasible(start.0 + (end.0 - start.0) * u, start.1 + (end.1 - start.1) * u)
        });
        if !all_feasible {
            continue;
        }
        report.segments_checked += 1;
        if let Some(v) =
            check_segment(&link, approx, amplitude, start, end, probe.n_points, probe.tolerance)
        {
            report.joint_violations.push(v);
        }
    }
    Ok(report)
}
