//! Per-relay power control.
//!
//! The joint problem is non-convex but each coordinate slice is a
//! one-dimensional problem with a unimodal objective over an interval, so
//! [`alternating_optimize`] alternates golden-section searches over the two
//! powers. [`brute_force`] is the grid oracle used to check it.

pub(crate) mod alternating;
mod brute;
mod feasible;
mod golden;
mod lemmas;
mod slice;

pub use alternating::{
    alternating_optimize, alternating_trace, default_inits, solve_ideal, AlternatingTrace,
};
pub use brute::brute_force;
pub use feasible::{feasible_interval, feasible_segments, Interval};
pub use golden::{bisect_boundary, golden_max};
pub use lemmas::{verify_coordinate_concavity, ConcavityProbe, ConcavityReport, Violation};
pub use slice::solve_1d;

use crate::error::{Error, Result};
use crate::model::{
    optimal_phase, ChannelSet, CoherentComponents, PowerAllocation, RelayLink, RelaySolution,
    SystemParams,
};

/// How the relay's signal combines with the source's at the primary receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mechanism {
    NonCoherent,
    Coherent,
}

impl Mechanism {
    pub fn name(self) -> &'static str {
        match self {
            Mechanism::NonCoherent => "noncoherent",
            Mechanism::Coherent => "coherent",
        }
    }
}

/// Objective maximised by each one-dimensional step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    /// The achievable rate with relay noise included.
    #[default]
    Exact,
    /// The high-self-interference surrogate (relay noise dropped). Falls back
    /// to [`Objective::Exact`] for relays with ideal cancellation.
    Surrogate,
}

/// Which power a coordinate slice leaves free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    SourcePower,
    RelayPower,
}

impl Variable {
    pub fn other(self) -> Self {
        match self {
            Variable::SourcePower => Variable::RelayPower,
            Variable::RelayPower => Variable::SourcePower,
        }
    }

    pub fn get(self, a: PowerAllocation) -> f64 {
        match self {
            Variable::SourcePower => a.p_s,
            Variable::RelayPower => a.p_r,
        }
    }

    pub fn set(self, a: &mut PowerAllocation, v: f64) {
        match self {
            Variable::SourcePower => a.p_s = v,
            Variable::RelayPower => a.p_r = v,
        }
    }

    /// Allocation with this variable at `free` and the other at `fixed`.
    pub fn compose(self, free: f64, fixed: f64) -> PowerAllocation {
        match self {
            Variable::SourcePower => PowerAllocation::new(free, fixed),
            Variable::RelayPower => PowerAllocation::new(fixed, free),
        }
    }

    pub fn box_max(self, params: &SystemParams) -> f64 {
        match self {
            Variable::SourcePower => params.p_s_max,
            Variable::RelayPower => params.p_r_max,
        }
    }
}

/// Numerical knobs of the solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Alternating optimisation stops once the relative objective
    /// improvement of a full sweep drops below this.
    pub rel_tol: f64,
    pub max_iters: usize,
    /// Golden-section stopping width relative to the interval width.
    pub golden_tol: f64,
    /// Constraint-boundary bisection width relative to the slice width.
    pub bisect_tol: f64,
    /// Brute-force intervals per axis (`grid_n + 1` points).
    pub grid_n: usize,
    pub refine_rounds: usize,
    /// Sample count used to locate coherent feasible segments.
    pub guard_samples: usize,
    pub objective: Objective,
    /// When coordinate sweeps stall, search over the source power with the
    /// relay power re-optimised at each point, which can move along a
    /// binding interference constraint. Off gives plain coordinate ascent.
    pub profile_search: bool,
    /// Coarse source-power samples that bracket the profile search.
    pub profile_grid: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            max_iters: 100,
            golden_tol: 1e-8,
            bisect_tol: 1e-10,
            grid_n: 200,
            refine_rounds: 2,
            guard_samples: 64,
            objective: Objective::Exact,
            profile_search: true,
            profile_grid: 16,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rel_tol", self.rel_tol),
            ("golden_tol", self.golden_tol),
            ("bisect_tol", self.bisect_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        if self.grid_n == 0 {
            return Err(Error::InvalidArgument("grid_n must be at least 1".into()));
        }
        if self.profile_grid < 2 {
            return Err(Error::InvalidArgument("profile_grid must be at least 2".into()));
        }
        if self.guard_samples < 2 {
            return Err(Error::InvalidArgument("guard_samples must be at least 2".into()));
        }
        Ok(())
    }
}

/// Channels, parameters and interference mechanism of one problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub channels: ChannelSet,
    pub params: SystemParams,
    pub mechanism: Mechanism,
}

impl Scenario {
    pub fn new(channels: ChannelSet, params: SystemParams, mechanism: Mechanism) -> Result<Self> {
        params.validate()?;
        ChannelSet::new(
            channels.h_sr.clone(),
            channels.h_rd.clone(),
            channels.h_rp.clone(),
            channels.h_rr.clone(),
            channels.h_sd,
            channels.h_sp,
        )?;
        Ok(Self {
            channels,
            params,
            mechanism,
        })
    }

    pub fn relay_count(&self) -> usize {
        self.channels.relay_count()
    }

    pub fn link(&self, k: usize) -> Result<RelayLink> {
        RelayLink::new(&self.channels, k, &self.params)
    }

    pub fn with_params(&self, params: SystemParams) -> Self {
        Self {
            channels: self.channels.clone(),
            params,
            mechanism: self.mechanism,
        }
    }

    /// Interference of `a` under this scenario's mechanism.
    pub fn interference(&self, link: &RelayLink, a: PowerAllocation) -> f64 {
        match self.mechanism {
            Mechanism::NonCoherent => link.interference_noncoherent(a),
            Mechanism::Coherent => link.interference_coherent(a),
        }
    }

    /// Box and interference constraints, with no tolerance.
    pub fn is_feasible(&self, link: &RelayLink, a: PowerAllocation) -> bool {
        a.within_box(&self.params) && self.interference(link, a) <= self.params.i_bar
    }

    /// Packs a solution, adding the optimal phase for the coherent mechanism.
    pub(crate) fn solution(
        &self,
        k: usize,
        link: &RelayLink,
        a: PowerAllocation,
        iterations: usize,
        converged: bool,
    ) -> RelaySolution {
        let phi_opt = match self.mechanism {
            Mechanism::NonCoherent => None,
            Mechanism::Coherent => {
                let (big_a, big_b) = link.coherent_phasors(a);
                Some(optimal_phase(&CoherentComponents::new(big_a, big_b)).0)
            }
        };
        RelaySolution {
            relay_index: k,
            p_s: a.p_s,
            p_r: a.p_r,
            phi_opt,
            rate: link.exact_rate(a),
            interference: self.interference(link, a),
            iterations,
            converged,
        }
    }
}
