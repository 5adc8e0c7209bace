use super::params::PowerAllocation;

/// Optimised powers and achieved rate for one relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaySolution {
    pub relay_index: usize,
    pub p_s: f64,
    pub p_r: f64,
    /// Optimal relay phase; `None` for the non-coherent mechanism.
    pub phi_opt: Option<f64>,
    /// Exact achievable rate in bits/s/Hz.
    pub rate: f64,
    /// Interference at the primary receiver under the solution's mechanism.
    pub interference: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl RelaySolution {
    /// Zero-power, zero-rate placeholder for a relay with no feasible point.
    pub fn infeasible(relay_index: usize) -> Self {
        Self {
            relay_index,
            p_s: 0.0,
            p_r: 0.0,
            phi_opt: None,
            rate: 0.0,
            interference: 0.0,
            iterations: 0,
            converged: false,
        }
    }

    pub fn alloc(&self) -> PowerAllocation {
        PowerAllocation::new(self.p_s, self.p_r)
    }
}
