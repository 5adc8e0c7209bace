//! Randomised checks of the optimal relay phase and of the convexity
//! structure, shared by the command line and the acceptance tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::with_pool;
use crate::error::Result;
use crate::model::{
    coherent_components, gen_channels, interference_coherent_raw, optimal_phase, ChannelVariances,
    PowerAllocation, SystemParams,
};
use crate::optimizer::{verify_coordinate_concavity, ConcavityProbe, Mechanism, Scenario, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCheckReport {
    pub components: usize,
    pub grid_points: usize,
    /// Largest `((|A|-|B|)^2 - grid minimum) / (|A|+|B|)^2`; positive means
    /// some grid phase beat the closed form.
    pub worst_grid_deficit: f64,
    /// Largest relative error of the interference at the optimal phase
    /// against `(|A|-|B|)^2`.
    pub worst_optimum_error: f64,
}

impl PhaseCheckReport {
    pub fn passes(&self, deficit_tol: f64, optimum_tol: f64) -> bool {
        self.worst_grid_deficit <= deficit_tol && self.worst_optimum_error <= optimum_tol
    }
}

/// Draws `n_components` coherent phasor pairs from random channels, QSIC
/// levels and powers, and compares the closed-form optimum with an
/// `n_grid`-point phase grid.
pub fn phase_check(n_components: usize, n_grid: usize, seed: u64) -> Result<PhaseCheckReport> {
    const ZETAS: [f64; 4] = [0.0, 0.001, 0.01, 0.4];
    let var = ChannelVariances::default();
    let per = (0..n_components)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let ch = gen_channels(rng.random(), 1, &var)?;
            let params = SystemParams::from_db(ZETAS[i % ZETAS.len()], 20.0, 10.0);
            let a = PowerAllocation::new(rng.random_range(0.0..=100.0), rng.random_range(0.0..=100.0));
            let comp = coherent_components(&ch, 0, &params, a)?;
            let (phi, min) = optimal_phase(&comp);
            let scale = (comp.a.norm() + comp.b.norm()).powi(2);
            let grid_min = (0..n_grid)
                .map(|j| interference_coherent_raw(&comp, std::f64::consts::TAU * j as f64 / n_grid as f64))
                .fold(f64::INFINITY, f64::min);
            let deficit = if scale > 0.0 { (min - grid_min) / scale } else { 0.0 };
            let at_opt = interference_coherent_raw(&comp, phi);
            let err = if min > 0.0 {
                (at_opt - min).abs() / min
            } else {
                (at_opt - min).abs() / scale.max(f64::MIN_POSITIVE)
            };
            Ok((deficit, err))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    Ok(PhaseCheckReport {
        components: n_components,
        grid_points: n_grid,
        worst_grid_deficit: per.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
        worst_optimum_error: per.iter().map(|p| p.1).fold(0.0, f64::max),
    })
}

/// Totals of [`verify_coordinate_concavity`] over a batch of scenarios,
/// split by whether self-interference is present.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LemmaSuiteReport {
    pub scenarios: usize,
    pub slices_checked: usize,
    pub slice_violations: usize,
    /// Segments and violations with residual self-interference, where joint
    /// concavity is expected to fail somewhere.
    pub segments_with_si: usize,
    pub witnesses: usize,
    /// Segments and violations with ideal cancellation.
    pub segments_ideal: usize,
    pub ideal_violations: usize,
}

impl LemmaSuiteReport {
    pub fn passes(&self) -> bool {
        self.slices_checked > 0
            && self.slice_violations == 0
            && self.witnesses > 0
            && self.segments_ideal > 0
            && self.ideal_violations == 0
    }

    fn add(&mut self, o: &Self) {
        self.scenarios += o.scenarios;
        self.slices_checked += o.slices_checked;
        self.slice_violations += o.slice_violations;
        self.segments_with_si += o.segments_with_si;
        self.witnesses += o.witnesses;
        self.segments_ideal += o.segments_ideal;
        self.ideal_violations += o.ideal_violations;
    }
}

/// Probes `n_scenarios` single-relay scenarios of `mechanism`. Scenario `i`
/// uses seed `seed + i`, cycles QSIC levels through `zetas` and draws its
/// interference cap uniformly in `[0, 30]` dB at a 20 dB power cap.
pub fn lemma_suite(
    mechanism: Mechanism,
    n_scenarios: usize,
    zetas: &[f64],
    seed: u64,
    probe: &ConcavityProbe,
    solver: &SolverConfig,
    jobs: Option<usize>,
) -> Result<LemmaSuiteReport> {
    let var = ChannelVariances::default();
    let reports = with_pool(jobs, || {
        (0..n_scenarios)
            .into_par_iter()
            .map(|i| {
                let s = seed.wrapping_add(i as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let ch = gen_channels(rng.random(), 1, &var)?;
                let zeta = zetas[i % zetas.len()];
                let params = SystemParams::from_db(zeta, 20.0, rng.random_range(0.0..=30.0));
                let sc = Scenario::new(ch, params, mechanism)?;
                let r = verify_coordinate_concavity(&sc, 0, &ConcavityProbe { seed: s, ..*probe }, solver)?;
                let joint = r.joint_violations.len();
                let mut out = LemmaSuiteReport {
                    scenarios: 1,
                    slices_checked: r.slices_checked,
                    slice_violations: r.slice_violations.len(),
                    ..Default::default()
                };
                if r.expects_joint_concavity() {
                    out.segments_ideal = r.segments_checked;
                    out.ideal_violations = joint;
                } else {
                    out.segments_with_si = r.segments_checked;
                    out.witnesses = joint;
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut total = LemmaSuiteReport::default();
    for r in &reports {
        total.add(r);
    }
    Ok(total)
}
