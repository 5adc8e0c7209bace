use super::feasible::Interval;
use super::golden::golden_max;
use super::{Mechanism, Objective, Scenario, SolverConfig, Variable};
use crate::error::{Error, Result};
use crate::model::{PowerAllocation, RelayLink};

/// A coordinate slice of one relay's problem.
///
/// The coherent mechanism is searched over amplitudes `p = sqrt(P)`, the
/// non-coherent one over powers directly; `to_param`/`from_param` switch
/// between the two.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Slice<'a> {
    pub scenario: &'a Scenario,
    pub link: RelayLink,
    pub free: Variable,
    pub fixed: f64,
}

impl<'a> Slice<'a> {
    pub fn new(scenario: &'a Scenario, k: usize, free: Variable, fixed: f64) -> Result<Self> {
        let link = scenario.link(k)?;
        let fixed_max = free.other().box_max(&scenario.params);
        if !(fixed.is_finite() && (0.0..=fixed_max).contains(&fixed)) {
            return Err(Error::InvalidArgument(format!(
                "fixed power {fixed} outside [0, {fixed_max}]"
            )));
        }
        Ok(Self {
            scenario,
            link,
            free,
            fixed,
        })
    }

    pub fn amplitude_space(&self) -> bool {
        self.scenario.mechanism == Mechanism::Coherent
    }

    pub fn param_of(&self, v: f64) -> f64 {
        if self.amplitude_space() {
            v.sqrt()
        } else {
            v
        }
    }

    pub fn power_at(&self, t: f64) -> f64 {
        if self.amplitude_space() {
            (t * t).min(self.box_max())
        } else {
            t
        }
    }

    pub fn box_max(&self) -> f64 {
        self.free.box_max(&self.scenario.params)
    }

    pub fn alloc(&self, v: f64) -> PowerAllocation {
        self.free.compose(v, self.fixed)
    }

    pub fn slack(&self, v: f64) -> f64 {
        self.scenario.interference(&self.link, self.alloc(v)) - self.scenario.params.i_bar
    }

    pub fn feasible(&self, v: f64) -> bool {
        v >= 0.0 && v <= self.box_max() && self.slack(v) <= 0.0
    }

    pub fn objective(&self, objective: Objective, v: f64) -> f64 {
        let a = self.alloc(v);
        match objective {
            Objective::Surrogate => self
                .link
                .approx_rate(a)
                .unwrap_or_else(|| self.link.exact_rate(a)),
            Objective::Exact => self.link.exact_rate(a),
        }
    }

    /// Golden-section maximiser of the slice objective over `interval`.
    pub fn maximize(&self, interval: Interval, config: &SolverConfig) -> (f64, f64) {
        let (lo, hi) = (interval.lo, interval.hi);
        let clamp = |t: f64| self.power_at(t).clamp(lo, hi);
        let f = |t: f64| self.objective(config.objective, clamp(t));
        let (t, value) = golden_max(f, self.param_of(lo), self.param_of(hi), config.golden_tol);
        (clamp(t), value)
    }
}

/// Maximises the slice objective with `free_var` restricted to `interval`
/// and the other power held at `fixed_value`.
///
/// Returns the maximising power and the objective there.
pub fn solve_1d(
    scenario: &Scenario,
    k: usize,
    free_var: Variable,
    fixed_value: f64,
    interval: Interval,
    config: &SolverConfig,
) -> Result<(f64, f64)> {
    if interval.is_empty() {
        return Err(Error::InfeasibleSlice { relay: k });
    }
    let slice = Slice::new(scenario, k, free_var, fixed_value)?;
    Ok(slice.maximize(interval, config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{db_to_linear, gen_channels, ChannelSet, ChannelVariances, SystemParams};
    use crate::optimizer::feasible_interval;
    use num_complex::Complex64;

    fn unit_scenario(zeta: f64, i_bar: f64) -> Scenario {
        let ch = ChannelSet::uniform(1, Complex64::new(1.0, 0.0));
        let params = SystemParams {
            zeta,
            sigma2_r: 1.0,
            sigma2_d: 1.0,
            p_s_max: 10.0,
            p_r_max: 10.0,
            i_bar,
        };
        Scenario::new(ch, params, Mechanism::NonCoherent).unwrap()
    }

    #[test]
    fn monotone_objective_hits_upper_end() {
        let sc = unit_scenario(0.0, f64::INFINITY);
        let cfg = SolverConfig::default();
        let (x, v) =
            solve_1d(&sc, 0, Variable::RelayPower, 5.0, Interval::new(0.0, 10.0), &cfg).unwrap();
        assert_eq!(x, 10.0);
        let expect = sc.link(0).unwrap().exact_rate(PowerAllocation::new(5.0, 10.0));
        assert_eq!(v, expect);
    }

    #[test]
    fn degenerate_interval() {
        let sc = unit_scenario(0.2, f64::INFINITY);
        let cfg = SolverConfig::default();
        let (x, v) =
            solve_1d(&sc, 0, Variable::SourcePower, 2.0, Interval::new(3.5, 3.5), &cfg).unwrap();
        assert_eq!(x, 3.5);
        let expect = sc.link(0).unwrap().exact_rate(PowerAllocation::new(3.5, 2.0));
        assert_eq!(v, expect);
    }

    #[test]
    fn empty_interval_is_an_error() {
        let sc = unit_scenario(0.2, 1.0);
        let r = solve_1d(
            &sc,
            0,
            Variable::SourcePower,
            2.0,
            Interval::EMPTY,
            &SolverConfig::default(),
        );
        assert!(matches!(r, Err(Error::InfeasibleSlice { relay: 0 })));
    }

    #[test]
    fn interior_maximum_matches_dense_grid() {
        // Strong residual self-interference: rate rises then falls in P_R.
        let mut checked = 0;
        for seed in 0..40u64 {
            let ch = gen_channels(seed, 1, &ChannelVariances::default()).unwrap();
            let params = SystemParams {
                i_bar: f64::INFINITY,
                ..SystemParams::from_db(0.4, 25.0, 8.0)
            };
            let sc = Scenario::new(ch, params, Mechanism::NonCoherent).unwrap();
            let p_s = db_to_linear(5.0);
            let cfg = SolverConfig::default();
            let iv = feasible_interval(&sc, 0, Variable::RelayPower, p_s, &cfg)
                .unwrap()
                .unwrap();
            let (x, _) = solve_1d(&sc, 0, Variable::RelayPower, p_s, iv, &cfg).unwrap();
            let link = sc.link(0).unwrap();
            let n = 10_000;
            let (gx, _) = (0..=n)
                .map(|i| iv.lo + (iv.hi - iv.lo) * i as f64 / n as f64)
                .map(|v| (v, link.exact_rate(PowerAllocation::new(p_s, v))))
                .fold((0.0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
            if gx < iv.hi * 0.99 {
                checked += 1;
                let spacing = (iv.hi - iv.lo) / n as f64;
                assert!(
                    (x - gx).abs() <= 1e-4 * gx + spacing,
                    "seed {seed}: golden {x} grid {gx}"
                );
            }
        }
        assert!(checked > 10, "only {checked} interior cases");
    }
}
