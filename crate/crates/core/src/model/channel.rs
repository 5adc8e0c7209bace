use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Complex baseband channel coefficient.
pub type ComplexCoeff = Complex64;

/// Link variances used to draw a channel realisation.
///
/// The defaults are the evaluation setup: unit-variance Rayleigh links, a
/// weak direct link, and primary-receiver cross links with variance drawn
/// uniformly from `[0.8, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelVariances {
    pub var_sr: f64,
    pub var_rd: f64,
    pub var_sd: f64,
    pub var_sp_range: (f64, f64),
    pub var_rp_range: (f64, f64),
    pub var_rr: f64,
}

impl Default for ChannelVariances {
    fn default() -> Self {
        Self {
            var_sr: 1.0,
            var_rd: 1.0,
            var_sd: 0.1,
            var_sp_range: (0.8, 1.0),
            var_rp_range: (0.8, 1.0),
            var_rr: 1.0,
        }
    }
}

impl ChannelVariances {
    pub fn validate(&self) -> Result<()> {
        let scalars = [
            ("var_sr", self.var_sr),
            ("var_rd", self.var_rd),
            ("var_sd", self.var_sd),
            ("var_rr", self.var_rr),
        ];
        for (name, v) in scalars {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        for (name, (lo, hi)) in [
            ("var_sp_range", self.var_sp_range),
            ("var_rp_range", self.var_rp_range),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be an ordered non-negative range, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

/// Channel coefficients of every link in a `K`-relay network.
///
/// Index `k` of each per-relay vector refers to relay `R_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h_sr: Vec<ComplexCoeff>,
    pub h_rd: Vec<ComplexCoeff>,
    pub h_rp: Vec<ComplexCoeff>,
    pub h_rr: Vec<ComplexCoeff>,
    pub h_sd: ComplexCoeff,
    pub h_sp: ComplexCoeff,
}

impl ChannelSet {
    pub fn new(
        h_sr: Vec<ComplexCoeff>,
        h_rd: Vec<ComplexCoeff>,
        h_rp: Vec<ComplexCoeff>,
        h_rr: Vec<ComplexCoeff>,
        h_sd: ComplexCoeff,
        h_sp: ComplexCoeff,
    ) -> Result<Self> {
        let k = h_sr.len();
        if k == 0 {
            return Err(Error::InvalidArgument("channel set needs at least one relay".into()));
        }
        if h_rd.len() != k || h_rp.len() != k || h_rr.len() != k {
            return Err(Error::InvalidArgument(format!(
                "per-relay channel arrays disagree in length: {} {} {} {}",
                k,
                h_rd.len(),
                h_rp.len(),
                h_rr.len()
            )));
        }
        Ok(Self {
            h_sr,
            h_rd,
            h_rp,
            h_rr,
            h_sd,
            h_sp,
        })
    }

    /// Every relay sees the same unit-gain channel on every link.
    pub fn uniform(k: usize, h: ComplexCoeff) -> Self {
        Self {
            h_sr: vec![h; k],
            h_rd: vec![h; k],
            h_rp: vec![h; k],
            h_rr: vec![h; k],
            h_sd: h,
            h_sp: h,
        }
    }

    pub fn relay_count(&self) -> usize {
        self.h_sr.len()
    }

    /// Channel set restricted to (and reordered by) `indices`.
    pub fn select_relays(&self, indices: &[usize]) -> Result<Self> {
        let k = self.relay_count();
        if let Some(&bad) = indices.iter().find(|&&i| i >= k) {
            return Err(Error::InvalidArgument(format!("relay index {bad} out of range")));
        }
        let pick = |v: &[ComplexCoeff]| indices.iter().map(|&i| v[i]).collect::<Vec<_>>();
        Self::new(
            pick(&self.h_sr),
            pick(&self.h_rd),
            pick(&self.h_rp),
            pick(&self.h_rr),
            self.h_sd,
            self.h_sp,
        )
    }
}

fn rayleigh(rng: &mut ChaCha8Rng, variance: f64) -> ComplexCoeff {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * (variance.sqrt() / std::f64::consts::SQRT_2)
}

fn uniform_in(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

/// Draws a Rayleigh channel realisation.
///
/// Each coefficient is circularly-symmetric complex Gaussian with
/// `E|h|^2` equal to its link variance. The shared links (`h_sd`, `h_sp`)
/// are drawn first and the relays after, in index order, so the first `K`
/// relays of a `K+1` draw with the same seed equal the `K` draw.
pub fn gen_channels(seed: u64, k: usize, var: &ChannelVariances) -> Result<ChannelSet> {
    if k == 0 {
        return Err(Error::InvalidArgument("relay count must be at least 1".into()));
    }
    var.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let h_sd = rayleigh(&mut rng, var.var_sd);
    let var_sp = uniform_in(&mut rng, var.var_sp_range);
    let h_sp = rayleigh(&mut rng, var_sp);

    let mut h_sr = Vec::with_capacity(k);
    let mut h_rd = Vec::with_capacity(k);
    let mut h_rp = Vec::with_capacity(k);
    let mut h_rr = Vec::with_capacity(k);
    for _ in 0..k {
        h_sr.push(rayleigh(&mut rng, var.var_sr));
        h_rd.push(rayleigh(&mut rng, var.var_rd));
        let var_rp = uniform_in(&mut rng, var.var_rp_range);
        h_rp.push(rayleigh(&mut rng, var_rp));
        h_rr.push(rayleigh(&mut rng, var.var_rr));
    }
    ChannelSet::new(h_sr, h_rd, h_rp, h_rr, h_sd, h_sp)
}
