use crate::error::{Error, Result};

/// `10^(dB/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// Noise, self-interference and power-budget parameters shared by all
/// relays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Residual self-interference leakage factor; 0 is ideal cancellation.
    pub zeta: f64,
    pub sigma2_r: f64,
    pub sigma2_d: f64,
    pub p_s_max: f64,
    pub p_r_max: f64,
    /// Interference cap at the primary receiver.
    pub i_bar: f64,
}

impl SystemParams {
    /// Unit noise everywhere and a common power cap `p_max_db` for source and
    /// relays, all levels in dB relative to the noise power.
    pub fn from_db(zeta: f64, p_max_db: f64, i_bar_db: f64) -> Self {
        let p_max = db_to_linear(p_max_db);
        Self {
            zeta,
            sigma2_r: 1.0,
            sigma2_d: 1.0,
            p_s_max: p_max,
            p_r_max: p_max,
            i_bar: db_to_linear(i_bar_db),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.zeta) {
            return Err(Error::InvalidArgument(format!(
                "zeta must lie in [0, 1], got {}",
                self.zeta
            )));
        }
        let fields = [
            ("sigma2_r", self.sigma2_r),
            ("sigma2_d", self.sigma2_d),
            ("p_s_max", self.p_s_max),
            ("p_r_max", self.p_r_max),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        // An infinite cap is allowed and means "unconstrained".
        if self.i_bar.is_nan() || self.i_bar < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "i_bar must be non-negative, got {}",
                self.i_bar
            )));
        }
        Ok(())
    }
}

/// Transmit powers of the source and the selected relay, in linear units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PowerAllocation {
    pub p_s: f64,
    pub p_r: f64,
}

impl PowerAllocation {
    pub const ZERO: Self = Self { p_s: 0.0, p_r: 0.0 };

    pub fn new(p_s: f64, p_r: f64) -> Self {
        Self { p_s, p_r }
    }

    pub fn is_non_negative(&self) -> bool {
        self.p_s >= 0.0 && self.p_r >= 0.0
    }

    pub fn within_box(&self, params: &SystemParams) -> bool {
        self.is_non_negative() && self.p_s <= params.p_s_max && self.p_r <= params.p_r_max
    }
}
