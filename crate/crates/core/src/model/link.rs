use num_complex::Complex64;

use super::channel::{ChannelSet, ComplexCoeff};
use super::params::{PowerAllocation, SystemParams};
use super::rate::af_snr;
use crate::error::{Error, Result};

/// One relay's view of a scenario with the link gains precomputed.
///
/// The free functions in [`crate::model`] are thin wrappers over this type;
/// the solvers call it directly in their inner loops.
#[derive(Debug, Clone, Copy)]
pub struct RelayLink {
    pub h_sr: ComplexCoeff,
    pub h_rd: ComplexCoeff,
    pub h_rp: ComplexCoeff,
    pub h_rr: ComplexCoeff,
    pub h_sp: ComplexCoeff,
    pub g_sr: f64,
    pub g_rd: f64,
    pub g_rp: f64,
    pub g_rr: f64,
    pub g_sp: f64,
    pub params: SystemParams,
    /// `|h_RR|^2 * zeta`.
    pub zeta_hat: f64,
}

impl RelayLink {
    pub fn new(ch: &ChannelSet, k: usize, params: &SystemParams) -> Result<Self> {
        if k >= ch.relay_count() {
            return Err(Error::InvalidArgument(format!(
                "relay index {k} out of range for {} relays",
                ch.relay_count()
            )));
        }
        let (h_sr, h_rd, h_rp, h_rr) = (ch.h_sr[k], ch.h_rd[k], ch.h_rp[k], ch.h_rr[k]);
        Ok(Self {
            h_sr,
            h_rd,
            h_rp,
            h_rr,
            h_sp: ch.h_sp,
            g_sr: h_sr.norm_sqr(),
            g_rd: h_rd.norm_sqr(),
            g_rp: h_rp.norm_sqr(),
            g_rr: h_rr.norm_sqr(),
            g_sp: ch.h_sp.norm_sqr(),
            params: *params,
            zeta_hat: h_rr.norm_sqr() * params.zeta,
        })
    }

    /// Relay-to-destination SNR term `P_R |h_RD|^2 / sigma_D^2`.
    #[inline]
    fn relay_snr(&self, p_r: f64) -> f64 {
        if p_r == 0.0 {
            0.0
        } else {
            p_r * self.g_rd / self.params.sigma2_d
        }
    }

    /// Bracketed sum whose inverse square root is the amplification gain.
    #[inline]
    pub fn gain_denominator(&self, a: PowerAllocation) -> f64 {
        a.p_s * self.g_sr + self.params.zeta * a.p_r * self.g_rr + self.params.sigma2_r
    }

    /// End-to-end SINR including relay noise.
    #[inline]
    pub fn exact_sinr(&self, a: PowerAllocation) -> f64 {
        if a.p_s == 0.0 || a.p_r == 0.0 {
            return 0.0;
        }
        let x = self.relay_snr(a.p_r);
        let y = a.p_s * self.g_sr / (self.zeta_hat * a.p_r + self.params.sigma2_r);
        af_snr(x, y)
    }

    #[inline]
    pub fn exact_rate(&self, a: PowerAllocation) -> f64 {
        (1.0 + self.exact_sinr(a)).log2()
    }

    /// SINR with relay noise dropped against residual self-interference.
    /// `None` when `zeta_hat == 0`.
    #[inline]
    pub fn approx_sinr(&self, a: PowerAllocation) -> Option<f64> {
        if self.zeta_hat == 0.0 {
            return None;
        }
        if a.p_s == 0.0 || a.p_r == 0.0 {
            return Some(0.0);
        }
        let x = self.relay_snr(a.p_r);
        let y = a.p_s * self.g_sr / (self.zeta_hat * a.p_r);
        Some(af_snr(x, y))
    }

    pub fn approx_rate(&self, a: PowerAllocation) -> Option<f64> {
        self.approx_sinr(a).map(|s| (1.0 + s).log2())
    }

    /// `1/SINR = 1/x + 1/y + 1/(xy)`, the quantity whose minimisation is
    /// equivalent to rate maximisation. Infinite when either power is zero.
    ///
    /// Uses the surrogate (relay noise dropped) when `approx` is set and
    /// `zeta_hat > 0`, otherwise the exact SINR.
    pub fn inverse_sinr(&self, a: PowerAllocation, approx: bool) -> f64 {
        if a.p_s == 0.0 || a.p_r == 0.0 {
            return f64::INFINITY;
        }
        let x = self.relay_snr(a.p_r);
        let noise = if approx && self.zeta_hat > 0.0 {
            0.0
        } else {
            self.params.sigma2_r
        };
        let inv_y = (self.zeta_hat * a.p_r + noise) / (a.p_s * self.g_sr);
        let inv_x = 1.0 / x;
        inv_x + inv_y + inv_x * inv_y
    }

    #[inline]
    pub fn interference_noncoherent(&self, a: PowerAllocation) -> f64 {
        self.g_sp * a.p_s + self.g_rp * a.p_r * (1.0 + self.params.zeta)
    }

    /// The source-side phasor `A` and relay-side phasor `B` of the coherent
    /// interference `|A + B e^{-j phi}|^2`.
    ///
    /// A zero gain denominator only happens with zero noise and zero
    /// transmitted power into the relay, in which case the relay forwards
    /// nothing and `B` is taken as zero.
    #[inline]
    pub fn coherent_phasors(&self, a: PowerAllocation) -> (Complex64, Complex64) {
        let sqrt_ps = a.p_s.sqrt();
        let sqrt_zpr = (self.params.zeta * a.p_r).sqrt();
        let big_a = self.h_sp * sqrt_ps + self.h_rp * sqrt_zpr;
        if a.p_r == 0.0 {
            return (big_a, Complex64::new(0.0, 0.0));
        }
        let den = self.gain_denominator(a);
        if den == 0.0 {
            return (big_a, Complex64::new(0.0, 0.0));
        }
        let sigma = self.params.sigma2_r.sqrt() / std::f64::consts::SQRT_2;
        let received = self.h_sr * sqrt_ps + self.h_rr * sqrt_zpr + Complex64::new(sigma, sigma);
        let big_b = received * self.h_rp * (a.p_r.sqrt() / den.sqrt());
        (big_a, big_b)
    }

    /// Coherent interference after the optimal phase rotation,
    /// `(|A| - |B|)^2`.
    #[inline]
    pub fn interference_coherent(&self, a: PowerAllocation) -> f64 {
        let (big_a, big_b) = self.coherent_phasors(a);
        let d = big_a.norm() - big_b.norm();
        d * d
    }

    /// Half-duplex two-phase rate, ignoring feasibility.
    pub fn hd_rate(&self, a: PowerAllocation) -> f64 {
        if a.p_s == 0.0 || a.p_r == 0.0 {
            return 0.0;
        }
        let x = self.relay_snr(a.p_r);
        let y0 = a.p_s * self.g_sr / self.params.sigma2_r;
        0.5 * (1.0 + af_snr(x, y0)).log2()
    }

    /// Each half-duplex phase has a single active transmitter.
    pub fn hd_feasible(&self, a: PowerAllocation) -> bool {
        self.g_sp * a.p_s <= self.params.i_bar && self.g_rp * a.p_r <= self.params.i_bar
    }
}
