use super::channel::ChannelSet;
use super::link::RelayLink;
use super::params::{PowerAllocation, SystemParams};
use crate::error::{Error, Result};

/// Two-hop amplify-and-forward SNR `xy / (1 + x + y)`, with the limits
/// `x -> inf` and `y -> inf` taken explicitly.
#[inline]
pub fn af_snr(x: f64, y: f64) -> f64 {
    if x == 0.0 || y == 0.0 {
        0.0
    } else if x.is_infinite() {
        y
    } else if y.is_infinite() {
        x
    } else {
        x * y / (1.0 + x + y)
    }
}

fn check_alloc(alloc: PowerAllocation) -> Result<()> {
    if alloc.is_non_negative() && alloc.p_s.is_finite() && alloc.p_r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "powers must be finite and non-negative, got {alloc:?}"
        )))
    }
}

/// Relay amplification gain `G_k`, normalising the relay's received power.
pub fn amplification_gain(
    ch: &ChannelSet,
    k: usize,
    params: &SystemParams,
    alloc: PowerAllocation,
) -> Result<f64> {
    check_alloc(alloc)?;
    let link = RelayLink::new(ch, k, params)?;
    let den = link.gain_denominator(alloc);
    if den <= 0.0 {
        return Err(Error::DegenerateInput(
            "relay receives no power and no noise; amplification gain is unbounded".into(),
        ));
    }
    Ok(den.sqrt().recip())
}

/// Achievable full-duplex rate through relay `k` in bits/s/Hz. The direct
/// source-destination link is ignored.
pub fn exact_rate(
    ch: &ChannelSet,
    k: usize,
    params: &SystemParams,
    alloc: PowerAllocation,
) -> Result<f64> {
    check_alloc(alloc)?;
    Ok(RelayLink::new(ch, k, params)?.exact_rate(alloc))
}

/// Rate with the relay noise dropped next to the residual self-interference.
///
/// It upper-bounds [`exact_rate`] and approaches it when
/// `zeta_hat * P_R >> sigma_R^2`. Undefined for ideal cancellation.
pub fn approx_rate(
    ch: &ChannelSet,
    k: usize,
    params: &SystemParams,
    alloc: PowerAllocation,
) -> Result<f64> {
    check_alloc(alloc)?;
    RelayLink::new(ch, k, params)?
        .approx_rate(alloc)
        .ok_or(Error::DegenerateObjective)
}

/// Whether both half-duplex phases respect the interference cap on their own.
pub fn hd_phase_feasible(
    ch: &ChannelSet,
    k: usize,
    params: &SystemParams,
    alloc: PowerAllocation,
) -> Result<bool> {
    check_alloc(alloc)?;
    Ok(RelayLink::new(ch, k, params)?.hd_feasible(alloc))
}

/// Half-duplex amplify-and-forward baseline: no self-interference and a
/// one-half pre-log. Zero when either phase breaks the interference cap.
pub fn hd_baseline_rate(
    ch: &ChannelSet,
    k: usize,
    params: &SystemParams,
    alloc: PowerAllocation,
) -> Result<f64> {
    check_alloc(alloc)?;
    let link = RelayLink::new(ch, k, params)?;
    Ok(if link.hd_feasible(alloc) {
        link.hd_rate(alloc)
    } else {
        0.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn unit() -> ChannelSet {
        ChannelSet::uniform(1, Complex64::new(1.0, 0.0))
    }

    fn params(zeta: f64, sigma2: f64) -> SystemParams {
        SystemParams {
            zeta,
            sigma2_r: sigma2,
            sigma2_d: sigma2,
            p_s_max: 1e3,
            p_r_max: 1e3,
            i_bar: f64::INFINITY,
        }
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn gain_examples() {
        let ch = unit();
        let g = amplification_gain(&ch, 0, &params(0.0, 0.0), PowerAllocation::new(1.0, 0.0));
        assert!(close(g.unwrap(), 1.0, 1e-15));
        let g = amplification_gain(&ch, 0, &params(0.0, 1.0), PowerAllocation::new(3.0, 5.0));
        assert!(close(g.unwrap(), 0.5, 1e-15));
        // 2*1 + 0.5*2*1 + 1 = 4
        let g = amplification_gain(&ch, 0, &params(0.5, 1.0), PowerAllocation::new(2.0, 2.0));
        assert!(close(g.unwrap(), 0.5, 1e-15));
    }

    #[test]
    fn gain_degenerate() {
        let r = amplification_gain(&unit(), 0, &params(0.0, 0.0), PowerAllocation::ZERO);
        assert!(matches!(r, Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn exact_rate_examples() {
        let ch = unit();
        let p = params(0.0, 1.0);
        assert_eq!(exact_rate(&ch, 0, &p, PowerAllocation::new(0.0, 3.0)).unwrap(), 0.0);
        assert_eq!(exact_rate(&ch, 0, &p, PowerAllocation::new(3.0, 0.0)).unwrap(), 0.0);
        // x = y = 1
        let r = exact_rate(&ch, 0, &p, PowerAllocation::new(1.0, 1.0)).unwrap();
        assert!(close(r, (4.0f64 / 3.0).log2(), 1e-14));
        assert!(close(r, 0.41504, 1e-5));
        // x = y = 3
        let r = exact_rate(&ch, 0, &p, PowerAllocation::new(3.0, 3.0)).unwrap();
        assert!(close(r, (16.0f64 / 7.0).log2(), 1e-14));
        assert!(close(r, 1.19265, 1e-5));
    }

    #[test]
    fn approx_rate_examples() {
        let ch = unit();
        let p = params(1.0, 1.0);
        assert_eq!(approx_rate(&ch, 0, &p, PowerAllocation::new(2.0, 0.0)).unwrap(), 0.0);
        let r = approx_rate(&ch, 0, &p, PowerAllocation::new(1.0, 1.0)).unwrap();
        assert!(close(r, 0.41504, 1e-5));
        let r = approx_rate(&ch, 0, &params(0.0, 1.0), PowerAllocation::new(1.0, 1.0));
        assert!(matches!(r, Err(Error::DegenerateObjective)));
    }

    #[test]
    fn approx_gap_closes_with_strong_self_interference() {
        // zeta_hat * P_R = 1e3 * sigma_R^2
        let ch = unit();
        let p = params(1.0, 1.0);
        let a = PowerAllocation::new(500.0, 1000.0);
        let ex = exact_rate(&ch, 0, &p, a).unwrap();
        let ap = approx_rate(&ch, 0, &p, a).unwrap();
        assert!(ap >= ex);
        assert!((ap - ex) / ex < 2e-3, "relative gap {}", (ap - ex) / ex);
    }

    #[test]
    fn hd_examples() {
        let ch = unit();
        let p = params(0.0, 1.0);
        assert_eq!(hd_baseline_rate(&ch, 0, &p, PowerAllocation::new(0.0, 3.0)).unwrap(), 0.0);
        let r = hd_baseline_rate(&ch, 0, &p, PowerAllocation::new(3.0, 3.0)).unwrap();
        assert!(close(r, 0.5 * (16.0f64 / 7.0).log2(), 1e-14));
        assert!(close(r, 0.59632, 1e-5));
        let fd = exact_rate(&ch, 0, &p, PowerAllocation::new(3.0, 3.0)).unwrap();
        assert!(close(fd, 2.0 * r, 1e-14));
    }

    #[test]
    fn hd_respects_per_phase_cap() {
        let ch = unit();
        let p = SystemParams { i_bar: 2.0, ..params(0.0, 1.0) };
        let a = PowerAllocation::new(2.0, 2.0);
        assert!(hd_phase_feasible(&ch, 0, &p, a).unwrap());
        assert!(hd_baseline_rate(&ch, 0, &p, a).unwrap() > 0.0);
        let a = PowerAllocation::new(2.5, 1.0);
        assert!(!hd_phase_feasible(&ch, 0, &p, a).unwrap());
        assert_eq!(hd_baseline_rate(&ch, 0, &p, a).unwrap(), 0.0);
    }

    #[test]
    fn bad_relay_and_alloc() {
        let ch = unit();
        let p = params(0.0, 1.0);
        assert!(exact_rate(&ch, 1, &p, PowerAllocation::new(1.0, 1.0)).is_err());
        assert!(exact_rate(&ch, 0, &p, PowerAllocation::new(-1.0, 1.0)).is_err());
    }
}
