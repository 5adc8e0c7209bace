use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::channel::{ChannelSet, ComplexCoeff};
use super::link::RelayLink;
use super::params::{PowerAllocation, SystemParams};
use super::rate::amplification_gain;
use crate::error::{Error, Result};

/// Reduces an angle to `[0, 2*pi)`.
pub fn reduce_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Relay delay `Delta` realising phase `phi` at sampling frequency `f_s`.
pub fn phase_to_delay(phi: f64, f_s: f64) -> f64 {
    phi / (TAU * f_s)
}

/// Source-side (`A`) and relay-side (`B`) phasors at the primary receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentComponents {
    pub a: ComplexCoeff,
    pub b: ComplexCoeff,
    /// `arg(A)` in `[0, 2*pi)`.
    pub phi_a: f64,
    /// `arg(B)` in `[0, 2*pi)`.
    pub phi_b: f64,
}

impl CoherentComponents {
    pub fn new(a: ComplexCoeff, b: ComplexCoeff) -> Self {
        Self {
            a,
            b,
            phi_a: reduce_angle(a.arg()),
            phi_b: reduce_angle(b.arg()),
        }
    }
}

pub fn interference_noncoherent(
    ch: &ChannelSet,
    k: usize,
    params: &SystemParams,
    alloc: PowerAllocation,
) -> Result<f64> {
    if !alloc.is_non_negative() {
        return Err(Error::InvalidArgument(format!("negative power in {alloc:?}")));
    }
    Ok(RelayLink::new(ch, k, params)?.interference_noncoherent(alloc))
}

/// Non-coherent interference written out before the amplification gain
/// cancels against its own normalisation. Equal to
/// [`interference_noncoherent`] up to rounding.
pub fn interference_noncoherent_unsimplified(
    ch: &ChannelSet,
    k: usize,
    params: &SystemParams,
    alloc: PowerAllocation,
) -> Result<f64> {
    let g = amplification_gain(ch, k, params, alloc)?;
    let link = RelayLink::new(ch, k, params)?;
    let bracket = link.g_sr * alloc.p_s + link.g_rr * params.zeta * alloc.p_r + params.sigma2_r;
    Ok(link.g_sp * alloc.p_s
        + link.g_rp * params.zeta * alloc.p_r
        + g * g * link.g_rp * alloc.p_r * bracket)
}

pub fn coherent_components(
    ch: &ChannelSet,
    k: usize,
    params: &SystemParams,
    alloc: PowerAllocation,
) -> Result<CoherentComponents> {
    amplification_gain(ch, k, params, alloc)?;
    let (a, b) = RelayLink::new(ch, k, params)?.coherent_phasors(alloc);
    Ok(CoherentComponents::new(a, b))
}

/// `|A + B e^{-j phi}|^2`.
pub fn interference_coherent_raw(comp: &CoherentComponents, phi: f64) -> f64 {
    (comp.a + comp.b * Complex64::from_polar(1.0, -phi)).norm_sqr()
}

/// Relay phase minimising the coherent interference, and the minimum.
///
/// Rotating `B` by `pi + phi_B - phi_A` puts it in antiphase with `A`, which
/// leaves `(|A| - |B|)^2`. With `B = 0` every phase is optimal and the
/// formula value is returned.
pub fn optimal_phase(comp: &CoherentComponents) -> (f64, f64) {
    let phi = reduce_angle(PI + comp.phi_b - comp.phi_a);
    let d = comp.a.norm() - comp.b.norm();
    (phi, d * d)
}
