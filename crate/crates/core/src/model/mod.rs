//! Domain types and the closed-form rate and interference expressions.

mod channel;
mod interference;
mod link;
mod params;
mod rate;
mod solution;

pub use channel::{gen_channels, ChannelSet, ChannelVariances, ComplexCoeff};
pub use interference::{
    coherent_components, interference_coherent_raw, interference_noncoherent,
    interference_noncoherent_unsimplified, optimal_phase, phase_to_delay, reduce_angle,
    CoherentComponents,
};
pub use link::RelayLink;
pub use params::{db_to_linear, linear_to_db, PowerAllocation, SystemParams};
pub use rate::{
    af_snr, amplification_gain, approx_rate, exact_rate, hd_baseline_rate, hd_phase_feasible,
};
pub use solution::RelaySolution;
