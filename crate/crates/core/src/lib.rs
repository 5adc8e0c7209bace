//! Joint power control and relay selection for full-duplex cognitive relay
//! networks.
//!
//! A secondary source transmits to a secondary destination through one of
//! `K` full-duplex amplify-and-forward relays while the aggregate
//! interference at a primary receiver stays under a cap. Two interference
//! mechanisms are modelled: non-coherent (powers add) and coherent (the
//! relay rotates its phase so its contribution cancels the source's at the
//! primary receiver).
//!
//! * [`model`] holds channels, parameters and the closed-form rate and
//!   interference expressions.
//! * [`optimizer`] solves the per-relay power control problem by alternating
//!   one-dimensional searches, with a brute-force grid oracle.
//! * [`selection`] picks the rate-maximising relay.
//! * [`harness`] drives seeded Monte-Carlo sweeps and writes CSV.

pub mod error;
pub mod harness;
pub mod model;
pub mod optimizer;
pub mod selection;

pub use error::{Error, Result};
pub use model::{
    ChannelSet, ChannelVariances, CoherentComponents, ComplexCoeff, PowerAllocation, RelaySolution,
    SystemParams,
};
pub use optimizer::{Mechanism, Scenario, SolverConfig};
pub use selection::{select_relay, SelectionResult};
