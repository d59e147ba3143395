//! Network realization: parameters, channel generation, hybrid-surface state
//! and the uplink signal equation.

mod channel;
mod config;
mod correlation;
mod ris;
mod uplink;

pub use channel::{agent_positions, generate_rician_channel, steering_vector, ChannelSet};
pub use config::{dbm_to_watts, ConfigError, SystemConfig};
pub use correlation::CorrelationMatrix;
pub use ris::HybridRisState;
pub use uplink::{
    effective_channel, misalignment_quadratic, receive_noise_power, ris_amplification_power,
    simulate_uplink,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}
