pub mod adversarial;
pub mod entanglement;
pub mod error;
pub mod graphs;
pub mod protocol_sim;
pub mod qmath;
pub mod qpv;
pub mod states;
pub mod stats;
pub mod strategies;

pub use error::{QsvError, Result};
