pub mod demand;
pub mod harness;
pub mod kernel;
pub mod metrics;
pub mod net;
pub mod schemes;
pub mod stats;
