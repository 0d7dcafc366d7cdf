//! Discrete-time driver-agent engine.
//!
//! Drivers are in one of three states (free driving, following, emergency
//! braking). Following uses an asymmetric stimulus-response law with a
//! reaction-time delay; emergency braking uses a safe-stopping bound. The
//! roundabout is priority-controlled: entrants yield to circulating traffic
//! through gap acceptance, and signal stops act as stationary virtual leaders.

pub mod driver;
pub mod gap;
pub mod lane_change;
pub mod params;
pub mod world;

pub use driver::{classify_state, emergency_decel, free_driving_accel, ghr_accel, safe_gap, DriverState, LeaderView};
pub use gap::{gap_acceptance_entry, vehicles_admitted};
pub use lane_change::{lane_change_decision, LaneDecision};
pub use params::{GhrParams, KernelParams, VehicleCatalog, VehicleType, VehicleTypeParams};
pub use world::{Agent, Arrival, Counters, World};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("unknown vehicle type {0:?}")]
    UnknownVehicleType(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("non-positive spacing {0} m in following law")]
    NonPositiveSpacing(f64),
    #[error("collision at t = {time:.1} s on {location}: vehicle {follower} overlaps vehicle {leader} by {overlap:.3} m")]
    Collision { time: f64, follower: u64, leader: u64, overlap: f64, location: String },
    #[error("vehicle count mismatch at t = {time:.1} s: {detail}")]
    Conservation { time: f64, detail: String },
    #[error("gridlock at t = {time:.1} s: {stopped} vehicles stationary for {for_s:.0} s")]
    Gridlock { time: f64, stopped: usize, for_s: f64 },
}
