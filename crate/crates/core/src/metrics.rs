//! Per-trip and per-replication delay and speed.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::kernel::VehicleType;
use crate::net::ApproachId;
use crate::schemes::SchemeId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("empty replication: no trip completed after the warm-up")]
    EmptyReplication,
    #[error("trip export failed: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripRecord {
    pub agent_id: u64,
    pub vtype: VehicleType,
    pub origin: ApproachId,
    pub destination: ApproachId,
    /// When the vehicle arrived at its origin, including any wait to get on
    /// the network, s.
    pub entry_time: f64,
    pub exit_time: f64,
    /// m
    pub distance: f64,
    /// Travel time with no interaction, s.
    pub free_flow: f64,
}

impl TripRecord {
    pub fn travel_time(&self) -> f64 {
        self.exit_time - self.entry_time
    }
}

pub fn vehicle_delay(trip: &TripRecord, free_flow: f64) -> f64 {
    (trip.travel_time() - free_flow).max(0.0)
}

/// Journey speed in kph.
pub fn vehicle_speed(trip: &TripRecord) -> f64 {
    trip.distance / trip.travel_time() * 3.6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub scheme: SchemeId,
    pub seed: u64,
    pub vplus: f64,
    /// Mean delay per completed trip, s.
    pub delta: f64,
    /// Mean journey speed, kph.
    pub sigma: f64,
    pub trips: usize,
    pub unfinished: usize,
}

/// Means over trips that started at or after `warmup`. `unfinished` counts
/// vehicles that arrived after the warm-up but had not left by the end.
pub fn replication_summary(
    trips: &[TripRecord],
    warmup: f64,
    unfinished: usize,
    scheme: SchemeId,
    seed: u64,
    vplus: f64,
) -> Result<ReplicationResult, MetricsError> {
    let counted: Vec<&TripRecord> = trips.iter().filter(|t| t.entry_time >= warmup).collect();
    if counted.is_empty() {
        return Err(MetricsError::EmptyReplication);
    }
    let n = counted.len() as f64;
    let delta = counted.iter().map(|t| vehicle_delay(t, t.free_flow)).sum::<f64>() / n;
    let sigma = counted.iter().map(|t| vehicle_speed(t)).sum::<f64>() / n;
    Ok(ReplicationResult { scheme, seed, vplus, delta, sigma, trips: counted.len(), unfinished })
}

pub const TRIP_CSV_HEADER: &str = "agent_id,vtype,origin,destination,entry_s,exit_s,delay_s,speed_kph";

pub fn write_trips_csv<W: Write>(trips: &[TripRecord], out: W) -> Result<(), MetricsError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| MetricsError::Io(e.to_string());
    w.write_record(TRIP_CSV_HEADER.split(',')).map_err(io)?;
    for t in trips {
        w.write_record([
            t.agent_id.to_string(),
            t.vtype.to_string(),
            t.origin.to_string(),
            t.destination.to_string(),
            format!("{:.3}", t.entry_time),
            format!("{:.3}", t.exit_time),
            format!("{:.3}", vehicle_delay(t, t.free_flow)),
            format!("{:.3}", vehicle_speed(t)),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| MetricsError::Io(e.to_string()))
}
