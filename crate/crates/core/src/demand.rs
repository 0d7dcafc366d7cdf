//! Observation ingestion, demand estimation and arrival generation.

use std::io::Read;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use serde::{Deserialize, Serialize};

use crate::kernel::{Arrival, VehicleType};
use crate::net::ApproachId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DemandError {
    #[error("observation CSV: {0}")]
    Header(String),
    /// `row` counts data rows from 1, header excluded.
    #[error("observation row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error("no observation records")]
    Empty,
    #[error("no observations start at approach {0}")]
    MissingOrigin(ApproachId),
    #[error("invalid demand profile: {0}")]
    Profile(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationRecord {
    pub plate: String,
    pub vtype: VehicleType,
    pub entry: ApproachId,
    pub exit: ApproachId,
    pub entry_time_s: f64,
    pub exit_time_s: f64,
}

impl ObservationRecord {
    pub fn travel_time(&self) -> f64 {
        self.exit_time_s - self.entry_time_s
    }
}

pub const OBSERVATION_HEADER: [&str; 6] = ["plate", "vtype", "entry", "exit", "entry_time_s", "exit_time_s"];

pub fn ingest_observations<R: Read>(source: R) -> Result<Vec<ObservationRecord>, DemandError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let header = rdr.headers().map_err(|e| DemandError::Header(e.to_string()))?.clone();
    if header.iter().ne(OBSERVATION_HEADER) {
        return Err(DemandError::Header(format!(
            "expected header {:?}, found {:?}",
            OBSERVATION_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let bad = |reason: String| DemandError::Row { row, reason };
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let r: ObservationRecord = rec.deserialize(Some(&header)).map_err(|e| bad(e.to_string()))?;
        if !r.entry_time_s.is_finite() || !r.exit_time_s.is_finite() {
            return Err(bad("non-finite timestamp".into()));
        }
        if r.entry == r.exit {
            return Err(bad(format!("exit point equals entry point {}", r.entry)));
        }
        if r.exit_time_s <= r.entry_time_s {
            return Err(bad(format!("exit time {} not after entry time {}", r.exit_time_s, r.entry_time_s)));
        }
        out.push(r);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandProfile {
    /// Arrival rate per origin, veh/s, indexed by [`ApproachId::index`].
    pub rates: [f64; 3],
    /// `od[o][d]`: probability that a vehicle from `o` leaves at `d`.
    pub od: [[f64; 3]; 3],
    /// Probability per vehicle type, indexed by [`VehicleType::index`].
    pub types: [f64; 8],
    /// Fractional volume increase over the observed rates.
    #[serde(default)]
    pub volume_scale: f64,
}

const SUM_TOL: f64 = 1e-9;

impl DemandProfile {
    /// Parses and validates a profile JSON document.
    pub fn from_json(bytes: &[u8]) -> Result<Self, DemandError> {
        let p: Self = serde_json::from_slice(bytes).map_err(|e| DemandError::Profile(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DemandError> {
        let err = |m: String| Err(DemandError::Profile(m));
        for o in ApproachId::ALL {
            let i = o.index();
            if !(self.rates[i] > 0.0 && self.rates[i].is_finite()) {
                return err(format!("rate at {o} must be positive, got {}", self.rates[i]));
            }
            if self.od[i][i] != 0.0 {
                return err(format!("approach {o} cannot be its own destination"));
            }
            if self.od[i].iter().any(|&p| !(0.0..=1.0).contains(&p)) || (self.od[i].iter().sum::<f64>() - 1.0).abs() > SUM_TOL {
                return err(format!("destination split from {o} must be probabilities summing to 1"));
            }
        }
        if self.types.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (self.types.iter().sum::<f64>() - 1.0).abs() > SUM_TOL {
            return err("type distribution must be probabilities summing to 1".into());
        }
        if !(self.volume_scale >= 0.0 && self.volume_scale.is_finite()) {
            return err(format!("volume scale must be >= 0, got {}", self.volume_scale));
        }
        Ok(())
    }

    pub fn with_volume_scale(&self, vplus: f64) -> Self {
        Self { volume_scale: vplus, ..self.clone() }
    }

    pub fn type_probability(&self, t: VehicleType) -> f64 {
        self.types[t.index()]
    }
}

pub fn estimate_demand(records: &[ObservationRecord], horizon: f64) -> Result<DemandProfile, DemandError> {
    if records.is_empty() {
        return Err(DemandError::Empty);
    }
    if !(horizon > 0.0) {
        return Err(DemandError::Profile(format!("horizon must be positive, got {horizon}")));
    }
    let mut counts = [0usize; 3];
    let mut od = [[0usize; 3]; 3];
    let mut types = [0usize; 8];
    for r in records {
        counts[r.entry.index()] += 1;
        od[r.entry.index()][r.exit.index()] += 1;
        types[r.vtype.index()] += 1;
    }
    if let Some(o) = ApproachId::ALL.into_iter().find(|o| counts[o.index()] == 0) {
        return Err(DemandError::MissingOrigin(o));
    }
    let n = records.len() as f64;
    Ok(DemandProfile {
        rates: counts.map(|c| c as f64 / horizon),
        od: std::array::from_fn(|o| od[o].map(|c| c as f64 / counts[o] as f64)),
        types: types.map(|c| c as f64 / n),
        volume_scale: 0.0,
    })
}

/// Candidate arrivals are drawn at this multiple of the observed rate and
/// thinned, so the stream for a smaller volume scale is a subset of the one
/// for a larger scale under the same seed.
pub const THINNING_CEILING: f64 = 3.0;

/// Seeded arrival stream for `[0, duration)`, sorted by time.
pub fn generate_arrivals(profile: &DemandProfile, seed: u64, duration: f64) -> Result<Vec<Arrival>, DemandError> {
    profile.validate()?;
    if !(duration > 0.0) {
        return Err(DemandError::Profile(format!("duration must be positive, got {duration}")));
    }
    let scale = 1.0 + profile.volume_scale;
    let ceiling = THINNING_CEILING.max(scale);
    let keep = scale / ceiling;
    let type_dist = WeightedIndex::new(profile.types).map_err(|e| DemandError::Profile(e.to_string()))?;
    let mut out = Vec::new();
    for o in ApproachId::ALL {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(o.index() as u64);
        let gaps = Exp::new(profile.rates[o.index()] * ceiling).map_err(|e| DemandError::Profile(e.to_string()))?;
        let dest_dist = WeightedIndex::new(profile.od[o.index()]).map_err(|e| DemandError::Profile(e.to_string()))?;
        let mut t = 0.0;
        loop {
            t += gaps.sample(&mut rng);
            if t >= duration {
                break;
            }
            let u: f64 = rng.random();
            let destination = ApproachId::ALL[dest_dist.sample(&mut rng)];
            let vtype = VehicleType::ALL[type_dist.sample(&mut rng)];
            if u < keep {
                out.push(Arrival { time: t, origin: o, destination, vtype });
            }
        }
    }
    out.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.origin.cmp(&b.origin)));
    Ok(out)
}
