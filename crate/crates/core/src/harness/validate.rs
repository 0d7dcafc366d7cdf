//! Checks simulated baseline runs against field observations.

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::demand::ObservationRecord;
use crate::kernel::VehicleCatalog;
use crate::metrics::ReplicationResult;
use crate::net::{free_flow_time, route_id, RoadNetwork};
use crate::stats::{rcbd_anova, AnovaTable};

pub const VALIDATION_ALPHA: f64 = 0.05;

/// Mean delay and speed over one block of observed trips.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservedSample {
    pub delta: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub alpha: f64,
    pub anova_delta: AnovaTable,
    pub anova_sigma: AnovaTable,
    pub p_delta: f64,
    pub p_sigma: f64,
    /// No detectable difference in delay.
    pub accept_delta: bool,
    pub accept_sigma: bool,
}

/// Splits records, ordered by entry time, into `blocks` runs of near-equal
/// size and averages delay and speed over each.
pub fn observed_samples(
    records: &[ObservationRecord],
    net: &RoadNetwork,
    catalog: &VehicleCatalog,
    blocks: usize,
) -> Result<Vec<ObservedSample>, HarnessError> {
    if blocks == 0 || records.len() < blocks {
        return Err(HarnessError::Insufficient(format!("{} observations cannot fill {blocks} blocks", records.len())));
    }
    let mut sorted: Vec<&ObservationRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.entry_time_s.total_cmp(&b.entry_time_s));
    let mut out = Vec::with_capacity(blocks);
    let (base, extra) = (sorted.len() / blocks, sorted.len() % blocks);
    let mut start = 0;
    for b in 0..blocks {
        let len = base + usize::from(b < extra);
        let chunk = &sorted[start..start + len];
        start += len;
        let (mut d, mut s) = (0.0, 0.0);
        for r in chunk {
            let route = route_id(r.entry, r.exit);
            let ff = free_flow_time(net, &route, catalog.get(r.vtype)).map_err(|e| HarnessError::Config(e.to_string()))?;
            let dist = net.route_by_id(&route).map(|r| net.route_length(r)).map_err(|e| HarnessError::Config(e.to_string()))?;
            d += (r.travel_time() - ff).max(0.0);
            s += dist / r.travel_time() * 3.6;
        }
        out.push(ObservedSample { delta: d / len as f64, sigma: s / len as f64 });
    }
    Ok(out)
}

/// Blocked ANOVA with replicate index as block and {observed, simulated}
/// as the two treatments.
pub fn validate_against_observed(observed: &[ObservedSample], simulated: &[ReplicationResult]) -> Result<Validation, HarnessError> {
    if observed.len() != simulated.len() {
        return Err(HarnessError::Insufficient(format!(
            "{} observed blocks but {} simulated replications",
            observed.len(),
            simulated.len()
        )));
    }
    let table = |f: fn(&ObservedSample) -> f64, g: fn(&ReplicationResult) -> f64| {
        let data: Vec<Vec<f64>> = observed.iter().zip(simulated).map(|(o, s)| vec![f(o), g(s)]).collect();
        rcbd_anova(&data).map(|t| t.relabel("Treatment", "Observed vs simulated"))
    };
    let anova_delta = table(|o| o.delta, |s| s.delta)?;
    let anova_sigma = table(|o| o.sigma, |s| s.sigma)?;
    let p = |t: &AnovaTable| t.rows[1].p.unwrap_or(1.0);
    let (p_delta, p_sigma) = (p(&anova_delta), p(&anova_sigma));
    Ok(Validation {
        alpha: VALIDATION_ALPHA,
        accept_delta: p_delta > VALIDATION_ALPHA,
        accept_sigma: p_sigma > VALIDATION_ALPHA,
        anova_delta,
        anova_sigma,
        p_delta,
        p_sigma,
    })
}
