//! Seeded replications.

use rayon::prelude::*;

use super::config::Scenario;
use super::HarnessError;
use crate::demand::generate_arrivals;
use crate::kernel::{Counters, World};
use crate::metrics::{replication_summary, ReplicationResult, TripRecord};
use crate::schemes::{scheme, SchemeId};

#[derive(Debug, Clone)]
pub struct ReplicationOutput {
    pub replicate: usize,
    pub result: ReplicationResult,
    pub trips: Vec<TripRecord>,
    pub counters: Counters,
}

/// Runs one replication of `scheme_id` at volume increase `vplus`.
pub fn run_replication(
    sc: &Scenario,
    scheme_id: SchemeId,
    vplus: f64,
    replicate: usize,
) -> Result<ReplicationOutput, HarnessError> {
    let seed = sc.seed(replicate);
    let abort = |error| HarnessError::Simulation { scheme: scheme_id, vplus, replicate, seed, error };
    let horizon = sc.config.horizon();
    let profile = sc.demand.with_volume_scale(vplus);
    let arrivals = generate_arrivals(&profile, seed, horizon)?;
    let mut world = World::new(&sc.network, &scheme(scheme_id), &sc.catalog, &sc.kernel, arrivals).map_err(abort)?;
    world.run_until(horizon).map_err(abort)?;
    let warmup = sc.config.warmup_s;
    let result = replication_summary(world.trips(), warmup, world.unfinished_since(warmup), scheme_id, seed, vplus)?;
    Ok(ReplicationOutput { replicate, result, trips: world.trips().to_vec(), counters: world.counters() })
}

/// All replications of one scheme and volume, in replicate order.
pub fn run_replications_full(
    sc: &Scenario,
    scheme_id: SchemeId,
    vplus: f64,
) -> Result<Vec<ReplicationOutput>, HarnessError> {
    (0..sc.config.replications).into_par_iter().map(|r| run_replication(sc, scheme_id, vplus, r)).collect()
}

/// Summary results for the configured scheme and volume.
pub fn run_replications(sc: &Scenario) -> Result<Vec<ReplicationResult>, HarnessError> {
    run_set(sc, sc.config.scheme, sc.config.vplus)
}

pub fn run_set(sc: &Scenario, scheme_id: SchemeId, vplus: f64) -> Result<Vec<ReplicationResult>, HarnessError> {
    (0..sc.config.replications)
        .into_par_iter()
        .map(|r| run_replication(sc, scheme_id, vplus, r).map(|o| o.result))
        .collect()
}

/// Results for several (scheme, volume) cells, run as one parallel batch.
pub fn run_grid(sc: &Scenario, cells: &[(SchemeId, f64)]) -> Result<Vec<Vec<ReplicationResult>>, HarnessError> {
    let n = sc.config.replications;
    let flat: Vec<ReplicationResult> = (0..cells.len() * n)
        .into_par_iter()
        .map(|i| {
            let (s, v) = cells[i / n];
            run_replication(sc, s, v, i % n).map(|o| o.result)
        })
        .collect::<Result<_, _>>()?;
    Ok(flat.chunks(n).map(<[_]>::to_vec).collect())
}
