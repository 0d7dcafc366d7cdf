//! Traffic-control schemes: fixed-time stops on approaches B and C and the
//! arm-A lane re-designation, alone and combined.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::net::{active_lane_config, ApproachId, LaneConfig, LaneRedesignation, RoadNetwork};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("unknown scheme {0:?}; expected one of t0, t1, t2, t3, t4, t5, t3_s15, t3_s45")]
pub struct UnknownScheme(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeId {
    T0,
    T1,
    T2,
    T3,
    T4,
    T5,
    T3S15,
    T3S45,
}

impl SchemeId {
    pub const ALL: [SchemeId; 8] = [
        SchemeId::T0,
        SchemeId::T1,
        SchemeId::T2,
        SchemeId::T3,
        SchemeId::T4,
        SchemeId::T5,
        SchemeId::T3S15,
        SchemeId::T3S45,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::T0 => "t0",
            SchemeId::T1 => "t1",
            SchemeId::T2 => "t2",
            SchemeId::T3 => "t3",
            SchemeId::T4 => "t4",
            SchemeId::T5 => "t5",
            SchemeId::T3S15 => "t3_s15",
            SchemeId::T3S45 => "t3_s45",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, UnknownScheme> {
        let s = s.trim();
        SchemeId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownScheme(s.to_string()))
    }
}

impl Serialize for SchemeId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for SchemeId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Signal {
    Go,
    Stop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phase {
    pub stopped: Vec<ApproachId>,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalCycle {
    pub phases: Vec<Phase>,
}

impl SignalCycle {
    pub fn length(&self) -> f64 {
        self.phases.iter().map(|p| p.duration).sum()
    }

    fn alternating(stop: f64) -> Self {
        Self {
            phases: vec![
                Phase { stopped: vec![ApproachId::B], duration: stop },
                Phase { stopped: vec![ApproachId::C], duration: stop },
            ],
        }
    }

    /// Phase index and time already spent in it.
    fn locate(&self, t: f64) -> (usize, f64) {
        let mut pos = t.rem_euclid(self.length());
        for (i, p) in self.phases.iter().enumerate() {
            if pos < p.duration {
                return (i, pos);
            }
            pos -= p.duration;
        }
        // rounding at the very end of the cycle
        (0, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficScheme {
    pub id: SchemeId,
    pub cycle: Option<SignalCycle>,
    pub lane_redesignation: Option<LaneRedesignation>,
    pub stop_duration: Option<f64>,
}

/// Signal shown to each approach, indexed by [`ApproachId::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignalState(pub [Signal; 3]);

impl SignalState {
    pub fn get(&self, a: ApproachId) -> Signal {
        self.0[a.index()]
    }
}

const T3_LANES: LaneRedesignation = LaneRedesignation { approach: ApproachId::A, inbound: 1, outbound: 3 };

pub fn scheme(id: SchemeId) -> TrafficScheme {
    let (cycle, lanes, stop) = match id {
        SchemeId::T0 => (None, None, None),
        SchemeId::T1 => (Some(SignalCycle::alternating(30.0)), None, None),
        SchemeId::T2 => (Some(SignalCycle::alternating(60.0)), None, None),
        SchemeId::T3 => (None, Some(T3_LANES), None),
        SchemeId::T4 => (Some(SignalCycle::alternating(30.0)), Some(T3_LANES), None),
        SchemeId::T5 => (Some(SignalCycle::alternating(60.0)), Some(T3_LANES), None),
        SchemeId::T3S15 => (Some(SignalCycle::alternating(15.0)), Some(T3_LANES), Some(15.0)),
        SchemeId::T3S45 => (Some(SignalCycle::alternating(45.0)), Some(T3_LANES), Some(45.0)),
    };
    TrafficScheme { id, cycle, lane_redesignation: lanes, stop_duration: stop }
}

pub fn scheme_catalog() -> Vec<TrafficScheme> {
    SchemeId::ALL.into_iter().map(scheme).collect()
}

impl TrafficScheme {
    /// Whether the approach ever sees a stop under this scheme.
    pub fn controls(&self, a: ApproachId) -> bool {
        self.cycle.as_ref().is_some_and(|c| c.phases.iter().any(|p| p.stopped.contains(&a)))
    }
}

pub fn signal_state(s: &TrafficScheme, t: f64) -> SignalState {
    let mut out = [Signal::Go; 3];
    if let Some(c) = &s.cycle {
        let (i, _) = c.locate(t);
        for a in &c.phases[i].stopped {
            out[a.index()] = Signal::Stop;
        }
    }
    SignalState(out)
}

/// Seconds until the approach is next told to stop: 0 while stopped,
/// `None` if it never is.
pub fn time_to_next_stop(s: &TrafficScheme, a: ApproachId, t: f64) -> Option<f64> {
    let c = s.cycle.as_ref()?;
    if !s.controls(a) {
        return None;
    }
    let (i, into) = c.locate(t);
    if c.phases[i].stopped.contains(&a) {
        return Some(0.0);
    }
    let mut wait = c.phases[i].duration - into;
    for k in 1..=c.phases.len() {
        let p = &c.phases[(i + k) % c.phases.len()];
        if p.stopped.contains(&a) {
            return Some(wait);
        }
        wait += p.duration;
    }
    None
}

pub fn scheme_lane_config(net: &RoadNetwork, s: &TrafficScheme, t: f64) -> LaneConfig {
    active_lane_config(net, s, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{build_bicutan_network, NetworkGeometryConfig};

    fn state(id: SchemeId, t: f64) -> [Signal; 3] {
        signal_state(&scheme(id), t).0
    }

    use Signal::{Go, Stop};

    #[test]
    fn catalog_shape() {
        let cat = scheme_catalog();
        assert_eq!(cat.len(), 8);
        let t2 = &cat[2];
        let c = t2.cycle.as_ref().unwrap();
        assert_eq!(c.length(), 120.0);
        assert_eq!(c.phases.iter().map(|p| p.duration).collect::<Vec<_>>(), [60.0, 60.0]);
        assert_eq!(scheme(SchemeId::T1).cycle.unwrap().length(), 60.0);
        let t0 = &cat[0];
        assert!(t0.cycle.is_none() && t0.lane_redesignation.is_none());
        let s15 = scheme(SchemeId::T3S15);
        assert!(s15.lane_redesignation.is_some());
        assert_eq!(s15.stop_duration, Some(15.0));
        assert_eq!(T3_LANES.inbound, 1);
        assert_eq!(T3_LANES.outbound, 3);
    }

    #[test]
    fn ids_round_trip() {
        for id in SchemeId::ALL {
            assert_eq!(id.as_str().parse::<SchemeId>().unwrap(), id);
        }
        assert!("t9".parse::<SchemeId>().is_err());
    }

    #[test]
    fn t1_phases() {
        assert_eq!(state(SchemeId::T1, 10.0), [Go, Stop, Go]);
        assert_eq!(state(SchemeId::T1, 40.0), [Go, Go, Stop]);
        assert_eq!(state(SchemeId::T1, 60.0), [Go, Stop, Go]);
        assert_eq!(state(SchemeId::T0, 500.0), [Go, Go, Go]);
        assert_eq!(state(SchemeId::T3, 500.0), [Go, Go, Go]);
        assert_eq!(state(SchemeId::T2, 59.9), [Go, Stop, Go]);
        assert_eq!(state(SchemeId::T2, 60.0), [Go, Go, Stop]);
        assert_eq!(state(SchemeId::T3S45, 50.0), [Go, Go, Stop]);
    }

    #[test]
    fn next_stop() {
        let t1 = scheme(SchemeId::T1);
        assert_eq!(time_to_next_stop(&t1, ApproachId::B, 10.0), Some(0.0));
        assert_eq!(time_to_next_stop(&t1, ApproachId::C, 10.0), Some(20.0));
        assert_eq!(time_to_next_stop(&t1, ApproachId::B, 40.0), Some(20.0));
        assert_eq!(time_to_next_stop(&t1, ApproachId::A, 40.0), None);
        assert_eq!(time_to_next_stop(&scheme(SchemeId::T0), ApproachId::B, 40.0), None);
    }

    #[test]
    fn combined_schemes() {
        let net = build_bicutan_network(&NetworkGeometryConfig::default()).unwrap();
        let arm_a = net.approach(ApproachId::A).arm_link;
        assert_eq!(scheme_lane_config(&net, &scheme(SchemeId::T4), 5.0).lanes[arm_a], (1, 3));
        assert_eq!(scheme_lane_config(&net, &scheme(SchemeId::T5), 5.0).lanes[arm_a], (1, 3));
        assert_eq!(scheme_lane_config(&net, &scheme(SchemeId::T1), 5.0), net.default_lanes);
    }

    proptest::proptest! {
        #[test]
        fn periodic_exclusive_and_closed(t in 0.0f64..10_000.0) {
            for (id, base) in [(SchemeId::T1, None), (SchemeId::T2, None), (SchemeId::T4, Some(SchemeId::T1)),
                               (SchemeId::T5, Some(SchemeId::T2)), (SchemeId::T3S15, None), (SchemeId::T3S45, None)] {
                let s = scheme(id);
                let cyc = s.cycle.as_ref().unwrap().length();
                let now = signal_state(&s, t);
                proptest::prop_assert_eq!(now, signal_state(&s, t + cyc));
                proptest::prop_assert_eq!(now.get(ApproachId::A), Go);
                proptest::prop_assert!((now.get(ApproachId::B) == Stop) != (now.get(ApproachId::C) == Stop));
                if let Some(b) = base {
                    proptest::prop_assert_eq!(now, signal_state(&scheme(b), t));
                }
            }
        }
    }
}
