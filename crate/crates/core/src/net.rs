//! Road network of the roundabout: three approach arms around a circular
//! ring, the six origin-destination routes through it, and the lane layout
//! active at a given time.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::kernel::VehicleTypeParams;
use crate::schemes::TrafficScheme;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetError {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("unroutable: {0}")]
    Unroutable(String),
    #[error("unknown route {0:?}")]
    UnknownRoute(String),
    #[error("unknown approach {0:?}")]
    UnknownApproach(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ApproachId {
    A,
    B,
    C,
}

impl ApproachId {
    pub const ALL: [ApproachId; 3] = [ApproachId::A, ApproachId::B, ApproachId::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            ApproachId::A => "A",
            ApproachId::B => "B",
            ApproachId::C => "C",
        }
    }
}

impl fmt::Display for ApproachId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ApproachId {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, NetError> {
        match s.trim() {
            "A" | "a" => Ok(ApproachId::A),
            "B" | "b" => Ok(ApproachId::B),
            "C" | "c" => Ok(ApproachId::C),
            other => Err(NetError::UnknownApproach(other.to_string())),
        }
    }
}

impl Serialize for ApproachId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for ApproachId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproachGeometry {
    pub id: ApproachId,
    pub name: String,
    /// Distance from the ring centre to the start of the arm, m.
    pub center_distance_m: f64,
    /// Direction of the arm from the centre: 0 east, 90 north, 180 west.
    pub azimuth_deg: f64,
    pub lanes_in: usize,
    pub lanes_out: usize,
    pub speed_limit_kph: f64,
}

/// Interval of simulation time, `[start_s, end_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeWindow {
    pub start_s: f64,
    pub end_s: f64,
}

impl TimeWindow {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.start_s && t < self.end_s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkGeometryConfig {
    pub ring_diameter_m: f64,
    pub ring_lanes: usize,
    pub ring_speed_limit_kph: f64,
    /// Stop line distance upstream of the ring entry, m.
    pub stop_line_setback_m: f64,
    pub approaches: Vec<ApproachGeometry>,
    /// When lane re-designations apply; `None` means the whole run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_window: Option<TimeWindow>,
}

impl Default for NetworkGeometryConfig {
    fn default() -> Self {
        let arm = |id, name: &str, center_distance_m, azimuth_deg| ApproachGeometry {
            id,
            name: name.to_string(),
            center_distance_m,
            azimuth_deg,
            lanes_in: 2,
            lanes_out: 2,
            speed_limit_kph: 60.0,
        };
        Self {
            ring_diameter_m: 34.0,
            ring_lanes: 2,
            ring_speed_limit_kph: 60.0,
            stop_line_setback_m: 5.0,
            approaches: vec![
                arm(ApproachId::A, "PNR", 106.0, 180.0),
                arm(ApproachId::B, "PNCC", 150.0, 90.0),
                arm(ApproachId::C, "DOST", 100.0, 0.0),
            ],
            peak_window: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeId {
    /// Outer end of an approach arm.
    Approach(ApproachId),
    /// Where an arm meets the ring.
    Ring(ApproachId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub from: NodeId,
    pub to: NodeId,
    pub length: f64,
    pub lanes_forward: usize,
    pub lanes_backward: usize,
    pub speed_limit_kph: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub link: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub origin: ApproachId,
    pub destination: ApproachId,
    pub segments: Vec<Segment>,
}

impl Route {
    pub fn id(&self) -> String {
        route_id(self.origin, self.destination)
    }
}

pub fn route_id(origin: ApproachId, destination: ApproachId) -> String {
    format!("{origin}->{destination}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Approach {
    pub id: ApproachId,
    pub name: String,
    pub center_distance: f64,
    pub azimuth_deg: f64,
    /// Position of the arm's merge/diverge point along the ring, m.
    pub ring_coord: f64,
    /// Index of the arm link in [`RoadNetwork::links`].
    pub arm_link: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ring {
    pub diameter: f64,
    pub circumference: f64,
    pub lanes: usize,
    pub speed_limit_kph: f64,
}

/// Lane counts per link (forward, backward) in effect at some instant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaneConfig {
    pub lanes: Vec<(usize, usize)>,
}

/// Re-designation of one arm's lanes, applied during the peak window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaneRedesignation {
    pub approach: ApproachId,
    /// Lanes toward the ring.
    pub inbound: usize,
    /// Lanes away from the ring.
    pub outbound: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    pub approaches: Vec<Approach>,
    pub ring: Ring,
    pub links: Vec<Link>,
    /// Per approach, distance from the arm's outer end, m.
    pub stop_lines: Vec<f64>,
    pub routes: Vec<Route>,
    pub peak_window: Option<TimeWindow>,
    /// Lanes per link as built.
    pub default_lanes: LaneConfig,
}

fn positive(name: &str, v: f64) -> Result<(), NetError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(NetError::Geometry(format!("{name} must be > 0, got {v}")))
    }
}

pub fn build_bicutan_network(g: &NetworkGeometryConfig) -> Result<RoadNetwork, NetError> {
    positive("ring_diameter_m", g.ring_diameter_m)?;
    positive("ring_speed_limit_kph", g.ring_speed_limit_kph)?;
    positive("stop_line_setback_m", g.stop_line_setback_m)?;
    if g.ring_lanes == 0 {
        return Err(NetError::Unroutable("ring has no lanes".into()));
    }
    if g.approaches.len() != 3 {
        return Err(NetError::Geometry(format!("expected 3 approaches, got {}", g.approaches.len())));
    }
    let mut arms: Vec<&ApproachGeometry> = Vec::with_capacity(3);
    for id in ApproachId::ALL {
        let matching: Vec<_> = g.approaches.iter().filter(|a| a.id == id).collect();
        match matching.as_slice() {
            [a] => arms.push(a),
            [] => return Err(NetError::Geometry(format!("approach {id} missing"))),
            _ => return Err(NetError::Geometry(format!("approach {id} listed twice"))),
        }
    }

    let radius = g.ring_diameter_m / 2.0;
    let circumference = PI * g.ring_diameter_m;
    let mut links = Vec::new();
    let mut approaches = Vec::new();
    let mut stop_lines = Vec::new();
    for a in &arms {
        positive(&format!("{}: center_distance_m", a.id), a.center_distance_m)?;
        positive(&format!("{}: speed_limit_kph", a.id), a.speed_limit_kph)?;
        if !a.azimuth_deg.is_finite() {
            return Err(NetError::Geometry(format!("{}: azimuth must be finite", a.id)));
        }
        let length = a.center_distance_m - radius;
        if length <= g.stop_line_setback_m {
            return Err(NetError::Geometry(format!(
                "{}: arm length {length} m leaves no room for the stop line",
                a.id
            )));
        }
        if a.lanes_in == 0 || a.lanes_out == 0 {
            return Err(NetError::Unroutable(format!(
                "arm {} needs lanes in both directions, got {}+{}",
                a.id, a.lanes_in, a.lanes_out
            )));
        }
        if a.lanes_out < g.ring_lanes {
            return Err(NetError::Geometry(format!(
                "arm {} has {} outbound lanes for {} ring lanes",
                a.id, a.lanes_out, g.ring_lanes
            )));
        }
        approaches.push(Approach {
            id: a.id,
            name: a.name.clone(),
            center_distance: a.center_distance_m,
            azimuth_deg: a.azimuth_deg,
            ring_coord: a.azimuth_deg.rem_euclid(360.0) / 360.0 * circumference,
            arm_link: links.len(),
        });
        stop_lines.push(length - g.stop_line_setback_m);
        links.push(Link {
            from: NodeId::Approach(a.id),
            to: NodeId::Ring(a.id),
            length,
            lanes_forward: a.lanes_in,
            lanes_backward: a.lanes_out,
            speed_limit_kph: a.speed_limit_kph,
        });
    }

    // ring links between consecutive merge points in the direction of travel
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&i, &j| approaches[i].ring_coord.total_cmp(&approaches[j].ring_coord));
    for w in 0..3 {
        let (i, j) = (order[w], order[(w + 1) % 3]);
        if (approaches[i].ring_coord - approaches[j].ring_coord).abs() < 1e-9 {
            return Err(NetError::Geometry("two approaches share a ring position".into()));
        }
        let length = (approaches[j].ring_coord - approaches[i].ring_coord).rem_euclid(circumference);
        links.push(Link {
            from: NodeId::Ring(approaches[i].id),
            to: NodeId::Ring(approaches[j].id),
            length,
            lanes_forward: g.ring_lanes,
            lanes_backward: 0,
            speed_limit_kph: g.ring_speed_limit_kph,
        });
    }

    let mut routes = Vec::new();
    for o in ApproachId::ALL {
        for d in ApproachId::ALL {
            if o == d {
                continue;
            }
            let mut segments = vec![Segment { link: approaches[o.index()].arm_link, direction: Direction::Forward }];
            let mut at = o;
            while at != d {
                let li = links.iter().position(|l| l.from == NodeId::Ring(at) && matches!(l.to, NodeId::Ring(_))).unwrap();
                segments.push(Segment { link: li, direction: Direction::Forward });
                let NodeId::Ring(next) = links[li].to else { unreachable!() };
                at = next;
            }
            segments.push(Segment { link: approaches[d.index()].arm_link, direction: Direction::Backward });
            routes.push(Route { origin: o, destination: d, segments });
        }
    }

    if let Some(w) = g.peak_window {
        if !(w.start_s >= 0.0 && w.end_s > w.start_s) {
            return Err(NetError::Geometry(format!("peak window [{}, {}) is empty or negative", w.start_s, w.end_s)));
        }
    }

    let default_lanes = LaneConfig { lanes: links.iter().map(|l| (l.lanes_forward, l.lanes_backward)).collect() };
    let net = RoadNetwork {
        approaches,
        ring: Ring { diameter: g.ring_diameter_m, circumference, lanes: g.ring_lanes, speed_limit_kph: g.ring_speed_limit_kph },
        links,
        stop_lines,
        routes,
        peak_window: g.peak_window,
        default_lanes,
    };
    net.check_routes(&net.default_lanes)?;
    Ok(net)
}

impl RoadNetwork {
    pub fn approach(&self, id: ApproachId) -> &Approach {
        &self.approaches[id.index()]
    }

    pub fn arm(&self, id: ApproachId) -> &Link {
        &self.links[self.approach(id).arm_link]
    }

    pub fn arm_length(&self, id: ApproachId) -> f64 {
        self.arm(id).length
    }

    pub fn stop_line(&self, id: ApproachId) -> f64 {
        self.stop_lines[id.index()]
    }

    /// Ring distance travelled from `origin`'s merge point to `destination`'s.
    pub fn arc(&self, origin: ApproachId, destination: ApproachId) -> f64 {
        let c = self.ring.circumference;
        (self.approach(destination).ring_coord - self.approach(origin).ring_coord).rem_euclid(c)
    }

    pub fn route(&self, origin: ApproachId, destination: ApproachId) -> Option<&Route> {
        self.routes.iter().find(|r| r.origin == origin && r.destination == destination)
    }

    pub fn route_by_id(&self, id: &str) -> Result<&Route, NetError> {
        self.routes.iter().find(|r| r.id() == id).ok_or_else(|| NetError::UnknownRoute(id.to_string()))
    }

    pub fn route_length(&self, r: &Route) -> f64 {
        r.segments.iter().map(|s| self.links[s.link].length).sum()
    }

    pub fn segment_nodes(&self, s: &Segment) -> (NodeId, NodeId) {
        let l = &self.links[s.link];
        match s.direction {
            Direction::Forward => (l.from, l.to),
            Direction::Backward => (l.to, l.from),
        }
    }

    /// Checks that every route is connected and has a lane in each
    /// direction it uses.
    pub fn check_routes(&self, cfg: &LaneConfig) -> Result<(), NetError> {
        for r in &self.routes {
            for w in r.segments.windows(2) {
                if self.segment_nodes(&w[0]).1 != self.segment_nodes(&w[1]).0 {
                    return Err(NetError::Unroutable(format!("route {} is disconnected", r.id())));
                }
            }
            for s in &r.segments {
                let (f, b) = cfg.lanes[s.link];
                let n = if s.direction == Direction::Forward { f } else { b };
                if n == 0 {
                    return Err(NetError::Unroutable(format!("route {} has no lane on link {}", r.id(), s.link)));
                }
            }
        }
        Ok(())
    }

    /// Applies a re-designation to the defaults after checking it against
    /// the link's physical lanes.
    pub fn redesignated(&self, r: &LaneRedesignation) -> Result<LaneConfig, NetError> {
        let li = self.approach(r.approach).arm_link;
        let (f, b) = self.default_lanes.lanes[li];
        if r.inbound + r.outbound > f + b {
            return Err(NetError::Geometry(format!(
                "arm {} has {} lanes, cannot designate {}+{}",
                r.approach,
                f + b,
                r.inbound,
                r.outbound
            )));
        }
        if r.outbound < self.ring.lanes {
            return Err(NetError::Geometry(format!("arm {} would have fewer outbound lanes than the ring", r.approach)));
        }
        let mut cfg = self.default_lanes.clone();
        cfg.lanes[li] = (r.inbound, r.outbound);
        self.check_routes(&cfg)?;
        Ok(cfg)
    }

    /// Largest inbound lane count an arm can have under any of `configs`.
    pub fn max_inbound(&self, id: ApproachId, configs: &[&LaneConfig]) -> usize {
        let li = self.approach(id).arm_link;
        configs.iter().map(|c| c.lanes[li].0).max().unwrap_or(0).max(self.default_lanes.lanes[li].0)
    }

    pub fn max_outbound(&self, id: ApproachId, configs: &[&LaneConfig]) -> usize {
        let li = self.approach(id).arm_link;
        configs.iter().map(|c| c.lanes[li].1).max().unwrap_or(0).max(self.default_lanes.lanes[li].1)
    }
}

impl LaneConfig {
    pub fn inbound(&self, net: &RoadNetwork, id: ApproachId) -> usize {
        self.lanes[net.approach(id).arm_link].0
    }

    pub fn outbound(&self, net: &RoadNetwork, id: ApproachId) -> usize {
        self.lanes[net.approach(id).arm_link].1
    }
}

/// Lane layout in force under `scheme` at time `t`.
pub fn active_lane_config(net: &RoadNetwork, scheme: &TrafficScheme, t: f64) -> LaneConfig {
    match &scheme.lane_redesignation {
        Some(r) if net.peak_window.is_none_or(|w| w.contains(t)) => {
            net.redesignated(r).unwrap_or_else(|_| net.default_lanes.clone())
        }
        _ => net.default_lanes.clone(),
    }
}

/// Travel time at the desired speed capped by each segment's limit.
pub fn free_flow_time(net: &RoadNetwork, route_id: &str, vtype: &VehicleTypeParams) -> Result<f64, NetError> {
    let r = net.route_by_id(route_id)?;
    Ok(r.segments
        .iter()
        .map(|s| {
            let l = &net.links[s.link];
            segment_time(l.length, vtype.v_goal_kph, l.speed_limit_kph)
        })
        .sum())
}

/// Seconds to cover `length` m at the lower of two speeds given in kph.
pub fn segment_time(length: f64, v_goal_kph: f64, limit_kph: f64) -> f64 {
    length / (v_goal_kph.min(limit_kph) / 3.6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{VehicleCatalog, VehicleType};
    use crate::schemes::{scheme, SchemeId};

    fn net() -> RoadNetwork {
        build_bicutan_network(&NetworkGeometryConfig::default()).unwrap()
    }

    #[test]
    fn default_geometry() {
        let n = net();
        assert_eq!(n.ring.diameter, 34.0);
        assert_eq!(n.approach(ApproachId::A).center_distance, 106.0);
        assert_eq!(n.approach(ApproachId::B).center_distance, 150.0);
        assert_eq!(n.approach(ApproachId::C).center_distance, 100.0);
        assert_eq!(n.arm_length(ApproachId::A), 89.0);
        assert_eq!(n.arm_length(ApproachId::B), 133.0);
        assert_eq!(n.arm_length(ApproachId::C), 83.0);
        assert_eq!(n.stop_line(ApproachId::C), 78.0);
        assert_eq!(n.routes.len(), 6);
        let mut ids: Vec<_> = n.routes.iter().map(|r| r.id()).collect();
        ids.sort();
        assert_eq!(ids, ["A->B", "A->C", "B->A", "B->C", "C->A", "C->B"]);
    }

    #[test]
    fn ring_arcs() {
        let n = net();
        let c = PI * 34.0;
        let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
        assert!(close(n.arc(ApproachId::A, ApproachId::C), c / 2.0));
        assert!(close(n.arc(ApproachId::A, ApproachId::B), 0.75 * c));
        assert!(close(n.arc(ApproachId::B, ApproachId::A), 0.25 * c));
        assert!(close(n.arc(ApproachId::C, ApproachId::B), 0.25 * c));
        let ring_total: f64 = n.links.iter().filter(|l| matches!(l.from, NodeId::Ring(_))).map(|l| l.length).sum();
        assert!(close(ring_total, c));
    }

    #[test]
    fn routes_are_connected() {
        let n = net();
        n.check_routes(&n.default_lanes).unwrap();
        let r = n.route(ApproachId::A, ApproachId::B).unwrap();
        assert_eq!(r.segments.len(), 4);
        assert_eq!(n.segment_nodes(&r.segments[0]).0, NodeId::Approach(ApproachId::A));
        assert_eq!(n.segment_nodes(r.segments.last().unwrap()).1, NodeId::Approach(ApproachId::B));
    }

    #[test]
    fn rejects_bad_geometry() {
        let mut g = NetworkGeometryConfig::default();
        g.approaches[0].lanes_in = 0;
        g.approaches[0].lanes_out = 0;
        assert!(matches!(build_bicutan_network(&g), Err(NetError::Unroutable(_))));
        let mut g = NetworkGeometryConfig::default();
        g.ring_diameter_m = -1.0;
        assert!(build_bicutan_network(&g).is_err());
        let mut g = NetworkGeometryConfig::default();
        g.approaches[2].center_distance_m = 0.0;
        assert!(build_bicutan_network(&g).is_err());
        let mut g = NetworkGeometryConfig::default();
        g.approaches.pop();
        assert!(build_bicutan_network(&g).is_err());
    }

    #[test]
    fn free_flow_examples() {
        assert!((segment_time(100.0, 36.0, 60.0) - 10.0).abs() < 1e-12);
        assert!((segment_time(100.0, 50.0, 36.0) - 10.0).abs() < 1e-12);
        let n = net();
        // hand sum over the default table: arm A 89 m, half the ring, arm C 83 m
        let jeep = VehicleCatalog::default().get(VehicleType::Jeepney).clone();
        let want = (89.0 + PI * 17.0 + 83.0) / (40.0 / 3.6);
        let got = free_flow_time(&n, "A->C", &jeep).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        let mut fast = jeep.clone();
        fast.v_goal_kph = 200.0;
        let capped = free_flow_time(&n, "A->C", &fast).unwrap();
        assert!((capped - (89.0 + PI * 17.0 + 83.0) / (60.0 / 3.6)).abs() < 1e-9);
        assert!(free_flow_time(&n, "A->A", &jeep).is_err());
    }

    #[test]
    fn lane_config_by_scheme() {
        let n = net();
        let arm_a = n.approach(ApproachId::A).arm_link;
        for id in [SchemeId::T0, SchemeId::T1, SchemeId::T2] {
            assert_eq!(active_lane_config(&n, &scheme(id), 10.0).lanes[arm_a], (2, 2));
        }
        for id in [SchemeId::T3, SchemeId::T4, SchemeId::T5, SchemeId::T3S15, SchemeId::T3S45] {
            let cfg = active_lane_config(&n, &scheme(id), 10.0);
            assert_eq!(cfg.lanes[arm_a], (1, 3));
            n.check_routes(&cfg).unwrap();
        }
    }

    #[test]
    fn peak_window_bounds_redesignation() {
        let mut g = NetworkGeometryConfig::default();
        g.peak_window = Some(TimeWindow { start_s: 100.0, end_s: 200.0 });
        let n = build_bicutan_network(&g).unwrap();
        let arm_a = n.approach(ApproachId::A).arm_link;
        let t3 = scheme(SchemeId::T3);
        assert_eq!(active_lane_config(&n, &t3, 50.0).lanes[arm_a], (2, 2));
        assert_eq!(active_lane_config(&n, &t3, 100.0).lanes[arm_a], (1, 3));
        assert_eq!(active_lane_config(&n, &t3, 199.9).lanes[arm_a], (1, 3));
        assert_eq!(active_lane_config(&n, &t3, 200.0).lanes[arm_a], (2, 2));
        // the window survives a config round trip
        let back: NetworkGeometryConfig = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    proptest::proptest! {
        #[test]
        fn free_flow_monotone(v1 in 5.0f64..80.0, dv in 0.0f64..40.0, extra in 0.0f64..100.0) {
            let jeep = VehicleCatalog::default().get(VehicleType::Jeepney).clone();
            let mut slow = jeep.clone();
            slow.v_goal_kph = v1;
            let mut fast = jeep;
            fast.v_goal_kph = v1 + dv;
            let n = net();
            let a = free_flow_time(&n, "B->C", &slow).unwrap();
            let b = free_flow_time(&n, "B->C", &fast).unwrap();
            proptest::prop_assert!(b <= a + 1e-12);
            let mut g = NetworkGeometryConfig::default();
            g.approaches[1].center_distance_m += extra;
            let longer = build_bicutan_network(&g).unwrap();
            proptest::prop_assert!(free_flow_time(&longer, "B->C", &slow).unwrap() >= a - 1e-12);
        }
    }
}
