//! World state and the fixed-step update.
//!
//! Every vehicle moves along a one-dimensional path: inbound arm, ring arc,
//! outbound arm. Leaders are found in per-lane frames rebuilt each step. The
//! ring frame is a circle; an entrant that has committed to merging is also
//! placed there as a projection at its distance before the merge point, so
//! circulating drivers react to it before it physically enters.

use std::collections::VecDeque;

use super::driver::{classify_state, emergency_decel, free_driving_accel, ghr_accel, DriverState, LeaderView};
use super::gap::{accept_merge, Entrant, MergeParticipant};
use super::lane_change::{lane_change_decision, AdjacentLane, LagView, LaneDecision, NeighborView};
use super::params::{KernelParams, VehicleCatalog, VehicleType, VehicleTypeParams};
use super::KernelError;
use crate::metrics::TripRecord;
use crate::net::{active_lane_config, free_flow_time, route_id, ApproachId, LaneConfig, RoadNetwork};
use crate::schemes::{signal_state, time_to_next_stop, Signal, SignalState, TrafficScheme};

const STOP_LINE_KEY: u64 = u64::MAX - 1;
const YIELD_LINE_KEY: u64 = u64::MAX - 2;
const COLLISION_TOL: f64 = 1e-6;
/// How far short of a line a clamped vehicle is held, m.
const CLAMP_EPS: f64 = 1e-3;
/// A circulating vehicle must pass this far before its exit to count as
/// crossing a merge point, m.
const MERGE_SLACK: f64 = 0.5;
/// A queued entrant uses the follow-up gap when its leader entered no more
/// than this far ahead, m.
const FOLLOW_UP_REACH: f64 = 15.0;
const GRIDLOCK_AFTER_S: f64 = 300.0;

/// A vehicle due to arrive at an origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    pub time: f64,
    pub origin: ApproachId,
    pub destination: ApproachId,
    pub vtype: VehicleType,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub generated: usize,
    pub injected: usize,
    pub exited: usize,
    pub lane_changes: usize,
    pub commits: usize,
    /// Vehicles held at a stop line by the integrator rather than by their
    /// own braking.
    pub forced_signal_stops: usize,
    /// Same, at the yield line.
    pub forced_yield_stops: usize,
    /// Stop-line crossings while the approach showed Stop.
    pub red_crossings: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Sample {
    key: u64,
    dv: f64,
    dx: f64,
}

#[derive(Debug, Clone)]
pub struct Agent {
    pub id: u64,
    pub vtype: VehicleType,
    pub origin: ApproachId,
    pub destination: ApproachId,
    /// Distance of the front bumper along the path, m.
    pub d: f64,
    pub v: f64,
    pub a: f64,
    /// Inbound lane; lane 0 is outermost.
    pub lane: usize,
    /// Ring and outbound lane, fixed at commitment.
    pub ring_lane: usize,
    pub state: DriverState,
    pub committed: bool,
    /// Cleared to cross the stop line.
    pub go: bool,
    pub entry_time: f64,
    pub length: f64,
    pub in_len: f64,
    pub arc: f64,
    pub total: f64,
    stopping: bool,
    yielding: bool,
    last_lane_change: f64,
    samples: Vec<Sample>,
    sample_count: usize,
}

impl Agent {
    /// Distance of the front past the merge point; negative on the arm.
    pub fn ring_progress(&self) -> f64 {
        self.d - self.in_len
    }

    pub fn on_arm(&self) -> bool {
        self.d < self.in_len
    }

    pub fn on_outbound(&self) -> bool {
        self.ring_progress() > self.arc
    }
}

#[derive(Debug, Clone, Copy)]
struct Cand {
    key: u64,
    view: LeaderView,
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    pos: f64,
    idx: usize,
}

#[derive(Debug, Default)]
struct Frames {
    inbound: Vec<Vec<Vec<Slot>>>,
    ring: Vec<Vec<Slot>>,
    outbound: Vec<Vec<Vec<Slot>>>,
}

fn insert_sorted(list: &mut Vec<Slot>, s: Slot) {
    let at = list.partition_point(|e| e.pos < s.pos);
    list.insert(at, s);
}

fn remove_idx(list: &mut Vec<Slot>, idx: usize) {
    if let Some(i) = list.iter().position(|e| e.idx == idx) {
        list.remove(i);
    }
}

pub struct World {
    net: RoadNetwork,
    scheme: TrafficScheme,
    catalog: VehicleCatalog,
    k: KernelParams,
    steps: u64,
    agents: Vec<Agent>,
    arrivals: Vec<Arrival>,
    next_arrival: usize,
    queues: [VecDeque<(u64, Arrival)>; 3],
    trips: Vec<TripRecord>,
    counters: Counters,
    next_spawn_id: u64,
    circ: f64,
    merge: [f64; 3],
    in_len: [f64; 3],
    line: [f64; 3],
    arm_vdes_kph: [f64; 3],
    ring_kph: f64,
    controlled: [bool; 3],
    free_flow: [[[f64; 8]; 3]; 3],
    default_cfg: LaneConfig,
    open_in: [usize; 3],
    frames: Frames,
    max_len: f64,
    last_motion: f64,
    cands: Vec<Cand>,
}

impl World {
    /// `arrivals` must be sorted by time.
    pub fn new(
        net: &RoadNetwork,
        scheme: &TrafficScheme,
        catalog: &VehicleCatalog,
        k: &KernelParams,
        arrivals: Vec<Arrival>,
    ) -> Result<Self, KernelError> {
        k.validate()?;
        catalog.validate()?;
        if arrivals.windows(2).any(|w| w[1].time < w[0].time) || arrivals.iter().any(|a| a.origin == a.destination) {
            return Err(KernelError::InvalidParams("arrivals must be time-ordered with origin != destination".into()));
        }
        let mut free_flow = [[[0.0; 8]; 3]; 3];
        for o in ApproachId::ALL {
            for dst in ApproachId::ALL {
                if o == dst {
                    continue;
                }
                for t in VehicleType::ALL {
                    free_flow[o.index()][dst.index()][t.index()] =
                        free_flow_time(net, &route_id(o, dst), catalog.get(t)).expect("every route exists");
                }
            }
        }
        let peak = scheme.lane_redesignation.as_ref().map(|r| net.redesignated(r)).transpose().map_err(|e| {
            KernelError::InvalidParams(format!("scheme {} lane layout: {e}", scheme.id))
        })?;
        let cfgs: Vec<&LaneConfig> = peak.iter().collect();
        let frames = Frames {
            inbound: ApproachId::ALL.iter().map(|&a| vec![Vec::new(); net.max_inbound(a, &cfgs)]).collect(),
            ring: vec![Vec::new(); net.ring.lanes],
            outbound: ApproachId::ALL.iter().map(|&a| vec![Vec::new(); net.max_outbound(a, &cfgs)]).collect(),
        };
        let each = |f: &dyn Fn(ApproachId) -> f64| ApproachId::ALL.map(f);
        let mut w = Self {
            circ: net.ring.circumference,
            merge: each(&|a| net.approach(a).ring_coord),
            in_len: each(&|a| net.arm_length(a)),
            line: each(&|a| net.stop_line(a)),
            arm_vdes_kph: each(&|a| net.arm(a).speed_limit_kph),
            ring_kph: net.ring.speed_limit_kph,
            controlled: ApproachId::ALL.map(|a| scheme.controls(a)),
            free_flow,
            default_cfg: net.default_lanes.clone(),
            open_in: [0; 3],
            frames,
            max_len: catalog.iter().map(|p| p.length).fold(0.0, f64::max),
            net: net.clone(),
            scheme: scheme.clone(),
            catalog: catalog.clone(),
            k: k.clone(),
            steps: 0,
            agents: Vec::new(),
            next_spawn_id: arrivals.len() as u64,
            arrivals,
            next_arrival: 0,
            queues: Default::default(),
            trips: Vec::new(),
            counters: Counters::default(),
            last_motion: 0.0,
            cands: Vec::new(),
        };
        w.refresh_lanes();
        Ok(w)
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.k.dt
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn trips(&self) -> &[TripRecord] {
        &self.trips
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn queued(&self) -> usize {
        self.queues.iter().map(|q| q.len()).sum()
    }

    /// Arrivals at or after `since` that have not yet left the network.
    pub fn unfinished_since(&self, since: f64) -> usize {
        self.agents.iter().filter(|a| a.entry_time >= since).count()
            + self.queues.iter().flatten().filter(|(_, a)| a.time >= since).count()
    }

    pub fn signals(&self) -> SignalState {
        signal_state(&self.scheme, self.time())
    }

    pub fn params(&self, t: VehicleType) -> &VehicleTypeParams {
        self.catalog.get(t)
    }

    pub fn network(&self) -> &RoadNetwork {
        &self.net
    }

    /// Places a vehicle directly on an inbound arm, bypassing the arrival
    /// queue. Returns its id.
    pub fn spawn(
        &mut self,
        origin: ApproachId,
        destination: ApproachId,
        vtype: VehicleType,
        d: f64,
        v: f64,
        lane: usize,
    ) -> Result<u64, KernelError> {
        let o = origin.index();
        if origin == destination || lane >= self.frames.inbound[o].len() || !(0.0..self.in_len[o]).contains(&d) || v < 0.0 {
            return Err(KernelError::InvalidParams(format!("cannot spawn at {origin} lane {lane}, d = {d}")));
        }
        let id = self.next_spawn_id;
        self.next_spawn_id += 1;
        self.counters.generated += 1;
        self.counters.injected += 1;
        let agent = self.make_agent(id, origin, destination, vtype, d, v, lane, self.time());
        self.agents.push(agent);
        Ok(id)
    }

    #[allow(clippy::too_many_arguments)]
    fn make_agent(
        &self,
        id: u64,
        origin: ApproachId,
        destination: ApproachId,
        vtype: VehicleType,
        d: f64,
        v: f64,
        lane: usize,
        entry_time: f64,
    ) -> Agent {
        let p = self.catalog.get(vtype);
        let in_len = self.in_len[origin.index()];
        let arc = self.net.arc(origin, destination);
        Agent {
            id,
            vtype,
            origin,
            destination,
            d,
            v,
            a: 0.0,
            lane,
            ring_lane: lane.min(self.net.ring.lanes - 1),
            state: DriverState::FreeDriving,
            committed: false,
            go: false,
            entry_time,
            length: p.length,
            in_len,
            arc,
            total: in_len + arc + self.net.arm_length(destination),
            stopping: false,
            yielding: false,
            last_lane_change: f64::NEG_INFINITY,
            samples: vec![Sample::default(); self.k.delay_steps(p.reaction_time).max(1)],
            sample_count: 0,
        }
    }

    fn refresh_lanes(&mut self) {
        let cfg = if self.scheme.lane_redesignation.is_some() {
            active_lane_config(&self.net, &self.scheme, self.time())
        } else {
            self.default_cfg.clone()
        };
        self.open_in = ApproachId::ALL.map(|a| cfg.inbound(&self.net, a));
    }

    fn v_des(&self, a: &Agent) -> f64 {
        let p = self.catalog.get(a.vtype);
        let prog = a.ring_progress();
        let limit = if prog < 0.0 {
            self.arm_vdes_kph[a.origin.index()]
        } else if prog <= a.arc {
            self.ring_kph
        } else {
            self.arm_vdes_kph[a.destination.index()]
        };
        p.v_goal_kph.min(limit) / 3.6
    }

    /// Lanes a route prefers on its arm given how many are open.
    fn preferred(&self, a: &Agent, open: usize) -> (usize, usize) {
        let frac = a.arc / self.circ;
        if frac < 0.375 {
            (0, 0)
        } else if frac > 0.625 {
            (open - 1, open - 1)
        } else {
            (0, open - 1)
        }
    }

    fn ring_coord(&self, a: &Agent) -> f64 {
        (self.merge[a.origin.index()] + a.ring_progress().min(a.arc)).rem_euclid(self.circ)
    }

    fn build_frames(&mut self) {
        let f = &mut self.frames;
        f.inbound.iter_mut().flatten().for_each(Vec::clear);
        f.ring.iter_mut().for_each(Vec::clear);
        f.outbound.iter_mut().flatten().for_each(Vec::clear);
        for (idx, a) in self.agents.iter().enumerate() {
            let o = a.origin.index();
            let prog = a.ring_progress();
            if a.d - a.length < a.in_len {
                f.inbound[o][a.lane].push(Slot { pos: a.d, idx });
            }
            let in_ring_body = prog > 0.0 && prog - a.length < a.arc;
            if in_ring_body || (a.committed && prog <= 0.0) {
                let pos = (self.merge[o] + prog.min(a.arc)).rem_euclid(self.circ);
                f.ring[a.ring_lane].push(Slot { pos, idx });
            }
            if prog > a.arc {
                f.outbound[a.destination.index()][a.ring_lane].push(Slot { pos: prog - a.arc, idx });
            }
        }
        let by_pos = |x: &Slot, y: &Slot| x.pos.total_cmp(&y.pos).then(x.idx.cmp(&y.idx));
        f.inbound.iter_mut().flatten().for_each(|l| l.sort_unstable_by(by_pos));
        f.ring.iter_mut().for_each(|l| l.sort_unstable_by(by_pos));
        f.outbound.iter_mut().flatten().for_each(|l| l.sort_unstable_by(by_pos));
    }

    fn collision(&self, follower: usize, leader: usize, gap: f64, location: &str) -> KernelError {
        KernelError::Collision {
            time: self.time(),
            follower: self.agents[follower].id,
            leader: self.agents[leader].id,
            overlap: -gap,
            location: location.to_string(),
        }
    }

    fn view_of(&self, idx: usize, gap: f64) -> LeaderView {
        let b = &self.agents[idx];
        LeaderView { gap, speed: b.v, b_emerg: self.catalog.get(b.vtype).b_emerg }
    }

    /// Nearest vehicle ahead of `d` in an inbound lane: (index, bumper gap).
    fn inbound_lead(&self, o: usize, lane: usize, d: f64, me: usize) -> Option<(usize, f64)> {
        let list = &self.frames.inbound[o][lane];
        let start = list.partition_point(|e| e.pos < d);
        list[start..].iter().find(|e| e.idx != me).map(|e| (e.idx, e.pos - self.agents[e.idx].length - d))
    }

    /// Nearest vehicle at or behind `d` in an inbound lane.
    fn inbound_lag(&self, o: usize, lane: usize, d: f64, me: usize) -> Option<usize> {
        let list = &self.frames.inbound[o][lane];
        let end = list.partition_point(|e| e.pos <= d);
        list[..end].iter().rev().find(|e| e.idx != me).map(|e| e.idx)
    }

    /// Leaders on the ring ahead of ring coordinate `c` within `rem` metres.
    fn ring_leaders(&self, i: usize, c: f64, rem: f64, out: &mut Vec<Cand>) -> Result<(), KernelError> {
        let a = &self.agents[i];
        let p_s = a.ring_progress();
        let list = &self.frames.ring[a.ring_lane];
        let reach = rem.min(self.k.perception_range);
        let n = list.len();
        let start = list.partition_point(|e| e.pos < c);
        for s in 0..n {
            let e = list[(start + s) % n];
            if e.idx == i {
                continue;
            }
            let df = (e.pos - c).rem_euclid(self.circ);
            if df - self.max_len > reach {
                break;
            }
            let b = &self.agents[e.idx];
            let p_e = b.ring_progress();
            // leaving the ring where we join it
            if b.destination == a.origin && df <= -p_s + 1e-6 {
                continue;
            }
            // joining where we leave, front already past our exit
            if b.origin == a.destination && p_e < b.length && df >= rem + p_e.min(0.0) - 1e-6 {
                continue;
            }
            let gap = df - (p_e.min(b.arc) - (p_e - b.length));
            if gap >= reach {
                continue;
            }
            if p_s > 0.0 && p_e > 0.0 && gap < -COLLISION_TOL {
                return Err(self.collision(i, e.idx, gap, "ring"));
            }
            out.push(Cand { key: b.id, view: self.view_of(e.idx, gap) });
        }
        // first vehicle on our outbound lane
        if rem < self.k.perception_range {
            if let Some(e) = self.frames.outbound[a.destination.index()][a.ring_lane].first() {
                if e.idx != i {
                    let gap = rem + e.pos - self.agents[e.idx].length;
                    if p_s > 0.0 && gap < -COLLISION_TOL {
                        return Err(self.collision(i, e.idx, gap, "ring exit"));
                    }
                    if gap < self.k.perception_range {
                        out.push(Cand { key: self.agents[e.idx].id, view: self.view_of(e.idx, gap) });
                    }
                }
            }
        }
        Ok(())
    }

    fn candidates(&self, i: usize, out: &mut Vec<Cand>) -> Result<(), KernelError> {
        out.clear();
        let a = &self.agents[i];
        let o = a.origin.index();
        let prog = a.ring_progress();
        if prog < 0.0 {
            if let Some((j, gap)) = self.inbound_lead(o, a.lane, a.d, i) {
                if gap < -COLLISION_TOL {
                    return Err(self.collision(i, j, gap, &format!("arm {} lane {}", a.origin, a.lane)));
                }
                if gap < self.k.perception_range {
                    out.push(Cand { key: self.agents[j].id, view: self.view_of(j, gap) });
                }
            }
            if a.committed {
                self.ring_leaders(i, (self.merge[o] + prog).rem_euclid(self.circ), a.arc - prog, out)?;
            }
            if a.yielding {
                out.push(Cand { key: YIELD_LINE_KEY, view: LeaderView::stationary(a.in_len - a.d) });
            }
            if a.stopping {
                out.push(Cand { key: STOP_LINE_KEY, view: LeaderView::stationary(self.line[o] - a.d) });
            }
        } else if prog <= a.arc {
            self.ring_leaders(i, self.ring_coord(a), a.arc - prog, out)?;
        } else {
            let q = prog - a.arc;
            let list = &self.frames.outbound[a.destination.index()][a.ring_lane];
            let start = list.partition_point(|e| e.pos <= q);
            if let Some(e) = list[start..].iter().find(|e| e.idx != i) {
                let gap = e.pos - self.agents[e.idx].length - q;
                if gap < -COLLISION_TOL {
                    return Err(self.collision(i, e.idx, gap, &format!("exit arm {}", a.destination)));
                }
                if gap < self.k.perception_range {
                    out.push(Cand { key: self.agents[e.idx].id, view: self.view_of(e.idx, gap) });
                }
            }
        }
        Ok(())
    }

    fn x_brake(&self, v: f64, p: &VehicleTypeParams) -> f64 {
        v * v / (2.0 * p.a_norm) + v * self.k.dt + self.k.standstill_gap
    }

    fn decide(&mut self, signals: &SignalState) {
        let t = self.time();
        for i in 0..self.agents.len() {
            if !self.agents[i].on_arm() {
                self.agents[i].stopping = false;
                self.agents[i].yielding = false;
                continue;
            }
            self.decide_lane(i, t);
            self.decide_signal(i, t, signals);
            self.decide_commit(i);
        }
    }

    fn decide_lane(&mut self, i: usize, t: f64) {
        let a = &self.agents[i];
        let o = a.origin.index();
        if a.committed || a.d >= self.line[o] - self.k.lane_change_freeze || t - a.last_lane_change < self.k.lane_change_cooldown {
            return;
        }
        let lanes = self.frames.inbound[o].len();
        let open = self.open_in[o].min(lanes);
        let (lo, hi) = self.preferred(a, open);
        let allowed: Vec<bool> = (0..lanes).map(|l| l >= lo && l <= hi).collect();
        let p = self.catalog.get(a.vtype);
        let lead_in = |l: usize| self.inbound_lead(o, l, a.d, i).map(|(j, gap)| self.view_of(j, gap));
        let adjacent = |l: usize| -> Option<AdjacentLane> {
            let lag = self.inbound_lag(o, l, a.d, i);
            if lag.is_some_and(|j| self.agents[j].committed) {
                return None;
            }
            Some(AdjacentLane {
                lead: lead_in(l),
                lag: lag.map(|j| {
                    let b = &self.agents[j];
                    LagView { gap: a.d - a.length - b.d, speed: b.v, a_norm: self.catalog.get(b.vtype).a_norm }
                }),
            })
        };
        let view = NeighborView {
            current_lead: lead_in(a.lane),
            left: if a.lane + 1 < lanes { adjacent(a.lane + 1) } else { None },
            right: if a.lane > 0 { adjacent(a.lane - 1) } else { None },
        };
        let target = match lane_change_decision(a.v, self.v_des(a), p, a.lane, &allowed, &view, &self.k) {
            LaneDecision::Stay => return,
            LaneDecision::ChangeLeft => a.lane + 1,
            LaneDecision::ChangeRight => a.lane - 1,
        };
        let (old, d) = (a.lane, a.d);
        remove_idx(&mut self.frames.inbound[o][old], i);
        insert_sorted(&mut self.frames.inbound[o][target], Slot { pos: d, idx: i });
        let a = &mut self.agents[i];
        a.lane = target;
        a.ring_lane = target.min(self.net.ring.lanes - 1);
        a.last_lane_change = t;
        self.counters.lane_changes += 1;
    }

    fn decide_signal(&mut self, i: usize, t: f64, signals: &SignalState) {
        let a = &self.agents[i];
        let o = a.origin;
        let line = self.line[o.index()];
        let p = self.catalog.get(a.vtype);
        if !self.controlled[o.index()] || a.d >= line {
            self.agents[i].stopping = false;
            return;
        }
        let x = line - a.d;
        if x > self.x_brake(a.v, p) + self.k.decision_margin {
            self.agents[i].stopping = false;
            return;
        }
        let signal = signals.get(o);
        if a.go {
            if signal == Signal::Stop && a.v * a.v / (2.0 * p.b_emerg) + a.v * self.k.dt <= x - CLAMP_EPS {
                self.revoke(i);
            }
        } else if signal == Signal::Go {
            let tau = if a.v > 0.5 { 2.0 * x / a.v } else { (2.0 * x / p.a_max).sqrt() + 0.5 };
            let in_time = time_to_next_stop(&self.scheme, o, t).is_none_or(|w| w >= tau + self.k.signal_time_margin);
            let clear = self.inbound_lead(o.index(), a.lane, a.d, i).is_none_or(|(j, _)| {
                let b = &self.agents[j];
                b.d - b.length >= line + self.k.standstill_gap + 1.0
            });
            if in_time && clear {
                self.agents[i].go = true;
            }
        }
        let a = &mut self.agents[i];
        a.stopping = !a.go;
    }

    fn revoke(&mut self, i: usize) {
        let a = &mut self.agents[i];
        a.go = false;
        if a.committed {
            a.committed = false;
            let lane = a.ring_lane;
            remove_idx(&mut self.frames.ring[lane], i);
        }
    }

    fn decide_commit(&mut self, i: usize) {
        let a = &self.agents[i];
        let o = a.origin.index();
        let p = self.catalog.get(a.vtype);
        let m = a.in_len - a.d;
        let in_zone = m <= self.x_brake(a.v, p) + self.k.decision_margin;
        if a.committed || !in_zone {
            self.agents[i].yielding = false;
            return;
        }
        let cleared = !self.controlled[o] || a.d >= self.line[o] || a.go;
        let lead = self.inbound_lead(o, a.lane, a.d, i);
        let lead_ok = lead.is_none_or(|(j, _)| self.agents[j].committed);
        let accept = cleared && lead_ok && {
            let follow_up = lead.is_some_and(|(j, gap)| {
                let b = &self.agents[j];
                gap < FOLLOW_UP_REACH && b.ring_progress() < b.length + FOLLOW_UP_REACH
            });
            let entrant = Entrant { to_merge: m, speed: a.v, params: p, follow_up };
            let others = self.merge_participants(i, m);
            accept_merge(&entrant, &others, &self.k)
        };
        if accept {
            let pos = (self.merge[o] - m).rem_euclid(self.circ);
            let a = &mut self.agents[i];
            a.committed = true;
            a.yielding = false;
            a.ring_lane = a.lane.min(self.net.ring.lanes - 1);
            let lane = a.ring_lane;
            insert_sorted(&mut self.frames.ring[lane], Slot { pos, idx: i });
            self.counters.commits += 1;
        } else {
            self.agents[i].yielding = true;
        }
    }

    fn merge_participants(&self, i: usize, m: f64) -> Vec<MergeParticipant> {
        let a = &self.agents[i];
        let merge = self.merge[a.origin.index()];
        let lane = a.lane.min(self.net.ring.lanes - 1);
        let reach = a.arc.min(self.k.perception_range);
        let mut out = Vec::new();
        for e in &self.frames.ring[lane] {
            if e.idx == i {
                continue;
            }
            let b = &self.agents[e.idx];
            let p_e = b.ring_progress();
            let params = self.catalog.get(b.vtype);
            let r = (merge - e.pos).rem_euclid(self.circ);
            let to_merge = if r < b.arc - p_e - MERGE_SLACK {
                r
            } else {
                let past = (e.pos - merge).rem_euclid(self.circ);
                if b.destination == a.origin || past >= reach {
                    continue;
                }
                -past
            };
            let _ = m;
            out.push(MergeParticipant {
                to_merge,
                speed: b.v,
                length: b.length,
                a_norm: params.a_norm,
                b_emerg: params.b_emerg,
            });
        }
        out
    }

    fn accelerations(&mut self) -> Result<(), KernelError> {
        let mut cands = std::mem::take(&mut self.cands);
        for i in 0..self.agents.len() {
            self.candidates(i, &mut cands)?;
            let v_des = self.v_des(&self.agents[i]);
            let a = &mut self.agents[i];
            let p = self.catalog.get(a.vtype);
            let free = free_driving_accel(a.v, v_des, p.a_max, p.a_norm, &self.k);
            let nearest = cands.iter().min_by(|x, y| x.view.gap.total_cmp(&y.view.gap)).copied();
            let slot = a.sample_count % a.samples.len();
            let delayed = (a.sample_count >= a.samples.len()).then(|| a.samples[slot]);
            a.samples[slot] = nearest.map_or(Sample { key: u64::MAX, dv: 0.0, dx: 0.0 }, |c| Sample {
                key: c.key,
                dv: c.view.speed - a.v,
                dx: c.view.gap,
            });
            a.sample_count += 1;

            let mut best = (free, DriverState::FreeDriving);
            for c in &cands {
                let r = if c.view.gap <= 0.0 {
                    (if a.v > 0.0 { -p.b_emerg } else { 0.0 }, DriverState::EmergencyDeceleration)
                } else {
                    match classify_state(a.v, p, Some(&c.view), &self.k) {
                        DriverState::FreeDriving => (free, DriverState::FreeDriving),
                        DriverState::NormalFollowing => {
                            let (dv, dx) = match delayed {
                                Some(s) if nearest.is_some_and(|n| n.key == c.key) && s.key == c.key && s.dx > 0.0 => {
                                    (s.dv, s.dx)
                                }
                                _ => (c.view.speed - a.v, c.view.gap),
                            };
                            (ghr_accel(a.v, dv, dx, &p.ghr, p.a_max, p.b_emerg)?.min(free), DriverState::NormalFollowing)
                        }
                        DriverState::EmergencyDeceleration => {
                            (emergency_decel(a.v, p, &c.view, &self.k), DriverState::EmergencyDeceleration)
                        }
                    }
                };
                if r.0 < best.0 || (r.0 == best.0 && best.1 == DriverState::FreeDriving) {
                    best = r;
                }
            }
            a.a = best.0;
            a.state = best.1;
        }
        self.cands = cands;
        Ok(())
    }

    fn integrate(&mut self, signals: &SignalState) {
        let dt = self.k.dt;
        let mut moved = false;
        for a in &mut self.agents {
            let o = a.origin.index();
            let v = (a.v + a.a * dt).max(0.0);
            let mut d = a.d + v * dt;
            let mut v = v;
            let line = self.line[o];
            if a.d < line && d >= line && self.controlled[o] && signals.get(a.origin) == Signal::Stop {
                d = a.d.max(line - CLAMP_EPS).min(d);
                v = 0.0;
                self.counters.forced_signal_stops += 1;
            }
            if !a.committed && a.d < a.in_len && d >= a.in_len {
                d = a.d.max(a.in_len - CLAMP_EPS).min(d);
                v = 0.0;
                self.counters.forced_yield_stops += 1;
            }
            if a.d < line && d >= line && self.controlled[o] && signals.get(a.origin) == Signal::Stop {
                self.counters.red_crossings += 1;
            }
            if v > 1e-3 {
                moved = true;
            }
            a.v = v;
            a.d = d;
        }
        if moved || self.agents.is_empty() {
            self.last_motion = self.time() + dt;
        }
    }

    fn exits(&mut self, t_end: f64) {
        let dt = self.k.dt;
        let mut i = 0;
        while i < self.agents.len() {
            let a = &self.agents[i];
            if a.d >= a.total {
                let d_prev = a.d - a.v * dt;
                let frac = if a.v > 0.0 { ((a.total - d_prev) / (a.v * dt)).clamp(0.0, 1.0) } else { 1.0 };
                let exit_time = t_end - dt + frac * dt;
                self.trips.push(TripRecord {
                    agent_id: a.id,
                    vtype: a.vtype,
                    origin: a.origin,
                    destination: a.destination,
                    entry_time: a.entry_time,
                    exit_time,
                    distance: a.total,
                    free_flow: self.free_flow[a.origin.index()][a.destination.index()][a.vtype.index()],
                });
                self.counters.exited += 1;
                self.agents.remove(i);
            } else {
                i += 1;
            }
        }
    }

    fn inject(&mut self, t_end: f64) {
        while let Some(arr) = self.arrivals.get(self.next_arrival) {
            if arr.time > t_end + 1e-9 {
                break;
            }
            self.queues[arr.origin.index()].push_back((self.next_arrival as u64, *arr));
            self.next_arrival += 1;
            self.counters.generated += 1;
        }
        let dt = self.k.dt;
        for o in ApproachId::ALL {
            let oi = o.index();
            if self.queues[oi].is_empty() {
                continue;
            }
            let lanes = self.frames.inbound[oi].len();
            // rearmost vehicle per lane: (rear position, speed, b_emerg)
            let mut last: Vec<Option<(f64, f64, f64)>> = vec![None; lanes];
            for a in self.agents.iter().filter(|a| a.origin == o) {
                let rear = a.d - a.length;
                if last[a.lane].is_none_or(|(r, _, _)| rear < r) {
                    last[a.lane] = Some((rear, a.v, self.catalog.get(a.vtype).b_emerg));
                }
            }
            while let Some(&(id, arr)) = self.queues[oi].front() {
                let mut agent = self.make_agent(id, o, arr.destination, arr.vtype, 0.0, 0.0, 0, arr.time);
                let open = self.open_in[oi].min(lanes);
                let (lo, hi) = self.preferred(&agent, open);
                let space_of = |l: usize| last[l].map_or(f64::INFINITY, |(r, _, _)| r);
                let lane = (lo..=hi).max_by(|&x, &y| space_of(x).total_cmp(&space_of(y)).then(y.cmp(&x))).unwrap();
                let p = self.catalog.get(arr.vtype);
                let v_des = self.v_des(&agent);
                let fresh = arr.time > t_end - dt;
                let elapsed = if fresh { (t_end - arr.time).max(0.0) } else { 0.0 };
                let (v, space) = match last[lane] {
                    None => (v_des, f64::INFINITY),
                    Some((space, v_l, b_l)) => {
                        let b = elapsed + dt;
                        let room = space - self.k.standstill_gap + v_l * v_l / (2.0 * b_l);
                        if room <= 0.0 {
                            break;
                        }
                        let v_max = p.a_norm * (-b + (b * b + 2.0 * room / p.a_norm).sqrt());
                        (v_des.min(v_max), space)
                    }
                };
                let pos = v * elapsed;
                if space - pos < self.k.standstill_gap + 0.5 {
                    break;
                }
                agent.d = pos;
                agent.v = v;
                agent.lane = lane;
                agent.ring_lane = lane.min(self.net.ring.lanes - 1);
                last[lane] = Some((pos - agent.length, v, p.b_emerg));
                self.queues[oi].pop_front();
                self.agents.push(agent);
                self.counters.injected += 1;
            }
        }
    }

    fn check_conservation(&self) -> Result<(), KernelError> {
        let c = &self.counters;
        if c.generated != c.injected + self.queued() || c.injected != c.exited + self.agents.len() {
            return Err(KernelError::Conservation {
                time: self.time(),
                detail: format!(
                    "generated {} injected {} queued {} exited {} in network {}",
                    c.generated,
                    c.injected,
                    self.queued(),
                    c.exited,
                    self.agents.len()
                ),
            });
        }
        Ok(())
    }

    /// Advances the world by one time step.
    pub fn step(&mut self) -> Result<(), KernelError> {
        let t = self.time();
        let t_end = (self.steps + 1) as f64 * self.k.dt;
        self.refresh_lanes();
        let signals = signal_state(&self.scheme, t);
        self.build_frames();
        self.decide(&signals);
        self.accelerations()?;
        self.integrate(&signals);
        self.exits(t_end);
        self.inject(t_end);
        self.steps += 1;
        self.check_conservation()?;
        if !self.agents.is_empty() && self.time() - self.last_motion > GRIDLOCK_AFTER_S {
            return Err(KernelError::Gridlock {
                time: self.time(),
                stopped: self.agents.len(),
                for_s: self.time() - self.last_motion,
            });
        }
        Ok(())
    }

    /// Steps until the clock reaches `t_end`, then checks the final state
    /// for overlaps.
    pub fn run_until(&mut self, t_end: f64) -> Result<(), KernelError> {
        while self.time() < t_end - 1e-9 {
            self.step()?;
        }
        self.audit()
    }

    /// Checks every vehicle against its leaders without moving anything.
    pub fn audit(&mut self) -> Result<(), KernelError> {
        self.build_frames();
        let mut cands = std::mem::take(&mut self.cands);
        let r = (0..self.agents.len()).try_for_each(|i| self.candidates(i, &mut cands));
        self.cands = cands;
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{build_bicutan_network, NetworkGeometryConfig};
    use crate::schemes::{scheme, SchemeId};

    fn world(id: SchemeId, arrivals: Vec<Arrival>) -> World {
        let net = build_bicutan_network(&NetworkGeometryConfig::default()).unwrap();
        World::new(&net, &scheme(id), &VehicleCatalog::default(), &KernelParams::default(), arrivals).unwrap()
    }

    #[test]
    fn lone_vehicle_at_goal_speed_advances_exactly() {
        let mut w = world(SchemeId::T0, vec![]);
        let v = w.params(VehicleType::Jeepney).v_goal();
        w.spawn(ApproachId::B, ApproachId::A, VehicleType::Jeepney, 10.0, v, 0).unwrap();
        w.step().unwrap();
        let a = &w.agents()[0];
        assert_eq!(a.d, 10.0 + v * 0.1);
        assert_eq!(a.state, DriverState::FreeDriving);
    }

    #[test]
    fn red_signal_slows_first_vehicle() {
        let mut w = world(SchemeId::T1, vec![]);
        w.run_until(10.0).unwrap();
        assert_eq!(w.signals().get(ApproachId::B), Signal::Stop);
        let line = w.network().stop_line(ApproachId::B);
        let v = 11.0;
        w.spawn(ApproachId::B, ApproachId::C, VehicleType::Jeepney, line - 35.0, v, 0).unwrap();
        w.step().unwrap();
        let a = &w.agents()[0];
        assert!(a.v < v, "speed {} should drop", a.v);
        w.run_until(29.9).unwrap();
        let a = &w.agents()[0];
        assert!(a.d < line);
        assert!(a.v < 0.05);
        assert_eq!(w.counters().forced_signal_stops, 0);
    }

    #[test]
    fn lone_trip_has_no_delay() {
        let arr = Arrival { time: 0.05, origin: ApproachId::A, destination: ApproachId::C, vtype: VehicleType::Taxi };
        let mut w = world(SchemeId::T0, vec![arr]);
        w.run_until(60.0).unwrap();
        let trip = &w.trips()[0];
        let travel = trip.exit_time - trip.entry_time;
        assert!((travel - trip.free_flow).abs() <= 0.1 + 1e-9, "travel {travel} vs free flow {}", trip.free_flow);
    }

    #[test]
    fn same_input_same_trajectory() {
        let arrivals: Vec<Arrival> = (0..60)
            .map(|i| Arrival {
                time: i as f64 * 1.7,
                origin: ApproachId::ALL[i % 3],
                destination: ApproachId::ALL[(i + 1 + i / 3 % 2) % 3],
                vtype: VehicleType::ALL[i % 8],
            })
            .collect();
        let run = || {
            let mut w = world(SchemeId::T4, arrivals.clone());
            w.run_until(200.0).unwrap();
            w.trips().iter().map(|t| (t.agent_id, t.exit_time.to_bits())).collect::<Vec<_>>()
        };
        let a = run();
        assert!(!a.is_empty());
        assert_eq!(a, run());
    }

    #[test]
    fn queue_at_yield_line_waits_for_gap() {
        // two vehicles meet at B's merge point: the circulating one has priority
        let mut w = world(SchemeId::T0, vec![]);
        let line_b = w.network().arm_length(ApproachId::B);
        w.spawn(ApproachId::C, ApproachId::A, VehicleType::Bus, 70.0, 11.0, 1).unwrap();
        w.spawn(ApproachId::B, ApproachId::A, VehicleType::Taxi, line_b - 30.0, 11.0, 0).unwrap();
        w.run_until(40.0).unwrap();
        assert_eq!(w.trips().len(), 2);
        assert_eq!(w.counters().forced_yield_stops, 0);
    }
}
