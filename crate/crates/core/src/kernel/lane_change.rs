//! Lane choice on the approach arms.
//!
//! Lane 0 is the outermost (rightmost) lane. A route may require a subset of
//! lanes; being outside it forces a change, otherwise a driver moves only for
//! a clear speed advantage. Either way both the lead and lag gaps in the
//! target lane must be safe.

use super::driver::{safe_gap, LeaderView};
use super::params::{KernelParams, VehicleTypeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaneDecision {
    Stay,
    /// Toward a higher lane index.
    ChangeLeft,
    /// Toward a lower lane index.
    ChangeRight,
}

/// The vehicle that would end up behind us after a change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagView {
    /// From its front to our rear, m.
    pub gap: f64,
    pub speed: f64,
    pub a_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdjacentLane {
    pub lead: Option<LeaderView>,
    pub lag: Option<LagView>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NeighborView {
    pub current_lead: Option<LeaderView>,
    /// `None` when the lane does not exist or is closed.
    pub left: Option<AdjacentLane>,
    pub right: Option<AdjacentLane>,
}

/// Speed a driver expects to hold in a lane.
fn lane_speed(lead: Option<&LeaderView>, v_des: f64, k: &KernelParams) -> f64 {
    match lead {
        Some(l) if l.gap < v_des * k.h_free + k.standstill_gap => l.speed.min(v_des),
        _ => v_des,
    }
}

fn gaps_ok(v: f64, p: &VehicleTypeParams, lane: &AdjacentLane, k: &KernelParams) -> bool {
    let lead_ok = lane.lead.is_none_or(|l| l.gap >= safe_gap(v, p.a_norm, &l, k).max(k.standstill_gap));
    let me = LeaderView { gap: 0.0, speed: v, b_emerg: p.b_emerg };
    let lag_ok = lane.lag.is_none_or(|g| g.gap >= safe_gap(g.speed, g.a_norm, &me, k).max(k.standstill_gap));
    lead_ok && lag_ok
}

/// `allowed[i]` says whether lane `i` serves the route; its length is the
/// number of lanes on the link.
pub fn lane_change_decision(
    v: f64,
    v_des: f64,
    p: &VehicleTypeParams,
    lane: usize,
    allowed: &[bool],
    n: &NeighborView,
    k: &KernelParams,
) -> LaneDecision {
    if !allowed.get(lane).copied().unwrap_or(false) {
        let right_ok = allowed[..lane.min(allowed.len())].iter().any(|&a| a);
        let (dir, view) = if right_ok {
            (LaneDecision::ChangeRight, n.right)
        } else {
            (LaneDecision::ChangeLeft, n.left)
        };
        return match view {
            Some(l) if gaps_ok(v, p, &l, k) => dir,
            _ => LaneDecision::Stay,
        };
    }

    let own = lane_speed(n.current_lead.as_ref(), v_des, k);
    let mut best: Option<(LaneDecision, f64)> = None;
    let options = [(LaneDecision::ChangeRight, n.right, lane.checked_sub(1)), (LaneDecision::ChangeLeft, n.left, Some(lane + 1))];
    for (dir, view, target) in options {
        let (Some(view), Some(t)) = (view, target) else { continue };
        if !allowed.get(t).copied().unwrap_or(false) {
            continue;
        }
        let gain = lane_speed(view.lead.as_ref(), v_des, k) - own;
        if gain >= k.lane_change_advantage && best.is_none_or(|b| gain > b.1) && gaps_ok(v, p, &view, k) {
            best = Some((dir, gain));
        }
    }
    best.map_or(LaneDecision::Stay, |b| b.0)
}
