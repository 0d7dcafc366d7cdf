//! Gap acceptance at the ring entry.

use super::driver::{safe_gap, LeaderView};
use super::params::{KernelParams, VehicleTypeParams};

/// Accept a time gap in circulating traffic: the critical gap for the first
/// vehicle, the follow-up time when queued right behind one that just entered.
pub fn gap_acceptance_entry(gap_s: f64, follow_up: bool, critical_gap: f64, follow_up_time: f64) -> bool {
    gap_s >= if follow_up { follow_up_time } else { critical_gap }
}

/// How many queued vehicles enter within one circulating gap.
pub fn vehicles_admitted(gap_s: f64, critical_gap: f64, follow_up_time: f64) -> usize {
    if gap_s < critical_gap {
        0
    } else {
        1 + ((gap_s - critical_gap) / follow_up_time).floor() as usize
    }
}

/// A vehicle whose path runs through the merge point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeParticipant {
    /// Distance from its front to the merge point; negative once past it.
    pub to_merge: f64,
    pub speed: f64,
    pub length: f64,
    pub a_norm: f64,
    pub b_emerg: f64,
}

/// The entering driver's side of the merge decision.
#[derive(Debug, Clone, Copy)]
pub struct Entrant<'a> {
    pub to_merge: f64,
    pub speed: f64,
    pub params: &'a VehicleTypeParams,
    pub follow_up: bool,
}

impl Entrant<'_> {
    /// Time to reach the merge point.
    pub fn time_to_merge(&self) -> f64 {
        let m = self.to_merge.max(0.0);
        if self.speed >= 1.0 {
            m / self.speed
        } else {
            (2.0 * m / self.params.a_max).sqrt()
        }
    }
}

/// Decides whether an entrant may commit to the ring.
///
/// Vehicles behind the merge point must leave a time gap after the
/// entrant's arrival of at least the critical (or follow-up) gap; vehicles
/// ahead must pass the merge sufficiently earlier. Both sides also need a
/// safe spacing once merged.
pub fn accept_merge(e: &Entrant<'_>, others: &[MergeParticipant], k: &KernelParams) -> bool {
    let tau = e.time_to_merge();
    for o in others {
        if o.to_merge > e.to_merge {
            let t_arr = o.to_merge / o.speed.max(1e-3);
            if !gap_acceptance_entry(t_arr - tau, e.follow_up, e.params.critical_gap, e.params.follow_up) {
                return false;
            }
            let me = LeaderView { gap: 0.0, speed: e.speed, b_emerg: e.params.b_emerg };
            let spacing = o.to_merge - e.to_merge - e.params.length;
            if spacing < safe_gap(o.speed, o.a_norm, &me, k).max(k.standstill_gap) {
                return false;
            }
        } else {
            let t_arr = if o.to_merge <= 0.0 { 0.0 } else { o.to_merge / o.speed.max(1e-3) };
            if o.to_merge > 0.0 && tau - t_arr < k.lead_clearance {
                return false;
            }
            let lead = LeaderView { gap: 0.0, speed: o.speed, b_emerg: o.b_emerg };
            let spacing = e.to_merge - o.to_merge - o.length;
            if spacing < safe_gap(e.speed, e.params.a_norm, &lead, k).max(k.standstill_gap) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::params::{VehicleCatalog, VehicleType};

    #[test]
    fn critical_and_follow_up_gaps() {
        assert!(gap_acceptance_entry(10.0, false, 3.5, 2.5));
        assert!(!gap_acceptance_entry(1.0, false, 3.5, 2.5));
        assert!(gap_acceptance_entry(2.6, true, 3.5, 2.5));
        assert!(!gap_acceptance_entry(2.6, false, 3.5, 2.5));
    }

    #[test]
    fn two_vehicles_share_a_long_gap() {
        // 6.2 >= 3.5 + 2.5
        assert_eq!(vehicles_admitted(6.2, 3.5, 2.5), 2);
        assert_eq!(vehicles_admitted(5.9, 3.5, 2.5), 1);
        assert_eq!(vehicles_admitted(1.0, 3.5, 2.5), 0);
    }

    fn taxi() -> VehicleTypeParams {
        VehicleCatalog::default().get(VehicleType::Taxi).clone()
    }

    fn ring_car(to_merge: f64, speed: f64) -> MergeParticipant {
        MergeParticipant { to_merge, speed, length: 5.0, a_norm: 2.5, b_emerg: 5.0 }
    }

    #[test]
    fn empty_ring_accepts() {
        let p = taxi();
        let e = Entrant { to_merge: 1.0, speed: 0.0, params: &p, follow_up: false };
        assert!(accept_merge(&e, &[], &KernelParams::default()));
    }

    #[test]
    fn close_lag_rejects_far_lag_accepts() {
        let k = KernelParams::default();
        let p = taxi();
        let e = Entrant { to_merge: 1.0, speed: 0.0, params: &p, follow_up: false };
        // arrives 1 s after the entrant would: rejected
        assert!(!accept_merge(&e, &[ring_car(10.0 * (e.time_to_merge() + 1.0), 10.0)], &k));
        assert!(accept_merge(&e, &[ring_car(10.0 * (e.time_to_merge() + 6.0), 10.0)], &k));
    }

    #[test]
    fn follow_up_uses_shorter_gap() {
        let k = KernelParams::default();
        let p = taxi();
        let first = Entrant { to_merge: 1.0, speed: 0.0, params: &p, follow_up: false };
        let lag = ring_car(10.0 * (first.time_to_merge() + 3.0), 10.0);
        assert!(!accept_merge(&first, &[lag], &k));
        let second = Entrant { follow_up: true, ..first };
        assert!(accept_merge(&second, &[lag], &k));
    }

    #[test]
    fn lead_passing_right_now_blocks() {
        let k = KernelParams::default();
        let p = taxi();
        let e = Entrant { to_merge: 1.0, speed: 0.0, params: &p, follow_up: false };
        // a car straddling the merge point leaves no room
        assert!(!accept_merge(&e, &[ring_car(-2.0, 8.0)], &k));
        // one well past it does not
        assert!(accept_merge(&e, &[ring_car(-30.0, 8.0)], &k));
    }
}
