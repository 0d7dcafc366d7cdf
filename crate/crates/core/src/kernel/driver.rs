//! Driver states and the acceleration laws for each of them.

use serde::{Deserialize, Serialize};

use super::params::{GhrParams, KernelParams, VehicleTypeParams};
use super::KernelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DriverState {
    FreeDriving,
    NormalFollowing,
    EmergencyDeceleration,
}

/// What a driver perceives of the obstacle ahead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeaderView {
    /// Bumper-to-bumper gap, m.
    pub gap: f64,
    /// m/s
    pub speed: f64,
    /// The leader's strongest braking, m/s², positive.
    pub b_emerg: f64,
}

impl LeaderView {
    /// A stationary obstacle such as a stop line.
    pub fn stationary(gap: f64) -> Self {
        Self { gap, speed: 0.0, b_emerg: 1.0 }
    }
}

/// Smallest gap from which the follower can still stop behind a leader that
/// brakes as hard as it can, while braking only at its normal rate.
pub fn safe_gap(v: f64, a_norm: f64, leader: &LeaderView, k: &KernelParams) -> f64 {
    k.standstill_gap + v * k.dt + v * v / (2.0 * a_norm) - leader.speed * leader.speed / (2.0 * leader.b_emerg)
}

pub fn classify_state(
    v: f64,
    p: &VehicleTypeParams,
    leader: Option<&LeaderView>,
    k: &KernelParams,
) -> DriverState {
    let Some(l) = leader else {
        return DriverState::FreeDriving;
    };
    if l.gap < safe_gap(v, p.a_norm, l, k) {
        return DriverState::EmergencyDeceleration;
    }
    let headway = if v > 0.0 { l.gap / v } else { f64::INFINITY };
    if headway > k.h_free {
        DriverState::FreeDriving
    } else {
        DriverState::NormalFollowing
    }
}

/// Accelerate at `a_max` below the desired speed, brake at `a_norm` above it,
/// and never step past it.
pub fn free_driving_accel(v: f64, v_des: f64, a_max: f64, a_norm: f64, k: &KernelParams) -> f64 {
    let diff = v_des - v;
    if diff.abs() <= k.speed_tolerance {
        0.0
    } else if diff > 0.0 {
        a_max.min(diff / k.dt)
    } else {
        (-a_norm).max(diff / k.dt)
    }
}

/// Stimulus-response following law. `dv` is leader minus own speed and `dx`
/// the bumper gap, both as perceived one reaction time ago.
pub fn ghr_accel(v: f64, dv: f64, dx: f64, g: &GhrParams, a_max: f64, b_emerg: f64) -> Result<f64, KernelError> {
    if !(dx > 0.0) {
        return Err(KernelError::NonPositiveSpacing(dx));
    }
    let c = if dv > 0.0 {
        g.c_acc
    } else if dv < 0.0 {
        g.c_dec
    } else {
        return Ok(0.0);
    };
    let a = c * v.max(0.0).powf(g.speed_exp) * dv / dx.powf(g.spacing_exp);
    Ok(a.clamp(-b_emerg, a_max))
}

/// Braking that stops the driver within the available gap, assuming the
/// leader brakes at its own maximum. Returned as a negative acceleration.
pub fn emergency_decel(v: f64, p: &VehicleTypeParams, leader: &LeaderView, k: &KernelParams) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    let room = leader.gap - k.standstill_gap - v * k.dt + leader.speed * leader.speed / (2.0 * leader.b_emerg);
    if room <= 0.0 {
        return -p.b_emerg;
    }
    let b = v * v / (2.0 * room);
    -b.clamp(p.a_norm, p.b_emerg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::params::{VehicleCatalog, VehicleType};

    fn jeepney() -> VehicleTypeParams {
        VehicleCatalog::default().get(VehicleType::Jeepney).clone()
    }

    #[test]
    fn no_leader_is_free() {
        let k = KernelParams::default();
        assert_eq!(classify_state(10.0, &jeepney(), None, &k), DriverState::FreeDriving);
    }

    #[test]
    fn tiny_gap_is_emergency() {
        let k = KernelParams::default();
        let l = LeaderView::stationary(1.0);
        assert_eq!(classify_state(15.0, &jeepney(), Some(&l), &k), DriverState::EmergencyDeceleration);
    }

    #[test]
    fn two_second_headway_is_following() {
        // v = 10, leader at 10 m/s, gap 20 m -> headway 2 s < 4 s.
        // safe gap = 1 + 1 + 100/4 - 100/8 = 14.5 m <= 20 m
        let k = KernelParams::default();
        let l = LeaderView { gap: 20.0, speed: 10.0, b_emerg: 4.0 };
        assert!((safe_gap(10.0, 2.0, &l, &k) - 14.5).abs() < 1e-12);
        assert_eq!(classify_state(10.0, &jeepney(), Some(&l), &k), DriverState::NormalFollowing);
    }

    #[test]
    fn long_headway_is_free() {
        let k = KernelParams::default();
        let l = LeaderView { gap: 50.0, speed: 10.0, b_emerg: 4.0 };
        assert_eq!(classify_state(10.0, &jeepney(), Some(&l), &k), DriverState::FreeDriving);
    }

    #[test]
    fn free_accel_rules() {
        let k = KernelParams::default();
        let p = jeepney();
        let vg = p.v_goal();
        assert_eq!(free_driving_accel(0.0, vg, p.a_max, p.a_norm, &k), p.a_max);
        assert_eq!(free_driving_accel(vg, vg, p.a_max, p.a_norm, &k), 0.0);
        let above = vg + 5.0 / 3.6;
        assert_eq!(free_driving_accel(above, vg, p.a_max, p.a_norm, &k), -p.a_norm);
        // clipped on the final step so the speed lands on the goal
        let a = free_driving_accel(vg - 0.05, vg, p.a_max, p.a_norm, &k);
        assert!((vg - 0.05 + a * k.dt - vg).abs() < 1e-12);
    }

    #[test]
    fn reaches_goal_speed_in_minimum_time() {
        let k = KernelParams::default();
        let p = jeepney();
        let vg = p.v_goal();
        let t_min = vg / p.a_max;
        let mut v = 0.0;
        let mut t = 0.0;
        while (v - vg).abs() > k.speed_tolerance {
            v += free_driving_accel(v, vg, p.a_max, p.a_norm, &k) * k.dt;
            t += k.dt;
            assert!(t < 100.0);
        }
        assert!((t - t_min).abs() <= k.dt + 1e-9, "t = {t}, t_min = {t_min}");
    }

    #[test]
    fn ghr_formula() {
        let g = GhrParams { c_acc: 0.6, c_dec: 0.5, speed_exp: 0.0, spacing_exp: 0.0 };
        assert_eq!(ghr_accel(10.0, 0.0, 5.0, &g, 2.0, 4.0).unwrap(), 0.0);
        assert!((ghr_accel(10.0, -2.0, 5.0, &g, 2.0, 4.0).unwrap() + 1.0).abs() < 1e-12);
        // m = 1, l = 2: c * v * dv / dx^2
        let g = GhrParams { c_acc: 13.0, c_dec: 13.0, speed_exp: 1.0, spacing_exp: 2.0 };
        let want = 13.0 * 10.0 * 1.0 / 400.0;
        assert!((ghr_accel(10.0, 1.0, 20.0, &g, 2.0, 4.0).unwrap() - want).abs() < 1e-12);
        assert!(ghr_accel(10.0, 1.0, 0.0, &g, 2.0, 4.0).is_err());
    }

    #[test]
    fn ghr_is_clamped() {
        let g = GhrParams::default();
        assert_eq!(ghr_accel(10.0, -30.0, 0.5, &g, 1.5, 4.0).unwrap(), -4.0);
        assert_eq!(ghr_accel(10.0, 30.0, 0.5, &g, 1.5, 4.0).unwrap(), 1.5);
    }

    #[test]
    fn emergency_boundaries() {
        let k = KernelParams::default();
        let p = jeepney();
        let v: f64 = 15.0;
        let at_limit = LeaderView::stationary(v * v / (2.0 * p.b_emerg));
        assert_eq!(emergency_decel(v, &p, &at_limit, &k), -p.b_emerg);
        // gap 56.25 m: needed braking 225 / (2 * (56.25 - 1 - 1.5)) = 2.093 m/s²
        let double = LeaderView::stationary(v * v / p.b_emerg);
        let b = -emergency_decel(v, &p, &double, &k);
        assert!((b - 225.0 / 107.5).abs() < 1e-12);
        assert!(b > p.a_norm && b < p.b_emerg);
        assert_eq!(emergency_decel(0.0, &p, &double, &k), 0.0);
    }

    proptest::proptest! {
        #[test]
        fn ghr_sign_follows_speed_difference(
            v in 0.0f64..30.0, dv in -20.0f64..20.0, dx in 0.01f64..200.0,
        ) {
            let a = ghr_accel(v, dv, dx, &GhrParams::default(), 2.0, 5.0).unwrap();
            proptest::prop_assert_eq!(a.signum() == dv.signum() || a == 0.0 && dv == 0.0, true);
        }
    }
}
