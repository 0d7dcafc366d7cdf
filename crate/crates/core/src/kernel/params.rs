//! Vehicle-type and engine parameters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::KernelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VehicleType {
    Jeepney,
    Bus,
    Truck,
    Taxi,
    Auv,
    Motorcycle,
    Tricycle,
    Bicycle,
}

impl VehicleType {
    pub const ALL: [VehicleType; 8] = [
        VehicleType::Jeepney,
        VehicleType::Bus,
        VehicleType::Truck,
        VehicleType::Taxi,
        VehicleType::Auv,
        VehicleType::Motorcycle,
        VehicleType::Tricycle,
        VehicleType::Bicycle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VehicleType::Jeepney => "jeepney",
            VehicleType::Bus => "bus",
            VehicleType::Truck => "truck",
            VehicleType::Taxi => "taxi",
            VehicleType::Auv => "AUV",
            VehicleType::Motorcycle => "motorcycle",
            VehicleType::Tricycle => "tricycle",
            VehicleType::Bicycle => "bicycle",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for VehicleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VehicleType {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VehicleType::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| KernelError::UnknownVehicleType(s.to_string()))
    }
}

impl Serialize for VehicleType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for VehicleType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Stimulus-response sensitivities: `a = c * v^speed_exp * dv / dx^spacing_exp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GhrParams {
    /// Used when the leader pulls away (dv > 0).
    pub c_acc: f64,
    /// Used when closing in on the leader (dv < 0).
    pub c_dec: f64,
    pub speed_exp: f64,
    pub spacing_exp: f64,
}

impl Default for GhrParams {
    fn default() -> Self {
        Self { c_acc: 0.6, c_dec: 1.0, speed_exp: 0.0, spacing_exp: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleTypeParams {
    pub vtype: VehicleType,
    /// m
    pub length: f64,
    /// m/s²
    pub a_max: f64,
    /// Normal deceleration, m/s², stored positive.
    pub a_norm: f64,
    /// Emergency deceleration, m/s², stored positive.
    pub b_emerg: f64,
    /// Desired speed, kph.
    pub v_goal_kph: f64,
    /// s
    pub reaction_time: f64,
    pub ghr: GhrParams,
    /// s
    pub critical_gap: f64,
    /// s
    pub follow_up: f64,
}

impl VehicleTypeParams {
    pub fn new(vtype: VehicleType, length: f64, a_max: f64, a_norm: f64, b_emerg: f64, v_goal_kph: f64) -> Self {
        Self {
            vtype,
            length,
            a_max,
            a_norm,
            b_emerg,
            v_goal_kph,
            reaction_time: 1.0,
            ghr: GhrParams::default(),
            critical_gap: 3.5,
            follow_up: 2.5,
        }
    }

    pub fn v_goal(&self) -> f64 {
        self.v_goal_kph / 3.6
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        let fields = [
            ("length", self.length),
            ("a_max", self.a_max),
            ("a_norm", self.a_norm),
            ("b_emerg", self.b_emerg),
            ("v_goal_kph", self.v_goal_kph),
            ("reaction_time", self.reaction_time),
            ("critical_gap", self.critical_gap),
            ("follow_up", self.follow_up),
            ("ghr.c_acc", self.ghr.c_acc),
            ("ghr.c_dec", self.ghr.c_dec),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(KernelError::InvalidParams(format!("{}: {name} must be > 0, got {v}", self.vtype)));
            }
        }
        if self.b_emerg < self.a_norm {
            return Err(KernelError::InvalidParams(format!(
                "{}: b_emerg ({}) must be >= a_norm ({})",
                self.vtype, self.b_emerg, self.a_norm
            )));
        }
        if !(self.ghr.spacing_exp >= 0.0 && self.ghr.speed_exp.is_finite()) {
            return Err(KernelError::InvalidParams(format!("{}: bad GHR exponents", self.vtype)));
        }
        Ok(())
    }
}

/// Parameters for every vehicle type, indexed by [`VehicleType::index`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VehicleCatalog {
    types: Vec<VehicleTypeParams>,
}

impl Default for VehicleCatalog {
    fn default() -> Self {
        use VehicleType::*;
        Self {
            types: vec![
                VehicleTypeParams::new(Jeepney, 7.0, 1.5, 2.0, 4.0, 40.0),
                VehicleTypeParams::new(Bus, 12.0, 1.0, 1.5, 3.5, 40.0),
                VehicleTypeParams::new(Truck, 10.0, 0.8, 1.5, 3.5, 35.0),
                VehicleTypeParams::new(Taxi, 5.0, 2.0, 2.5, 5.0, 50.0),
                VehicleTypeParams::new(Auv, 5.0, 2.0, 2.5, 5.0, 50.0),
                VehicleTypeParams::new(Motorcycle, 2.0, 2.5, 3.0, 6.0, 50.0),
                VehicleTypeParams::new(Tricycle, 3.0, 1.0, 2.0, 4.0, 25.0),
                VehicleTypeParams::new(Bicycle, 2.0, 0.8, 1.5, 3.0, 15.0),
            ],
        }
    }
}

impl VehicleCatalog {
    /// Builds a catalog from a list covering every type exactly once, in any order.
    pub fn from_list(list: Vec<VehicleTypeParams>) -> Result<Self, KernelError> {
        let mut slots: Vec<Option<VehicleTypeParams>> = vec![None; VehicleType::ALL.len()];
        for p in list {
            p.validate()?;
            let i = p.vtype.index();
            if slots[i].replace(p).is_some() {
                return Err(KernelError::InvalidParams(format!("{} listed twice", VehicleType::ALL[i])));
            }
        }
        let types = slots
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or_else(|| KernelError::InvalidParams(format!("{} missing", VehicleType::ALL[i]))))
            .collect::<Result<_, _>>()?;
        Ok(Self { types })
    }

    pub fn get(&self, t: VehicleType) -> &VehicleTypeParams {
        &self.types[t.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &VehicleTypeParams> {
        self.types.iter()
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        Self::from_list(self.types.clone()).map(|_| ())
    }
}

/// Engine-wide settings shared by all vehicle types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelParams {
    /// Integration step, s.
    pub dt: f64,
    /// Time headway above which a driver is unconstrained, s.
    pub h_free: f64,
    /// Bumper gap kept at standstill, m.
    pub standstill_gap: f64,
    /// Leaders farther than this are ignored, m.
    pub perception_range: f64,
    /// Extra distance added to the braking distance when a driver starts
    /// attending to a stop or yield line, m.
    pub decision_margin: f64,
    /// Spare time required to clear a stop line before the signal turns, s.
    pub signal_time_margin: f64,
    /// A circulating vehicle ahead must reach the merge this much earlier, s.
    pub lead_clearance: f64,
    /// No lane changes this close to the stop line, m.
    pub lane_change_freeze: f64,
    /// Speed gain needed for a discretionary lane change, m/s.
    pub lane_change_advantage: f64,
    /// Minimum time between two lane changes of one driver, s.
    pub lane_change_cooldown: f64,
    /// Speed tolerance for "at goal speed", m/s.
    pub speed_tolerance: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self {
            dt: 0.1,
            h_free: 4.0,
            standstill_gap: 1.0,
            perception_range: 150.0,
            decision_margin: 5.0,
            signal_time_margin: 1.0,
            lead_clearance: 1.0,
            lane_change_freeze: 30.0,
            lane_change_advantage: 2.0,
            lane_change_cooldown: 3.0,
            speed_tolerance: 1e-6,
        }
    }
}

impl KernelParams {
    pub fn validate(&self) -> Result<(), KernelError> {
        let positive = [
            ("dt", self.dt),
            ("h_free", self.h_free),
            ("standstill_gap", self.standstill_gap),
            ("perception_range", self.perception_range),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(KernelError::InvalidParams(format!("{name} must be > 0, got {v}")));
            }
        }
        let non_negative = [
            ("decision_margin", self.decision_margin),
            ("signal_time_margin", self.signal_time_margin),
            ("lead_clearance", self.lead_clearance),
            ("lane_change_freeze", self.lane_change_freeze),
            ("lane_change_advantage", self.lane_change_advantage),
            ("lane_change_cooldown", self.lane_change_cooldown),
            ("speed_tolerance", self.speed_tolerance),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(KernelError::InvalidParams(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Samples held in the perception buffer for a given reaction time.
    pub fn delay_steps(&self, reaction_time: f64) -> usize {
        // tolerate representation error, e.g. 1.0 / 0.1 = 10.000000000000002
        ((reaction_time / self.dt) - 1e-9).ceil().max(0.0) as usize
    }
}
