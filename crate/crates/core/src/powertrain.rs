//! Longitudinal vehicle dynamics: battery power over a drive cycle and the
//! resulting energy per mile, plus diesel energy equivalents.

use serde::{Deserialize, Serialize};

use crate::drivecycle::{trapezoid, DriveCycle};
use crate::error::{Error, Result};
use crate::units::{joules_to_kwh, meters_to_miles};

/// Energy content of diesel used for per-mile equivalents.
pub const DIESEL_KWH_PER_GALLON: f64 = 37.95;

/// Energy factor for a truck driving in a three-truck platoon.
pub const PLATOON_ENERGY_FACTOR: f64 = 0.85;

/// Regenerative charging is limited to this C-rate.
pub const REGEN_C_RATE_LIMIT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    pub drag_coefficient: f64,
    /// m²
    pub frontal_area: f64,
    pub rolling_resistance: f64,
    /// kg
    pub total_weight: f64,
    pub battery_to_wheels_eff: f64,
    pub brake_recovery_eff: f64,
    /// kg/m³
    pub air_density: f64,
    /// m/s²
    pub gravity: f64,
    /// Multiplier on net energy; 1.0 for a single truck.
    pub platoon_energy_factor: f64,
}

impl Default for VehicleParams {
    /// Class 8 baseline: Cd 0.40, Crr 0.0075, 80,000 lb gross.
    fn default() -> Self {
        Self {
            drag_coefficient: 0.40,
            frontal_area: 10.0,
            rolling_resistance: 0.0075,
            total_weight: 36_360.0,
            battery_to_wheels_eff: 0.88,
            brake_recovery_eff: 0.65,
            air_density: 1.2,
            gravity: 9.81,
            platoon_energy_factor: 1.0,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.drag_coefficient > 0.0, "drag coefficient must be > 0"),
            (self.frontal_area > 0.0, "frontal area must be > 0"),
            (
                self.rolling_resistance >= 0.0,
                "rolling resistance must be >= 0",
            ),
            (self.total_weight > 0.0, "total weight must be > 0"),
            (
                self.battery_to_wheels_eff > 0.0 && self.battery_to_wheels_eff <= 1.0,
                "battery-to-wheels efficiency must be in (0, 1]",
            ),
            (
                (0.0..=1.0).contains(&self.brake_recovery_eff),
                "brake recovery efficiency must be in [0, 1]",
            ),
            (self.air_density > 0.0, "air density must be > 0"),
            (self.gravity > 0.0, "gravity must be > 0"),
            (
                self.platoon_energy_factor > 0.0 && self.platoon_energy_factor <= 1.0,
                "platoon energy factor must be in (0, 1]",
            ),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::Config(format!("vehicle: {msg}"))),
            None => Ok(()),
        }
    }

    pub fn with_drag(mut self, cd: f64) -> Self {
        self.drag_coefficient = cd;
        self
    }

    pub fn platooned(mut self, factor: f64) -> Self {
        self.platoon_energy_factor = factor;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RoadProfile {
    /// Rise over run.
    pub grade: f64,
    /// Weight of the grade term, in [0, 1].
    pub grade_fraction: f64,
}

impl RoadProfile {
    pub const FLAT: RoadProfile = RoadProfile {
        grade: 0.0,
        grade_fraction: 0.0,
    };

    pub fn new(grade: f64, grade_fraction: f64) -> Result<Self> {
        let road = Self {
            grade,
            grade_fraction,
        };
        road.validate()?;
        Ok(road)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.grade_fraction) {
            return Err(Error::arg(format!(
                "grade fraction must be in [0, 1], got {}",
                self.grade_fraction
            )));
        }
        if !(self.grade.abs() <= 0.10) {
            return Err(Error::arg(format!(
                "|grade| must be <= 0.10, got {}",
                self.grade
            )));
        }
        Ok(())
    }
}

/// Battery-terminal traction power in watts: aerodynamic, rolling, weighted
/// grade and inertial terms divided by the battery-to-wheels efficiency.
pub fn traction_power(v: f64, dvdt: f64, p: &VehicleParams, road: &RoadProfile) -> f64 {
    let aero = 0.5 * p.air_density * p.drag_coefficient * p.frontal_area * v * v * v;
    let rolling = p.rolling_resistance * p.total_weight * p.gravity * v;
    let grade = road.grade_fraction * p.total_weight * p.gravity * v * road.grade;
    let inertia = p.total_weight * v * dvdt;
    (aero + rolling + grade + inertia) / p.battery_to_wheels_eff
}

/// Regenerative power in watts during deceleration; negative means charging.
/// The magnitude is capped at a 2C charge rate for `pack_kwh`.
pub fn regen_power(v: f64, dvdt: f64, p: &VehicleParams, pack_kwh: f64) -> Result<f64> {
    if !(dvdt < 0.0) {
        return Err(Error::arg(format!(
            "regen_power needs dvdt < 0, got {dvdt}; use traction_power"
        )));
    }
    if !(pack_kwh > 0.0) {
        return Err(Error::arg(format!(
            "pack capacity must be > 0, got {pack_kwh}"
        )));
    }
    let recovered =
        (p.total_weight * v * dvdt).abs() * p.battery_to_wheels_eff * p.brake_recovery_eff;
    let cap_w = REGEN_C_RATE_LIMIT * pack_kwh * 1000.0;
    Ok(-recovered.min(cap_w))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyTrace {
    /// (time s, battery power W), already scaled by the platoon factor.
    pub power_series: Vec<(f64, f64)>,
    pub net_energy_kwh: f64,
    pub distance_mi: f64,
    pub energy_per_mile: f64,
}

impl EnergyTrace {
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t_s", "power_w"])?;
        for (t, p) in &self.power_series {
            w.write_record([t.to_string(), p.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Centered finite differences; one-sided at the endpoints.
pub fn acceleration(times: &[f64], speeds: &[f64]) -> Vec<f64> {
    let n = times.len();
    (0..n)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                i if i == n - 1 => (n - 2, n - 1),
                i => (i - 1, i + 1),
            };
            (speeds[b] - speeds[a]) / (times[b] - times[a])
        })
        .collect()
}

/// Evaluates battery power at every sample of `cycle` and integrates it.
pub fn simulate_cycle(
    cycle: &DriveCycle,
    params: &VehicleParams,
    road: &RoadProfile,
    pack_kwh: f64,
) -> Result<EnergyTrace> {
    params.validate()?;
    road.validate()?;
    if !(pack_kwh > 0.0) {
        return Err(Error::arg(format!(
            "pack capacity must be > 0, got {pack_kwh}"
        )));
    }
    let distance_mi = meters_to_miles(cycle.distance_m());
    if !(distance_mi > 0.0) {
        return Err(Error::arg(format!(
            "cycle `{}` covers zero distance",
            cycle.name()
        )));
    }

    let times = cycle.times();
    let speeds = cycle.speeds();
    let accel = acceleration(times, speeds);
    let power: Vec<f64> = speeds
        .iter()
        .zip(&accel)
        .map(|(&v, &a)| {
            let p = if a < 0.0 {
                regen_power(v, a, params, pack_kwh)?
            } else {
                traction_power(v, a, params, road)
            };
            Ok(p * params.platoon_energy_factor)
        })
        .collect::<Result<_>>()?;

    let net_energy_kwh = joules_to_kwh(trapezoid(times, &power));
    Ok(EnergyTrace {
        power_series: times.iter().copied().zip(power).collect(),
        net_energy_kwh,
        distance_mi,
        energy_per_mile: net_energy_kwh / distance_mi,
    })
}

/// Diesel fuel energy per mile at a given fuel economy.
pub fn diesel_energy_per_mile(mpg: f64) -> Result<f64> {
    if !(mpg > 0.0) {
        return Err(Error::arg(format!("mpg must be > 0, got {mpg}")));
    }
    Ok(DIESEL_KWH_PER_GALLON / mpg)
}

/// Wh per ton-mile for a gross weight in US tons.
pub fn per_ton_mile(kwh_per_mile: f64, gross_weight_tons: f64) -> f64 {
    kwh_per_mile * 1000.0 / gross_weight_tons
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_speed_is_zero_power() {
        let p = VehicleParams::default();
        let road = RoadProfile::new(0.05, 1.0).unwrap();
        for a in [-2.0, 0.0, 1.5] {
            assert_eq!(traction_power(0.0, a, &p, &road), 0.0);
        }
        assert_eq!(regen_power(0.0, -1.0, &p, 1000.0).unwrap(), 0.0);
    }

    #[test]
    fn regen_rejects_nonnegative_dvdt() {
        let p = VehicleParams::default();
        assert!(regen_power(10.0, 0.0, &p, 1000.0).is_err());
        assert!(regen_power(10.0, 0.5, &p, 1000.0).is_err());
    }

    #[test]
    fn road_bounds() {
        assert!(RoadProfile::new(0.11, 0.5).is_err());
        assert!(RoadProfile::new(0.01, 1.5).is_err());
        assert!(RoadProfile::new(-0.10, 0.0).is_ok());
    }

    #[test]
    fn diesel_equivalents() {
        assert!((diesel_energy_per_mile(37.95).unwrap() - 1.0).abs() < 1e-15);
        assert!(diesel_energy_per_mile(0.0).is_err());
        assert!(diesel_energy_per_mile(-3.0).is_err());
    }

    #[test]
    fn ton_mile_identity() {
        assert_eq!(per_ton_mile(1.0, 1.0), 1000.0);
    }

    #[test]
    fn validate_catches_bad_efficiency() {
        let mut p = VehicleParams {
            battery_to_wheels_eff: 0.0,
            ..VehicleParams::default()
        };
        assert!(p.validate().is_err());
        p.battery_to_wheels_eff = 0.9;
        p.brake_recovery_eff = 1.2;
        assert!(p.validate().is_err());
    }
}
