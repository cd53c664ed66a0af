//! Pack sizing and capacity fade over cumulative mileage.
//!
//! Fade follows an empirical day-by-day law. Each day the truck drives its
//! daily distance and the pack sees `fec` equivalent full cycles (daily
//! energy over current capacity). Capacity lost that day is
//!
//! ```text
//! base_loss_per_fec * fec^dod_exponent
//!     * (1 + charge_rate_penalty * max(0, C - 1))
//!     * (1 + grade_penalty * grade_fraction * max(0, grade) * 100)
//!     + calendar_loss
//! ```
//!
//! With one charge per day `fec` is also the depth of discharge, so
//! `dod_exponent > 1` makes deep daily cycling wear the pack faster per
//! mile. `dod_exponent = 1` gives loss linear in throughput.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::drivecycle::{stitch_daily, synth_cycle, CycleKind};
use crate::error::{Error, Result};
use crate::powertrain::{simulate_cycle, RoadProfile, VehicleParams, PLATOON_ENERGY_FACTOR};

/// Design range of the electric truck, miles.
pub const DESIGN_RANGE_MI: f64 = 500.0;
pub const DEFAULT_EOL_FRACTION: f64 = 0.80;
pub const DEFAULT_MAX_MILES: f64 = 1_200_000.0;
/// Traces stop once capacity falls below this fraction.
pub const TRACE_FLOOR_FRACTION: f64 = 0.70;
/// Any single day losing more than this is treated as miscalibration.
pub const MAX_DAILY_LOSS: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PackSpec {
    pub capacity_kwh: f64,
    pub price_per_kwh: f64,
    pub initial_range_mi: f64,
}

impl PackSpec {
    pub fn cost(&self) -> f64 {
        self.capacity_kwh * self.price_per_kwh
    }
}

/// Pack capacity needed for `range_mi` at `kwh_per_mile`.
pub fn size_pack(range_mi: f64, kwh_per_mile: f64, price_per_kwh: f64) -> Result<PackSpec> {
    if !(range_mi > 0.0) {
        return Err(Error::arg(format!("range must be > 0, got {range_mi}")));
    }
    if !(kwh_per_mile > 0.0) {
        return Err(Error::arg(format!(
            "energy per mile must be > 0, got {kwh_per_mile}"
        )));
    }
    Ok(PackSpec {
        capacity_kwh: range_mi * kwh_per_mile,
        price_per_kwh,
        initial_range_mi: range_mi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadeParams {
    /// Fraction of capacity lost per equivalent full cycle at full depth.
    pub base_loss_per_fec: f64,
    pub charge_rate_penalty: f64,
    pub grade_penalty: f64,
    /// Fraction of capacity lost per day regardless of use.
    pub calendar_loss: f64,
    pub dod_exponent: f64,
}

impl Default for FadeParams {
    fn default() -> Self {
        Self {
            base_loss_per_fec: 2.5e-4,
            charge_rate_penalty: 0.1,
            grade_penalty: 20.0,
            calendar_loss: 5e-6,
            dod_exponent: 4.0,
        }
    }
}

impl FadeParams {
    /// No degradation at all.
    pub fn zero() -> Self {
        Self {
            base_loss_per_fec: 0.0,
            charge_rate_penalty: 0.0,
            grade_penalty: 0.0,
            calendar_loss: 0.0,
            dod_exponent: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.base_loss_per_fec,
            self.charge_rate_penalty,
            self.grade_penalty,
            self.calendar_loss,
            self.dod_exponent,
        ];
        if all.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::Config(format!(
                "fade parameters must be finite and >= 0: {self:?}"
            )));
        }
        Ok(())
    }

    /// Capacity fraction lost in one day.
    pub fn daily_loss(&self, fec: f64, charge_c_rate: f64, road: &RoadProfile) -> f64 {
        let charge = 1.0 + self.charge_rate_penalty * (charge_c_rate - 1.0).max(0.0);
        let grade = 1.0 + self.grade_penalty * road.grade_fraction * road.grade.max(0.0) * 100.0;
        self.base_loss_per_fec * fec.powf(self.dod_exponent) * charge * grade + self.calendar_loss
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub label: char,
    pub platoon: bool,
    pub cycle_kind: CycleKind,
    pub road: RoadProfile,
    pub charge_c_rate: f64,
    pub daily_distance_mi: f64,
}

impl CaseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.charge_c_rate > 0.0) {
            return Err(Error::arg(format!(
                "charge C-rate must be > 0, got {}",
                self.charge_c_rate
            )));
        }
        if !(self.daily_distance_mi > 0.0) {
            return Err(Error::arg(format!(
                "daily distance must be > 0, got {}",
                self.daily_distance_mi
            )));
        }
        self.road.validate()
    }

    /// The vehicle as driven in this case.
    pub fn vehicle(&self, base: &VehicleParams) -> VehicleParams {
        base.platooned(if self.platoon {
            PLATOON_ENERGY_FACTOR
        } else {
            1.0
        })
    }
}

/// Grade applied on the pessimistic cases and the share of the trip it weights.
pub const HILLY_GRADE: f64 = 0.01;
pub const HILLY_GRADE_FRACTION: f64 = 0.1;

/// The six reference cases. A/D: platooned composite on flat road with
/// 1C charging. B/E: single-truck cruise, flat, 2C. C/F: single-truck
/// custom cycle with a 1% grade over a small share of the trip, 3C.
/// A-C drive 270 mi/day and D-F 400 mi/day.
pub fn reference_cases() -> [CaseSpec; 6] {
    let hilly = RoadProfile {
        grade: HILLY_GRADE,
        grade_fraction: HILLY_GRADE_FRACTION,
    };
    let make = |label, daily, platoon, kind, road, c| CaseSpec {
        label,
        platoon,
        cycle_kind: kind,
        road,
        charge_c_rate: c,
        daily_distance_mi: daily,
    };
    [
        make(
            'A',
            270.0,
            true,
            CycleKind::Composite,
            RoadProfile::FLAT,
            1.0,
        ),
        make('B', 270.0, false, CycleKind::Cruise, RoadProfile::FLAT, 2.0),
        make('C', 270.0, false, CycleKind::Custom, hilly, 3.0),
        make(
            'D',
            400.0,
            true,
            CycleKind::Composite,
            RoadProfile::FLAT,
            1.0,
        ),
        make('E', 400.0, false, CycleKind::Cruise, RoadProfile::FLAT, 2.0),
        make('F', 400.0, false, CycleKind::Custom, hilly, 3.0),
    ]
}

/// Energy for one day of driving under `case`, in kWh, and the per-mile figure.
pub fn daily_energy(case: &CaseSpec, vehicle: &VehicleParams, pack_kwh: f64) -> Result<(f64, f64)> {
    let cycle = synth_cycle(case.cycle_kind, case.cycle_kind.default_params())?;
    let day = stitch_daily(&cycle, case.daily_distance_mi)?;
    let trace = simulate_cycle(&day, &case.vehicle(vehicle), &case.road, pack_kwh)?;
    Ok((trace.net_energy_kwh, trace.energy_per_mile))
}

/// Energy per mile of each reference case on a nominal 1,000 kWh pack.
pub fn reference_case_energies(vehicle: &VehicleParams) -> Result<Vec<(char, f64)>> {
    reference_cases()
        .par_iter()
        .map(|case| Ok((case.label, daily_energy(case, vehicle, 1000.0)?.1)))
        .collect()
}

/// Mean energy per mile over the six reference cases.
pub fn baseline_energy_per_mile(vehicle: &VehicleParams) -> Result<f64> {
    let e = reference_case_energies(vehicle)?;
    Ok(e.iter().map(|(_, x)| x).sum::<f64>() / e.len() as f64)
}

/// Pack shared by all reference cases: sized for the design range at the
/// mean reference-case consumption.
pub fn reference_pack(vehicle: &VehicleParams, price_per_kwh: f64) -> Result<PackSpec> {
    size_pack(
        DESIGN_RANGE_MI,
        baseline_energy_per_mile(vehicle)?,
        price_per_kwh,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifePoint {
    pub miles: f64,
    pub capacity_fraction: f64,
    pub available_range_mi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifeTrace {
    pub case_label: char,
    pub energy_per_mile: f64,
    pub points: Vec<LifePoint>,
}

impl LifeTrace {
    /// Capacity fraction at `miles`, interpolated between days. `None`
    /// beyond the end of the trace.
    pub fn capacity_at(&self, miles: f64) -> Option<f64> {
        let pts = &self.points;
        if miles > pts.last()?.miles {
            return None;
        }
        let i = pts.partition_point(|p| p.miles < miles);
        if i == 0 {
            return Some(pts[0].capacity_fraction);
        }
        let (a, b) = (&pts[i - 1], &pts[i]);
        let w = (miles - a.miles) / (b.miles - a.miles);
        Some(a.capacity_fraction + w * (b.capacity_fraction - a.capacity_fraction))
    }

    /// Writes `miles,capacity_fraction,available_range_mi`, keeping at most
    /// `max_rows` evenly spaced rows (the last point is always kept).
    pub fn write_csv<W: std::io::Write>(&self, writer: W, max_rows: usize) -> Result<()> {
        let n = self.points.len();
        let step = n.div_ceil(max_rows.max(2) - 1).max(1);
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["miles", "capacity_fraction", "available_range_mi"])?;
        for (i, p) in self.points.iter().enumerate() {
            if i % step == 0 || i == n - 1 {
                w.write_record([
                    p.miles.to_string(),
                    p.capacity_fraction.to_string(),
                    p.available_range_mi.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Day-by-day capacity fade until `max_miles` or capacity drops below
/// [`TRACE_FLOOR_FRACTION`].
pub fn simulate_life(
    case: &CaseSpec,
    vehicle: &VehicleParams,
    pack: &PackSpec,
    fade: &FadeParams,
    max_miles: f64,
) -> Result<LifeTrace> {
    case.validate()?;
    fade.validate()?;
    if !(max_miles > 0.0) {
        return Err(Error::arg(format!(
            "max miles must be > 0, got {max_miles}"
        )));
    }
    if !(pack.capacity_kwh > 0.0 && pack.initial_range_mi > 0.0) {
        return Err(Error::arg("pack capacity and initial range must be > 0"));
    }
    let (day_kwh, kwh_per_mile) = daily_energy(case, vehicle, pack.capacity_kwh)?;

    let mut fraction = 1.0;
    let mut miles = 0.0;
    let mut points = vec![LifePoint {
        miles,
        capacity_fraction: fraction,
        available_range_mi: pack.initial_range_mi,
    }];
    while miles < max_miles && fraction >= TRACE_FLOOR_FRACTION {
        let fec = day_kwh / (pack.capacity_kwh * fraction);
        let loss = fade.daily_loss(fec, case.charge_c_rate, &case.road);
        if loss > MAX_DAILY_LOSS {
            return Err(Error::Config(format!(
                "case {}: fade parameters give {:.2}% capacity loss in one day (limit {}%)",
                case.label,
                loss * 100.0,
                MAX_DAILY_LOSS * 100.0
            )));
        }
        fraction = (fraction - loss).max(0.0);
        miles += case.daily_distance_mi;
        points.push(LifePoint {
            miles,
            capacity_fraction: fraction,
            available_range_mi: pack.initial_range_mi * fraction,
        });
    }
    Ok(LifeTrace {
        case_label: case.label,
        energy_per_mile: kwh_per_mile,
        points,
    })
}

/// Mileage at which capacity first reaches `threshold` (interpolated within
/// the crossing day). `None` when the trace never gets there.
pub fn miles_to_eol(trace: &LifeTrace, threshold: f64) -> Option<f64> {
    let pts = &trace.points;
    let i = pts.iter().position(|p| p.capacity_fraction <= threshold)?;
    if i == 0 {
        return Some(pts[0].miles);
    }
    let (a, b) = (&pts[i - 1], &pts[i]);
    let w = (a.capacity_fraction - threshold) / (a.capacity_fraction - b.capacity_fraction);
    Some(a.miles + w * (b.miles - a.miles))
}

/// Simulates all six reference cases on the shared reference pack.
pub fn run_reference_cases(vehicle: &VehicleParams, fade: &FadeParams) -> Result<Vec<LifeTrace>> {
    vehicle.validate()?;
    let pack = reference_pack(vehicle, 0.0)?;
    reference_cases()
        .par_iter()
        .map(|case| simulate_life(case, vehicle, &pack, fade, DEFAULT_MAX_MILES))
        .collect()
}

/// Case C end-of-life mileage under default vehicle and fade settings; the
/// default timing of a pack replacement in the cost model.
pub fn default_replacement_miles() -> f64 {
    static MILES: OnceLock<f64> = OnceLock::new();
    *MILES.get_or_init(|| {
        replacement_miles(&VehicleParams::default(), &FadeParams::default())
            .expect("default calibration simulates")
            .expect("default case C reaches end of life")
    })
}

/// Case C end-of-life mileage for the given vehicle and fade settings.
pub fn replacement_miles(vehicle: &VehicleParams, fade: &FadeParams) -> Result<Option<f64>> {
    let pack = reference_pack(vehicle, 0.0)?;
    let case_c = reference_cases()[2];
    let trace = simulate_life(&case_c, vehicle, &pack, fade, DEFAULT_MAX_MILES)?;
    Ok(miles_to_eol(&trace, DEFAULT_EOL_FRACTION))
}
