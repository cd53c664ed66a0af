//! Payback periods, one-at-a-time sensitivity sweeps and the drag
//! coefficient vignette.
//!
//! Payback is the first time at which cumulative discounted operating
//! savings of the electric truck cover the price differential plus, when
//! the pack will be replaced, the present value of that replacement. The
//! replacement is committed from day zero because the truck cannot reach
//! its lifetime mileage without it.

use rayon::prelude::*;
use serde::Serialize;

use crate::battery::PackSpec;
use crate::drivecycle::{synth_cycle, CycleKind};
use crate::economics::{sample_scenarios, ParameterRanges, Sampling, Scenario, Variable};
use crate::error::{Error, Result};
use crate::powertrain::{simulate_cycle, RoadProfile, VehicleParams};
use crate::stats::Distribution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PaybackResult {
    /// Infinite when the truck never breaks even within its lifetime.
    pub years: f64,
    pub odometer_mi: f64,
    pub broke_even: bool,
}

impl PaybackResult {
    const NEVER: PaybackResult = PaybackResult {
        years: f64::INFINITY,
        odometer_mi: f64::INFINITY,
        broke_even: false,
    };
}

/// Electric-over-diesel operating savings per year, USD.
pub fn annual_savings(s: &Scenario) -> f64 {
    (s.diesel_fuel_per_mile() + s.d_additional_repairs - s.electricity_per_mile())
        * s.annual_mileage
}

/// Up-front obligation the savings must recover, USD (present value).
pub fn obligation(s: &Scenario) -> f64 {
    s.e_initial_price - s.d_initial_price + s.replacement_pv()
}

pub fn payback_period(s: &Scenario) -> PaybackResult {
    let savings = annual_savings(s);
    let owed = obligation(s);
    let lifetime = s.lifetime_years();
    if owed <= 0.0 {
        return PaybackResult {
            years: 0.0,
            odometer_mi: 0.0,
            broke_even: true,
        };
    }
    if !(savings > 0.0) {
        return PaybackResult::NEVER;
    }

    let growth = 1.0 + s.discount_rate;
    let mut cumulative = 0.0;
    let mut year = 0u32;
    while f64::from(year) < lifetime {
        year += 1;
        let flow = savings / growth.powi(year as i32);
        if cumulative + flow >= owed {
            let years = f64::from(year - 1) + (owed - cumulative) / flow;
            if years > lifetime {
                break;
            }
            return PaybackResult {
                years,
                odometer_mi: years * s.annual_mileage,
                broke_even: true,
            };
        }
        cumulative += flow;
    }
    PaybackResult::NEVER
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaybackSummary {
    #[serde(skip)]
    pub results: Vec<PaybackResult>,
    /// Over scenarios that broke even; `None` if none did.
    pub years: Option<Distribution>,
    pub odometer_mi: Option<Distribution>,
    pub no_breakeven: usize,
    pub total: usize,
}

impl PaybackSummary {
    pub fn mean_years(&self) -> f64 {
        self.years.as_ref().map_or(f64::INFINITY, |d| d.mean)
    }

    pub fn frac_no_breakeven(&self) -> f64 {
        self.no_breakeven as f64 / self.total as f64
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["scenario", "payback_yr", "odometer_mi", "broke_even"])?;
        for (i, r) in self.results.iter().enumerate() {
            w.write_record([
                i.to_string(),
                r.years.to_string(),
                r.odometer_mi.to_string(),
                u8::from(r.broke_even).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Payback over every scenario. Scenarios that never break even are
/// counted but left out of the statistics.
pub fn payback_distribution(scenarios: &[Scenario]) -> Result<PaybackSummary> {
    if scenarios.is_empty() {
        return Err(Error::arg("no scenarios"));
    }
    let results: Vec<PaybackResult> = scenarios.par_iter().map(payback_period).collect();
    let (years, odometer): (Vec<f64>, Vec<f64>) = results
        .iter()
        .filter(|r| r.broke_even)
        .map(|r| (r.years, r.odometer_mi))
        .unzip();
    let no_breakeven = results.len() - years.len();
    Ok(PaybackSummary {
        total: results.len(),
        years: Distribution::from_samples(years).ok(),
        odometer_mi: Distribution::from_samples(odometer).ok(),
        no_breakeven,
        results,
    })
}

/// Samples `ranges` and summarizes payback.
pub fn run_payback(ranges: &ParameterRanges, sampling: &Sampling) -> Result<PaybackSummary> {
    let scenarios = sample_scenarios(
        ranges,
        sampling.samples,
        sampling.grid_points,
        sampling.seed,
    )?;
    payback_distribution(&scenarios)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityPoint {
    pub variable: Variable,
    pub pinned_value: f64,
    pub mean_payback: f64,
    pub std_payback: f64,
    pub median_payback: f64,
    pub frac_no_breakeven: f64,
}

/// Seed for the `index`-th pinned value of a sweep (splitmix64 of the run
/// seed offset by the index).
pub fn sweep_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn point(variable: Variable, value: f64, summary: &PaybackSummary) -> SensitivityPoint {
    let (mean, std, median) = summary
        .years
        .as_ref()
        .map_or((f64::INFINITY, f64::NAN, f64::INFINITY), |d| {
            (d.mean, d.std, d.median)
        });
    SensitivityPoint {
        variable,
        pinned_value: value,
        mean_payback: mean,
        std_payback: std,
        median_payback: median,
        frac_no_breakeven: summary.frac_no_breakeven(),
    }
}

/// Pins `variable` to each of `values` in turn (everything else at
/// `ranges`) and reports the payback distribution for each.
pub fn sensitivity_sweep(
    ranges: &ParameterRanges,
    variable: Variable,
    values: &[f64],
    sampling: &Sampling,
) -> Result<Vec<SensitivityPoint>> {
    if values.is_empty() {
        return Err(Error::arg("sensitivity sweep needs at least one value"));
    }
    values
        .par_iter()
        .enumerate()
        .map(|(i, &value)| {
            let pinned = ranges.pinned(variable, value);
            let sampling = Sampling {
                seed: sweep_seed(sampling.seed, i),
                ..*sampling
            };
            let summary = run_payback(&pinned, &sampling)?;
            Ok(point(variable, value, &summary))
        })
        .collect()
}

/// Mean payback with the diesel repairs differential pinned.
pub fn repairs_sensitivity(
    ranges: &ParameterRanges,
    pinned_repairs: f64,
    sampling: &Sampling,
) -> Result<f64> {
    if !(pinned_repairs >= 0.0) {
        return Err(Error::arg(format!(
            "repairs differential must be >= 0, got {pinned_repairs}"
        )));
    }
    let pinned = ranges.pinned(Variable::DAdditionalRepairs, pinned_repairs);
    Ok(run_payback(&pinned, sampling)?.mean_years())
}

pub fn write_sensitivity_csv<W: std::io::Write>(
    writer: W,
    points: &[SensitivityPoint],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "variable",
        "pinned_value",
        "mean_payback_yr",
        "std_payback_yr",
        "frac_no_breakeven",
    ])?;
    for p in points {
        w.write_record([
            p.variable.name().to_string(),
            p.pinned_value.to_string(),
            p.mean_payback.to_string(),
            p.std_payback.to_string(),
            p.frac_no_breakeven.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Cruise-cycle energy per mile on flat road for `vehicle`.
pub fn cruise_energy_per_mile(vehicle: &VehicleParams) -> Result<f64> {
    let cycle = synth_cycle(CycleKind::Cruise, CycleKind::Cruise.default_params())?;
    Ok(simulate_cycle(&cycle, vehicle, &RoadProfile::FLAT, 1000.0)?.energy_per_mile)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DragVignette {
    pub drag_coefficient: f64,
    /// Cruise energy per mile relative to the reference vehicle.
    pub efficiency_ratio: f64,
    pub summary: PaybackSummary,
}

/// Payback for a truck with drag coefficient `cd` instead of the reference
/// vehicle's.
///
/// Consumption scales every sampled e-efficiency by the ratio of cruise
/// energy per mile at `cd` to the reference. The pack is resized for the
/// design range and the electric purchase price moves by the change in pack
/// cost at the sampled battery price, keeping the non-battery premium
/// fixed. Replacement packs follow the resized pack.
pub fn drag_vignette(
    cd: f64,
    ranges: &ParameterRanges,
    reference: &VehicleParams,
    sampling: &Sampling,
) -> Result<DragVignette> {
    if !(0.2..=0.8).contains(&cd) {
        return Err(Error::arg(format!(
            "drag coefficient must be in [0.2, 0.8], got {cd}"
        )));
    }
    let base = cruise_energy_per_mile(reference)?;
    let at_cd = cruise_energy_per_mile(&reference.with_drag(cd))?;
    let ratio = at_cd / base;

    let mut scenarios = sample_scenarios(
        ranges,
        sampling.samples,
        sampling.grid_points,
        sampling.seed,
    )?;
    if ratio != 1.0 {
        for s in &mut scenarios {
            let old_pack = PackSpec {
                capacity_kwh: s.pack_kwh(),
                price_per_kwh: s.battery_price,
                initial_range_mi: crate::battery::DESIGN_RANGE_MI,
            };
            s.e_efficiency *= ratio;
            let new_pack = PackSpec {
                capacity_kwh: s.pack_kwh(),
                ..old_pack
            };
            s.e_initial_price += new_pack.cost() - old_pack.cost();
        }
    }
    Ok(DragVignette {
        drag_coefficient: cd,
        efficiency_ratio: ratio,
        summary: payback_distribution(&scenarios)?,
    })
}
