//! Cost scenarios, discounting and levelized cost per mile.
//!
//! Every uncertain input is an [`Interval`] that gets discretized into
//! `grid_points` equally spaced values. A [`Scenario`] picks one grid value
//! per input with equal probability, plus whether the pack is replaced once
//! during the truck's life.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::battery::{default_replacement_miles, size_pack, DESIGN_RANGE_MI};
use crate::error::{Error, Result};
use crate::stats::Distribution;

pub const DEFAULT_GRID_POINTS: usize = 11;
pub const DEFAULT_SAMPLES: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub const fn new(low: f64, high: f64) -> Self {
        Self { low, high }
    }

    pub const fn point(x: f64) -> Self {
        Self { low: x, high: x }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.low + self.high)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }

    /// The `i`-th of `n` equally spaced values from `low` to `high`.
    pub fn grid_value(&self, i: usize, n: usize) -> f64 {
        if self.low == self.high || i == 0 {
            self.low
        } else if i == n - 1 {
            self.high
        } else {
            self.low + (self.high - self.low) * i as f64 / (n - 1) as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterRanges {
    /// USD/gallon
    pub diesel_price: Interval,
    /// USD/kWh
    pub electricity_price: Interval,
    /// kWh/mi
    pub e_efficiency: Interval,
    /// mpg
    pub d_efficiency: Interval,
    /// USD/mi
    pub d_additional_repairs: Interval,
    /// mi/yr
    pub annual_mileage: Interval,
    /// USD/mi
    pub general_op_costs: Interval,
    /// USD/kWh
    pub battery_price: Interval,
    pub d_initial_price: f64,
    pub e_initial_price: f64,
    pub replacement_fraction: f64,
    pub discount_rate: f64,
    pub lifetime_miles: f64,
    pub driving_days: f64,
    /// Odometer reading at which a replaced pack is swapped.
    pub replacement_miles: f64,
}

/// The baseline scenario bounds.
pub fn baseline_ranges() -> ParameterRanges {
    ParameterRanges {
        diesel_price: Interval::new(2.21, 4.19),
        electricity_price: Interval::new(0.07, 0.12),
        e_efficiency: Interval::new(1.7, 2.3),
        d_efficiency: Interval::new(6.0, 8.5),
        d_additional_repairs: Interval::new(0.15, 0.16),
        annual_mileage: Interval::new(80_000.0, 100_000.0),
        general_op_costs: Interval::new(0.76, 0.81),
        battery_price: Interval::new(90.0, 120.0),
        d_initial_price: 150_000.0,
        e_initial_price: 200_000.0,
        replacement_fraction: 0.30,
        discount_rate: 0.03,
        lifetime_miles: 1_000_000.0,
        driving_days: 260.0,
        replacement_miles: default_replacement_miles(),
    }
}

impl ParameterRanges {
    fn intervals(&self) -> [(&'static str, &Interval); 8] {
        [
            ("diesel_price", &self.diesel_price),
            ("electricity_price", &self.electricity_price),
            ("e_efficiency", &self.e_efficiency),
            ("d_efficiency", &self.d_efficiency),
            ("d_additional_repairs", &self.d_additional_repairs),
            ("annual_mileage", &self.annual_mileage),
            ("general_op_costs", &self.general_op_costs),
            ("battery_price", &self.battery_price),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, iv) in self.intervals() {
            if !(iv.low.is_finite() && iv.high.is_finite() && iv.low <= iv.high) {
                return Err(Error::Config(format!(
                    "{name}: need low <= high, got [{}, {}]",
                    iv.low, iv.high
                )));
            }
        }
        if !(self.annual_mileage.low > 0.0) {
            return Err(Error::Config("annual_mileage must be > 0".into()));
        }
        if !(self.d_efficiency.low > 0.0) {
            return Err(Error::Config("d_efficiency must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.replacement_fraction) {
            return Err(Error::Config(format!(
                "replacement_fraction must be in [0, 1], got {}",
                self.replacement_fraction
            )));
        }
        if !(self.discount_rate >= 0.0) {
            return Err(Error::Config(format!(
                "discount_rate must be >= 0, got {}",
                self.discount_rate
            )));
        }
        if !(self.lifetime_miles > 0.0 && self.replacement_miles > 0.0 && self.driving_days > 0.0) {
            return Err(Error::Config(
                "lifetime_miles, replacement_miles and driving_days must be > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn with_replacement_fraction(mut self, rf: f64) -> Self {
        self.replacement_fraction = rf;
        self
    }

    /// Collapses `variable` to `value`, leaving everything else untouched.
    pub fn pinned(mut self, variable: Variable, value: f64) -> Self {
        use Variable::*;
        let p = Interval::point(value);
        match variable {
            DieselPrice => self.diesel_price = p,
            ElectricityPrice => self.electricity_price = p,
            EEfficiency => self.e_efficiency = p,
            DEfficiency => self.d_efficiency = p,
            DAdditionalRepairs => self.d_additional_repairs = p,
            AnnualMileage => self.annual_mileage = p,
            GeneralOpCosts => self.general_op_costs = p,
            BatteryPrice => self.battery_price = p,
            ReplacementFraction => self.replacement_fraction = value,
            PriceDifferential => self.e_initial_price = self.d_initial_price + value,
            DiscountRate => self.discount_rate = value,
        }
        self
    }
}

/// Inputs that a sensitivity sweep can pin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    DieselPrice,
    ElectricityPrice,
    EEfficiency,
    DEfficiency,
    DAdditionalRepairs,
    AnnualMileage,
    GeneralOpCosts,
    BatteryPrice,
    ReplacementFraction,
    PriceDifferential,
    DiscountRate,
}

impl Variable {
    pub const ALL: [Variable; 11] = [
        Variable::DieselPrice,
        Variable::ElectricityPrice,
        Variable::EEfficiency,
        Variable::DEfficiency,
        Variable::DAdditionalRepairs,
        Variable::AnnualMileage,
        Variable::GeneralOpCosts,
        Variable::BatteryPrice,
        Variable::ReplacementFraction,
        Variable::PriceDifferential,
        Variable::DiscountRate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variable::DieselPrice => "diesel_price",
            Variable::ElectricityPrice => "electricity_price",
            Variable::EEfficiency => "e_efficiency",
            Variable::DEfficiency => "d_efficiency",
            Variable::DAdditionalRepairs => "d_additional_repairs",
            Variable::AnnualMileage => "annual_mileage",
            Variable::GeneralOpCosts => "general_op_costs",
            Variable::BatteryPrice => "battery_price",
            Variable::ReplacementFraction => "replacement_fraction",
            Variable::PriceDifferential => "price_differential",
            Variable::DiscountRate => "discount_rate",
        }
    }

    pub fn valid_names() -> String {
        Self::ALL.map(Self::name).join(", ")
    }
}

impl std::str::FromStr for Variable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                Error::arg(format!(
                    "unknown variable `{s}`; valid names: {}",
                    Self::valid_names()
                ))
            })
    }
}

impl std::fmt::Display for Variable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One concrete draw from [`ParameterRanges`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub diesel_price: f64,
    pub electricity_price: f64,
    pub e_efficiency: f64,
    pub d_efficiency: f64,
    pub d_additional_repairs: f64,
    pub annual_mileage: f64,
    pub general_op_costs: f64,
    pub battery_price: f64,
    pub d_initial_price: f64,
    pub e_initial_price: f64,
    pub discount_rate: f64,
    pub lifetime_miles: f64,
    pub needs_replacement: bool,
    /// Years after purchase at which the pack is replaced.
    pub replacement_year: f64,
}

impl Scenario {
    /// Every interval at its midpoint.
    pub fn midpoint(ranges: &ParameterRanges, needs_replacement: bool) -> Self {
        let annual_mileage = ranges.annual_mileage.midpoint();
        Self {
            diesel_price: ranges.diesel_price.midpoint(),
            electricity_price: ranges.electricity_price.midpoint(),
            e_efficiency: ranges.e_efficiency.midpoint(),
            d_efficiency: ranges.d_efficiency.midpoint(),
            d_additional_repairs: ranges.d_additional_repairs.midpoint(),
            annual_mileage,
            general_op_costs: ranges.general_op_costs.midpoint(),
            battery_price: ranges.battery_price.midpoint(),
            d_initial_price: ranges.d_initial_price,
            e_initial_price: ranges.e_initial_price,
            discount_rate: ranges.discount_rate,
            lifetime_miles: ranges.lifetime_miles,
            needs_replacement,
            replacement_year: ranges.replacement_miles / annual_mileage,
        }
    }

    pub fn lifetime_years(&self) -> f64 {
        self.lifetime_miles / self.annual_mileage
    }

    pub fn diesel_fuel_per_mile(&self) -> f64 {
        self.diesel_price / self.d_efficiency
    }

    pub fn electricity_per_mile(&self) -> f64 {
        self.electricity_price * self.e_efficiency
    }

    /// Pack for the design range at this scenario's consumption, kWh.
    pub fn pack_kwh(&self) -> f64 {
        size_pack(DESIGN_RANGE_MI, self.e_efficiency, self.battery_price)
            .map(|p| p.capacity_kwh)
            .unwrap_or(0.0)
    }

    /// Present value of the replacement pack, or 0 when none is needed.
    pub fn replacement_pv(&self) -> f64 {
        if self.needs_replacement {
            present_value(
                self.pack_kwh() * self.battery_price,
                self.replacement_year,
                self.discount_rate,
            )
        } else {
            0.0
        }
    }
}

/// Sampler settings shared by every Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampling {
    pub samples: usize,
    pub grid_points: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            grid_points: DEFAULT_GRID_POINTS,
            seed: 42,
        }
    }
}

/// Draws `n` scenarios; deterministic in `seed`.
///
/// Each scenario consumes the same number of random draws whatever the
/// ranges are, so two runs with the same seed stay paired draw-for-draw
/// even when one of them has a collapsed interval.
pub fn sample_scenarios(
    ranges: &ParameterRanges,
    n: usize,
    grid_points: usize,
    seed: u64,
) -> Result<Vec<Scenario>> {
    if n == 0 {
        return Err(Error::arg("sample count must be > 0"));
    }
    if grid_points < 2 {
        return Err(Error::arg(format!(
            "grid points must be >= 2, got {grid_points}"
        )));
    }
    ranges.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |iv: &Interval| iv.grid_value(rng.gen_range(0..grid_points), grid_points);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let diesel_price = draw(&ranges.diesel_price);
        let electricity_price = draw(&ranges.electricity_price);
        let e_efficiency = draw(&ranges.e_efficiency);
        let d_efficiency = draw(&ranges.d_efficiency);
        let d_additional_repairs = draw(&ranges.d_additional_repairs);
        let annual_mileage = draw(&ranges.annual_mileage);
        let general_op_costs = draw(&ranges.general_op_costs);
        let battery_price = draw(&ranges.battery_price);
        out.push(Scenario {
            diesel_price,
            electricity_price,
            e_efficiency,
            d_efficiency,
            d_additional_repairs,
            annual_mileage,
            general_op_costs,
            battery_price,
            d_initial_price: ranges.d_initial_price,
            e_initial_price: ranges.e_initial_price,
            discount_rate: ranges.discount_rate,
            lifetime_miles: ranges.lifetime_miles,
            needs_replacement: false,
            replacement_year: ranges.replacement_miles / annual_mileage,
        });
    }
    // Replacement flags come from a second pass so the flag draws do not
    // interleave with the value draws.
    for s in &mut out {
        s.needs_replacement = rng.gen::<f64>() < ranges.replacement_fraction;
    }
    Ok(out)
}

pub fn present_value(amount: f64, year: f64, rate: f64) -> f64 {
    amount / (1.0 + rate).powf(year)
}

/// Annuity factor turning a present value into equal annual payments.
pub fn capital_recovery_factor(rate: f64, years: f64) -> f64 {
    if rate == 0.0 {
        1.0 / years
    } else {
        rate / (1.0 - (1.0 + rate).powf(-years))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truck {
    Diesel,
    Electric,
}

/// Levelized capital plus per-mile operating costs, USD/mi.
pub fn cost_per_mile(s: &Scenario, truck: Truck) -> Result<f64> {
    if !(s.annual_mileage > 0.0) {
        return Err(Error::arg(format!(
            "annual mileage must be > 0, got {}",
            s.annual_mileage
        )));
    }
    let crf = capital_recovery_factor(s.discount_rate, s.lifetime_years());
    let (capital, per_mile) = match truck {
        Truck::Diesel => (
            s.d_initial_price,
            s.diesel_fuel_per_mile() + s.d_additional_repairs,
        ),
        Truck::Electric => (
            s.e_initial_price + s.replacement_pv(),
            s.electricity_per_mile(),
        ),
    };
    Ok(capital * crf / s.annual_mileage + per_mile + s.general_op_costs)
}

pub fn cpm_distribution(scenarios: &[Scenario], truck: Truck) -> Result<Distribution> {
    if scenarios.is_empty() {
        return Err(Error::arg("no scenarios"));
    }
    let cpm = scenarios
        .par_iter()
        .map(|s| cost_per_mile(s, truck))
        .collect::<Result<Vec<_>>>()?;
    Distribution::from_samples(cpm)
}

/// Header of the per-scenario export.
pub const SCENARIO_CSV_HEADER: [&str; 12] = [
    "diesel_price_usd_per_gal",
    "electricity_price_usd_per_kwh",
    "e_efficiency_kwh_per_mi",
    "d_efficiency_mpg",
    "d_additional_repairs_usd_per_mi",
    "annual_mileage_mi",
    "general_op_costs_usd_per_mi",
    "battery_price_usd_per_kwh",
    "needs_replacement",
    "replacement_year",
    "cpm_diesel",
    "cpm_electric",
];

pub fn write_scenarios_csv<W: std::io::Write>(
    writer: W,
    scenarios: &[Scenario],
    diesel: &Distribution,
    electric: &Distribution,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SCENARIO_CSV_HEADER)?;
    for ((s, d), e) in scenarios.iter().zip(&diesel.samples).zip(&electric.samples) {
        w.write_record([
            s.diesel_price.to_string(),
            s.electricity_price.to_string(),
            s.e_efficiency.to_string(),
            s.d_efficiency.to_string(),
            s.d_additional_repairs.to_string(),
            s.annual_mileage.to_string(),
            s.general_op_costs.to_string(),
            s.battery_price.to_string(),
            u8::from(s.needs_replacement).to_string(),
            s.replacement_year.to_string(),
            d.to_string(),
            e.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
