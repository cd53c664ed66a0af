//! Command-line front end: config loading, subcommands and report output.
//!
//! Config files are TOML with dotted section keys, e.g.
//!
//! ```toml
//! run.seed = 7
//! vehicle.cd = 0.40
//! ranges.electricity_price = [0.07, 0.12]
//! fade.base_loss_per_fec = 2.5e-4
//! ```
//!
//! Unknown keys are rejected. Economic inputs use customary units (USD,
//! gallons, miles, mpg); physics inputs are SI.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::battery::{
    self, miles_to_eol, run_reference_cases, FadeParams, DEFAULT_EOL_FRACTION, DESIGN_RANGE_MI,
};
use crate::drivecycle::{
    load_cycle, stitch_daily, synth_cycle, CycleKind, DriveCycle, SynthParams,
};
use crate::economics::{
    baseline_ranges, cpm_distribution, sample_scenarios, write_scenarios_csv, Interval,
    ParameterRanges, Sampling, Truck, Variable,
};
use crate::error::{Error, Result};
use crate::payback::{
    drag_vignette, payback_distribution, sensitivity_sweep, write_sensitivity_csv, PaybackSummary,
};
use crate::powertrain::{
    per_ton_mile, simulate_cycle, RoadProfile, VehicleParams, PLATOON_ENERGY_FACTOR,
};
use crate::stats::Distribution;
use crate::units::{kg_to_us_tons, mph_to_mps};

/// Maximum rows per life-trace CSV.
pub const LIFE_TRACE_MAX_ROWS: usize = 2000;
const HISTOGRAM_BINS: usize = 40;

#[derive(Debug, Parser)]
#[command(
    name = "etruck",
    version,
    about = "Electric vs diesel semi-truck energy, battery life, TCO and payback"
)]
pub struct Cli {
    /// TOML config file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// RNG seed (overrides config)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo sample count (overrides config)
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Output directory (overrides config)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy consumption over a drive cycle
    Energy(EnergyArgs),
    /// Battery capacity fade for reference cases A-F
    Cyclelife(CyclelifeArgs),
    /// Cost-per-mile distributions for diesel and electric fleets
    Tco(TcoArgs),
    /// Payback period distribution
    Payback(PaybackArgs),
    /// One-at-a-time payback sensitivity sweep
    Sensitivity(SensitivityArgs),
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    /// Cycle CSV (`t_s,v_mps`); overrides --kind
    #[arg(long)]
    pub cycle: Option<PathBuf>,
    /// Synthetic cycle kind
    #[arg(long, default_value = "cruise")]
    pub kind: CycleKind,
    #[arg(long)]
    pub speed_mph: Option<f64>,
    #[arg(long)]
    pub duration_s: Option<f64>,
    #[arg(long)]
    pub stop_fraction: Option<f64>,
    /// Repeat the cycle to cover this many miles
    #[arg(long)]
    pub daily_miles: Option<f64>,
    /// Road grade (rise/run)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub grade: f64,
    /// Fraction of the trip the grade applies to
    #[arg(long, default_value_t = 0.0)]
    pub grade_fraction: f64,
    /// Drive as part of a platoon
    #[arg(long)]
    pub platoon: bool,
    #[arg(long, default_value_t = PLATOON_ENERGY_FACTOR)]
    pub platoon_factor: f64,
    /// Pack capacity used for the regen cap, kWh
    #[arg(long, default_value_t = 1000.0)]
    pub pack_kwh: f64,
}

#[derive(Debug, Args)]
pub struct CyclelifeArgs {
    /// Disable all degradation
    #[arg(long)]
    pub fade_zero: bool,
    #[arg(long, default_value_t = DEFAULT_EOL_FRACTION)]
    pub eol_threshold: f64,
}

#[derive(Debug, Args)]
pub struct TcoArgs {
    /// Replacement fraction override
    #[arg(long)]
    pub rf: Option<f64>,
    /// Also write pre-binned histogram CSVs
    #[arg(long)]
    pub emit_plotdata: bool,
}

#[derive(Debug, Args)]
pub struct PaybackArgs {
    #[arg(long)]
    pub rf: Option<f64>,
    /// Run the drag-coefficient variant at this Cd
    #[arg(long)]
    pub drag_coefficient: Option<f64>,
    #[arg(long)]
    pub emit_plotdata: bool,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    /// Variable to pin
    #[arg(long)]
    pub variable: String,
    /// Comma-separated pinned values
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_negative_numbers = true
    )]
    pub values: Vec<f64>,
    #[arg(long)]
    pub rf: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    seed: Option<u64>,
    samples: Option<usize>,
    grid_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VehicleSection {
    cd: Option<f64>,
    frontal_area_m2: Option<f64>,
    crr: Option<f64>,
    total_weight_kg: Option<f64>,
    battery_to_wheels_eff: Option<f64>,
    brake_recovery_eff: Option<f64>,
    air_density: Option<f64>,
    gravity: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FadeSection {
    base_loss_per_fec: Option<f64>,
    charge_rate_penalty: Option<f64>,
    grade_penalty: Option<f64>,
    calendar_loss: Option<f64>,
    dod_exponent: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RangesSection {
    diesel_price: Option<[f64; 2]>,
    electricity_price: Option<[f64; 2]>,
    e_efficiency: Option<[f64; 2]>,
    d_efficiency: Option<[f64; 2]>,
    d_additional_repairs: Option<[f64; 2]>,
    annual_mileage: Option<[f64; 2]>,
    general_op_costs: Option<[f64; 2]>,
    battery_price: Option<[f64; 2]>,
    d_initial_price: Option<f64>,
    e_initial_price: Option<f64>,
    replacement_fraction: Option<f64>,
    discount_rate: Option<f64>,
    lifetime_miles: Option<f64>,
    driving_days: Option<f64>,
    replacement_miles: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    run: RunSection,
    #[serde(default)]
    vehicle: VehicleSection,
    #[serde(default)]
    fade: FadeSection,
    #[serde(default)]
    ranges: RangesSection,
    output_dir: Option<PathBuf>,
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub ranges: ParameterRanges,
    pub vehicle: VehicleParams,
    pub fade: FadeParams,
    pub sampling: Sampling,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            ranges: baseline_ranges(),
            vehicle: VehicleParams::default(),
            fade: FadeParams::default(),
            sampling: Sampling::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Parses a TOML config document; missing keys keep their defaults.
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = RunConfig::default();

        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        let v = file.vehicle;
        let veh = &mut cfg.vehicle;
        set(&mut veh.drag_coefficient, v.cd);
        set(&mut veh.frontal_area, v.frontal_area_m2);
        set(&mut veh.rolling_resistance, v.crr);
        set(&mut veh.total_weight, v.total_weight_kg);
        set(&mut veh.battery_to_wheels_eff, v.battery_to_wheels_eff);
        set(&mut veh.brake_recovery_eff, v.brake_recovery_eff);
        set(&mut veh.air_density, v.air_density);
        set(&mut veh.gravity, v.gravity);

        let f = file.fade;
        let fade = &mut cfg.fade;
        set(&mut fade.base_loss_per_fec, f.base_loss_per_fec);
        set(&mut fade.charge_rate_penalty, f.charge_rate_penalty);
        set(&mut fade.grade_penalty, f.grade_penalty);
        set(&mut fade.calendar_loss, f.calendar_loss);
        set(&mut fade.dod_exponent, f.dod_exponent);

        let r = file.ranges;
        let rg = &mut cfg.ranges;
        let iv = |slot: &mut Interval, v: Option<[f64; 2]>| {
            if let Some([lo, hi]) = v {
                *slot = Interval::new(lo, hi);
            }
        };
        iv(&mut rg.diesel_price, r.diesel_price);
        iv(&mut rg.electricity_price, r.electricity_price);
        iv(&mut rg.e_efficiency, r.e_efficiency);
        iv(&mut rg.d_efficiency, r.d_efficiency);
        iv(&mut rg.d_additional_repairs, r.d_additional_repairs);
        iv(&mut rg.annual_mileage, r.annual_mileage);
        iv(&mut rg.general_op_costs, r.general_op_costs);
        iv(&mut rg.battery_price, r.battery_price);
        set(&mut rg.d_initial_price, r.d_initial_price);
        set(&mut rg.e_initial_price, r.e_initial_price);
        set(&mut rg.replacement_fraction, r.replacement_fraction);
        set(&mut rg.discount_rate, r.discount_rate);
        set(&mut rg.lifetime_miles, r.lifetime_miles);
        set(&mut rg.driving_days, r.driving_days);

        cfg.vehicle.validate()?;
        cfg.fade.validate()?;
        rg.replacement_miles = match r.replacement_miles {
            Some(m) => m,
            // Vehicle or fade changes move the Case C end of life.
            None if cfg.vehicle != VehicleParams::default()
                || cfg.fade != FadeParams::default() =>
            {
                battery::replacement_miles(&cfg.vehicle, &cfg.fade)?.unwrap_or(f64::INFINITY)
            }
            None => rg.replacement_miles,
        };

        if let Some(seed) = file.run.seed {
            cfg.sampling.seed = seed;
        }
        if let Some(n) = file.run.samples {
            cfg.sampling.samples = n;
        }
        if let Some(g) = file.run.grid_points {
            cfg.sampling.grid_points = g;
        }
        if let Some(dir) = file.output_dir {
            cfg.output_dir = dir;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.vehicle.validate()?;
        self.fade.validate()?;
        self.ranges.validate()?;
        if self.sampling.samples == 0 {
            return Err(Error::Config("samples must be > 0".into()));
        }
        if self.sampling.grid_points < 2 {
            return Err(Error::Config("grid_points must be >= 2".into()));
        }
        Ok(())
    }

    fn resolve(cli: &Cli) -> Result<Self> {
        let mut cfg = match &cli.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                Self::from_toml(&text)?
            }
            None => Self::default(),
        };
        if let Some(seed) = cli.seed {
            cfg.sampling.seed = seed;
        }
        if let Some(n) = cli.samples {
            cfg.sampling.samples = n;
        }
        if let Some(out) = &cli.out {
            cfg.output_dir = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Summary written as `report.json` next to the CSVs.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config: RunConfig,
    pub headline: BTreeMap<String, f64>,
    pub files: Vec<String>,
}

struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        self.files.push(name.to_string());
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    fn finish(
        self,
        command: &str,
        config: &RunConfig,
        headline: BTreeMap<String, f64>,
    ) -> Result<RunReport> {
        let report = RunReport {
            command: command.to_string(),
            config: config.clone(),
            headline,
            files: self.files,
        };
        let file = File::create(self.dir.join("report.json"))?;
        serde_json::to_writer_pretty(BufWriter::new(file), &report)
            .map_err(|e| Error::Io(e.into()))?;
        Ok(report)
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_user_error() {
                2
            } else {
                1
            }
        }
    }
}

pub fn run(cli: &Cli) -> Result<RunReport> {
    let cfg = RunConfig::resolve(cli)?;
    match &cli.command {
        Command::Energy(a) => cmd_energy(&cfg, a),
        Command::Cyclelife(a) => cmd_cyclelife(&cfg, a),
        Command::Tco(a) => cmd_tco(&cfg, a),
        Command::Payback(a) => cmd_payback(&cfg, a),
        Command::Sensitivity(a) => cmd_sensitivity(&cfg, a),
    }
}

fn headline<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn energy_cycle(a: &EnergyArgs) -> Result<DriveCycle> {
    let cycle = match &a.cycle {
        Some(path) => {
            let file = File::open(path)
                .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
            let name = path
                .file_stem()
                .map_or("cycle".into(), |s| s.to_string_lossy().into_owned());
            load_cycle(name, file)?
        }
        None => {
            let d = a.kind.default_params();
            synth_cycle(
                a.kind,
                SynthParams {
                    target_speed_mps: a.speed_mph.map_or(d.target_speed_mps, mph_to_mps),
                    duration_s: a.duration_s.unwrap_or(d.duration_s),
                    stop_fraction: a.stop_fraction.unwrap_or(d.stop_fraction),
                },
            )?
        }
    };
    match a.daily_miles {
        Some(miles) => stitch_daily(&cycle, miles),
        None => Ok(cycle),
    }
}

pub fn cmd_energy(cfg: &RunConfig, a: &EnergyArgs) -> Result<RunReport> {
    let cycle = energy_cycle(a)?;
    let road = RoadProfile::new(a.grade, a.grade_fraction)?;
    let vehicle = cfg
        .vehicle
        .platooned(if a.platoon { a.platoon_factor } else { 1.0 });
    let trace = simulate_cycle(&cycle, &vehicle, &road, a.pack_kwh)?;
    let tons = kg_to_us_tons(vehicle.total_weight);
    let wh_ton_mi = per_ton_mile(trace.energy_per_mile, tons);

    let mut out = Output::new(&cfg.output_dir)?;
    trace.write_csv(out.create("energy_trace.csv")?)?;

    println!("cycle            {}", cycle.name());
    println!("distance         {:.3} mi", trace.distance_mi);
    println!("net energy       {:.3} kWh", trace.net_energy_kwh);
    println!("energy per mile  {:.4} kWh/mi", trace.energy_per_mile);
    println!(
        "per ton-mile     {:.2} Wh/ton-mi ({:.2} US tons)",
        wh_ton_mi, tons
    );

    out.finish(
        "energy",
        cfg,
        headline([
            ("distance_mi", trace.distance_mi),
            ("net_energy_kwh", trace.net_energy_kwh),
            ("energy_kwh_per_mi", trace.energy_per_mile),
            ("wh_per_ton_mi", wh_ton_mi),
        ]),
    )
}

pub fn cmd_cyclelife(cfg: &RunConfig, a: &CyclelifeArgs) -> Result<RunReport> {
    let fade = if a.fade_zero {
        FadeParams::zero()
    } else {
        cfg.fade
    };
    let traces = run_reference_cases(&cfg.vehicle, &fade)?;
    let cases = battery::reference_cases();
    let pack = battery::reference_pack(&cfg.vehicle, 0.0)?;
    let range_floor = DESIGN_RANGE_MI * a.eol_threshold;

    let mut out = Output::new(&cfg.output_dir)?;
    for t in &traces {
        t.write_csv(
            out.create(&format!("case_{}.csv", t.case_label))?,
            LIFE_TRACE_MAX_ROWS,
        )?;
    }

    let mut summary = csv::Writer::from_writer(out.create("cyclelife_summary.csv")?);
    summary.write_record([
        "case",
        "daily_mi",
        "charge_c_rate",
        "energy_kwh_per_mi",
        "eol_mi",
        "capacity_at_1m_mi",
        "crosses_400mi_before_1m",
    ])?;
    println!(
        "pack {:.1} kWh for {} mi",
        pack.capacity_kwh, DESIGN_RANGE_MI
    );
    println!(
        "case  mi/day  C-rate  kWh/mi   EOL miles     cap@1M   below {range_floor:.0} mi before 1M"
    );
    let mut head = BTreeMap::new();
    for (t, case) in traces.iter().zip(cases.iter()) {
        let eol = miles_to_eol(t, a.eol_threshold);
        let crosses = eol.is_some_and(|m| m < 1_000_000.0);
        let cap = t.capacity_at(1_000_000.0);
        let eol_text = eol.map_or("beyond horizon".to_string(), |m| format!("{m:.0}"));
        let cap_text = cap.map_or(String::new(), |c| format!("{c:.4}"));
        summary.write_record([
            t.case_label.to_string(),
            case.daily_distance_mi.to_string(),
            case.charge_c_rate.to_string(),
            t.energy_per_mile.to_string(),
            eol.map_or("inf".to_string(), |m| m.to_string()),
            cap.map_or(String::new(), |c| c.to_string()),
            u8::from(crosses).to_string(),
        ])?;
        println!(
            "{:>4}  {:>6.0}  {:>6.1}  {:>6.3}  {:>14}  {:>7}  {}",
            t.case_label,
            case.daily_distance_mi,
            case.charge_c_rate,
            t.energy_per_mile,
            eol_text,
            cap_text,
            if crosses { "yes" } else { "no" }
        );
        head.insert(
            format!("eol_mi_{}", t.case_label),
            eol.unwrap_or(f64::INFINITY),
        );
    }
    summary.flush()?;
    drop(summary);
    out.finish("cyclelife", cfg, head)
}

fn write_histogram<W: std::io::Write>(
    writer: W,
    header: &[&str],
    dists: &[&Distribution],
) -> Result<()> {
    let lo = dists.iter().map(|d| d.min).fold(f64::INFINITY, f64::min);
    let hi = dists
        .iter()
        .map(|d| d.max)
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = if hi > lo { hi } else { lo + 1.0 };
    let hists: Vec<_> = dists
        .iter()
        .map(|d| d.histogram(lo, hi, HISTOGRAM_BINS))
        .collect();
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header)?;
    for i in 0..HISTOGRAM_BINS {
        let mut row = vec![hists[0][i].0.to_string(), hists[0][i].1.to_string()];
        row.extend(hists.iter().map(|h| h[i].2.to_string()));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_tco(cfg: &RunConfig, a: &TcoArgs) -> Result<RunReport> {
    let mut ranges = cfg.ranges;
    if let Some(rf) = a.rf {
        ranges = ranges.with_replacement_fraction(rf);
        ranges.validate()?;
    }
    let s = cfg.sampling;
    let scenarios = sample_scenarios(&ranges, s.samples, s.grid_points, s.seed)?;
    let diesel = cpm_distribution(&scenarios, Truck::Diesel)?;
    let electric = cpm_distribution(&scenarios, Truck::Electric)?;

    let mut out = Output::new(&cfg.output_dir)?;
    write_scenarios_csv(out.create("scenarios.csv")?, &scenarios, &diesel, &electric)?;
    if a.emit_plotdata {
        write_histogram(
            out.create("tco_histogram.csv")?,
            &[
                "bin_low_usd_per_mi",
                "bin_high_usd_per_mi",
                "count_diesel",
                "count_electric",
            ],
            &[&diesel, &electric],
        )?;
    }

    println!("scenarios        {}", scenarios.len());
    println!("replacement R_f  {:.2}", ranges.replacement_fraction);
    println!("diesel   USD/mi  {:.4} ± {:.4}", diesel.mean, diesel.std);
    println!(
        "electric USD/mi  {:.4} ± {:.4}",
        electric.mean, electric.std
    );

    out.finish(
        "tco",
        cfg,
        headline([
            ("replacement_fraction", ranges.replacement_fraction),
            ("cpm_diesel_mean", diesel.mean),
            ("cpm_diesel_std", diesel.std),
            ("cpm_electric_mean", electric.mean),
            ("cpm_electric_std", electric.std),
        ]),
    )
}

fn print_payback(summary: &PaybackSummary) {
    match (&summary.years, &summary.odometer_mi) {
        (Some(y), Some(o)) => {
            println!("payback mean     {:.3} yr (std {:.3})", y.mean, y.std);
            println!("payback median   {:.3} yr", y.median);
            println!("odometer mean    {:.0} mi", o.mean);
        }
        _ => println!("no scenario breaks even"),
    }
    println!(
        "no break-even    {} of {} ({:.2}%)",
        summary.no_breakeven,
        summary.total,
        100.0 * summary.frac_no_breakeven()
    );
}

pub fn cmd_payback(cfg: &RunConfig, a: &PaybackArgs) -> Result<RunReport> {
    let mut ranges = cfg.ranges;
    if let Some(rf) = a.rf {
        ranges = ranges.with_replacement_fraction(rf);
        ranges.validate()?;
    }
    let s = cfg.sampling;
    let summary = match a.drag_coefficient {
        Some(cd) => {
            let v = drag_vignette(cd, &ranges, &cfg.vehicle, &s)?;
            println!(
                "drag coefficient {cd} (cruise energy x{:.4})",
                v.efficiency_ratio
            );
            v.summary
        }
        None => {
            let scenarios = sample_scenarios(&ranges, s.samples, s.grid_points, s.seed)?;
            payback_distribution(&scenarios)?
        }
    };

    let mut out = Output::new(&cfg.output_dir)?;
    summary.write_csv(out.create("payback.csv")?)?;
    if a.emit_plotdata {
        if let Some(years) = &summary.years {
            write_histogram(
                out.create("payback_histogram.csv")?,
                &["bin_low_yr", "bin_high_yr", "count"],
                &[years],
            )?;
        }
    }
    print_payback(&summary);

    let (mean, median, std) = summary
        .years
        .as_ref()
        .map_or((f64::INFINITY, f64::INFINITY, f64::NAN), |d| {
            (d.mean, d.median, d.std)
        });
    let odometer = summary
        .odometer_mi
        .as_ref()
        .map_or(f64::INFINITY, |d| d.mean);
    out.finish(
        "payback",
        cfg,
        headline([
            ("replacement_fraction", ranges.replacement_fraction),
            ("payback_mean_yr", mean),
            ("payback_median_yr", median),
            ("payback_std_yr", std),
            ("odometer_mean_mi", odometer),
            ("frac_no_breakeven", summary.frac_no_breakeven()),
        ]),
    )
}

pub fn cmd_sensitivity(cfg: &RunConfig, a: &SensitivityArgs) -> Result<RunReport> {
    let variable: Variable = a.variable.parse()?;
    let mut ranges = cfg.ranges;
    if let Some(rf) = a.rf {
        ranges = ranges.with_replacement_fraction(rf);
        ranges.validate()?;
    }
    let points = sensitivity_sweep(&ranges, variable, &a.values, &cfg.sampling)?;

    let mut out = Output::new(&cfg.output_dir)?;
    write_sensitivity_csv(out.create("sensitivity.csv")?, &points)?;

    println!(
        "{:<22} {:>12} {:>10} {:>10} {:>8}",
        "variable", "pinned", "mean yr", "median yr", "no b/e"
    );
    let mut head = BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        println!(
            "{:<22} {:>12} {:>10.3} {:>10.3} {:>7.2}%",
            p.variable.name(),
            p.pinned_value,
            p.mean_payback,
            p.median_payback,
            100.0 * p.frac_no_breakeven
        );
        head.insert(format!("mean_payback_yr_{i}"), p.mean_payback);
    }
    out.finish("sensitivity", cfg, head)
}
