//! Speed-vs-time drive cycles: CSV ingest, synthetic generators, resampling
//! and stitching into a full day of driving.
//!
//! Canonical units are seconds and meters/second. Distances reported by
//! [`CycleStats`] are in miles.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::meters_to_miles;

/// Header line required on cycle CSV files.
pub const CSV_HEADER: &str = "t_s,v_mps";

/// Idle time inserted between repetitions when stitching a day.
pub const IDLE_SPLICE_S: f64 = 300.0;

/// A validated speed trace. Immutable once constructed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveCycle {
    name: String,
    times: Vec<f64>,
    speeds: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleStats {
    pub distance_mi: f64,
    pub duration_s: f64,
    pub mean_speed_mps: f64,
    pub max_accel_mps2: f64,
}

impl DriveCycle {
    /// Builds a cycle from parallel time and speed columns, checking that
    /// times start at zero and strictly increase, speeds are finite and
    /// nonnegative, and there are at least two samples.
    pub fn new(name: impl Into<String>, times: Vec<f64>, speeds: Vec<f64>) -> Result<Self> {
        if times.len() != speeds.len() {
            return Err(Error::Validation(format!(
                "{} times but {} speeds",
                times.len(),
                speeds.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::Validation(format!(
                "need at least 2 samples, got {}",
                times.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::Validation(format!(
                "sample 0: first time must be 0, got {}",
                times[0]
            )));
        }
        for (i, (&t, &v)) in times.iter().zip(&speeds).enumerate() {
            if !t.is_finite() || !v.is_finite() {
                return Err(Error::Validation(format!("sample {i}: non-finite value")));
            }
            if v < 0.0 {
                return Err(Error::Validation(format!(
                    "sample {i} (t={t} s): negative speed {v}"
                )));
            }
            if i > 0 && t <= times[i - 1] {
                return Err(Error::Validation(format!(
                    "sample {i} (t={t} s): time not strictly increasing after {}",
                    times[i - 1]
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            times,
            speeds,
        })
    }

    pub fn from_samples(name: impl Into<String>, samples: &[(f64, f64)]) -> Result<Self> {
        let (times, speeds) = samples.iter().copied().unzip();
        Self::new(name, times, speeds)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.speeds.iter().copied())
    }

    pub fn duration_s(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Trapezoidal distance in meters.
    pub fn distance_m(&self) -> f64 {
        trapezoid(&self.times, &self.speeds)
    }

    pub fn distance_mi(&self) -> f64 {
        meters_to_miles(self.distance_m())
    }

    pub fn stats(&self) -> CycleStats {
        let distance_m = self.distance_m();
        let duration_s = self.duration_s();
        let max_accel_mps2 = self
            .times
            .windows(2)
            .zip(self.speeds.windows(2))
            .map(|(t, v)| (v[1] - v[0]) / (t[1] - t[0]))
            .fold(0.0_f64, f64::max);
        CycleStats {
            distance_mi: meters_to_miles(distance_m),
            duration_s,
            mean_speed_mps: distance_m / duration_s,
            max_accel_mps2,
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Writes the cycle in the `t_s,v_mps` CSV format.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t_s", "v_mps"])?;
        for (t, v) in self.samples() {
            w.write_record([t.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Trapezoidal integral of `y` over `x`.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(x, y)| 0.5 * (y[0] + y[1]) * (x[1] - x[0]))
        .sum()
}

/// Parses a cycle CSV (`t_s,v_mps` header, one sample per row).
pub fn load_cycle<R: Read>(name: impl Into<String>, source: R) -> Result<DriveCycle> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| csv_parse_error(&e))?,
        None => {
            return Err(Error::Parse {
                line: 1,
                message: format!("empty input, expected header `{CSV_HEADER}`"),
            })
        }
    };
    if header.len() != 2 || &header[0] != "t_s" || &header[1] != "v_mps" {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{CSV_HEADER}`"),
        });
    }

    let mut times = Vec::new();
    let mut speeds = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_parse_error(&e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        let parse = |field: &str, what: &str| -> Result<f64> {
            field
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("{what} `{field}` is not a finite number"),
                })
        };
        times.push(parse(&rec[0], "time")?);
        speeds.push(parse(&rec[1], "speed")?);
    }
    DriveCycle::new(name, times, speeds)
}

fn csv_parse_error(e: &csv::Error) -> Error {
    Error::Parse {
        line: e.position().map(|p| p.line() as usize).unwrap_or(0),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleKind {
    Cruise,
    Composite,
    Custom,
}

impl CycleKind {
    pub const ALL: [CycleKind; 3] = [CycleKind::Cruise, CycleKind::Composite, CycleKind::Custom];

    pub fn name(self) -> &'static str {
        match self {
            CycleKind::Cruise => "cruise",
            CycleKind::Composite => "composite",
            CycleKind::Custom => "custom",
        }
    }

    /// Calibrated default generator settings for each kind.
    pub fn default_params(self) -> SynthParams {
        match self {
            CycleKind::Cruise => SynthParams {
                target_speed_mps: 22.352,
                duration_s: 3600.0,
                stop_fraction: 0.0,
            },
            CycleKind::Composite => SynthParams {
                target_speed_mps: 20.0,
                duration_s: 7200.0,
                stop_fraction: 0.2,
            },
            CycleKind::Custom => SynthParams {
                target_speed_mps: 22.352,
                duration_s: 7200.0,
                stop_fraction: 0.1,
            },
        }
    }
}

impl std::str::FromStr for CycleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cruise" => Ok(CycleKind::Cruise),
            "composite" => Ok(CycleKind::Composite),
            "custom" => Ok(CycleKind::Custom),
            other => Err(Error::arg(format!(
                "unknown cycle kind `{other}` (expected cruise, composite or custom)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub target_speed_mps: f64,
    pub duration_s: f64,
    pub stop_fraction: f64,
}

const CRUISE_RAMP_MPS2: f64 = 0.4;
const BLOCK_ACCEL_MPS2: f64 = 0.5;
const BLOCK_DECEL_MPS2: f64 = 0.75;
const COMPOSITE_HOLD_S: f64 = 180.0;
const CUSTOM_HOLD_S: f64 = 720.0;

/// Generates a synthetic cycle on a 1 s grid.
///
/// `cruise` ramps up, holds and ramps back down to rest. `composite` repeats
/// accelerate/hold/decelerate/idle blocks whose idle share matches the stop
/// fraction; the duration is rounded to a whole number of blocks so the
/// cycle ends at rest. `custom` is a composite with a longer hold.
pub fn synth_cycle(kind: CycleKind, params: SynthParams) -> Result<DriveCycle> {
    let SynthParams {
        target_speed_mps: v,
        duration_s,
        stop_fraction,
    } = params;
    if !(duration_s > 0.0) || !duration_s.is_finite() {
        return Err(Error::arg(format!(
            "duration must be positive, got {duration_s}"
        )));
    }
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::arg(format!(
            "target speed must be positive, got {v}"
        )));
    }
    if !(0.0..1.0).contains(&stop_fraction) {
        return Err(Error::arg(format!(
            "stop fraction must be in [0, 1), got {stop_fraction}"
        )));
    }

    let (total, profile): (f64, Box<dyn Fn(f64) -> f64>) = match kind {
        CycleKind::Cruise => (
            duration_s,
            Box::new(move |t: f64| {
                (CRUISE_RAMP_MPS2 * t)
                    .min(v)
                    .min(CRUISE_RAMP_MPS2 * (duration_s - t))
                    .max(0.0)
            }),
        ),
        CycleKind::Composite | CycleKind::Custom => {
            let hold = if kind == CycleKind::Composite {
                COMPOSITE_HOLD_S
            } else {
                CUSTOM_HOLD_S
            };
            let accel_s = v / BLOCK_ACCEL_MPS2;
            let decel_s = v / BLOCK_DECEL_MPS2;
            let moving = accel_s + hold + decel_s;
            let idle = stop_fraction / (1.0 - stop_fraction) * moving;
            let block = moving + idle;
            let blocks = (duration_s / block).round().max(1.0);
            (
                blocks * block,
                Box::new(move |t: f64| {
                    let tb = t % block;
                    let speed = if tb < accel_s {
                        BLOCK_ACCEL_MPS2 * tb
                    } else if tb < accel_s + hold {
                        v
                    } else if tb < moving {
                        v - BLOCK_DECEL_MPS2 * (tb - accel_s - hold)
                    } else {
                        0.0
                    };
                    speed.max(0.0)
                }),
            )
        }
    };

    let steps = total.floor() as usize;
    let mut times: Vec<f64> = (0..=steps).map(|k| k as f64).collect();
    if total - steps as f64 > 1e-9 {
        times.push(total);
    }
    let mut speeds: Vec<f64> = times.iter().map(|&t| profile(t)).collect();
    // Block profiles are periodic; pin the final sample to rest.
    if kind != CycleKind::Cruise {
        *speeds.last_mut().unwrap() = 0.0;
    }
    DriveCycle::new(kind.name(), times, speeds)
}

/// Linear interpolation onto a uniform grid of spacing `dt`. The original
/// end time is kept as a final sample when it falls between grid points.
pub fn resample(cycle: &DriveCycle, dt: f64) -> Result<DriveCycle> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::arg(format!("dt must be positive, got {dt}")));
    }
    let end = cycle.duration_s();
    if dt > end {
        return Err(Error::arg(format!(
            "dt {dt} s exceeds cycle duration {end} s"
        )));
    }
    let n = (end / dt + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    let last = grid[n];
    if end - last > 1e-9 * dt.max(1.0) {
        grid.push(end);
    } else {
        grid[n] = end;
    }

    let (src_t, src_v) = (cycle.times(), cycle.speeds());
    let mut j = 0;
    let speeds = grid
        .iter()
        .map(|&t| {
            while j + 1 < src_t.len() - 1 && src_t[j + 1] < t {
                j += 1;
            }
            let (t0, t1) = (src_t[j], src_t[j + 1]);
            let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
            src_v[j] + w * (src_v[j + 1] - src_v[j])
        })
        .collect();
    DriveCycle::new(cycle.name(), grid, speeds)
}

/// Repeats `cycle` with idle splices until the cumulative distance reaches
/// `daily_distance_mi`, cutting at the first sample that reaches it.
pub fn stitch_daily(cycle: &DriveCycle, daily_distance_mi: f64) -> Result<DriveCycle> {
    let cycle_m = cycle.distance_m();
    if !(cycle_m > 0.0) {
        return Err(Error::arg("cannot stitch a zero-distance cycle"));
    }
    if !(daily_distance_mi > 0.0) || !daily_distance_mi.is_finite() {
        return Err(Error::arg(format!(
            "daily distance must be positive, got {daily_distance_mi}"
        )));
    }
    let target_m = crate::units::miles_to_meters(daily_distance_mi);
    let reached = |d: f64| d >= target_m * (1.0 - 1e-12);

    let mut times = vec![0.0];
    let mut speeds = vec![cycle.speeds()[0]];
    let mut dist = 0.0;
    let mut offset = 0.0;
    'outer: loop {
        for (t, v) in cycle.samples().skip(1) {
            let t = t + offset;
            let (tp, vp) = (times[times.len() - 1], speeds[speeds.len() - 1]);
            dist += 0.5 * (v + vp) * (t - tp);
            times.push(t);
            speeds.push(v);
            if reached(dist) {
                break 'outer;
            }
        }
        // Splice: come to rest if needed, idle, then restart the cycle.
        let (t_end, v_end) = (times[times.len() - 1], speeds[speeds.len() - 1]);
        if v_end > 0.0 {
            dist += 0.5 * v_end;
            times.push(t_end + 1.0);
            speeds.push(0.0);
            if reached(dist) {
                break;
            }
        }
        offset = times[times.len() - 1] + IDLE_SPLICE_S;
        let v0 = cycle.speeds()[0];
        let tp = times[times.len() - 1];
        dist += 0.5 * v0 * (offset - tp);
        times.push(offset);
        speeds.push(v0);
        if reached(dist) {
            break;
        }
    }
    DriveCycle::new(format!("{}-daily", cycle.name()), times, speeds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(samples: &[(f64, f64)]) -> DriveCycle {
        DriveCycle::from_samples("t", samples).unwrap()
    }

    #[test]
    fn rejects_short_and_non_monotone() {
        assert!(DriveCycle::from_samples("t", &[(0.0, 1.0)]).is_err());
        assert!(DriveCycle::from_samples("t", &[(0.0, 0.0), (1.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(DriveCycle::from_samples("t", &[(1.0, 0.0), (2.0, 1.0)]).is_err());
        let err = DriveCycle::from_samples("t", &[(0.0, 0.0), (1.0, -1.0)]).unwrap_err();
        assert!(err.to_string().contains("sample 1"), "{err}");
    }

    #[test]
    fn load_minimal() {
        let c = load_cycle("m", "t_s,v_mps\n0,0\n1,1\n2,2\n".as_bytes()).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.duration_s(), 2.0);
    }

    #[test]
    fn load_reports_line_numbers() {
        let err = load_cycle("m", "t_s,v_mps\n0,0\n1,abc\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
        let err = load_cycle("m", "t_s,v_mps\n0,0\n1,2,3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = load_cycle("m", "time,speed\n0,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn load_negative_speed_is_validation_error() {
        let err = load_cycle("m", "t_s,v_mps\n0,0\n1,-1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn resample_identity_and_midpoints() {
        let c = cycle(&[(0.0, 0.0), (1.0, 3.0), (2.0, 1.0)]);
        assert_eq!(resample(&c, 1.0).unwrap(), c);
        let r = resample(&cycle(&[(0.0, 0.0), (2.0, 2.0)]), 1.0).unwrap();
        assert_eq!(r.times(), &[0.0, 1.0, 2.0]);
        assert_eq!(r.speeds(), &[0.0, 1.0, 2.0]);
        assert!(resample(&c, 3.0).is_err());
        assert!(resample(&c, 0.0).is_err());
    }

    #[test]
    fn cruise_holds_target() {
        let c = synth_cycle(
            CycleKind::Cruise,
            SynthParams {
                target_speed_mps: 26.8,
                duration_s: 3600.0,
                stop_fraction: 0.0,
            },
        )
        .unwrap();
        let hold: Vec<f64> = c.speeds().iter().copied().filter(|&v| v >= 26.8).collect();
        assert!(hold.len() > 3000);
        let mean = hold.iter().sum::<f64>() / hold.len() as f64;
        assert!((mean - 26.8).abs() < 1e-9);
        assert_eq!(c.speeds()[0], 0.0);
        assert_eq!(*c.speeds().last().unwrap(), 0.0);
    }

    #[test]
    fn composite_stop_fraction() {
        let mut p = CycleKind::Composite.default_params();
        p.stop_fraction = 0.2;
        let c = synth_cycle(CycleKind::Composite, p).unwrap();
        let zeros = c.speeds().iter().filter(|&&v| v == 0.0).count() as f64;
        let frac = zeros / c.len() as f64;
        assert!((frac - 0.2).abs() <= 0.01, "stop fraction {frac}");
    }

    #[test]
    fn synth_argument_errors() {
        let bad = [
            (0.0, 10.0, 0.1),
            (10.0, 0.0, 0.1),
            (-1.0, 10.0, 0.1),
            (10.0, 10.0, 1.0),
        ];
        for (v, d, s) in bad {
            let p = SynthParams {
                target_speed_mps: v,
                duration_s: d,
                stop_fraction: s,
            };
            assert!(synth_cycle(CycleKind::Composite, p).is_err());
        }
    }

    #[test]
    fn stitch_zero_distance_errors() {
        let c = cycle(&[(0.0, 0.0), (10.0, 0.0)]);
        assert!(stitch_daily(&c, 100.0).is_err());
    }
}
