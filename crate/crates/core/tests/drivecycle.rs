use etruck::drivecycle::*;
use etruck::units::{mph_to_mps, METERS_PER_MILE};
use proptest::prelude::*;

/// Row-by-row trapezoid sum over (t, v) pairs, written out the way a
/// spreadsheet column would compute it.
fn spreadsheet_distance_mi(rows: &[(f64, f64)]) -> f64 {
    let mut total = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for &(t, v) in rows {
        if let Some((t0, v0)) = prev {
            let avg = (v0 + v) / 2.0;
            total += avg * (t - t0);
        }
        prev = Some((t, v));
    }
    total / METERS_PER_MILE
}

fn assert_valid(c: &DriveCycle) {
    assert_eq!(c.times()[0], 0.0);
    assert!(c.times().windows(2).all(|w| w[1] > w[0]));
    assert!(c.speeds().iter().all(|&v| v >= 0.0));
}

#[test]
fn load_three_thousand_row_cruise_file() {
    let mut text = String::from("t_s,v_mps\n");
    let mut rows = Vec::new();
    for i in 0..3000 {
        let t = i as f64 * 1.5;
        let v = (0.5 * t).min(25.0) + if i % 7 == 0 { 0.25 } else { 0.0 };
        text.push_str(&format!("{t},{v}\n"));
        rows.push((t, v));
    }
    let c = load_cycle("file", text.as_bytes()).unwrap();
    assert_eq!(c.len(), 3000);
    let oracle = spreadsheet_distance_mi(&rows);
    assert!((c.distance_mi() - oracle).abs() <= 1e-9 * oracle);
    assert!((c.stats().distance_mi - oracle).abs() <= 1e-9 * oracle);
}

#[test]
fn write_then_load_roundtrip() {
    let c = synth_cycle(CycleKind::Composite, CycleKind::Composite.default_params()).unwrap();
    let mut buf = Vec::new();
    c.write_csv(&mut buf).unwrap();
    assert!(buf.starts_with(b"t_s,v_mps\n"));
    let back = load_cycle("composite", buf.as_slice()).unwrap();
    assert_eq!(back, c);
}

#[test]
fn cruise_sixty_mph_for_an_hour() {
    let v = mph_to_mps(60.0);
    let c = synth_cycle(
        CycleKind::Cruise,
        SynthParams {
            target_speed_mps: v,
            duration_s: 3600.0,
            stop_fraction: 0.0,
        },
    )
    .unwrap();
    assert_valid(&c);
    let rows: Vec<_> = c.samples().collect();
    let oracle = spreadsheet_distance_mi(&rows);
    assert!((c.distance_mi() - oracle).abs() < 1e-9);
    // 60 mi less the time spent ramping up and down at 0.4 m/s².
    let ramp_deficit_mi = v * (v / 0.4) / METERS_PER_MILE;
    assert!((oracle - (60.0 - ramp_deficit_mi)).abs() < 0.01, "{oracle}");
    assert!(oracle < 60.0);
}

#[test]
fn synthetic_kinds_are_valid() {
    for kind in CycleKind::ALL {
        let c = synth_cycle(kind, kind.default_params()).unwrap();
        assert_valid(&c);
        assert_eq!(c.name(), kind.name());
        assert_eq!(*c.speeds().last().unwrap(), 0.0);
        let s = c.stats();
        assert!(s.distance_mi > 0.0 && s.max_accel_mps2 > 0.0);
    }
}

#[test]
fn custom_has_longer_high_speed_stretch() {
    let longest_hold = |c: &DriveCycle, v: f64| {
        let mut best = 0;
        let mut run = 0;
        for &s in c.speeds() {
            run = if s == v { run + 1 } else { 0 };
            best = best.max(run);
        }
        best
    };
    let v = 20.0;
    let p = SynthParams {
        target_speed_mps: v,
        duration_s: 7200.0,
        stop_fraction: 0.1,
    };
    let comp = synth_cycle(CycleKind::Composite, p).unwrap();
    let cust = synth_cycle(CycleKind::Custom, p).unwrap();
    assert!(longest_hold(&cust, v) > 2 * longest_hold(&comp, v));
}

#[test]
fn resample_composite_half_second() {
    let c = synth_cycle(CycleKind::Composite, CycleKind::Composite.default_params()).unwrap();
    let r = resample(&c, 0.5).unwrap();
    assert_valid(&r);
    let before = spreadsheet_distance_mi(&c.samples().collect::<Vec<_>>());
    let after = spreadsheet_distance_mi(&r.samples().collect::<Vec<_>>());
    assert!((after - before).abs() <= 0.005 * before);
    let steps: Vec<f64> = r.times().windows(2).map(|w| w[1] - w[0]).collect();
    let (last, body) = steps.split_last().unwrap();
    assert!(body.iter().all(|s| (s - 0.5).abs() < 1e-9));
    assert!(*last > 0.0 && *last <= 0.5 + 1e-9);
    assert_eq!(r.duration_s(), c.duration_s());
}

fn ten_mile_cycle() -> DriveCycle {
    // Constant speed for exactly 10 miles, starting and ending at rest.
    let v = 20.0;
    let ramp = 10.0;
    let hold = 10.0 * METERS_PER_MILE / v - ramp;
    DriveCycle::from_samples(
        "ten",
        &[
            (0.0, 0.0),
            (ramp, v),
            (ramp + hold, v),
            (2.0 * ramp + hold, 0.0),
        ],
    )
    .unwrap()
}

#[test]
fn stitch_exact_divisor() {
    let c = ten_mile_cycle();
    assert!((c.distance_mi() - 10.0).abs() < 1e-9);
    let day = stitch_daily(&c, 270.0).unwrap();
    assert_valid(&day);
    assert!((day.distance_mi() - 270.0).abs() < 1e-6);
    // 27 copies and 26 idle splices between them.
    let expected = 27.0 * c.duration_s() + 26.0 * IDLE_SPLICE_S;
    assert!((day.duration_s() - expected).abs() < 1e-6);
}

#[test]
fn stitch_partial_last_copy() {
    let c = ten_mile_cycle();
    let day = stitch_daily(&c, 275.0).unwrap();
    let d = day.distance_mi();
    let n = day.len();
    let last_step = 0.5
        * (day.speeds()[n - 1] + day.speeds()[n - 2])
        * (day.times()[n - 1] - day.times()[n - 2])
        / METERS_PER_MILE;
    assert!(d >= 275.0 - 1e-9 && d <= 275.0 + last_step + 1e-9, "{d}");
    // 27 full copies plus part of the 28th.
    assert!(day.duration_s() > 27.0 * c.duration_s() + 27.0 * IDLE_SPLICE_S);
    assert!(day.duration_s() < 28.0 * c.duration_s() + 27.0 * IDLE_SPLICE_S);
}

#[test]
fn stitch_composite_to_400_miles() {
    let c = synth_cycle(CycleKind::Composite, CycleKind::Composite.default_params()).unwrap();
    let day = stitch_daily(&c, 400.0).unwrap();
    assert_valid(&day);
    let oracle = spreadsheet_distance_mi(&day.samples().collect::<Vec<_>>());
    assert!(oracle >= 400.0 - 1e-9);
    assert!(oracle < 400.0 + 0.02);
}

#[test]
fn stitch_handles_cycle_ending_in_motion() {
    let c = DriveCycle::from_samples("moving", &[(0.0, 10.0), (100.0, 10.0)]).unwrap();
    let day = stitch_daily(&c, 5.0).unwrap();
    assert_valid(&day);
    assert!(day.distance_mi() >= 5.0 - 1e-9);
}

fn arb_cycle() -> impl Strategy<Value = DriveCycle> {
    prop::collection::vec((0.2f64..5.0, 0.0f64..35.0), 2..200).prop_map(|steps| {
        let mut t = 0.0;
        let mut samples = Vec::with_capacity(steps.len());
        for (i, (dt, v)) in steps.into_iter().enumerate() {
            if i > 0 {
                t += dt;
            }
            samples.push((t, v));
        }
        DriveCycle::from_samples("random", &samples).unwrap()
    })
}

proptest! {
    #[test]
    fn resample_preserves_distance(c in arb_cycle(), frac in 0.02f64..0.5) {
        // A grid no coarser than the finest source step keeps the linear
        // interpolant's area within the stated bound.
        let min_step = c.times().windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let dt = (frac * min_step).min(c.duration_s());
        let r = resample(&c, dt).unwrap();
        assert_valid(&r);
        let (a, b) = (c.distance_m(), r.distance_m());
        prop_assert!((a - b).abs() <= 0.005 * a.max(1e-9) + 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn stitch_distance_window(c in arb_cycle(), daily in 1.0f64..50.0) {
        prop_assume!(c.distance_m() > 1.0);
        let day = stitch_daily(&c, daily).unwrap();
        assert_valid(&day);
        let n = day.len();
        let last = 0.5 * (day.speeds()[n - 1] + day.speeds()[n - 2])
            * (day.times()[n - 1] - day.times()[n - 2]) / METERS_PER_MILE;
        let d = day.distance_mi();
        prop_assert!(d >= daily * (1.0 - 1e-12));
        prop_assert!(d <= daily + last + 1e-9);
    }
}
