use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn etruck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etruck"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut full = vec!["--out", dir.to_str().unwrap()];
    full.extend_from_slice(args);
    etruck(&full)
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn manifest_matches_directory(dir: &Path) {
    let listed: BTreeSet<String> = report(dir)["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    let present: BTreeSet<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n != "report.json")
        .collect();
    assert_eq!(listed, present);
    assert!(!listed.is_empty());
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let mut rows = vec![r.headers().unwrap().iter().map(String::from).collect()];
    rows.extend(
        r.records()
            .map(|x| x.unwrap().iter().map(String::from).collect()),
    );
    rows
}

#[test]
fn energy_on_a_cycle_file() {
    let tmp = TempDir::new().unwrap();
    let cycle = tmp.path().join("flat.csv");
    fs::write(&cycle, "t_s,v_mps\n0,0\n60,25\n3540,25\n3600,0\n").unwrap();
    let out_dir = tmp.path().join("out");
    let out = run_in(&out_dir, &["energy", "--cycle", cycle.to_str().unwrap()]);
    ok(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("energy per mile"));
    manifest_matches_directory(&out_dir);
    let rows = csv_rows(&out_dir.join("energy_trace.csv"));
    assert_eq!(rows[0], ["t_s", "power_w"]);
    assert_eq!(rows.len(), 5);
    let epm = report(&out_dir)["headline"]["energy_kwh_per_mi"]
        .as_f64()
        .unwrap();
    assert!(epm > 1.0 && epm < 3.0);
}

#[test]
fn energy_platoon_flag() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&run_in(&a, &["energy", "--kind", "cruise"]));
    ok(&run_in(&b, &["energy", "--kind", "cruise", "--platoon"]));
    let get = |d: &Path| report(d)["headline"]["energy_kwh_per_mi"].as_f64().unwrap();
    assert!((get(&b) / get(&a) - 0.85).abs() < 1e-9);
}

#[test]
fn bad_cycle_file_exits_2() {
    let tmp = TempDir::new().unwrap();
    let cycle = tmp.path().join("bad.csv");
    fs::write(&cycle, "t_s,v_mps\n0,0\n1,-1\n").unwrap();
    let out = run_in(
        &tmp.path().join("o"),
        &["energy", "--cycle", cycle.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    fs::write(&cycle, "time,speed\n0,0\n1,1\n").unwrap();
    let out = run_in(
        &tmp.path().join("o"),
        &["energy", "--cycle", cycle.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));

    let missing = tmp.path().join("missing.csv");
    let out = run_in(
        &tmp.path().join("o"),
        &["energy", "--cycle", missing.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn argument_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let o = tmp.path().join("o");
    let cases: [&[&str]; 5] = [
        &["sensitivity", "--variable", "nonsuch", "--values", "1,2"],
        &["energy", "--kind", "nonsuch"],
        &["frobnicate"],
        &["payback", "--drag-coefficient", "1.5"],
        &["tco", "--rf", "1.5"],
    ];
    for args in cases {
        let out = run_in(&o, args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.toml");
    let o = tmp.path().join("o");
    for text in [
        "vehicle.cdd = 0.4\n",
        "[ranges]\nelectricity_price = [0.12, 0.07]\n",
        "run.samples = 0\n",
        "not toml at all ===\n",
    ] {
        fs::write(&cfg, text).unwrap();
        let out = run_in(&o, &["--config", cfg.to_str().unwrap(), "tco"]);
        assert_eq!(out.status.code(), Some(2), "{text}");
    }
    let out = run_in(
        &o,
        &[
            "--config",
            tmp.path().join("nope.toml").to_str().unwrap(),
            "tco",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(
        &cfg,
        "run.seed = 5\nrun.samples = 300\nranges.replacement_fraction = 0.0\n",
    )
    .unwrap();
    let o = tmp.path().join("o");
    ok(&run_in(
        &o,
        &["--config", cfg.to_str().unwrap(), "--samples", "200", "tco"],
    ));
    let r = report(&o);
    assert_eq!(r["config"]["sampling"]["samples"], 200);
    assert_eq!(r["config"]["sampling"]["seed"], 5);
    assert_eq!(r["headline"]["replacement_fraction"], 0.0);
    assert_eq!(csv_rows(&o.join("scenarios.csv")).len(), 201);
}

#[test]
fn tco_reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let args = [
        "--seed",
        "11",
        "--samples",
        "3000",
        "tco",
        "--emit-plotdata",
    ];
    ok(&run_in(&a, &args));
    ok(&run_in(&b, &args));
    manifest_matches_directory(&a);
    for f in ["scenarios.csv", "tco_histogram.csv"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let header = &csv_rows(&a.join("scenarios.csv"))[0];
    assert_eq!(&header[header.len() - 2..], ["cpm_diesel", "cpm_electric"]);
    let c = tmp.path().join("c");
    ok(&run_in(&c, &["--seed", "12", "--samples", "3000", "tco"]));
    assert_ne!(
        fs::read(a.join("scenarios.csv")).unwrap(),
        fs::read(c.join("scenarios.csv")).unwrap()
    );
}

#[test]
fn payback_outputs() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let args = ["--samples", "4000", "payback", "--emit-plotdata"];
    ok(&run_in(&a, &args));
    ok(&run_in(&b, &args));
    manifest_matches_directory(&a);
    for f in ["payback.csv", "payback_histogram.csv"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let rows = csv_rows(&a.join("payback.csv"));
    assert_eq!(
        rows[0],
        ["scenario", "payback_yr", "odometer_mi", "broke_even"]
    );
    assert_eq!(rows.len(), 4001);
    let mean = report(&a)["headline"]["payback_mean_yr"].as_f64().unwrap();
    assert!(mean > 1.0 && mean < 5.0);

    let d = tmp.path().join("drag");
    ok(&run_in(
        &d,
        &["--samples", "4000", "payback", "--drag-coefficient", "0.5"],
    ));
    let drag_mean = report(&d)["headline"]["payback_mean_yr"].as_f64().unwrap();
    assert!(drag_mean > mean);
}

#[test]
fn cyclelife_flags_cases_c_to_f() {
    let tmp = TempDir::new().unwrap();
    let o = tmp.path().join("o");
    ok(&run_in(&o, &["cyclelife"]));
    manifest_matches_directory(&o);
    let rows = csv_rows(&o.join("cyclelife_summary.csv"));
    let flag = rows[0]
        .iter()
        .position(|h| h == "crosses_400mi_before_1m")
        .unwrap();
    let marked: String = rows[1..]
        .iter()
        .filter(|r| r[flag] == "1")
        .map(|r| r[0].clone())
        .collect();
    assert_eq!(marked, "CDEF");
    for label in "ABCDEF".chars() {
        let trace = csv_rows(&o.join(format!("case_{label}.csv")));
        assert_eq!(
            trace[0],
            ["miles", "capacity_fraction", "available_range_mi"]
        );
        assert!(trace.len() - 1 <= 2000);
    }

    let z = tmp.path().join("z");
    ok(&run_in(&z, &["cyclelife", "--fade-zero"]));
    let rows = csv_rows(&z.join("cyclelife_summary.csv"));
    assert!(rows[1..].iter().all(|r| r[flag] == "0"));
}

#[test]
fn electricity_sweep_is_monotone() {
    let tmp = TempDir::new().unwrap();
    let o = tmp.path().join("o");
    ok(&run_in(
        &o,
        &[
            "sensitivity",
            "--variable",
            "electricity_price",
            "--values",
            "0.07,0.095,0.12,0.14",
        ],
    ));
    manifest_matches_directory(&o);
    let rows = csv_rows(&o.join("sensitivity.csv"));
    assert_eq!(
        rows[0],
        [
            "variable",
            "pinned_value",
            "mean_payback_yr",
            "std_payback_yr",
            "frac_no_breakeven"
        ]
    );
    let means: Vec<f64> = rows[1..].iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(means.len(), 4);
    assert!(means.windows(2).all(|w| w[1] > w[0]), "{means:?}");
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(etruck(&["--help"]).status.code(), Some(0));
    assert_eq!(etruck(&["--version"]).status.code(), Some(0));
}
