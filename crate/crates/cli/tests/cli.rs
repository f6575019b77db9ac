use std::path::Path;
use std::process::{Command, Output};

use affine_rates::inflation::FourierOptions;
use affine_rates::market::synthetic_snapshot;
use affine_rates::verify::{flat_cosh_model, round_trip_truth, skew_component};
use serde_json::Value;
use tempfile::TempDir;

fn cli(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affine-rates"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

/// The single stderr line of a run, parsed.
fn diagnostic(o: &Output) -> Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    let last = err.lines().last().expect("a diagnostic line");
    serde_json::from_str(last).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn flat_curve(dir: &Path) {
    std::fs::create_dir_all(dir).unwrap();
    let mut s = String::from("maturity_years,discount_factor\n");
    for k in 1..=20 {
        s += &format!("{},{}\n", k as f64 / 2.0, 1.0175f64.powi(-k));
    }
    write(dir, "curve.csv", &s);
}

/// `(expiry, strike, vol)` rows of a `vol_surface.csv`.
fn vol_rows(path: &Path) -> Vec<(f64, f64, Option<f64>)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("expiry_years,strike,implied_vol,price"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().ok())
        })
        .collect()
}

fn prices(path: &Path) -> Vec<f64> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_array()
        .unwrap()
        .iter()
        .map(|p| p["value"].as_f64().unwrap())
        .collect()
}

#[test]
fn help_exits_zero_with_usage_on_stdout() {
    let tmp = TempDir::new().unwrap();
    let o = cli(tmp.path(), &["price", "--help"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("--instruments"));
}

#[test]
fn usage_errors_exit_two_with_one_line_diagnostic() {
    let tmp = TempDir::new().unwrap();
    for args in [
        vec!["price", "--bogus"],
        vec!["price", "--instruments", "x.json"],
        vec!["surface"],
        vec![],
    ] {
        let o = cli(tmp.path(), &args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(o.stdout.is_empty());
        assert_eq!(String::from_utf8_lossy(&o.stderr).lines().count(), 1);
        let d = diagnostic(&o);
        assert_eq!(d["kind"], "UsageError");
        assert_eq!(d["exit"], 2);
    }
    let o = cli(
        tmp.path(),
        &["price", "--model-in", "missing.json", "--instruments", "x.json"],
    );
    assert_eq!((code(&o), diagnostic(&o)["kind"].as_str()), (2, Some("IoError")));
}

#[test]
fn skew_surface_is_decreasing_in_strike_from_one_year() {
    let tmp = TempDir::new().unwrap();
    let o = cli(tmp.path(), &["surface", "--preset", "skew", "--out-dir", "out"]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let rows = vol_rows(&tmp.path().join("out/vol_surface.csv"));
    assert_eq!(rows.len(), 10 * 11);
    for chunk in rows.chunks(11).filter(|c| c[0].0 >= 1.0) {
        let vols: Vec<f64> = chunk.iter().map(|r| r.2.unwrap()).collect();
        assert!(vols.windows(2).all(|w| w[1] < w[0]), "expiry {}: {vols:?}", chunk[0].0);
    }
    let bounds = std::fs::read_to_string(tmp.path().join("out/lower_bounds.csv")).unwrap();
    assert!(bounds.starts_with("maturity_years,lower_bound\n"));
}

#[test]
fn smile_surface_has_interior_minimum() {
    let tmp = TempDir::new().unwrap();
    let o = cli(
        tmp.path(),
        &[
            "surface",
            "--preset",
            "smile",
            "--fixings",
            "2,6,10",
            "--out-dir",
            "out",
        ],
    );
    assert_eq!(code(&o), 0);
    for chunk in vol_rows(&tmp.path().join("out/vol_surface.csv")).chunks(11) {
        let vols: Vec<f64> = chunk.iter().map(|r| r.2.unwrap()).collect();
        let lo = vols.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(lo < vols[0] && lo < vols[10], "{vols:?}");
    }
}

#[test]
fn thread_cap_does_not_change_outputs() {
    let tmp = TempDir::new().unwrap();
    let run = |threads: &str, out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_affine-rates"))
            .current_dir(tmp.path())
            .env("RATES_THREADS", threads)
            .args(["surface", "--preset", "skew", "--fixings", "1,4", "--out-dir", out])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        std::fs::read(tmp.path().join(out).join("vol_surface.csv")).unwrap()
    };
    assert_eq!(run("1", "a"), run("3", "b"));
    let o = Command::new(env!("CARGO_BIN_EXE_affine-rates"))
        .current_dir(tmp.path())
        .env("RATES_THREADS", "zero")
        .args(["surface", "--preset", "skew"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn fitted_cosh_model_round_trips_through_json() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    flat_curve(&dir.join("market"));
    write(
        dir,
        "fit.json",
        r#"{"process": {"variant": "DoubleGammaOUBM", "params": {"lambda": 0.02, "theta": 0.5, "sigma": 0.3,
            "alpha_plus": 12, "alpha_minus": 10, "beta_plus": 50, "beta_minus": 5, "x0": 0.7}}, "periods": 20}"#,
    );
    let o = cli(
        dir,
        &[
            "fit-curve",
            "--market",
            "market",
            "--config",
            "fit.json",
            "--model-out",
            "m1.json",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    write(
        dir,
        "inst.json",
        r#"[{"type": "floorlet", "k": 4, "strike": 0.03}, {"type": "caplet", "k": 9, "strike": 0.05},
            {"type": "put_swaption", "alpha": 4, "beta": 10, "strike": 0.035}, {"type": "discount", "k": 20}]"#,
    );
    let o = cli(
        dir,
        &[
            "price",
            "--model-in",
            "m1.json",
            "--instruments",
            "inst.json",
            "--out-dir",
            "p1",
            "--model-out",
            "m2.json",
        ],
    );
    assert_eq!(code(&o), 0);
    let o = cli(
        dir,
        &[
            "price",
            "--model-in",
            "m2.json",
            "--instruments",
            "inst.json",
            "--out-dir",
            "p2",
        ],
    );
    assert_eq!(code(&o), 0);
    let (a, b) = (prices(&dir.join("p1/prices.json")), prices(&dir.join("p2/prices.json")));
    let m = flat_cosh_model(skew_component()).unwrap();
    let direct = [
        m.floorlet_price(4, 0.03, None).unwrap(),
        m.caplet_price(9, 0.05, None).unwrap(),
        m.put_swaption_price(4, 10, 0.035, None).unwrap(),
        m.discount(20).unwrap(),
    ];
    for ((x, y), z) in a.iter().zip(&b).zip(direct) {
        assert!((x - y).abs() < 1e-12 && (x - z).abs() < 1e-12, "{x} {y} {z}");
    }
}

#[test]
fn infeasible_curve_exits_three() {
    let tmp = TempDir::new().unwrap();
    flat_curve(&tmp.path().join("market"));
    write(
        tmp.path(),
        "fit.json",
        r#"{"process": {"variant": "DoubleGammaOUBM", "params": {"lambda": 1, "alpha_plus": 0.5, "alpha_minus": 0.5,
            "beta_plus": 0.01, "beta_minus": 0.01}}}"#,
    );
    let o = cli(tmp.path(), &["fit-curve", "--market", "market", "--config", "fit.json"]);
    assert_eq!(code(&o), 3);
    assert_eq!(diagnostic(&o)["kind"], "Infeasible");
}

#[test]
fn contour_outside_domain_exits_four() {
    let tmp = TempDir::new().unwrap();
    let o = cli(
        tmp.path(),
        &[
            "surface",
            "--preset",
            "skew",
            "--fixings",
            "1",
            "--model-out",
            "skew.json",
        ],
    );
    assert_eq!(code(&o), 0);
    write(
        tmp.path(),
        "inst.json",
        r#"[{"type": "floorlet", "k": 4, "strike": 0.04, "contour": 80}]"#,
    );
    let o = cli(
        tmp.path(),
        &["price", "--model-in", "skew.json", "--instruments", "inst.json"],
    );
    assert_eq!(code(&o), 4);
    assert_eq!(diagnostic(&o)["kind"], "ContourError");
}

#[test]
fn verify_passes_with_reduced_paths() {
    // The full 10^6-path run lives in the acceptance target; 10^5 paths keep the heavy-tailed
    // smile payoffs' standard errors reliable.
    let tmp = TempDir::new().unwrap();
    let o = cli(tmp.path(), &["verify", "--mc-paths", "100000", "--out-dir", "v"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("v/verify.json")).unwrap()).unwrap();
    let criteria: Vec<u64> = report["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["criterion"].as_u64().unwrap())
        .collect();
    assert_eq!(criteria, [1, 2, 3, 4, 5, 8, 9]);
}

#[test]
fn inflation_pipeline_calibrates_prices_and_tabulates() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let truth = round_trip_truth().unwrap();
    let snap = synthetic_snapshot(&truth, &[0.02, 0.04], &[-0.01, 0.03], &FourierOptions::default()).unwrap();
    snap.write_dir(dir.join("market")).unwrap();
    write(dir, "calib.json", r#"{"budget": 30, "nominal_objective": "mse_price"}"#);
    let nominal = |out: &str| {
        let o = cli(
            dir,
            &[
                "calibrate-nominal",
                "--market",
                "market",
                "--config",
                "calib.json",
                "--seed",
                "5",
                "--out-dir",
                out,
            ],
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(dir.join(out).join("nominal_model.json")).unwrap()
    };
    assert_eq!(nominal("n1"), nominal("n2"));
    assert!(dir.join("n1/report.json").exists() && dir.join("n1/residuals_nominal.csv").exists());

    let o = cli(
        dir,
        &[
            "calibrate-inflation",
            "--market",
            "market",
            "--config",
            "calib.json",
            "--model-in",
            "n1/nominal_model.json",
            "--out-dir",
            "i",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = cli(
        dir,
        &[
            "surface",
            "--model-in",
            "i/inflation_model.json",
            "--years",
            "1,3,5",
            "--out-dir",
            "s",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let header = |f: &str| {
        std::fs::read_to_string(dir.join("s").join(f))
            .unwrap()
            .lines()
            .next()
            .unwrap()
            .to_string()
    };
    assert_eq!(header("vol_surface.csv"), "expiry_years,strike,implied_vol,price");
    assert_eq!(
        header("forward_inflation.csv"),
        "maturity_years,forward_inflation,index_ratio_approximation"
    );
    assert_eq!(
        header("inflation_options.csv"),
        "maturity_years,strike,type,price_bps,implied_vol"
    );

    write(
        dir,
        "inst.json",
        r#"[{"type": "cpi_call", "k": 4, "strike": 1.03}, {"type": "nominal_caplet", "k": 6, "strike": 0.03},
            {"type": "inflation_floorlet", "kj": 2, "k": 4, "strike": 0.0}, {"type": "forward_inflation", "kj": 8, "k": 10},
            {"type": "zciis_rate", "years": 5}, {"type": "yyiis_rate", "years": 5}]"#,
    );
    let o = cli(
        dir,
        &[
            "price",
            "--model-in",
            "i/inflation_model.json",
            "--instruments",
            "inst.json",
            "--out-dir",
            "p1",
            "--model-out",
            "copy.json",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = cli(
        dir,
        &[
            "price",
            "--model-in",
            "copy.json",
            "--instruments",
            "inst.json",
            "--out-dir",
            "p2",
        ],
    );
    assert_eq!(code(&o), 0);
    for (x, y) in prices(&dir.join("p1/prices.json"))
        .iter()
        .zip(prices(&dir.join("p2/prices.json")))
    {
        assert!((x - y).abs() < 1e-12);
    }
    write(
        dir,
        "cosh.json",
        r#"[{"type": "put_swaption", "alpha": 2, "beta": 4, "strike": 0.03}]"#,
    );
    let o = cli(dir, &["price", "--model-in", "copy.json", "--instruments", "cosh.json"]);
    assert_eq!(code(&o), 2);
}
