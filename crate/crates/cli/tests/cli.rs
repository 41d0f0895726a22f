//! End-to-end tests of the binary: exit codes, JSON shape and stability,
//! text/JSON value agreement, and CSV plot output.

use std::process::{Command, Output};

fn gasym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gasym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const MEROMORPHIC: [&str; 2] = ["(sqrt(s)+1)/(sqrt(s)*sin(s))", "(s^2+s+5)/sin(s)"];

#[test]
fn meromorphic_json_report() {
    let out = gasym(&[
        MEROMORPHIC[0],
        MEROMORPHIC[1],
        "--window=-1,1,-1,1",
        "--json",
    ]);
    assert!(out.status.success(), "stderr: {:?}", out.stderr);
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    let r = &results[0];
    assert_eq!(r["pole"]["gamma"], 2);
    assert_eq!(r["pole"]["reduced_orders"], serde_json::json!([3, 2]));
    let a = &r["asymptote"];
    assert_eq!(a["base_exponent"], 3);
    let coeffs = a["coordinates"][0]["coefficients"].as_array().unwrap();
    let expected = [8.0 / 3.0, -10.0 / 3.0, 5.0];
    for (c, want) in coeffs.iter().zip(expected) {
        assert!((c["re"].as_f64().unwrap() - want).abs() < 1e-9);
        assert!(c["im"].as_f64().unwrap().abs() < 1e-9);
    }
    // structural contract of the report
    for key in ["curve", "window", "config", "results", "failures"] {
        assert!(v.get(key).is_some(), "missing top-level key {key}");
    }
    for key in ["pole", "branch", "asymptote", "approach_distances"] {
        assert!(r.get(key).is_some(), "missing result key {key}");
    }
    assert!(r["branch"]["series"][0]["display"]
        .as_str()
        .unwrap()
        .contains("z^(2/3)"));
}

#[test]
fn sine_ratio_slope_to_nine_digits() {
    let out = gasym(&[
        "(cos(s)-1)/(s^(3/2)*sin(s))",
        "sin(pi*s)/(s^(1/2)*sin(s))",
        "--window=-1,1,-1,1",
        "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let coeffs = v["results"][0]["asymptote"]["coordinates"][0]["coefficients"]
        .as_array()
        .unwrap();
    assert_eq!(coeffs.len(), 2);
    let slope = coeffs[1]["re"].as_f64().unwrap();
    assert!((slope + 2.0 * std::f64::consts::PI).abs() < 1e-9);
    assert!(coeffs[0]["re"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn empty_window_is_a_clean_empty_run() {
    let out = gasym(&["1/(s-5)", "s/(s-5)", "--window=-1,1,-1,1", "--json"]);
    assert!(out.status.success(), "empty window should still exit 0");
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 0);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn parse_failure_exits_2() {
    let out = gasym(&["1/(s-", "s"]);
    assert_eq!(out.status.code(), Some(2));
    let out = gasym(&["s^pi", "s"]);
    assert_eq!(out.status.code(), Some(2));
    let out = gasym(&["1/s", "1/s", "--window=bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = gasym(&["1/s", "1/s", "--tol=0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn essential_singularity_exits_3() {
    let out = gasym(&["1/s", "exp(1/s)"]);
    assert_eq!(out.status.code(), Some(3), "stderr: {:?}", out.stderr);
}

#[test]
fn cascade_divergence_exits_4() {
    // the second component hides a half-integer exponent behind integer
    // leading orders, so the cascade hits a negative-exponent limit
    let out = gasym(&["1/s", "(1+sqrt(s))/s", "--window=-1,1,-1,1"]);
    assert_eq!(out.status.code(), Some(4), "stderr: {:?}", out.stderr);
}

#[test]
fn json_output_is_byte_stable() {
    let run = || {
        let out = gasym(&[
            MEROMORPHIC[0],
            MEROMORPHIC[1],
            "--window=-1,1,-1,1",
            "--json",
        ]);
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run(), run(), "two runs differ byte for byte");
}

#[test]
fn text_and_json_agree_on_values() {
    let text = stdout_str(&gasym(&[
        MEROMORPHIC[0],
        MEROMORPHIC[1],
        "--window=-1,1,-1,1",
    ]));
    let json_out = stdout_str(&gasym(&[
        MEROMORPHIC[0],
        MEROMORPHIC[1],
        "--window=-1,1,-1,1",
        "--json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&json_out).unwrap();
    let coeffs = v["results"][0]["asymptote"]["coordinates"][0]["coefficients"]
        .as_array()
        .unwrap();
    // every asymptote coefficient printed in the text report (same 15
    // significant digits) appears in the JSON too
    for c in coeffs {
        let formatted = format!("{:.14e}", c["re"].as_f64().unwrap());
        let needle = formatted.trim_start_matches('-');
        assert!(
            text.contains(needle),
            "text report lacks coefficient {formatted}"
        );
    }
}

#[test]
fn plot_csv_contract() {
    let dir = std::env::temp_dir().join(format!("gasym-plot-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("samples.csv");
    let out = gasym(&[
        MEROMORPHIC[0],
        MEROMORPHIC[1],
        "--window=-1,1,-1,1",
        "--xrange=0,3",
        "--plot",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("series_id,x,y\n"));
    assert!(!csv.contains('\r'), "LF line endings only");
    let mut curve_rows = 0usize;
    let mut asym_x: Vec<f64> = Vec::new();
    for line in csv.lines().skip(1) {
        let mut parts = line.split(',');
        let id = parts.next().unwrap();
        let x: f64 = parts.next().unwrap().parse().unwrap();
        let _y: f64 = parts.next().unwrap().parse().unwrap();
        if id.starts_with("curve") {
            curve_rows += 1;
        } else {
            asym_x.push(x);
        }
    }
    assert!(curve_rows > 50, "curve trace missing");
    assert!(!asym_x.is_empty(), "asymptote samples missing");
    // spans the configured x-range endpoints exactly
    let lo = asym_x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = asym_x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(lo, 0.0);
    assert_eq!(hi, 3.0);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn complex_poles_only_emit_real_asymptote_series() {
    // poles at +-I only: no real curve trace, but the asymptote is real
    let dir = std::env::temp_dir().join(format!("gasym-plot2-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("samples.csv");
    let out = gasym(&[
        "1/(s^2+1)",
        "2/(s^2+1) + 1/(s^2+2)",
        "--plot",
        path.to_str().unwrap(),
        "--xrange=-5,5",
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    let has_curve = csv.lines().skip(1).any(|l| l.starts_with("curve"));
    let has_asym = csv.lines().skip(1).any(|l| l.starts_with("asymptote"));
    assert!(!has_curve, "no real pole, so no curve trace near a pole");
    assert!(has_asym, "real-coefficient asymptotes should be sampled");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn rational_line_values_carry_exact_annotations() {
    let out = gasym(&[
        "(3*s^4-s-4+5*s^3)/((s-1)*s^3*(s^2+1))",
        "(2*s^2-7*s+2)/((s-1)*s^2)",
        "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let mut saw_exact_line = false;
    for r in v["results"].as_array().unwrap() {
        if r["asymptote"]["kind"] == "horizontal_line" {
            let c0 = &r["asymptote"]["coordinates"][0]["coefficients"][0];
            if let Some(rat) = c0.get("rational") {
                assert_eq!(rat["re"], "7/2");
                saw_exact_line = true;
            }
        }
    }
    assert!(
        saw_exact_line,
        "expected an exactly-evaluated line constant"
    );
}

#[test]
fn shipped_schema_is_valid_json() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/report-schema.json");
    let text = std::fs::read_to_string(path).expect("schema file present");
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["$schema"], "http://json-schema.org/draft-07/schema#");
    for key in ["curve", "window", "config", "results", "failures"] {
        assert!(
            v["properties"].get(key).is_some(),
            "schema lacks property {key}"
        );
    }
}
