//! The demo entry points, called natively.

use kdsqnm_demo::{horizons_json, resonance_json, ringdown_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn horizons_solve_the_quartic() {
    let v = parse(&horizons_json(0.1, 3.0, 0.0).unwrap());
    for key in ["r_minus", "r_plus"] {
        let r = v[key].as_f64().unwrap();
        assert!((-r.powi(4) + r * r - 0.2 * r).abs() < 1e-14);
    }
    assert!(horizons_json(-1.0, 3.0, 0.0).unwrap_err().starts_with("InvalidParameter"));
}

#[test]
fn resonance_matches_the_solver() {
    let v = parse(&resonance_json(0.1, 3.0, 0.0, 0, 2, 0).unwrap());
    let (re, im) = (v["omega"][0].as_f64().unwrap(), v["omega"][1].as_f64().unwrap());
    assert!((re - 4.083950603339175).abs() < 1e-7 && (im + 0.8389689868092967).abs() < 1e-7);
}

#[test]
fn ringdown_returns_series_and_fit() {
    let v = parse(&ringdown_json(0.1, 3.0, 2, 12.0).unwrap());
    let t = v["t"].as_array().unwrap();
    assert_eq!(t.len(), v["u"].as_array().unwrap().len());
    let re = v["fit"]["omega"][0].as_f64().unwrap();
    assert!((re - 4.084).abs() < 0.05 * 4.084);
}
