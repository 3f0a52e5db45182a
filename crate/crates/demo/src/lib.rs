//! WebAssembly bindings for the browser demo: horizon data, the fundamental
//! resonance of a mode, and a time-domain ringdown.
//!
//! Each exported function takes plain numbers and returns a JSON string; the
//! `*_json` functions hold the logic and are callable natively.

use kdsqnm::coords::{TortoiseMap, DEFAULT_SERIES_TERMS};
use kdsqnm::resonances::find_mode;
use kdsqnm::tdwave::{evolve, ringdown_fit, Profile, WaveConfig};
use kdsqnm::BlackHoleParams;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn label(e: kdsqnm::Error) -> String {
    format!("{}: {e}", e.name())
}

/// Horizons `r_- < r_+`, surface gravities and `α`.
pub fn horizons_json(m0: f64, lambda: f64, a: f64) -> Result<String, String> {
    let p = BlackHoleParams::new(m0, lambda, a, 0.0).map_err(label)?;
    Ok(json!({
        "r_minus": p.r_minus,
        "r_plus": p.r_plus,
        "a_minus": p.a_minus,
        "a_plus": p.a_plus,
        "alpha": p.alpha,
    })
    .to_string())
}

/// Overtone `n` of the mode `(k, l)`.
pub fn resonance_json(m0: f64, lambda: f64, a: f64, k: i32, l: u32, n: u32) -> Result<String, String> {
    let p = BlackHoleParams::new(m0, lambda, a, 0.0).map_err(label)?;
    let r = find_mode(&p, k, l as usize, n as usize, 1e-10).map_err(label)?;
    Ok(json!({
        "omega": [r.omega.re, r.omega.im],
        "lambda": [r.lambda.re, r.lambda.im],
        "residual": r.residual,
        "iterations": r.newton_iters,
    })
    .to_string())
}

/// Evolve a Gaussian pulse in the non-rotating background and fit the
/// ringdown at `x = 0` over `4 ≤ t ≤ 10`.
pub fn ringdown_json(m0: f64, lambda: f64, l: u32, t_final: f64) -> Result<String, String> {
    let p = BlackHoleParams::new(m0, lambda, 0.0, 0.0).map_err(label)?;
    let map = TortoiseMap::build(&p, None, DEFAULT_SERIES_TERMS).map_err(label)?;
    let cfg = WaveConfig { l: l as usize, dx: 0.05, t_final, dt_out: 0.05, ..Default::default() };
    let pulse = Profile::Gaussian { center: 0.0, width: 0.5, amplitude: 1.0 };
    let series = evolve(&map, &cfg, &pulse, &Profile::Zero).map_err(label)?;
    let fit = match ringdown_fit(&series.t, &series.values[0], (4.0, 10.0)) {
        Ok(f) => json!({ "omega": [f.omega.re, f.omega.im], "residual": f.residual }),
        Err(e) => json!({ "error": label(e) }),
    };
    Ok(json!({ "t": series.t, "u": series.values[0], "fit": fit }).to_string())
}

fn to_js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn horizons(m0: f64, lambda: f64, a: f64) -> Result<String, JsValue> {
    to_js(horizons_json(m0, lambda, a))
}

#[wasm_bindgen]
pub fn resonance(m0: f64, lambda: f64, a: f64, k: i32, l: u32, n: u32) -> Result<String, JsValue> {
    to_js(resonance_json(m0, lambda, a, k, l, n))
}

#[wasm_bindgen]
pub fn ringdown(m0: f64, lambda: f64, l: u32, t_final: f64) -> Result<String, JsValue> {
    to_js(ringdown_json(m0, lambda, l, t_final))
}
