//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string. The `*_json` functions hold the logic
//! and are plain Rust so they can be tested natively.

use cmi_core::simulation::{draw_dgp, simulate_limit_infimum, DgpSpec, LimitSimConfig, MeanFn};
use cmi_core::{
    critical_value, first_order_critical_value, gumbel_cdf, gumbel_r, run_test, TestConfig,
    TruncationRule,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

/// One draw of `Y = m(X) + e` with a bump of the given amplitude on
/// `[0.4, 0.6]`, and the test run on it.
pub fn scan_json(
    amplitude: f64,
    n: usize,
    seed: u64,
    sigma_min: Option<f64>,
) -> Result<Value, String> {
    let mean = MeanFn::Bump {
        lo: 0.4,
        hi: 0.6,
        amplitude,
    };
    let sample = draw_dgp(&DgpSpec::new(mean, n, seed)).map_err(|e| e.to_string())?;
    let mut config = TestConfig::default();
    if let Some(s) = sigma_min {
        config.rule = TruncationRule::Explicit(s);
    }
    let report = run_test(&sample, &config).map_err(|e| e.to_string())?;
    let flags: Vec<&str> = report.flags.iter().map(|f| f.as_str()).collect();
    Ok(json!({
        "x": sample.x(),
        "y": sample.y(),
        "argmin": report.argmin_x.map(|(lo, hi)| [lo, hi]),
        "statistic": report.statistic,
        "cv": report.cv.map(finite),
        "c_hat": report.c_hat.map(finite),
        "sigma_min": report.sigma_min,
        "reject": report.reject,
        "flags": flags,
    }))
}

/// Closed-form and first-order critical values for `sigma_min = 10^-k`,
/// `k` in `[k_lo, k_hi]`, on unit data scale.
pub fn critical_curve_json(
    alpha: f64,
    k_lo: f64,
    k_hi: f64,
    points: usize,
) -> Result<Value, String> {
    let r = gumbel_r(alpha).map_err(|e| e.to_string())?;
    if k_lo.is_nan() || k_hi.is_nan() || k_lo >= k_hi || points < 2 {
        return Err("need k_lo < k_hi and at least two points".into());
    }
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let k = k_lo + (k_hi - k_lo) * i as f64 / (points - 1) as f64;
        let sigma = 10f64.powf(-k);
        let cv = critical_value(1.0 / (sigma * sigma), r).ok();
        rows.push(json!({
            "k": k,
            "cv": cv,
            "first_order": first_order_critical_value(sigma),
        }));
    }
    Ok(json!({ "alpha": alpha, "r": r, "points": rows }))
}

/// Normalized maxima of the Brownian increment functional, binned against
/// the Gumbel density.
pub fn limit_json(horizon: f64, reps: u64, seed: u64, bins: usize) -> Result<Value, String> {
    let cfg = LimitSimConfig::new(horizon, 0.1, reps, seed);
    let summary = simulate_limit_infimum(&cfg).map_err(|e| e.to_string())?;
    let (lo, hi) = (-3.0, 7.0);
    let bins = bins.max(1);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &g in &summary.normalized {
        if (lo..hi).contains(&g) {
            counts[((g - lo) / width) as usize] += 1;
        }
    }
    let density: Vec<f64> = counts
        .iter()
        .map(|&c| c as f64 / (reps as f64 * width))
        .collect();
    let gumbel: Vec<f64> = (0..bins)
        .map(|b| {
            let left = lo + b as f64 * width;
            (gumbel_cdf(left + width) - gumbel_cdf(left)) / width
        })
        .collect();
    Ok(json!({
        "lo": lo,
        "width": width,
        "density": density,
        "gumbel": gumbel,
        "ks_distance": summary.ks_distance,
    }))
}

fn to_js(v: Result<Value, String>) -> Result<String, JsError> {
    v.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn scan_demo(amplitude: f64, n: usize, seed: u64, sigma_min: f64) -> Result<String, JsError> {
    let sigma = (sigma_min > 0.0).then_some(sigma_min);
    to_js(scan_json(amplitude, n, seed, sigma))
}

#[wasm_bindgen]
pub fn critical_curve(alpha: f64, k_lo: f64, k_hi: f64, points: usize) -> Result<String, JsError> {
    to_js(critical_curve_json(alpha, k_lo, k_hi, points))
}

#[wasm_bindgen]
pub fn limit_demo(horizon: f64, reps: u64, seed: u64, bins: usize) -> Result<String, JsError> {
    to_js(limit_json(horizon, reps, seed, bins))
}
