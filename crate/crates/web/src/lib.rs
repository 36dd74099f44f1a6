//! Browser bindings for the demo page in `www/`.
//!
//! Each export has a plain Rust twin returning `spmac_core::Result` so the
//! logic can be tested natively; the wasm wrappers only convert errors.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use spmac_core::capacity::{ba_mac_rate_sum, MacOptions};
use spmac_core::experiment::channels::{eta_rate, visibility_channel, PriorPolicy};
use spmac_core::info::rate_region_two_sender;
use spmac_core::mac::protocols::n_sender_assisted_protocol;
use spmac_core::Result;

fn options() -> MacOptions {
    MacOptions { restarts: 4, upper_bound: false, ..MacOptions::default() }
}

pub fn visibility_rate(v_sagnac: f64, v_mz: f64) -> Result<f64> {
    Ok(ba_mac_rate_sum(&visibility_channel(v_sagnac, v_mz)?, &options())?.value_bits)
}

pub fn eta_points(points: usize, optimized: bool) -> Result<Vec<(f64, f64)>> {
    let policy = if optimized { PriorPolicy::Optimized } else { PriorPolicy::Fixed };
    let n = points.max(2);
    (0..n)
        .map(|i| {
            let eta = i as f64 / (n - 1) as f64;
            Ok((eta, eta_rate(eta, policy)?))
        })
        .collect()
}

#[derive(Serialize)]
pub struct Region {
    pub vertices: Vec<(f64, f64)>,
    pub rate_sum: f64,
    pub best_rate_sum: f64,
}

/// Pentagon of the two-sender assisted channel; `p1`, `p2` are each sender's P(x = 0).
pub fn assisted_region(p1: f64, p2: f64) -> Result<Region> {
    let tm = n_sender_assisted_protocol(2)?.channel()?;
    let r = rate_region_two_sender(&tm, &[vec![p1, 1.0 - p1], vec![p2, 1.0 - p2]])?;
    let best = ba_mac_rate_sum(&tm, &options())?.value_bits;
    Ok(Region { vertices: r.pentagon(), rate_sum: r.i12, best_rate_sum: best })
}

fn js(e: spmac_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Best rate sum in bits at the given Sagnac and Mach-Zehnder visibilities.
#[wasm_bindgen(js_name = visibilityRateSum)]
pub fn visibility_rate_sum_js(v_sagnac: f64, v_mz: f64) -> std::result::Result<f64, JsError> {
    visibility_rate(v_sagnac, v_mz).map_err(js)
}

/// JSON array of `[eta, bits]` pairs on an even grid over [0, 1].
#[wasm_bindgen(js_name = etaCurve)]
pub fn eta_curve_js(points: usize, optimized: bool) -> std::result::Result<String, JsError> {
    let pts = eta_points(points, optimized).map_err(js)?;
    Ok(serde_json::to_string(&pts).expect("points serialize"))
}

/// JSON `{vertices, rate_sum, best_rate_sum}` for the assisted two-sender channel.
#[wasm_bindgen(js_name = rateRegion)]
pub fn rate_region_js(p1: f64, p2: f64) -> std::result::Result<String, JsError> {
    let r = assisted_region(p1, p2).map_err(js)?;
    Ok(serde_json::to_string(&r).expect("region serializes"))
}
