//! wasm-bindgen exports for the browser demo in `www/`.

mod ops;

pub use ops::{compare_estimators, geodesic_paths, risk_curves};

use wasm_bindgen::prelude::*;

fn js(e: codashrink::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = geodesicPaths)]
pub fn geodesic_paths_js(tau: &[f64], q: &[f64], steps: u32) -> Result<Vec<f64>, JsError> {
    geodesic_paths(tau, q, steps).map_err(js)
}

#[wasm_bindgen(js_name = riskCurves)]
pub fn risk_curves_js(counts: &[u32], tau: &[f64], steps: u32) -> Result<Vec<f64>, JsError> {
    risk_curves(counts, tau, steps).map_err(js)
}

#[wasm_bindgen(js_name = compareEstimators)]
pub fn compare_estimators_js(counts: &[u32], tau: &[f64]) -> Result<Vec<f64>, JsError> {
    compare_estimators(counts, tau).map_err(js)
}
