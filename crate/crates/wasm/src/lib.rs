//! Browser bindings for the demo page in `www/`.
//!
//! Each export has a plain Rust twin (`*_impl`) so the numerics can be tested
//! natively; the exported wrappers only convert errors to strings.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::Serialize;
use traceineq::catalog::{evaluate, lookup, spec_for, vector::scalar_curve, witness_from_sample};
use traceineq::ensembles::{sample, EnsembleKind, EnsembleSpec};
use traceineq::linalg::PsdMatrix;
use traceineq::rearrange::layer_cake;
use wasm_bindgen::prelude::*;

fn parse_kind(kind: &str) -> Result<EnsembleKind, String> {
    serde_json::from_value(serde_json::Value::String(kind.to_string()))
        .map_err(|_| format!("unknown ensemble kind `{kind}`"))
}

/// `c(t)` on `n` equally spaced points of `[-1, 1]`.
pub fn scalar_curve_impl(a: f64, b: f64, p: f64, n: usize) -> Result<Vec<f64>, String> {
    if n < 2 {
        return Err("need at least 2 points".into());
    }
    (0..n)
        .map(|i| {
            let t = (-1.0 + 2.0 * i as f64 / (n - 1) as f64).clamp(-1.0, 1.0);
            scalar_curve(a, b, p, t).map_err(|e| e.to_string())
        })
        .collect()
}

/// Relative slack of `id` at `n` values of `p` in `[p_min, p_max]`, on one seeded sample.
pub fn slack_vs_p_impl(
    id: &str,
    kind: &str,
    dim: usize,
    seed: u64,
    p_min: f64,
    p_max: f64,
    n: usize,
) -> Result<Vec<f64>, String> {
    let entry = lookup(id).map_err(|e| e.to_string())?;
    if entry.param_names() != ["p"] {
        return Err(format!("{id} is not a p-family"));
    }
    if n < 2 || !(p_min < p_max) {
        return Err("need n >= 2 and p_min < p_max".into());
    }
    let spec = spec_for(&entry, parse_kind(kind)?, dim, seed).map_err(|e| e.to_string())?;
    let drawn = sample(&spec).map_err(|e| e.to_string())?;
    let witness = witness_from_sample(&entry, &drawn).map_err(|e| e.to_string())?;
    (0..n)
        .map(|i| {
            let p = p_min + (p_max - p_min) * i as f64 / (n - 1) as f64;
            let params = [("p".to_string(), p)].into_iter().collect();
            evaluate(id, &witness, &params)
                .map(|r| r.relative_slack)
                .map_err(|e| e.to_string())
        })
        .collect()
}

#[derive(Serialize)]
struct CakeView {
    eigenvalues: Vec<f64>,
    coefficients: Vec<f64>,
    reconstruction_error: f64,
}

/// Layer-cake coefficients of a seeded PSD matrix, as JSON.
pub fn layer_cake_impl(dim: usize, seed: u64) -> Result<String, String> {
    let spec = EnsembleSpec::new(EnsembleKind::Psd, dim, seed);
    let m = sample(&spec).map_err(|e| e.to_string())?.matrices.remove(0);
    let c = PsdMatrix::new(m.clone()).map_err(|e| e.to_string())?;
    let cake = layer_cake(&c);
    let view = CakeView {
        eigenvalues: c.eigenvalues().to_vec(),
        coefficients: cake.coefficients.clone(),
        reconstruction_error: (&cake.reconstruct() - &m).frobenius_norm(),
    };
    Ok(serde_json::to_string(&view).expect("view serializes"))
}

#[wasm_bindgen]
pub fn curve(a: f64, b: f64, p: f64, n: usize) -> Result<Vec<f64>, String> {
    scalar_curve_impl(a, b, p, n)
}

#[wasm_bindgen]
pub fn slack_vs_p(
    id: &str,
    kind: &str,
    dim: usize,
    seed: u64,
    p_min: f64,
    p_max: f64,
    n: usize,
) -> Result<Vec<f64>, String> {
    slack_vs_p_impl(id, kind, dim, seed, p_min, p_max, n)
}

#[wasm_bindgen]
pub fn cake(dim: usize, seed: u64) -> Result<String, String> {
    layer_cake_impl(dim, seed)
}
