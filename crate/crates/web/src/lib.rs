//! Browser bindings for three demo operations: a density curve, the
//! first-passage kernel h_x(t), and a Monte Carlo argmax histogram.
//!
//! The `*_values` functions hold the logic and are plain Rust so they can
//! be tested natively; the exported wrappers only convert errors.

use chernoff::chernoff::{self as ch, Solver, TableKind};
use chernoff::mcsim::{self, Histogram, McConfig};
use wasm_bindgen::prelude::*;

/// Largest number of grid points or paths a single call will accept, to
/// keep the page responsive.
pub const MAX_POINTS: usize = 2001;
pub const MAX_PATHS: usize = 200_000;

fn linspace(from: f64, to: f64, n: usize) -> Result<Vec<f64>, String> {
    if !(from.is_finite() && to.is_finite() && to > from) || !(2..=MAX_POINTS).contains(&n) {
        return Err(format!("need from < to and 2 <= n <= {MAX_POINTS}"));
    }
    let h = (to - from) / (n - 1) as f64;
    Ok((0..n).map(|i| from + h * i as f64).collect())
}

/// Density values on `n` equally spaced points of [from, to].
/// `which` is "chernoff" (f_Z), "max" (two-sided maximum) or "phi".
pub fn density_values(which: &str, from: f64, to: f64, n: usize) -> Result<Vec<f64>, String> {
    let kind = match which {
        "chernoff" => TableKind::Argmax,
        "max" => TableKind::JointMarginal,
        "phi" => TableKind::Phi,
        other => return Err(format!("unknown density '{other}'")),
    };
    let grid = linspace(from, to, n)?;
    let table = Solver::default().tabulate(kind, &grid).map_err(|e| e.to_string())?;
    if let Some(&i) = table.failed.first() {
        return Err(format!("evaluation failed at {}", table.grid[i]));
    }
    Ok(table.values)
}

/// h_x(t) on `n` equally spaced points of (0, t_max]; x must be negative.
pub fn h_values(x: f64, t_max: f64, n: usize) -> Result<Vec<f64>, String> {
    if !(x < 0.0) {
        return Err("x must be negative".into());
    }
    let grid = linspace(0.0, t_max, n + 1)?;
    grid[1..].iter().map(|&t| ch::h_density(x, t).map(|e| e.value).map_err(|e| e.to_string())).collect()
}

/// Histogram density of the simulated argmax on `n_bins` bins of width
/// `width` covering [-n_bins*width/2, n_bins*width/2).
pub fn argmax_histogram_values(n_paths: usize, seed: u64, width: f64, n_bins: usize) -> Result<Vec<f64>, String> {
    if n_paths == 0 || n_paths > MAX_PATHS {
        return Err(format!("need 1 <= paths <= {MAX_PATHS}"));
    }
    if !(width > 0.0) || n_bins == 0 || n_bins > MAX_POINTS {
        return Err("bad binning".into());
    }
    let cfg = McConfig { n_paths, dt: 2e-3, t_max: 3.0, seed, bridge_correction: true };
    let paths = mcsim::simulate_two_sided(&cfg).map_err(|e| e.to_string())?;
    // Histogram covers [0, n_bins*width); shift so the window is centred on 0
    let half = 0.5 * n_bins as f64 * width;
    let mut h = Histogram::new(width, n_bins);
    for p in &paths {
        let v = p.argmax + half;
        h.add(Some(v));
    }
    Ok(h.densities())
}

#[wasm_bindgen]
pub fn density_curve(which: &str, from: f64, to: f64, n: usize) -> Result<Vec<f64>, JsError> {
    density_values(which, from, to, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn h_curve(x: f64, t_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    h_values(x, t_max, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn argmax_histogram(n_paths: usize, seed: u64, width: f64, n_bins: usize) -> Result<Vec<f64>, JsError> {
    argmax_histogram_values(n_paths, seed, width, n_bins).map_err(|e| JsError::new(&e))
}
