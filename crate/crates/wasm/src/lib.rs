//! Browser bindings for the pointer-chain simulator. Three interactive
//! operations, each taking circuit DSL text plus couplings and returning a
//! JSON payload for the static demo page in `www/`:
//!
//! - [`dark_state_json`]: site populations and kernel residual at one `s`;
//! - [`gap_curve_json`]: the spectral gap across an `s` grid;
//! - [`sweep_json`]: population and dark-state-fidelity traces of one
//!   adiabatic sweep.
//!
//! The same functions compile and run natively, which is how they are
//! unit-tested.

use num_complex::Complex64;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use stirap_core::circuit::parse_circuit;
use stirap_core::evolve::{propagate, Schedule, TraceRow};
use stirap_core::linalg::CVector;
use stirap_core::pointer_model::{analytic_dark_state, build_h, site_populations, PointerModelSpec};
use stirap_core::spectral::{gap_at, uniform_s_grid};

/// Keep interactive calls responsive: composite dimension cap for the demo.
const DEMO_DIM_CAP: usize = 256;
/// Longest sweep the demo will integrate (units of 1/J).
const DEMO_MAX_TIME: f64 = 500.0;

fn demo_spec(circuit_text: &str, coupling_j: f64, coupling_m: f64) -> Result<PointerModelSpec, String> {
    let circuit = parse_circuit(circuit_text).map_err(|e| e.to_string())?;
    let spec =
        PointerModelSpec::new(circuit, coupling_j, coupling_m).map_err(|e| e.to_string())?;
    if spec.dim() > DEMO_DIM_CAP {
        return Err(format!(
            "demo is capped at composite dimension {DEMO_DIM_CAP} (got {})",
            spec.dim()
        ));
    }
    Ok(spec)
}

fn origin(spec: &PointerModelSpec) -> CVector {
    let mut phi = CVector::zeros(spec.register_dim());
    phi[0] = Complex64::new(1.0, 0.0);
    phi
}

#[derive(Serialize)]
struct DarkStatePayload {
    s: f64,
    n_gates: usize,
    counter_sites: usize,
    kernel_residual: f64,
    populations: Vec<f64>,
}

/// Closed-form dark state at `s`: per-site populations plus the kernel
/// residual `‖H·v‖/‖v‖`.
#[wasm_bindgen]
pub fn dark_state_json(
    circuit_text: &str,
    coupling_j: f64,
    coupling_m: f64,
    s: f64,
) -> Result<String, String> {
    let spec = demo_spec(circuit_text, coupling_j, coupling_m)?;
    let phi = origin(&spec);
    let dark = analytic_dark_state(&spec, s, &phi).map_err(|e| e.to_string())?;
    let h = build_h(&spec, s).map_err(|e| e.to_string())?;
    let payload = DarkStatePayload {
        s,
        n_gates: spec.n_gates(),
        counter_sites: spec.counter_sites(),
        kernel_residual: h.apply(dark.amplitudes()).norm() / dark.norm(),
        populations: site_populations(&dark).map_err(|e| e.to_string())?,
    };
    serde_json::to_string(&payload).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct GapPointPayload {
    s: f64,
    gap: f64,
}

#[derive(Serialize)]
struct GapCurvePayload {
    n_gates: usize,
    min_gap: f64,
    argmin_s: f64,
    points: Vec<GapPointPayload>,
}

/// Spectral gap of `H(s)` over a uniform `s` grid.
#[wasm_bindgen]
pub fn gap_curve_json(
    circuit_text: &str,
    coupling_j: f64,
    coupling_m: f64,
    grid_points: usize,
) -> Result<String, String> {
    let spec = demo_spec(circuit_text, coupling_j, coupling_m)?;
    let grid = uniform_s_grid(grid_points.clamp(2, 401));
    let mut points = Vec::with_capacity(grid.len());
    let mut min_gap = f64::INFINITY;
    let mut argmin_s = grid[0];
    for &s in &grid {
        let gap = gap_at(&spec, s, None).map_err(|e| e.to_string())?;
        if gap < min_gap {
            min_gap = gap;
            argmin_s = s;
        }
        points.push(GapPointPayload { s, gap });
    }
    let payload = GapCurvePayload {
        n_gates: spec.n_gates(),
        min_gap,
        argmin_s,
        points,
    };
    serde_json::to_string(&payload).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct SweepPayload {
    total_time: f64,
    final_fidelity: f64,
    norm_drift: f64,
    max_interior_population: f64,
    counter_sites: usize,
    trace: Vec<TraceRow>,
}

/// Integrate one linear-schedule sweep and return the sampled trace.
#[wasm_bindgen]
pub fn sweep_json(
    circuit_text: &str,
    coupling_j: f64,
    coupling_m: f64,
    total_time: f64,
) -> Result<String, String> {
    if total_time <= 0.0 || total_time > DEMO_MAX_TIME || total_time.is_nan() {
        return Err(format!("total time must be in (0, {DEMO_MAX_TIME}]"));
    }
    let spec = demo_spec(circuit_text, coupling_j, coupling_m)?;
    let phi = origin(&spec);
    let (_, report) =
        propagate(&spec, &Schedule::linear(total_time), &phi).map_err(|e| e.to_string())?;
    let payload = SweepPayload {
        total_time,
        final_fidelity: report.final_fidelity,
        norm_drift: report.norm_drift,
        max_interior_population: report.max_interior_population,
        counter_sites: spec.counter_sites(),
        trace: report.trace,
    };
    serde_json::to_string(&payload).map_err(|e| e.to_string())
}
