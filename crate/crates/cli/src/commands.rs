//! Subcommand implementations. Each writes machine-readable files into the
//! output directory and prints a short human-readable summary.

use std::fs;

use num_complex::Complex64;
use serde::Serialize;

use stirap_core::circuit::{parse_circuit, Circuit};
use stirap_core::evolve::{propagate, EvolveReport, Schedule, SweepRow};
use stirap_core::linalg::CVector;
use stirap_core::pointer_model::{
    analytic_dark_state, build_h, site_populations, PointerModelSpec,
};
use stirap_core::spectral::{
    default_zero_tol, eigendecompose, gap_scan, uniform_s_grid, zero_space_overlap_deficit,
    CircuitFamily,
};
use stirap_core::spin_model::build_spin_h;

use crate::output::{csv_f64, csv_line, to_json, write_output};
use crate::{CmdError, FamilyArg, ModelArgs, ScheduleArg};

/// Residual tolerance for the dark-state kernel check, relative to
/// max(J, M).
const KERNEL_TOL: f64 = 1e-10;
/// Allowed leakage of the dark state outside the eigensolver zero space.
const OVERLAP_DEFICIT_TOL: f64 = 1e-9;

fn load_circuit(model: &ModelArgs) -> Result<Circuit, CmdError> {
    let path = model
        .circuit
        .as_ref()
        .ok_or_else(|| CmdError::Usage("--circuit FILE is required".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| CmdError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_circuit(&text).map_err(|e| CmdError::Usage(e.to_string()))
}

fn load_spec(model: &ModelArgs) -> Result<PointerModelSpec, CmdError> {
    let circuit = load_circuit(model)?;
    let spec = PointerModelSpec::new(circuit, model.coupling_j, model.coupling_m)?;
    if spec.weak_separation() {
        eprintln!(
            "warning: M/J = {:.2} < 5; interior suppression assumes M much larger than J",
            model.coupling_m / model.coupling_j
        );
    }
    Ok(spec)
}

fn register_origin(spec: &PointerModelSpec) -> CVector {
    let mut phi = CVector::zeros(spec.register_dim());
    phi[0] = Complex64::new(1.0, 0.0);
    phi
}

#[derive(Serialize)]
struct DarkstateOutput {
    s: f64,
    coupling_j: f64,
    coupling_m: f64,
    kernel_residual: f64,
    zero_space_dimension: usize,
    zero_space_match: bool,
    zero_space_overlap_deficit: f64,
    populations: Vec<f64>,
    /// `[re, im]` pairs in composite-index order (site · 2^N + register).
    amplitudes: Vec<[f64; 2]>,
}

pub fn darkstate(model: &ModelArgs, s: f64, zero_tol: Option<f64>) -> Result<(), CmdError> {
    let spec = load_spec(model)?;
    let phi = register_origin(&spec);
    let dark = analytic_dark_state(&spec, s, &phi)?;
    let h = build_h(&spec, s)?;

    let kernel_residual = h.apply(dark.amplitudes()).norm() / dark.norm();
    let tol = zero_tol.unwrap_or_else(|| default_zero_tol(spec.coupling_j(), spec.coupling_m()));
    let spectrum = eigendecompose(&h.dense(), tol)?;
    let deficit = zero_space_overlap_deficit(&spectrum, dark.amplitudes());
    let dim_match = spectrum.zero_space.ncols() == spec.register_dim();
    let matches = dim_match && deficit < OVERLAP_DEFICIT_TOL;

    let out = DarkstateOutput {
        s,
        coupling_j: spec.coupling_j(),
        coupling_m: spec.coupling_m(),
        kernel_residual,
        zero_space_dimension: spectrum.zero_space.ncols(),
        zero_space_match: matches,
        zero_space_overlap_deficit: deficit,
        populations: site_populations(&dark)?,
        amplitudes: dark.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
    };
    let path = write_output(&model.out, "darkstate.json", &to_json(&out), model.force)
        .map_err(CmdError::Usage)?;

    println!(
        "dark state at s = {s}: kernel residual {kernel_residual:.3e}, zero-space dim {}, \
         overlap deficit {deficit:.3e} -> {}",
        spectrum.zero_space.ncols(),
        path.display()
    );

    let kernel_tol = KERNEL_TOL * spec.coupling_j().max(spec.coupling_m());
    if kernel_residual > kernel_tol {
        return Err(CmdError::Invariant(format!(
            "kernel residual {kernel_residual:.3e} exceeds {kernel_tol:.1e}"
        )));
    }
    if !matches {
        return Err(CmdError::Invariant(format!(
            "dark state leaks out of the eigensolver zero space \
             (dimension {} vs {}, deficit {deficit:.3e})",
            spectrum.zero_space.ncols(),
            spec.register_dim()
        )));
    }
    Ok(())
}

pub fn spectrum(model: &ModelArgs, s: Option<f64>, s_grid: Option<usize>) -> Result<(), CmdError> {
    let spec = load_spec(model)?;
    let svals: Vec<f64> = match (s, s_grid) {
        (Some(_), Some(_)) => {
            return Err(CmdError::Usage("pass either --s or --s-grid, not both".into()))
        }
        (Some(x), None) => vec![x],
        (None, Some(k)) => {
            if k < 2 {
                return Err(CmdError::Usage("--s-grid needs at least 2 points".into()));
            }
            uniform_s_grid(k)
        }
        (None, None) => vec![0.5],
    };

    let tol = default_zero_tol(spec.coupling_j(), spec.coupling_m());
    let mut csv = String::from("s,index,eigenvalue\n");
    for &sv in &svals {
        let spectrum = eigendecompose(&build_h(&spec, sv)?.dense(), tol)?;
        for (index, lambda) in spectrum.eigenvalues.iter().enumerate() {
            csv.push_str(&csv_line(&[
                csv_f64(sv),
                index.to_string(),
                csv_f64(*lambda),
            ]));
        }
    }
    let path =
        write_output(&model.out, "spectrum.csv", &csv, model.force).map_err(CmdError::Usage)?;
    println!(
        "spectrum: {} s value(s), dimension {} -> {}",
        svals.len(),
        spec.dim(),
        path.display()
    );
    Ok(())
}

pub fn gapscan(
    model: &ModelArgs,
    n_list: &[usize],
    s_grid: usize,
    family: FamilyArg,
    seed: u64,
) -> Result<(), CmdError> {
    let family = match family {
        FamilyArg::Identity => CircuitFamily::Identity,
        FamilyArg::RandomRot => CircuitFamily::RandomRotations { seed },
    };
    let grid = uniform_s_grid(s_grid.max(2));
    let result = gap_scan(
        |n| family.circuit(n),
        n_list,
        model.coupling_j,
        model.coupling_m,
        &grid,
    )?;

    let mut csv = String::from("n,s,gap\n");
    for p in &result.points {
        csv.push_str(&csv_line(&[p.n.to_string(), csv_f64(p.s), csv_f64(p.gap)]));
    }
    let gaps_path =
        write_output(&model.out, "gaps.csv", &csv, model.force).map_err(CmdError::Usage)?;
    let fit_path = write_output(&model.out, "gapfit.json", &to_json(&result), model.force)
        .map_err(CmdError::Usage)?;

    println!(
        "gap scan over n = {:?}: alpha = {:.4}, prefactor = {:.4}, residual = {:.2e}",
        n_list, result.alpha, result.prefactor, result.fit_residual
    );
    println!("-> {} and {}", gaps_path.display(), fit_path.display());
    Ok(())
}

#[derive(Serialize)]
struct EvolveOutput {
    coupling_j: f64,
    coupling_m: f64,
    rows: Vec<SweepRow>,
    largest_run: EvolveReport,
}

pub fn evolve(
    model: &ModelArgs,
    t_list: &[f64],
    schedule: ScheduleArg,
    step_budget: f64,
) -> Result<(), CmdError> {
    if t_list.is_empty() {
        return Err(CmdError::Usage("--T-list must be non-empty".into()));
    }
    if t_list.windows(2).any(|p| p[1] <= p[0]) {
        return Err(CmdError::Usage("--T-list must be strictly increasing".into()));
    }
    let spec = load_spec(model)?;
    let phi = register_origin(&spec);

    let make_schedule = |t: f64| {
        let base = match schedule {
            ScheduleArg::Linear => Schedule::linear(t),
            ScheduleArg::Smoothstep => Schedule::smoothstep(t),
        };
        base.with_step_budget(step_budget)
    };

    let mut rows = Vec::with_capacity(t_list.len());
    let mut largest: Option<EvolveReport> = None;
    for &t in t_list {
        let (_, report) = propagate(&spec, &make_schedule(t), &phi)?;
        rows.push(SweepRow {
            total_time: t,
            final_fidelity: report.final_fidelity,
            max_interior_population: report.max_interior_population,
        });
        largest = Some(report);
    }
    let largest = largest.expect("at least one run");

    let mut csv = String::from("t,s");
    for site in 0..spec.counter_sites() {
        csv.push_str(&format!(",site{site}"));
    }
    csv.push_str(",fidelity_to_dark\n");
    for row in &largest.trace {
        let mut fields = vec![csv_f64(row.t), csv_f64(row.s)];
        fields.extend(row.site_populations.iter().map(|p| csv_f64(*p)));
        fields.push(csv_f64(row.fidelity_to_dark));
        csv.push_str(&csv_line(&fields));
    }

    let out = EvolveOutput {
        coupling_j: spec.coupling_j(),
        coupling_m: spec.coupling_m(),
        rows,
        largest_run: largest,
    };
    let json_path = write_output(&model.out, "evolve.json", &to_json(&out), model.force)
        .map_err(CmdError::Usage)?;
    let trace_path =
        write_output(&model.out, "trace.csv", &csv, model.force).map_err(CmdError::Usage)?;

    for row in &out.rows {
        println!(
            "T = {:>8.1}: final fidelity {:.6}, max interior population {:.3e}",
            row.total_time, row.final_fidelity, row.max_interior_population
        );
    }
    println!("-> {} and {}", json_path.display(), trace_path.display());
    Ok(())
}

pub fn compile_spin(model: &ModelArgs, s: f64) -> Result<(), CmdError> {
    let spec = load_spec(model)?;
    let sum = build_spin_h(&spec, s)?;
    let path = write_output(&model.out, "couplings.json", &to_json(&sum.terms), model.force)
        .map_err(CmdError::Usage)?;
    println!(
        "spin compilation at s = {s}: {} Pauli terms over {} counter spins and {} register \
         qubit(s) -> {}",
        sum.terms.len(),
        sum.counter_spins,
        sum.register_qubits,
        path.display()
    );
    Ok(())
}
