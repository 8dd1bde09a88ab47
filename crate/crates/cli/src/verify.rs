//! `stirap verify`: run every module invariant at small sizes, print a
//! summary table, and write the gate-table audit artifact. The exit code is
//! the number of failed groups.

use std::fs;

use num_complex::Complex64;

use stirap_core::circuit::{
    circuit_product, gate_hermitian_parts, parse_circuit, serialize_circuit, Circuit, Gate,
};
use stirap_core::evolve::{adiabaticity_sweep, propagate, Schedule};
use stirap_core::linalg::{hermiticity_defect, max_abs, max_abs_diff, unitarity_defect, CVector};
use stirap_core::pointer_model::{
    analytic_dark_state, build_h, site_populations, PointerModelSpec,
};
use stirap_core::spectral::{
    default_zero_tol, eigendecompose, gap_at, zero_space_overlap_deficit, CircuitFamily,
};
use stirap_core::spin_model::{
    build_spin_h, excitation_defect, gate_table_audit, restrict_to_single_excitation,
};

use crate::output::{to_json, write_output};
use crate::{CmdError, ModelArgs};

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        match $cond {
            true => {}
            false => return Err(format!($($arg)*)),
        }
    };
}

fn basis(dim: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[k] = Complex64::new(1.0, 0.0);
    v
}

fn gate_set() -> Vec<Gate> {
    vec![
        Gate::hadamard(0),
        Gate::pi_over_8(0),
        Gate::rotation([1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0], 1.9, 0),
        Gate::cnot(0, 1),
    ]
}

fn circuit_group() -> Result<usize, String> {
    let mut checks = 0;

    for gate in gate_set() {
        let u = gate.local_unitary();
        let parts = gate_hermitian_parts(&u).map_err(|e| e.to_string())?;
        ensure!(
            hermiticity_defect(&parts.symmetric) <= 1e-12
                && hermiticity_defect(&parts.antisymmetric) <= 1e-12,
            "Hermitian parts not Hermitian"
        );
        let rebuilt = &parts.symmetric + parts.antisymmetric.map(|z| z * Complex64::new(0.0, -1.0));
        ensure!(
            max_abs_diff(&rebuilt, &u) <= 1e-12,
            "U != Hs - i Ha for {:?}",
            gate.kind
        );
        checks += 2;
    }

    // Ha vanishes exactly for the Hermitian gates, and only for them
    for gate in [Gate::hadamard(0), Gate::cnot(0, 1)] {
        let parts = gate_hermitian_parts(&gate.local_unitary()).map_err(|e| e.to_string())?;
        ensure!(max_abs(&parts.antisymmetric) <= 1e-14, "Ha must vanish");
        checks += 1;
    }
    let parts =
        gate_hermitian_parts(&Gate::pi_over_8(0).local_unitary()).map_err(|e| e.to_string())?;
    ensure!(max_abs(&parts.antisymmetric) > 0.5, "Ha(T) must not vanish");
    checks += 1;

    let circ = Circuit::new(2, gate_set()).map_err(|e| e.to_string())?;
    let u = circuit_product(&circ).map_err(|e| e.to_string())?;
    ensure!(
        unitarity_defect(&u) <= circ.n_gates() as f64 * 1e-12,
        "circuit product must stay unitary"
    );
    checks += 1;

    let text = serialize_circuit(&circ);
    let back = parse_circuit(&text).map_err(|e| e.to_string())?;
    ensure!(back == circ, "DSL round trip must be the identity");
    checks += 1;

    Ok(checks)
}

fn pointer_group() -> Result<usize, String> {
    let mut checks = 0;
    let circ = Circuit::new(1, vec![Gate::hadamard(0), Gate::pi_over_8(0)]).unwrap();
    let spec = PointerModelSpec::new(circ, 1.0, 10.0).map_err(|e| e.to_string())?;

    let h0 = build_h(&spec, 0.0).map_err(|e| e.to_string())?.dense();
    let h1 = build_h(&spec, 1.0).map_err(|e| e.to_string())?.dense();
    for s in [0.0, 0.31, 0.5, 0.77, 1.0] {
        let h = build_h(&spec, s).map_err(|e| e.to_string())?;
        let dense = h.dense();
        ensure!(hermiticity_defect(&dense) <= 1e-12, "H(s) must be Hermitian");

        let interp = &h0 + (&h1 - &h0).map(|z| z * s);
        ensure!(
            max_abs_diff(&dense, &interp) <= 1e-13,
            "H(s) must be affine in s"
        );

        for k in 0..spec.register_dim() {
            let dark = analytic_dark_state(&spec, s, &basis(spec.register_dim(), k))
                .map_err(|e| e.to_string())?;
            let resid = h.apply(dark.amplitudes()).norm() / dark.norm();
            ensure!(
                resid < 1e-10 * 10.0,
                "dark state kernel residual {resid:.3e} at s={s}"
            );
        }
        checks += 3;
    }

    // interior population drops 4x when M doubles
    let interior = |m: f64| -> Result<f64, String> {
        let family = CircuitFamily::Identity;
        let spec = PointerModelSpec::new(family.circuit(4).unwrap(), 1.0, m)
            .map_err(|e| e.to_string())?;
        let dark =
            analytic_dark_state(&spec, 0.5, &basis(2, 0)).map_err(|e| e.to_string())?;
        let pops = site_populations(&dark).map_err(|e| e.to_string())?;
        Ok(pops[1..=5].iter().sum())
    };
    let ratio = interior(10.0)? / interior(20.0)?;
    ensure!(
        (ratio / 4.0 - 1.0).abs() < 0.01,
        "interior population must scale as (J/M)^2, ratio {ratio}"
    );
    checks += 1;

    Ok(checks)
}

fn spin_group() -> Result<usize, String> {
    let mut checks = 0;
    let cases: Vec<(Vec<Gate>, usize)> = vec![
        (vec![Gate::hadamard(0), Gate::pi_over_8(0)], 1),
        (vec![Gate::cnot(0, 1), Gate::hadamard(1)], 2),
    ];
    for (gates, width) in cases {
        let spec = PointerModelSpec::new(Circuit::new(width, gates).unwrap(), 1.0, 10.0)
            .map_err(|e| e.to_string())?;
        for s in [0.0, 0.3, 0.7, 1.0] {
            let sum = build_spin_h(&spec, s).map_err(|e| e.to_string())?;
            for term in &sum.terms {
                ensure!(term.sites.len() <= 4, "terms must touch at most four spins");
            }
            let dense = sum.dense().map_err(|e| e.to_string())?;
            ensure!(
                hermiticity_defect(&dense) <= 1e-12,
                "spin Hamiltonian must be Hermitian"
            );
            let defect = excitation_defect(&sum).map_err(|e| e.to_string())?;
            ensure!(defect <= 1e-12 * 10.0, "counter magnetization defect {defect:.3e}");
            let restricted = restrict_to_single_excitation(&dense, spec.n_gates(), width)
                .map_err(|e| e.to_string())?;
            let pointer = build_h(&spec, s).map_err(|e| e.to_string())?.dense();
            let dev = max_abs_diff(&restricted, &pointer);
            ensure!(dev <= 1e-12, "sector equivalence deviation {dev:.3e} at s={s}");
            checks += 4;
        }
    }

    let report = gate_table_audit();
    let matched: Vec<bool> = report.rows.iter().map(|r| r.matched).collect();
    ensure!(
        matched == [true, true, false, false, true, true, false, true],
        "audit match pattern changed: {matched:?}"
    );
    let cnot = report
        .rows
        .iter()
        .find(|r| r.id == "cnot_symmetric")
        .expect("cnot row");
    ensure!(
        cnot.halved_reference_deviation.unwrap_or(1.0) <= 1e-12,
        "halved CNOT reference must match exactly"
    );
    checks += 2;
    Ok(checks)
}

fn spectral_group(seed: u64) -> Result<usize, String> {
    let mut checks = 0;
    let identity = CircuitFamily::Identity;

    let spec = PointerModelSpec::new(identity.circuit(2).unwrap(), 1.0, 10.0).unwrap();
    let gap = gap_at(&spec, 0.5, None).map_err(|e| e.to_string())?;
    ensure!((gap - 0.5).abs() < 1e-9, "frozen gap 0.5, got {gap}");
    checks += 1;

    let spec2 = PointerModelSpec::new(identity.circuit(2).unwrap(), 2.0, 10.0).unwrap();
    let gap2 = gap_at(&spec2, 0.5, None).map_err(|e| e.to_string())?;
    ensure!((gap2 - 1.0).abs() < 1e-9, "frozen gap 1.0 at J=2, got {gap2}");
    checks += 1;

    let circ = Circuit::new(2, vec![Gate::hadamard(0), Gate::cnot(0, 1)]).unwrap();
    let spec = PointerModelSpec::new(circ, 1.0, 10.0).unwrap();
    for s in [0.1, 0.5, 0.9] {
        let h = build_h(&spec, s).map_err(|e| e.to_string())?.dense();
        let spectrum =
            eigendecompose(&h, default_zero_tol(1.0, 10.0)).map_err(|e| e.to_string())?;
        ensure!(
            spectrum.zero_space.ncols() == spec.register_dim(),
            "zero space must have dimension 2^N"
        );
        let vals = &spectrum.eigenvalues;
        for k in 0..vals.len() {
            ensure!(
                (vals[k] + vals[vals.len() - 1 - k]).abs() < 1e-9,
                "spectrum must be symmetric about zero"
            );
        }
        let dark = analytic_dark_state(&spec, s, &basis(4, 1)).map_err(|e| e.to_string())?;
        let deficit = zero_space_overlap_deficit(&spectrum, dark.amplitudes());
        ensure!(deficit < 1e-9, "dark state must live in the zero space");
        checks += 3;
    }

    let random = CircuitFamily::RandomRotations { seed };
    for n in [2usize, 4] {
        let a = PointerModelSpec::new(identity.circuit(n).unwrap(), 1.0, 10.0).unwrap();
        let b = PointerModelSpec::new(random.circuit(n).unwrap(), 1.0, 10.0).unwrap();
        for s in [0.25, 0.5] {
            let ga = gap_at(&a, s, None).map_err(|e| e.to_string())?;
            let gb = gap_at(&b, s, None).map_err(|e| e.to_string())?;
            ensure!((ga - gb).abs() < 1e-9, "gap must be gate-independent");
            checks += 1;
        }
    }
    Ok(checks)
}

fn evolve_group() -> Result<usize, String> {
    let mut checks = 0;
    let circ = Circuit::new(
        1,
        vec![
            Gate::hadamard(0),
            Gate::pi_over_8(0),
            Gate::hadamard(0),
            Gate::pi_over_8(0),
        ],
    )
    .unwrap();
    let spec = PointerModelSpec::new(circ, 1.0, 10.0).unwrap();
    let phi = basis(2, 0);

    let (_, quench) =
        propagate(&spec, &Schedule::linear(1e-9), &phi).map_err(|e| e.to_string())?;
    ensure!(quench.final_fidelity < 1e-6, "quench must not transfer population");
    checks += 1;

    let rows = adiabaticity_sweep(&spec, &[5.0, 20.0, 80.0], &phi).map_err(|e| e.to_string())?;
    for pair in rows.windows(2) {
        ensure!(
            pair[1].final_fidelity >= pair[0].final_fidelity - 0.02,
            "fidelity must be non-decreasing within slack"
        );
    }
    ensure!(
        rows.last().unwrap().final_fidelity > 0.9,
        "slow sweep must transfer population"
    );
    checks += 2;

    let (_, slow) = propagate(&spec, &Schedule::linear(80.0), &phi).map_err(|e| e.to_string())?;
    ensure!(slow.norm_drift <= 1e-9, "norm drift {:.3e}", slow.norm_drift);
    checks += 1;

    let fid = |budget: f64| -> Result<f64, String> {
        Ok(
            propagate(&spec, &Schedule::linear(20.0).with_step_budget(budget), &phi)
                .map_err(|e| e.to_string())?
                .1
                .final_fidelity,
        )
    };
    let (f1, f2, f3) = (fid(0.4)?, fid(0.2)?, fid(0.1)?);
    let ratio = (f1 - f2) / (f2 - f3);
    ensure!(
        (3.0..=5.0).contains(&ratio),
        "dt-halving error ratio {ratio} outside [3, 5]"
    );
    checks += 1;
    Ok(checks)
}

fn user_circuit_group(model: &ModelArgs) -> Result<usize, String> {
    let path = model.circuit.as_ref().expect("caller checks presence");
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let circ = parse_circuit(&text).map_err(|e| e.to_string())?;
    let mut checks = 1;

    let back = parse_circuit(&serialize_circuit(&circ)).map_err(|e| e.to_string())?;
    ensure!(back == circ, "user circuit must round-trip through the DSL");
    checks += 1;

    let width = circ.register_width();
    let spec = PointerModelSpec::new(circ, model.coupling_j, model.coupling_m)
        .map_err(|e| e.to_string())?;
    let scale = model.coupling_j.max(model.coupling_m);
    for s in [0.0, 0.5, 1.0] {
        let h = build_h(&spec, s).map_err(|e| e.to_string())?;
        for k in 0..spec.register_dim() {
            let dark = analytic_dark_state(&spec, s, &basis(spec.register_dim(), k))
                .map_err(|e| e.to_string())?;
            let resid = h.apply(dark.amplitudes()).norm() / dark.norm();
            ensure!(resid < 1e-10 * scale, "kernel residual {resid:.3e} at s={s}");
        }
        checks += 1;
    }

    let h = build_h(&spec, 0.5).map_err(|e| e.to_string())?.dense();
    let spectrum = eigendecompose(&h, default_zero_tol(model.coupling_j, model.coupling_m))
        .map_err(|e| e.to_string())?;
    ensure!(
        spectrum.zero_space.ncols() == spec.register_dim(),
        "zero-space dimension mismatch"
    );
    checks += 1;

    if spec.counter_sites() + width <= 12 {
        let sum = build_spin_h(&spec, 0.5).map_err(|e| e.to_string())?;
        let dense = sum.dense().map_err(|e| e.to_string())?;
        let restricted = restrict_to_single_excitation(&dense, spec.n_gates(), width)
            .map_err(|e| e.to_string())?;
        let pointer = build_h(&spec, 0.5).map_err(|e| e.to_string())?.dense();
        ensure!(
            max_abs_diff(&restricted, &pointer) <= 1e-12,
            "sector equivalence failed for user circuit"
        );
        checks += 1;
    }
    Ok(checks)
}

pub fn run(model: &ModelArgs, seed: u64) -> Result<(), CmdError> {
    let mut groups: Vec<(&str, Result<usize, String>)> = vec![
        ("circuit", circuit_group()),
        ("pointer_model", pointer_group()),
        ("spin_model", spin_group()),
        ("spectral", spectral_group(seed)),
        ("evolve", evolve_group()),
    ];
    if model.circuit.is_some() {
        groups.push(("user_circuit", user_circuit_group(model)));
    }

    let audit = gate_table_audit();
    let audit_path = write_output(
        &model.out,
        "gate_table_audit.json",
        &to_json(&audit),
        model.force,
    )
    .map_err(CmdError::Usage)?;

    println!("{:<14} {:>7}  result", "group", "checks");
    let mut failed = 0usize;
    for (name, outcome) in &groups {
        match outcome {
            Ok(checks) => println!("{name:<14} {checks:>7}  pass"),
            Err(msg) => {
                failed += 1;
                println!("{name:<14} {:>7}  FAIL: {msg}", "-");
            }
        }
    }
    println!("audit table -> {}", audit_path.display());

    if failed == 0 {
        Ok(())
    } else {
        Err(CmdError::Failures(failed))
    }
}
