//! Quantum gates, circuits, and the circuit DSL.
//!
//! A [`Circuit`] is an ordered list of gates `U_1 … U_n` on an `N`-qubit
//! register; gate `i` is wired to counter bond `(i, i+1)` by the pointer
//! model. Each gate also decomposes into a pair of Hermitian operators
//! (`U = H^s - i H^a`), which is what the spin realization consumes.
//!
//! Register indexing is little-endian: qubit 0 is the least-significant
//! bit of the register basis index. Multi-qubit gate matrices are indexed
//! the same way over their own targets: bit `k` of the local index is the
//! `k`-th listed target.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect, identity, unitarity_defect, CMatrix};

/// Tolerance for unitarity, Hermiticity, and unit-axis checks.
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Hadamard,
    /// The π/8 gate, `diag(1, e^{iπ/4})`.
    PiOver8,
    /// Rotation by `angle` about the unit axis, `exp(-i·angle/2·n̂·σ̂)`.
    Rotation { axis: [f64; 3], angle: f64 },
    /// Controlled-NOT; `targets[0]` is the control, `targets[1]` the target.
    Cnot,
    /// Explicit unitary on one or two qubits.
    Custom { matrix: CMatrix },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl Gate {
    pub fn hadamard(target: usize) -> Self {
        Gate {
            kind: GateKind::Hadamard,
            targets: vec![target],
        }
    }

    pub fn pi_over_8(target: usize) -> Self {
        Gate {
            kind: GateKind::PiOver8,
            targets: vec![target],
        }
    }

    pub fn rotation(axis: [f64; 3], angle: f64, target: usize) -> Self {
        Gate {
            kind: GateKind::Rotation { axis, angle },
            targets: vec![target],
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate {
            kind: GateKind::Cnot,
            targets: vec![control, target],
        }
    }

    pub fn custom(matrix: CMatrix, targets: Vec<usize>) -> Self {
        Gate {
            kind: GateKind::Custom { matrix },
            targets,
        }
    }

    /// Zero-angle rotation; acts as the identity on its target.
    pub fn identity_gate(target: usize) -> Self {
        Gate::rotation([0.0, 0.0, 1.0], 0.0, target)
    }

    /// Number of qubits the gate acts on.
    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    /// Check target arity and range, axis normalization, and custom-matrix
    /// unitarity.
    pub fn validate(&self, register_width: usize) -> Result<()> {
        let arity_ok = match &self.kind {
            GateKind::Hadamard | GateKind::PiOver8 | GateKind::Rotation { .. } => {
                self.targets.len() == 1
            }
            GateKind::Cnot => self.targets.len() == 2,
            GateKind::Custom { matrix } => {
                let k = self.targets.len();
                (k == 1 || k == 2) && matrix.nrows() == (1 << k) && matrix.ncols() == (1 << k)
            }
        };
        if !arity_ok {
            return Err(Error::InvalidGate(format!(
                "{} expects a different target count than {}",
                self.name(),
                self.targets.len()
            )));
        }
        for &t in &self.targets {
            if t >= register_width {
                return Err(Error::InvalidGate(format!(
                    "qubit index {t} out of range for {register_width}-qubit register"
                )));
            }
        }
        if self.targets.len() == 2 && self.targets[0] == self.targets[1] {
            return Err(Error::InvalidGate(
                "target indices must be distinct".into(),
            ));
        }
        match &self.kind {
            GateKind::Rotation { axis, angle } => {
                if !angle.is_finite() || axis.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidGate("rotation parameters not finite".into()));
                }
                let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
                if (norm - 1.0).abs() > UNITARY_TOL || norm.is_nan() {
                    return Err(Error::InvalidGate(format!(
                        "rotation axis must have unit norm (got {norm})"
                    )));
                }
            }
            GateKind::Custom { matrix } => {
                let defect = unitarity_defect(matrix);
                if defect > UNITARY_TOL || defect.is_nan() {
                    return Err(Error::NotUnitary(defect));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// The gate's unitary on its own target space (dimension `2^arity`),
    /// indexed little-endian over the listed targets.
    pub fn local_unitary(&self) -> CMatrix {
        match &self.kind {
            GateKind::Hadamard => {
                let h = FRAC_1_SQRT_2;
                CMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        Complex64::new(h, 0.0),
                        Complex64::new(h, 0.0),
                        Complex64::new(h, 0.0),
                        Complex64::new(-h, 0.0),
                    ],
                )
            }
            GateKind::PiOver8 => {
                let mut m = identity(2);
                m[(1, 1)] = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
                m
            }
            GateKind::Rotation { axis, angle } => {
                let c = (angle / 2.0).cos();
                let s = (angle / 2.0).sin();
                let [nx, ny, nz] = *axis;
                // cos(θ/2) I - i sin(θ/2) (n_x X + n_y Y + n_z Z)
                CMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        Complex64::new(c, -s * nz),
                        Complex64::new(-s * ny, -s * nx),
                        Complex64::new(s * ny, -s * nx),
                        Complex64::new(c, s * nz),
                    ],
                )
            }
            GateKind::Cnot => {
                // Control is local bit 0: basis states 1 and 3 swap.
                let mut m = CMatrix::zeros(4, 4);
                m[(0, 0)] = Complex64::new(1.0, 0.0);
                m[(3, 1)] = Complex64::new(1.0, 0.0);
                m[(2, 2)] = Complex64::new(1.0, 0.0);
                m[(1, 3)] = Complex64::new(1.0, 0.0);
                m
            }
            GateKind::Custom { matrix } => matrix.clone(),
        }
    }

    fn name(&self) -> &'static str {
        match self.kind {
            GateKind::Hadamard => "h",
            GateKind::PiOver8 => "t",
            GateKind::Rotation { .. } => "rot",
            GateKind::Cnot => "cnot",
            GateKind::Custom { .. } => "custom",
        }
    }
}

/// An ordered gate list on an `N`-qubit register. Gate `i` (1-based) is
/// `U_i`; products apply gate 1 first.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    register_width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    /// Build and validate. The gate count must be even (the pointer chain
    /// supports a zero mode only for an odd site count) and at least 2.
    pub fn new(register_width: usize, gates: Vec<Gate>) -> Result<Self> {
        if register_width == 0 {
            return Err(Error::InvalidCircuit(
                "register needs at least one qubit".into(),
            ));
        }
        if !gates.len().is_multiple_of(2) {
            return Err(Error::OddGateCount(gates.len()));
        }
        if gates.len() < 2 {
            return Err(Error::InvalidCircuit(
                "circuit needs at least two gates".into(),
            ));
        }
        for gate in &gates {
            gate.validate(register_width)?;
        }
        Ok(Circuit {
            register_width,
            gates,
        })
    }

    pub fn register_width(&self) -> usize {
        self.register_width
    }

    pub fn register_dim(&self) -> usize {
        1 << self.register_width
    }

    /// Number of gates, `n`.
    pub fn n_gates(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }
}

/// Embed a gate into the full `2^N` register space: the gate on its
/// targets, identity elsewhere.
pub fn gate_unitary(gate: &Gate, register_width: usize) -> Result<CMatrix> {
    gate.validate(register_width)?;
    let local = gate.local_unitary();
    let k = gate.targets.len();
    let full_dim = 1usize << register_width;
    let mut out = CMatrix::zeros(full_dim, full_dim);
    for col in 0..full_dim {
        let mut local_col = 0usize;
        let mut base = col;
        for (j, &t) in gate.targets.iter().enumerate() {
            local_col |= ((col >> t) & 1) << j;
            base &= !(1usize << t);
        }
        for local_row in 0..(1usize << k) {
            let mut row = base;
            for (j, &t) in gate.targets.iter().enumerate() {
                row |= ((local_row >> j) & 1) << t;
            }
            out[(row, col)] = local[(local_row, local_col)];
        }
    }
    Ok(out)
}

/// Full-register product `U_n ··· U_2 · U_1` (gate 1 applied first).
pub fn circuit_product(circuit: &Circuit) -> Result<CMatrix> {
    let mut acc = identity(circuit.register_dim());
    for gate in circuit.gates() {
        acc = gate_unitary(gate, circuit.register_width())? * acc;
    }
    Ok(acc)
}

/// The Hermitian pair of a unitary: `U = symmetric - i · antisymmetric`.
#[derive(Debug, Clone)]
pub struct HermitianParts {
    /// `(U + U†)/2`
    pub symmetric: CMatrix,
    /// `(i/2)(U - U†)`
    pub antisymmetric: CMatrix,
}

/// Split a unitary into its Hermitian symmetric and antisymmetric parts.
pub fn gate_hermitian_parts(u: &CMatrix) -> Result<HermitianParts> {
    if u.nrows() != u.ncols() {
        return Err(Error::DimensionMismatch {
            expected: u.nrows(),
            actual: u.ncols(),
        });
    }
    let defect = unitarity_defect(u);
    if defect > UNITARY_TOL || defect.is_nan() {
        return Err(Error::NotUnitary(defect));
    }
    let adj = u.adjoint();
    let symmetric = (u + &adj).map(|z| z * 0.5);
    let antisymmetric = (u - &adj).map(|z| z * Complex64::new(0.0, 0.5));
    debug_assert!(hermiticity_defect(&symmetric) <= UNITARY_TOL);
    debug_assert!(hermiticity_defect(&antisymmetric) <= UNITARY_TOL);
    Ok(HermitianParts {
        symmetric,
        antisymmetric,
    })
}

// ---------------------------------------------------------------------------
// Circuit DSL
//
//   # comment
//   qubits N
//   gate h Q
//   gate t Q
//   gate rot Q axis NX NY NZ angle THETA
//   gate cnot QC QT
//   gate custom Q [Q2]
//     re,im re,im ...        (2^k rows of 2^k entries, row-major)
// ---------------------------------------------------------------------------

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Split a line into `(1-based column, token)` pairs.
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(start, ch)) = chars.peek() {
        if ch.is_whitespace() {
            chars.next();
            continue;
        }
        if ch == '#' {
            break;
        }
        let mut end = start;
        while let Some(&(i, c)) = chars.peek() {
            if c.is_whitespace() || c == '#' {
                break;
            }
            end = i + c.len_utf8();
            chars.next();
        }
        out.push((start + 1, &line[start..end]));
    }
    out
}

fn parse_usize(line: usize, col: usize, tok: &str, what: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, col, format!("expected {what}, got '{tok}'")))
}

fn parse_f64(line: usize, col: usize, tok: &str, what: &str) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, col, format!("expected {what}, got '{tok}'")))
}

fn parse_complex(line: usize, col: usize, tok: &str) -> Result<Complex64> {
    let (re, im) = tok
        .split_once(',')
        .ok_or_else(|| parse_err(line, col, format!("expected 're,im' pair, got '{tok}'")))?;
    Ok(Complex64::new(
        parse_f64(line, col, re, "real part")?,
        parse_f64(line, col, im, "imaginary part")?,
    ))
}

struct PendingCustom {
    targets: Vec<usize>,
    entries: Vec<Complex64>,
    needed: usize,
    line: usize,
}

/// Parse circuit DSL source into a validated [`Circuit`].
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut width: Option<usize> = None;
    let mut gates: Vec<Gate> = Vec::new();
    let mut pending: Option<PendingCustom> = None;
    let mut last_line = 0;

    for (lineno0, raw) in text.lines().enumerate() {
        let lineno = lineno0 + 1;
        last_line = lineno;
        let toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }
        let (kcol, keyword) = toks[0];

        // Continuation lines for a pending custom matrix start with an entry,
        // not a keyword.
        if keyword != "qubits" && keyword != "gate" {
            let Some(p) = pending.as_mut() else {
                return Err(parse_err(
                    lineno,
                    kcol,
                    format!("expected 'qubits' or 'gate', got '{keyword}'"),
                ));
            };
            for &(col, tok) in &toks {
                if p.entries.len() == p.needed {
                    return Err(parse_err(
                        lineno,
                        col,
                        "extra entries after custom matrix completed",
                    ));
                }
                p.entries.push(parse_complex(lineno, col, tok)?);
            }
            if p.entries.len() == p.needed {
                let done = pending.take().expect("pending custom");
                let start_line = done.line;
                let gate = finish_custom(done)?;
                let w = width.expect("width set before gates");
                gate.validate(w)
                    .map_err(|e| parse_err(start_line, 1, e.to_string()))?;
                gates.push(gate);
            }
            continue;
        }

        if let Some(p) = &pending {
            return Err(parse_err(
                lineno,
                kcol,
                format!(
                    "custom gate matrix started on line {} is incomplete ({} of {} entries)",
                    p.line,
                    p.entries.len(),
                    p.needed
                ),
            ));
        }

        match keyword {
            "qubits" => {
                if width.is_some() {
                    return Err(parse_err(lineno, kcol, "duplicate 'qubits' directive"));
                }
                if toks.len() != 2 {
                    return Err(parse_err(lineno, kcol, "usage: qubits N"));
                }
                let n = parse_usize(lineno, toks[1].0, toks[1].1, "register width")?;
                if n == 0 {
                    return Err(parse_err(lineno, toks[1].0, "register width must be ≥ 1"));
                }
                width = Some(n);
            }
            "gate" => {
                let n = width.ok_or_else(|| {
                    parse_err(lineno, kcol, "'qubits N' must come before any gate")
                })?;
                if toks.len() < 2 {
                    return Err(parse_err(lineno, kcol, "missing gate name"));
                }
                let (ncol, name) = toks[1];
                let args = &toks[2..];
                let gate = match name {
                    "h" | "t" => {
                        if args.len() != 1 {
                            return Err(parse_err(
                                lineno,
                                ncol,
                                format!("gate '{name}' expects 1 target"),
                            ));
                        }
                        let q = parse_usize(lineno, args[0].0, args[0].1, "qubit index")?;
                        if name == "h" {
                            Gate::hadamard(q)
                        } else {
                            Gate::pi_over_8(q)
                        }
                    }
                    "rot" => {
                        // rot Q axis NX NY NZ angle THETA
                        if args.len() != 7 || args[1].1 != "axis" || args[5].1 != "angle" {
                            return Err(parse_err(
                                lineno,
                                ncol,
                                "usage: gate rot Q axis NX NY NZ angle THETA",
                            ));
                        }
                        let q = parse_usize(lineno, args[0].0, args[0].1, "qubit index")?;
                        let ax = parse_f64(lineno, args[2].0, args[2].1, "axis component")?;
                        let ay = parse_f64(lineno, args[3].0, args[3].1, "axis component")?;
                        let az = parse_f64(lineno, args[4].0, args[4].1, "axis component")?;
                        let angle = parse_f64(lineno, args[6].0, args[6].1, "angle")?;
                        Gate::rotation([ax, ay, az], angle, q)
                    }
                    "cnot" => {
                        if args.len() != 2 {
                            return Err(parse_err(lineno, ncol, "gate 'cnot' expects 2 targets"));
                        }
                        let c = parse_usize(lineno, args[0].0, args[0].1, "qubit index")?;
                        let t = parse_usize(lineno, args[1].0, args[1].1, "qubit index")?;
                        Gate::cnot(c, t)
                    }
                    "custom" => {
                        if args.is_empty() || args.len() > 2 {
                            return Err(parse_err(
                                lineno,
                                ncol,
                                "gate 'custom' expects 1 or 2 targets",
                            ));
                        }
                        let mut targets = Vec::new();
                        for &(col, tok) in args {
                            targets.push(parse_usize(lineno, col, tok, "qubit index")?);
                        }
                        let dim = 1usize << targets.len();
                        pending = Some(PendingCustom {
                            targets,
                            entries: Vec::with_capacity(dim * dim),
                            needed: dim * dim,
                            line: lineno,
                        });
                        continue;
                    }
                    _ => {
                        return Err(parse_err(
                            lineno,
                            ncol,
                            format!("unknown gate name '{name}'"),
                        ));
                    }
                };
                gate.validate(n)
                    .map_err(|e| parse_err(lineno, ncol, e.to_string()))?;
                gates.push(gate);
            }
            _ => unreachable!(),
        }
    }

    if let Some(p) = &pending {
        return Err(parse_err(
            last_line,
            1,
            format!(
                "custom gate matrix started on line {} is incomplete ({} of {} entries)",
                p.line,
                p.entries.len(),
                p.needed
            ),
        ));
    }
    let width = width.ok_or_else(|| parse_err(last_line.max(1), 1, "missing 'qubits' directive"))?;
    Circuit::new(width, gates)
}

fn finish_custom(p: PendingCustom) -> Result<Gate> {
    let dim = 1usize << p.targets.len();
    let matrix = CMatrix::from_row_slice(dim, dim, &p.entries);
    Ok(Gate::custom(matrix, p.targets))
}

/// Render a circuit back to DSL text; `parse_circuit` inverts this exactly.
pub fn serialize_circuit(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str(&format!("qubits {}\n", circuit.register_width()));
    for gate in circuit.gates() {
        match &gate.kind {
            GateKind::Hadamard => out.push_str(&format!("gate h {}\n", gate.targets[0])),
            GateKind::PiOver8 => out.push_str(&format!("gate t {}\n", gate.targets[0])),
            GateKind::Rotation { axis, angle } => out.push_str(&format!(
                "gate rot {} axis {} {} {} angle {}\n",
                gate.targets[0], axis[0], axis[1], axis[2], angle
            )),
            GateKind::Cnot => {
                out.push_str(&format!("gate cnot {} {}\n", gate.targets[0], gate.targets[1]))
            }
            GateKind::Custom { matrix } => {
                let ts: Vec<String> = gate.targets.iter().map(|t| t.to_string()).collect();
                out.push_str(&format!("gate custom {}\n", ts.join(" ")));
                for i in 0..matrix.nrows() {
                    let row: Vec<String> = (0..matrix.ncols())
                        .map(|j| format!("{},{}", matrix[(i, j)].re, matrix[(i, j)].im))
                        .collect();
                    out.push_str(&format!("  {}\n", row.join(" ")));
                }
            }
        }
    }
    out
}
