//! The pointer model: a counter chain of `n + 3` sites tensored with the
//! `N`-qubit register.
//!
//! `H(s) = (1-s)·H_init + s·H_final`. Both endpoint Hamiltonians share the
//! internal bonds `M(U_i|i+1⟩⟨i| + U_i†|i⟩⟨i+1|)` for `i = 1..n`, so only
//! the two boundary bonds interpolate: bond `(0,1)` carries `s·J ⊗ I` and
//! bond `(n+1, n+2)` carries `(1-s)·J ⊗ I`. There are no diagonal terms,
//! which gives the chain a chiral (bipartite) symmetry and an exact
//! zero-energy dark manifold of dimension `2^N`.
//!
//! Composite indexing: `index = counter_site · 2^N + register_index`,
//! counter sites labeled `0 ..= n+2`.

use num_complex::Complex64;

use crate::circuit::{circuit_product, gate_unitary, Circuit};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// Normalization tolerance for register input states.
pub const NORM_TOL: f64 = 1e-12;

/// Couplings and circuit defining the interpolated Hamiltonian family.
/// Energies are in arbitrary units with ħ = 1; times are inverse energies.
#[derive(Debug, Clone)]
pub struct PointerModelSpec {
    circuit: Circuit,
    coupling_j: f64,
    coupling_m: f64,
}

impl PointerModelSpec {
    pub fn new(circuit: Circuit, coupling_j: f64, coupling_m: f64) -> Result<Self> {
        if coupling_j <= 0.0 || !coupling_j.is_finite() {
            return Err(Error::InvalidCoupling(format!(
                "boundary coupling J must be positive and finite (got {coupling_j})"
            )));
        }
        if coupling_m <= 0.0 || !coupling_m.is_finite() {
            return Err(Error::InvalidCoupling(format!(
                "internal coupling M must be positive and finite (got {coupling_m})"
            )));
        }
        Ok(PointerModelSpec {
            circuit,
            coupling_j,
            coupling_m,
        })
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn coupling_j(&self) -> f64 {
        self.coupling_j
    }

    pub fn coupling_m(&self) -> f64 {
        self.coupling_m
    }

    /// Number of gates `n`.
    pub fn n_gates(&self) -> usize {
        self.circuit.n_gates()
    }

    /// Counter chain length, `n + 3` (sites `0 ..= n+2`).
    pub fn counter_sites(&self) -> usize {
        self.circuit.n_gates() + 3
    }

    pub fn register_dim(&self) -> usize {
        self.circuit.register_dim()
    }

    /// Composite Hilbert-space dimension, `(n+3)·2^N`.
    pub fn dim(&self) -> usize {
        self.counter_sites() * self.register_dim()
    }

    /// True when `M/J < 5`. The dark state keeps amplitude off the interior
    /// sites only to order `(J/M)²`, so weakly separated couplings deserve
    /// a warning (non-fatal).
    pub fn weak_separation(&self) -> bool {
        self.coupling_m / self.coupling_j < 5.0
    }
}

/// Complex amplitude vector on (counter ⊗ register). Not necessarily
/// normalized; the dark state is naturally produced unnormalized.
#[derive(Debug, Clone)]
pub struct PointerState {
    amplitudes: CVector,
    counter_sites: usize,
    register_dim: usize,
}

impl PointerState {
    pub fn new(amplitudes: CVector, counter_sites: usize, register_dim: usize) -> Result<Self> {
        if amplitudes.len() != counter_sites * register_dim {
            return Err(Error::DimensionMismatch {
                expected: counter_sites * register_dim,
                actual: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("amplitudes must be finite".into()));
        }
        Ok(PointerState {
            amplitudes,
            counter_sites,
            register_dim,
        })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn counter_sites(&self) -> usize {
        self.counter_sites
    }

    pub fn register_dim(&self) -> usize {
        self.register_dim
    }

    /// Composite index of `(counter site, register index)`.
    pub fn index(&self, counter_site: usize, register_index: usize) -> usize {
        counter_site * self.register_dim + register_index
    }

    pub fn amplitude(&self, counter_site: usize, register_index: usize) -> Complex64 {
        self.amplitudes[self.index(counter_site, register_index)]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Unit-norm copy.
    pub fn normalized(&self) -> Result<PointerState> {
        let norm = self.norm();
        if norm <= f64::MIN_POSITIVE {
            return Err(Error::ZeroVector);
        }
        Ok(PointerState {
            amplitudes: self.amplitudes.map(|z| z / norm),
            counter_sites: self.counter_sites,
            register_dim: self.register_dim,
        })
    }
}

/// `H(s)` for one spec, usable both matrix-free (`apply`) and densely
/// (`dense`). The gate unitaries are embedded once at construction; only
/// the two boundary amplitudes depend on `s`.
#[derive(Debug, Clone)]
pub struct PointerHamiltonian {
    counter_sites: usize,
    register_dim: usize,
    coupling_j: f64,
    coupling_m: f64,
    s: f64,
    hops: Vec<CMatrix>,
    hops_adj: Vec<CMatrix>,
}

impl PointerHamiltonian {
    pub fn dim(&self) -> usize {
        self.counter_sites * self.register_dim
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn counter_sites(&self) -> usize {
        self.counter_sites
    }

    pub fn register_dim(&self) -> usize {
        self.register_dim
    }

    /// Upper bound on the spectral norm, from the largest total bond weight
    /// incident on any site.
    pub fn spectral_norm_bound(&self) -> f64 {
        (2.0 * self.coupling_m).max(self.coupling_m + self.coupling_j)
    }

    /// `out = H(s)·psi` at the stored `s`.
    pub fn apply_into(&self, psi: &CVector, out: &mut CVector) {
        self.apply_at(self.s, psi, out);
    }

    pub fn apply(&self, psi: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim());
        self.apply_into(psi, &mut out);
        out
    }

    /// `out = H(s')·psi` for an arbitrary interpolation value, reusing the
    /// embedded gate blocks. `s` is not range-checked here; sweep drivers
    /// validate their schedules up front.
    pub fn apply_at(&self, s: f64, psi: &CVector, out: &mut CVector) {
        let r = self.register_dim;
        let one = Complex64::new(1.0, 0.0);
        out.fill(Complex64::new(0.0, 0.0));

        // boundary bond (0, 1): s·J ⊗ I
        let sj = Complex64::new(s * self.coupling_j, 0.0);
        out.rows_mut(0, r).axpy(sj, &psi.rows(r, r), one);
        out.rows_mut(r, r).axpy(sj, &psi.rows(0, r), one);

        // boundary bond (n+1, n+2): (1-s)·J ⊗ I
        let tj = Complex64::new((1.0 - s) * self.coupling_j, 0.0);
        let top = (self.counter_sites - 1) * r;
        out.rows_mut(top - r, r).axpy(tj, &psi.rows(top, r), one);
        out.rows_mut(top, r).axpy(tj, &psi.rows(top - r, r), one);

        // internal bonds (i, i+1), i = 1..=n: M·U_i upward, M·U_i† downward
        let m = Complex64::new(self.coupling_m, 0.0);
        for (idx, (u, u_adj)) in self.hops.iter().zip(&self.hops_adj).enumerate() {
            let i = idx + 1;
            let lower = psi.rows(i * r, r);
            let upper = psi.rows((i + 1) * r, r);
            out.rows_mut((i + 1) * r, r).gemv(m, u, &lower, one);
            out.rows_mut(i * r, r).gemv(m, u_adj, &upper, one);
        }
    }

    /// Dense assembly, suited to the eigensolver at desk scale.
    pub fn dense(&self) -> CMatrix {
        let r = self.register_dim;
        let dim = self.dim();
        let mut h = CMatrix::zeros(dim, dim);

        let sj = Complex64::new(self.s * self.coupling_j, 0.0);
        for k in 0..r {
            h[(k, r + k)] = sj;
            h[(r + k, k)] = sj;
        }
        let tj = Complex64::new((1.0 - self.s) * self.coupling_j, 0.0);
        let top = (self.counter_sites - 1) * r;
        for k in 0..r {
            h[(top - r + k, top + k)] = tj;
            h[(top + k, top - r + k)] = tj;
        }
        let m = Complex64::new(self.coupling_m, 0.0);
        for (idx, (u, u_adj)) in self.hops.iter().zip(&self.hops_adj).enumerate() {
            let i = idx + 1;
            h.view_mut(((i + 1) * r, i * r), (r, r))
                .copy_from(&u.map(|z| z * m));
            h.view_mut((i * r, (i + 1) * r), (r, r))
                .copy_from(&u_adj.map(|z| z * m));
        }
        h
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) || !s.is_finite() {
        return Err(Error::SOutOfRange(s));
    }
    Ok(())
}

fn check_register_input(spec: &PointerModelSpec, phi: &CVector) -> Result<()> {
    if phi.len() != spec.register_dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.register_dim(),
            actual: phi.len(),
        });
    }
    if phi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument("register state must be finite".into()));
    }
    Ok(())
}

fn check_normalized(phi: &CVector) -> Result<()> {
    let dev = (phi.norm() - 1.0).abs();
    if dev > NORM_TOL {
        return Err(Error::NotNormalized(dev));
    }
    Ok(())
}

/// Build `H(s)`.
pub fn build_h(spec: &PointerModelSpec, s: f64) -> Result<PointerHamiltonian> {
    check_s(s)?;
    let width = spec.circuit().register_width();
    let mut hops = Vec::with_capacity(spec.n_gates());
    let mut hops_adj = Vec::with_capacity(spec.n_gates());
    for gate in spec.circuit().gates() {
        let u = gate_unitary(gate, width)?;
        hops_adj.push(u.adjoint());
        hops.push(u);
    }
    Ok(PointerHamiltonian {
        counter_sites: spec.counter_sites(),
        register_dim: spec.register_dim(),
        coupling_j: spec.coupling_j(),
        coupling_m: spec.coupling_m(),
        s,
        hops,
        hops_adj,
    })
}

/// `|0⟩_c ⊗ |φ⟩`: the register input parked on counter site 0.
pub fn initial_state(spec: &PointerModelSpec, phi: &CVector) -> Result<PointerState> {
    check_register_input(spec, phi)?;
    check_normalized(phi)?;
    let r = spec.register_dim();
    let mut amps = CVector::zeros(spec.dim());
    amps.rows_mut(0, r).copy_from(phi);
    PointerState::new(amps, spec.counter_sites(), r)
}

/// `|n+2⟩_c ⊗ (U_n···U_1)|φ⟩`: the circuit output on the last counter site.
pub fn target_state(spec: &PointerModelSpec, phi: &CVector) -> Result<PointerState> {
    check_register_input(spec, phi)?;
    check_normalized(phi)?;
    let r = spec.register_dim();
    let product = circuit_product(spec.circuit())?;
    let mut amps = CVector::zeros(spec.dim());
    amps.rows_mut((spec.counter_sites() - 1) * r, r)
        .copy_from(&(product * phi));
    PointerState::new(amps, spec.counter_sites(), r)
}

/// The exact zero-eigenvector branch seeded by `φ`, unnormalized:
///
/// - site 0: `(1-s)·J·φ`
/// - site `2i`, `i = 1..n/2`: `(-1)^i · s(1-s)·J²/M · (U_{2i-1}···U_1)φ`
/// - site `n+2`: `(-1)^{n/2+1} · s·J · (U_n···U_1)φ`
/// - odd sites: exactly zero.
///
/// Satisfies `H(s)·v = 0` for every `s` (an exact kernel vector, not a
/// perturbative approximation). The sign of the last term follows from the
/// kernel recursion `b_{i-1}ψ_{i-1} + b_i·(hop)ψ_{i+1} = 0`.
pub fn analytic_dark_state(spec: &PointerModelSpec, s: f64, phi: &CVector) -> Result<PointerState> {
    check_s(s)?;
    check_register_input(spec, phi)?;
    let n = spec.n_gates();
    if !n.is_multiple_of(2) {
        return Err(Error::OddGateCount(n));
    }
    if phi.norm() <= f64::MIN_POSITIVE {
        return Err(Error::ZeroVector);
    }
    let j = spec.coupling_j();
    let m = spec.coupling_m();
    let r = spec.register_dim();
    let width = spec.circuit().register_width();
    let mut amps = CVector::zeros(spec.dim());

    amps.rows_mut(0, r)
        .copy_from(&phi.map(|z| z * ((1.0 - s) * j)));

    let mut reg = phi.clone();
    let mut applied = 0usize;
    let gates = spec.circuit().gates();
    for i in 1..=(n / 2) {
        while applied < 2 * i - 1 {
            reg = gate_unitary(&gates[applied], width)? * reg;
            applied += 1;
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign * s * (1.0 - s) * j * j / m;
        amps.rows_mut(2 * i * r, r).copy_from(&reg.map(|z| z * coeff));
    }
    while applied < n {
        reg = gate_unitary(&gates[applied], width)? * reg;
        applied += 1;
    }
    let sign = if (n / 2 + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    amps.rows_mut((n + 2) * r, r)
        .copy_from(&reg.map(|z| z * (sign * s * j)));

    PointerState::new(amps, spec.counter_sites(), r)
}

/// Per-counter-site probabilities of the normalized state; sums to 1.
pub fn site_populations(state: &PointerState) -> Result<Vec<f64>> {
    let norm_sq = state.amplitudes().norm_squared();
    if norm_sq <= f64::MIN_POSITIVE {
        return Err(Error::ZeroVector);
    }
    let r = state.register_dim();
    let pops = (0..state.counter_sites())
        .map(|c| {
            (0..r)
                .map(|k| state.amplitude(c, k).norm_sqr())
                .sum::<f64>()
                / norm_sq
        })
        .collect();
    Ok(pops)
}
