//! Exact spectra of the pointer Hamiltonian, dark-subspace identification,
//! gap extraction, and the gap-versus-n scaling scan.
//!
//! The chain spectrum is independent of the gates: conjugating `H(s)` by
//! the block-diagonal unitary `Σ_c |c⟩⟨c| ⊗ (U_{c-1}···U_1)` maps any
//! circuit onto the identity-gate chain, so every eigenvalue of the scalar
//! chain appears with multiplicity `2^N`. The scans below measure the gap
//! and its scaling with `n` rather than assuming a power law.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect, max_abs, CMatrix};
use crate::pointer_model::{build_h, PointerModelSpec};

/// Dense eigendecomposition is refused above this dimension.
pub const EIGEN_DESK_CAP: usize = 4096;

/// Default threshold separating the exact zero modes from the rest of the
/// spectrum: `1e-6·max(J, M)`. The true zero modes are exact; at desk scale
/// the nearest nonzero level is of order `J/n`, far above this.
pub fn default_zero_tol(coupling_j: f64, coupling_m: f64) -> f64 {
    1e-6 * coupling_j.max(coupling_m)
}

/// Full spectrum of a Hermitian operator with the near-zero subspace split
/// out.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvector columns, ordered like `eigenvalues`.
    pub eigenvectors: CMatrix,
    /// Columns spanning the eigenvalues with `|λ| < zero_tol`.
    pub zero_space: CMatrix,
    /// Smallest `|λ|` at or above `zero_tol`; infinite if none.
    pub gap: f64,
    pub zero_tol: f64,
}

/// Dense Hermitian eigendecomposition, ascending, with residual-checked
/// eigenpairs.
pub fn eigendecompose(h: &CMatrix, zero_tol: f64) -> Result<SpectrumResult> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            actual: h.ncols(),
        });
    }
    if h.nrows() > EIGEN_DESK_CAP {
        return Err(Error::DeskScaleExceeded {
            dim: h.nrows(),
            cap: EIGEN_DESK_CAP,
        });
    }
    let defect = hermiticity_defect(h);
    if defect > 1e-10 * max_abs(h).max(1.0) || defect.is_nan() {
        return Err(Error::NotHermitian(defect));
    }

    let se = h.clone().symmetric_eigen();
    let dim = h.nrows();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(dim, dim);
    for (col, &i) in order.iter().enumerate() {
        eigenvectors.set_column(col, &se.eigenvectors.column(i));
    }

    let zero_count = eigenvalues.iter().filter(|l| l.abs() < zero_tol).count();
    let mut zero_space = CMatrix::zeros(dim, zero_count);
    let mut zc = 0;
    for (col, lambda) in eigenvalues.iter().enumerate() {
        if lambda.abs() < zero_tol {
            zero_space.set_column(zc, &eigenvectors.column(col));
            zc += 1;
        }
    }

    let gap = eigenvalues
        .iter()
        .map(|l| l.abs())
        .filter(|a| *a >= zero_tol)
        .fold(f64::INFINITY, f64::min);

    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
        zero_space,
        gap,
        zero_tol,
    })
}

/// Tolerance for the equality of the gaps above and below zero, which the
/// chiral symmetry enforces.
const CHIRAL_GAP_TOL: f64 = 1e-9;

/// Distance from the zero-energy dark manifold to the nearest nonzero
/// eigenvalue of `H(s)`. Checks that the zero space has dimension exactly
/// `2^N` and that the gaps above and below zero agree.
pub fn gap_at(spec: &PointerModelSpec, s: f64, zero_tol: Option<f64>) -> Result<f64> {
    let tol = zero_tol.unwrap_or_else(|| default_zero_tol(spec.coupling_j(), spec.coupling_m()));
    let h = build_h(spec, s)?.dense();
    let spectrum = eigendecompose(&h, tol)?;

    let expected = spec.register_dim();
    let found = spectrum.zero_space.ncols();
    if found != expected {
        return Err(Error::ZeroSpaceDimension { found, expected });
    }

    let above = spectrum
        .eigenvalues
        .iter()
        .filter(|l| **l >= tol)
        .fold(f64::INFINITY, |a, l| a.min(*l));
    let below = spectrum
        .eigenvalues
        .iter()
        .filter(|l| **l <= -tol)
        .fold(f64::INFINITY, |a, l| a.min(l.abs()));
    if (above - below).abs() > CHIRAL_GAP_TOL {
        return Err(Error::SpectrumAsymmetry { above, below });
    }
    Ok(spectrum.gap)
}

/// Circuit families for scaling benchmarks, parameterized by gate count.
/// Both act on a single register qubit.
#[derive(Debug, Clone, Copy)]
pub enum CircuitFamily {
    /// Zero-angle rotations; the canonical benchmark (the register factors
    /// out entirely).
    Identity,
    /// Haar-ish random rotations: axis uniform on the sphere via two
    /// uniform deviates, angle uniform in `[0, 2π)`. The per-n stream is
    /// derived deterministically from the seed.
    RandomRotations { seed: u64 },
}

impl CircuitFamily {
    pub fn circuit(&self, n: usize) -> Result<Circuit> {
        match self {
            CircuitFamily::Identity => {
                Circuit::new(1, (0..n).map(|_| Gate::identity_gate(0)).collect())
            }
            CircuitFamily::RandomRotations { seed } => {
                let stream = seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                let mut rng = ChaCha8Rng::seed_from_u64(stream);
                let gates = (0..n)
                    .map(|_| {
                        let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
                        let azimuth = std::f64::consts::TAU * rng.random::<f64>();
                        let rho = (1.0 - z * z).max(0.0).sqrt();
                        let axis = [rho * azimuth.cos(), rho * azimuth.sin(), z];
                        let angle = std::f64::consts::TAU * rng.random::<f64>();
                        Gate::rotation(axis, angle, 0)
                    })
                    .collect();
                Circuit::new(1, gates)
            }
        }
    }
}

/// Minimum-gap row of a scan at one chain length.
#[derive(Debug, Clone, Serialize)]
pub struct GapScanRow {
    pub n: usize,
    pub min_gap: f64,
    pub argmin_s: f64,
}

/// One sampled `(n, s)` grid point.
#[derive(Debug, Clone, Serialize)]
pub struct GapPoint {
    pub n: usize,
    pub s: f64,
    pub gap: f64,
}

/// Scan output: per-n minima, the full grid, and the power-law fit
/// `gap ≈ prefactor · n^alpha` (least squares on `log gap` vs `log n`).
#[derive(Debug, Clone, Serialize)]
pub struct GapScanResult {
    pub alpha: f64,
    pub prefactor: f64,
    pub fit_residual: f64,
    pub rows: Vec<GapScanRow>,
    #[serde(skip)]
    pub points: Vec<GapPoint>,
}

/// `points` evenly spaced values covering `[0, 1]` inclusive.
pub fn uniform_s_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| k as f64 / (points - 1) as f64)
        .collect()
}

/// Minimum gap over the `s` grid for each chain length, plus the fitted
/// scaling exponent. Grid points are visited in `(n, s)` order so results
/// are deterministic.
pub fn gap_scan<F>(
    make_circuit: F,
    n_list: &[usize],
    coupling_j: f64,
    coupling_m: f64,
    s_grid: &[f64],
) -> Result<GapScanResult>
where
    F: Fn(usize) -> Result<Circuit>,
{
    if n_list.len() < 3 {
        return Err(Error::DegenerateFit(n_list.len()));
    }
    for pair in n_list.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::InvalidArgument(
                "chain lengths must be strictly increasing".into(),
            ));
        }
    }
    for &n in n_list {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "chain lengths must be even and at least 2 (got {n})"
            )));
        }
    }
    if s_grid.len() < 21 {
        return Err(Error::InvalidArgument(format!(
            "s grid needs at least 21 points (got {})",
            s_grid.len()
        )));
    }
    if s_grid.iter().any(|s| !(0.0..=1.0).contains(s)) {
        return Err(Error::InvalidArgument("s grid must lie in [0, 1]".into()));
    }

    let mut rows = Vec::with_capacity(n_list.len());
    let mut points = Vec::with_capacity(n_list.len() * s_grid.len());
    for &n in n_list {
        let spec = PointerModelSpec::new(make_circuit(n)?, coupling_j, coupling_m)?;
        let mut min_gap = f64::INFINITY;
        let mut argmin_s = s_grid[0];
        for &s in s_grid {
            let gap = gap_at(&spec, s, None)?;
            points.push(GapPoint { n, s, gap });
            if gap < min_gap {
                min_gap = gap;
                argmin_s = s;
            }
        }
        if !min_gap.is_finite() || min_gap <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "degenerate gap {min_gap} at n = {n}"
            )));
        }
        rows.push(GapScanRow {
            n,
            min_gap,
            argmin_s,
        });
    }

    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.min_gap.ln()).collect();
    let (alpha, intercept) = least_squares_line(&xs, &ys);
    let fit_residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (alpha * x + intercept);
            e * e
        })
        .sum::<f64>()
        / xs.len() as f64)
        .sqrt();

    Ok(GapScanResult {
        alpha,
        prefactor: intercept.exp(),
        fit_residual,
        rows,
        points,
    })
}

fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    let slope = num / den;
    (slope, mean_y - slope * mean_x)
}

/// Fraction of a (normalized) vector lying outside the spectrum's zero
/// space; 0 means the vector is an exact zero mode combination.
pub fn zero_space_overlap_deficit(spectrum: &SpectrumResult, v: &DVector<num_complex::Complex64>) -> f64 {
    let norm_sq = v.norm_squared();
    let mut inside = 0.0;
    for col in 0..spectrum.zero_space.ncols() {
        inside += spectrum.zero_space.column(col).dotc(v).norm_sqr();
    }
    1.0 - inside / norm_sq
}
