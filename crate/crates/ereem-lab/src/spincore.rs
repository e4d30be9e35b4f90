//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here operates on [`CMat`] / [`CVec`] (dense, column-major
//! `nalgebra` storage) at dimensions of at most a few tens. Hamiltonians are
//! expected in angular-frequency units (rad/µs) and durations in µs, so that
//! the propagator for a constant segment is `exp(-i H t)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Dense complex matrix used for operators, Hamiltonians and propagators.
pub type CMat = DMatrix<C64>;
/// Dense complex vector used for pure states.
pub type CVec = DVector<C64>;

#[derive(Debug, Error)]
pub enum SpincoreError {
    #[error("unsupported spin quantum number {0}; expected 1/2 or 1")]
    UnsupportedSpin(f64),
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: max |H - H^dag| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("negative segment duration {0}")]
    NegativeDuration(f64),
    #[error("propagation lost unitarity: | ||psi|| - 1 | = {0:.3e}")]
    NormDrift(f64),
    #[error("dimension mismatch: operator is {dim}x{dim} but state has length {state}")]
    DimensionMismatch { dim: usize, state: usize },
}

/// Spin operator triple for a single spin-`s` particle, in the basis with
/// `sz` diagonal and eigenvalues descending from `+s` to `-s`.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub spin: f64,
    pub sx: CMat,
    pub sy: CMat,
    pub sz: CMat,
}

impl SpinOperators {
    pub fn dim(&self) -> usize {
        self.sz.nrows()
    }
}

/// Builds the angular-momentum matrices for spin `s` (1/2 or 1).
pub fn spin_operators(s: f64) -> Result<SpinOperators, SpincoreError> {
    if s != 0.5 && s != 1.0 {
        return Err(SpincoreError::UnsupportedSpin(s));
    }
    let dim = (2.0 * s + 1.0).round() as usize;
    let m = |k: usize| s - k as f64;
    let mut sz = CMat::zeros(dim, dim);
    let mut sp = CMat::zeros(dim, dim);
    for k in 0..dim {
        sz[(k, k)] = C64::new(m(k), 0.0);
        if k > 0 {
            // <m+1| S+ |m> with m = s - k
            let mk = m(k);
            sp[(k - 1, k)] = C64::new((s * (s + 1.0) - mk * (mk + 1.0)).sqrt(), 0.0);
        }
    }
    let sm = sp.adjoint();
    let sx = (&sp + &sm).map(|z| z * C64::new(0.5, 0.0));
    let sy = (&sp - &sm).map(|z| z * C64::new(0.0, -0.5));
    Ok(SpinOperators { spin: s, sx, sy, sz })
}

/// Identity matrix of the given dimension.
pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

/// Kronecker product of two square matrices.
pub fn tensor_product(a: &CMat, b: &CMat) -> Result<CMat, SpincoreError> {
    for m in [a, b] {
        if m.nrows() != m.ncols() {
            return Err(SpincoreError::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
    }
    Ok(a.kronecker(b))
}

/// Largest absolute deviation from Hermiticity, `max |H - H^dag|`.
pub fn hermiticity_error(h: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest absolute entry of `U^dag U - 1`.
pub fn unitarity_error(u: &CMat) -> f64 {
    let prod = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are returned ascending; `vectors` holds the matching
/// orthonormal eigenvectors as columns, so `H = V diag(values) V^dag`.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl Eigensystem {
    /// Reconstructs `V diag(f(lambda)) V^dag`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> C64) -> CMat {
        let dim = self.values.len();
        let diag = CMat::from_diagonal(&CVec::from_iterator(dim, self.values.iter().map(|&l| f(l))));
        &self.vectors * diag * self.vectors.adjoint()
    }

    /// Propagator `exp(-i H t)` for the decomposed Hamiltonian.
    pub fn propagator(&self, t: f64) -> CMat {
        self.map_eigenvalues(|l| C64::from_polar(1.0, -l * t))
    }
}

/// Default Hermiticity tolerance used by [`hermitian_eigensystem`].
pub const HERMITICITY_TOL: f64 = 1e-9;

/// Diagonalizes a Hermitian matrix, rejecting inputs whose deviation from
/// Hermiticity exceeds `tolerance` (pass [`HERMITICITY_TOL`] for the default).
pub fn hermitian_eigensystem(h: &CMat, tolerance: f64) -> Result<Eigensystem, SpincoreError> {
    if h.nrows() != h.ncols() {
        return Err(SpincoreError::NotSquare { rows: h.nrows(), cols: h.ncols() });
    }
    let deviation = hermiticity_error(h);
    let scale = h.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
    if deviation > tolerance * scale {
        return Err(SpincoreError::NotHermitian { deviation, tolerance: tolerance * scale });
    }
    // Symmetrize to strip roundoff before handing to the solver.
    let sym = (h + h.adjoint()).map(|z| z * C64::new(0.5, 0.0));
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let dim = values.len();
    let mut vectors = CMat::zeros(dim, dim);
    for (col, &src) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(src));
    }
    Ok(Eigensystem { values, vectors })
}

/// Propagator `exp(-i H t)` for a Hermitian `H`, via eigendecomposition.
pub fn expm_hermitian(h: &CMat, t: f64) -> Result<CMat, SpincoreError> {
    Ok(hermitian_eigensystem(h, HERMITICITY_TOL)?.propagator(t))
}

/// Norm-drift bound beyond which piecewise propagation reports failure.
pub const NORM_DRIFT_TOL: f64 = 1e-8;

/// Applies `prod_k exp(-i H_k t_k)` to `state`, last segment applied last.
///
/// Each Hamiltonian must be Hermitian (in rad/µs) and each duration
/// non-negative (µs). The final norm is checked against 1 to [`NORM_DRIFT_TOL`].
pub fn propagate_piecewise(
    segments: &[(CMat, f64)],
    state: &CVec,
) -> Result<CVec, SpincoreError> {
    let mut psi = state.clone();
    for (h, t) in segments {
        if *t < 0.0 {
            return Err(SpincoreError::NegativeDuration(*t));
        }
        if h.nrows() != psi.len() {
            return Err(SpincoreError::DimensionMismatch { dim: h.nrows(), state: psi.len() });
        }
        psi = expm_hermitian(h, *t)? * psi;
    }
    let drift = (psi.norm() - state.norm()).abs();
    if drift > NORM_DRIFT_TOL {
        return Err(SpincoreError::NormDrift(drift));
    }
    Ok(psi)
}
