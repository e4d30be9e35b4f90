//! NV ground-state physics: species constants, lab- and rotating-frame
//! Hamiltonians, and the effective-nuclear-field vector model.
//!
//! Constants are stored in ordinary-frequency units (MHz, MHz/G) with the
//! signs as conventionally tabulated; Hamiltonians and Larmor frequencies come
//! out in angular units (rad/µs). Fields are in Gauss throughout.

use crate::spincore::{self, CMat, SpincoreError};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("kappa is undefined: {0} must be nonzero")]
    ZeroDenominator(&'static str),
    #[error("invalid species constants: {0}")]
    InvalidConstants(String),
    #[error("invalid bias field: {0}")]
    InvalidField(String),
    #[error("relative angle requires two distinct spin states, got m_s = {0} twice")]
    DegenerateStatePair(i8),
    #[error("m_s = {0} is outside {{-1, 0, +1}}")]
    InvalidSpinState(i8),
    #[error(transparent)]
    Spincore(#[from] SpincoreError),
}

/// Nitrogen isotope of the NV center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    N15,
    N14,
}

impl std::fmt::Display for Species {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Species::N15 => write!(f, "n15"),
            Species::N14 => write!(f, "n14"),
        }
    }
}

/// Physical constants for one nitrogen isotope.
///
/// All frequencies are ordinary (MHz), gyromagnetic ratios signed (MHz/G).
/// The ¹⁵N defaults are the values used throughout the analytic model; the
/// ¹⁴N hyperfine and gyromagnetic defaults are literature values and every
/// ¹⁴N output should be read as configuration-dependent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeciesConstants {
    pub species: Species,
    /// Zero-field splitting D, MHz.
    pub d_mhz: f64,
    /// Electron gyromagnetic ratio, MHz/G (signed).
    pub gamma_e_mhz_per_g: f64,
    /// Nuclear gyromagnetic ratio, MHz/G (signed).
    pub gamma_n_mhz_per_g: f64,
    /// Transverse hyperfine component, MHz (signed).
    pub a_perp_mhz: f64,
    /// Longitudinal hyperfine component, MHz (signed).
    pub a_par_mhz: f64,
    /// Nuclear quadrupole constant, MHz (0 for I = 1/2).
    pub q_mhz: f64,
    /// Nuclear spin quantum number (1/2 or 1).
    pub nuclear_spin: f64,
}

impl SpeciesConstants {
    /// ¹⁵NV defaults.
    pub fn n15() -> Self {
        SpeciesConstants {
            species: Species::N15,
            d_mhz: 2870.0,
            gamma_e_mhz_per_g: -2.8024,
            gamma_n_mhz_per_g: -431.6e-6,
            a_perp_mhz: 3.65,
            a_par_mhz: 3.03,
            q_mhz: 0.0,
            nuclear_spin: 0.5,
        }
    }

    /// ¹⁴NV defaults. Hyperfine constants and the nuclear gyromagnetic ratio
    /// are literature values (signed); only Q and the electron-side constants
    /// are shared with the ¹⁵NV parameter set.
    pub fn n14() -> Self {
        SpeciesConstants {
            species: Species::N14,
            d_mhz: 2870.0,
            gamma_e_mhz_per_g: -2.8024,
            gamma_n_mhz_per_g: 3.077e-4,
            a_perp_mhz: -2.70,
            a_par_mhz: -2.14,
            q_mhz: -4.945,
            nuclear_spin: 1.0,
        }
    }

    pub fn for_species(species: Species) -> Self {
        match species {
            Species::N15 => Self::n15(),
            Species::N14 => Self::n14(),
        }
    }

    /// Same constants with a replacement transverse hyperfine value.
    pub fn with_a_perp(mut self, a_perp_mhz: f64) -> Self {
        self.a_perp_mhz = a_perp_mhz;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.d_mhz <= 0.0 {
            return Err(ModelError::InvalidConstants(format!(
                "d_mhz must be positive, got {}",
                self.d_mhz
            )));
        }
        let expected_spin = match self.species {
            Species::N15 => 0.5,
            Species::N14 => 1.0,
        };
        if self.nuclear_spin != expected_spin {
            return Err(ModelError::InvalidConstants(format!(
                "nuclear_spin {} inconsistent with species {}",
                self.nuclear_spin, self.species
            )));
        }
        if self.species == Species::N15 && self.q_mhz != 0.0 {
            return Err(ModelError::InvalidConstants(
                "q_mhz must be 0 for N15 (I = 1/2)".into(),
            ));
        }
        Ok(())
    }

    /// Hilbert-space dimension of the coupled electron-nuclear system.
    pub fn dim(&self) -> usize {
        3 * ((2.0 * self.nuclear_spin + 1.0).round() as usize)
    }

    /// Constants table for the CLI `constants` command (key, value, unit).
    pub fn table(&self) -> Vec<(String, String, String)> {
        vec![
            ("species".into(), self.species.to_string(), String::new()),
            ("D".into(), fmt_f64(self.d_mhz), "MHz".into()),
            ("gamma_e".into(), fmt_f64(self.gamma_e_mhz_per_g), "MHz/G".into()),
            ("gamma_n".into(), fmt_f64(self.gamma_n_mhz_per_g), "MHz/G".into()),
            ("A_perp".into(), fmt_f64(self.a_perp_mhz), "MHz".into()),
            ("A_par".into(), fmt_f64(self.a_par_mhz), "MHz".into()),
            ("Q".into(), fmt_f64(self.q_mhz), "MHz".into()),
            ("nuclear_spin".into(), fmt_f64(self.nuclear_spin), String::new()),
        ]
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Field magnitude above which the perturbative vector model degrades.
pub const PERTURBATIVE_LIMIT_GAUSS: f64 = 200.0;

/// Bias magnetic field restricted to the x-z plane of the NV frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasField {
    /// Magnitude, Gauss.
    pub b_gauss: f64,
    /// Misalignment angle from the NV axis, radians, in [0, pi/2].
    pub theta_rad: f64,
}

impl BiasField {
    pub fn new(b_gauss: f64, theta_rad: f64) -> Result<Self, ModelError> {
        if !(b_gauss >= 0.0) {
            return Err(ModelError::InvalidField(format!(
                "b_gauss must be >= 0, got {b_gauss}"
            )));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta_rad) {
            return Err(ModelError::InvalidField(format!(
                "theta_rad must lie in [0, pi/2], got {theta_rad}"
            )));
        }
        Ok(BiasField { b_gauss, theta_rad })
    }

    pub fn from_degrees(b_gauss: f64, theta_deg: f64) -> Result<Self, ModelError> {
        Self::new(b_gauss, theta_deg.to_radians())
    }

    pub fn bx(&self) -> f64 {
        self.b_gauss * self.theta_rad.sin()
    }

    pub fn bz(&self) -> f64 {
        self.b_gauss * self.theta_rad.cos()
    }

    /// True when the field exceeds the perturbative-regime boundary. The
    /// model stays computable there; consumers decide whether to warn.
    pub fn beyond_perturbative_regime(&self) -> bool {
        self.b_gauss > PERTURBATIVE_LIMIT_GAUSS
    }
}

/// Enhancement factor kappa = gamma_e A_perp / (gamma_n D).
///
/// The 2π factors cancel, so the ordinary-frequency constants are used
/// directly. Positive for the ¹⁵NV defaults (both gyromagnetic ratios
/// negative).
pub fn kappa(c: &SpeciesConstants) -> Result<f64, ModelError> {
    if c.gamma_n_mhz_per_g == 0.0 {
        return Err(ModelError::ZeroDenominator("gamma_n"));
    }
    if c.d_mhz == 0.0 {
        return Err(ModelError::ZeroDenominator("D"));
    }
    Ok(c.gamma_e_mhz_per_g * c.a_perp_mhz / (c.gamma_n_mhz_per_g * c.d_mhz))
}

struct TensorOps {
    sx: CMat,
    sy: CMat,
    sz: CMat,
    ix: CMat,
    iy: CMat,
    iz: CMat,
}

fn tensor_ops(c: &SpeciesConstants) -> Result<TensorOps, ModelError> {
    let e = spincore::spin_operators(1.0)?;
    let n = spincore::spin_operators(c.nuclear_spin)?;
    let ie = spincore::identity(e.dim());
    let inuc = spincore::identity(n.dim());
    Ok(TensorOps {
        sx: spincore::tensor_product(&e.sx, &inuc)?,
        sy: spincore::tensor_product(&e.sy, &inuc)?,
        sz: spincore::tensor_product(&e.sz, &inuc)?,
        ix: spincore::tensor_product(&ie, &n.sx)?,
        iy: spincore::tensor_product(&ie, &n.sy)?,
        iz: spincore::tensor_product(&ie, &n.sz)?,
    })
}

fn scaled(m: &CMat, factor: f64) -> CMat {
    m.map(|z| z * C64::new(factor, 0.0))
}

/// Lab-frame ground-state Hamiltonian in rad/µs.
///
/// Basis ordering is electron ⊗ nuclear with both `sz` operators diagonal
/// descending, i.e. index = (2I+1)·(1 - m_s index shift) ... explicitly:
/// electron rows ordered m_s = +1, 0, -1 and nuclear columns ordered
/// m_I = +I … -I.
pub fn lab_hamiltonian(c: &SpeciesConstants, f: &BiasField) -> Result<CMat, ModelError> {
    c.validate()?;
    let ops = tensor_ops(c)?;
    let (bx, bz) = (f.bx(), f.bz());
    let mut h = scaled(&(&ops.sz * &ops.sz), c.d_mhz);
    h += scaled(&ops.sx, -c.gamma_e_mhz_per_g * bx);
    h += scaled(&ops.sz, -c.gamma_e_mhz_per_g * bz);
    h += scaled(&ops.ix, -c.gamma_n_mhz_per_g * bx);
    h += scaled(&ops.iz, -c.gamma_n_mhz_per_g * bz);
    h += scaled(&(&ops.sz * &ops.iz), c.a_par_mhz);
    h += scaled(&(&ops.sx * &ops.ix + &ops.sy * &ops.iy), c.a_perp_mhz);
    if c.q_mhz != 0.0 {
        h += scaled(&(&ops.iz * &ops.iz), c.q_mhz);
    }
    Ok(scaled(&h, TAU))
}

/// Rotating-frame Hamiltonian (rad/µs) after the secular reduction, in the
/// frame resonant with both electronic transitions. Block-diagonal in m_s.
pub fn rotating_hamiltonian(c: &SpeciesConstants, f: &BiasField) -> Result<CMat, ModelError> {
    c.validate()?;
    let k = kappa(c)?;
    let ops = tensor_ops(c)?;
    let (bx, bz) = (f.bx(), f.bz());
    let gn = c.gamma_n_mhz_per_g;
    let sz2 = &ops.sz * &ops.sz;
    let mut h = scaled(&(&ops.sz * &ops.iz), c.a_par_mhz);
    h += scaled(&ops.iz, -gn * bz);
    h += scaled(&ops.ix, -(1.0 - 2.0 * k) * gn * bx);
    h += scaled(&(&sz2 * &ops.ix), -3.0 * k * gn * bx);
    if c.q_mhz != 0.0 {
        h += scaled(&(&ops.iz * &ops.iz), c.q_mhz);
    }
    Ok(scaled(&h, TAU))
}

/// Effective nuclear fields in the primed frame (spin-independent field along
/// z'), per electronic spin state.
///
/// `beta_ms`, `phi_ms` and `omega_ms` are indexed by m_s + 1, i.e.
/// `[m_s = -1, m_s = 0, m_s = +1]`. For ¹⁴N the nuclear quadrupole
/// contributes its quantizing field |Q/γn| to `beta_ind`.
#[derive(Debug, Clone, Serialize)]
pub struct EffectiveFieldDecomposition {
    /// Magnitude of the spin-independent field, Gauss (along z').
    pub beta_ind: f64,
    /// Spin-dependent field components (βx', βz') in Gauss.
    pub beta_ms: [[f64; 2]; 3],
    /// Signed angle of each total field from z', radians.
    pub phi_ms: [f64; 3],
    /// Nuclear Larmor frequency for each electronic state, rad/µs.
    pub omega_ms: [f64; 3],
    pub kappa: f64,
}

fn ms_index(ms: i8) -> Result<usize, ModelError> {
    match ms {
        -1 | 0 | 1 => Ok((ms + 1) as usize),
        other => Err(ModelError::InvalidSpinState(other)),
    }
}

impl EffectiveFieldDecomposition {
    pub fn beta(&self, ms: i8) -> Result<[f64; 2], ModelError> {
        Ok(self.beta_ms[ms_index(ms)?])
    }

    pub fn phi(&self, ms: i8) -> Result<f64, ModelError> {
        Ok(self.phi_ms[ms_index(ms)?])
    }

    /// Larmor frequency in rad/µs.
    pub fn omega(&self, ms: i8) -> Result<f64, ModelError> {
        Ok(self.omega_ms[ms_index(ms)?])
    }

    /// Total effective field vector (x', z') seen by the nuclear spin for the
    /// electronic state `ms`, Gauss.
    pub fn total_field(&self, ms: i8) -> Result<[f64; 2], ModelError> {
        let [bx, bz] = self.beta(ms)?;
        Ok([bx, self.beta_ind + bz])
    }
}

/// Decomposes the rotating-frame nuclear Hamiltonian into the
/// spin-independent field and the per-m_s spin-dependent fields.
pub fn effective_field_decomposition(
    c: &SpeciesConstants,
    f: &BiasField,
) -> Result<EffectiveFieldDecomposition, ModelError> {
    c.validate()?;
    let k = kappa(c)?;
    let (bx, bz) = (f.bx(), f.bz());
    let gn = c.gamma_n_mhz_per_g;
    let apar_over_gn = c.a_par_mhz / gn;
    let bare = bz.hypot((1.0 - 2.0 * k) * bx);
    let quad_aug = if c.q_mhz != 0.0 { (c.q_mhz / gn).abs() } else { 0.0 };
    let beta_ind = bare + quad_aug;

    let mut beta_ms = [[0.0f64; 2]; 3];
    let mut phi_ms = [0.0f64; 3];
    let mut omega_ms = [0.0f64; 3];
    for ms in [-1i8, 0, 1] {
        let idx = (ms + 1) as usize;
        let m = ms as f64;
        let (bxp, bzp) = if beta_ind > 0.0 {
            (
                bx * (m * (1.0 - 2.0 * k) * apar_over_gn + m * m * 3.0 * k * bz) / beta_ind,
                (-m * apar_over_gn * bz + m * m * 3.0 * k * (1.0 - 2.0 * k) * bx * bx) / beta_ind,
            )
        } else {
            // B = 0 limit (I = 1/2): the spin-dependent field is purely the
            // hyperfine term along z, and z' falls back to z.
            (0.0, -m * apar_over_gn)
        };
        beta_ms[idx] = [bxp, bzp];
        let zc = beta_ind + bzp;
        phi_ms[idx] = if bxp == 0.0 && zc == 0.0 { 0.0 } else { bxp.atan2(zc) };
        omega_ms[idx] = TAU * gn.abs() * zc.hypot(bxp);
    }
    Ok(EffectiveFieldDecomposition { beta_ind, beta_ms, phi_ms, omega_ms, kappa: k })
}

/// Angle between the total effective fields of two electronic states,
/// in [0, pi].
pub fn relative_angle(
    d: &EffectiveFieldDecomposition,
    i: i8,
    j: i8,
) -> Result<f64, ModelError> {
    if i == j {
        return Err(ModelError::DegenerateStatePair(i));
    }
    let diff = (d.phi(i)? - d.phi(j)?).abs();
    Ok(if diff > std::f64::consts::PI { TAU - diff } else { diff })
}

/// Envelope beat frequency from the spin-independent contributions, rad/µs.
///
/// This is the closed form |γn| B sqrt(1 + 4(κ²-κ) sin²θ); it equals
/// |γn β_ind| for ¹⁵N. For ¹⁴N the beat of the vector model additionally
/// carries the quadrupole quantizing field; use
/// [`EffectiveFieldDecomposition::omega`] with m_s = 0 for that case.
pub fn omega0(c: &SpeciesConstants, f: &BiasField) -> Result<f64, ModelError> {
    let k = kappa(c)?;
    let s = f.theta_rad.sin();
    Ok(TAU
        * c.gamma_n_mhz_per_g.abs()
        * f.b_gauss
        * (1.0 + 4.0 * (k * k - k) * s * s).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spincore::{hermitian_eigensystem, hermiticity_error, HERMITICITY_TOL};
    use approx::assert_abs_diff_eq;

    fn n15() -> SpeciesConstants {
        SpeciesConstants::n15()
    }

    fn field(b: f64, theta_deg: f64) -> BiasField {
        BiasField::from_degrees(b, theta_deg).unwrap()
    }

    #[test]
    fn kappa_matches_quoted_value() {
        let k = kappa(&n15()).unwrap();
        // Eq.-level quotes: kappa ~ 8.26 and 1 - 2 kappa ~ -15.5.
        assert!((k - 8.26).abs() < 0.005, "kappa = {k}");
        assert!((1.0 - 2.0 * k + 15.5).abs() < 0.05);
        assert_abs_diff_eq!(k, 8.257710552744346, epsilon = 1e-12);
    }

    #[test]
    fn kappa_is_linear_in_a_perp() {
        let c = n15();
        let doubled = c.with_a_perp(2.0 * c.a_perp_mhz);
        assert_abs_diff_eq!(kappa(&doubled).unwrap(), 2.0 * kappa(&c).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn kappa_rejects_zero_denominator() {
        let mut c = n15();
        c.gamma_n_mhz_per_g = 0.0;
        assert!(matches!(kappa(&c), Err(ModelError::ZeroDenominator("gamma_n"))));
    }

    #[test]
    fn lab_hamiltonian_is_hermitian_and_sized() {
        for (c, dim) in [(n15(), 6), (SpeciesConstants::n14(), 9)] {
            let h = lab_hamiltonian(&c, &field(137.0, 23.0)).unwrap();
            assert_eq!(h.nrows(), dim);
            assert!(hermiticity_error(&h) < 1e-12 * h.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }

    #[test]
    fn lab_hamiltonian_zero_field_eigenvalue_clusters() {
        // Direct diagonalization: two levels near 0 and four near 2*pi*D,
        // all within A_perp (angular) of their cluster.
        let c = n15();
        let h = lab_hamiltonian(&c, &field(0.0, 0.0)).unwrap();
        let eig = hermitian_eigensystem(&h, HERMITICITY_TOL).unwrap();
        let a_perp_ang = TAU * c.a_perp_mhz;
        let d_ang = TAU * c.d_mhz;
        let near_zero = eig.values.iter().filter(|&&v| v.abs() < a_perp_ang).count();
        let near_d = eig.values.iter().filter(|&&v| (v - d_ang).abs() < a_perp_ang).count();
        assert_eq!(near_zero, 2);
        assert_eq!(near_d, 4);
    }

    #[test]
    fn lab_hamiltonian_conserves_total_z_projection_when_aligned() {
        // At Bx = 0 the conserved quantity is the total z projection
        // Sz + Iz (the transverse hyperfine term is a flip-flop).
        let c = n15();
        let h = lab_hamiltonian(&c, &field(100.0, 0.0)).unwrap();
        let e = spincore::spin_operators(1.0).unwrap();
        let n = spincore::spin_operators(0.5).unwrap();
        let total_z = spincore::tensor_product(&e.sz, &spincore::identity(2)).unwrap()
            + spincore::tensor_product(&spincore::identity(3), &n.sz).unwrap();
        let comm = &h * &total_z - &total_z * &h;
        assert!(comm.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-9);
    }

    #[test]
    fn aligned_splitting_matches_linear_zeeman() {
        // Exact-diagonalization branch splitting at an aligned 100 G field vs
        // 2|gamma_e|B; agreement well inside the quoted 0.15% bound.
        let c = n15();
        let h = lab_hamiltonian(&c, &field(100.0, 0.0)).unwrap();
        let eig = hermitian_eigensystem(&h, HERMITICITY_TOL).unwrap();
        // +1 and -1 branch centers from the eigenvalue clusters around D.
        let mut upper: Vec<f64> = eig.values.iter().map(|v| v / TAU).filter(|v| *v > 1000.0).collect();
        upper.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let minus = (upper[0] + upper[1]) / 2.0;
        let plus = (upper[2] + upper[3]) / 2.0;
        let lower_pair: Vec<f64> = eig.values.iter().map(|v| v / TAU).filter(|v| *v < 1000.0).collect();
        let zero = lower_pair.iter().sum::<f64>() / 2.0;
        let delta = (plus - zero) - (minus - zero);
        let expect = 2.0 * c.gamma_e_mhz_per_g.abs() * 100.0;
        assert!((delta - expect).abs() / expect < 0.0015, "delta = {delta}");
    }

    #[test]
    fn rotating_hamiltonian_is_block_diagonal_in_ms() {
        let c = n15();
        let h = rotating_hamiltonian(&c, &field(100.0, 15.0)).unwrap();
        let e = spincore::spin_operators(1.0).unwrap();
        let sz = spincore::tensor_product(&e.sz, &spincore::identity(2)).unwrap();
        let comm = &h * &sz - &sz * &h;
        assert!(comm.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10);
        assert!(hermiticity_error(&h) < 1e-12 * h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0));
    }

    #[test]
    fn rotating_hamiltonian_aligned_field_has_no_transverse_nuclear_terms() {
        let c = n15();
        let h = rotating_hamiltonian(&c, &field(100.0, 0.0)).unwrap();
        // All nuclear effective fields parallel to z: every off-diagonal
        // element within each m_s block vanishes.
        for block in 0..3 {
            let i = 2 * block;
            assert!(h[(i, i + 1)].norm() < 1e-14);
            assert!(h[(i + 1, i)].norm() < 1e-14);
        }
    }

    #[test]
    fn ms0_block_splitting_equals_omega0() {
        let c = n15();
        for (b, th) in [(100.0, 15.0), (40.0, 5.0), (140.0, 40.0), (90.08, 25.72), (200.0, 44.0)] {
            let f = field(b, th);
            let h = rotating_hamiltonian(&c, &f).unwrap();
            // m_s = 0 block occupies indices 2..4 (electron order +1, 0, -1).
            let block = h.view((2, 2), (2, 2)).into_owned();
            let eig = hermitian_eigensystem(&block, HERMITICITY_TOL).unwrap();
            let split = eig.values[1] - eig.values[0];
            let w0 = omega0(&c, &f).unwrap();
            assert_abs_diff_eq!(split, w0, epsilon = 1e-12 * w0.max(1.0));
        }
    }

    #[test]
    fn decomposition_aligned_field_is_axial() {
        let c = n15();
        let d = effective_field_decomposition(&c, &field(100.0, 0.0)).unwrap();
        assert_abs_diff_eq!(d.beta_ind, 100.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.phi(1).unwrap(), 0.0, epsilon = 1e-15);
        let [bx, _] = d.beta(1).unwrap();
        assert_abs_diff_eq!(bx, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn decomposition_matches_frozen_reference_values() {
        // Frozen from an independent numeric evaluation of the primed-frame
        // field expressions with the default constants.
        let c = n15();
        let d = effective_field_decomposition(&c, &field(100.0, 15.0)).unwrap();
        assert!((d.beta_ind - 413.0224033448454).abs() < 1e-9);
        assert!((d.phi(1).unwrap() - 1.3683968141250398).abs() < 1e-12);
        assert!((d.phi(1).unwrap().to_degrees() - 78.4).abs() < 0.01);
        assert!((d.omega(1).unwrap() / TAU - 3.0734296911551215).abs() < 1e-10);
        // omega_+1/2 within 2% of A_par/2 = 1.515 MHz.
        let half = d.omega(1).unwrap() / TAU / 2.0;
        assert!((half - 1.515).abs() / 1.515 < 0.02);
    }

    #[test]
    fn decomposition_ms0_invariants() {
        let c = n15();
        for (b, th) in [(100.0, 15.0), (50.0, 35.0), (0.0, 0.0)] {
            let f = field(b, th);
            let d = effective_field_decomposition(&c, &f).unwrap();
            let [bx, bz] = d.beta(0).unwrap();
            assert_eq!([bx, bz], [0.0, 0.0]);
            assert_abs_diff_eq!(d.phi(0).unwrap(), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(
                d.omega(0).unwrap(),
                TAU * c.gamma_n_mhz_per_g.abs() * d.beta_ind,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn phi_equals_geometric_angle_from_vectors() {
        let c = n15();
        for (b, th) in [(100.0, 15.0), (90.0, 10.0), (140.0, 40.0), (50.0, 35.0)] {
            let d = effective_field_decomposition(&c, &field(b, th)).unwrap();
            for ms in [-1i8, 0, 1] {
                let [x, z] = d.total_field(ms).unwrap();
                let zp_axis = [0.0, 1.0];
                let dot = z * zp_axis[1] + x * zp_axis[0];
                let norm = x.hypot(z);
                let geometric = (dot / norm).clamp(-1.0, 1.0).acos();
                assert_abs_diff_eq!(d.phi(ms).unwrap().abs(), geometric, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn relative_angle_matches_reference_configs() {
        let c = n15();
        // theta = 0: fields parallel.
        let d0 = effective_field_decomposition(&c, &field(80.0, 0.0)).unwrap();
        assert_abs_diff_eq!(relative_angle(&d0, 0, 1).unwrap(), 0.0, epsilon = 1e-12);
        // DQ pair nearly antiparallel at 50 G, 35 deg.
        let d1 = effective_field_decomposition(&c, &field(50.0, 35.0)).unwrap();
        let phi_dq = relative_angle(&d1, -1, 1).unwrap();
        assert!((phi_dq - std::f64::consts::PI).abs() < 0.2, "Phi = {phi_dq}");
        assert!((phi_dq - 3.065989217427355).abs() < 1e-10);
        // Phi_{0,+1} equals phi_{+1} at 100 G, 15 deg.
        let d2 = effective_field_decomposition(&c, &field(100.0, 15.0)).unwrap();
        assert_abs_diff_eq!(
            relative_angle(&d2, 0, 1).unwrap(),
            d2.phi(1).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn relative_angle_rejects_equal_states() {
        let c = n15();
        let d = effective_field_decomposition(&c, &field(50.0, 10.0)).unwrap();
        assert!(matches!(relative_angle(&d, 1, 1), Err(ModelError::DegenerateStatePair(1))));
    }

    #[test]
    fn omega0_reference_values() {
        let c = n15();
        // Aligned: |gamma_n| B = 43.16 kHz at 100 G.
        let w = omega0(&c, &field(100.0, 0.0)).unwrap() / TAU;
        assert_abs_diff_eq!(w, 0.04316, epsilon = 1e-12);
        // Frozen independent evaluation at 100 G, 15 deg.
        let w15 = omega0(&c, &field(100.0, 15.0)).unwrap() / TAU;
        assert!((w15 - 0.17826046928363523).abs() < 1e-12);
        // Paper configuration: prediction within 2-6% of the measured value.
        let wp = omega0(&c, &field(90.08, 25.72)).unwrap() / TAU;
        let disc = (0.2736 - wp) / 0.2736;
        assert!(disc > 0.02 && disc < 0.06, "discrepancy = {disc}");
    }

    #[test]
    fn omega0_equals_gamma_n_beta_ind() {
        let c = n15();
        for (b, th) in [(100.0, 15.0), (40.0, 5.0), (200.0, 44.9), (800.0, 60.0)] {
            let f = BiasField::from_degrees(b, th).unwrap();
            let d = effective_field_decomposition(&c, &f).unwrap();
            let w0 = omega0(&c, &f).unwrap();
            assert_abs_diff_eq!(
                w0,
                TAU * c.gamma_n_mhz_per_g.abs() * d.beta_ind,
                epsilon = 1e-9 * w0.max(1.0)
            );
        }
    }

    #[test]
    fn omega0_monotone_and_linear_in_b() {
        let c = n15();
        let mut prev = 0.0;
        for b in [10.0, 50.0, 100.0, 150.0, 200.0] {
            let w = omega0(&c, &field(b, 20.0)).unwrap();
            assert!(w > prev);
            prev = w;
        }
        let mut prev = -1.0;
        for th in [0.0, 10.0, 25.0, 45.0, 70.0, 90.0] {
            let w = omega0(&c, &field(120.0, th)).unwrap();
            assert!(w > prev, "theta = {th}");
            prev = w;
        }
        let w1 = omega0(&c, &field(70.0, 33.0)).unwrap();
        let w2 = omega0(&c, &field(140.0, 33.0)).unwrap();
        assert_abs_diff_eq!(w2, 2.0 * w1, epsilon = 1e-12 * w2);
    }

    #[test]
    fn n14_quadrupole_suppresses_relative_angle() {
        let c = SpeciesConstants::n14();
        let mut max_phi = 0.0f64;
        for bi in 1..=20 {
            let b = 10.0 * bi as f64;
            for ti in 0..=45 {
                let d = effective_field_decomposition(&c, &field(b, ti as f64)).unwrap();
                max_phi = max_phi.max(relative_angle(&d, 0, 1).unwrap());
            }
        }
        assert!(max_phi < 0.05, "max Phi = {max_phi}");
    }

    #[test]
    fn bias_field_validation() {
        assert!(BiasField::new(-1.0, 0.0).is_err());
        assert!(BiasField::new(10.0, 2.0).is_err());
        assert!(!field(100.0, 10.0).beyond_perturbative_regime());
        assert!(field(250.0, 10.0).beyond_perturbative_regime());
    }

    #[test]
    fn constants_validation() {
        assert!(n15().validate().is_ok());
        assert!(SpeciesConstants::n14().validate().is_ok());
        let mut bad = n15();
        bad.nuclear_spin = 1.0;
        assert!(bad.validate().is_err());
        let mut bad_q = n15();
        bad_q.q_mhz = -4.9;
        assert!(bad_q.validate().is_err());
    }
}
