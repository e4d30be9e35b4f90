//! Simulation and analysis toolkit for electron Ramsey envelope modulation
//! (EREEM) in NV-diamond magnetometry.
//!
//! The crate is organized in layers:
//!
//! - [`spincore`] — dense complex linear algebra for small Hilbert spaces:
//!   spin operators, tensor products, Hermitian eigendecomposition, unitary
//!   propagation.
//! - [`nv_model`] — physical constants, NV ground-state Hamiltonians, and the
//!   effective-nuclear-field vector model.
//! - [`ramsey_analytic`] — closed-form SQ/DQ Ramsey responses, envelope
//!   properties, and the parametric fit models.
//! - [`pulse_sim`] — full-Hamiltonian time-domain simulation of Ramsey
//!   sequences with explicit microwave drive.
//! - [`fitting`] — damped least-squares engine, fit pipelines, and bootstrap
//!   confidence intervals.
//! - [`sensitivity`] — shot-noise-limited sensitivity, optimal working
//!   points, and 2-D maps.
//! - [`calibration`] — bias-field estimation from ODMR splittings and
//!   microwave center-frequency calibration.
//! - [`cli`] — batch front end: JSON run configs, CSV/JSON emission, figure
//!   bundles.
//!
//! Unit conventions: frequencies cross module boundaries in MHz (ordinary
//! frequency) and fields in Gauss; internal dynamical quantities use angular
//! frequency in rad/µs and time in µs. The 2π conversion happens exactly once,
//! at the boundary.

pub mod calibration;
pub mod cli;
pub mod fitting;
pub mod nv_model;
pub mod pulse_sim;
pub mod ramsey_analytic;
pub mod sensitivity;
pub mod spectrum;
pub mod spincore;
