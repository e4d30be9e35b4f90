//! Closed-form SQ and DQ Ramsey responses, envelope properties, and the
//! parametric models fitted against measured or simulated traces.
//!
//! Signals are returned as the m_s = 0 population in [0, 1]. The ±1-ranged
//! convention is available through [`bipolar`].

use crate::nv_model::{relative_angle, EffectiveFieldDecomposition, ModelError};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Coherence protocol of a Ramsey measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Protocol {
    /// Single-quantum, m_s = 0 and +1.
    #[serde(rename = "sq+")]
    SqPlus,
    /// Single-quantum, m_s = 0 and -1.
    #[serde(rename = "sq-")]
    SqMinus,
    /// Double-quantum, m_s = -1 and +1.
    #[serde(rename = "dq")]
    Dq,
}

impl Protocol {
    /// The pair of electronic spin states whose coherence is interrogated.
    pub fn state_pair(&self) -> (i8, i8) {
        match self {
            Protocol::SqPlus => (0, 1),
            Protocol::SqMinus => (0, -1),
            Protocol::Dq => (-1, 1),
        }
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Protocol::SqPlus => write!(f, "sq+"),
            Protocol::SqMinus => write!(f, "sq-"),
            Protocol::Dq => write!(f, "dq"),
        }
    }
}

/// Maps a population signal in [0, 1] to the ±1-ranged convention.
pub fn bipolar(population: f64) -> f64 {
    2.0 * population - 1.0
}

/// Single-quantum Ramsey population for the (0, ±1) coherence; `upper`
/// selects m_s = +1.
pub fn sq_signal(d: &EffectiveFieldDecomposition, tau_us: f64, upper: bool) -> f64 {
    let ms: i8 = if upper { 1 } else { -1 };
    let w0 = d.omega(0).expect("m_s = 0 always valid");
    let w1 = d.omega(ms).expect("m_s = ±1 always valid");
    let phi = relative_angle(d, 0, ms).expect("distinct states");
    let (a, b) = (w0 * tau_us / 2.0, w1 * tau_us / 2.0);
    0.5 * (1.0 - a.cos() * b.cos() + phi.cos() * a.sin() * b.sin())
}

/// Double-quantum Ramsey population for the (-1, +1) coherence.
pub fn dq_signal(d: &EffectiveFieldDecomposition, tau_us: f64) -> f64 {
    let wm = d.omega(-1).expect("valid state");
    let wp = d.omega(1).expect("valid state");
    let phi = relative_angle(d, -1, 1).expect("distinct states");
    let (a, b) = (wm * tau_us / 2.0, wp * tau_us / 2.0);
    0.5 * (1.0 + a.cos() * b.cos() - phi.cos() * a.sin() * b.sin())
}

/// Population signal for the given protocol.
pub fn protocol_signal(d: &EffectiveFieldDecomposition, protocol: Protocol, tau_us: f64) -> f64 {
    match protocol {
        Protocol::SqPlus => sq_signal(d, tau_us, true),
        Protocol::SqMinus => sq_signal(d, tau_us, false),
        Protocol::Dq => dq_signal(d, tau_us),
    }
}

/// Contrast-envelope summary of a modulated Ramsey signal.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnvelopeProperties {
    /// Envelope beat frequency, rad/µs.
    pub beat_omega0: f64,
    /// Relative contrast at modulation nodes, |cos Φ|.
    pub chi_min: f64,
    /// Always 1.
    pub chi_max: f64,
    /// Beat period 2π/ω₀, µs (infinite at zero field).
    pub period_us: f64,
}

/// Envelope properties for the protocol's state pair.
///
/// The beat frequency is the slower of the pair's two Larmor frequencies:
/// ω₀ for the SQ protocols, ω₋₁ for DQ.
pub fn envelope_properties(
    d: &EffectiveFieldDecomposition,
    protocol: Protocol,
) -> Result<EnvelopeProperties, ModelError> {
    let (i, j) = protocol.state_pair();
    let phi = relative_angle(d, i, j)?;
    let beat = d.omega(i)?.min(d.omega(j)?);
    Ok(EnvelopeProperties {
        beat_omega0: beat,
        chi_min: phi.cos().abs(),
        chi_max: 1.0,
        period_us: if beat > 0.0 { TAU / beat } else { f64::INFINITY },
    })
}

/// Instantaneous fringe-contrast envelope χ(τ) in [χ_min, 1].
///
/// The two-tone signal carries amplitudes (1 ± cos Φ)/2 on the sum and
/// difference tones; their coherent sum beats at the slower Larmor frequency.
pub fn envelope_factor(
    d: &EffectiveFieldDecomposition,
    protocol: Protocol,
    tau_us: f64,
) -> Result<f64, ModelError> {
    let (i, j) = protocol.state_pair();
    let phi = relative_angle(d, i, j)?;
    let beat = d.omega(i)?.min(d.omega(j)?);
    let a_sum = 0.5 * (1.0 + phi.cos().abs());
    let a_diff = 0.5 * (1.0 - phi.cos().abs());
    Ok((a_sum * a_sum + a_diff * a_diff + 2.0 * a_sum * a_diff * (beat * tau_us).cos()).sqrt())
}

/// Parameters of the nine-parameter EREEM fit model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EreemFitParams {
    /// Initial contrast.
    pub c0: f64,
    /// Dephasing time, µs.
    pub t2_star_us: f64,
    /// Stretch exponent.
    pub p: f64,
    /// Envelope beat frequency, rad/µs.
    pub omega0: f64,
    /// Fast tone frequency, rad/µs.
    pub omega_p1: f64,
    /// Angle between the participating effective nuclear fields, radians.
    pub phi: f64,
    /// Phase offset on the beat tone, radians.
    pub x0: f64,
    /// Phase offset on the fast tone, radians.
    pub x_p1: f64,
    /// Vertical baseline offset.
    pub y0: f64,
}

impl EreemFitParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.c0 > 0.0) {
            return Err(format!("c0 must be positive, got {}", self.c0));
        }
        if !(self.t2_star_us > 0.0) {
            return Err(format!("t2_star_us must be positive, got {}", self.t2_star_us));
        }
        if !(self.p > 0.0) {
            return Err(format!("p must be positive, got {}", self.p));
        }
        if !(self.omega0 < self.omega_p1) {
            return Err(format!(
                "omega0 ({}) must be below omega_p1 ({})",
                self.omega0, self.omega_p1
            ));
        }
        Ok(())
    }

    pub fn to_array(&self) -> [f64; 9] {
        [
            self.c0, self.t2_star_us, self.p, self.omega0, self.omega_p1, self.phi, self.x0,
            self.x_p1, self.y0,
        ]
    }

    pub fn from_array(a: &[f64]) -> Self {
        EreemFitParams {
            c0: a[0],
            t2_star_us: a[1],
            p: a[2],
            omega0: a[3],
            omega_p1: a[4],
            phi: a[5],
            x0: a[6],
            x_p1: a[7],
            y0: a[8],
        }
    }
}

/// Decaying two-tone EREEM model:
/// `C0 e^{-(τ/T2*)^p} [-cos(ω0 τ/2 + x0) cos(ω+1 τ/2 + x+1)
///  + cos Φ sin(ω0 τ/2 + x0) sin(ω+1 τ/2 + x+1)] + y0`.
pub fn ereem_fit_model(params: &EreemFitParams, tau_us: f64) -> f64 {
    let decay = (-(tau_us / params.t2_star_us).powf(params.p)).exp();
    let a = params.omega0 * tau_us / 2.0 + params.x0;
    let b = params.omega_p1 * tau_us / 2.0 + params.x_p1;
    params.c0 * decay * (-a.cos() * b.cos() + params.phi.cos() * a.sin() * b.sin()) + params.y0
}

/// Parameters of the four-tone EREEM model used with unequal detunings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FourToneParams {
    /// Detuning from the first hyperfine transition, rad/µs.
    pub delta_a: f64,
    /// Detuning from the second hyperfine transition, rad/µs.
    pub delta_b: f64,
    /// Envelope beat frequency splitting each detuning pair, rad/µs.
    pub omega0: f64,
    /// Amplitudes of the tones at |δa|±ω₀/2, |δb|±ω₀/2.
    pub amplitudes: [f64; 4],
    /// Phases of the four tones, radians.
    pub phases: [f64; 4],
    pub t2_star_us: f64,
    pub p: f64,
    pub y0: f64,
}

impl FourToneParams {
    /// Tone frequencies |δa| ± ω₀/2, |δb| ± ω₀/2, rad/µs.
    pub fn tone_frequencies(&self) -> [f64; 4] {
        let (da, db) = (self.delta_a.abs(), self.delta_b.abs());
        [
            da - self.omega0 / 2.0,
            da + self.omega0 / 2.0,
            db - self.omega0 / 2.0,
            db + self.omega0 / 2.0,
        ]
    }

    /// The detuning gap must dominate ω₀ for unambiguous tone assignment;
    /// `false` flags a violated resolvability condition.
    pub fn resolvable(&self) -> bool {
        (self.delta_a.abs() - self.delta_b.abs()).abs() > 2.0 * self.omega0
    }
}

/// Sum of four decaying cosines at the frequencies of
/// [`FourToneParams::tone_frequencies`].
pub fn four_tone_model(params: &FourToneParams, tau_us: f64) -> f64 {
    let decay = (-(tau_us / params.t2_star_us).powf(params.p)).exp();
    let freqs = params.tone_frequencies();
    let sum: f64 = freqs
        .iter()
        .zip(params.amplitudes.iter().zip(params.phases.iter()))
        .map(|(w, (a, x))| a * (w * tau_us + x).cos())
        .sum();
    decay * sum + params.y0
}
