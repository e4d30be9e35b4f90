//! Periodogram, peak refinement, and numeric envelope extraction shared by
//! the analytic-signal tests, the fit initializer, and the simulation
//! cross-check.

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("tau grid is not uniform (relative spacing error {0:.3e})")]
    NonUniformGrid(f64),
}

/// One-sided power spectrum of a uniformly sampled real signal.
#[derive(Debug, Clone)]
pub struct Periodogram {
    /// Ordinary frequency per bin, MHz (for tau in µs).
    pub freq_mhz: Vec<f64>,
    pub power: Vec<f64>,
    pub bin_width_mhz: f64,
}

/// A refined spectral peak.
#[derive(Debug, Clone, Copy)]
pub struct Peak {
    pub freq_mhz: f64,
    pub power: f64,
}

fn check_uniform(tau_us: &[f64]) -> Result<f64, SpectrumError> {
    if tau_us.len() < 4 {
        return Err(SpectrumError::TooShort { needed: 4, got: tau_us.len() });
    }
    let dt = tau_us[1] - tau_us[0];
    let mut worst = 0.0f64;
    for w in tau_us.windows(2) {
        worst = worst.max(((w[1] - w[0]) - dt).abs() / dt.abs().max(1e-300));
    }
    if worst > 1e-6 {
        return Err(SpectrumError::NonUniformGrid(worst));
    }
    Ok(dt)
}

/// Hann-windowed, mean-detrended, zero-padded periodogram.
///
/// `pad_factor` multiplies the FFT length (rounded up to a power of two) for
/// smoother interpolation between bins; `bin_width_mhz` still reports the
/// padded bin spacing.
pub fn periodogram(
    tau_us: &[f64],
    values: &[f64],
    pad_factor: usize,
) -> Result<Periodogram, SpectrumError> {
    let dt = check_uniform(tau_us)?;
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let nfft = (n * pad_factor.max(1)).next_power_of_two();
    let mut buf = vec![C64::new(0.0, 0.0); nfft];
    for (k, v) in values.iter().enumerate() {
        let w = 0.5 * (1.0 - (std::f64::consts::TAU * k as f64 / (n - 1) as f64).cos());
        buf[k] = C64::new((v - mean) * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);
    let half = nfft / 2;
    let bin = 1.0 / (nfft as f64 * dt);
    let freq_mhz = (0..half).map(|k| k as f64 * bin).collect();
    let power = buf[..half].iter().map(|z| z.norm_sqr()).collect();
    Ok(Periodogram { freq_mhz, power, bin_width_mhz: bin })
}

fn parabolic_refine(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let denom = y[0] - 2.0 * y[1] + y[2];
    if denom.abs() < 1e-300 {
        return (x[1], y[1]);
    }
    let delta = 0.5 * (y[0] - y[2]) / denom;
    let dx = x[1] - x[0];
    let xr = x[1] + delta.clamp(-1.0, 1.0) * dx;
    let yr = y[1] - 0.25 * (y[0] - y[2]) * delta;
    (xr, yr)
}

/// Local maxima above `threshold_rel` times the global maximum, refined by
/// parabolic interpolation of the three bins around each maximum. Sorted by
/// frequency.
pub fn peaks(p: &Periodogram, threshold_rel: f64) -> Vec<Peak> {
    let pmax = p.power.iter().cloned().fold(0.0f64, f64::max);
    let floor = threshold_rel * pmax;
    let mut out = Vec::new();
    for k in 1..p.power.len().saturating_sub(1) {
        let (a, b, c) = (p.power[k - 1], p.power[k], p.power[k + 1]);
        if b >= floor && b > a && b >= c {
            let (f, pw) = parabolic_refine(
                [p.freq_mhz[k - 1], p.freq_mhz[k], p.freq_mhz[k + 1]],
                [a, b, c],
            );
            out.push(Peak { freq_mhz: f, power: pw });
        }
    }
    out
}

/// The two strongest peaks, returned as (lower frequency, higher frequency).
pub fn two_strongest_peaks(p: &Periodogram, threshold_rel: f64) -> Option<(Peak, Peak)> {
    let mut found = peaks(p, threshold_rel);
    if found.len() < 2 {
        return None;
    }
    found.sort_by(|a, b| b.power.partial_cmp(&a.power).unwrap());
    let (mut a, mut b) = (found[0], found[1]);
    if a.freq_mhz > b.freq_mhz {
        std::mem::swap(&mut a, &mut b);
    }
    Some((a, b))
}

/// Two-tone frequency estimate from the strongest pair of spectral peaks.
#[derive(Debug, Clone, Copy)]
pub struct TwoToneEstimate {
    /// Sum of the two peak frequencies, rad/µs (the fast fit frequency).
    pub omega_sum: f64,
    /// Difference of the two peak frequencies, rad/µs (the beat frequency).
    pub omega_split: f64,
}

pub fn two_tone_estimate(tau_us: &[f64], values: &[f64]) -> Option<TwoToneEstimate> {
    let p = periodogram(tau_us, values, 8).ok()?;
    let (lo, hi) = two_strongest_peaks(&p, 0.02)?;
    Some(TwoToneEstimate {
        omega_sum: std::f64::consts::TAU * (lo.freq_mhz + hi.freq_mhz),
        omega_split: std::f64::consts::TAU * (hi.freq_mhz - lo.freq_mhz),
    })
}

/// Envelope samples of an oscillating signal: sub-sample-refined local maxima
/// of the squared signal, one per half fringe period. Input should be
/// zero-centered (e.g. `2 S - 1` for a population signal).
pub fn envelope_samples(tau_us: &[f64], bipolar: &[f64]) -> Vec<(f64, f64)> {
    let sq: Vec<f64> = bipolar.iter().map(|v| v * v).collect();
    let mut out = Vec::new();
    for k in 1..sq.len().saturating_sub(1) {
        if sq[k] > sq[k - 1] && sq[k] >= sq[k + 1] && sq[k] > 0.0 {
            let (t, a2) = parabolic_refine(
                [tau_us[k - 1], tau_us[k], tau_us[k + 1]],
                [sq[k - 1], sq[k], sq[k + 1]],
            );
            out.push((t, a2.max(0.0).sqrt()));
        }
    }
    out
}

/// Extreme envelope values over a beat, each refined by a parabola through
/// the neighboring envelope samples. Returns (min, max).
pub fn envelope_extrema(samples: &[(f64, f64)]) -> Option<(f64, f64)> {
    if samples.len() < 3 {
        return None;
    }
    let mut min_v = f64::INFINITY;
    let mut max_v = f64::NEG_INFINITY;
    for w in samples.windows(3) {
        let [(x0, y0), (x1, y1), (x2, y2)] = [w[0], w[1], w[2]];
        if y1 <= y0 && y1 <= y2 {
            let (_, y) = parabolic_refine([x0, x1, x2], [y0, y1, y2]);
            min_v = min_v.min(y);
        }
        if y1 >= y0 && y1 >= y2 {
            let (_, y) = parabolic_refine([x0, x1, x2], [y0, y1, y2]);
            max_v = max_v.max(y);
        }
    }
    // Endpoints still bound the extrema when no interior extremum exists.
    for &(_, y) in [samples.first().unwrap(), samples.last().unwrap()] {
        min_v = min_v.min(y);
        max_v = max_v.max(y);
    }
    Some((min_v, max_v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|k| k as f64 * dt).collect()
    }

    #[test]
    fn single_tone_peak_is_recovered_to_sub_bin_accuracy() {
        let tau = grid(4096, 0.01);
        let f0 = 3.1417; // MHz
        let vals: Vec<f64> = tau.iter().map(|t| (TAU * f0 * t).cos()).collect();
        let p = periodogram(&tau, &vals, 8).unwrap();
        let pk = peaks(&p, 0.5);
        assert_eq!(pk.len(), 1);
        assert!((pk[0].freq_mhz - f0).abs() < 0.2 * p.bin_width_mhz);
    }

    #[test]
    fn two_tone_estimate_recovers_sum_and_split() {
        let tau = grid(8192, 0.01);
        let (fa, fb) = (1.437, 1.671);
        let vals: Vec<f64> = tau
            .iter()
            .map(|t| 0.7 * (TAU * fa * t).cos() + 0.3 * (TAU * fb * t).cos())
            .collect();
        let est = two_tone_estimate(&tau, &vals).unwrap();
        assert!((est.omega_sum / TAU - (fa + fb)).abs() < 0.002);
        assert!((est.omega_split / TAU - (fb - fa)).abs() < 0.002);
    }

    #[test]
    fn envelope_of_beating_tone_tracks_modulation() {
        let tau = grid(60000, 0.002);
        // amplitude modulation between 0.2 and 1.0
        let vals: Vec<f64> = tau
            .iter()
            .map(|t| {
                let env = 0.6 + 0.4 * (TAU * 0.05 * t).cos();
                env * (TAU * 2.0 * t).cos()
            })
            .collect();
        let samples = envelope_samples(&tau, &vals);
        assert!(samples.len() > 100);
        let (lo, hi) = envelope_extrema(&samples).unwrap();
        assert!((hi - 1.0).abs() < 1e-3, "hi = {hi}");
        assert!((lo - 0.2).abs() < 1e-3, "lo = {lo}");
    }

    #[test]
    fn non_uniform_grid_is_rejected() {
        let mut tau = grid(64, 0.01);
        tau[10] += 0.004;
        let vals = vec![0.0; 64];
        assert!(matches!(periodogram(&tau, &vals, 1), Err(SpectrumError::NonUniformGrid(_))));
    }
}
