//! Effective channels, the received-signal equation and link power terms.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use super::channel::{complex_gaussian, ChannelSet};
use super::correlation::CorrelationMatrix;
use super::ris::HybridRisState;

/// Effective channel of agent `k`: the direct path plus the reflected path,
/// `h_k = h_ae_k + H_re Phi h_ar_k`.
pub fn effective_channel(
    channels: &ChannelSet,
    ris: &HybridRisState,
    k: usize,
) -> DVector<Complex64> {
    let d = ris.diag();
    let reflected = DVector::from_fn(d.len(), |n, _| d[n] * channels.h_ar[k][n]);
    &channels.h_ae[k] + &channels.h_re * reflected
}

/// Receive-side combination of the surface path: `Phi_a H_re^T b`, nonzero
/// only at active indices.
pub fn surface_noise_vector(
    channels: &ChannelSet,
    ris: &HybridRisState,
    b: &DVector<Complex64>,
) -> DVector<Complex64> {
    let ht_b = channels.h_re.transpose() * b;
    let d_a = ris.diag_active();
    DVector::from_fn(d_a.len(), |n, _| d_a[n] * ht_b[n])
}

/// Simulates one received sequence `y = [sum_k nu_k s_k h_k^T + Z_r Phi_a
/// H_re^T + Z_e] b`.
///
/// Amplification noise enters only through the active elements, with variance
/// `sigma_r2` per complex entry; receiver noise has variance `sigma_e2` per
/// antenna entry.
#[allow(clippy::too_many_arguments)]
pub fn simulate_uplink<R: Rng + ?Sized>(
    signals: &[DVector<Complex64>],
    nu: &[Complex64],
    channels: &ChannelSet,
    ris: &HybridRisState,
    b: &DVector<Complex64>,
    sigma_r2: f64,
    sigma_e2: f64,
    rng: &mut R,
) -> DVector<Complex64> {
    assert_eq!(signals.len(), nu.len(), "one transmit coefficient per agent");
    let j = signals.first().map_or(0, |s| s.len());
    let mut y = DVector::from_element(j, Complex64::ZERO);
    for (k, s) in signals.iter().enumerate() {
        let gain = nu[k] * effective_channel(channels, ris, k).dot(b);
        y.axpy(gain, s, Complex64::ONE);
    }
    let v = surface_noise_vector(channels, ris, b);
    let sd_r = (sigma_r2).sqrt();
    for row in 0..j {
        let mut z = Complex64::ZERO;
        for &n in ris.active_set() {
            z += complex_gaussian(rng) * sd_r * v[n];
        }
        y[row] += z;
    }
    let sd_e = (sigma_e2).sqrt();
    for row in 0..j {
        let mut z = Complex64::ZERO;
        for m in 0..b.len() {
            z += complex_gaussian(rng) * sd_e * b[m];
        }
        y[row] += z;
    }
    y
}

/// Amplification power drawn by the active elements:
/// `tr[Phi_a^H (beta^2 J sum_kk' u_kk' nu_k^* nu_k' h_ar_k^* h_ar_k'^T +
/// sigma_r2 I) Phi_a]`.
///
/// Only diagonal entries of the inner matrix survive the trace, so this is a
/// weighted sum of squared active amplitudes.
pub fn ris_amplification_power(
    ris: &HybridRisState,
    nu: &[Complex64],
    channels: &ChannelSet,
    u: &CorrelationMatrix,
    beta: f64,
    j: usize,
    sigma_r2: f64,
) -> f64 {
    let k = nu.len();
    let scale = beta * beta * j as f64;
    let mut total = 0.0;
    for &n in ris.active_set() {
        let mut signal = Complex64::ZERO;
        for a in 0..k {
            for b in 0..k {
                signal += Complex64::from(u.get(a, b))
                    * nu[a].conj()
                    * nu[b]
                    * channels.h_ar[a][n].conj()
                    * channels.h_ar[b][n];
            }
        }
        debug_assert!(signal.im.abs() < 1e-9 * (1.0 + signal.re.abs()));
        let amp = ris.amplitudes()[n];
        total += amp * amp * (scale * signal.re + sigma_r2);
    }
    total
}

/// Misalignment quadratic form `sum_kk' u_kk' (g_k - 1)^* (g_k' - 1)` where
/// `g_k = nu_k h_k^T b` is the end-to-end gain of agent `k`. Real and
/// non-negative for a positive semidefinite correlation matrix.
pub fn misalignment_quadratic(gains: &[Complex64], u: &CorrelationMatrix) -> f64 {
    let k = gains.len();
    let mut acc = Complex64::ZERO;
    for a in 0..k {
        for b in 0..k {
            acc += Complex64::from(u.get(a, b))
                * (gains[a] - Complex64::ONE).conj()
                * (gains[b] - Complex64::ONE);
        }
    }
    debug_assert!(acc.im.abs() < 1e-9 * (1.0 + acc.re.abs()));
    acc.re
}

/// Per-symbol noise power after combining: `sigma_r2 ||Phi_a H_re^T b||^2 +
/// sigma_e2 ||b||^2`.
pub fn receive_noise_power(
    channels: &ChannelSet,
    ris: &HybridRisState,
    b: &DVector<Complex64>,
    sigma_r2: f64,
    sigma_e2: f64,
) -> f64 {
    sigma_r2 * surface_noise_vector(channels, ris, b).norm_squared() + sigma_e2 * b.norm_squared()
}
