//! Rician channel generation from node geometry.
//!
//! Every link follows `h = sqrt(1e-3 d^-theta) (sqrt(chi/(1+chi)) h_los +
//! sqrt(1/(1+chi)) h_nlos)` with the line-of-sight part built from
//! uniform-linear-array steering vectors at half-wavelength spacing and the
//! scattered part i.i.d. standard complex Gaussian. Arrays are laid out along
//! the global x axis, so a steering angle is the direction cosine of the link
//! w.r.t. that axis.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::config::SystemConfig;
use super::ModelError;

/// One standard complex Gaussian sample, CN(0, 1).
pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Unit-modulus steering vector of an `n`-element half-wavelength array:
/// entry `k` is `exp(j pi k sin_theta)`.
pub fn steering_vector(n: usize, sin_theta: f64) -> DVector<Complex64> {
    DVector::from_fn(n, |k, _| {
        Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 * sin_theta)
    })
}

/// Draws a `rows x cols` Rician channel.
///
/// `rician_factor` may be infinite (pure line of sight, deterministic) or zero
/// (pure scattering). The LoS part is the outer product of the receive and
/// transmit steering vectors for the given direction cosines; its entries all
/// have unit modulus, so the expected squared Frobenius norm of the output is
/// `rows * cols * 1e-3 * d^-exponent` regardless of the factor.
pub fn generate_rician_channel<R: Rng + ?Sized>(
    distance: f64,
    exponent: f64,
    rician_factor: f64,
    rows: usize,
    cols: usize,
    sin_rx: f64,
    sin_tx: f64,
    rng: &mut R,
) -> Result<DMatrix<Complex64>, ModelError> {
    if !(distance > 0.0) {
        return Err(ModelError::Parameter(format!(
            "link distance must be positive, got {distance}"
        )));
    }
    if rician_factor < 0.0 {
        return Err(ModelError::Parameter("Rician factor must be >= 0".into()));
    }
    let gain = (1e-3 * distance.powf(-exponent)).sqrt();
    let (w_los, w_nlos) = if rician_factor.is_infinite() {
        (1.0, 0.0)
    } else {
        (
            (rician_factor / (1.0 + rician_factor)).sqrt(),
            (1.0 / (1.0 + rician_factor)).sqrt(),
        )
    };
    let a_rx = steering_vector(rows, sin_rx);
    let a_tx = steering_vector(cols, sin_tx);
    let mut h = DMatrix::from_fn(rows, cols, |r, c| a_rx[r] * a_tx[c] * w_los);
    if w_nlos > 0.0 {
        for v in h.iter_mut() {
            *v += complex_gaussian(rng) * w_nlos;
        }
    }
    Ok(h * Complex64::from(gain))
}

/// The three channel groups of one network realization.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    /// Direct agent-to-node channels, one length-M vector per agent.
    pub h_ae: Vec<DVector<Complex64>>,
    /// Agent-to-surface channels, one length-N vector per agent.
    pub h_ar: Vec<DVector<Complex64>>,
    /// Surface-to-node channel, M x N.
    pub h_re: DMatrix<Complex64>,
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Direction cosine of the link `from -> to` against the x axis of the array
/// sitting at `at`.
fn direction_cosine(at: [f64; 3], toward: [f64; 3]) -> f64 {
    (toward[0] - at[0]) / dist(at, toward)
}

/// Draws agent positions uniformly over the configured disc (z = center z).
pub fn agent_positions<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Vec<[f64; 3]> {
    (0..cfg.K)
        .map(|_| {
            let r = cfg.agent_radius * rng.random::<f64>().sqrt();
            let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            [
                cfg.agent_center[0] + r * phi.cos(),
                cfg.agent_center[1] + r * phi.sin(),
                cfg.agent_center[2],
            ]
        })
        .collect()
}

impl ChannelSet {
    /// Generates all channels of one realization from the node geometry.
    pub fn generate<R: Rng + ?Sized>(
        cfg: &SystemConfig,
        positions: &[[f64; 3]],
        rng: &mut R,
    ) -> Result<Self, ModelError> {
        if positions.len() != cfg.K {
            return Err(ModelError::Dimension(format!(
                "expected {} agent positions, got {}",
                cfg.K,
                positions.len()
            )));
        }
        let mut h_ae = Vec::with_capacity(cfg.K);
        let mut h_ar = Vec::with_capacity(cfg.K);
        for p in positions {
            let d_ae = dist(*p, cfg.en_pos);
            let d_ar = dist(*p, cfg.ris_pos);
            h_ae.push(
                generate_rician_channel(
                    d_ae,
                    cfg.pathloss_ae,
                    cfg.rician_ae,
                    cfg.M,
                    1,
                    direction_cosine(cfg.en_pos, *p),
                    0.0,
                    rng,
                )?
                .column(0)
                .into_owned(),
            );
            h_ar.push(
                generate_rician_channel(
                    d_ar,
                    cfg.pathloss_ar,
                    cfg.rician_ar,
                    cfg.N,
                    1,
                    direction_cosine(cfg.ris_pos, *p),
                    0.0,
                    rng,
                )?
                .column(0)
                .into_owned(),
            );
        }
        let h_re = generate_rician_channel(
            dist(cfg.ris_pos, cfg.en_pos),
            cfg.pathloss_re,
            cfg.rician_re,
            cfg.M,
            cfg.N,
            direction_cosine(cfg.en_pos, cfg.ris_pos),
            direction_cosine(cfg.ris_pos, cfg.en_pos),
            rng,
        )?;
        Ok(Self { h_ae, h_ar, h_re })
    }
}
