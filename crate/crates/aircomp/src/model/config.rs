//! System parameters and the config-file schema.
//!
//! All dBm quantities are converted to watts once, at load; everything
//! downstream works in watts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config: {0}")]
    Invalid(String),
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Converts a dBm level to watts: `10^((p - 30) / 10)`.
pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    10f64.powf((p_dbm - 30.0) / 10.0)
}

/// All scalar parameters of one network plus the task and solver knobs.
///
/// Field names double as the keys of the TOML config file. Unknown keys are
/// rejected. Defaults reproduce the desk-scale setup: a 16-antenna edge node,
/// a 64-element surface with 8 active elements, 24 agents, 100-dimensional
/// features in 20 classes and 40 quantization bits.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[allow(non_snake_case)]
pub struct SystemConfig {
    /// Number of agents.
    pub K: usize,
    /// Antennas at the edge node.
    pub M: usize,
    /// Total reflecting elements.
    pub N: usize,
    /// Active (amplifying) reflecting elements.
    pub Na: usize,
    /// Feature-block length.
    pub D: usize,
    /// Modulation sequence length (complex symbols).
    pub J: usize,
    /// Total quantization bit budget.
    pub B: usize,
    /// Feature dimension (= T * D).
    pub W: usize,
    /// Number of classes.
    pub L: usize,

    /// Agent power budget (dBm).
    pub pA_dbm: f64,
    /// Surface amplification power budget (dBm).
    pub pR_dbm: f64,
    /// Amplification noise variance at active elements (dBm).
    pub sigmaR2_dbm: f64,
    /// Receiver noise variance per antenna (dBm).
    pub sigmaE2_dbm: f64,

    /// Upper bound on feature-block norms.
    pub beta: f64,
    /// Detection-MSE proportionality constant.
    pub eta: f64,
    /// Feature-extraction noise variance.
    pub sigmaF2: f64,
    /// Outer-loop convergence threshold (relative change of the surrogate).
    pub delta_out: f64,
    /// Inner-loop convergence threshold (relative change of the objective).
    pub delta_in: f64,

    /// Pathloss exponents for the agent-node, agent-surface and surface-node links.
    pub pathloss_ae: f64,
    pub pathloss_ar: f64,
    pub pathloss_re: f64,
    /// Rician factors for the same three links (`inf` = pure line of sight).
    pub rician_ae: f64,
    pub rician_ar: f64,
    pub rician_re: f64,

    /// Edge-node position (m).
    pub en_pos: [f64; 3],
    /// Surface position (m).
    pub ris_pos: [f64; 3],
    /// Center of the agent disc (m).
    pub agent_center: [f64; 3],
    /// Radius of the agent disc (m).
    pub agent_radius: f64,

    /// Scale of the class centroids (entries drawn i.i.d. N(0, scale^2)).
    pub gmm_mean_scale: f64,
    /// Diagonal feature variance (same for every dimension).
    pub gmm_cov: f64,

    /// Per-block bit floor and ceiling for the allocator.
    pub min_bits_per_block: usize,
    pub max_bits_per_block: usize,

    /// Correlation-matrix estimation: 1 = empirical epsilon, 2 = from features.
    pub correlation_mode: u8,
    /// Epsilon of estimation mode 1.
    pub correlation_eps: f64,
    /// Percentile of effective channel gains below which truncated-inversion
    /// baselines silence an agent.
    pub md_truncation_pct: f64,

    /// Inference rounds simulated per trial.
    pub rounds_per_trial: usize,
    /// Samples of the Monte-Carlo posterior-entropy estimate per trial.
    pub entropy_mc_samples: usize,
    /// Seed of the offline codebook training (shared across trials).
    pub codebook_seed: u64,
    /// Training samples per codeword for the Lloyd design.
    pub codebook_train_multiplier: usize,

    /// Weak-selection ratio of the sparse detector.
    pub swomp_weak_ratio: f64,
    /// Maximum detection stages.
    pub swomp_max_stages: usize,
    /// Relative residual-norm stopping tolerance of the detector.
    pub swomp_residual_tol: f64,

    /// Outer/inner iteration caps of the optimizer.
    pub outer_iter_cap: usize,
    pub inner_iter_cap: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            K: 24,
            M: 16,
            N: 64,
            Na: 8,
            D: 20,
            J: 70,
            B: 40,
            W: 100,
            L: 20,
            pA_dbm: 20.0,
            pR_dbm: 23.0,
            sigmaR2_dbm: -70.0,
            sigmaE2_dbm: -80.0,
            beta: 18.9,
            eta: 1.0,
            sigmaF2: 0.5,
            delta_out: 1e-5,
            delta_in: 1e-6,
            pathloss_ae: 3.7,
            pathloss_ar: 2.2,
            pathloss_re: 2.0,
            rician_ae: 0.0,
            rician_ar: 1.0,
            rician_re: f64::INFINITY,
            en_pos: [5.0, 0.0, 15.0],
            ris_pos: [0.0, 10.0, 15.0],
            agent_center: [25.0, 50.0, 0.0],
            agent_radius: 20.0,
            gmm_mean_scale: 0.3,
            gmm_cov: 1.0,
            min_bits_per_block: 1,
            max_bits_per_block: 12,
            correlation_mode: 1,
            correlation_eps: 0.6,
            md_truncation_pct: 20.0,
            rounds_per_trial: 10,
            entropy_mc_samples: 2000,
            codebook_seed: 0x5eed_c0de,
            codebook_train_multiplier: 64,
            swomp_weak_ratio: 0.5,
            swomp_max_stages: 10,
            swomp_residual_tol: 1e-6,
            outer_iter_cap: 50,
            inner_iter_cap: 500,
        }
    }
}

impl SystemConfig {
    /// Number of feature blocks `T = W / D`.
    pub fn t_blocks(&self) -> usize {
        self.W / self.D
    }

    pub fn p_a(&self) -> f64 {
        dbm_to_watts(self.pA_dbm)
    }

    pub fn p_r(&self) -> f64 {
        dbm_to_watts(self.pR_dbm)
    }

    pub fn sigma_r2(&self) -> f64 {
        dbm_to_watts(self.sigmaR2_dbm)
    }

    pub fn sigma_e2(&self) -> f64 {
        dbm_to_watts(self.sigmaE2_dbm)
    }

    /// Per-agent cap on `|nu|^2`, i.e. `P_A / (beta^2 J)`.
    pub fn nu_cap_sq(&self) -> f64 {
        self.p_a() / (self.beta * self.beta * self.J as f64)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::Invalid(msg));
        if self.K == 0 {
            return fail("K must be >= 1".into());
        }
        if self.M == 0 || self.N == 0 && self.Na > 0 {
            return fail("M must be >= 1 and Na requires N > 0".into());
        }
        if self.J == 0 {
            return fail("J must be >= 1".into());
        }
        if self.D < 2 {
            return fail("D must be >= 2".into());
        }
        if self.W == 0 || self.W % self.D != 0 {
            return fail(format!("W = {} must be a positive multiple of D = {}", self.W, self.D));
        }
        if self.Na > self.N {
            return fail(format!("Na = {} exceeds N = {}", self.Na, self.N));
        }
        if self.L < 2 {
            return fail("L must be >= 2".into());
        }
        let t = self.t_blocks();
        if self.min_bits_per_block == 0 || self.min_bits_per_block > self.max_bits_per_block {
            return fail("bit floor must satisfy 1 <= floor <= ceiling".into());
        }
        if self.B < t * self.min_bits_per_block {
            return fail(format!(
                "B = {} is below the floor {} bits ({} blocks x {} bits)",
                self.B,
                t * self.min_bits_per_block,
                t,
                self.min_bits_per_block
            ));
        }
        if self.B > t * self.max_bits_per_block {
            return fail(format!(
                "B = {} exceeds the ceiling {} bits ({} blocks x {} bits)",
                self.B,
                t * self.max_bits_per_block,
                t,
                self.max_bits_per_block
            ));
        }
        for (name, v) in [
            ("pA_dbm", self.pA_dbm),
            ("pR_dbm", self.pR_dbm),
            ("sigmaR2_dbm", self.sigmaR2_dbm),
            ("sigmaE2_dbm", self.sigmaE2_dbm),
        ] {
            if !v.is_finite() {
                return fail(format!("{name} must be finite"));
            }
        }
        if !(self.beta > 0.0) || !(self.eta > 0.0) {
            return fail("beta and eta must be positive".into());
        }
        if self.sigmaF2 < 0.0 {
            return fail("sigmaF2 must be non-negative".into());
        }
        for (name, v) in [("delta_out", self.delta_out), ("delta_in", self.delta_in)] {
            if !(v > 0.0 && v < 1.0) {
                return fail(format!("{name} must lie in (0, 1)"));
            }
        }
        for (name, v) in [
            ("rician_ae", self.rician_ae),
            ("rician_ar", self.rician_ar),
            ("rician_re", self.rician_re),
        ] {
            if v < 0.0 {
                return fail(format!("{name} must be >= 0 (or inf)"));
            }
        }
        if !(self.agent_radius > 0.0) {
            return fail("agent_radius must be positive".into());
        }
        if self.correlation_mode != 1 && self.correlation_mode != 2 {
            return fail("correlation_mode must be 1 or 2".into());
        }
        if !(0.0..=1.0).contains(&self.correlation_eps) {
            return fail("correlation_eps must lie in [0, 1]".into());
        }
        if !(0.0..=100.0).contains(&self.md_truncation_pct) {
            return fail("md_truncation_pct must lie in [0, 100]".into());
        }
        if self.rounds_per_trial == 0 {
            return fail("rounds_per_trial must be >= 1".into());
        }
        if self.gmm_cov <= 0.0 || self.gmm_mean_scale < 0.0 {
            return fail("gmm_cov must be positive and gmm_mean_scale non-negative".into());
        }
        // An active surface whose idle amplification noise already exhausts the
        // power budget cannot run at any useful amplitude.
        if self.sigma_r2() * self.Na as f64 > self.p_r() {
            return fail(format!(
                "amplification noise alone ({} W over {} active elements) exceeds pR",
                self.sigma_r2() * self.Na as f64,
                self.Na
            ));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: SystemConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_conversion() {
        assert_eq!(dbm_to_watts(30.0), 1.0);
        assert!((dbm_to_watts(20.0) - 0.1).abs() < 1e-15);
        assert!((dbm_to_watts(0.0) - 0.001).abs() < 1e-18);
    }

    #[test]
    fn defaults_validate() {
        let cfg = SystemConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.t_blocks(), 5);
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = SystemConfig::from_toml_str("K = 4\nbogus_key = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)));
    }

    #[test]
    fn rejects_bad_block_split() {
        let mut cfg = SystemConfig::default();
        cfg.W = 101;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rejects_bit_budget_outside_box() {
        let mut cfg = SystemConfig::default();
        cfg.B = 3; // below 5 blocks x 1 bit
        assert!(cfg.validate().is_err());
        cfg.B = 5 * cfg.max_bits_per_block + 1;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn parses_partial_toml_with_defaults() {
        let cfg = SystemConfig::from_toml_str("K = 12\nB = 20\nrician_re = inf\n").unwrap();
        assert_eq!(cfg.K, 12);
        assert_eq!(cfg.B, 20);
        assert_eq!(cfg.M, 16);
        assert!(cfg.rician_re.is_infinite());
    }
}
