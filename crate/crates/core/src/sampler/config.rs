use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("walk length k must be at least 1")]
    ZeroLength,
    #[error("epsilon {0} outside (0, 1/2)")]
    Epsilon(f64),
    #[error("b must be at least 1")]
    ZeroBatch,
    #[error("constant {name} = {value} must be positive")]
    Constant { name: &'static str, value: f64 },
    #[error("faithful mode computes eta and s itself; overrides are not accepted")]
    OverrideInFaithfulMode,
    #[error("eta = {eta} with k = {k}: lab mode needs 0 < eta < 1/k")]
    Eta { eta: f64, k: usize },
    #[error("s = {s} is smaller than b = {b}")]
    TooFewInstances { s: usize, b: usize },
    #[error("s = {s:.3e} instances exceeds the budget of {budget}")]
    BudgetExceeded { s: f64, budget: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `eta` and `s` come from the asymptotic formulas.
    Faithful,
    /// `eta` (and optionally `s`) are supplied directly.
    #[default]
    Lab,
}

/// Tunables for the walk sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub k: usize,
    pub epsilon: f64,
    pub b: usize,
    /// Constant in `eta = eps^8 * 2^(-C k)`.
    pub c_eta: f64,
    /// Constant in the estimator batch size `b = D / eps^2`.
    pub d_batch: f64,
    pub eta_override: Option<f64>,
    pub s_override: Option<usize>,
    pub mode: Mode,
    pub seed: u64,
    /// Largest instance count a run may allocate.
    pub s_budget: usize,
    /// Worker threads sharing the pass; output does not depend on it.
    pub shards: usize,
}

pub const DEFAULT_C: f64 = 8.0;
pub const DEFAULT_D: f64 = 100.0;
pub const DEFAULT_S_BUDGET: usize = 20_000_000;

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            k: 1,
            epsilon: 0.25,
            b: 1,
            c_eta: DEFAULT_C,
            d_batch: DEFAULT_D,
            eta_override: None,
            s_override: None,
            mode: Mode::Lab,
            seed: 0,
            s_budget: DEFAULT_S_BUDGET,
            shards: 1,
        }
    }
}

impl SamplerConfig {
    pub fn lab(k: usize, eta: f64, b: usize, seed: u64) -> Self {
        SamplerConfig {
            k,
            b,
            eta_override: Some(eta),
            seed,
            ..Default::default()
        }
    }

    pub fn faithful(k: usize, epsilon: f64, b: usize, seed: u64) -> Self {
        SamplerConfig {
            k,
            epsilon,
            b,
            mode: Mode::Faithful,
            seed,
            ..Default::default()
        }
    }

    pub fn with_instances(mut self, s: usize) -> Self {
        self.s_override = Some(s);
        self
    }

    /// `eps^8 * 2^(-C k)`.
    pub fn faithful_eta(&self) -> f64 {
        self.epsilon.powi(8) * (-self.c_eta * self.k as f64).exp2()
    }

    /// `b * 100 * eta^(-k) * k!` at the given `eta`, as a real number.
    pub fn instance_formula(&self, eta: f64) -> f64 {
        let fact: f64 = (1..=self.k).map(|i| i as f64).product();
        self.b as f64 * 100.0 * eta.powi(-(self.k as i32)) * fact
    }

    fn check_common(&self) -> Result<(), ConfigError> {
        if self.k == 0 {
            return Err(ConfigError::ZeroLength);
        }
        if self.b == 0 {
            return Err(ConfigError::ZeroBatch);
        }
        if !(self.c_eta > 0.0) {
            return Err(ConfigError::Constant { name: "C", value: self.c_eta });
        }
        if !(self.d_batch > 0.0) {
            return Err(ConfigError::Constant { name: "D", value: self.d_batch });
        }
        Ok(())
    }

    /// Step window width.
    pub fn eta(&self) -> Result<f64, ConfigError> {
        self.check_common()?;
        match self.mode {
            Mode::Faithful => {
                if self.eta_override.is_some() || self.s_override.is_some() {
                    return Err(ConfigError::OverrideInFaithfulMode);
                }
                if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
                    return Err(ConfigError::Epsilon(self.epsilon));
                }
                Ok(self.faithful_eta())
            }
            Mode::Lab => {
                let eta = self.eta_override.unwrap_or_else(|| self.faithful_eta());
                if !(eta > 0.0 && eta * (self.k as f64) < 1.0) {
                    return Err(ConfigError::Eta { eta, k: self.k });
                }
                Ok(eta)
            }
        }
    }

    /// Number of parallel walk instances `s`.
    pub fn instances(&self) -> Result<usize, ConfigError> {
        let eta = self.eta()?;
        let s = match (self.mode, self.s_override) {
            (Mode::Lab, Some(s)) => s as f64,
            _ => self.instance_formula(eta).ceil(),
        };
        if s > self.s_budget as f64 {
            return Err(ConfigError::BudgetExceeded { s, budget: self.s_budget });
        }
        Ok(s as usize)
    }

    /// [`Self::instances`], additionally requiring `s >= b`.
    pub fn instances_for_batch(&self) -> Result<usize, ConfigError> {
        let s = self.instances()?;
        if s < self.b {
            return Err(ConfigError::TooFewInstances { s, b: self.b });
        }
        Ok(s)
    }

    /// Estimator batch size `ceil(D / eps^2)`.
    pub fn estimator_batch(&self, epsilon: f64) -> usize {
        (self.d_batch / (epsilon * epsilon)).ceil() as usize
    }
}
