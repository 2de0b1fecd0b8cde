//! Run configuration: a single JSON document with all physical values in
//! units of ω and all comparison tolerances pinned explicitly, so runs are
//! reproducible byte for byte.

use crate::dynamics::InitialState;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
}

impl TimeGrid {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::Config("time_grid.samples must be >= 2".into()));
        }
        if !self.t_start.is_finite()
            || !self.t_end.is_finite()
            || self.t_start < 0.0
            || self.t_end <= self.t_start
        {
            return Err(Error::Config(
                "time_grid requires t_end > t_start >= 0".into(),
            ));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.samples;
        (0..n)
            .map(|i| {
                self.t_start + (self.t_end - self.t_start) * i as f64 / (n - 1) as f64
            })
            .collect()
    }
}

/// Observable columns of the dynamics command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// ⟨S₊^z⟩
    Inversion,
    /// S(ϱ), two-qubit von Neumann entropy (bits)
    Entropy,
    /// S(ρ_O), oscillator entropy (bits)
    EntropyOsc,
    /// C_RE(ϱ)
    Coherence,
    /// C_RE of the first single-qubit matrix
    CoherenceQ1,
    /// C_RE of the second single-qubit matrix
    CoherenceQ2,
    /// 2 D_G(ϱ)
    Discord2,
    Concurrence,
    /// Tr ϱ²
    Purity,
    /// principal quadrature variance of ρ_O
    VMin,
}

impl Observable {
    pub fn column_name(&self) -> &'static str {
        match self {
            Observable::Inversion => "inversion",
            Observable::Entropy => "entropy_bits",
            Observable::EntropyOsc => "entropy_osc_bits",
            Observable::Coherence => "coherence_bits",
            Observable::CoherenceQ1 => "coherence_q1_bits",
            Observable::CoherenceQ2 => "coherence_q2_bits",
            Observable::Discord2 => "discord2",
            Observable::Concurrence => "concurrence",
            Observable::Purity => "purity",
            Observable::VMin => "v_min",
        }
    }

    pub fn needs_oscillator(&self) -> bool {
        matches!(self, Observable::EntropyOsc | Observable::VMin)
    }
}

pub fn default_outputs() -> Vec<Observable> {
    vec![
        Observable::Inversion,
        Observable::Entropy,
        Observable::Coherence,
        Observable::Discord2,
        Observable::Concurrence,
        Observable::Purity,
    ]
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HusimiGridConfig {
    #[serde(default = "default_grid_size")]
    pub size: usize,
    #[serde(default)]
    pub half_width: Option<f64>,
    #[serde(default)]
    pub center: Option<Complex64>,
}

fn default_grid_size() -> usize {
    201
}

impl Default for HusimiGridConfig {
    fn default() -> Self {
        HusimiGridConfig {
            size: 201,
            half_width: None,
            center: None,
        }
    }
}

/// Comparison tolerances. Versioned through the config schema so validation
/// runs are reproducible; defaults are the pinned acceptance values.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Truncation residual bound on 1 - Σ|C|².
    pub eps_trunc: f64,
    pub trace: f64,
    pub hermiticity: f64,
    pub positivity: f64,
    /// |S(ρ_O) - S(ϱ)| bound for the pure tripartite state.
    pub entropy_equality: f64,
    /// Fock-basis vs frame-sum quadrature variance agreement.
    pub vmin_dual_path: f64,
    /// Numeric vs closed-form Bell distance agreement.
    pub dmin_closed_form: f64,
    /// Husimi Riemann-sum normalization slack.
    pub husimi_norm: f64,
    /// Adiabatic vs exact spectrum, absolute, lowest 12 levels.
    pub spectrum_abs: f64,
    /// Adiabatic vs exact two-qubit RDM, max-norm, ωt <= 500.
    pub oracle_rdm_max_norm: f64,
    /// Spectrum drift allowed under cutoff doubling.
    pub oracle_drift: f64,
    /// Relative error of the revival-time estimate against reported values.
    pub revival_estimate_rel: f64,
    /// Relative error of detected revival peaks against the estimate.
    pub revival_detect_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_trunc: 1e-8,
            trace: 1e-8,
            hermiticity: 1e-12,
            positivity: 1e-6,
            entropy_equality: 1e-6,
            vmin_dual_path: 1e-7,
            dmin_closed_form: 1e-6,
            husimi_norm: 1e-3,
            spectrum_abs: 2e-3,
            oracle_rdm_max_norm: 2e-2,
            oracle_drift: 1e-8,
            revival_estimate_rel: 0.01,
            revival_detect_rel: 0.02,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "schema_version_default")]
    pub schema_version: u32,
    pub model: ModelParams,
    pub initial: InitialState,
    pub time_grid: TimeGrid,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Observable>,
    #[serde(default)]
    pub husimi_grid: HusimiGridConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
}

fn schema_version_default() -> u32 {
    SCHEMA_VERSION
}

impl Default for RunConfig {
    /// The Bell-reconstruction configuration: strongly coupled nonidentical
    /// qubits, vacuum field, factorized two-qubit start.
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            model: ModelParams {
                omega: 1.0,
                delta1: 0.2,
                delta2: 0.15,
                lambda1: 0.32,
                lambda2: 0.17,
                g: 0.0,
                n_max: None,
            },
            initial: InitialState {
                theta: 0.0,
                phi: 0.0,
                alpha: Complex64::new(0.0, 0.0),
            },
            time_grid: TimeGrid {
                t_start: 0.0,
                t_end: 600.0,
                samples: 1201,
            },
            outputs: default_outputs(),
            husimi_grid: HusimiGridConfig::default(),
            tolerances: Tolerances::default(),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {})",
                self.schema_version, SCHEMA_VERSION
            )));
        }
        self.model.validate()?;
        self.time_grid.validate()?;
        if self.husimi_grid.size < 2 {
            return Err(Error::Config("husimi_grid.size must be >= 2".into()));
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("outputs must not be empty".into()));
        }
        Ok(())
    }
}
