//! Physical parameters of the two-atom / leaky-cavity system.
//!
//! All rates and detunings share one caller-chosen unit (ħ = c = 1). Internally
//! every frequency is an offset `dk = k - k_c` from the resonant quasi-mode;
//! `k_c` is carried only so that input and output can be reported in absolute
//! terms.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Coupling strength of the L-polarized channel.
    #[serde(rename = "lambda_L", alias = "lambda_l")]
    pub lambda_l: f64,
    /// Coupling strength of the R-polarized channel.
    #[serde(rename = "lambda_R", alias = "lambda_r")]
    pub lambda_r: f64,
    /// Decay rate of the resonant quasi-mode.
    pub kappa: f64,
    /// Center frequency of the quasi-mode.
    #[serde(default)]
    pub k_c: f64,
    /// Atomic detuning `omega_e - k_c`.
    #[serde(default)]
    pub delta_e: f64,
    /// Spontaneous decay rate of the excited level into non-cavity modes.
    #[serde(default)]
    pub gamma: f64,
    /// Relative phase `theta_L - theta_R` of the two couplings (radians).
    #[serde(default, rename = "delta_LR", alias = "delta_lr")]
    pub delta_lr: f64,
}

impl PhysicalParams {
    /// Resonant, lossless parameters with zero relative phase.
    pub fn new(lambda_l: f64, lambda_r: f64, kappa: f64) -> Self {
        Self {
            lambda_l,
            lambda_r,
            kappa,
            k_c: 0.0,
            delta_e: 0.0,
            gamma: 0.0,
            delta_lr: 0.0,
        }
    }

    pub fn with_delta_e(mut self, delta_e: f64) -> Self {
        self.delta_e = delta_e;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_delta_lr(mut self, delta_lr: f64) -> Self {
        self.delta_lr = delta_lr;
        self
    }

    /// Multiply every rate by `factor`. Probabilities are invariant under this.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            lambda_l: self.lambda_l * factor,
            lambda_r: self.lambda_r * factor,
            kappa: self.kappa * factor,
            k_c: self.k_c * factor,
            delta_e: self.delta_e * factor,
            gamma: self.gamma * factor,
            delta_lr: self.delta_lr,
        }
    }

    pub fn validate(self) -> Result<Self> {
        validate(self)
    }
}

/// Check the parameter invariants and hand the record back unchanged.
pub fn validate(params: PhysicalParams) -> Result<PhysicalParams> {
    let fields = [
        ("lambda_L", params.lambda_l),
        ("lambda_R", params.lambda_r),
        ("kappa", params.kappa),
        ("k_c", params.k_c),
        ("delta_e", params.delta_e),
        ("gamma", params.gamma),
        ("delta_LR", params.delta_lr),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            return Err(Error::NonFinite { name });
        }
    }
    for (name, value) in [
        ("lambda_L", params.lambda_l),
        ("lambda_R", params.lambda_r),
        ("gamma", params.gamma),
    ] {
        if value < 0.0 {
            return Err(Error::NegativeRate { name, value });
        }
    }
    if params.kappa <= 0.0 {
        return Err(Error::NonPositiveKappa(params.kappa));
    }
    if params.lambda_l == 0.0 && params.lambda_r == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    Ok(params)
}

/// `2 lambda_L^2 + lambda_R^2`: the bright-state coupling that sets the level
/// shift of the collective excited state.
pub fn total_coupling(params: &PhysicalParams) -> f64 {
    2.0 * params.lambda_l * params.lambda_l + params.lambda_r * params.lambda_r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    Oracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "closed_form" => Ok(Method::ClosedForm),
            "quadrature" => Ok(Method::Quadrature),
            "oracle" => Ok(Method::Oracle),
            other => Err(Error::Config(format!(
                "unknown engine `{other}` (expected closed_form, quadrature or oracle)"
            ))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome probabilities of one run: L photon detected (atoms left in `|LL>`),
/// R photon detected (atoms in the Bell state), or the excitation lost to
/// spontaneous emission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityResult {
    pub p_l: f64,
    pub p_r: f64,
    pub p_loss: f64,
    pub method: Method,
    pub err_estimate: f64,
}

impl ProbabilityResult {
    pub fn total(&self) -> f64 {
        self.p_l + self.p_r + self.p_loss
    }
}
