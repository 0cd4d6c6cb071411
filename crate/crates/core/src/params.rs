//! Epidemic, economic, and information parameters.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Social regime of the game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `'-'`: contagion damped by the restriction effect α.
    #[serde(rename = "-", alias = "restricted")]
    Restricted,
    /// `'+'`: no restriction, α⁺ = 1.
    #[serde(rename = "+", alias = "reopened")]
    Reopened,
}

impl Regime {
    pub fn symbol(self) -> char {
        match self {
            Regime::Restricted => '-',
            Regime::Reopened => '+',
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpidemicParams {
    pub gamma: f64,
    pub lambda: f64,
    /// Vaccinated players are infected at rate `beta * lambda`.
    pub beta: f64,
    /// Restriction effect α⁻.
    pub alpha: f64,
    pub horizon: f64,
}

impl EpidemicParams {
    pub fn new(gamma: f64, lambda: f64, beta: f64, alpha: f64, horizon: f64) -> Result<Self> {
        let p = EpidemicParams {
            gamma,
            lambda,
            beta,
            alpha,
            horizon,
        };
        p.validate()?;
        Ok(p)
    }

    /// The boundary values λ = 0, β = 1 and α = 1 are admitted: they are the
    /// degenerate no-contagion, useless-vaccine and no-restriction cases.
    pub fn validate(&self) -> Result<()> {
        let open = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} = {v} must lie in (0, 1)")))
            }
        };
        open("gamma", self.gamma)?;
        if !(self.lambda >= 0.0 && self.lambda < 1.0) {
            return Err(Error::domain(format!("lambda = {} must lie in [0, 1)", self.lambda)));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::domain(format!("beta = {} must lie in (0, 1]", self.beta)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::domain(format!("alpha = {} must lie in (0, 1]", self.alpha)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::domain(format!("horizon = {} must be positive", self.horizon)));
        }
        Ok(())
    }

    /// Contagion rate λ_i for action `i`.
    #[inline]
    pub fn contagion(&self, action: usize) -> f64 {
        if action == 1 {
            self.beta * self.lambda
        } else {
            self.lambda
        }
    }

    #[inline]
    pub fn restriction(&self, regime: Regime) -> f64 {
        match regime {
            Regime::Restricted => self.alpha,
            Regime::Reopened => 1.0,
        }
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconParams {
    /// Relative vaccination cost `c`.
    pub cost: f64,
    /// Morbidity risk `r`.
    pub risk: f64,
    /// Reopening gain `g^d`, one per degree in the model's sorted support.
    pub gains: Vec<f64>,
}

impl EconParams {
    pub fn new(cost: f64, risk: f64, gains: Vec<f64>) -> Result<Self> {
        let p = EconParams { cost, risk, gains };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_cost(self.cost)?;
        if !self.risk.is_finite() || self.gains.iter().any(|g| !g.is_finite()) {
            return Err(Error::domain("risk and gains must be finite"));
        }
        Ok(())
    }
}

pub(crate) fn check_cost(cost: f64) -> Result<()> {
    if cost > 0.0 && cost < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("vaccination cost c = {cost} must lie in (0, 1)")))
    }
}

/// Public threshold θ ~ N(μ, 1/σ²); type-k private noise ~ N(0, 1/σ_k²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalParams {
    pub mu: f64,
    pub sigma: f64,
    pub sigma_k: Vec<f64>,
}

impl SignalParams {
    pub fn new(mu: f64, sigma: f64, sigma_k: Vec<f64>) -> Result<Self> {
        let p = SignalParams { mu, sigma, sigma_k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(Error::domain(format!("mu = {} must lie in (0, 1)", self.mu)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::domain(format!("sigma = {} must be positive", self.sigma)));
        }
        if self.sigma_k.is_empty() {
            return Err(Error::domain("sigma_k needs one precision per type"));
        }
        if let Some((k, s)) = self
            .sigma_k
            .iter()
            .enumerate()
            .find(|(_, s)| !(**s > 0.0 && s.is_finite()))
        {
            return Err(Error::domain(format!("sigma_k[{}] = {s} must be positive", k + 1)));
        }
        Ok(())
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        SignalParams {
            sigma,
            ..self.clone()
        }
    }

    pub fn with_type_precision(&self, type_idx: usize, sigma_k: f64) -> Self {
        let mut s = self.clone();
        s.sigma_k[type_idx] = sigma_k;
        s
    }
}
