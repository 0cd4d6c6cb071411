//! Switching-strategy equilibrium of the global vaccination game.
//!
//! Type-`k` players vaccinate iff their private signal is at most `x*_k`, and
//! the regime reopens iff the realized threshold satisfies `θ ≤ θ*`. The pair
//! is pinned down by `θ* = A(θ*)` together with the posterior condition
//! `P(θ ≤ θ* | x*_k) = c`, which collapse into a scalar root `W(θ*) = 0`.

use crate::error::{Error, Result};
use crate::numerics::{cdf, pdf, quantile, Probability, SQRT_2PI};
use crate::params::{check_cost, SignalParams};
use crate::population::{Partition, PopulationModel, ACTIONS};
use crate::roots::{bisect, scan_roots};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_SCAN_POINTS: usize = 100_000;
/// The threshold is searched on `(SCAN_EPS, 1 - SCAN_EPS)`.
pub const SCAN_EPS: f64 = 1e-9;
const LIMIT_SCAN_POINTS: usize = 2_000;

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    /// Canonical threshold; the smallest root when several exist.
    pub theta_star: f64,
    /// Critical private signal per type.
    pub x_star: Vec<f64>,
    /// Whether the precision condition guaranteeing uniqueness held.
    pub unique: bool,
    pub roots_found: Vec<f64>,
    /// `|W(θ*)|`.
    pub residual: f64,
}

fn check_shapes(model: &PopulationModel, signals: &SignalParams) -> Result<()> {
    if model.num_types() != signals.sigma_k.len() {
        return Err(Error::Shape(format!(
            "{} private precisions for {} types",
            signals.sigma_k.len(),
            model.num_types()
        )));
    }
    Ok(())
}

/// `Σ_k m^k / σ_k ≤ √(2π) / σ²`.
pub fn uniqueness_condition(model: &PopulationModel, signals: &SignalParams) -> bool {
    let lhs: f64 = model
        .type_masses()
        .iter()
        .zip(&signals.sigma_k)
        .map(|(m, s)| m / s)
        .sum();
    lhs <= SQRT_2PI / (signals.sigma * signals.sigma)
}

/// `A(θ) = Σ_k m^k Φ(σ_k (x*_k − θ))`.
pub fn average_action(theta: f64, x_star: &[f64], model: &PopulationModel, signals: &SignalParams) -> f64 {
    model
        .type_masses()
        .iter()
        .zip(&signals.sigma_k)
        .zip(x_star)
        .map(|((m, s), x)| m * cdf(s * (x - theta)))
        .sum()
}

/// `W(θ)` with the critical signals substituted, precomputed per type:
/// `W(θ) = Σ_k m^k Φ((a_k − σ² θ) / (−σ_k)) − θ`, `a_k = √(σ²+σ_k²) Φ⁻¹(c) + σ² μ`.
#[derive(Debug, Clone)]
pub struct ThresholdMap {
    masses: Vec<f64>,
    offsets: Vec<f64>,
    sigma_k: Vec<f64>,
    sigma2: f64,
}

impl ThresholdMap {
    pub fn new(model: &PopulationModel, signals: &SignalParams, cost: f64) -> Result<Self> {
        check_cost(cost)?;
        check_shapes(model, signals)?;
        let q = quantile(cost);
        let sigma2 = signals.sigma * signals.sigma;
        let offsets = signals
            .sigma_k
            .iter()
            .map(|sk| (sigma2 + sk * sk).sqrt() * q + sigma2 * signals.mu)
            .collect();
        Ok(ThresholdMap {
            masses: model.type_masses().to_vec(),
            offsets,
            sigma_k: signals.sigma_k.clone(),
            sigma2,
        })
    }

    /// Coverage implied at threshold θ when everyone uses the signals that
    /// make θ the switching point.
    pub fn coverage(&self, theta: f64) -> f64 {
        self.masses
            .iter()
            .zip(&self.offsets)
            .zip(&self.sigma_k)
            .map(|((m, a), sk)| m * cdf((a - self.sigma2 * theta) / -sk))
            .sum()
    }

    #[inline]
    pub fn w(&self, theta: f64) -> f64 {
        self.coverage(theta) - theta
    }

    /// `∂W/∂θ`.
    pub fn slope(&self, theta: f64) -> f64 {
        self.masses
            .iter()
            .zip(&self.offsets)
            .zip(&self.sigma_k)
            .map(|((m, a), sk)| m * pdf((a - self.sigma2 * theta) / -sk) * self.sigma2 / sk)
            .sum::<f64>()
            - 1.0
    }
}

/// `W(θ)`; its roots in `(0, 1)` are the equilibrium thresholds.
pub fn w_function(theta: f64, model: &PopulationModel, signals: &SignalParams, cost: f64) -> Result<f64> {
    Ok(ThresholdMap::new(model, signals, cost)?.w(theta))
}

/// Posterior probability of reopening, `P(θ ≤ θ* | x_k = x)`:
/// `Φ(√(σ²+σ_k²) (θ* − σ_k² x/(σ²+σ_k²) − σ² μ/(σ²+σ_k²)))`.
pub fn posterior_reopening(theta_star: f64, x: f64, type_idx: usize, signals: &SignalParams) -> f64 {
    let s2 = signals.sigma * signals.sigma;
    let sk2 = signals.sigma_k[type_idx].powi(2);
    let tot = s2 + sk2;
    cdf(tot.sqrt() * (theta_star - sk2 / tot * x - s2 / tot * signals.mu))
}

/// `x*_k = (√(σ²+σ_k²) Φ⁻¹(c) + σ² μ − (σ²+σ_k²) θ*) / (−σ_k²)`.
pub fn critical_signals(theta_star: f64, signals: &SignalParams, cost: f64) -> Result<Vec<f64>> {
    check_cost(cost)?;
    if !theta_star.is_finite() {
        return Err(Error::domain(format!("threshold must be finite, got {theta_star}")));
    }
    let q = quantile(cost);
    let s2 = signals.sigma * signals.sigma;
    Ok(signals
        .sigma_k
        .iter()
        .map(|sk| {
            let tot = s2 + sk * sk;
            (tot.sqrt() * q + s2 * signals.mu - tot * theta_star) / -(sk * sk)
        })
        .collect())
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub tol: f64,
    /// Grid resolution used when uniqueness is not guaranteed.
    pub scan_points: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            scan_points: DEFAULT_SCAN_POINTS,
        }
    }
}

/// Solves `W(θ*) = 0` on `(0, 1)` with the default grid resolution.
pub fn solve_threshold(
    model: &PopulationModel,
    signals: &SignalParams,
    cost: f64,
    tol: f64,
) -> Result<EquilibriumResult> {
    solve_threshold_with(
        model,
        signals,
        cost,
        SolverOptions {
            tol,
            ..SolverOptions::default()
        },
    )
}

pub fn solve_threshold_with(
    model: &PopulationModel,
    signals: &SignalParams,
    cost: f64,
    opts: SolverOptions,
) -> Result<EquilibriumResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let map = ThresholdMap::new(model, signals, cost)?;
    let unique = uniqueness_condition(model, signals);
    let (lo, hi) = (SCAN_EPS, 1.0 - SCAN_EPS);

    let roots = if unique && map.w(lo) > 0.0 && map.w(hi) < 0.0 {
        vec![bisect(|t| map.w(t), lo, hi, opts.tol)]
    } else {
        scan_roots(|t| map.w(t), lo, hi, opts.scan_points, opts.tol)
    };
    let Some(&theta_star) = roots.first() else {
        return Err(Error::solver(
            format!("W has no sign change on ({lo}, {hi})"),
            map.w(0.5).abs(),
        ));
    };
    let residual = map.w(theta_star).abs();
    Ok(EquilibriumResult {
        theta_star,
        x_star: critical_signals(theta_star, signals, cost)?,
        unique,
        roots_found: roots,
        residual,
    })
}

/// Action-resolved masses when the realized threshold is `theta`:
/// `m^{d,k}_1 = m^{d,k} Φ(σ_k (x*_k − θ))`, the same fraction in every degree.
pub fn ne_partition(
    theta: f64,
    x_star: &[f64],
    model: &PopulationModel,
    signals: &SignalParams,
) -> Result<Partition> {
    check_shapes(model, signals)?;
    if x_star.len() != model.num_types() {
        return Err(Error::Shape(format!(
            "{} critical signals for {} types",
            x_star.len(),
            model.num_types()
        )));
    }
    if theta.is_nan() {
        return Err(Error::domain("threshold is NaN"));
    }
    let fractions: Vec<f64> = signals
        .sigma_k
        .iter()
        .zip(x_star)
        .map(|(s, x)| cdf(s * (x - theta)))
        .collect();
    let mut masses = Vec::with_capacity(model.num_groups() * ACTIONS);
    for d in 0..model.num_degrees() {
        for (k, f) in fractions.iter().enumerate() {
            let m = model.joint(d, k);
            let m1 = m * f;
            masses.push(m - m1);
            masses.push(m1);
        }
    }
    Partition::new(model, masses)
}

/// `P(θ ≤ θ*) = Φ(σ (θ* − μ))`.
pub fn reopening_probability(theta_star: f64, signals: &SignalParams) -> Probability {
    Probability::new(cdf(signals.sigma * (theta_star - signals.mu))).expect("cdf lies in [0, 1]")
}

fn check_limit_args(l: f64, cost: f64) -> Result<f64> {
    check_cost(cost)?;
    if !(l >= 0.0 && l.is_finite()) {
        return Err(Error::domain(format!("precision ratio l = {l} must be nonnegative")));
    }
    Ok(quantile(cost))
}

/// Threshold when both precisions diverge with `σ²/σ_k = l` fixed:
/// `θ* = Σ_k m^k Φ(l θ* − l μ + Φ⁻¹(c))`. With `mu_zero` the public mean is
/// taken to be 0. Returns the smallest root.
pub fn limit_threshold(
    l: f64,
    cost: f64,
    mu: f64,
    model: &PopulationModel,
    tol: f64,
    mu_zero: bool,
) -> Result<f64> {
    let q = check_limit_args(l, cost)?;
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let mu = if mu_zero { 0.0 } else { mu };
    let total: f64 = model.type_masses().iter().sum();
    let f = |t: f64| total * cdf(l * t - l * mu + q) - t;
    if l == 0.0 {
        return Ok(total * cdf(q));
    }
    let roots = if l <= SQRT_2PI {
        // slope of the map is at most l/√(2π) ≤ 1
        vec![bisect(f, 0.0, 1.0, tol)]
    } else {
        scan_roots(f, 0.0, 1.0, LIMIT_SCAN_POINTS, tol)
    };
    let root = *roots
        .first()
        .ok_or_else(|| Error::solver("limit threshold map has no sign change on [0, 1]", f(0.5).abs()))?;
    let residual = f(root).abs();
    if residual > tol.max(1e-14) {
        return Err(Error::solver("limit threshold did not converge", residual));
    }
    Ok(root)
}

/// `∂θ*/∂μ` of the limit threshold by implicit differentiation of
/// `θ = Σ_k m^k Φ(l θ − l μ + Φ⁻¹(c))`:
///
/// ```text
/// ∂θ*/∂μ = S / (S − 1),   S = Σ_k m^k φ(l θ* − l μ + Φ⁻¹(c)) l
/// ```
///
/// Under the uniqueness bound `S < 1`, so the threshold falls as μ rises.
pub fn threshold_mu_sensitivity(
    theta_star: f64,
    l: f64,
    cost: f64,
    mu: f64,
    model: &PopulationModel,
) -> Result<f64> {
    let q = check_limit_args(l, cost)?;
    let s: f64 = model
        .type_masses()
        .iter()
        .map(|m| m * pdf(l * theta_star - l * mu + q) * l)
        .sum();
    let denom = s - 1.0;
    if denom.abs() < 1e-12 {
        return Err(Error::Singularity(format!(
            "fixed point is degenerate (S - 1 = {denom:e})"
        )));
    }
    Ok(s / denom)
}
