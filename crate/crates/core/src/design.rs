//! Information designs that make the disease-free state of the reopened
//! regime globally stable: herd thresholds, the equilibrium threshold they
//! require, admissible private precisions, and the public-signal condition
//! with its cost bounds.
//!
//! Notation: `q_c = Φ⁻¹(c)`, `q_e = Φ⁻¹(e_d)`, `S = √(σ² + σ_k²)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{cdf, quantile};
use crate::params::{check_cost, EpidemicParams, SignalParams};
use crate::population::PopulationModel;

/// Herd thresholds closer than this to 0 or 1 are rejected.
pub const HERD_EDGE_TOL: f64 = 1e-12;

/// Minimum vaccinated fraction of degree-`d` players that certifies the
/// disease-free state: `e_d = (γ/(dλ) − 1)/(β − 1)`.
pub fn herd_threshold(d: u32, params: &EpidemicParams) -> Result<f64> {
    params.validate()?;
    let ratio = params.gamma / (d as f64 * params.lambda);
    if !(ratio <= 1.0) {
        return Err(Error::domain(format!(
            "degree {d}: gamma/(d lambda) = {ratio} exceeds 1, the disease dies out unaided"
        )));
    }
    let e = (ratio - 1.0) / (params.beta - 1.0);
    check_herd(d, e)?;
    Ok(e)
}

fn check_herd(d: u32, e: f64) -> Result<()> {
    if e > HERD_EDGE_TOL && e < 1.0 - HERD_EDGE_TOL {
        Ok(())
    } else {
        Err(Error::domain(format!("degree {d}: herd threshold e_d = {e} is not inside (0, 1)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HerdThresholds {
    degrees: Vec<u32>,
    e: Vec<f64>,
}

impl HerdThresholds {
    /// Thresholds for every degree of the model; fails on the first
    /// infeasible degree.
    pub fn compute(params: &EpidemicParams, model: &PopulationModel) -> Result<Self> {
        let e = model
            .degrees()
            .iter()
            .map(|&d| herd_threshold(d, params))
            .collect::<Result<Vec<_>>>()?;
        Ok(HerdThresholds {
            degrees: model.degrees().to_vec(),
            e,
        })
    }

    pub fn new(degrees: Vec<u32>, e: Vec<f64>) -> Result<Self> {
        if degrees.len() != e.len() || e.is_empty() {
            return Err(Error::Shape(format!("{} degrees but {} herd thresholds", degrees.len(), e.len())));
        }
        for (&d, &v) in degrees.iter().zip(&e) {
            check_herd(d, v)?;
        }
        Ok(HerdThresholds { degrees, e })
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn values(&self) -> &[f64] {
        &self.e
    }
}

fn check_sigma_k(sigma_k: f64) -> Result<()> {
    if sigma_k > 0.0 && sigma_k.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("private precision {sigma_k} must be positive")))
    }
}

/// `Y(σ_k) = μ + q_c/S + σ_k q_e/(σ S)`.
pub fn y_function(sigma_k: f64, signals: &SignalParams, cost: f64, e_d: f64) -> Result<f64> {
    check_cost(cost)?;
    check_herd(0, e_d)?;
    check_sigma_k(sigma_k)?;
    Ok(y_raw(sigma_k, signals.sigma, signals.mu, quantile(cost), quantile(e_d)))
}

fn y_raw(sigma_k: f64, sigma: f64, mu: f64, q_c: f64, q_e: f64) -> f64 {
    let s = sigma.hypot(sigma_k);
    mu + q_c / s + sigma_k * q_e / (sigma * s)
}

/// Lower bound `θ̂*` the equilibrium threshold must reach for type `type_k`.
pub fn required_threshold(type_k: usize, signals: &SignalParams, cost: f64, e_d: f64) -> Result<f64> {
    let sigma_k = *signals
        .sigma_k
        .get(type_k)
        .ok_or_else(|| Error::Shape(format!("no type {} among {}", type_k + 1, signals.sigma_k.len())))?;
    y_function(sigma_k, signals, cost, e_d)
}

/// Stationary point `σ̂_k = σ q_e / q_c` of `Y`. Negative when `q_e` and `q_c`
/// differ in sign, in which case `Y` is monotone on `(0, ∞)`.
pub fn y_stationary_point(sigma: f64, cost: f64, e_d: f64) -> Result<f64> {
    check_cost(cost)?;
    check_herd(0, e_d)?;
    let q_c = quantile(cost);
    if q_c == 0.0 {
        return Err(Error::Singularity("c = 0.5 leaves Y without a stationary point".into()));
    }
    Ok(sigma * quantile(e_d) / q_c)
}

/// `W(θ̂*) = Σ_k m^k Φ((σ q_e − σ_k q_c)/S) − Y(σ_k)`, with one common private
/// precision in every term.
fn w_required_raw(sigma_k: f64, signals: &SignalParams, q_c: f64, q_e: f64, type_mass: f64) -> f64 {
    let s = signals.sigma.hypot(sigma_k);
    type_mass * cdf((signals.sigma * q_e - sigma_k * q_c) / s) - y_raw(sigma_k, signals.sigma, signals.mu, q_c, q_e)
}

/// `W` evaluated at the required threshold of degree `d`; nonnegative values
/// certify the disease-free state at private precision `sigma_k`.
pub fn w_at_required(
    sigma_k: f64,
    d: u32,
    signals: &SignalParams,
    cost: f64,
    params: &EpidemicParams,
    model: &PopulationModel,
) -> Result<f64> {
    check_cost(cost)?;
    check_sigma_k(sigma_k)?;
    let e = herd_threshold(d, params)?;
    let total: f64 = model.type_masses().iter().sum();
    Ok(w_required_raw(sigma_k, signals, quantile(cost), quantile(e), total))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchGrid {
    pub lo: f64,
    pub hi: f64,
    /// Number of logarithmically spaced points.
    pub points: usize,
}

impl Default for SearchGrid {
    fn default() -> Self {
        SearchGrid {
            lo: 1e-3,
            hi: 1e3,
            points: 2000,
        }
    }
}

impl SearchGrid {
    fn validate(&self) -> Result<()> {
        if self.lo > 0.0 && self.hi > self.lo && self.hi.is_finite() && self.points >= 2 {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "search grid [{}, {}] with {} points is invalid",
                self.lo, self.hi, self.points
            )))
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let n = self.points - 1;
        (0..=n)
            .map(|j| match j {
                0 => self.lo,
                j if j == n => self.hi,
                j => (a + (b - a) * j as f64 / n as f64).exp(),
            })
            .collect()
    }
}

/// Width below which region endpoints stop being refined.
pub const REGION_ENDPOINT_TOL: f64 = 1e-8;

/// `W(θ̂*)` sampled inside the region; the minimum over the certified degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionSample {
    pub sigma_k: f64,
    pub min_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedDegree {
    pub degree: u32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrecisionRegion {
    /// Zero-based type whose precision is being designed.
    pub type_idx: usize,
    /// Disjoint, increasing closed intervals of admissible `σ_k`.
    pub intervals: Vec<(f64, f64)>,
    /// Endpoints and midpoint of every interval.
    pub evidence: Vec<RegionSample>,
    /// Degrees left out because their herd threshold is undefined.
    pub skipped: Vec<SkippedDegree>,
    /// Set when some degree was skipped.
    pub warning: bool,
}

impl PrecisionRegion {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, sigma_k: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= sigma_k && sigma_k <= b)
    }
}

/// Moves from an admissible point toward an inadmissible one, keeping the
/// admissible end, until the two are `REGION_ENDPOINT_TOL` apart.
fn refine_edge(f: &impl Fn(f64) -> f64, mut good: f64, mut bad: f64) -> f64 {
    while (bad - good).abs() > REGION_ENDPOINT_TOL {
        let mid = 0.5 * (good + bad);
        if mid == good || mid == bad {
            break;
        }
        if f(mid) >= 0.0 {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

fn admissible_intervals(f: impl Fn(f64) -> f64, nodes: &[f64]) -> Vec<(f64, f64)> {
    let ok: Vec<bool> = nodes.iter().map(|&x| f(x) >= 0.0).collect();
    let mut out = Vec::new();
    let mut j = 0;
    while j < nodes.len() {
        if !ok[j] {
            j += 1;
            continue;
        }
        let start = j;
        while j + 1 < nodes.len() && ok[j + 1] {
            j += 1;
        }
        let lo = if start == 0 {
            nodes[0]
        } else {
            refine_edge(&f, nodes[start], nodes[start - 1])
        };
        let hi = if j + 1 == nodes.len() {
            nodes[j]
        } else {
            refine_edge(&f, nodes[j], nodes[j + 1])
        };
        out.push((lo, hi));
        j += 1;
    }
    out
}

fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo <= hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Private precisions of type `type_k` for which `W(θ̂*) ≥ 0` holds for every
/// degree in `d_set`. Degrees whose herd threshold is undefined are skipped
/// and flagged; an empty region is a valid answer.
pub fn private_precision_region(
    d_set: &[u32],
    type_k: usize,
    signals: &SignalParams,
    cost: f64,
    params: &EpidemicParams,
    model: &PopulationModel,
    search: SearchGrid,
) -> Result<PrecisionRegion> {
    check_cost(cost)?;
    signals.validate()?;
    search.validate()?;
    if type_k >= model.num_types() {
        return Err(Error::Shape(format!("no type {} among {}", type_k + 1, model.num_types())));
    }
    let q_c = quantile(cost);
    let total: f64 = model.type_masses().iter().sum();
    let nodes = search.nodes();

    let mut skipped = Vec::new();
    let mut certified = Vec::new();
    let mut region: Option<Vec<(f64, f64)>> = None;
    for &d in d_set {
        let q_e = match herd_threshold(d, params) {
            Ok(e) => quantile(e),
            Err(err) => {
                skipped.push(SkippedDegree {
                    degree: d,
                    reason: err.to_string(),
                });
                continue;
            }
        };
        certified.push(q_e);
        let own = admissible_intervals(|s| w_required_raw(s, signals, q_c, q_e, total), &nodes);
        region = Some(match region {
            None => own,
            Some(acc) => intersect(&acc, &own),
        });
    }
    let intervals = region.unwrap_or_default();

    let min_w = |s: f64| {
        certified
            .iter()
            .map(|&q_e| w_required_raw(s, signals, q_c, q_e, total))
            .fold(f64::INFINITY, f64::min)
    };
    let evidence = intervals
        .iter()
        .flat_map(|&(a, b)| [a, (a * b).sqrt(), b])
        .map(|s| RegionSample { sigma_k: s, min_w: min_w(s) })
        .collect();

    Ok(PrecisionRegion {
        type_idx: type_k,
        intervals,
        evidence,
        warning: !skipped.is_empty(),
        skipped,
    })
}

/// Largest admissible `σμ`:
/// `min_d min{−q_c, −q_e, −(1 + q_e)/√(q_c² + q_e²)}`.
pub fn public_signal_bound(cost: f64, herd: &HerdThresholds) -> Result<f64> {
    check_cost(cost)?;
    let q_c = quantile(cost);
    Ok(herd
        .e
        .iter()
        .map(|&e| {
            let q_e = quantile(e);
            let third = -(1.0 + q_e) / q_c.hypot(q_e);
            (-q_c).min(-q_e).min(third)
        })
        .fold(f64::INFINITY, f64::min))
}

/// Public-signal sufficient condition for the disease-free state:
/// `σμ ≤ public_signal_bound` for every degree.
pub fn public_signal_condition(signals: &SignalParams, cost: f64, herd: &HerdThresholds) -> Result<bool> {
    Ok(signals.sigma * signals.mu <= public_signal_bound(cost, herd)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostBounds {
    pub lo: f64,
    pub hi: f64,
    /// `lo ≤ hi`.
    pub consistent: bool,
}

/// Vaccination costs compatible with the public-signal condition:
/// `Φ(−√((1 + q_e²)/(σμ)² − q_e²)) ≤ c ≤ Φ(−σμ)`.
pub fn cost_bounds(signals: &SignalParams, e_d: f64) -> Result<CostBounds> {
    check_herd(0, e_d)?;
    let sm = signals.sigma * signals.mu;
    if !(sm > 0.0 && sm.is_finite()) {
        return Err(Error::domain(format!("sigma * mu = {sm} must be positive")));
    }
    let q = quantile(e_d);
    let radicand = (1.0 + q * q) / (sm * sm) - q * q;
    if radicand < 0.0 {
        return Err(Error::domain(format!("cost bound radicand {radicand} is negative")));
    }
    let lo = cdf(-radicand.sqrt());
    let hi = cdf(-sm);
    Ok(CostBounds {
        lo,
        hi,
        consistent: lo <= hi,
    })
}
