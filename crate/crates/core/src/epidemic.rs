//! Degree-based mean-field SIS dynamics under either regime.
//!
//! Every `(degree, type, action)` group evolves as
//!
//! ```text
//! dI/dt = -γ I + λ_i (1 - I) α^s d Θ^s(t),   Θ^s = d̄⁻¹ Σ d m^{d,k}_i I^{d,k}_i
//! ```
//!
//! Integration is classical fixed-step RK4, so a trajectory is a pure function
//! of its inputs and step size.

use std::io::Write;

use crate::error::{Error, Result};
use crate::params::{EpidemicParams, Regime};
use crate::population::{Partition, PopulationModel, ACTIONS};

pub const DEFAULT_STEP: f64 = 0.01;
/// Overshoot beyond `[0, 1]` that is clamped rather than reported.
pub const OVERSHOOT_TOL: f64 = 1e-9;
const MAX_STEP_HALVINGS: u32 = 6;

pub const STEADY_STATE_TOL: f64 = 1e-10;

/// Default initial infection at the lowest and highest degree.
pub const DEFAULT_I_MIN: f64 = 0.01;
pub const DEFAULT_I_MAX: f64 = 0.05;
const STEADY_STATE_MAX_ITER: usize = 100_000;
const STEADY_STATE_DAMPING: f64 = 0.5;

/// Infection probabilities `I^{d,k}_i`, flat in `(degree, type, action)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct InfectionProfile {
    num_degrees: usize,
    num_types: usize,
    values: Vec<f64>,
}

impl InfectionProfile {
    pub fn new(model: &PopulationModel, values: Vec<f64>) -> Result<Self> {
        if values.len() != model.num_groups() * ACTIONS {
            return Err(Error::Shape(format!(
                "profile has {} entries, model needs {}",
                values.len(),
                model.num_groups() * ACTIONS
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::domain(format!("infection probability {v} outside [0, 1]")));
        }
        Ok(InfectionProfile {
            num_degrees: model.num_degrees(),
            num_types: model.num_types(),
            values,
        })
    }

    pub fn constant(model: &PopulationModel, value: f64) -> Result<Self> {
        Self::new(model, vec![value; model.num_groups() * ACTIONS])
    }

    pub fn zeros(model: &PopulationModel) -> Self {
        Self::constant(model, 0.0).expect("zero profile is valid")
    }

    /// One value per degree, shared by every type and action.
    pub fn from_degree_values(model: &PopulationModel, per_degree: &[f64]) -> Result<Self> {
        if per_degree.len() != model.num_degrees() {
            return Err(Error::Shape(format!(
                "{} per-degree values for {} degrees",
                per_degree.len(),
                model.num_degrees()
            )));
        }
        let values = per_degree
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, model.num_types() * ACTIONS))
            .collect();
        Self::new(model, values)
    }

    /// Linear in degree from `i_min` at the smallest degree to `i_max` at the
    /// largest. A single-degree support gets `i_min`.
    pub fn degree_linear(model: &PopulationModel, i_min: f64, i_max: f64) -> Result<Self> {
        let (lo, hi) = (model.min_degree() as f64, model.max_degree() as f64);
        let per_degree: Vec<f64> = model
            .degrees()
            .iter()
            .map(|&d| {
                if hi > lo {
                    i_min + (i_max - i_min) * (d as f64 - lo) / (hi - lo)
                } else {
                    i_min
                }
            })
            .collect();
        Self::from_degree_values(model, &per_degree)
    }

    /// [`degree_linear`](Self::degree_linear) with the default endpoints.
    pub fn default_for(model: &PopulationModel) -> Self {
        Self::degree_linear(model, DEFAULT_I_MIN, DEFAULT_I_MAX).expect("default endpoints are probabilities")
    }

    #[inline]
    pub fn get(&self, degree_idx: usize, type_idx: usize, action: usize) -> f64 {
        self.values[(degree_idx * self.num_types + type_idx) * ACTIONS + action]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn num_degrees(&self) -> usize {
        self.num_degrees
    }

    pub fn num_types(&self) -> usize {
        self.num_types
    }

    fn same_shape(&self, model: &PopulationModel) -> Result<()> {
        if self.num_degrees == model.num_degrees() && self.num_types == model.num_types() {
            Ok(())
        } else {
            Err(Error::Shape("infection profile does not match the population model".into()))
        }
    }

    /// Weakly increasing in degree and identical across types and actions.
    pub fn is_degree_monotone_type_free(&self) -> bool {
        let per_degree: Vec<f64> = (0..self.num_degrees).map(|d| self.get(d, 0, 0)).collect();
        let uniform_within = (0..self.num_degrees).all(|d| {
            (0..self.num_types)
                .all(|k| (0..ACTIONS).all(|i| self.get(d, k, i) == per_degree[d]))
        });
        uniform_within && per_degree.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Link weights `d m^{d,k}_i / d̄`, aligned with the flat profile layout.
fn link_weights(model: &PopulationModel, partition: &Partition) -> Vec<f64> {
    let dbar = model.mean_degree();
    let mut w = Vec::with_capacity(model.num_groups() * ACTIONS);
    for (di, &d) in model.degrees().iter().enumerate() {
        for k in 0..model.num_types() {
            for i in 0..ACTIONS {
                w.push(d as f64 * partition.mass(di, k, i) / dbar);
            }
        }
    }
    w
}

/// Probability that a link points to an infected player.
pub fn theta_aggregate(profile: &InfectionProfile, model: &PopulationModel, partition: &Partition) -> f64 {
    link_weights(model, partition)
        .iter()
        .zip(&profile.values)
        .map(|(w, v)| w * v)
        .sum()
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    regime: Regime,
    degrees: Vec<u32>,
    num_types: usize,
    times: Vec<f64>,
    profiles: Vec<InfectionProfile>,
    theta: Vec<f64>,
}

impl Trajectory {
    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn profiles(&self) -> &[InfectionProfile] {
        &self.profiles
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn num_types(&self) -> usize {
        self.num_types
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn terminal(&self) -> &InfectionProfile {
        self.profiles.last().expect("trajectory has at least the initial point")
    }

    /// Same group structure and time grid.
    pub fn is_aligned_with(&self, other: &Trajectory) -> bool {
        self.degrees == other.degrees
            && self.num_types == other.num_types
            && self.times.len() == other.times.len()
            && self.times.last() == other.times.last()
    }

    /// Writes `t, regime, I_d{d}_k{k}_a{i}..., theta` with groups sorted by
    /// `(d, k, i)`; types are numbered from 1.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string(), "regime".to_string()];
        for d in &self.degrees {
            for k in 1..=self.num_types {
                for i in 0..ACTIONS {
                    header.push(format!("I_d{d}_k{k}_a{i}"));
                }
            }
        }
        header.push("theta".into());
        w.write_record(&header).map_err(csv_err)?;
        let regime = self.regime.to_string();
        for ((t, p), th) in self.times.iter().zip(&self.profiles).zip(&self.theta) {
            let mut rec = Vec::with_capacity(header.len());
            rec.push(format_float(*t));
            rec.push(regime.clone());
            rec.extend(p.values.iter().map(|v| format_float(*v)));
            rec.push(format_float(*th));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// `%.12g`-style rendering shared by every CSV writer.
pub fn format_float(x: f64) -> String {
    crate::report::format_sig(x, 12)
}

/// `I(T)`, the payoff-relevant profile.
pub fn terminal_profile(trajectory: &Trajectory) -> InfectionProfile {
    trajectory.terminal().clone()
}

struct MeanField {
    weights: Vec<f64>,
    /// `λ_i α d` per flat group.
    pressure: Vec<f64>,
    gamma: f64,
}

impl MeanField {
    fn new(regime: Regime, params: &EpidemicParams, model: &PopulationModel, partition: &Partition) -> Self {
        let alpha = params.restriction(regime);
        let mut pressure = Vec::with_capacity(model.num_groups() * ACTIONS);
        for &d in model.degrees() {
            for _ in 0..model.num_types() {
                for i in 0..ACTIONS {
                    pressure.push(params.contagion(i) * alpha * d as f64);
                }
            }
        }
        MeanField {
            weights: link_weights(model, partition),
            pressure,
            gamma: params.gamma,
        }
    }

    fn theta(&self, y: &[f64]) -> f64 {
        self.weights.iter().zip(y).map(|(w, v)| w * v).sum()
    }

    fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        let theta = self.theta(y);
        for ((dv, v), p) in dy.iter_mut().zip(y).zip(&self.pressure) {
            *dv = -self.gamma * v + p * (1.0 - v) * theta;
        }
    }
}

/// Integrates one regime on `[0, T]`, halving the step (up to six times) if a
/// probability leaves `[0, 1]` by more than [`OVERSHOOT_TOL`].
pub fn integrate(
    regime: Regime,
    params: &EpidemicParams,
    model: &PopulationModel,
    partition: &Partition,
    initial: &InfectionProfile,
    step_h: f64,
) -> Result<Trajectory> {
    let mut h = step_h;
    let mut halvings = 0;
    loop {
        match integrate_fixed(regime, params, model, partition, initial, h) {
            Err(Error::Integration { .. }) if halvings < MAX_STEP_HALVINGS => {
                h *= 0.5;
                halvings += 1;
            }
            other => return other,
        }
    }
}

/// Integrates with exactly `ceil(T / step_h)` equal steps; no retry.
pub fn integrate_fixed(
    regime: Regime,
    params: &EpidemicParams,
    model: &PopulationModel,
    partition: &Partition,
    initial: &InfectionProfile,
    step_h: f64,
) -> Result<Trajectory> {
    params.validate()?;
    partition.validate_against(model)?;
    initial.same_shape(model)?;
    if !(step_h > 0.0 && step_h.is_finite()) {
        return Err(Error::domain(format!("step must be positive, got {step_h}")));
    }
    let steps = (params.horizon / step_h).ceil().max(1.0) as usize;
    let h = params.horizon / steps as f64;
    let field = MeanField::new(regime, params, model, partition);

    let n = initial.values.len();
    let mut times = Vec::with_capacity(steps + 1);
    let mut profiles = Vec::with_capacity(steps + 1);
    let mut theta = Vec::with_capacity(steps + 1);

    let mut y = initial.values.clone();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);

    times.push(0.0);
    theta.push(field.theta(&y));
    profiles.push(initial.clone());

    for s in 1..=steps {
        field.rhs(&y, &mut k1);
        for j in 0..n {
            tmp[j] = y[j] + 0.5 * h * k1[j];
        }
        field.rhs(&tmp, &mut k2);
        for j in 0..n {
            tmp[j] = y[j] + 0.5 * h * k2[j];
        }
        field.rhs(&tmp, &mut k3);
        for j in 0..n {
            tmp[j] = y[j] + h * k3[j];
        }
        field.rhs(&tmp, &mut k4);
        let t = s as f64 * h;
        for j in 0..n {
            let v = y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            if !(-OVERSHOOT_TOL..=1.0 + OVERSHOOT_TOL).contains(&v) {
                return Err(Error::Integration {
                    time: t,
                    message: format!("group {j} reached {v} with step {h}"),
                });
            }
            y[j] = v.clamp(0.0, 1.0);
        }
        times.push(t);
        theta.push(field.theta(&y));
        profiles.push(InfectionProfile {
            num_degrees: initial.num_degrees,
            num_types: initial.num_types,
            values: y.clone(),
        });
    }

    Ok(Trajectory {
        regime,
        degrees: model.degrees().to_vec(),
        num_types: model.num_types(),
        times,
        profiles,
        theta,
    })
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub theta_bar: f64,
    pub profile_bar: InfectionProfile,
    pub converged: bool,
    /// `|F(Θ̄) - Θ̄|` of the aggregation map at the returned point.
    pub residual: f64,
}

impl SteadyState {
    /// Population-average infection `Σ m^{d,k}_i Ī^{d,k}_i`.
    pub fn severity(&self, partition: &Partition) -> f64 {
        partition
            .masses()
            .iter()
            .zip(self.profile_bar.values())
            .map(|(m, v)| m * v)
            .sum()
    }
}

/// Stationary profile for a given link prevalence:
/// `Ī = λ_i d α Θ̄ / (γ + λ_i d α Θ̄)`.
fn stationary_profile(field: &MeanField, theta: f64, out: &mut [f64]) {
    for (v, p) in out.iter_mut().zip(&field.pressure) {
        let force = p * theta;
        *v = force / (field.gamma + force);
    }
}

/// Largest fixed point of the stationary aggregation map on `[0, 1)`.
pub fn steady_state(
    regime: Regime,
    params: &EpidemicParams,
    model: &PopulationModel,
    partition: &Partition,
) -> Result<SteadyState> {
    params.validate()?;
    partition.validate_against(model)?;
    let field = MeanField::new(regime, params, model, partition);
    let mut buf = vec![0.0; field.weights.len()];
    let mut map = |theta: f64| {
        stationary_profile(&field, theta, &mut buf);
        field.theta(&buf)
    };

    let finish = |theta: f64, converged: bool, residual: f64| {
        let mut values = vec![0.0; field.weights.len()];
        stationary_profile(&field, theta, &mut values);
        SteadyState {
            theta_bar: theta,
            profile_bar: InfectionProfile {
                num_degrees: model.num_degrees(),
                num_types: model.num_types(),
                values,
            },
            converged,
            residual,
        }
    };

    // F is increasing and concave with F(0) = 0, so a positive fixed point
    // exists exactly when G = F - id is positive just above zero.
    const LOWER: f64 = 1e-12;
    if map(LOWER) - LOWER <= 0.0 {
        return Ok(finish(0.0, true, 0.0));
    }

    let lambda_eff = params.lambda * params.restriction(regime) * model.max_degree() as f64;
    let mut theta = if lambda_eff > 0.0 {
        (1.0 - params.gamma / lambda_eff).clamp(1e-3, 1.0 - 1e-3)
    } else {
        0.5
    };
    for _ in 0..STEADY_STATE_MAX_ITER {
        let f = map(theta);
        let residual = (f - theta).abs();
        if residual <= STEADY_STATE_TOL && theta > LOWER {
            return Ok(finish(theta, true, residual));
        }
        theta = (1.0 - STEADY_STATE_DAMPING) * theta + STEADY_STATE_DAMPING * f;
    }

    // Bisection fallback on G over (LOWER, 1): G(LOWER) > 0 > G(1).
    let (mut lo, mut hi) = (LOWER, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if map(mid) - mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    let residual = (map(theta) - theta).abs();
    if residual <= STEADY_STATE_TOL {
        Ok(finish(theta, true, residual))
    } else {
        Err(Error::solver("steady-state fixed point did not converge", residual))
    }
}

/// Lyapunov sufficient condition for global stability of the disease-free
/// state in the reopened regime: `Σ d² λ_i m^{d,k}_i / γ ≤ d̄`.
///
/// The weights `b = d m / γ` of the linear Lyapunov function are folded into
/// the inequality.
pub fn disease_free_stable(params: &EpidemicParams, model: &PopulationModel, partition: &Partition) -> bool {
    lyapunov_load(params, model, partition) <= model.mean_degree()
}

/// Left-hand side `Σ d² λ_i m^{d,k}_i / γ` of the stability condition.
pub fn lyapunov_load(params: &EpidemicParams, model: &PopulationModel, partition: &Partition) -> f64 {
    let mut acc = 0.0;
    for (di, &d) in model.degrees().iter().enumerate() {
        let d2 = (d as f64).powi(2);
        for k in 0..model.num_types() {
            for i in 0..ACTIONS {
                acc += d2 * params.contagion(i) * partition.mass(di, k, i);
            }
        }
    }
    acc / params.gamma
}

/// `γ / (d λ) ≤ 1` for every degree in the support.
pub fn persistence_check(params: &EpidemicParams, model: &PopulationModel) -> bool {
    model
        .degrees()
        .iter()
        .all(|&d| params.gamma <= d as f64 * params.lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regular4() -> PopulationModel {
        PopulationModel::regular(4)
    }

    #[test]
    fn theta_aggregate_examples() {
        let m = PopulationModel::independent(vec![2, 5], vec![0.3, 0.7], vec![0.4, 0.6]).unwrap();
        let p = Partition::uniform(&m, 0.3).unwrap();
        assert_eq!(theta_aggregate(&InfectionProfile::zeros(&m), &m, &p), 0.0);
        let one = theta_aggregate(&InfectionProfile::constant(&m, 1.0).unwrap(), &m, &p);
        assert!((one - 1.0).abs() < 1e-15);
        let r = regular4();
        let half = InfectionProfile::constant(&r, 0.5).unwrap();
        assert_eq!(theta_aggregate(&half, &r, &Partition::unvaccinated(&r)), 0.5);
    }

    #[test]
    fn disease_free_profile_is_invariant() {
        let m = regular4();
        let p = EpidemicParams::new(0.2, 0.1, 0.5, 0.4, 20.0).unwrap();
        let traj = integrate(
            Regime::Reopened,
            &p,
            &m,
            &Partition::uniform(&m, 0.3).unwrap(),
            &InfectionProfile::zeros(&m),
            DEFAULT_STEP,
        )
        .unwrap();
        assert!(traj.profiles().iter().all(|q| q.values().iter().all(|&v| v == 0.0)));
        assert!(traj.theta().iter().all(|&t| t == 0.0));
    }

    #[test]
    fn pure_decay_matches_exponential() {
        let m = regular4();
        let p = EpidemicParams::new(0.2, 0.0, 0.5, 0.4, 5.0).unwrap();
        let init = InfectionProfile::constant(&m, 0.8).unwrap();
        let traj = integrate(Regime::Reopened, &p, &m, &Partition::unvaccinated(&m), &init, DEFAULT_STEP).unwrap();
        let oracle = 0.8 * (-0.2_f64 * 5.0).exp();
        assert!((oracle - 0.294_303_552_937_153_9).abs() < 1e-15);
        let end = terminal_profile(&traj);
        assert!((end.get(0, 0, 0) - oracle).abs() < 1e-12);
        for (t, q) in traj.times().iter().zip(traj.profiles()).step_by(50) {
            assert!((q.get(0, 0, 0) - 0.8 * (-0.2 * t).exp()).abs() < 1e-12);
        }
        assert_eq!(*traj.times().last().unwrap(), 5.0);
    }

    #[test]
    fn endemic_trajectory_approaches_closed_form() {
        let m = regular4();
        let p = EpidemicParams::new(0.2, 0.1, 0.5, 0.4, 300.0).unwrap();
        let init = InfectionProfile::constant(&m, 0.1).unwrap();
        let traj = integrate(Regime::Reopened, &p, &m, &Partition::unvaccinated(&m), &init, DEFAULT_STEP).unwrap();
        // 1 - γ/(λd)
        assert!((traj.terminal().get(0, 0, 0) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn constant_trajectory_at_stationarity() {
        let m = regular4();
        let p = EpidemicParams::new(0.2, 0.1, 0.5, 0.4, 10.0).unwrap();
        let init = InfectionProfile::constant(&m, 0.5).unwrap();
        let traj = integrate(Regime::Reopened, &p, &m, &Partition::unvaccinated(&m), &init, DEFAULT_STEP).unwrap();
        assert!((terminal_profile(&traj).get(0, 0, 0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn steady_state_examples() {
        let m = regular4();
        // βλd = 0.5 * 0.1 * 4 = 0.2 ≤ γ = 0.25
        let p = EpidemicParams::new(0.25, 0.1, 0.5, 0.4, 10.0).unwrap();
        let ss = steady_state(Regime::Reopened, &p, &m, &Partition::all_vaccinated(&m)).unwrap();
        assert_eq!(ss.theta_bar, 0.0);

        let p = EpidemicParams::new(0.2, 0.1, 0.5, 0.4, 10.0).unwrap();
        let ss = steady_state(Regime::Reopened, &p, &m, &Partition::unvaccinated(&m)).unwrap();
        assert!((ss.theta_bar - 0.5).abs() < 1e-9);
        assert!((ss.profile_bar.get(0, 0, 0) - 0.5).abs() < 1e-9);
        assert!(ss.residual <= STEADY_STATE_TOL);

        // λdα = 0.16 < γ
        let ss = steady_state(Regime::Restricted, &p, &m, &Partition::unvaccinated(&m)).unwrap();
        assert_eq!(ss.theta_bar, 0.0);
        assert_eq!(ss.severity(&Partition::unvaccinated(&m)), 0.0);
    }

    #[test]
    fn steady_state_satisfies_both_stationarity_relations() {
        let m = PopulationModel::independent(vec![2, 3, 7], vec![0.5, 0.3, 0.2], vec![0.6, 0.4]).unwrap();
        let part = Partition::from_type_fractions(&m, &[0.2, 0.7]).unwrap();
        let p = EpidemicParams::new(0.15, 0.12, 0.4, 0.6, 10.0).unwrap();
        for regime in [Regime::Reopened, Regime::Restricted] {
            let ss = steady_state(regime, &p, &m, &part).unwrap();
            let agg = theta_aggregate(&ss.profile_bar, &m, &part);
            assert!((agg - ss.theta_bar).abs() <= 1e-10);
            let alpha = p.restriction(regime);
            for (di, &d) in m.degrees().iter().enumerate() {
                for k in 0..2 {
                    for i in 0..2 {
                        let v = ss.profile_bar.get(di, k, i);
                        let lhs = p.gamma * v;
                        let rhs = p.contagion(i) * (1.0 - v) * alpha * d as f64 * ss.theta_bar;
                        assert!((lhs - rhs).abs() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn steady_state_near_criticality_uses_fallback() {
        // λd = γ (1 + 1e-7): tiny positive root, slow damped iteration
        let m = regular4();
        let gamma = 0.2;
        let p = EpidemicParams::new(gamma, gamma / 4.0 * (1.0 + 1e-7), 0.5, 0.4, 10.0).unwrap();
        let ss = steady_state(Regime::Reopened, &p, &m, &Partition::unvaccinated(&m)).unwrap();
        let closed = 1.0 - 1.0 / (1.0 + 1e-7);
        assert!(ss.theta_bar > 0.0);
        assert!((ss.theta_bar - closed).abs() < 1e-9, "{}", ss.theta_bar);
    }

    #[test]
    fn disease_free_examples() {
        let m = regular4();
        let p = EpidemicParams::new(0.19, 0.05, 0.5, 0.4, 10.0).unwrap();
        let all = Partition::all_vaccinated(&m);
        assert!((lyapunov_load(&p, &m, &all) - 16.0 * 0.025 / 0.19).abs() < 1e-12);
        assert!(disease_free_stable(&p, &m, &all));
        let none = Partition::unvaccinated(&m);
        assert!((lyapunov_load(&p, &m, &none) - 16.0 * 0.05 / 0.19).abs() < 1e-12);
        assert!(!disease_free_stable(&p, &m, &none));
        let quiet = EpidemicParams::new(0.19, 0.0, 0.5, 0.4, 10.0).unwrap();
        assert!(disease_free_stable(&quiet, &m, &none));
    }

    #[test]
    fn persistence_examples() {
        let p = EpidemicParams::new(0.2, 0.1, 0.5, 0.4, 10.0).unwrap();
        let m = PopulationModel::independent(vec![2, 4], vec![0.5, 0.5], vec![1.0]).unwrap();
        assert!(persistence_check(&p, &m));
        assert!(!persistence_check(&p, &PopulationModel::regular(1)));
        let edge = EpidemicParams::new(0.2, 0.05, 0.5, 0.4, 10.0).unwrap();
        assert!(persistence_check(&edge, &regular4()));
    }

    #[test]
    fn degree_linear_profile() {
        let m = PopulationModel::independent(vec![1, 3, 5], vec![0.2, 0.3, 0.5], vec![0.5, 0.5]).unwrap();
        let p = InfectionProfile::degree_linear(&m, 0.01, 0.05).unwrap();
        assert!((p.get(1, 1, 0) - 0.03).abs() < 1e-15);
        assert_eq!(p.get(2, 0, 1), 0.05);
        assert!(p.is_degree_monotone_type_free());
        let single = InfectionProfile::degree_linear(&regular4(), 0.01, 0.05).unwrap();
        assert_eq!(single.get(0, 0, 0), 0.01);
    }

    #[test]
    fn csv_dump_layout() {
        let m = PopulationModel::independent(vec![2, 4], vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
        let p = EpidemicParams::new(0.2, 0.1, 0.5, 0.4, 0.02).unwrap();
        let traj = integrate(
            Regime::Restricted,
            &p,
            &m,
            &Partition::uniform(&m, 0.5).unwrap(),
            &InfectionProfile::degree_linear(&m, 0.01, 0.05).unwrap(),
            DEFAULT_STEP,
        )
        .unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,regime,I_d2_k1_a0,I_d2_k1_a1,I_d2_k2_a0,I_d2_k2_a1,\
             I_d4_k1_a0,I_d4_k1_a1,I_d4_k2_a0,I_d4_k2_a1,theta"
        );
        assert!(lines.next().unwrap().starts_with("0,-,0.01,"));
        assert_eq!(text.lines().count(), 4);
    }
}
