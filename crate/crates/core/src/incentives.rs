//! Regime-dependent payoffs and numerical checks of the incentive structure:
//! strategic complements when the regime can switch, substitutes when it is
//! fixed.
//!
//! Payoffs of a `(degree d, type k)` player taking action `i` under regime `s`:
//!
//! ```text
//! u^{d,k,-}_i = -c [i = 1] - r I^{d,k,-}_i(T)
//! u^{d,k,+}_i = -c [i = 1] - r I^{d,k,+}_i(T) + g^d
//! ```
//!
//! The checks integrate the dynamics and report what they find; a failed
//! check is a result, not an error.

use serde::Serialize;

use crate::epidemic::{integrate, InfectionProfile, Trajectory, DEFAULT_STEP};
use crate::error::{Error, Result};
use crate::params::{EconParams, EpidemicParams, Regime};
use crate::population::{coverage, Partition, PopulationModel, ACTIONS};

/// Slack for every comparison made by the checks.
pub const CHECK_TOL: f64 = 1e-9;

const REGIMES: [Regime; 2] = [Regime::Restricted, Regime::Reopened];

fn regime_index(regime: Regime) -> usize {
    match regime {
        Regime::Restricted => 0,
        Regime::Reopened => 1,
    }
}

/// Payoffs `u^{d,k,s}_i`, flat in `(degree, type, regime, action)` order with
/// the restricted regime first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffTable {
    degrees: Vec<u32>,
    num_types: usize,
    values: Vec<f64>,
}

impl PayoffTable {
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn num_types(&self) -> usize {
        self.num_types
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, degree_idx: usize, type_idx: usize, regime: Regime, action: usize) -> f64 {
        let g = degree_idx * self.num_types + type_idx;
        self.values[(g * 2 + regime_index(regime)) * ACTIONS + action]
    }

    /// `Δ^s = u^s_1 − u^s_0` for one group.
    pub fn gap(&self, degree_idx: usize, type_idx: usize, regime: Regime) -> f64 {
        self.get(degree_idx, type_idx, regime, 1) - self.get(degree_idx, type_idx, regime, 0)
    }

    /// Gaps of every `(d, k)` group under `regime`, flat in `(degree, type)` order.
    pub fn gaps(&self, regime: Regime) -> Vec<f64> {
        (0..self.degrees.len())
            .flat_map(|d| (0..self.num_types).map(move |k| (d, k)))
            .map(|(d, k)| self.gap(d, k, regime))
            .collect()
    }
}

/// Assembles the payoff table from the terminal profiles of both regimes.
pub fn payoffs(traj_plus: &Trajectory, traj_minus: &Trajectory, econ: &EconParams) -> Result<PayoffTable> {
    econ.validate()?;
    if traj_plus.regime() != Regime::Reopened || traj_minus.regime() != Regime::Restricted {
        return Err(Error::Shape(format!(
            "expected a '+' and a '-' trajectory, got '{}' and '{}'",
            traj_plus.regime(),
            traj_minus.regime()
        )));
    }
    if !traj_plus.is_aligned_with(traj_minus) {
        return Err(Error::Shape("trajectories differ in grouping or horizon".into()));
    }
    let degrees = traj_plus.degrees().to_vec();
    if econ.gains.len() != degrees.len() {
        return Err(Error::Shape(format!(
            "{} reopening gains for {} degrees",
            econ.gains.len(),
            degrees.len()
        )));
    }
    let num_types = traj_plus.num_types();
    let terminal = [traj_minus.terminal(), traj_plus.terminal()];
    let mut values = Vec::with_capacity(degrees.len() * num_types * 2 * ACTIONS);
    for (d, gain) in econ.gains.iter().enumerate() {
        for k in 0..num_types {
            for (s, regime) in REGIMES.iter().enumerate() {
                let bonus = if *regime == Regime::Reopened { *gain } else { 0.0 };
                for i in 0..ACTIONS {
                    let cost = if i == 1 { econ.cost } else { 0.0 };
                    values.push(-cost - econ.risk * terminal[s].get(d, k, i) + bonus);
                }
            }
        }
    }
    Ok(PayoffTable {
        degrees,
        num_types,
        values,
    })
}

/// One `(d, k)` group whose gaps violate the checked ordering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupGap {
    pub degree: u32,
    /// Zero-based type index.
    pub type_idx: usize,
    pub first: f64,
    pub second: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IncentiveReport {
    /// `Θ⁺(t) ≥ α Θ⁻(t)` at every grid time.
    pub premise_holds: bool,
    /// Grid times where the premise fails.
    pub premise_violations: Vec<f64>,
    /// Per-group gaps in `(degree, type)` order.
    pub gaps_plus: Vec<f64>,
    pub gaps_minus: Vec<f64>,
    /// `Δ⁺ ≥ Δ⁻` for every group.
    pub complementarity_holds: bool,
    /// Groups with `Δ⁺ < Δ⁻`; `first` is `Δ⁺`, `second` is `Δ⁻`.
    pub counterexamples: Vec<GroupGap>,
    /// `I⁺_0 − I⁺_1 ≥ I⁻_0 − I⁻_1` for every group at every grid time.
    pub ordering_holds: bool,
}

fn integrate_both(
    params: &EpidemicParams,
    model: &PopulationModel,
    partition: &Partition,
    initial: &InfectionProfile,
) -> Result<(Trajectory, Trajectory)> {
    let run = |regime, h| integrate(regime, params, model, partition, initial, h);
    let (plus, minus) = rayon::join(
        || run(Regime::Reopened, DEFAULT_STEP),
        || run(Regime::Restricted, DEFAULT_STEP),
    );
    let (plus, minus) = (plus?, minus?);
    if plus.is_aligned_with(&minus) {
        return Ok((plus, minus));
    }
    // one regime needed a finer step; rerun both on it
    let h = params.horizon / (plus.len().max(minus.len()) - 1) as f64;
    let (plus, minus) = (run(Regime::Reopened, h)?, run(Regime::Restricted, h)?);
    if plus.is_aligned_with(&minus) {
        Ok((plus, minus))
    } else {
        Err(Error::Integration {
            time: 0.0,
            message: "regimes could not be integrated on a shared grid".into(),
        })
    }
}

fn group_labels(model: &PopulationModel) -> impl Iterator<Item = (u32, usize)> + '_ {
    model
        .degrees()
        .iter()
        .flat_map(move |&d| (0..model.num_types()).map(move |k| (d, k)))
}

/// Integrates both regimes from `initial` and compares the payoff gaps.
pub fn complementarity_check(
    params: &EpidemicParams,
    econ: &EconParams,
    model: &PopulationModel,
    partition: &Partition,
    initial: &InfectionProfile,
) -> Result<IncentiveReport> {
    if !initial.is_degree_monotone_type_free() {
        return Err(Error::domain(
            "initial profile must be weakly increasing in degree and identical across types and actions",
        ));
    }
    let (plus, minus) = integrate_both(params, model, partition, initial)?;
    let table = payoffs(&plus, &minus, econ)?;

    let premise_violations: Vec<f64> = plus
        .times()
        .iter()
        .zip(plus.theta().iter().zip(minus.theta()))
        .filter(|(_, (tp, tm))| **tp < params.alpha * **tm - CHECK_TOL)
        .map(|(t, _)| *t)
        .collect();

    let ordering_holds = plus.profiles().iter().zip(minus.profiles()).all(|(p, m)| {
        (0..model.num_degrees()).all(|d| {
            (0..model.num_types()).all(|k| {
                p.get(d, k, 0) - p.get(d, k, 1) >= m.get(d, k, 0) - m.get(d, k, 1) - CHECK_TOL
            })
        })
    });

    let gaps_plus = table.gaps(Regime::Reopened);
    let gaps_minus = table.gaps(Regime::Restricted);
    let counterexamples: Vec<GroupGap> = group_labels(model)
        .zip(gaps_plus.iter().zip(&gaps_minus))
        .filter(|(_, (p, m))| **p < **m - CHECK_TOL)
        .map(|((degree, type_idx), (p, m))| GroupGap {
            degree,
            type_idx,
            first: *p,
            second: *m,
        })
        .collect();

    Ok(IncentiveReport {
        premise_holds: premise_violations.is_empty(),
        premise_violations,
        gaps_plus,
        gaps_minus,
        complementarity_holds: counterexamples.is_empty(),
        counterexamples,
        ordering_holds,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SubstitutesReport {
    pub regime: Regime,
    pub coverage_base: f64,
    pub coverage_bumped: f64,
    /// Per-group gaps in `(degree, type)` order.
    pub gaps_base: Vec<f64>,
    pub gaps_bumped: Vec<f64>,
    /// Every gap weakly decreases as coverage rises.
    pub holds: bool,
    /// Groups whose gap rose; `first` is the base gap, `second` the bumped one.
    pub counterexamples: Vec<GroupGap>,
}

fn regime_gaps(
    regime: Regime,
    params: &EpidemicParams,
    econ: &EconParams,
    model: &PopulationModel,
    partition: &Partition,
    initial: &InfectionProfile,
) -> Result<Vec<f64>> {
    let traj = integrate(regime, params, model, partition, initial, DEFAULT_STEP)?;
    if econ.gains.len() != model.num_degrees() {
        return Err(Error::Shape(format!(
            "{} reopening gains for {} degrees",
            econ.gains.len(),
            model.num_degrees()
        )));
    }
    // within one regime the gain cancels and the gap is r (I_0 − I_1) − c
    let end = traj.terminal();
    Ok((0..model.num_degrees())
        .flat_map(|d| (0..model.num_types()).map(move |k| (d, k)))
        .map(|(d, k)| econ.risk * (end.get(d, k, 0) - end.get(d, k, 1)) - econ.cost)
        .collect())
}

/// Compares the gaps under a fixed regime before and after moving
/// `coverage_bump` of mass to vaccination.
pub fn substitutes_check(
    regime: Regime,
    params: &EpidemicParams,
    econ: &EconParams,
    model: &PopulationModel,
    base_partition: &Partition,
    coverage_bump: f64,
    initial: &InfectionProfile,
) -> Result<SubstitutesReport> {
    econ.validate()?;
    let bumped = base_partition.bumped(coverage_bump)?;
    let (base, high) = rayon::join(
        || regime_gaps(regime, params, econ, model, base_partition, initial),
        || regime_gaps(regime, params, econ, model, &bumped, initial),
    );
    let (gaps_base, gaps_bumped) = (base?, high?);
    let counterexamples: Vec<GroupGap> = group_labels(model)
        .zip(gaps_base.iter().zip(&gaps_bumped))
        .filter(|(_, (b, h))| **h > **b + CHECK_TOL)
        .map(|((degree, type_idx), (b, h))| GroupGap {
            degree,
            type_idx,
            first: *b,
            second: *h,
        })
        .collect();
    Ok(SubstitutesReport {
        regime,
        coverage_base: coverage(base_partition),
        coverage_bumped: coverage(&bumped),
        gaps_base,
        gaps_bumped,
        holds: counterexamples.is_empty(),
        counterexamples,
    })
}
