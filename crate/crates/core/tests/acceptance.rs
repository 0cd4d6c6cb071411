//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Independent oracles use `statrs` for the normal kernels.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use reopen_game::design::{cost_bounds, public_signal_bound, public_signal_condition, HerdThresholds};
use reopen_game::epidemic::{
    disease_free_stable, integrate, steady_state, InfectionProfile, DEFAULT_STEP,
};
use reopen_game::equilibrium::{
    average_action, limit_threshold, posterior_reopening, solve_threshold, threshold_mu_sensitivity,
    uniqueness_condition,
};
use reopen_game::experiment::{run_sweep, suggest_region, Config};
use reopen_game::incentives::{complementarity_check, substitutes_check};
use reopen_game::numerics::{cdf, quantile};
use reopen_game::{EconParams, EpidemicParams, Partition, PopulationModel, Regime, SignalParams};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).unwrap()
}

fn oracle_cdf(z: f64) -> f64 {
    std_normal().cdf(z)
}

fn oracle_quantile(p: f64) -> f64 {
    std_normal().inverse_cdf(p)
}

/// `W(θ)` written out from the model definition with the oracle kernels.
fn oracle_w(theta: f64, masses: &[f64], sigma_k: &[f64], sigma: f64, mu: f64, cost: f64) -> f64 {
    let s2 = sigma * sigma;
    let q = oracle_quantile(cost);
    masses
        .iter()
        .zip(sigma_k)
        .map(|(m, sk)| {
            let tot = s2 + sk * sk;
            let x = (tot.sqrt() * q + s2 * mu - tot * theta) / -(sk * sk);
            m * oracle_cdf(sk * (x - theta))
        })
        .sum::<f64>()
        - theta
}

fn random_masses(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut m: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let head: f64 = m[..n - 1].iter().sum();
    m[n - 1] = 1.0 - head;
    m
}

fn random_degrees(rng: &mut impl Rng) -> Vec<u32> {
    let n = rng.random_range(1..=3);
    let mut d: Vec<u32> = Vec::new();
    while d.len() < n {
        let v = rng.random_range(1..=8);
        if !d.contains(&v) {
            d.push(v);
        }
    }
    d.sort();
    d
}

fn normal_kernels() -> Outcome {
    let n = 10_000;
    let (a, b) = (1e-8f64.ln(), (1.0 - 1e-8f64).ln());
    let mut worst = 0.0f64;
    for j in 0..n {
        let p = (a + (b - a) * j as f64 / (n - 1) as f64).exp();
        for p in [p, 1.0 - p] {
            worst = worst.max((cdf(quantile(p)) - p).abs());
        }
    }
    Outcome::new(worst <= 1e-9, format!("max |cdf(quantile(p)) - p| = {worst:.3e} over {} points", 2 * n))
}

fn symmetric_equilibrium() -> Outcome {
    let model = PopulationModel::regular(4);
    let signals = SignalParams::new(0.5, 1.0, vec![2.0]).unwrap();
    let eq = solve_threshold(&model, &signals, 0.5, 1e-12).unwrap();
    let (dt, dx) = ((eq.theta_star - 0.5).abs(), (eq.x_star[0] - 0.5).abs());
    Outcome::new(dt <= 1e-8 && dx <= 1e-8, format!("|theta* - 0.5| = {dt:.2e}, |x* - 0.5| = {dx:.2e}"))
}

fn uniqueness_and_fixed_point() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grid = 100_000;
    let (lo, hi) = (1e-6, 1.0 - 1e-6);
    let (mut draws, mut bad_count, mut worst_fp, mut worst_post) = (0, 0, 0.0f64, 0.0f64);
    let mut failures = Vec::new();
    while draws < 100 {
        let k = rng.random_range(1..=3);
        let masses = random_masses(&mut rng, k);
        let sigma = rng.random_range(0.3..2.5);
        let sigma_k: Vec<f64> = (0..k).map(|_| rng.random_range(0.3..6.0)).collect();
        let mu = rng.random_range(0.1..0.9);
        let cost = rng.random_range(0.1..0.9);
        let model = PopulationModel::independent(vec![4], vec![1.0], masses.clone()).unwrap();
        let signals = SignalParams::new(mu, sigma, sigma_k.clone()).unwrap();
        if !uniqueness_condition(&model, &signals) {
            continue;
        }
        draws += 1;
        let mut changes = 0;
        let mut prev = oracle_w(lo, &masses, &sigma_k, sigma, mu, cost);
        for j in 1..grid {
            let t = lo + (hi - lo) * j as f64 / (grid - 1) as f64;
            let w = oracle_w(t, &masses, &sigma_k, sigma, mu, cost);
            if (w > 0.0) != (prev > 0.0) {
                changes += 1;
            }
            prev = w;
        }
        if changes != 1 {
            bad_count += 1;
            failures.push(format!("draw {draws}: {changes} sign changes"));
            continue;
        }
        let eq = match solve_threshold(&model, &signals, cost, 1e-12) {
            Ok(eq) => eq,
            Err(e) => {
                bad_count += 1;
                failures.push(format!("draw {draws}: {e}"));
                continue;
            }
        };
        let a = average_action(eq.theta_star, &eq.x_star, &model, &signals);
        worst_fp = worst_fp.max((a - eq.theta_star).abs());
        for (i, x) in eq.x_star.iter().enumerate() {
            worst_post = worst_post.max((posterior_reopening(eq.theta_star, *x, i, &signals) - cost).abs());
        }
    }
    let pass = bad_count == 0 && worst_fp <= 1e-9 && worst_post <= 1e-9;
    let mut detail = format!(
        "{draws} draws, {bad_count} without exactly one sign change; max |A(theta*) - theta*| = {worst_fp:.2e}, max |posterior - c| = {worst_post:.2e}"
    );
    if let Some(f) = failures.first() {
        detail.push_str(&format!("; first failure: {f}"));
    }
    Outcome::new(pass, detail)
}

fn endemic_closed_form() -> Outcome {
    let model = PopulationModel::regular(4);
    let params = EpidemicParams::new(0.2, 0.1, 0.5, 0.4, 500.0).unwrap();
    let none = Partition::unvaccinated(&model);
    let ss = steady_state(Regime::Reopened, &params, &model, &none).unwrap();
    let init = InfectionProfile::constant(&model, 0.1).unwrap();
    let traj = integrate(Regime::Reopened, &params, &model, &none, &init, DEFAULT_STEP).unwrap();
    let end = traj.terminal().get(0, 0, 0);
    let (e1, e2) = ((ss.theta_bar - 0.5).abs(), (end - 0.5).abs());
    Outcome::new(e1 <= 1e-6 && e2 <= 1e-4, format!("|steady - 0.5| = {e1:.2e}, |I(500) - 0.5| = {e2:.2e}"))
}

fn disease_free_stability() -> Outcome {
    let model = PopulationModel::regular(4);
    let params = EpidemicParams::new(0.19, 0.05, 0.5, 1.0, 2000.0).unwrap();
    let all = Partition::all_vaccinated(&model);
    if !disease_free_stable(&params, &model, &all) {
        return Outcome::new(false, "stability condition does not hold for the test partition");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let values: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..=1.0)).collect();
        let init = InfectionProfile::new(&model, values).unwrap();
        let traj = integrate(Regime::Reopened, &params, &model, &all, &init, DEFAULT_STEP).unwrap();
        worst = worst.max(*traj.theta().last().unwrap());
    }
    Outcome::new(worst < 1e-6, format!("max Theta+(2000) over 20 initial profiles = {worst:.3e}"))
}

struct RandomCase {
    model: PopulationModel,
    params: EpidemicParams,
    econ: EconParams,
    partition: Partition,
    initial: InfectionProfile,
}

fn random_case(rng: &mut impl Rng, max_fraction: f64) -> RandomCase {
    let degrees = random_degrees(rng);
    let k = rng.random_range(1..=2);
    let model = PopulationModel::independent(
        degrees.clone(),
        random_masses(rng, degrees.len()),
        random_masses(rng, k),
    )
    .unwrap();
    let params = EpidemicParams::new(
        rng.random_range(0.05..0.5),
        rng.random_range(0.02..0.3),
        rng.random_range(0.1..0.9),
        rng.random_range(0.1..0.9),
        rng.random_range(5.0..40.0),
    )
    .unwrap();
    let econ = EconParams::new(
        rng.random_range(0.05..0.95),
        rng.random_range(0.1..3.0),
        (0..degrees.len()).map(|_| rng.random_range(-1.0..1.0)).collect(),
    )
    .unwrap();
    let mut masses = Vec::new();
    for d in 0..model.num_degrees() {
        for k in 0..model.num_types() {
            let m = model.joint(d, k);
            let f = rng.random_range(0.0..max_fraction);
            masses.push(m * (1.0 - f));
            masses.push(m * f);
        }
    }
    let partition = Partition::new(&model, masses).unwrap();
    let i_min = rng.random_range(0.0..0.3);
    let i_max = rng.random_range(i_min..0.6);
    let initial = InfectionProfile::degree_linear(&model, i_min, i_max).unwrap();
    RandomCase {
        model,
        params,
        econ,
        partition,
        initial,
    }
}

fn strategic_complements() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut verified, mut attempts, mut counterexamples, mut ordering_failures) = (0, 0, 0, 0);
    while verified < 50 && attempts < 2000 {
        attempts += 1;
        let c = random_case(&mut rng, 1.0);
        let report = complementarity_check(&c.params, &c.econ, &c.model, &c.partition, &c.initial).unwrap();
        if !report.premise_holds {
            continue;
        }
        verified += 1;
        counterexamples += report.counterexamples.len();
        if !report.ordering_holds {
            ordering_failures += 1;
        }
    }
    Outcome::new(
        verified == 50 && counterexamples == 0,
        format!(
            "{verified} premise-satisfying sets ({attempts} drawn), {counterexamples} counterexample groups, {ordering_failures} sets violating the trajectory ordering"
        ),
    )
}

fn strategic_substitutes() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut counterexamples = 0;
    let mut first = None;
    for n in 0..50 {
        let c = random_case(&mut rng, 0.85);
        let regime = if rng.random_bool(0.5) { Regime::Reopened } else { Regime::Restricted };
        let report =
            substitutes_check(regime, &c.params, &c.econ, &c.model, &c.partition, 0.1, &c.initial).unwrap();
        if !report.holds {
            counterexamples += report.counterexamples.len();
            first.get_or_insert(n);
        }
    }
    let mut detail = format!("50 fixed-regime sets with bump 0.1, {counterexamples} groups whose gap rose");
    if let Some(n) = first {
        detail.push_str(&format!(" (first in set {n})"));
    }
    Outcome::new(counterexamples == 0, detail)
}

fn mu_sensitivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let model = PopulationModel::regular(4);
    let (mut worst_rel, mut most_negative) = (0.0f64, f64::INFINITY);
    let h = 1e-5;
    for _ in 0..20 {
        let l = rng.random_range(0.1..2.4);
        let c = rng.random_range(0.1..0.9);
        let mu = rng.random_range(0.1..0.9);
        let theta = limit_threshold(l, c, mu, &model, 1e-14, false).unwrap();
        let up = limit_threshold(l, c, mu + h, &model, 1e-14, false).unwrap();
        let down = limit_threshold(l, c, mu - h, &model, 1e-14, false).unwrap();
        let fd = (up - down) / (2.0 * h);
        let s = threshold_mu_sensitivity(theta, l, c, mu, &model).unwrap();
        worst_rel = worst_rel.max((s - fd).abs() / fd.abs().max(1e-12));
        most_negative = most_negative.min(s);
    }
    let matches = worst_rel <= 1e-4;
    let nonnegative = most_negative >= -1e-12;
    Outcome::new(
        matches && nonnegative,
        format!(
            "finite-difference match {} (max rel err {worst_rel:.2e}); nonnegativity {} (min derivative {most_negative:.4})",
            if matches { "ok" } else { "FAILED" },
            if nonnegative { "ok" } else { "FAILED" }
        ),
    )
}

fn public_signal_and_cost_bounds() -> Outcome {
    let herd = HerdThresholds::new(vec![4], vec![0.1]).unwrap();
    let signals = SignalParams::new(0.25, 0.8, vec![1.0]).unwrap();
    let holds = public_signal_condition(&signals, 0.3, &herd).unwrap();
    let c_edge = oracle_cdf(-0.2) + 1e-6;
    let fails_past_edge = !public_signal_condition(&signals, c_edge, &herd).unwrap();
    let b = cost_bounds(&SignalParams::new(0.25, 1.0, vec![1.0]).unwrap(), 0.83333).unwrap();
    let (lo_err, hi_err) = ((b.lo - 2.1e-8).abs(), (b.hi - 0.40129).abs());
    let pass = holds && fails_past_edge && lo_err <= 1e-5 && hi_err <= 1e-5;
    Outcome::new(
        pass,
        format!(
            "condition at sigma*mu = 0.2: {holds}; at c = Phi(-0.2) + 1e-6: {}; bounds ({:.3e}, {:.5})",
            !fails_past_edge, b.lo, b.hi
        ),
    )
}

/// Threshold for a given public precision from the oracle `W`, by bisection.
fn oracle_theta(masses: &[f64], sigma_k: &[f64], sigma: f64, mu: f64, cost: f64) -> f64 {
    let (mut a, mut b) = (1e-9, 1.0 - 1e-9);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if oracle_w(m, masses, sigma_k, sigma, mu, cost) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn sweep_shape() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/demo.toml");
    let config = Config::load(&path).unwrap();
    let scenario = config.scenario().unwrap();
    let plan = config.sweep_plan().unwrap();
    let start = Instant::now();
    let rows = run_sweep(&scenario, &plan);
    let elapsed = start.elapsed().as_secs_f64();
    let herd = HerdThresholds::compute(&scenario.params, &scenario.model).unwrap();
    let cost = scenario.econ.cost;
    let mut checks: Vec<(&str, bool)> = Vec::new();

    checks.push(("200 rows without errors", rows.len() == 200 && rows.iter().all(|r| r.is_ok())));
    checks.push((
        "reopening nondecreasing",
        rows.windows(2).all(|w| w[1].reopen_prob - w[0].reopen_prob >= -1e-9),
    ));
    let condition: Vec<bool> = rows
        .iter()
        .map(|r| public_signal_condition(&scenario.signals.with_sigma(r.sigma), cost, &herd).unwrap())
        .collect();
    checks.push((
        "severity 0 while condition holds",
        rows.iter().zip(&condition).filter(|(_, c)| **c).all(|(r, _)| r.severity == 0.0),
    ));
    let boundary = condition.iter().position(|c| !c);
    checks.push((
        "severity > 0 after boundary",
        boundary.is_some_and(|b| rows[b..].iter().all(|r| r.severity > 0.0)),
    ));

    let region = suggest_region(&rows, plan.target);
    checks.push(("suggested region nonempty", region.is_some()));
    let consistent = region.is_some_and(|(lo, hi)| {
        rows.iter()
            .filter(|r| r.sigma >= lo && r.sigma <= hi)
            .all(|r| r.reopen_prob >= plan.target.value() && r.disease_free)
    });
    checks.push(("region consistent with rows", consistent));

    // independent boundaries: reopening target by bisection over sigma, and
    // the public-signal limit on sigma
    let grid_cell = rows[1].sigma - rows[0].sigma;
    let masses = scenario.model.type_masses().to_vec();
    let sk = scenario.signals.sigma_k.clone();
    let mu = scenario.signals.mu;
    let reopen = |s: f64| oracle_cdf(s * (oracle_theta(&masses, &sk, s, mu, cost) - mu));
    let (mut a, mut b) = (rows[0].sigma, rows[rows.len() - 1].sigma);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if reopen(m) >= plan.target.value() {
            b = m;
        } else {
            a = m;
        }
    }
    let sigma_target = b;
    let q_c = oracle_quantile(cost);
    let sigma_condition = herd
        .values()
        .iter()
        .map(|&e| {
            let q_e = oracle_quantile(e);
            (-q_c).min(-q_e).min(-(1.0 + q_e) / q_c.hypot(q_e)) / mu
        })
        .fold(f64::INFINITY, f64::min);
    let bound_check = (public_signal_bound(cost, &herd).unwrap() / mu - sigma_condition).abs() < 1e-9;
    let (lo_ok, hi_ok) = match region {
        Some((lo, hi)) => (
            (lo - sigma_target).abs() <= grid_cell,
            (hi - sigma_condition).abs() <= grid_cell,
        ),
        None => (false, false),
    };
    checks.push(("lower end within one cell of target bisection", lo_ok));
    checks.push(("upper end within one cell of condition boundary", hi_ok && bound_check));
    checks.push(("sweep under 120 s", elapsed < 120.0));

    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    let region_text = match region {
        Some((lo, hi)) => format!("[{lo:.4}, {hi:.4}]"),
        None => "empty".into(),
    };
    let detail = format!(
        "region {region_text}, target boundary {sigma_target:.4}, condition boundary {sigma_condition:.4}, {} disease-free rows, sweep {elapsed:.2}s; {}",
        rows.iter().filter(|r| r.disease_free).count(),
        if failed.is_empty() {
            "all sub-checks pass".to_string()
        } else {
            format!("failed: {}", failed.join(", "))
        }
    );
    Outcome::new(failed.is_empty(), detail)
}

fn main() -> ExitCode {
    type Criterion = (&'static str, f64, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        ("normal kernels", 1.0, normal_kernels),
        ("symmetric equilibrium", 1.0, symmetric_equilibrium),
        ("uniqueness and fixed-point consistency", 30.0, uniqueness_and_fixed_point),
        ("endemic closed form", 5.0, endemic_closed_form),
        ("disease-free stability", 30.0, disease_free_stability),
        ("strategic complements", 60.0, strategic_complements),
        ("strategic substitutes", 60.0, strategic_substitutes),
        ("threshold sensitivity to the public mean", 5.0, mu_sensitivity),
        ("public-signal condition and cost bounds", 1.0, public_signal_and_cost_bounds),
        ("public-precision sweep shape", 120.0, sweep_shape),
        // statrs evaluates erfc to roughly 1e-11, so that bounds the agreement
        ("oracle kernels agree", 1.0, || {
            let worst = (-8..=8)
                .map(|z| (cdf(z as f64) - oracle_cdf(z as f64)).abs())
                .fold(0.0f64, f64::max);
            Outcome::new(worst < 1e-10, format!("max |cdf - statrs cdf| on integers in [-8, 8] = {worst:.1e}"))
        }),
    ];
    let mut failures = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs < budget;
        let pass = outcome.pass && in_time;
        if !pass {
            failures += 1;
        }
        let timing = if in_time {
            format!("{secs:.2}s")
        } else {
            format!("{secs:.2}s over the {budget}s budget")
        };
        println!(
            "{} {name}: {} [{timing}]",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
