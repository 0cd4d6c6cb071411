//! Configuration-driven runs behind the command-line tool: single scenarios,
//! incentive verification, the public-precision sweep and the suggested
//! precision region.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{public_signal_bound, HerdThresholds};
use crate::epidemic::{
    disease_free_stable, integrate, steady_state, InfectionProfile, DEFAULT_I_MAX, DEFAULT_I_MIN, DEFAULT_STEP,
};
use crate::equilibrium::{ne_partition, reopening_probability, solve_threshold, EquilibriumResult, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::incentives::{complementarity_check, substitutes_check, IncentiveReport, SubstitutesReport};
use crate::numerics::{quantile, Probability};
use crate::params::{EconParams, EpidemicParams, Regime, SignalParams};
use crate::population::{coverage, Partition, PopulationModel};
use crate::report::format_sig;

/// Quadrature nodes used by the expected severity mode.
pub const EXPECTED_NODES: usize = 32;
pub const DEFAULT_TARGET: f64 = 0.9;
pub const DEFAULT_COVERAGE_BUMP: f64 = 0.1;
pub const SWEEP_HEADER: &str = "sigma,theta_star,reopen_prob,coverage,disease_free,severity,error";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationConfig {
    pub degrees: Vec<u32>,
    /// Row per degree, column per type. Overrides the marginals when given.
    #[serde(default)]
    pub joint: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub degree_masses: Option<Vec<f64>>,
    #[serde(default)]
    pub type_masses: Option<Vec<f64>>,
}

impl PopulationConfig {
    fn build(&self) -> Result<PopulationModel> {
        match (&self.joint, &self.degree_masses, &self.type_masses) {
            (Some(joint), None, None) => PopulationModel::from_joint(self.degrees.clone(), joint.clone()),
            (None, Some(dm), Some(tm)) => PopulationModel::independent(self.degrees.clone(), dm.clone(), tm.clone()),
            _ => Err(Error::Config(
                "population needs either `joint` or both `degree_masses` and `type_masses`".into(),
            )),
        }
    }
}

fn default_i_min() -> f64 {
    DEFAULT_I_MIN
}

fn default_i_max() -> f64 {
    DEFAULT_I_MAX
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpidemicConfig {
    pub gamma: f64,
    pub lambda: f64,
    pub beta: f64,
    pub alpha: f64,
    pub horizon: f64,
    /// Initial infection at the lowest degree.
    #[serde(default = "default_i_min")]
    pub i_min: f64,
    /// Initial infection at the highest degree.
    #[serde(default = "default_i_max")]
    pub i_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SeverityMode {
    /// Steady state at the boundary realization θ = θ*.
    #[default]
    Marginal,
    /// Average over θ conditioned on reopening.
    Expected,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SigmaGrid {
    List(Vec<f64>),
    Linspace { lo: f64, hi: f64, points: usize },
}

impl SigmaGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            SigmaGrid::List(v) => v.clone(),
            SigmaGrid::Linspace { lo, hi, points } => {
                if *points < 2 {
                    return Err(Error::Config("sigma_grid needs at least 2 points".into()));
                }
                let n = points - 1;
                (0..=n)
                    .map(|j| if j == n { *hi } else { lo + (hi - lo) * j as f64 / n as f64 })
                    .collect()
            }
        };
        if v.is_empty() {
            return Err(Error::Config("sigma_grid is empty".into()));
        }
        if v.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::Config("sigma_grid values must be positive".into()));
        }
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("sigma_grid must be strictly increasing".into()));
        }
        Ok(v)
    }
}

fn default_target() -> f64 {
    DEFAULT_TARGET
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub sigma_grid: SigmaGrid,
    #[serde(default = "default_target")]
    pub target_reopen_probability: f64,
    #[serde(default)]
    pub severity_mode: SeverityMode,
    /// CSV destination used when `--out` is not given.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_bump() -> f64 {
    DEFAULT_COVERAGE_BUMP
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Uniform vaccinated fraction for the checks; the equilibrium partition
    /// at θ = θ* is used when absent.
    #[serde(default)]
    pub vaccinated_fraction: Option<f64>,
    #[serde(default = "default_bump")]
    pub coverage_bump: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            vaccinated_fraction: None,
            coverage_bump: DEFAULT_COVERAGE_BUMP,
        }
    }
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tol: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub population: PopulationConfig,
    pub epidemic: EpidemicConfig,
    pub econ: EconParams,
    pub signal: SignalParams,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigFormat {
    Toml,
    Json,
}

impl ConfigFormat {
    /// `.json` selects JSON; anything else is read as TOML.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => ConfigFormat::Json,
            _ => ConfigFormat::Toml,
        }
    }
}

impl Config {
    pub fn parse(text: &str, format: ConfigFormat) -> Result<Self> {
        match format {
            ConfigFormat::Toml => toml::from_str(text).map_err(|e| Error::Config(e.to_string())),
            ConfigFormat::Json => serde_json::from_str(text).map_err(|e| Error::Config(e.to_string())),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, ConfigFormat::from_path(path)).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Validated model objects; every failure is reported as a config error.
    pub fn scenario(&self) -> Result<Scenario> {
        let as_config = |section: &str, e: Error| match e {
            Error::Config(_) => e,
            other => Error::Config(format!("[{section}] {other}")),
        };
        let model = self.population.build().map_err(|e| as_config("population", e))?;
        let ep = &self.epidemic;
        let params = EpidemicParams::new(ep.gamma, ep.lambda, ep.beta, ep.alpha, ep.horizon)
            .map_err(|e| as_config("epidemic", e))?;
        let initial =
            InfectionProfile::degree_linear(&model, ep.i_min, ep.i_max).map_err(|e| as_config("epidemic", e))?;
        self.econ.validate().map_err(|e| as_config("econ", e))?;
        if self.econ.gains.len() != model.num_degrees() {
            return Err(Error::Config(format!(
                "[econ] {} gains for {} degrees",
                self.econ.gains.len(),
                model.num_degrees()
            )));
        }
        self.signal.validate().map_err(|e| as_config("signal", e))?;
        if self.signal.sigma_k.len() != model.num_types() {
            return Err(Error::Config(format!(
                "[signal] {} private precisions for {} types",
                self.signal.sigma_k.len(),
                model.num_types()
            )));
        }
        if !(self.solver.tol > 0.0) {
            return Err(Error::Config(format!("[solver] tol = {} must be positive", self.solver.tol)));
        }
        Ok(Scenario {
            model,
            params,
            econ: self.econ.clone(),
            signals: self.signal.clone(),
            initial,
            tol: self.solver.tol,
        })
    }

    pub fn sweep_plan(&self) -> Result<SweepPlan> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::Config("missing [sweep] section".into()))?;
        let target = Probability::new(sweep.target_reopen_probability)
            .map_err(|e| Error::Config(format!("[sweep] target_reopen_probability: {e}")))?;
        Ok(SweepPlan {
            sigmas: sweep.sigma_grid.values().map_err(|e| Error::Config(format!("[sweep] {e}")))?,
            target,
            severity_mode: sweep.severity_mode,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub model: PopulationModel,
    pub params: EpidemicParams,
    pub econ: EconParams,
    pub signals: SignalParams,
    pub initial: InfectionProfile,
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub equilibrium: EquilibriumResult,
    pub reopen_prob: f64,
    pub partition: Partition,
    pub coverage: f64,
}

pub fn run_scenario(s: &Scenario) -> Result<ScenarioReport> {
    let equilibrium = solve_threshold(&s.model, &s.signals, s.econ.cost, s.tol)?;
    let partition = ne_partition(equilibrium.theta_star, &equilibrium.x_star, &s.model, &s.signals)?;
    Ok(ScenarioReport {
        reopen_prob: reopening_probability(equilibrium.theta_star, &s.signals).value(),
        coverage: coverage(&partition),
        partition,
        equilibrium,
    })
}

impl ScenarioReport {
    pub fn render(&self) -> String {
        let eq = &self.equilibrium;
        let mut out = String::new();
        let _ = writeln!(out, "theta_star   {}", format_sig(eq.theta_star, 12));
        for (k, x) in eq.x_star.iter().enumerate() {
            let _ = writeln!(out, "x_star[{}]    {}", k + 1, format_sig(*x, 12));
        }
        let _ = writeln!(out, "reopen_prob  {}", format_sig(self.reopen_prob, 12));
        let _ = writeln!(out, "coverage     {}", format_sig(self.coverage, 12));
        let _ = writeln!(out, "residual     {}", format_sig(eq.residual, 3));
        let _ = writeln!(out, "unique       {}", if eq.unique { "yes" } else { "no" });
        let roots: Vec<String> = eq.roots_found.iter().map(|r| format_sig(*r, 12)).collect();
        let _ = writeln!(out, "roots        {} [{}]", roots.len(), roots.join(", "));
        out
    }
}

/// Writes both regimes' trajectories under the equilibrium partition to
/// `traj_plus.csv` and `traj_minus.csv` in `dir`.
pub fn dump_trajectories(s: &Scenario, report: &ScenarioReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (regime, name) in [(Regime::Reopened, "traj_plus.csv"), (Regime::Restricted, "traj_minus.csv")] {
        let traj = integrate(regime, &s.params, &s.model, &report.partition, &s.initial, DEFAULT_STEP)?;
        let path = dir.join(name);
        traj.write_csv(fs::File::create(&path)?)?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub complementarity: IncentiveReport,
    pub substitutes: Vec<SubstitutesReport>,
}

impl VerifyReport {
    /// Complementarity is only claimed under its premise; a failed premise
    /// does not fail the run.
    pub fn complementarity_passes(&self) -> bool {
        !self.complementarity.premise_holds || self.complementarity.complementarity_holds
    }

    pub fn passed(&self) -> bool {
        self.complementarity_passes() && self.substitutes.iter().all(|r| r.holds)
    }

    pub fn render(&self, model: &PopulationModel) -> String {
        let c = &self.complementarity;
        let mut out = String::new();
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "complements under regime switching");
        let _ = writeln!(
            out,
            "  premise Theta+ >= alpha Theta-: {}",
            if c.premise_holds {
                "holds".to_string()
            } else {
                format!("fails at {} grid times, first t = {}", c.premise_violations.len(), format_sig(c.premise_violations[0], 6))
            }
        );
        let _ = writeln!(out, "  {:>6} {:>4} {:>16} {:>16}", "degree", "type", "gap_plus", "gap_minus");
        let labels: Vec<(u32, usize)> = model
            .degrees()
            .iter()
            .flat_map(|&d| (0..model.num_types()).map(move |k| (d, k)))
            .collect();
        for ((d, k), (p, m)) in labels.iter().zip(c.gaps_plus.iter().zip(&c.gaps_minus)) {
            let _ = writeln!(out, "  {:>6} {:>4} {:>16} {:>16}", d, k + 1, format_sig(*p, 9), format_sig(*m, 9));
        }
        for g in &c.counterexamples {
            let _ = writeln!(out, "  counterexample: degree {} type {}", g.degree, g.type_idx + 1);
        }
        let _ = writeln!(out, "  {}", if c.premise_holds { verdict(c.complementarity_holds) } else { "SKIPPED (premise false)" });

        for r in &self.substitutes {
            let _ = writeln!(
                out,
                "substitutes under fixed regime '{}' (coverage {} -> {})",
                r.regime,
                format_sig(r.coverage_base, 6),
                format_sig(r.coverage_bumped, 6)
            );
            let _ = writeln!(out, "  {:>6} {:>4} {:>16} {:>16}", "degree", "type", "gap_base", "gap_bumped");
            for ((d, k), (b, h)) in labels.iter().zip(r.gaps_base.iter().zip(&r.gaps_bumped)) {
                let _ = writeln!(out, "  {:>6} {:>4} {:>16} {:>16}", d, k + 1, format_sig(*b, 9), format_sig(*h, 9));
            }
            for g in &r.counterexamples {
                let _ = writeln!(out, "  counterexample: degree {} type {}", g.degree, g.type_idx + 1);
            }
            let _ = writeln!(out, "  {}", verdict(r.holds));
        }
        out
    }
}

pub fn run_verify(s: &Scenario, verify: &VerifyConfig) -> Result<VerifyReport> {
    let partition = match verify.vaccinated_fraction {
        Some(f) => Partition::uniform(&s.model, f).map_err(|e| Error::Config(format!("[verify] {e}")))?,
        None => run_scenario(s)?.partition,
    };
    let complementarity = complementarity_check(&s.params, &s.econ, &s.model, &partition, &s.initial)?;
    let substitutes = [Regime::Restricted, Regime::Reopened]
        .into_iter()
        .map(|regime| {
            substitutes_check(regime, &s.params, &s.econ, &s.model, &partition, verify.coverage_bump, &s.initial)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        complementarity,
        substitutes,
    })
}

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub sigmas: Vec<f64>,
    pub target: Probability,
    pub severity_mode: SeverityMode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub theta_star: f64,
    pub reopen_prob: f64,
    pub coverage: f64,
    pub disease_free: bool,
    /// Population-average steady-state infection after reopening.
    pub severity: f64,
    /// Solver failure at this σ; the numeric fields are NaN when set.
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(sigma: f64, e: Error) -> Self {
        SweepRow {
            sigma,
            theta_star: f64::NAN,
            reopen_prob: f64::NAN,
            coverage: f64::NAN,
            disease_free: false,
            severity: f64::NAN,
            error: Some(e.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Reopened-regime steady-state severity when the realized threshold is
/// `theta`; zero whenever the disease-free certificate holds.
fn severity_at(s: &Scenario, signals: &SignalParams, x_star: &[f64], theta: f64) -> Result<(bool, f64)> {
    let partition = ne_partition(theta, x_star, &s.model, signals)?;
    if disease_free_stable(&s.params, &s.model, &partition) {
        return Ok((true, 0.0));
    }
    let ss = steady_state(Regime::Reopened, &s.params, &s.model, &partition)?;
    Ok((false, ss.severity(&partition)))
}

fn sweep_point(s: &Scenario, sigma: f64, mode: SeverityMode, rule: &GaussLegendre) -> Result<SweepRow> {
    let signals = s.signals.with_sigma(sigma);
    let eq = solve_threshold(&s.model, &signals, s.econ.cost, s.tol)?;
    let theta = eq.theta_star;
    let reopen = reopening_probability(theta, &signals).value();
    let partition = ne_partition(theta, &eq.x_star, &s.model, &signals)?;
    let (disease_free, marginal) = severity_at(s, &signals, &eq.x_star, theta)?;
    let severity = match mode {
        _ if disease_free => 0.0,
        SeverityMode::Marginal => marginal,
        SeverityMode::Expected if reopen <= 0.0 => marginal,
        SeverityMode::Expected => {
            // θ | θ ≤ θ*  has quantile  μ + Φ⁻¹(u P)/σ  for u ∈ (0, 1)
            let mut failure = None;
            let value = rule.integrate(0.0, 1.0, |u| {
                let t = signals.mu + quantile(u * reopen) / sigma;
                match severity_at(s, &signals, &eq.x_star, t) {
                    Ok((_, v)) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
            value
        }
    };
    Ok(SweepRow {
        sigma,
        theta_star: theta,
        reopen_prob: reopen,
        coverage: coverage(&partition),
        disease_free,
        severity,
        error: None,
    })
}

/// One row per grid value, in grid order; per-σ failures are recorded in the
/// row rather than aborting the sweep.
pub fn run_sweep(s: &Scenario, plan: &SweepPlan) -> Vec<SweepRow> {
    let rule = GaussLegendre::new(NonZeroUsize::new(EXPECTED_NODES).expect("nonzero"));
    plan.sigmas
        .par_iter()
        .map(|&sigma| sweep_point(s, sigma, plan.severity_mode, &rule).unwrap_or_else(|e| SweepRow::failed(sigma, e)))
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(SWEEP_HEADER.split(',')).map_err(io)?;
    for r in rows {
        let num = |x: f64| if r.is_ok() { format_sig(x, 12) } else { String::new() };
        let flag = if r.is_ok() { r.disease_free.to_string() } else { String::new() };
        w.write_record([
            format_sig(r.sigma, 12),
            num(r.theta_star),
            num(r.reopen_prob),
            num(r.coverage),
            flag,
            num(r.severity),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// `[σ_lo, σ_hi]` with `σ_lo` the first grid σ reaching the target reopening
/// probability and `σ_hi` the last disease-free σ; `None` when either is
/// missing or `σ_lo > σ_hi`.
pub fn suggest_region(rows: &[SweepRow], target: Probability) -> Option<(f64, f64)> {
    let lo = rows
        .iter()
        .find(|r| r.is_ok() && r.reopen_prob >= target.value())?
        .sigma;
    let hi = rows.iter().rev().find(|r| r.is_ok() && r.disease_free)?.sigma;
    (lo <= hi).then_some((lo, hi))
}

#[derive(Debug, Clone)]
pub struct Suggestion {
    pub region: Option<(f64, f64)>,
    pub target: f64,
    /// Largest σ admitted by the public-signal condition, when the herd
    /// thresholds are defined.
    pub public_signal_sigma_max: Option<f64>,
    pub failed_rows: usize,
}

pub fn run_suggest(s: &Scenario, plan: &SweepPlan) -> Suggestion {
    let rows = run_sweep(s, plan);
    let bound = HerdThresholds::compute(&s.params, &s.model)
        .and_then(|h| public_signal_bound(s.econ.cost, &h))
        .ok()
        .map(|b| b / s.signals.mu);
    Suggestion {
        region: suggest_region(&rows, plan.target),
        target: plan.target.value(),
        public_signal_sigma_max: bound,
        failed_rows: rows.iter().filter(|r| !r.is_ok()).count(),
    }
}

impl Suggestion {
    pub fn render(&self) -> String {
        let mut out = String::new();
        match self.region {
            Some((lo, hi)) => {
                let _ = writeln!(out, "suggested sigma region [{}, {}]", format_sig(lo, 12), format_sig(hi, 12));
            }
            None => {
                let _ = writeln!(out, "suggested sigma region empty");
            }
        }
        let _ = writeln!(out, "target reopening probability {}", format_sig(self.target, 6));
        match self.public_signal_sigma_max {
            Some(b) if b > 0.0 => {
                let _ = writeln!(out, "public-signal condition holds for sigma <= {}", format_sig(b, 12));
            }
            Some(_) => {
                let _ = writeln!(out, "public-signal condition holds for no sigma");
            }
            None => {
                let _ = writeln!(out, "public-signal condition undefined (herd threshold outside (0, 1))");
            }
        }
        if self.failed_rows > 0 {
            let _ = writeln!(out, "{} grid points failed to solve", self.failed_rows);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYMMETRIC: &str = r#"
[population]
degrees = [4]
degree_masses = [1.0]
type_masses = [1.0]

[epidemic]
gamma = 0.19
lambda = 0.05
beta = 0.5
alpha = 0.4
horizon = 20.0

[econ]
cost = 0.5
risk = 1.0
gains = [0.3]

[signal]
mu = 0.5
sigma = 1.0
sigma_k = [2.0]

[sweep]
sigma_grid = { lo = 0.5, hi = 2.0, points = 4 }
"#;

    fn symmetric() -> Config {
        Config::parse(SYMMETRIC, ConfigFormat::Toml).unwrap()
    }

    #[test]
    fn symmetric_scenario() {
        let r = run_scenario(&symmetric().scenario().unwrap()).unwrap();
        assert!((r.equilibrium.theta_star - 0.5).abs() < 1e-8);
        assert!((r.equilibrium.x_star[0] - 0.5).abs() < 1e-8);
        assert!(r.render().contains("theta_star   0.5"));
    }

    #[test]
    fn defaults_are_documented_values() {
        let c = symmetric();
        let sweep = c.sweep_plan().unwrap();
        assert_eq!(sweep.target.value(), 0.9);
        assert_eq!(sweep.severity_mode, SeverityMode::Marginal);
        assert_eq!(sweep.sigmas, vec![0.5, 1.0, 1.5, 2.0]);
        assert_eq!(c.epidemic.i_min, 0.01);
        assert_eq!(c.verify.coverage_bump, 0.1);
        assert_eq!(c.solver.tol, 1e-12);
    }

    #[test]
    fn missing_field_names_it() {
        let text = SYMMETRIC.replace("gamma = 0.19\n", "");
        let err = Config::parse(&text, ConfigFormat::Toml).unwrap_err();
        assert!(matches!(&err, Error::Config(m) if m.contains("gamma")), "{err}");
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let text = SYMMETRIC.replace("gamma = 0.19", "gamma = 1.5");
        let err = Config::parse(&text, ConfigFormat::Toml).unwrap().scenario().unwrap_err();
        assert!(matches!(&err, Error::Config(m) if m.contains("epidemic") && m.contains("gamma")), "{err}");
        let text = SYMMETRIC.replace("gains = [0.3]", "gains = [0.3, 0.1]");
        assert!(matches!(Config::parse(&text, ConfigFormat::Toml).unwrap().scenario(), Err(Error::Config(_))));
    }

    #[test]
    fn grid_must_increase() {
        assert!(SigmaGrid::List(vec![1.0, 1.0]).values().is_err());
        assert!(SigmaGrid::List(vec![0.0, 1.0]).values().is_err());
        assert!(SigmaGrid::List(vec![]).values().is_err());
        let v = SigmaGrid::Linspace { lo: 0.1, hi: 0.3, points: 3 }.values().unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[2], 0.3);
    }

    #[test]
    fn json_config_matches_toml() {
        let json = r#"{
            "population": {"degrees": [4], "joint": [[1.0]]},
            "epidemic": {"gamma": 0.19, "lambda": 0.05, "beta": 0.5, "alpha": 0.4, "horizon": 20.0},
            "econ": {"cost": 0.5, "risk": 1.0, "gains": [0.3]},
            "signal": {"mu": 0.5, "sigma": 1.0, "sigma_k": [2.0]}
        }"#;
        let a = Config::parse(json, ConfigFormat::Json).unwrap().scenario().unwrap();
        let b = symmetric().scenario().unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.params, b.params);
        assert_eq!(ConfigFormat::from_path(Path::new("x.JSON")), ConfigFormat::Json);
        assert_eq!(ConfigFormat::from_path(Path::new("x.toml")), ConfigFormat::Toml);
    }

    #[test]
    fn sweep_rows_follow_grid() {
        let c = symmetric();
        let s = c.scenario().unwrap();
        let plan = c.sweep_plan().unwrap();
        let rows = run_sweep(&s, &plan);
        assert_eq!(rows.iter().map(|r| r.sigma).collect::<Vec<_>>(), plan.sigmas);
        for r in &rows {
            assert!(r.is_ok());
            if r.disease_free {
                assert_eq!(r.severity, 0.0);
            }
        }
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), SWEEP_HEADER);
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn expected_mode_is_no_worse_than_marginal() {
        // undervaccinated: c close to 1 keeps coverage low
        let text = SYMMETRIC
            .replace("cost = 0.5", "cost = 0.9")
            .replace("gamma = 0.19", "gamma = 0.1");
        let c = Config::parse(&text, ConfigFormat::Toml).unwrap();
        let s = c.scenario().unwrap();
        let mut plan = c.sweep_plan().unwrap();
        let marginal = run_sweep(&s, &plan);
        plan.severity_mode = SeverityMode::Expected;
        let expected = run_sweep(&s, &plan);
        for (m, e) in marginal.iter().zip(&expected) {
            assert!(m.severity > 0.0);
            assert!(e.severity <= m.severity + 1e-12 && e.severity > 0.0);
        }
    }

    #[test]
    fn failed_rows_leave_numeric_columns_blank() {
        let rows = vec![SweepRow::failed(1.0, Error::solver("no root", 0.5))];
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("1,,,,,,"));
    }

    fn row(sigma: f64, reopen_prob: f64, disease_free: bool) -> SweepRow {
        SweepRow {
            sigma,
            theta_star: 0.5,
            reopen_prob,
            coverage: 0.5,
            disease_free,
            severity: 0.0,
            error: None,
        }
    }

    #[test]
    fn suggestion_from_rows() {
        let rows = vec![row(1.0, 0.5, true), row(2.0, 0.92, true), row(3.0, 0.95, false)];
        let t = Probability::new(0.9).unwrap();
        assert_eq!(suggest_region(&rows, t), Some((2.0, 2.0)));
        assert_eq!(suggest_region(&rows, Probability::new(0.0).unwrap()), Some((1.0, 2.0)));
        let none_free = vec![row(1.0, 0.95, false)];
        assert_eq!(suggest_region(&none_free, t), None);
    }
}
