//! Population structure: degree classes, information types, and who vaccinates.
//!
//! Groups are addressed by `(degree index, type index)` and, once actions are
//! involved, by `(degree index, type index, action)`. Flat storage is always in
//! that lexicographic order, which is also the column order of every dump.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on every mass-balance identity.
pub const MASS_TOL: f64 = 1e-12;

/// Action index: 0 = not vaccinated, 1 = vaccinated.
pub const ACTIONS: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationModel {
    degrees: Vec<u32>,
    degree_masses: Vec<f64>,
    type_masses: Vec<f64>,
    /// Row-major `[degree][type]`.
    joint_masses: Vec<f64>,
}

impl PopulationModel {
    /// Builds a model from explicit marginals and joint masses, sorting degree
    /// rows into increasing order, then validates it.
    pub fn new(
        degrees: Vec<u32>,
        degree_masses: Vec<f64>,
        type_masses: Vec<f64>,
        joint_masses: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let k = type_masses.len();
        if degree_masses.len() != degrees.len() || joint_masses.len() != degrees.len() {
            return Err(Error::validation(format!(
                "{} degrees but {} degree masses and {} joint rows",
                degrees.len(),
                degree_masses.len(),
                joint_masses.len()
            )));
        }
        if let Some(row) = joint_masses.iter().find(|r| r.len() != k) {
            return Err(Error::validation(format!(
                "joint mass row has {} entries, expected one per type ({k})",
                row.len()
            )));
        }
        let mut order: Vec<usize> = (0..degrees.len()).collect();
        order.sort_by_key(|&i| degrees[i]);
        let model = PopulationModel {
            degrees: order.iter().map(|&i| degrees[i]).collect(),
            degree_masses: order.iter().map(|&i| degree_masses[i]).collect(),
            type_masses,
            joint_masses: order.iter().flat_map(|&i| joint_masses[i].iter().copied()).collect(),
        };
        model.validate()?;
        Ok(model)
    }

    /// Joint masses given; marginals derived by summation.
    pub fn from_joint(degrees: Vec<u32>, joint_masses: Vec<Vec<f64>>) -> Result<Self> {
        let k = joint_masses.first().map_or(0, Vec::len);
        let degree_masses = joint_masses.iter().map(|r| r.iter().sum()).collect();
        let type_masses = (0..k)
            .map(|j| joint_masses.iter().map(|r| r.get(j).copied().unwrap_or(0.0)).sum())
            .collect();
        Self::new(degrees, degree_masses, type_masses, joint_masses)
    }

    /// Degree and type drawn independently: `m^{d,k} = m^d m^k`.
    pub fn independent(degrees: Vec<u32>, degree_masses: Vec<f64>, type_masses: Vec<f64>) -> Result<Self> {
        let joint = degree_masses
            .iter()
            .map(|md| type_masses.iter().map(|mk| md * mk).collect())
            .collect();
        Self::new(degrees, degree_masses, type_masses, joint)
    }

    /// A single regular-degree class with one information type.
    pub fn regular(degree: u32) -> Self {
        PopulationModel {
            degrees: vec![degree],
            degree_masses: vec![1.0],
            type_masses: vec![1.0],
            joint_masses: vec![1.0],
        }
    }

    /// Rescales the joint masses to total one and recomputes both marginals.
    pub fn renormalized(&self) -> Result<Self> {
        let total: f64 = self.joint_masses.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::validation(format!("cannot renormalize total mass {total}")));
        }
        let rows = (0..self.num_degrees())
            .map(|d| (0..self.num_types()).map(|k| self.joint(d, k) / total).collect())
            .collect();
        Self::from_joint(self.degrees.clone(), rows)
    }

    pub fn validate(&self) -> Result<()> {
        validate(self)
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree_masses(&self) -> &[f64] {
        &self.degree_masses
    }

    pub fn type_masses(&self) -> &[f64] {
        &self.type_masses
    }

    pub fn num_degrees(&self) -> usize {
        self.degrees.len()
    }

    pub fn num_types(&self) -> usize {
        self.type_masses.len()
    }

    /// Number of `(degree, type)` groups.
    pub fn num_groups(&self) -> usize {
        self.joint_masses.len()
    }

    #[inline]
    pub fn joint(&self, degree_idx: usize, type_idx: usize) -> f64 {
        self.joint_masses[degree_idx * self.num_types() + type_idx]
    }

    pub fn joint_masses(&self) -> &[f64] {
        &self.joint_masses
    }

    pub fn max_degree(&self) -> u32 {
        *self.degrees.last().expect("validated model has a degree")
    }

    pub fn min_degree(&self) -> u32 {
        self.degrees[0]
    }

    pub fn mean_degree(&self) -> f64 {
        mean_degree(self)
    }

    /// Position of a degree value in the sorted support.
    pub fn degree_index(&self, degree: u32) -> Option<usize> {
        self.degrees.binary_search(&degree).ok()
    }
}

fn check_mass(what: &str, m: f64) -> Result<()> {
    // A single class legitimately carries the full unit mass.
    if m > 0.0 && m <= 1.0 + MASS_TOL {
        Ok(())
    } else {
        Err(Error::validation(format!("{what} = {m} must lie in (0, 1]")))
    }
}

fn check_sum(what: &str, got: f64, want: f64) -> Result<()> {
    if (got - want).abs() <= MASS_TOL {
        Ok(())
    } else {
        Err(Error::validation(format!("{what} sums to {got}, expected {want}")))
    }
}

/// Checks every structural invariant of a population model.
pub fn validate(model: &PopulationModel) -> Result<()> {
    if model.degrees.is_empty() {
        return Err(Error::validation("degree support is empty"));
    }
    if model.type_masses.is_empty() {
        return Err(Error::validation("no information types"));
    }
    if model.degrees[0] == 0 {
        return Err(Error::validation("degrees must be positive"));
    }
    for w in model.degrees.windows(2) {
        if w[0] == w[1] {
            return Err(Error::validation(format!("duplicate degree {}", w[0])));
        }
        if w[0] > w[1] {
            return Err(Error::validation("degrees must be sorted increasingly"));
        }
    }
    let (nd, nk) = (model.num_degrees(), model.num_types());
    if model.degree_masses.len() != nd || model.joint_masses.len() != nd * nk {
        return Err(Error::validation("mass arrays do not match the degree/type dimensions"));
    }
    for (d, &m) in model.degrees.iter().zip(&model.degree_masses) {
        check_mass(&format!("degree mass m^{d}"), m)?;
    }
    for (k, &m) in model.type_masses.iter().enumerate() {
        check_mass(&format!("type mass m^{}", k + 1), m)?;
    }
    for di in 0..nd {
        for k in 0..nk {
            check_mass(
                &format!("joint mass m^{{{},{}}}", model.degrees[di], k + 1),
                model.joint(di, k),
            )?;
        }
    }
    check_sum("degree masses", model.degree_masses.iter().sum(), 1.0)?;
    check_sum("type masses", model.type_masses.iter().sum(), 1.0)?;
    for di in 0..nd {
        let row: f64 = (0..nk).map(|k| model.joint(di, k)).sum();
        check_sum(
            &format!("joint masses of degree {}", model.degrees[di]),
            row,
            model.degree_masses[di],
        )?;
    }
    for k in 0..nk {
        let col: f64 = (0..nd).map(|di| model.joint(di, k)).sum();
        check_sum(&format!("joint masses of type {}", k + 1), col, model.type_masses[k])?;
    }
    Ok(())
}

/// `d̄ = Σ_d d m^d`.
pub fn mean_degree(model: &PopulationModel) -> f64 {
    model
        .degrees
        .iter()
        .zip(&model.degree_masses)
        .map(|(&d, &m)| d as f64 * m)
        .sum()
}

/// Action-resolved masses `m^{d,k}_i`, flat in `(degree, type, action)` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    num_degrees: usize,
    num_types: usize,
    masses: Vec<f64>,
}

impl Partition {
    /// `masses[(d * K + k) * 2 + i]`; validated against the model's joint masses.
    pub fn new(model: &PopulationModel, masses: Vec<f64>) -> Result<Self> {
        if masses.len() != model.num_groups() * ACTIONS {
            return Err(Error::Shape(format!(
                "partition has {} entries, model needs {}",
                masses.len(),
                model.num_groups() * ACTIONS
            )));
        }
        let p = Partition {
            num_degrees: model.num_degrees(),
            num_types: model.num_types(),
            masses,
        };
        p.validate_against(model)?;
        Ok(p)
    }

    /// Every group vaccinates the given fraction.
    pub fn uniform(model: &PopulationModel, vaccinated_fraction: f64) -> Result<Self> {
        Self::from_type_fractions(model, &vec![vaccinated_fraction; model.num_types()])
    }

    pub fn unvaccinated(model: &PopulationModel) -> Self {
        Self::uniform(model, 0.0).expect("zero coverage is always valid")
    }

    pub fn all_vaccinated(model: &PopulationModel) -> Self {
        Self::uniform(model, 1.0).expect("full coverage is always valid")
    }

    /// Type `k` vaccinates `fractions[k]` of its mass in every degree class.
    pub fn from_type_fractions(model: &PopulationModel, fractions: &[f64]) -> Result<Self> {
        if fractions.len() != model.num_types() {
            return Err(Error::Shape(format!(
                "{} type fractions for {} types",
                fractions.len(),
                model.num_types()
            )));
        }
        if let Some(f) = fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
            return Err(Error::domain(format!("vaccinated fraction {f} outside [0, 1]")));
        }
        let mut masses = Vec::with_capacity(model.num_groups() * ACTIONS);
        for d in 0..model.num_degrees() {
            for (k, f) in fractions.iter().enumerate() {
                let m = model.joint(d, k);
                let m1 = m * f;
                masses.push(m - m1);
                masses.push(m1);
            }
        }
        Ok(Partition {
            num_degrees: model.num_degrees(),
            num_types: model.num_types(),
            masses,
        })
    }

    pub fn validate_against(&self, model: &PopulationModel) -> Result<()> {
        if self.num_degrees != model.num_degrees() || self.num_types != model.num_types() {
            return Err(Error::Shape("partition dimensions differ from the model".into()));
        }
        for d in 0..self.num_degrees {
            for k in 0..self.num_types {
                let (m0, m1) = (self.mass(d, k, 0), self.mass(d, k, 1));
                if !(m0 >= 0.0 && m1 >= 0.0) {
                    return Err(Error::validation(format!(
                        "negative partition mass in group (d={}, k={})",
                        model.degrees()[d],
                        k + 1
                    )));
                }
                check_sum(
                    &format!("partition of group (d={}, k={})", model.degrees()[d], k + 1),
                    m0 + m1,
                    model.joint(d, k),
                )?;
            }
        }
        Ok(())
    }

    #[inline]
    pub fn mass(&self, degree_idx: usize, type_idx: usize, action: usize) -> f64 {
        self.masses[(degree_idx * self.num_types + type_idx) * ACTIONS + action]
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn num_degrees(&self) -> usize {
        self.num_degrees
    }

    pub fn num_types(&self) -> usize {
        self.num_types
    }

    /// `m^d_i`.
    pub fn degree_action_mass(&self, degree_idx: usize, action: usize) -> f64 {
        (0..self.num_types).map(|k| self.mass(degree_idx, k, action)).sum()
    }

    /// `m^k_i`.
    pub fn type_action_mass(&self, type_idx: usize, action: usize) -> f64 {
        (0..self.num_degrees).map(|d| self.mass(d, type_idx, action)).sum()
    }

    /// Moves `bump` of total mass from action 0 to action 1, each group giving
    /// up a share proportional to its unvaccinated mass.
    pub fn bumped(&self, bump: f64) -> Result<Self> {
        if !(bump > 0.0) {
            return Err(Error::domain(format!("coverage bump must be positive, got {bump}")));
        }
        let unvaccinated: f64 = self.masses.iter().step_by(ACTIONS).sum();
        if bump > unvaccinated + MASS_TOL {
            return Err(Error::domain(format!(
                "coverage bump {bump} exceeds the unvaccinated mass {unvaccinated}"
            )));
        }
        let share = (bump / unvaccinated).min(1.0);
        let mut masses = self.masses.clone();
        for g in masses.chunks_exact_mut(ACTIONS) {
            let moved = g[0] * share;
            g[0] -= moved;
            g[1] += moved;
        }
        Ok(Partition { masses, ..self.clone() })
    }
}

/// Average action `A = Σ_{d,k} m^{d,k}_1`.
pub fn coverage(partition: &Partition) -> f64 {
    partition.masses.iter().skip(1).step_by(ACTIONS).sum()
}
