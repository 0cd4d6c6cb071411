//! Vaccination game with regime switching, coupled to degree-based mean-field
//! epidemic dynamics on a complex network.
//!
//! Players with heterogeneous degrees and information types decide once
//! whether to vaccinate. The city reopens when coverage reaches a random
//! threshold θ ~ N(μ, 1/σ²) that each type observes through a noisy private
//! signal. The crate solves the switching-strategy equilibrium, integrates the
//! epidemic under either regime, checks the incentive structure numerically,
//! and computes the information designs that make the disease-free state
//! globally stable after reopening.

pub mod design;
pub mod epidemic;
pub mod equilibrium;
pub mod error;
pub mod experiment;
pub mod incentives;
pub mod numerics;
pub mod params;
pub mod population;
pub mod report;
pub mod roots;

pub use error::{Error, Result};
pub use numerics::Probability;
pub use params::{EconParams, EpidemicParams, Regime, SignalParams};
pub use population::{Partition, PopulationModel};
