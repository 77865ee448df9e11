//! Fair clustering under a bounded cost.
//!
//! Given colored points, a clustering objective (k-center, k-median, or
//! k-means), and a hard cost budget `U`, this crate minimizes group unfairness
//! (utilitarian, egalitarian, or leximin) by searching violation levels over a
//! discretized grid with feasibility LPs and rounding the accepting fractional
//! solution through a min-cost flow network.
//!
//! The numeric core is generic over the scalar type (see [`scalar::Real`]);
//! `f64` aliases for the main types are exported at the crate root.

pub mod colorblind;
pub mod lpsolve;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod rounding;
pub mod scalar;
pub mod search;

use thiserror::Error as ThisError;

/// Crate-wide error type.
#[derive(Debug, ThisError)]
pub enum Error {
    /// Malformed or inconsistent inputs (dimension mismatches, invalid
    /// bounds, out-of-range indices, ...).
    #[error("structural error: {0}")]
    Structural(String),
    /// The cost budget is below the minimum assignment cost to the given
    /// centers: the LP is infeasible even at full violation Δ = 1.
    #[error("budget infeasible: no assignment of cost <= {budget} exists for the given centers")]
    BudgetInfeasible { budget: f64 },
    /// Numerical failure inside a solver; retrying (or perturbing) may help.
    /// Distinct from a proven infeasibility.
    #[error("solver failure: {0}")]
    SolverFailure(String),
    /// A guaranteed property failed to hold on concrete data.
    #[error("property violation: {0}")]
    PropertyViolation(String),
    /// An enumeration guard was exceeded (oracle refusal).
    #[error("guard exceeded: {0}")]
    GuardExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use model::{ColorId, Norm, ObjectiveKind};

/// Concrete `f64` aliases for the main domain types.
pub type Instance = model::InstanceOf<f64>;
pub type Assignment = model::AssignmentOf<f64>;
pub type ViolationVector = model::ViolationVectorOf<f64>;
pub type ClusterStats = model::ClusterStatsOf<f64>;
pub type Bounds = model::Bounds<f64>;
pub type SeedResult = colorblind::SeedResultOf<f64>;
pub type FeasibilityLp = lpsolve::FeasibilityLpOf<f64>;
pub type LpOutcome = lpsolve::LpOutcomeOf<f64>;
pub type Grid = search::Grid;
pub type SearchResult = search::SearchResultOf<f64>;
pub type FlowNetwork = rounding::FlowNetworkOf<f64>;
pub type SolveReport = pipeline::SolveReportOf<f64>;
pub type OracleResult = oracle::OracleResultOf<f64>;
