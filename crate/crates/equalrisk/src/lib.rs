//! Equal-risk budget allocation for delayed investment projects.
//!
//! When a budget B cannot cover the full planned cost of n projects, the
//! remainder of each project must be bought later at delay-inflated unit
//! costs, and the ratio of that future cost to the money committed now is the
//! project's failure risk. This crate allocates the budget so every project
//! carries the same risk: the allocation follows in closed form from the
//! shared risk level, which is the unique positive root of a scalar budget
//! equation. On top of the solve it provides feasibility classification,
//! analytic budget/delay sensitivities, uniform-delay sweeps, an instance
//! file format and a CLI.
//!
//! ```
//! use equalrisk::domain::{ProblemInstance, Project};
//! use equalrisk::solver::{solve_equal_risk, SolverConfig};
//!
//! let projects = vec![
//!     Project { id: "a".into(), volume: 100.0, base_cost: 2.0, inflation_rate: 0.1, delay: 10.0 },
//!     Project { id: "b".into(), volume: 300.0, base_cost: 3.0, inflation_rate: 0.4, delay: 10.0 },
//!     Project { id: "c".into(), volume: 250.0, base_cost: 1.0, inflation_rate: 0.2, delay: 10.0 },
//! ];
//! let instance = ProblemInstance::new(projects, 295.0)?;
//! let solution = solve_equal_risk(&instance, &SolverConfig::default())?;
//! assert!((solution.spend - 295.0).abs() < 1e-6);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod domain;
pub mod io;
pub mod pricing;
pub mod solver;

pub use analysis::{
    max_risk, risk_profile, sensitivities, sweep_delay, AnalysisError, Sensitivities, SweepRow,
};
pub use domain::{
    Allocation, EffectiveCostVector, Feasibility, ProblemInstance, Project, RiskProfile, Solution,
    ValidationError,
};
pub use io::{
    parse_instance, serialize_instance, InstanceDocument, ParseError, ReportFormat, ReportOptions,
};
pub use pricing::{effective_cost, effective_costs, total_planned_cost, PricingError};
pub use solver::{
    allocation_from_risk, budget_spend, budget_spend_derivative, solve_equal_risk, SolverConfig,
    SolverError,
};
