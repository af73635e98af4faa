//! Data model for the allocation problem: projects, instances, allocations,
//! risk profiles and solutions.
//!
//! All types here are immutable after construction and carry their validity
//! rules in the constructors. [`ProblemInstance::new`] is the single
//! validation gate; everything downstream may assume its invariants hold.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Violation of a domain invariant, naming the offending project or field.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("project `{id}`: volume must be > 0")]
    NonPositiveVolume { id: String },
    #[error("project `{id}`: base_cost must be > 0")]
    NonPositiveCost { id: String },
    #[error("project `{id}`: inflation_rate must be >= 0")]
    NegativeRate { id: String },
    #[error("project `{id}`: delay must be >= 0")]
    NegativeDelay { id: String },
    #[error("duplicate project id `{id}`")]
    DuplicateId { id: String },
    #[error("instance has no projects")]
    EmptyProjectList,
    #[error("budget must be > 0")]
    NonPositiveBudget,
    #[error("project at position {index} has an empty id")]
    EmptyProjectId { index: usize },
    #[error("project `{id}`: field `{field}` is not a finite number")]
    NonFiniteNumber { id: String, field: &'static str },
}

/// One investment project: the labour volume it needs, its unit cost today,
/// and how that cost inflates over the delay before the remainder is funded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Project {
    /// Opaque label, unique within an instance.
    pub id: String,
    /// V: labour-force volume required to complete the project (> 0).
    pub volume: f64,
    /// c: cost per unit of volume at time zero (> 0).
    pub base_cost: f64,
    /// k: linear cost growth per unit time (>= 0).
    pub inflation_rate: f64,
    /// T: time until the unfunded remainder is paid (>= 0).
    pub delay: f64,
}

impl Project {
    fn validate(&self, index: usize) -> Result<(), ValidationError> {
        if self.id.is_empty() {
            return Err(ValidationError::EmptyProjectId { index });
        }
        let fields = [
            ("volume", self.volume),
            ("base_cost", self.base_cost),
            ("inflation_rate", self.inflation_rate),
            ("delay", self.delay),
        ];
        for (field, value) in fields {
            if !value.is_finite() {
                return Err(ValidationError::NonFiniteNumber {
                    id: self.id.clone(),
                    field,
                });
            }
        }
        if self.volume <= 0.0 {
            return Err(ValidationError::NonPositiveVolume {
                id: self.id.clone(),
            });
        }
        if self.base_cost <= 0.0 {
            return Err(ValidationError::NonPositiveCost {
                id: self.id.clone(),
            });
        }
        if self.inflation_rate < 0.0 {
            return Err(ValidationError::NegativeRate {
                id: self.id.clone(),
            });
        }
        if self.delay < 0.0 {
            return Err(ValidationError::NegativeDelay {
                id: self.id.clone(),
            });
        }
        Ok(())
    }
}

/// A set of projects competing for one budget.
///
/// Construction validates every invariant; the fields are private so a value
/// of this type is always well-formed.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    projects: Vec<Project>,
    budget: f64,
}

impl ProblemInstance {
    /// Validates candidate data and builds an instance.
    ///
    /// Rules: at least one project; budget > 0; per project volume > 0,
    /// base_cost > 0, inflation_rate >= 0, delay >= 0, nonempty unique id;
    /// every numeric field finite.
    pub fn new(projects: Vec<Project>, budget: f64) -> Result<Self, ValidationError> {
        if projects.is_empty() {
            return Err(ValidationError::EmptyProjectList);
        }
        if !budget.is_finite() || budget <= 0.0 {
            return Err(ValidationError::NonPositiveBudget);
        }
        for (index, project) in projects.iter().enumerate() {
            project.validate(index)?;
            if projects[..index].iter().any(|p| p.id == project.id) {
                return Err(ValidationError::DuplicateId {
                    id: project.id.clone(),
                });
            }
        }
        Ok(Self { projects, budget })
    }

    pub fn projects(&self) -> &[Project] {
        &self.projects
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.projects.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 by construction
    }

    /// Same projects, different budget.
    pub fn with_budget(&self, budget: f64) -> Result<Self, ValidationError> {
        Self::new(self.projects.clone(), budget)
    }

    /// Same projects with every delay replaced by `delay`.
    pub fn with_uniform_delay(&self, delay: f64) -> Result<Self, ValidationError> {
        let projects = self
            .projects
            .iter()
            .map(|p| Project {
                delay,
                ..p.clone()
            })
            .collect();
        Self::new(projects, self.budget)
    }
}

/// Delay-inflated unit costs c'_i, aligned with the instance's project order.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveCostVector {
    pub costs: Vec<f64>,
}

/// Funded labour volumes u_i, aligned with the instance's project order.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub units: Vec<f64>,
}

/// Per-project money flows and failure risks realized by an allocation.
///
/// `initial_costs[i] = c_i * u_i` is spent now, `completion_costs[i] =
/// c'_i * (V_i - u_i)` is needed later, and `risks[i]` is their ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskProfile {
    pub initial_costs: Vec<f64>,
    pub completion_costs: Vec<f64>,
    pub risks: Vec<f64>,
}

/// Whether the budget covers the full planned cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    /// B < sum(c_i * V_i): some work must be deferred, shared risk is positive.
    Underfunded,
    /// B >= sum(c_i * V_i): everything is funded now, risk is zero.
    FullyFunded,
}

impl std::fmt::Display for Feasibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Feasibility::Underfunded => write!(f, "Underfunded"),
            Feasibility::FullyFunded => write!(f, "FullyFunded"),
        }
    }
}

/// Result of an equal-risk solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// The common risk level r* shared by every project.
    pub risk_level: f64,
    pub allocation: Allocation,
    /// Total money committed now, sum(c_i * u_i).
    pub spend: f64,
    /// budget - spend.
    pub residual: f64,
    pub feasibility: Feasibility,
    /// Root-search iterations performed (0 for fully funded instances).
    pub iterations: u32,
}
