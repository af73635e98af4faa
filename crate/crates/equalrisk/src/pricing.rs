//! Delay-inflated unit costs under the linear inflation law c'(t) = c + k*t.
//!
//! This is the single seam through which a different inflation law would be
//! introduced; everything else consumes the resulting [`EffectiveCostVector`].

use crate::domain::{EffectiveCostVector, ProblemInstance, Project};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    #[error("time must be >= 0, got {t}")]
    NegativeTime { t: f64 },
}

/// Unit cost of `project` after `t` time units of inflation: c + k*t.
pub fn effective_cost(project: &Project, t: f64) -> Result<f64, PricingError> {
    if t < 0.0 || t.is_nan() {
        return Err(PricingError::NegativeTime { t });
    }
    Ok(project.base_cost + project.inflation_rate * t)
}

/// Effective unit cost of every project at its own delay term.
pub fn effective_costs(instance: &ProblemInstance) -> EffectiveCostVector {
    let costs = instance
        .projects()
        .iter()
        // delay >= 0 is an instance invariant, so this cannot fail
        .map(|p| p.base_cost + p.inflation_rate * p.delay)
        .collect();
    EffectiveCostVector { costs }
}

/// Money needed to fund every project in full today: sum(c_i * V_i).
pub fn total_planned_cost(instance: &ProblemInstance) -> f64 {
    instance
        .projects()
        .iter()
        .map(|p| p.base_cost * p.volume)
        .sum()
}
