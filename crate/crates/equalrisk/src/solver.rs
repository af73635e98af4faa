//! Equal-risk allocation solve.
//!
//! With effective costs c'_i fixed, requiring every project to carry the same
//! failure risk r determines the allocation in closed form,
//! u_i = c'_i V_i / (c'_i + c_i r), and turns the budget constraint into one
//! scalar equation in r:
//!
//! ```text
//! f(r) = sum_i c_i u_i(r) = B
//! ```
//!
//! f is strictly decreasing and convex on r >= 0 with f(0) equal to the total
//! planned cost, so for any underfunded budget the positive root is unique.
//! The search brackets it by doubling, narrows the bracket by bisection, and
//! finishes with a guarded Newton polish on the budget residual.

use crate::domain::{
    Allocation, EffectiveCostVector, Feasibility, ProblemInstance, Project, Solution,
};
use crate::pricing::{effective_costs, total_planned_cost};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("risk level must be >= 0, got {r}")]
    NegativeRisk { r: f64 },
    #[error("root search did not converge within {max_iterations} iterations")]
    MaxIterationsExceeded { max_iterations: u32 },
}

/// Tolerances and limits for the root search.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Convergence tolerance on the bracket width in r (dimensionless).
    pub risk_tolerance: f64,
    /// Acceptable |spend - budget| at termination, in money units.
    /// `None` scales with the instance: 1e-9 * budget.
    pub budget_tolerance: Option<f64>,
    /// Iteration budget shared by bracket growth, bisection and polish.
    pub max_iterations: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            risk_tolerance: 1e-12,
            budget_tolerance: None,
            max_iterations: 200,
        }
    }
}

impl SolverConfig {
    /// The effective budget tolerance for an instance with the given budget.
    pub fn budget_tolerance_for(&self, budget: f64) -> f64 {
        self.budget_tolerance.unwrap_or(1e-9 * budget)
    }
}

fn unit_from_risk(project: &Project, effective_cost: f64, r: f64) -> f64 {
    // Clamp to the volume: at r = 0 the quotient can round one ulp above V.
    (effective_cost * project.volume / (effective_cost + project.base_cost * r))
        .min(project.volume)
}

fn spend_at(instance: &ProblemInstance, costs: &EffectiveCostVector, r: f64) -> f64 {
    instance
        .projects()
        .iter()
        .zip(&costs.costs)
        .map(|(p, &cp)| p.base_cost * unit_from_risk(p, cp, r))
        .sum()
}

fn check_risk_and_costs(
    instance: &ProblemInstance,
    costs: &EffectiveCostVector,
    r: f64,
) -> Result<(), SolverError> {
    assert_eq!(
        costs.costs.len(),
        instance.len(),
        "effective cost vector does not match the instance"
    );
    if r < 0.0 || r.is_nan() {
        return Err(SolverError::NegativeRisk { r });
    }
    Ok(())
}

/// The allocation at which every project carries risk exactly `r`:
/// u_i = c'_i V_i / (c'_i + c_i r). Each unit lies in (0, V_i].
pub fn allocation_from_risk(
    instance: &ProblemInstance,
    costs: &EffectiveCostVector,
    r: f64,
) -> Result<Allocation, SolverError> {
    check_risk_and_costs(instance, costs, r)?;
    let units = instance
        .projects()
        .iter()
        .zip(&costs.costs)
        .map(|(p, &cp)| unit_from_risk(p, cp, r))
        .collect();
    Ok(Allocation { units })
}

/// Money spent now at common risk `r`: f(r) = sum_i c_i u_i(r).
///
/// Strictly decreasing in r, with f(0) equal to [`total_planned_cost`].
pub fn budget_spend(
    instance: &ProblemInstance,
    costs: &EffectiveCostVector,
    r: f64,
) -> Result<f64, SolverError> {
    check_risk_and_costs(instance, costs, r)?;
    Ok(spend_at(instance, costs, r))
}

/// df/dr = -sum_i c_i^2 c'_i V_i / (c'_i + c_i r)^2, negative for all r >= 0.
pub fn budget_spend_derivative(
    instance: &ProblemInstance,
    costs: &EffectiveCostVector,
    r: f64,
) -> Result<f64, SolverError> {
    check_risk_and_costs(instance, costs, r)?;
    Ok(instance
        .projects()
        .iter()
        .zip(&costs.costs)
        .map(|(p, &cp)| {
            let denom = cp + p.base_cost * r;
            -p.base_cost * p.base_cost * cp * p.volume / (denom * denom)
        })
        .sum())
}

/// Finds the risk level at which the budget is spent exactly and recovers the
/// allocation.
///
/// A budget at or above the total planned cost funds everything now
/// (`FullyFunded`, r* = 0, u_i = V_i); otherwise the unique positive root of
/// the budget equation is located and `|spend - budget|` is driven below the
/// configured tolerance.
pub fn solve_equal_risk(
    instance: &ProblemInstance,
    config: &SolverConfig,
) -> Result<Solution, SolverError> {
    let costs = effective_costs(instance);
    let planned = total_planned_cost(instance);
    let budget = instance.budget();

    if budget >= planned {
        let units = instance.projects().iter().map(|p| p.volume).collect();
        return Ok(Solution {
            risk_level: 0.0,
            allocation: Allocation { units },
            spend: planned,
            residual: budget - planned,
            feasibility: Feasibility::FullyFunded,
            iterations: 0,
        });
    }

    let budget_tolerance = config.budget_tolerance_for(budget);
    let max_iterations = config.max_iterations;
    let mut iterations: u32 = 0;
    let step = |iterations: &mut u32| -> Result<(), SolverError> {
        if *iterations >= max_iterations {
            return Err(SolverError::MaxIterationsExceeded { max_iterations });
        }
        *iterations += 1;
        Ok(())
    };

    // Grow the bracket geometrically until the spend drops below the budget.
    // f(0) = planned > budget, so the root lies in [lo, hi] afterwards.
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let mut f_hi = spend_at(instance, &costs, hi);
    while f_hi >= budget {
        step(&mut iterations)?;
        lo = hi;
        hi *= 2.0;
        f_hi = spend_at(instance, &costs, hi);
    }

    // Bisection. The midpoint test also stops at the floating-point floor:
    // once the bracket is a few ulps wide the midpoint stops moving.
    while hi - lo > config.risk_tolerance {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        step(&mut iterations)?;
        if spend_at(instance, &costs, mid) >= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Newton polish on the budget residual, rejecting steps that leave the
    // bracket.
    let mut r = 0.5 * (lo + hi);
    if r <= lo || r >= hi {
        r = lo;
    }
    let mut spend = spend_at(instance, &costs, r);
    while (spend - budget).abs() > budget_tolerance {
        let slope = budget_spend_derivative(instance, &costs, r)?;
        if slope >= 0.0 || slope.is_nan() {
            break;
        }
        let next = r - (spend - budget) / slope;
        if next.is_nan() || next < lo || next > hi || next == r {
            break;
        }
        step(&mut iterations)?;
        r = next;
        spend = spend_at(instance, &costs, r);
    }

    if (spend - budget).abs() > budget_tolerance {
        return Err(SolverError::MaxIterationsExceeded { max_iterations });
    }

    let allocation = allocation_from_risk(instance, &costs, r)?;
    Ok(Solution {
        risk_level: r,
        allocation,
        spend,
        residual: budget - spend,
        feasibility: Feasibility::Underfunded,
        iterations,
    })
}
