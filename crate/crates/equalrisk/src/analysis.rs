//! Post-solution analytics: risk profiles for arbitrary allocations,
//! budget/delay sensitivities of the solved risk level, and uniform-delay
//! sweeps.
//!
//! Sensitivities come from implicit differentiation of the budget equation
//! f(r) = B at the solved root rather than from re-solving; finite
//! differences are kept as a test oracle.

use crate::domain::{
    Allocation, EffectiveCostVector, Feasibility, ProblemInstance, RiskProfile, Solution,
};
use crate::pricing::{effective_costs, PricingError};
use crate::solver::{budget_spend_derivative, solve_equal_risk, SolverConfig, SolverError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("project `{id}`: allocation must be > 0 (risk is undefined at zero spend)")]
    ZeroAllocation { id: String },
    #[error("project `{id}`: allocation exceeds the project volume")]
    AllocationExceedsVolume { id: String },
    #[error("solution is fully funded (risk 0); sensitivities are undefined at the kink")]
    FullyFundedNoSensitivity,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Pricing(#[from] PricingError),
}

/// First-order response of the solved risk level and allocation to the
/// problem data, evaluated at an underfunded solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Sensitivities {
    /// d r*/d B: negative — more budget lowers the shared risk.
    pub dr_db: f64,
    /// d u_i/d B per project: positive — more budget raises every allocation.
    pub du_db: Vec<f64>,
    /// d r*/d T_j per project, other delays held fixed.
    pub dr_dt: Vec<f64>,
}

/// One uniform-delay solve within a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Delay applied to every project for this row.
    pub t: f64,
    pub solution: Solution,
}

/// Money flows and per-project risks realized by `allocation`:
/// S_i = c_i u_i now, S'_i = c'_i (V_i - u_i) later, r_i = S'_i / S_i.
pub fn risk_profile(
    instance: &ProblemInstance,
    costs: &EffectiveCostVector,
    allocation: &Allocation,
) -> Result<RiskProfile, AnalysisError> {
    assert_eq!(
        costs.costs.len(),
        instance.len(),
        "effective cost vector does not match the instance"
    );
    assert_eq!(
        allocation.units.len(),
        instance.len(),
        "allocation does not match the instance"
    );

    let n = instance.len();
    let mut initial_costs = Vec::with_capacity(n);
    let mut completion_costs = Vec::with_capacity(n);
    let mut risks = Vec::with_capacity(n);
    for ((project, &cp), &u) in instance
        .projects()
        .iter()
        .zip(&costs.costs)
        .zip(&allocation.units)
    {
        if u <= 0.0 || u.is_nan() {
            return Err(AnalysisError::ZeroAllocation {
                id: project.id.clone(),
            });
        }
        if u > project.volume {
            return Err(AnalysisError::AllocationExceedsVolume {
                id: project.id.clone(),
            });
        }
        let spent_now = project.base_cost * u;
        let needed_later = cp * (project.volume - u);
        initial_costs.push(spent_now);
        completion_costs.push(needed_later);
        risks.push(needed_later / spent_now);
    }
    Ok(RiskProfile {
        initial_costs,
        completion_costs,
        risks,
    })
}

/// Largest per-project risk under `allocation`.
pub fn max_risk(
    instance: &ProblemInstance,
    costs: &EffectiveCostVector,
    allocation: &Allocation,
) -> Result<f64, AnalysisError> {
    let profile = risk_profile(instance, costs, allocation)?;
    Ok(profile.risks.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Analytic sensitivities of an underfunded solution.
///
/// Differentiating f(r) = B implicitly at r*:
/// dr/dB = 1/f'(r*), du_i/dB = u_i'(r*) dr/dB, and
/// dr/dT_j = -(df/dT_j)/f'(r*) with df/dT_j = k_j c_j^2 r V_j/(c'_j + c_j r)^2.
pub fn sensitivities(
    instance: &ProblemInstance,
    solution: &Solution,
) -> Result<Sensitivities, AnalysisError> {
    if solution.feasibility == Feasibility::FullyFunded {
        return Err(AnalysisError::FullyFundedNoSensitivity);
    }
    let costs = effective_costs(instance);
    let r = solution.risk_level;
    let slope = budget_spend_derivative(instance, &costs, r)?;
    let dr_db = 1.0 / slope;

    let mut du_db = Vec::with_capacity(instance.len());
    let mut dr_dt = Vec::with_capacity(instance.len());
    for (project, &cp) in instance.projects().iter().zip(&costs.costs) {
        let c = project.base_cost;
        let denom = cp + c * r;
        let du_dr = -c * cp * project.volume / (denom * denom);
        du_db.push(du_dr * dr_db);

        let df_dt = project.inflation_rate * c * c * r * project.volume / (denom * denom);
        dr_dt.push(-df_dt / slope);
    }
    Ok(Sensitivities { dr_db, du_db, dr_dt })
}

/// Independent equal-risk solves with every delay set to each value of
/// `t_values`, in input order.
pub fn sweep_delay(
    instance: &ProblemInstance,
    t_values: &[f64],
    config: &SolverConfig,
) -> Result<Vec<SweepRow>, AnalysisError> {
    let mut rows = Vec::with_capacity(t_values.len());
    for &t in t_values {
        if t < 0.0 || t.is_nan() {
            return Err(PricingError::NegativeTime { t }.into());
        }
        let swept = instance
            .with_uniform_delay(t)
            .expect("replacing delays with a nonnegative value keeps the instance valid");
        let solution = solve_equal_risk(&swept, config)?;
        rows.push(SweepRow { t, solution });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::tests::worked_example;
    use crate::domain::{Feasibility, ProblemInstance, Project};
    use crate::solver::solve_equal_risk;

    fn solved_worked_example() -> (ProblemInstance, Solution) {
        let instance = worked_example();
        let solution = solve_equal_risk(&instance, &SolverConfig::default()).unwrap();
        (instance, solution)
    }

    #[test]
    fn reported_allocation_carries_near_equal_risks() {
        let instance = worked_example();
        let costs = effective_costs(&instance);
        let allocation = Allocation {
            units: vec![15.3, 65.8, 66.4],
        };
        let profile = risk_profile(&instance, &costs, &allocation).unwrap();
        for r in &profile.risks {
            assert!((r - 8.3).abs() < 0.02, "risk {r} strays from 8.3");
        }
    }

    #[test]
    fn full_funding_has_zero_risk() {
        let instance = worked_example();
        let costs = effective_costs(&instance);
        let allocation = Allocation {
            units: vec![100.0, 300.0, 250.0],
        };
        let profile = risk_profile(&instance, &costs, &allocation).unwrap();
        assert_eq!(profile.risks, vec![0.0, 0.0, 0.0]);
        assert_eq!(
            max_risk(&instance, &costs, &allocation).unwrap(),
            0.0
        );
    }

    #[test]
    fn half_funded_single_project() {
        let instance = ProblemInstance::new(
            vec![Project {
                id: "only".into(),
                volume: 10.0,
                base_cost: 1.0,
                inflation_rate: 0.1,
                delay: 10.0,
            }],
            5.0,
        )
        .unwrap();
        let costs = effective_costs(&instance);
        let profile = risk_profile(&instance, &costs, &Allocation { units: vec![5.0] }).unwrap();
        assert_eq!(profile.initial_costs, vec![5.0]);
        assert_eq!(profile.completion_costs, vec![10.0]);
        assert_eq!(profile.risks, vec![2.0]);
    }

    #[test]
    fn zero_allocation_is_rejected() {
        let instance = worked_example();
        let costs = effective_costs(&instance);
        let allocation = Allocation {
            units: vec![15.0, 0.0, 66.0],
        };
        assert_eq!(
            risk_profile(&instance, &costs, &allocation).unwrap_err(),
            AnalysisError::ZeroAllocation { id: "p2".into() }
        );
    }

    #[test]
    fn oversized_allocation_is_rejected() {
        let instance = worked_example();
        let costs = effective_costs(&instance);
        let allocation = Allocation {
            units: vec![15.0, 301.0, 66.0],
        };
        assert_eq!(
            risk_profile(&instance, &costs, &allocation).unwrap_err(),
            AnalysisError::AllocationExceedsVolume { id: "p2".into() }
        );
    }

    #[test]
    fn profile_identity_holds() {
        let (instance, solution) = solved_worked_example();
        let costs = effective_costs(&instance);
        let profile = risk_profile(&instance, &costs, &solution.allocation).unwrap();
        for i in 0..instance.len() {
            let product = profile.risks[i] * profile.initial_costs[i];
            let rel = (product - profile.completion_costs[i]).abs()
                / profile.completion_costs[i].abs().max(1e-300);
            assert!(rel <= 1e-12);
        }
    }

    #[test]
    fn sensitivity_signs_and_reference_values() {
        let (instance, solution) = solved_worked_example();
        let s = sensitivities(&instance, &solution).unwrap();
        assert!(s.dr_db < 0.0);
        assert!(s.du_db.iter().all(|&d| d > 0.0));
        assert!(s.dr_dt.iter().all(|&d| d > 0.0));

        // values computed ahead of time with 40-digit arithmetic
        assert!((s.dr_db - -0.0361420928959938).abs() < 1e-12);
        let du_db_expected = [0.0566676604998, 0.224555322956, 0.212998710133];
        let dr_dt_expected = [0.031284443673, 0.31877993104, 0.117589928555];
        for (got, want) in s.du_db.iter().zip(du_db_expected) {
            assert!((got - want).abs() < 1e-10, "du/dB {got} vs {want}");
        }
        for (got, want) in s.dr_dt.iter().zip(dr_dt_expected) {
            assert!((got - want).abs() < 1e-10, "dr/dT {got} vs {want}");
        }
    }

    #[test]
    fn zero_inflation_makes_delay_free() {
        let projects = vec![
            Project {
                id: "a".into(),
                volume: 10.0,
                base_cost: 2.0,
                inflation_rate: 0.0,
                delay: 5.0,
            },
            Project {
                id: "b".into(),
                volume: 10.0,
                base_cost: 1.0,
                inflation_rate: 0.5,
                delay: 5.0,
            },
        ];
        let instance = ProblemInstance::new(projects, 10.0).unwrap();
        let solution = solve_equal_risk(&instance, &SolverConfig::default()).unwrap();
        let s = sensitivities(&instance, &solution).unwrap();
        assert_eq!(s.dr_dt[0], 0.0);
        assert!(s.dr_dt[1] > 0.0);
    }

    #[test]
    fn fully_funded_solution_has_no_sensitivities() {
        let instance = worked_example().with_budget(1400.0).unwrap();
        let solution = solve_equal_risk(&instance, &SolverConfig::default()).unwrap();
        assert_eq!(
            sensitivities(&instance, &solution).unwrap_err(),
            AnalysisError::FullyFundedNoSensitivity
        );
    }

    /// Central finite differences over repeated solves, the independent check
    /// on the implicit-function formulas.
    #[test]
    fn sensitivities_match_finite_differences() {
        let (instance, solution) = solved_worked_example();
        let s = sensitivities(&instance, &solution).unwrap();
        let config = SolverConfig::default();

        let h = 1e-4 * instance.budget();
        let up = solve_equal_risk(&instance.with_budget(instance.budget() + h).unwrap(), &config)
            .unwrap();
        let down = solve_equal_risk(&instance.with_budget(instance.budget() - h).unwrap(), &config)
            .unwrap();
        let fd_dr_db = (up.risk_level - down.risk_level) / (2.0 * h);
        assert!((s.dr_db - fd_dr_db).abs() / fd_dr_db.abs() < 1e-4);
        for i in 0..instance.len() {
            let fd = (up.allocation.units[i] - down.allocation.units[i]) / (2.0 * h);
            assert!((s.du_db[i] - fd).abs() / fd.abs() < 1e-4);
        }

        for j in 0..instance.len() {
            let delay = instance.projects()[j].delay;
            let h = 1e-4 * delay;
            let bump = |t: f64| {
                let projects: Vec<Project> = instance
                    .projects()
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let mut p = p.clone();
                        if i == j {
                            p.delay = t;
                        }
                        p
                    })
                    .collect();
                let bumped = ProblemInstance::new(projects, instance.budget()).unwrap();
                solve_equal_risk(&bumped, &config).unwrap().risk_level
            };
            let fd = (bump(delay + h) - bump(delay - h)) / (2.0 * h);
            assert!(
                (s.dr_dt[j] - fd).abs() / fd.abs() < 1e-4,
                "project {j}: analytic {} vs fd {fd}",
                s.dr_dt[j]
            );
        }
    }

    #[test]
    fn sweep_at_the_reference_delay_matches_direct_solve() {
        let (instance, direct) = solved_worked_example();
        let rows = sweep_delay(&instance, &[10.0], &SolverConfig::default()).unwrap();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert!((row.solution.risk_level - direct.risk_level).abs() < 1e-12);
        assert!((row.solution.spend - direct.spend).abs() < 1e-9);
        for (a, b) in row
            .solution
            .allocation
            .units
            .iter()
            .zip(&direct.allocation.units)
        {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_delay_sweep_matches_closed_form() {
        // With c' = c the budget equation collapses to sum(c_i V_i)/(1+r) = B,
        // so r = 1350/295 - 1.
        let instance = worked_example();
        let rows = sweep_delay(&instance, &[0.0], &SolverConfig::default()).unwrap();
        let expected = 1350.0 / 295.0 - 1.0;
        assert!((rows[0].solution.risk_level - expected).abs() < 1e-9);
    }

    #[test]
    fn risk_is_monotone_in_uniform_delay() {
        let instance = worked_example();
        let t_values: Vec<f64> = (0..=10).map(|i| i as f64 * 2.0).collect();
        let rows = sweep_delay(&instance, &t_values, &SolverConfig::default()).unwrap();
        for pair in rows.windows(2) {
            assert!(
                pair[0].solution.risk_level <= pair[1].solution.risk_level,
                "risk fell from {} to {} between t={} and t={}",
                pair[0].solution.risk_level,
                pair[1].solution.risk_level,
                pair[0].t,
                pair[1].t
            );
        }
    }

    #[test]
    fn sweep_rows_follow_input_order() {
        let instance = worked_example();
        let rows = sweep_delay(&instance, &[5.0, 0.0, 10.0], &SolverConfig::default()).unwrap();
        let ts: Vec<f64> = rows.iter().map(|row| row.t).collect();
        assert_eq!(ts, vec![5.0, 0.0, 10.0]);
    }

    #[test]
    fn negative_sweep_time_is_rejected() {
        let instance = worked_example();
        let err = sweep_delay(&instance, &[1.0, -0.5], &SolverConfig::default()).unwrap_err();
        assert_eq!(err, AnalysisError::Pricing(PricingError::NegativeTime { t: -0.5 }));
    }

    /// Narrows a bracket for the budget-equation root, then scans it at step
    /// 1e-5 and checks the solver lands within 1e-4 of the crossing.
    #[test]
    fn solver_matches_dense_grid_scan() {
        use crate::pricing::total_planned_cost;
        use crate::solver::budget_spend;
        use rand::{Rng, SeedableRng};

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let n = rng.gen_range(1..=3);
            let projects: Vec<Project> = (0..n)
                .map(|i| Project {
                    id: format!("p{i}"),
                    volume: rng.gen_range(0.5..5.0),
                    base_cost: rng.gen_range(0.5..5.0),
                    inflation_rate: rng.gen_range(0.1..2.0),
                    delay: rng.gen_range(0.1..2.0),
                })
                .collect();
            let planned: f64 = projects.iter().map(|p| p.base_cost * p.volume).sum();
            let budget = planned * rng.gen_range(0.2..0.9);
            let instance = ProblemInstance::new(projects, budget).unwrap();
            let costs = effective_costs(&instance);
            assert!(total_planned_cost(&instance) > budget);

            let f = |r: f64| budget_spend(&instance, &costs, r).unwrap();
            let mut hi = 1.0;
            while f(hi) >= budget {
                hi *= 2.0;
            }
            let mut lo = 0.0;
            for _ in 0..12 {
                let mid = 0.5 * (lo + hi);
                if f(mid) >= budget {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mut grid_root = None;
            let mut r = lo;
            while r <= hi + 1e-5 {
                if f(r) < budget {
                    grid_root = Some(r - 0.5e-5);
                    break;
                }
                r += 1e-5;
            }
            let grid_root = grid_root.expect("scan crosses the budget inside the bracket");

            let solution = solve_equal_risk(&instance, &SolverConfig::default()).unwrap();
            assert!(
                (solution.risk_level - grid_root).abs() <= 1e-4,
                "solver {} vs grid {grid_root}",
                solution.risk_level
            );
        }
    }

    #[test]
    fn deviating_from_the_equal_risk_allocation_raises_max_risk() {
        let (instance, solution) = solved_worked_example();
        let costs = effective_costs(&instance);

        // rescale a deliberately skewed allocation to spend the budget exactly
        let skewed = [20.0, 60.0, 66.4];
        let spend: f64 = instance
            .projects()
            .iter()
            .zip(skewed)
            .map(|(p, u)| p.base_cost * u)
            .sum();
        let factor = instance.budget() / spend;
        let allocation = Allocation {
            units: skewed.iter().map(|u| u * factor).collect(),
        };
        let deviated = max_risk(&instance, &costs, &allocation).unwrap();
        assert!(deviated > solution.risk_level + 0.1, "max risk {deviated}");

        let equal = max_risk(&instance, &costs, &solution.allocation).unwrap();
        assert!((equal - solution.risk_level).abs() < 1e-8);
        assert_eq!(solution.feasibility, Feasibility::Underfunded);
    }
}
