//! Instance files and report rendering.
//!
//! Instances travel as a small self-describing JSON document (see
//! [`InstanceDocument`]); reports render as fixed-point text tables or CSV
//! with `\n` line endings. Rendering is deterministic: identical inputs and
//! options produce identical bytes.

use crate::analysis::{Sensitivities, SweepRow};
use crate::domain::{
    EffectiveCostVector, ProblemInstance, Project, RiskProfile, Solution, ValidationError,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The on-disk schema version this build reads and writes.
pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    /// The document is not well-formed JSON.
    #[error("syntax error: {message}")]
    Syntax { message: String },
    /// Well-formed JSON that does not match the instance schema
    /// (missing/unknown field, wrong type, unsupported version).
    #[error("schema error: {message}")]
    Schema { message: String },
    /// Schema-valid data that violates a domain invariant.
    #[error("invalid instance: {0}")]
    Validation(#[from] ValidationError),
}

/// Serialized form of a [`ProblemInstance`].
///
/// Top-level JSON object with `schema_version`, `budget` and `projects`;
/// unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub schema_version: String,
    pub budget: f64,
    pub projects: Vec<Project>,
}

impl InstanceDocument {
    pub fn from_instance(instance: &ProblemInstance) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            budget: instance.budget(),
            projects: instance.projects().to_vec(),
        }
    }

    pub fn into_instance(self) -> Result<ProblemInstance, ParseError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ParseError::Schema {
                message: format!(
                    "unsupported schema_version `{}`, expected `{SCHEMA_VERSION}`",
                    self.schema_version
                ),
            });
        }
        Ok(ProblemInstance::new(self.projects, self.budget)?)
    }
}

/// Parses and validates an instance document.
pub fn parse_instance(source: &str) -> Result<ProblemInstance, ParseError> {
    let document: InstanceDocument = serde_json::from_str(source).map_err(|e| {
        let message = e.to_string();
        match e.classify() {
            serde_json::error::Category::Syntax | serde_json::error::Category::Eof => {
                ParseError::Syntax { message }
            }
            _ => ParseError::Schema { message },
        }
    })?;
    document.into_instance()
}

/// Renders an instance as a pretty-printed document, round-trippable through
/// [`parse_instance`].
pub fn serialize_instance(instance: &ProblemInstance) -> String {
    let document = InstanceDocument::from_instance(instance);
    let mut text = serde_json::to_string_pretty(&document)
        .expect("instance documents always serialize");
    text.push('\n');
    text
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Text,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub format: ReportFormat,
    /// Decimal places for rendered numbers, 1..=15.
    pub precision: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            format: ReportFormat::Text,
            precision: 6,
        }
    }
}

fn num(value: f64, precision: usize) -> String {
    format!("{value:.precision$}")
}

fn csv_field(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn csv_line(fields: &[String]) -> String {
    let escaped: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
    let mut line = escaped.join(",");
    line.push('\n');
    line
}

/// Left-aligns the first column and right-aligns the rest to column width.
fn text_table(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; columns];
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    for row in rows {
        let mut cells = Vec::with_capacity(row.len());
        for (i, cell) in row.iter().enumerate() {
            if i == 0 {
                cells.push(format!("{cell:<width$}", width = widths[i]));
            } else {
                cells.push(format!("{cell:>width$}", width = widths[i]));
            }
        }
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Renders a solved instance with its per-project risk profile.
///
/// Text shows the risk level, feasibility, iteration count, a per-project
/// table (id, allocation, spend, risk) and the spend/residual summary. CSV
/// emits the header `id,volume,base_cost,effective_cost,allocation,spend,risk`,
/// one row per project and a `TOTAL` summary row.
pub fn render_solution(
    instance: &ProblemInstance,
    costs: &EffectiveCostVector,
    solution: &Solution,
    profile: &RiskProfile,
    options: &ReportOptions,
) -> String {
    let p = options.precision;
    match options.format {
        ReportFormat::Text => {
            let mut out = String::new();
            out.push_str(&format!("feasibility: {}\n", solution.feasibility));
            out.push_str(&format!("risk level: {}\n", num(solution.risk_level, p)));
            out.push_str(&format!("iterations: {}\n", solution.iterations));
            let mut rows = vec![vec![
                "id".to_string(),
                "allocation".to_string(),
                "spend".to_string(),
                "risk".to_string(),
            ]];
            for (i, project) in instance.projects().iter().enumerate() {
                rows.push(vec![
                    project.id.clone(),
                    num(solution.allocation.units[i], p),
                    num(profile.initial_costs[i], p),
                    num(profile.risks[i], p),
                ]);
            }
            out.push_str(&text_table(&rows));
            out.push_str(&format!("total spend: {}\n", num(solution.spend, p)));
            out.push_str(&format!("residual: {}\n", num(solution.residual, p)));
            out
        }
        ReportFormat::Csv => {
            let mut out = String::from("id,volume,base_cost,effective_cost,allocation,spend,risk\n");
            let mut volume_total = 0.0;
            let mut units_total = 0.0;
            for (i, project) in instance.projects().iter().enumerate() {
                volume_total += project.volume;
                units_total += solution.allocation.units[i];
                out.push_str(&csv_line(&[
                    project.id.clone(),
                    num(project.volume, p),
                    num(project.base_cost, p),
                    num(costs.costs[i], p),
                    num(solution.allocation.units[i], p),
                    num(profile.initial_costs[i], p),
                    num(profile.risks[i], p),
                ]));
            }
            out.push_str(&csv_line(&[
                "TOTAL".to_string(),
                num(volume_total, p),
                String::new(),
                String::new(),
                num(units_total, p),
                num(solution.spend, p),
                num(solution.risk_level, p),
            ]));
            out
        }
    }
}

/// Renders a delay sweep, one row per requested t.
pub fn render_sweep(rows: &[SweepRow], options: &ReportOptions) -> String {
    let p = options.precision;
    let header = ["t", "risk_level", "spend", "residual"];
    match options.format {
        ReportFormat::Text => {
            let mut table = vec![header.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
            for row in rows {
                table.push(vec![
                    num(row.t, p),
                    num(row.solution.risk_level, p),
                    num(row.solution.spend, p),
                    num(row.solution.residual, p),
                ]);
            }
            text_table(&table)
        }
        ReportFormat::Csv => {
            let mut out = String::new();
            out.push_str(&csv_line(&header.map(String::from)));
            for row in rows {
                out.push_str(&csv_line(&[
                    num(row.t, p),
                    num(row.solution.risk_level, p),
                    num(row.solution.spend, p),
                    num(row.solution.residual, p),
                ]));
            }
            out
        }
    }
}

/// Renders budget and delay sensitivities.
pub fn render_sensitivities(
    instance: &ProblemInstance,
    sensitivities: &Sensitivities,
    options: &ReportOptions,
) -> String {
    let p = options.precision;
    match options.format {
        ReportFormat::Text => {
            let mut out = format!("dr/dB: {}\n", num(sensitivities.dr_db, p));
            let mut rows = vec![vec![
                "id".to_string(),
                "du/dB".to_string(),
                "dr/dT".to_string(),
            ]];
            for (i, project) in instance.projects().iter().enumerate() {
                rows.push(vec![
                    project.id.clone(),
                    num(sensitivities.du_db[i], p),
                    num(sensitivities.dr_dt[i], p),
                ]);
            }
            out.push_str(&text_table(&rows));
            out
        }
        ReportFormat::Csv => {
            let mut out = String::from("metric,id,value\n");
            out.push_str(&csv_line(&[
                "dr_dB".to_string(),
                String::new(),
                num(sensitivities.dr_db, p),
            ]));
            for (i, project) in instance.projects().iter().enumerate() {
                out.push_str(&csv_line(&[
                    "du_dB".to_string(),
                    project.id.clone(),
                    num(sensitivities.du_db[i], p),
                ]));
            }
            for (i, project) in instance.projects().iter().enumerate() {
                out.push_str(&csv_line(&[
                    "dr_dT".to_string(),
                    project.id.clone(),
                    num(sensitivities.dr_dt[i], p),
                ]));
            }
            out
        }
    }
}

/// Convenience bundle: profile computed from the solution's own allocation.
pub fn solution_report(
    instance: &ProblemInstance,
    solution: &Solution,
    options: &ReportOptions,
) -> Result<String, crate::analysis::AnalysisError> {
    let costs = crate::pricing::effective_costs(instance);
    let profile = crate::analysis::risk_profile(instance, &costs, &solution.allocation)?;
    Ok(render_solution(instance, &costs, solution, &profile, options))
}
