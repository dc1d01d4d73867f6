//! Serializable run reports.
//!
//! A [`RunReport`] is the machine-readable record of one quadratization
//! attempt: the parsed input, the effective configuration, the outcome, and
//! the search counters. Repeated runs on the same input produce identical
//! reports except for `wall_ms`.

use serde::{Deserialize, Serialize};

use crate::render::Namer;
use crate::search::{QuadResult, SearchConfig, SearchFailure};
use crate::system::RationalSystem;

/// Top-level report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    /// Input equations, one rendered string per state.
    pub input: Vec<String>,
    /// Effective configuration.
    pub config: ConfigReport,
    /// Outcome of the run.
    pub result: ResultReport,
    /// Search counters.
    pub stats: StatsReport,
}

/// Echo of the configuration a run used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigReport {
    /// Heuristic name: `h1`, `h2`, or `h3`.
    pub heuristic: String,
    /// Candidate set size cap.
    pub max_aux: u32,
    /// Differential order the run started at.
    pub diff_order: u32,
    /// Derivative cost budget for candidates.
    pub max_aux_deriv: u32,
    /// Whether subset sweeps were enabled.
    pub shrink: bool,
    /// Whether parameters were widened automatically on failure.
    pub auto: bool,
    /// Node cap, when one was set.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub node_limit: Option<u64>,
    /// Time cap in milliseconds, when one was set.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub time_limit_ms: Option<u64>,
}

/// Outcome section.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultReport {
    /// `success`, `pr1_exhausted`, `pr2_exhausted`, `node_limit`, or
    /// `time_limit`.
    pub status: String,
    /// Auxiliary definitions, e.g. `w1 = u^2`; empty on failure.
    pub aux_vars: Vec<String>,
    /// The quadratic equations, states first; empty on failure.
    pub quadratic_system: Vec<String>,
    /// Differential order of the successful verification, or the last one
    /// attempted.
    pub diff_order: u32,
}

/// Counter section.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsReport {
    /// Candidate sets verified.
    pub nodes: u64,
    /// Subset verifications performed by shrink sweeps.
    pub shrink_checks: u64,
    /// Wall time in milliseconds.
    pub wall_ms: u64,
}

/// Renders the input equations with their own state names.
pub fn render_input(input: &RationalSystem) -> Vec<String> {
    let namer = Namer::new(input.state_names(), &[]);
    input
        .state_names()
        .iter()
        .zip(input.rhs())
        .map(|(name, rhs)| format!("{}_t = {}", name, namer.rational(rhs)))
        .collect()
}

/// Assembles a report from a finished run.
///
/// `attempted_diff_order` is reported on failure; successful runs report
/// the order their verification actually used.
pub fn build_report(
    input: &RationalSystem,
    cfg: &SearchConfig,
    auto: bool,
    attempted_diff_order: u32,
    outcome: &Result<QuadResult, SearchFailure>,
) -> RunReport {
    let config = ConfigReport {
        heuristic: cfg.heuristic.name().to_string(),
        max_aux: cfg.max_aux,
        diff_order: cfg.diff_order,
        max_aux_deriv: cfg.max_aux_deriv,
        shrink: cfg.shrink_enabled,
        auto,
        node_limit: cfg.node_limit,
        time_limit_ms: cfg.time_limit.map(|t| t.as_millis() as u64),
    };
    let (result, stats) = match outcome {
        Ok(q) => {
            let namer = Namer::new(input.state_names(), &q.aux_set);
            let mut equations = Vec::with_capacity(q.quadratic_system.len());
            for (i, form) in q.quadratic_system.iter().enumerate() {
                let lhs = if i < input.state_names().len() {
                    namer.state_lhs(i as u32)
                } else {
                    namer.aux_lhs(q.aux_set[i - input.state_names().len()].id)
                };
                equations.push(format!("{} = {}", lhs, namer.poly(form)));
            }
            (
                ResultReport {
                    status: "success".to_string(),
                    aux_vars: q.aux_set.iter().map(|d| namer.aux_definition(d)).collect(),
                    quadratic_system: equations,
                    diff_order: q.diff_order_used,
                },
                StatsReport {
                    nodes: q.stats.nodes_traversed,
                    shrink_checks: q.stats.shrink_checks,
                    wall_ms: q.stats.wall_time.as_millis() as u64,
                },
            )
        }
        Err(f) => (
            ResultReport {
                status: f.kind.label().to_string(),
                aux_vars: Vec::new(),
                quadratic_system: Vec::new(),
                diff_order: attempted_diff_order,
            },
            StatsReport {
                nodes: f.stats.nodes_traversed,
                shrink_checks: f.stats.shrink_checks,
                wall_ms: f.stats.wall_time.as_millis() as u64,
            },
        ),
    };
    RunReport { input: render_input(input), config, result, stats }
}
