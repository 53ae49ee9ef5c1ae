//! Experiment orchestration: run learners against exact solutions, account
//! regret, measure concentration, build peeling diagnostics, fit growth
//! curves, and emit CSV/SVG/JSON outputs.

mod concentration;
mod csv;
mod experiment;
mod fit;
mod peeling;
mod plot;

pub use concentration::{
    check_concentration_discounted, check_concentration_episodic, check_concentration_lsvi,
    count_envelope_order_violations, ConcentrationCount, CONCENTRATION_TOL,
};
pub use csv::{
    aggregate_to_csv, format_sig17, parse_regret_csv, run_record_to_csv, AGGREGATE_CSV_HEADER,
    RUN_CSV_HEADER,
};
pub use experiment::{
    default_cadence, run_experiment, Algorithm, Constants, ExperimentConfig, ExperimentOutcome,
    GameSource, GeneratorParams, DEFAULT_DUALITY_CADENCE, DEFAULT_EPISODIC_BONUS,
    DEFAULT_EVAL_TOL,
};
pub use fit::{fit_log_curve, LogFit};
pub use peeling::{clip, peeling_histogram, PeelingHistogram};
pub use plot::{extract_polylines, render_regret_svg};

use std::time::Duration;

/// One evaluation point of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPoint {
    /// Episode k (or step t for the discounted learner), 1-based.
    pub index: u64,
    /// `|V1* - V1^{pair}|` at the realized initial state, or exploitability
    /// in the independent setting; nonnegative.
    pub inst_regret: f64,
    /// Nondecreasing prefix accounting of instantaneous regret.
    pub cum_regret: f64,
    /// Envelope-ordering violations counted at this evaluation.
    pub conc_violations: u64,
    /// Sampled every `duality_cadence` evaluations; `None` otherwise.
    pub duality_gap: Option<f64>,
}

/// Complete log of one seeded run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub seed: u64,
    pub points: Vec<EvalPoint>,
    pub total_regret: f64,
    pub concentration: ConcentrationCount,
    /// LSVI only: entries where the upper table fell below the lower one.
    pub envelope_order_violations: u64,
    /// `None` when the game's gap table is all-zero.
    pub peeling: Option<PeelingHistogram>,
    pub wall_time: Duration,
}

impl RunRecord {
    /// Violation fraction over every `(k, h, s, a)` comparison made.
    pub fn violation_fraction(&self) -> f64 {
        if self.concentration.checks == 0 {
            0.0
        } else {
            self.concentration.violations as f64 / self.concentration.checks as f64
        }
    }
}
