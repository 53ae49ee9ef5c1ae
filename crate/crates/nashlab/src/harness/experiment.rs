//! Experiment configuration and execution.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::concentration::{
    check_concentration_discounted, check_concentration_episodic, check_concentration_lsvi,
    count_envelope_order_violations, ConcentrationCount, CONCENTRATION_TOL,
};
use super::csv::{aggregate_to_csv, run_record_to_csv};
use super::fit::fit_log_curve;
use super::peeling::{peeling_histogram, PeelingHistogram};
use super::plot::render_regret_svg;
use super::{EvalPoint, RunRecord};
use crate::error::HarnessError;
use crate::game::{
    generate_random_episodic, lift_tabular_to_linear, read_spec, DiscountedGameSpec,
    EpisodicGameSpec, GameSpec, LinearGameSpec, Player,
};
use crate::linear::{
    run_lsvi_centralized, run_lsvi_independent, BestResponseOracle, FixedPure, LsviEpisodeRecord,
    LsviHook, LsviParams, LsviState, Opponent, SeededRandomStationary, DEFAULT_C_BETA,
};
use crate::solve::{
    best_response_max, duality_gap, duality_gap_discounted, evaluate_pair_discounted,
    evaluate_pair_episodic, exact_gap_sum, initial_value, solve_discounted, solve_episodic,
    DiscountedNashSolution, GapMin, NashSolution, Parity, PolicyPair,
};
use crate::tabular::{
    run_nashq_discounted, run_nashq_episodic, DiscountedLearnerState, DiscountedStepHook,
    EpisodeHook, EpisodeRecord, EpisodicLearnerState,
};

/// Default bonus multiplier for the episodic tabular learner. The theory
/// leaves the constant unspecified; 2 keeps the bonus comfortably optimistic
/// at desk scale (see the README for sensitivity notes).
pub const DEFAULT_EPISODIC_BONUS: f64 = 2.0;

/// Default bonus constant for the discounted learner.
pub fn default_discounted_bonus() -> f64 {
    4.0 * 2f64.sqrt()
}

/// Exact-evaluation tolerance for discounted pair values.
pub const DEFAULT_EVAL_TOL: f64 = 1e-10;

pub const DEFAULT_DUALITY_CADENCE: u64 = 100;

/// Every episode up to 10^4 total, then thinned to about 10^4 points.
pub fn default_cadence(total: u64) -> u64 {
    if total <= 10_000 {
        1
    } else {
        total.div_ceil(10_000)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "nashq-episodic")]
    NashqEpisodic,
    #[serde(rename = "nashq-discounted")]
    NashqDiscounted,
    #[serde(rename = "lsvi-centralized")]
    LsviCentralized,
    #[serde(rename = "lsvi-independent")]
    LsviIndependent,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::NashqEpisodic => "nashq-episodic",
            Algorithm::NashqDiscounted => "nashq-discounted",
            Algorithm::LsviCentralized => "lsvi-centralized",
            Algorithm::LsviIndependent => "lsvi-independent",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nashq-episodic" => Ok(Algorithm::NashqEpisodic),
            "nashq-discounted" => Ok(Algorithm::NashqDiscounted),
            "lsvi-centralized" => Ok(Algorithm::LsviCentralized),
            "lsvi-independent" => Ok(Algorithm::LsviIndependent),
            other => Err(format!(
                "unknown algorithm `{other}` (expected nashq-episodic, nashq-discounted, lsvi-centralized or lsvi-independent)"
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub states: usize,
    pub a1: usize,
    pub a2: usize,
    pub horizon: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GameSource {
    Path { path: PathBuf },
    Generator { generator: GeneratorParams },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    /// Episodic bonus multiplier c (default 2).
    #[serde(default)]
    pub c: Option<f64>,
    /// Discounted bonus constant c2 (default 4 sqrt 2).
    #[serde(default)]
    pub c2: Option<f64>,
    /// LSVI bonus multiplier (default 160).
    #[serde(default)]
    pub c_beta: Option<f64>,
    /// LSVI failure probability p (default 1/(4 H^2 K (K+1))).
    #[serde(default)]
    pub p: Option<f64>,
    /// Override for the discounted learner's gap lower bound; by default the
    /// exact solver's minimum positive gap is passed through.
    #[serde(default)]
    pub gap_lower_bound: Option<f64>,
    /// Exact-solve tolerance for discounted games (default 1e-10).
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub game: GameSource,
    /// Episode count K (episodic algorithms).
    #[serde(default)]
    pub episodes: Option<u64>,
    /// Step count T (discounted).
    #[serde(default)]
    pub steps: Option<u64>,
    #[serde(default)]
    pub constants: Constants,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub cadence: Option<u64>,
    #[serde(default)]
    pub duality_cadence: Option<u64>,
    /// Independent setting only: `fixed:<a2>`, `seeded:<seed>` or
    /// `best-response`.
    #[serde(default)]
    pub opponent: Option<String>,
    pub out_dir: PathBuf,
}

pub struct ExperimentOutcome {
    pub records: Vec<RunRecord>,
    pub summary: Value,
    pub written: Vec<PathBuf>,
}

/// Incremental regret accounting over the evaluation grid. Episodes between
/// evaluation points are charged at the most recent evaluated pair's rate;
/// with cadence 1 the accounting is exact.
struct RegretSeries {
    total: u64,
    cadence: u64,
    duality_cadence: u64,
    points: Vec<EvalPoint>,
    cum: f64,
    last_index: u64,
    last_inst: f64,
}

impl RegretSeries {
    fn new(total: u64, cadence: u64, duality_cadence: u64) -> Self {
        RegretSeries {
            total,
            cadence,
            duality_cadence,
            points: Vec::new(),
            cum: 0.0,
            last_index: 0,
            last_inst: 0.0,
        }
    }

    fn is_eval(&self, index: u64) -> bool {
        (index - 1) % self.cadence == 0 || index == self.total
    }

    fn wants_duality(&self, index: u64) -> bool {
        (index - 1) % self.duality_cadence == 0
    }

    fn push(&mut self, index: u64, inst: f64, conc_violations: u64, duality_gap: Option<f64>) {
        self.cum += self.last_inst * (index - 1 - self.last_index) as f64;
        self.cum += inst;
        self.points.push(EvalPoint {
            index,
            inst_regret: inst,
            cum_regret: self.cum,
            conc_violations,
            duality_gap,
        });
        self.last_index = index;
        self.last_inst = inst;
    }
}

// ---------------------------------------------------------------------------
// episodic tabular experiment

struct EpisodicRegretHook<'a> {
    spec: &'a EpisodicGameSpec,
    solution: &'a NashSolution,
    series: RegretSeries,
    eval_cache: HashMap<PolicyPair, Vec<f64>>,
    concentration: ConcentrationCount,
    peeling_samples: Vec<f64>,
}

impl<'a> EpisodicRegretHook<'a> {
    fn new(
        spec: &'a EpisodicGameSpec,
        solution: &'a NashSolution,
        episodes: u64,
        cadence: u64,
        duality_cadence: u64,
    ) -> Self {
        EpisodicRegretHook {
            spec,
            solution,
            series: RegretSeries::new(episodes, cadence, duality_cadence),
            eval_cache: HashMap::new(),
            concentration: ConcentrationCount::default(),
            peeling_samples: Vec::new(),
        }
    }

    fn into_record(self, seed: u64, wall_time: std::time::Duration) -> RunRecord {
        let peeling = finalize_peeling(
            self.solution.gap_plus_min,
            self.peeling_samples,
            self.spec.num_steps() as f64,
        );
        RunRecord {
            seed,
            total_regret: self.series.cum,
            points: self.series.points,
            concentration: self.concentration,
            envelope_order_violations: 0,
            peeling,
            wall_time,
        }
    }
}

impl EpisodeHook for EpisodicRegretHook<'_> {
    fn after_episode(&mut self, k: u64, state: &EpisodicLearnerState, episode: &EpisodeRecord) {
        self.peeling_samples
            .extend(episode.steps.iter().map(|s| s.envelope_gap));
        if !self.series.is_eval(k) {
            return;
        }
        let pair = &episode.start_pair;
        let v_row = self
            .eval_cache
            .entry(pair.clone())
            .or_insert_with(|| evaluate_pair_episodic(self.spec, pair)[0].clone())
            .clone();
        let initial = episode.steps[0].state;
        let inst = (self.solution.vstar[0][initial] - v_row[initial]).abs();
        // two independent regret routes must agree: occupancy-weighted gap
        // sum vs direct value difference
        let gap_sum = exact_gap_sum(self.spec, self.solution, pair);
        let direct =
            initial_value(self.spec, &self.solution.vstar[0]) - initial_value(self.spec, &v_row);
        assert!(
            (gap_sum - direct).abs() <= 1e-10,
            "regret decomposition mismatch: {gap_sum} vs {direct}"
        );
        let conc = check_concentration_episodic(state, self.solution, CONCENTRATION_TOL);
        self.concentration.checks += conc.checks;
        self.concentration.violations += conc.violations;
        let duality = self
            .series
            .wants_duality(k)
            .then(|| duality_gap(self.spec, pair));
        self.series.push(k, inst, conc.violations, duality);
    }
}

// ---------------------------------------------------------------------------
// discounted tabular experiment

struct DiscountedRegretHook<'a> {
    spec: &'a DiscountedGameSpec,
    solution: &'a DiscountedNashSolution,
    series: RegretSeries,
    eval_cache: HashMap<(Vec<usize>, Vec<usize>), Parity<Vec<f64>>>,
    concentration: ConcentrationCount,
    peeling_samples: Vec<f64>,
}

impl DiscountedStepHook for DiscountedRegretHook<'_> {
    fn at_step(&mut self, t: u64, state_index: usize, action_column: usize, state: &DiscountedLearnerState) {
        self.peeling_samples
            .push(state.qhat[state_index][action_column] - state.qcheck[state_index][action_column]);
        if !self.series.is_eval(t) {
            return;
        }
        let (pi, mu) = state.greedy_pair(self.spec.actions_max);
        let values = self
            .eval_cache
            .entry((pi.clone(), mu.clone()))
            .or_insert_with(|| {
                evaluate_pair_discounted(self.spec, &pi, &mu, DEFAULT_EVAL_TOL).expect(
                    "discounted pair evaluation did not converge (discount too close to 1)",
                )
            })
            .clone();
        let player = if t % 2 == 1 { Player::Max } else { Player::Min };
        let inst =
            (self.solution.vstar.get(player)[state_index] - values.get(player)[state_index]).abs();
        let conc =
            check_concentration_discounted(state, self.solution, self.spec.actions_max, CONCENTRATION_TOL);
        self.concentration.checks += conc.checks;
        self.concentration.violations += conc.violations;
        let duality = self.series.wants_duality(t).then(|| {
            duality_gap_discounted(self.spec, &pi, &mu, DEFAULT_EVAL_TOL)
                .expect("discounted best response did not converge")
        });
        self.series.push(t, inst, conc.violations, duality);
    }
}

// ---------------------------------------------------------------------------
// LSVI experiments

#[derive(Clone, Copy, PartialEq)]
enum LsviMode {
    Centralized,
    Independent,
}

struct LsviRegretHook<'a> {
    tabular: &'a EpisodicGameSpec,
    solution: &'a NashSolution,
    mode: LsviMode,
    series: RegretSeries,
    eval_cache: HashMap<PolicyPair, Vec<f64>>,
    best_response_cache: HashMap<Vec<Vec<usize>>, Vec<f64>>,
    concentration: ConcentrationCount,
    envelope_order_violations: u64,
    peeling_samples: Vec<f64>,
}

impl LsviHook for LsviRegretHook<'_> {
    fn after_episode(&mut self, k: u64, state: &LsviState, episode: &LsviEpisodeRecord) {
        match self.mode {
            LsviMode::Centralized => self.peeling_samples.extend(
                episode
                    .steps
                    .iter()
                    .map(|s| s.envelope_gap.expect("centralized records carry both tables")),
            ),
            LsviMode::Independent => self.peeling_samples.extend(episode.steps.iter().map(|s| {
                s.upper_value - self.solution.qstar[s.step][s.state][s.action]
            })),
        }
        if !self.series.is_eval(k) {
            return;
        }
        let pair = &episode.pair;
        let v_row = self
            .eval_cache
            .entry(pair.clone())
            .or_insert_with(|| evaluate_pair_episodic(self.tabular, pair)[0].clone())
            .clone();
        let initial = episode.steps[0].state;
        let inst = match self.mode {
            LsviMode::Centralized => {
                let gap_sum = exact_gap_sum(self.tabular, self.solution, pair);
                let direct = initial_value(self.tabular, &self.solution.vstar[0])
                    - initial_value(self.tabular, &v_row);
                assert!(
                    (gap_sum - direct).abs() <= 1e-10,
                    "regret decomposition mismatch: {gap_sum} vs {direct}"
                );
                (self.solution.vstar[0][initial] - v_row[initial]).abs()
            }
            LsviMode::Independent => {
                let br_row = self
                    .best_response_cache
                    .entry(pair.mu.clone())
                    .or_insert_with(|| best_response_max(self.tabular, &pair.mu).1[0].clone());
                // the exact best response dominates; clamp float dust
                (br_row[initial] - v_row[initial]).max(0.0)
            }
        };
        let conc = check_concentration_lsvi(state, self.solution, CONCENTRATION_TOL);
        self.concentration.checks += conc.checks;
        self.concentration.violations += conc.violations;
        self.envelope_order_violations += count_envelope_order_violations(state);
        let duality = self
            .series
            .wants_duality(k)
            .then(|| duality_gap(self.tabular, pair));
        self.series.push(k, inst, conc.violations, duality);
    }
}

// ---------------------------------------------------------------------------
// game loading

fn load_episodic(source: &GameSource) -> Result<EpisodicGameSpec, HarnessError> {
    match source {
        GameSource::Generator { generator: g } => {
            Ok(generate_random_episodic(g.states, g.a1, g.a2, g.horizon, g.seed)?)
        }
        GameSource::Path { path } => match read_spec(path)? {
            GameSpec::Episodic(s) => Ok(s),
            GameSpec::Linear(l) => Ok(l.to_episodic()),
            GameSpec::Discounted(_) => Err(HarnessError::Config(
                "this algorithm needs an episodic game, got a discounted one".into(),
            )),
        },
    }
}

fn load_discounted(source: &GameSource) -> Result<DiscountedGameSpec, HarnessError> {
    match source {
        GameSource::Generator { .. } => Err(HarnessError::Config(
            "the random generator produces episodic games; nashq-discounted needs a discounted game file".into(),
        )),
        GameSource::Path { path } => match read_spec(path)? {
            GameSpec::Discounted(s) => Ok(s),
            _ => Err(HarnessError::Config(
                "nashq-discounted needs a discounted game".into(),
            )),
        },
    }
}

fn load_linear(source: &GameSource) -> Result<LinearGameSpec, HarnessError> {
    match source {
        GameSource::Generator { generator: g } => Ok(lift_tabular_to_linear(
            &generate_random_episodic(g.states, g.a1, g.a2, g.horizon, g.seed)?,
        )),
        GameSource::Path { path } => match read_spec(path)? {
            GameSpec::Linear(l) => Ok(l),
            GameSpec::Episodic(s) => Ok(lift_tabular_to_linear(&s)),
            GameSpec::Discounted(_) => Err(HarnessError::Config(
                "LSVI algorithms need an episodic or linear game".into(),
            )),
        },
    }
}

fn ensure_valid(report: crate::game::ValidationReport) -> Result<(), HarnessError> {
    if report.is_ok() {
        Ok(())
    } else {
        Err(HarnessError::InvalidGame(report.to_string()))
    }
}

fn build_opponent(
    descriptor: &str,
    tabular: &EpisodicGameSpec,
) -> Result<Box<dyn Opponent>, HarnessError> {
    if let Some(rest) = descriptor.strip_prefix("fixed:") {
        let action: usize = rest
            .parse()
            .map_err(|_| HarnessError::Config(format!("bad fixed opponent action `{rest}`")))?;
        if action >= tabular.actions_min {
            return Err(HarnessError::Config(format!(
                "fixed opponent action {action} out of range (A2 = {})",
                tabular.actions_min
            )));
        }
        Ok(Box::new(FixedPure::constant(
            action,
            tabular.half_horizon,
            tabular.num_states,
        )))
    } else if let Some(rest) = descriptor.strip_prefix("seeded:") {
        let seed: u64 = rest
            .parse()
            .map_err(|_| HarnessError::Config(format!("bad opponent seed `{rest}`")))?;
        Ok(Box::new(SeededRandomStationary::new(
            seed,
            tabular.half_horizon,
            tabular.num_states,
            tabular.actions_min,
        )))
    } else if descriptor == "best-response" {
        Ok(Box::new(BestResponseOracle::new(tabular.clone())))
    } else {
        Err(HarnessError::Config(format!(
            "unknown opponent `{descriptor}` (expected fixed:<a2>, seeded:<seed> or best-response)"
        )))
    }
}

// ---------------------------------------------------------------------------
// seed fan-out

fn thread_cap(num_seeds: usize) -> usize {
    std::env::var("NASHLAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(num_seeds)
        .min(num_seeds)
}

fn run_seeds<F>(seeds: &[u64], runner: F) -> Result<Vec<RunRecord>, HarnessError>
where
    F: Fn(u64) -> Result<RunRecord, HarnessError> + Sync,
{
    let cap = thread_cap(seeds.len());
    if cap <= 1 {
        return seeds.iter().map(|&s| runner(s)).collect();
    }
    let slots: Vec<Mutex<Option<Result<RunRecord, HarnessError>>>> =
        seeds.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..cap {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= seeds.len() {
                    break;
                }
                let result = runner(seeds[i]);
                *slots[i].lock().unwrap() = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("worker filled every slot"))
        .collect()
}

fn finalize_peeling(gap_min: GapMin, samples: Vec<f64>, range_max: f64) -> Option<PeelingHistogram> {
    gap_min
        .value()
        .map(|g| peeling_histogram(samples, g, range_max))
}

// ---------------------------------------------------------------------------
// top-level runner

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    if config.seeds.is_empty() {
        return Err(HarnessError::Config("at least one seed is required".into()));
    }
    if config.cadence == Some(0) {
        return Err(HarnessError::Config("cadence must be at least 1".into()));
    }
    std::fs::create_dir_all(&config.out_dir).map_err(|source| HarnessError::Io {
        path: config.out_dir.display().to_string(),
        source,
    })?;
    match config.algorithm {
        Algorithm::NashqEpisodic => run_episodic_experiment(config),
        Algorithm::NashqDiscounted => run_discounted_experiment(config),
        Algorithm::LsviCentralized | Algorithm::LsviIndependent => run_lsvi_experiment(config),
    }
}

fn require_episodes(config: &ExperimentConfig) -> Result<u64, HarnessError> {
    config
        .episodes
        .filter(|&k| k >= 1)
        .ok_or_else(|| HarnessError::Config("`episodes` (>= 1) is required for this algorithm".into()))
}

fn run_episodic_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    let spec = load_episodic(&config.game)?;
    ensure_valid(spec.validate())?;
    let episodes = require_episodes(config)?;
    let cadence = config.cadence.unwrap_or_else(|| default_cadence(episodes));
    let duality_cadence = config.duality_cadence.unwrap_or(DEFAULT_DUALITY_CADENCE);
    let bonus = config.constants.c.unwrap_or(DEFAULT_EPISODIC_BONUS);
    let solution = solve_episodic(&spec);
    let records = run_seeds(&config.seeds, |seed| {
        let started = Instant::now();
        let mut hook = EpisodicRegretHook::new(&spec, &solution, episodes, cadence, duality_cadence);
        run_nashq_episodic(&spec, episodes, bonus, seed, &mut hook)?;
        Ok(hook.into_record(seed, started.elapsed()))
    })?;
    let constants = json!({ "c": bonus });
    let extras = json!({
        "episodes": episodes,
        "gap_plus_min": gap_min_json(&solution.gap_plus_min),
    });
    finish(config, records, cadence, duality_cadence, constants, extras)
}

fn run_discounted_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    let spec = load_discounted(&config.game)?;
    ensure_valid(spec.validate())?;
    let steps = config
        .steps
        .filter(|&t| t >= 1)
        .ok_or_else(|| HarnessError::Config("`steps` (>= 1) is required for nashq-discounted".into()))?;
    let cadence = config.cadence.unwrap_or_else(|| default_cadence(steps));
    let duality_cadence = config.duality_cadence.unwrap_or(DEFAULT_DUALITY_CADENCE);
    let c2 = config.constants.c2.unwrap_or_else(default_discounted_bonus);
    let tol = config.constants.tol.unwrap_or(DEFAULT_EVAL_TOL);
    let solution = solve_discounted(&spec, tol)?;
    let gap_lower_bound = match config.constants.gap_lower_bound {
        Some(g) => g,
        None => solution
            .gap_plus_min
            .value()
            .ok_or(HarnessError::AllZeroGap)?,
    };
    let range_max = 1.0 / (1.0 - spec.discount);
    let records = run_seeds(&config.seeds, |seed| {
        let started = Instant::now();
        let mut hook = DiscountedRegretHook {
            spec: &spec,
            solution: &solution,
            series: RegretSeries::new(steps, cadence, duality_cadence),
            eval_cache: HashMap::new(),
            concentration: ConcentrationCount::default(),
            peeling_samples: Vec::new(),
        };
        let state = run_nashq_discounted(&spec, steps, c2, gap_lower_bound, seed, &mut hook)?;
        assert_eq!(state.monotonicity_violations, 0);
        let peeling = finalize_peeling(
            solution.gap_plus_min,
            std::mem::take(&mut hook.peeling_samples),
            range_max,
        );
        Ok(RunRecord {
            seed,
            total_regret: hook.series.cum,
            points: hook.series.points,
            concentration: hook.concentration,
            envelope_order_violations: 0,
            peeling,
            wall_time: started.elapsed(),
        })
    })?;
    let constants = json!({ "c2": c2, "gap_lower_bound": gap_lower_bound, "tol": tol });
    let extras = json!({
        "steps": steps,
        "gap_plus_min": gap_min_json(&solution.gap_plus_min),
    });
    finish(config, records, cadence, duality_cadence, constants, extras)
}

fn run_lsvi_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    let linear = load_linear(&config.game)?;
    ensure_valid(linear.validate())?;
    let tabular = linear.to_episodic();
    ensure_valid(tabular.validate())?;
    let episodes = require_episodes(config)?;
    let cadence = config.cadence.unwrap_or_else(|| default_cadence(episodes));
    let duality_cadence = config.duality_cadence.unwrap_or(DEFAULT_DUALITY_CADENCE);
    let c_beta = config.constants.c_beta.unwrap_or(DEFAULT_C_BETA);
    let mode = if config.algorithm == Algorithm::LsviIndependent {
        LsviMode::Independent
    } else {
        LsviMode::Centralized
    };
    if mode == LsviMode::Independent && config.opponent.is_none() {
        return Err(HarnessError::Config(
            "lsvi-independent requires an `opponent`".into(),
        ));
    }
    // fail fast on a bad opponent descriptor before spawning seeds
    if let Some(descriptor) = &config.opponent {
        build_opponent(descriptor, &tabular)?;
    }
    let solution = solve_episodic(&tabular);
    let params_base = LsviParams {
        episodes,
        bonus_multiplier: c_beta,
        failure_prob: config.constants.p,
        seed: 0,
    };
    let records = run_seeds(&config.seeds, |seed| {
        let started = Instant::now();
        let params = LsviParams { seed, ..params_base.clone() };
        let mut hook = LsviRegretHook {
            tabular: &tabular,
            solution: &solution,
            mode,
            series: RegretSeries::new(episodes, cadence, duality_cadence),
            eval_cache: HashMap::new(),
            best_response_cache: HashMap::new(),
            concentration: ConcentrationCount::default(),
            envelope_order_violations: 0,
            peeling_samples: Vec::new(),
        };
        match mode {
            LsviMode::Centralized => {
                run_lsvi_centralized(&linear, &params, &mut hook)?;
            }
            LsviMode::Independent => {
                let mut opponent =
                    build_opponent(config.opponent.as_deref().unwrap(), &tabular)?;
                run_lsvi_independent(&linear, &params, opponent.as_mut(), &mut hook)?;
            }
        }
        let peeling = finalize_peeling(
            solution.gap_plus_min,
            std::mem::take(&mut hook.peeling_samples),
            tabular.num_steps() as f64,
        );
        Ok(RunRecord {
            seed,
            total_regret: hook.series.cum,
            points: hook.series.points,
            concentration: hook.concentration,
            envelope_order_violations: hook.envelope_order_violations,
            peeling,
            wall_time: started.elapsed(),
        })
    })?;
    let p_used = config
        .constants
        .p
        .unwrap_or_else(|| crate::linear::default_failure_prob(linear.half_horizon, episodes));
    let constants = json!({ "c_beta": c_beta, "p": p_used });
    let mut extras = json!({
        "episodes": episodes,
        "dimension": linear.dim,
        "gap_plus_min": gap_min_json(&solution.gap_plus_min),
    });
    if let Some(op) = &config.opponent {
        extras["opponent"] = Value::from(op.as_str());
    }
    finish(config, records, cadence, duality_cadence, constants, extras)
}

fn gap_min_json(g: &GapMin) -> Value {
    match g {
        GapMin::Value(v) => Value::from(*v),
        GapMin::AllZero => Value::from("all-zero"),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    std::fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.max(0.0).sqrt())
}

fn finish(
    config: &ExperimentConfig,
    records: Vec<RunRecord>,
    cadence: u64,
    duality_cadence: u64,
    constants: Value,
    extras: Value,
) -> Result<ExperimentOutcome, HarnessError> {
    let mut written = Vec::new();
    for record in &records {
        let path = config.out_dir.join(format!("seed_{}.csv", record.seed));
        write_file(&path, &run_record_to_csv(record))?;
        written.push(path);
    }
    let aggregate = aggregate_to_csv(&records)?;
    let aggregate_path = config.out_dir.join("aggregate.csv");
    write_file(&aggregate_path, &aggregate)?;
    written.push(aggregate_path);

    // seed-averaged cumulative regret drives the plot and the growth fit
    let n = records.len() as f64;
    let mean_series: Vec<(f64, f64)> = (0..records[0].points.len())
        .map(|row| {
            let k = records[0].points[row].index as f64;
            let cum = records.iter().map(|r| r.points[row].cum_regret).sum::<f64>() / n;
            (k, cum)
        })
        .collect();
    let svg_path = config.out_dir.join("regret.svg");
    write_file(&svg_path, &render_regret_svg(&mean_series))?;
    written.push(svg_path);

    let fit = fit_log_curve(&mean_series);
    let (total_mean, total_std) =
        mean_and_std(&records.iter().map(|r| r.total_regret).collect::<Vec<_>>());
    let (violation_mean, _) =
        mean_and_std(&records.iter().map(|r| r.violation_fraction()).collect::<Vec<_>>());
    let peeling = records
        .iter()
        .filter_map(|r| r.peeling.as_ref())
        .fold(None::<PeelingHistogram>, |acc, h| match acc {
            None => Some(h.clone()),
            Some(mut merged) => {
                merged.merge(h);
                Some(merged)
            }
        });
    let summary = json!({
        "algorithm": config.algorithm.name(),
        "game": serde_json::to_value(&config.game).expect("game source serializes"),
        "seeds": config.seeds,
        "cadence": cadence,
        "duality_cadence": duality_cadence,
        "constants": constants,
        "detail": extras,
        "total_regret": {
            "per_seed": records.iter().map(|r| r.total_regret).collect::<Vec<_>>(),
            "mean": total_mean,
            "std": total_std,
        },
        "violation_fraction": {
            "per_seed": records.iter().map(|r| r.violation_fraction()).collect::<Vec<_>>(),
            "mean": violation_mean,
        },
        "envelope_order_violations": records.iter().map(|r| r.envelope_order_violations).collect::<Vec<_>>(),
        "fit": fit.map(|f| json!({
            "intercept": f.intercept,
            "slope": f.slope,
            "r2_log": f.r2_log,
            "r2_linear": f.r2_linear,
        })),
        "peeling": peeling.map(|h| json!({
            "g_min": h.g_min,
            "clipped": h.clipped,
            "counts": h.counts,
        })),
        "wall_time_secs": records.iter().map(|r| r.wall_time.as_secs_f64()).collect::<Vec<_>>(),
    });
    let summary_path = config.out_dir.join("summary.json");
    write_file(&summary_path, &(serde_json::to_string_pretty(&summary).unwrap() + "\n"))?;
    written.push(summary_path);
    Ok(ExperimentOutcome {
        records,
        summary,
        written,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{fixtures, io::write_spec, GameSpec};

    fn temp_dir(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("nashlab-test-{name}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn g_one_config(out: PathBuf, path: PathBuf) -> ExperimentConfig {
        write_spec(&GameSpec::Episodic(fixtures::g_one()), &path).unwrap();
        ExperimentConfig {
            algorithm: Algorithm::NashqEpisodic,
            game: GameSource::Path { path },
            episodes: Some(10),
            steps: None,
            constants: Constants::default(),
            seeds: vec![1, 2],
            cadence: None,
            duality_cadence: None,
            opponent: None,
            out_dir: out,
        }
    }

    #[test]
    fn episodic_experiment_writes_per_seed_and_aggregate_files() {
        let dir = temp_dir("episodic");
        let config = g_one_config(dir.clone(), dir.join("g.json"));
        let outcome = run_experiment(&config).unwrap();
        assert_eq!(outcome.records.len(), 2);
        assert!(dir.join("seed_1.csv").exists());
        assert!(dir.join("seed_2.csv").exists());
        assert!(dir.join("aggregate.csv").exists());
        assert!(dir.join("summary.json").exists());
        assert!(dir.join("regret.svg").exists());
        for record in &outcome.records {
            assert_eq!(record.points.len(), 10);
            let mut last = 0.0;
            for p in &record.points {
                assert!(p.inst_regret >= 0.0);
                assert!(p.cum_regret >= last - 1e-15);
                last = p.cum_regret;
            }
        }
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn repeated_runs_are_byte_identical() {
        let dir_a = temp_dir("repeat-a");
        let dir_b = temp_dir("repeat-b");
        let game_a = dir_a.join("g.json");
        run_experiment(&g_one_config(dir_a.clone(), game_a.clone())).unwrap();
        let mut config_b = g_one_config(dir_b.clone(), dir_b.join("g.json"));
        config_b.game = GameSource::Path { path: game_a };
        run_experiment(&config_b).unwrap();
        for file in ["seed_1.csv", "seed_2.csv", "aggregate.csv", "regret.svg"] {
            let a = std::fs::read(dir_a.join(file)).unwrap();
            let b = std::fs::read(dir_b.join(file)).unwrap();
            assert_eq!(a, b, "{file} differs between identical runs");
        }
        let _ = std::fs::remove_dir_all(&dir_a);
        let _ = std::fs::remove_dir_all(&dir_b);
    }

    #[test]
    fn zero_reward_game_has_zero_regret_everywhere() {
        let dir = temp_dir("zero");
        let path = dir.join("zero.json");
        write_spec(&GameSpec::Episodic(fixtures::zero_reward(2, 2, 2, 1)), &path).unwrap();
        let config = ExperimentConfig {
            algorithm: Algorithm::NashqEpisodic,
            game: GameSource::Path { path },
            episodes: Some(20),
            steps: None,
            constants: Constants::default(),
            seeds: vec![3],
            cadence: None,
            duality_cadence: None,
            opponent: None,
            out_dir: dir.clone(),
        };
        let outcome = run_experiment(&config).unwrap();
        for p in &outcome.records[0].points {
            assert_eq!(p.inst_regret, 0.0);
        }
        assert!(outcome.records[0].peeling.is_none());
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn independent_without_opponent_rejected() {
        let dir = temp_dir("noopp");
        let path = dir.join("g.json");
        write_spec(&GameSpec::Episodic(fixtures::g_one()), &path).unwrap();
        let config = ExperimentConfig {
            algorithm: Algorithm::LsviIndependent,
            game: GameSource::Path { path },
            episodes: Some(5),
            steps: None,
            constants: Constants::default(),
            seeds: vec![1],
            cadence: None,
            duality_cadence: None,
            opponent: None,
            out_dir: dir.clone(),
        };
        match run_experiment(&config) {
            Err(HarnessError::Config(msg)) => assert!(msg.contains("opponent")),
            other => panic!("expected config error, got {:?}", other.map(|_| ())),
        }
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn all_zero_gap_blocks_the_discounted_learner() {
        let dir = temp_dir("allzero");
        let path = dir.join("flat.json");
        let mut spec = fixtures::g_disc();
        spec.rewards = vec![vec![0.0, 0.0, 0.0]];
        write_spec(&GameSpec::Discounted(spec), &path).unwrap();
        let config = ExperimentConfig {
            algorithm: Algorithm::NashqDiscounted,
            game: GameSource::Path { path },
            episodes: None,
            steps: Some(10),
            constants: Constants::default(),
            seeds: vec![1],
            cadence: None,
            duality_cadence: None,
            opponent: None,
            out_dir: dir.clone(),
        };
        assert!(matches!(run_experiment(&config), Err(HarnessError::AllZeroGap)));
        let _ = std::fs::remove_dir_all(&dir);
    }
}
