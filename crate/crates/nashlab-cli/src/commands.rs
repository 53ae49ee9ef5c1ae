//! Command implementations.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use nashlab::error::{GameError, HarnessError, LearnerError, SolveError, SpecIoError};
use nashlab::game::io::num17;
use nashlab::game::{generate_random_episodic, read_spec, write_spec, GameSpec};
use nashlab::harness::{
    parse_regret_csv, render_regret_svg, run_experiment, Algorithm, Constants, ExperimentConfig,
    GameSource,
};
use nashlab::solve::export::{discounted_solution_to_json, episodic_solution_to_json};
use nashlab::solve::{
    brute_force_solve, duality_gap, duality_gap_discounted, evaluate_pair_discounted,
    evaluate_pair_episodic, exact_gap_sum, initial_value, solve_discounted, solve_episodic,
    PolicyPair,
};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or invalid input content; exit code 1.
    Validation(String),
    /// Failures while doing the work (I/O, solver limits); exit code 2.
    Runtime(String),
}

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn runtime(msg: impl Into<String>) -> CliError {
    CliError::Runtime(msg.into())
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        validation(e.to_string())
    }
}

impl From<SpecIoError> for CliError {
    fn from(e: SpecIoError) -> Self {
        match e {
            SpecIoError::Io { .. } => runtime(e.to_string()),
            _ => validation(e.to_string()),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::BadTolerance(_) => validation(e.to_string()),
            _ => runtime(e.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_) | HarnessError::InvalidGame(_) | HarnessError::AllZeroGap => {
                validation(e.to_string())
            }
            HarnessError::Game(inner) => inner.into(),
            HarnessError::SpecIo(inner) => inner.into(),
            HarnessError::Solve(inner) => inner.into(),
            HarnessError::Learner(inner) => match inner {
                LearnerError::BadBonusScale(_)
                | LearnerError::BadGapLowerBound(_)
                | LearnerError::DimensionMismatch { .. } => validation(inner.to_string()),
                _ => runtime(inner.to_string()),
            },
            HarnessError::Io { .. } => runtime(e.to_string()),
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn check_valid(spec: &GameSpec) -> Result<(), CliError> {
    let report = spec.validate();
    if report.is_ok() {
        for warning in &report.warnings {
            eprintln!("warning: {warning}");
        }
        Ok(())
    } else {
        Err(validation(format!("game failed validation:\n{report}")))
    }
}

pub fn gen(
    states: usize,
    a1: usize,
    a2: usize,
    horizon: usize,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let spec = generate_random_episodic(states, a1, a2, horizon, seed)?;
    write_spec(&GameSpec::Episodic(spec), out)?;
    Ok(())
}

pub fn solve(game: &Path, out: &Path, tol: Option<f64>, verify: bool) -> Result<(), CliError> {
    let spec = read_spec(game)?;
    check_valid(&spec)?;
    let json = match &spec {
        GameSpec::Episodic(s) => solve_episodic_to_json(s, verify)?,
        GameSpec::Linear(l) => solve_episodic_to_json(&l.to_episodic(), verify)?,
        GameSpec::Discounted(s) => {
            if verify {
                return Err(validation(
                    "--verify cross-checks the enumeration oracle, which exists for episodic games only",
                ));
            }
            let solution = solve_discounted(s, tol.unwrap_or(1e-10))?;
            discounted_solution_to_json(&solution)
        }
    };
    write_text(out, &(serde_json::to_string_pretty(&json).unwrap() + "\n"))
}

fn solve_episodic_to_json(
    spec: &nashlab::EpisodicGameSpec,
    verify: bool,
) -> Result<Value, CliError> {
    let solution = solve_episodic(spec);
    let mut json = episodic_solution_to_json(&solution);
    if verify {
        let brute = brute_force_solve(spec, None)?;
        let exact = initial_value(spec, &solution.vstar[0]);
        let matches = (brute - exact).abs() <= 1e-10;
        json["brute_force_check"] = json!({
            "value": num17(brute),
            "matches": matches,
        });
        if !matches {
            return Err(runtime(format!(
                "brute-force value {brute} disagrees with backward induction {exact}"
            )));
        }
    }
    Ok(json)
}

pub struct TrainArgs {
    pub config: Option<PathBuf>,
    pub alg: Option<String>,
    pub game: Option<PathBuf>,
    pub episodes: Option<u64>,
    pub steps: Option<u64>,
    pub seeds: Option<String>,
    pub c: Option<f64>,
    pub c2: Option<f64>,
    pub cbeta: Option<f64>,
    pub p: Option<f64>,
    pub gap_lower_bound: Option<f64>,
    pub tol: Option<f64>,
    pub cadence: Option<u64>,
    pub duality_cadence: Option<u64>,
    pub opponent: Option<String>,
    pub out_dir: Option<PathBuf>,
}

/// Seeds are a comma list; each item is a number or an inclusive `a..b` range.
fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    let mut seeds = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        if let Some((lo, hi)) = item.split_once("..") {
            let lo: u64 = lo.parse().map_err(|_| validation(format!("bad seed range `{item}`")))?;
            let hi: u64 = hi.parse().map_err(|_| validation(format!("bad seed range `{item}`")))?;
            if hi < lo {
                return Err(validation(format!("empty seed range `{item}`")));
            }
            seeds.extend(lo..=hi);
        } else {
            seeds.push(item.parse().map_err(|_| validation(format!("bad seed `{item}`")))?);
        }
    }
    if seeds.is_empty() {
        return Err(validation("at least one seed is required"));
    }
    Ok(seeds)
}

pub fn train(args: TrainArgs) -> Result<(), CliError> {
    let mut config: Option<ExperimentConfig> = match &args.config {
        Some(path) => {
            let text = read_text(path)?;
            Some(
                serde_json::from_str(&text)
                    .map_err(|e| validation(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    // flags win on conflict with the config file
    let algorithm = match (&args.alg, &config) {
        (Some(name), _) => name.parse::<Algorithm>().map_err(validation)?,
        (None, Some(cfg)) => cfg.algorithm,
        (None, None) => return Err(validation("--alg is required (or provide --config)")),
    };
    let game = match (&args.game, config.as_ref().map(|c| c.game.clone())) {
        (Some(path), _) => GameSource::Path { path: path.clone() },
        (None, Some(source)) => source,
        (None, None) => return Err(validation("--game is required (or provide --config)")),
    };
    let seeds = match (&args.seeds, &config) {
        (Some(text), _) => parse_seeds(text)?,
        (None, Some(cfg)) => cfg.seeds.clone(),
        (None, None) => return Err(validation("--seeds is required (or provide --config)")),
    };
    let out_dir = match (&args.out_dir, &config) {
        (Some(dir), _) => dir.clone(),
        (None, Some(cfg)) => cfg.out_dir.clone(),
        (None, None) => return Err(validation("--out-dir is required (or provide --config)")),
    };
    let base_constants = config
        .as_mut()
        .map(|c| std::mem::take(&mut c.constants))
        .unwrap_or_default();
    let constants = Constants {
        c: args.c.or(base_constants.c),
        c2: args.c2.or(base_constants.c2),
        c_beta: args.cbeta.or(base_constants.c_beta),
        p: args.p.or(base_constants.p),
        gap_lower_bound: args.gap_lower_bound.or(base_constants.gap_lower_bound),
        tol: args.tol.or(base_constants.tol),
    };
    let config = ExperimentConfig {
        algorithm,
        game,
        episodes: args.episodes.or(config.as_ref().and_then(|c| c.episodes)),
        steps: args.steps.or(config.as_ref().and_then(|c| c.steps)),
        constants,
        seeds,
        cadence: args.cadence.or(config.as_ref().and_then(|c| c.cadence)),
        duality_cadence: args
            .duality_cadence
            .or(config.as_ref().and_then(|c| c.duality_cadence)),
        opponent: args.opponent.or(config.as_ref().and_then(|c| c.opponent.clone())),
        out_dir,
    };
    run_experiment(&config)?;
    Ok(())
}

fn parse_nested_policy(value: &Value, field: &str) -> Result<Vec<Vec<usize>>, CliError> {
    value
        .get(field)
        .and_then(Value::as_array)
        .ok_or_else(|| validation(format!("policy file lacks array field `{field}`")))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| validation(format!("`{field}` must be an array of arrays")))?
                .iter()
                .map(|a| {
                    a.as_u64()
                        .map(|v| v as usize)
                        .ok_or_else(|| validation(format!("`{field}` holds a non-integer action")))
                })
                .collect()
        })
        .collect()
}

fn parse_flat_policy(value: &Value, field: &str) -> Result<Vec<usize>, CliError> {
    value
        .get(field)
        .and_then(Value::as_array)
        .ok_or_else(|| validation(format!("policy file lacks array field `{field}`")))?
        .iter()
        .map(|a| {
            a.as_u64()
                .map(|v| v as usize)
                .ok_or_else(|| validation(format!("`{field}` holds a non-integer action")))
        })
        .collect()
}

pub fn eval(game: &Path, policy: &Path, out: &Path, tol: Option<f64>) -> Result<(), CliError> {
    let spec = read_spec(game)?;
    check_valid(&spec)?;
    let policy_json: Value = serde_json::from_str(&read_text(policy)?)
        .map_err(|e| validation(format!("{}: {e}", policy.display())))?;
    let result = match &spec {
        GameSpec::Episodic(s) => eval_episodic(s, &policy_json)?,
        GameSpec::Linear(l) => eval_episodic(&l.to_episodic(), &policy_json)?,
        GameSpec::Discounted(s) => {
            let pi = parse_flat_policy(&policy_json, "pi")?;
            let mu = parse_flat_policy(&policy_json, "mu")?;
            if pi.len() != s.num_states || mu.len() != s.num_states {
                return Err(validation("policy length must equal the state count"));
            }
            let tol = tol.unwrap_or(1e-10);
            let values = evaluate_pair_discounted(s, &pi, &mu, tol)?;
            let solution = solve_discounted(s, tol)?;
            let gap = duality_gap_discounted(s, &pi, &mu, tol)?;
            json!({
                "v1": num17(values.max_to_move[s.initial_state]),
                "vstar1": num17(solution.vstar.max_to_move[s.initial_state]),
                "duality_gap": num17(gap),
            })
        }
    };
    write_text(out, &(serde_json::to_string_pretty(&result).unwrap() + "\n"))
}

fn eval_episodic(spec: &nashlab::EpisodicGameSpec, policy_json: &Value) -> Result<Value, CliError> {
    let pair = PolicyPair {
        pi: parse_nested_policy(policy_json, "pi")?,
        mu: parse_nested_policy(policy_json, "mu")?,
    };
    if pair.pi.len() != spec.half_horizon || pair.mu.len() != spec.half_horizon {
        return Err(validation(format!(
            "policy must cover {} max-player steps and as many min-player steps",
            spec.half_horizon
        )));
    }
    for (rows, bound) in [(&pair.pi, spec.actions_max), (&pair.mu, spec.actions_min)] {
        for row in rows {
            if row.len() != spec.num_states {
                return Err(validation("policy rows must cover every state"));
            }
            if row.iter().any(|&a| a >= bound) {
                return Err(validation("policy action out of range"));
            }
        }
    }
    let solution = solve_episodic(spec);
    let v = evaluate_pair_episodic(spec, &pair);
    let gap = duality_gap(spec, &pair);
    let gap_sum = exact_gap_sum(spec, &solution, &pair);
    Ok(json!({
        "v1": num17(initial_value(spec, &v[0])),
        "vstar1": num17(initial_value(spec, &solution.vstar[0])),
        "duality_gap": num17(gap),
        "gap_sum": num17(gap_sum),
    }))
}

pub fn report(input: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let summary_path = input.join("summary.json");
    let summary: Value = serde_json::from_str(&read_text(&summary_path)?)
        .map_err(|e| validation(format!("{}: {e}", summary_path.display())))?;
    let mut text = String::new();
    let field = |v: &Value, path: &[&str]| -> Value {
        let mut cur = v.clone();
        for p in path {
            cur = cur.get(p).cloned().unwrap_or(Value::Null);
        }
        cur
    };
    use std::fmt::Write as _;
    let _ = writeln!(text, "algorithm:          {}", field(&summary, &["algorithm"]));
    let _ = writeln!(text, "seeds:              {}", field(&summary, &["seeds"]));
    let _ = writeln!(text, "constants:          {}", field(&summary, &["constants"]));
    let _ = writeln!(
        text,
        "total regret:       mean {} (std {})",
        field(&summary, &["total_regret", "mean"]),
        field(&summary, &["total_regret", "std"])
    );
    let _ = writeln!(
        text,
        "violation fraction: mean {}",
        field(&summary, &["violation_fraction", "mean"])
    );
    let fit = field(&summary, &["fit"]);
    if fit.is_null() {
        let _ = writeln!(text, "growth fit:         (series too short)");
    } else {
        let r2_log = field(&fit, &["r2_log"]);
        let r2_linear = field(&fit, &["r2_linear"]);
        let shape = match (r2_log.as_f64(), r2_linear.as_f64()) {
            (Some(l), Some(n)) if l > n => "logarithmic",
            (Some(_), Some(_)) => "linear",
            _ => "unknown",
        };
        let _ = writeln!(
            text,
            "growth fit:         R2(log) {} vs R2(linear) {} -> {}",
            r2_log, r2_linear, shape
        );
    }
    let peeling = field(&summary, &["peeling"]);
    if peeling.is_null() {
        let _ = writeln!(text, "peeling:            (all gaps zero)");
    } else {
        let _ = writeln!(
            text,
            "peeling:            clipped {} counts {}",
            field(&peeling, &["clipped"]),
            field(&peeling, &["counts"])
        );
    }
    let _ = writeln!(text, "wall time (s):      {}", field(&summary, &["wall_time_secs"]));
    match out {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn plot(input: &Path, out: &Path) -> Result<(), CliError> {
    let text = read_text(input)?;
    let series = parse_regret_csv(&text).map_err(|e| validation(e.to_string()))?;
    if series.is_empty() {
        return Err(validation("CSV holds no data rows"));
    }
    write_text(out, &render_regret_svg(&series))
}
