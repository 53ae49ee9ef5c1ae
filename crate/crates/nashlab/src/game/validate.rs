//! Structural validation for game specs.
//!
//! Validation is report-only: every violated invariant is listed with its
//! index coordinates (1-based step numbers, 0-based state/action indices).

use super::{DiscountedGameSpec, EpisodicGameSpec, InitialState, LinearGameSpec, PROB_ROW_TOL};

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    /// Soft checks (norm bounds on linear specs) that do not invalidate a spec.
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_ok() {
            write!(f, "ok")?;
        } else {
            for v in &self.violations {
                writeln!(f, "violation: {v}")?;
            }
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

fn check_row(report: &mut ValidationReport, row: &[f64], num_states: usize, at: &str) {
    if row.len() != num_states {
        report
            .violations
            .push(format!("row length {} != S={} at {at}", row.len(), num_states));
        return;
    }
    let mut sum = 0.0;
    for (s2, &p) in row.iter().enumerate() {
        if !p.is_finite() {
            report.violations.push(format!("non-finite probability at {at}, successor {s2}"));
            return;
        }
        if p < 0.0 {
            report
                .violations
                .push(format!("negative probability {p} at {at}, successor {s2}"));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > PROB_ROW_TOL {
        report.violations.push(format!("row sum {sum} != 1 at {at}"));
    }
}

fn check_reward(report: &mut ValidationReport, r: f64, at: &str) {
    if !r.is_finite() || !(0.0..=1.0).contains(&r) {
        report.violations.push(format!("reward out of [0,1]: {r} at {at}"));
    }
}

fn check_initial(report: &mut ValidationReport, initial: &InitialState, num_states: usize) {
    match initial {
        InitialState::Fixed(s) => {
            if *s >= num_states {
                report
                    .violations
                    .push(format!("initial state {s} out of range (S={num_states})"));
            }
        }
        InitialState::Distribution(row) => check_row(report, row, num_states, "initial_state"),
    }
}

pub fn validate_episodic(spec: &EpisodicGameSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    if spec.half_horizon == 0 || spec.num_states == 0 || spec.actions_max == 0 || spec.actions_min == 0
    {
        report
            .violations
            .push("H, S, A1, A2 must all be at least 1".into());
        return report;
    }
    let steps = spec.num_steps();
    if spec.transitions.len() != steps || spec.rewards.len() != steps {
        report.violations.push(format!(
            "table depth mismatch: expected {steps} steps, transitions has {}, rewards has {}",
            spec.transitions.len(),
            spec.rewards.len()
        ));
        return report;
    }
    for h in 0..steps {
        let acts = spec.actions_at(h);
        if spec.transitions[h].len() != spec.num_states || spec.rewards[h].len() != spec.num_states {
            report
                .violations
                .push(format!("state dimension mismatch at step {}", h + 1));
            continue;
        }
        for s in 0..spec.num_states {
            if spec.transitions[h][s].len() != acts || spec.rewards[h][s].len() != acts {
                report.violations.push(format!(
                    "step {} owns {} actions but state {s} lists {} transition rows and {} rewards",
                    h + 1,
                    acts,
                    spec.transitions[h][s].len(),
                    spec.rewards[h][s].len()
                ));
                continue;
            }
            for a in 0..acts {
                let at = format!("(step {}, state {s}, action {a})", h + 1);
                check_row(&mut report, &spec.transitions[h][s][a], spec.num_states, &at);
                check_reward(&mut report, spec.rewards[h][s][a], &at);
            }
        }
    }
    check_initial(&mut report, &spec.initial_state, spec.num_states);
    report
}

pub fn validate_discounted(spec: &DiscountedGameSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    if spec.num_states == 0 || spec.actions_max == 0 || spec.actions_min == 0 {
        report.violations.push("S, A1, A2 must all be at least 1".into());
        return report;
    }
    if !(spec.discount > 0.0 && spec.discount < 1.0) {
        report
            .violations
            .push(format!("discount {} outside (0,1)", spec.discount));
    }
    let acts = spec.num_actions();
    if spec.transitions.len() != spec.num_states || spec.rewards.len() != spec.num_states {
        report.violations.push("state dimension mismatch".into());
        return report;
    }
    for s in 0..spec.num_states {
        if spec.transitions[s].len() != acts || spec.rewards[s].len() != acts {
            report.violations.push(format!(
                "state {s} lists {} transition rows and {} rewards, expected A1+A2={acts}",
                spec.transitions[s].len(),
                spec.rewards[s].len()
            ));
            continue;
        }
        for a in 0..acts {
            let at = format!("(state {s}, action column {a})");
            check_row(&mut report, &spec.transitions[s][a], spec.num_states, &at);
            check_reward(&mut report, spec.rewards[s][a], &at);
        }
    }
    if spec.initial_state >= spec.num_states {
        report.violations.push(format!(
            "initial state {} out of range (S={})",
            spec.initial_state, spec.num_states
        ));
    }
    report
}

pub fn validate_linear(spec: &LinearGameSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    if spec.half_horizon == 0
        || spec.num_states == 0
        || spec.actions_max == 0
        || spec.actions_min == 0
        || spec.dim == 0
    {
        report
            .violations
            .push("H, S, A1, A2, d must all be at least 1".into());
        return report;
    }
    let steps = spec.num_steps();
    if spec.features.len() != steps || spec.measures.len() != steps || spec.reward_weights.len() != steps
    {
        report.violations.push(format!(
            "table depth mismatch: expected {steps} steps, phi has {}, theta has {}, mu has {}",
            spec.features.len(),
            spec.measures.len(),
            spec.reward_weights.len()
        ));
        return report;
    }
    let sqrt_d = (spec.dim as f64).sqrt();
    for h in 0..steps {
        if spec.reward_weights[h].len() != spec.dim {
            report
                .violations
                .push(format!("mu at step {} has wrong dimension", h + 1));
            continue;
        }
        let mu_norm = norm2(&spec.reward_weights[h]);
        if mu_norm > sqrt_d + 1e-12 {
            report.warnings.push(format!(
                "||mu||={mu_norm} exceeds sqrt(d)={sqrt_d} at step {}",
                h + 1
            ));
        }
        if spec.measures[h].len() != spec.num_states {
            report
                .violations
                .push(format!("theta at step {} has wrong state count", h + 1));
            continue;
        }
        // theta_h(S): the total measure vector, summed over successor states.
        let mut total_measure = vec![0.0; spec.dim];
        for s2 in 0..spec.num_states {
            if spec.measures[h][s2].len() != spec.dim {
                report.violations.push(format!(
                    "theta at step {}, state {s2} has wrong dimension",
                    h + 1
                ));
                continue;
            }
            for j in 0..spec.dim {
                total_measure[j] += spec.measures[h][s2][j];
            }
        }
        let theta_norm = norm2(&total_measure);
        if theta_norm > sqrt_d + 1e-12 {
            report.warnings.push(format!(
                "||theta(S)||={theta_norm} exceeds sqrt(d)={sqrt_d} at step {}",
                h + 1
            ));
        }
        let acts = spec.actions_at(h);
        if spec.features[h].len() != spec.num_states {
            report
                .violations
                .push(format!("phi at step {} has wrong state count", h + 1));
            continue;
        }
        for s in 0..spec.num_states {
            if spec.features[h][s].len() != acts {
                report.violations.push(format!(
                    "phi at step {}, state {s} lists {} actions, expected {acts}",
                    h + 1,
                    spec.features[h][s].len()
                ));
                continue;
            }
            for a in 0..acts {
                let phi = &spec.features[h][s][a];
                let at = format!("(step {}, state {s}, action {a})", h + 1);
                if phi.len() != spec.dim {
                    report.violations.push(format!("phi has wrong dimension at {at}"));
                    continue;
                }
                let phi_norm = norm2(phi);
                if phi_norm > 1.0 + 1e-12 {
                    report
                        .warnings
                        .push(format!("||phi||={phi_norm} exceeds 1 at {at}"));
                }
                let row = spec.reconstruct_transition_row(h, s, a);
                check_row(&mut report, &row, spec.num_states, &format!("reconstructed {at}"));
                check_reward(
                    &mut report,
                    spec.reconstruct_reward(h, s, a),
                    &format!("reconstructed {at}"),
                );
            }
        }
    }
    check_initial(&mut report, &spec.initial_state, spec.num_states);
    report
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
