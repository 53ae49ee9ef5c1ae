//! Run-level diagnostics: peeling drift and concentration on long learner
//! runs against the exact solution.

use nashlab::game::fixtures;
use nashlab::harness::{
    check_concentration_episodic, peeling_histogram, ConcentrationCount, CONCENTRATION_TOL,
};
use nashlab::solve::solve_episodic;
use nashlab::tabular::{run_nashq_episodic, EpisodeHook, EpisodeRecord, EpisodicLearnerState};

struct Collector {
    envelope_samples: Vec<f64>,
    concentration: ConcentrationCount,
    solution: nashlab::NashSolution,
}

impl EpisodeHook for Collector {
    fn after_episode(&mut self, _: u64, state: &EpisodicLearnerState, episode: &EpisodeRecord) {
        self.envelope_samples
            .extend(episode.steps.iter().map(|s| s.envelope_gap));
        let count = check_concentration_episodic(state, &self.solution, CONCENTRATION_TOL);
        self.concentration.checks += count.checks;
        self.concentration.violations += count.violations;
    }
}

/// A long optimistic run on the one-state fixture: upper-lower envelope gaps
/// drift down through the dyadic intervals, so the high tail empties out
/// while the low intervals keep filling; and the envelope ordering around Q*
/// holds throughout.
#[test]
fn peeling_drift_and_concentration_on_long_g_one_run() {
    let spec = fixtures::g_one();
    let solution = solve_episodic(&spec);
    let mut hook = Collector {
        envelope_samples: Vec::new(),
        concentration: ConcentrationCount::default(),
        solution: solution.clone(),
    };
    run_nashq_episodic(&spec, 10_000, 2.0, 7, &mut hook).unwrap();

    let g_min = 0.5; // the fixture's minimum positive gap
    let half = hook.envelope_samples.len() / 2;
    let first = peeling_histogram(hook.envelope_samples[..half].iter().cloned(), g_min, 2.0);
    let second = peeling_histogram(hook.envelope_samples[half..].iter().cloned(), g_min, 2.0);
    // every sample lands in a finite interval
    assert_eq!(
        first.total_above() + first.clipped + second.total_above() + second.clipped,
        hook.envelope_samples.len() as u64
    );
    // the tail (intervals 5 and above, gaps >= 8) stalls completely
    let tail = |h: &nashlab::harness::PeelingHistogram| -> u64 {
        h.counts.iter().skip(4).sum()
    };
    assert!(tail(&first) > 0, "early exploration reaches the high intervals");
    assert_eq!(tail(&second), 0, "high intervals must empty out late in the run");
    // mass concentrates toward the bottom interval as bonuses decay
    assert!(second.counts[0] > first.counts[0]);

    // measured concentration: the envelope ordering held on every check here
    assert_eq!(hook.concentration.violations, 0);
    assert!(hook.concentration.checks > 0);
}
