//! Gap clipping and the dyadic peeling histogram.

/// `clip[x | g] = x` if `x >= g`, else 0.
pub fn clip(x: f64, g: f64) -> f64 {
    debug_assert!(g > 0.0);
    if x >= g {
        x
    } else {
        0.0
    }
}

/// Counts per dyadic interval `[2^(n-1) g_min, 2^n g_min)`, n = 1, 2, ...
#[derive(Debug, Clone, PartialEq)]
pub struct PeelingHistogram {
    pub g_min: f64,
    /// Samples below `g_min` (the clipped mass).
    pub clipped: u64,
    /// `counts[n-1]` is the n-th interval; sized to cover
    /// `ceil(log2(range_max / g_min))` intervals, growing if samples exceed
    /// the nominal range.
    pub counts: Vec<u64>,
}

impl PeelingHistogram {
    pub fn total_above(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Merge another histogram over the same `g_min` grid.
    pub fn merge(&mut self, other: &PeelingHistogram) {
        debug_assert_eq!(self.g_min, other.g_min);
        if other.counts.len() > self.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (i, &c) in other.counts.iter().enumerate() {
            self.counts[i] += c;
        }
        self.clipped += other.clipped;
    }
}

pub fn peeling_histogram<I>(samples: I, g_min: f64, range_max: f64) -> PeelingHistogram
where
    I: IntoIterator<Item = f64>,
{
    assert!(g_min > 0.0, "peeling needs a positive minimum gap");
    let nominal = if range_max > g_min {
        (range_max / g_min).log2().ceil() as usize
    } else {
        0
    };
    let mut hist = PeelingHistogram {
        g_min,
        clipped: 0,
        counts: vec![0; nominal],
    };
    for x in samples {
        if x < g_min {
            hist.clipped += 1;
            continue;
        }
        let n = (x / g_min).log2().floor() as usize + 1;
        if n > hist.counts.len() {
            hist.counts.resize(n, 0);
        }
        hist.counts[n - 1] += 1;
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_examples() {
        assert_eq!(clip(0.3, 0.5), 0.0);
        assert_eq!(clip(0.5, 0.5), 0.5);
        assert_eq!(clip(4.0, 0.5), 4.0); // 2H = 4 survives any g <= 2H
    }

    #[test]
    fn interval_assignment() {
        let hist = peeling_histogram([0.6, 1.3, 0.1], 0.5, 2.0);
        assert_eq!(hist.clipped, 1);
        assert_eq!(hist.counts, vec![1, 1]); // 0.6 in [0.5,1), 1.3 in [1,2)
        assert_eq!(hist.total_above(), 2);
    }

    #[test]
    fn empty_samples_all_zero() {
        let hist = peeling_histogram([], 0.5, 2.0);
        assert_eq!(hist.clipped, 0);
        assert_eq!(hist.counts, vec![0, 0]);
    }

    #[test]
    fn samples_beyond_nominal_range_extend_the_tail() {
        let hist = peeling_histogram([10.0], 0.5, 2.0);
        // 10/0.5 = 20, floor(log2 20) = 4, so interval 5
        assert_eq!(hist.counts.len(), 5);
        assert_eq!(hist.counts[4], 1);
        assert_eq!(hist.total_above(), 1);
    }

    #[test]
    fn boundaries_belong_to_the_upper_interval() {
        let hist = peeling_histogram([0.5, 1.0, 2.0], 0.5, 4.0);
        assert_eq!(hist.counts, vec![1, 1, 1]);
    }
}
