//! Growth-shape diagnostics: is the cumulative regret curve logarithmic or
//! linear? Both models are least-squares fit over the back half of the series
//! and compared by coefficient of determination.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    /// `regret(k) ~ intercept + slope * ln k`.
    pub intercept: f64,
    pub slope: f64,
    pub r2_log: f64,
    pub r2_linear: f64,
}

fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
        syy += (y - y_mean) * (y - y_mean);
    }
    if syy == 0.0 {
        // constant series: perfect fit with zero slope
        return (y_mean, 0.0, 1.0);
    }
    if sxx == 0.0 {
        return (y_mean, 0.0, 0.0);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_res = syy - slope * sxy;
    (intercept, slope, 1.0 - ss_res / syy)
}

/// Fit `regret ~ a + b ln k` and `regret ~ a' + b' k` over the back half of
/// `(k, cumulative regret)` points. Returns `None` for series shorter than 10.
pub fn fit_log_curve(series: &[(f64, f64)]) -> Option<LogFit> {
    if series.len() < 10 {
        return None;
    }
    let back = &series[series.len() / 2..];
    let log_x: Vec<f64> = back.iter().map(|&(k, _)| k.ln()).collect();
    let lin_x: Vec<f64> = back.iter().map(|&(k, _)| k).collect();
    let ys: Vec<f64> = back.iter().map(|&(_, y)| y).collect();
    let (intercept, slope, r2_log) = ols(&log_x, &ys);
    let (_, _, r2_linear) = ols(&lin_x, &ys);
    Some(LogFit {
        intercept,
        slope,
        r2_log,
        r2_linear,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_log_growth() {
        let series: Vec<(f64, f64)> =
            (1..=1000).map(|k| (k as f64, 3.0 + 2.0 * (k as f64).ln())).collect();
        let fit = fit_log_curve(&series).unwrap();
        assert!((fit.slope - 2.0).abs() <= 1e-6, "slope {}", fit.slope);
        assert!(fit.r2_log > 1.0 - 1e-9);
        assert!(fit.r2_log > fit.r2_linear);
    }

    #[test]
    fn linear_growth_prefers_the_linear_model() {
        let series: Vec<(f64, f64)> = (1..=1000).map(|k| (k as f64, k as f64)).collect();
        let fit = fit_log_curve(&series).unwrap();
        assert!(fit.r2_linear > 1.0 - 1e-9);
        assert!(fit.r2_linear > fit.r2_log);
    }

    #[test]
    fn constant_series_degenerates_to_perfect_zero_slope() {
        let series: Vec<(f64, f64)> = (1..=100).map(|k| (k as f64, 5.0)).collect();
        let fit = fit_log_curve(&series).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.r2_log, 1.0);
        assert_eq!(fit.r2_linear, 1.0);
    }

    #[test]
    fn short_series_rejected() {
        let series: Vec<(f64, f64)> = (1..=9).map(|k| (k as f64, k as f64)).collect();
        assert!(fit_log_curve(&series).is_none());
    }
}
