//! CSV emission: fixed column schema, LF line endings, 17-significant-digit
//! decimals so every float round-trips bit-exactly.

use std::fmt::Write as _;

use super::{EvalPoint, RunRecord};
use crate::error::HarnessError;

pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

pub const RUN_CSV_HEADER: &str = "k,inst_regret,cum_regret,conc_violations,duality_gap";

pub fn run_record_to_csv(record: &RunRecord) -> String {
    let mut out = String::new();
    out.push_str(RUN_CSV_HEADER);
    out.push('\n');
    for p in &record.points {
        let duality = p.duality_gap.map(format_sig17).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            p.index,
            format_sig17(p.inst_regret),
            format_sig17(p.cum_regret),
            p.conc_violations,
            duality
        );
    }
    out
}

pub const AGGREGATE_CSV_HEADER: &str =
    "k,inst_regret_mean,inst_regret_std,cum_regret_mean,cum_regret_std,conc_violations_mean,duality_gap_mean";

/// Mean and population standard deviation across seeds, row by row. All
/// records must share the same evaluation grid.
pub fn aggregate_to_csv(records: &[RunRecord]) -> Result<String, HarnessError> {
    let first = records
        .first()
        .ok_or_else(|| HarnessError::Config("aggregate of zero run records".into()))?;
    for r in records {
        if r.points.len() != first.points.len()
            || r.points
                .iter()
                .zip(&first.points)
                .any(|(a, b)| a.index != b.index)
        {
            return Err(HarnessError::Config(
                "seed runs disagree on the evaluation grid".into(),
            ));
        }
    }
    let n = records.len() as f64;
    let mut out = String::new();
    out.push_str(AGGREGATE_CSV_HEADER);
    out.push('\n');
    for row in 0..first.points.len() {
        let column = |f: &dyn Fn(&EvalPoint) -> f64| -> (f64, f64) {
            let mean = records.iter().map(|r| f(&r.points[row])).sum::<f64>() / n;
            let var = records
                .iter()
                .map(|r| {
                    let d = f(&r.points[row]) - mean;
                    d * d
                })
                .sum::<f64>()
                / n;
            (mean, var.max(0.0).sqrt())
        };
        let (inst_mean, inst_std) = column(&|p| p.inst_regret);
        let (cum_mean, cum_std) = column(&|p| p.cum_regret);
        let conc_mean = records
            .iter()
            .map(|r| r.points[row].conc_violations as f64)
            .sum::<f64>()
            / n;
        let sampled: Vec<f64> = records
            .iter()
            .filter_map(|r| r.points[row].duality_gap)
            .collect();
        let duality = if sampled.is_empty() {
            String::new()
        } else {
            format_sig17(sampled.iter().sum::<f64>() / sampled.len() as f64)
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            first.points[row].index,
            format_sig17(inst_mean),
            format_sig17(inst_std),
            format_sig17(cum_mean),
            format_sig17(cum_std),
            format_sig17(conc_mean),
            duality
        );
    }
    Ok(out)
}

/// Parse `(k, cum_regret)` pairs back out of an emitted CSV (per-seed or
/// aggregate; the cumulative column is found by header name).
pub fn parse_regret_csv(text: &str) -> Result<Vec<(f64, f64)>, HarnessError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| HarnessError::Config("empty CSV".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    let k_col = columns
        .iter()
        .position(|&c| c == "k")
        .ok_or_else(|| HarnessError::Config("CSV header lacks a `k` column".into()))?;
    let cum_col = columns
        .iter()
        .position(|&c| c == "cum_regret" || c == "cum_regret_mean")
        .ok_or_else(|| HarnessError::Config("CSV header lacks a cumulative regret column".into()))?;
    let mut series = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let need = k_col.max(cum_col);
        if fields.len() <= need {
            return Err(HarnessError::Config(format!("CSV row {} is too short", i + 2)));
        }
        let parse = |s: &str, what: &str| -> Result<f64, HarnessError> {
            s.parse::<f64>()
                .map_err(|_| HarnessError::Config(format!("bad {what} value `{s}` in CSV row {}", i + 2)))
        };
        series.push((parse(fields[k_col], "k")?, parse(fields[cum_col], "cum_regret")?));
    }
    Ok(series)
}
