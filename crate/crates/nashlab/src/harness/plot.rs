//! Standalone SVG regret plots.
//!
//! Two panels share one figure: cumulative regret against the episode index
//! on a linear axis (left) and on a logarithmic axis (right). Output is pure
//! text with fixed-precision coordinates, so identical input produces
//! identical bytes; logarithmic growth shows up as a straight line on the
//! right panel.

use std::fmt::Write as _;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 420.0;
const PANEL_W: f64 = 400.0;
const PANEL_H: f64 = 300.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_TOP: f64 = 55.0;
const PANEL_GAP: f64 = 80.0;

struct Panel {
    x0: f64,
    label: &'static str,
    log_x: bool,
}

fn coord(x: f64) -> String {
    format!("{x:.3}")
}

fn panel_svg(out: &mut String, panel: &Panel, series: &[(f64, f64)], y_min: f64, y_max: f64) {
    let xs: Vec<f64> = series
        .iter()
        .map(|&(k, _)| if panel.log_x { k.ln() } else { k })
        .collect();
    let x_min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let y_span = if y_max > y_min { y_max - y_min } else { 1.0 };
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            panel.x0 + (x - x_min) / x_span * PANEL_W,
            MARGIN_TOP + PANEL_H - (y - y_min) / y_span * PANEL_H,
        )
    };
    let _ = writeln!(
        out,
        "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444444\"/>",
        coord(panel.x0),
        coord(MARGIN_TOP),
        coord(PANEL_W),
        coord(PANEL_H)
    );
    let mut points = String::new();
    for (&x, &(_, y)) in xs.iter().zip(series) {
        let (px, py) = to_px(x, y);
        let _ = write!(points, "{},{} ", coord(px), coord(py));
    }
    let _ = writeln!(
        out,
        "  <polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"{}\"/>",
        points.trim_end()
    );
    let _ = writeln!(
        out,
        "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        coord(panel.x0 + PANEL_W / 2.0),
        coord(MARGIN_TOP + PANEL_H + 35.0),
        panel.label
    );
    // axis extremes, enough to read the curve off the figure
    let _ = writeln!(
        out,
        "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\">{}</text>",
        coord(panel.x0),
        coord(MARGIN_TOP + PANEL_H + 16.0),
        format_args!("k={}", series.first().map_or(0.0, |p| p.0))
    );
    let _ = writeln!(
        out,
        "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{}</text>",
        coord(panel.x0 + PANEL_W),
        coord(MARGIN_TOP + PANEL_H + 16.0),
        format_args!("k={}", series.last().map_or(0.0, |p| p.0))
    );
}

/// Render `(k, cumulative regret)` points. Panics on an empty series.
pub fn render_regret_svg(series: &[(f64, f64)]) -> String {
    assert!(!series.is_empty(), "cannot plot an empty series");
    let y_min = series.iter().map(|&(_, y)| y).fold(f64::INFINITY, f64::min);
    let y_max = series.iter().map(|&(_, y)| y).fold(f64::NEG_INFINITY, f64::max);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(out, "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>");
    let _ = writeln!(
        out,
        "  <text x=\"{}\" y=\"28\" font-family=\"monospace\" font-size=\"15\">cumulative regret (min {} / max {})</text>",
        coord(MARGIN_LEFT),
        coord(y_min),
        coord(y_max)
    );
    let left = Panel { x0: MARGIN_LEFT, label: "episode k (linear)", log_x: false };
    let right = Panel {
        x0: MARGIN_LEFT + PANEL_W + PANEL_GAP,
        label: "episode k (log scale)",
        log_x: true,
    };
    panel_svg(&mut out, &left, series, y_min, y_max);
    panel_svg(&mut out, &right, series, y_min, y_max);
    out.push_str("</svg>\n");
    out
}

/// Polyline vertices of each panel, parsed back out of a rendered figure.
/// Test support for geometric checks on emitted plots.
pub fn extract_polylines(svg: &str) -> Vec<Vec<(f64, f64)>> {
    let mut polylines = Vec::new();
    for line in svg.lines() {
        let Some(start) = line.find("points=\"") else {
            continue;
        };
        let rest = &line[start + 8..];
        let Some(end) = rest.find('"') else { continue };
        let vertices = rest[..end]
            .split_whitespace()
            .filter_map(|pair| {
                let (x, y) = pair.split_once(',')?;
                Some((x.parse().ok()?, y.parse().ok()?))
            })
            .collect();
        polylines.push(vertices);
    }
    polylines
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_series_renders_one_polyline_per_panel() {
        let svg = render_regret_svg(&[(1.0, 0.0), (2.0, 1.0)]);
        let polylines = extract_polylines(&svg);
        assert_eq!(polylines.len(), 2);
        assert!(polylines.iter().all(|p| p.len() == 2));
    }

    #[test]
    fn identical_input_identical_bytes() {
        let series: Vec<(f64, f64)> = (1..=50).map(|k| (k as f64, (k as f64).sqrt())).collect();
        assert_eq!(render_regret_svg(&series), render_regret_svg(&series));
    }

    #[test]
    fn log_growth_is_straight_on_the_log_panel() {
        let series: Vec<(f64, f64)> =
            (1..=500).map(|k| (k as f64, 1.0 + 2.0 * (k as f64).ln())).collect();
        let svg = render_regret_svg(&series);
        let polylines = extract_polylines(&svg);
        let log_panel = &polylines[1];
        let (x0, y0) = log_panel[0];
        let (x1, y1) = *log_panel.last().unwrap();
        let y_range = PANEL_H;
        let mut max_dev: f64 = 0.0;
        for &(x, y) in log_panel {
            let chord_y = y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            max_dev = max_dev.max((y - chord_y).abs());
        }
        assert!(
            max_dev < 0.02 * y_range,
            "deviation {max_dev} exceeds 2% of {y_range}"
        );
    }
}
