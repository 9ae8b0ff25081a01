//! A minimal, dependency-free SVG line-chart writer.
//!
//! Charts are a viewing convenience for the CSV curves emitted by training
//! runs — the CSV stays the machine-readable contract. The writer is fully
//! deterministic: coordinates are formatted with fixed precision and series
//! are drawn in insertion order, so identical inputs produce byte-identical
//! SVG.

use std::fmt::Write as _;
use std::io::Write;

/// One named curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// `(x, y)` points; non-finite points are skipped at render time.
    pub points: Vec<(f64, f64)>,
}

/// A line chart over one or more series sharing both axes.
#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// Fixed drawing geometry (pixels).
const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 48.0;
const TICKS: usize = 5;

/// Stroke palette, cycled by series index.
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

impl LineChart {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> LineChart {
        LineChart {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
        }
    }

    /// Add a named curve; returns `self` for chaining.
    pub fn with_series(
        mut self,
        label: impl Into<String>,
        points: impl IntoIterator<Item = (f64, f64)>,
    ) -> LineChart {
        self.series.push(Series {
            label: label.into(),
            points: points.into_iter().collect(),
        });
        self
    }

    /// Convenience: a single curve over `0..n` step indices.
    pub fn of_values(
        title: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
        label: impl Into<String>,
        values: &[f64],
    ) -> LineChart {
        LineChart::new(title, x_label, y_label).with_series(
            label,
            values.iter().enumerate().map(|(i, &v)| (i as f64, v)),
        )
    }

    /// Render the chart as a standalone SVG document.
    pub fn write_svg(&self, out: &mut dyn Write) -> std::io::Result<()> {
        out.write_all(self.to_svg().as_bytes())
    }

    /// Render the chart as an SVG string.
    pub fn to_svg(&self) -> String {
        let (x_min, x_max, y_min, y_max) = self.bounds();
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
        let sy = |y: f64| MARGIN_TOP + plot_h - (y - y_min) / (y_max - y_min) * plot_h;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="22" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );

        // Axes frame.
        let _ = writeln!(
            s,
            r##"<rect x="{MARGIN_LEFT:.1}" y="{MARGIN_TOP:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="#333" stroke-width="1"/>"##
        );

        // Ticks, grid lines, and numeric labels.
        for i in 0..=TICKS {
            let f = i as f64 / TICKS as f64;
            let x_val = x_min + f * (x_max - x_min);
            let y_val = y_min + f * (y_max - y_min);
            let x_px = sx(x_val);
            let y_px = sy(y_val);
            if i > 0 && i < TICKS {
                let _ = writeln!(
                    s,
                    r##"<line x1="{x_px:.2}" y1="{MARGIN_TOP:.1}" x2="{x_px:.2}" y2="{:.1}" stroke="#ddd" stroke-width="1"/>"##,
                    MARGIN_TOP + plot_h
                );
                let _ = writeln!(
                    s,
                    r##"<line x1="{MARGIN_LEFT:.1}" y1="{y_px:.2}" x2="{:.1}" y2="{y_px:.2}" stroke="#ddd" stroke-width="1"/>"##,
                    MARGIN_LEFT + plot_w
                );
            }
            let _ = writeln!(
                s,
                r#"<text x="{x_px:.2}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>"#,
                MARGIN_TOP + plot_h + 14.0,
                tick_label(x_val)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 6.0,
                y_px + 3.5,
                tick_label(y_val)
            );
        }

        // Axis titles.
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            HEIGHT - 10.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="14" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
            MARGIN_TOP + plot_h / 2.0,
            MARGIN_TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        // Curves.
        for (idx, series) in self.series.iter().enumerate() {
            let color = PALETTE[idx % PALETTE.len()];
            let mut path = String::new();
            for &(x, y) in &series.points {
                if !(x.is_finite() && y.is_finite()) {
                    continue;
                }
                let _ = write!(path, "{:.2},{:.2} ", sx(x), sy(y));
            }
            if !path.is_empty() {
                path.pop();
                let _ = writeln!(
                    s,
                    r#"<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>"#
                );
            }
        }

        // Legend, top-right inside the frame.
        for (idx, series) in self.series.iter().enumerate() {
            let color = PALETTE[idx % PALETTE.len()];
            let y = MARGIN_TOP + 14.0 + 16.0 * idx as f64;
            let x = WIDTH - MARGIN_RIGHT - 150.0;
            let _ = writeln!(
                s,
                r#"<line x1="{x:.1}" y1="{:.2}" x2="{:.1}" y2="{:.2}" stroke="{color}" stroke-width="1.5"/>"#,
                y - 3.5,
                x + 18.0,
                y - 3.5
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{y:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
                x + 24.0,
                escape(&series.label)
            );
        }

        s.push_str("</svg>\n");
        s
    }

    /// Data bounds across all series, padded so flat or empty data still
    /// yields a non-degenerate scale.
    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut x_min = f64::INFINITY;
        let mut x_max = f64::NEG_INFINITY;
        let mut y_min = f64::INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        for series in &self.series {
            for &(x, y) in &series.points {
                if x.is_finite() && y.is_finite() {
                    x_min = x_min.min(x);
                    x_max = x_max.max(x);
                    y_min = y_min.min(y);
                    y_max = y_max.max(y);
                }
            }
        }
        if !x_min.is_finite() {
            (x_min, x_max, y_min, y_max) = (0.0, 1.0, 0.0, 1.0);
        }
        if x_min == x_max {
            x_min -= 0.5;
            x_max += 0.5;
        }
        if y_min == y_max {
            y_min -= 0.5;
            y_max += 0.5;
        }
        // A little headroom keeps curves off the frame.
        let pad = (y_max - y_min) * 0.05;
        (x_min, x_max, y_min - pad, y_max + pad)
    }
}

/// Fixed-precision tick text: wide ranges drop decimals, narrow ranges keep
/// three, and the formatting never depends on locale.
fn tick_label(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1.0e9 {
        format!("{}", v as i64)
    } else if v.abs() >= 100.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

/// Escape the three characters XML text nodes cannot contain raw.
fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_chart() -> LineChart {
        LineChart::new("loss", "step", "value")
            .with_series("train", [(0.0, 2.0), (1.0, 1.5), (2.0, 1.1)])
            .with_series("eval", [(0.0, 2.2), (1.0, 1.9), (2.0, 1.6)])
    }

    #[test]
    fn output_is_deterministic() {
        assert_eq!(sample_chart().to_svg(), sample_chart().to_svg());
    }

    #[test]
    fn every_series_becomes_a_polyline() {
        let svg = sample_chart().to_svg();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">train</text>"));
        assert!(svg.contains(">eval</text>"));
    }

    #[test]
    fn flat_and_empty_data_render_without_nan() {
        let flat = LineChart::of_values("t", "x", "y", "c", &[1.0, 1.0, 1.0]).to_svg();
        assert!(!flat.contains("NaN"));
        let empty = LineChart::new("t", "x", "y").to_svg();
        assert!(!empty.contains("NaN"));
        assert!(empty.contains("</svg>"));
    }

    #[test]
    fn non_finite_points_are_dropped_not_rendered() {
        let svg = LineChart::new("t", "x", "y")
            .with_series("c", [(0.0, 1.0), (1.0, f64::NAN), (2.0, 3.0)])
            .to_svg();
        assert!(!svg.contains("NaN"));
        // Two finite points survive in the polyline.
        let poly = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(poly.split(' ').count(), 2);
    }

    #[test]
    fn labels_are_escaped() {
        let svg = LineChart::new("a < b & c", "x", "y").to_svg();
        assert!(svg.contains("a &lt; b &amp; c"));
    }

    #[test]
    fn integer_ticks_have_no_decimals() {
        assert_eq!(tick_label(5.0), "5");
        assert_eq!(tick_label(0.25), "0.250");
        assert_eq!(tick_label(123.456), "123.5");
    }
}
