//! Minimal hand-written SVG charts: log-log line plots and bar charts.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// One named polyline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    /// Both axes logarithmic; non-positive values are skipped.
    LogLog,
    /// One bar per point of the first series; `x` is the bar index.
    Bars,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plot {
    pub name: String,
    pub title: String,
    pub kind: PlotKind,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Bar labels for [`PlotKind::Bars`].
    #[serde(default)]
    pub categories: Vec<String>,
}

impl Plot {
    pub fn log_log(name: &str, title: &str, x_label: &str, y_label: &str, series: Vec<Series>) -> Self {
        Plot {
            name: name.into(),
            title: title.into(),
            kind: PlotKind::LogLog,
            x_label: x_label.into(),
            y_label: y_label.into(),
            series,
            categories: Vec::new(),
        }
    }

    pub fn bars(name: &str, title: &str, y_label: &str, bars: Vec<(String, f64)>) -> Self {
        let (categories, values): (Vec<String>, Vec<f64>) = bars.into_iter().unzip();
        let points = values.into_iter().enumerate().map(|(i, v)| (i as f64, v)).collect();
        Plot {
            name: name.into(),
            title: title.into(),
            kind: PlotKind::Bars,
            x_label: String::new(),
            y_label: y_label.into(),
            series: vec![Series { label: y_label.into(), points }],
            categories,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(&self.title));
        match self.kind {
            PlotKind::LogLog => self.render_log_log(&mut out),
            PlotKind::Bars => self.render_bars(&mut out),
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        out.push_str("</svg>\n");
        out
    }

    fn render_log_log(&self, out: &mut String) {
        let logs: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| s.points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.log10(), y.log10())).collect())
            .collect();
        let all: Vec<(f64, f64)> = logs.iter().flatten().copied().collect();
        if all.is_empty() {
            return;
        }
        let (x0, x1) = padded_range(all.iter().map(|p| p.0));
        let (y0, y1) = padded_range(all.iter().map(|p| p.1));
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
        axes(out);
        for e in (x0.ceil() as i32)..=(x1.floor() as i32) {
            let x = sx(e as f64);
            let _ = writeln!(out, r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#, HEIGHT - MARGIN, HEIGHT - MARGIN + 5.0);
            let _ = writeln!(out, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">1e{e}</text>"#, HEIGHT - MARGIN + 18.0);
        }
        for e in (y0.ceil() as i32)..=(y1.floor() as i32) {
            let y = sy(e as f64);
            let _ = writeln!(out, r#"<line x1="{:.1}" y1="{y:.1}" x2="{MARGIN}" y2="{y:.1}" stroke="black"/>"#, MARGIN - 5.0);
            let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{e}</text>"#, MARGIN - 8.0, y + 4.0);
        }
        for (i, (s, pts)) in self.series.iter().zip(&logs).enumerate() {
            let color = COLORS[i % COLORS.len()];
            let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y))).collect();
            let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
            for &(x, y) in pts {
                let _ = writeln!(out, r#"<circle cx="{:.1}" cy="{:.1}" r="2.5" fill="{color}"/>"#, sx(x), sy(y));
            }
            legend(out, i, color, &s.label);
        }
    }

    fn render_bars(&self, out: &mut String) {
        let values: Vec<f64> = self.series.first().map(|s| s.points.iter().map(|p| p.1).collect()).unwrap_or_default();
        if values.is_empty() {
            return;
        }
        let top = values.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE) * 1.1;
        axes(out);
        let slot = (WIDTH - 2.0 * MARGIN) / values.len() as f64;
        for (i, v) in values.iter().enumerate() {
            let h = v.max(0.0) / top * (HEIGHT - 2.0 * MARGIN);
            let x = MARGIN + i as f64 * slot + slot * 0.15;
            let _ = writeln!(
                out,
                r#"<rect x="{x:.1}" y="{:.1}" width="{:.1}" height="{h:.1}" fill="{}"/>"#,
                HEIGHT - MARGIN - h,
                slot * 0.7,
                COLORS[i % COLORS.len()]
            );
            let label = self.categories.get(i).map(String::as_str).unwrap_or("");
            let cx = x + slot * 0.35;
            let _ = writeln!(out, r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, HEIGHT - MARGIN + 16.0, escape(label));
            let _ = writeln!(out, r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, HEIGHT - MARGIN - h - 4.0, format_value(*v));
        }
    }
}

fn axes(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="black" points="{MARGIN},{MARGIN} {MARGIN},{b} {r},{b}"/>"#,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
}

fn legend(out: &mut String, i: usize, color: &str, label: &str) {
    let y = MARGIN + 6.0 + 16.0 * i as f64;
    let x = WIDTH - MARGIN - 150.0;
    let _ = writeln!(out, r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/>"#, x + 18.0);
    let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, x + 24.0, y + 4.0, escape(label));
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let pad = ((hi - lo) * 0.05).max(0.1);
    (lo - pad, hi + pad)
}

fn format_value(v: f64) -> String {
    if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_both_kinds() {
        let p = Plot::log_log(
            "err",
            "error <h>",
            "h",
            "error",
            vec![Series { label: "word".into(), points: vec![(1e-3, 1e-9), (1e-2, 1e-6), (0.0, 1.0)] }],
        );
        let svg = p.render();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("&lt;h&gt;"));
        assert_eq!(svg.matches("<circle").count(), 2);

        let b = Plot::bars("ratio", "ratios", "N(AAA)/N(A)", vec![("ap".into(), 3.0), ("su2".into(), 400.0)]);
        let svg = b.render();
        assert_eq!(svg.matches("<rect").count(), 3);
        assert!(svg.contains(">su2<"));
    }
}
