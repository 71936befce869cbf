//! Self-contained SVG rendering of a fit report: a delta-AIC histogram over
//! repeats plus one observed-vs-model density overlay per target kind. Plain
//! shapes only; no scripts, fonts, or external references, so the file opens
//! anywhere and identical reports render to identical bytes.

use std::fmt::Write as _;

use crate::report::{histogram, FitReport, Overlay};

const WIDTH: f64 = 720.0;
const PANEL_H: f64 = 240.0;
const MARGIN_L: f64 = 56.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_TOP: f64 = 34.0;
const MARGIN_BOT: f64 = 30.0;

fn fnum(v: f64) -> String {
    crate::trials_csv::format_number(v)
}

struct Panel<'a> {
    out: &'a mut String,
    y_off: f64,
    x_lo: f64,
    x_hi: f64,
    y_hi: f64,
}

impl<'a> Panel<'a> {
    fn new(out: &'a mut String, index: usize, x_lo: f64, x_hi: f64, y_hi: f64) -> Self {
        Panel {
            out,
            y_off: index as f64 * PANEL_H,
            x_lo,
            x_hi,
            y_hi: if y_hi > 0.0 { y_hi } else { 1.0 },
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        self.y_off + MARGIN_TOP + (1.0 - y / self.y_hi) * (PANEL_H - MARGIN_TOP - MARGIN_BOT)
    }

    fn title(&mut self, text: &str) {
        let _ = writeln!(
            self.out,
            r##"<text x="{}" y="{}" font-family="sans-serif" font-size="13" fill="#222">{}</text>"##,
            MARGIN_L,
            self.y_off + 20.0,
            text
        );
    }

    fn axes(&mut self) {
        let base = self.py(0.0);
        let _ = writeln!(
            self.out,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#444" stroke-width="1"/>"##,
            self.px(self.x_lo),
            base,
            self.px(self.x_hi),
            base
        );
        for (x, anchor) in [(self.x_lo, "start"), (self.x_hi, "end")] {
            let _ = writeln!(
                self.out,
                r##"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="#444" text-anchor="{}">{}</text>"##,
                self.px(x),
                base + 14.0,
                anchor,
                fnum(x)
            );
        }
        let _ = writeln!(
            self.out,
            r##"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="#444">{}</text>"##,
            MARGIN_L - 50.0,
            self.py(self.y_hi) + 4.0,
            fnum(self.y_hi)
        );
    }

    fn bars(&mut self, edges: &[f64], heights: &[f64], fill: &str, opacity: f64) {
        let base = self.py(0.0);
        for (i, &h) in heights.iter().enumerate() {
            if h <= 0.0 {
                continue;
            }
            let x = self.px(edges[i]);
            let w = self.px(edges[i + 1]) - x;
            let y = self.py(h);
            let _ = writeln!(
                self.out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{:.2}" fill="{fill}" fill-opacity="{opacity}"/>"#,
                base - y
            );
        }
    }

    fn curve(&mut self, xs: &[f64], ys: &[f64], stroke: &str) {
        let mut d = String::new();
        for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
            let _ = write!(
                d,
                "{}{:.2},{:.2}",
                if i == 0 { "M" } else { " L" },
                self.px(x),
                self.py(y)
            );
        }
        let _ = writeln!(
            self.out,
            r#"<path d="{d}" fill="none" stroke="{stroke}" stroke-width="1.6"/>"#
        );
    }

    fn vline(&mut self, x: f64, stroke: &str) {
        if x < self.x_lo || x > self.x_hi {
            return;
        }
        let _ = writeln!(
            self.out,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="{stroke}" stroke-width="1" stroke-dasharray="4 3"/>"#,
            self.px(x),
            self.py(self.y_hi),
            self.py(0.0)
        );
    }
}

fn delta_panel(out: &mut String, report: &FitReport) {
    let deltas: Vec<f64> = report.result.per_repeat.iter().map(|r| r.delta_aic).collect();
    let bins = ((deltas.len() as f64).sqrt().ceil() as usize).clamp(5, 15);
    let (edges, density) = histogram(&deltas, bins);
    let y_hi = density.iter().cloned().fold(0.0, f64::max);
    let mut p = Panel::new(out, 0, edges[0].min(0.0), edges[bins].max(0.0), y_hi * 1.08);
    p.title(&format!(
        "Delta AIC across {} repeats (mean {}, positive {}/{})",
        report.result.repeats,
        fnum(report.result.mean_delta_aic),
        report.result.n_positive_delta,
        report.result.repeats
    ));
    p.bars(&edges, &density, "#4878a8", 0.9);
    p.vline(0.0, "#b03030");
    p.axes();
}

fn overlay_panel(out: &mut String, index: usize, ov: &Overlay) {
    let obs_peak = ov.observed_density.iter().cloned().fold(0.0, f64::max);
    let model_peak = ov.model_density.iter().cloned().fold(0.0, f64::max);
    let mut p = Panel::new(
        out,
        index,
        ov.model_x[0],
        ov.model_x[ov.model_x.len() - 1],
        obs_peak.max(model_peak) * 1.08,
    );
    p.title(&format!(
        "{} target: observed estimates vs model density at w = {}",
        ov.target_kind,
        fnum(ov.w_used)
    ));
    p.bars(&ov.observed_edges, &ov.observed_density, "#4878a8", 0.45);
    p.curve(&ov.model_x, &ov.model_density, "#b03030");
    p.axes();
}

pub fn render_report_svg(report: &FitReport) -> String {
    let panels = 1 + report.overlays.len();
    let height = panels as f64 * PANEL_H;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{height}" fill="white"/>"#);
    delta_panel(&mut out, report);
    for (i, ov) in report.overlays.iter().enumerate() {
        overlay_panel(&mut out, 1 + i, ov);
    }
    out.push_str("</svg>\n");
    out
}
