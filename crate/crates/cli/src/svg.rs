//! Self-contained SVG rendering. Coordinates are written with two decimals so
//! identical inputs give byte-identical files.

use std::collections::BTreeSet;
use std::fmt::Write;

use sirf_core::equilibria::Stability;
use sirf_core::{AnalysisReport, Model64};

use crate::io::{BasinRow, PhaseRun};
use crate::CliResult;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 52.0;
const SAMPLES: usize = 800;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];
const UNRESOLVED: &str = "#d9d9d9";

/// Linear map from data to the plot area.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn nice_step(range: f64, target: f64) -> f64 {
    let raw = range / target;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    format!("{v:.decimals$}")
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<defs><clipPath id="plot-area"><rect x="{LEFT}" y="{TOP}" width="{}" height="{}"/></clipPath></defs>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );
}

fn axes(out: &mut String, fr: &Frame, xlabel: &str, ylabel: &str) {
    let (bx, by) = (fr.px(fr.x0), fr.py(fr.y0));
    let _ = writeln!(
        out,
        r#"<g class="axes" stroke="black" fill="none"><line x1="{bx:.2}" y1="{by:.2}" x2="{:.2}" y2="{by:.2}"/><line x1="{bx:.2}" y1="{by:.2}" x2="{bx:.2}" y2="{:.2}"/></g>"#,
        fr.px(fr.x1),
        fr.py(fr.y1)
    );
    for (lo, hi, horizontal) in [(fr.x0, fr.x1, true), (fr.y0, fr.y1, false)] {
        let step = nice_step(hi - lo, 5.0);
        let mut v = (lo / step).ceil() * step;
        while v <= hi + 1e-9 * step {
            let label = fmt_tick(v, step);
            if horizontal {
                let x = fr.px(v);
                let _ = writeln!(
                    out,
                    r#"<line x1="{x:.2}" y1="{by:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
                    by + 5.0,
                    by + 18.0
                );
            } else {
                let y = fr.py(v);
                let _ = writeln!(
                    out,
                    r#"<line x1="{bx:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
                    bx - 5.0,
                    bx - 8.0,
                    y + 4.0
                );
            }
            v += step;
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{xlabel}</text>"#,
        (fr.px(fr.x0) + fr.px(fr.x1)) / 2.0,
        HEIGHT - 12.0
    );
    let cy = (fr.py(fr.y0) + fr.py(fr.y1)) / 2.0;
    let _ = writeln!(
        out,
        r#"<text x="16" y="{cy:.2}" text-anchor="middle" transform="rotate(-90 16 {cy:.2})">{ylabel}</text>"#
    );
}

fn polyline(out: &mut String, fr: &Frame, pts: &[(f64, f64)], attrs: &str) {
    if pts.len() < 2 {
        return;
    }
    let mut d = String::new();
    for (j, (x, y)) in pts.iter().enumerate() {
        let _ = write!(
            d,
            "{}{:.2},{:.2}",
            if j == 0 { "M" } else { " L" },
            fr.px(*x),
            fr.py(*y)
        );
    }
    let _ = writeln!(
        out,
        r#"<path d="{d}" fill="none" clip-path="url(#plot-area)" {attrs}/>"#
    );
}

/// `f` (dashed) and `g` (solid) on `[0, 1]`, endemic equilibria marked with
/// circles (stable), diamonds (saddle) or squares (degenerate).
pub fn rate_overlay(m: &Model64, report: &AnalysisReport) -> CliResult<String> {
    let pole = m.pole();
    let mut f_pts = Vec::with_capacity(SAMPLES + 1);
    for j in 0..=SAMPLES {
        let r = j as f64 / SAMPLES as f64;
        f_pts.push((r, m.f(r)?.value));
    }
    let f_max = f_pts.iter().map(|p| p.1).fold(f64::MIN, f64::max);
    let f_min = f_pts.iter().map(|p| p.1).fold(f64::MAX, f64::min);
    let y1 = (f_max.max(m.k()) * 1.15).max(1.0);
    let y0 = f_min.min(0.0);

    // g until it leaves the frame; the clip path trims the last segment
    let mut g_pts = Vec::new();
    for j in 0..=SAMPLES {
        let r = pole * j as f64 / SAMPLES as f64;
        if r >= pole {
            break;
        }
        let g = m.g(r)?;
        g_pts.push((r, g.min(y1 * 2.0)));
        if g > y1 {
            break;
        }
    }

    let fr = Frame {
        x0: 0.0,
        x1: 1.0,
        y0,
        y1,
    };
    let mut out = String::new();
    open(&mut out, "f and g");
    axes(&mut out, &fr, "R", "rate");
    polyline(
        &mut out,
        &fr,
        &g_pts,
        r##"class="g" stroke="#000000" stroke-width="1.5""##,
    );
    polyline(
        &mut out,
        &fr,
        &f_pts,
        r##"class="f" stroke="#1f77b4" stroke-width="1.5" stroke-dasharray="6 4""##,
    );
    for e in &report.endemic {
        let (x, y) = (fr.px(e.r), fr.py(e.diagnostics.f));
        let _ = match e.stability {
            Stability::Stable => writeln!(
                out,
                r#"<circle class="marker stable" data-id="{}" cx="{x:.2}" cy="{y:.2}" r="4.5" fill="white" stroke="black"/>"#,
                e.id
            ),
            Stability::Saddle => writeln!(
                out,
                r#"<polygon class="marker saddle" data-id="{}" points="{x:.2},{:.2} {:.2},{y:.2} {x:.2},{:.2} {:.2},{y:.2}" fill="black"/>"#,
                e.id,
                y - 5.5,
                x + 5.5,
                y + 5.5,
                x - 5.5
            ),
            _ => writeln!(
                out,
                r#"<rect class="marker degenerate" data-id="{}" x="{:.2}" y="{:.2}" width="8" height="8" fill="gray"/>"#,
                e.id,
                x - 4.0,
                y - 4.0
            ),
        };
    }
    let lx = WIDTH - RIGHT - 150.0;
    let _ = writeln!(
        out,
        r##"<g class="legend"><line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="#1f77b4" stroke-dasharray="6 4"/><text x="{}" y="{}">f(R)</text><line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="black"/><text x="{}" y="{}">g(R)</text></g>"##,
        TOP + 12.0,
        lx + 30.0,
        TOP + 12.0,
        lx + 36.0,
        TOP + 16.0,
        TOP + 30.0,
        lx + 30.0,
        TOP + 30.0,
        lx + 36.0,
        TOP + 34.0
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// Lattice cells in the `R × I` plane coloured by outcome id.
pub fn basin(rows: &[BasinRow]) -> String {
    let distinct: BTreeSet<u64> = rows.iter().map(|c| c.r0.to_bits()).collect();
    let cell = if distinct.len() > 1 {
        1.0 / (distinct.len() - 1) as f64
    } else {
        1.0
    };
    let fr = Frame {
        x0: -cell / 2.0,
        x1: 1.0 + cell / 2.0,
        y0: -cell / 2.0,
        y1: 1.0 + cell / 2.0,
    };
    let mut out = String::new();
    open(&mut out, "basins of attraction");
    let w = fr.px(cell) - fr.px(0.0);
    let h = fr.py(0.0) - fr.py(cell);
    for c in rows {
        let color = c.outcome.map_or(UNRESOLVED, |id| PALETTE[id % PALETTE.len()]);
        let id = c.outcome.map_or_else(|| "unresolved".into(), |id| id.to_string());
        let _ = writeln!(
            out,
            r#"<rect class="cell" data-outcome="{id}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
            fr.px(c.r0 - cell / 2.0),
            fr.py(c.i0 + cell / 2.0),
            w,
            h
        );
    }
    axes(&mut out, &fr, "R", "I");
    let ids: BTreeSet<Option<usize>> = rows.iter().map(|c| c.outcome).collect();
    for (j, id) in ids.iter().enumerate() {
        let y = TOP + 14.0 + 16.0 * j as f64;
        let x = WIDTH - RIGHT - 110.0;
        let (color, label) = match id {
            Some(id) => (PALETTE[id % PALETTE.len()], format!("equilibrium {id}")),
            None => (UNRESOLVED, "unresolved".to_string()),
        };
        let _ = writeln!(
            out,
            r#"<rect x="{x}" y="{:.2}" width="10" height="10" fill="{color}"/><text x="{}" y="{y:.2}">{label}</text>"#,
            y - 9.0,
            x + 14.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Trajectories in the `R × I` plane over the triangle `I + R ≤ 1`.
pub fn phase_plane(runs: &[PhaseRun]) -> String {
    let fr = Frame {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };
    let mut out = String::new();
    open(&mut out, "trajectories");
    axes(&mut out, &fr, "R", "I");
    polyline(
        &mut out,
        &fr,
        &[(0.0, 1.0), (1.0, 0.0)],
        r##"class="boundary" stroke="#999999" stroke-dasharray="3 3""##,
    );
    for (j, run) in runs.iter().enumerate() {
        let color = PALETTE[j % PALETTE.len()];
        polyline(
            &mut out,
            &fr,
            &run.points,
            &format!(
                r#"class="trajectory" data-name="{}" stroke="{color}" stroke-width="1.2""#,
                escape(&run.name)
            ),
        );
        if let Some(&(x, y)) = run.points.first() {
            let _ = writeln!(
                out,
                r#"<circle class="start" cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                fr.px(x),
                fr.py(y)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
