//! Self-contained SVG plots: `ρ` black, `ρu` red, `ρb` green, `ρv` blue.

use std::fmt::Write as _;

use crate::kernel::VelocityFields;
use crate::scenarios::Snapshot;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const MAX_CELLS: usize = 64;
const ARROWS_PER_AXIS: usize = 16;

/// One curve of a 1D plot in data coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub name: &'static str,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

/// The four curves of a 1D snapshot.
pub fn plot_series(fields: &VelocityFields) -> Vec<PlotSeries> {
    let x = fields.grid.axis(0).coords();
    let series = |name, color, values: &[f64]| PlotSeries {
        name,
        color,
        points: x.iter().copied().zip(values.iter().copied()).collect(),
    };
    vec![
        series("rho", "black", &fields.rho),
        series("flux_u", "red", &fields.flux_u[0]),
        series("flux_b", "green", &fields.flux_b[0]),
        series("flux_v", "blue", &fields.flux_v[0]),
    ]
}

/// Current-flux arrow anchored at `(x, y)` with direction `(dx, dy)`, both in
/// data coordinates; the length is one decimation cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrow {
    pub x: f64,
    pub y: f64,
    pub dx: f64,
    pub dy: f64,
}

/// Arrows of `ρv` on a decimated lattice, skipping masked nodes and those
/// with `ρ < 10⁻³ max ρ` or a vanishing flux.
pub fn arrows(fields: &VelocityFields) -> Vec<Arrow> {
    let grid = &fields.grid;
    if grid.dim() != 2 {
        return Vec::new();
    }
    let (nx, ny) = (grid.axis(0).points, grid.axis(1).points);
    let (sx, sy) = (nx.div_ceil(ARROWS_PER_AXIS).max(1), ny.div_ceil(ARROWS_PER_AXIS).max(1));
    let len = (grid.spacing(0) * sx as f64).min(grid.spacing(1) * sy as f64) * 0.8;
    let floor = 1e-3 * fields.rho.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    for i in (sx / 2..nx).step_by(sx) {
        for j in (sy / 2..ny).step_by(sy) {
            let k = grid.flat(i, j);
            let (jx, jy) = (fields.flux_v[0][k], fields.flux_v[1][k]);
            let norm = jx.hypot(jy);
            if fields.masked[k] || fields.rho[k] < floor || !(norm > 0.0) {
                continue;
            }
            let [x, y] = grid.point(k);
            out.push(Arrow {
                x,
                y,
                dx: len * jx / norm,
                dy: len * jy / norm,
            });
        }
    }
    out
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="30" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, f: &Frame) {
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="gray"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let label = |out: &mut String, x: f64, y: f64, anchor: &str, v: f64| {
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{y:.1}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{v:.3}</text>"#
        );
    };
    label(out, MARGIN, HEIGHT - MARGIN + 16.0, "start", f.x0);
    label(out, WIDTH - MARGIN, HEIGHT - MARGIN + 16.0, "end", f.x1);
    label(out, MARGIN - 4.0, HEIGHT - MARGIN, "end", f.y0);
    label(out, MARGIN - 4.0, MARGIN + 4.0, "end", f.y1);
}

fn warning(out: &mut String, text: &str) {
    let _ = writeln!(
        out,
        r#"<text class="warning" x="{}" y="{}" font-family="sans-serif" font-size="14" fill="darkorange" text-anchor="middle">warning: {}</text>"#,
        WIDTH / 2.0,
        HEIGHT / 2.0,
        escape(text)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// SVG for one snapshot: curves in 1D, a density heatmap with current-flux
/// arrows in 2D. Data with nothing finite to draw gives empty axes and a
/// warning.
pub fn render_plot(snapshot: &Snapshot, title: &str) -> String {
    let mut out = String::new();
    header(&mut out, title);
    if snapshot.fields.dim() == 1 {
        render_1d(&mut out, &snapshot.fields);
    } else {
        render_2d(&mut out, &snapshot.fields);
    }
    out.push_str("</svg>\n");
    out
}

fn render_1d(out: &mut String, fields: &VelocityFields) {
    let series = plot_series(fields);
    let axis = fields.grid.axis(0);
    let finite = series.iter().flat_map(|s| s.points.iter().map(|p| p.1)).filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let degenerate = !(hi > lo);
    let (y0, y1) = if degenerate { (0.0, 1.0) } else { (lo.min(0.0), hi.max(0.0)) };
    let frame = Frame {
        x0: axis.min,
        x1: axis.max,
        y0,
        y1,
    };
    axes(out, &frame);
    if degenerate {
        warning(out, "degenerate data, nothing to plot");
        return;
    }
    let _ = writeln!(
        out,
        r#"<line x1="{MARGIN}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="lightgray"/>"#,
        frame.py(0.0),
        WIDTH - MARGIN
    );
    for s in &series {
        let mut pts = String::new();
        for (x, y) in s.points.iter().filter(|p| p.1.is_finite()) {
            let _ = write!(pts, "{:.2},{:.2} ", frame.px(*x), frame.py(*y));
        }
        let _ = writeln!(
            out,
            r#"<polyline class="{}" fill="none" stroke="{}" stroke-width="1.2" points="{}"/>"#,
            s.name,
            s.color,
            pts.trim_end()
        );
    }
}

fn render_2d(out: &mut String, fields: &VelocityFields) {
    let grid = &fields.grid;
    let (ax, ay) = (grid.axis(0), grid.axis(1));
    let frame = Frame {
        x0: ax.min,
        x1: ax.max,
        y0: ay.min,
        y1: ay.max,
    };
    axes(out, &frame);
    let max = fields.rho.iter().cloned().filter(|v| v.is_finite()).fold(0.0, f64::max);
    if !(max > 0.0) {
        warning(out, "degenerate data, nothing to plot");
        return;
    }
    let (nx, ny) = (ax.points, ay.points);
    let (sx, sy) = (nx.div_ceil(MAX_CELLS), ny.div_ceil(MAX_CELLS));
    let (cw, ch) = (
        (WIDTH - 2.0 * MARGIN) / nx.div_ceil(sx) as f64,
        (HEIGHT - 2.0 * MARGIN) / ny.div_ceil(sy) as f64,
    );
    for (bi, i0) in (0..nx).step_by(sx).enumerate() {
        for (bj, j0) in (0..ny).step_by(sy).enumerate() {
            let (mut sum, mut count) = (0.0, 0usize);
            for i in i0..(i0 + sx).min(nx) {
                for j in j0..(j0 + sy).min(ny) {
                    sum += fields.rho[grid.flat(i, j)];
                    count += 1;
                }
            }
            let level = (255.0 * (1.0 - sum / count as f64 / max)).round().clamp(0.0, 255.0) as u8;
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({level},{level},{level})"/>"#,
                MARGIN + bi as f64 * cw,
                HEIGHT - MARGIN - (bj + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    for a in arrows(fields) {
        let (x1, y1) = (frame.px(a.x), frame.py(a.y));
        let (x2, y2) = (frame.px(a.x + a.dx), frame.py(a.y + a.dy));
        let _ = writeln!(
            out,
            r#"<line class="arrow" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="blue" stroke-width="1.2"/>"#
        );
        let (ux, uy) = (x2 - x1, y2 - y1);
        let l = ux.hypot(uy).max(1e-9);
        let (hx, hy) = (ux / l * 5.0, uy / l * 5.0);
        let _ = writeln!(
            out,
            r#"<polygon points="{x2:.2},{y2:.2} {:.2},{:.2} {:.2},{:.2}" fill="blue"/>"#,
            x2 - hx - 0.5 * hy,
            y2 - hy + 0.5 * hx,
            x2 - hx + 0.5 * hy,
            y2 - hy - 0.5 * hx
        );
    }
}
