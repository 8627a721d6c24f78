//! Dependency-free SVG line charts with the plotted data embedded as CSV
//! in a comment. Log axes clamp values below `1e-300` to `1e-300`.

use std::fmt::Write as _;
use std::path::Path;

use super::output::write_atomic;
use crate::bilinear::SweepReport;
use crate::error::{Error, Result};

pub const LOG_FLOOR: f64 = 1e-300;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;

/// What to draw.
#[derive(Debug, Clone, Copy)]
pub enum PlotData<'a> {
    /// Log-log markers of `(N₁, ratio)` with the fitted line.
    Sweep(&'a SweepReport),
    /// Semilog line of a norm history.
    Decay {
        label: &'a str,
        times: &'a [f64],
        values: &'a [f64],
    },
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let v = if log { v.max(LOG_FLOOR).log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Self { lo, hi, log }
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log {
            v.max(LOG_FLOOR).log10()
        } else {
            v
        };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn label(&self, u: f64) -> String {
        let v = self.lo + u * (self.hi - self.lo);
        if self.log {
            format!("1e{v:.2}")
        } else {
            format!("{v:.3}")
        }
    }
}

fn px(x: &Axis, y: &Axis, a: f64, b: f64) -> (f64, f64) {
    (
        MARGIN + x.unit(a) * (WIDTH - 2.0 * MARGIN),
        HEIGHT - MARGIN - y.unit(b) * (HEIGHT - 2.0 * MARGIN),
    )
}

fn frame(svg: &mut String, x: &Axis, y: &Axis, xlabel: &str, ylabel: &str, title: &str) {
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        svg,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="30" text-anchor="middle" font-size="15">{title}</text>"#,
        WIDTH / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{xlabel}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 18 {})">{ylabel}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for u in [0.0, 0.5, 1.0] {
        let xp = l + u * (r - l);
        let yp = b - u * (b - t);
        let _ = writeln!(
            svg,
            r#"<text x="{xp}" y="{}" text-anchor="middle" font-size="11">{}</text>"#,
            b + 16.0,
            x.label(u)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end" font-size="11">{}</text>"#,
            l - 4.0,
            yp + 4.0,
            y.label(u)
        );
    }
}

/// Renders the chart. `stamp` is written into a comment when present.
pub fn render_svg(data: PlotData<'_>, stamp: Option<&str>) -> Result<String> {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    if let Some(s) = stamp {
        let _ = writeln!(svg, "<!-- generated {s} -->");
    }
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    match data {
        PlotData::Sweep(rep) => {
            if rep.n1_values.is_empty() {
                return Err(Error::Insufficient("empty sweep report".into()));
            }
            let x = Axis::fit(rep.n1_values.iter().copied(), true);
            let y = Axis::fit(rep.ratios.iter().copied(), true);
            frame(
                &mut svg,
                &x,
                &y,
                "N1",
                "weighted ratio",
                &format!("alpha={} s={}", rep.alpha, rep.s),
            );
            // Fitted line through the centroid in log space.
            let n = rep.n1_values.len() as f64;
            let mx = rep.n1_values.iter().map(|v| v.ln()).sum::<f64>() / n;
            let my = rep
                .ratios
                .iter()
                .map(|v| v.max(LOG_FLOOR).ln())
                .sum::<f64>()
                / n;
            let line = |v: f64| (my + rep.fitted_slope * (v.ln() - mx)).exp();
            let (a, b) = (rep.n1_values[0], rep.n1_values[rep.n1_values.len() - 1]);
            let (x0, y0) = px(&x, &y, a, line(a));
            let (x1, y1) = px(&x, &y, b, line(b));
            let _ = writeln!(
                svg,
                r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="steelblue" stroke-dasharray="6 4"/>"#
            );
            for (&a, &r) in rep.n1_values.iter().zip(&rep.ratios) {
                let (cx, cy) = px(&x, &y, a, r);
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="4" fill="crimson"/>"#
                );
            }
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-size="13">slope={:.3}±{:.3} (predicted {:.3}, {:?})</text>"#,
                MARGIN + 10.0,
                MARGIN + 20.0,
                rep.fitted_slope,
                rep.slope_stderr,
                rep.predicted_slope,
                rep.verdict
            );
        }
        PlotData::Decay {
            label,
            times,
            values,
        } => {
            if times.is_empty() || times.len() != values.len() {
                return Err(Error::Insufficient("empty or ragged decay series".into()));
            }
            let x = Axis::fit(times.iter().copied(), false);
            let y = Axis::fit(values.iter().copied(), true);
            frame(&mut svg, &x, &y, "t", label, label);
            let mut pts = String::new();
            for (&t, &v) in times.iter().zip(values) {
                let (a, b) = px(&x, &y, t, v);
                let _ = write!(pts, "{a:.2},{b:.2} ");
            }
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="crimson"/>"#,
                pts.trim_end()
            );
        }
    }
    let _ = writeln!(svg, "<!-- data\n{}-->", data_csv(data));
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// The plotted series as CSV.
pub fn data_csv(data: PlotData<'_>) -> String {
    let mut out = String::new();
    match data {
        PlotData::Sweep(rep) => {
            let mut buf = Vec::new();
            rep.write_csv(&mut buf).expect("writing to memory");
            out = String::from_utf8(buf).expect("ascii csv");
        }
        PlotData::Decay { times, values, .. } => {
            out.push_str("t,value\n");
            for (t, v) in times.iter().zip(values) {
                let _ = writeln!(out, "{t:e},{v:e}");
            }
        }
    }
    out
}

/// Writes `path` (SVG) and the same stem with extension `.csv`.
pub fn emit_plot(data: PlotData<'_>, path: &Path, stamp: Option<&str>) -> Result<()> {
    let svg = render_svg(data, stamp)?;
    write_atomic(&path.with_extension("csv"), data_csv(data).as_bytes())?;
    write_atomic(path, svg.as_bytes())
}
