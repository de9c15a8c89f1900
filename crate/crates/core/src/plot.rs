//! Standalone SVG scatter plots of a single sweep.
//!
//! Log-scaled hyperparameter on x, entropy in bits on y, one dot per run,
//! the Gaussian-kernel trend as a single `<path>`, and dashed guides at
//! the minimum (0) and maximum (`log2 S`) entropy.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::records::SweepMetadata;
use crate::stats::{default_bandwidth, gaussian_smooth, TrendCurve, DEFAULT_GRID_SIZE};
use crate::sweep::RunRecord;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 48.0;
/// Shared y scale when no sidecar says otherwise: log2(256).
pub const FALLBACK_MAX_ENTROPY: f64 = 8.0;

#[derive(Debug, Clone, Default)]
pub struct PlotOptions {
    /// Kernel bandwidth in natural-log units of x; `None` uses the default.
    pub bandwidth: Option<f64>,
    /// Top of the y axis in bits; `None` reads it from the metadata.
    pub max_entropy: Option<f64>,
}

struct Frame {
    log_lo: f64,
    log_hi: f64,
    y_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x.log10() - self.log_lo) / (self.log_hi - self.log_lo) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - y / self.y_max * (HEIGHT - TOP - BOTTOM)
    }
}

/// Renders one sweep. All records must share a `(target, param)`.
pub fn render_svg(
    records: &[RunRecord],
    meta: Option<&SweepMetadata>,
    opts: &PlotOptions,
) -> Result<String> {
    let first = records
        .first()
        .ok_or_else(|| Error::invalid("no records to plot"))?;
    if let Some(r) = records
        .iter()
        .find(|r| r.target != first.target || r.param != first.param)
    {
        return Err(Error::invalid(format!(
            "records mix {}/{} with {}/{}",
            first.target, first.param, r.target, r.param
        )));
    }
    let points: Vec<(f64, f64)> = records.iter().map(|r| (r.value, r.entropy)).collect();
    let bandwidth = opts.bandwidth.unwrap_or_else(|| default_bandwidth(&points));
    let trend = gaussian_smooth(&points, bandwidth, DEFAULT_GRID_SIZE)?;

    let y_max = opts
        .max_entropy
        .or_else(|| meta.map(|m| (m.spec.max_lexicon_size() as f64).log2()))
        .unwrap_or(FALLBACK_MAX_ENTROPY);
    let y_max = if y_max > 0.0 { y_max } else { 1.0 };
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(x, _)| {
            (a.min(x), b.max(x))
        });
    let (mut log_lo, mut log_hi) = (lo.log10(), hi.log10());
    if log_hi - log_lo < 1e-9 {
        log_lo -= 0.5;
        log_hi += 0.5;
    }
    let frame = Frame {
        log_lo,
        log_hi,
        y_max,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="13">{} / {}</text>"#,
        WIDTH / 2.0,
        first.target,
        first.param
    );
    axes(&mut svg, &frame);
    guides(&mut svg, &frame);
    let _ = writeln!(
        svg,
        r#"<g class="points" fill="steelblue" fill-opacity="0.5">"#
    );
    for &(x, y) in &points {
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2"/>"#,
            frame.px(x),
            frame.py(y.min(y_max))
        );
    }
    svg.push_str("</g>\n");
    trend_path(&mut svg, &frame, &trend);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{} (log scale)</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 10.0,
        first.param
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">entropy (bits)</text>"#,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        (TOP + HEIGHT - BOTTOM) / 2.0
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn axes(svg: &mut String, f: &Frame) {
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(svg, r#"<g class="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>"#);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#);
    svg.push_str("</g>\n<g class=\"ticks\">\n");
    for decade in (f.log_lo.ceil() as i32)..=(f.log_hi.floor() as i32) {
        let x = f.px(10f64.powi(decade));
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{:.1}" stroke="black"/>"#,
            y0 + 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.1}" text-anchor="middle">1e{decade}</text>"#,
            y0 + 16.0
        );
    }
    let mut bit = 0.0;
    while bit <= f.y_max + 1e-9 {
        let y = f.py(bit);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#,
            x0 - 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{bit}</text>"#,
            x0 - 6.0,
            y + 4.0
        );
        bit += 1.0;
    }
    svg.push_str("</g>\n");
}

fn guides(svg: &mut String, f: &Frame) {
    let _ = writeln!(
        svg,
        r#"<g class="guides" stroke="gray" stroke-dasharray="5,4">"#
    );
    for bits in [0.0, f.y_max] {
        let y = f.py(bits);
        let _ = writeln!(
            svg,
            r#"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}"/>"#,
            WIDTH - RIGHT
        );
    }
    svg.push_str("</g>\n");
}

fn trend_path(svg: &mut String, f: &Frame, trend: &TrendCurve) {
    let mut d = String::new();
    for (i, (&x, &y)) in trend.xs.iter().zip(&trend.ys).enumerate() {
        let _ = write!(
            d,
            "{}{:.2},{:.2}",
            if i == 0 { "M" } else { " L" },
            f.px(x),
            f.py(y.min(f.y_max))
        );
    }
    if trend.xs.len() == 1 {
        // Degenerate x range: draw the level across the plot.
        let _ = write!(d, " H{:.2}", WIDTH - RIGHT);
    }
    let _ = writeln!(
        svg,
        r#"<path class="trend" d="{d}" fill="none" stroke="darkred" stroke-width="2"/>"#
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{Hyperparameter, Target};

    fn recs(entropy: impl Fn(usize) -> f64) -> Vec<RunRecord> {
        (1..=50)
            .map(|i| RunRecord {
                target: Target::Filex,
                param: Hyperparameter::Alpha,
                value: 1e-3 * 1.3f64.powi(i as i32),
                seed: i as u64,
                entropy: entropy(i),
            })
            .collect()
    }

    #[test]
    fn flat_records_give_flat_trend() {
        let svg = render_svg(&recs(|_| 3.0), None, &PlotOptions::default()).unwrap();
        let d = svg
            .split(r#"class="trend" d=""#)
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        let ys: Vec<&str> = d
            .split(['M', 'L'])
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().split(',').nth(1).unwrap())
            .collect();
        assert_eq!(ys.len(), DEFAULT_GRID_SIZE);
        assert!(ys.iter().all(|y| *y == ys[0]));
        // 3 bits on the 8-bit fallback scale.
        let expected = HEIGHT - BOTTOM - 3.0 / 8.0 * (HEIGHT - TOP - BOTTOM);
        assert_eq!(ys[0], format!("{expected:.2}"));
    }

    #[test]
    fn one_trend_path() {
        let svg = render_svg(&recs(|i| i as f64 / 10.0), None, &PlotOptions::default()).unwrap();
        assert_eq!(svg.matches("<path").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 50);
        assert_eq!(svg.matches("stroke-dasharray").count(), 1);
    }

    #[test]
    fn rejects_empty_and_mixed() {
        assert!(render_svg(&[], None, &PlotOptions::default()).is_err());
        let mut r = recs(|_| 1.0);
        r[3].param = Hyperparameter::Beta;
        assert!(render_svg(&r, None, &PlotOptions::default()).is_err());
    }
}
