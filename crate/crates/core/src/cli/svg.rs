// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Minimal in-process SVG line plots.

use std::fmt::Write as _;

use super::report::Series;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];

fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) =
        values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        return None;
    }
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return Some((lo - pad, hi + pad));
    }
    Some((lo, hi))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Plots every column after the first against the first. The ordinate is
/// logarithmic when all plotted values are positive and span more than three
/// decades.
pub fn line_plot(s: &Series) -> String {
    let xs: Vec<f64> = s.rows.iter().map(|r| r[0]).collect();
    let ys = || s.rows.iter().flat_map(|r| r[1..].iter().copied());
    let positive = ys().all(|v| v > 0.0);
    let (ylo, yhi) = range(ys()).unwrap_or((0.0, 1.0));
    let log = positive && yhi / ylo > 1e3;
    let ty = |v: f64| if log { v.log10() } else { v };
    let (ylo, yhi) = range(ys().filter(|&v| !log || v > 0.0).map(ty)).unwrap_or((0.0, 1.0));
    let (xlo, xhi) = range(xs.iter().copied()).unwrap_or((0.0, 1.0));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - xlo) / (xhi - xlo) * pw;
    let py = |y: f64| TOP + (1.0 - (ty(y) - ylo) / (yhi - ylo)) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&s.name)
    );
    let _ = writeln!(out, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = xlo + f * (xhi - xlo);
        let yv = ylo + f * (yhi - ylo);
        let xpos = LEFT + f * pw;
        let ypos = TOP + (1.0 - f) * ph;
        let ylabel = if log { format!("1e{yv:.1}") } else { format!("{yv:.3e}") };
        let _ = writeln!(out, r#"<text x="{xpos:.1}" y="{:.1}" text-anchor="middle">{xv:.3}</text>"#, TOP + ph + 18.0);
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{ylabel}</text>"#, LEFT - 6.0, ypos + 4.0);
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0,
        escape(&s.columns[0])
    );
    for (c, name) in s.columns.iter().enumerate().skip(1) {
        let color = COLORS[(c - 1) % COLORS.len()];
        let pts: Vec<String> = s
            .rows
            .iter()
            .filter(|r| r[c].is_finite() && (!log || r[c] > 0.0))
            .map(|r| format!("{:.2},{:.2}", px(r[0]), py(r[c])))
            .collect();
        let _ =
            writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let ly = TOP + 14.0 + 18.0 * (c - 1) as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="2"/>"#,
            ly - 4.0,
            lx + 20.0,
            ly - 4.0
        );
        let _ = writeln!(out, r#"<text x="{:.1}" y="{ly:.1}">{}</text>"#, lx + 26.0, escape(name));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plots_every_column() {
        let mut s = Series::new("decay", &["t", "a", "b"]);
        for k in 0..5 {
            let t = k as f64;
            s.push(vec![t, (-t).exp(), 1e-6 * (t + 1.0)]);
        }
        let svg = line_plot(&s);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">1e"));
    }

    #[test]
    fn constant_series_is_finite() {
        let mut s = Series::new("flat", &["t", "x"]);
        s.push(vec![0.0, 0.0]);
        s.push(vec![1.0, 0.0]);
        assert!(!line_plot(&s).contains("NaN"));
    }
}
