//! SVG line chart of minimum angle against sweep.

use std::fmt::Write as _;

use crate::mesh::io::fmt_sig;
use crate::relax::ConvergenceTrace;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 48.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// One polyline per labeled trace, x = sweep, y = minimum angle (degrees,
/// axis from 0 to 60).
pub fn min_angle_chart(series: &[(&str, &ConvergenceTrace)]) -> String {
    let max_sweep = series.iter().map(|(_, t)| t.sweeps()).max().unwrap_or(0).max(1) as f64;
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let x = |s: f64| MARGIN + pw * s / max_sweep;
    let y = |a: f64| MARGIN + ph * (1.0 - a.clamp(0.0, 60.0) / 60.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for a in [0.0, 15.0, 30.0, 45.0, 60.0] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{a}</text>"#,
            MARGIN - 6.0,
            fmt_sig(y(a) + 4.0, 6)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">sweep (0 to {max_sweep})</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">min angle (deg)</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (k, (label, trace)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = trace
            .records
            .iter()
            .map(|r| format!("{},{}", fmt_sig(x(r.sweep as f64), 6), fmt_sig(y(r.min_angle_deg), 6)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = MARGIN + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" fill="{color}" text-anchor="end">{label}</text>"#,
            WIDTH - MARGIN - 8.0
        );
    }
    s.push_str("</svg>\n");
    s
}
