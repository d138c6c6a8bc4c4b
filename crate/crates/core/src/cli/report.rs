use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::format_real;

use super::summary::{
    mean_sd, min_unfairness_point, policy_envelope, policy_order, read_results, read_timings, summarize,
    PointSummary,
};

pub const REPORT_DIR: &str = "report";

/// One line of the minimum-unfairness table.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyRow {
    pub policy: String,
    pub alpha: f64,
    pub unfairness: (f64, f64),
    pub effectiveness: (f64, f64),
    pub msd: (f64, f64),
    pub pearson: (f64, f64),
    /// Mean over all of the policy's runs; NaN without timings.
    pub wall_ms: f64,
}

/// Each policy at the alpha with its lowest seed-averaged unfairness,
/// sorted by that unfairness.
pub fn min_unfairness_table(points: &[PointSummary], timing: impl Fn(&str) -> f64) -> Vec<PolicyRow> {
    let mut rows: Vec<PolicyRow> = policy_order(points)
        .iter()
        .filter_map(|name| min_unfairness_point(points, name))
        .map(|p| PolicyRow {
            policy: p.policy.clone(),
            alpha: p.alpha,
            unfairness: p.unfairness,
            effectiveness: p.effectiveness,
            msd: p.msd,
            pearson: p.pearson,
            wall_ms: timing(&p.policy),
        })
        .collect();
    rows.sort_by(|a, b| a.unfairness.0.total_cmp(&b.unfairness.0));
    rows
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Effectiveness against unfairness on a log10 x axis, one polyline (with
/// point markers) per policy envelope.
pub fn tradeoff_svg(title: &str, curves: &[(String, Vec<(f64, f64)>)]) -> String {
    let (w, h) = (760.0, 480.0);
    let (left, right, top, bottom) = (70.0, 170.0, 40.0, 50.0);
    let positive: Vec<(f64, f64)> = curves
        .iter()
        .flat_map(|(_, c)| c.iter().copied())
        .filter(|&(u, e)| u > 0.0 && u.is_finite() && e.is_finite())
        .collect();
    let floor = positive.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let floor = if floor.is_finite() { floor / 10.0 } else { 1e-3 };
    let lx = |u: f64| u.max(floor).log10();
    let all: Vec<(f64, f64)> = curves
        .iter()
        .flat_map(|(_, c)| c.iter().copied())
        .filter(|p| p.0.is_finite() && p.1.is_finite())
        .collect();
    let (mut x0, mut x1) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(lx(p.0)), b.max(lx(p.0))));
    let (mut y0, mut y1) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    x0 = x0.floor();
    x1 = x1.ceil().max(x0 + 1.0);
    if y1 - y0 < 1e-9 {
        y0 -= 0.05;
        y1 += 0.05;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        (left + w - right) / 2.0,
        xml_escape(title)
    );
    let (ax0, ax1, ay0, ay1) = (px(x0), px(x1), py(y0), py(y1));
    let _ = writeln!(
        s,
        r#"<path d="M{ax0:.1},{ay1:.1} L{ax0:.1},{ay0:.1} L{ax1:.1},{ay0:.1}" fill="none" stroke="black"/>"#
    );
    let mut d = x0;
    while d <= x1 + 1e-9 {
        let x = px(d);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.1}" y1="{ay0:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">1e{}</text>"#,
            ay0 + 5.0,
            ay0 + 18.0,
            d as i64
        );
        d += 1.0;
    }
    for i in 0..=4 {
        let v = y0 + (y1 - y0) * f64::from(i) / 4.0;
        let y = py(v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{ax0:.1}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{v:.3}</text>"#,
            ax0 - 5.0,
            ax0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">unfairness (log scale)</text>"#,
        (ax0 + ax1) / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">effectiveness</text>"#,
        (ay0 + ay1) / 2.0,
        (ay0 + ay1) / 2.0
    );
    for (i, (name, curve)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> = curve
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(u, e)| (px(lx(u)), py(e)))
            .collect();
        let list: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"><title>{}</title></polyline>"#,
            list.join(" "),
            xml_escape(name)
        );
        for (x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="{color}"/>"#);
        }
        let ly = top + 10.0 + 20.0 * i as f64;
        let lx0 = w - right + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx0:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx0 + 20.0,
            lx0 + 26.0,
            ly + 4.0,
            xml_escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn pm(v: (f64, f64)) -> String {
    format!("{} ± {}", sig(v.0), sig(v.1))
}

fn sig(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-3) {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

fn markdown(rows: &[PolicyRow]) -> String {
    let mut s = String::from("## Minimum unfairness per policy\n\n");
    s.push_str("| policy | alpha | unfairness | effectiveness | time (ms) |\n|---|---|---|---|---|\n");
    for r in rows {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} |",
            r.policy,
            format_real(r.alpha),
            pm(r.unfairness),
            pm(r.effectiveness),
            sig(r.wall_ms)
        );
    }
    s.push_str("\n## Gain-ratio alignment at that alpha\n\n| policy | MSD | Pearson |\n|---|---|---|\n");
    for r in rows {
        let _ = writeln!(s, "| {} | {} | {} |", r.policy, pm(r.msd), pm(r.pearson));
    }
    s
}

/// Reads a sweep directory and writes `report/` with the two tables (CSV
/// and Markdown) and `tradeoff.svg`. Returns the Markdown.
pub fn write_report(dir: &Path) -> Result<String> {
    let results = read_results(dir)?;
    let timings = read_timings(dir)?;
    let points = summarize(&results);
    let timing = |policy: &str| mean_sd(timings.iter().filter(|t| t.policy == policy).map(|t| t.wall_ms)).0;
    let rows = min_unfairness_table(&points, timing);
    if rows.is_empty() {
        return Err(Error::invalid("no successful runs to report"));
    }
    let out = dir.join(REPORT_DIR);
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "policy",
        "alpha",
        "unfairness_mean",
        "unfairness_sd",
        "effectiveness_mean",
        "effectiveness_sd",
        "wall_ms_mean",
    ])?;
    for r in &rows {
        w.write_record([
            r.policy.clone(),
            format_real(r.alpha),
            format_real(r.unfairness.0),
            format_real(r.unfairness.1),
            format_real(r.effectiveness.0),
            format_real(r.effectiveness.1),
            format_real(r.wall_ms),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    let path = out.join("min_unfairness.csv");
    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["policy", "alpha", "msd_mean", "msd_sd", "pearson_mean", "pearson_sd"])?;
    for r in &rows {
        w.write_record([
            r.policy.clone(),
            format_real(r.alpha),
            format_real(r.msd.0),
            format_real(r.msd.1),
            format_real(r.pearson.0),
            format_real(r.pearson.1),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    let path = out.join("alignment.csv");
    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;

    let md = markdown(&rows);
    let path = out.join("report.md");
    fs::write(&path, &md).map_err(|e| Error::io(&path, e))?;

    let curves: Vec<(String, Vec<(f64, f64)>)> = policy_order(&points)
        .into_iter()
        .map(|p| {
            let env = policy_envelope(&points, &p);
            (p, env)
        })
        .collect();
    let mode = results[0].mode;
    let title = format!("{} trade-off: {}", mode, dir.file_name().and_then(|n| n.to_str()).unwrap_or("results"));
    let path = out.join("tradeoff.svg");
    fs::write(&path, tradeoff_svg(&title, &curves)).map_err(|e| Error::io(&path, e))?;
    Ok(md)
}
