use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::simulate::ConvergenceReport;
use crate::error::{Error, Result};

pub const CSV_COLUMNS: &str = "scheme,h,mse,mse_se,cpu_seconds,p,M,paths,seed";

/// CSV with `#` comment lines documenting the columns.
pub fn to_csv(report: &ConvergenceReport) -> String {
    let mut s = String::new();
    s.push_str("# mse: (mean over paths of sup over the coarse grid of |y_ref - y|^2)^(1/2)\n");
    let _ = writeln!(
        s,
        "# reference: {} at fine step {} with {} Fourier terms; paired noise hash {}",
        report.reference, report.fine_step, report.fine_terms, report.noise_hash
    );
    s.push_str("# cpu_seconds: wall time per path for sampling and stepping at step h, min over repeats; p and M are the timing run's Fourier terms and grid points\n");
    s.push_str(CSV_COLUMNS);
    s.push('\n');
    for sch in &report.schemes {
        for p in &sch.points {
            let cpu = p.cpu_seconds.map(|c| format!("{c:e}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{:e},{:e},{:e},{},{},{},{},{}",
                sch.scheme, p.h, p.mse, p.mse_se, cpu, p.p, p.m, report.paths, report.seed
            );
        }
    }
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Panel<'a> {
    title: &'a str,
    xlabel: &'a str,
    series: Vec<(String, Vec<(f64, f64)>)>,
}

fn panel(out: &mut String, p: &Panel<'_>, x0: f64, y0: f64, w: f64, h: f64) {
    let pts: Vec<(f64, f64)> = p
        .series
        .iter()
        .flat_map(|s| s.1.iter().copied())
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    let _ = writeln!(out, r#"<g><rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="black"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#, x0 + w / 2.0, y0 - 8.0, escape(p.title));
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#, x0 + w / 2.0, y0 + h + 34.0, escape(p.xlabel));
    if pts.is_empty() {
        out.push_str("</g>\n");
        return;
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let pad = |a: f64, b: f64| if b - a < 1e-9 { (a - 0.5, b + 0.5) } else { (a - 0.05 * (b - a), b + 0.05 * (b - a)) };
    let (xmin, xmax) = pad(xmin, xmax);
    let (ymin, ymax) = pad(ymin, ymax);
    let sx = |x: f64| x0 + (x - xmin) / (xmax - xmin) * w;
    let sy = |y: f64| y0 + h - (y - ymin) / (ymax - ymin) * h;
    for d in xmin.ceil() as i32..=xmax.floor() as i32 {
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="10">1e{d}</text>"#, sx(d as f64), y0 + h + 14.0);
    }
    for d in ymin.ceil() as i32..=ymax.floor() as i32 {
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end" font-size="10">1e{d}</text>"#, x0 - 4.0, sy(d as f64) + 3.0);
    }
    for (k, (name, s)) in p.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let coords: Vec<String> = s
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", sx(x.log10()), sy(y.log10())))
            .collect();
        if coords.is_empty() {
            continue;
        }
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" "));
        for c in &coords {
            let (cx, cy) = c.split_once(',').unwrap();
            let _ = writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
        }
        let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#, x0 + 8.0, y0 + 16.0 + 14.0 * k as f64, escape(name));
    }
    out.push_str("</g>\n");
}

/// Two log-log panels: error against step size and against CPU time.
pub fn to_svg(report: &ConvergenceReport) -> String {
    let mut s = String::from(
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="900" height="420" viewBox="0 0 900 420">
<rect width="900" height="420" fill="white"/>
"#,
    );
    let by_h = Panel {
        title: "global mean-square error vs step size",
        xlabel: "h",
        series: report.schemes.iter().map(|sc| (sc.scheme.clone(), sc.points.iter().map(|p| (p.h, p.mse)).collect())).collect(),
    };
    let by_cpu = Panel {
        title: "global mean-square error vs CPU time",
        xlabel: "seconds per path",
        series: report
            .schemes
            .iter()
            .map(|sc| (sc.scheme.clone(), sc.points.iter().filter_map(|p| Some((p.cpu_seconds?, p.mse))).collect()))
            .collect(),
    };
    panel(&mut s, &by_h, 60.0, 40.0, 360.0, 320.0);
    panel(&mut s, &by_cpu, 510.0, 40.0, 360.0, 320.0);
    s.push_str("</svg>\n");
    s
}

/// Gnuplot script plotting `csv` (a file name relative to the script).
pub fn to_gnuplot(report: &ConvergenceReport, csv: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset logscale xy\nset key left top\nset terminal pngcairo size 1000,450\n");
    s.push_str("set output 'convergence.png'\nset multiplot layout 1,2\n");
    let plot = |xcol: &str, xlabel: &str| {
        let mut p = format!("set xlabel '{xlabel}'\nset ylabel 'mse'\nplot ");
        let parts: Vec<String> = report
            .schemes
            .iter()
            .map(|sc| format!("'{csv}' using (strcol(1) eq '{0}' ? ${xcol} : 1/0):3 with linespoints title '{0}'", sc.scheme))
            .collect();
        p.push_str(&parts.join(", \\\n     "));
        p.push('\n');
        p
    };
    s.push_str(&plot("2", "h"));
    s.push_str(&plot("5", "cpu seconds per path"));
    s.push_str("unset multiplot\n");
    s
}

/// Writes the requested formats into `dir`; returns the files written.
pub fn emit(report: &ConvergenceReport, dir: &Path, formats: &[String]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    for f in formats {
        let (name, body) = match f.as_str() {
            "csv" => ("convergence.csv", to_csv(report)),
            "svg" => ("convergence.svg", to_svg(report)),
            "gnuplot" => ("convergence.gp", to_gnuplot(report, "convergence.csv")),
            "json" => ("report.json", serde_json::to_string_pretty(report)?),
            _ => return Err(Error::Config(format!("unknown output format {f:?}"))),
        };
        let path = dir.join(name);
        fs::write(&path, body)?;
        out.push(path);
    }
    Ok(out)
}
