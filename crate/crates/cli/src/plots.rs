//! Minimal SVG figures: ROC curve, per-method OKS histograms and per-keypoint
//! small multiples. Coordinates are printed with two decimals.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use deidkit::identity::RocCurve;
use deidkit::keypoint::{Histogram, KeypointHistogram};

use crate::error::{CliError, CliResult};
use crate::report::Report;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn open(width: u32, height: u32) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\">\n\
         <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    )
}

pub fn roc_svg(curve: &RocCurve<f64>) -> String {
    let (x0, y0, side) = (60.0, 30.0, 400.0);
    let px = |far: f64| x0 + far * side;
    let py = |tar: f64| y0 + (1.0 - tar) * side;
    let mut s = open(500, 500);
    let _ = writeln!(
        s,
        "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{side:.2}\" height=\"{side:.2}\" fill=\"none\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 4\"/>",
        px(0.0),
        py(0.0),
        px(1.0),
        py(1.0)
    );
    let points: Vec<String> = curve
        .points
        .iter()
        .map(|p| format!("{:.2},{:.2}", px(p.far), py(p.tar)))
        .collect();
    let _ = writeln!(
        s,
        "<polyline class=\"roc\" points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>",
        points.join(" ")
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"16\">AUC = {}</text>",
        px(0.45),
        py(0.1),
        curve.auc
    );
    let _ = writeln!(s, "<text x=\"{:.2}\" y=\"490\" font-size=\"14\" text-anchor=\"middle\">FAR</text>", px(0.5));
    let _ = writeln!(
        s,
        "<text x=\"20\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2})\">TAR</text>",
        py(0.5),
        py(0.5)
    );
    for tick in [0.0, 0.5, 1.0] {
        let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{tick}</text>", px(tick), y0 + side + 15.0);
        let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{tick}</text>", x0 - 5.0, py(tick) + 4.0);
    }
    s.push_str("</svg>\n");
    s
}

/// Bars of `h` inside the box `(x, y, w, ht)`, scaled to the tallest bin.
fn bars(s: &mut String, h: &Histogram, x: f64, y: f64, w: f64, ht: f64) {
    let max = h.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let bw = w / h.counts.len() as f64;
    let _ = writeln!(s, "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{ht:.2}\" fill=\"none\" stroke=\"black\"/>");
    for (i, &c) in h.counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let bh = ht * c as f64 / max;
        let _ = writeln!(
            s,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{bw:.2}\" height=\"{bh:.2}\" fill=\"#4c72b0\"/>",
            x + i as f64 * bw,
            y + ht - bh
        );
    }
}

pub fn oks_histogram_svg(method: &str, h: &Histogram) -> String {
    let mut s = open(540, 320);
    let _ = writeln!(s, "<text x=\"270\" y=\"20\" font-size=\"15\" text-anchor=\"middle\">Instance OKS: {}</text>", escape(method));
    bars(&mut s, h, 40.0, 35.0, 480.0, 240.0);
    for tick in [0.0, 0.5, 1.0] {
        let _ = writeln!(s, "<text x=\"{:.2}\" y=\"292\" font-size=\"11\" text-anchor=\"middle\">{tick}</text>", 40.0 + tick * 480.0);
    }
    let _ = writeln!(s, "<text x=\"280\" y=\"312\" font-size=\"12\" text-anchor=\"middle\">OKS (n = {})</text>", h.total());
    s.push_str("</svg>\n");
    s
}

pub fn per_keypoint_svg(method: &str, hists: &[KeypointHistogram]) -> String {
    const COLS: usize = 5;
    let (pw, ph) = (180.0, 120.0);
    let rows = hists.len().div_ceil(COLS);
    let mut s = open((COLS as f64 * pw) as u32, (rows as f64 * ph + 30.0) as u32);
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"20\" font-size=\"15\" text-anchor=\"middle\">Keypoint similarity: {}</text>",
        COLS as f64 * pw / 2.0,
        escape(method)
    );
    for (k, kh) in hists.iter().enumerate() {
        let (x, y) = ((k % COLS) as f64 * pw, 30.0 + (k / COLS) as f64 * ph);
        let _ = writeln!(s, "<g class=\"panel\">");
        let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>", x + pw / 2.0, y + 14.0, escape(&kh.keypoint));
        bars(&mut s, &kh.histogram, x + 15.0, y + 20.0, pw - 30.0, ph - 35.0);
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

fn file_safe(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Writes every figure the report supports into `<out>/plots`.
pub fn emit_plots(report: &Report, out_dir: &Path) -> CliResult<Vec<PathBuf>> {
    let dir = out_dir.join("plots");
    fs::create_dir_all(&dir).map_err(|e| CliError::write(&dir, e))?;
    let mut figures = Vec::new();
    if let Some(i) = &report.identity {
        figures.push((dir.join("roc.svg"), roc_svg(&i.roc)));
    }
    if let Some(k) = &report.keypoints {
        for (name, m) in &k.methods {
            let stem = file_safe(name);
            figures.push((dir.join(format!("oks_hist_{stem}.svg")), oks_histogram_svg(name, &m.summary.oks_histogram)));
            figures.push((dir.join(format!("per_keypoint_{stem}.svg")), per_keypoint_svg(name, &m.summary.per_keypoint)));
        }
    }
    for (path, svg) in &figures {
        fs::write(path, svg).map_err(|e| CliError::write(path, e))?;
    }
    Ok(figures.into_iter().map(|(p, _)| p).collect())
}
