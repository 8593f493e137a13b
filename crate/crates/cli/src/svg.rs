//! Standalone SVG charts. Each chart embeds its data as CSV inside `<desc>`
//! and the provenance line inside `<metadata>`.

use std::fmt::Write;

use crate::Provenance;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// One bar per category, optionally with an error whisker.
#[derive(Debug, Clone)]
pub struct BarSeries {
    pub label: String,
    pub values: Vec<f64>,
    pub errors: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct LineSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Draw markers only, no connecting line.
    pub scatter: bool,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.4}")
    } else {
        String::new()
    }
}

/// Rounds the top of an axis up to 1, 2 or 5 times a power of ten.
fn nice_ceiling(v: f64) -> f64 {
    if !(v.is_finite() && v > 0.0) {
        return 1.0;
    }
    let p = 10f64.powf(v.log10().floor());
    for m in [1.0, 2.0, 5.0, 10.0] {
        if m * p >= v {
            return m * p;
        }
    }
    10.0 * p
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }
}

fn open(out: &mut String, title: &str, table: &str, provenance: &Provenance) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, "<metadata>{}</metadata>", escape(&provenance.line()));
    let _ = writeln!(out, "<desc>\n{}</desc>", escape(table));
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ =
        writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, escape(title));
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str, y_ticks: usize) {
    let (l, r, t, b) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(out, r#"<path d="M{l} {t} V{b} H{r}" stroke="black" fill="none"/>"#);
    for i in 0..=y_ticks {
        let v = f.y0 + (f.y1 - f.y0) * i as f64 / y_ticks as f64;
        let y = f.py(v);
        let _ = writeln!(out, r##"<line x1="{l}" y1="{y:.1}" x2="{r}" y2="{y:.1}" stroke="#ddd"/>"##);
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, l - 6.0, y + 4.0, trim(v));
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        H - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (t + b) / 2.0,
        escape(y_label)
    );
}

fn trim(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn legend(out: &mut String, labels: &[&str]) {
    for (i, l) in labels.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let x = W - RIGHT + 15.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x}" y="{}" width="12" height="12" fill="{}"/>"#,
            y - 10.0,
            PALETTE[i % PALETTE.len()]
        );
        let _ = writeln!(out, r#"<text x="{}" y="{y}">{}</text>"#, x + 18.0, escape(l));
    }
}

/// Grouped bar chart: one group per category, one bar per series.
pub fn bar_chart(
    title: &str,
    y_label: &str,
    categories: &[String],
    series: &[BarSeries],
    provenance: &Provenance,
) -> String {
    let mut table = String::from("series,category,value,error\n");
    for s in series {
        for (i, c) in categories.iter().enumerate() {
            let v = s.values.get(i).copied().unwrap_or(f64::NAN);
            let e = s.errors.as_ref().and_then(|e| e.get(i).copied()).unwrap_or(f64::NAN);
            let _ = writeln!(table, "{},{},{},{}", s.label, c, num(v), num(e));
        }
    }
    let top = series
        .iter()
        .flat_map(|s| {
            s.values.iter().enumerate().map(move |(i, v)| v + s.errors.as_ref().map_or(0.0, |e| e[i].max(0.0)))
        })
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let f = Frame { x0: 0.0, x1: categories.len().max(1) as f64, y0: 0.0, y1: nice_ceiling(top * 1.05) };
    let mut out = String::new();
    open(&mut out, title, &table, provenance);
    axes(&mut out, &f, "", y_label, 5);
    let group = f.px(1.0) - f.px(0.0);
    let bar = 0.8 * group / series.len().max(1) as f64;
    for (i, c) in categories.iter().enumerate() {
        let gx = f.px(i as f64) + 0.1 * group;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            f.px(i as f64 + 0.5),
            H - BOTTOM + 18.0,
            escape(c)
        );
        for (k, s) in series.iter().enumerate() {
            let v = s.values.get(i).copied().unwrap_or(f64::NAN);
            if !v.is_finite() {
                continue;
            }
            let x = gx + k as f64 * bar;
            let (y, base) = (f.py(v), f.py(0.0));
            let _ = writeln!(
                out,
                r#"<rect x="{x:.1}" y="{y:.1}" width="{:.1}" height="{:.1}" fill="{}"/>"#,
                bar - 2.0,
                base - y,
                PALETTE[k % PALETTE.len()]
            );
            if let Some(e) = s.errors.as_ref().and_then(|e| e.get(i)).filter(|e| e.is_finite()) {
                let cx = x + (bar - 2.0) / 2.0;
                let _ = writeln!(
                    out,
                    r#"<path d="M{cx:.1} {:.1} V{:.1}" stroke="black"/>"#,
                    f.py(v + e),
                    f.py((v - e).max(0.0))
                );
            }
        }
    }
    legend(&mut out, &series.iter().map(|s| s.label.as_str()).collect::<Vec<_>>());
    out.push_str("</svg>\n");
    out
}

/// Line or scatter chart over shared axes.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[LineSeries], provenance: &Provenance) -> String {
    let mut table = String::from("series,x,y\n");
    for s in series {
        for &(x, y) in &s.points {
            let _ = writeln!(table, "{},{},{}", s.label, num(x), num(y));
        }
    }
    let pts = || series.iter().flat_map(|s| s.points.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1) = pts().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    } else if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let (lo, hi) = pts().fold((0.0f64, 0.0f64), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let y1 = nice_ceiling(hi * 1.05);
    let y0 = if lo < 0.0 { -nice_ceiling(-lo * 1.05) } else { 0.0 };
    let f = Frame { x0, x1, y0, y1 };
    let mut out = String::new();
    open(&mut out, title, &table, provenance);
    axes(&mut out, &f, x_label, y_label, 5);
    for i in 0..=5 {
        let v = x0 + (x1 - x0) * i as f64 / 5.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            f.px(v),
            H - BOTTOM + 18.0,
            trim(v)
        );
    }
    for (k, s) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let ok: Vec<&(f64, f64)> = s.points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        if !s.scatter && ok.len() > 1 {
            let d: Vec<String> = ok
                .iter()
                .enumerate()
                .map(|(i, (x, y))| format!("{}{:.1} {:.1}", if i == 0 { 'M' } else { 'L' }, f.px(*x), f.py(*y)))
                .collect();
            let _ = writeln!(out, r#"<path d="{}" stroke="{colour}" stroke-width="2" fill="none"/>"#, d.join(" "));
        }
        if s.scatter || ok.len() <= 40 {
            for (x, y) in ok {
                let _ = writeln!(out, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{colour}"/>"#, f.px(*x), f.py(*y));
            }
        }
    }
    legend(&mut out, &series.iter().map(|s| s.label.as_str()).collect::<Vec<_>>());
    out.push_str("</svg>\n");
    out
}
