//! Static, script-free rendering of a report document.

use std::fmt::Write;

use classilist_server::docs::{HistogramDoc, ReportDoc};

const COLORS: [(&str, &str); 4] = [("tp", "#2ca02c"), ("fp", "#ff7f0e"), ("fn", "#d62728"), ("tn", "#9e9e9e")];
const CHART_W: f64 = 240.0;
const CHART_H: f64 = 200.0;
const AXIS_W: f64 = 40.0;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// One chart: probability axis vertical, bars horizontal and stacked
/// TP, FP, FN, TN from the axis outwards.
fn chart(h: &HistogramDoc, max_count: usize) -> String {
    let n = h.bins.len().max(1) as f64;
    let row_h = CHART_H / n;
    let scale = (CHART_W - AXIS_W - 10.0) / max_count.max(1) as f64;
    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg width="{CHART_W}" height="{}" viewBox="0 0 {CHART_W} {}">"#,
        CHART_H + 20.0,
        CHART_H + 20.0
    );
    for (b, bin) in h.bins.iter().enumerate() {
        let y = 10.0 + CHART_H - (b as f64 + 1.0) * row_h;
        let mut x = AXIS_W;
        for (key, color) in COLORS {
            let count = match key {
                "tp" => bin.counts.tp,
                "fp" => bin.counts.fp,
                "fn" => bin.counts.fn_,
                _ => bin.counts.tn,
            };
            if count == 0 {
                continue;
            }
            let w = count as f64 * scale;
            let _ = write!(
                svg,
                r#"<rect x="{x:.2}" y="{:.2}" width="{w:.2}" height="{:.2}" fill="{color}"><title>[{}, {}] {}: {count}</title></rect>"#,
                y + 1.0,
                (row_h - 2.0).max(1.0),
                bin.lo,
                bin.hi,
                key.to_uppercase()
            );
            x += w;
        }
    }
    for (i, edge) in h.edges.iter().enumerate() {
        if h.edges.len() > 11 && i % ((h.edges.len() - 1) / 10).max(1) != 0 && i + 1 != h.edges.len() {
            continue;
        }
        let y = 10.0 + CHART_H - i as f64 * row_h;
        let _ = write!(
            svg,
            r#"<text x="{:.0}" y="{:.2}" font-size="9" text-anchor="end">{}</text>"#,
            AXIS_W - 4.0,
            y + 3.0,
            (edge * 1000.0).round() / 1000.0
        );
    }
    let _ = write!(
        svg,
        r#"<line x1="{AXIS_W}" y1="10" x2="{AXIS_W}" y2="{}" stroke="black"/></svg>"#,
        10.0 + CHART_H
    );
    svg
}

pub fn render(doc: &ReportDoc) -> String {
    let meta = &doc.meta;
    let spec = &doc.histograms.spec;
    let max_count = doc
        .histograms
        .histograms
        .iter()
        .flat_map(|h| h.bins.iter().map(|b| b.counts.total()))
        .max()
        .unwrap_or(0);

    let mut out = String::from(
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>classilist report</title>\n<style>\n\
         body{font-family:sans-serif;margin:1.5em}\n\
         .grid{display:flex;flex-wrap:wrap;gap:12px}\n\
         .chart{border:1px solid #ddd;padding:4px}\n\
         .chart h3{margin:2px 0;font-size:13px}\n\
         table{border-collapse:collapse}td,th{border:1px solid #ccc;padding:2px 8px;text-align:right}\n\
         .key span{display:inline-block;width:10px;height:10px;margin:0 4px 0 12px}\n\
         </style>\n</head>\n<body>\n",
    );
    let _ = writeln!(
        out,
        "<h1>classilist report</h1>\n<p>{} samples, {} classes, fingerprint <code>{}</code></p>",
        meta.n,
        meta.classes.len(),
        esc(&meta.fingerprint)
    );
    let groups: Vec<&str> = spec.groups.iter().map(|g| g.as_str()).collect();
    let _ = writeln!(
        out,
        "<p>bins {}, axis [{}, {}], groups {}, tn_min {}, tp_max {}</p>",
        spec.bin_count,
        spec.axis_lo,
        spec.axis_hi,
        groups.join(","),
        spec.tn_min,
        spec.tp_max
    );
    out.push_str("<p class=\"key\">");
    for (key, color) in COLORS {
        let _ = write!(out, "<span style=\"background:{color}\"></span>{}", key.to_uppercase());
    }
    out.push_str("</p>\n<div class=\"grid\">\n");
    for h in &doc.histograms.histograms {
        let c = &meta.per_class_counts[h.class_index].counts;
        let _ = writeln!(
            out,
            "<div class=\"chart\"><h3>{} <small>TP={} FP={} FN={} TN={}</small></h3>{}</div>",
            esc(&h.class),
            c.tp,
            c.fp,
            c.fn_,
            c.tn,
            chart(h, max_count)
        );
    }
    out.push_str("</div>\n<h2>Confusion matrix</h2>\n<table>\n<tr><th>actual \\ predicted</th>");
    for name in &doc.confusion.classes {
        let _ = write!(out, "<th>{}</th>", esc(name));
    }
    out.push_str("</tr>\n");
    for (a, row) in doc.confusion.matrix.iter().enumerate() {
        let _ = write!(out, "<tr><th>{}</th>", esc(&doc.confusion.classes[a]));
        for v in row {
            let _ = write!(out, "<td>{v}</td>");
        }
        out.push_str("</tr>\n");
    }
    out.push_str("</table>\n</body>\n</html>\n");
    out
}
