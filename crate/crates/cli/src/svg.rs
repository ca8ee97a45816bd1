//! Static SVG plots: class-conditional distributions with the classifier
//! threshold, dendrograms, correlation heatmaps and event-rate curves.

use std::fmt::Write;

use ctgfeat_core::everest::EverestResult;
use ctgfeat_core::math::SquareMatrix;
use ctgfeat_core::select::Dendrogram;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn open(w: f64, h: f64, title: &str) -> String {
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        w / 2.0,
        escape(title)
    )
    .unwrap();
    s
}

fn close(mut s: String) -> String {
    s.push_str("</svg>\n");
    s
}

fn axes(s: &mut String, x_label: &str, y_label: &str) {
    let (x0, y0, x1, y1) = (MARGIN, H - MARGIN, W - MARGIN, MARGIN);
    writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#).unwrap();
    writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 12.0,
        escape(x_label)
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    )
    .unwrap();
}

fn scale(v: f64, lo: f64, hi: f64, out_lo: f64, out_hi: f64) -> f64 {
    if hi > lo {
        out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)
    } else {
        (out_lo + out_hi) / 2.0
    }
}

fn histogram(xs: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut counts = vec![0.0; bins];
    if xs.is_empty() {
        return counts;
    }
    let width = (hi - lo) / bins as f64;
    for &x in xs {
        let k = if width > 0.0 { ((x - lo) / width).floor() as isize } else { 0 };
        counts[k.clamp(0, bins as isize - 1) as usize] += 1.0;
    }
    let n = xs.len() as f64;
    counts.iter().map(|c| c / n).collect()
}

/// Normalised histograms of a feature in the two classes with the
/// classifier threshold as a dashed line.
pub fn distribution_pair(feature: &str, low_ph: &[f64], normal: &[f64], threshold: f64) -> String {
    let all: Vec<f64> = low_ph.iter().chain(normal).copied().chain([threshold]).collect();
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bins = 25;
    let groups = [("low pH", low_ph, PALETTE[1]), ("normal pH", normal, PALETTE[0])];
    let hists: Vec<Vec<f64>> = groups.iter().map(|g| histogram(g.1, lo, hi, bins)).collect();
    let top = hists.iter().flatten().copied().fold(0.0, f64::max).max(1e-12);

    let mut s = open(W, H, feature);
    axes(&mut s, feature, "proportion");
    for ((label, _, colour), h) in groups.iter().zip(&hists) {
        let mut pts = String::new();
        for (k, &p) in h.iter().enumerate() {
            let xa = scale(k as f64, 0.0, bins as f64, MARGIN, W - MARGIN);
            let xb = scale(k as f64 + 1.0, 0.0, bins as f64, MARGIN, W - MARGIN);
            let y = scale(p, 0.0, top, H - MARGIN, MARGIN);
            write!(pts, "{xa:.2},{y:.2} {xb:.2},{y:.2} ").unwrap();
        }
        writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"><title>{}</title></polyline>"#,
            pts.trim_end(),
            escape(label)
        )
        .unwrap();
    }
    let tx = scale(threshold, lo, hi, MARGIN, W - MARGIN);
    writeln!(
        s,
        r#"<line x1="{tx:.2}" y1="{}" x2="{tx:.2}" y2="{}" stroke="black" stroke-dasharray="6,4"/>"#,
        H - MARGIN,
        MARGIN
    )
    .unwrap();
    for (i, (label, _, colour)) in groups.iter().enumerate() {
        let y = MARGIN + 14.0 * i as f64;
        writeln!(
            s,
            r#"<text x="{:.1}" y="{y:.1}" fill="{colour}" text-anchor="end">{}</text>"#,
            W - MARGIN,
            escape(label)
        )
        .unwrap();
    }
    close(s)
}

/// Leaves on the x axis in dendrogram order, merge height on the y axis.
pub fn dendrogram(d: &Dendrogram, title: &str) -> String {
    let n = d.n_leaves();
    let order = d.leaf_order();
    let bottom = H - 150.0;
    let max_h = d.heights().into_iter().fold(0.0, f64::max).max(1e-12);
    let mut x = vec![0.0; n + d.merges.len()];
    let mut y = vec![bottom; n + d.merges.len()];
    for (pos, &leaf) in order.iter().enumerate() {
        x[leaf] = scale(pos as f64 + 0.5, 0.0, n.max(1) as f64, MARGIN, W - MARGIN);
    }
    let mut s = open(W, H, title);
    for (step, m) in d.merges.iter().enumerate() {
        let id = n + step;
        let yh = scale(m.height, 0.0, max_h, bottom, MARGIN);
        x[id] = (x[m.left] + x[m.right]) / 2.0;
        y[id] = yh;
        writeln!(
            s,
            r#"<polyline points="{:.2},{:.2} {:.2},{yh:.2} {:.2},{yh:.2} {:.2},{:.2}" fill="none" stroke="black"/>"#,
            x[m.left], y[m.left], x[m.left], x[m.right], x[m.right], y[m.right]
        )
        .unwrap();
    }
    for &leaf in &order {
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" transform="rotate(60 {:.2} {:.2})">{}</text>"#,
            x[leaf],
            bottom + 10.0,
            x[leaf],
            bottom + 10.0,
            escape(&d.leaves[leaf])
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{MARGIN}" y="{:.1}">height 0 to {:.3} (1 - |R|)</text>"#,
        MARGIN - 10.0,
        max_h
    )
    .unwrap();
    close(s)
}

/// |R| heatmap, white (0) to dark blue (1).
pub fn heatmap(names: &[String], m: &SquareMatrix, title: &str) -> String {
    let n = m.dim();
    let cell = ((W - 2.0 * MARGIN - 150.0) / n.max(1) as f64).min(40.0);
    let origin = 150.0;
    let size = origin + cell * n as f64 + MARGIN;
    let mut s = open(size, size, title);
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j).clamp(0.0, 1.0);
            let shade = (255.0 * (1.0 - v)).round() as u8;
            writeln!(
                s,
                r##"<rect x="{:.2}" y="{:.2}" width="{cell:.2}" height="{cell:.2}" fill="#{shade:02x}{shade:02x}ff"><title>{:.3}</title></rect>"##,
                origin + cell * j as f64,
                origin + cell * i as f64,
                v
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            origin - 4.0,
            origin + cell * (i as f64 + 0.6),
            escape(&names[i])
        )
        .unwrap();
    }
    close(s)
}

/// One polyline of group event rates per outcome definition.
pub fn everest(r: &EverestResult) -> String {
    let top = r
        .outcomes
        .iter()
        .flat_map(|o| o.group_rates.iter().copied())
        .fold(0.0, f64::max)
        .max(1e-12);
    let mut s = open(W, H, &format!("Event rates by {} group", r.feature));
    axes(&mut s, &format!("{} group (ascending)", r.feature), "event rate");
    for (k, o) in r.outcomes.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = o
            .group_rates
            .iter()
            .enumerate()
            .map(|(g, &rate)| {
                let x = scale(g as f64 + 0.5, 0.0, r.n_group as f64, MARGIN, W - MARGIN);
                let y = scale(rate, 0.0, top, H - MARGIN, MARGIN);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"><title>{}</title></polyline>"#,
            pts.join(" "),
            escape(&o.name)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" fill="{colour}" text-anchor="end">{}</text>"#,
            W - MARGIN,
            MARGIN + 14.0 * k as f64,
            escape(&o.name)
        )
        .unwrap();
    }
    close(s)
}
