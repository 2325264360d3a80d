//! Self-contained SVG figures.
//!
//! Every datum is annotated with a `<text class="datum">` node carrying
//! its values in `data-*` attributes (10 significant digits), so figures
//! are verified by parsing those nodes back out, not by pixel comparison.
//!
//! Palette note: domains (or cases, in the sensitivity figure) are colored
//! in first-appearance order from a fixed six-color cycle; the assignment
//! is cosmetic but deterministic.

use std::fmt::Write as _;

use confound::numfmt::format_sig;

use crate::output::SIG_DIGITS;

/// One analyzed case as plotted by `e-vs-p` and `case-bars`.
#[derive(Debug, Clone)]
pub struct EvpPoint {
    pub case_id: String,
    pub domain: String,
    pub evalue: f64,
    pub p: f64,
}

/// One grid vertex as plotted by `prior-sensitivity`.
#[derive(Debug, Clone)]
pub struct SweepVertex {
    pub case_id: String,
    pub sigma_gamma: f64,
    pub p: f64,
}

const PALETTE: [&str; 6] = [
    "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#9d755d",
];

fn color(index: usize) -> &'static str {
    PALETTE[index % PALETTE.len()]
}

fn fmt10(x: f64) -> String {
    format_sig(x, SIG_DIGITS)
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

/// Maps a data value to a pixel coordinate; `r0 > r1` flips the axis,
/// which is how the y dimension handles SVG's downward-growing rasters.
struct LinScale {
    d0: f64,
    d1: f64,
    r0: f64,
    r1: f64,
}

impl LinScale {
    fn map(&self, v: f64) -> f64 {
        self.r0 + (v - self.d0) / (self.d1 - self.d0) * (self.r1 - self.r0)
    }
}

struct Frame {
    width: f64,
    height: f64,
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
}

impl Frame {
    fn plot_right(&self) -> f64 {
        self.width - self.right
    }
    fn plot_bottom(&self) -> f64 {
        self.height - self.bottom
    }
}

fn svg_open(frame: &Frame, title: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n",
            "<style>\n",
            ".axis {{ stroke: #333333; stroke-width: 1; }}\n",
            ".tick-label {{ font-size: 11px; fill: #333333; }}\n",
            ".axis-label {{ font-size: 13px; fill: #111111; }}\n",
            ".title {{ font-size: 15px; font-weight: bold; fill: #000000; }}\n",
            ".datum {{ font-size: 8px; font-family: monospace; fill: #555555; }}\n",
            ".trend {{ fill: none; stroke: #333333; stroke-width: 1.5; stroke-dasharray: 5 3; }}\n",
            ".case-line {{ fill: none; stroke-width: 2; }}\n",
            ".legend {{ font-size: 11px; fill: #111111; }}\n",
            ".case-label {{ font-size: 11px; fill: #111111; }}\n",
            "</style>\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n",
            "<text class=\"title\" x=\"{tx:.1}\" y=\"24\">{title}</text>\n"
        ),
        w = frame.width,
        h = frame.height,
        tx = frame.left,
        title = esc(title),
    )
}

fn ticks(d0: f64, d1: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| d0 + (d1 - d0) * i as f64 / (n - 1) as f64)
        .collect()
}

fn draw_axes(
    buf: &mut String,
    frame: &Frame,
    x: &LinScale,
    y: &LinScale,
    x_label: &str,
    y_label: &str,
) {
    let (pr, pb) = (frame.plot_right(), frame.plot_bottom());
    let _ = writeln!(
        buf,
        "<line class=\"axis\" x1=\"{l:.1}\" y1=\"{pb:.1}\" x2=\"{pr:.1}\" y2=\"{pb:.1}\"/>",
        l = frame.left
    );
    let _ = writeln!(
        buf,
        "<line class=\"axis\" x1=\"{l:.1}\" y1=\"{t:.1}\" x2=\"{l:.1}\" y2=\"{pb:.1}\"/>",
        l = frame.left,
        t = frame.top
    );
    for v in ticks(x.d0, x.d1, 5) {
        let px = x.map(v);
        let _ = writeln!(
            buf,
            "<line class=\"axis\" x1=\"{px:.1}\" y1=\"{pb:.1}\" x2=\"{px:.1}\" y2=\"{y2:.1}\"/>",
            y2 = pb + 5.0
        );
        let _ = writeln!(
            buf,
            "<text class=\"tick-label\" x=\"{px:.1}\" y=\"{ty:.1}\" text-anchor=\"middle\">{}</text>",
            esc(&format_sig(v, 4)),
            ty = pb + 18.0
        );
    }
    for v in ticks(y.d0, y.d1, 5) {
        let py = y.map(v);
        let _ = writeln!(
            buf,
            "<line class=\"axis\" x1=\"{x2:.1}\" y1=\"{py:.1}\" x2=\"{l:.1}\" y2=\"{py:.1}\"/>",
            x2 = frame.left - 5.0,
            l = frame.left
        );
        let _ = writeln!(
            buf,
            "<text class=\"tick-label\" x=\"{tx:.1}\" y=\"{ty:.1}\" text-anchor=\"end\">{}</text>",
            esc(&format_sig(v, 4)),
            tx = frame.left - 8.0,
            ty = py + 4.0
        );
    }
    let _ = writeln!(
        buf,
        "<text class=\"axis-label\" x=\"{cx:.1}\" y=\"{cy:.1}\" text-anchor=\"middle\">{}</text>",
        esc(x_label),
        cx = (frame.left + pr) / 2.0,
        cy = frame.height - 12.0
    );
    let _ = writeln!(
        buf,
        "<text class=\"axis-label\" transform=\"translate(16,{cy:.1}) rotate(-90)\" text-anchor=\"middle\">{}</text>",
        esc(y_label),
        cy = (frame.top + pb) / 2.0
    );
}

fn median_of(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Assigns each label a palette color by first appearance; returns the
/// labels in that order with their colors.
fn first_appearance_colors<'a>(labels: impl Iterator<Item = &'a str>) -> Vec<(String, &'static str)> {
    let mut order: Vec<(String, &'static str)> = Vec::new();
    for label in labels {
        if !order.iter().any(|(seen, _)| seen == label) {
            let c = color(order.len());
            order.push((label.to_string(), c));
        }
    }
    order
}

fn legend(buf: &mut String, frame: &Frame, entries: &[(String, &'static str)]) {
    let x = frame.plot_right() + 14.0;
    for (i, (label, fill)) in entries.iter().enumerate() {
        let y = frame.top + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            buf,
            "<rect x=\"{x:.1}\" y=\"{ry:.1}\" width=\"10\" height=\"10\" fill=\"{fill}\"/>",
            ry = y - 9.0
        );
        let _ = writeln!(
            buf,
            "<text class=\"legend\" x=\"{tx:.1}\" y=\"{y:.1}\">{}</text>",
            esc(label),
            tx = x + 14.0
        );
    }
}

/// Scatter of (E-value, exceedance probability) colored by domain, with a
/// window-3 moving-median trend over the E-value-sorted points.
pub fn e_vs_p(points: &[EvpPoint]) -> String {
    let frame = Frame {
        width: 760.0,
        height: 500.0,
        left: 70.0,
        right: 180.0,
        top: 40.0,
        bottom: 55.0,
    };
    let max_e = points.iter().map(|p| p.evalue).fold(1.0_f64, f64::max);
    let x = LinScale {
        d0: 1.0,
        d1: max_e * 1.05,
        r0: frame.left,
        r1: frame.plot_right(),
    };
    let y = LinScale {
        d0: 0.0,
        d1: 1.0,
        r0: frame.plot_bottom(),
        r1: frame.top,
    };

    let mut buf = svg_open(&frame, "Exceedance probability against E-value");
    draw_axes(
        &mut buf,
        &frame,
        &x,
        &y,
        "E-value (confounding strength needed to explain the estimate away)",
        "P(confounding strength exceeds threshold)",
    );

    let domains = first_appearance_colors(points.iter().map(|p| p.domain.as_str()));
    let fill_for = |domain: &str| -> &'static str {
        domains
            .iter()
            .find(|(d, _)| d == domain)
            .map(|(_, c)| *c)
            .unwrap_or("#000000")
    };

    // moving median over E-value order; window of 3 truncated at the ends
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .evalue
            .partial_cmp(&points[b].evalue)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| points[a].case_id.cmp(&points[b].case_id))
    });
    if order.len() >= 2 {
        let sorted_p: Vec<f64> = order.iter().map(|&i| points[i].p).collect();
        let mut vertices = String::new();
        for (k, &i) in order.iter().enumerate() {
            let lo = k.saturating_sub(1);
            let hi = (k + 1).min(order.len() - 1);
            let med = median_of(sorted_p[lo..=hi].to_vec());
            let _ = write!(
                vertices,
                "{:.1},{:.1} ",
                x.map(points[i].evalue),
                y.map(med)
            );
        }
        let _ = writeln!(
            buf,
            "<polyline class=\"trend\" points=\"{}\"/>",
            vertices.trim_end()
        );
    }

    for p in points {
        let (px, py) = (x.map(p.evalue), y.map(p.p));
        let _ = writeln!(
            buf,
            "<circle cx=\"{px:.1}\" cy=\"{py:.1}\" r=\"4\" fill=\"{fill}\" stroke=\"#ffffff\"/>",
            fill = fill_for(&p.domain)
        );
        let _ = writeln!(
            buf,
            "<text class=\"datum\" data-case=\"{id}\" data-evalue=\"{ev}\" data-p=\"{pv}\" x=\"{tx:.1}\" y=\"{ty:.1}\">{pv}</text>",
            id = esc(&p.case_id),
            ev = esc(&fmt10(p.evalue)),
            pv = esc(&fmt10(p.p)),
            tx = px + 6.0,
            ty = py - 6.0
        );
    }

    legend(&mut buf, &frame, &domains);
    buf.push_str("</svg>\n");
    buf
}

/// Horizontal bars sorted most-explainable first (p descending, ties by
/// case id) — the same order the analysis ranking produces.
pub fn case_bars(points: &[EvpPoint]) -> String {
    let frame = Frame {
        width: 760.0,
        height: (130 + 34 * points.len().max(1)) as f64,
        left: 170.0,
        right: 150.0,
        top: 40.0,
        bottom: 55.0,
    };
    let x = LinScale {
        d0: 0.0,
        d1: 1.0,
        r0: frame.left,
        r1: frame.plot_right(),
    };
    let y = LinScale {
        d0: 0.0,
        d1: 1.0,
        r0: frame.plot_bottom(),
        r1: frame.top,
    };

    let mut ordered: Vec<&EvpPoint> = points.iter().collect();
    ordered.sort_by(|a, b| {
        b.p.partial_cmp(&a.p)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.case_id.cmp(&b.case_id))
    });

    let mut buf = svg_open(&frame, "Cases ranked by explainability");
    draw_axes(
        &mut buf,
        &frame,
        &x,
        &y,
        "P(confounding strength exceeds threshold)",
        "",
    );

    let domains = first_appearance_colors(ordered.iter().map(|p| p.domain.as_str()));
    let band = (frame.plot_bottom() - frame.top) / ordered.len().max(1) as f64;
    for (i, p) in ordered.iter().enumerate() {
        let top = frame.top + band * i as f64 + 0.15 * band;
        let height = 0.7 * band;
        let end = x.map(p.p);
        let fill = domains
            .iter()
            .find(|(d, _)| d == &p.domain)
            .map(|(_, c)| *c)
            .unwrap_or("#000000");
        let _ = writeln!(
            buf,
            "<rect x=\"{x0:.1}\" y=\"{top:.1}\" width=\"{w:.1}\" height=\"{height:.1}\" fill=\"{fill}\"/>",
            x0 = frame.left,
            w = (end - frame.left).max(0.5)
        );
        let mid = top + height / 2.0 + 4.0;
        let _ = writeln!(
            buf,
            "<text class=\"case-label\" x=\"{tx:.1}\" y=\"{mid:.1}\" text-anchor=\"end\">{}</text>",
            esc(&p.case_id),
            tx = frame.left - 8.0
        );
        let _ = writeln!(
            buf,
            "<text class=\"datum\" data-case=\"{id}\" data-evalue=\"{ev}\" data-p=\"{pv}\" x=\"{tx:.1}\" y=\"{mid:.1}\">{pv}</text>",
            id = esc(&p.case_id),
            ev = esc(&fmt10(p.evalue)),
            pv = esc(&fmt10(p.p)),
            tx = end + 6.0
        );
    }

    legend(&mut buf, &frame, &domains);
    buf.push_str("</svg>\n");
    buf
}

/// One polyline per case across the bias-prior grid.
pub fn prior_sensitivity(rows: &[SweepVertex]) -> String {
    let frame = Frame {
        width: 760.0,
        height: 500.0,
        left: 70.0,
        right: 180.0,
        top: 40.0,
        bottom: 55.0,
    };
    let (mut min_sg, mut max_sg) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in rows {
        min_sg = min_sg.min(r.sigma_gamma);
        max_sg = max_sg.max(r.sigma_gamma);
    }
    let pad = if max_sg > min_sg {
        0.05 * (max_sg - min_sg)
    } else {
        0.1 * max_sg.max(1.0)
    };
    let x = LinScale {
        d0: min_sg - pad,
        d1: max_sg + pad,
        r0: frame.left,
        r1: frame.plot_right(),
    };
    let y = LinScale {
        d0: 0.0,
        d1: 1.0,
        r0: frame.plot_bottom(),
        r1: frame.top,
    };

    let mut buf = svg_open(&frame, "Prior sensitivity of the exceedance probability");
    draw_axes(
        &mut buf,
        &frame,
        &x,
        &y,
        "bias prior scale (sigma_gamma)",
        "P(confounding strength exceeds threshold)",
    );

    let cases = first_appearance_colors(rows.iter().map(|r| r.case_id.as_str()));
    for (case, fill) in &cases {
        let mut vertices: Vec<&SweepVertex> =
            rows.iter().filter(|r| &r.case_id == case).collect();
        vertices.sort_by(|a, b| {
            a.sigma_gamma
                .partial_cmp(&b.sigma_gamma)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let path: Vec<String> = vertices
            .iter()
            .map(|v| format!("{:.1},{:.1}", x.map(v.sigma_gamma), y.map(v.p)))
            .collect();
        let _ = writeln!(
            buf,
            "<polyline class=\"case-line\" data-case=\"{id}\" stroke=\"{fill}\" points=\"{}\"/>",
            path.join(" "),
            id = esc(case)
        );
        for v in &vertices {
            let (px, py) = (x.map(v.sigma_gamma), y.map(v.p));
            let _ = writeln!(
                buf,
                "<circle cx=\"{px:.1}\" cy=\"{py:.1}\" r=\"3\" fill=\"{fill}\"/>"
            );
            let _ = writeln!(
                buf,
                "<text class=\"datum\" data-case=\"{id}\" data-sigma-gamma=\"{sg}\" data-p=\"{pv}\" x=\"{tx:.1}\" y=\"{ty:.1}\">{pv}</text>",
                id = esc(case),
                sg = esc(&fmt10(v.sigma_gamma)),
                pv = esc(&fmt10(v.p)),
                tx = px + 5.0,
                ty = py - 5.0
            );
        }
    }

    legend(&mut buf, &frame, &cases);
    buf.push_str("</svg>\n");
    buf
}
