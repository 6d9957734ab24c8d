//! Minimal standalone SVG charts: heatmaps, line charts, bar charts.

use std::fmt::Write;

pub const MISSING_FILL: &str = "#3a3a3a";
const FONT: &str = "font-family=\"Helvetica, Arial, sans-serif\" font-size=\"11\"";
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// How heatmap values map to colours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ColorScale {
    /// Light to dark over `[0, max]`.
    Sequential { max: f64 },
    /// Red below zero, green above, white at zero, saturating at `±limit`.
    Diverging { limit: f64 },
}

fn lerp(a: (f64, f64, f64), b: (f64, f64, f64), t: f64) -> String {
    let c = |x: f64, y: f64| (x + (y - x) * t).round().clamp(0.0, 255.0) as u8;
    format!("#{:02x}{:02x}{:02x}", c(a.0, b.0), c(a.1, b.1), c(a.2, b.2))
}

impl ColorScale {
    pub fn color(&self, v: f64) -> String {
        match *self {
            ColorScale::Sequential { max } => {
                let t = if max > 0.0 { (v / max).clamp(0.0, 1.0) } else { 0.0 };
                lerp((255.0, 247.0, 236.0), (127.0, 0.0, 0.0), t)
            }
            ColorScale::Diverging { limit } => {
                let t = if limit > 0.0 { (v / limit).clamp(-1.0, 1.0) } else { 0.0 };
                if t >= 0.0 {
                    lerp((255.0, 255.0, 255.0), (26.0, 152.0, 80.0), t)
                } else {
                    lerp((255.0, 255.0, 255.0), (215.0, 48.0, 39.0), -t)
                }
            }
        }
    }

    fn ends(&self) -> (f64, f64) {
        match *self {
            ColorScale::Sequential { max } => (0.0, max),
            ColorScale::Diverging { limit } => (-limit, limit),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open(width: f64, height: f64, title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"20\" text-anchor=\"middle\" {FONT} font-size=\"14\">{}</text>",
        width / 2.0,
        escape(title)
    );
    s
}

fn text(s: &mut String, x: f64, y: f64, anchor: &str, label: &str) {
    let _ = writeln!(
        s,
        "<text x=\"{x:.1}\" y=\"{y:.1}\" text-anchor=\"{anchor}\" {FONT}>{}</text>",
        escape(label)
    );
}

pub struct Heatmap<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x_ticks: Vec<String>,
    /// Bottom row first.
    pub y_ticks: Vec<String>,
    /// `values[x][y]`; `None` cells are drawn as missing.
    pub values: Vec<Vec<Option<f64>>>,
    pub scale: ColorScale,
    pub legend_label: &'a str,
}

pub fn heatmap(h: &Heatmap<'_>) -> String {
    let (cw, ch) = (22.0, 28.0);
    let (left, top) = (70.0, 40.0);
    let cols = h.values.len();
    let rows = h.y_ticks.len();
    let plot_w = cw * cols as f64;
    let plot_h = ch * rows as f64;
    let width = left + plot_w + 130.0;
    let height = top + plot_h + 60.0;
    let mut s = open(width, height, h.title);
    for (x, column) in h.values.iter().enumerate() {
        for (y, v) in column.iter().enumerate() {
            let fill = v.map_or(MISSING_FILL.to_string(), |v| h.scale.color(v));
            let px = left + x as f64 * cw;
            let py = top + (rows - 1 - y) as f64 * ch;
            let _ = write!(
                s,
                "<rect x=\"{px:.1}\" y=\"{py:.1}\" width=\"{cw:.1}\" height=\"{ch:.1}\" fill=\"{fill}\" stroke=\"#ffffff\" stroke-width=\"0.5\">"
            );
            let tip = v.map_or("missing".to_string(), |v| format!("{v:.3}"));
            let _ = writeln!(s, "<title>{} / {}: {tip}</title></rect>", h.x_ticks[x], h.y_ticks[y]);
        }
    }
    for (x, t) in h.x_ticks.iter().enumerate() {
        if x % 5 == 0 || x + 1 == cols {
            text(&mut s, left + (x as f64 + 0.5) * cw, top + plot_h + 14.0, "middle", t);
        }
    }
    for (y, t) in h.y_ticks.iter().enumerate() {
        text(&mut s, left - 6.0, top + (rows - 1 - y) as f64 * ch + ch / 2.0 + 4.0, "end", t);
    }
    text(&mut s, left + plot_w / 2.0, top + plot_h + 34.0, "middle", h.x_label);
    let _ = writeln!(
        s,
        "<text transform=\"translate(16,{:.1}) rotate(-90)\" text-anchor=\"middle\" {FONT}>{}</text>",
        top + plot_h / 2.0,
        escape(h.y_label)
    );

    // colour bar
    let bx = left + plot_w + 30.0;
    let steps = 20;
    let bh = plot_h * 0.7 / steps as f64;
    let (lo, hi) = h.scale.ends();
    for k in 0..steps {
        let v = hi - (hi - lo) * (k as f64 + 0.5) / steps as f64;
        let _ = writeln!(
            s,
            "<rect x=\"{bx:.1}\" y=\"{:.1}\" width=\"16\" height=\"{bh:.2}\" fill=\"{}\"/>",
            top + k as f64 * bh,
            h.scale.color(v)
        );
    }
    text(&mut s, bx + 22.0, top + 8.0, "start", &format!("{hi:.2}"));
    text(&mut s, bx + 22.0, top + plot_h * 0.7, "start", &format!("{lo:.2}"));
    text(&mut s, bx, top - 6.0, "start", h.legend_label);
    let my = top + plot_h * 0.7 + 16.0;
    let _ = writeln!(
        s,
        "<rect x=\"{bx:.1}\" y=\"{my:.1}\" width=\"16\" height=\"12\" fill=\"{MISSING_FILL}\"/>"
    );
    text(&mut s, bx + 22.0, my + 10.0, "start", "missing");
    s.push_str("</svg>\n");
    s
}

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

pub struct LineChart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub series: Vec<Series<'a>>,
}

fn nice_max(v: f64) -> f64 {
    if !(v > 0.0) {
        return 1.0;
    }
    let mag = 10f64.powf(v.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&m| m >= v)
        .unwrap_or(10.0 * mag)
}

fn axes(s: &mut String, left: f64, top: f64, w: f64, h: f64, x_max: f64, y_max: f64, labels: (&str, &str)) {
    let _ = writeln!(
        s,
        "<path d=\"M{left:.1},{top:.1} V{:.1} H{:.1}\" fill=\"none\" stroke=\"black\"/>",
        top + h,
        left + w
    );
    for k in 0..=5 {
        let f = k as f64 / 5.0;
        let y = top + h - f * h;
        let _ = writeln!(
            s,
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{left:.1}\" y2=\"{y:.1}\" stroke=\"black\"/>",
            left - 4.0
        );
        text(s, left - 6.0, y + 4.0, "end", &format!("{:.3}", f * y_max));
        let x = left + f * w;
        text(s, x, top + h + 14.0, "middle", &format!("{:.1}", f * x_max));
    }
    text(s, left + w / 2.0, top + h + 34.0, "middle", labels.0);
    let _ = writeln!(
        s,
        "<text transform=\"translate(14,{:.1}) rotate(-90)\" text-anchor=\"middle\" {FONT}>{}</text>",
        top + h / 2.0,
        escape(labels.1)
    );
}

pub fn line_chart(c: &LineChart<'_>) -> String {
    let (left, top, w, h) = (70.0, 40.0, 480.0, 280.0);
    let mut s = open(left + w + 150.0, top + h + 60.0, c.title);
    let pts = c.series.iter().flat_map(|s| s.points.iter());
    let x_max = nice_max(pts.clone().map(|p| p.0).fold(0.0, f64::max));
    let y_max = nice_max(pts.map(|p| p.1).fold(0.0, f64::max));
    axes(&mut s, left, top, w, h, x_max, y_max, (c.x_label, c.y_label));
    for (k, series) in c.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut d = String::new();
        for (i, (x, y)) in series.points.iter().enumerate() {
            let px = left + x / x_max * w;
            let py = top + h - y / y_max * h;
            let _ = write!(d, "{}{px:.1},{py:.1}", if i == 0 { "M" } else { " L" });
            let _ = writeln!(s, "<circle cx=\"{px:.1}\" cy=\"{py:.1}\" r=\"3\" fill=\"{color}\"/>");
        }
        let _ = writeln!(s, "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>");
        let ly = top + 10.0 + 18.0 * k as f64;
        let lx = left + w + 20.0;
        let _ = writeln!(
            s,
            "<line x1=\"{lx:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            lx + 20.0
        );
        text(&mut s, lx + 26.0, ly + 4.0, "start", series.label);
    }
    s.push_str("</svg>\n");
    s
}

pub struct BarChart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub bars: Vec<(String, f64)>,
}

pub fn bar_chart(c: &BarChart<'_>) -> String {
    let (left, top, w, h) = (80.0, 40.0, 560.0, 280.0);
    let mut s = open(left + w + 30.0, top + h + 60.0, c.title);
    let y_max = nice_max(c.bars.iter().map(|b| b.1).fold(0.0, f64::max));
    let n = c.bars.len().max(1);
    let bw = w / n as f64;
    let _ = writeln!(
        s,
        "<path d=\"M{left:.1},{top:.1} V{:.1} H{:.1}\" fill=\"none\" stroke=\"black\"/>",
        top + h,
        left + w
    );
    for k in 0..=5 {
        let f = k as f64 / 5.0;
        let y = top + h - f * h;
        text(&mut s, left - 6.0, y + 4.0, "end", &format!("{:.0}", f * y_max));
    }
    for (i, (label, v)) in c.bars.iter().enumerate() {
        let bh = v / y_max * h;
        let x = left + i as f64 * bw;
        let _ = writeln!(
            s,
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{bh:.1}\" fill=\"{}\"><title>{}: {v}</title></rect>",
            x + 1.0,
            top + h - bh,
            (bw - 2.0).max(1.0),
            PALETTE[0],
            escape(label)
        );
        if i % 5 == 0 || i + 1 == n {
            text(&mut s, x + bw / 2.0, top + h + 14.0, "middle", label);
        }
    }
    text(&mut s, left + w / 2.0, top + h + 34.0, "middle", c.x_label);
    let _ = writeln!(
        s,
        "<text transform=\"translate(14,{:.1}) rotate(-90)\" text-anchor=\"middle\" {FONT}>{}</text>",
        top + h / 2.0,
        escape(c.y_label)
    );
    s.push_str("</svg>\n");
    s
}
