//! Static SVG scatter plots of word maps.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const DEFAULT_POINT_COLOR: &str = "#7f8c9a";

/// Colors handed out to highlight groups in order.
pub const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#17becf", "#8c564b", "#e377c2",
];

#[derive(Clone, Debug, PartialEq)]
pub struct PlotPoint {
    pub label: String,
    /// Normalized to `[0, 1]`.
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HighlightGroup {
    pub name: String,
    pub color: String,
    pub labels: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelPolicy {
    All,
    /// Label the first `n` points; points are expected in frequency order.
    TopN(usize),
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
    pub points: Vec<PlotPoint>,
    pub groups: Vec<HighlightGroup>,
    pub label_policy: LabelPolicy,
}

impl Default for PlotSpec {
    fn default() -> Self {
        PlotSpec {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            width: 1000,
            height: 1000,
            points: Vec::new(),
            groups: Vec::new(),
            label_policy: LabelPolicy::TopN(100),
        }
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

impl PlotSpec {
    fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Argument("canvas dimensions must be positive".into()));
        }
        let mut seen = HashSet::new();
        for p in &self.points {
            if !seen.insert(p.label.as_str()) {
                return Err(Error::Validation(format!("duplicate label {:?}", p.label)));
            }
        }
        for g in &self.groups {
            if let Some(missing) = g.labels.iter().find(|l| !seen.contains(l.as_str())) {
                return Err(Error::Validation(format!(
                    "highlight group {:?} references unknown label {missing:?}",
                    g.name
                )));
            }
        }
        Ok(())
    }
}

/// Renders `spec` as an SVG 1.1 document. The plot area keeps a 5% margin on
/// every side; y grows upward. Output is byte-identical for identical specs.
pub fn render_svg(spec: &PlotSpec) -> Result<String> {
    spec.validate()?;
    let (w, h) = (spec.width as f64, spec.height as f64);
    let (mx, my) = (0.05 * w, 0.05 * h);
    let to_px = |p: &PlotPoint| (mx + p.x * (w - 2.0 * mx), h - my - p.y * (h - 2.0 * my));

    let mut group_of: HashMap<&str, usize> = HashMap::new();
    for (gi, g) in spec.groups.iter().enumerate() {
        for l in &g.labels {
            group_of.entry(l.as_str()).or_insert(gi);
        }
    }
    let labeled = |i: usize, p: &PlotPoint| match spec.label_policy {
        LabelPolicy::All => true,
        LabelPolicy::TopN(n) => i < n || group_of.contains_key(p.label.as_str()),
        LabelPolicy::None => false,
    };

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        spec.width, spec.height, spec.width, spec.height
    );
    s.push_str("<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    let _ = writeln!(
        s,
        "<rect x=\"{mx:.3}\" y=\"{my:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"none\" stroke=\"#cccccc\"/>",
        w - 2.0 * mx,
        h - 2.0 * my
    );
    if !spec.title.is_empty() {
        let _ = writeln!(
            s,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
            w / 2.0,
            my * 0.7,
            escape(&spec.title)
        );
    }
    if !spec.x_label.is_empty() {
        let _ = writeln!(
            s,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            w / 2.0,
            h - my * 0.3,
            escape(&spec.x_label)
        );
    }
    if !spec.y_label.is_empty() {
        let _ = writeln!(
            s,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 {:.3} {:.3})\">{}</text>",
            mx * 0.5,
            h / 2.0,
            mx * 0.5,
            h / 2.0,
            escape(&spec.y_label)
        );
    }

    // Plain points first so highlighted ones are drawn on top.
    s.push_str("<g id=\"points\">\n");
    let plain = spec.points.iter().filter(|p| !group_of.contains_key(p.label.as_str()));
    let highlighted = spec.points.iter().filter(|p| group_of.contains_key(p.label.as_str()));
    for p in plain.chain(highlighted) {
        let (x, y) = to_px(p);
        let (color, r) = match group_of.get(p.label.as_str()) {
            Some(&gi) => (spec.groups[gi].color.as_str(), 3.5),
            None => (DEFAULT_POINT_COLOR, 2.0),
        };
        let _ = writeln!(s, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{r:.1}\" fill=\"{}\"/>", escape(color));
    }
    s.push_str("</g>\n");

    s.push_str("<g id=\"labels\" font-family=\"sans-serif\" font-size=\"9\" fill=\"#333333\">\n");
    for (i, p) in spec.points.iter().enumerate() {
        if labeled(i, p) {
            let (x, y) = to_px(p);
            let _ = writeln!(s, "<text x=\"{:.3}\" y=\"{:.3}\">{}</text>", x + 3.0, y - 3.0, escape(&p.label));
        }
    }
    s.push_str("</g>\n");

    if !spec.groups.is_empty() {
        s.push_str("<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n");
        for (gi, g) in spec.groups.iter().enumerate() {
            let y = my + 14.0 + 16.0 * gi as f64;
            let _ = writeln!(
                s,
                "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"10\" height=\"10\" fill=\"{}\"/>",
                mx + 8.0,
                y - 9.0,
                escape(&g.color)
            );
            let _ = writeln!(
                s,
                "<text x=\"{:.3}\" y=\"{y:.3}\">{} ({})</text>",
                mx + 24.0,
                escape(&g.name),
                g.labels.len()
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    Ok(s)
}
