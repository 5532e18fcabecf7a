//! Text and SVG renderings of [`ExtChart`]s, and the transcribed charts of
//! the two published figures.
//!
//! Chart key: black dots are copies of M2, vertical lines are `h0`, slope 1
//! is `h1`, slope 1/3 is `h2`. A line hitting τ times a generator is drawn
//! in the twist color. Copies of `M2/τ` are drawn in the tower color, and an
//! `h1` string of them that runs off the chart ends in an arrow.

use crate::ext::{Dot, Edge, ExtChart, HLabel, Torsion};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt::{self, Write};
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq)]
pub struct ChartStyle {
    /// Pixels per unit of `s` and `f`.
    pub unit: f64,
    pub radius: f64,
    pub free_color: String,
    pub torsion_color: String,
    /// Fill of `M2/τ^r` dots with `r > 1`; `M2/τ` dots are filled with
    /// `torsion_color`.
    pub deep_torsion_fill: String,
    pub line_color: String,
    pub twist_color: String,
    pub tower_color: String,
    pub line_width: f64,
}

impl Default for ChartStyle {
    fn default() -> Self {
        ChartStyle {
            unit: 40.0,
            radius: 4.4,
            free_color: "black".into(),
            torsion_color: "red".into(),
            deep_torsion_fill: "white".into(),
            line_color: "black".into(),
            twist_color: "blue".into(),
            tower_color: "red".into(),
            line_width: 1.2,
        }
    }
}

fn glyph(d: &Dot) -> String {
    match d.torsion {
        Torsion::Free => "*".into(),
        Torsion::Finite(r) => r.to_string(),
    }
}

/// Fixed-width grid with one column per stem and one row per filtration,
/// highest filtration on top. A free class is `*`, a copy of `M2/τ^r` is
/// `r`; classes in one bidegree are joined with `,` in weight order.
/// Empty bidegrees are `.`.
///
/// ```
/// use motivic_ext::chartio::render_text;
/// use motivic_ext::ext::{Dot, ExtChart, Torsion};
///
/// let mut c = ExtChart::empty("M2", "M2", 1, 1);
/// c.dots.push(Dot { s: 0, f: 0, w: 0, torsion: Torsion::Free });
/// assert_eq!(render_text(&c), "f\\s  0  1\n  1  .  .\n  0  *  .\n");
/// ```
pub fn render_text(chart: &ExtChart) -> String {
    let b = chart.meta.bounds;
    let min_s = chart.dots.iter().map(|d| d.s).min().map_or(0, |s| s.min(0));
    let min_f = chart.dots.iter().map(|d| d.f).min().map_or(0, |f| f.min(0));
    let max_s = chart.dots.iter().map(|d| d.s).max().map_or(b.max_s, |s| s.max(b.max_s));
    let max_f = chart.dots.iter().map(|d| d.f).max().map_or(b.max_f, |f| f.max(b.max_f));
    let mut cells: BTreeMap<(i32, i32), Vec<String>> = BTreeMap::new();
    for d in &chart.dots {
        cells.entry((d.s, d.f)).or_default().push(glyph(d));
    }
    let cells: BTreeMap<_, String> = cells.into_iter().map(|(k, v)| (k, v.join(","))).collect();
    let width = cells
        .values()
        .map(|g| g.chars().count())
        .chain((min_s..=max_s).map(|s| s.to_string().len()))
        .max()
        .unwrap_or(1)
        + 2;
    let label = (min_f..=max_f).map(|f| f.to_string().len()).max().unwrap_or(1).max(3);
    let mut out = String::new();
    write!(out, "{:<label$}", "f\\s").unwrap();
    for s in min_s..=max_s {
        write!(out, "{s:>width$}").unwrap();
    }
    out.push('\n');
    for f in (min_f..=max_f).rev() {
        write!(out, "{f:>label$}").unwrap();
        for s in min_s..=max_s {
            write!(out, "{:>width$}", cells.get(&(s, f)).map_or(".", String::as_str)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// SVG 1.1 drawing of the chart. Classes sharing a bidegree are spread
/// horizontally; each dot carries its `(s, f, w)` and torsion in a
/// `<title>` shown on hover. Output order follows the chart's own order.
pub fn render_svg(chart: &ExtChart, style: &ChartStyle) -> String {
    let b = chart.meta.bounds;
    let max_s = chart.dots.iter().map(|d| d.s).max().map_or(b.max_s, |s| s.max(b.max_s));
    let max_f = chart.dots.iter().map(|d| d.f).max().map_or(b.max_f, |f| f.max(b.max_f));
    let u = style.unit;
    let (width, height) = ((max_s + 2) as f64 * u, (max_f + 2) as f64 * u);

    // position of every dot, spreading classes in one bidegree
    let mut groups: BTreeMap<(i32, i32), Vec<usize>> = BTreeMap::new();
    for (i, d) in chart.dots.iter().enumerate() {
        groups.entry((d.s, d.f)).or_default().push(i);
    }
    let mut pos = vec![(0.0, 0.0); chart.dots.len()];
    let mut by_coords: BTreeMap<[i32; 3], Vec<usize>> = BTreeMap::new();
    for ((s, f), ids) in &groups {
        let n = ids.len() as f64;
        for (k, &i) in ids.iter().enumerate() {
            let dx = (k as f64 - (n - 1.0) / 2.0) * 0.3;
            pos[i] = ((*s as f64 + 1.0 + dx) * u, height - (*f as f64 + 1.0) * u);
            by_coords.entry(chart.dots[i].coords()).or_default().push(i);
        }
    }
    // an edge attaches to the first dot with matching (s, f, w), preferring
    // the one whose torsion fits the edge
    let find = |p: [i32; 3], torsion: Option<bool>| -> Option<usize> {
        let ids = by_coords.get(&p)?;
        ids.iter()
            .copied()
            .find(|&i| torsion.is_none_or(|t| (chart.dots[i].torsion != Torsion::Free) == t))
            .or_else(|| ids.first().copied())
    };
    let is_torsion = |p: [i32; 3]| by_coords.get(&p).is_some_and(|ids| ids.iter().all(|&i| chart.dots[i].torsion != Torsion::Free));

    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(out, "<title>Ext({}, {})</title>", escape(&chart.meta.source), escape(&chart.meta.target)).unwrap();
    writeln!(
        out,
        r#"<defs><marker id="tower" markerWidth="8" markerHeight="8" refX="6" refY="4" orient="auto"><path d="M0,0 L8,4 L0,8 z" fill="{}"/></marker></defs>"#,
        style.tower_color
    )
    .unwrap();

    // grid and axis labels
    writeln!(out, r##"<g id="grid" stroke="#ddd" stroke-width="0.5">"##).unwrap();
    for s in 0..=max_s {
        let x = (s as f64 + 1.0) * u;
        writeln!(out, r#"<line x1="{x}" y1="0" x2="{x}" y2="{}"/>"#, height - u / 2.0).unwrap();
    }
    for f in 0..=max_f {
        let y = height - (f as f64 + 1.0) * u;
        writeln!(out, r#"<line x1="{}" y1="{y}" x2="{width}" y2="{y}"/>"#, u / 2.0).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, r#"<g id="labels" font-family="sans-serif" font-size="{}" text-anchor="middle">"#, u / 3.0).unwrap();
    for s in (0..=max_s).step_by(2) {
        writeln!(out, r#"<text x="{}" y="{}">{s}</text>"#, (s as f64 + 1.0) * u, height - u / 4.0).unwrap();
    }
    for f in (0..=max_f).step_by(2) {
        writeln!(out, r#"<text x="{}" y="{}">{f}</text>"#, u / 3.0, height - (f as f64 + 1.0) * u + u / 9.0).unwrap();
    }
    writeln!(out, "</g>").unwrap();

    writeln!(out, r#"<g id="edges" stroke-width="{}">"#, style.line_width).unwrap();
    for e in &chart.edges {
        let tower = e.label == HLabel::H1 && is_torsion(e.to);
        let (Some(a), Some(z)) = (find(e.from, Some(tower)), find(e.to, Some(tower))) else { continue };
        let color = if e.tau_twist {
            &style.twist_color
        } else if tower {
            &style.tower_color
        } else {
            &style.line_color
        };
        writeln!(
            out,
            r#"<line class="{}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}"><title>{} {} → {}</title></line>"#,
            e.label,
            pos[a].0,
            pos[a].1,
            pos[z].0,
            pos[z].1,
            e.label,
            triple(e.from),
            triple(e.to)
        )
        .unwrap();
    }
    // towers running off the chart
    for (i, d) in chart.dots.iter().enumerate() {
        if d.torsion == Torsion::Free || d.s < max_s && d.f < max_f {
            continue;
        }
        let continues = chart.edges.iter().any(|e| e.label == HLabel::H1 && e.to == d.coords() && is_torsion(e.from));
        if continues {
            let (x, y) = pos[i];
            writeln!(
                out,
                r#"<line class="tower" x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" marker-end="url(#tower)"/>"#,
                x + 0.7 * u,
                y - 0.7 * u,
                style.tower_color
            )
            .unwrap();
        }
    }
    writeln!(out, "</g>").unwrap();

    writeln!(out, r#"<g id="dots">"#).unwrap();
    for (i, d) in chart.dots.iter().enumerate() {
        let (x, y) = pos[i];
        let (stroke, fill) = match d.torsion {
            Torsion::Free => (&style.free_color, &style.free_color),
            Torsion::Finite(1) => (&style.torsion_color, &style.torsion_color),
            Torsion::Finite(_) => (&style.torsion_color, &style.deep_torsion_fill),
        };
        writeln!(
            out,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{}" stroke="{stroke}" fill="{fill}" data-s="{}" data-f="{}" data-w="{}" data-torsion="{}"><title>{} torsion {}</title></circle>"#,
            style.radius,
            d.s,
            d.f,
            d.w,
            d.torsion,
            triple(d.coords()),
            d.torsion
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, "</svg>").unwrap();
    out
}

fn triple(p: [i32; 3]) -> String {
    format!("({},{},{})", p[0], p[1], p[2])
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    /// `Ext_A(A(0), M2)`.
    Fig2,
    /// `Ext_A(A(0), Cη)`.
    Fig3,
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            _ => Err(format!("unknown figure {s:?} (expected fig2 or fig3)")),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        })
    }
}

/// Transcription remark attached to one dot.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct Note {
    pub at: [i32; 3],
    pub text: String,
}

#[derive(Clone, Debug)]
pub struct Golden {
    pub chart: ExtChart,
    pub notes: Vec<Note>,
}

pub const FIG2_JSON: &str = include_str!("golden/fig2.json");
pub const FIG3_JSON: &str = include_str!("golden/fig3.json");

/// The transcribed chart of a figure.
pub fn golden(figure: Figure) -> Golden {
    #[derive(Deserialize)]
    struct Raw {
        notes: Vec<Note>,
    }
    let text = match figure {
        Figure::Fig2 => FIG2_JSON,
        Figure::Fig3 => FIG3_JSON,
    };
    let chart = ExtChart::from_json(text).expect("golden charts parse");
    let notes = serde_json::from_str::<Raw>(text).expect("golden charts parse").notes;
    Golden { chart, notes }
}

/// Differences between a chart and a golden chart. `missing` is in the
/// golden chart only, `extra` in the computed one only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChartDiff {
    pub missing_dots: Vec<Dot>,
    pub extra_dots: Vec<Dot>,
    pub missing_edges: Vec<Edge>,
    pub extra_edges: Vec<Edge>,
    /// Set when the chart's bounds do not reach the figure's.
    pub uncovered: Option<(i32, i32)>,
}

impl ChartDiff {
    pub fn is_empty(&self) -> bool {
        self.missing_dots.is_empty()
            && self.extra_dots.is_empty()
            && self.missing_edges.is_empty()
            && self.extra_edges.is_empty()
            && self.uncovered.is_none()
    }
}

impl fmt::Display for ChartDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return writeln!(f, "no differences");
        }
        if let Some((s, fl)) = self.uncovered {
            writeln!(f, "chart bounds (s ≤ {s}, f ≤ {fl}) do not cover the figure")?;
        }
        for (sign, dots) in [("-", &self.missing_dots), ("+", &self.extra_dots)] {
            for d in dots {
                writeln!(f, "{sign} dot {} torsion {}", triple(d.coords()), d.torsion)?;
            }
        }
        for (sign, edges) in [("-", &self.missing_edges), ("+", &self.extra_edges)] {
            for e in edges {
                let twist = if e.tau_twist { " (τ-twisted)" } else { "" };
                writeln!(f, "{sign} {} {} → {}{twist}", e.label, triple(e.from), triple(e.to))?;
            }
        }
        Ok(())
    }
}

/// Multiset difference of sorted slices.
fn sorted_diff<T: Ord + Copy>(a: &[T], b: &[T]) -> (Vec<T>, Vec<T>) {
    let (mut i, mut j) = (0, 0);
    let (mut only_a, mut only_b) = (Vec::new(), Vec::new());
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                only_a.push(*x);
                i += 1;
            }
            (Some(x), None) => {
                only_a.push(*x);
                i += 1;
            }
            (_, Some(y)) => {
                only_b.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    (only_a, only_b)
}

/// Compares `chart` with the figure on the figure's range.
pub fn compare(chart: &ExtChart, expected: &ExtChart) -> ChartDiff {
    let eb = expected.meta.bounds;
    let cb = chart.meta.bounds;
    let got = chart.restrict(eb.max_s, eb.max_f);
    let want = expected.restrict(eb.max_s, eb.max_f);
    let (missing_dots, extra_dots) = sorted_diff(&want.dots, &got.dots);
    let (missing_edges, extra_edges) = sorted_diff(&want.edges, &got.edges);
    let uncovered = (cb.max_s < eb.max_s || cb.max_f < eb.max_f).then_some((cb.max_s, cb.max_f));
    ChartDiff { missing_dots, extra_dots, missing_edges, extra_edges, uncovered }
}

pub fn golden_compare(chart: &ExtChart, figure: Figure) -> ChartDiff {
    compare(chart, &golden(figure).chart)
}

#[cfg(test)]
mod tests;
