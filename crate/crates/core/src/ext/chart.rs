use super::products::ProductEngine;
use super::ExtTable;
use crate::resolve::Resolution;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// τ-torsion of a cyclic summand: `M2/τ^r` or M2 itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Torsion {
    Finite(u32),
    Free,
}

impl fmt::Display for Torsion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Torsion::Finite(r) => write!(f, "{r}"),
            Torsion::Free => f.write_str("inf"),
        }
    }
}

impl Serialize for Torsion {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Torsion::Finite(r) => s.serialize_u32(*r),
            Torsion::Free => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Torsion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(0) => Err(de::Error::custom("torsion exponents are positive")),
            Raw::N(r) => Ok(Torsion::Finite(r)),
            Raw::S(s) if s == "inf" => Ok(Torsion::Free),
            Raw::S(s) => Err(de::Error::custom(format!("unknown torsion marker {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dot {
    pub s: i32,
    pub f: i32,
    pub w: i32,
    pub torsion: Torsion,
}

impl Dot {
    pub fn coords(&self) -> [i32; 3] {
        [self.s, self.f, self.w]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HLabel {
    H0,
    H1,
    H2,
}

impl HLabel {
    pub fn index(self) -> u32 {
        self as u32
    }

    pub fn from_index(i: u32) -> Option<Self> {
        [HLabel::H0, HLabel::H1, HLabel::H2].get(i as usize).copied()
    }

    /// `(s, f, w)` of `h_i`.
    pub fn shift(self) -> [i32; 3] {
        match self {
            HLabel::H0 => [0, 1, 0],
            HLabel::H1 => [1, 1, 1],
            HLabel::H2 => [3, 1, 2],
        }
    }
}

impl fmt::Display for HLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h{}", self.index())
    }
}

/// Multiplication by `h_i` from the dot at `from` onto the one at `to`;
/// `tau_twist` when it hits τ-multiples of that generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub from: [i32; 3],
    pub to: [i32; 3],
    pub label: HLabel,
    pub tau_twist: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartBounds {
    pub max_s: i32,
    pub max_f: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartMeta {
    pub source: String,
    pub target: String,
    pub bounds: ChartBounds,
}

/// Dots are kept sorted (with multiplicity) and edges sorted and distinct,
/// so equal charts serialize identically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtChart {
    pub meta: ChartMeta,
    pub dots: Vec<Dot>,
    pub edges: Vec<Edge>,
}

impl ExtChart {
    pub fn new(meta: ChartMeta, mut dots: Vec<Dot>, edges: impl IntoIterator<Item = Edge>) -> Self {
        dots.sort();
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        ExtChart { meta, dots, edges: edges.into_iter().collect() }
    }

    pub fn empty(source: &str, target: &str, max_s: i32, max_f: i32) -> Self {
        let meta = ChartMeta { source: source.into(), target: target.into(), bounds: ChartBounds { max_s, max_f } };
        ExtChart { meta, dots: Vec::new(), edges: Vec::new() }
    }

    /// Chart of `table` on `0 ≤ s ≤ max_s`, `f ≤ max_f`, clipped to the
    /// range the table determines. Products need the resolution behind the
    /// table and an engine; they are computed only where the target of the
    /// product is inside the table.
    pub fn assemble(
        table: &ExtTable,
        products: Option<(&Resolution, &ProductEngine)>,
        window: (i32, usize),
        target: &str,
    ) -> ExtChart {
        let (max_s, max_f) = window;
        let inside = |s: i32, f: usize| s <= max_s && f <= max_f;
        let mut dots = Vec::new();
        for cell in table.cells.values() {
            if !inside(cell.stem(), cell.f) {
                continue;
            }
            for c in cell.homology.classes() {
                let torsion = c.torsion.map_or(Torsion::Free, Torsion::Finite);
                dots.push(Dot { s: cell.stem(), f: cell.f as i32, w: -c.label, torsion });
            }
        }
        let mut edges = Vec::new();
        if let Some((res, engine)) = products {
            for cell in table.cells.values() {
                if !inside(cell.stem(), cell.f) {
                    continue;
                }
                for h in engine.labels() {
                    for e in engine.edges_from(table, res, cell, h) {
                        if inside(e.to[0], e.to[1] as usize) {
                            edges.push(e);
                        }
                    }
                }
            }
        }
        let meta = ChartMeta { source: table.source.clone(), target: target.into(), bounds: ChartBounds { max_s, max_f: max_f as i32 } };
        ExtChart::new(meta, dots, edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("charts serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        let c: ExtChart = serde_json::from_str(s)?;
        Ok(ExtChart::new(c.meta, c.dots, c.edges))
    }

    /// Restriction to `s ≤ max_s`, `f ≤ max_f`.
    pub fn restrict(&self, max_s: i32, max_f: i32) -> ExtChart {
        let ok = |p: [i32; 3]| p[0] <= max_s && p[1] <= max_f;
        let mut meta = self.meta.clone();
        meta.bounds = ChartBounds { max_s: max_s.min(meta.bounds.max_s), max_f: max_f.min(meta.bounds.max_f) };
        ExtChart::new(
            meta,
            self.dots.iter().filter(|d| ok(d.coords())).copied().collect(),
            self.edges.iter().filter(|e| ok(e.from) && ok(e.to)).copied(),
        )
    }

    pub fn dots_at(&self, s: i32, f: i32) -> impl Iterator<Item = &Dot> {
        self.dots.iter().filter(move |d| d.s == s && d.f == f)
    }

    /// Edges with the given label leaving `(s, f, *)`.
    pub fn edges_from(&self, s: i32, f: i32, label: HLabel) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.label == label && e.from[0] == s && e.from[1] == f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torsion_marker_round_trips() {
        let d = vec![Dot { s: 0, f: 0, w: 0, torsion: Torsion::Free }, Dot { s: 1, f: 1, w: 1, torsion: Torsion::Finite(2) }];
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"[{"s":0,"f":0,"w":0,"torsion":"inf"},{"s":1,"f":1,"w":1,"torsion":2}]"#);
        let back: Vec<Dot> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<Dot>(r#"{"s":0,"f":0,"w":0,"torsion":0}"#).is_err());
        assert!(serde_json::from_str::<Dot>(r#"{"s":0,"f":0,"w":0,"torsion":-1}"#).is_err());
    }

    #[test]
    fn field_order_is_stable() {
        let c = ExtChart::empty("M2", "M2", 1, 1);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, r#"{"meta":{"source":"M2","target":"M2","bounds":{"max_s":1,"max_f":1}},"dots":[],"edges":[]}"#);
    }
}
