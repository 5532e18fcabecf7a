//! Resolution cache: one JSON file per stage under a directory keyed by
//! the target module, the algebra and the cell kinds.
//!
//! Each file carries a header with a format version, the bounds, and a
//! SHA-256 of its cell list. Files are written to a temporary name and
//! renamed. Any mismatch makes the cache miss, and the caller recomputes.

use super::{Cell, CellKind, Resolution, ResolveError};
use crate::amodule::ModulePresentation;
use crate::f2::BitVec;
use crate::milnor::{MilnorElement, MilnorIndex, Profile};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

pub const CACHE_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "MEXT_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageHeader {
    pub version: u32,
    /// Fingerprints of the target in each degree bound from the bottom up.
    pub target: Vec<String>,
    pub algebra: String,
    pub atilde: bool,
    pub stage: usize,
    pub max_t: i32,
    pub max_f: usize,
    pub sha256: String,
}

/// One summand `θ · c` of a differential. For stage 0, `cell` names a
/// generator of the target and `elt` is a power of τ such as `t^2` or `1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub cell: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub part: Option<char>,
    pub elt: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRecord {
    pub deg: i32,
    pub wt: i32,
    pub kind: CellKind,
    pub d: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_b: Option<Vec<Term>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageFile {
    pub header: StageHeader,
    pub cells: Vec<CellRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    Computed,
    Loaded,
    Extended,
    /// The cache was unusable; the reason is kept for logging.
    Recomputed(String),
}

fn hex_sha(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Directory of the cache entry for this target, algebra and cell kinds.
pub fn entry_dir(root: &Path, target: &ModulePresentation, profile: Profile, atilde: bool) -> PathBuf {
    let cells = if atilde { "atilde" } else { "free" };
    root.join(format!("{}-{}-{}", sanitize(&target.name), profile.name(), cells))
}

/// Hash of the part of `m` in degrees `≤ t`, so that truncations of the
/// same module at different heights share cache entries.
pub fn fingerprint(m: &ModulePresentation, t: i32) -> String {
    let mut file = m.to_file();
    let keep: std::collections::HashSet<String> =
        file.generators.iter().filter(|g| g.deg <= t).map(|g| g.name.clone()).collect();
    file.generators.retain(|g| keep.contains(&g.name));
    file.actions.retain(|a| keep.contains(&a.src) && a.targets.iter().all(|x| keep.contains(&x.gen)));
    file.relations.retain(|r| r.terms.iter().all(|x| keep.contains(&x.gen)));
    file.truncation = t;
    file.name = None;
    hex_sha(serde_json::to_string(&file).expect("module files serialize").as_bytes())
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

fn tau_string(k: i32) -> String {
    match k {
        0 => "1".into(),
        1 => "t".into(),
        k => format!("t^{k}"),
    }
}

fn parse_tau(s: &str) -> Option<i32> {
    match s {
        "1" => Some(0),
        "t" => Some(1),
        _ => s.strip_prefix("t^")?.parse().ok(),
    }
}

impl Resolution {
    /// `d`-vector of a cell as terms, read in degree `deg` with label `wt`.
    fn encode(&self, f: usize, deg: i32, wt: i32, v: &BitVec) -> Vec<Term> {
        if f == 0 {
            let slice = self.target.slice(deg);
            return v
                .iter_ones()
                .map(|i| Term { cell: slice[i], part: None, elt: tau_string(wt - self.target.weight_of(deg, i)) })
                .collect();
        }
        let s = self.slice(f - 1, deg);
        let prev = self.cells(f - 1);
        let mut grouped: BTreeMap<(usize, Option<char>), Vec<(u32, MilnorIndex)>> = BTreeMap::new();
        for i in v.iter_ones() {
            let (c, x) = s.entries[i];
            let cell = &prev[c as usize];
            let tau = (wt - s.weights[i]) as u32;
            match cell.kind {
                CellKind::A => {
                    let ld = (deg - cell.deg) as u32;
                    let id = (self.algebra.offset(ld) + x as usize) as u32;
                    grouped.entry((c as usize, None)).or_default().push((tau, self.algebra.element(id).clone()));
                }
                CellKind::Atilde => {
                    let at = self.atilde.as_ref().unwrap();
                    let g = at.module.slice(deg - cell.deg)[x as usize];
                    let (id, which) = at.ambient[g];
                    let part = if which == 0 { 'a' } else { 'b' };
                    grouped.entry((c as usize, Some(part))).or_default().push((tau, self.algebra.element(id).clone()));
                }
            }
        }
        grouped
            .into_iter()
            .map(|((cell, part), terms)| Term { cell, part, elt: MilnorElement::from_terms(terms).expect("homogeneous").to_string() })
            .collect()
    }

    fn decode(&self, f: usize, deg: i32, wt: i32, terms: &[Term]) -> Result<BitVec, ResolveError> {
        let bad = |m: String| ResolveError::Cache(m);
        if f == 0 {
            let mut v = BitVec::zeros(self.target.dim(deg));
            for t in terms {
                let g = self.target.presentation().generators.get(t.cell).ok_or_else(|| bad("unknown generator".into()))?;
                let k = parse_tau(&t.elt).ok_or_else(|| bad(format!("bad τ-power {}", t.elt)))?;
                if g.deg != deg || g.wt + k != wt {
                    return Err(bad("term has the wrong bidegree".into()));
                }
                v.flip(self.target.position(t.cell));
            }
            return Ok(v);
        }
        let s = self.slice(f - 1, deg);
        let prev = self.cells(f - 1);
        let mut v = BitVec::zeros(s.len());
        for t in terms {
            let cell = prev.get(t.cell).ok_or_else(|| bad("unknown cell".into()))?;
            let e = MilnorElement::parse(&t.elt).map_err(|e| bad(e.to_string()))?;
            for (idx, tau) in e.terms() {
                let id = self.algebra.id(idx).ok_or_else(|| bad(format!("{idx} out of range")))?;
                let local = match (cell.kind, t.part) {
                    (CellKind::A, None) => id as usize - self.algebra.offset(self.algebra.degree(id)),
                    (CellKind::Atilde, Some(p)) => {
                        let at = self.atilde.as_ref().unwrap();
                        let which = if p == 'a' { 0 } else { 1 };
                        let g = at
                            .ambient
                            .iter()
                            .position(|&a| a == (id, which))
                            .ok_or_else(|| bad(format!("{idx}*{p} is not an Ã basis element")))?;
                        at.module.position(g)
                    }
                    _ => return Err(bad("cell kind does not match the term".into())),
                };
                let i = s.index(t.cell, local);
                if s.weights.get(i).map(|w| w + tau as i32) != Some(wt) {
                    return Err(bad("term has the wrong weight".into()));
                }
                v.flip(i);
            }
        }
        Ok(v)
    }

    /// Writes every stage to `dir`.
    pub fn save(&self, dir: &Path) -> Result<(), ResolveError> {
        let io = |e: std::io::Error| ResolveError::Cache(e.to_string());
        let (max_t, max_f) = self.bounds().ok_or_else(|| ResolveError::Cache("nothing computed".into()))?;
        fs::create_dir_all(dir).map_err(io)?;
        for f in 0..=max_f {
            let cells: Vec<CellRecord> = self
                .cells(f)
                .iter()
                .map(|c| CellRecord {
                    deg: c.deg,
                    wt: c.wt,
                    kind: c.kind,
                    d: self.encode(f, c.deg, c.wt, &c.d),
                    d_b: c.d_b.as_ref().map(|b| self.encode(f, c.deg + 2, c.wt, b)),
                })
                .collect();
            let body = serde_json::to_string(&cells).map_err(|e| ResolveError::Cache(e.to_string()))?;
            let file = StageFile {
                header: StageHeader {
                    version: CACHE_VERSION,
                    target: (self.lo..=max_t).map(|t| fingerprint(self.target.presentation(), t)).collect(),
                    algebra: self.profile().name().to_string(),
                    atilde: self.allow_atilde,
                    stage: f,
                    max_t,
                    max_f,
                    sha256: hex_sha(body.as_bytes()),
                },
                cells,
            };
            let text = serde_json::to_string_pretty(&file).map_err(|e| ResolveError::Cache(e.to_string()))?;
            let path = dir.join(format!("stage-{f:03}.json"));
            let tmp = dir.join(format!(".stage-{f:03}.json.tmp"));
            fs::write(&tmp, text).map_err(io)?;
            fs::rename(&tmp, &path).map_err(io)?;
        }
        Ok(())
    }

    /// Reads a resolution written by [`save`](Self::save). Fails on any
    /// version, hash or consistency mismatch.
    pub fn load(dir: &Path, target: ModulePresentation, profile: Profile, atilde: bool) -> Result<Resolution, ResolveError> {
        let read = |f: usize| -> Result<StageFile, ResolveError> {
            let text = fs::read_to_string(dir.join(format!("stage-{f:03}.json"))).map_err(|e| ResolveError::Cache(e.to_string()))?;
            serde_json::from_str(&text).map_err(|e| ResolveError::Cache(e.to_string()))
        };
        let first = read(0)?;
        let (max_t, max_f) = (first.header.max_t, first.header.max_f);
        let mut files = vec![first];
        for f in 1..=max_f {
            files.push(read(f)?);
        }
        for (f, file) in files.iter().enumerate() {
            let h = &file.header;
            if h.version != CACHE_VERSION {
                return Err(ResolveError::Cache(format!("format version {} (expected {CACHE_VERSION})", h.version)));
            }
            let cap = max_t.min(target.truncation);
            let slot = (cap - target.min_degree()) as usize;
            if h.target.get(slot) != Some(&fingerprint(&target, cap)) {
                return Err(ResolveError::Cache("the target module differs".into()));
            }
            if h.stage != f || h.max_t != max_t || h.max_f != max_f || h.algebra != profile.name() || h.atilde != atilde {
                return Err(ResolveError::Cache(format!("stage {f} header does not match")));
            }
            let body = serde_json::to_string(&file.cells).map_err(|e| ResolveError::Cache(e.to_string()))?;
            if hex_sha(body.as_bytes()) != h.sha256 {
                return Err(ResolveError::Cache(format!("stage {f} hash mismatch")));
            }
        }

        // a lower target truncation caps what can be reused
        let max_t = max_t.min(target.truncation);

        // cells first (kinds and bidegrees fix the slices), then differentials
        let skeleton: Vec<Vec<Cell>> = files
            .iter()
            .map(|file| {
                file.cells
                    .iter()
                    .filter(|c| c.deg <= max_t)
                    .map(|c| Cell { deg: c.deg, wt: c.wt, kind: c.kind, d: BitVec::zeros(0), d_b: None })
                    .collect()
            })
            .collect();
        let mut r = Resolution::from_parts(target, profile, atilde, skeleton, (max_t, max_f))?;
        for (f, file) in files.iter().enumerate() {
            for (i, c) in file.cells.iter().filter(|c| c.deg <= max_t).enumerate() {
                let d = r.decode(f, c.deg, c.wt, &c.d)?;
                let d_b = match &c.d_b {
                    Some(b) => Some(r.decode(f, c.deg + 2, c.wt, b)?),
                    None => None,
                };
                r.stages[f][i].d = d;
                r.stages[f][i].d_b = d_b;
            }
        }
        Ok(r)
    }
}

/// Loads a cached resolution covering the bounds, extends a smaller one, or
/// computes from scratch; the result is written back.
pub fn resolve_cached(
    root: &Path,
    target: ModulePresentation,
    profile: Profile,
    atilde: bool,
    max_t: i32,
    max_f: usize,
) -> Result<(Resolution, CacheOutcome), ResolveError> {
    let dir = entry_dir(root, &target, profile, atilde);
    let (mut r, outcome) = match Resolution::load(&dir, target.clone(), profile, atilde) {
        Ok(r) => {
            let (t, f) = r.bounds().unwrap();
            if t >= max_t && f >= max_f {
                let mut r = r;
                r.truncate(max_t, max_f);
                return Ok((r, CacheOutcome::Loaded));
            }
            (r, CacheOutcome::Extended)
        }
        Err(ResolveError::Cache(msg)) if dir.exists() => (Resolution::new(target, profile, atilde)?, CacheOutcome::Recomputed(msg)),
        Err(ResolveError::Cache(_)) => (Resolution::new(target, profile, atilde)?, CacheOutcome::Computed),
        Err(e) => return Err(e),
    };
    r.extend(max_t, max_f)?;
    r.save(&dir)?;
    Ok((r, outcome))
}
