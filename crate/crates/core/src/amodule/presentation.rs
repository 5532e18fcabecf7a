use crate::milnor::Profile;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModuleError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown operation `{0}` (expected Sq1, Sq2, Sq4, ...)")]
    UnknownOp(String),
    #[error("operation {op} is not in the {profile} profile")]
    OpOutsideProfile { op: String, profile: &'static str },
    #[error("{op} on `{src}` hits `{tgt}` in the wrong bidegree")]
    Bidegree { op: String, src: String, tgt: String },
    #[error("{op} on `{src}` lists τ^{given} for `{tgt}` but bidegrees force τ^{expected}")]
    TauMismatch { op: String, src: String, tgt: String, given: u32, expected: i64 },
    #[error("relation {0} is not homogeneous")]
    Relation(usize),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("truncation {truncation} is too small: {reason}")]
    TruncationTooSmall { truncation: i32, reason: String },
    #[error("degree {0} is above the truncation")]
    AboveTruncation(i32),
    #[error("the action does not satisfy {0}")]
    NotAModule(String),
    #[error("malformed module file: {0}")]
    Format(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenSpec {
    pub name: String,
    pub deg: i32,
    pub wt: i32,
}

impl GenSpec {
    pub fn new(name: impl Into<String>, deg: i32, wt: i32) -> Self {
        GenSpec { name: name.into(), deg, wt }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetEntry {
    pub gen: String,
    pub tau: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionEntry {
    pub op: String,
    pub src: String,
    pub targets: Vec<TargetEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationEntry {
    pub terms: Vec<TargetEntry>,
}

fn is_full(p: &Profile) -> bool {
    *p == Profile::Full
}

fn full() -> Profile {
    Profile::Full
}

/// On-disk form of a module. Actions list only nonzero `Sq^{2^k}` values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleFile {
    pub generators: Vec<GenSpec>,
    pub truncation: i32,
    pub actions: Vec<ActionEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<RelationEntry>,
    #[serde(default = "full", skip_serializing_if = "is_full")]
    pub algebra: Profile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// `Sq^{2^k}` has bidegree `(2^k, 2^{k-1})`, and Sq¹ has `(1, 0)`.
pub fn sq_bidegree(k: u32) -> (i32, i32) {
    if k == 0 { (1, 0) } else { (1 << k, 1 << (k - 1)) }
}

pub fn op_name(k: u32) -> String {
    format!("Sq{}", 1u64 << k)
}

pub fn parse_op(op: &str) -> Option<u32> {
    let n: u64 = op.strip_prefix("Sq")?.parse().ok()?;
    (n.is_power_of_two() && n < (1 << 31)).then(|| n.trailing_zeros())
}

/// A bounded-below module of finite type given by an M2-basis (possibly of a
/// cover, when relations are present), truncated at an internal degree.
///
/// The M2-basis elements are called generators, as in the file format. An
/// element of bidegree `(t, w)` is an F2-vector over the generators of degree
/// `t` and weight at most `w`; the τ-powers are implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulePresentation {
    pub name: String,
    pub profile: Profile,
    pub truncation: i32,
    pub generators: Vec<GenSpec>,
    /// `sq[k][g]`: generators hit by `Sq^{2^k} g`, sorted.
    pub(crate) sq: Vec<Vec<Vec<usize>>>,
    /// M2-generators of the relation submodule: `(weight, generators)`.
    pub(crate) relations: Vec<(i32, Vec<usize>)>,
}

impl ModulePresentation {
    /// A module with no actions or relations yet.
    pub fn new(name: impl Into<String>, profile: Profile, truncation: i32, generators: Vec<GenSpec>) -> Self {
        let n = generators.len();
        let lo = generators.iter().map(|g| g.deg).min().unwrap_or(0);
        let ops = profile.generators((truncation - lo).max(1) as u32).len();
        ModulePresentation {
            name: name.into(),
            profile,
            truncation,
            generators,
            sq: vec![vec![Vec::new(); n]; ops],
            relations: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn ops(&self) -> usize {
        self.sq.len()
    }

    /// Sets `Sq^{2^k} src` to the sum of `targets`, checking bidegrees.
    pub fn set_action(&mut self, k: u32, src: usize, targets: Vec<usize>) -> Result<(), ModuleError> {
        let (dd, dw) = sq_bidegree(k);
        if k as usize >= self.sq.len() {
            return Err(ModuleError::OpOutsideProfile { op: op_name(k), profile: self.profile.name() });
        }
        let s = &self.generators[src];
        let mut ts = Vec::new();
        for t in targets {
            let g = &self.generators[t];
            if g.deg != s.deg + dd || g.wt > s.wt + dw {
                return Err(ModuleError::Bidegree { op: op_name(k), src: s.name.clone(), tgt: g.name.clone() });
            }
            // repeated targets cancel
            if let Some(p) = ts.iter().position(|&x| x == t) {
                ts.remove(p);
            } else {
                ts.push(t);
            }
        }
        ts.sort_unstable();
        self.sq[k as usize][src] = ts;
        Ok(())
    }

    pub fn action(&self, k: u32, src: usize) -> &[usize] {
        &self.sq[k as usize][src]
    }

    /// Adds an M2-generator of the relation submodule. All terms must share
    /// a degree; the weight is the largest term weight.
    pub fn add_relation(&mut self, gens: Vec<usize>) -> Result<(), ModuleError> {
        let idx = self.relations.len();
        let deg = gens.first().map(|&g| self.generators[g].deg);
        if gens.iter().any(|&g| Some(self.generators[g].deg) != deg) {
            return Err(ModuleError::Relation(idx));
        }
        let wt = gens.iter().map(|&g| self.generators[g].wt).max().unwrap_or(0);
        self.relations.push((wt, gens));
        Ok(())
    }

    /// Adds a relation at an explicit weight (some terms may carry τ-powers).
    pub fn add_relation_at(&mut self, wt: i32, gens: Vec<usize>) -> Result<(), ModuleError> {
        let idx = self.relations.len();
        let deg = gens.first().map(|&g| self.generators[g].deg);
        if gens.iter().any(|&g| Some(self.generators[g].deg) != deg || self.generators[g].wt > wt) {
            return Err(ModuleError::Relation(idx));
        }
        self.relations.push((wt, gens));
        Ok(())
    }

    pub fn relations(&self) -> &[(i32, Vec<usize>)] {
        &self.relations
    }

    pub fn has_relations(&self) -> bool {
        !self.relations.is_empty()
    }

    pub fn min_degree(&self) -> i32 {
        self.generators.iter().map(|g| g.deg).min().unwrap_or(0)
    }

    /// Shifts every bidegree by `(a, b)`.
    pub fn suspend(&self, a: i32, b: i32) -> Self {
        let mut m = self.clone();
        for g in &mut m.generators {
            g.deg += a;
            g.wt += b;
        }
        m.relations.iter_mut().for_each(|r| r.0 += b);
        m.truncation += a;
        m.name = format!("S^({a},{b}){}", self.name);
        m
    }

    /// The sub-presentation on generators satisfying `keep`, which must be
    /// closed under the action.
    pub fn restrict(&self, name: &str, keep: impl Fn(&GenSpec) -> bool) -> Result<Self, ModuleError> {
        let map: Vec<Option<usize>> = {
            let mut next = 0;
            self.generators
                .iter()
                .map(|g| {
                    keep(g).then(|| {
                        next += 1;
                        next - 1
                    })
                })
                .collect()
        };
        let gens: Vec<GenSpec> = self.generators.iter().filter(|g| keep(g)).cloned().collect();
        let mut m = ModulePresentation::new(name, self.profile, self.truncation, gens);
        // operations past the new degree span cannot act within the truncation
        for (k, table) in self.sq.iter().enumerate().take(m.sq.len()) {
            for (src, ts) in table.iter().enumerate() {
                let Some(s) = map[src] else { continue };
                let mapped: Option<Vec<usize>> = ts.iter().map(|&t| map[t]).collect();
                let mapped = mapped.ok_or_else(|| ModuleError::NotAModule(format!("closure of {}", name)))?;
                m.sq[k][s] = mapped;
            }
        }
        for (w, r) in &self.relations {
            let mapped: Option<Vec<usize>> = r.iter().map(|&t| map[t]).collect();
            if let Some(r) = mapped {
                m.relations.push((*w, r));
            }
        }
        Ok(m)
    }

    /// The same module viewed over a sub-Hopf algebra: actions of operations
    /// outside `profile` are dropped.
    pub fn with_profile(&self, profile: Profile) -> Self {
        let mut m = ModulePresentation::new(self.name.clone(), profile, self.truncation, self.generators.clone());
        for (k, table) in self.sq.iter().enumerate().take(m.sq.len()) {
            m.sq[k] = table.clone();
        }
        m.relations = self.relations.clone();
        m
    }

    /// `self ⊕ other` truncated at the smaller bound. Generator names of
    /// `other` get a `'` suffix when they collide.
    pub fn direct_sum(&self, other: &ModulePresentation) -> Self {
        let off = self.generators.len();
        let mut gens = self.generators.clone();
        for g in &other.generators {
            let mut g = g.clone();
            while gens.iter().any(|h| h.name == g.name) {
                g.name.push('\'');
            }
            gens.push(g);
        }
        let trunc = self.truncation.min(other.truncation);
        let mut m = ModulePresentation::new(format!("{}+{}", self.name, other.name), self.profile, trunc, gens);
        for k in 0..m.sq.len() {
            for (src, ts) in self.sq.get(k).into_iter().flatten().enumerate() {
                m.sq[k][src] = ts.clone();
            }
            for (src, ts) in other.sq.get(k).into_iter().flatten().enumerate() {
                m.sq[k][off + src] = ts.iter().map(|t| t + off).collect();
            }
        }
        m.relations = self.relations.iter().cloned().chain(other.relations.iter().map(|(w, r)| (*w, r.iter().map(|t| t + off).collect()))).collect();
        m
    }

    pub fn to_file(&self) -> ModuleFile {
        let mut actions = Vec::new();
        for (src, g) in self.generators.iter().enumerate() {
            for (k, table) in self.sq.iter().enumerate() {
                let ts = &table[src];
                if ts.is_empty() {
                    continue;
                }
                let dw = sq_bidegree(k as u32).1;
                actions.push(ActionEntry {
                    op: op_name(k as u32),
                    src: g.name.clone(),
                    targets: ts
                        .iter()
                        .map(|&t| TargetEntry {
                            gen: self.generators[t].name.clone(),
                            tau: (g.wt + dw - self.generators[t].wt) as u32,
                        })
                        .collect(),
                });
            }
        }
        let relations = self
            .relations
            .iter()
            .map(|(w, r)| RelationEntry {
                terms: r
                    .iter()
                    .map(|&t| TargetEntry { gen: self.generators[t].name.clone(), tau: (w - self.generators[t].wt) as u32 })
                    .collect(),
            })
            .collect();
        ModuleFile {
            generators: self.generators.clone(),
            truncation: self.truncation,
            actions,
            relations,
            algebra: self.profile,
            name: Some(self.name.clone()),
        }
    }

    pub fn from_file(f: &ModuleFile) -> Result<Self, ModuleError> {
        let mut idx: HashMap<&str, usize> = HashMap::new();
        for (i, g) in f.generators.iter().enumerate() {
            if idx.insert(&g.name, i).is_some() {
                return Err(ModuleError::DuplicateGenerator(g.name.clone()));
            }
        }
        let lookup = |n: &str| idx.get(n).copied().ok_or_else(|| ModuleError::UnknownGenerator(n.to_string()));
        let mut m = ModulePresentation::new(
            f.name.clone().unwrap_or_else(|| "module".into()),
            f.algebra,
            f.truncation,
            f.generators.clone(),
        );
        for a in &f.actions {
            let k = parse_op(&a.op).ok_or_else(|| ModuleError::UnknownOp(a.op.clone()))?;
            let src = lookup(&a.src)?;
            let (_, dw) = sq_bidegree(k);
            let mut ts = Vec::new();
            for t in &a.targets {
                let ti = lookup(&t.gen)?;
                let expected = (f.generators[src].wt + dw - f.generators[ti].wt) as i64;
                if expected != t.tau as i64 {
                    return Err(ModuleError::TauMismatch {
                        op: a.op.clone(),
                        src: a.src.clone(),
                        tgt: t.gen.clone(),
                        given: t.tau,
                        expected,
                    });
                }
                ts.push(ti);
            }
            m.set_action(k, src, ts)?;
        }
        for (ri, r) in f.relations.iter().enumerate() {
            let mut gens = Vec::new();
            let mut wt = None;
            for t in &r.terms {
                let ti = lookup(&t.gen)?;
                let w = f.generators[ti].wt + t.tau as i32;
                if wt.is_some_and(|x| x != w) {
                    return Err(ModuleError::Relation(ri));
                }
                wt = Some(w);
                gens.push(ti);
            }
            m.add_relation_at(wt.unwrap_or(0), gens)?;
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("module files serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, ModuleError> {
        Self::from_file(&serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ceta() -> ModulePresentation {
        let mut m = ModulePresentation::new("Ceta", Profile::Full, 0, vec![GenSpec::new("e", -2, -1), GenSpec::new("u", 0, 0)]);
        m.set_action(1, 0, vec![1]).unwrap();
        m
    }

    #[test]
    fn file_roundtrip_is_bit_exact() {
        let s = ceta().to_json();
        let back = ModulePresentation::from_json(&s).unwrap();
        assert_eq!(back, ceta());
        assert_eq!(back.to_json(), s);
    }

    #[test]
    fn wrong_tau_is_rejected() {
        let s = ceta().to_json().replace("\"tau\": 0", "\"tau\": 1");
        assert!(matches!(ModulePresentation::from_json(&s), Err(ModuleError::TauMismatch { .. })));
    }

    #[test]
    fn ops_parse() {
        assert_eq!(parse_op("Sq1"), Some(0));
        assert_eq!(parse_op("Sq8"), Some(3));
        assert_eq!(parse_op("Sq3"), None);
        assert_eq!(sq_bidegree(2), (4, 2));
    }

    #[test]
    fn suspension_composes() {
        let m = ceta();
        let a = m.suspend(1, 0).suspend(2, 1);
        let b = m.suspend(3, 1);
        assert_eq!(a.generators, b.generators);
        assert_eq!(m.suspend(0, 0).generators, m.generators);
    }
}
