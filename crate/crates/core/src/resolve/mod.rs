//! Minimal free resolutions over A or A(1), optionally using Ã-cells.
//!
//! Resolutions are built one internal degree at a time (outer loop) and one
//! stage at a time within a degree (inner loop). At `(t, f)` the kernel of
//! `d_{f-1}` in degree `t` is known; new generators cover it modulo the image
//! of what stage `f` already has, with lower weights first.

pub mod cache;
mod periodic;
mod verify;

pub use periodic::periodic_a1_resolution;
pub use verify::{ExactnessReport, StageCheck};

use crate::amodule::{atilde_quotient, ModuleError, ModulePresentation, SteenrodModule};
use crate::f2::{BitVec, Echelon, Insert};
use crate::milnor::{MilnorAlgebra, MilnorIndex, Profile};
use crate::tau::kernel_of_columns;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ResolveError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("the target is truncated at {have} but degree {needed} was requested")]
    Truncation { needed: i32, have: i32 },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("cache: {0}")]
    Cache(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellKind {
    /// A free cyclic module on one generator.
    A,
    /// A copy of Ã with `a` at the cell's bidegree and `b` two degrees up.
    Atilde,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub deg: i32,
    pub wt: i32,
    pub kind: CellKind,
    /// Image of the generator (of `a` for Ã-cells) in the previous stage,
    /// in degree `deg`.
    pub d: BitVec,
    /// Image of `b` for Ã-cells, in degree `deg + 2`.
    pub d_b: Option<BitVec>,
}

/// The M2-basis of one stage in one internal degree: pairs
/// `(cell, local)` where `local` indexes the cell's basis in that degree.
#[derive(Clone, Debug, Default)]
pub struct StageSlice {
    pub entries: Vec<(u32, u32)>,
    pub weights: Vec<i32>,
    /// First entry of each cell, for cells that existed when the slice was
    /// built.
    starts: Vec<u32>,
}

impl StageSlice {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index(&self, cell: usize, local: usize) -> usize {
        self.starts[cell] as usize + local
    }

    /// Index of the cell's bottom generator when the cell lives in this
    /// degree.
    pub fn cells(&self) -> usize {
        self.starts.len()
    }
}

/// Ã viewed as a cell: the module and, for each of its generators, the
/// ambient element `P^S a` or `P^S b` it is the class of.
pub struct AtildeCell {
    pub module: SteenrodModule,
    pub ambient: Vec<(u32, usize)>,
}

pub struct Resolution {
    target: Arc<SteenrodModule>,
    algebra: Arc<MilnorAlgebra>,
    atilde: Option<Arc<AtildeCell>>,
    allow_atilde: bool,
    stages: Vec<Vec<Cell>>,
    slices: Vec<Vec<Option<Arc<StageSlice>>>>,
    lo: i32,
    /// Largest `(t, f)` computed so far.
    done: Option<(i32, usize)>,
    /// `[f][t - lo]`: number of M2-generators of `ker d_f` in degree `t`.
    kernel_gens: Vec<Vec<usize>>,
}

impl std::fmt::Debug for Resolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Resolution")
            .field("target", &self.target.presentation().name)
            .field("profile", &self.algebra.profile())
            .field("bounds", &self.done)
            .finish()
    }
}

fn sq_id(alg: &MilnorAlgebra, n: u32) -> u32 {
    alg.id(&MilnorIndex::new(vec![n])).expect("Sq^n in range")
}

impl Resolution {
    /// An empty resolution of `target` over the given profile.
    pub fn new(target: ModulePresentation, profile: Profile, allow_atilde: bool) -> Result<Self, ResolveError> {
        let target = if target.profile == profile {
            target
        } else if profile == Profile::A1 || profile == Profile::A0 {
            target.with_profile(profile)
        } else {
            return Err(ResolveError::Contract(format!("a {} module cannot be resolved over A", target.profile.name())));
        };
        if allow_atilde && profile != Profile::Full {
            return Err(ResolveError::Contract("Ã-cells are only used over A".into()));
        }
        let target = SteenrodModule::new(target)?;
        let lo = target.min_degree();
        let span = (target.truncation() - lo).max(0) as u32;
        let algebra = crate::milnor::shared_algebra(profile, span);
        let atilde = if allow_atilde {
            let q = atilde_quotient(Profile::Full, (target.truncation() - lo).max(4))?;
            Some(Arc::new(AtildeCell { module: SteenrodModule::new(q.presentation)?, ambient: q.ambient }))
        } else {
            None
        };
        Ok(Resolution {
            target: Arc::new(target),
            algebra,
            atilde,
            allow_atilde,
            stages: Vec::new(),
            slices: Vec::new(),
            lo,
            done: None,
            kernel_gens: Vec::new(),
        })
    }

    pub fn target(&self) -> &SteenrodModule {
        &self.target
    }

    pub fn algebra(&self) -> &Arc<MilnorAlgebra> {
        &self.algebra
    }

    pub fn profile(&self) -> Profile {
        self.algebra.profile()
    }

    pub fn uses_atilde(&self) -> bool {
        self.allow_atilde
    }

    pub fn atilde(&self) -> Option<&AtildeCell> {
        self.atilde.as_deref()
    }

    pub fn min_degree(&self) -> i32 {
        self.lo
    }

    /// `(max internal degree, max stage)` computed.
    pub fn bounds(&self) -> Option<(i32, usize)> {
        self.done
    }

    pub fn max_t(&self) -> i32 {
        self.done.map_or(self.lo - 1, |d| d.0)
    }

    pub fn max_f(&self) -> usize {
        self.done.map_or(0, |d| d.1)
    }

    pub fn stages(&self) -> usize {
        self.stages.len()
    }

    pub fn cells(&self, f: usize) -> &[Cell] {
        self.stages.get(f).map_or(&[], |s| s.as_slice())
    }

    /// Number of Ã-cells across all stages.
    pub fn atilde_cells(&self) -> usize {
        self.stages.iter().flatten().filter(|c| c.kind == CellKind::Atilde).count()
    }

    /// Number of M2-generators of `ker d_f` in degree `t`, if computed.
    pub fn kernel_generators(&self, f: usize, t: i32) -> Option<usize> {
        self.kernel_gens.get(f)?.get((t - self.lo) as usize).copied()
    }

    /// Smallest degree in which `ker d_f` is nonzero, within the computed
    /// range.
    pub fn kernel_bottom(&self, f: usize) -> Option<i32> {
        let ks = self.kernel_gens.get(f)?;
        ks.iter().position(|&k| k > 0).map(|i| i as i32 + self.lo)
    }

    pub fn slice(&self, f: usize, t: i32) -> Arc<StageSlice> {
        self.slices
            .get(f)
            .and_then(|s| s.get((t - self.lo) as usize))
            .and_then(|s| s.clone())
            .unwrap_or_else(|| panic!("stage {f} is not computed in degree {t}"))
    }

    /// Dimension of stage `f` in degree `t`; stage "-1" is the target.
    pub fn dim(&self, f: isize, t: i32) -> usize {
        if f < 0 {
            self.target.dim(t)
        } else {
            self.slice(f as usize, t).len()
        }
    }

    pub fn weights(&self, f: isize, t: i32) -> Vec<i32> {
        if f < 0 {
            self.target.weights(t)
        } else {
            self.slice(f as usize, t).weights.clone()
        }
    }

    /// Local basis of a cell in the degree `d` above its bottom: the number
    /// of elements and their weights relative to the cell.
    fn local_weights(&self, kind: CellKind, d: i32) -> Vec<i32> {
        if d < 0 {
            return Vec::new();
        }
        match kind {
            CellKind::A => {
                let d = d as u32;
                if d > self.algebra.max_degree() {
                    return Vec::new();
                }
                (0..self.algebra.dim(d)).map(|j| self.algebra.weight((self.algebra.offset(d) + j) as u32)).collect()
            }
            CellKind::Atilde => self.atilde.as_ref().expect("Ã data").module.weights(d),
        }
    }

    fn build_slice(&self, f: usize, t: i32) -> StageSlice {
        let mut s = StageSlice::default();
        for (c, cell) in self.stages[f].iter().enumerate() {
            s.starts.push(s.entries.len() as u32);
            for (j, w) in self.local_weights(cell.kind, t - cell.deg).into_iter().enumerate() {
                s.entries.push((c as u32, j as u32));
                s.weights.push(cell.wt + w);
            }
        }
        s
    }

    /// `P^op · v` for `v` in stage `f` (or the target when `f < 0`) in
    /// degree `t`.
    pub fn act(&self, f: isize, op: u32, t: i32, v: &BitVec) -> BitVec {
        if f < 0 {
            return self.target.act(op, t, v).expect("action within the truncation");
        }
        let d = self.algebra.degree(op) as i32;
        let src = self.slice(f as usize, t);
        let dst = self.slice(f as usize, t + d);
        let mut out = BitVec::zeros(dst.len());
        let cells = &self.stages[f as usize];
        for i in v.iter_ones() {
            let (c, x) = src.entries[i];
            let cell = &cells[c as usize];
            let base = dst.starts[c as usize] as usize;
            match cell.kind {
                CellKind::A => {
                    let ld = (t - cell.deg) as u32;
                    let id = (self.algebra.offset(ld) + x as usize) as u32;
                    let tgt_off = self.algebra.offset(ld + d as u32);
                    for &p in self.algebra.product(op, id).iter() {
                        out.flip(base + p as usize - tgt_off);
                    }
                }
                CellKind::Atilde => {
                    let m = &self.atilde.as_ref().unwrap().module;
                    let g = m.slice(t - cell.deg)[x as usize];
                    let img = m.act_gen(op, g).expect("Ã within the truncation");
                    for p in img.iter_ones() {
                        out.flip(base + p);
                    }
                }
            }
        }
        out
    }

    /// `d` of the basis element `entry` of stage `f` in degree `t`.
    pub fn image(&self, f: usize, t: i32, entry: (u32, u32)) -> BitVec {
        let (c, x) = entry;
        let cell = &self.stages[f][c as usize];
        let prev = f as isize - 1;
        match cell.kind {
            CellKind::A => {
                let ld = (t - cell.deg) as u32;
                let id = (self.algebra.offset(ld) + x as usize) as u32;
                self.act(prev, id, cell.deg, &cell.d)
            }
            CellKind::Atilde => {
                let at = self.atilde.as_ref().unwrap();
                let g = at.module.slice(t - cell.deg)[x as usize];
                let (id, which) = at.ambient[g];
                if which == 0 {
                    self.act(prev, id, cell.deg, &cell.d)
                } else {
                    self.act(prev, id, cell.deg + 2, cell.d_b.as_ref().unwrap())
                }
            }
        }
    }

    /// All columns of `d_f` in degree `t`.
    pub fn columns(&self, f: usize, t: i32) -> Vec<BitVec> {
        let s = self.slice(f, t);
        s.entries.par_iter().map(|&e| self.image(f, t, e)).collect()
    }

    /// Extends the resolution to internal degree `max_t` and stage `max_f`,
    /// reusing everything already computed.
    pub fn extend(&mut self, max_t: i32, max_f: usize) -> Result<(), ResolveError> {
        if max_t > self.target.truncation() {
            return Err(ResolveError::Truncation { needed: max_t, have: self.target.truncation() });
        }
        if max_t - self.lo > self.algebra.max_degree() as i32 {
            self.algebra = crate::milnor::shared_algebra(self.profile(), (max_t - self.lo) as u32);
        }
        while self.stages.len() <= max_f {
            self.stages.push(Vec::new());
            self.slices.push(Vec::new());
            self.kernel_gens.push(Vec::new());
        }
        let done = self.done;
        let (old_t, old_f) = done.unwrap_or((self.lo - 1, 0));
        let new_t = max_t.max(old_t);
        let new_f = max_f.max(if done.is_some() { old_f } else { 0 });
        for t in self.lo..=new_t {
            let mut prev_kernel: Option<Vec<(i32, BitVec)>> = None;
            for f in 0..=new_f {
                if done.is_some() && t <= old_t && f <= old_f {
                    continue;
                }
                // the second Ã relation becomes checkable four degrees up
                for c in 0..self.cells(f).len() {
                    let cell = &self.stages[f][c];
                    if cell.kind == CellKind::Atilde && cell.deg + 4 == t && !self.second_relation_holds(f, c) {
                        return Err(ResolveError::Contract(format!(
                            "Sq3Sq1 a + Sq2 b ≠ 0 for the Ã-cell at ({}, {})",
                            cell.deg, cell.wt
                        )));
                    }
                }
                let k_prev = match prev_kernel.take() {
                    Some(k) => k,
                    None => self.kernel_of(f as isize - 1, t),
                };
                self.extend_stage(f, t, k_prev)?;
                prev_kernel = Some(self.kernel_of(f as isize, t));
            }
        }
        self.done = Some((new_t, new_f));
        Ok(())
    }

    /// τ-minimal M2-generators of `ker d_f` in degree `t`, labelled by
    /// weight. For `f = -1` these are the target's basis vectors (what stage
    /// 0 must cover). Records the generator count.
    fn kernel_of(&mut self, f: isize, t: i32) -> Vec<(i32, BitVec)> {
        if f < 0 {
            let n = self.target.dim(t);
            return self.target.weights(t).into_iter().enumerate().map(|(i, w)| (w, BitVec::unit(n, i))).collect();
        }
        let fu = f as usize;
        let s = self.slice(fu, t);
        let cols = self.columns(fu, t);
        let dim = self.dim(f - 1, t);
        let k = if f == 0 && self.target.has_relations() {
            // x with d(x) a relation: kernel of [d | relations], projected
            let rels = self.target.relations(t);
            let mut weights = s.weights.clone();
            let mut all = cols;
            for (w, r) in rels {
                weights.push(*w);
                all.push(r.clone());
            }
            let n = s.len();
            kernel_of_columns(&weights, &all, dim)
                .into_iter()
                .map(|(w, v)| (w, BitVec::from_ones(n, v.iter_ones().filter(|&i| i < n))))
                .filter(|(_, v)| !v.is_zero())
                .collect()
        } else {
            kernel_of_columns(&s.weights, &cols, dim)
        };
        let slot = (t - self.lo) as usize;
        let kg = &mut self.kernel_gens[fu];
        if kg.len() <= slot {
            kg.resize(slot + 1, 0);
        }
        kg[slot] = k.len();
        k
    }

    fn set_slice(&mut self, f: usize, t: i32, s: StageSlice) {
        let slot = (t - self.lo) as usize;
        let v = &mut self.slices[f];
        if v.len() <= slot {
            v.resize(slot + 1, None);
        }
        v[slot] = Some(Arc::new(s));
    }

    fn extend_stage(&mut self, f: usize, t: i32, k_prev: Vec<(i32, BitVec)>) -> Result<(), ResolveError> {
        let prov = self.build_slice(f, t);
        self.set_slice(f, t, prov.clone());
        let dim = self.dim(f as isize - 1, t);
        let weights = prov.weights.clone();
        let mut d_cols: Vec<(i32, BitVec)> =
            prov.entries.par_iter().zip(weights.par_iter()).map(|(&e, &w)| (w, self.image(f, t, e))).collect();
        if f == 0 {
            d_cols.extend(self.target.relations(t).iter().cloned());
        }

        // Ã candidates: A-cells two degrees down whose Sq² image is τ-divisible
        let mut candidates: Vec<(i32, BitVec, usize)> = Vec::new();
        if self.allow_atilde {
            let prev_w = self.weights(f as isize - 1, t);
            let sq2 = sq_id(&self.algebra, 2);
            for (c, cell) in self.stages[f].iter().enumerate() {
                if cell.kind != CellKind::A || cell.deg != t - 2 {
                    continue;
                }
                let v = self.act(f as isize - 1, sq2, t - 2, &cell.d);
                if !v.is_zero() && v.iter_ones().all(|i| prev_w[i] <= cell.wt) {
                    candidates.push((cell.wt, v, c));
                }
            }
        }

        // insert by weight; on ties images first, then Ã candidates, then kernel
        let mut items: Vec<(i32, u8, usize)> = Vec::new();
        items.extend(d_cols.iter().enumerate().map(|(i, c)| (c.0, 0, i)));
        items.extend(candidates.iter().enumerate().map(|(i, c)| (c.0, 1, i)));
        items.extend(k_prev.iter().enumerate().map(|(i, c)| (c.0, 2, i)));
        items.sort();
        let mut e = Echelon::new(dim);
        let mut paired: Vec<(usize, BitVec)> = Vec::new();
        let mut new_cells: Vec<Cell> = Vec::new();
        for (w, kind, i) in items {
            let v = match kind {
                0 => &d_cols[i].1,
                1 => &candidates[i].1,
                _ => &k_prev[i].1,
            };
            if let Insert::Independent { .. } = e.insert(v.clone()) {
                match kind {
                    0 => {}
                    1 => paired.push((candidates[i].2, v.clone())),
                    _ => new_cells.push(Cell { deg: t, wt: w, kind: CellKind::A, d: v.clone(), d_b: None }),
                }
            }
        }

        for (c, v) in paired {
            let cell = &mut self.stages[f][c];
            cell.kind = CellKind::Atilde;
            cell.d_b = Some(v);
        }
        let changed = self.stages[f].iter().any(|c| c.kind == CellKind::Atilde && c.deg == t - 2);
        let start = self.stages[f].len();
        self.stages[f].extend(new_cells);
        let slice = if changed {
            self.build_slice(f, t)
        } else {
            let mut s = prov;
            for c in start..self.stages[f].len() {
                s.starts.push(s.entries.len() as u32);
                s.entries.push((c as u32, 0));
                s.weights.push(self.stages[f][c].wt);
            }
            s
        };
        self.set_slice(f, t, slice);
        Ok(())
    }

    /// For an Ã-cell with `a ↦ x`, `b ↦ y`: `Sq³Sq¹ x + Sq² y = 0`. Needs
    /// the previous stage in degree `deg + 4`.
    pub(crate) fn second_relation_holds(&self, f: usize, c: usize) -> bool {
        let cell = &self.stages[f][c];
        let y = cell.d_b.as_ref().expect("Ã-cell");
        let prev = f as isize - 1;
        let (s1, s2, s3) = (sq_id(&self.algebra, 1), sq_id(&self.algebra, 2), sq_id(&self.algebra, 3));
        let mut lhs = BitVec::zeros(self.dim(prev, cell.deg + 4));
        for &p in self.algebra.product(s3, s1).iter() {
            lhs.xor_assign(&self.act(prev, p, cell.deg, &cell.d));
        }
        lhs.xor_assign(&self.act(prev, s2, cell.deg + 2, y));
        lhs.is_zero()
    }

    /// Generator bidegrees `(t, w)` of stage `f`, with kinds.
    pub fn generator_table(&self, f: usize) -> Vec<(i32, i32, CellKind)> {
        self.cells(f).iter().map(|c| (c.deg, c.wt, c.kind)).collect()
    }

    /// Stage `f` as a module: the sum of suspended copies of A and Ã over
    /// its cells, truncated at `truncation`. Only for resolutions over the
    /// full algebra; `None` when no cell lies below the truncation.
    pub fn stage_module(&self, f: usize, truncation: i32) -> Result<Option<ModulePresentation>, ModuleError> {
        if self.profile() != Profile::Full {
            return Err(ModuleError::NotAModule("stage modules are built over the full algebra".into()));
        }
        let mut out: Option<ModulePresentation> = None;
        for c in self.cells(f).iter().filter(|c| c.deg <= truncation) {
            let room = truncation - c.deg;
            let piece = match c.kind {
                CellKind::A => crate::amodule::preset("A", room)?,
                CellKind::Atilde if room >= 4 => crate::amodule::preset("Atilde", room)?,
                // below the relations Ã is free on a and b
                CellKind::Atilde if room >= 2 => {
                    crate::amodule::preset("A", room)?.direct_sum(&crate::amodule::preset("A", room - 2)?.suspend(2, 0))
                }
                CellKind::Atilde => crate::amodule::preset("A", room)?,
            }
            .suspend(c.deg, c.wt);
            out = Some(match out {
                Some(m) => m.direct_sum(&piece),
                None => piece,
            });
        }
        Ok(out.map(|mut m| {
            m.name = format!("R{f}({})", self.target.presentation().name);
            m
        }))
    }

    /// Assembles a resolution from explicit cells (used by the periodic
    /// construction and by the cache). Slices are rebuilt; kernels are not
    /// recorded.
    pub(crate) fn from_parts(
        target: ModulePresentation,
        profile: Profile,
        allow_atilde: bool,
        stages: Vec<Vec<Cell>>,
        bounds: (i32, usize),
    ) -> Result<Self, ResolveError> {
        let mut r = Resolution::new(target, profile, allow_atilde)?;
        if bounds.0 - r.lo > r.algebra.max_degree() as i32 {
            r.algebra = crate::milnor::shared_algebra(profile, (bounds.0 - r.lo) as u32);
        }
        let nf = stages.len();
        r.stages = stages;
        r.slices = vec![Vec::new(); nf];
        r.kernel_gens = vec![Vec::new(); nf];
        for f in 0..nf {
            for t in r.lo..=bounds.0 {
                let s = r.build_slice(f, t);
                r.set_slice(f, t, s);
            }
        }
        r.done = Some(bounds);
        Ok(r)
    }

    /// Drops everything above the given bounds.
    pub fn truncate(&mut self, max_t: i32, max_f: usize) {
        self.stages.truncate(max_f + 1);
        self.slices.truncate(max_f + 1);
        self.kernel_gens.truncate(max_f + 1);
        let keep = (max_t - self.lo + 1).max(0) as usize;
        for s in &mut self.stages {
            s.retain(|c| c.deg <= max_t);
        }
        for s in &mut self.slices {
            s.truncate(keep);
        }
        for k in &mut self.kernel_gens {
            k.truncate(keep);
        }
        if let Some((t, f)) = self.done {
            self.done = Some((t.min(max_t), f.min(max_f)));
        }
    }
}

/// The minimal resolution of `m` over `profile` through internal degree
/// `max_t` and stage `max_f`.
pub fn minimal_resolution(m: ModulePresentation, profile: Profile, max_t: i32, max_f: usize) -> Result<Resolution, ResolveError> {
    let mut r = Resolution::new(m, profile, false)?;
    r.extend(max_t, max_f)?;
    Ok(r)
}

/// A resolution over A that covers pairs of kernel generators `x, y` with
/// `Sq² x = τ y` by one Ã-cell instead of two A-cells.
pub fn resolve_with_atilde(m: ModulePresentation, max_t: i32, max_f: usize) -> Result<Resolution, ResolveError> {
    let mut r = Resolution::new(m, Profile::Full, true)?;
    r.extend(max_t, max_f)?;
    Ok(r)
}

/// The range `s + f ≤ T - 2`, `f ≤ F - 1` in which edge effects cannot
/// fake vanishing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SafeRange {
    pub max_t: i32,
    pub max_f: usize,
}

impl SafeRange {
    pub fn of(r: &Resolution) -> Self {
        SafeRange { max_t: r.max_t(), max_f: r.max_f() }
    }

    pub fn contains(&self, s: i32, f: usize) -> bool {
        s + f as i32 <= self.max_t - 2 && f < self.max_f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amodule::preset;

    fn gens(r: &Resolution, f: usize) -> Vec<(i32, i32)> {
        r.cells(f).iter().map(|c| (c.deg, c.wt)).collect()
    }

    #[test]
    fn m2_bottom_stages() {
        let r = minimal_resolution(preset("M2", 12).unwrap(), Profile::Full, 12, 3).unwrap();
        assert_eq!(gens(&r, 0), vec![(0, 0)]);
        assert_eq!(gens(&r, 1), vec![(1, 0), (2, 1), (4, 2), (8, 4)]);
        let rep = r.verify();
        assert!(rep.all_ok(), "{:?}", rep.failures());
    }

    #[test]
    fn extending_matches_one_shot() {
        let one = minimal_resolution(preset("M2", 14).unwrap(), Profile::Full, 14, 4).unwrap();
        let mut two = minimal_resolution(preset("M2", 14).unwrap(), Profile::Full, 9, 2).unwrap();
        two.extend(14, 4).unwrap();
        for f in 0..=4 {
            assert_eq!(one.cells(f), two.cells(f), "stage {f}");
        }
    }

    #[test]
    fn torsion_target() {
        let r = minimal_resolution(preset("M2modtau", 10).unwrap(), Profile::Full, 10, 3).unwrap();
        assert_eq!(gens(&r, 0), vec![(0, 0)]);
        assert_eq!(r.cells(1)[0].deg, 0);
        assert_eq!(r.cells(1)[0].wt, 1);
        let rep = r.verify();
        assert!(rep.all_ok(), "{:?}", rep.failures());
    }

    #[test]
    fn atilde_cells_appear_for_a0() {
        let r = resolve_with_atilde(preset("A0", 16).unwrap(), 16, 4).unwrap();
        assert!(r.atilde_cells() > 0);
        let rep = r.verify();
        assert!(rep.all_ok(), "{:?}", rep.failures());
    }

    #[test]
    fn a1_resolution_of_m2() {
        let r = minimal_resolution(preset("M2", 12).unwrap(), Profile::A1, 12, 4).unwrap();
        assert_eq!(gens(&r, 1), vec![(1, 0), (2, 1)]);
        assert!(r.verify().all_ok());
    }
}
