//! Ext groups `Ext_A^{s,f,w}(M, N)` with their M2-module structure, read off
//! a resolution of `M`.
//!
//! A cochain in `Hom_A(R_f, N)` of internal degree `t` sends each cell `c`
//! to an element of `N` in degree `deg c - t`. Its basis elements
//! `(c, n)` carry the label `wt n - wt c`; multiplying by τ raises the
//! label, and the Ext weight is minus the label.

mod chart;
mod checks;
mod products;

pub use chart::{ChartBounds, ChartMeta, Dot, Edge, ExtChart, HLabel, Torsion};
pub use checks::{
    change_of_rings_check, connecting_h1_check, direct_ceta_chart, kernel_module, kernel_shift_check, lemma_restate_check, main_prop_check,
    periodic_check, verify_vanishing_line, ChangeOfRingsReport, ConnectingReport, KernelShiftReport, LemmaReport, MainPropReport,
    PeriodicReport, VanishingReport, Witness,
};
pub use products::ProductEngine;

use crate::amodule::{dual, preset, tensor, ModuleError, ModulePresentation, SteenrodModule};
use crate::f2::BitVec;
use crate::milnor::{MilnorIndex, Profile};
use crate::resolve::{minimal_resolution, CellKind, Resolution, ResolveError};
use crate::tau::{kernel_of_columns, GradedHomology, TauError};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExtError {
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Tau(#[from] TauError),
    #[error("the resolution is not minimal")]
    NotMinimal,
    #[error("{0}")]
    Unsupported(String),
}

/// Basis of `Hom_A(R_f, N)` in one internal degree.
#[derive(Clone, Debug, Default)]
pub struct Layout {
    /// `(cell, part, position in N)`; `part` is 1 for the `b` of Ã-cells.
    pub entries: Vec<(u32, u8, u32)>,
    pub labels: Vec<i32>,
    /// `(cell, part) ↦ (first entry, degree in N)`.
    block: HashMap<(u32, u8), (usize, i32)>,
}

impl Layout {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry of `(cell, part, pos)`, if present.
    pub fn index(&self, cell: usize, part: u8, pos: usize) -> Option<usize> {
        self.block.get(&(cell as u32, part)).map(|b| b.0 + pos)
    }
}

fn parts(kind: CellKind) -> &'static [u8] {
    match kind {
        CellKind::A => &[0],
        CellKind::Atilde => &[0, 1],
    }
}

/// Stacks two vectors.
fn concat(a: &BitVec, b: &BitVec) -> BitVec {
    BitVec::from_ones(a.len() + b.len(), a.iter_ones().chain(b.iter_ones().map(|i| i + a.len())))
}

/// The Hom complex `Hom_A(R, N)` and its homology.
pub struct HomComplex<'a> {
    pub res: &'a Resolution,
    pub coeff: SteenrodModule,
    n_hi: i32,
}

impl<'a> HomComplex<'a> {
    pub fn new(res: &'a Resolution, coeff: &ModulePresentation) -> Result<Self, ExtError> {
        let mut c = coeff.clone();
        if c.profile != res.profile() {
            if c.profile != Profile::Full {
                return Err(ExtError::Unsupported("coefficients must be A-modules".into()));
            }
            c = c.with_profile(res.profile());
        }
        if c.has_relations() {
            return Err(ExtError::Unsupported("coefficients must be M2-free".into()));
        }
        let n_hi = c.generators.iter().map(|g| g.deg).max().unwrap_or(0);
        if c.truncation < n_hi {
            return Err(ExtError::Unsupported("coefficients must be finite within their truncation".into()));
        }
        Ok(HomComplex { res, coeff: SteenrodModule::new(c)?, n_hi })
    }

    /// Internal degrees in which every cochain group is complete.
    pub fn t_range(&self) -> (i32, i32) {
        (self.res.min_degree() - self.n_hi, self.res.max_t() - self.n_hi)
    }

    pub fn layout(&self, f: usize, t: i32) -> Layout {
        let mut l = Layout::default();
        for (c, cell) in self.res.cells(f).iter().enumerate() {
            for &part in parts(cell.kind) {
                let nd = cell.deg + 2 * part as i32 - t;
                let dim = self.coeff.dim(nd);
                if dim == 0 {
                    continue;
                }
                l.block.insert((c as u32, part), (l.entries.len(), nd));
                for p in 0..dim {
                    l.entries.push((c as u32, part, p as u32));
                    l.labels.push(self.coeff.weight_of(nd, p) - cell.wt);
                }
            }
        }
        l
    }

    fn act(&self, op: u32, nd: i32, p: usize) -> Option<std::sync::Arc<BitVec>> {
        let g = self.coeff.slice(nd)[p];
        self.coeff.act_gen(op, g)
    }

    /// `δ: Hom(R_f) → Hom(R_{f+1})` in degree `t`, as columns.
    pub fn delta(&self, f: usize, _t: i32, src: &Layout, dst: &Layout) -> Vec<BitVec> {
        let mut cols = vec![BitVec::zeros(dst.len()); src.len()];
        let alg = self.res.algebra();
        let prev = self.res.cells(f);
        for (h, hc) in self.res.cells(f + 1).iter().enumerate() {
            for &part in parts(hc.kind) {
                let Some(&(row, _)) = dst.block.get(&(h as u32, part)) else { continue };
                let deg = hc.deg + 2 * part as i32;
                let d = if part == 0 { &hc.d } else { hc.d_b.as_ref().unwrap() };
                let slice = self.res.slice(f, deg);
                for i in d.iter_ones() {
                    let (c, x) = slice.entries[i];
                    let cell = &prev[c as usize];
                    let (op, which) = match cell.kind {
                        CellKind::A => ((alg.offset((deg - cell.deg) as u32) + x as usize) as u32, 0u8),
                        CellKind::Atilde => {
                            let at = self.res.atilde().unwrap();
                            let g = at.module.slice(deg - cell.deg)[x as usize];
                            let (id, w) = at.ambient[g];
                            (id, w as u8)
                        }
                    };
                    let Some(&(start, nd)) = src.block.get(&(c, which)) else { continue };
                    for p in 0..self.coeff.dim(nd) {
                        if let Some(img) = self.act(op, nd, p) {
                            for q in img.iter_ones() {
                                cols[start + p].flip(row + q);
                            }
                        }
                    }
                }
            }
        }
        cols
    }

    /// The relations `Sq²α + τβ` and `Sq³Sq¹α + Sq²β` a cochain must
    /// satisfy on each Ã-cell, as columns; `None` without Ã-cells.
    pub fn constraints(&self, f: usize, t: i32, l: &Layout) -> Option<(usize, Vec<BitVec>)> {
        let alg = self.res.algebra();
        let sq = |n: u32| alg.id(&MilnorIndex::new(vec![n])).expect("in range");
        let (s1, s2, s3) = (sq(1), sq(2), sq(3));
        let s3s1: Vec<u32> = alg.product(s3, s1).to_vec();
        let mut rows = 0;
        let mut blocks: Vec<(usize, usize, i32)> = Vec::new();
        for (c, cell) in self.res.cells(f).iter().enumerate() {
            if cell.kind != CellKind::Atilde {
                continue;
            }
            let (n2, n4) = (cell.deg + 2 - t, cell.deg + 4 - t);
            blocks.push((c, rows, n2));
            rows += self.coeff.dim(n2) + self.coeff.dim(n4);
        }
        if blocks.is_empty() {
            return None;
        }
        let mut cols = vec![BitVec::zeros(rows); l.len()];
        for &(c, row, n2) in &blocks {
            let row4 = row + self.coeff.dim(n2);
            let n0 = n2 - 2;
            if let Some(&(start, _)) = l.block.get(&(c as u32, 0)) {
                for p in 0..self.coeff.dim(n0) {
                    if let Some(v) = self.act(s2, n0, p) {
                        v.iter_ones().for_each(|q| cols[start + p].flip(row + q));
                    }
                    for &op in &s3s1 {
                        if let Some(v) = self.act(op, n0, p) {
                            v.iter_ones().for_each(|q| cols[start + p].flip(row4 + q));
                        }
                    }
                }
            }
            if let Some(&(start, _)) = l.block.get(&(c as u32, 1)) {
                for p in 0..self.coeff.dim(n2) {
                    cols[start + p].flip(row + p);
                    if let Some(v) = self.act(s2, n2, p) {
                        v.iter_ones().for_each(|q| cols[start + p].flip(row4 + q));
                    }
                }
            }
        }
        Some((rows, cols))
    }

    /// An M2-basis of `Hom_A(R_f, N)` in degree `t`.
    pub fn hom_basis(&self, f: usize, t: i32, l: &Layout) -> Vec<(i32, BitVec)> {
        match self.constraints(f, t, l) {
            Some((rows, cols)) => kernel_of_columns(&l.labels, &cols, rows),
            None => (0..l.len()).map(|i| (l.labels[i], BitVec::unit(l.len(), i))).collect(),
        }
    }

    /// Homology at `(f, t)`.
    pub fn homology(&self, f: usize, t: i32) -> Result<(Layout, GradedHomology), ExtError> {
        let l = self.layout(f, t);
        let next = self.layout(f + 1, t);
        let delta = self.delta(f, t, &l, &next);
        let cycles = match self.constraints(f, t, &l) {
            Some((rows, psi)) => {
                let stacked: Vec<BitVec> = psi.iter().zip(&delta).map(|(a, b)| concat(a, b)).collect();
                kernel_of_columns(&l.labels, &stacked, rows + next.len())
            }
            None => kernel_of_columns(&l.labels, &delta, next.len()),
        };
        let boundaries = if f == 0 {
            Vec::new()
        } else {
            let pl = self.layout(f - 1, t);
            let pd = self.delta(f - 1, t, &pl, &l);
            self.hom_basis(f - 1, t, &pl)
                .into_iter()
                .map(|(w, v)| {
                    let mut b = BitVec::zeros(l.len());
                    v.iter_ones().for_each(|i| b.xor_assign(&pd[i]));
                    (w, b)
                })
                .collect()
        };
        let h = GradedHomology::new(l.len(), cycles, boundaries)?;
        Ok((l, h))
    }
}

pub struct ExtCell {
    pub f: usize,
    pub t: i32,
    pub layout: Layout,
    pub homology: GradedHomology,
}

impl ExtCell {
    pub fn stem(&self) -> i32 {
        self.t - self.f as i32
    }
}

/// Ext in every `(f, t)` the resolution determines.
pub struct ExtTable {
    pub source: String,
    pub target: String,
    pub max_t: i32,
    pub max_f: usize,
    /// Bounds of the resolution it was computed from.
    pub res_bounds: (i32, usize),
    pub cells: BTreeMap<(usize, i32), ExtCell>,
}

impl ExtTable {
    pub fn cell(&self, f: usize, t: i32) -> Option<&ExtCell> {
        self.cells.get(&(f, t))
    }

    /// F2-dimension of `Ext^{s,f,w}`.
    pub fn dim(&self, s: i32, f: usize, w: i32) -> Option<usize> {
        self.cell(f, s + f as i32).map(|c| c.homology.dim_at(-w))
    }

    /// Whether `Ext^{s,f,*}` vanishes in every weight.
    pub fn is_zero(&self, s: i32, f: usize) -> Option<bool> {
        self.cell(f, s + f as i32).map(|c| c.homology.classes().is_empty())
    }
}

/// Ext of the resolved module into `coeff`, in every bidegree the
/// resolution determines: `f < F` and `t ≤ T - (top degree of coeff)`.
pub fn ext_table(res: &Resolution, coeff: &ModulePresentation) -> Result<ExtTable, ExtError> {
    let hom = HomComplex::new(res, coeff)?;
    let (lo, hi) = hom.t_range();
    let max_f = res.max_f().saturating_sub(1);
    let keys: Vec<(usize, i32)> = (0..=max_f).flat_map(|f| (lo..=hi).map(move |t| (f, t))).collect();
    let cells: Result<Vec<ExtCell>, ExtError> = keys
        .par_iter()
        .map(|&(f, t)| hom.homology(f, t).map(|(layout, homology)| ExtCell { f, t, layout, homology }))
        .collect();
    Ok(ExtTable {
        source: res.target().presentation().name.clone(),
        target: coeff.name.clone(),
        max_t: hi,
        max_f,
        res_bounds: (res.max_t(), res.max_f()),
        cells: cells?.into_iter().map(|c| ((c.f, c.t), c)).collect(),
    })
}

/// `Ext(M, M2)` for a minimal all-A resolution.
pub fn ext_to_m2(res: &Resolution) -> Result<ExtTable, ExtError> {
    if !res.is_minimal() {
        return Err(ExtError::NotMinimal);
    }
    ext_table(res, &preset("M2", 0)?)
}

/// `Ext(M, Cη)` from any resolution, Ã-cells included.
pub fn ext_to_ceta(res: &Resolution) -> Result<ExtTable, ExtError> {
    ext_table(res, &preset("Ceta", 0)?)
}

/// `M ⊗ D(Cη)`, whose Ext into M2 is `Ext(M, Cη)` with the same
/// gradings, and where products can be computed by lifting.
pub fn ceta_dual_model(m: &ModulePresentation, truncation: i32) -> Result<ModulePresentation, ExtError> {
    let dc = dual(&preset("Ceta", 0)?)?;
    let mut t = tensor(m, &dc, truncation)?;
    t.name = format!("{}|DCeta", m.name);
    Ok(t)
}

/// A chart of `Ext(M, M2)` with `h0, h1, h2` edges, from a fresh minimal
/// resolution of `m`.
pub fn m2_chart(m: &ModulePresentation, max_t: i32, max_f: usize, window: (i32, usize)) -> Result<ExtChart, ExtError> {
    let res = minimal_resolution(m.clone(), Profile::Full, max_t, max_f)?;
    let table = ext_to_m2(&res)?;
    let engine = ProductEngine::new(Profile::Full)?;
    Ok(ExtChart::assemble(&table, Some((&res, &engine)), window, "M2"))
}

/// A chart of `Ext(M, Cη)` with edges, computed through [`ceta_dual_model`].
pub fn ceta_chart(m: &ModulePresentation, max_t: i32, max_f: usize, window: (i32, usize)) -> Result<ExtChart, ExtError> {
    let model = ceta_dual_model(m, max_t)?;
    let res = minimal_resolution(model, Profile::Full, max_t, max_f)?;
    let table = ext_to_m2(&res)?;
    let engine = ProductEngine::new(Profile::Full)?;
    let mut chart = ExtChart::assemble(&table, Some((&res, &engine)), window, "Ceta");
    chart.meta.source = m.name.clone();
    Ok(chart)
}

#[cfg(test)]
mod tests;
