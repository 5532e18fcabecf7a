//! Linear algebra over M2 = F2[τ].
//!
//! A free graded M2-module is stored as a list of basis weights. A homogeneous
//! element of weight `w` is an F2 vector over the basis elements of weight
//! at most `w`; the coefficient of basis element `i` is `τ^(w - weight(i))`
//! and is never stored. Multiplying by τ leaves the bits alone and raises the
//! weight label by one. With this convention every M2-linear question becomes
//! an F2 question about a weight-filtered vector space.

use crate::f2::{BitVec, Echelon, Insert};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TauError {
    #[error("weight range is empty or inconsistent: {0}")]
    Range(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("contract violation: {0}")]
    Contract(String),
}

/// A weight-homogeneous matrix between free M2-modules. Column `j` is the
/// image of source basis element `j`; entry `(i, j)` stands for
/// `τ^(src[j] - tgt[i])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauMatrix {
    pub src_weights: Vec<i32>,
    pub tgt_weights: Vec<i32>,
    pub cols: Vec<BitVec>,
}

impl TauMatrix {
    pub fn new(src_weights: Vec<i32>, tgt_weights: Vec<i32>, cols: Vec<BitVec>) -> Result<Self, TauError> {
        if cols.len() != src_weights.len() {
            return Err(TauError::Shape(format!("{} columns for {} source generators", cols.len(), src_weights.len())));
        }
        for (j, c) in cols.iter().enumerate() {
            if c.len() != tgt_weights.len() {
                return Err(TauError::Shape(format!("column {j} has length {}", c.len())));
            }
            if let Some(i) = c.iter_ones().find(|&i| tgt_weights[i] > src_weights[j]) {
                return Err(TauError::Contract(format!(
                    "entry ({i},{j}) would need a negative τ-power ({} -> {})",
                    src_weights[j], tgt_weights[i]
                )));
            }
        }
        Ok(TauMatrix { src_weights, tgt_weights, cols })
    }

    pub fn zero(src_weights: Vec<i32>, tgt_weights: Vec<i32>) -> Self {
        let n = tgt_weights.len();
        let cols = vec![BitVec::zeros(n); src_weights.len()];
        TauMatrix { src_weights, tgt_weights, cols }
    }

    /// Builds a matrix from explicit τ-exponents; `None` is a zero entry.
    pub fn from_entries(src_weights: Vec<i32>, tgt_weights: Vec<i32>, entries: &[Vec<Option<u32>>]) -> Result<Self, TauError> {
        let mut cols = vec![BitVec::zeros(tgt_weights.len()); src_weights.len()];
        for (i, row) in entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if let Some(c) = e {
                    if src_weights[j] - tgt_weights[i] != *c as i32 {
                        return Err(TauError::Contract(format!("entry ({i},{j}) = τ^{c} is not homogeneous")));
                    }
                    cols[j].set(i, true);
                }
            }
        }
        Self::new(src_weights, tgt_weights, cols)
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<u32> {
        self.cols[j].get(i).then(|| (self.src_weights[j] - self.tgt_weights[i]) as u32)
    }

    pub fn apply(&self, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.tgt_weights.len());
        for j in v.iter_ones() {
            out.xor_assign(&self.cols[j]);
        }
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &TauMatrix) -> Result<TauMatrix, TauError> {
        if inner.tgt_weights != self.src_weights {
            return Err(TauError::Shape("composable matrices must share the middle module".into()));
        }
        let cols = inner.cols.iter().map(|c| self.apply(c)).collect();
        Ok(TauMatrix { src_weights: inner.src_weights.clone(), tgt_weights: self.tgt_weights.clone(), cols })
    }
}

/// Order of basis elements by (weight, index).
pub fn weight_order(weights: &[i32]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by_key(|&i| (weights[i], i));
    order
}

/// An M2-basis of the kernel of `d`, as `(weight, vector over the source)`.
///
/// Each basis element is τ-minimal. Columns are reduced in order of
/// (weight, index), so lower weights come first and ties follow column order.
pub fn kernel_basis(d: &TauMatrix) -> Vec<(i32, BitVec)> {
    kernel_of_columns(&d.src_weights, &d.cols, d.tgt_weights.len())
}

pub fn kernel_of_columns(weights: &[i32], cols: &[BitVec], dim: usize) -> Vec<(i32, BitVec)> {
    let order = weight_order(weights);
    let n = order.len();
    let mut e = Echelon::with_history(dim, n);
    let mut out = Vec::new();
    for &j in &order {
        if let Insert::Dependent(Some(h)) = e.insert(cols[j].clone()) {
            let v = BitVec::from_ones(n, h.iter_ones().map(|k| order[k]));
            out.push((weights[j], v));
        }
    }
    out
}

/// A finitely generated weight-graded M2-module, stored slice by slice.
///
/// Slices cover `lo..=hi`. `tau_maps[k]` maps slice `lo + k` to slice
/// `lo + k + 1`, given by the images of the basis vectors. When `free_tail` is
/// set, every slice above `hi` is a copy of slice `hi` and τ acts as the
/// identity there; otherwise slices outside the range are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauModule {
    pub lo: i32,
    pub dims: Vec<usize>,
    pub tau_maps: Vec<Vec<BitVec>>,
    pub free_tail: bool,
}

impl TauModule {
    pub fn new(lo: i32, dims: Vec<usize>, tau_maps: Vec<Vec<BitVec>>, free_tail: bool) -> Result<Self, TauError> {
        if dims.is_empty() {
            return Err(TauError::Range("no slices".into()));
        }
        if tau_maps.len() + 1 != dims.len() {
            return Err(TauError::Range(format!("{} slices need {} τ-maps, got {}", dims.len(), dims.len() - 1, tau_maps.len())));
        }
        for (k, m) in tau_maps.iter().enumerate() {
            if m.len() != dims[k] || m.iter().any(|c| c.len() != dims[k + 1]) {
                return Err(TauError::Shape(format!("τ-map out of weight {} has the wrong size", lo + k as i32)));
            }
        }
        Ok(TauModule { lo, dims, tau_maps, free_tail })
    }

    pub fn zero() -> Self {
        TauModule { lo: 0, dims: vec![0], tau_maps: vec![], free_tail: false }
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    pub fn dim_at(&self, w: i32) -> usize {
        if w < self.lo {
            0
        } else if w > self.hi() {
            if self.free_tail { *self.dims.last().unwrap() } else { 0 }
        } else {
            self.dims[(w - self.lo) as usize]
        }
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// Applies τ once to a vector in slice `w`.
    pub fn tau(&self, w: i32, v: &BitVec) -> BitVec {
        if w < self.lo {
            return BitVec::zeros(0);
        }
        if w >= self.hi() {
            return if self.free_tail { v.clone() } else { BitVec::zeros(0) };
        }
        let m = &self.tau_maps[(w - self.lo) as usize];
        let mut out = BitVec::zeros(self.dims[(w - self.lo + 1) as usize]);
        for i in v.iter_ones() {
            out.xor_assign(&m[i]);
        }
        out
    }

    /// Rank of `τ^k` from slice `w` to slice `w + k`.
    pub fn tau_power_rank(&self, w: i32, k: u32) -> usize {
        let d = self.dim_at(w);
        if d == 0 {
            return 0;
        }
        let target = self.dim_at(w + k as i32);
        if target == 0 {
            return 0;
        }
        let mut images = Vec::with_capacity(d);
        for i in 0..d {
            let mut v = BitVec::unit(d, i);
            let mut ww = w;
            for _ in 0..k {
                v = self.tau(ww, &v);
                ww += 1;
            }
            images.push(v);
        }
        crate::f2::rank(target, images)
    }
}

/// Classification of a finitely generated M2-module as
/// `⊕ Σ^{w} M2 ⊕ ⊕ Σ^{w} M2/τ^r`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TauDecomposition {
    /// Weights of the free generators, sorted.
    pub free: Vec<i32>,
    /// `(weight, r)` for each summand `M2/τ^r`, sorted.
    pub torsion: Vec<(i32, u32)>,
}

impl TauDecomposition {
    pub fn free_rank(&self) -> usize {
        self.free.len()
    }

    pub fn torsion_exponents(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.torsion.iter().map(|t| t.1).collect();
        v.sort_unstable();
        v
    }

    pub fn is_zero(&self) -> bool {
        self.free.is_empty() && self.torsion.is_empty()
    }

    /// Builds the direct sum described by this decomposition.
    pub fn build(&self) -> TauModule {
        let mut lo = i32::MAX;
        let mut hi = i32::MIN;
        for &w in &self.free {
            lo = lo.min(w);
            hi = hi.max(w);
        }
        for &(w, r) in &self.torsion {
            lo = lo.min(w);
            hi = hi.max(w + r as i32 - 1);
        }
        if lo > hi {
            return TauModule::zero();
        }
        // One extra slice so that torsion ending at `hi` is visibly dead.
        let top = hi + 1;
        let n = (top - lo + 1) as usize;
        let alive = |w: i32| -> Vec<usize> {
            let mut ids = Vec::new();
            for (k, &fw) in self.free.iter().enumerate() {
                if fw <= w {
                    ids.push(k);
                }
            }
            for (k, &(tw, r)) in self.torsion.iter().enumerate() {
                if tw <= w && w < tw + r as i32 {
                    ids.push(self.free.len() + k);
                }
            }
            ids
        };
        let slices: Vec<Vec<usize>> = (0..n).map(|k| alive(lo + k as i32)).collect();
        let dims = slices.iter().map(|s| s.len()).collect();
        let tau_maps = (0..n - 1)
            .map(|k| {
                let next = &slices[k + 1];
                slices[k]
                    .iter()
                    .map(|id| {
                        let mut v = BitVec::zeros(next.len());
                        if let Some(p) = next.iter().position(|x| x == id) {
                            v.set(p, true);
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        TauModule { lo, dims, tau_maps, free_tail: !self.free.is_empty() }
    }
}

/// Splits `m` into free and τ-torsion summands from the ranks of iterated
/// τ-maps.
pub fn decompose(m: &TauModule) -> Result<TauDecomposition, TauError> {
    if m.dims.is_empty() {
        return Err(TauError::Range("module has no weight range".into()));
    }
    let lo = m.lo;
    // Past `top` the module is stable (free tail) or zero.
    let top = m.hi() + 1;
    let rho = |a: i32, b: i32| -> usize {
        // rank of slice a -> slice b
        if a < lo || b < a {
            0
        } else {
            m.tau_power_rank(a, (b - a) as u32)
        }
    };
    let mut out = TauDecomposition::default();
    for a in lo..=top {
        for b in a..=top {
            // number of intervals [a, b]
            let mult = rho(a, b) as i64 - rho(a - 1, b) as i64 - rho(a, b + 1) as i64 + rho(a - 1, b + 1) as i64;
            let mult = if b == top {
                // anything alive at `top` lives forever (free tail) or is zero
                rho(a, b) as i64 - rho(a - 1, b) as i64
            } else {
                mult
            };
            if mult < 0 {
                return Err(TauError::Contract(format!("negative multiplicity at [{a},{b}]")));
            }
            for _ in 0..mult {
                if b == top {
                    out.free.push(a);
                } else {
                    out.torsion.push((a, (b - a + 1) as u32));
                }
            }
        }
    }
    if !m.free_tail && !out.free.is_empty() {
        return Err(TauError::Contract("module without free tail has classes surviving past its range".into()));
    }
    out.free.sort_unstable();
    out.torsion.sort_unstable();
    Ok(out)
}

/// Homology of a complex of free M2-modules, with the τ-structure tracked by
/// persistence pairing along the weight filtration.
#[derive(Clone, Debug)]
pub struct GradedHomology {
    dim: usize,
    /// Cycle basis sorted by (label, index).
    z: Vec<(i32, BitVec)>,
    z_echelon: Echelon,
    /// Reduced boundary columns in cycle coordinates, reversed so that the
    /// youngest cycle is the first set bit. `(label, vector)`.
    boundaries: Vec<(i32, BitVec)>,
    pivot_col: Vec<Option<usize>>,
    death: Vec<Option<i32>>,
}

/// One cyclic summand of a homology module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyClass {
    pub cycle: usize,
    pub label: i32,
    /// `None` for a free summand, `Some(r)` for `M2/τ^r`.
    pub torsion: Option<u32>,
}

impl GradedHomology {
    /// `cycles` must be an M2-basis of the cycles (as produced by
    /// [`kernel_basis`]); `boundaries` generate the boundaries.
    pub fn new(dim: usize, cycles: Vec<(i32, BitVec)>, boundaries: Vec<(i32, BitVec)>) -> Result<Self, TauError> {
        let mut z = cycles;
        let mut idx: Vec<usize> = (0..z.len()).collect();
        idx.sort_by_key(|&i| (z[i].0, i));
        z = idx.into_iter().map(|i| z[i].clone()).collect();
        let nz = z.len();
        let mut z_echelon = Echelon::with_history(dim, nz);
        for (_, v) in &z {
            if let Insert::Dependent(_) = z_echelon.insert(v.clone()) {
                return Err(TauError::Contract("cycle basis is not linearly independent".into()));
            }
        }
        let mut bs = boundaries;
        let mut bidx: Vec<usize> = (0..bs.len()).collect();
        bidx.sort_by_key(|&i| (bs[i].0, i));
        bs = bidx.into_iter().map(|i| bs[i].clone()).collect();

        let mut h = GradedHomology {
            dim,
            z,
            z_echelon,
            boundaries: Vec::new(),
            pivot_col: vec![None; nz],
            death: vec![None; nz],
        };
        for (label, b) in bs {
            let coords = h
                .z_echelon
                .solve(&b)
                .ok_or_else(|| TauError::Contract("boundary is not a cycle (d∘d ≠ 0)".into()))?;
            if let Some(i) = coords.iter_ones().find(|&i| h.z[i].0 > label) {
                return Err(TauError::Contract(format!(
                    "boundary of weight {label} needs cycle {i} of weight {}",
                    h.z[i].0
                )));
            }
            let mut rev = BitVec::from_ones(nz, coords.iter_ones().map(|i| nz - 1 - i));
            h.reduce_rev(&mut rev, i32::MAX);
            if let Some(p) = rev.first_one() {
                let zi = nz - 1 - p;
                h.pivot_col[p] = Some(h.boundaries.len());
                h.death[zi] = Some(label);
                h.boundaries.push((label, rev));
            }
        }
        Ok(h)
    }

    fn reduce_rev(&self, v: &mut BitVec, max_label: i32) {
        let mut from = 0;
        while let Some(p) = v.first_one_from(from) {
            if let Some(c) = self.pivot_col[p] {
                if self.boundaries[c].0 <= max_label {
                    v.xor_assign(&self.boundaries[c].1);
                }
            }
            from = p + 1;
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn cycle_count(&self) -> usize {
        self.z.len()
    }

    pub fn cycle(&self, i: usize) -> &(i32, BitVec) {
        &self.z[i]
    }

    /// The cyclic summands: free classes and torsion of positive exponent.
    pub fn classes(&self) -> Vec<HomologyClass> {
        let mut out = Vec::new();
        for (i, (label, _)) in self.z.iter().enumerate() {
            match self.death[i] {
                None => out.push(HomologyClass { cycle: i, label: *label, torsion: None }),
                Some(d) if d > *label => {
                    out.push(HomologyClass { cycle: i, label: *label, torsion: Some((d - label) as u32) })
                }
                _ => {}
            }
        }
        out
    }

    pub fn decomposition(&self) -> TauDecomposition {
        let mut d = TauDecomposition::default();
        for c in self.classes() {
            match c.torsion {
                None => d.free.push(c.label),
                Some(r) => d.torsion.push((c.label, r)),
            }
        }
        d.free.sort_unstable();
        d.torsion.sort_unstable();
        d
    }

    /// Cycles forming a basis of the homology at weight `w`.
    pub fn alive_at(&self, w: i32) -> Vec<usize> {
        (0..self.z.len())
            .filter(|&i| self.z[i].0 <= w && self.death[i].is_none_or(|d| d > w))
            .collect()
    }

    /// Coordinates of the class of `v`, viewed at weight `w`, in the basis
    /// [`alive_at`](Self::alive_at). Returns `None` if `v` is not a cycle
    /// of weight `w`.
    pub fn coords_at(&self, w: i32, v: &BitVec) -> Option<Vec<usize>> {
        let coords = self.z_echelon.solve(v)?;
        if coords.iter_ones().any(|i| self.z[i].0 > w) {
            return None;
        }
        let nz = self.z.len();
        let mut rev = BitVec::from_ones(nz, coords.iter_ones().map(|i| nz - 1 - i));
        self.reduce_rev(&mut rev, w);
        let mut out: Vec<usize> = rev.iter_ones().map(|p| nz - 1 - p).collect();
        out.sort_unstable();
        Some(out)
    }

    pub fn dim_at(&self, w: i32) -> usize {
        self.alive_at(w).len()
    }

    /// Weight range outside of which the homology is zero (below) or stable
    /// (above).
    pub fn label_range(&self) -> Option<(i32, i32)> {
        let lo = self.z.iter().map(|z| z.0).min()?;
        let hi = self
            .z
            .iter()
            .map(|z| z.0)
            .chain(self.boundaries.iter().map(|b| b.0))
            .max()?;
        Some((lo, hi))
    }

    pub fn to_tau_module(&self) -> TauModule {
        let Some((lo, hi)) = self.label_range() else {
            return TauModule::zero();
        };
        let slices: Vec<Vec<usize>> = (lo..=hi + 1).map(|w| self.alive_at(w)).collect();
        let dims = slices.iter().map(|s| s.len()).collect();
        let tau_maps = (0..slices.len() - 1)
            .map(|k| {
                let w_next = lo + k as i32 + 1;
                let next = &slices[k + 1];
                slices[k]
                    .iter()
                    .map(|&zi| {
                        let c = self.coords_at(w_next, &self.z[zi].1).expect("cycle stays a cycle");
                        BitVec::from_ones(next.len(), c.iter().map(|x| next.iter().position(|y| y == x).unwrap()))
                    })
                    .collect()
            })
            .collect();
        TauModule { lo, dims, tau_maps, free_tail: true }
    }
}

/// `ker(d_out) / im(d_in)` as a TauModule.
pub fn homology(d_in: &TauMatrix, d_out: &TauMatrix) -> Result<TauModule, TauError> {
    homology_graded(d_in, d_out).map(|h| h.to_tau_module())
}

pub fn homology_graded(d_in: &TauMatrix, d_out: &TauMatrix) -> Result<GradedHomology, TauError> {
    if d_in.tgt_weights != d_out.src_weights {
        return Err(TauError::Shape("d_in must land in the source of d_out".into()));
    }
    let comp = d_out.compose(d_in)?;
    if comp.cols.iter().any(|c| !c.is_zero()) {
        return Err(TauError::Contract("d_out ∘ d_in ≠ 0".into()));
    }
    let z = kernel_basis(d_out);
    let b = d_in.src_weights.iter().copied().zip(d_in.cols.iter().cloned()).collect();
    GradedHomology::new(d_out.src_weights.len(), z, b)
}
