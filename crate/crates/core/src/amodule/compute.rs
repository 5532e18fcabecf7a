use super::presentation::{sq_bidegree, ModuleError, ModulePresentation};
use crate::f2::{BitVec, Echelon, Insert};
use crate::milnor::{shared_algebra, MilnorAlgebra};
use dashmap::DashMap;
use std::sync::Arc;

/// Where a filtered submodule fails to be saturated: an element of weight
/// `wt` in degree `deg` that is not a relation but becomes one after
/// multiplying by a power of τ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionWitness {
    pub deg: i32,
    pub wt: i32,
    pub element: BitVec,
}

/// Checks whether `F/R` is τ-torsion-free in one degree, where `weights`
/// are the weights of the basis of `F` and `rels` are M2-generators of `R`.
///
/// Returns the reduced echelon of `R ⊗ M2[τ^{-1}]` whose pivots are the
/// highest-weight positions, together with a witness if torsion occurs.
pub fn saturation(weights: &[i32], rels: &[(i32, BitVec)]) -> (Saturated, Option<(i32, BitVec)>) {
    let n = weights.len();
    // positions are ordered by (weight, index); reversing makes the first set
    // bit of a reversed vector the highest position
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (weights[i], i));
    let mut rank_of = vec![0; n];
    for (r, &i) in order.iter().enumerate() {
        rank_of[i] = r;
    }
    let rev = |v: &BitVec| BitVec::from_ones(n, v.iter_ones().map(|i| n - 1 - rank_of[i]));
    let mut sorted: Vec<&(i32, BitVec)> = rels.iter().collect();
    sorted.sort_by_key(|r| r.0);

    let mut high = Echelon::new(n);
    for r in &sorted {
        high.insert(rev(&r.1));
    }
    // R_∞ ∩ V_w is spanned by the rows of `high` with pivot weight <= w, so
    // saturation holds iff each such row already lies in R_w
    let mut rows: Vec<(i32, BitVec)> = high
        .rows()
        .iter()
        .map(|row| {
            let top = order[n - 1 - row.first_one().unwrap()];
            (weights[top], BitVec::from_ones(n, row.iter_ones().map(|j| order[n - 1 - j])))
        })
        .collect();
    rows.sort_by_key(|r| r.0);
    let mut filtered = Echelon::new(n);
    let mut next = 0;
    let mut witness = None;
    for (w, v) in rows {
        while next < sorted.len() && sorted[next].0 <= w {
            filtered.insert(sorted[next].1.clone());
            next += 1;
        }
        if !filtered.contains(&v) {
            witness = Some((w, v));
            break;
        }
    }
    let pivots: Vec<bool> = {
        let mut p = vec![false; n];
        for row in high.rows() {
            p[order[n - 1 - row.first_one().unwrap()]] = true;
        }
        p
    };
    (Saturated { n, order, rank_of, high, pivots }, witness)
}

/// Reduction modulo a saturated submodule onto its complement basis.
#[derive(Clone, Debug)]
pub struct Saturated {
    n: usize,
    order: Vec<usize>,
    rank_of: Vec<usize>,
    high: Echelon,
    pivots: Vec<bool>,
}

impl Saturated {
    /// Positions not used as pivots; their classes form an M2-basis of the
    /// quotient when it is τ-torsion-free.
    pub fn free_positions(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| !self.pivots[i]).collect()
    }

    /// Reduces `v` so that it is supported on free positions. The result
    /// never has higher weight than `v`.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let n = self.n;
        let mut r = BitVec::from_ones(n, v.iter_ones().map(|i| n - 1 - self.rank_of[i]));
        self.high.reduce(&mut r);
        BitVec::from_ones(n, r.iter_ones().map(|j| self.order[n - 1 - j]))
    }
}

/// A module ready for computation: generators sliced by degree, relations
/// as filtered subspaces, and the full Milnor action derived from the
/// `Sq^{2^k}` tables.
pub struct SteenrodModule {
    pres: ModulePresentation,
    algebra: Arc<MilnorAlgebra>,
    lo: i32,
    slices: Vec<Vec<usize>>,
    pos: Vec<usize>,
    rels: Vec<Vec<(i32, BitVec)>>,
    cache: DashMap<(u32, usize), Option<Arc<BitVec>>>,
}

impl std::fmt::Debug for SteenrodModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SteenrodModule").field("name", &self.pres.name).field("truncation", &self.pres.truncation).finish()
    }
}

impl SteenrodModule {
    pub fn new(pres: ModulePresentation) -> Result<Self, ModuleError> {
        let lo = pres.min_degree().min(pres.truncation);
        let span = (pres.truncation - lo).max(0) as usize;
        let algebra = shared_algebra(pres.profile, span as u32);
        let mut slices = vec![Vec::new(); span + 1];
        for (i, g) in pres.generators.iter().enumerate() {
            if g.deg > pres.truncation {
                return Err(ModuleError::AboveTruncation(g.deg));
            }
            slices[(g.deg - lo) as usize].push(i);
        }
        let mut pos = vec![0; pres.generators.len()];
        for s in &mut slices {
            s.sort_by_key(|&i| (pres.generators[i].wt, i));
            for (p, &i) in s.iter().enumerate() {
                pos[i] = p;
            }
        }
        let mut rels = vec![Vec::new(); span + 1];
        for (w, r) in &pres.relations {
            let Some(&g0) = r.first() else { continue };
            let d = (pres.generators[g0].deg - lo) as usize;
            rels[d].push((*w, BitVec::from_ones(slices[d].len(), r.iter().map(|&g| pos[g]))));
        }
        let m = SteenrodModule { pres, algebra, lo, slices, pos, rels, cache: DashMap::new() };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), ModuleError> {
        // relations must be stable under every Sq^{2^k}
        for t in self.lo..=self.pres.truncation {
            for (w, r) in self.relations(t) {
                for k in 0..self.pres.ops() as u32 {
                    let (dd, dw) = sq_bidegree(k);
                    if t + dd > self.pres.truncation {
                        continue;
                    }
                    let img = self.sq(k, t, r);
                    if !self.is_zero(t + dd, w + dw, &img) {
                        return Err(ModuleError::NotAModule(format!("relation stability in degree {t}")));
                    }
                }
            }
        }
        // Sq1 Sq1 = 0
        for t in self.lo..self.pres.truncation - 1 {
            for i in 0..self.dim(t) {
                let g = self.slices[(t - self.lo) as usize][i];
                let v = self.sq(0, t + 1, &self.sq(0, t, &BitVec::unit(self.dim(t), i)));
                if !self.is_zero(t + 2, self.pres.generators[g].wt, &v) {
                    return Err(ModuleError::NotAModule(format!("Sq1 Sq1 = 0 on {}", self.pres.generators[g].name)));
                }
            }
        }
        Ok(())
    }

    pub fn presentation(&self) -> &ModulePresentation {
        &self.pres
    }

    pub fn algebra(&self) -> &Arc<MilnorAlgebra> {
        &self.algebra
    }

    pub fn min_degree(&self) -> i32 {
        self.lo
    }

    pub fn truncation(&self) -> i32 {
        self.pres.truncation
    }

    pub fn dim(&self, t: i32) -> usize {
        self.slice(t).len()
    }

    /// Generator indices of degree `t`, ordered by (weight, index).
    pub fn slice(&self, t: i32) -> &[usize] {
        if t < self.lo || t > self.pres.truncation {
            return &[];
        }
        &self.slices[(t - self.lo) as usize]
    }

    pub fn weights(&self, t: i32) -> Vec<i32> {
        self.slice(t).iter().map(|&g| self.pres.generators[g].wt).collect()
    }

    pub fn weight_of(&self, t: i32, i: usize) -> i32 {
        self.pres.generators[self.slice(t)[i]].wt
    }

    pub fn name_of(&self, t: i32, i: usize) -> &str {
        &self.pres.generators[self.slice(t)[i]].name
    }

    /// Position of generator `g` within its degree.
    pub fn position(&self, g: usize) -> usize {
        self.pos[g]
    }

    pub fn relations(&self, t: i32) -> &[(i32, BitVec)] {
        if t < self.lo || t > self.pres.truncation {
            return &[];
        }
        &self.rels[(t - self.lo) as usize]
    }

    pub fn has_relations(&self) -> bool {
        self.pres.has_relations()
    }

    /// Whether `v`, read in bidegree `(t, w)`, lies in the relation
    /// submodule.
    pub fn is_zero(&self, t: i32, w: i32, v: &BitVec) -> bool {
        if v.is_zero() {
            return true;
        }
        let rels = self.relations(t);
        if rels.is_empty() {
            return false;
        }
        let mut e = Echelon::new(self.dim(t));
        for (rw, r) in rels {
            if *rw <= w {
                e.insert(r.clone());
            }
        }
        e.contains(v)
    }

    /// `Sq^{2^k}` applied to a vector of degree `t`.
    pub fn sq(&self, k: u32, t: i32, v: &BitVec) -> BitVec {
        let (dd, _) = sq_bidegree(k);
        let slice = self.slice(t);
        let mut out = BitVec::zeros(self.dim(t + dd));
        if k as usize >= self.pres.ops() {
            return out;
        }
        for i in v.iter_ones() {
            for &tg in self.pres.action(k, slice[i]) {
                out.flip(self.pos[tg]);
            }
        }
        out
    }

    /// `P^op · g` for a generator `g`, or `None` above the truncation.
    pub fn act_gen(&self, op: u32, g: usize) -> Option<Arc<BitVec>> {
        if let Some(v) = self.cache.get(&(op, g)) {
            return v.clone();
        }
        let d = self.algebra.degree(op) as i32;
        let t = self.pres.generators[g].deg;
        let out = if t + d > self.pres.truncation {
            None
        } else if d == 0 {
            Some(Arc::new(BitVec::unit(self.dim(t), self.pos[g])))
        } else {
            let mut acc = BitVec::zeros(self.dim(t + d));
            for (k, thetas) in self.algebra.generator_decomposition(op).iter() {
                let (dd, _) = sq_bidegree(*k);
                let mut inner = BitVec::zeros(self.dim(t + d - dd));
                for &th in thetas {
                    inner.xor_assign(&self.act_gen(th, g).expect("lower degree is in range"));
                }
                acc.xor_assign(&self.sq(*k, t + d - dd, &inner));
            }
            Some(Arc::new(acc))
        };
        self.cache.insert((op, g), out.clone());
        out
    }

    /// `P^op · v` for `v` in degree `t`.
    pub fn act(&self, op: u32, t: i32, v: &BitVec) -> Option<BitVec> {
        let d = self.algebra.degree(op) as i32;
        if t + d > self.pres.truncation {
            return None;
        }
        let slice = self.slice(t);
        let mut acc = BitVec::zeros(self.dim(t + d));
        for i in v.iter_ones() {
            acc.xor_assign(&*self.act_gen(op, slice[i])?);
        }
        Some(acc)
    }

    /// First degree where the module has τ-torsion, if any.
    pub fn torsion_witness(&self) -> Option<TorsionWitness> {
        for t in self.lo..=self.pres.truncation {
            let rels = self.relations(t);
            if rels.is_empty() {
                continue;
            }
            if let (_, Some((wt, element))) = saturation(&self.weights(t), rels) {
                return Some(TorsionWitness { deg: t, wt, element });
            }
        }
        None
    }

    pub fn is_m2_free(&self) -> bool {
        self.torsion_witness().is_none()
    }

    /// Rank over F2 of the relation space at `(t, w)`.
    pub fn relation_rank(&self, t: i32, w: i32) -> usize {
        let mut e = Echelon::new(self.dim(t));
        let mut r = 0;
        for (rw, v) in self.relations(t) {
            if *rw <= w {
                if let Insert::Independent { .. } = e.insert(v.clone()) {
                    r += 1;
                }
            }
        }
        r
    }

    /// F2-dimension of the module in bidegree `(t, w)`.
    pub fn dim_at(&self, t: i32, w: i32) -> usize {
        self.weights(t).iter().filter(|&&x| x <= w).count() - self.relation_rank(t, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amodule::presentation::GenSpec;
    use crate::milnor::Profile;

    #[test]
    fn tau_quotient_has_torsion() {
        let mut p = ModulePresentation::new("M2/t", Profile::Full, 4, vec![GenSpec::new("1", 0, 0)]);
        p.add_relation_at(1, vec![0]).unwrap();
        let m = SteenrodModule::new(p).unwrap();
        let w = m.torsion_witness().unwrap();
        assert_eq!((w.deg, w.wt), (0, 0));
        assert_eq!(m.dim_at(0, 0), 1);
        assert_eq!(m.dim_at(0, 5), 0);
    }

    #[test]
    fn saturation_reduces_to_free_positions() {
        // relation g0 + g1 with weights 0, 1: quotient free on g0
        let (sat, wit) = saturation(&[0, 1], &[(1, BitVec::from_ones(2, [0, 1]))]);
        assert!(wit.is_none());
        assert_eq!(sat.free_positions(), vec![0]);
        assert_eq!(sat.reduce(&BitVec::unit(2, 1)), BitVec::unit(2, 0));
    }
}
