use super::{CellKind, Resolution};
use crate::f2::{BitVec, Echelon};
use serde::{Deserialize, Serialize};

/// Checks at one `(t, f)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCheck {
    pub t: i32,
    pub f: usize,
    pub d_squared_zero: bool,
    /// `ker d_f = im d_{f+1}` in every weight (surjectivity onto the target
    /// for the augmentation). `None` at the top stage.
    pub exact: Option<bool>,
    /// No generator of stage `f` in degree `t` hits a generator of the
    /// previous stage with a unit coefficient.
    pub minimal: bool,
    /// `Sq³Sq¹ a + Sq² b ↦ 0` for Ã-cells whose relation lands in degree `t`.
    pub atilde_relations: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub checks: Vec<StageCheck>,
}

impl ExactnessReport {
    pub fn failures(&self) -> Vec<&StageCheck> {
        self.checks.iter().filter(|c| !c.d_squared_zero || c.exact == Some(false) || !c.minimal || !c.atilde_relations).collect()
    }

    pub fn all_ok(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn d_squared_ok(&self) -> bool {
        self.checks.iter().all(|c| c.d_squared_zero)
    }

    pub fn exact_ok(&self) -> bool {
        self.checks.iter().all(|c| c.exact != Some(false))
    }

    pub fn minimal_ok(&self) -> bool {
        self.checks.iter().all(|c| c.minimal)
    }
}

/// `W ↦ rank` of the span of the weight-labelled vectors of weight `≤ W`,
/// as a sorted list of `(W, rank)` steps.
fn filtered_ranks(dim: usize, mut vs: Vec<(i32, BitVec)>) -> Vec<(i32, usize)> {
    vs.sort_by_key(|v| v.0);
    let mut e = Echelon::new(dim);
    let mut out: Vec<(i32, usize)> = Vec::new();
    for (w, v) in vs {
        e.insert(v);
        match out.last_mut() {
            Some(last) if last.0 == w => last.1 = e.rank(),
            _ => out.push((w, e.rank())),
        }
    }
    out
}

fn at(steps: &[(i32, usize)], w: i32) -> usize {
    steps.iter().take_while(|s| s.0 <= w).last().map_or(0, |s| s.1)
}

impl Resolution {
    /// Recomputes every differential from the stored cells and checks
    /// `d∘d = 0`, exactness in each weight, and minimality.
    pub fn verify(&self) -> ExactnessReport {
        let mut report = ExactnessReport::default();
        let Some((max_t, max_f)) = self.bounds() else { return report };
        for t in self.lo..=max_t {
            let cols: Vec<Vec<BitVec>> = (0..=max_f).map(|f| self.columns(f, t)).collect();
            for f in 0..=max_f {
                let weights = self.weights(f as isize, t);
                let d_squared_zero = if f == 0 {
                    true
                } else if f == 1 && self.target.has_relations() {
                    cols[1].iter().zip(self.weights(1, t)).all(|(c, w)| {
                        let mut v = BitVec::zeros(self.target.dim(t));
                        for i in c.iter_ones() {
                            v.xor_assign(&cols[0][i]);
                        }
                        self.target.is_zero(t, w, &v)
                    })
                } else {
                    cols[f].iter().all(|c| {
                        let mut v = BitVec::zeros(self.dim(f as isize - 2, t));
                        for i in c.iter_ones() {
                            v.xor_assign(&cols[f - 1][i]);
                        }
                        v.is_zero()
                    })
                };

                // dim ker_W = |V_W| - (rank(d V_W + R_W) - rank R_W)
                let prev_dim = self.dim(f as isize - 1, t);
                let labelled: Vec<(i32, BitVec)> = weights.iter().copied().zip(cols[f].iter().cloned()).collect();
                let rels: Vec<(i32, BitVec)> = if f == 0 { self.target.relations(t).to_vec() } else { Vec::new() };
                let img_ranks = filtered_ranks(prev_dim, labelled.iter().cloned().chain(rels.iter().cloned()).collect());
                let rel_ranks = filtered_ranks(prev_dim, rels.clone());
                let mut probe: Vec<i32> = weights.clone();
                probe.extend(img_ranks.iter().map(|s| s.0));
                let exact = if f == 0 {
                    // the augmentation is onto
                    let tw = self.target.weights(t);
                    let mut probe = probe.clone();
                    probe.extend(tw.iter().copied());
                    let onto = probe.iter().all(|&w| at(&img_ranks, w) == tw.iter().filter(|&&x| x <= w).count());
                    Some(onto && self.exact_at(f, t, max_f, &weights, &img_ranks, &rel_ranks, &cols, &probe))
                } else if f < max_f {
                    Some(self.exact_at(f, t, max_f, &weights, &img_ranks, &rel_ranks, &cols, &probe))
                } else {
                    None
                };
                let minimal = self.minimal_at(f, t);
                let atilde_relations = self
                    .cells(f)
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.kind == CellKind::Atilde && c.deg + 4 == t)
                    .all(|(i, _)| self.second_relation_holds(f, i));
                report.checks.push(StageCheck { t, f, d_squared_zero, exact, minimal, atilde_relations });
            }
        }
        report
    }

    /// Whether no differential has a unit entry of equal weight.
    pub fn is_minimal(&self) -> bool {
        let Some((max_t, max_f)) = self.bounds() else { return true };
        (1..=max_f).all(|f| (self.lo..=max_t).all(|t| self.minimal_at(f, t)))
    }

    #[allow(clippy::too_many_arguments)]
    fn exact_at(
        &self,
        f: usize,
        t: i32,
        max_f: usize,
        weights: &[i32],
        img_ranks: &[(i32, usize)],
        rel_ranks: &[(i32, usize)],
        cols: &[Vec<BitVec>],
        probe: &[i32],
    ) -> bool {
        if f >= max_f {
            return true;
        }
        let next: Vec<(i32, BitVec)> = self.weights(f as isize + 1, t).into_iter().zip(cols[f + 1].iter().cloned()).collect();
        let mut probe = probe.to_vec();
        probe.extend(next.iter().map(|n| n.0));
        let next_ranks = filtered_ranks(weights.len(), next);
        probe.iter().all(|&w| {
            let v_w = weights.iter().filter(|&&x| x <= w).count();
            let ker = v_w - (at(img_ranks, w) - at(rel_ranks, w));
            ker == at(&next_ranks, w)
        })
    }

    fn minimal_at(&self, f: usize, t: i32) -> bool {
        if f == 0 {
            return true;
        }
        let prev = self.cells(f - 1);
        let check = |deg: i32, wt: i32, d: &BitVec, part_b: bool| {
            let s = self.slice(f - 1, deg);
            d.iter_ones().all(|i| {
                let (c, x) = s.entries[i];
                let cell = &prev[c as usize];
                let unit = match (cell.kind, part_b) {
                    (_, false) if cell.deg == deg => x == 0,
                    (CellKind::Atilde, _) if cell.deg + 2 == deg => {
                        let at = self.atilde.as_ref().unwrap();
                        let g = at.module.slice(2)[x as usize];
                        at.ambient[g] == (self.algebra.id(&crate::milnor::MilnorIndex::unit()).unwrap(), 1)
                    }
                    _ => false,
                };
                !(unit && s.weights[i] == wt)
            })
        };
        self.cells(f).iter().filter(|c| c.deg == t).all(|c| {
            check(c.deg, c.wt, &c.d, false) && c.d_b.as_ref().is_none_or(|b| check(c.deg + 2, c.wt, b, true))
        })
    }
}
