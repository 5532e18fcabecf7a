//! Products with `h0, h1, h2` by lifting cocycles to chain maps.
//!
//! A cocycle `z` on stage `f` of a resolution `R` of `M`, with values in M2,
//! lifts to `z̃: R_f → P_0 = A` where `P` resolves M2. For a cell `h` of
//! stage `f + 1`, `z̃(d h)` is a cycle of `P_0` and equals `d y` for some
//! `y` in `P_1`; the coefficient of `y` on the cell of `h_i` is `(h_i z)(h)`.

use super::chart::{Edge, HLabel};
use super::{ExtCell, ExtError, ExtTable};
use crate::amodule::preset;
use crate::f2::{BitVec, Echelon};
use crate::milnor::Profile;
use crate::resolve::{minimal_resolution, CellKind, Resolution};

pub struct ProductEngine {
    m2: Resolution,
    /// Stage-1 cell of `h_i` in the resolution of M2.
    cells: Vec<Option<usize>>,
}

impl ProductEngine {
    pub fn new(profile: Profile) -> Result<Self, ExtError> {
        let m2 = minimal_resolution(preset("M2", 4)?, profile, 4, 2)?;
        let cells = (0..3)
            .map(|i| {
                let (deg, wt) = (1 << i, if i == 0 { 0 } else { 1 << (i - 1) });
                m2.cells(1).iter().position(|c| c.deg == deg && c.wt == wt)
            })
            .collect();
        Ok(ProductEngine { m2, cells })
    }

    /// The `h_i` available over this profile.
    pub fn labels(&self) -> Vec<HLabel> {
        (0..3).filter(|&i| self.cells[i as usize].is_some()).filter_map(HLabel::from_index).collect()
    }

    /// `h_i · z` for the M2-valued cochain `z` of label `label` on stage `f`
    /// in degree `t`, given by the cells it is nonzero on. Returns the
    /// cells of stage `f + 1` the product is nonzero on.
    pub fn multiply(&self, res: &Resolution, f: usize, t: i32, label: i32, support: &[usize], h: HLabel) -> Result<Vec<usize>, ExtError> {
        let i = h.index();
        let hcell = self.cells[i as usize].ok_or_else(|| ExtError::Unsupported(format!("{h} is not in this algebra")))?;
        let deg = 1i32 << i;
        let (tt, stage) = (t + deg, f + 1);
        if res.cells(stage).iter().any(|c| c.kind == CellKind::Atilde) || res.cells(f).iter().any(|c| c.kind == CellKind::Atilde) {
            return Err(ExtError::Unsupported("products need all-A resolutions".into()));
        }
        let alg = res.algebra();
        let p0 = alg.dim(deg as u32);
        let cols = self.m2.columns(1, deg);
        let wts = self.m2.weights(1, deg);
        let m2_slice = self.m2.slice(1, deg);
        let unit = m2_slice.index(hcell, 0);
        let prev = res.slice(f, tt);

        let mut out = Vec::new();
        for (hi, cell) in res.cells(stage).iter().enumerate() {
            if cell.deg != tt {
                continue;
            }
            let mut a = BitVec::zeros(p0);
            for j in cell.d.iter_ones() {
                let (c, x) = prev.entries[j];
                if res.cells(f)[c as usize].deg == t && support.contains(&(c as usize)) {
                    a.flip(x as usize);
                }
            }
            if a.is_zero() {
                continue;
            }
            // y may only use basis elements of weight ≤ wt(h) + label
            let bound = cell.wt + label;
            let allowed: Vec<usize> = (0..wts.len()).filter(|&k| wts[k] <= bound).collect();
            let mut e = Echelon::with_history(p0, allowed.len());
            for &k in &allowed {
                e.insert(cols[k].clone());
            }
            let y = e.solve(&a).ok_or_else(|| ExtError::Unsupported(format!("cannot lift past stage {f} in degree {tt}")))?;
            if y.iter_ones().any(|k| allowed[k] == unit) {
                out.push(hi);
            }
        }
        Ok(out)
    }

    /// Edges for `h` leaving the classes of `cell`.
    pub fn edges_from(&self, table: &ExtTable, res: &Resolution, cell: &ExtCell, h: HLabel) -> Vec<Edge> {
        let [ds, _, dw] = h.shift();
        let tt = cell.t + (1 << h.index());
        let Some(target) = table.cell(cell.f + 1, tt) else { return Vec::new() };
        let mut edges = Vec::new();
        for class in cell.homology.classes() {
            let (label, z) = cell.homology.cycle(class.cycle).clone();
            let support: Vec<usize> = z.iter_ones().map(|k| cell.layout.entries[k].0 as usize).collect();
            let img = self.multiply(res, cell.f, cell.t, label, &support, h).expect("products on all-A resolutions");
            let mut v = BitVec::zeros(target.layout.len());
            for hi in img {
                if let Some(k) = target.layout.index(hi, 0, 0) {
                    v.flip(k);
                }
            }
            let plabel = label - dw;
            let coords = target.homology.coords_at(plabel, &v).expect("a product of cocycles is a cocycle");
            let from = [cell.stem(), cell.f as i32, -label];
            for k in coords {
                let l = target.homology.cycle(k).0;
                let to = [cell.stem() + ds, cell.f as i32 + 1, -l];
                edges.push(Edge { from, to, label: h, tau_twist: l < plabel });
            }
        }
        edges
    }
}
