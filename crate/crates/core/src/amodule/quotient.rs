use super::compute::saturation;
use super::presentation::{sq_bidegree, GenSpec, ModuleError, ModulePresentation};
use crate::f2::{BitVec, Echelon, Insert};
use crate::milnor::{shared_algebra, MilnorElement, Profile};
use std::collections::HashMap;

/// A torsion class found in a quotient, named by its ambient terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedWitness {
    pub deg: i32,
    pub wt: i32,
    pub terms: Vec<String>,
}

/// `F/R` for a free module `F` on `free_gens` and the submodule `R`
/// generated by `relations`, each a sum of `θ · g`.
#[derive(Clone, Debug)]
pub struct FreeQuotient {
    pub presentation: ModulePresentation,
    /// For each presentation generator, the ambient basis element
    /// `(Milnor id, free generator)` it is the class of.
    pub ambient: Vec<(u32, usize)>,
    pub free_gens: Vec<GenSpec>,
    /// `None` when the quotient is M2-free within the truncation.
    pub torsion: Option<NamedWitness>,
}

impl FreeQuotient {
    pub fn is_m2_free(&self) -> bool {
        self.torsion.is_none()
    }
}

fn element_name(s: &crate::milnor::MilnorIndex, gen: &GenSpec, single_unit: bool) -> String {
    if s.is_unit() {
        gen.name.clone()
    } else if single_unit {
        s.to_string()
    } else {
        format!("{s}*{}", gen.name)
    }
}

pub fn free_quotient(
    name: &str,
    profile: Profile,
    free_gens: &[GenSpec],
    relations: &[Vec<(usize, MilnorElement)>],
    truncation: i32,
) -> Result<FreeQuotient, ModuleError> {
    let lo = free_gens.iter().map(|g| g.deg).min().unwrap_or(0);
    let alg = shared_algebra(profile, (truncation - lo).max(0) as u32);
    let single_unit = free_gens.len() == 1 && free_gens[0].name == "1";

    // ambient basis per degree
    let span = (truncation - lo).max(0) as usize + 1;
    let mut amb: Vec<Vec<(u32, usize)>> = vec![Vec::new(); span];
    let mut index: Vec<HashMap<(u32, usize), usize>> = vec![HashMap::new(); span];
    for (t, (slot, idx)) in amb.iter_mut().zip(index.iter_mut()).enumerate() {
        let t = t as i32 + lo;
        for (i, g) in free_gens.iter().enumerate() {
            if t < g.deg {
                continue;
            }
            let d = (t - g.deg) as u32;
            for j in 0..alg.dim(d) {
                let id = (alg.offset(d) + j) as u32;
                idx.insert((id, i), slot.len());
                slot.push((id, i));
            }
        }
    }
    let weight = |(id, i): (u32, usize)| alg.weight(id) + free_gens[i].wt;

    // relation generators as ambient vectors
    let mut rel_gens: Vec<(i32, i32, Vec<(u32, usize)>)> = Vec::new();
    for (ri, rel) in relations.iter().enumerate() {
        let mut terms: HashMap<(u32, usize), ()> = HashMap::new();
        let mut bideg = None;
        for (g, theta) in rel {
            for (s, c) in theta.terms() {
                let bd = (s.degree() as i32 + free_gens[*g].deg, s.weight() as i32 + c as i32 + free_gens[*g].wt);
                if bideg.is_some_and(|b| b != bd) {
                    return Err(ModuleError::Relation(ri));
                }
                bideg = Some(bd);
                let id = alg.id(s).ok_or_else(|| ModuleError::TruncationTooSmall {
                    truncation,
                    reason: format!("relation term {s} is outside the algebra"),
                })?;
                if terms.remove(&(id, *g)).is_none() {
                    terms.insert((id, *g), ());
                }
            }
        }
        if let Some((d, w)) = bideg {
            if d > truncation {
                return Err(ModuleError::TruncationTooSmall { truncation, reason: format!("relation {ri} sits in degree {d}") });
            }
            rel_gens.push((d, w, terms.into_keys().collect()));
        }
    }

    // R_t spanned by P^U · r
    let mut rels: Vec<Vec<(i32, BitVec)>> = vec![Vec::new(); span];
    for (d, w, terms) in &rel_gens {
        for t in *d..=truncation {
            let u_deg = (t - d) as u32;
            let slot = (t - lo) as usize;
            for j in 0..alg.dim(u_deg) {
                let u = (alg.offset(u_deg) + j) as u32;
                let mut v = BitVec::zeros(amb[slot].len());
                for &(s, g) in terms {
                    for &c in alg.product(u, s).iter() {
                        v.flip(index[slot][&(c, g)]);
                    }
                }
                rels[slot].push((alg.weight(u) + w, v));
            }
        }
    }

    let mut torsion = None;
    let mut sats = Vec::with_capacity(span);
    for slot in 0..span {
        let weights: Vec<i32> = amb[slot].iter().map(|&e| weight(e)).collect();
        let (sat, wit) = saturation(&weights, &rels[slot]);
        if torsion.is_none() {
            if let Some((wt, v)) = wit {
                torsion = Some(NamedWitness {
                    deg: slot as i32 + lo,
                    wt,
                    terms: v
                        .iter_ones()
                        .map(|p| {
                            let (id, g) = amb[slot][p];
                            element_name(alg.element(id), &free_gens[g], single_unit)
                        })
                        .collect(),
                });
            }
        }
        sats.push(sat);
    }

    // presentation generators: free positions when saturated, else all
    let keep: Vec<Vec<usize>> = if torsion.is_none() {
        sats.iter().map(|s| s.free_positions()).collect()
    } else {
        amb.iter().map(|a| (0..a.len()).collect()).collect()
    };
    let mut gens = Vec::new();
    let mut ambient = Vec::new();
    let mut pres_index: Vec<HashMap<usize, usize>> = vec![HashMap::new(); span];
    for slot in 0..span {
        for &p in &keep[slot] {
            let (id, g) = amb[slot][p];
            pres_index[slot].insert(p, gens.len());
            gens.push(GenSpec::new(
                element_name(alg.element(id), &free_gens[g], single_unit),
                slot as i32 + lo,
                weight((id, g)),
            ));
            ambient.push((id, g));
        }
    }
    let mut pres = ModulePresentation::new(name, profile, truncation, gens);
    let ops = pres.ops() as u32;
    for (pi, &(id, g)) in ambient.clone().iter().enumerate() {
        let t = pres.generators[pi].deg;
        for k in 0..ops {
            let (dd, _) = sq_bidegree(k);
            if t + dd > truncation {
                continue;
            }
            let slot = (t + dd - lo) as usize;
            let mut v = BitVec::zeros(amb[slot].len());
            for &c in alg.product(alg.sq_id(k), id).iter() {
                v.flip(index[slot][&(c, g)]);
            }
            if torsion.is_none() {
                v = sats[slot].reduce(&v);
            }
            let targets = v.iter_ones().map(|p| pres_index[slot][&p]).collect();
            pres.set_action(k, pi, targets)?;
        }
    }
    if torsion.is_some() {
        // a minimal M2-generating set of R per degree
        for slot in 0..span {
            let mut sorted: Vec<&(i32, BitVec)> = rels[slot].iter().collect();
            sorted.sort_by_key(|r| r.0);
            let mut e = Echelon::new(amb[slot].len());
            for (w, v) in sorted {
                if let Insert::Independent { .. } = e.insert(v.clone()) {
                    pres.add_relation_at(*w, v.iter_ones().map(|p| pres_index[slot][&p]).collect())?;
                }
            }
        }
    }
    Ok(FreeQuotient { presentation: pres, ambient, free_gens: free_gens.to_vec(), torsion })
}

/// `A/(A · elements)`: the left module of `A` modulo right multiples.
pub fn quotient_by_right_multiples(name: &str, elements: &[MilnorElement], truncation: i32) -> Result<FreeQuotient, ModuleError> {
    let rels: Vec<Vec<(usize, MilnorElement)>> = elements.iter().map(|e| vec![(0, e.clone())]).collect();
    free_quotient(name, Profile::Full, &[GenSpec::new("1", 0, 0)], &rels, truncation)
}
