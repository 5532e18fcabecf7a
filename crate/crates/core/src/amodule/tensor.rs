use super::compute::SteenrodModule;
use super::presentation::{sq_bidegree, GenSpec, ModuleError, ModulePresentation};
use crate::f2::BitVec;
use crate::milnor::{MilnorElement, MilnorIndex, Profile};
use std::collections::HashMap;

/// `M ⊗ N` over M2 with the diagonal action, for modules without relations.
///
/// Squares act by the Cartan formula over ℂ:
/// `Sq^{2k}(xy) = Σ Sq^{2i}x Sq^{2j}y + τ Σ Sq^{2i+1}x Sq^{2j+1}y` and
/// `Sq^{2k+1}(xy) = Σ Sq^a x Sq^b y` over `a + b = 2k + 1`.
pub fn tensor(m: &ModulePresentation, n: &ModulePresentation, truncation: i32) -> Result<ModulePresentation, ModuleError> {
    if m.has_relations() || n.has_relations() {
        return Err(ModuleError::NotAModule("tensor products need relation-free factors".into()));
    }
    if m.profile != Profile::Full || n.profile != Profile::Full {
        return Err(ModuleError::NotAModule("tensor products are formed over A".into()));
    }
    let (mlo, nlo) = (m.min_degree(), n.min_degree());
    let mut mm = m.clone();
    mm.truncation = mm.truncation.min(truncation - nlo);
    let mut nn = n.clone();
    nn.truncation = nn.truncation.min(truncation - mlo);
    let (ms, ns) = (SteenrodModule::new(mm)?, SteenrodModule::new(nn)?);

    let mut gens = Vec::new();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, x) in m.generators.iter().enumerate() {
        for (j, y) in n.generators.iter().enumerate() {
            if x.deg + y.deg <= truncation {
                index.insert((i, j), gens.len());
                gens.push(GenSpec::new(format!("{}|{}", x.name, y.name), x.deg + y.deg, x.wt + y.wt));
            }
        }
    }
    let pairs: Vec<(usize, usize)> = {
        let mut p: Vec<_> = index.iter().map(|(&k, &v)| (v, k)).collect();
        p.sort();
        p.into_iter().map(|(_, k)| k).collect()
    };
    let name = format!("{}|{}", m.name, n.name);
    let mut out = ModulePresentation::new(name, Profile::Full, truncation, gens);

    // Sq^a on a single generator, as generator indices of the factor
    let sq_on = |s: &SteenrodModule, a: u32, g: usize| -> Vec<usize> {
        if a == 0 {
            return vec![g];
        }
        let alg = s.algebra();
        let Some(id) = alg.id(&MilnorIndex::new(vec![a])) else { return Vec::new() };
        let deg = s.presentation().generators[g].deg;
        match s.act_gen(id, g) {
            Some(v) => v.iter_ones().map(|p| s.slice(deg + a as i32)[p]).collect(),
            None => Vec::new(),
        }
    };

    for (pi, &(i, j)) in pairs.iter().enumerate() {
        for k in 0..out.ops() as u32 {
            let (dd, _) = sq_bidegree(k);
            if out.generators[pi].deg + dd > truncation {
                continue;
            }
            let total = dd as u32;
            let mut hit: HashMap<usize, bool> = HashMap::new();
            // odd/odd terms carry the τ, which is implicit in the weights
            for a in 0..=total {
                let b = total - a;
                let xs = sq_on(&ms, a, i);
                if xs.is_empty() {
                    continue;
                }
                let ys = sq_on(&ns, b, j);
                for &x in &xs {
                    for &y in &ys {
                        if let Some(&t) = index.get(&(x, y)) {
                            *hit.entry(t).or_insert(false) ^= true;
                        }
                    }
                }
            }
            let targets: Vec<usize> = hit.into_iter().filter(|e| e.1).map(|e| e.0).collect();
            out.set_action(k, pi, targets)?;
        }
    }
    Ok(out)
}

/// `χ(Sq^n)` from `Σ_{a+b=n} τ^e χ(Sq^a) Sq^b = 0`, with `e` restoring
/// homogeneity on odd/odd terms.
pub fn conjugate_sq(n: u32) -> MilnorElement {
    let mut chi = vec![MilnorElement::basis(MilnorIndex::unit())];
    for m in 1..=n {
        let wm = m / 2;
        let mut acc = MilnorElement::zero();
        for a in 0..m {
            let term = chi[a as usize].mul(&MilnorElement::basis(MilnorIndex::new(vec![m - a])));
            if let Ok(Some((_, w))) = term.bidegree() {
                acc = acc.add(&term.tau_times(wm - w)).expect("homogeneous");
            }
        }
        chi.push(acc);
    }
    chi.pop().unwrap()
}

/// The M2-dual `Hom(M, M2)` of a finite relation-free module: generators
/// `x*` in bidegree `(-deg, -wt)` with `(θφ)(x) = φ(χ(θ)x)`.
pub fn dual(m: &ModulePresentation) -> Result<ModulePresentation, ModuleError> {
    if m.has_relations() {
        return Err(ModuleError::NotAModule("duals need relation-free modules".into()));
    }
    if m.generators.iter().any(|g| g.deg > m.truncation) {
        return Err(ModuleError::NotAModule(format!("{} must be finite below its truncation", m.name)));
    }
    let s = SteenrodModule::new(m.clone())?;
    let alg = s.algebra().clone();
    let gens: Vec<GenSpec> = m.generators.iter().map(|g| GenSpec::new(format!("{}*", g.name), -g.deg, -g.wt)).collect();
    let span = m.generators.iter().map(|g| g.deg).max().unwrap_or(0) - m.min_degree();
    let mut out = ModulePresentation::new(format!("D{}", m.name), Profile::Full, -m.min_degree(), gens);
    for k in 0..out.ops() as u32 {
        let (dd, _) = sq_bidegree(k);
        if dd > span {
            continue;
        }
        let chi: Vec<u32> = conjugate_sq(dd as u32).terms().filter_map(|(i, _)| alg.id(i)).collect();
        for (y, ys) in m.generators.iter().enumerate() {
            // Sq y* = Σ x* over x with y in χ(Sq) x
            let mut targets = Vec::new();
            for (x, xs) in m.generators.iter().enumerate() {
                if xs.deg + dd != ys.deg {
                    continue;
                }
                let mut v = BitVec::zeros(s.dim(ys.deg));
                for &c in &chi {
                    if let Some(img) = s.act_gen(c, x) {
                        v.xor_assign(&img);
                    }
                }
                if v.get(s.position(y)) {
                    targets.push(x);
                }
            }
            out.set_action(k, y, targets)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amodule::preset;

    #[test]
    fn conjugates_of_low_squares() {
        assert_eq!(conjugate_sq(1).to_string(), "P(1)");
        assert_eq!(conjugate_sq(2).to_string(), "P(2)");
        // χ(Sq³) = Sq²Sq¹ = P(3) + P(0,1)
        assert_eq!(conjugate_sq(3).to_string(), "P(0,1) + P(3)");
    }

    #[test]
    fn dual_of_ceta_is_a_shifted_ceta() {
        let d = dual(&preset("Ceta", 4).unwrap()).unwrap();
        let bideg: Vec<(i32, i32)> = d.generators.iter().map(|g| (g.deg, g.wt)).collect();
        assert_eq!(bideg, vec![(2, 1), (0, 0)]);
        assert_eq!(d.action(1, 1), &[0]);
        assert!(d.action(0, 1).is_empty());
    }

    #[test]
    fn tensor_with_a0() {
        let c = dual(&preset("Ceta", 4).unwrap()).unwrap();
        let t = tensor(&preset("A0", 6).unwrap(), &c, 6).unwrap();
        assert_eq!(t.len(), 4);
        let m = SteenrodModule::new(t).unwrap();
        // Sq²(Sq1|u*) = Sq1|e* + τ·(Sq1 Sq1 = 0) and Sq¹(1|e*) = Sq1|e*
        assert_eq!(m.dim(3), 1);
        assert_eq!(m.dim(2), 1);
    }
}
