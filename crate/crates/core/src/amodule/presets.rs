use super::compute::SteenrodModule;
use super::presentation::{GenSpec, ModuleError, ModulePresentation};
use super::quotient::{free_quotient, quotient_by_right_multiples, FreeQuotient};
use crate::f2::{BitVec, Echelon};
use crate::milnor::{basis, MilnorElement, MilnorIndex, Profile};
use std::collections::BTreeMap;

pub const PRESETS: &[&str] = &["M2", "A0", "Ceta", "Atilde1", "Atilde", "AmodA0", "I", "N", "AmodB", "A", "M2modtau"];

fn sq(n: u32) -> MilnorElement {
    MilnorElement::basis(MilnorIndex::new(vec![n]))
}

/// Relations `Sq²a + τb` and `Sq³Sq¹a + Sq²b`.
fn atilde_relations() -> Vec<Vec<(usize, MilnorElement)>> {
    vec![
        vec![(0, sq(2)), (1, MilnorElement::monomial(1, MilnorIndex::unit()))],
        vec![(0, sq(3).mul(&sq(1))), (1, sq(2))],
    ]
}

fn atilde_gens() -> Vec<GenSpec> {
    vec![GenSpec::new("a", 0, 0), GenSpec::new("b", 2, 0)]
}

/// `Ã(1)` over A(1), or `Ã = A ⊗_{A(1)} Ã(1)` over A, with the quotient data.
pub fn atilde_quotient(profile: Profile, truncation: i32) -> Result<FreeQuotient, ModuleError> {
    if truncation < 4 {
        return Err(ModuleError::TruncationTooSmall { truncation, reason: "the relations of Ã live in degree 4".into() });
    }
    let name = if profile == Profile::A1 { "Atilde1" } else { "Atilde" };
    free_quotient(name, profile, &atilde_gens(), &atilde_relations(), truncation)
}

pub fn amod_a0(truncation: i32) -> Result<FreeQuotient, ModuleError> {
    quotient_by_right_multiples("AmodA0", &[sq(1)], truncation)
}

/// `(I, N)` with `I` the augmentation ideal of `A//A(0)` and
/// `N = Σ^{-2,-1} I`.
pub fn augmentation_ideal(amod_a0: &ModulePresentation) -> Result<(ModulePresentation, ModulePresentation), ModuleError> {
    let i = amod_a0.restrict("I", |g| g.deg > 0)?;
    let mut n = i.suspend(-2, -1);
    n.name = "N".into();
    Ok((i, n))
}

pub fn preset(name: &str, truncation: i32) -> Result<ModulePresentation, ModuleError> {
    let t = truncation;
    Ok(match name {
        "M2" => ModulePresentation::new("M2", Profile::Full, t, vec![GenSpec::new("1", 0, 0)]),
        "M2modtau" => {
            let mut m = ModulePresentation::new("M2modtau", Profile::Full, t, vec![GenSpec::new("1", 0, 0)]);
            m.add_relation_at(1, vec![0])?;
            m
        }
        "A0" => {
            if t < 1 {
                return Err(ModuleError::TruncationTooSmall { truncation: t, reason: "A(0) has a class in degree 1".into() });
            }
            let mut m = ModulePresentation::new("A0", Profile::Full, t, vec![GenSpec::new("1", 0, 0), GenSpec::new("Sq1", 1, 0)]);
            m.set_action(0, 0, vec![1])?;
            m
        }
        "Ceta" => {
            if t < 0 {
                return Err(ModuleError::TruncationTooSmall { truncation: t, reason: "Cη has a top cell in degree 0".into() });
            }
            let mut m = ModulePresentation::new("Ceta", Profile::Full, t, vec![GenSpec::new("e", -2, -1), GenSpec::new("u", 0, 0)]);
            m.set_action(1, 0, vec![1])?;
            m
        }
        "Atilde1" => atilde_quotient(Profile::A1, t)?.presentation,
        "Atilde" => atilde_quotient(Profile::Full, t)?.presentation,
        "AmodA0" => amod_a0(t)?.presentation,
        "I" => augmentation_ideal(&amod_a0(t)?.presentation)?.0,
        "N" => augmentation_ideal(&amod_a0(t + 2)?.presentation)?.1,
        "AmodB" => {
            quotient_by_right_multiples("AmodB", &[MilnorElement::monomial(1, MilnorIndex::new(vec![1]))], t)?.presentation
        }
        "A" => quotient_by_right_multiples("A", &[], t)?.presentation,
        other => return Err(ModuleError::UnknownPreset(other.to_string())),
    })
}

/// A degree-preserving map between presentations, given on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    pub images: Vec<Vec<usize>>,
}

/// `0 → sub → mid → quot → 0`.
#[derive(Clone, Debug)]
pub struct ShortExactSequence {
    pub sub: ModulePresentation,
    pub mid: ModulePresentation,
    pub quot: ModulePresentation,
    pub incl: ModuleMap,
    pub proj: ModuleMap,
}

fn map_matrix(src: &SteenrodModule, tgt: &SteenrodModule, f: &ModuleMap, t: i32) -> Vec<(i32, BitVec)> {
    src.slice(t)
        .iter()
        .map(|&g| {
            let v = BitVec::from_ones(tgt.dim(t), f.images[g].iter().map(|&h| tgt.position(h)));
            (src.presentation().generators[g].wt, v)
        })
        .collect()
}

fn rank_upto(cols: &[(i32, BitVec)], w: i32, dim: usize) -> usize {
    let mut e = Echelon::new(dim);
    for (cw, c) in cols {
        if *cw <= w {
            e.insert(c.clone());
        }
    }
    e.rank()
}

fn check_linear(src: &SteenrodModule, tgt: &SteenrodModule, f: &ModuleMap, label: &str) -> Result<(), String> {
    let ops = src.presentation().ops().min(tgt.presentation().ops()) as u32;
    for t in src.min_degree()..=src.truncation() {
        let cols = map_matrix(src, tgt, f, t);
        for k in 0..ops {
            let (dd, _) = super::presentation::sq_bidegree(k);
            if t + dd > src.truncation().min(tgt.truncation()) {
                continue;
            }
            let next = map_matrix(src, tgt, f, t + dd);
            for (i, (_, c)) in cols.iter().enumerate() {
                let lhs = tgt.sq(k, t, c);
                let s = src.sq(k, t, &BitVec::unit(src.dim(t), i));
                let mut rhs = BitVec::zeros(tgt.dim(t + dd));
                for j in s.iter_ones() {
                    rhs.xor_assign(&next[j].1);
                }
                if lhs != rhs {
                    return Err(format!("{label} does not commute with Sq{} in degree {t}", 1 << k));
                }
            }
        }
    }
    Ok(())
}

impl ShortExactSequence {
    /// Checks linearity and exactness in every bidegree within the common
    /// truncation. The three modules must be given without relations.
    pub fn verify(&self) -> Result<(), String> {
        let build = |p: &ModulePresentation| SteenrodModule::new(p.clone()).map_err(|e| e.to_string());
        let (a, b, c) = (build(&self.sub)?, build(&self.mid)?, build(&self.quot)?);
        if a.has_relations() || b.has_relations() || c.has_relations() {
            return Err("exactness is only checked for relation-free presentations".into());
        }
        check_linear(&a, &b, &self.incl, "inclusion")?;
        check_linear(&b, &c, &self.proj, "projection")?;
        let top = a.truncation().min(b.truncation()).min(c.truncation());
        let lo = a.min_degree().min(b.min_degree()).min(c.min_degree());
        for t in lo..=top {
            let f = map_matrix(&a, &b, &self.incl, t);
            let g = map_matrix(&b, &c, &self.proj, t);
            for (_, col) in &f {
                let mut img = BitVec::zeros(c.dim(t));
                for j in col.iter_ones() {
                    img.xor_assign(&g[j].1);
                }
                if !img.is_zero() {
                    return Err(format!("composite is nonzero in degree {t}"));
                }
            }
            let ws: Vec<i32> = a.weights(t).into_iter().chain(b.weights(t)).chain(c.weights(t)).collect();
            let (wlo, whi) = (ws.iter().min().copied().unwrap_or(0), ws.iter().max().copied().unwrap_or(0));
            for w in wlo..=whi {
                let da = a.dim_at(t, w);
                let db = b.dim_at(t, w);
                let dc = c.dim_at(t, w);
                let rf = rank_upto(&f, w, b.dim(t));
                let rg = rank_upto(&g, w, c.dim(t));
                if rf != da {
                    return Err(format!("inclusion is not injective at ({t},{w})"));
                }
                if rg != dc {
                    return Err(format!("projection is not surjective at ({t},{w})"));
                }
                if db - rg != rf {
                    return Err(format!("not exact in the middle at ({t},{w})"));
                }
            }
        }
        Ok(())
    }

    /// `0 → M2 → Cη → Σ^{-2,-1}M2 → 0`.
    pub fn ceta(truncation: i32) -> Result<Self, ModuleError> {
        let mid = preset("Ceta", truncation)?;
        let sub = preset("M2", truncation)?;
        let mut quot = preset("M2", truncation + 2)?.suspend(-2, -1);
        quot.generators[0].name = "e".into();
        Ok(ShortExactSequence {
            sub,
            mid,
            quot,
            incl: ModuleMap { images: vec![vec![1]] },
            proj: ModuleMap { images: vec![vec![0], vec![]] },
        })
    }

    /// `0 → Σ^{1,0}M2 → A(0) → M2 → 0`.
    pub fn a0(truncation: i32) -> Result<Self, ModuleError> {
        Ok(ShortExactSequence {
            sub: preset("M2", truncation - 1)?.suspend(1, 0),
            mid: preset("A0", truncation)?,
            quot: preset("M2", truncation)?,
            incl: ModuleMap { images: vec![vec![1]] },
            proj: ModuleMap { images: vec![vec![0], vec![]] },
        })
    }
}

/// Per-bidegree comparison of the two-relation presentation of Ã with
/// `A ⊗_{A(1)} Ã(1)` computed from the right A(1)-basis of A.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TensorCheck {
    pub truncation: i32,
    /// `(deg, wt, dim from presentation, dim from tensor product)`.
    pub slices: Vec<(i32, i32, usize, usize)>,
    pub first_mismatch: Option<(i32, i32)>,
    pub presentation_is_free: bool,
}

pub fn tensor_over_a1_check(truncation: i32) -> Result<TensorCheck, ModuleError> {
    let at = atilde_quotient(Profile::Full, truncation)?;
    let a1 = atilde_quotient(Profile::A1, truncation)?;
    let mut lhs: BTreeMap<(i32, i32), usize> = BTreeMap::new();
    for g in &at.presentation.generators {
        *lhs.entry((g.deg, g.wt)).or_default() += 1;
    }
    let mut rhs: BTreeMap<(i32, i32), usize> = BTreeMap::new();
    let complement: Vec<MilnorIndex> =
        basis(truncation.max(0) as u32, Profile::Full).into_iter().filter(|s| s.get(0) % 4 == 0 && s.get(1) % 2 == 0).collect();
    for m in &complement {
        for g in &a1.presentation.generators {
            let d = m.degree() as i32 + g.deg;
            if d <= truncation {
                *rhs.entry((d, m.weight() as i32 + g.wt)).or_default() += 1;
            }
        }
    }
    let keys: std::collections::BTreeSet<(i32, i32)> = lhs.keys().chain(rhs.keys()).copied().collect();
    let mut slices = Vec::new();
    let mut first_mismatch = None;
    for k in keys {
        let (l, r) = (lhs.get(&k).copied().unwrap_or(0), rhs.get(&k).copied().unwrap_or(0));
        if l != r && first_mismatch.is_none() {
            first_mismatch = Some(k);
        }
        slices.push((k.0, k.1, l, r));
    }
    Ok(TensorCheck { truncation, slices, first_mismatch, presentation_is_free: at.is_m2_free() && a1.is_m2_free() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atilde1_matches_the_diagram() {
        let m = preset("Atilde1", 10).unwrap();
        let mut bideg: Vec<(i32, i32)> = m.generators.iter().map(|g| (g.deg, g.wt)).collect();
        bideg.sort();
        assert_eq!(bideg, vec![(0, 0), (1, 0), (2, 0), (3, 0), (3, 1), (4, 1), (5, 1), (6, 1)]);
    }

    #[test]
    fn every_preset_builds() {
        for name in PRESETS {
            let p = preset(name, 12).unwrap();
            SteenrodModule::new(p).unwrap();
        }
        assert!(matches!(preset("nope", 4), Err(ModuleError::UnknownPreset(_))));
        assert!(preset("Atilde", 3).is_err());
    }

    #[test]
    fn ceta_has_one_action() {
        let m = preset("Ceta", 4).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.action(1, 0), &[1]);
        assert!(m.action(0, 0).is_empty() && m.action(0, 1).is_empty());
    }

    #[test]
    fn bottom_of_i_is_sq2() {
        let i = preset("I", 8).unwrap();
        let low = i.generators.iter().min_by_key(|g| (g.deg, g.wt)).unwrap();
        assert_eq!((low.name.as_str(), low.deg, low.wt), ("P(2)", 2, 1));
        let n = preset("N", 8).unwrap();
        assert_eq!(n.min_degree(), 0);
    }

    #[test]
    fn tau_sq1_quotient_is_torsion() {
        let q = quotient_by_right_multiples("AmodB", &[MilnorElement::monomial(1, MilnorIndex::new(vec![1]))], 6).unwrap();
        let w = q.torsion.unwrap();
        assert_eq!((w.deg, w.wt, w.terms.clone()), (1, 0, vec!["P(1)".to_string()]));
        assert!(amod_a0(10).unwrap().is_m2_free());
    }

    #[test]
    fn short_exact_sequences() {
        ShortExactSequence::ceta(6).unwrap().verify().unwrap();
        ShortExactSequence::a0(6).unwrap().verify().unwrap();
        let mut bad = ShortExactSequence::a0(6).unwrap();
        bad.proj.images[0] = vec![];
        assert!(bad.verify().is_err());
    }

    #[test]
    fn tensor_check_agrees() {
        let r = tensor_over_a1_check(16).unwrap();
        assert_eq!(r.first_mismatch, None, "{r:?}");
        assert!(r.presentation_is_free);
    }
}
