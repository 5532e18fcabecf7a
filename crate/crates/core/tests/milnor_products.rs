use motivic_ext::milnor::*;
use proptest::prelude::*;

fn p(s: &[u32]) -> MilnorIndex {
    MilnorIndex::new(s.to_vec())
}

#[test]
fn fast_product_matches_coproduct_pairing() {
    let all = basis(16, Profile::Full);
    for a in &all {
        for b in &all {
            if a.degree() + b.degree() > 16 {
                continue;
            }
            assert_eq!(multiply_indices(a, b), multiply_by_pairing(a, b), "{a} * {b}");
        }
    }
}

#[test]
fn coproduct_is_coassociative_on_basis_duals() {
    // (Δ ⊗ 1)Δ = (1 ⊗ Δ)Δ, compared as sets of triples
    use std::collections::HashSet;
    for c in basis(14, Profile::Full) {
        let m = c.dual();
        let mut left: HashSet<(DualMonomial, DualMonomial, DualMonomial)> = HashSet::new();
        let mut right = HashSet::new();
        let flip = |set: &mut HashSet<_>, x| {
            if !set.remove(&x) {
                set.insert(x);
            }
        };
        let strip = |mut d: DualMonomial| {
            d.tau_power = 0;
            d
        };
        for (x, y) in coproduct(&m).keys() {
            for (x1, x2) in coproduct(&strip(x.clone())).keys() {
                flip(&mut left, (strip(x1.clone()), strip(x2.clone()), y.clone()));
            }
            for (y1, y2) in coproduct(y).keys() {
                flip(&mut right, (strip(x.clone()), strip(y1.clone()), strip(y2.clone())));
            }
        }
        assert_eq!(left, right, "coassociativity fails on the dual of {c}");
    }
}

#[test]
fn associativity_through_degree_16() {
    let alg = MilnorAlgebra::new(Profile::Full, 16);
    let all = basis(16, Profile::Full);
    for a in all.iter().filter(|x| !x.is_unit()) {
        for b in all.iter().filter(|x| !x.is_unit() && a.degree() + x.degree() < 16) {
            for c in all.iter().filter(|x| !x.is_unit() && a.degree() + b.degree() + x.degree() <= 16) {
                let (ea, eb, ec) = (MilnorElement::basis(a.clone()), MilnorElement::basis(b.clone()), MilnorElement::basis(c.clone()));
                let l = alg.multiply(&alg.multiply(&ea, &eb).unwrap(), &ec).unwrap();
                let r = alg.multiply(&ea, &alg.multiply(&eb, &ec).unwrap()).unwrap();
                assert_eq!(l, r, "({a} {b}) {c}");
            }
        }
    }
}

#[test]
fn adem_relation_with_tau() {
    // Sq2 Sq2 = τ Sq3 Sq1
    let sq = |n| MilnorElement::basis(p(&[n]));
    assert_eq!(sq(2).mul(&sq(2)), sq(3).mul(&sq(1)).tau_times(1));
    // Sq1 Sq2 = Sq3
    assert_eq!(sq(1).mul(&sq(2)), sq(3));
}

#[test]
fn a1_sub_algebra_is_closed() {
    let all = basis(6, Profile::A1);
    assert_eq!(all.len(), 8);
    for a in &all {
        for b in &all {
            for c in multiply_indices(a, b) {
                assert!(Profile::A1.contains(&c), "{a} {b} leaves A(1) via {c}");
            }
        }
    }
}

#[test]
fn a_is_free_as_right_a1_module() {
    let report = verify_right_a1_free(24);
    assert!(report.is_isomorphism(), "{report:?}");
    for (_, a, m) in &report.dims {
        assert_eq!(a, m);
    }
}

fn index_strategy() -> impl Strategy<Value = MilnorIndex> {
    proptest::collection::vec(0u32..6, 0..3).prop_map(MilnorIndex::new)
}

proptest! {
    #[test]
    fn products_are_homogeneous(a in index_strategy(), b in index_strategy()) {
        let d = a.degree() + b.degree();
        let w = a.weight() + b.weight();
        for c in multiply_indices(&a, &b) {
            prop_assert_eq!(c.degree(), d);
            prop_assert!(c.weight() <= w);
        }
    }

    #[test]
    fn unit_is_neutral(a in index_strategy()) {
        prop_assert_eq!(multiply_indices(&MilnorIndex::unit(), &a), vec![a.clone()]);
        prop_assert_eq!(multiply_indices(&a, &MilnorIndex::unit()), vec![a]);
    }

    #[test]
    fn excess_is_subadditive(a in index_strategy(), b in index_strategy()) {
        let prod = MilnorElement::basis(a.clone()).mul(&MilnorElement::basis(b.clone()));
        prop_assert!(prod.excess() <= a.excess() + b.excess());
        // the top-excess term is given by binomial coefficients
        let (coeff, sum) = leading_term(&a, &b);
        let has = prod.terms().any(|(s, _)| *s == sum);
        prop_assert_eq!(has, coeff);
    }

    #[test]
    fn tau_is_central(a in index_strategy(), b in index_strategy(), k in 0u32..4) {
        let ea = MilnorElement::basis(a);
        let eb = MilnorElement::basis(b);
        prop_assert_eq!(ea.tau_times(k).mul(&eb), ea.mul(&eb).tau_times(k));
        prop_assert_eq!(ea.mul(&eb.tau_times(k)), ea.mul(&eb).tau_times(k));
    }

    #[test]
    fn printed_elements_parse_back(a in index_strategy(), k in 0u32..5) {
        let e = MilnorElement::monomial(k, a);
        prop_assert_eq!(MilnorElement::parse(&e.to_string()).unwrap(), e);
    }
}

#[test]
fn leading_term_exhaustive_through_degree_12() {
    let all = basis(12, Profile::Full);
    for a in &all {
        for b in all.iter().filter(|b| a.degree() + b.degree() <= 12) {
            let prod = multiply_indices(a, b);
            let (coeff, sum) = leading_term(a, b);
            assert_eq!(prod.contains(&sum), coeff, "{a} {b}");
            for c in &prod {
                assert!(*c == sum || c.excess() < sum.excess(), "{a} {b} has {c} of excess >= {}", sum.excess());
            }
        }
    }
}

fn index_up_to(max_deg: u32) -> impl Strategy<Value = MilnorIndex> {
    let all = basis(max_deg, Profile::Full);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn associativity_sampled_to_degree_24(a in index_up_to(12), b in index_up_to(10), c in index_up_to(8)) {
        prop_assume!(a.degree() + b.degree() + c.degree() <= 24);
        let (ea, eb, ec) = (MilnorElement::basis(a), MilnorElement::basis(b), MilnorElement::basis(c));
        prop_assert_eq!(ea.mul(&eb).mul(&ec), ea.mul(&eb.mul(&ec)));
    }
}
