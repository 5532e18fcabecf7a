use super::*;
use crate::resolve::resolve_with_atilde;

fn dots(c: &ExtChart) -> Vec<(i32, i32, i32, Torsion)> {
    c.dots.iter().map(|d| (d.s, d.f, d.w, d.torsion)).collect()
}

#[test]
fn ext_of_m2_in_low_degrees() {
    let c = m2_chart(&preset("M2", 6).unwrap(), 6, 2, (3, 1)).unwrap();
    assert_eq!(
        dots(&c),
        vec![(0, 0, 0, Torsion::Free), (0, 1, 0, Torsion::Free), (1, 1, 1, Torsion::Free), (3, 1, 2, Torsion::Free)]
    );
    let plain = |from: [i32; 3], to: [i32; 3], label| Edge { from, to, label, tau_twist: false };
    assert!(c.edges.contains(&plain([0, 0, 0], [0, 1, 0], HLabel::H0)));
    assert!(c.edges.contains(&plain([0, 0, 0], [1, 1, 1], HLabel::H1)));
    assert!(c.edges.contains(&plain([0, 0, 0], [3, 1, 2], HLabel::H2)));
}

#[test]
fn ext_of_a_is_one_dot() {
    let res = minimal_resolution(preset("A", 8).unwrap(), Profile::Full, 8, 3).unwrap();
    let t = ext_to_m2(&res).unwrap();
    let c = ExtChart::assemble(&t, None, (8, 2), "M2");
    assert_eq!(dots(&c), vec![(0, 0, 0, Torsion::Free)]);
}

#[test]
fn h0_and_h1_towers() {
    let c = m2_chart(&preset("M2", 12).unwrap(), 12, 7, (6, 6)).unwrap();
    for f in 0..6 {
        assert!(c.edges.iter().any(|e| e.label == HLabel::H0 && e.from == [0, f, 0] && e.to == [0, f + 1, 0]));
    }
    for k in 0..3 {
        assert!(c.edges.iter().any(|e| e.label == HLabel::H1 && e.from == [k, k, k] && e.to == [k + 1, k + 1, k + 1]));
    }
}

#[test]
fn ext_of_m2_mod_tau_is_tau_torsion() {
    let res = minimal_resolution(preset("M2modtau", 6).unwrap(), Profile::Full, 6, 3).unwrap();
    let t = ext_to_m2(&res).unwrap();
    let c = ExtChart::assemble(&t, None, (3, 2), "M2");
    assert!(c.dots.iter().all(|d| d.torsion == Torsion::Finite(1)));
    // Hom(M2/τ, M2) = 0; the bottom class comes from τ: M2 → M2
    assert!(c.dots.iter().all(|d| d.f > 0));
    assert!(c.dots.iter().any(|d| (d.s, d.f, d.w) == (-1, 1, 1)), "{:?}", c.dots);
}

#[test]
fn ceta_from_the_bottom_cell() {
    let res = minimal_resolution(preset("M2", 4).unwrap(), Profile::Full, 4, 2).unwrap();
    let t = ext_to_ceta(&res).unwrap();
    let c = ExtChart::assemble(&t, None, (0, 0), "Ceta");
    assert_eq!(dots(&c), vec![(0, 0, 0, Torsion::Free)]);
}

#[test]
fn atilde_and_free_resolutions_agree_into_ceta() {
    let m = preset("A0", 14).unwrap();
    let a = ext_to_ceta(&minimal_resolution(m.clone(), Profile::Full, 14, 5).unwrap()).unwrap();
    let b = ext_to_ceta(&resolve_with_atilde(m, 14, 5).unwrap()).unwrap();
    let ca = ExtChart::assemble(&a, None, (10, 4), "Ceta");
    let cb = ExtChart::assemble(&b, None, (10, 4), "Ceta");
    assert_eq!(ca.dots, cb.dots);
}

#[test]
fn tensor_model_matches_direct_ceta() {
    let m = preset("A0", 14).unwrap();
    let direct = direct_ceta_chart(&m, 14, 5, (8, 4)).unwrap();
    let model = ceta_chart(&m, 14, 5, (8, 4)).unwrap();
    assert_eq!(direct.dots, model.dots);
}

#[test]
fn rejects_non_minimal_resolutions() {
    let res = resolve_with_atilde(preset("A0", 16).unwrap(), 16, 4).unwrap();
    assert!(res.atilde_cells() > 0);
    assert!(matches!(ext_to_m2(&res), Err(ExtError::NotMinimal) | Err(ExtError::Unsupported(_))) || res.is_minimal());
}
