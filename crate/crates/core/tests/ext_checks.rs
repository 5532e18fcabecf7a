use motivic_ext::amodule::preset;
use motivic_ext::ext::*;
use motivic_ext::milnor::Profile;
use motivic_ext::resolve::minimal_resolution;

#[test]
fn dots_sit_at_t_minus_f() {
    let res = minimal_resolution(preset("A0", 14).unwrap(), Profile::Full, 14, 5).unwrap();
    let table = ext_to_m2(&res).unwrap();
    let chart = ExtChart::assemble(&table, None, (14, 5), "M2");
    for d in &chart.dots {
        let cell = table.cell(d.f as usize, d.s + d.f).expect("dot comes from a computed cell");
        assert_eq!(cell.stem(), d.s);
        assert!(cell.homology.classes().iter().any(|c| -c.label == d.w));
    }
}

#[test]
fn small_vanishing_line() {
    let r = verify_vanishing_line(10, 6).unwrap();
    assert!(r.passed(), "{:?}", r.violations);
    assert!(r.checked > 0);
    assert!(r.non_iso_witnesses.iter().any(|w| 2 * w.f as i32 == w.s + 3));
    assert!(r.non_surjection_witnesses.iter().any(|w| 2 * w.f as i32 == w.s));
}

#[test]
fn connecting_map_is_h1() {
    for name in ["M2", "A0", "N"] {
        let r = connecting_h1_check(&preset(name, 12).unwrap(), 12, 5).unwrap();
        assert!(r.les_failures.is_empty(), "{name}: {:?}", r.les_failures);
        assert!(r.disagreements.is_empty(), "{name}: {:?}", r.disagreements);
        assert!(r.compared > 0 && r.checked > 0, "{name}");
    }
}

#[test]
fn lemma_conditions_agree() {
    for name in ["M2", "A0", "N"] {
        let r = lemma_restate_check(&preset(name, 16).unwrap(), 3).unwrap();
        assert!(r.passed(), "{name}: {:?}", r.rows);
    }
}

#[test]
fn a0_and_n_vanish_into_ceta_above_the_line() {
    for name in ["A0", "N"] {
        let r = main_prop_check(&preset(name, 14).unwrap(), 14, 5).unwrap();
        assert!(r.violations.is_empty(), "{name}: {:?}", r.violations);
        assert!(r.shift_mismatches.is_empty(), "{name}: {:?}", r.shift_mismatches);
    }
}

#[test]
fn change_of_rings() {
    let r = change_of_rings_check(8, 6).unwrap();
    assert!(r.passed(), "{:?}", r.mismatches);
}

#[test]
fn kernel_shift() {
    let r = kernel_shift_check(4, 2).unwrap();
    assert_eq!(r.k3_bottom, Some(12));
    assert!(r.mismatches.is_empty() && r.violations.is_empty(), "{r:?}");
    assert!(r.compared > 0);
}
