use motivic_ext::amodule::preset;
use motivic_ext::milnor::Profile;
use motivic_ext::resolve::cache::{entry_dir, resolve_cached, CacheOutcome};
use motivic_ext::resolve::{minimal_resolution, resolve_with_atilde, Resolution};
use std::fs;

fn same(a: &Resolution, b: &Resolution) {
    assert_eq!(a.bounds(), b.bounds());
    let (t, f) = a.bounds().unwrap();
    for s in 0..=f {
        assert_eq!(a.generator_table(s), b.generator_table(s), "stage {s}");
        for deg in a.min_degree()..=t {
            assert_eq!(a.columns(s, deg), b.columns(s, deg), "stage {s}, degree {deg}");
        }
    }
}

#[test]
fn round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let r = minimal_resolution(preset("M2", 14).unwrap(), Profile::Full, 14, 4).unwrap();
    r.save(dir.path()).unwrap();
    let back = Resolution::load(dir.path(), preset("M2", 14).unwrap(), Profile::Full, false).unwrap();
    same(&r, &back);
}

#[test]
fn atilde_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let r = resolve_with_atilde(preset("A0", 14).unwrap(), 14, 4).unwrap();
    assert!(r.atilde_cells() > 0);
    r.save(dir.path()).unwrap();
    let back = Resolution::load(dir.path(), preset("A0", 14).unwrap(), Profile::Full, true).unwrap();
    same(&r, &back);
}

#[test]
fn load_extend_and_recompute() {
    let root = tempfile::tempdir().unwrap();
    let m = || preset("M2", 16).unwrap();
    let (a, o) = resolve_cached(root.path(), m(), Profile::Full, false, 10, 3).unwrap();
    assert_eq!(o, CacheOutcome::Computed);
    let (b, o) = resolve_cached(root.path(), m(), Profile::Full, false, 8, 2).unwrap();
    assert_eq!(o, CacheOutcome::Loaded);
    assert_eq!(b.bounds(), Some((8, 2)));
    let (c, o) = resolve_cached(root.path(), m(), Profile::Full, false, 14, 4).unwrap();
    assert_eq!(o, CacheOutcome::Extended);
    same(&c, &minimal_resolution(m(), Profile::Full, 14, 4).unwrap());
    drop(a);

    // flip a byte inside the cell list of stage 2
    let file = entry_dir(root.path(), &m(), Profile::Full, false).join("stage-002.json");
    let text = fs::read_to_string(&file).unwrap();
    let at = text.find("\"cells\"").unwrap() + text[text.find("\"cells\"").unwrap()..].find("\"deg\": ").unwrap() + 7;
    let mut bytes = text.into_bytes();
    bytes[at] = if bytes[at] == b'9' { b'8' } else { b'9' };
    fs::write(&file, bytes).unwrap();
    let (d, o) = resolve_cached(root.path(), m(), Profile::Full, false, 14, 4).unwrap();
    assert!(matches!(o, CacheOutcome::Recomputed(ref why) if why.contains("hash")), "{o:?}");
    same(&c, &d);
}

#[test]
fn other_module_misses() {
    let root = tempfile::tempdir().unwrap();
    let m = preset("A0", 10).unwrap();
    resolve_cached(root.path(), m.clone(), Profile::Full, false, 10, 2).unwrap();
    // same name, different module
    let mut other = preset("Ceta", 10).unwrap();
    other.name = m.name.clone();
    let (_, o) = resolve_cached(root.path(), other, Profile::Full, false, 10, 2).unwrap();
    assert!(matches!(o, CacheOutcome::Recomputed(ref why) if why.contains("target")), "{o:?}");
    // a taller truncation of A0 agrees with the cached one below degree 10
    resolve_cached(root.path(), m, Profile::Full, false, 10, 2).unwrap();
    let (_, o) = resolve_cached(root.path(), preset("A0", 20).unwrap(), Profile::Full, false, 10, 2).unwrap();
    assert_eq!(o, CacheOutcome::Loaded);
}
