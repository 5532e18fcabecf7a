//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

mod common;

use common::classical::{self, Module};
use motivic_ext::amodule::{preset, SteenrodModule};
use motivic_ext::chartio::{golden_compare, ChartDiff, Figure};
use motivic_ext::ext::*;
use motivic_ext::margolis::{is_a0_free, Witness as MargolisWitness};
use motivic_ext::milnor::*;
use motivic_ext::resolve::{minimal_resolution, periodic_a1_resolution, resolve_with_atilde, Resolution};
use std::collections::HashSet;
use std::time::{Duration, Instant};

/// Figure range.
const FIG: (i32, usize) = (12, 7);
/// Resolution bounds for the figures: internal degree and stages.
const FIG_T: i32 = 20;
const FIG_F: usize = 8;
const FIG_BUDGET: Duration = Duration::from_secs(120);
/// Vanishing-line range and budget.
const LINE: (i32, usize) = (24, 16);
const LINE_BUDGET: Duration = Duration::from_secs(30 * 60);
const PERIODIC_N: usize = 8;
const MINUTE: Duration = Duration::from_secs(60);
const RIGHT_A1_DEGREE: u32 = 24;
/// K3 must vanish below this degree.
const K3_BOTTOM: i32 = 12;
const MILNOR_DEGREE: u32 = 16;
const LEADING_DEGREE: u32 = 12;
const CLASSICAL_S: i32 = 12;
const CLASSICAL_F: usize = 7;

#[derive(Clone)]
struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn summary(diff: &ChartDiff) -> String {
    if diff.is_empty() {
        return "empty diff".into();
    }
    diff.to_string().lines().collect::<Vec<_>>().join("; ")
}

fn figure(fig: Figure) -> Result<Outcome, Box<dyn std::error::Error>> {
    let start = Instant::now();
    let a0 = preset("A0", FIG_T)?;
    let chart = match fig {
        Figure::Fig2 => m2_chart(&a0, FIG_T, FIG_F, FIG)?,
        Figure::Fig3 => ceta_chart(&a0, FIG_T, FIG_F, FIG)?,
    };
    let diff = golden_compare(&chart, fig);
    let mut pass = diff.is_empty();
    let mut detail = format!("{fig}: {}", summary(&diff));
    if fig == Figure::Fig3 {
        let table = ext_to_ceta(&resolve_with_atilde(a0, FIG_T, FIG_F)?)?;
        let bad: Vec<(i32, usize)> = (0..=4)
            .flat_map(|f| (0..2 * f as i32).map(move |s| (s, f)))
            .filter(|&(s, f)| table.is_zero(s, f) != Some(true))
            .collect();
        pass &= bad.is_empty();
        detail += &format!("; nonzero or undetermined with s < 2f, f ≤ 4: {bad:?}");
    }
    let elapsed = start.elapsed();
    pass &= elapsed < FIG_BUDGET;
    Ok(outcome(pass, format!("{detail}; {elapsed:.1?}")))
}

fn vanishing() -> Result<(Outcome, Outcome), Box<dyn std::error::Error>> {
    let start = Instant::now();
    let r = verify_vanishing_line(LINE.0, LINE.1)?;
    let elapsed = start.elapsed();
    let line = outcome(
        r.passed() && r.violations.is_empty() && elapsed < LINE_BUDGET,
        format!(
            "s ≤ {}, f ≤ {} ({}): {} bidegrees checked, {} violations; {elapsed:.1?}",
            r.max_s,
            r.max_f,
            r.safe_range,
            r.checked,
            r.violations.len()
        ),
    );
    let iso: Vec<_> = r.non_iso_witnesses.iter().filter(|w| 2 * w.f as i32 == w.s + 3).collect();
    let surj: Vec<_> = r.non_surjection_witnesses.iter().filter(|w| 2 * w.f as i32 == w.s && w.rank < w.target_dim).collect();
    let show = |w: Option<&&Witness>| w.map_or("none".to_string(), |w| format!("({},{},{})", w.s, w.f, w.w));
    let witnesses = outcome(
        !iso.is_empty() && !surj.is_empty(),
        format!(
            "{} non-isomorphisms on 2f = s+3 (first {}), {} non-surjections on 2f = s (first {})",
            iso.len(),
            show(iso.first()),
            surj.len(),
            show(surj.first())
        ),
    );
    Ok((line, witnesses))
}

fn periodic() -> Result<Outcome, Box<dyn std::error::Error>> {
    let start = Instant::now();
    let r = periodic_check(PERIODIC_N)?;
    let elapsed = start.elapsed();
    Ok(outcome(
        r.exact && r.nonzero.is_empty() && elapsed < MINUTE,
        format!("n ≤ {}: d² = 0 and exact: {}; nonzero Ext for 0 < f ≤ {}: {:?}; {elapsed:.1?}", r.n, r.exact, r.n, r.nonzero),
    ))
}

fn right_a1() -> Outcome {
    let start = Instant::now();
    let r = verify_right_a1_free(RIGHT_A1_DEGREE);
    let elapsed = start.elapsed();
    outcome(r.is_isomorphism() && elapsed < MINUTE, format!("through degree {RIGHT_A1_DEGREE}: {r:?}; {elapsed:.1?}").replace('\n', " "))
}

fn margolis() -> Result<Outcome, Box<dyn std::error::Error>> {
    const T: i32 = 16;
    let mut failures = Vec::new();
    let mut certified = Vec::new();
    for name in ["N", "Atilde"] {
        let r = is_a0_free(&SteenrodModule::new(preset(name, T)?)?)?;
        if r.is_a0_free {
            certified.push(name.to_string());
        } else {
            failures.push(format!("{name} not certified: {:?}", r.witness));
        }
    }
    let res = resolve_with_atilde(preset("A0", T)?, T, 5)?;
    for f in 0..=res.max_f() {
        let Some(m) = res.stage_module(f, T)? else { continue };
        let r = is_a0_free(&SteenrodModule::new(m)?)?;
        if r.is_a0_free {
            certified.push(format!("R{f}"));
        } else {
            failures.push(format!("R{f} not certified: {:?}", r.witness));
        }
    }
    let ceta = is_a0_free(&SteenrodModule::new(preset("Ceta", T)?)?)?;
    if ceta.is_a0_free || !matches!(ceta.witness, Some(MargolisWitness::Homology { .. })) {
        failures.push(format!("Cη: {:?}", ceta.witness));
    }
    let quotient = is_a0_free(&SteenrodModule::new(preset("AmodB", T)?)?)?;
    if quotient.is_a0_free || !matches!(quotient.witness, Some(MargolisWitness::Torsion { .. })) {
        failures.push(format!("A/τSq¹: {:?}", quotient.witness));
    }
    Ok(outcome(
        failures.is_empty(),
        format!(
            "A(0)-free through degree {T}: {}; Cη fails with {:?}; A/τSq¹ fails with {:?}{}",
            certified.join(", "),
            ceta.witness,
            quotient.witness,
            if failures.is_empty() { String::new() } else { format!("; failures: {}", failures.join("; ")) }
        ),
    ))
}

fn k3() -> Result<Outcome, Box<dyn std::error::Error>> {
    // ker d_3 is known through the top degree once stage 4 is built
    let t = K3_BOTTOM + 4;
    let res = resolve_with_atilde(preset("A0", t)?, t, 4)?;
    let below: Vec<i32> = (res.min_degree()..K3_BOTTOM).filter(|&d| res.kernel_generators(3, d) != Some(0)).collect();
    let bottom = res.kernel_bottom(3);
    Ok(outcome(below.is_empty(), format!("K3 bottom degree {bottom:?} (computed through {t}); nonzero or unknown below {K3_BOTTOM}: {below:?}")))
}

fn d_squared() -> Result<(bool, String), Box<dyn std::error::Error>> {
    let mut runs: Vec<(String, Resolution)> = vec![
        ("M2".into(), minimal_resolution(preset("M2", 20)?, Profile::Full, 20, 8)?),
        ("A0".into(), minimal_resolution(preset("A0", 20)?, Profile::Full, 20, 8)?),
        ("N".into(), minimal_resolution(preset("N", 18)?, Profile::Full, 18, 6)?),
        ("Ceta".into(), minimal_resolution(preset("Ceta", 16)?, Profile::Full, 16, 6)?),
        ("A0/Ã".into(), resolve_with_atilde(preset("A0", 20)?, 20, 8)?),
        ("M2/A(1)".into(), minimal_resolution(preset("M2", 20)?, Profile::A1, 20, 8)?),
        ("Ã(1)/A(1)".into(), periodic_a1_resolution(PERIODIC_N + 1)?),
    ];
    let mut bad = Vec::new();
    for (name, r) in runs.drain(..) {
        let v = r.verify();
        if !(v.d_squared_ok() && v.exact_ok()) {
            bad.push(name);
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "d∘d = 0 and exact on 7 resolutions".into() } else { format!("d∘d or exactness fails: {bad:?}") }))
}

fn milnor_suite() -> (bool, String) {
    let alg = MilnorAlgebra::new(Profile::Full, MILNOR_DEGREE);
    let all = basis(MILNOR_DEGREE, Profile::Full);
    let mut bad = Vec::new();
    for a in all.iter().filter(|x| !x.is_unit()) {
        for b in all.iter().filter(|x| !x.is_unit() && a.degree() + x.degree() < MILNOR_DEGREE) {
            for c in all.iter().filter(|x| !x.is_unit() && a.degree() + b.degree() + x.degree() <= MILNOR_DEGREE) {
                let (ea, eb, ec) = (MilnorElement::basis(a.clone()), MilnorElement::basis(b.clone()), MilnorElement::basis(c.clone()));
                let l = alg.multiply(&alg.multiply(&ea, &eb).unwrap(), &ec).unwrap();
                let r = alg.multiply(&ea, &alg.multiply(&eb, &ec).unwrap()).unwrap();
                if l != r {
                    bad.push(format!("({a} {b}) {c}"));
                }
            }
        }
    }
    let strip = |mut d: DualMonomial| {
        d.tau_power = 0;
        d
    };
    for c in &all {
        let m = c.dual();
        let mut left = HashSet::new();
        let mut right = HashSet::new();
        let flip = |set: &mut HashSet<_>, x| {
            if !set.remove(&x) {
                set.insert(x);
            }
        };
        for (x, y) in coproduct(&m).keys() {
            for (x1, x2) in coproduct(&strip(x.clone())).keys() {
                flip(&mut left, (strip(x1.clone()), strip(x2.clone()), y.clone()));
            }
            for (y1, y2) in coproduct(y).keys() {
                flip(&mut right, (strip(x.clone()), strip(y1.clone()), strip(y2.clone())));
            }
        }
        if left != right {
            bad.push(format!("Δ on the dual of {c}"));
        }
    }
    (bad.is_empty(), format!("associativity and coassociativity through degree {MILNOR_DEGREE}: {} failures", bad.len()))
}

fn leading_suite() -> (bool, String) {
    let all = basis(LEADING_DEGREE, Profile::Full);
    let mut bad = 0;
    for a in &all {
        for b in all.iter().filter(|b| a.degree() + b.degree() <= LEADING_DEGREE) {
            let prod = multiply_indices(a, b);
            let (coeff, sum) = leading_term(a, b);
            if prod.contains(&sum) != coeff || prod.iter().any(|c| *c != sum && c.excess() >= sum.excess()) {
                bad += 1;
            }
        }
    }
    (bad == 0, format!("leading terms through degree {LEADING_DEGREE}: {bad} failures"))
}

fn les_suite() -> Result<(bool, String), Box<dyn std::error::Error>> {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["M2", "A0", "N"] {
        let r = connecting_h1_check(&preset(name, 16)?, 16, 7)?;
        ok &= r.les_failures.is_empty() && r.disagreements.is_empty() && r.compared > 0;
        parts.push(format!(
            "{name}: {} exactness failures, {} of {} classes disagree",
            r.les_failures.len(),
            r.disagreements.len(),
            r.compared
        ));
    }
    Ok((ok, parts.join(", ")))
}

fn classical_suite() -> Result<(bool, String), Box<dyn std::error::Error>> {
    let t = CLASSICAL_S + CLASSICAL_F as i32;
    let table = ext_to_m2(&minimal_resolution(preset("M2", t)?, Profile::Full, t, CLASSICAL_F + 1)?)?;
    let oracle = classical::ext_dims(&Module::sphere(), t, CLASSICAL_F);
    let mut bad = Vec::new();
    for f in 0..=CLASSICAL_F {
        for s in 0..=CLASSICAL_S {
            let free = table.cell(f, s + f as i32).map(|c| c.homology.classes().iter().filter(|k| k.torsion.is_none()).count());
            if free != Some(classical::dim(&oracle, s, f)) {
                bad.push((s, f));
            }
        }
    }
    Ok((bad.is_empty(), format!("τ-inverted Ext(M2, M2) against the classical oracle for s ≤ {CLASSICAL_S}: mismatches {bad:?}")))
}

fn properties() -> Result<Outcome, Box<dyn std::error::Error>> {
    let parts = [d_squared()?, milnor_suite(), leading_suite(), les_suite()?, classical_suite()?];
    Ok(outcome(parts.iter().all(|p| p.0), parts.iter().map(|p| p.1.clone()).collect::<Vec<_>>().join("; ")))
}

fn main() {
    type Check = Box<dyn Fn() -> Result<Vec<Outcome>, Box<dyn std::error::Error>>>;
    let checks: Vec<(&str, Check)> = vec![
        ("1 Figure 2", Box::new(|| Ok(vec![figure(Figure::Fig2)?]))),
        ("2 Figure 3", Box::new(|| Ok(vec![figure(Figure::Fig3)?]))),
        ("3-4 vanishing line", Box::new(|| vanishing().map(|(a, b)| vec![a, b]))),
        ("5 periodic resolution", Box::new(|| Ok(vec![periodic()?]))),
        ("6 right A(1) basis", Box::new(|| Ok(vec![right_a1()]))),
        ("7 Margolis suite", Box::new(|| Ok(vec![margolis()?]))),
        ("8 K3", Box::new(|| Ok(vec![k3()?]))),
        ("9 property suites", Box::new(|| Ok(vec![properties()?]))),
    ];
    let mut number = 0;
    let mut failed = 0;
    for (name, check) in checks {
        let results = match check() {
            Ok(r) => r,
            Err(e) => vec![outcome(false, format!("error in {name}: {e}")); if name.starts_with("3-4") { 2 } else { 1 }],
        };
        for r in results {
            number += 1;
            if !r.pass {
                failed += 1;
            }
            println!("{} criterion {number}: {}", if r.pass { "PASS" } else { "FAIL" }, r.detail);
        }
    }
    if failed > 0 {
        println!("{failed} of {number} criteria failed");
        std::process::exit(1);
    }
}
