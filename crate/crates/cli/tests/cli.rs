use std::path::Path;
use std::process::{Command, Output};

fn mext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mext")).args(args).env_remove("MEXT_CACHE_DIR").output().expect("running mext")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn milnor_square_of_p1_is_zero() {
    let o = mext(&["milnor", "mul", "P(1)", "P(1)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn m2_first_stage_has_four_generators() {
    let o = mext(&["resolve", "--module", "M2", "--max-f", "1", "--max-t", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("f=1 generators=4 t:count 1:1 2:1 4:1 8:1"), "{}", stdout(&o));
}

#[test]
fn free_module_resolves_in_one_stage() {
    let o = mext(&["resolve", "--module", "A", "--max-f", "3"]);
    let out = stdout(&o);
    assert!(out.contains("f=0 generators=1"));
    for f in 1..=3 {
        assert!(out.contains(&format!("f={f} generators=0\n")), "{out}");
    }
}

#[test]
fn resolution_output_is_reproducible() {
    let args = ["resolve", "--module", "A0", "--max-t", "20", "--max-f", "8"];
    assert_eq!(mext(&args).stdout, mext(&args).stdout);
}

#[test]
fn vanishing_line_passes_with_witnesses() {
    let o = mext(&["verify", "vanishing", "--max-s", "24", "--max-f", "16"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("PASS"));
    assert!(out.contains("violations: 0"));
    assert!(out.contains("(s=3, f=3, w=2)"), "{out}");
}

#[test]
fn ceta_chart_against_fig3_reports_its_diff() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let o = mext(&["ext", "--module", "A0", "--target", "Ceta", "--compare", "fig3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("- dot (11,5,6) torsion inf"), "{}", stderr(&o));
    assert!(out.exists());
}

#[test]
fn chart_renders_text_and_svg_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("a.json");
    assert!(mext(&["ext", "--module", "A0", "--out", json.to_str().unwrap()]).status.success());
    let text = mext(&["chart", json.to_str().unwrap()]);
    assert!(stdout(&text).starts_with("f\\s"));
    let svg = |p: &Path| {
        let o = mext(&["chart", json.to_str().unwrap(), "--format", "svg", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
        std::fs::read(p).unwrap()
    };
    assert_eq!(svg(&dir.path().join("1.svg")), svg(&dir.path().join("2.svg")));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(mext(&["bogus"]).status.code(), Some(2));
    assert_eq!(mext(&["ext", "--module", "NoSuchModule"]).status.code(), Some(2));
    assert_eq!(mext(&["milnor", "--algebra", "B", "mul", "P(1)", "P(1)"]).status.code(), Some(2));
    assert_eq!(mext(&["ext", "--module", "A0", "--target", "Cnu"]).status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("mext.conf");
    std::fs::write(&conf, "module = M2\nmax-t = 8\nmax_f = 1\n").unwrap();
    let o = mext(&["--config", conf.to_str().unwrap(), "resolve"]);
    assert!(stdout(&o).contains("t <= 8, f <= 1"), "{}", stdout(&o));
    let o = mext(&["--config", conf.to_str().unwrap(), "resolve", "--max-f", "2"]);
    assert!(stdout(&o).contains("t <= 8, f <= 2"), "{}", stdout(&o));
    std::fs::write(&conf, "depth = 3\n").unwrap();
    assert_eq!(mext(&["--config", conf.to_str().unwrap(), "resolve"]).status.code(), Some(2));
}

#[test]
fn cache_is_reused_through_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |f: &str| {
        Command::new(env!("CARGO_BIN_EXE_mext"))
            .args(["resolve", "--module", "A0", "--max-t", "16", "--max-f", f])
            .env("MEXT_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let a = run("4");
    assert!(stderr(&a).contains("cache: computed"));
    let b = run("4");
    assert!(stderr(&b).contains("cache: loaded"));
    assert_eq!(a.stdout, b.stdout);
    assert!(stderr(&run("6")).contains("cache: extended"));
}

#[test]
fn margolis_report_is_json() {
    let o = mext(&["margolis", "--module", "A0"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["module"], "A0");
}
