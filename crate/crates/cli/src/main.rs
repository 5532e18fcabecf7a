//! `mext`: resolutions, Ext charts and verifications from the command line.

mod config;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use config::Settings;
use motivic_ext::amodule::{preset, ModulePresentation, SteenrodModule, PRESETS};
use motivic_ext::chartio::{self, ChartStyle, Figure};
use motivic_ext::ext::{self, ExtChart};
use motivic_ext::margolis::is_a0_free;
use motivic_ext::milnor::{MilnorAlgebra, MilnorElement, Profile};
use motivic_ext::resolve::cache::{resolve_cached, CacheOutcome, CACHE_ENV};
use motivic_ext::resolve::{minimal_resolution, resolve_with_atilde, Resolution};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "mext", version, about = "Ext over the motivic Steenrod algebra over C")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Command,
}

/// Options shared by every subcommand. Each can also be set in the config
/// file as `key = value`, with the flag name as key; flags win.
#[derive(Args, Debug, Default, Clone)]
struct Opts {
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Largest internal degree t.
    #[arg(long, global = true)]
    max_t: Option<i32>,
    /// Largest Adams filtration f.
    #[arg(long, global = true)]
    max_f: Option<usize>,
    /// Largest stem s.
    #[arg(long, global = true)]
    max_s: Option<i32>,
    /// Preset name or path to a module file.
    #[arg(long, global = true)]
    module: Option<String>,
    /// Coefficients: M2 or Ceta.
    #[arg(long, global = true)]
    target: Option<String>,
    /// A or A1.
    #[arg(long, global = true)]
    algebra: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Golden figure to compare with: fig2 or fig3.
    #[arg(long, global = true)]
    compare: Option<String>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Resolution cache directory.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimal resolution; prints generator counts per (f, t).
    Resolve {
        /// Use Ã-cells where the pairing applies.
        #[arg(long)]
        atilde: bool,
    },
    /// Ext chart as JSON.
    Ext,
    /// Render a chart file.
    Chart {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a verification.
    Verify {
        #[arg(value_enum)]
        what: Verification,
    },
    /// Margolis homology and A(0)-freeness.
    Margolis,
    /// Milnor basis arithmetic.
    Milnor {
        #[command(subcommand)]
        op: MilnorOp,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Svg,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Verification {
    /// h1 isomorphism and surjectivity ranges on Ext(M2, M2).
    Vanishing,
    /// d² = 0, exactness and Ext vanishing for the periodic Ã(1) resolution.
    Periodic,
    /// Bottom degree of ker(R_3 → R_2) for A(0).
    K3,
    /// LES exactness and the connecting map against h1.
    Les,
    /// Both conditions of the lemma relating h1 and Cη.
    Lemma,
    /// d² = 0, exactness and minimality of a resolution.
    Resolution,
}

#[derive(Subcommand, Debug)]
enum MilnorOp {
    /// Product of two elements.
    Mul { a: String, b: String },
    /// Milnor basis in one degree.
    Basis { degree: u32 },
}

/// Failure of a check, as opposed to an error running it.
#[derive(Debug)]
struct Failed(String);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Failed>() => {
            eprintln!("FAIL: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let s = Settings::resolve(&cli.opts)?;
    if let Some(n) = s.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("setting up the thread pool")?;
    }
    match cli.cmd {
        Command::Resolve { atilde } => cmd_resolve(&s, atilde),
        Command::Ext => cmd_ext(&s),
        Command::Chart { input, format } => cmd_chart(&s, &input, format),
        Command::Verify { what } => cmd_verify(&s, what),
        Command::Margolis => cmd_margolis(&s),
        Command::Milnor { op } => cmd_milnor(&s, op),
    }
}

fn emit(s: &Settings, text: &str) -> Result<()> {
    match &s.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// A preset by name, or a module file.
fn load_module(s: &Settings, truncation: i32) -> Result<ModulePresentation> {
    let name = s.module.as_deref().ok_or_else(|| anyhow!("--module is required"))?;
    if PRESETS.contains(&name) {
        return Ok(preset(name, truncation)?);
    }
    let path = PathBuf::from(name);
    if !path.exists() {
        bail!("{name:?} is neither a preset ({}) nor a file", PRESETS.join(", "));
    }
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ModulePresentation::from_json(&text)?)
}

fn profile(s: &Settings) -> Result<Profile> {
    match s.algebra.as_deref().unwrap_or("A") {
        "A" => Ok(Profile::Full),
        "A1" => Ok(Profile::A1),
        other => bail!("unknown algebra {other:?} (expected A or A1)"),
    }
}

fn cmd_resolve(s: &Settings, atilde: bool) -> Result<()> {
    let max_t = s.max_t.unwrap_or(20);
    let max_f = s.max_f.unwrap_or(8);
    let profile = profile(s)?;
    let mut m = load_module(s, max_t)?;
    if profile == Profile::A1 && m.profile == Profile::Full {
        m = m.with_profile(Profile::A1);
    }
    let max_t = if m.truncation < max_t {
        eprintln!("warning: {} is truncated at {}; resolving only up to t = {}", m.name, m.truncation, m.truncation);
        m.truncation
    } else {
        max_t
    };
    let r = match &s.cache_dir {
        Some(dir) => {
            let (r, outcome) = resolve_cached(dir, m, profile, atilde, max_t, max_f)?;
            match outcome {
                CacheOutcome::Recomputed(why) => eprintln!("cache: recomputed ({why})"),
                o => eprintln!("cache: {}", format!("{o:?}").to_lowercase()),
            }
            r
        }
        None if atilde => resolve_with_atilde(m, max_t, max_f)?,
        None => minimal_resolution(m, profile, max_t, max_f)?,
    };
    emit(s, &generator_summary(&r))
}

fn generator_summary(r: &Resolution) -> String {
    let (max_t, max_f) = r.bounds().unwrap_or((r.min_degree(), 0));
    let mut out = format!("resolution of {} over {}, t <= {max_t}, f <= {max_f}\n", r.target().presentation().name, r.profile().name());
    let mut total = 0;
    for f in 0..=max_f {
        let mut counts: BTreeMap<(i32, bool), usize> = BTreeMap::new();
        for (t, _, kind) in r.generator_table(f) {
            *counts.entry((t, kind == motivic_ext::resolve::CellKind::Atilde)).or_default() += 1;
        }
        let n: usize = counts.values().sum();
        total += n;
        let cells: Vec<String> = counts
            .iter()
            .map(|(&(t, tilde), &c)| if tilde { format!("{t}:{c}~") } else { format!("{t}:{c}") })
            .collect();
        out += &format!("f={f} generators={n}{}{}\n", if cells.is_empty() { "" } else { " t:count " }, cells.join(" "));
    }
    out += &format!("total {total}\n");
    out
}

fn window(s: &Settings) -> (i32, usize, i32, usize) {
    let max_s = s.max_s.unwrap_or(12);
    let max_f = s.max_f.unwrap_or(7);
    let t = s.max_t.unwrap_or(max_s + max_f as i32 + 1);
    (max_s, max_f, t, max_f + 1)
}

fn compare(s: &Settings, chart: &ExtChart) -> Result<()> {
    let Some(fig) = &s.compare else { return Ok(()) };
    let fig: Figure = fig.parse().map_err(|e: String| anyhow!(e))?;
    let diff = chartio::golden_compare(chart, fig);
    eprint!("{fig}: {diff}");
    if diff.is_empty() {
        Ok(())
    } else {
        Err(Failed(format!("chart differs from {fig}")).into())
    }
}

fn cmd_ext(s: &Settings) -> Result<()> {
    let (max_s, max_f, t, f) = window(s);
    let m = load_module(s, t)?;
    let chart = match s.target.as_deref().unwrap_or("M2") {
        "M2" => ext::m2_chart(&m, t, f, (max_s, max_f))?,
        "Ceta" => ext::ceta_chart(&m, t, f, (max_s, max_f))?,
        other => bail!("unknown target {other:?} (expected M2 or Ceta)"),
    };
    emit(s, &(chart.to_json() + "\n"))?;
    compare(s, &chart)
}

fn cmd_chart(s: &Settings, input: &PathBuf, format: Format) -> Result<()> {
    let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let chart = ExtChart::from_json(&text).context("parsing chart JSON")?;
    let chart = match (s.max_s, s.max_f) {
        (None, None) => chart,
        (ms, mf) => chart.restrict(ms.unwrap_or(i32::MAX), mf.map_or(i32::MAX, |f| f as i32)),
    };
    let out = match format {
        Format::Text => chartio::render_text(&chart),
        Format::Svg => chartio::render_svg(&chart, &ChartStyle::default()),
        Format::Json => chart.to_json() + "\n",
    };
    emit(s, &out)?;
    compare(s, &chart)
}

fn verdict(pass: bool, report: String) -> Result<()> {
    if pass {
        println!("PASS");
        print!("{report}");
        Ok(())
    } else {
        println!("FAIL");
        print!("{report}");
        Err(Failed("verification failed".into()).into())
    }
}

fn cmd_verify(s: &Settings, what: Verification) -> Result<()> {
    match what {
        Verification::Vanishing => {
            let r = ext::verify_vanishing_line(s.max_s.unwrap_or(24), s.max_f.unwrap_or(16))?;
            let show = |ws: &[ext::Witness]| {
                ws.iter().map(|w| format!("  (s={}, f={}, w={}) source {} target {} rank {}\n", w.s, w.f, w.w, w.source_dim, w.target_dim, w.rank)).collect::<String>()
            };
            let mut out = format!(
                "h1 on Ext(M2, M2) for s <= {}, f <= {}: {} bidegrees checked in the safe range {}\n",
                r.max_s, r.max_f, r.checked, r.safe_range
            );
            out += &format!("violations: {}\n{}", r.violations.len(), show(&r.violations));
            out += &format!("not an isomorphism on 2f = s + 3: {}\n{}", r.non_iso_witnesses.len(), show(&r.non_iso_witnesses));
            out += &format!("not surjective on 2f = s: {}\n{}", r.non_surjection_witnesses.len(), show(&r.non_surjection_witnesses));
            let optimal = !r.non_iso_witnesses.is_empty() && !r.non_surjection_witnesses.is_empty();
            verdict(r.passed() && optimal, out)
        }
        Verification::Periodic => {
            let r = ext::periodic_check(s.max_f.unwrap_or(8))?;
            verdict(r.passed(), format!("n <= {}: exact {}; nonzero Ext(Ã(1), Cη) with 0 < f: {:?}\n", r.n, r.exact, r.nonzero))
        }
        Verification::K3 => {
            let r = ext::kernel_shift_check(s.max_s.unwrap_or(8), s.max_f.unwrap_or(4))?;
            let pass = r.k3_bottom.is_none_or(|b| b >= 12) && r.mismatches.is_empty() && r.violations.is_empty();
            verdict(
                pass,
                format!(
                    "K3 bottom degree {:?} (checked through {}); shifted Ext compared on {} groups, mismatches {:?}; s < 2f violations {:?}\n",
                    r.k3_bottom, r.k3_top_checked, r.compared, r.mismatches, r.violations
                ),
            )
        }
        Verification::Les => {
            let t = s.max_t.unwrap_or(16);
            let m = load_module(s, t)?;
            let r = ext::connecting_h1_check(&m, t, s.max_f.unwrap_or(7))?;
            let pass = r.les_failures.is_empty() && r.disagreements.is_empty();
            verdict(
                pass,
                format!(
                    "{}: {} groups checked, LES failures {:?}; {} classes compared, disagreements {:?}\n",
                    r.module, r.checked, r.les_failures, r.compared, r.disagreements
                ),
            )
        }
        Verification::Lemma => {
            let n = s.max_f.unwrap_or(3);
            let m = load_module(s, 3 * n as i32 + 6)?;
            let r = ext::lemma_restate_check(&m, n)?;
            let rows: String = r.rows.iter().map(|(n, a, b)| format!("  n={n}: h1 condition {a}, Cη condition {b}\n")).collect();
            verdict(r.passed(), format!("{}\n{rows}", r.module))
        }
        Verification::Resolution => {
            let t = s.max_t.unwrap_or(16);
            let f = s.max_f.unwrap_or(6);
            let m = load_module(s, t)?;
            let r = minimal_resolution(m, profile(s)?, t, f)?;
            let v = r.verify();
            let pass = v.all_ok() && r.is_minimal();
            verdict(pass, format!("d^2 = 0: {}, exact: {}, minimal: {}\n", v.d_squared_ok(), v.exact_ok(), r.is_minimal()))
        }
    }
}

fn cmd_margolis(s: &Settings) -> Result<()> {
    let m = load_module(s, s.max_t.unwrap_or(16))?;
    let report = is_a0_free(&SteenrodModule::new(m)?)?;
    emit(s, &(serde_json::to_string_pretty(&report)? + "\n"))
}

fn cmd_milnor(s: &Settings, op: MilnorOp) -> Result<()> {
    let profile = profile(s)?;
    match op {
        MilnorOp::Mul { a, b } => {
            let a = MilnorElement::parse(&a).with_context(|| format!("parsing {a:?}"))?;
            let b = MilnorElement::parse(&b).with_context(|| format!("parsing {b:?}"))?;
            let deg = |e: &MilnorElement| e.bidegree().map(|d| d.map_or(0, |d| d.0));
            let alg = MilnorAlgebra::new(profile, deg(&a)? + deg(&b)?);
            emit(s, &format!("{}\n", alg.multiply(&a, &b)?))
        }
        MilnorOp::Basis { degree } => {
            let out: String = motivic_ext::milnor::basis_of_degree(degree, profile).iter().map(|p| format!("{p}\n")).collect();
            emit(s, &out)
        }
    }
}
