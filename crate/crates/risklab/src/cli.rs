//! Command-line surface.
//!
//! Subcommands: `audit`, `represent`, `translate`, `examples`, `figure`,
//! `oracle`. All mathematical content comes from the config document; flags
//! cover run mechanics only. Exit codes: 0 all checks passed, 1 at least one
//! verdict failed (witness emitted), 2 configuration error, 3 numerical
//! failure.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::acceptance;
use crate::axioms::{self, Property, Verdict};
use crate::config::{ResolvedConfig, RunParams};
use crate::counterexamples::{self, figure_data};
use crate::error::{Error, Result};
use crate::figure::emit_figure;
use crate::measures::min_of;
use crate::oracles;
use crate::report::{ReportDoc, Section};
use crate::representation;
use crate::space::Position;

#[derive(Parser)]
#[command(
    name = "risklab",
    version,
    about = "Numerical laboratory for monetary, convex, and star-shaped risk measures"
)]
pub struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Config document; the bundled default is used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sample count override (flag > RISKLAB_SAMPLES > config > 10000).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Write the machine-readable report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Audit the six properties of declared measures.
    Audit {
        #[command(flatten)]
        flags: RunFlags,
        /// Audit one declared measure (default: all).
        #[arg(long)]
        measure: Option<String>,
    },
    /// Run a representation engine.
    Represent {
        #[command(flatten)]
        flags: RunFlags,
        #[arg(long, value_enum)]
        engine: EngineArg,
        /// Measure name (jia, star-hull engines).
        #[arg(long)]
        measure: Option<String>,
        /// Family name (star-member, intersection-probe engines).
        #[arg(long)]
        family: Option<String>,
        /// Probe budget for intersection probing.
        #[arg(long, default_value_t = 64)]
        budget: usize,
    },
    /// Translation bound and star-shapedness of min(family) - c.
    Translate {
        #[command(flatten)]
        flags: RunFlags,
        #[arg(long)]
        family: String,
        /// Shift amount, or "auto" for the certified bound c*.
        #[arg(long, default_value = "auto", allow_hyphen_values = true)]
        c: String,
    },
    /// Reproduce the counterexample constructions.
    Examples {
        #[command(flatten)]
        flags: RunFlags,
        #[arg(long, value_enum, default_value_t = WhichArg::All)]
        which: WhichArg,
    },
    /// Emit the cone/staircase figure as SVG.
    Figure {
        /// Config document; the bundled default is used when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Scenario-max measure to draw (default: bundled scenarios).
        #[arg(long)]
        measure: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the boundary polylines as a plain vertex list.
        #[arg(long)]
        vertices: Option<PathBuf>,
    },
    /// Brute-force baselines and report re-verification.
    Oracle {
        #[command(subcommand)]
        mode: OracleCmd,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Jia,
    StarHull,
    StarMember,
    IntersectionProbe,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum WhichArg {
    Example1,
    Example2,
    Figure,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    Monotonicity,
    CashInvariance,
    Normalization,
    Convexity,
    PositiveHomogeneity,
    StarShapedness,
}

impl From<PropertyArg> for Property {
    fn from(p: PropertyArg) -> Property {
        match p {
            PropertyArg::Monotonicity => Property::Monotonicity,
            PropertyArg::CashInvariance => Property::CashInvariance,
            PropertyArg::Normalization => Property::Normalization,
            PropertyArg::Convexity => Property::Convexity,
            PropertyArg::PositiveHomogeneity => Property::PositiveHomogeneity,
            PropertyArg::StarShapedness => Property::StarShapedness,
        }
    }
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Smallest accepted grid cash level for a declared set.
    GridInduced {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        set: String,
        /// Position as comma-separated payoffs.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = -100.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 100.0, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 1e-4)]
        pitch: f64,
    },
    /// Brute-force hull membership by scanning t.
    HullBrute {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 1e-5)]
        pitch: f64,
    },
    /// Ternary-search value of the hull minimax.
    HullTernary {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 200)]
        iters: usize,
    },
    /// Exhaustive lattice counterexample search.
    Lattice {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        measure: String,
        #[arg(long, value_enum)]
        property: PropertyArg,
        #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
    },
    /// Re-verify every witness and margin in an emitted report.
    VerifyReport {
        #[arg(long)]
        report: PathBuf,
    },
}

/// Parses arguments, runs, and maps errors to exit codes.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::DimensionMismatch { .. } | Error::Io(_) => 2,
                Error::Numerical(_) => 3,
            }
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<ResolvedConfig> {
    match path {
        Some(p) => ResolvedConfig::load(p),
        None => Ok(ResolvedConfig::builtin_default()),
    }
}

fn parse_csv(name: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("--{name}: cannot parse `{t}` as a number")))
        })
        .collect()
}

fn finish(doc: ReportDoc, report_path: &Option<PathBuf>, started: Instant) -> Result<i32> {
    if let Some(path) = report_path {
        doc.write(path)?;
        println!("report written to {}", path.display());
    }
    println!(
        "{} in {:.2}s",
        if doc.all_pass {
            "all checks passed"
        } else {
            "CHECK FAILED"
        },
        started.elapsed().as_secs_f64()
    );
    Ok(if doc.all_pass { 0 } else { 1 })
}

fn dispatch(cmd: Cmd) -> Result<i32> {
    match cmd {
        Cmd::Audit { flags, measure } => cmd_audit(flags, measure),
        Cmd::Represent {
            flags,
            engine,
            measure,
            family,
            budget,
        } => cmd_represent(flags, engine, measure, family, budget),
        Cmd::Translate { flags, family, c } => cmd_translate(flags, family, c),
        Cmd::Examples { flags, which } => cmd_examples(flags, which),
        Cmd::Figure {
            config,
            measure,
            out,
            vertices,
        } => cmd_figure(config, measure, out, vertices),
        Cmd::Oracle { mode } => cmd_oracle(mode),
    }
}

fn cmd_audit(flags: RunFlags, measure: Option<String>) -> Result<i32> {
    let started = Instant::now();
    let cfg = load_config(&flags.config)?;
    let params = RunParams::resolve(&cfg, flags.samples, flags.seed, flags.tol)?;
    let sampler = params.sampler();
    let names = match measure {
        Some(m) => vec![m],
        None => cfg.measure_names(),
    };
    let mut doc = ReportDoc::new("audit", params.seed, params.samples, params.tol, &cfg.text);
    for name in names {
        let m = cfg.measure(&name)?;
        let summary = axioms::full_audit(&m, &sampler, params.tol)?;
        let star_zero = axioms::star_implies_zero_check(&m, params.tol)?;
        println!("measure {name}:");
        for r in &summary.reports {
            println!("  {:<22} {}", r.property.name(), verdict_str(r.verdict));
        }
        println!(
            "  {:<22} {}",
            "zero_acceptance",
            verdict_str(star_zero.verdict)
        );
        println!(
            "  class: monetary={} convex={} coherent={} star_shaped={} normalized={}",
            summary.monetary,
            summary.convex_risk_measure,
            summary.coherent,
            summary.star_shaped_class,
            summary.normalized
        );
        doc.push(Section::Audit {
            measure: name,
            summary,
            star_zero,
        });
    }
    finish(doc, &flags.report, started)
}

fn cmd_represent(
    flags: RunFlags,
    engine: EngineArg,
    measure: Option<String>,
    family: Option<String>,
    budget: usize,
) -> Result<i32> {
    let started = Instant::now();
    let cfg = load_config(&flags.config)?;
    let params = RunParams::resolve(&cfg, flags.samples, flags.seed, flags.tol)?;
    let sampler = params.sampler();
    let mut doc = ReportDoc::new(
        "represent",
        params.seed,
        params.samples,
        params.tol,
        &cfg.text,
    );

    let need_measure = |m: &Option<String>| {
        m.clone()
            .ok_or_else(|| Error::config("this engine needs --measure <name>"))
    };
    let need_family = |f: &Option<String>| {
        f.clone()
            .ok_or_else(|| Error::config("this engine needs --family <name>"))
    };

    match engine {
        EngineArg::Jia => {
            let name = need_measure(&measure)?;
            let m = cfg.measure(&name)?;
            let report = representation::jia_check(&m, &sampler, params.tol)?;
            println!(
                "jia orthant check on {name}: {} ({} samples)",
                verdict_str(report.verdict),
                report.samples_verified
            );
            doc.push(Section::Representation {
                subject: name,
                report,
            });
        }
        EngineArg::StarHull => {
            let name = need_measure(&measure)?;
            let m = cfg.measure(&name)?;
            let decl = cfg.doc.star_hull.clone();
            let y = match decl.as_ref().and_then(|d| d.y.clone()) {
                Some(v) => cfg.space.position(v)?,
                None => cfg.space.zero(),
            };
            let zs = match decl.as_ref().and_then(|d| d.zs.clone()) {
                Some(zs) => Some(
                    zs.into_iter()
                        .map(|v| cfg.space.position(v))
                        .collect::<Result<Vec<_>>>()?,
                ),
                None => None,
            };
            let report =
                representation::star_hull_check(&m, &y, zs.as_deref(), &sampler, params.tol)?;
            println!(
                "star hull check on {name}: {} ({} samples)",
                verdict_str(report.verdict),
                report.samples_verified
            );
            doc.push(Section::Representation {
                subject: name,
                report,
            });
        }
        EngineArg::StarMember => {
            let name = need_family(&family)?;
            let fam = cfg.family(&name)?;
            let report = representation::star_member_exists(&fam, params.tol)?;
            println!(
                "star member in {name}: {} (index {:?})",
                verdict_str(report.verdict),
                report.index
            );
            doc.push(Section::StarMember {
                family: name,
                report,
            });
        }
        EngineArg::IntersectionProbe => {
            let name = need_family(&family)?;
            let fam = cfg.family(&name)?;
            let report = representation::intersection_probe(&fam, budget, params.tol)?;
            println!(
                "intersection probe on {name}: {} (c* = {:?}, diverging = {})",
                verdict_str(report.verdict),
                report.c_star,
                report.diverging
            );
            for note in &report.notes {
                println!("  note: {note}");
            }
            doc.push(Section::Representation {
                subject: name,
                report,
            });
        }
    }
    finish(doc, &flags.report, started)
}

fn cmd_translate(flags: RunFlags, family: String, c: String) -> Result<i32> {
    let started = Instant::now();
    let cfg = load_config(&flags.config)?;
    let params = RunParams::resolve(&cfg, flags.samples, flags.seed, flags.tol)?;
    let sampler = params.sampler();
    let fam = cfg.family(&family)?;
    let bound = representation::translation_bound(&fam)?;
    let c_used = match c.as_str() {
        "auto" => bound.c_star,
        s => s
            .parse::<f64>()
            .map_err(|_| Error::config(format!("--c must be a number or `auto`, got `{s}`")))?,
    };
    let report = representation::translate_check(&fam, c_used, &sampler, params.tol)?;
    println!(
        "translate check on {family}: c* = {}, c = {c_used}, diverging = {}, {}",
        bound.c_star,
        bound.diverging,
        verdict_str(report.verdict)
    );
    for note in &report.notes {
        println!("  note: {note}");
    }
    let mut doc = ReportDoc::new(
        "translate",
        params.seed,
        params.samples,
        params.tol,
        &cfg.text,
    );
    doc.push(Section::Translate {
        family,
        c_requested: c,
        c_used,
        bound,
        report,
    });
    finish(doc, &flags.report, started)
}

fn cmd_examples(flags: RunFlags, which: WhichArg) -> Result<i32> {
    let started = Instant::now();
    let cfg = load_config(&flags.config)?;
    let params = RunParams::resolve(&cfg, flags.samples, flags.seed, flags.tol)?;
    let sampler = params.sampler();
    let decl = cfg.doc.examples.clone();
    let base = cfg.examples_base()?;
    let mut doc = ReportDoc::new(
        "examples",
        params.seed,
        params.samples,
        params.tol,
        &cfg.text,
    );

    if matches!(which, WhichArg::Example1 | WhichArg::All) {
        let report = counterexamples::example1(&base, decl.epsilon, &decl.ks, &sampler)?;
        println!(
            "penalized family (epsilon = {}, base {}):",
            report.epsilon, report.base
        );
        for m in &report.margins {
            println!(
                "  k = {:<4} margin = {:+.12}  formula = {:+.12}  |diff| = {:.2e}",
                m.k, m.measured_constant, m.formula, m.constant_deviation
            );
        }
        doc.push(Section::Example1 { report });
    }
    if matches!(which, WhichArg::Example2 | WhichArg::All) {
        let report = counterexamples::example2_sweep(&base, &decl.cs, decl.depth)?;
        println!(
            "floor staircase sweep (base {}, depth {}):",
            report.base, report.depth
        );
        for e in &report.entries {
            match &e.found {
                Some(w) => println!(
                    "  c = {:<5} witness at j = {} (lambda = {:.6}, {}), margin = {:.6}",
                    e.c, w.j, w.lambda, w.kind, w.margin
                ),
                None => println!("  c = {:<5} NO WITNESS within depth", e.c),
            }
        }
        doc.push(Section::Example2 { report });
    }
    if matches!(which, WhichArg::Figure | WhichArg::All) {
        let m = cfg.figure_measure(None)?;
        let report = figure_data(&m)?;
        println!(
            "figure geometry: {} cone vertices, {} staircase vertices",
            report.cone.len(),
            report.staircase.len()
        );
        doc.push(Section::Figure {
            report,
            svg_path: None,
        });
    }
    finish(doc, &flags.report, started)
}

fn cmd_figure(
    config: Option<PathBuf>,
    measure: Option<String>,
    out: PathBuf,
    vertices: Option<PathBuf>,
) -> Result<i32> {
    let cfg = load_config(&config)?;
    let m = cfg.figure_measure(measure.as_deref())?;
    let fig = figure_data(&m)?;
    emit_figure(&fig, &out)?;
    println!("figure written to {}", out.display());
    if let Some(path) = vertices {
        std::fs::write(&path, fig.vertex_list_string())?;
        println!("vertex list written to {}", path.display());
    }
    Ok(0)
}

fn cmd_oracle(mode: OracleCmd) -> Result<i32> {
    match mode {
        OracleCmd::GridInduced {
            config,
            set,
            x,
            lo,
            hi,
            pitch,
        } => {
            let cfg = load_config(&config)?;
            let a = cfg.set(&set)?;
            let pos = cfg.space.position(parse_csv("x", &x)?)?;
            let v = oracles::grid_induced(&a, &pos, (lo, hi), pitch)?;
            println!("{v}");
            Ok(0)
        }
        OracleCmd::HullBrute { z, y, x, pitch } => {
            let (z, y, x) = (
                parse_csv("z", &z)?,
                parse_csv("y", &y)?,
                parse_csv("x", &x)?,
            );
            let inside = oracles::hull_member_brute(&z, &y, &x, pitch)?;
            println!("{}", if inside { "in" } else { "out" });
            Ok(0)
        }
        OracleCmd::HullTernary { z, y, x, iters } => {
            let (z, y, x) = (
                parse_csv("z", &z)?,
                parse_csv("y", &y)?,
                parse_csv("x", &x)?,
            );
            let v = oracles::hull_induced_ternary(&z, &y, &x, iters)?;
            println!("{v}");
            Ok(0)
        }
        OracleCmd::Lattice {
            config,
            measure,
            property,
            lo,
            hi,
            step,
        } => {
            let cfg = load_config(&config)?;
            let m = cfg.measure(&measure)?;
            match oracles::lattice_counterexample(&m, property.into(), lo, hi, step)? {
                Some(w) => {
                    println!("witness found: margin = {}", w.margin);
                    for (i, p) in w.positions.iter().enumerate() {
                        println!("  position[{i}] = {p:?}");
                    }
                    if !w.scalars.is_empty() {
                        println!("  scalars = {:?}", w.scalars);
                    }
                }
                None => println!("no violation on the lattice"),
            }
            Ok(0)
        }
        OracleCmd::VerifyReport { report } => verify_report(&report),
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "FAIL",
        Verdict::Inconclusive => "inconclusive",
    }
}

/// Re-verifies every witness and pinned margin in an emitted report against
/// fresh evaluations of the measures reconstructed from the config echo.
fn verify_report(path: &Path) -> Result<i32> {
    let doc = ReportDoc::read(path)?;
    let cfg = ResolvedConfig::parse(&doc.config_echo)?;
    let mut all_ok = true;
    let mut checked = 0usize;

    for section in &doc.sections {
        match section {
            Section::Audit {
                measure,
                summary,
                star_zero,
            } => {
                let m = cfg.measure(measure)?;
                for r in summary.reports.iter().chain(std::iter::once(star_zero)) {
                    if let Some(w) = &r.witness {
                        checked += 1;
                        let margin =
                            axioms::violation_margin(&m, r.property, &w.positions, &w.scalars)?;
                        let ok = margin > r.tol
                            && (margin - w.margin).abs() <= 1e-6 * (1.0 + margin.abs());
                        report_line(
                            &mut all_ok,
                            ok,
                            &format!(
                                "audit {measure} {}: stored {:.6e}, recomputed {:.6e}",
                                r.property, w.margin, margin
                            ),
                        );
                    }
                }
            }
            Section::Translate {
                family,
                c_used,
                report,
                ..
            } => {
                let fam = cfg.family(family)?;
                let sigma = min_of(&fam)?.translate(-c_used);
                for w in &report.witnesses {
                    checked += 1;
                    let margin = axioms::violation_margin(
                        &sigma,
                        Property::StarShapedness,
                        &w.positions,
                        &w.scalars,
                    )?;
                    let ok = margin > report.tol
                        && (margin - w.margin).abs() <= 1e-6 * (1.0 + margin.abs());
                    report_line(
                        &mut all_ok,
                        ok,
                        &format!(
                            "translate {family} witness: stored {:.6e}, recomputed {:.6e}",
                            w.margin, margin
                        ),
                    );
                }
            }
            Section::Example1 { report } => {
                let base = cfg.examples_base()?;
                let fresh = counterexamples::example1(
                    &base,
                    report.epsilon,
                    &report.margins.iter().map(|m| m.k).collect::<Vec<_>>(),
                    &crate::space::SamplerConfig::new(doc.seed, 100, -5.0, 5.0)?,
                )?;
                for (stored, again) in report.margins.iter().zip(&fresh.margins) {
                    checked += 1;
                    let ok = (stored.measured_constant - again.measured_constant).abs() <= 1e-12;
                    report_line(
                        &mut all_ok,
                        ok,
                        &format!(
                            "example1 k = {}: stored {:+.12}, recomputed {:+.12}",
                            stored.k, stored.measured_constant, again.measured_constant
                        ),
                    );
                }
            }
            Section::Example2 { report } => {
                let base = cfg.examples_base()?;
                let set = acceptance::from_measure(base.floor_compose());
                for e in &report.entries {
                    if let Some(w) = &e.found {
                        checked += 1;
                        let pos = cfg.space.position(w.witness.clone())?;
                        let sigma = |p: &Position| -> Result<f64> {
                            Ok(set.induced_measure(p, acceptance::DEFAULT_BISECT_TOL)? - e.c)
                        };
                        let margin = sigma(&pos.scale(w.lambda))? - w.lambda * sigma(&pos)?;
                        // the recomputation retraces the same bisections
                        let ok = margin > 0.0 && (margin - w.margin).abs() <= 1e-9;
                        report_line(
                            &mut all_ok,
                            ok,
                            &format!(
                                "example2 c = {}: stored {:.6e}, recomputed {:.6e}",
                                e.c, w.margin, margin
                            ),
                        );
                    }
                }
            }
            Section::Representation { subject, report } => {
                // re-verify stored per-sample facts against fresh evaluations
                if let Ok(m) = cfg.measure(subject) {
                    for rec in &report.records {
                        checked += 1;
                        let x = cfg.space.position(rec.x.clone())?;
                        let rho = m.eval(&x)?;
                        let ok = (rho - rec.rho).abs() <= 1e-6 * (1.0 + rho.abs());
                        report_line(
                            &mut all_ok,
                            ok,
                            &format!(
                                "representation {subject}: rho stored {:.6e}, recomputed {:.6e}",
                                rec.rho, rho
                            ),
                        );
                    }
                } else if let Ok(fam) = cfg.family(subject) {
                    for rec in &report.records {
                        checked += 1;
                        let x = cfg.space.position(rec.x.clone())?;
                        let member = fam.members().iter().find(|mm| mm.label() == rec.argmin);
                        let ok = match member {
                            Some(mm) => (mm.eval(&x)? - rec.rho).abs() <= 1e-9,
                            None => false,
                        };
                        report_line(
                            &mut all_ok,
                            ok,
                            &format!("representation {subject} record {}", rec.argmin),
                        );
                    }
                }
            }
            Section::StarMember { family, report } => {
                let fam = cfg.family(family)?;
                let fresh = representation::star_member_exists(&fam, report.tol)?;
                checked += 1;
                let ok = fresh.verdict == report.verdict && fresh.index == report.index;
                report_line(
                    &mut all_ok,
                    ok,
                    &format!("star member {family}: index {:?}", report.index),
                );
            }
            Section::Figure { report, .. } => {
                checked += 1;
                let m = cfg.figure_measure(None)?;
                let fresh = figure_data(&m)?;
                let ok = fresh.staircase == report.staircase && fresh.cone == report.cone;
                report_line(&mut all_ok, ok, "figure polylines");
            }
        }
    }

    println!(
        "verified {checked} item(s): {}",
        if all_ok { "all reproduce" } else { "MISMATCH" }
    );
    Ok(if all_ok { 0 } else { 1 })
}

fn report_line(all_ok: &mut bool, ok: bool, what: &str) {
    *all_ok &= ok;
    println!("  [{}] {}", if ok { "ok" } else { "MISMATCH" }, what);
}
