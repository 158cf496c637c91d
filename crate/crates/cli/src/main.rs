//! `hexsub`: admissibility checks, subsolution profiles, certification and
//! Perron gluing from a JSON problem file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hexsub::config::{DomainFile, ProblemConfig};
use hexsub::perron::PerronOptions;
use hexsub::pipeline::{self, EXIT_NOT_CERTIFIED};
use hexsub::report;
use hexsub::verification::verify;

#[derive(Parser)]
#[command(name = "hexsub", version, about = "Generalized-symmetric subsolutions of f(λ(D²u)) = 1")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Problem configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file or directory, depending on the subcommand.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Suppress human-readable output.
    #[arg(long, global = true)]
    quiet: bool,
    /// Cap on the barrier vertex push.
    #[arg(long, global = true, env = "HEXSUB_MAX_T", default_value_t = 1e6)]
    max_t: f64,
}

#[derive(Args, Clone)]
struct Overrides {
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long = "smax", alias = "s-max")]
    s_max: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify the matrix against the admissible set (exit 1 if outside).
    Check,
    /// Decay exponent α_δ and the admissible δ range.
    Exponent {
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Integrate the profile and write profile.csv and subsolve.json.
    Subsolve(Overrides),
    /// Certify the profile beyond s̄ (exit 2 if not certified).
    Verify {
        #[command(flatten)]
        over: Overrides,
        /// Stored profile to cross-check against the rebuilt one.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Build barriers and the glued subsolution for an ellipsoidal domain.
    Perron {
        #[arg(long)]
        domain: PathBuf,
        /// Prescribed constant; defaults to c_star + 1.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Decay-power, threshold and a* tables for the example families.
    ReproduceExamples,
    /// check → subsolve → verify → perron, writing artifacts to --out.
    Run,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_config(g: &Global) -> Result<ProblemConfig> {
    let path = g.config.as_ref().context("--config is required")?;
    ProblemConfig::load(path).with_context(|| format!("reading {}", path.display()))
}

fn apply(mut cfg: ProblemConfig, o: &Overrides) -> Result<ProblemConfig> {
    if let Some(d) = o.delta {
        cfg.delta = d;
    }
    if let Some(c) = o.c1 {
        cfg.c1 = c;
    }
    if let Some(c) = o.c2 {
        cfg.c2 = c;
    }
    if let Some(s) = o.s_max {
        cfg.s_max = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit<T: Serialize>(g: &Global, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    let body = if g.json {
        serde_json::to_string_pretty(value)? + "\n"
    } else if !g.quiet {
        text()
    } else {
        return Ok(());
    };
    // a closed pipe (e.g. `| head`) is not an error
    match std::io::stdout().write_all(body.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn save<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn perron_options(g: &Global) -> PerronOptions {
    PerronOptions {
        max_t: g.max_t,
        ..PerronOptions::default()
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Check => {
            let chk = pipeline::check(&load_config(g)?)?;
            if let Some(out) = &g.out {
                save(out, &chk)?;
            }
            emit(g, &chk, || {
                let r = &chk.report;
                let mut s = format!(
                    "eigenvalues {:?}\nf(a) = {:.12}\nratio = {:.10}\ndelta_max = {:.10}\nalpha_delta = {:.10} (delta = {})\n",
                    r.a.as_slice(),
                    r.f_at_a,
                    r.ratio,
                    r.delta_max,
                    chk.alpha,
                    chk.delta
                );
                s += &match &chk.failure {
                    None => "admissible\n".to_string(),
                    Some(f) => format!("not admissible: {f}\n"),
                };
                s
            })?;
            Ok(chk.exit_code())
        }
        Cmd::Exponent { delta } => {
            let mut cfg = load_config(g)?;
            if let Some(d) = delta {
                cfg.delta = *d;
            }
            let chk = pipeline::check(&cfg)?;
            #[derive(Serialize)]
            struct Exponent {
                delta: f64,
                alpha: f64,
                decay_power: f64,
                delta_max: f64,
                ratio: f64,
            }
            let e = Exponent {
                delta: cfg.delta,
                alpha: chk.alpha,
                decay_power: chk.decay_power,
                delta_max: chk.report.delta_max,
                ratio: chk.report.ratio,
            };
            if let Some(out) = &g.out {
                save(out, &e)?;
            }
            emit(g, &e, || {
                format!(
                    "alpha_delta = {:.10}\n2 alpha_delta - 2 = {:.10}\ndelta range [0, {:.10})\n",
                    e.alpha, e.decay_power, e.delta_max
                )
            })?;
            Ok(if e.alpha > 1.0 { 0 } else { 1 })
        }
        Cmd::Subsolve(o) => {
            let cfg = apply(load_config(g)?, o)?;
            let chk = pipeline::check(&cfg)?;
            if !chk.admissible {
                bail!("{}", chk.failure.unwrap_or_default());
            }
            let ctx = pipeline::context(&cfg)?;
            let (u, summary) = pipeline::subsolve(&cfg, &ctx)?;
            // --out names either the CSV itself or a directory for both files
            let out = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let (csv_path, json_path) = if out.extension().is_some_and(|e| e == "csv") {
                (out.clone(), out.with_extension("json"))
            } else {
                fs::create_dir_all(&out)?;
                (out.join("profile.csv"), out.join("subsolve.json"))
            };
            if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            pipeline::write_profile_csv(&u, &csv_path)?;
            save(&json_path, &summary)?;
            emit(g, &summary, || {
                format!(
                    "mu(c2 = {}) = {:.12}\nfar constant c1 + mu = {:.12}\nprofile: {} nodes up to s = {:e}\nwrote {}\n",
                    summary.c2,
                    summary.mu,
                    summary.far_constant,
                    summary.nodes,
                    summary.s_max,
                    csv_path.display()
                )
            })?;
            Ok(0)
        }
        Cmd::Verify { over, profile, samples } => {
            let cfg = apply(load_config(g)?, over)?;
            let chk = pipeline::check(&cfg)?;
            if !chk.admissible {
                bail!("{}", chk.failure.unwrap_or_default());
            }
            let ctx = pipeline::context(&cfg)?;
            let (mut u, _) = pipeline::subsolve(&cfg, &ctx)?;
            if let Some(p) = profile {
                let stored = pipeline::read_profile_csv(p)?;
                let diff = pipeline::compare_profile(&stored, &u);
                if diff > 1e-9 {
                    bail!(
                        "{} does not match the profile rebuilt from the config (max relative difference {diff:e})",
                        p.display()
                    );
                }
            }
            let rep = verify(&ctx, &mut u, samples.unwrap_or(cfg.tolerances.samples))?;
            if let Some(out) = &g.out {
                save(out, &rep)?;
            }
            let ok = rep.certified && rep.asymptotic_non_diverging;
            emit(g, &rep, || {
                let mut s = match rep.sbar_found {
                    Some(sb) => format!("certified beyond sbar = {sb}\n"),
                    None => format!("not certified: {}\n", rep.failure.clone().unwrap_or_default()),
                };
                s += &format!(
                    "min residual {:e}, max |residual| {:e}, min comparison gap {:e}\neigen bound violations {}\nasymptotic sup {:.6} ({})\n",
                    rep.min_residual,
                    rep.max_abs_residual,
                    rep.comparison_min_gap,
                    rep.eigen_bound_violations,
                    rep.asymptotic_sup,
                    if rep.asymptotic_non_diverging { "non-diverging" } else { "growing" }
                );
                s
            })?;
            Ok(if ok { 0 } else { EXIT_NOT_CERTIFIED })
        }
        Cmd::Perron { domain, c, delta } => {
            let mut cfg = load_config(g)?;
            if let Some(d) = delta {
                cfg.delta = *d;
            }
            let chk = pipeline::check(&cfg)?;
            if !chk.admissible {
                bail!("{}", chk.failure.unwrap_or_default());
            }
            let ctx = pipeline::context(&cfg)?;
            let dom = DomainFile::load(domain).with_context(|| format!("reading {}", domain.display()))?;
            let out = pipeline::perron(&cfg, &ctx, &chk.frame, &dom, *c, &perron_options(g))?;
            if let Some(path) = &g.out {
                save(path, &out)?;
            }
            emit(g, &out, || {
                let gc = &out.glue;
                format!(
                    "sbar {} shat {}\nbeta {:.6} bhat {:.6} chat {:.6}\nc_star {:.6} c {:.6} alpha(c) {:.8}\nsandwich: {} samples, {} violations, worst gap {:e}\nfar field |u - Q| s^(alpha-1) = {:.4}\n",
                    gc.sbar,
                    gc.shat,
                    gc.beta,
                    gc.bhat,
                    gc.chat,
                    gc.c_star,
                    out.c_original,
                    gc.alpha_c,
                    out.sandwich.samples,
                    out.sandwich.violations,
                    out.sandwich.worst_gap,
                    out.sandwich.far_field_ratio
                )
            })?;
            Ok(if out.passes { 0 } else { EXIT_NOT_CERTIFIED })
        }
        Cmd::ReproduceExamples => {
            #[derive(Serialize)]
            struct Tables {
                examples: Vec<report::ExampleRow>,
                thresholds: Vec<report::ThresholdRow>,
                a_star: Vec<report::AStarRow>,
            }
            let t = Tables {
                examples: report::reproduce_examples()?,
                thresholds: report::thresholds()?,
                a_star: report::a_star_table()?,
            };
            if let Some(out) = &g.out {
                save(out, &t)?;
            }
            emit(g, &t, || {
                let mut s = report::format_examples(&t.examples);
                s += "\n";
                s += &report::format_thresholds(&t.thresholds);
                s += "\n";
                for r in &t.a_star {
                    s += &format!(
                        "a* {}: closed form {:.12}, solved {:.12} ({})\n",
                        r.operator, r.closed_form, r.solved, r.status
                    );
                }
                s
            })?;
            let failed = t.examples.iter().any(|r| {
                r.status == report::Status::Fail || r.comparison_status == report::Status::Fail
            }) || t.thresholds.iter().any(|r| r.status == report::Status::Fail)
                || t.a_star.iter().any(|r| r.status == report::Status::Fail);
            Ok(if failed { 1 } else { 0 })
        }
        Cmd::Run => {
            let cfg = load_config(g)?;
            let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("hexsub-out"));
            let out = pipeline::run_pipeline(&cfg, &dir, &perron_options(g))?;
            emit(g, &out, || {
                let mut s = String::new();
                for st in &out.stages {
                    s += &format!("{:<9} {:<4} {}\n", st.stage, if st.ok { "ok" } else { "FAIL" }, st.message);
                }
                s
            })?;
            Ok(out.exit_code)
        }
    }
}
