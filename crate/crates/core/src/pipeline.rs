//! Stage runners shared by the command line: check, subsolve, verify and
//! the Perron glue, plus profile persistence.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::admissibility::{analyze, AdmissibilityReport, CandidateMatrix};
use crate::config::ProblemConfig;
use crate::error::{Error, Result};
use crate::frame::{reduce_frame, Frame};
use crate::perron::{assemble, sandwich_check, GlueConfig, PerronOptions, SandwichReport};
use crate::subsolution::{build_u, decay_exponent_fit, integrate_w, GContext, UProfile};
use crate::verification::{verify, VerificationReport};

/// Exit status of a failed admissibility check.
pub const EXIT_NOT_ADMISSIBLE: i32 = 1;
/// Exit status of a failed certification.
pub const EXIT_NOT_CERTIFIED: i32 = 2;

/// Level used for the far-field comparison of the glue.
pub const FAR_FIELD_S: f64 = 1e6;
/// Allowed `|u̲ − ū| s^{α_δ − 1}` at the far level.
pub const FAR_FIELD_TOL: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub report: AdmissibilityReport,
    pub delta: f64,
    pub alpha: f64,
    pub decay_power: f64,
    pub frame: Frame,
    /// Whether the pipeline can continue: `A ∈ 𝒜`, `α_δ > 1` and the
    /// largest gradient component sits at the smallest eigenvalue.
    pub admissible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl CheckOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.admissible {
            0
        } else {
            EXIT_NOT_ADMISSIBLE
        }
    }
}

/// Classifies the configured matrix and reduces the frame.
pub fn check(cfg: &ProblemConfig) -> Result<CheckOutcome> {
    cfg.validate()?;
    let report = analyze(&cfg.operator, &cfg.matrix, cfg.tolerances.level_tol)?;
    let alpha = report.alpha(cfg.delta);
    let failure = if let Some(r) = &report.reason {
        Some(format!("A is not admissible: {r}"))
    } else if !(alpha > 1.0) {
        Some(format!(
            "alpha_delta = {alpha} <= 1 at delta = {}; delta must stay below delta_max = {}",
            cfg.delta, report.delta_max
        ))
    } else if !report.argmax_is_first() {
        Some(format!(
            "largest gradient component at index {}, expected 1",
            report.grad_argmax_index
        ))
    } else {
        None
    };
    let frame = if report.a.min() > 0.0 {
        reduce_frame(&cfg.matrix.to_matrix(), &cfg.linear_term())?
    } else {
        Frame::identity(cfg.dim())
    };
    Ok(CheckOutcome {
        decay_power: 2.0 * alpha - 2.0,
        delta: cfg.delta,
        alpha,
        frame,
        admissible: failure.is_none(),
        failure,
        report,
    })
}

/// The diagonal context in the reduced frame.
pub fn context(cfg: &ProblemConfig) -> Result<GContext> {
    let spectrum = cfg.matrix.spectrum();
    GContext::new(
        &cfg.operator,
        &CandidateMatrix::Diagonal(spectrum.into_vec()),
        cfg.tolerances.level_tol,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsolveSummary {
    pub c1: f64,
    pub c2: f64,
    pub delta: f64,
    pub alpha: f64,
    pub mu: f64,
    /// `∫_1^∞ (w − 1)`.
    pub excess_integral: f64,
    pub tail_constant: f64,
    /// `c1 + μ`, the constant in `u ≈ s + c1 + μ`.
    pub far_constant: f64,
    pub s_max: f64,
    pub nodes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted_exponent: Option<f64>,
}

/// Integrates `w` and `u` for the configured constants.
pub fn subsolve(cfg: &ProblemConfig, ctx: &GContext) -> Result<(UProfile, SubsolveSummary)> {
    let p = integrate_w(ctx, cfg.c2, cfg.delta, cfg.s_max, cfg.tolerances.rel_tol)?;
    let fitted_exponent = decay_exponent_fit(&p).ok();
    let u = build_u(ctx, p, cfg.c1)?;
    let summary = SubsolveSummary {
        c1: cfg.c1,
        c2: cfg.c2,
        delta: cfg.delta,
        alpha: u.alpha(),
        mu: u.mu.value,
        excess_integral: u.mu.total_excess(),
        tail_constant: u.mu.tail_constant,
        far_constant: u.far_constant(),
        s_max: u.base.s_max(),
        nodes: u.base.len(),
        fitted_exponent,
    };
    Ok((u, summary))
}

/// Writes `s,w,u` rows with shortest round-trip decimals.
pub fn write_profile_csv(u: &UProfile, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["s", "w", "u"])?;
    for (s, wv, uv) in u.table() {
        w.serialize((s, wv, uv))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_profile_csv(path: &Path) -> Result<Vec<(f64, f64, f64)>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["s", "w", "u"] {
        return Err(Error::Invalid(format!("profile header must be s,w,u, got {headers:?}")));
    }
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

/// Largest relative disagreement between a stored table and a rebuilt
/// profile, evaluated at the stored abscissae.
pub fn compare_profile(stored: &[(f64, f64, f64)], u: &UProfile) -> f64 {
    stored
        .iter()
        .map(|&(s, w, uv)| {
            let dw = (u.base.w(s) - w).abs() / w.abs().max(1.0);
            let du = (u.u(s) - uv).abs() / uv.abs().max(1.0);
            dw.max(du)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronOutcome {
    pub glue: GlueConfig,
    /// `c` in the original frame.
    pub c_original: f64,
    pub sandwich: SandwichReport,
    pub barriers: usize,
    pub max_barrier_t: f64,
    pub passes: bool,
}

/// Glues barriers and the far-field profile for the configured domain.
pub fn perron(
    cfg: &ProblemConfig,
    ctx: &GContext,
    frame: &Frame,
    dom: &crate::config::DomainFile,
    c: Option<f64>,
    opts: &PerronOptions,
) -> Result<PerronOutcome> {
    let d = frame.reduce_domain(&dom.domain);
    let phi = frame.reduce_boundary(&dom.boundary_data());
    let glue = assemble(ctx, &d, &phi, cfg.delta, c.map(|c| frame.reduced_constant(c)), opts)?;
    let sandwich = sandwich_check(&glue, opts.verify_samples.max(32), FAR_FIELD_S)?;
    Ok(PerronOutcome {
        c_original: frame.original_constant(glue.config.c),
        glue: glue.config,
        passes: sandwich.passes(FAR_FIELD_TOL),
        sandwich,
        barriers: glue.barriers.len(),
        max_barrier_t: glue.barriers.iter().map(|b| b.t).fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub stage: String,
    pub ok: bool,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutcome {
    pub exit_code: i32,
    pub stages: Vec<StageResult>,
    pub artifacts: Vec<PathBuf>,
}

fn write_json<T: Serialize>(dir: &Path, name: &str, v: &T, artifacts: &mut Vec<PathBuf>) -> Result<()> {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v)? + "\n")?;
    artifacts.push(p);
    Ok(())
}

/// check → subsolve → verify → perron (when configured), writing artifacts
/// into `out`.
pub fn run_pipeline(cfg: &ProblemConfig, out: &Path, opts: &PerronOptions) -> Result<PipelineOutcome> {
    fs::create_dir_all(out)?;
    let mut artifacts = Vec::new();
    let mut stages = Vec::new();
    let mut stage = |name: &str, ok: bool, message: String| {
        stages.push(StageResult {
            stage: name.to_string(),
            ok,
            message,
        })
    };

    let chk = check(cfg)?;
    write_json(out, "check.json", &chk, &mut artifacts)?;
    if !chk.admissible {
        stage("check", false, chk.failure.clone().unwrap_or_default());
        return Ok(PipelineOutcome {
            exit_code: EXIT_NOT_ADMISSIBLE,
            stages,
            artifacts,
        });
    }
    stage(
        "check",
        true,
        format!("ratio {:.6}, alpha {:.6}, 2alpha-2 {:.6}", chk.report.ratio, chk.alpha, chk.decay_power),
    );

    let ctx = context(cfg)?;
    let (mut u, summary) = subsolve(cfg, &ctx)?;
    let csv_path = out.join("profile.csv");
    write_profile_csv(&u, &csv_path)?;
    artifacts.push(csv_path);
    write_json(out, "subsolve.json", &summary, &mut artifacts)?;
    stage("subsolve", true, format!("mu {:.10}, {} nodes", summary.mu, summary.nodes));

    let rep: VerificationReport = verify(&ctx, &mut u, cfg.tolerances.samples)?;
    write_json(out, "verify.json", &rep, &mut artifacts)?;
    let certified = rep.certified && rep.asymptotic_non_diverging;
    stage(
        "verify",
        certified,
        match rep.sbar_found {
            Some(s) => format!("sbar {s}, min residual {:e}, asymptotic sup {:.6}", rep.min_residual, rep.asymptotic_sup),
            None => rep.failure.clone().unwrap_or_else(|| "no threshold".into()),
        },
    );
    if !certified {
        return Ok(PipelineOutcome {
            exit_code: EXIT_NOT_CERTIFIED,
            stages,
            artifacts,
        });
    }

    if let Some(p) = &cfg.perron {
        let outcome = perron(cfg, &ctx, &chk.frame, &p.domain, p.c, opts)?;
        write_json(out, "glue_report.json", &outcome, &mut artifacts)?;
        stage(
            "perron",
            outcome.passes,
            format!(
                "c_star {:.6}, c {:.6}, alpha(c) {:.6}, violations {}",
                outcome.glue.c_star, outcome.glue.c, outcome.glue.alpha_c, outcome.sandwich.violations
            ),
        );
        if !outcome.passes {
            return Ok(PipelineOutcome {
                exit_code: EXIT_NOT_CERTIFIED,
                stages,
                artifacts,
            });
        }
    }
    Ok(PipelineOutcome {
        exit_code: 0,
        stages,
        artifacts,
    })
}
