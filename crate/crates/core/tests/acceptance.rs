//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hexsub::admissibility::{example_family, CandidateMatrix, Family, Mode, EXACT_LEVEL_TOL};
use hexsub::perron::{assemble, sandwich_check, BoundaryData, DomainSpec, PerronOptions};
use hexsub::report::{a_star_table, reproduce_examples, thresholds, Status};
use hexsub::spectral::{eigen_bounds, eigen_sym, gsym_hessian, weyl_bounds, GSymPoint, SymMatrix};
use hexsub::subsolution::{build_u, decay_exponent_fit, dw_dc2, integrate_w, mu, GContext};
use hexsub::verification::{default_sbar_grid, find_sbar, comparison_gap, verify};
use hexsub::OperatorSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn a_star() -> Outcome {
    let rows = a_star_table().map_err(|e| e.to_string())?;
    for r in &rows {
        ensure(r.difference <= 1e-10, || format!("{}: {:e}", r.operator, r.difference))?;
    }
    Ok(rows
        .iter()
        .map(|r| format!("{} {:.10}", r.operator, r.closed_form))
        .collect::<Vec<_>>()
        .join(", "))
}

fn exponents() -> Outcome {
    let rows = reproduce_examples().map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for r in rows.iter().filter(|r| r.mode == Mode::Printed) {
        ensure(r.status == Status::Pass, || {
            format!("{} 2a-2 = {} vs {:?}", r.family, r.decay_power, r.printed_value)
        })?;
        ensure(r.comparison_status != Status::Fail, || {
            format!("{} comparison {:?} vs {:?}", r.family, r.comparison, r.printed_comparison)
        })?;
        parts.push(format!("{} {:.4}", r.family, r.decay_power));
    }
    let h = &rows[0];
    ensure((h.comparison.unwrap() - 0.8024).abs() < 1e-3, || "H comparison".into())?;
    let q = &rows[2];
    ensure((q.comparison.unwrap() - 0.8956).abs() < 1e-3, || "theta(3,2)".into())?;
    Ok(parts.join(", "))
}

fn threshold_table() -> Outcome {
    let rows = thresholds().map_err(|e| e.to_string())?;
    for r in &rows {
        ensure(r.status != Status::Fail, || format!("{} {}: {}", r.family, r.mode, r.computed))?;
    }
    let q: Vec<String> = rows
        .iter()
        .filter(|r| r.family == Family::Q)
        .map(|r| format!("{:.4}", r.computed))
        .collect();
    Ok(format!(
        "H {:.8}, M {:.8}, L {:.5}, Q {} (printed 0.549 unverified)",
        rows[0].computed,
        rows[1].computed,
        rows[2].computed,
        q.join("/")
    ))
}

fn monge_ampere() -> GContext {
    GContext::new(
        &OperatorSpec::SigmaK { n: 3, k: 3 },
        &CandidateMatrix::Diagonal(vec![1.0; 3]),
        EXACT_LEVEL_TOL,
    )
    .unwrap()
}

fn radial() -> Outcome {
    let ctx = monge_ampere();
    let p = integrate_w(&ctx, 2.0, 0.0, 1e6, 1e-10).map_err(|e| e.to_string())?;
    let exact = |s: f64| (1.0 + 7.0 * s.powf(-1.5)).cbrt();
    let mut worst = 0.0f64;
    for k in 0..=6000 {
        let s = 10f64.powf(k as f64 / 1000.0);
        worst = worst.max((p.w(s) - exact(s)).abs());
    }
    ensure(worst <= 1e-8, || format!("max |w - exact| = {worst:e}"))?;
    let fit = decay_exponent_fit(&p).map_err(|e| e.to_string())?;
    ensure((fit - 1.5).abs() <= 0.015, || format!("fit {fit}"))?;
    let mut u = build_u(&ctx, p, 0.0).map_err(|e| e.to_string())?;
    let rep = verify(&ctx, &mut u, 64).map_err(|e| e.to_string())?;
    let worst_res = rep.levels.iter().map(|l| l.max_abs_residual).fold(0.0, f64::max);
    ensure(worst_res <= 1e-8, || format!("residual {worst_res:e}"))?;
    Ok(format!("max |w - exact| {worst:.1e}, fit {fit:.5}, max residual {worst_res:.1e}"))
}

fn family_contexts() -> Vec<(Family, GContext, f64)> {
    Family::ALL
        .iter()
        .map(|&f| {
            let (eps, delta) = f.table_point();
            let m = example_family(f, eps, Mode::Exact).unwrap();
            (f, GContext::new(&f.operator(), &m, EXACT_LEVEL_TOL).unwrap(), delta)
        })
        .collect()
}

fn weyl() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let mut pair = [SymMatrix::zeros(n), SymMatrix::zeros(n)];
        for m in &mut pair {
            for i in 0..n {
                for j in i..n {
                    m.set(i, j, rng.gen_range(-2.0..2.0));
                }
            }
        }
        worst = worst.min(weyl_bounds(&pair[0], &pair[1]).unwrap().min_slack());
    }
    ensure(worst >= -1e-10, || format!("slack {worst:e}"))?;
    Ok(format!("200 pairs, min slack {worst:.2e}"))
}

fn sandwich_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut violations = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=6);
        let mut a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
        a.sort_by(f64::total_cmp);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let p = GSymPoint::new(&a, &x, rng.gen_range(0.05..3.0), -rng.gen_range(0.0..2.0)).unwrap();
        let lam = eigen_sym(&gsym_hessian(&p));
        let (lo, hi) = eigen_bounds(&p).unwrap();
        violations += (0..n).filter(|&i| lam[i] < lo[i] - 1e-10 || lam[i] > hi[i] + 1e-10).count();
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok("1000 points, 0 violations".into())
}

fn g_function() -> Outcome {
    let mut worst_fd = 0.0f64;
    for (_, ctx, _) in family_contexts() {
        let mut prev = f64::INFINITY;
        for k in 0..200 {
            let w = 1.0 + 0.1 * k as f64;
            let g = ctx.g(w).unwrap();
            let gp = ctx.g_prime(w).unwrap();
            ensure(g < prev && gp < 0.0, || format!("g not decreasing at {w}"))?;
            prev = g;
            let h = 1e-5;
            let fd = (ctx.g(w + h).unwrap() - ctx.g(w - h).unwrap()) / (2.0 * h);
            worst_fd = worst_fd.max((fd - gp).abs());
        }
    }
    ensure(worst_fd <= 1e-6, || format!("finite difference {worst_fd:e}"))?;
    let (_, h, _) = &family_contexts()[0];
    let a = h.a.as_slice();
    let mut worst_cf = 0.0f64;
    for k in 0..1000 {
        let w = 1.0 + 19.0 * k as f64 / 999.0;
        let closed = (1.0 - a[1] * w * a[2] * w) / (a[1] * w + a[2] * w);
        worst_cf = worst_cf.max((h.g(w).unwrap() - closed).abs());
    }
    ensure(worst_cf <= 1e-10, || format!("closed form {worst_cf:e}"))?;
    Ok(format!("fd {worst_fd:.1e}, closed form {worst_cf:.1e}"))
}

fn variational() -> Outcome {
    let mut worst = 0.0f64;
    for (f, ctx, delta) in family_contexts() {
        for s in [10.0, 1e3, 1e6] {
            let z = dw_dc2(&ctx, 2.0, delta, s).unwrap();
            ensure(z > 0.0 && z <= 1.0, || format!("{f} s = {s}: {z}"))?;
            let h = 1e-4;
            let fd = (integrate_w(&ctx, 2.0 + h, delta, s, 1e-12).unwrap().w(s)
                - integrate_w(&ctx, 2.0 - h, delta, s, 1e-12).unwrap().w(s))
                / (2.0 * h);
            worst = worst.max((z - fd).abs());
        }
    }
    ensure(worst <= 1e-5, || format!("fd {worst:e}"))?;
    Ok(format!("all in (0, 1], fd {worst:.1e}"))
}

fn mu_growth() -> Outcome {
    for (f, ctx, delta) in family_contexts() {
        let sum: f64 = ctx.a.iter().sum();
        let mut prev = -1.0;
        for c2 in [1.5, 2.0, 4.0, 8.0] {
            let m = mu(&ctx, c2, delta, 1e6).unwrap();
            let bound = (2.0 * ctx.an() + delta) * (c2 - 1.0).powi(2) / (2.0 * c2 * sum) - 1.0;
            ensure(m > prev && m >= bound, || format!("{f} c2 = {c2}: {m} (bound {bound})"))?;
            prev = m;
        }
    }
    Ok("strictly increasing, above the quadratic bound".into())
}

fn decay_law() -> Outcome {
    let mut parts = Vec::new();
    for (f, ctx, delta) in family_contexts() {
        let fit = decay_exponent_fit(&integrate_w(&ctx, 2.0, delta, 1e6, 1e-10).unwrap()).unwrap();
        let alpha = ctx.alpha(delta);
        ensure((fit - alpha).abs() <= 0.02 * alpha, || format!("{f}: {fit} vs {alpha}"))?;
        parts.push(format!("{f} {:.2e}", (fit - alpha).abs() / alpha));
    }
    Ok(format!("relative error {}", parts.join(", ")))
}

fn gap_check() -> Outcome {
    let equal = GContext::new(
        &OperatorSpec::SigmaK { n: 3, k: 2 },
        &CandidateMatrix::Diagonal(vec![1.0 / 3f64.sqrt(); 3]),
        EXACT_LEVEL_TOL,
    )
    .unwrap();
    let u = build_u(&equal, integrate_w(&equal, 2.0, 0.0, 1e4, 1e-10).unwrap(), 0.0).unwrap();
    for s in [1.0, 2.0, 10.0, 1e3] {
        let gap = comparison_gap(&equal, &u, s, 32).unwrap();
        ensure(gap.abs() <= 1e-10, || format!("equal-a gap {gap:e} at {s}"))?;
    }
    let mut sbars = Vec::new();
    for (f, ctx, delta) in family_contexts() {
        let mut u = build_u(&ctx, integrate_w(&ctx, 2.0, delta, 1e6, 1e-10).unwrap(), 0.0).unwrap();
        let (sbar, levels) = find_sbar(&ctx, &mut u, &default_sbar_grid(1e6), 32).map_err(|e| e.to_string())?;
        let worst = levels.iter().filter(|l| l.s >= sbar).map(|l| l.min_gap).fold(f64::INFINITY, f64::min);
        ensure(worst >= -1e-10, || format!("{f} gap {worst:e}"))?;
        sbars.push(format!("{f} {sbar}"));
    }
    Ok(format!("equal-a gap 0; sbar {}", sbars.join(", ")))
}

fn perron_sandwich() -> Outcome {
    let ctx = monge_ampere();
    let g = assemble(
        &ctx,
        &DomainSpec::unit_ball(3),
        &BoundaryData::zero(3),
        0.0,
        None,
        &PerronOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let r = sandwich_check(&g, 64, 1e6).map_err(|e| e.to_string())?;
    ensure(r.violations == 0, || format!("{} violations", r.violations))?;
    ensure(r.boundary_error <= r.min_barrier_margin, || format!("boundary {:e}", r.boundary_error))?;
    ensure(r.far_field_ratio <= 10.0, || format!("far field {}", r.far_field_ratio))?;
    Ok(format!(
        "c_star {:.4}, alpha(c) {:.4}, {} samples, far field {:.3} s^(1-alpha)",
        g.config.c_star, g.config.alpha_c, r.samples, r.far_field_ratio
    ))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("AC1 closed-form a*", Duration::from_secs(1), a_star),
        ("AC2 example exponents", Duration::from_secs(5), exponents),
        ("AC3 admissibility thresholds", Duration::from_secs(30), threshold_table),
        ("AC4 radial Monge-Ampere oracle", Duration::from_secs(10), radial),
        ("AC5a Weyl inequalities", Duration::from_secs(60), weyl),
        ("AC5b eigenvalue sandwich", Duration::from_secs(60), sandwich_bounds),
        ("AC5c implicit profile g", Duration::from_secs(60), g_function),
        ("AC5d variational derivative", Duration::from_secs(60), variational),
        ("AC5e mu growth", Duration::from_secs(60), mu_growth),
        ("AC5f decay law", Duration::from_secs(60), decay_law),
        ("AC5g comparison gap", Duration::from_secs(60), gap_check),
        ("AC5h Perron sandwich", Duration::from_secs(60), perron_sandwich),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let t = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = t.elapsed();
        let (tag, detail) = match result {
            Ok(d) if took <= budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over budget {budget:?}")),
            Err(e) => ("FAIL", e),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} {name:<32} {:>8.3}s  {detail}", took.as_secs_f64());
    }
    println!("{} failed, total {:.2}s", failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
