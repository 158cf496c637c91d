//! Numerical certification of subsolution profiles: residuals of
//! `f(λ(D²u)) ≥ 1` on level sets, the comparison gap against the reduced
//! operator, the eigenvalue sandwich, and far-field boundedness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{directions, sample_level_set};
use crate::spectral::{eigen_bounds, eigen_sym, gsym_hessian, GSymPoint};
use crate::subsolution::{GContext, UProfile};

/// Tolerance on `f(λ(D²u)) − 1` for a certified sample.
pub const CERT_TOL: f64 = 1e-8;
/// Tolerance on the comparison gap.
pub const GAP_TOL: f64 = 1e-10;
/// Slack allowed on the eigenvalue sandwich.
pub const BOUND_TOL: f64 = 1e-10;
/// Default number of low-discrepancy directions per level set.
pub const DEFAULT_SAMPLES: usize = 64;
/// Smallest level used by the far-field check; below it the scaled tail is
/// still climbing toward its limit.
pub const ASYMPTOTIC_S_MIN: f64 = 100.0;

/// What one level set `½ xᵀAx = s` looks like under the profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub s: f64,
    /// `min f(λ(D²u)) − 1`.
    pub min_residual: f64,
    /// `max |f(λ(D²u)) − 1|`.
    pub max_abs_residual: f64,
    pub min_gap: f64,
    pub bound_violations: usize,
    pub cone_failures: usize,
    pub samples: usize,
}

impl LevelStats {
    pub fn passes(&self) -> bool {
        self.min_gap >= -GAP_TOL && self.min_residual >= -CERT_TOL && self.bound_violations == 0
    }
}

/// Examines `samples` directions (plus the axis points) on the level set `s`.
pub fn examine_level(ctx: &GContext, u: &UProfile, s: f64, samples: usize) -> Result<LevelStats> {
    let delta = u.base.delta;
    let w = u.base.w(s);
    let wp = ctx.w_prime(w, s, delta)?;
    let a = ctx.a.as_slice();
    let n = a.len();

    // comparison operator, independent of x on the level set
    let mut reduced: Vec<f64> = a.iter().map(|ai| ai * w).collect();
    reduced[0] = ctx.a1() * w + (2.0 * ctx.an() + delta) * s * wp;
    let f_reduced = if ctx.op.in_cone(&reduced) {
        ctx.op.eval(&reduced)?
    } else {
        f64::NEG_INFINITY
    };

    let mut stats = LevelStats {
        s,
        min_residual: f64::INFINITY,
        max_abs_residual: 0.0,
        min_gap: f64::INFINITY,
        bound_violations: 0,
        cone_failures: 0,
        samples: 0,
    };
    for x in sample_level_set(a, s, samples) {
        let p = GSymPoint::new(a, &x, w, wp)?;
        let lam = eigen_sym(&gsym_hessian(&p));
        stats.samples += 1;
        if wp <= 0.0 {
            let (lo, hi) = eigen_bounds(&p)?;
            // bounds are per index for ascending a; compare sorted
            let mut lo = lo;
            lo.sort_by(f64::total_cmp);
            let mut hi = hi;
            hi.sort_by(f64::total_cmp);
            for i in 0..n {
                let scale = 1.0 + hi[i].abs();
                if lam[i] < lo[i] - BOUND_TOL * scale || lam[i] > hi[i] + BOUND_TOL * scale {
                    stats.bound_violations += 1;
                }
            }
        }
        if !ctx.op.in_cone(&lam) {
            stats.cone_failures += 1;
            stats.min_gap = f64::NEG_INFINITY;
            stats.min_residual = f64::NEG_INFINITY;
            stats.max_abs_residual = f64::INFINITY;
            continue;
        }
        let f = ctx.op.eval(&lam)?;
        stats.min_residual = stats.min_residual.min(f - 1.0);
        stats.max_abs_residual = stats.max_abs_residual.max((f - 1.0).abs());
        stats.min_gap = stats.min_gap.min(f - f_reduced);
    }
    Ok(stats)
}

/// `min_x [f(λ(D²u)) − f(a_1 w + (2a_n+δ) s w', a_2 w, …, a_n w)]` over the
/// level set `s`.
pub fn comparison_gap(ctx: &GContext, u: &UProfile, s: f64, samples: usize) -> Result<f64> {
    Ok(examine_level(ctx, u, s, samples)?.min_gap)
}

/// Geometric grid `start, start·ratio, …` up to `end`.
pub fn geometric_grid(start: f64, end: f64, ratio: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut s = start;
    while s <= end * (1.0 + 1e-12) {
        out.push(s);
        s *= ratio;
    }
    out
}

/// Default threshold grid: `1, 2, 4, …` up to `min(1e6, s_max)`.
pub fn default_sbar_grid(s_max: f64) -> Vec<f64> {
    geometric_grid(1.0, s_max.min(1e6), 2.0)
}

/// Smallest grid value beyond which every grid level set passes; stores it
/// into `u.sbar`.
pub fn find_sbar(ctx: &GContext, u: &mut UProfile, grid: &[f64], samples: usize) -> Result<(f64, Vec<LevelStats>)> {
    let mut stats = Vec::with_capacity(grid.len());
    for &s in grid {
        stats.push(examine_level(ctx, u, s, samples)?);
    }
    let mut sbar = None;
    for (i, st) in stats.iter().enumerate().rev() {
        if st.passes() {
            sbar = Some(grid[i]);
        } else {
            break;
        }
    }
    match sbar {
        Some(s) => {
            u.sbar = Some(s);
            Ok((s, stats))
        }
        None => Err(Error::CertificationFailed(format!(
            "no certified level set on the grid up to s = {:e}",
            grid.last().copied().unwrap_or(f64::NAN)
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub radii: Vec<f64>,
    /// `max_x R^{2α−2} |u − (½xᵀAx + c)|` per radius.
    pub scaled: Vec<f64>,
    pub sup: f64,
    pub non_diverging: bool,
}

/// Far-field check of `|x|^{2α−2} |u(x) − (½xᵀAx + c)|` with `c = c1 + μ`.
/// Radii must keep every sampled level inside the profile range.
pub fn asymptotic_check(ctx: &GContext, u: &UProfile, radii: &[f64], samples: usize) -> Result<AsymptoticReport> {
    let a = ctx.a.as_slice();
    let power = 2.0 * u.alpha() - 2.0;
    let dirs = directions(a.len(), samples);
    let mut scaled = Vec::with_capacity(radii.len());
    for &r in radii {
        let s_hi = 0.5 * ctx.an() * r * r;
        if s_hi > u.base.s_max() * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!(
                "radius {r} reaches s = {s_hi:e} beyond the profile end {:e}",
                u.base.s_max()
            )));
        }
        let mut worst = 0.0f64;
        let axes = (0..a.len()).map(|i| {
            let mut d = vec![0.0; a.len()];
            d[i] = 1.0;
            d
        });
        for d in axes.chain(dirs.iter().cloned()) {
            let s = 0.5 * a.iter().zip(&d).map(|(ai, di)| ai * di * di).sum::<f64>() * r * r;
            worst = worst.max(r.powf(power) * u.tail(s).abs());
        }
        scaled.push(worst);
    }
    let non_diverging = scaled.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-2) || w[1] <= 1e-300);
    let sup = scaled.iter().copied().fold(0.0, f64::max);
    Ok(AsymptoticReport {
        radii: radii.to_vec(),
        scaled,
        sup,
        non_diverging,
    })
}

/// Dyadic radii `2^k` whose level sets lie in `[s_lo, s_hi]` for every
/// direction.
pub fn dyadic_radii(ctx: &GContext, s_lo: f64, s_hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r: f64 = 1.0;
    while 0.5 * ctx.an() * r * r <= s_hi {
        if 0.5 * ctx.a1() * r * r >= s_lo {
            out.push(r);
        }
        r *= 2.0;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub sbar_found: Option<f64>,
    pub certified: bool,
    /// Min over samples beyond `s̄` of `f(λ(D²u)) − 1`.
    pub min_residual: f64,
    pub max_abs_residual: f64,
    pub comparison_min_gap: f64,
    pub eigen_bound_violations: usize,
    pub asymptotic_sup: f64,
    pub asymptotic_non_diverging: bool,
    pub samples_used: usize,
    pub levels: Vec<LevelStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Runs the threshold search and the far-field check.
pub fn verify(ctx: &GContext, u: &mut UProfile, samples: usize) -> Result<VerificationReport> {
    let grid = default_sbar_grid(u.base.s_max());
    let (sbar, levels, failure) = match find_sbar(ctx, u, &grid, samples) {
        Ok((s, levels)) => (Some(s), levels, None),
        Err(Error::CertificationFailed(msg)) => {
            let levels = grid
                .iter()
                .map(|&s| examine_level(ctx, u, s, samples))
                .collect::<Result<Vec<_>>>()?;
            (None, levels, Some(msg))
        }
        Err(e) => return Err(e),
    };
    let beyond: Vec<&LevelStats> = levels.iter().filter(|l| sbar.is_some_and(|s| l.s >= s)).collect();
    let fold = |f: fn(&LevelStats) -> f64, init: f64, pick: fn(f64, f64) -> f64| {
        beyond.iter().map(|l| f(l)).fold(init, pick)
    };
    let min_residual = fold(|l| l.min_residual, f64::INFINITY, f64::min);
    let max_abs_residual = fold(|l| l.max_abs_residual, 0.0, f64::max);
    let min_gap = fold(|l| l.min_gap, f64::INFINITY, f64::min);
    let violations = levels.iter().map(|l| l.bound_violations).sum();
    let samples_used = levels.iter().map(|l| l.samples).sum();

    let radii = dyadic_radii(ctx, ASYMPTOTIC_S_MIN, u.base.s_max());
    let asym = asymptotic_check(ctx, u, &radii, samples)?;
    Ok(VerificationReport {
        sbar_found: sbar,
        certified: sbar.is_some() && violations == 0,
        min_residual,
        max_abs_residual,
        comparison_min_gap: min_gap,
        eigen_bound_violations: violations,
        asymptotic_sup: asym.sup,
        asymptotic_non_diverging: asym.non_diverging,
        samples_used,
        levels,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissibility::{CandidateMatrix, EXACT_LEVEL_TOL};
    use crate::operator::OperatorSpec;
    use crate::subsolution::{build_u, integrate_w};

    fn radial(c2: f64) -> (GContext, UProfile) {
        let ctx = GContext::new(
            &OperatorSpec::SigmaK { n: 3, k: 3 },
            &CandidateMatrix::Diagonal(vec![1.0; 3]),
            EXACT_LEVEL_TOL,
        )
        .unwrap();
        let p = integrate_w(&ctx, c2, 0.0, 1e6, 1e-10).unwrap();
        let u = build_u(&ctx, p, 0.0).unwrap();
        (ctx, u)
    }

    #[test]
    fn radial_profile_is_exact_solution() {
        let (ctx, mut u) = radial(2.0);
        let r = verify(&ctx, &mut u, 16).unwrap();
        assert_eq!(r.sbar_found, Some(1.0));
        assert!(r.max_abs_residual <= 1e-8);
        assert!(r.comparison_min_gap.abs() <= 1e-10);
        assert_eq!(r.eigen_bound_violations, 0);
        // R · (14/3) (R²/2)^{-1/2} = (14/3)√2
        let c = 14.0 / 3.0 * 2f64.sqrt();
        assert!((r.asymptotic_sup - c).abs() < 0.05 * c, "{}", r.asymptotic_sup);
    }

    #[test]
    fn flat_profile() {
        let (ctx, mut u) = radial(1.0);
        let r = verify(&ctx, &mut u, 8).unwrap();
        assert_eq!(r.sbar_found, Some(1.0));
        assert!(r.max_abs_residual < 1e-14);
        assert_eq!(r.asymptotic_sup, 0.0);
    }

    #[test]
    fn grid_shape() {
        let g = default_sbar_grid(1e6);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[1], 2.0);
        assert!(*g.last().unwrap() <= 1e6);
    }
}
