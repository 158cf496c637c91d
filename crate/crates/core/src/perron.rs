//! Boundary barriers on ellipsoidal domains and the piecewise glue of the
//! barrier envelope with a far-field subsolution profile.
//!
//! Everything here lives in the frame where `A = diag(a)`. Quadratic
//! barriers `w_ξ(x) = ϕ(ξ) + ½[(x − x̄)ᵀA(x − x̄) − (ξ − x̄)ᵀA(ξ − x̄)]` solve
//! the equation exactly; the glued function is
//!
//! ```text
//! u(x) = w(x)                  on E(s̄) \ D
//!        max(ω(x), w(x))       on E(ŝ) \ E(s̄)
//!        ω(x)                  outside E(ŝ)
//! ```
//!
//! with `w` the barrier envelope and `ω(x) = u(s) − u(s̄) + β` built from the
//! profile whose far-field constant is the prescribed `c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::bisect_predicate;
use crate::sampling::{directions, sample_level_set};
use crate::spectral::SymMatrix;
use crate::subsolution::{build_u, integrate_w, mu_of_profile, GContext, UProfile};
use crate::verification::{default_sbar_grid, find_sbar};

/// `D = {x : ½ (x − x₀)ᵀ B (x − x₀) < r}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    #[serde(rename = "B")]
    pub b: SymMatrix,
    pub r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
}

impl DomainSpec {
    pub fn unit_ball(n: usize) -> Self {
        DomainSpec {
            b: SymMatrix::identity(n),
            r: 0.5,
            center: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    pub fn center(&self) -> Vec<f64> {
        self.center.clone().unwrap_or_else(|| vec![0.0; self.dim()])
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) {
            return Err(Error::Invalid(format!("domain radius must be positive, got {}", self.r)));
        }
        if let Some(c) = &self.center {
            if c.len() != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    got: c.len(),
                });
            }
        }
        // Cholesky doubles as the positive definiteness check
        self.b.solve_spd(&vec![0.0; self.dim()])?;
        Ok(())
    }

    /// `½ (x − x₀)ᵀ B (x − x₀)`.
    pub fn level(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = x.iter().zip(self.center()).map(|(a, b)| a - b).collect();
        0.5 * self.b.quad_form(&y)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.level(x) < self.r
    }

    /// Boundary point hit from the center along direction `d`.
    pub fn boundary_point(&self, d: &[f64]) -> Vec<f64> {
        let scale = (2.0 * self.r / self.b.quad_form(d)).sqrt();
        self.center().iter().zip(d).map(|(c, di)| c + scale * di).collect()
    }

    /// Outer unit normal at a boundary point.
    pub fn normal(&self, xi: &[f64]) -> Vec<f64> {
        let y: Vec<f64> = xi.iter().zip(self.center()).map(|(a, b)| a - b).collect();
        let g = self.b.mul_vec(&y);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        g.into_iter().map(|v| v / norm).collect()
    }

    /// Axis points (both signs) followed by `m` low-discrepancy boundary points.
    pub fn boundary_samples(&self, m: usize) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out = Vec::with_capacity(2 * n + m);
        for i in 0..n {
            for sign in [1.0, -1.0] {
                let mut d = vec![0.0; n];
                d[i] = sign;
                out.push(self.boundary_point(&d));
            }
        }
        for d in directions(n, m) {
            out.push(self.boundary_point(&d));
        }
        out
    }
}

/// Quadratic boundary data `ϕ(x) = c0 + b·x + ½ xᵀQx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub c0: f64,
    pub b: Vec<f64>,
    #[serde(rename = "Q")]
    pub q: SymMatrix,
}

impl BoundaryData {
    pub fn zero(n: usize) -> Self {
        BoundaryData {
            c0: 0.0,
            b: vec![0.0; n],
            q: SymMatrix::zeros(n),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.c0 + self.b.iter().zip(x).map(|(b, x)| b * x).sum::<f64>() + 0.5 * self.q.quad_form(x)
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        self.q.mul_vec(x).iter().zip(&self.b).map(|(a, b)| a + b).collect()
    }
}

/// A quadratic barrier touching the boundary data from below at `ξ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Barrier {
    pub xi: Vec<f64>,
    pub xbar: Vec<f64>,
    pub a: Vec<f64>,
    pub phi_xi: f64,
    /// Normal push used to place the vertex.
    pub t: f64,
    /// `min (ϕ − w_ξ) / |x − ξ|²` over the boundary samples.
    pub margin: f64,
    // ½ (ξ − x̄)ᵀA(ξ − x̄)
    offset: f64,
}

impl Barrier {
    fn new(a: &[f64], xi: &[f64], xbar: Vec<f64>, phi_xi: f64, t: f64) -> Self {
        let offset = half_quad(a, xi, &xbar);
        Barrier {
            xi: xi.to_vec(),
            xbar,
            a: a.to_vec(),
            phi_xi,
            t,
            margin: 0.0,
            offset,
        }
    }

    /// `w_ξ(x)`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.phi_xi + half_quad(&self.a, x, &self.xbar) - self.offset
    }
}

fn half_quad(a: &[f64], x: &[f64], y: &[f64]) -> f64 {
    0.5 * a.iter().zip(x.iter().zip(y)).map(|(ai, (xi, yi))| ai * (xi - yi).powi(2)).sum::<f64>()
}

fn dist_sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum()
}

/// Settings for the barrier search and glue assembly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerronOptions {
    pub barriers: usize,
    pub boundary_samples: usize,
    /// Required `ϕ − w_ξ >= κ |x − ξ|²` on boundary samples.
    pub kappa: f64,
    pub max_t: f64,
    pub cloud_directions: usize,
    pub cloud_shells: usize,
    pub verify_samples: usize,
    pub s_max: f64,
    pub rel_tol: f64,
}

impl Default for PerronOptions {
    fn default() -> Self {
        PerronOptions {
            barriers: 128,
            boundary_samples: 256,
            kappa: 0.01,
            max_t: 1e6,
            cloud_directions: 256,
            cloud_shells: 16,
            verify_samples: 32,
            s_max: 1e6,
            rel_tol: 1e-10,
        }
    }
}

/// Finds a vertex `x̄ = ξ − A⁻¹(∇ϕ(ξ) + t ν(ξ))` for which `w_ξ` stays below
/// `ϕ` on the boundary samples with quadratic margin `κ`. `t` is doubled
/// from 1 until feasible and then bisected down to the smallest feasible
/// push.
pub fn build_barrier(
    dom: &DomainSpec,
    phi: &BoundaryData,
    a: &[f64],
    xi: &[f64],
    boundary: &[Vec<f64>],
    opts: &PerronOptions,
) -> Result<Barrier> {
    if (dom.level(xi) - dom.r).abs() > 1e-10 * (1.0 + dom.r) {
        return Err(Error::Precondition(format!("{xi:?} is not on the boundary")));
    }
    if a.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::NotPositiveDefinite(a.iter().copied().fold(f64::INFINITY, f64::min)));
    }
    let nu = dom.normal(xi);
    let grad = phi.grad(xi);
    let phi_xi = phi.eval(xi);
    let make = |t: f64| {
        let xbar: Vec<f64> = (0..a.len()).map(|i| xi[i] - (grad[i] + t * nu[i]) / a[i]).collect();
        Barrier::new(a, xi, xbar, phi_xi, t)
    };
    // worst (ϕ − w − κ|x − ξ|²) over samples away from ξ
    let slack = |b: &Barrier| {
        let mut worst = f64::INFINITY;
        for x in boundary {
            let d2 = dist_sq(x, xi);
            if d2 < 1e-20 {
                continue;
            }
            worst = worst.min(phi.eval(x) - b.value(x) - opts.kappa * d2);
        }
        worst
    };
    let mut t = 1.0;
    loop {
        if slack(&make(t)) >= 0.0 {
            break;
        }
        t *= 2.0;
        if t > opts.max_t {
            let worst = slack(&make(opts.max_t));
            return Err(Error::BarrierNotFound {
                xi: xi.to_vec(),
                worst,
            });
        }
    }
    let t = if slack(&make(0.0)) >= 0.0 {
        0.0
    } else {
        let lo = 0.0;
        let hi = t;
        // feasibility is monotone in t; keep the feasible end
        let mid = bisect_predicate(|s| slack(&make(s)) < 0.0, lo, hi, 1e-6 * hi);
        let cand = mid + 1e-6 * hi;
        if slack(&make(cand)) >= 0.0 {
            cand
        } else {
            hi
        }
    };
    let mut b = make(t);
    b.margin = boundary
        .iter()
        .filter(|x| dist_sq(x, xi) >= 1e-20)
        .map(|x| (phi.eval(x) - b.value(x)) / dist_sq(x, xi))
        .fold(f64::INFINITY, f64::min);
    Ok(b)
}

/// Barriers at the domain's boundary sample family.
pub fn build_barriers(dom: &DomainSpec, phi: &BoundaryData, a: &[f64], opts: &PerronOptions) -> Result<Vec<Barrier>> {
    let boundary = dom.boundary_samples(opts.boundary_samples);
    dom.boundary_samples(opts.barriers)
        .iter()
        .map(|xi| build_barrier(dom, phi, a, xi, &boundary, opts))
        .collect()
}

/// `max_ξ w_ξ(x)`.
pub fn lower_envelope(barriers: &[Barrier], x: &[f64]) -> f64 {
    barriers.iter().map(|b| b.value(x)).fold(f64::NEG_INFINITY, f64::max)
}

/// Points of `E(s̄) \ D` on rays from the domain center: `shells` radial
/// positions per direction between `∂D` and `∂E(s̄)`, ends included.
pub fn annulus_cloud(dom: &DomainSpec, a: &[f64], sbar: f64, dirs: usize, shells: usize) -> Vec<Vec<f64>> {
    let x0 = dom.center();
    let n = a.len();
    let mut out = Vec::with_capacity(dirs * shells);
    for d in directions(n, dirs) {
        let rho_d = (2.0 * dom.r / dom.b.quad_form(&d)).sqrt();
        // ½ (x0 + ρd)ᵀA(x0 + ρd) = s̄
        let qa: f64 = 0.5 * a.iter().zip(&d).map(|(ai, di)| ai * di * di).sum::<f64>();
        let qb: f64 = a.iter().zip(d.iter().zip(&x0)).map(|(ai, (di, ci))| ai * di * ci).sum();
        let qc: f64 = 0.5 * a.iter().zip(&x0).map(|(ai, ci)| ai * ci * ci).sum::<f64>() - sbar;
        let rho_e = (-qb + (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa);
        for k in 0..shells {
            let f = if shells == 1 { 0.0 } else { k as f64 / (shells - 1) as f64 };
            let rho = rho_d + f * (rho_e - rho_d);
            out.push(x0.iter().zip(&d).map(|(c, di)| c + rho * di).collect());
        }
    }
    out
}

/// `μ_s̄(c2) = ∫_s̄^∞ (w − 1) + β − s̄`.
pub fn mu_sbar(ctx: &GContext, c2: f64, delta: f64, sbar: f64, beta: f64, opts: &PerronOptions) -> Result<f64> {
    let p = integrate_w(ctx, c2, delta, opts.s_max.max(2.0 * sbar), opts.rel_tol)?;
    let mu = mu_of_profile(ctx, &p)?;
    Ok(mu.total_excess() - p.excess_integral(sbar) + beta - sbar)
}

/// `ω_{c2}` on the level `s`: `∫_s̄^s w + β`.
fn omega_at(ctx: &GContext, c2: f64, delta: f64, sbar: f64, beta: f64, s: f64, rel_tol: f64) -> Result<f64> {
    let p = integrate_w(ctx, c2, delta, s.max(sbar) * 1.000_001, rel_tol)?;
    Ok((s - sbar) + p.excess_integral(s) - p.excess_integral(sbar) + beta)
}

/// Glue constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlueConfig {
    pub sbar: f64,
    pub shat: f64,
    pub beta: f64,
    pub bhat: f64,
    pub chat: f64,
    pub c_star: f64,
    pub c: f64,
    pub alpha_c: f64,
    pub delta: f64,
    /// Largest barrier envelope value on `∂E(ŝ)`.
    pub envelope_max_shat: f64,
}

/// Inverts `μ_s̄` by bisection in `c2`: `μ_s̄(α(c)) = c`.
pub fn alpha_of_c(ctx: &GContext, c: f64, glue: &GlueConfig, opts: &PerronOptions) -> Result<f64> {
    if !(c > glue.c_star) {
        return Err(Error::Precondition(format!("c = {c} must exceed c_star = {}", glue.c_star)));
    }
    let f = |c2: f64| mu_sbar(ctx, c2, glue.delta, glue.sbar, glue.beta, opts);
    invert_increasing(f, c, glue.chat.max(1.0))
}

/// Smallest `c2 >= lo` with `f(c2) = target` for increasing `f`, to `1e-10`.
fn invert_increasing<F: Fn(f64) -> Result<f64>>(f: F, target: f64, lo: f64) -> Result<f64> {
    let mut lo = lo;
    if f(lo)? >= target {
        if lo == 1.0 {
            return Ok(1.0);
        }
        return Err(Error::Precondition(format!("target {target} below the bracket start")));
    }
    let mut hi = 2.0 * lo;
    while f(hi)? < target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::BracketNotFound(format!("no c2 reaches {target}")));
        }
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// An assembled glue: constants, barriers and the far-field profile.
#[derive(Debug, Clone)]
pub struct Glue {
    pub config: GlueConfig,
    pub a: Vec<f64>,
    pub barriers: Vec<Barrier>,
    pub profile: UProfile,
    pub domain: DomainSpec,
    pub phi: BoundaryData,
    u_sbar: f64,
}

/// Builds barriers, glue constants and the far-field profile for the
/// prescribed constant `c`; `c` below the admissible range is raised to
/// `c_star + 1` only when `c` is `None`.
pub fn assemble(
    ctx: &GContext,
    dom: &DomainSpec,
    phi: &BoundaryData,
    delta: f64,
    c: Option<f64>,
    opts: &PerronOptions,
) -> Result<Glue> {
    dom.validate()?;
    let n = ctx.dim();
    if dom.dim() != n || phi.b.len() != n || phi.q.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: dom.dim(),
        });
    }
    let a = ctx.a.as_slice().to_vec();
    let barriers = build_barriers(dom, phi, &a, opts)?;

    // D must sit inside E(s̄)
    let reach = dom
        .boundary_samples(4 * opts.boundary_samples)
        .iter()
        .map(|x| crate::sampling::level(&a, x))
        .fold(0.0, f64::max)
        * 1.01;

    // certify a threshold on a reference profile first
    let reference = build_u(ctx, integrate_w(ctx, 2.0, delta, opts.s_max, opts.rel_tol)?, 0.0)?;
    let mut sbar_needed = certified_sbar(ctx, reference, opts)?;

    for _ in 0..8 {
        let sbar = default_sbar_grid(f64::INFINITY)
            .into_iter()
            .chain((0..).map(|k| 2f64.powi(21 + k)))
            .find(|&s| s >= sbar_needed && s > reach)
            .expect("grid is unbounded");
        let cloud = annulus_cloud(dom, &a, sbar, opts.cloud_directions, opts.cloud_shells);
        let (mut beta, mut bhat) = (f64::INFINITY, f64::NEG_INFINITY);
        for x in &cloud {
            for b in &barriers {
                let v = b.value(x);
                beta = beta.min(v);
                bhat = bhat.max(v);
            }
        }

        // ŝ: first 2^k s̄ where some ĉ separates ω from the envelope
        let mut found = None;
        for k in 1..=20 {
            let shat = sbar * 2f64.powi(k);
            let env = sample_level_set(&a, shat, opts.cloud_directions)
                .iter()
                .map(|x| lower_envelope(&barriers, x))
                .fold(f64::NEG_INFINITY, f64::max);
            let target = env + 1e-6 * (1.0 + env.abs());
            let om = |c2: f64| omega_at(ctx, c2, delta, sbar, beta, shat, opts.rel_tol);
            if let Ok(chat) = invert_increasing(om, target, 1.0) {
                found = Some((shat, chat * (1.0 + 1e-9) + 1e-12, env));
                break;
            }
        }
        let (shat, chat, env) = found.ok_or_else(|| {
            Error::CertificationFailed("no outer radius separates the profile from the barriers".into())
        })?;
        let tiny = 1e-9 * (1.0 + bhat.abs());
        let c_star = mu_sbar(ctx, chat, delta, sbar, beta, opts)?.max(bhat + tiny);
        let c = match c {
            Some(c) => c,
            None => c_star + 1.0,
        };
        let mut config = GlueConfig {
            sbar,
            shat,
            beta,
            bhat,
            chat,
            c_star,
            c,
            alpha_c: f64::NAN,
            delta,
            envelope_max_shat: env,
        };
        config.alpha_c = alpha_of_c(ctx, c, &config, opts)?;
        let profile = build_u(ctx, integrate_w(ctx, config.alpha_c, delta, opts.s_max, opts.rel_tol)?, 0.0)?;
        let need = certified_sbar(ctx, profile.clone(), opts)?;
        if need > sbar {
            sbar_needed = need;
            continue;
        }
        let mut profile = profile;
        profile.sbar = Some(sbar);
        let u_sbar = profile.u(sbar);
        return Ok(Glue {
            config,
            a,
            barriers,
            profile,
            domain: dom.clone(),
            phi: phi.clone(),
            u_sbar,
        });
    }
    Err(Error::CertificationFailed("threshold kept moving while gluing".into()))
}

fn certified_sbar(ctx: &GContext, mut u: UProfile, opts: &PerronOptions) -> Result<f64> {
    let grid = default_sbar_grid(u.base.s_max());
    Ok(find_sbar(ctx, &mut u, &grid, opts.verify_samples)?.0)
}

/// Which piece of the glue a point falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Inner,
    Middle,
    Outer,
}

impl Glue {
    pub fn level(&self, x: &[f64]) -> f64 {
        crate::sampling::level(&self.a, x)
    }

    /// `ω_{α(c)}(x) = u(s) − u(s̄) + β`.
    pub fn omega(&self, x: &[f64]) -> f64 {
        let s = self.level(x);
        self.profile.u(s) - self.u_sbar + self.config.beta
    }

    /// Far-field form of `ω` that avoids cancellation: `s + c − tail(s)`.
    fn omega_far(&self, s: f64) -> f64 {
        s + self.config.c - self.profile.tail(s)
    }

    pub fn region(&self, x: &[f64]) -> Region {
        let s = self.level(x);
        if s <= self.config.sbar {
            Region::Inner
        } else if s <= self.config.shat {
            Region::Middle
        } else {
            Region::Outer
        }
    }

    /// The glued value `u̲(x)`; `x` must lie outside `D`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        if self.domain.contains(x) && self.domain.r - self.domain.level(x) > 1e-12 * self.domain.r {
            return Err(Error::Precondition(format!("{x:?} lies inside the domain")));
        }
        Ok(match self.region(x) {
            Region::Inner => lower_envelope(&self.barriers, x),
            Region::Middle => self.omega(x).max(lower_envelope(&self.barriers, x)),
            Region::Outer => {
                let s = self.level(x);
                if s > self.config.shat * 1e3 {
                    self.omega_far(s)
                } else {
                    self.omega(x)
                }
            }
        })
    }

    /// The supersolution `½ xᵀAx + c`.
    pub fn upper(&self, x: &[f64]) -> f64 {
        self.level(x) + self.config.c
    }
}

/// `glue_value` as a free function.
pub fn glue_value(glue: &Glue, x: &[f64]) -> Result<f64> {
    glue.value(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub samples: usize,
    pub violations: usize,
    /// `min (ū − u̲)` over all samples.
    pub worst_gap: f64,
    /// `max |u̲ − ϕ|` at the barrier touching points.
    pub boundary_error: f64,
    /// `max |u̲ − ϕ|` over generic boundary samples (envelope resolution).
    pub boundary_sample_error: f64,
    pub min_barrier_margin: f64,
    /// `max |u̲ − ū| / s^{1−α_δ}` at the far samples.
    pub far_field_ratio: f64,
    /// `C / (α − 1)` from the tail fit of the `α(c)` profile, the value the
    /// ratio approaches.
    pub far_field_expected: f64,
    pub far_s: f64,
    /// Inner-region samples exceeding `β` in `ω` (should be zero).
    pub omega_above_beta: usize,
    /// Interface mismatch at `∂E(ŝ)` between the glue and `ω`.
    pub outer_interface_jump: f64,
}

impl SandwichReport {
    /// Zero violations and a far-field ratio within `far_tol` or within 1% of
    /// the fitted tail coefficient, whichever is looser.
    pub fn passes(&self, far_tol: f64) -> bool {
        self.violations == 0
            && self.omega_above_beta == 0
            && self.far_field_ratio <= far_tol.max(1.01 * self.far_field_expected)
    }
}

/// Checks `u̲ <= ū + 1e-9` across the three regions, boundary agreement at
/// the barrier points, and far-field agreement at `s = far_s`.
pub fn sandwich_check(glue: &Glue, samples: usize, far_s: f64) -> Result<SandwichReport> {
    let cfg = glue.config;
    let mut pts: Vec<Vec<f64>> = annulus_cloud(&glue.domain, &glue.a, cfg.sbar, samples, 8);
    let mut s = cfg.sbar;
    while s < cfg.shat {
        s *= 2f64.sqrt();
        pts.extend(sample_level_set(&glue.a, s.min(cfg.shat), samples));
    }
    let mut s = cfg.shat;
    while s < far_s {
        s = (s * 8.0).min(far_s);
        pts.extend(sample_level_set(&glue.a, s, samples));
    }
    let mut violations = 0;
    let mut worst_gap = f64::INFINITY;
    for x in &pts {
        let gap = glue.upper(x) - glue.value(x)?;
        worst_gap = worst_gap.min(gap);
        if gap < -1e-9 {
            violations += 1;
        }
    }
    let boundary_error = glue
        .barriers
        .iter()
        .map(|b| glue.value(&b.xi).map(|v| (v - glue.phi.eval(&b.xi)).abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let boundary_sample_error = glue
        .domain
        .boundary_samples(samples)
        .iter()
        .map(|x| glue.value(x).map(|v| (v - glue.phi.eval(x)).abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let min_barrier_margin = glue.barriers.iter().map(|b| b.margin).fold(f64::INFINITY, f64::min);

    let alpha = glue.profile.alpha();
    let far_pts = sample_level_set(&glue.a, far_s, samples);
    let mut far = 0.0f64;
    for x in &far_pts {
        far = far.max((glue.value(x)? - glue.upper(x)).abs());
    }
    let far_field_ratio = far / far_s.powf(1.0 - alpha);

    let omega_above_beta = annulus_cloud(&glue.domain, &glue.a, cfg.sbar, samples, 4)
        .iter()
        .filter(|x| glue.omega(x) > cfg.beta + 1e-9 * (1.0 + cfg.beta.abs()))
        .count();
    let outer_interface_jump = sample_level_set(&glue.a, cfg.shat, samples)
        .iter()
        .map(|x| {
            let inner = glue.omega(x).max(lower_envelope(&glue.barriers, x));
            (inner - glue.omega(x)).abs()
        })
        .fold(0.0, f64::max);

    Ok(SandwichReport {
        samples: pts.len() + far_pts.len(),
        violations,
        worst_gap,
        boundary_error,
        boundary_sample_error,
        min_barrier_margin,
        far_field_ratio,
        far_field_expected: glue.profile.mu.tail_constant / (alpha - 1.0),
        far_s,
        omega_above_beta,
        outer_interface_jump,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_barrier_is_a_plane_cut() {
        let dom = DomainSpec::unit_ball(3);
        let phi = BoundaryData::zero(3);
        let opts = PerronOptions::default();
        let boundary = dom.boundary_samples(64);
        let b = build_barrier(&dom, &phi, &[1.0; 3], &[1.0, 0.0, 0.0], &boundary, &opts).unwrap();
        assert_eq!(b.value(&b.xi), 0.0);
        // vertex on the axis behind ξ: w = τ (x·e1 − 1) on the sphere
        assert!(b.xbar[1].abs() < 1e-15 && b.xbar[2].abs() < 1e-15);
        let tau = -b.xbar[0];
        for x in &boundary {
            assert!((b.value(x) - tau * (x[0] - 1.0)).abs() < 1e-12);
            if (x[0] - 1.0).abs() > 1e-9 {
                assert!(b.value(x) < 0.0);
            }
        }
    }

    #[test]
    fn barrier_touches_data() {
        let dom = DomainSpec {
            b: SymMatrix::from_diag(&[1.0, 2.0, 0.5]),
            r: 0.7,
            center: Some(vec![0.1, -0.2, 0.0]),
        };
        let phi = BoundaryData {
            c0: 0.3,
            b: vec![0.5, -1.0, 0.2],
            q: SymMatrix::from_diag(&[0.4, -0.3, 1.0]),
        };
        let opts = PerronOptions::default();
        let boundary = dom.boundary_samples(128);
        for xi in dom.boundary_samples(8) {
            let b = build_barrier(&dom, &phi, &[0.9, 1.0, 1.1], &xi, &boundary, &opts).unwrap();
            assert!((b.value(&xi) - phi.eval(&xi)).abs() < 1e-14);
            for x in &boundary {
                let d2 = dist_sq(x, &xi);
                if d2 > 1e-20 {
                    assert!(phi.eval(x) - b.value(x) >= opts.kappa * d2 - 1e-12);
                }
            }
        }
    }

    #[test]
    fn barrier_cap() {
        let dom = DomainSpec::unit_ball(3);
        let phi = BoundaryData {
            c0: 0.0,
            b: vec![0.0; 3],
            q: SymMatrix::from_diag(&[-50.0; 3]),
        };
        let opts = PerronOptions {
            max_t: 4.0,
            ..PerronOptions::default()
        };
        let boundary = dom.boundary_samples(32);
        let r = build_barrier(&dom, &phi, &[1.0; 3], &[1.0, 0.0, 0.0], &boundary, &opts);
        assert!(matches!(r, Err(Error::BarrierNotFound { .. })));
    }

    #[test]
    fn envelope_single_and_many() {
        let dom = DomainSpec::unit_ball(3);
        let phi = BoundaryData::zero(3);
        let opts = PerronOptions::default();
        let bars = build_barriers(&dom, &phi, &[1.0; 3], &opts).unwrap();
        let x = [2.0, 0.0, 0.0];
        let brute = bars.iter().map(|b| b.value(&x)).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(lower_envelope(&bars, &x), brute);
        assert_eq!(lower_envelope(&bars[..1], &x), bars[0].value(&x));
        for b in &bars {
            assert!(lower_envelope(&bars, &b.xi).abs() < 1e-12);
        }
    }
}
