//! Radial-in-`s` subsolution profiles.
//!
//! For a diagonal admissible `A` the implicit profile `g(w)` solves
//! `f(g, a_2 w, …, a_n w) = 1`, and `w = u'(s)` follows
//!
//! ```text
//! dw/ds = (g(w) − a_1 w) / ((2 a_n + δ) s),   w(1) = c2.
//! ```
//!
//! The integration runs in `t = ln s` on the excess `v = w − 1`, which decays
//! like `s^{−α_δ}`. Below `v = 1e-6` the right-hand side switches to its
//! second-order expansion about `w = 1`, so the excess can be followed far
//! past the point where `1 + v` rounds to `1`.

use serde::Serialize;

use crate::admissibility::{analyze, AdmissibilityReport, CandidateMatrix};
use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::ode::{self, Node, Tolerance};
use crate::operator::{OperatorSpec, Spectrum};
use crate::quadrature;

/// Excess below which the right-hand side uses its expansion about `w = 1`.
const TAYLOR_BELOW: f64 = 1e-6;
/// Checkpoints every `ln(10)/64` in `t`.
pub const CHECKPOINTS_PER_DECADE: usize = 64;
/// Largest `s` the μ tail extension will reach.
const S_CAP: f64 = 1e300;
/// Excess at which extension stops to stay clear of underflow.
const EXCESS_FLOOR: f64 = 1e-280;

/// A diagonal admissible matrix bound to its operator.
#[derive(Debug, Clone, PartialEq)]
pub struct GContext {
    pub op: OperatorSpec,
    pub a: Spectrum,
    pub report: AdmissibilityReport,
    g_prime_one: f64,
    g_second_one: f64,
}

impl GContext {
    /// Requires `A` admissible within `level_tolerance` with the largest
    /// gradient component at the smallest eigenvalue.
    pub fn new(op: &OperatorSpec, matrix: &CandidateMatrix, level_tolerance: f64) -> Result<Self> {
        let report = analyze(op, matrix, level_tolerance)?;
        Self::from_report(op, report)
    }

    pub fn from_report(op: &OperatorSpec, report: AdmissibilityReport) -> Result<Self> {
        if !report.in_a {
            return Err(Error::Precondition(format!(
                "matrix is not admissible: {}",
                report.reason.as_deref().unwrap_or("unknown")
            )));
        }
        if !report.argmax_is_first() {
            return Err(Error::Precondition(format!(
                "largest gradient component at index {}, expected 1",
                report.grad_argmax_index
            )));
        }
        let mut ctx = GContext {
            op: *op,
            a: report.a.clone(),
            report,
            g_prime_one: 0.0,
            g_second_one: 0.0,
        };
        ctx.g_prime_one = ctx.g_prime(1.0)?;
        let h = 1e-4;
        ctx.g_second_one = (ctx.g_prime(1.0 + h)? - ctx.g_prime(1.0 - h)?) / (2.0 * h);
        Ok(ctx)
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn a1(&self) -> f64 {
        self.a[0]
    }

    pub fn an(&self) -> f64 {
        self.a[self.a.len() - 1]
    }

    pub fn alpha(&self, delta: f64) -> f64 {
        self.report.alpha(delta)
    }

    /// Whether all eigenvalues coincide.
    pub fn is_isotropic(&self) -> bool {
        self.an() - self.a1() <= 1e-14 * self.an()
    }

    fn rest(&self, w: f64) -> Vec<f64> {
        self.a[1..].iter().map(|ai| ai * w).collect()
    }

    /// `g(w)`: the first coordinate on the level set above `(a_2 w, …, a_n w)`.
    pub fn g(&self, w: f64) -> Result<f64> {
        let rest = self.rest(w);
        let g = self.op.solve_first_coordinate(&rest, 1.0, self.a1())?;
        let mut p = Vec::with_capacity(self.dim());
        p.push(g);
        p.extend_from_slice(&rest);
        if !self.op.in_cone(&p) {
            return Err(Error::OutsideCone(p));
        }
        Ok(g)
    }

    /// `g'(w) = −Σ_{i≥2} a_i f_i / f_1` at `(g(w), a_2 w, …, a_n w)`.
    pub fn g_prime(&self, w: f64) -> Result<f64> {
        let g = self.g(w)?;
        self.g_prime_at(g, w)
    }

    fn g_prime_at(&self, g: f64, w: f64) -> Result<f64> {
        let mut p = self.rest(w);
        p.insert(0, g);
        let grad = self.op.grad(&p)?;
        let num: f64 = self.a[1..].iter().zip(&grad[1..]).map(|(a, d)| a * d).sum();
        Ok(-num / grad[0])
    }

    /// `g'(1)` and `g''(1)` (the latter by a central difference).
    pub fn g_derivatives_at_one(&self) -> (f64, f64) {
        (self.g_prime_one, self.g_second_one)
    }

    /// `dv/dt` for the excess `v = w − 1` in `t = ln s`.
    pub fn excess_rhs(&self, v: f64, delta: f64) -> Result<f64> {
        let denom = 2.0 * self.an() + delta;
        if v < TAYLOR_BELOW {
            let (g1, g2) = (self.g_prime_one, self.g_second_one);
            return Ok(((g1 - self.a1()) * v + 0.5 * g2 * v * v) / denom);
        }
        let w = 1.0 + v;
        Ok((self.g(w)? - self.a1() * w) / denom)
    }

    /// `w'(s)` from the ODE at a point where `u' = w`.
    pub fn w_prime(&self, w: f64, s: f64, delta: f64) -> Result<f64> {
        Ok(self.excess_rhs(w - 1.0, delta)? / s)
    }

    /// Exponent of the linearized equation at `w = 1`; equals `−α_δ`.
    pub fn linear_rate(&self, delta: f64) -> f64 {
        (self.g_prime_one - self.a1()) / (2.0 * self.an() + delta)
    }
}

/// Tabulated solution `w(s)` on `[1, s_max]`.
#[derive(Debug, Clone)]
pub struct WProfile {
    pub c2: f64,
    pub delta: f64,
    pub alpha: f64,
    pub rel_tol: f64,
    nodes: Vec<Node>,
    // ln v over t; absent for the constant profile
    log_excess: Option<MonotoneCubic>,
    // ∫ v ds from s = 1 to each node
    cumulative: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub s: f64,
    pub w: f64,
    pub excess: f64,
}

fn checkpoints(t_from: f64, t_to: f64) -> Vec<f64> {
    let step = std::f64::consts::LN_10 / CHECKPOINTS_PER_DECADE as f64;
    let first = (t_from / step).floor() as i64 + 1;
    // skip stops that would force a sliver step
    let gap = 1e-9 * (1.0 + t_to.abs());
    (first..)
        .map(|k| k as f64 * step)
        .take_while(|&t| t < t_to - gap)
        .filter(|&t| t > t_from + gap)
        .collect()
}

fn project_excess(v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else if v > -1e-13 {
        Ok(f64::MIN_POSITIVE)
    } else {
        Err(Error::Integration(format!("w dropped below 1 (w - 1 = {v:e})")))
    }
}

fn run_segment(ctx: &GContext, start: Node, t_end: f64, delta: f64, rel_tol: f64) -> Result<Vec<Node>> {
    let tol = Tolerance {
        rel: rel_tol,
        abs: 1e-300,
        h_init: 1e-3,
        h_max: 0.5,
        max_steps: 2_000_000,
    };
    let stops = checkpoints(start.t, t_end);
    ode::integrate(
        |_t, v| ctx.excess_rhs(v, delta),
        start,
        t_end,
        &stops,
        tol,
        project_excess,
    )
}

/// Integrates the profile ODE from `w(1) = c2` to `s_max`.
pub fn integrate_w(ctx: &GContext, c2: f64, delta: f64, s_max: f64, rel_tol: f64) -> Result<WProfile> {
    if !(c2 >= 1.0) {
        return Err(Error::Precondition(format!("c2 must be >= 1, got {c2}")));
    }
    if !(delta >= 0.0) {
        return Err(Error::Precondition(format!("delta must be >= 0, got {delta}")));
    }
    let alpha = ctx.alpha(delta);
    if !(alpha > 1.0) {
        return Err(Error::Precondition(format!(
            "alpha_delta = {alpha} <= 1 (delta_max = {})",
            ctx.report.delta_max
        )));
    }
    if !(s_max > 1.0) {
        return Err(Error::Precondition(format!("s_max must exceed 1, got {s_max}")));
    }
    let t_end = s_max.ln();
    let nodes = if c2 == 1.0 {
        let mut ts = vec![0.0];
        ts.extend(checkpoints(0.0, t_end));
        ts.push(t_end);
        ts.into_iter().map(|t| Node { t, y: 0.0, dy: 0.0 }).collect()
    } else {
        let v0 = c2 - 1.0;
        let start = Node {
            t: 0.0,
            y: v0,
            dy: ctx.excess_rhs(v0, delta)?,
        };
        run_segment(ctx, start, t_end, delta, rel_tol)?
    };
    WProfile::from_nodes(c2, delta, alpha, rel_tol, nodes)
}

impl WProfile {
    fn from_nodes(c2: f64, delta: f64, alpha: f64, rel_tol: f64, nodes: Vec<Node>) -> Result<Self> {
        let log_excess = if c2 == 1.0 {
            None
        } else {
            let t = nodes.iter().map(|n| n.t).collect();
            let y = nodes.iter().map(|n| n.y.ln()).collect();
            let d = nodes.iter().map(|n| n.dy / n.y).collect();
            Some(MonotoneCubic::new(t, y, d)?)
        };
        let mut p = WProfile {
            c2,
            delta,
            alpha,
            rel_tol,
            nodes,
            log_excess,
            cumulative: Vec::new(),
        };
        p.cumulative = p.build_cumulative(0, 0.0);
        Ok(p)
    }

    fn build_cumulative(&self, from: usize, start: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.nodes.len() - from);
        out.push(start);
        let mut acc = start;
        for i in from..self.nodes.len() - 1 {
            acc += self.panel_integral(self.nodes[i].t, self.nodes[i + 1].t);
            out.push(acc);
        }
        out
    }

    // ∫ v ds over [e^{t0}, e^{t1}] = ∫ exp(y(t) + t) dt
    fn panel_integral(&self, t0: f64, t1: f64) -> f64 {
        let Some(c) = &self.log_excess else {
            return 0.0;
        };
        let scale = (c.eval(t0) + t0).exp().max((c.eval(t1) + t1).exp());
        quadrature::integrate(|t| (c.eval(t) + t).exp(), t0, t1, 1e-15 * scale, 1e-14)
    }

    /// Continues the integration to a larger `s_max`.
    pub fn extend(&mut self, ctx: &GContext, s_max: f64) -> Result<()> {
        let last = *self.nodes.last().expect("profile has nodes");
        let t_end = s_max.ln();
        if t_end <= last.t {
            return Ok(());
        }
        let new_nodes: Vec<Node> = if self.c2 == 1.0 {
            let mut ts = checkpoints(last.t, t_end);
            ts.push(t_end);
            ts.into_iter().map(|t| Node { t, y: 0.0, dy: 0.0 }).collect()
        } else {
            run_segment(ctx, last, t_end, self.delta, self.rel_tol)?.into_iter().skip(1).collect()
        };
        let from = self.nodes.len() - 1;
        self.nodes.extend(new_nodes);
        if self.c2 != 1.0 {
            let t = self.nodes.iter().map(|n| n.t).collect();
            let y = self.nodes.iter().map(|n| n.y.ln()).collect();
            let d = self.nodes.iter().map(|n| n.dy / n.y).collect();
            self.log_excess = Some(MonotoneCubic::new(t, y, d)?);
        }
        let tail = self.build_cumulative(from, self.cumulative[from]);
        self.cumulative.truncate(from);
        self.cumulative.extend(tail);
        Ok(())
    }

    pub fn s_max(&self) -> f64 {
        self.nodes.last().expect("profile has nodes").t.exp()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.log_excess.is_none()
    }

    /// Node `(s, w, w − 1)` triples.
    pub fn grid(&self) -> Vec<GridPoint> {
        self.nodes
            .iter()
            .map(|n| GridPoint {
                s: n.t.exp(),
                w: 1.0 + n.y,
                excess: n.y,
            })
            .collect()
    }

    /// Raw nodes in `t = ln s`: excess and its `t`-derivative.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// `w(s) − 1`, interpolated. `s` is clamped to the profile range.
    pub fn excess(&self, s: f64) -> f64 {
        match &self.log_excess {
            None => 0.0,
            Some(c) => c.eval(s.ln()).exp(),
        }
    }

    pub fn w(&self, s: f64) -> f64 {
        1.0 + self.excess(s)
    }

    /// `w'(s)` from the interpolant.
    pub fn w_prime_interp(&self, s: f64) -> f64 {
        match &self.log_excess {
            None => 0.0,
            Some(c) => {
                let (y, dy) = c.eval_with_slope(s.ln());
                y.exp() * dy / s
            }
        }
    }

    /// `∫_1^s (w − 1)`.
    pub fn excess_integral(&self, s: f64) -> f64 {
        let Some(c) = &self.log_excess else {
            return 0.0;
        };
        let t = s.ln().clamp(0.0, c.x_max());
        let i = c.interval(t);
        self.cumulative[i] + self.panel_integral(self.nodes[i].t, t)
    }

    /// `∂w/∂c2` at `s`: the linearized equation along this profile,
    /// `z(s) = exp(∫_0^{ln s} (g'(w) − a_1)/(2 a_n + δ) dt)`.
    pub fn dw_dc2(&self, ctx: &GContext, s: f64) -> Result<f64> {
        if !(s >= 1.0) || s > self.s_max() * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!("s = {s} outside profile range")));
        }
        if self.is_constant() {
            return Err(Error::Precondition("dw/dc2 needs c2 > 1".into()));
        }
        let denom = 2.0 * ctx.an() + self.delta;
        let (g1, g2) = ctx.g_derivatives_at_one();
        let failure = std::cell::Cell::new(None);
        let rate = |t: f64| {
            let v = self.excess(t.exp());
            let gp = if v < TAYLOR_BELOW {
                g1 + g2 * v
            } else {
                match ctx.g_prime(1.0 + v) {
                    Ok(x) => x,
                    Err(e) => {
                        failure.set(Some(e.to_string()));
                        g1
                    }
                }
            };
            (gp - ctx.a1()) / denom
        };
        let t_end = s.ln().min(self.nodes.last().unwrap().t);
        let mut total = 0.0;
        for pair in self.nodes.windows(2) {
            let (t0, t1) = (pair[0].t, pair[1].t.min(t_end));
            if t0 >= t_end {
                break;
            }
            total += quadrature::integrate(&rate, t0, t1, 1e-14, 1e-13);
        }
        if let Some(msg) = failure.take() {
            return Err(Error::RootNotConverged(msg));
        }
        Ok(total.exp())
    }
}

/// `u(s) = c1 + ∫_1^s w`, with the far-field constant `μ`.
#[derive(Debug, Clone)]
pub struct UProfile {
    pub base: WProfile,
    pub c1: f64,
    pub mu: MuEstimate,
    pub sbar: Option<f64>,
}

/// `μ = ∫_1^∞ (w − 1) − 1`, split into the tabulated part and the fitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuEstimate {
    pub value: f64,
    pub integral: f64,
    pub tail: f64,
    /// `C` in `w − 1 ≈ C s^{−α_δ}` over the last decade.
    pub tail_constant: f64,
    /// Upper end of the tabulated part.
    pub s_end: f64,
}

impl MuEstimate {
    /// `∫_1^∞ (w − 1)`.
    pub fn total_excess(&self) -> f64 {
        self.integral + self.tail
    }
}

fn tail_fit(p: &WProfile) -> (f64, f64) {
    let nodes = p.nodes();
    let t_end = nodes.last().unwrap().t;
    let window: Vec<&Node> = nodes
        .iter()
        .filter(|n| n.t >= t_end - std::f64::consts::LN_10 - 1e-12)
        .collect();
    let log_c = window.iter().map(|n| n.y.ln() + p.alpha * n.t).sum::<f64>() / window.len() as f64;
    let c = log_c.exp();
    let s_end = t_end.exp();
    (c, c * s_end.powf(1.0 - p.alpha) / (p.alpha - 1.0))
}

/// Estimates μ for a profile, extending a copy of it until the analytic
/// tail is below `1e-6` of the total excess integral.
pub fn mu_of_profile(ctx: &GContext, profile: &WProfile) -> Result<MuEstimate> {
    if !(profile.alpha > 1.0) {
        return Err(Error::Precondition(format!("alpha_delta = {} <= 1", profile.alpha)));
    }
    if profile.is_constant() {
        return Ok(MuEstimate {
            value: -1.0,
            integral: 0.0,
            tail: 0.0,
            tail_constant: 0.0,
            s_end: profile.s_max(),
        });
    }
    let mut p = profile.clone();
    loop {
        let s_end = p.s_max();
        let integral = *p.cumulative.last().unwrap();
        let (c, tail) = tail_fit(&p);
        let last_excess = p.nodes.last().unwrap().y;
        let done = tail <= 1e-6 * (integral + tail) || s_end >= S_CAP * 0.5 || last_excess < EXCESS_FLOOR * 1e20;
        if done {
            return Ok(MuEstimate {
                value: integral + tail - 1.0,
                integral,
                tail,
                tail_constant: c,
                s_end,
            });
        }
        // double t = ln s
        let next = (2.0 * s_end.ln()).min(S_CAP.ln()).exp();
        p.extend(ctx, next)?;
    }
}

pub fn mu(ctx: &GContext, c2: f64, delta: f64, s_max: f64) -> Result<f64> {
    let p = integrate_w(ctx, c2, delta, s_max, 1e-10)?;
    Ok(mu_of_profile(ctx, &p)?.value)
}

/// Builds `u` from a profile.
pub fn build_u(ctx: &GContext, profile: WProfile, c1: f64) -> Result<UProfile> {
    let mu = mu_of_profile(ctx, &profile)?;
    Ok(UProfile {
        base: profile,
        c1,
        mu,
        sbar: None,
    })
}

impl UProfile {
    pub fn alpha(&self) -> f64 {
        self.base.alpha
    }

    /// `u(s) = c1 + (s − 1) + ∫_1^s (w − 1)`.
    pub fn u(&self, s: f64) -> f64 {
        self.c1 + (s - 1.0) + self.base.excess_integral(s)
    }

    /// `∫_s^∞ (w − 1)`, so that `u(s) = s + c1 + μ − tail(s)`.
    pub fn tail(&self, s: f64) -> f64 {
        if s > self.base.s_max() {
            let a = self.alpha();
            return self.mu.tail_constant * s.powf(1.0 - a) / (a - 1.0);
        }
        self.mu.total_excess() - self.base.excess_integral(s)
    }

    /// The far-field constant `c1 + μ` of `u(s) ≈ s + c1 + μ`.
    pub fn far_constant(&self) -> f64 {
        self.c1 + self.mu.value
    }

    /// `(s, w, u)` at the profile nodes.
    pub fn table(&self) -> Vec<(f64, f64, f64)> {
        self.base
            .grid()
            .into_iter()
            .map(|g| (g.s, g.w, self.u(g.s)))
            .collect()
    }
}

/// Least-squares decay exponent of `w − 1` over the last two decades.
pub fn decay_exponent_fit(profile: &WProfile) -> Result<f64> {
    if profile.is_constant() {
        return Err(Error::DecayFit("profile is constant (c2 = 1)".into()));
    }
    let nodes = profile.nodes();
    let t_end = nodes.last().unwrap().t;
    if t_end < 5.0 * std::f64::consts::LN_10 - 1e-9 {
        return Err(Error::DecayFit(format!(
            "profile ends at s = {:e}, needs at least 1e5",
            t_end.exp()
        )));
    }
    let window: Vec<&Node> = nodes
        .iter()
        .filter(|n| n.t >= t_end - 2.0 * std::f64::consts::LN_10 - 1e-12)
        .collect();
    if window.iter().any(|n| n.y < EXCESS_FLOOR) {
        return Err(Error::DecayFit("excess underflows on the fit window".into()));
    }
    let m = window.len() as f64;
    let mx = window.iter().map(|n| n.t).sum::<f64>() / m;
    let my = window.iter().map(|n| n.y.ln()).sum::<f64>() / m;
    let sxy: f64 = window.iter().map(|n| (n.t - mx) * (n.y.ln() - my)).sum();
    let sxx: f64 = window.iter().map(|n| (n.t - mx).powi(2)).sum();
    Ok(-sxy / sxx)
}

/// `∂w/∂c2` at `s`, integrating a fresh profile up to `s`.
pub fn dw_dc2(ctx: &GContext, c2: f64, delta: f64, s: f64) -> Result<f64> {
    if !(c2 > 1.0) {
        return Err(Error::Precondition(format!("dw/dc2 needs c2 > 1, got {c2}")));
    }
    if s == 1.0 {
        return Ok(1.0);
    }
    let p = integrate_w(ctx, c2, delta, s, 1e-10)?;
    p.dw_dc2(ctx, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissibility::EXACT_LEVEL_TOL;

    fn monge_ampere() -> GContext {
        GContext::new(
            &OperatorSpec::SigmaK { n: 3, k: 3 },
            &CandidateMatrix::Diagonal(vec![1.0; 3]),
            EXACT_LEVEL_TOL,
        )
        .unwrap()
    }

    fn exact_w(s: f64) -> f64 {
        (1.0 + 7.0 * s.powf(-1.5)).cbrt()
    }

    #[test]
    fn g_closed_form_monge_ampere() {
        let ctx = monge_ampere();
        for w in [1.0, 1.5, 3.0, 20.0] {
            assert!((ctx.g(w).unwrap() - w.powi(-2)).abs() < 1e-14);
            assert!((ctx.g_prime(w).unwrap() + 2.0 * w.powi(-3)).abs() < 1e-13);
        }
        let (g1, g2) = ctx.g_derivatives_at_one();
        assert!((g1 + 2.0).abs() < 1e-13);
        assert!((g2 - 6.0).abs() < 1e-6);
    }

    #[test]
    fn radial_profile_matches_exact() {
        let ctx = monge_ampere();
        let p = integrate_w(&ctx, 2.0, 0.0, 1e6, 1e-10).unwrap();
        for g in p.grid() {
            assert!((g.w - exact_w(g.s)).abs() < 1e-9, "s={} w={}", g.s, g.w);
        }
        assert!((p.w(100.0) - exact_w(100.0)).abs() < 1e-9);
        let fit = decay_exponent_fit(&p).unwrap();
        assert!((fit - 1.5).abs() < 0.015);
    }

    #[test]
    fn constant_profile() {
        let ctx = monge_ampere();
        let p = integrate_w(&ctx, 1.0, 0.0, 1e3, 1e-10).unwrap();
        assert!(p.grid().iter().all(|g| g.w == 1.0));
        let u = build_u(&ctx, p, 0.0).unwrap();
        assert_eq!(u.mu.value, -1.0);
        assert!((u.u(37.0) - 36.0).abs() < 1e-12);
    }

    #[test]
    fn mu_radial_value() {
        let ctx = monge_ampere();
        let m = mu(&ctx, 2.0, 0.0, 1e6).unwrap();
        // ∫_1^∞ ((1 + 7 s^{-3/2})^{1/3} − 1) ds by an independent quadrature
        let f = |x: f64| {
            // s = 1/x², q = 7 s^{-3/2} = 7x³, ds = 2/x³ dx on (0, 1]
            // w − 1 = q / (w² + w + 1) avoids cancellation
            let q = 7.0 * x * x * x;
            let w = (1.0 + q).cbrt();
            q / (w * w + w + 1.0) * 2.0 / (x * x * x)
        };
        let oracle = quadrature::integrate(f, 0.0, 1.0, 1e-13, 1e-13);
        assert!((m + 1.0 - oracle).abs() < 1e-7, "{m} vs {oracle}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let ctx = monge_ampere();
        assert!(integrate_w(&ctx, 0.5, 0.0, 1e3, 1e-10).is_err());
        assert!(integrate_w(&ctx, 2.0, 1.0, 1e3, 1e-10).is_err());
        assert!(integrate_w(&ctx, 2.0, 0.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn variational_derivative_radial() {
        let ctx = monge_ampere();
        // w = (1 + (c³ − 1) s^{-3/2})^{1/3} ⇒ ∂w/∂c = c² s^{-3/2} / w²
        for s in [10.0, 1e3] {
            let z = dw_dc2(&ctx, 2.0, 0.0, s).unwrap();
            let w = exact_w(s);
            let expected = 4.0 * s.powf(-1.5) / (w * w);
            assert!((z - expected).abs() < 1e-8 * expected.max(1e-3), "s={s}: {z} vs {expected}");
        }
        assert_eq!(dw_dc2(&ctx, 2.0, 0.0, 1.0).unwrap(), 1.0);
    }
}
