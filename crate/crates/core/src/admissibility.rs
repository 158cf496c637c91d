//! Classification of positive definite matrices against the admissible set:
//! `f(a) = 1` and `∇f(a)·a / (2 â f̂(a)) > 1`, with `â = max a_i` and
//! `f̂ = max ∂f/∂λ_i`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::esym::{sigma, sigma_without};
use crate::operator::{OperatorSpec, Spectrum};
use crate::spectral::{eigen_sym, SymMatrix};

/// Level tolerance for matrices that sit on the level set to rounding.
pub const EXACT_LEVEL_TOL: f64 = 1e-9;
/// Level tolerance for matrices taken verbatim from printed formulas.
pub const PRINTED_LEVEL_TOL: f64 = 5e-3;

/// A candidate matrix, either by its diagonal or in full.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CandidateMatrix {
    Diagonal(Vec<f64>),
    Full(SymMatrix),
}

impl CandidateMatrix {
    pub fn dim(&self) -> usize {
        match self {
            CandidateMatrix::Diagonal(d) => d.len(),
            CandidateMatrix::Full(m) => m.dim(),
        }
    }

    pub fn spectrum(&self) -> Spectrum {
        match self {
            CandidateMatrix::Diagonal(d) => Spectrum::new(d.clone()),
            CandidateMatrix::Full(m) => eigen_sym(m),
        }
    }

    pub fn to_matrix(&self) -> SymMatrix {
        match self {
            CandidateMatrix::Diagonal(d) => SymMatrix::from_diag(d),
            CandidateMatrix::Full(m) => m.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub a: Spectrum,
    pub f_at_a: f64,
    pub grad_at_a: Vec<f64>,
    pub a_hat: f64,
    pub f_hat: f64,
    pub ratio: f64,
    pub delta_max: f64,
    pub level_residual: f64,
    pub level_tolerance: f64,
    /// 1-based index of the largest gradient component (smallest on ties).
    pub grad_argmax_index: usize,
    pub in_a: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl AdmissibilityReport {
    /// `∇f(a)·a`.
    pub fn grad_dot_a(&self) -> f64 {
        self.grad_at_a.iter().zip(self.a.iter()).map(|(g, a)| g * a).sum()
    }

    /// `α_δ = ∇f(a)·a / ((2â + δ) f̂)`.
    pub fn alpha(&self, delta: f64) -> f64 {
        self.grad_dot_a() / ((2.0 * self.a_hat + delta) * self.f_hat)
    }

    /// The decay power `2α_δ − 2` of `|u − Q|`.
    pub fn decay_power(&self, delta: f64) -> f64 {
        2.0 * self.alpha(delta) - 2.0
    }

    /// Whether the largest gradient component sits at the smallest eigenvalue.
    pub fn argmax_is_first(&self) -> bool {
        self.grad_argmax_index == 1
    }
}

/// Computes the admissibility report of `matrix` for `op`.
///
/// Matrices that are not positive definite yield `in_a = false` with a
/// reason; spectra outside the cone are an error.
pub fn analyze(
    op: &OperatorSpec,
    matrix: &CandidateMatrix,
    level_tolerance: f64,
) -> Result<AdmissibilityReport> {
    op.validate()?;
    if matrix.dim() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            got: matrix.dim(),
        });
    }
    let a = matrix.spectrum();
    if !op.in_cone(&a) {
        return Err(Error::OutsideCone(a.into_vec()));
    }
    let f_at_a = op.eval(&a)?;
    let grad = op.grad(&a)?;
    let (mut arg, mut f_hat) = (0, f64::NEG_INFINITY);
    for (i, &g) in grad.iter().enumerate() {
        if g > f_hat {
            arg = i;
            f_hat = g;
        }
    }
    let a_hat = a.max();
    let dot: f64 = grad.iter().zip(a.iter()).map(|(g, x)| g * x).sum();
    let ratio = dot / (2.0 * a_hat * f_hat);
    let delta_max = dot / f_hat - 2.0 * a_hat;
    let level_residual = (f_at_a - 1.0).abs();

    let reason = if a.min() <= 0.0 {
        Some(format!("not positive definite (smallest eigenvalue {:e})", a.min()))
    } else if !(level_residual <= level_tolerance) {
        Some(format!(
            "off the level set: |f(a) - 1| = {level_residual:e} > {level_tolerance:e}"
        ))
    } else if !(ratio > 1.0) {
        Some(format!("ratio {ratio} <= 1"))
    } else {
        None
    };
    Ok(AdmissibilityReport {
        a,
        f_at_a,
        grad_at_a: grad,
        a_hat,
        f_hat,
        ratio,
        delta_max,
        level_residual,
        level_tolerance,
        grad_argmax_index: arg + 1,
        in_a: reason.is_none(),
        reason,
    })
}

/// `k σ_k(a) / (2 â σ_{k−1;1}(a))` for ascending `a`.
pub fn sigma_k_ratio(k: usize, a: &[f64]) -> f64 {
    let n = a.len();
    k as f64 * sigma(a, k) / (2.0 * a[n - 1] * sigma_without(a, k - 1, 0))
}

/// `H(k, l) = max_i (σ_{k−1;i} − σ_{l−1;i})(a)`.
pub fn quotient_h(k: usize, l: usize, a: &[f64]) -> f64 {
    (0..a.len())
        .map(|i| sigma_without(a, k - 1, i) - sigma_without(a, l - 1, i))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `(k − l) σ_l(a) / (2 â H(k, l)(a))`; equals the gradient ratio on the
/// level set `σ_k = σ_l`.
pub fn quotient_ratio(k: usize, l: usize, a: &[f64]) -> f64 {
    let n = a.len();
    (k - l) as f64 * sigma(a, l) / (2.0 * a[n - 1] * quotient_h(k, l, a))
}

/// `((1 + a_1²) / (2 â)) Σ a_i / (1 + a_i²)` for ascending `a`.
pub fn lagrangian_ratio(a: &[f64]) -> f64 {
    let n = a.len();
    (1.0 + a[0] * a[0]) / (2.0 * a[n - 1]) * a.iter().map(|x| x / (1.0 + x * x)).sum::<f64>()
}

/// The four example families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    H,
    M,
    Q,
    L,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::H, Family::M, Family::Q, Family::L];

    /// The operator each family is built for.
    pub fn operator(self) -> OperatorSpec {
        match self {
            Family::H => OperatorSpec::SigmaK { n: 3, k: 2 },
            Family::M => OperatorSpec::SigmaK { n: 3, k: 3 },
            Family::Q => OperatorSpec::Quotient { n: 3, k: 3, l: 2 },
            Family::L => OperatorSpec::Lagrangian { n: 3, theta: PI },
        }
    }

    /// The `(ε, δ)` at which the family's decay power is tabulated.
    pub fn table_point(self) -> (f64, f64) {
        match self {
            Family::H => (0.0874, 0.1),
            Family::M => (0.1, 0.1),
            Family::Q => (0.1, 0.1),
            Family::L => (0.035, 0.001),
        }
    }

    /// Diagonal entries 2..n, which do not depend on the mode.
    fn tail(self, eps: f64) -> [f64; 2] {
        let r = (1.0f64 / 3.0).sqrt();
        match self {
            Family::H => [r, r + eps],
            Family::M => [1.0, 1.0 + eps],
            Family::Q => [3.0, 3.0 + eps],
            Family::L => [(PI / 3.0).tan(), (PI / 3.0 + eps).tan()],
        }
    }

    fn printed_first(self, eps: f64) -> f64 {
        match self {
            Family::H => (1.0f64 / 3.0).sqrt() - 2.0 * eps / (2.0 + 3f64.sqrt() * eps),
            Family::M => 1.0 - eps / (1.0 + eps),
            Family::Q => 3.0 - 2.0 * eps / (2.0 * eps + 3.0),
            Family::L => (PI / 3.0 - eps).tan(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::H => "H",
            Family::M => "M",
            Family::Q => "Q",
            Family::L => "L",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "H" => Ok(Family::H),
            "M" => Ok(Family::M),
            "Q" => Ok(Family::Q),
            "L" => Ok(Family::L),
            _ => Err(Error::Invalid(format!("unknown family {s:?}"))),
        }
    }
}

/// How the first diagonal entry of a family member is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// The printed formula, verbatim.
    Printed,
    /// Re-solved so that `f(a) = 1` to rounding.
    #[default]
    Exact,
}

impl Mode {
    pub fn level_tolerance(self) -> f64 {
        match self {
            Mode::Printed => PRINTED_LEVEL_TOL,
            Mode::Exact => EXACT_LEVEL_TOL,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Printed => "printed",
            Mode::Exact => "exact",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(Mode::Printed),
            "exact" => Ok(Mode::Exact),
            _ => Err(Error::Invalid(format!("unknown mode {s:?}"))),
        }
    }
}

/// Diagonal member of `family` at parameter `eps`.
pub fn example_family(family: Family, eps: f64, mode: Mode) -> Result<CandidateMatrix> {
    if !(eps >= 0.0) {
        return Err(Error::Invalid(format!("family parameter must be >= 0, got {eps}")));
    }
    let tail = family.tail(eps);
    if tail.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::Invalid(format!("{family} at eps = {eps} leaves the positive cone")));
    }
    let first = match mode {
        Mode::Printed => family.printed_first(eps),
        Mode::Exact => family
            .operator()
            .solve_first_coordinate(&tail, 1.0, family.printed_first(eps).max(tail[0]))?,
    };
    if !(first > 0.0) {
        return Err(Error::Invalid(format!(
            "{family} at eps = {eps} has non-positive first entry {first}"
        )));
    }
    Ok(CandidateMatrix::Diagonal(vec![first, tail[0], tail[1]]))
}

/// Whether the family member at `eps` is admissible at `δ = 0`. The level
/// condition is only imposed in exact mode; printed members are judged on
/// positivity and the ratio alone.
pub fn family_member_admissible(family: Family, eps: f64, mode: Mode) -> bool {
    let Ok(m) = example_family(family, eps, mode) else {
        return false;
    };
    let tol = match mode {
        Mode::Exact => EXACT_LEVEL_TOL,
        Mode::Printed => f64::INFINITY,
    };
    analyze(&family.operator(), &m, tol).map(|r| r.in_a).unwrap_or(false)
}

/// Supremum of the `ε` range `[0, ε*)` on which `pred` holds, found by a
/// coarse scan followed by bisection to `1e-8`.
pub fn threshold_of<P: Fn(f64) -> bool>(pred: P, cap: f64) -> Result<f64> {
    if !pred(0.0) {
        return Err(Error::Invalid("predicate fails at eps = 0".into()));
    }
    const STEP: f64 = 0.01;
    let mut lo = 0.0;
    loop {
        let hi = lo + STEP;
        if hi > cap {
            return Err(Error::NoThreshold);
        }
        if !pred(hi) {
            return Ok(crate::roots::bisect_predicate(&pred, lo, hi, 1e-10));
        }
        lo = hi;
    }
}

/// Threshold `ε*` such that the family is admissible on `[0, ε*)`.
pub fn threshold_epsilon(family: Family, mode: Mode) -> Result<f64> {
    threshold_of(|e| family_member_admissible(family, e, mode), 4.0)
}

/// Threshold for the quotient family judged by the printed closed-form
/// ratio `(k − l) σ_l / (2 â H(k, l))` instead of the gradient ratio.
pub fn quotient_closed_form_threshold(mode: Mode) -> Result<f64> {
    threshold_of(
        |e| match example_family(Family::Q, e, mode) {
            Ok(m) => quotient_ratio(3, 2, &m.spectrum()) > 1.0,
            Err(_) => false,
        },
        4.0,
    )
}
