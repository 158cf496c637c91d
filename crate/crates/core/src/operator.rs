//! The symmetric functions `f` acting on Hessian eigenvalues: `σ_k`, the
//! quotient `σ_k / σ_l`, and the normalized special Lagrangian operator
//! `(1/Θ) Σ arctan λ_i`, together with their gradients, their cones and the
//! diagonal normalization `a*` solving `f(a* (1, …, 1)) = 1`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::esym::{elementary_symmetric, sigma, sigma_without};
use crate::roots::solve_increasing;

/// Eigenvalues sorted in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<f64>", from = "Vec<f64>")]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    /// Sorts `values` ascending. NaNs sort last.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| a.total_cmp(b));
        Spectrum(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest eigenvalue.
    pub fn max(&self) -> f64 {
        *self.0.last().expect("empty spectrum")
    }

    /// Smallest eigenvalue.
    pub fn min(&self) -> f64 {
        self.0[0]
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for Spectrum {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Spectrum {
    fn from(v: Vec<f64>) -> Self {
        Spectrum::new(v)
    }
}

impl From<Spectrum> for Vec<f64> {
    fn from(s: Spectrum) -> Self {
        s.0
    }
}

/// Which Hessian-type operator is in play.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperator", into = "RawOperator")]
pub enum OperatorSpec {
    /// `σ_k`, the `k`-Hessian operator (`k = n` is Monge-Ampère).
    SigmaK { n: usize, k: usize },
    /// `σ_k / σ_l` with `l < k`.
    Quotient { n: usize, k: usize, l: usize },
    /// `(1/Θ) Σ arctan λ_i` with `(n-1)π/2 <= Θ < nπ/2`.
    Lagrangian { n: usize, theta: f64 },
}

impl OperatorSpec {
    pub fn sigma_k(n: usize, k: usize) -> Result<Self> {
        let op = OperatorSpec::SigmaK { n, k };
        op.validate()?;
        Ok(op)
    }

    /// The Monge-Ampère operator `det = σ_n`.
    pub fn monge_ampere(n: usize) -> Result<Self> {
        Self::sigma_k(n, n)
    }

    pub fn quotient(n: usize, k: usize, l: usize) -> Result<Self> {
        let op = OperatorSpec::Quotient { n, k, l };
        op.validate()?;
        Ok(op)
    }

    pub fn lagrangian(n: usize, theta: f64) -> Result<Self> {
        let op = OperatorSpec::Lagrangian { n, theta };
        op.validate()?;
        Ok(op)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidOperator(msg));
        let n = self.dim();
        if n < 3 {
            return bad(format!("dimension n = {n} must be at least 3"));
        }
        match *self {
            OperatorSpec::SigmaK { k, .. } if !(1..=n).contains(&k) => {
                bad(format!("sigma_k order k = {k} outside 1..={n}"))
            }
            OperatorSpec::Quotient { k, l, .. } if !(1 <= l && l < k && k <= n) => {
                bad(format!("quotient orders need 1 <= l < k <= n, got k = {k}, l = {l}"))
            }
            OperatorSpec::Lagrangian { theta, .. } => {
                let lo = (n as f64 - 1.0) * PI / 2.0;
                let hi = n as f64 * PI / 2.0;
                // Θ often arrives as a literal like 3.14159; allow rounding at the lower end.
                if !(theta >= lo - 1e-12 && theta < hi) {
                    bad(format!("phase Θ = {theta} outside [{lo}, {hi})"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            OperatorSpec::SigmaK { n, .. }
            | OperatorSpec::Quotient { n, .. }
            | OperatorSpec::Lagrangian { n, .. } => n,
        }
    }

    /// Order `K` of the cone `Γ_K = {σ_j > 0, 1 <= j <= K}` on which the
    /// operator is elliptic.
    pub fn cone_order(&self) -> usize {
        match *self {
            OperatorSpec::SigmaK { k, .. } | OperatorSpec::Quotient { k, .. } => k,
            OperatorSpec::Lagrangian { n, .. } => {
                if n % 2 == 1 {
                    n
                } else {
                    n - 1
                }
            }
        }
    }

    fn check_len(&self, lambda: &[f64]) -> Result<()> {
        if lambda.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: lambda.len(),
            });
        }
        Ok(())
    }

    /// `f(λ)`.
    pub fn eval(&self, lambda: &[f64]) -> Result<f64> {
        self.check_len(lambda)?;
        match *self {
            OperatorSpec::SigmaK { k, .. } => Ok(sigma(lambda, k)),
            OperatorSpec::Quotient { k, l, .. } => {
                let e = elementary_symmetric(lambda, k);
                if e[l] == 0.0 {
                    return Err(Error::DivisionDegenerate);
                }
                Ok(e[k] / e[l])
            }
            OperatorSpec::Lagrangian { theta, .. } => {
                Ok(lambda.iter().map(|x| x.atan()).sum::<f64>() / theta)
            }
        }
    }

    /// `∇f(λ)`.
    pub fn grad(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        self.check_len(lambda)?;
        let n = lambda.len();
        match *self {
            OperatorSpec::SigmaK { k, .. } => {
                Ok((0..n).map(|i| sigma_without(lambda, k - 1, i)).collect())
            }
            OperatorSpec::Quotient { k, l, .. } => {
                let e = elementary_symmetric(lambda, k);
                let (sk, sl) = (e[k], e[l]);
                if sl == 0.0 {
                    return Err(Error::DivisionDegenerate);
                }
                Ok((0..n)
                    .map(|i| {
                        let dk = sigma_without(lambda, k - 1, i);
                        let dl = sigma_without(lambda, l - 1, i);
                        (dk * sl - sk * dl) / (sl * sl)
                    })
                    .collect())
            }
            OperatorSpec::Lagrangian { theta, .. } => Ok(lambda
                .iter()
                .map(|x| 1.0 / (theta * (1.0 + x * x)))
                .collect()),
        }
    }

    /// Whether `λ` lies in the open cone `Γ_K`.
    pub fn in_cone(&self, lambda: &[f64]) -> bool {
        if lambda.len() != self.dim() {
            return false;
        }
        let e = elementary_symmetric(lambda, self.cone_order());
        e[1..].iter().all(|&s| s > 0.0)
    }

    /// Infimum of the first coordinate `x` for which `(x, rest)` lies in the
    /// cone. `None` unless every `σ_{j-1}(rest)` with `j <= K` is positive, in
    /// which case the cone slice is the half-line above the returned value.
    pub fn cone_lower_bound(&self, rest: &[f64]) -> Option<f64> {
        let order = self.cone_order();
        let e = elementary_symmetric(rest, order);
        let mut bound = f64::NEG_INFINITY;
        for j in 1..=order {
            if !(e[j - 1] > 0.0) {
                return None;
            }
            bound = bound.max(-e[j] / e[j - 1]);
        }
        Some(bound)
    }

    /// Solves `f(x, rest) = level` for the first coordinate `x` inside the
    /// cone. `f` is increasing in `x` on the cone slice, and tends below the
    /// level at the cone boundary.
    pub fn solve_first_coordinate(&self, rest: &[f64], level: f64, hint: f64) -> Result<f64> {
        if rest.len() + 1 != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim() - 1,
                got: rest.len(),
            });
        }
        let lower = self.cone_lower_bound(rest).ok_or_else(|| {
            Error::BracketNotFound(format!("cone slice undefined for {rest:?}"))
        })?;
        let mut point = Vec::with_capacity(self.dim());
        point.push(0.0);
        point.extend_from_slice(rest);
        let h = |x: f64| {
            let mut p = point.clone();
            p[0] = x;
            if !self.in_cone(&p) {
                return f64::NEG_INFINITY;
            }
            match self.eval(&p) {
                Ok(v) => v - level,
                Err(_) => f64::NEG_INFINITY,
            }
        };
        let mut hi = if hint > lower { hint } else { lower.abs() + 1.0 };
        let mut step = 1.0 + hi.abs();
        let mut tries = 0;
        while h(hi) < 0.0 {
            hi += step;
            step *= 2.0;
            tries += 1;
            if tries > 200 {
                return Err(Error::BracketNotFound(format!(
                    "f(x, {rest:?}) stays below {level}"
                )));
            }
        }
        solve_increasing(h, lower, hi, 0.0)
    }

    /// Closed-form `a*` where available.
    pub fn a_star_closed_form(&self) -> f64 {
        use crate::esym::binomial;
        match *self {
            OperatorSpec::SigmaK { n, k } => binomial(n, k).powf(-1.0 / k as f64),
            OperatorSpec::Quotient { n, k, l } => {
                (binomial(n, l) / binomial(n, k)).powf(1.0 / (k - l) as f64)
            }
            OperatorSpec::Lagrangian { n, theta } => (theta / n as f64).tan(),
        }
    }

    /// `a*` by bracketing bisection on `t ↦ f(t (1, …, 1)) - 1`, relative
    /// tolerance `1e-12`.
    pub fn a_star(&self) -> Result<f64> {
        const CAP: f64 = 1e12;
        let n = self.dim();
        let diag = |t: f64| self.eval(&vec![t; n]).map(|v| v - 1.0);
        let mut lo = 1e-8;
        let mut hi = match *self {
            OperatorSpec::Lagrangian { theta, .. } => 1f64.max(n as f64).max((theta / n as f64).tan() + 1.0),
            _ => 1f64.max(n as f64),
        };
        while diag(lo)? >= 0.0 {
            lo *= 0.5;
            if lo < 1e-300 {
                return Err(Error::BracketNotFound("f(t·1) >= 1 for all small t".into()));
            }
        }
        while diag(hi)? < 0.0 {
            hi *= 2.0;
            if hi > CAP {
                return Err(Error::BracketNotFound(format!(
                    "f(t·1) < 1 for all t up to {CAP:e}"
                )));
            }
        }
        while hi - lo > 1e-12 * hi {
            let mid = 0.5 * (lo + hi);
            if diag(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OperatorSpec::SigmaK { n, k } if k == n => write!(f, "det (n={n})"),
            OperatorSpec::SigmaK { n, k } => write!(f, "sigma_{k} (n={n})"),
            OperatorSpec::Quotient { n, k, l } => write!(f, "sigma_{k}/sigma_{l} (n={n})"),
            OperatorSpec::Lagrangian { n, theta } => write!(f, "lagrangian (n={n}, theta={theta})"),
        }
    }
}

// JSON form: {"type": "sigma_k" | "quotient" | "lagrangian", "n", "k"?, "l"?, "theta"?}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ThetaRepr {
    Number(f64),
    Literal(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawOperator {
    #[serde(rename = "type")]
    kind: String,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<ThetaRepr>,
}

fn parse_theta(t: &ThetaRepr) -> Result<f64> {
    match t {
        ThetaRepr::Number(x) => Ok(*x),
        ThetaRepr::Literal(s) => match s.trim() {
            "pi" | "π" => Ok(PI),
            other => Err(Error::InvalidOperator(format!(
                "theta must be a number or \"pi\", got {other:?}"
            ))),
        },
    }
}

impl TryFrom<RawOperator> for OperatorSpec {
    type Error = Error;

    fn try_from(raw: RawOperator) -> Result<Self> {
        let need = |v: Option<usize>, name: &str| {
            v.ok_or_else(|| Error::InvalidOperator(format!("missing field {name:?}")))
        };
        match raw.kind.as_str() {
            "sigma_k" => OperatorSpec::sigma_k(raw.n, need(raw.k, "k")?),
            "quotient" => OperatorSpec::quotient(raw.n, need(raw.k, "k")?, need(raw.l, "l")?),
            "lagrangian" => {
                let theta = raw
                    .theta
                    .as_ref()
                    .ok_or_else(|| Error::InvalidOperator("missing field \"theta\"".into()))?;
                OperatorSpec::lagrangian(raw.n, parse_theta(theta)?)
            }
            other => Err(Error::InvalidOperator(format!("unknown operator type {other:?}"))),
        }
    }
}

impl From<OperatorSpec> for RawOperator {
    fn from(op: OperatorSpec) -> Self {
        match op {
            OperatorSpec::SigmaK { n, k } => RawOperator {
                kind: "sigma_k".into(),
                n,
                k: Some(k),
                l: None,
                theta: None,
            },
            OperatorSpec::Quotient { n, k, l } => RawOperator {
                kind: "quotient".into(),
                n,
                k: Some(k),
                l: Some(l),
                theta: None,
            },
            OperatorSpec::Lagrangian { n, theta } => RawOperator {
                kind: "lagrangian".into(),
                n,
                k: None,
                l: None,
                theta: Some(ThetaRepr::Number(theta)),
            },
        }
    }
}
