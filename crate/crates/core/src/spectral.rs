//! Small dense symmetric eigenproblems, the Hessian of generalized-symmetric
//! functions, and the eigenvalue bounds that control it.
//!
//! For `u(x) = u(s)` with `s = ½ xᵀ diag(a) x` the Hessian is
//!
//! ```text
//! (D²u)_ij = a_i δ_ij u'(s) + a_i a_j x_i x_j u''(s)
//! ```
//!
//! a diagonal matrix plus a rank-one term whose only nonzero eigenvalue is
//! `U u''` with `U = Σ a_j² x_j²`. When `u' > 0` and `u'' <= 0`, Weyl's
//! inequalities pin every eigenvalue inside `[a_i u' + U u'', a_i u']`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::Spectrum;

/// Dense symmetric matrix stored in full row-major form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

const SYMMETRY_TOL: f64 = 1e-10;

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.data[i * d.len() + i] = v;
        }
        m
    }

    /// Builds from rows, rejecting matrices whose asymmetry exceeds
    /// `1e-10 · max(1, max|m_ij|)`. The stored matrix is the symmetric part.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        let scale = rows
            .iter()
            .flatten()
            .fold(1.0f64, |acc, v| acc.max(v.abs()));
        let mut asym = 0.0f64;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                asym = asym.max((rows[i][j] - rows[j][i]).abs());
                m.data[i * n + j] = 0.5 * (rows[i][j] + rows[j][i]);
            }
        }
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets entries `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).abs() <= tol))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(SymMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `xᵀ M x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `Qᵀ M Q` for an `n × n` matrix `Q` given by its columns.
    pub fn congruence(&self, columns: &[Vec<f64>]) -> SymMatrix {
        let n = self.n;
        let mq: Vec<Vec<f64>> = columns.iter().map(|c| self.mul_vec(c)).collect();
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = columns[i].iter().zip(&mq[j]).map(|(a, b)| a * b).sum();
                out.set(i, j, v);
            }
        }
        out
    }

    /// Solves `M x = b` by Cholesky factorization; `M` must be positive definite.
    pub fn solve_spd(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self.get(i, j);
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(Error::NotPositiveDefinite(sum));
                    }
                    l[i * n + i] = sum.sqrt();
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        let mut y = vec![0.0; n];
        for i in 0..n {
            let s: f64 = (0..i).map(|k| l[i * n + k] * y[k]).sum();
            y[i] = (b[i] - s) / l[i * n + i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| l[k * n + i] * x[k]).sum();
            x[i] = (y[i] - s) / l[i * n + i];
        }
        Ok(x)
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SymMatrix::from_rows(&rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.rows()
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi sweeps. Returns the diagonalized matrix data and, when
/// requested, the accumulated rotation (columns are eigenvectors).
fn jacobi(m: &SymMatrix, want_vectors: bool) -> (Vec<f64>, Option<Vec<f64>>) {
    const MAX_SWEEPS: usize = 64;
    let n = m.n;
    let mut a = m.data.clone();
    let mut v = want_vectors.then(|| SymMatrix::identity(n).data);
    let scale = m.frobenius_norm();
    if scale == 0.0 {
        return (a, v);
    }
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a, n);
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    (a, v)
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn eigen_sym(m: &SymMatrix) -> Spectrum {
    let (a, _) = jacobi(m, false);
    Spectrum::new((0..m.n).map(|i| a[i * m.n + i]).collect())
}

/// Eigenvalues from raw rows, checking symmetry first.
pub fn eigen_sym_rows(rows: &[Vec<f64>]) -> Result<Spectrum> {
    Ok(eigen_sym(&SymMatrix::from_rows(rows)?))
}

/// Ascending eigenvalues with matching unit eigenvectors (returned as columns).
pub fn eigen_sym_vectors(m: &SymMatrix) -> (Spectrum, Vec<Vec<f64>>) {
    let n = m.n;
    let (a, v) = jacobi(m, true);
    let v = v.expect("vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&j| (0..n).map(|k| v[k * n + j]).collect())
        .collect();
    (Spectrum::new(values), vectors)
}

/// A point at which a G-Sym function is examined: `x`, the diagonal of `A`,
/// and the first two derivatives `w = u'(s)`, `wp = u''(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GSymPoint {
    pub a: Vec<f64>,
    pub x: Vec<f64>,
    /// `½ Σ a_i x_i²`.
    pub s: f64,
    pub w: f64,
    pub wp: f64,
    /// `Σ a_i² x_i²`.
    pub u_sq: f64,
}

impl GSymPoint {
    pub fn new(a: &[f64], x: &[f64], w: f64, wp: f64) -> Result<Self> {
        if a.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                got: x.len(),
            });
        }
        let s = 0.5 * a.iter().zip(x).map(|(ai, xi)| ai * xi * xi).sum::<f64>();
        let u_sq = a.iter().zip(x).map(|(ai, xi)| (ai * xi).powi(2)).sum();
        Ok(GSymPoint {
            a: a.to_vec(),
            x: x.to_vec(),
            s,
            w,
            wp,
            u_sq,
        })
    }
}

/// `a_i δ_ij w + a_i a_j x_i x_j wp`.
pub fn gsym_hessian(p: &GSymPoint) -> SymMatrix {
    let n = p.a.len();
    let mut m = SymMatrix::zeros(n);
    let ax: Vec<f64> = p.a.iter().zip(&p.x).map(|(a, x)| a * x).collect();
    for i in 0..n {
        for j in i..n {
            let mut v = ax[i] * ax[j] * p.wp;
            if i == j {
                v += p.a[i] * p.w;
            }
            m.set(i, j, v);
        }
    }
    m
}

/// Lower and upper eigenvalue bounds `(a_i w + U wp, a_i w)`, listed in the
/// order of `a` (ascending when `a` is).
pub fn eigen_bounds(p: &GSymPoint) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(p.w > 0.0) || p.wp > 0.0 {
        return Err(Error::Precondition(format!(
            "eigenvalue bounds need w > 0 and wp <= 0 (w = {}, wp = {})",
            p.w, p.wp
        )));
    }
    let upper: Vec<f64> = p.a.iter().map(|a| a * p.w).collect();
    let lower = upper.iter().map(|u| u + p.u_sq * p.wp).collect();
    Ok((lower, upper))
}

/// Slack of one Weyl inequality (`rhs - lhs`, nonnegative when it holds).
/// Indices are 1-based as in the usual statement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylSlack {
    pub i: usize,
    pub j: usize,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylReport {
    /// `λ_{i+j}(A) + λ_{n-j}(B) - λ_i(A+B)`, `j = 0..=n-i`.
    pub upper: Vec<WeylSlack>,
    /// `λ_i(A+B) - λ_{i-j+1}(A) - λ_j(B)`, `j = 1..=i`.
    pub lower: Vec<WeylSlack>,
}

impl WeylReport {
    pub fn min_slack(&self) -> f64 {
        self.upper
            .iter()
            .chain(&self.lower)
            .map(|s| s.slack)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates every instance of Weyl's two-sided eigenvalue inequalities for `A + B`.
pub fn weyl_bounds(a: &SymMatrix, b: &SymMatrix) -> Result<WeylReport> {
    let sum = a.add(b)?;
    let (la, lb, ls) = (eigen_sym(a), eigen_sym(b), eigen_sym(&sum));
    let n = a.dim();
    // 1-based accessor
    let at = |v: &Spectrum, k: usize| v[k - 1];
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for i in 1..=n {
        for j in 0..=n - i {
            upper.push(WeylSlack {
                i,
                j,
                slack: at(&la, i + j) + at(&lb, n - j) - at(&ls, i),
            });
        }
        for j in 1..=i {
            lower.push(WeylSlack {
                i,
                j,
                slack: at(&ls, i) - at(&la, i - j + 1) - at(&lb, j),
            });
        }
    }
    Ok(WeylReport { upper, lower })
}
