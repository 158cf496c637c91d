//! Affine change of frame `x = R y + x₀` that turns `½xᵀAx + b·x + c` into
//! `½yᵀΛy + c′` with `Λ` diagonal and ascending.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perron::{BoundaryData, DomainSpec};
use crate::spectral::{eigen_sym_vectors, SymMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    /// Ascending eigenvalues of `A`.
    pub lambda: Vec<f64>,
    /// Orthonormal eigenvectors of `A`, stored as columns of `R`.
    pub rotation: Vec<Vec<f64>>,
    /// `x₀ = −A⁻¹ b`.
    pub shift: Vec<f64>,
    /// `−½ bᵀA⁻¹b`, added to the constant term.
    pub constant_shift: f64,
}

/// Diagonalizes `A` and absorbs `b` into a translation.
pub fn reduce_frame(a: &SymMatrix, b: &[f64]) -> Result<Frame> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let (lambda, rotation) = eigen_sym_vectors(a);
    if lambda.min() <= 0.0 {
        return Err(Error::NotPositiveDefinite(lambda.min()));
    }
    let shift: Vec<f64> = a.solve_spd(b)?.into_iter().map(|v| -v).collect();
    let constant_shift = 0.5 * b.iter().zip(&shift).map(|(bi, xi)| bi * xi).sum::<f64>();
    Ok(Frame {
        lambda: lambda.into_vec(),
        rotation,
        shift,
        constant_shift,
    })
}

impl Frame {
    pub fn identity(n: usize) -> Self {
        Frame {
            lambda: vec![1.0; n],
            rotation: (0..n)
                .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
            shift: vec![0.0; n],
            constant_shift: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    /// Whether the map is the identity to within `tol`.
    pub fn is_identity(&self, tol: f64) -> bool {
        self.shift.iter().all(|v| v.abs() <= tol)
            && self.rotation.iter().enumerate().all(|(j, col)| {
                col.iter()
                    .enumerate()
                    .all(|(i, v)| (v - if i == j { 1.0 } else { 0.0 }).abs() <= tol)
            })
    }

    /// `y = Rᵀ (x − x₀)`.
    pub fn to_reduced(&self, x: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = x.iter().zip(&self.shift).map(|(a, b)| a - b).collect();
        self.rotation
            .iter()
            .map(|col| col.iter().zip(&d).map(|(c, v)| c * v).sum())
            .collect()
    }

    /// `x = R y + x₀`.
    pub fn to_original(&self, y: &[f64]) -> Vec<f64> {
        let mut x = self.shift.clone();
        for (col, yj) in self.rotation.iter().zip(y) {
            for (xi, c) in x.iter_mut().zip(col) {
                *xi += c * yj;
            }
        }
        x
    }

    /// `c′ = c − ½ bᵀA⁻¹b`.
    pub fn reduced_constant(&self, c: f64) -> f64 {
        c + self.constant_shift
    }

    pub fn original_constant(&self, c_reduced: f64) -> f64 {
        c_reduced - self.constant_shift
    }

    /// The domain in reduced coordinates.
    pub fn reduce_domain(&self, dom: &DomainSpec) -> DomainSpec {
        let center = self.to_reduced(&dom.center());
        DomainSpec {
            b: dom.b.congruence(&self.rotation),
            r: dom.r,
            center: if center.iter().all(|v| *v == 0.0) { None } else { Some(center) },
        }
    }

    /// Boundary data `ϕ(R y + x₀)` as a quadratic in `y`.
    pub fn reduce_boundary(&self, phi: &BoundaryData) -> BoundaryData {
        let x0 = &self.shift;
        let g = phi.grad(x0);
        BoundaryData {
            c0: phi.eval(x0),
            b: self
                .rotation
                .iter()
                .map(|col| col.iter().zip(&g).map(|(c, v)| c * v).sum())
                .collect(),
            q: phi.q.congruence(&self.rotation),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translation_only() {
        let f = reduce_frame(&SymMatrix::identity(3), &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.shift, vec![-1.0, 0.0, 0.0]);
        assert!((f.reduced_constant(2.0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn diagonal_is_identity() {
        let f = reduce_frame(&SymMatrix::from_diag(&[1.0, 2.0, 3.0]), &[0.0; 3]).unwrap();
        assert!(f.is_identity(0.0));
    }

    #[test]
    fn boundary_data_follows_points() {
        let a = SymMatrix::from_rows(&[
            vec![2.0, 0.3, 0.1],
            vec![0.3, 1.5, -0.2],
            vec![0.1, -0.2, 1.0],
        ])
        .unwrap();
        let f = reduce_frame(&a, &[0.4, -0.1, 0.7]).unwrap();
        let phi = BoundaryData {
            c0: 0.2,
            b: vec![1.0, 2.0, -1.0],
            q: SymMatrix::from_rows(&[vec![1.0, 0.5, 0.0], vec![0.5, -1.0, 0.2], vec![0.0, 0.2, 0.3]]).unwrap(),
        };
        let red = f.reduce_boundary(&phi);
        let y = [0.3, -0.8, 1.1];
        assert!((red.eval(&y) - phi.eval(&f.to_original(&y))).abs() < 1e-12);
        let back = f.to_reduced(&f.to_original(&y));
        assert!(back.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}
