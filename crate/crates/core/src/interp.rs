//! Monotone piecewise-cubic Hermite interpolation.

use crate::error::{Error, Result};

/// Cubic Hermite interpolant through `(x_i, y_i)` with slopes `d_i`, adjusted
/// by the Fritsch–Carlson limiter so the curve stays monotone wherever the
/// data are.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    /// `x` must be strictly increasing. `slopes` are the exact derivatives
    /// at the nodes when known; they are limited where they would break
    /// monotonicity of an interval.
    pub fn new(x: Vec<f64>, y: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if y.len() != n || slopes.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: y.len().min(slopes.len()),
            });
        }
        if n < 2 {
            return Err(Error::Invalid("interpolation needs at least two nodes".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid("interpolation nodes must increase strictly".into()));
        }
        let mut d = slopes;
        for i in 0..n - 1 {
            let delta = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
            if delta == 0.0 {
                d[i] = 0.0;
                d[i + 1] = 0.0;
                continue;
            }
            if d[i].signum() != delta.signum() {
                d[i] = 0.0;
            }
            if d[i + 1].signum() != delta.signum() {
                d[i + 1] = 0.0;
            }
            let a = d[i] / delta;
            let b = d[i + 1] / delta;
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                d[i] = tau * a * delta;
                d[i + 1] = tau * b * delta;
            }
        }
        Ok(MonotoneCubic { x, y, d })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    /// Index `i` of the interval `[x_i, x_{i+1}]` containing `t` (clamped).
    pub fn interval(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// Value and derivative at `t`; `t` outside the node range is clamped.
    pub fn eval_with_slope(&self, t: f64) -> (f64, f64) {
        let t = t.clamp(self.x_min(), self.x_max());
        let i = self.interval(t);
        let h = self.x[i + 1] - self.x[i];
        let u = (t - self.x[i]) / h;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i] * h, self.d[i + 1] * h);
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let value = h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1;
        let dh00 = 6.0 * u2 - 6.0 * u;
        let dh10 = 3.0 * u2 - 4.0 * u + 1.0;
        let dh01 = -6.0 * u2 + 6.0 * u;
        let dh11 = 3.0 * u2 - 2.0 * u;
        let slope = (dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1) / h;
        (value, slope)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_with_slope(t).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_with_exact_slopes() {
        let f = |x: f64| x * x * x - 2.0 * x;
        let df = |x: f64| 3.0 * x * x - 2.0;
        let x: Vec<f64> = (0..6).map(|i| 1.0 + i as f64 * 0.7).collect();
        let y = x.iter().map(|&v| f(v)).collect();
        let d = x.iter().map(|&v| df(v)).collect();
        let c = MonotoneCubic::new(x, y, d).unwrap();
        for k in 0..50 {
            let t = 1.0 + k as f64 * 0.07;
            assert!((c.eval(t) - f(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn step_data_stays_monotone() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y = vec![0.0, 0.0, 1.0, 1.0, 1.0];
        let c = MonotoneCubic::new(x, y, vec![0.0, 3.0, 3.0, 0.0, 0.0]).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=400 {
            let v = c.eval(k as f64 * 0.01);
            assert!(v >= prev - 1e-15 && (-1e-15..=1.0 + 1e-15).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn rejects_bad_nodes() {
        assert!(MonotoneCubic::new(vec![0.0, 0.0], vec![1.0, 2.0], vec![0.0, 0.0]).is_err());
        assert!(MonotoneCubic::new(vec![0.0], vec![1.0], vec![0.0]).is_err());
    }
}
