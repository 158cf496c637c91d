//! Scalar Dormand–Prince 5(4) integrator with forced stops.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// 5th-order weights (also row 7 of the tableau, FSAL)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// difference between the 5th- and 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-10,
            abs: 1e-300,
            h_init: 1e-3,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

/// An accepted node: time, state and derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub t: f64,
    pub y: f64,
    pub dy: f64,
}

/// One Dormand–Prince step from `(t, y)` with derivative `k1`. Returns the
/// 5th-order solution, its derivative, and the embedded error estimate.
fn step<F>(f: &F, t: f64, y: f64, k1: f64, h: f64) -> Result<(f64, f64, f64)>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let k2 = f(t + C2 * h, y + h * A21 * k1)?;
    let k3 = f(t + C3 * h, y + h * (A31 * k1 + A32 * k2))?;
    let k4 = f(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3))?;
    let k5 = f(t + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))?;
    let k6 = f(
        t + h,
        y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
    )?;
    let y1 = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    let k7 = f(t + h, y1)?;
    let err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    Ok((y1, k7, err))
}

/// Integrates `y' = f(t, y)` from `start` up to `t_end`, landing exactly on
/// every time in `stops` that lies inside the interval. `project` is applied
/// to each accepted state and may reject it with an error.
///
/// Returns the accepted nodes, starting with `start`.
pub fn integrate<F, P>(
    f: F,
    start: Node,
    t_end: f64,
    stops: &[f64],
    tol: Tolerance,
    project: P,
) -> Result<Vec<Node>>
where
    F: Fn(f64, f64) -> Result<f64>,
    P: Fn(f64) -> Result<f64>,
{
    let mut nodes = vec![start];
    let mut t = start.t;
    let mut y = start.y;
    let mut k1 = start.dy;
    let mut h = tol.h_init.min(tol.h_max);
    let t0 = start.t;
    let mut stop_iter = stops.iter().copied().filter(|&s| s > t0 && s < t_end).peekable();
    let mut steps = 0usize;
    let span = (t_end - t).abs().max(1.0);

    while t < t_end {
        steps += 1;
        if steps > tol.max_steps {
            return Err(Error::Integration(format!("step budget exhausted at t = {t}")));
        }
        let target = stop_iter.peek().copied().unwrap_or(t_end);
        let landing = t + h >= target;
        let h_try = if landing { target - t } else { h };
        if h_try <= 1e-14 * span {
            return Err(Error::Integration(format!("step size underflow at t = {t}")));
        }
        let (y1, k7, err) = step(&f, t, y, k1, h_try)?;
        let scale = tol.abs + tol.rel * y.abs().max(y1.abs());
        let ratio = err.abs() / scale;
        if !ratio.is_finite() {
            h = 0.25 * h_try;
            continue;
        }
        if ratio <= 1.0 {
            t = if landing { target } else { t + h_try };
            y = project(y1)?;
            k1 = if y == y1 { k7 } else { f(t, y)? };
            nodes.push(Node { t, y, dy: k1 });
            if landing && stop_iter.peek().is_some() {
                stop_iter.next();
            }
            let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            // a landing step may be artificially short; don't let it shrink h
            let next = h_try * grow;
            h = if landing { next.max(h) } else { next }.min(tol.h_max);
        } else {
            h = h_try * (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let f = |_t: f64, y: f64| Ok(-2.0 * y);
        let tol = Tolerance {
            rel: 1e-12,
            ..Tolerance::default()
        };
        let nodes = integrate(f, Node { t: 0.0, y: 1.0, dy: -2.0 }, 5.0, &[], tol, Ok).unwrap();
        for n in &nodes {
            let exact = (-2.0 * n.t).exp();
            assert!((n.y - exact).abs() <= 1e-10 * exact, "t={} y={} exact={}", n.t, n.y, exact);
        }
        assert_eq!(nodes.last().unwrap().t, 5.0);
    }

    #[test]
    fn lands_on_stops() {
        let f = |t: f64, _y: f64| Ok(t.cos());
        let stops = [0.5, 1.0, 1.5];
        let nodes = integrate(f, Node { t: 0.0, y: 0.0, dy: 1.0 }, 2.0, &stops, Tolerance::default(), Ok)
            .unwrap();
        for s in stops {
            let n = nodes.iter().find(|n| n.t == s).expect("stop missing");
            assert!((n.y - s.sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn projection_error_propagates() {
        let f = |_t: f64, _y: f64| Ok(-1.0);
        let project = |y: f64| {
            if y < 0.0 {
                Err(Error::Integration("negative".into()))
            } else {
                Ok(y)
            }
        };
        let r = integrate(f, Node { t: 0.0, y: 0.5, dy: -1.0 }, 2.0, &[], Tolerance::default(), project);
        assert!(r.is_err());
    }
}
