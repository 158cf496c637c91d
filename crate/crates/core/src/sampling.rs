//! Deterministic low-discrepancy points on ellipsoids `½ xᵀ diag(a) x = s`.

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `i` in base `b`.
pub fn halton(mut i: u64, b: u32) -> f64 {
    let b = b as u64;
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// `m` unit directions in `ℝⁿ`: Halton points pushed through Box–Muller and
/// normalized. Deterministic in `(n, m)`.
pub fn directions(n: usize, m: usize) -> Vec<Vec<f64>> {
    assert!(n <= 2 * PRIMES.len(), "dimension {n} exceeds the Halton base table");
    let pairs = n.div_ceil(2);
    let mut out = Vec::with_capacity(m);
    let mut i = 1u64;
    while out.len() < m {
        let mut g = Vec::with_capacity(2 * pairs);
        for p in 0..pairs {
            let u1 = halton(i, PRIMES[2 * p]).max(1e-300);
            let u2 = halton(i, PRIMES[2 * p + 1]);
            let r = (-2.0 * u1.ln()).sqrt();
            let phi = std::f64::consts::TAU * u2;
            g.push(r * phi.cos());
            g.push(r * phi.sin());
        }
        g.truncate(n);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        i += 1;
        if norm > 1e-12 {
            out.push(g.into_iter().map(|v| v / norm).collect());
        }
    }
    out
}

/// Scales direction `d` onto the level set `½ Σ a_i x_i² = s`.
pub fn onto_level_set(a: &[f64], d: &[f64], s: f64) -> Vec<f64> {
    let q: f64 = a.iter().zip(d).map(|(ai, di)| ai * di * di).sum();
    let scale = (2.0 * s / q).sqrt();
    d.iter().map(|v| v * scale).collect()
}

/// The `n` positive axis points followed by `m` low-discrepancy points, all
/// on the level set `½ Σ a_i x_i² = s`.
pub fn sample_level_set(a: &[f64], s: f64, m: usize) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut pts = Vec::with_capacity(n + m);
    for i in 0..n {
        let mut x = vec![0.0; n];
        x[i] = (2.0 * s / a[i]).sqrt();
        pts.push(x);
    }
    for d in directions(n, m) {
        pts.push(onto_level_set(a, &d, s));
    }
    pts
}

/// `½ Σ a_i x_i²`.
pub fn level(a: &[f64], x: &[f64]) -> f64 {
    0.5 * a.iter().zip(x).map(|(ai, xi)| ai * xi * xi).sum::<f64>()
}
