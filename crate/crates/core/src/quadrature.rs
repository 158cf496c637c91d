//! Adaptive Gauss–Legendre quadrature.

// Nodes and weights on [-1, 1].
const GL4_X: [f64; 2] = [0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GL4_W: [f64; 2] = [0.652_145_154_862_546_1, 0.347_854_845_137_453_9];
const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, x: &[f64], w: &[f64]) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        s += wi * (f(mid - half * xi) + f(mid + half * xi));
    }
    s * half
}

/// `∫_a^b f` by comparing the 4- and 8-point Gauss–Legendre rules and
/// bisecting wherever they disagree by more than `abs_tol + rel_tol·|I|`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    recurse(&f, a, b, abs_tol, rel_tol, 0)
}

fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, depth: u32) -> f64 {
    let coarse = rule(f, a, b, &GL4_X, &GL4_W);
    let fine = rule(f, a, b, &GL8_X, &GL8_W);
    if (fine - coarse).abs() <= abs_tol.max(rel_tol * fine.abs()) || depth >= 20 {
        return fine;
    }
    let mid = 0.5 * (a + b);
    recurse(f, a, mid, 0.5 * abs_tol, rel_tol, depth + 1) + recurse(f, mid, b, 0.5 * abs_tol, rel_tol, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x.powi(7) - 3.0 * x * x, 0.0, 2.0, 1e-14, 0.0);
        assert!((v - (32.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn sharp_integrand() {
        let v = integrate(|x| 1.0 / (1e-3 + x * x), -1.0, 1.0, 1e-12, 1e-14);
        let exact = 2.0 * (1.0 / 1e-3f64.sqrt()) * (1.0 / 1e-3f64.sqrt()).atan();
        assert!((v - exact).abs() < 1e-9 * exact);
    }
}
