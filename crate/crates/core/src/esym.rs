//! Elementary symmetric polynomials.
//!
//! All evaluations run the one-variable-at-a-time recurrence
//! `e_j <- e_j + x * e_{j-1}` (descending `j`), which costs `O(n k)` and
//! never enumerates subsets.

/// Returns `[σ_0(x), σ_1(x), …, σ_k(x)]`.
pub fn elementary_symmetric(x: &[f64], k: usize) -> Vec<f64> {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for (count, &xi) in x.iter().enumerate() {
        let top = k.min(count + 1);
        for j in (1..=top).rev() {
            e[j] += xi * e[j - 1];
        }
    }
    e
}

/// `σ_k(x)`; zero when `k > x.len()`.
pub fn sigma(x: &[f64], k: usize) -> f64 {
    elementary_symmetric(x, k)[k]
}

/// `σ_{k;i}(x)`, the degree-`k` polynomial of `x` with coordinate `i` removed
/// (equivalently, set to zero).
pub fn sigma_without(x: &[f64], k: usize, i: usize) -> f64 {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    let mut count = 0;
    for (idx, &xi) in x.iter().enumerate() {
        if idx == i {
            continue;
        }
        let top = k.min(count + 1);
        for j in (1..=top).rev() {
            e[j] += xi * e[j - 1];
        }
        count += 1;
    }
    e[k]
}

/// Binomial coefficient `C(n, k)` as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    // Subset enumeration, used only as an oracle for small n.
    fn brute_sigma(x: &[f64], k: usize) -> f64 {
        let n = x.len();
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == k {
                total += (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| x[i])
                    .product::<f64>();
            }
        }
        total
    }

    #[test]
    fn recurrence_matches_enumeration() {
        let x = [0.3, -1.2, 2.5, 0.7, 1.1, -0.4];
        for k in 0..=6 {
            let r = sigma(&x, k);
            let b = brute_sigma(&x, k);
            assert!((r - b).abs() < 1e-12, "k={k}: {r} vs {b}");
        }
        assert_eq!(sigma(&x, 7), 0.0);
    }

    #[test]
    fn removal_matches_zeroing() {
        let x = [0.3, -1.2, 2.5, 0.7];
        for i in 0..4 {
            let mut z = x;
            z[i] = 0.0;
            for k in 0..=3 {
                assert!((sigma_without(&x, k, i) - sigma(&z, k)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(3, 2), 3.0);
        assert_eq!(binomial(6, 3), 20.0);
        assert_eq!(binomial(12, 0), 1.0);
        assert_eq!(binomial(2, 3), 0.0);
    }
}
