//! Alternating binomial sums arising from the base-torus heat trace.

use num_bigint::BigInt;
use num_traits::Zero;

/// Σ_{q=0}^{k} (−1)^{p+q} (p+q) C(k, q), exact.
///
/// Vanishes for every k ≥ 2; equals (−1)^{p+1} for k = 1.
pub fn binomial_weighted_sum(p: i64, k: u32) -> BigInt {
    let mut acc = BigInt::zero();
    let mut binom = BigInt::from(1);
    for q in 0..=k as i64 {
        let sign = if (p + q).rem_euclid(2) == 0 { 1 } else { -1 };
        acc += BigInt::from(sign) * BigInt::from(p + q) * &binom;
        // C(k, q+1) = C(k, q) (k - q) / (q + 1)
        binom = binom * BigInt::from(k as i64 - q) / BigInt::from(q + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn vanishing_for_large_k() {
        for k in 2..=8 {
            for p in 0..=12 {
                assert!(binomial_weighted_sum(p, k).is_zero(), "p={p} k={k}");
            }
        }
        assert!(binomial_weighted_sum(0, 3).is_zero());
    }

    #[test]
    fn k_equal_one() {
        for p in 0..=12i64 {
            let expect = if p % 2 == 0 { -BigInt::one() } else { BigInt::one() };
            assert_eq!(binomial_weighted_sum(p, 1), expect, "p={p}");
        }
        assert_eq!(binomial_weighted_sum(2, 1), BigInt::from(-1));
    }

    #[test]
    fn paired_cancellation_for_even_degree() {
        // contributions at p and d_K + 1 - p cancel for even d_K
        for d_k in [2i64, 4, 6] {
            for p in 0..=6 {
                let a = binomial_weighted_sum(p, 1);
                let b = binomial_weighted_sum(d_k + 1 - p, 1);
                assert!((a + b).is_zero(), "d_K={d_k} p={p}");
            }
        }
    }
}
