//! Scalar special functions and small numeric helpers shared across the crate.

/// Digamma function psi(x) = d/dx ln Gamma(x).
///
/// Asymptotic (Bernoulli) series after shifting the argument above 6 with the
/// recurrence psi(x) = psi(x+1) - 1/x. Accurate to ~1e-12 for x > 0.
pub fn digamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0, "digamma defined here for positive arguments only");
    let mut result = 0.0;
    while x < 6.0 {
        result -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // ln x - 1/(2x) - sum B_2n / (2n x^(2n))
    result
        + x.ln()
        - 0.5 * inv
        - inv2
            * (1.0 / 12.0
                - inv2
                    * (1.0 / 120.0
                        - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))))
}

/// Natural log of the Gamma function for x > 0.
///
/// Stirling series with the same shift-above-threshold treatment as
/// [`digamma`]; the shift uses ln Gamma(x) = ln Gamma(x+1) - ln x.
pub fn ln_gamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma defined here for positive arguments only");
    let mut shift = 0.0;
    while x < 7.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2
                * (1.0 / 360.0
                    - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    const HALF_LN_2PI: f64 = 0.918_938_533_204_672_74;
    shift + (x - 0.5) * x.ln() - x + HALF_LN_2PI + series
}

/// log(sum(exp(values))) without overflow; -inf for an empty or all -inf slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Deterministic per-stage seed derivation (splitmix64 finalizer).
///
/// Every randomized stage draws its own stream from the run seed so stages
/// can be reordered or skipped without perturbing each other.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
