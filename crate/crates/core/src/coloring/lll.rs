//! The symmetric local lemma condition for monochromatic-edge events.
//!
//! With `D` the maximum degree of the signed hypergraph's source, an edge
//! event depends on at most `n(2D - 1)` others. Taking
//! `gamma = e * Pr(A) = 2e * 2^-n`, the condition reads
//!
//! ```text
//! gamma * (1 - gamma)^(n(2D - 1)) / Pr(A) = e * (1 - gamma)^(n(2D - 1)) >= 1
//! ```
//!
//! The ratio is bracketed with fixed-point interval arithmetic, `e` itself
//! included, so the verdict does not depend on floating point.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::unit_calculus::report::Q;

/// Fractional bits of the interval endpoints.
const PREC: u32 = 256;
/// Denominator of the reported margin.
const MARGIN_BITS: u32 = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LllCheck {
    pub n: u32,
    pub max_degree: u64,
    /// `n(2D - 1)`, the dependency exponent.
    pub exponent: u64,
    pub holds: bool,
    /// `ratio - 1`, rounded down to a multiple of `2^-32`.
    pub margin: Q,
    /// `ln ratio`, for display.
    pub log_ratio: f64,
}

/// `[lo, hi]` bracketing `e * 2^PREC`.
fn e_bounds() -> (BigUint, BigUint) {
    let guard = 16;
    let mut term = BigUint::one() << (PREC + guard);
    let mut sum = BigUint::zero();
    let mut k = 1u32;
    while !term.is_zero() {
        sum += &term;
        term /= k;
        k += 1;
    }
    // each of the k floors loses less than one unit, the tail less than two
    let lo = &sum >> guard;
    let hi = ((sum + BigUint::from(k + 2)) >> guard) + 1u32;
    (lo, hi)
}

fn mul_down(a: &BigUint, b: &BigUint) -> BigUint {
    (a * b) >> PREC
}

fn mul_up(a: &BigUint, b: &BigUint) -> BigUint {
    ((a * b) >> PREC) + 1u32
}

fn pow_interval(lo: &BigUint, hi: &BigUint, mut k: u64) -> (BigUint, BigUint) {
    let one = BigUint::one() << PREC;
    let (mut rlo, mut rhi) = (one.clone(), one);
    let (mut blo, mut bhi) = (lo.clone(), hi.clone());
    while k > 0 {
        if k & 1 == 1 {
            rlo = mul_down(&rlo, &blo);
            rhi = mul_up(&rhi, &bhi);
        }
        k >>= 1;
        if k > 0 {
            blo = mul_down(&blo, &blo);
            bhi = mul_up(&bhi, &bhi);
        }
    }
    (rlo, rhi)
}

/// Evaluates the condition for `n`-uniform edge events at maximum degree `D`.
/// `D = 0` means independent events, which always satisfy it.
pub fn check_lll_condition(n: u32, max_degree: u64) -> LllCheck {
    assert!(n >= 2, "edges need at least two vertices");
    let exponent = (u64::from(n)).saturating_mul((2 * max_degree).saturating_sub(1));
    let (e_lo, e_hi) = e_bounds();
    let one = BigUint::one() << PREC;
    // gamma = 2e / 2^n, directed rounding
    let g_hi = ((&e_hi << 1u32) >> n) + 1u32;
    let g_lo = (&e_lo << 1u32) >> n;
    let (holds, r_lo, log_ratio) = if g_hi >= one {
        // gamma >= 1 only for n = 2; the factor (1 - gamma) is not a probability
        let g = (2.0 * std::f64::consts::E) / 2f64.powi(n as i32);
        let r = std::f64::consts::E * (1.0 - g).powf(exponent as f64);
        (false, None, r.abs().ln())
    } else {
        let (p_lo, _) = pow_interval(&(&one - &g_hi), &(&one - &g_lo), exponent);
        let r_lo = mul_down(&e_lo, &p_lo);
        let log_ratio = 1.0 + exponent as f64 * (-(2.0 * std::f64::consts::E) / 2f64.powi(n as i32)).ln_1p();
        (r_lo >= one, Some(r_lo), log_ratio)
    };
    let margin = match &r_lo {
        Some(r) => {
            // floor((r - 1) * 2^32) with r in fixed point
            let scaled = |x: &BigUint| (x >> (PREC - MARGIN_BITS)).to_i64().unwrap_or(i64::MAX);
            let num = scaled(r) - (1i64 << MARGIN_BITS);
            Q(Ratio::new(num, 1i64 << MARGIN_BITS))
        }
        None => Q(Ratio::new(-(1i64 << MARGIN_BITS), 1i64 << MARGIN_BITS)),
    };
    LllCheck {
        n,
        max_degree,
        exponent,
        holds,
        margin,
        log_ratio,
    }
}

/// `floor(2^(n-2) / (e n))`, the degree that the halving result allows.
/// The same quantity is often written `2^n / (4 e n)`.
pub fn lll_degree_threshold(n: u32) -> u64 {
    assert!((2..=62).contains(&n), "n out of range");
    let (e_lo, e_hi) = e_bounds();
    let top = BigUint::one() << (n - 2 + PREC);
    let a = &top / (e_hi * n);
    let b = &top / (e_lo * n);
    // the brackets are 2^-200 apart, far from any integer crossing for n <= 62
    debug_assert_eq!(a, b);
    b.to_u64().expect("fits below 2^62")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert_eq!(lll_degree_threshold(10), 9);
        assert_eq!(lll_degree_threshold(12), 31);
    }

    #[test]
    fn n10_at_threshold_holds() {
        let r = check_lll_condition(10, 9);
        assert!(r.holds);
        assert_eq!(r.exponent, 170);
        assert!(r.margin > Q::int(0));
        // 1 + 170 ln(1 - 2e/1024)
        assert!((r.log_ratio - 0.09509).abs() < 1e-4);
    }

    #[test]
    fn overloaded_fails() {
        assert!(!check_lll_condition(10, 1 << 10).holds);
        assert!(!check_lll_condition(12, 37).holds);
        assert!(check_lll_condition(12, 31).holds);
        assert!(!check_lll_condition(2, 1).holds);
        assert!(check_lll_condition(5, 0).holds);
    }

    #[test]
    fn exponent_within_the_quoted_bound() {
        // n(2D - 1) <= 2^n / (2e) - 1 when D <= 2^n / (4en)
        for n in 4..=20u32 {
            let d = lll_degree_threshold(n);
            if d == 0 {
                continue;
            }
            let bound = 2f64.powi(n as i32) / (2.0 * std::f64::consts::E) - 1.0;
            assert!((n as f64) * (2.0 * d as f64 - 1.0) <= bound, "n = {n}");
            assert!(check_lll_condition(n, d).holds, "n = {n}");
        }
    }
}
