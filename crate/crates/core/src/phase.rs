//! Unit-modulus exponentials `e(x) = exp(2 pi i x)` with exact phase
//! bookkeeping for `f64` frequencies.
//!
//! An `f64` frequency is a dyadic rational, so `n * beta mod 1` is computed
//! exactly as a 128-bit wrapping product; no rotation drift, no re-anchoring.

use crate::alpha::FixedPointFraction;
use num_complex::Complex64;
use std::f64::consts::TAU;

/// `exp(2 pi i x)`; `x` is reduced mod 1 first.
///
/// Quarter turns are returned as exact units so that phases landing on the
/// axes (half-integer frequencies, dyadic steps) cancel exactly in sums
/// instead of leaving `sin(pi)`-sized residue.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let r = x.rem_euclid(1.0);
    if r == 0.0 {
        return Complex64::new(1.0, 0.0);
    } else if r == 0.25 {
        return Complex64::new(0.0, 1.0);
    } else if r == 0.5 {
        return Complex64::new(-1.0, 0.0);
    } else if r == 0.75 {
        return Complex64::new(0.0, -1.0);
    }
    let t = TAU * r;
    Complex64::new(t.cos(), t.sin())
}

/// Exact image of `beta mod 1` in 128-bit fixed point. Exact because `beta`
/// has at most 53 mantissa bits and scaling by a power of two is lossless.
#[inline]
pub fn unit_fixed(beta: f64) -> u128 {
    let r = beta.rem_euclid(1.0);
    (r * 2f64.powi(128)) as u128
}

/// Phase at `n * beta`, exact mod 1 for the dyadic `beta` behind `step`.
#[inline]
pub fn phase_at(step: u128, n: u64) -> FixedPointFraction {
    FixedPointFraction(step.wrapping_mul(n as u128))
}

/// `e(n * beta)` from the exact fixed-point phase.
#[inline]
pub fn e_at(step: u128, n: u64) -> Complex64 {
    e(phase_at(step, n).to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turns_are_exact_units() {
        assert_eq!(e(0.5), Complex64::new(-1.0, 0.0));
        assert_eq!(e(0.25), Complex64::new(0.0, 1.0));
        assert_eq!(e(0.75), Complex64::new(0.0, -1.0));
        assert_eq!(e(1.5), Complex64::new(-1.0, 0.0));
        assert_eq!(e(-0.25), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn integer_arguments_are_exactly_one() {
        for x in [0.0, 1.0, 7.0, -3.0] {
            assert_eq!(e(x), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn wrapping_product_matches_direct_reduction() {
        let beta = 0.3;
        let step = unit_fixed(beta);
        for n in [1u64, 2, 10, 1_000, 123_456_789] {
            let direct = (beta * n as f64).rem_euclid(1.0);
            let fixed = phase_at(step, n).to_f64();
            // direct f64 reduction loses bits at large n; agreement is loose there
            let tol = 1e-15 * n as f64;
            let d = (direct - fixed).abs();
            let wrapped = d.min((1.0 - d).abs());
            assert!(wrapped <= tol, "n={n} direct={direct} fixed={fixed}");
        }
    }
}
