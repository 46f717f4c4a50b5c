//! L1 approximation of Beatty-structure indicators by trigonometric
//! polynomials. The targets are periodic unions of half-open intervals
//! (period alpha): the set whose integer points are exactly the Beatty values
//! `floor(alpha n)`, and its refinement into the `p` cells distinguished by
//! `floor(p alpha n) - p floor(alpha n)`. Fourier coefficients come from the
//! closed form of the interval transform, never from numerical integration;
//! the empirical L1 error along the integers is the quantity the
//! approximation argument actually controls.

use crate::alpha::AlphaExact;
use crate::error::{Error, Result};
use crate::phase;
use crate::sum::NeumaierSum;
use num_complex::Complex64;
use rayon::prelude::*;

/// Indicator of a periodic union of half-open intervals `(lo, hi]` inside one
/// fundamental period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicIntervalIndicator {
    period: f64,
    intervals: Vec<(f64, f64)>,
}

impl PeriodicIntervalIndicator {
    pub fn new(period: f64, intervals: Vec<(f64, f64)>) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::domain("period must be positive and finite"));
        }
        let mut sorted = intervals.clone();
        sorted.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite endpoints"));
        let mut len = 0.0;
        for (i, &(lo, hi)) in sorted.iter().enumerate() {
            if !(lo < hi) || lo < 0.0 || hi > period {
                return Err(Error::domain(format!(
                    "interval ({lo}, {hi}] must sit inside (0, {period}]"
                )));
            }
            if i > 0 && sorted[i - 1].1 > lo {
                return Err(Error::domain("intervals must be pairwise disjoint"));
            }
            len += hi - lo;
        }
        debug_assert!(len <= period * (1.0 + 1e-12));
        Ok(PeriodicIntervalIndicator { period, intervals })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|&(lo, hi)| hi - lo).sum()
    }

    /// Pointwise evaluation (reduces x into the fundamental period).
    pub fn contains(&self, x: f64) -> bool {
        let r = x.rem_euclid(self.period);
        // (lo, hi]: the period point 0 ~ period belongs to an interval ending
        // exactly at the period boundary
        self.intervals.iter().any(|&(lo, hi)| (r > lo && r <= hi) || (r == 0.0 && hi == self.period))
    }

    /// Period alpha, one interval `(alpha - 1, alpha]`: the integers inside
    /// the union are exactly the Beatty values of alpha.
    pub fn beatty_support(alpha: &AlphaExact) -> Result<Self> {
        alpha.require_irrational()?;
        let a = alpha.value_f64();
        if a <= 1.0 {
            return Err(Error::domain("beatty support needs alpha > 1"));
        }
        PeriodicIntervalIndicator::new(a, vec![(a - 1.0, a)])
    }

    /// Period alpha, one interval `(alpha - (i+1)/p, alpha - i/p]`: the
    /// integers inside are the Beatty values whose cell index at `p` is `i`.
    pub fn cell_support(alpha: &AlphaExact, p: u64, i: u64) -> Result<Self> {
        alpha.require_irrational()?;
        if !crate::sieve::is_prime(p) {
            return Err(Error::domain(format!("p = {p} must be prime")));
        }
        if i >= p {
            return Err(Error::domain(format!("cell index {i} out of range for p = {p}")));
        }
        let a = alpha.value_f64();
        if a <= 1.0 {
            return Err(Error::domain("cell support needs alpha > 1"));
        }
        let hi = a - i as f64 / p as f64;
        let lo = a - (i + 1) as f64 / p as f64;
        PeriodicIntervalIndicator::new(a, vec![(lo, hi)])
    }
}

/// Fourier coefficient of the 1-periodic rescaling of the indicator: for one
/// rescaled interval `(a, b]`, the coefficient at `k != 0` is
/// `(e(-ka) - e(-kb)) / (2 pi i k)` and `b - a` at `k = 0`; coefficients add
/// over intervals.
pub fn interval_union_fourier(ind: &PeriodicIntervalIndicator, k: i64) -> Complex64 {
    let t = ind.period();
    let mut c = Complex64::new(0.0, 0.0);
    for &(lo, hi) in ind.intervals() {
        let (a, b) = (lo / t, hi / t);
        if k == 0 {
            c += Complex64::new(b - a, 0.0);
        } else {
            let kf = k as f64;
            let num = phase::e(-kf * a) - phase::e(-kf * b);
            let den = Complex64::new(0.0, std::f64::consts::TAU * kf);
            c += num / den;
        }
    }
    c
}

/// Finite trigonometric polynomial `x -> sum c_k e(k x / alpha)` with the
/// symmetric index range `[-K, K]` and `c_{-k} = conj(c_k)` enforced
/// structurally (the real-target transforms satisfy it analytically; storing
/// only one side makes it exact).
#[derive(Debug, Clone)]
pub struct TrigPolynomial {
    /// `1/alpha`, the fundamental frequency.
    fundamental: f64,
    /// exact fixed-point fraction of `1/alpha`, drives integer evaluation
    step: u128,
    /// `c_0` followed by `c_k` for k = 1..=K
    coeffs: Vec<Complex64>,
}

impl TrigPolynomial {
    /// Build from the analytic transform of an indicator; `frequency_base`
    /// supplies exact phases for the fundamental (`1/alpha`).
    pub fn from_indicator(
        ind: &PeriodicIntervalIndicator,
        frequency_base: &AlphaExact,
        k_max: u32,
    ) -> Result<TrigPolynomial> {
        let step = frequency_base.frac_multiple_fixed(1)?.0;
        let coeffs = (0..=k_max as i64).map(|k| interval_union_fourier(ind, k)).collect();
        Ok(TrigPolynomial { fundamental: frequency_base.value_f64(), step, coeffs })
    }

    pub fn constant(c: Complex64) -> TrigPolynomial {
        TrigPolynomial { fundamental: 0.0, step: 0, coeffs: vec![c] }
    }

    pub fn fundamental_frequency(&self) -> f64 {
        self.fundamental
    }

    pub fn degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    /// `c_k`; the negative side mirrors by conjugation.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        let idx = k.unsigned_abs() as usize;
        if idx >= self.coeffs.len() {
            return Complex64::new(0.0, 0.0);
        }
        if k >= 0 {
            self.coeffs[idx]
        } else {
            self.coeffs[idx].conj()
        }
    }

    pub fn c0(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `sum over |k| <= K of |c_k|^2`; for a {0,1}-indicator target this is
    /// bounded by `c_0` (Bessel).
    pub fn power_sum(&self) -> f64 {
        let mut s = self.coeffs[0].norm_sqr();
        for c in &self.coeffs[1..] {
            s += 2.0 * c.norm_sqr();
        }
        s
    }

    /// Value at the integer `m`, via the exact fixed-point phase of
    /// `m / alpha` and running powers. Real-valued by construction
    /// (conjugate-symmetric coefficients), so the real part is returned
    /// as the value and the imaginary part is exactly zero.
    pub fn eval_int(&self, m: u64) -> f64 {
        let z = phase::e_at(self.step, m);
        let mut pow = Complex64::new(1.0, 0.0);
        let mut acc = self.coeffs[0].re; // c_0 real for indicator targets
        for c in &self.coeffs[1..] {
            pow *= z;
            // c_k e(k m / alpha) + conj both: twice the real part
            acc += 2.0 * (c * pow).re;
        }
        acc
    }

    /// Value at an arbitrary real point (test/diagnostic route; transcendental
    /// evaluation per term rather than running powers).
    pub fn eval_real(&self, x: f64) -> Complex64 {
        let mut acc: Complex64 = self.coeffs[0];
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let ph = phase::e(k as f64 * self.fundamental * x);
            acc += c * ph + (c * ph).conj();
        }
        acc
    }
}

/// Degree-K trig polynomial approximating the Beatty-support indicator;
/// `c_0 = 1/alpha` (interval length 1 over period alpha).
pub fn beatty_indicator_poly(alpha: &AlphaExact, k_max: u32) -> Result<TrigPolynomial> {
    let ind = PeriodicIntervalIndicator::beatty_support(alpha)?;
    TrigPolynomial::from_indicator(&ind, &alpha.reciprocal()?, k_max)
}

/// Degree-K trig polynomial approximating one cell indicator;
/// `c_0 = 1/(p alpha)`.
pub fn dpi_indicator_poly(alpha: &AlphaExact, p: u64, i: u64, k_max: u32) -> Result<TrigPolynomial> {
    let ind = PeriodicIntervalIndicator::cell_support(alpha, p, i)?;
    TrigPolynomial::from_indicator(&ind, &alpha.reciprocal()?, k_max)
}

/// `(1/N) sum_{m <= N} |target(m) - poly(m)|`.
pub fn l1_error_empirical<F>(target: F, poly: &TrigPolynomial, n: u64) -> Result<f64>
where
    F: Fn(u64) -> bool + Sync,
{
    if n < 1 {
        return Err(Error::domain("need N >= 1"));
    }
    let chunk = 1u64 << 16;
    let ranges: Vec<(u64, u64)> = {
        let mut v = Vec::new();
        let mut lo = 1u64;
        while lo <= n {
            let hi = n.min(lo + chunk - 1);
            v.push((lo, hi));
            lo = hi + 1;
        }
        v
    };
    let partials: Vec<NeumaierSum> = ranges
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut s = NeumaierSum::new();
            for m in lo..=hi {
                let t = if target(m) { 1.0 } else { 0.0 };
                s.add((t - poly.eval_int(m)).abs());
            }
            s
        })
        .collect();
    let mut total = NeumaierSum::new();
    for p in &partials {
        total.merge(*p);
    }
    Ok(total.sum() / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> AlphaExact {
        AlphaExact::parse("sqrt:2").unwrap()
    }

    #[test]
    fn fourier_closed_forms() {
        let ind = PeriodicIntervalIndicator::new(1.0, vec![(0.25, 0.75)]).unwrap();
        let c0 = interval_union_fourier(&ind, 0);
        assert!((c0.re - 0.5).abs() < 1e-15 && c0.im == 0.0);

        // full period: all nonzero coefficients vanish
        let full = PeriodicIntervalIndicator::new(2.0, vec![(0.0, 2.0)]).unwrap();
        for k in 1..6 {
            assert!(interval_union_fourier(&full, k).norm() < 1e-15);
        }

        // (0, 1/2] at k = 1: (1 - e(-1/2)) / (2 pi i) = 1/(pi i) = -i/pi
        let half = PeriodicIntervalIndicator::new(1.0, vec![(0.0, 0.5)]).unwrap();
        let c1 = interval_union_fourier(&half, 1);
        let want = Complex64::new(0.0, -1.0 / std::f64::consts::PI);
        assert!((c1 - want).norm() < 1e-15, "{c1} vs {want}");
    }

    #[test]
    fn indicator_validation() {
        assert!(PeriodicIntervalIndicator::new(1.0, vec![(0.2, 0.1)]).is_err());
        assert!(PeriodicIntervalIndicator::new(1.0, vec![(0.0, 1.5)]).is_err());
        assert!(PeriodicIntervalIndicator::new(1.0, vec![(0.0, 0.5), (0.4, 0.8)]).is_err());
        assert!(PeriodicIntervalIndicator::new(1.0, vec![(0.0, 0.4), (0.4, 0.8)]).is_ok());
    }

    #[test]
    fn beatty_membership_matches_support_indicator() {
        let alpha = sqrt2();
        let ind = PeriodicIntervalIndicator::beatty_support(&alpha).unwrap();
        for m in 1..=300u64 {
            let member = alpha.is_member(m).unwrap();
            assert_eq!(ind.contains(m as f64), member, "m={m}");
        }
    }

    #[test]
    fn beatty_poly_c0_is_inverse_alpha() {
        let alpha = sqrt2();
        let p = beatty_indicator_poly(&alpha, 8).unwrap();
        assert!((p.c0().re - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(p.c0().im, 0.0);
        assert_eq!(p.degree(), 8);

        let k0 = beatty_indicator_poly(&alpha, 0).unwrap();
        assert_eq!(k0.degree(), 0);
        for m in [1u64, 7, 100] {
            assert!((k0.eval_int(m) - k0.c0().re).abs() < 1e-15);
        }
    }

    #[test]
    fn dpi_c0_partition() {
        let alpha = sqrt2();
        let p = 3u64;
        let mut total = 0.0;
        for i in 0..p {
            let poly = dpi_indicator_poly(&alpha, p, i, 4).unwrap();
            let want = 1.0 / (p as f64 * 2f64.sqrt());
            assert!((poly.c0().re - want).abs() < 1e-12, "i={i}");
            total += poly.c0().re;
        }
        assert!((total - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!(dpi_indicator_poly(&alpha, 4, 0, 4).is_err());
        assert!(dpi_indicator_poly(&alpha, 3, 3, 4).is_err());
    }

    #[test]
    fn conjugate_symmetry_and_realness() {
        let alpha = sqrt2();
        let ind = PeriodicIntervalIndicator::beatty_support(&alpha).unwrap();
        let poly = beatty_indicator_poly(&alpha, 30).unwrap();
        for k in 1..=30i64 {
            // stored mirror is exact
            assert_eq!(poly.coefficient(-k), poly.coefficient(k).conj());
            // analytic transform agrees with the mirror
            let direct = interval_union_fourier(&ind, -k);
            assert!((direct - poly.coefficient(k).conj()).norm() < 1e-12, "k={k}");
        }
        for m in [1u64, 2, 14, 99, 1000] {
            let via_real = poly.eval_real(m as f64);
            assert!(via_real.im.abs() < 1e-10);
            assert!((via_real.re - poly.eval_int(m)).abs() < 1e-9, "m={m}");
        }
    }

    #[test]
    fn parseval_bound_holds() {
        let alpha = sqrt2();
        for k in [5u32, 25, 100, 400] {
            let poly = beatty_indicator_poly(&alpha, k).unwrap();
            assert!(
                poly.power_sum() <= poly.c0().re + 1e-12,
                "K={k}: {} vs {}",
                poly.power_sum(),
                poly.c0().re
            );
        }
    }

    #[test]
    fn l1_error_trivial_cases() {
        let zero = TrigPolynomial::constant(Complex64::new(0.0, 0.0));
        let e = l1_error_empirical(|_| false, &zero, 1000).unwrap();
        assert_eq!(e, 0.0);
        let one = TrigPolynomial::constant(Complex64::new(1.0, 0.0));
        let e = l1_error_empirical(|_| true, &one, 1000).unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn l1_error_of_mean_against_beatty_indicator() {
        // two-valued error |1_B - 1/sqrt(2)| with P(1_B = 1) -> 1/sqrt(2):
        // expected value 2 (1/sqrt(2)) (1 - 1/sqrt(2)) = sqrt(2) - 1
        let alpha = sqrt2();
        let mean = TrigPolynomial::constant(Complex64::new(1.0 / 2f64.sqrt(), 0.0));
        let e = l1_error_empirical(|m| alpha.is_member(m).unwrap(), &mean, 100_000).unwrap();
        let want = 2f64.sqrt() - 1.0;
        assert!((e - want).abs() < 1e-3, "{e} vs {want}");
    }

    #[test]
    fn beatty_poly_l1_error_small_and_improving() {
        let alpha = sqrt2();
        let n = 20_000u64;
        let member = |m: u64| alpha.is_member(m).unwrap();
        let mut prev = f64::INFINITY;
        for k in [25u32, 50, 100, 200] {
            let poly = beatty_indicator_poly(&alpha, k).unwrap();
            let e = l1_error_empirical(member, &poly, n).unwrap();
            assert!(e <= prev + 1e-3, "K={k}: {e} after {prev}");
            prev = e;
        }
        assert!(prev <= 0.05, "K=200 error {prev}");
    }
}
