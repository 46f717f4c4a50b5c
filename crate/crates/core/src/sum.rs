//! Compensated (Neumaier) summation for real and complex accumulators.
//!
//! Every long average in this crate funnels through these types so that
//! results are reproducible and merge order is the only thing that matters
//! for bit-identity: merging block partials left-to-right over a fixed
//! partition always produces the same bits.

use num_complex::Complex64;
use std::ops::AddAssign;

/// Neumaier variant of Kahan summation: `sum()` returns `s + c`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    s: f64,
    c: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    /// Folds another partial sum in, compensation first.
    pub fn merge(&mut self, other: NeumaierSum) {
        self.add(other.c);
        self.add(other.s);
    }

    #[inline]
    pub fn sum(&self) -> f64 {
        self.s + self.c
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, x: f64) {
        self.add(x);
    }
}

/// Componentwise compensated complex sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn add_scaled(&mut self, z: Complex64, w: f64) {
        self.re.add(z.re * w);
        self.im.add(z.im * w);
    }

    pub fn merge(&mut self, other: ComplexSum) {
        self.re.merge(other.re);
        self.im.merge(other.im);
    }

    #[inline]
    pub fn sum(&self) -> Complex64 {
        Complex64::new(self.re.sum(), self.im.sum())
    }
}
