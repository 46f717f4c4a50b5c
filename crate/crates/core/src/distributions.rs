//! Central-limit statistics for prime-divisor counts: normalized samples
//! `(omega(n) - ln ln n)/sqrt(ln ln n)`, their pushforwards along `n ->
//! floor(alpha n)`, histograms with Gaussian references, the exceptional-set
//! density for the classical almost-everywhere bound, and the gap statistic
//! between the two natural normalizations of `omega(floor(alpha n))`.
//!
//! All counting is exact (integer histograms merge exactly over disjoint
//! ranges); floats appear only inside individual sample values and the
//! Gaussian quadrature.

use crate::alpha::AlphaExact;
use crate::error::{Error, Result};
use crate::sieve::{self, ArithmeticBlock, SEGMENT_LEN};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Smallest index with `ln ln n > 0`; normalized samples start here.
pub const EK_START: u64 = 3;

/// One normalized sample. `b_value` normalizes `omega(n)`, `a_value` (when a
/// Beatty multiplier is in play) normalizes `omega(floor(alpha n))`. Both
/// denominators use `ln ln` of the index `n`, not of the Beatty value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EKSample {
    pub n: u64,
    pub b_value: f64,
    pub a_value: Option<f64>,
}

/// The one place the normalization formula lives; everything that bins or
/// compares samples goes through here.
pub fn ek_sample(n: u64, omega_n: u32, omega_beatty: Option<u32>) -> EKSample {
    debug_assert!(n >= EK_START);
    let ll = (n as f64).ln().ln();
    let denom = ll.sqrt();
    EKSample {
        n,
        b_value: (omega_n as f64 - ll) / denom,
        a_value: omega_beatty.map(|w| (w as f64 - ll) / denom),
    }
}

/// Uniform binning request for one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinSpec {
    pub bins: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Default for BinSpec {
    /// 40 bins on [-4, 4]: covers all but ~6e-5 of a standard normal.
    fn default() -> Self {
        BinSpec { bins: 40, lo: -4.0, hi: 4.0 }
    }
}

impl BinSpec {
    pub fn edges(&self) -> Result<Vec<f64>> {
        if self.bins == 0 || !(self.lo < self.hi) {
            return Err(Error::domain(format!("invalid bin spec {self:?}")));
        }
        let w = (self.hi - self.lo) / self.bins as f64;
        let mut e: Vec<f64> = (0..=self.bins).map(|i| self.lo + w * i as f64).collect();
        // force the last edge exact so adjacent specs tile without gaps
        e[self.bins] = self.hi;
        Ok(e)
    }
}

/// Histogram over 1 or 2 axes. Each axis carries `bins` interior cells plus
/// an underflow cell (index 0) and an overflow cell (index bins+1); interior
/// cell `j` covers the half-open `[edge_{j-1}, edge_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    edges: Vec<Vec<f64>>,
    counts: Vec<u64>,
    total: u64,
}

impl EmpiricalDistribution {
    pub fn new_1d(spec: &BinSpec) -> Result<Self> {
        Ok(EmpiricalDistribution {
            edges: vec![spec.edges()?],
            counts: vec![0; spec.bins + 2],
            total: 0,
        })
    }

    pub fn new_2d(spec_a: &BinSpec, spec_b: &BinSpec) -> Result<Self> {
        Ok(EmpiricalDistribution {
            edges: vec![spec_a.edges()?, spec_b.edges()?],
            counts: vec![0; (spec_a.bins + 2) * (spec_b.bins + 2)],
            total: 0,
        })
    }

    pub fn dimensions(&self) -> usize {
        self.edges.len()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn edges(&self, axis: usize) -> &[f64] {
        &self.edges[axis]
    }

    /// Interior bin count on one axis.
    pub fn bins(&self, axis: usize) -> usize {
        self.edges[axis].len() - 1
    }

    fn cells(&self, axis: usize) -> usize {
        self.bins(axis) + 2
    }

    fn axis_cell(&self, axis: usize, x: f64) -> usize {
        let e = &self.edges[axis];
        if x < e[0] || x.is_nan() {
            return 0;
        }
        if x >= e[e.len() - 1] {
            return e.len() + 1 - 1; // bins + 1
        }
        // strictly increasing edges: partition_point gives first edge > x
        let j = e.partition_point(|&v| v <= x);
        debug_assert!(j >= 1 && j <= e.len() - 1);
        j
    }

    fn flat_index(&self, cells: &[usize]) -> usize {
        match self.dimensions() {
            1 => cells[0],
            2 => cells[0] * self.cells(1) + cells[1],
            _ => unreachable!(),
        }
    }

    pub fn push(&mut self, sample: &[f64]) {
        assert_eq!(sample.len(), self.dimensions(), "sample arity mismatch");
        let cells: Vec<usize> = sample.iter().enumerate().map(|(a, &x)| self.axis_cell(a, x)).collect();
        let idx = self.flat_index(&cells);
        self.counts[idx] += 1;
        self.total += 1;
    }

    pub fn push1(&mut self, x: f64) {
        self.push(&[x]);
    }

    pub fn push2(&mut self, x: f64, y: f64) {
        self.push(&[x, y]);
    }

    pub fn merge(&mut self, other: &EmpiricalDistribution) -> Result<()> {
        if self.edges != other.edges {
            return Err(Error::domain("cannot merge histograms with different bin edges"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }

    /// Count in one cell; per-axis indices use 0 = underflow, 1..=bins
    /// interior, bins+1 = overflow.
    pub fn cell(&self, cells: &[usize]) -> u64 {
        self.counts[self.flat_index(cells)]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Samples falling in any underflow/overflow cell on any axis.
    pub fn overflow_total(&self) -> u64 {
        let mut t = 0;
        match self.dimensions() {
            1 => {
                t += self.counts[0] + self.counts[self.cells(0) - 1];
            }
            2 => {
                for c0 in 0..self.cells(0) {
                    for c1 in 0..self.cells(1) {
                        if c0 == 0 || c0 == self.cells(0) - 1 || c1 == 0 || c1 == self.cells(1) - 1 {
                            t += self.counts[c0 * self.cells(1) + c1];
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        t
    }

    /// Fraction of samples strictly below `x` plus a linear share of the cell
    /// containing `x`. Monotone in `x`, 0 at -inf, 1 at +inf; 1-D only.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if self.dimensions() != 1 {
            return Err(Error::domain("cdf is defined for 1-D histograms"));
        }
        if self.total == 0 {
            return Err(Error::domain("cdf of an empty histogram"));
        }
        let e = &self.edges[0];
        if x.is_nan() {
            return Err(Error::domain("cdf at NaN"));
        }
        let mut below = 0u64;
        if x >= e[e.len() - 1] {
            return Ok(if x.is_infinite() {
                1.0
            } else {
                // everything but an untrackable slice of the overflow cell
                (self.total - self.counts[self.cells(0) - 1]) as f64 / self.total as f64
                    + self.counts[self.cells(0) - 1] as f64 / self.total as f64
            });
        }
        if x < e[0] {
            return Ok(0.0);
        }
        below += self.counts[0];
        let j = e.partition_point(|&v| v <= x); // cell index of x
        for c in 1..j {
            below += self.counts[c];
        }
        let frac_in_cell = (x - e[j - 1]) / (e[j] - e[j - 1]);
        Ok((below as f64 + frac_in_cell * self.counts[j] as f64) / self.total as f64)
    }

    /// Collapse a 2-D histogram onto one axis; under/overflow of the dropped
    /// axis folds into the kept cells, so marginals match the 1-D histogram
    /// built from the same samples exactly.
    pub fn marginal(&self, axis: usize) -> Result<EmpiricalDistribution> {
        if self.dimensions() != 2 {
            return Err(Error::domain("marginal is defined for 2-D histograms"));
        }
        if axis > 1 {
            return Err(Error::DimensionMismatch { have: axis, want: 1 });
        }
        let mut out = EmpiricalDistribution {
            edges: vec![self.edges[axis].clone()],
            counts: vec![0; self.cells(axis)],
            total: self.total,
        };
        for c0 in 0..self.cells(0) {
            for c1 in 0..self.cells(1) {
                let kept = if axis == 0 { c0 } else { c1 };
                out.counts[kept] += self.counts[c0 * self.cells(1) + c1];
            }
        }
        Ok(out)
    }

    /// One row per cell: per-axis `lo,hi` bounds then the count. Overflow
    /// cells print infinite bounds.
    pub fn csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (0..self.dimensions())
            .flat_map(|a| vec![format!("axis{a}_lo"), format!("axis{a}_hi")])
            .chain(std::iter::once("count".to_string()))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        let bounds = |axis: usize, c: usize| -> (f64, f64) {
            let e = &self.edges[axis];
            if c == 0 {
                (f64::NEG_INFINITY, e[0])
            } else if c == e.len() {
                (e[e.len() - 1], f64::INFINITY)
            } else {
                (e[c - 1], e[c])
            }
        };
        match self.dimensions() {
            1 => {
                for c in 0..self.cells(0) {
                    let (lo, hi) = bounds(0, c);
                    out.push_str(&format!("{lo},{hi},{}\n", self.counts[c]));
                }
            }
            2 => {
                for c0 in 0..self.cells(0) {
                    for c1 in 0..self.cells(1) {
                        let (lo0, hi0) = bounds(0, c0);
                        let (lo1, hi1) = bounds(1, c1);
                        out.push_str(&format!(
                            "{lo0},{hi0},{lo1},{hi1},{}\n",
                            self.counts[c0 * self.cells(1) + c1]
                        ));
                    }
                }
            }
            _ => unreachable!(),
        }
        out
    }

    /// Counting invariant; cheap, used by tests and debug assertions.
    pub fn counts_sum_to_total(&self) -> bool {
        self.counts.iter().sum::<u64>() == self.total
    }
}

/// Which normalized samples [`ek_empirical`] histograms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EkMode {
    /// 1-D histogram of `b_value`.
    Plain,
    /// 1-D histogram of `a_value`.
    Beatty,
    /// 2-D histogram with `a_value` on axis 0 and `b_value` on axis 1.
    Joint,
}

/// Pick an n-segment length so the Beatty image of one segment stays well
/// inside the sieve block budget.
fn scaled_segments(lo: u64, hi: u64, scale: f64) -> Vec<(u64, u64)> {
    let scale = scale.max(1.0);
    let len = ((1u64 << 22) as f64 / scale) as u64;
    let len = len.clamp(64, SEGMENT_LEN);
    let mut out = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start + len - 1);
        out.push((start, end));
        start = end + 1;
    }
    out
}

fn ek_segment(
    mode: EkMode,
    alpha: Option<&AlphaExact>,
    lo: u64,
    hi: u64,
    bins: &BinSpec,
) -> Result<EmpiricalDistribution> {
    let mut hist = match mode {
        EkMode::Plain | EkMode::Beatty => EmpiricalDistribution::new_1d(bins)?,
        EkMode::Joint => EmpiricalDistribution::new_2d(bins, bins)?,
    };
    let direct = match mode {
        EkMode::Plain | EkMode::Joint => Some(sieve::sieve_block(lo, hi)?),
        EkMode::Beatty => None,
    };
    let image: Option<(ArithmeticBlock, Vec<u64>)> = match mode {
        EkMode::Beatty | EkMode::Joint => {
            let a = alpha.expect("mode checked by caller");
            let mut beatty = Vec::with_capacity((hi - lo + 1) as usize);
            for n in lo..=hi {
                beatty.push(a.beatty(n)?);
            }
            let block = sieve::sieve_block(beatty[0], beatty[beatty.len() - 1])?;
            Some((block, beatty))
        }
        EkMode::Plain => None,
    };
    for n in lo..=hi {
        let omega_n = direct.as_ref().map(|b| b.omega(n) as u32);
        let omega_a = image.as_ref().map(|(b, m)| b.omega(m[(n - lo) as usize]) as u32);
        let s = ek_sample(n, omega_n.unwrap_or(0), omega_a);
        match mode {
            EkMode::Plain => hist.push1(s.b_value),
            EkMode::Beatty => hist.push1(s.a_value.unwrap()),
            EkMode::Joint => hist.push2(s.a_value.unwrap(), s.b_value),
        }
    }
    Ok(hist)
}

/// Histogram of normalized prime-divisor counts over `n in [3, N]`: of
/// `b_value` (plain), `a_value` (beatty), or the pair (joint).
pub fn ek_empirical(
    mode: EkMode,
    alpha: Option<&AlphaExact>,
    n: u64,
    bins: &BinSpec,
) -> Result<EmpiricalDistribution> {
    if n < EK_START {
        return Err(Error::domain(format!("need N >= {EK_START}")));
    }
    match (mode, alpha) {
        (EkMode::Plain, Some(_)) => return Err(Error::domain("plain mode takes no alpha")),
        (EkMode::Beatty | EkMode::Joint, None) => {
            return Err(Error::domain("beatty/joint modes require alpha"))
        }
        _ => {}
    }
    let scale = match alpha {
        Some(a) => {
            if a.beatty(EK_START)? < 1 {
                return Err(Error::domain("alpha too small: floor(3 alpha) < 1"));
            }
            a.value_f64()
        }
        None => 1.0,
    };
    let partials: Vec<Result<EmpiricalDistribution>> = scaled_segments(EK_START, n, scale)
        .into_par_iter()
        .map(|(lo, hi)| ek_segment(mode, alpha, lo, hi, bins))
        .collect();
    let mut it = partials.into_iter();
    let mut hist = it.next().expect("at least one segment")?;
    for p in it {
        hist.merge(&p?)?;
    }
    debug_assert!(hist.counts_sum_to_total());
    Ok(hist)
}

/// Fraction of samples inside an axis-aligned rectangle. Interior cells that
/// partially overlap the rectangle contribute a linear share of their count;
/// under/overflow cells contribute nothing (the Gaussian reference has
/// negligible mass there, and those cells have no finite extent to share).
pub fn rectangle_probability(dist: &EmpiricalDistribution, rect: &[(f64, f64)]) -> Result<f64> {
    if rect.len() != dist.dimensions() {
        return Err(Error::DimensionMismatch { have: rect.len(), want: dist.dimensions() });
    }
    if dist.total == 0 {
        return Err(Error::domain("rectangle probability of an empty histogram"));
    }
    // weight of interior cell j on one axis = |cell overlap rect| / |cell|
    let axis_weights: Vec<Vec<f64>> = (0..dist.dimensions())
        .map(|a| {
            let (lo, hi) = rect[a];
            let e = dist.edges(a);
            let mut w = vec![0.0; dist.cells(a)];
            if lo < hi {
                for j in 1..=dist.bins(a) {
                    let (cl, ch) = (e[j - 1], e[j]);
                    let ov = (hi.min(ch) - lo.max(cl)).max(0.0);
                    w[j] = ov / (ch - cl);
                }
            }
            w
        })
        .collect();
    let mut mass = 0.0;
    match dist.dimensions() {
        1 => {
            for (j, &c) in dist.counts.iter().enumerate() {
                mass += axis_weights[0][j] * c as f64;
            }
        }
        2 => {
            for c0 in 0..dist.cells(0) {
                for c1 in 0..dist.cells(1) {
                    let w = axis_weights[0][c0] * axis_weights[1][c1];
                    if w > 0.0 {
                        mass += w * dist.counts[c0 * dist.cells(1) + c1] as f64;
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(mass / dist.total as f64)
}

/// Max over bin edges of |empirical CDF - reference CDF|; 1-D only.
pub fn ks_distance<F: Fn(f64) -> f64>(dist: &EmpiricalDistribution, reference: F) -> Result<f64> {
    if dist.dimensions() != 1 {
        return Err(Error::domain("ks_distance is defined for 1-D histograms"));
    }
    let mut worst = 0.0f64;
    for &e in dist.edges(0) {
        let d = (dist.cdf(e)? - reference(e)).abs();
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

/// Integration window for [`gauss_functional`]; the Gaussian tail beyond it
/// is below 1e-14 and dropped.
pub const GAUSS_RANGE: f64 = 8.0;
/// Absolute tolerance of [`gauss_functional`].
pub const GAUSS_TOL: f64 = 1e-10;
const GAUSS_MAX_DEPTH: u32 = 52;
// Local acceptance floor: intervals whose error estimate falls below this are
// accepted regardless of the proportional budget. Needed at jump
// discontinuities of F, where the Simpson estimate decays only linearly in
// the width; the floor caps the committed error per jump at ~1e-12.
const GAUSS_TOL_FLOOR: f64 = GAUSS_TOL / 1024.0;

fn simpson(a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64) -> Complex64 {
    (fa + 4.0 * fm + fb) * ((b - a) / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn adapt<G: Fn(f64) -> Complex64>(
    g: &G,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Result<Complex64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = g(lm);
    let frm = g(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.norm() <= 15.0 * tol.max(GAUSS_TOL_FLOOR) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureDepth { tol: GAUSS_TOL, depth: GAUSS_MAX_DEPTH });
    }
    let l = adapt(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = adapt(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Gaussian functional `(1/sqrt(2 pi)) * integral F(x) exp(-x^2/2) dx`,
/// computed by adaptive Simpson quadrature on `[-GAUSS_RANGE, GAUSS_RANGE]`
/// to absolute tolerance [`GAUSS_TOL`]. `F` must be bounded and piecewise
/// continuous; refinement past the depth budget is an error.
pub fn gauss_functional<F: Fn(f64) -> Complex64>(f: F) -> Result<Complex64> {
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let g = move |x: f64| f(x) * ((-0.5 * x * x).exp() * norm);
    let (a, b) = (-GAUSS_RANGE, GAUSS_RANGE);
    let (fa, fm, fb) = (g(a), g(0.5 * (a + b)), g(b));
    let whole = simpson(a, b, fa, fm, fb);
    adapt(&g, a, b, fa, fm, fb, whole, GAUSS_TOL, GAUSS_MAX_DEPTH)
}

/// Report from [`hardy_ramanujan_exceptional`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExceptionalReport {
    pub n: u64,
    pub eps: f64,
    pub exceed: u64,
    pub samples: u64,
    /// exceed / samples
    pub fraction: f64,
}

/// Fraction of `n in [3, N]` with `|omega(n) - ln ln n| >= (ln ln n)^(1/2 + eps)`.
pub fn hardy_ramanujan_exceptional(n: u64, eps: f64) -> Result<ExceptionalReport> {
    if n < EK_START {
        return Err(Error::domain(format!("need N >= {EK_START}")));
    }
    if !(eps > 0.0) {
        return Err(Error::domain("need eps > 0"));
    }
    let partials: Vec<Result<u64>> = sieve::fixed_segments(EK_START, n)
        .into_par_iter()
        .map(|(lo, hi)| -> Result<u64> {
            let block = sieve::sieve_block(lo, hi)?;
            let mut exceed = 0u64;
            for m in lo..=hi {
                let ll = (m as f64).ln().ln();
                if (block.omega(m) as f64 - ll).abs() >= ll.powf(0.5 + eps) {
                    exceed += 1;
                }
            }
            Ok(exceed)
        })
        .collect();
    let mut exceed = 0u64;
    for p in partials {
        exceed += p?;
    }
    let samples = n - EK_START + 1;
    Ok(ExceptionalReport { n, eps, exceed, samples, fraction: exceed as f64 / samples as f64 })
}

/// Report from [`an_bn_gap_density`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapDensityReport {
    pub n: u64,
    pub eps: f64,
    pub exceed: u64,
    /// n with floor(alpha n) < 3, where the Beatty-side normalization is
    /// undefined; excluded from `samples`.
    pub skipped: u64,
    pub samples: u64,
    pub fraction: f64,
}

/// Fraction of `n in [3, N]` where the two normalizations of
/// `omega(floor(alpha n))` disagree by more than `eps`: the index-normalized
/// `a_value` against `(omega(m) - ln ln m)/sqrt(ln ln m)` at `m = floor(alpha n)`.
pub fn an_bn_gap_density(alpha: &AlphaExact, n: u64, eps: f64) -> Result<GapDensityReport> {
    if n < EK_START {
        return Err(Error::domain(format!("need N >= {EK_START}")));
    }
    let scale = alpha.value_f64();
    let partials: Vec<Result<(u64, u64)>> = scaled_segments(EK_START, n, scale)
        .into_par_iter()
        .map(|(lo, hi)| -> Result<(u64, u64)> {
            let mut beatty = Vec::with_capacity((hi - lo + 1) as usize);
            for m in lo..=hi {
                beatty.push(alpha.beatty(m)?);
            }
            let last = beatty[beatty.len() - 1];
            let (mut exceed, mut skipped) = (0u64, 0u64);
            if last < EK_START {
                return Ok((0, hi - lo + 1));
            }
            let block = sieve::sieve_block(beatty[0].max(1), last)?;
            for m in lo..=hi {
                let img = beatty[(m - lo) as usize];
                if img < EK_START {
                    skipped += 1;
                    continue;
                }
                let w = block.omega(img) as u32;
                let a_value = ek_sample(m, 0, Some(w)).a_value.unwrap();
                let ll = (img as f64).ln().ln();
                let b_at_image = (w as f64 - ll) / ll.sqrt();
                if (a_value - b_at_image).abs() > eps {
                    exceed += 1;
                }
            }
            Ok((exceed, skipped))
        })
        .collect();
    let (mut exceed, mut skipped) = (0u64, 0u64);
    for p in partials {
        let (e, s) = p?;
        exceed += e;
        skipped += s;
    }
    let samples = n - EK_START + 1 - skipped;
    if samples == 0 {
        return Err(Error::domain("every index was skipped; alpha too small for this N"));
    }
    Ok(GapDensityReport { n, eps, exceed, skipped, samples, fraction: exceed as f64 / samples as f64 })
}

/// `a n + b` with `a >= 1`, evaluated over the positive integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LinearPoly {
    pub a: u64,
    pub b: u64,
}

impl LinearPoly {
    pub fn eval(&self, n: u64) -> u64 {
        self.a * n + self.b
    }

    /// No common root over the rationals: a1 b2 != a2 b1.
    pub fn coprime_with(&self, other: &LinearPoly) -> bool {
        (self.a as u128) * (other.b as u128) != (other.a as u128) * (self.b as u128)
    }
}

impl fmt::Display for LinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (1, 0) => write!(f, "n"),
            (1, b) => write!(f, "n+{b}"),
            (a, 0) => write!(f, "{a}n"),
            (a, b) => write!(f, "{a}n+{b}"),
        }
    }
}

impl FromStr for LinearPoly {
    type Err = Error;

    /// Accepts `n`, `3n`, `n+7`, `2n+1`, `2*n+1`.
    fn from_str(s: &str) -> Result<LinearPoly> {
        let bad = |detail: String| Error::Parse { what: "polynomial", detail };
        let s = s.trim().replace(' ', "");
        let Some(pos) = s.find('n') else {
            return Err(bad(format!("{s:?} has no 'n' term; constant polynomials not accepted")));
        };
        let coeff = s[..pos].trim_end_matches('*');
        let a: u64 = if coeff.is_empty() {
            1
        } else {
            coeff.parse().map_err(|e| bad(format!("coefficient {coeff:?}: {e}")))?
        };
        let rest = &s[pos + 1..];
        let b: u64 = if rest.is_empty() {
            0
        } else if let Some(c) = rest.strip_prefix('+') {
            c.parse().map_err(|e| bad(format!("constant {c:?}: {e}")))?
        } else {
            return Err(bad(format!("expected '+<constant>' after 'n', got {rest:?}")));
        };
        if a == 0 {
            return Err(bad("leading coefficient must be >= 1".into()));
        }
        Ok(LinearPoly { a, b })
    }
}

/// Which prime-divisor count feeds the normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountKind {
    Omega,
    BigOmega,
}

/// Joint histogram of `(count(f_i(n)) - ln ln n)/sqrt(ln ln n)` over
/// `n in [3, N]` for pairwise coprime linear polynomials. The histogram
/// carrier is 1-D or 2-D, so at most two polynomials are accepted.
pub fn polynomial_omega_joint(
    polys: &[LinearPoly],
    n: u64,
    counter: CountKind,
    bins: &BinSpec,
) -> Result<EmpiricalDistribution> {
    if polys.is_empty() || polys.len() > 2 {
        return Err(Error::domain("need 1 or 2 polynomials (histograms are 1-D or 2-D)"));
    }
    if n < EK_START {
        return Err(Error::domain(format!("need N >= {EK_START}")));
    }
    for i in 0..polys.len() {
        for j in i + 1..polys.len() {
            if !polys[i].coprime_with(&polys[j]) {
                return Err(Error::NonCoprimePolynomials(polys[i].to_string(), polys[j].to_string()));
            }
        }
    }
    let max_a = polys.iter().map(|p| p.a).max().unwrap();
    for p in polys {
        let top = (p.a as u128) * (n as u128) + p.b as u128;
        if top >= 1 << 62 {
            return Err(Error::Overflow { what: "polynomial value" });
        }
    }
    let partials: Vec<Result<EmpiricalDistribution>> = scaled_segments(EK_START, n, max_a as f64)
        .into_par_iter()
        .map(|(lo, hi)| -> Result<EmpiricalDistribution> {
            let blocks: Vec<ArithmeticBlock> = polys
                .iter()
                .map(|p| sieve::sieve_block(p.eval(lo), p.eval(hi)))
                .collect::<Result<_>>()?;
            let mut hist = if polys.len() == 1 {
                EmpiricalDistribution::new_1d(bins)?
            } else {
                EmpiricalDistribution::new_2d(bins, bins)?
            };
            for m in lo..=hi {
                let ll = (m as f64).ln().ln();
                let denom = ll.sqrt();
                let u: Vec<f64> = polys
                    .iter()
                    .zip(&blocks)
                    .map(|(p, blk)| {
                        let v = p.eval(m);
                        let c = match counter {
                            CountKind::Omega => blk.omega(v) as f64,
                            CountKind::BigOmega => blk.big_omega(v) as f64,
                        };
                        (c - ll) / denom
                    })
                    .collect();
                hist.push(&u);
            }
            Ok(hist)
        })
        .collect();
    let mut it = partials.into_iter();
    let mut hist = it.next().expect("at least one segment")?;
    for p in it {
        hist.merge(&p?)?;
    }
    debug_assert!(hist.counts_sum_to_total());
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::AlphaExact;

    fn indicator(lo: f64, hi: f64) -> impl Fn(f64) -> Complex64 {
        move |x| {
            if x >= lo && x <= hi {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
    }

    /// Fixed-grid composite Simpson of the Gaussian weight over [a, b];
    /// independent of the adaptive routine.
    fn gauss_mass_oracle(a: f64, b: f64) -> f64 {
        let panels = 1 << 20;
        let h = (b - a) / panels as f64;
        let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        let g = |x: f64| (-0.5 * x * x).exp() * norm;
        let mut s = g(a) + g(b);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * g(a + h * i as f64);
        }
        s * h / 3.0
    }

    #[test]
    fn gauss_functional_normalization_and_moments() {
        let one = gauss_functional(|_| Complex64::new(1.0, 0.0)).unwrap();
        assert!((one.re - 1.0).abs() < 1e-10, "{one}");
        let odd = gauss_functional(|x| Complex64::new(x, 0.0)).unwrap();
        assert!(odd.norm() < 1e-10, "{odd}");
        let second = gauss_functional(|x| Complex64::new(x * x, 0.0)).unwrap();
        assert!((second.re - 1.0).abs() < 1e-8, "{second}");
    }

    #[test]
    fn gauss_functional_indicator_matches_fixed_grid_oracle() {
        let got = gauss_functional(indicator(-1.0, 1.0)).unwrap();
        let want = gauss_mass_oracle(-1.0, 1.0);
        assert!((want - 0.682689).abs() < 1e-6, "oracle sanity: {want}");
        assert!((got.re - want).abs() < 2e-10, "{} vs {want}", got.re);
        assert!(got.im.abs() < 1e-12);
    }

    #[test]
    fn gauss_functional_agrees_with_erf_route() {
        let got = gauss_functional(indicator(-1.0, 1.0)).unwrap();
        let want = normal_cdf(1.0) - normal_cdf(-1.0);
        assert!((got.re - want).abs() < 1e-9, "{} vs {want}", got.re);
    }

    #[test]
    fn gauss_functional_depth_budget_error() {
        // bounded, deterministic, but rough at every scale: a bit scramble of
        // the argument, at an amplitude no accuracy floor can absorb; the
        // Simpson error estimate never decays on any subinterval
        let wild = |x: f64| {
            let h = x.to_bits().wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 48;
            Complex64::new(1e30 * h as f64, 0.0)
        };
        match gauss_functional(wild) {
            Err(Error::QuadratureDepth { .. }) => {}
            other => panic!("expected depth error, got {other:?}"),
        }
    }

    #[test]
    fn ek_sample_recompute_is_bit_exact() {
        for n in [3u64, 10, 1000, 123_456] {
            let s = ek_sample(n, 3, Some(2));
            let ll = (n as f64).ln().ln();
            assert_eq!(s.b_value, (3.0 - ll) / ll.sqrt());
            assert_eq!(s.a_value.unwrap(), (2.0 - ll) / ll.sqrt());
        }
    }

    #[test]
    fn joint_sqrt2_n100_total() {
        let alpha = AlphaExact::parse("sqrt:2").unwrap();
        let h = ek_empirical(EkMode::Joint, Some(&alpha), 100, &BinSpec::default()).unwrap();
        assert_eq!(h.total(), 98);
        assert!(h.counts_sum_to_total());
    }

    #[test]
    fn ek_mode_alpha_arity_checked() {
        let alpha = AlphaExact::parse("sqrt:2").unwrap();
        assert!(ek_empirical(EkMode::Plain, Some(&alpha), 100, &BinSpec::default()).is_err());
        assert!(ek_empirical(EkMode::Beatty, None, 100, &BinSpec::default()).is_err());
    }

    #[test]
    fn plain_mean_near_zero_at_desk_scale() {
        // direct mean of b-values via an independent factorization route
        let n = 1000u64;
        let mut sum = 0.0;
        for m in EK_START..=n {
            let w = crate::sieve::factorize(m).omega();
            sum += ek_sample(m, w, None).b_value;
        }
        let mean = sum / (n - EK_START + 1) as f64;
        assert!(mean.abs() < 0.5, "mean={mean}");
    }

    #[test]
    fn joint_marginals_equal_independent_histograms() {
        let alpha = AlphaExact::parse("sqrt:2").unwrap();
        let bins = BinSpec::default();
        let joint = ek_empirical(EkMode::Joint, Some(&alpha), 2000, &bins).unwrap();
        let plain = ek_empirical(EkMode::Plain, None, 2000, &bins).unwrap();
        let beatty = ek_empirical(EkMode::Beatty, Some(&alpha), 2000, &bins).unwrap();
        assert_eq!(joint.marginal(0).unwrap(), beatty);
        assert_eq!(joint.marginal(1).unwrap(), plain);
    }

    #[test]
    fn histogram_counts_and_cdf_basics() {
        let mut h = EmpiricalDistribution::new_1d(&BinSpec { bins: 4, lo: 0.0, hi: 4.0 }).unwrap();
        for &x in &[-1.0, 0.5, 1.5, 1.7, 3.9, 7.0] {
            h.push1(x);
        }
        assert_eq!(h.total(), 6);
        assert!(h.counts_sum_to_total());
        assert_eq!(h.cell(&[0]), 1); // underflow
        assert_eq!(h.cell(&[1]), 1);
        assert_eq!(h.cell(&[2]), 2);
        assert_eq!(h.cell(&[5]), 1); // overflow
        assert_eq!(h.overflow_total(), 2);
        assert_eq!(h.cdf(f64::NEG_INFINITY).unwrap(), 0.0);
        assert_eq!(h.cdf(f64::INFINITY).unwrap(), 1.0);
        let mut prev = 0.0;
        for x in [-2.0, -1.0, 0.0, 0.3, 1.0, 2.0, 3.99, 4.0, 10.0] {
            let c = h.cdf(x).unwrap();
            assert!(c >= prev && (0.0..=1.0).contains(&c));
            prev = c;
        }
    }

    #[test]
    fn rectangle_probability_conventions() {
        let alpha = AlphaExact::parse("sqrt:2").unwrap();
        let h = ek_empirical(EkMode::Joint, Some(&alpha), 3000, &BinSpec::default()).unwrap();
        let full = rectangle_probability(&h, &[(-1e30, 1e30), (-1e30, 1e30)]).unwrap();
        let want = 1.0 - h.overflow_total() as f64 / h.total() as f64;
        assert!((full - want).abs() < 1e-12, "{full} vs {want}");
        let empty = rectangle_probability(&h, &[(1.0, 1.0), (-1.0, 1.0)]).unwrap();
        assert_eq!(empty, 0.0);
        assert!(rectangle_probability(&h, &[(0.0, 1.0)]).is_err());
    }

    #[test]
    fn ks_point_mass_vs_normal() {
        let mut h = EmpiricalDistribution::new_1d(&BinSpec::default()).unwrap();
        for _ in 0..100 {
            h.push1(0.0);
        }
        let d = ks_distance(&h, normal_cdf).unwrap();
        assert!(d >= 0.5, "d={d}");
    }

    #[test]
    fn ks_discretized_normal_within_bin_resolution() {
        let spec = BinSpec::default();
        let mut h = EmpiricalDistribution::new_1d(&spec).unwrap();
        let edges = spec.edges().unwrap();
        // one pushed sample per expected millionth of Gaussian bin mass
        for j in 1..edges.len() {
            let mass = normal_cdf(edges[j]) - normal_cdf(edges[j - 1]);
            let center = 0.5 * (edges[j] + edges[j - 1]);
            for _ in 0..(mass * 1e6).round() as u64 {
                h.push1(center);
            }
        }
        let d = ks_distance(&h, normal_cdf).unwrap();
        // bin width 0.2, peak density ~0.4: discretization bound ~0.08
        assert!(d <= 0.09, "d={d}");
    }

    #[test]
    fn hardy_ramanujan_matches_direct_scan() {
        for &(n, eps) in &[(10_000u64, 10.0), (10_000, 0.25), (2_000, 0.1)] {
            let got = hardy_ramanujan_exceptional(n, eps).unwrap();
            let mut want = 0u64;
            for m in EK_START..=n {
                let ll = (m as f64).ln().ln();
                if (crate::sieve::factorize(m).omega() as f64 - ll).abs() >= ll.powf(0.5 + eps) {
                    want += 1;
                }
            }
            assert_eq!(got.exceed, want, "n={n} eps={eps}");
        }
    }

    #[test]
    fn hardy_ramanujan_huge_eps_only_trips_below_ln_ln_one() {
        // for n >= 16, ln ln n > 1 and the bound dwarfs any omega value at
        // this scale; below 16 the bound collapses instead and small n exceed
        let r = hardy_ramanujan_exceptional(10_000, 10.0).unwrap();
        let mut small = 0u64;
        for m in EK_START..=15 {
            let ll = (m as f64).ln().ln();
            if (crate::sieve::factorize(m).omega() as f64 - ll).abs() >= ll.powf(10.5) {
                small += 1;
            }
        }
        assert_eq!(r.exceed, small);
        assert!(r.fraction < 0.002);
    }

    #[test]
    fn hardy_ramanujan_fraction_shrinks_with_n() {
        let a = hardy_ramanujan_exceptional(10_000, 0.25).unwrap();
        let b = hardy_ramanujan_exceptional(100_000, 0.25).unwrap();
        assert!(b.fraction <= a.fraction, "{} vs {}", b.fraction, a.fraction);
        assert!(a.fraction < 0.5);
    }

    #[test]
    fn gap_density_examples() {
        let alpha = AlphaExact::parse("sqrt:2").unwrap();
        let r = an_bn_gap_density(&alpha, 10_000, 10.0).unwrap();
        assert_eq!(r.exceed, 0);
        assert_eq!(r.skipped, 0);

        // single sample n = 3: both normalizations of omega(4) = 1
        let r = an_bn_gap_density(&alpha, 3, 0.1).unwrap();
        assert_eq!(r.samples, 1);
        let ll3 = 3f64.ln().ln();
        let ll4 = 4f64.ln().ln();
        let gap = ((1.0 - ll3) / ll3.sqrt() - (1.0 - ll4) / ll4.sqrt()).abs();
        assert!(gap > 1.7 && gap < 1.8, "gap={gap}");
        assert_eq!(r.exceed, 1); // 0.1 < gap
        let r = an_bn_gap_density(&alpha, 3, gap + 0.01).unwrap();
        assert_eq!(r.exceed, 0);
    }

    #[test]
    fn gap_density_skips_small_beatty_values() {
        // alpha = sqrt(2)/4 ~ 0.3536: floor(alpha n) < 3 for n in 3..=8
        let alpha = AlphaExact::parse("surd:0,1,2,4").unwrap();
        let r = an_bn_gap_density(&alpha, 100, 0.5).unwrap();
        assert_eq!(r.skipped, 6);
        assert_eq!(r.samples, 92);
    }

    #[test]
    fn poly_parse_and_display() {
        assert_eq!("n".parse::<LinearPoly>().unwrap(), LinearPoly { a: 1, b: 0 });
        assert_eq!("n+1".parse::<LinearPoly>().unwrap(), LinearPoly { a: 1, b: 1 });
        assert_eq!("2n+1".parse::<LinearPoly>().unwrap(), LinearPoly { a: 2, b: 1 });
        assert_eq!("2*n+3".parse::<LinearPoly>().unwrap(), LinearPoly { a: 2, b: 3 });
        assert_eq!("3n".parse::<LinearPoly>().unwrap(), LinearPoly { a: 3, b: 0 });
        assert!("7".parse::<LinearPoly>().is_err());
        assert!("0n+1".parse::<LinearPoly>().is_err());
        assert!("n-1".parse::<LinearPoly>().is_err());
        assert_eq!(LinearPoly { a: 2, b: 1 }.to_string(), "2n+1");
        assert_eq!(LinearPoly { a: 1, b: 0 }.to_string(), "n");
    }

    #[test]
    fn poly_joint_counts_and_coprimality() {
        let n = LinearPoly { a: 1, b: 0 };
        let n1 = LinearPoly { a: 1, b: 1 };
        let h = polynomial_omega_joint(&[n, n1], 5000, CountKind::BigOmega, &BinSpec::default()).unwrap();
        assert_eq!(h.total(), 5000 - EK_START + 1);

        let double = LinearPoly { a: 2, b: 0 };
        match polynomial_omega_joint(&[n, double], 100, CountKind::Omega, &BinSpec::default()) {
            Err(Error::NonCoprimePolynomials(_, _)) => {}
            other => panic!("expected coprimality error, got {other:?}"),
        }
        assert!(LinearPoly { a: 2, b: 1 }.coprime_with(&LinearPoly { a: 3, b: 1 }));
    }

    #[test]
    fn poly_single_reduces_to_direct_histogram() {
        let n = 20_000u64;
        let h = polynomial_omega_joint(&[LinearPoly { a: 1, b: 0 }], n, CountKind::BigOmega, &BinSpec::default())
            .unwrap();
        let mut direct = EmpiricalDistribution::new_1d(&BinSpec::default()).unwrap();
        for m in EK_START..=n {
            let c = crate::sieve::factorize(m).big_omega() as f64;
            let ll = (m as f64).ln().ln();
            direct.push1((c - ll) / ll.sqrt());
        }
        assert_eq!(h, direct);
    }
}
