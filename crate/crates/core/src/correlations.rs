//! Correlation estimators along Beatty sequences: the coprimality density of
//! `(n, floor(alpha n))`, pushforward averages, twisted pair correlations,
//! multipoint Liouville products, short-interval statistics, and the
//! multiplicativity deviation `|a(mn) - theta(m) a(n)|`.
//!
//! Every estimator is a pure function of its arguments. Work splits over the
//! fixed segment partition of `[1, N]`; each segment owns its cursors and
//! accumulator and segments merge in index order, so the result does not
//! depend on the worker count. Logarithmic averages divide by the
//! accumulated weight mass `sum 1/n` rather than `ln N`; the two normalizers
//! agree in the limit and the mass form leaves constant sequences fixed at
//! every `N`.

use crate::alpha::{AlphaExact, FracStream};
use crate::averages::{Accumulator, AverageKind};
use crate::distributions::{ek_sample, CountKind, EK_START};
use crate::error::{Error, Result};
use crate::phase;
use crate::sieve::{factorize, fixed_segments, is_prime, BlockCursor};
use crate::sum::ComplexSum;
use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// A bounded arithmetic sequence built from sieve data, linear-phase
/// exponentials, and Beatty pullbacks. Values come from [`ExprStream`] so a
/// scan touches each sieve block once.
#[derive(Clone)]
pub enum SequenceExpr {
    Liouville,
    Mobius,
    /// `F((count(n) - ln ln n)/sqrt(ln ln n))` with `count` one of the two
    /// prime-divisor counters; indices below the normalization start are 0.
    OmegaNormalized {
        f: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
        counter: CountKind,
        label: String,
    },
    /// `n -> e(c n)`.
    ExpLinear(f64),
    Constant(Complex64),
    Product(Vec<SequenceExpr>),
    /// `n -> inner(floor(alpha n))`; indices with `floor(alpha n) = 0` give 0.
    BeattyPullback { alpha: AlphaExact, inner: Box<SequenceExpr> },
}

impl SequenceExpr {
    pub fn omega_normalized<F>(f: F, counter: CountKind, label: impl Into<String>) -> SequenceExpr
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        SequenceExpr::OmegaNormalized { f: Arc::new(f), counter, label: label.into() }
    }

    pub fn constant_real(x: f64) -> SequenceExpr {
        SequenceExpr::Constant(Complex64::new(x, 0.0))
    }

    pub fn beatty_pullback(alpha: AlphaExact, inner: SequenceExpr) -> SequenceExpr {
        SequenceExpr::BeattyPullback { alpha, inner: Box::new(inner) }
    }

    pub fn describe(&self) -> String {
        match self {
            SequenceExpr::Liouville => "liouville".into(),
            SequenceExpr::Mobius => "mobius".into(),
            SequenceExpr::OmegaNormalized { counter, label, .. } => {
                let c = match counter {
                    CountKind::Omega => "omega",
                    CountKind::BigOmega => "big_omega",
                };
                format!("omega_normalized({label},{c})")
            }
            SequenceExpr::ExpLinear(c) => format!("exp_linear({c})"),
            SequenceExpr::Constant(z) => format!("constant({},{})", z.re, z.im),
            SequenceExpr::Product(v) => {
                let parts: Vec<String> = v.iter().map(|e| e.describe()).collect();
                format!("product({})", parts.join("*"))
            }
            SequenceExpr::BeattyPullback { alpha, inner } => {
                format!("pullback({alpha},{})", inner.describe())
            }
        }
    }

    /// Fresh evaluation stream; see [`ExprStream::at`] for the access contract.
    pub fn stream(&self) -> ExprStream {
        ExprStream { root: Node::build(self) }
    }
}

impl fmt::Debug for SequenceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

enum Node {
    Liouville(BlockCursor),
    Mobius(BlockCursor),
    Omega {
        cursor: BlockCursor,
        f: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
        counter: CountKind,
    },
    ExpLinear { step: u128 },
    Constant(Complex64),
    Product(Vec<Node>),
    Pullback { alpha: AlphaExact, inner: Box<Node> },
}

impl Node {
    fn build(expr: &SequenceExpr) -> Node {
        match expr {
            SequenceExpr::Liouville => Node::Liouville(BlockCursor::new()),
            SequenceExpr::Mobius => Node::Mobius(BlockCursor::new()),
            SequenceExpr::OmegaNormalized { f, counter, .. } => Node::Omega {
                cursor: BlockCursor::new(),
                f: f.clone(),
                counter: *counter,
            },
            SequenceExpr::ExpLinear(c) => Node::ExpLinear { step: phase::unit_fixed(*c) },
            SequenceExpr::Constant(z) => Node::Constant(*z),
            SequenceExpr::Product(v) => Node::Product(v.iter().map(Node::build).collect()),
            SequenceExpr::BeattyPullback { alpha, inner } => {
                Node::Pullback { alpha: alpha.clone(), inner: Box::new(Node::build(inner)) }
            }
        }
    }

    fn at(&mut self, arg: u64) -> Result<Complex64> {
        match self {
            Node::Liouville(c) => {
                debug_assert!(arg >= 1);
                Ok(Complex64::new(c.liouville(arg) as f64, 0.0))
            }
            Node::Mobius(c) => {
                debug_assert!(arg >= 1);
                Ok(Complex64::new(c.mobius(arg) as f64, 0.0))
            }
            Node::Omega { cursor, f, counter } => {
                if arg < EK_START {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let count = match counter {
                    CountKind::Omega => cursor.omega(arg),
                    CountKind::BigOmega => cursor.big_omega(arg),
                };
                Ok(f(ek_sample(arg, count as u32, None).b_value))
            }
            Node::ExpLinear { step } => Ok(phase::e_at(*step, arg)),
            Node::Constant(z) => Ok(*z),
            Node::Product(children) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for child in children {
                    acc *= child.at(arg)?;
                }
                Ok(acc)
            }
            Node::Pullback { alpha, inner } => {
                let m = alpha.beatty(arg)?;
                if m == 0 {
                    // floor(alpha*arg) has not reached 1 yet; the finitely
                    // many such terms carry no weight in any limit.
                    Ok(Complex64::new(0.0, 0.0))
                } else {
                    inner.at(m)
                }
            }
        }
    }
}

/// Stateful evaluator for one scan. Calls must use non-decreasing arguments
/// for block reuse; out-of-order access stays correct but re-sieves.
pub struct ExprStream {
    root: Node,
}

impl ExprStream {
    pub fn at(&mut self, arg: u64) -> Result<Complex64> {
        self.root.at(arg)
    }
}

/// Nonzero weights on primes extended to all of `N` by complete
/// multiplicativity: `theta(p^e q^f) = theta_p^e theta_q^f`.
#[derive(Clone, Debug)]
pub struct ThetaAssignment {
    default: Option<Complex64>,
    overrides: BTreeMap<u64, Complex64>,
}

impl ThetaAssignment {
    pub fn empty() -> ThetaAssignment {
        ThetaAssignment { default: None, overrides: BTreeMap::new() }
    }

    /// Same weight at every prime.
    pub fn uniform(z: Complex64) -> Result<ThetaAssignment> {
        if z.norm_sqr() == 0.0 {
            return Err(Error::domain("theta weights must be nonzero"));
        }
        Ok(ThetaAssignment { default: Some(z), overrides: BTreeMap::new() })
    }

    pub fn set(&mut self, p: u64, z: Complex64) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::domain(format!("theta is assigned on primes; {p} is not prime")));
        }
        if z.norm_sqr() == 0.0 {
            return Err(Error::domain("theta weights must be nonzero"));
        }
        self.overrides.insert(p, z);
        Ok(())
    }

    pub fn at_prime(&self, p: u64) -> Result<Complex64> {
        self.overrides
            .get(&p)
            .copied()
            .or(self.default)
            .ok_or(Error::ThetaUndefined { prime: p })
    }

    /// Value at an arbitrary `m >= 1` through the multiplicative extension.
    pub fn value(&self, m: u64) -> Result<Complex64> {
        if m == 0 {
            return Err(Error::domain("theta(0) is undefined"));
        }
        let mut out = Complex64::new(1.0, 0.0);
        for &(p, e) in &factorize(m).factors {
            let tp = self.at_prime(p)?;
            for _ in 0..e {
                out *= tp;
            }
        }
        Ok(out)
    }
}

/// The pair/multipoint estimators average over `n`, so only the two
/// `n`-indexed kinds make sense here.
fn require_n_kind(kind: AverageKind) -> Result<()> {
    if kind == AverageKind::PrimeLogarithmic {
        return Err(Error::domain(
            "prime-logarithmic averaging ranges over primes and does not apply here",
        ));
    }
    Ok(())
}

fn require_positive(alpha: &AlphaExact) -> Result<()> {
    if alpha.value_f64() <= 0.0 {
        return Err(Error::domain("alpha must be positive to index a Beatty sequence"));
    }
    Ok(())
}

/// Map segments of `[1, n]` to accumulators in parallell and merge in index
/// order.
fn par_accumulate<F>(n: u64, kind: AverageKind, per_segment: F) -> Result<Accumulator>
where
    F: Fn(u64, u64) -> Result<Accumulator> + Send + Sync,
{
    let parts: Vec<Result<Accumulator>> =
        fixed_segments(1, n).into_par_iter().map(|(lo, hi)| per_segment(lo, hi)).collect();
    let mut total = Accumulator::new(kind);
    for part in parts {
        total.merge(&part?);
    }
    Ok(total)
}

/// `E_{k<=n} expr(k)` under `kind`.
pub fn expr_average(expr: &SequenceExpr, n: u64, kind: AverageKind) -> Result<Complex64> {
    require_n_kind(kind)?;
    if n < 1 {
        return Err(Error::domain("averages need n >= 1"));
    }
    par_accumulate(n, kind, |lo, hi| {
        let mut stream = expr.stream();
        let mut acc = Accumulator::new(kind);
        for k in lo..=hi {
            acc.push(k, stream.at(k)?);
        }
        Ok(acc)
    })?
    .mean()
}

/// Density of `gcd(n, floor(alpha n)) = 1` up to `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WatsonReport {
    pub n: u64,
    pub coprime: u64,
    pub fraction: f64,
}

pub fn watson_density(alpha: &AlphaExact, n: u64) -> Result<WatsonReport> {
    alpha.require_irrational()?;
    require_positive(alpha)?;
    if n < 1 {
        return Err(Error::domain("watson density needs n >= 1"));
    }
    let counts: Vec<Result<u64>> = fixed_segments(1, n)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut hits = 0u64;
            for k in lo..=hi {
                let m = alpha.beatty(k)?;
                if k.gcd(&m) == 1 {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .collect();
    let mut coprime = 0u64;
    for c in counts {
        coprime += c?;
    }
    Ok(WatsonReport { n, coprime, fraction: coprime as f64 / n as f64 })
}

/// `E_{k<=n} expr(floor(alpha k))` under `kind`; `alpha > 1` keeps the
/// pullback inside the positive integers.
pub fn pushforward_average(
    expr: &SequenceExpr,
    alpha: &AlphaExact,
    n: u64,
    kind: AverageKind,
) -> Result<Complex64> {
    alpha.require_irrational()?;
    if alpha.value_f64() <= 1.0 {
        return Err(Error::domain("pushforward averages need alpha > 1"));
    }
    require_n_kind(kind)?;
    if n < 1 {
        return Err(Error::domain("averages need n >= 1"));
    }
    if let SequenceExpr::Constant(z) = expr {
        // A constant is a fixed point of every weighted mean; evaluate the
        // identity instead of averaging rounded copies of it.
        return Ok(*z);
    }
    expr_average(&SequenceExpr::beatty_pullback(alpha.clone(), expr.clone()), n, kind)
}

/// `E_{k<=n} lambda(k) lambda(floor(alpha k))` under `kind`.
pub fn chowla_beatty(alpha: &AlphaExact, n: u64, kind: AverageKind) -> Result<Complex64> {
    alpha.require_irrational()?;
    require_positive(alpha)?;
    require_n_kind(kind)?;
    if n < 1 {
        return Err(Error::domain("averages need n >= 1"));
    }
    let expr = SequenceExpr::Product(vec![
        SequenceExpr::Liouville,
        SequenceExpr::beatty_pullback(alpha.clone(), SequenceExpr::Liouville),
    ]);
    expr_average(&expr, n, kind)
}

/// `E_{k<=n} |expr(m (d1 k + d2)) - theta(m) expr(d1 k + d2)|` under `kind`.
/// Zero for completely multiplicative `expr` with matching `theta`.
pub fn bmai_deviation(
    expr: &SequenceExpr,
    theta: &ThetaAssignment,
    m: u64,
    d1: u64,
    d2: u64,
    n: u64,
    kind: AverageKind,
) -> Result<f64> {
    if m < 2 {
        return Err(Error::domain("deviation needs m >= 2"));
    }
    if d1 < 1 {
        return Err(Error::domain("deviation needs d1 >= 1"));
    }
    require_n_kind(kind)?;
    if n < 1 {
        return Err(Error::domain("averages need n >= 1"));
    }
    let theta_m = theta.value(m)?;
    d1.checked_mul(n)
        .and_then(|x| x.checked_add(d2))
        .and_then(|x| x.checked_mul(m))
        .ok_or(Error::Overflow { what: "multiplicativity deviation argument" })?;
    let acc = par_accumulate(n, kind, |lo, hi| {
        let mut scaled = expr.stream();
        let mut plain = expr.stream();
        let mut acc = Accumulator::new(kind);
        for k in lo..=hi {
            let u = d1 * k + d2;
            let dev = (scaled.at(m * u)? - theta_m * plain.at(u)?).norm();
            acc.push(k, Complex64::new(dev, 0.0));
        }
        Ok(acc)
    })?;
    Ok(acc.mean()?.re)
}

/// How the inner window of [`short_interval_stat`] advances with `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    /// Overlapping windows `n+1 ..= n+H`.
    Unit,
    /// Disjoint windows `Hn+1 ..= Hn+H`.
    Arithmetic,
}

/// Cap on the total argument range a short-interval scan may sieve.
pub const SHORT_INTERVAL_BUDGET: u64 = 1 << 32;

/// Sliding windows re-sum their ring at fixed absolute positions, so window
/// values are bit-identical no matter where a segment starts.
const WINDOW_RESUM_PERIOD: u64 = 1024;

/// `E_{k<=n} | (1/H) sum_{h<=H} expr(arg(k,h)) |` with `arg` chosen by
/// `spacing`.
pub fn short_interval_stat(
    expr: &SequenceExpr,
    n: u64,
    h: u64,
    spacing: Spacing,
) -> Result<f64> {
    if n < 1 || h < 1 {
        return Err(Error::domain("short-interval statistics need n >= 1 and h >= 1"));
    }
    let acc = match spacing {
        Spacing::Unit => {
            n.checked_add(h).ok_or(Error::Overflow { what: "short interval argument" })?;
            short_interval_unit(expr, n, h)
        }
        Spacing::Arithmetic => {
            let len = h
                .checked_mul(n)
                .and_then(|x| x.checked_add(h))
                .ok_or(Error::Overflow { what: "short interval argument" })?;
            if len > SHORT_INTERVAL_BUDGET {
                return Err(Error::RangeTooLarge { len, budget: SHORT_INTERVAL_BUDGET });
            }
            short_interval_arithmetic(expr, n, h)
        }
    }?;
    Ok(acc.mean()?.re)
}

fn resum(ring: &[Complex64]) -> Complex64 {
    let mut s = ComplexSum::new();
    for &v in ring {
        s.add(v);
    }
    s.sum()
}

fn short_interval_unit(expr: &SequenceExpr, n: u64, h: u64) -> Result<Accumulator> {
    // Keeping the re-sum cost below one pass: longer windows re-sum less
    // often; the drift between re-sums stays ~h*eps inside a window of mass
    // ~h, which the division by H scales back down.
    let period = WINDOW_RESUM_PERIOD.max(h);
    par_accumulate(n, AverageKind::Cesaro, |lo, hi| {
        let mut stream = expr.stream();
        let mut acc = Accumulator::new(AverageKind::Cesaro);
        let mut ring = vec![Complex64::new(0.0, 0.0); h as usize];
        // Start the slide chain at the re-sum checkpoint at or below lo so
        // every window value is reproduced exactly as a full scan would.
        let start = lo - lo % period;
        for a in start + 1..=start + h {
            ring[(a % h) as usize] = stream.at(a)?;
        }
        let mut window = resum(&ring);
        for k in start..=hi {
            if k > start && k % period == 0 {
                window = resum(&ring);
            }
            if k >= lo {
                acc.push(k, Complex64::new(window.norm() / h as f64, 0.0));
                if k == hi {
                    break;
                }
            }
            // W(k) -> W(k+1): f(k+1) leaves, f(k+1+h) enters the same slot.
            let incoming = stream.at(k + 1 + h)?;
            let slot = ((k + 1) % h) as usize;
            window += incoming - ring[slot];
            ring[slot] = incoming;
        }
        Ok(acc)
    })
}

fn short_interval_arithmetic(expr: &SequenceExpr, n: u64, h: u64) -> Result<Accumulator> {
    par_accumulate(n, AverageKind::Cesaro, |lo, hi| {
        let mut stream = expr.stream();
        let mut acc = Accumulator::new(AverageKind::Cesaro);
        for k in lo..=hi {
            let base = h * k;
            let mut window = ComplexSum::new();
            for a in base + 1..=base + h {
                window.add(stream.at(a)?);
            }
            acc.push(k, Complex64::new(window.sum().norm() / h as f64, 0.0));
        }
        Ok(acc)
    })
}

/// `E_{k<=n} expr(p k + i) conj(expr(q k + j)) e(k beta)` under `kind`.
pub fn twisted_pair_correlation(
    expr: &SequenceExpr,
    p: u64,
    q: u64,
    i: u64,
    j: u64,
    beta: &AlphaExact,
    n: u64,
    kind: AverageKind,
) -> Result<Complex64> {
    if !is_prime(p) || !is_prime(q) {
        return Err(Error::domain(format!("pair moduli must be prime, got {p} and {q}")));
    }
    if i >= p || j >= q {
        return Err(Error::domain("offsets must satisfy 0 <= i < p and 0 <= j < q"));
    }
    if p == q && i == 0 && j == 0 {
        return Err(Error::domain(
            "p = q with both offsets zero degenerates to an untwisted square",
        ));
    }
    beta.require_irrational()?;
    require_n_kind(kind)?;
    if n < 1 {
        return Err(Error::domain("averages need n >= 1"));
    }
    p.max(q)
        .checked_mul(n)
        .and_then(|x| x.checked_add(i.max(j)))
        .ok_or(Error::Overflow { what: "pair correlation argument" })?;
    let acc = par_accumulate(n, kind, |lo, hi| {
        let mut left = expr.stream();
        let mut right = expr.stream();
        let mut frac = FracStream::new(beta, lo)?;
        let mut acc = Accumulator::new(kind);
        for k in lo..=hi {
            let (idx, ph) = frac.next_frac();
            debug_assert_eq!(idx, k);
            let v = left.at(p * k + i)? * right.at(q * k + j)?.conj() * phase::e(ph.to_f64());
            acc.push(k, v);
        }
        Ok(acc)
    })?;
    acc.mean()
}

/// `E^log_{k<=n} e(k beta) prod_j lambda(k + shift_j)`; without `beta` the
/// plain logarithmic Chowla correlation. Indices where some `k + shift < 1`
/// are left out.
pub fn liouville_multipoint_twisted(
    shifts: &[i64],
    beta: Option<&AlphaExact>,
    n: u64,
) -> Result<Complex64> {
    let mut sorted = shifts.to_vec();
    sorted.sort_unstable();
    if shifts.is_empty() {
        return Err(Error::domain("at least one shift is required"));
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicateShifts);
    }
    if let Some(b) = beta {
        b.require_irrational()?;
    }
    if n < 1 {
        return Err(Error::domain("averages need n >= 1"));
    }
    let min_shift = *sorted.first().unwrap();
    let max_shift = *sorted.last().unwrap();
    if n as i128 + max_shift.max(0) as i128 > u64::MAX as i128 {
        return Err(Error::Overflow { what: "multipoint correlation argument" });
    }
    let first = (1i128 - min_shift.min(0) as i128) as u64;
    if first > n {
        return Err(Error::domain(
            "every index up to n leaves some k + shift below 1; nothing to average",
        ));
    }
    let kind = AverageKind::Logarithmic;
    let acc = par_accumulate(n, kind, |lo, hi| {
        let mut acc = Accumulator::new(kind);
        let lo = lo.max(first);
        if lo > hi {
            return Ok(acc);
        }
        let mut cursors: Vec<BlockCursor> = shifts.iter().map(|_| BlockCursor::new()).collect();
        let mut frac = beta.map(|b| FracStream::new(b, lo)).transpose()?;
        for k in lo..=hi {
            let mut sign = 1i32;
            for (c, &shift) in cursors.iter_mut().zip(shifts) {
                sign *= c.liouville((k as i64 + shift) as u64) as i32;
            }
            let v = match &mut frac {
                Some(f) => {
                    let (idx, ph) = f.next_frac();
                    debug_assert_eq!(idx, k);
                    phase::e(ph.to_f64()) * sign as f64
                }
                None => Complex64::new(sign as f64, 0.0),
            };
            acc.push(k, v);
        }
        Ok(acc)
    })?;
    acc.mean()
}

/// `E_{k<=n} lambda(k) prod_i lambda(floor(alpha_i k))` under `kind`.
/// Conjecture-backed; the value always ships with an exploratory warning,
/// plus a dependence warning when two alphas share a quadratic core.
pub fn multi_beatty_correlation(
    alphas: &[AlphaExact],
    n: u64,
    kind: AverageKind,
) -> Result<(Complex64, Vec<String>)> {
    if alphas.is_empty() {
        return Err(Error::domain("at least one alpha is required"));
    }
    for a in alphas {
        a.require_irrational()?;
        require_positive(a)?;
    }
    require_n_kind(kind)?;
    if n < 1 {
        return Err(Error::domain("averages need n >= 1"));
    }
    let mut warnings = vec![
        "exploratory: conjecture-backed estimator; no theorem controls convergence".to_string(),
    ];
    for a in 0..alphas.len() {
        for b in a + 1..alphas.len() {
            if let (Some(ca), Some(cb)) =
                (alphas[a].squarefree_core(), alphas[b].squarefree_core())
            {
                if ca == cb {
                    warnings.push(format!(
                        "alphas {} and {} are rationally dependent (shared quadratic core {}); \
                         the independence hypothesis fails",
                        alphas[a], alphas[b], ca
                    ));
                }
            }
        }
    }
    let mut factors = vec![SequenceExpr::Liouville];
    factors.extend(
        alphas
            .iter()
            .map(|a| SequenceExpr::beatty_pullback(a.clone(), SequenceExpr::Liouville)),
    );
    let value = expr_average(&SequenceExpr::Product(factors), n, kind)?;
    Ok((value, warnings))
}

/// `E_{k<=n} lambda(k) e(c floor(alpha k))` (plain average). Integer `c`
/// reproduces the `c = 0` value bit for bit because the phase step is the
/// fractional part of `c`.
pub fn beatty_exponential_correlation(
    alpha: &AlphaExact,
    c: f64,
    n: u64,
) -> Result<Complex64> {
    alpha.require_irrational()?;
    require_positive(alpha)?;
    if n < 1 {
        return Err(Error::domain("averages need n >= 1"));
    }
    if !c.is_finite() {
        return Err(Error::domain("frequency c must be finite"));
    }
    let step = phase::unit_fixed(c);
    let acc = par_accumulate(n, AverageKind::Cesaro, |lo, hi| {
        let mut lam = BlockCursor::new();
        let mut acc = Accumulator::new(AverageKind::Cesaro);
        for k in lo..=hi {
            let m = alpha.beatty(k)?;
            acc.push(k, phase::e_at(step, m) * lam.liouville(k) as f64);
        }
        Ok(acc)
    })?;
    acc.mean()
}

/// Checkpoints for a convergence trace: the estimator re-runs at each of
/// these ends. Duplicates collapse and zero-length prefixes drop out.
pub fn trace_checkpoints(n: u64) -> Vec<u64> {
    let mut points: Vec<u64> = [n / 10, n / 5, n / 2, n].into_iter().filter(|&x| x >= 1).collect();
    points.dedup();
    points
}

/// One estimator run in the shape every front end emits. `runtime_ms` stays
/// `None` in files so identical configurations serialize identically; live
/// reporting fills it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimatorRecord {
    pub estimator: String,
    pub parameters: BTreeMap<String, String>,
    pub n: u64,
    pub kind: Option<AverageKind>,
    pub value_re: f64,
    pub value_im: f64,
    pub runtime_ms: Option<u64>,
    pub warnings: Vec<String>,
}
