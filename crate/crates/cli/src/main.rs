//! Command-line front end. Every subcommand prints one JSON document to
//! stdout with the resolved config echoed back, and optionally writes the
//! same document (minus runtime) and a CSV artifact to files. Outputs are
//! deterministic: reruns with the same configuration produce byte-identical
//! files regardless of thread count.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use beatkit_core::almost_periodic::{beatty_indicator_poly, dpi_indicator_poly, l1_error_empirical};
use beatkit_core::alpha::AlphaExact;
use beatkit_core::averages::{
    average_identity_report, geometric_exponential_bound, kbsz_bound, turan_kubilius,
    AverageKind, BoundedSequence, Variant,
};
use beatkit_core::correlations::{
    chowla_beatty, liouville_multipoint_twisted, multi_beatty_correlation, pushforward_average,
    short_interval_stat, trace_checkpoints, twisted_pair_correlation, watson_density,
    EstimatorRecord, SequenceExpr, Spacing,
};
use beatkit_core::distributions::{
    an_bn_gap_density, ek_empirical, gauss_functional, hardy_ramanujan_exceptional, ks_distance,
    normal_cdf, polynomial_omega_joint, rectangle_probability, BinSpec, CountKind, EkMode,
    LinearPoly,
};
use beatkit_core::error::Error;
use beatkit_core::sieve::sieve_block;

const MAX_N: u64 = 1_000_000_000;
const MAX_S: u64 = 1_000_000;
const MAX_H: u64 = 1_000_000;
const MAX_K: u32 = 100_000;
const MAX_BINS: usize = 4_096;
const MAX_SHIFTS: usize = 64;

/// Estimators and verification suites for multiplicative statistics along
/// Beatty sequences.
///
/// Sequence expressions (--f): factors joined by '*', each one of
/// `liouville`, `mobius`, `exp:<c>` (n -> e(c n)), `const:<re>[,<im>]`,
/// `omega:<name>`, `bigomega:<name>` where <name> is `exp_i` (F(x) = e^{ix})
/// or `odd_clip` (F(x) = x on [-4,4], 0 outside).
///
/// Alphas and betas use the exact grammar `sqrt:<d>`, `surd:<a>,<b>,<d>,<c>`
/// for (a + b sqrt(d))/c, or `dec:<digits>`.
#[derive(Parser, Debug)]
#[command(name = "beatkit", version, about)]
struct Cli {
    /// Worker threads for the global pool (default: one per CPU). Outputs do
    /// not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the output document (without runtime) to this JSON file.
    #[arg(long, global = true)]
    out_json: Option<PathBuf>,

    /// Write the subcommand's CSV artifact (trace, histogram, curve, grid,
    /// or block dump) to this file.
    #[arg(long, global = true)]
    out_csv: Option<PathBuf>,

    /// Skip the convergence re-runs at N/10, N/5, N/2.
    #[arg(long, global = true, default_value_t = false)]
    no_trace: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump one sieve block as CSV (n, omega, big_omega, liouville, mobius).
    Sieve {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
    },
    /// Density of n <= N with gcd(n, floor(alpha n)) = 1.
    Watson {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: u64,
    },
    /// E lambda(n) lambda(floor(alpha n)) under the chosen average.
    ChowlaBeatty {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: u64,
        /// cesaro | log
        #[arg(long, default_value = "log")]
        kind: String,
    },
    /// E f(floor(alpha n)) under the chosen average.
    Pushforward {
        #[arg(long)]
        f: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "cesaro")]
        kind: String,
    },
    /// Histogram of normalized prime-divisor counts; 1-D modes also report
    /// the KS distance to the standard normal.
    ErdosKac {
        /// plain | beatty | joint
        #[arg(long, default_value = "plain")]
        mode: String,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 40)]
        bins: usize,
        #[arg(long, default_value_t = -4.0)]
        bin_lo: f64,
        #[arg(long, default_value_t = 4.0)]
        bin_hi: f64,
    },
    /// Joint histogram of normalized counts along one or two coprime linear
    /// polynomials (--poly once or twice).
    TanakaJoint {
        /// Linear polynomial like "n", "2n+1"; repeat for a 2-D histogram.
        #[arg(long = "poly", required = true)]
        polys: Vec<String>,
        /// omega | big_omega
        #[arg(long, default_value = "omega")]
        counter: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 40)]
        bins: usize,
        #[arg(long, default_value_t = -4.0)]
        bin_lo: f64,
        #[arg(long, default_value_t = 4.0)]
        bin_hi: f64,
    },
    /// Fraction of n <= N with |omega(n) - ln ln n| >= (ln ln n)^(1/2+eps).
    HardyRamanujan {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps: f64,
    },
    /// Fraction of n where the two normalizations of omega(floor(alpha n))
    /// differ by more than eps.
    GapDensity {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps: f64,
    },
    /// E_n |E_{h<=H} f(...)| with unit (n+h) or arithmetic (Hn+h) spacing.
    ShortInterval {
        #[arg(long)]
        f: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        h: u64,
        /// unit | arithmetic
        #[arg(long, default_value = "unit")]
        spacing: String,
    },
    /// E f(pn+i) conj(f(qn+j)) e(n beta) under the chosen average.
    TwistedPair {
        #[arg(long)]
        f: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        i: u64,
        #[arg(long)]
        j: u64,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "cesaro")]
        kind: String,
    },
    /// E^log e(n beta) prod_j lambda(n + shift_j); omit --beta for the plain
    /// logarithmic correlation.
    Multipoint {
        /// Comma-separated distinct integers, e.g. "0,1".
        #[arg(long)]
        shifts: String,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        n: u64,
    },
    /// E lambda(n) prod_i lambda(floor(alpha_i n)); exploratory.
    MultiBeatty {
        /// Repeat --alpha for each factor.
        #[arg(long = "alpha", required = true)]
        alphas: Vec<String>,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "cesaro")]
        kind: String,
    },
    /// Empirical L1 error of the trigonometric indicator approximation over
    /// a grid of truncation degrees.
    FourierBeatty {
        #[arg(long)]
        alpha: String,
        /// Comma-separated truncation degrees.
        #[arg(long, default_value = "25,50,100,200,400")]
        k_grid: String,
        /// Sample length for the empirical error.
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        /// Approximate the cell indicator for this prime instead of the full
        /// Beatty indicator (requires --i).
        #[arg(long)]
        p: Option<u64>,
        /// Cell index in [0, p).
        #[arg(long)]
        i: Option<u64>,
    },
    /// Orthogonality inequality check; exits 1 when the bound fails.
    Kbsz {
        #[arg(long)]
        f: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        s: u64,
        /// cesaro | log
        #[arg(long, default_value = "cesaro")]
        variant: String,
    },
    /// Dispersion of #{p <= S : p | n} around its prime-harmonic mean.
    TuranKubilius {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        s: u64,
        /// cesaro | log
        #[arg(long, default_value = "cesaro")]
        variant: String,
    },
    /// Diagnostics d1, d2, d3 relating logarithmic and Cesaro averages.
    AvgIdentities {
        #[arg(long, default_value = "liouville")]
        f: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        k: u64,
    },
    /// Geometric-sum bound |E e(n beta)| <= 2/(N |1-e(beta)|); exits 1 on
    /// any failure. Without --beta/--n, runs the fixed demo grid
    /// beta = (2j+1)/40 for j = 0..19 times N in {1e2,1e3,1e4,1e5,1e6}.
    GeomBound {
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        n: Option<u64>,
    },
}

/// Resolved configuration echoed into every output document.
#[derive(Serialize, Clone, Default)]
struct ConfigEcho {
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alphas: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polys: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shifts: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_grid: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lo: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hi: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    i: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    j: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    variant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spacing: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counter: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bin_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bin_hi: Option<f64>,
    trace: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out_json: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out_csv: Option<String>,
}

#[derive(Serialize, Clone, Copy)]
struct TracePoint {
    n: u64,
    value_re: f64,
    value_im: f64,
}

#[derive(Serialize)]
struct Document {
    config: ConfigEcho,
    record: EstimatorRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    trace: Vec<TracePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    checks: Option<Value>,
}

struct RunOutput {
    record: EstimatorRecord,
    report: Option<Value>,
    trace: Vec<TracePoint>,
    checks: Option<Value>,
    csv: Option<String>,
    check_failed: bool,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t < 1 || t > 1024 {
            return fail(&Error::domain("--threads must be in 1..=1024"));
        }
        // Ignore the error when a pool already exists (tests call in-process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let started = Instant::now();
    let (config, result) = execute(&cli);
    match result {
        Ok(mut out) => {
            out.record.runtime_ms = Some(started.elapsed().as_millis() as u64);
            let doc = Document {
                config,
                record: out.record,
                report: out.report,
                trace: out.trace,
                checks: out.checks,
            };
            println!("{}", serde_json::to_string(&doc).expect("document serializes"));
            if let Some(path) = &cli.out_json {
                let mut filed = Document {
                    config: doc.config.clone(),
                    record: doc.record.clone(),
                    report: doc.report.clone(),
                    trace: doc.trace.clone(),
                    checks: doc.checks.clone(),
                };
                filed.record.runtime_ms = None;
                let body = serde_json::to_string_pretty(&filed).expect("document serializes");
                if let Err(e) = fs::write(path, body + "\n") {
                    return fail(&Error::domain(format!("cannot write {}: {e}", path.display())));
                }
            }
            if let Some(path) = &cli.out_csv {
                match &out.csv {
                    Some(body) => {
                        if let Err(e) = fs::write(path, body) {
                            return fail(&Error::domain(format!(
                                "cannot write {}: {e}",
                                path.display()
                            )));
                        }
                    }
                    None => {
                        return fail(&Error::domain(
                            "this subcommand has no CSV artifact; drop --out-csv",
                        ))
                    }
                }
            }
            if out.check_failed {
                1
            } else {
                0
            }
        }
        Err(e) => fail(&e),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PrecisionExhausted { .. } | Error::Overflow { .. } | Error::QuadratureDepth { .. } => 3,
        _ => 2,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } => "parse",
        Error::RationalAlpha { .. } => "rational_alpha",
        Error::RangeTooLarge { .. } => "range_too_large",
        Error::PrecisionExhausted { .. } => "precision_exhausted",
        Error::Overflow { .. } => "overflow",
        Error::Domain(_) => "domain",
        Error::NonCoprimePolynomials(..) => "non_coprime_polynomials",
        Error::DuplicateShifts => "duplicate_shifts",
        Error::ThetaUndefined { .. } => "theta_undefined",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::QuadratureDepth { .. } => "quadrature_depth",
    }
}

fn fail(e: &Error) -> i32 {
    let code = exit_code(e);
    let doc = json!({ "error": { "kind": error_kind(e), "message": e.to_string(), "exit": code } });
    println!("{doc}");
    code
}

// ---- argument parsing helpers ----

fn parse_alpha(s: &str) -> Result<AlphaExact, Error> {
    AlphaExact::parse(s)
}

fn parse_kind(s: &str) -> Result<AverageKind, Error> {
    match s {
        "cesaro" => Ok(AverageKind::Cesaro),
        "log" | "logarithmic" => Ok(AverageKind::Logarithmic),
        _ => Err(Error::domain(format!("unknown average kind {s:?}; use cesaro or log"))),
    }
}

fn kind_name(kind: AverageKind) -> &'static str {
    match kind {
        AverageKind::Cesaro => "cesaro",
        AverageKind::Logarithmic => "logarithmic",
        AverageKind::PrimeLogarithmic => "prime_logarithmic",
    }
}

fn parse_variant(s: &str) -> Result<Variant, Error> {
    match s {
        "cesaro" => Ok(Variant::Cesaro),
        "log" | "logarithmic" => Ok(Variant::Logarithmic),
        _ => Err(Error::domain(format!("unknown variant {s:?}; use cesaro or log"))),
    }
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Cesaro => "cesaro",
        Variant::Logarithmic => "logarithmic",
    }
}

fn parse_spacing(s: &str) -> Result<Spacing, Error> {
    match s {
        "unit" => Ok(Spacing::Unit),
        "arithmetic" => Ok(Spacing::Arithmetic),
        _ => Err(Error::domain(format!("unknown spacing {s:?}; use unit or arithmetic"))),
    }
}

fn parse_mode(s: &str) -> Result<EkMode, Error> {
    match s {
        "plain" => Ok(EkMode::Plain),
        "beatty" => Ok(EkMode::Beatty),
        "joint" => Ok(EkMode::Joint),
        _ => Err(Error::domain(format!("unknown mode {s:?}; use plain, beatty, or joint"))),
    }
}

fn parse_counter(s: &str) -> Result<CountKind, Error> {
    match s {
        "omega" => Ok(CountKind::Omega),
        "big_omega" | "big-omega" => Ok(CountKind::BigOmega),
        _ => Err(Error::domain(format!("unknown counter {s:?}; use omega or big_omega"))),
    }
}

fn parse_expr(s: &str) -> Result<SequenceExpr, Error> {
    let mut factors = Vec::new();
    for part in s.split('*') {
        factors.push(parse_factor(part.trim())?);
    }
    if factors.len() == 1 {
        Ok(factors.pop().unwrap())
    } else {
        Ok(SequenceExpr::Product(factors))
    }
}

fn parse_factor(s: &str) -> Result<SequenceExpr, Error> {
    let bad = |detail: String| Error::Parse { what: "sequence expression", detail };
    if s == "liouville" {
        return Ok(SequenceExpr::Liouville);
    }
    if s == "mobius" {
        return Ok(SequenceExpr::Mobius);
    }
    if let Some(rest) = s.strip_prefix("exp:") {
        let c: f64 = rest.parse().map_err(|_| bad(format!("bad frequency in {s:?}")))?;
        if !c.is_finite() {
            return Err(bad("frequency must be finite".into()));
        }
        return Ok(SequenceExpr::ExpLinear(c));
    }
    if let Some(rest) = s.strip_prefix("const:") {
        let mut it = rest.splitn(2, ',');
        let re: f64 = it
            .next()
            .unwrap_or("")
            .parse()
            .map_err(|_| bad(format!("bad real part in {s:?}")))?;
        let im: f64 = match it.next() {
            Some(v) => v.parse().map_err(|_| bad(format!("bad imaginary part in {s:?}")))?,
            None => 0.0,
        };
        if !re.is_finite() || !im.is_finite() {
            return Err(bad("constant must be finite".into()));
        }
        return Ok(SequenceExpr::Constant(Complex64::new(re, im)));
    }
    if let Some(name) = s.strip_prefix("omega:") {
        return omega_functional(name, CountKind::Omega);
    }
    if let Some(name) = s.strip_prefix("bigomega:") {
        return omega_functional(name, CountKind::BigOmega);
    }
    Err(bad(format!(
        "unknown factor {s:?}; use liouville, mobius, exp:<c>, const:<re>[,<im>], \
         omega:<name>, or bigomega:<name>"
    )))
}

fn omega_functional(name: &str, counter: CountKind) -> Result<SequenceExpr, Error> {
    match name {
        "exp_i" => Ok(SequenceExpr::omega_normalized(
            |x| Complex64::new(x.cos(), x.sin()),
            counter,
            name,
        )),
        "odd_clip" => Ok(SequenceExpr::omega_normalized(
            |x| {
                if x.abs() <= 4.0 {
                    Complex64::new(x, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            },
            counter,
            name,
        )),
        _ => Err(Error::Parse {
            what: "sequence expression",
            detail: format!("unknown functional {name:?}; use exp_i or odd_clip"),
        }),
    }
}

fn parse_shift_list(s: &str) -> Result<Vec<i64>, Error> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let v: i64 = part
            .trim()
            .parse()
            .map_err(|_| Error::Parse { what: "shift list", detail: format!("bad shift {part:?}") })?;
        out.push(v);
    }
    if out.len() > MAX_SHIFTS {
        return Err(Error::domain(format!("at most {MAX_SHIFTS} shifts")));
    }
    Ok(out)
}

fn parse_k_grid(s: &str) -> Result<Vec<u32>, Error> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let v: u32 = part
            .trim()
            .parse()
            .map_err(|_| Error::Parse { what: "k grid", detail: format!("bad degree {part:?}") })?;
        if v > MAX_K {
            return Err(Error::domain(format!("truncation degree {v} exceeds {MAX_K}")));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::domain("k grid must be nonempty"));
    }
    Ok(out)
}

fn check_n(n: u64) -> Result<(), Error> {
    if n < 1 || n > MAX_N {
        return Err(Error::domain(format!("n must be in 1..={MAX_N}")));
    }
    Ok(())
}

fn check_budget(value: u64, cap: u64, what: &str) -> Result<(), Error> {
    if value > cap {
        return Err(Error::domain(format!("{what} must be at most {cap}")));
    }
    Ok(())
}

// ---- output assembly ----

fn record_for(
    estimator: &str,
    parameters: BTreeMap<String, String>,
    n: u64,
    kind: Option<AverageKind>,
    value: Complex64,
    warnings: Vec<String>,
) -> EstimatorRecord {
    EstimatorRecord {
        estimator: estimator.to_string(),
        parameters,
        n,
        kind,
        value_re: value.re,
        value_im: value.im,
        runtime_ms: None,
        warnings,
    }
}

/// Re-run `eval` at the trace checkpoints below `n`; the full-`n` point is
/// appended from the already-computed value. Checkpoints where the estimator
/// is undefined (e.g. below a minimum index) are skipped.
fn build_trace<F>(n: u64, full: Complex64, enabled: bool, eval: F) -> Vec<TracePoint>
where
    F: Fn(u64) -> Result<Complex64, Error>,
{
    let mut out = Vec::new();
    if enabled {
        for cp in trace_checkpoints(n) {
            if cp == n {
                continue;
            }
            if let Ok(v) = eval(cp) {
                out.push(TracePoint { n: cp, value_re: v.re, value_im: v.im });
            }
        }
        out.push(TracePoint { n, value_re: full.re, value_im: full.im });
    }
    out
}

fn trace_csv(trace: &[TracePoint]) -> String {
    let mut s = String::from("n,value_re,value_im\n");
    for t in trace {
        let _ = writeln!(s, "{},{},{}", t.n, t.value_re, t.value_im);
    }
    s
}

fn params(entries: &[(&str, String)]) -> BTreeMap<String, String> {
    entries.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report serializes")
}

// ---- subcommand execution ----

fn execute(cli: &Cli) -> (ConfigEcho, Result<RunOutput, Error>) {
    let mut config = ConfigEcho {
        command: String::new(),
        trace: !cli.no_trace,
        threads: cli.threads,
        out_json: cli.out_json.as_ref().map(|p| p.display().to_string()),
        out_csv: cli.out_csv.as_ref().map(|p| p.display().to_string()),
        ..ConfigEcho::default()
    };
    let result = dispatch(cli, &mut config);
    (config, result)
}

fn dispatch(cli: &Cli, config: &mut ConfigEcho) -> Result<RunOutput, Error> {
    let trace_enabled = !cli.no_trace;
    match &cli.command {
        Command::Sieve { lo, hi } => {
            config.command = "sieve".into();
            config.lo = Some(*lo);
            config.hi = Some(*hi);
            if *lo < 1 || lo > hi {
                return Err(Error::domain("need 1 <= lo <= hi"));
            }
            check_budget(*hi, MAX_N, "hi")?;
            let block = sieve_block(*lo, *hi)?;
            let mut csv = String::from("n,omega,big_omega,liouville,mobius\n");
            let mut primes = 0u64;
            for n in *lo..=*hi {
                if block.big_omega(n) == 1 {
                    primes += 1;
                }
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    n,
                    block.omega(n),
                    block.big_omega(n),
                    block.liouville(n),
                    block.mobius(n)
                );
            }
            let record = record_for(
                "sieve",
                params(&[("lo", lo.to_string()), ("hi", hi.to_string())]),
                *hi,
                None,
                Complex64::new(primes as f64, 0.0),
                vec![],
            );
            Ok(RunOutput {
                record,
                report: Some(json!({ "lo": lo, "hi": hi, "primes": primes })),
                trace: vec![],
                checks: None,
                csv: Some(csv),
                check_failed: false,
            })
        }

        Command::Watson { alpha, n } => {
            config.command = "watson".into();
            config.alpha = Some(alpha.clone());
            config.n = Some(*n);
            check_n(*n)?;
            let a = parse_alpha(alpha)?;
            let report = watson_density(&a, *n)?;
            let value = Complex64::new(report.fraction, 0.0);
            let trace = build_trace(*n, value, trace_enabled, |cp| {
                Ok(Complex64::new(watson_density(&a, cp)?.fraction, 0.0))
            });
            let record = record_for(
                "watson_density",
                params(&[("alpha", alpha.clone())]),
                *n,
                None,
                value,
                vec![],
            );
            Ok(RunOutput {
                record,
                report: Some(to_value(&report)),
                csv: Some(trace_csv(&trace)),
                trace,
                checks: None,
                check_failed: false,
            })
        }

        Command::ChowlaBeatty { alpha, n, kind } => {
            config.command = "chowla-beatty".into();
            config.alpha = Some(alpha.clone());
            config.n = Some(*n);
            check_n(*n)?;
            let a = parse_alpha(alpha)?;
            let k = parse_kind(kind)?;
            config.kind = Some(kind_name(k).into());
            let value = chowla_beatty(&a, *n, k)?;
            let trace = build_trace(*n, value, trace_enabled, |cp| chowla_beatty(&a, cp, k));
            let record = record_for(
                "chowla_beatty",
                params(&[("alpha", alpha.clone())]),
                *n,
                Some(k),
                value,
                vec![],
            );
            Ok(RunOutput {
                record,
                report: None,
                csv: Some(trace_csv(&trace)),
                trace,
                checks: None,
                check_failed: false,
            })
        }

        Command::Pushforward { f, alpha, n, kind } => {
            config.command = "pushforward".into();
            config.f = Some(f.clone());
            config.alpha = Some(alpha.clone());
            config.n = Some(*n);
            check_n(*n)?;
            let expr = parse_expr(f)?;
            let a = parse_alpha(alpha)?;
            let k = parse_kind(kind)?;
            config.kind = Some(kind_name(k).into());
            let value = pushforward_average(&expr, &a, *n, k)?;
            let trace =
                build_trace(*n, value, trace_enabled, |cp| pushforward_average(&expr, &a, cp, k));
            let record = record_for(
                "pushforward_average",
                params(&[("f", expr.describe()), ("alpha", alpha.clone())]),
                *n,
                Some(k),
                value,
                vec![],
            );
            Ok(RunOutput {
                record,
                report: None,
                csv: Some(trace_csv(&trace)),
                trace,
                checks: None,
                check_failed: false,
            })
        }

        Command::ErdosKac { mode, alpha, n, bins, bin_lo, bin_hi } => {
            config.command = "erdos-kac".into();
            config.mode = Some(mode.clone());
            config.alpha = alpha.clone();
            config.n = Some(*n);
            config.bins = Some(*bins);
            config.bin_lo = Some(*bin_lo);
            config.bin_hi = Some(*bin_hi);
            check_n(*n)?;
            check_budget(*bins as u64, MAX_BINS as u64, "bins")?;
            let m = parse_mode(mode)?;
            let a = alpha.as_deref().map(parse_alpha).transpose()?;
            let spec = BinSpec { bins: *bins, lo: *bin_lo, hi: *bin_hi };
            let dist = ek_empirical(m, a.as_ref(), *n, &spec)?;
            let (value, extra) = match m {
                EkMode::Plain | EkMode::Beatty => {
                    let ks = ks_distance(&dist, normal_cdf)?;
                    (Complex64::new(ks, 0.0), json!({ "ks_normal": ks }))
                }
                EkMode::Joint => {
                    let dev = max_rectangle_deviation(&dist)?;
                    (Complex64::new(dev, 0.0), json!({ "max_rectangle_deviation": dev }))
                }
            };
            let report = json!({
                "total": dist.total(),
                "overflow": dist.overflow_total(),
                "stat": extra,
            });
            let record = record_for(
                "erdos_kac",
                params(&[
                    ("mode", mode.clone()),
                    ("alpha", alpha.clone().unwrap_or_default()),
                    ("bins", bins.to_string()),
                ]),
                *n,
                None,
                value,
                vec![],
            );
            Ok(RunOutput {
                record,
                report: Some(report),
                trace: vec![],
                checks: None,
                csv: Some(dist.csv()),
                check_failed: false,
            })
        }

        Command::TanakaJoint { polys, counter, n, bins, bin_lo, bin_hi } => {
            config.command = "tanaka-joint".into();
            config.polys = Some(polys.clone());
            config.counter = Some(counter.clone());
            config.n = Some(*n);
            config.bins = Some(*bins);
            config.bin_lo = Some(*bin_lo);
            config.bin_hi = Some(*bin_hi);
            check_n(*n)?;
            check_budget(*bins as u64, MAX_BINS as u64, "bins")?;
            let parsed: Vec<LinearPoly> =
                polys.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
            let c = parse_counter(counter)?;
            let spec = BinSpec { bins: *bins, lo: *bin_lo, hi: *bin_hi };
            let dist = polynomial_omega_joint(&parsed, *n, c, &spec)?;
            let (value, extra) = if parsed.len() == 1 {
                let ks = ks_distance(&dist, normal_cdf)?;
                (Complex64::new(ks, 0.0), json!({ "ks_normal": ks }))
            } else {
                let dev = max_rectangle_deviation(&dist)?;
                (Complex64::new(dev, 0.0), json!({ "max_rectangle_deviation": dev }))
            };
            let report = json!({
                "total": dist.total(),
                "overflow": dist.overflow_total(),
                "stat": extra,
            });
            let record = record_for(
                "tanaka_joint",
                params(&[
                    ("polys", polys.join(";")),
                    ("counter", counter.clone()),
                    ("bins", bins.to_string()),
                ]),
                *n,
                None,
                value,
                vec![],
            );
            Ok(RunOutput {
                record,
                report: Some(report),
                trace: vec![],
                checks: None,
                csv: Some(dist.csv()),
                check_failed: false,
            })
        }

        Command::HardyRamanujan { n, eps } => {
            config.command = "hardy-ramanujan".into();
            config.n = Some(*n);
            config.eps = Some(*eps);
            check_n(*n)?;
            let report = hardy_ramanujan_exceptional(*n, *eps)?;
            let record = record_for(
                "hardy_ramanujan_exceptional",
                params(&[("eps", eps.to_string())]),
                *n,
                None,
                Complex64::new(report.fraction, 0.0),
                vec![],
            );
            Ok(RunOutput {
                record,
                report: Some(to_value(&report)),
                trace: vec![],
                checks: None,
                csv: None,
                check_failed: false,
            })
        }

        Command::GapDensity { alpha, n, eps } => {
            config.command = "gap-density".into();
            config.alpha = Some(alpha.clone());
            config.n = Some(*n);
            config.eps = Some(*eps);
            check_n(*n)?;
            let a = parse_alpha(alpha)?;
            let report = an_bn_gap_density(&a, *n, *eps)?;
            let record = record_for(
                "an_bn_gap_density",
                params(&[("alpha", alpha.clone()), ("eps", eps.to_string())]),
                *n,
                None,
                Complex64::new(report.fraction, 0.0),
                vec![],
            );
            Ok(RunOutput {
                record,
                report: Some(to_value(&report)),
                trace: vec![],
                checks: None,
                csv: None,
                check_failed: false,
            })
        }

        Command::ShortInterval { f, n, h, spacing } => {
            config.command = "short-interval".into();
            config.f = Some(f.clone());
            config.n = Some(*n);
            config.h = Some(*h);
            check_n(*n)?;
            check_budget(*h, MAX_H, "h")?;
            let expr = parse_expr(f)?;
            let sp = parse_spacing(spacing)?;
            config.spacing = Some(spacing.clone());
            let stat = short_interval_stat(&expr, *n, *h, sp)?;
            let value = Complex64::new(stat, 0.0);
            let trace = build_trace(*n, value, trace_enabled, |cp| {
                Ok(Complex64::new(short_interval_stat(&expr, cp, *h, sp)?, 0.0))
            });
            let record = record_for(
                "short_interval_stat",
                params(&[
                    ("f", expr.describe()),
                    ("h", h.to_string()),
                    ("spacing", spacing.clone()),
                ]),
                *n,
                None,
                value,
                vec![],
            );
            Ok(RunOutput {
                record,
                report: None,
                csv: Some(trace_csv(&trace)),
                trace,
                checks: None,
                check_failed: false,
            })
        }

        Command::TwistedPair { f, p, q, i, j, beta, n, kind } => {
            config.command = "twisted-pair".into();
            config.f = Some(f.clone());
            config.p = Some(*p);
            config.q = Some(*q);
            config.i = Some(*i);
            config.j = Some(*j);
            config.beta = Some(beta.clone());
            config.n = Some(*n);
            check_n(*n)?;
            let expr = parse_expr(f)?;
            let b = parse_alpha(beta)?;
            let k = parse_kind(kind)?;
            config.kind = Some(kind_name(k).into());
            let value = twisted_pair_correlation(&expr, *p, *q, *i, *j, &b, *n, k)?;
            let trace = build_trace(*n, value, trace_enabled, |cp| {
                twisted_pair_correlation(&expr, *p, *q, *i, *j, &b, cp, k)
            });
            let record = record_for(
                "twisted_pair_correlation",
                params(&[
                    ("f", expr.describe()),
                    ("p", p.to_string()),
                    ("q", q.to_string()),
                    ("i", i.to_string()),
                    ("j", j.to_string()),
                    ("beta", beta.clone()),
                ]),
                *n,
                Some(k),
                value,
                vec![],
            );
            Ok(RunOutput {
                record,
                report: None,
                csv: Some(trace_csv(&trace)),
                trace,
                checks: None,
                check_failed: false,
            })
        }

        Command::Multipoint { shifts, beta, n } => {
            config.command = "multipoint".into();
            config.beta = beta.clone();
            config.n = Some(*n);
            check_n(*n)?;
            let list = parse_shift_list(shifts)?;
            config.shifts = Some(list.clone());
            let b = beta.as_deref().map(parse_alpha).transpose()?;
            let value = liouville_multipoint_twisted(&list, b.as_ref(), *n)?;
            let trace = build_trace(*n, value, trace_enabled, |cp| {
                liouville_multipoint_twisted(&list, b.as_ref(), cp)
            });
            let record = record_for(
                "liouville_multipoint_twisted",
                params(&[
                    ("shifts", shifts.clone()),
                    ("beta", beta.clone().unwrap_or_default()),
                ]),
                *n,
                Some(AverageKind::Logarithmic),
                value,
                vec![],
            );
            Ok(RunOutput {
                record,
                report: None,
                csv: Some(trace_csv(&trace)),
                trace,
                checks: None,
                check_failed: false,
            })
        }

        Command::MultiBeatty { alphas, n, kind } => {
            config.command = "multi-beatty".into();
            config.alphas = Some(alphas.clone());
            config.n = Some(*n);
            check_n(*n)?;
            let parsed: Vec<AlphaExact> =
                alphas.iter().map(|s| parse_alpha(s)).collect::<Result<_, _>>()?;
            let k = parse_kind(kind)?;
            config.kind = Some(kind_name(k).into());
            let (value, warnings) = multi_beatty_correlation(&parsed, *n, k)?;
            let trace = build_trace(*n, value, trace_enabled, |cp| {
                Ok(multi_beatty_correlation(&parsed, cp, k)?.0)
            });
            let record = record_for(
                "multi_beatty_correlation",
                params(&[("alphas", alphas.join(";"))]),
                *n,
                Some(k),
                value,
                warnings,
            );
            Ok(RunOutput {
                record,
                report: None,
                csv: Some(trace_csv(&trace)),
                trace,
                checks: None,
                check_failed: false,
            })
        }

        Command::FourierBeatty { alpha, k_grid, n, p, i } => {
            config.command = "fourier-beatty".into();
            config.alpha = Some(alpha.clone());
            config.n = Some(*n);
            config.p = *p;
            config.i = *i;
            check_n(*n)?;
            let a = parse_alpha(alpha)?;
            let grid = parse_k_grid(k_grid)?;
            config.k_grid = Some(grid.clone());
            let cell = match (p, i) {
                (Some(p), Some(i)) => Some((*p, *i)),
                (None, None) => None,
                _ => return Err(Error::domain("--p and --i go together")),
            };
            let mut csv = String::from("k,empirical_l1,n\n");
            let mut curve = Vec::new();
            let mut last = 0.0;
            for &k in &grid {
                let poly = match cell {
                    Some((p, i)) => dpi_indicator_poly(&a, p, i, k)?,
                    None => beatty_indicator_poly(&a, k)?,
                };
                let err = match cell {
                    Some((p, i)) => {
                        let a = a.clone();
                        l1_error_empirical(
                            move |m| {
                                let member =
                                    a.is_member(m).expect("surd membership is total");
                                member && {
                                    let gen = a.floor_div(m).expect("surd floor is total") + 1;
                                    a.cell_index(p, gen).expect("cell index is total") == i
                                }
                            },
                            &poly,
                            *n,
                        )?
                    }
                    None => {
                        let a = a.clone();
                        l1_error_empirical(
                            move |m| a.is_member(m).expect("surd membership is total"),
                            &poly,
                            *n,
                        )?
                    }
                };
                let _ = writeln!(csv, "{},{},{}", k, err, n);
                curve.push(json!({ "k": k, "empirical_l1": err }));
                last = err;
            }
            let record = record_for(
                "fourier_beatty_error_curve",
                params(&[
                    ("alpha", alpha.clone()),
                    ("k_grid", k_grid.clone()),
                    ("cell", cell.map(|(p, i)| format!("{p},{i}")).unwrap_or_default()),
                ]),
                *n,
                None,
                Complex64::new(last, 0.0),
                vec![],
            );
            Ok(RunOutput {
                record,
                report: Some(json!({ "curve": curve })),
                trace: vec![],
                checks: None,
                csv: Some(csv),
                check_failed: false,
            })
        }

        Command::Kbsz { f, n, s, variant } => {
            config.command = "kbsz".into();
            config.f = Some(f.clone());
            config.n = Some(*n);
            config.s = Some(*s);
            check_n(*n)?;
            check_budget(*s, MAX_S, "s")?;
            let seq = BoundedSequence::parse(f)?;
            let v = parse_variant(variant)?;
            config.variant = Some(variant_name(v).into());
            let report = kbsz_bound(&seq, *n, *s, v)?;
            let holds = report.holds();
            let record = record_for(
                "kbsz_bound",
                params(&[
                    ("f", seq.name()),
                    ("s", s.to_string()),
                    ("variant", variant_name(v).to_string()),
                ]),
                *n,
                None,
                Complex64::new(report.lhs, 0.0),
                vec![],
            );
            Ok(RunOutput {
                record,
                report: Some(to_value(&report)),
                trace: vec![],
                checks: Some(json!({ "holds": holds, "c_star": report.c_star })),
                csv: None,
                check_failed: !holds,
            })
        }

        Command::TuranKubilius { n, s, variant } => {
            config.command = "turan-kubilius".into();
            config.n = Some(*n);
            config.s = Some(*s);
            check_n(*n)?;
            check_budget(*s, MAX_S, "s")?;
            let v = parse_variant(variant)?;
            config.variant = Some(variant_name(v).into());
            let report = turan_kubilius(*n, *s, v)?;
            let record = record_for(
                "turan_kubilius",
                params(&[("s", s.to_string()), ("variant", variant_name(v).to_string())]),
                *n,
                None,
                Complex64::new(report.lhs, 0.0),
                vec![],
            );
            Ok(RunOutput {
                record,
                report: Some(to_value(&report)),
                trace: vec![],
                checks: None,
                csv: None,
                check_failed: false,
            })
        }

        Command::AvgIdentities { f, n, k } => {
            config.command = "avg-identities".into();
            config.f = Some(f.clone());
            config.n = Some(*n);
            config.k = Some(*k);
            check_n(*n)?;
            let seq = BoundedSequence::parse(f)?;
            let report = average_identity_report(&seq, *n, *k)?;
            let record = record_for(
                "average_identity_report",
                params(&[("f", seq.name()), ("k", k.to_string())]),
                *n,
                None,
                Complex64::new(report.d1, 0.0),
                vec![],
            );
            Ok(RunOutput {
                record,
                report: Some(to_value(&report)),
                trace: vec![],
                checks: None,
                csv: None,
                check_failed: false,
            })
        }

        Command::GeomBound { beta, n } => {
            config.command = "geom-bound".into();
            let pairs: Vec<(f64, u64)> = match (beta, n) {
                (Some(b), Some(n)) => {
                    config.beta_value = Some(*b);
                    config.n = Some(*n);
                    check_n(*n)?;
                    vec![(*b, *n)]
                }
                (None, None) => demo_grid(),
                _ => return Err(Error::domain("--beta and --n go together")),
            };
            let mut csv = String::from("beta,n,lhs,bound,holds\n");
            let mut failures = 0u64;
            let mut worst = f64::NEG_INFINITY;
            for &(b, m) in &pairs {
                let r = geometric_exponential_bound(b, m)?;
                let ok = r.holds();
                if !ok {
                    failures += 1;
                }
                worst = worst.max(r.lhs - r.bound);
                let _ = writeln!(csv, "{},{},{},{},{}", b, m, r.lhs, r.bound, ok);
            }
            let record = record_for(
                "geometric_exponential_bound",
                params(&[("pairs", pairs.len().to_string())]),
                pairs.iter().map(|&(_, m)| m).max().unwrap_or(0),
                None,
                Complex64::new(worst, 0.0),
                vec![],
            );
            Ok(RunOutput {
                record,
                report: None,
                trace: vec![],
                checks: Some(json!({
                    "pairs": pairs.len(),
                    "failures": failures,
                    "worst_margin": worst,
                })),
                csv: Some(csv),
                check_failed: failures > 0,
            })
        }
    }
}

/// The fixed demo grid for `geom-bound`: 20 frequencies (2j+1)/40 crossed
/// with five ranges.
fn demo_grid() -> Vec<(f64, u64)> {
    let mut out = Vec::with_capacity(100);
    for j in 0..20u32 {
        let beta = (2 * j + 1) as f64 / 40.0;
        for n in [100u64, 1_000, 10_000, 100_000, 1_000_000] {
            out.push((beta, n));
        }
    }
    out
}

/// Largest deviation of the empirical 2-D mass from the product of Gaussian
/// masses over all rectangles with corners in {-1, 0, 1}.
fn max_rectangle_deviation(
    dist: &beatkit_core::distributions::EmpiricalDistribution,
) -> Result<f64, Error> {
    let intervals = [(-1.0, 0.0), (-1.0, 1.0), (0.0, 1.0)];
    let mut mass = [0.0f64; 3];
    for (idx, &(a, b)) in intervals.iter().enumerate() {
        mass[idx] = gauss_functional(|x| {
            if x >= a && x <= b {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })?
        .re;
    }
    let mut worst = 0.0f64;
    for (ia, &ra) in intervals.iter().enumerate() {
        for (ib, &rb) in intervals.iter().enumerate() {
            let emp = rectangle_probability(dist, &[ra, rb])?;
            worst = worst.max((emp - mass[ia] * mass[ib]).abs());
        }
    }
    Ok(worst)
}
