//! Command-line front end: every verification and experiment in the
//! library as a reproducible, scriptable run with machine-readable output.
//!
//! One JSON document goes to stdout (or `--out`) for single results;
//! scans emit JSON lines or two-column CSV. Identical argv and seed give
//! byte-identical stdout; timing goes to stderr. Exit codes: 0 success,
//! 2 verdict failure, 1 usage or computation error.
//!
//! Parameter precedence: command-line flags, then entries of the optional
//! `--config` file (`key=value` lines, `#` comments), then built-in
//! defaults. The resolved configuration is echoed in every JSON document.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use symlat::acceptance::run_all_selected;
use symlat::eisenstein::{
    constant_term_closed, constant_term_direct, eisenstein_series, function_norm2, iota_apply,
    moment_rhs, period_closed, period_direct_n1, siegel_transform_truncated, ProductFunction,
    SphereHarmonic,
};
use symlat::harmonic::{
    harmonic_basis, harmonic_dimension, highest_weight_function, raise_antiholomorphic,
    raise_holomorphic, BidegreePolynomial, GRat,
};
use symlat::lattice::{count_in_region, LatticeBasis, RegionSpec};
use symlat::mellin::MellinPair;
use symlat::sampler::{
    deviation_onset, dilation_scan, discrepancy_meansquare, mc_moments, mc_truncation_radius,
    schmidt_deviations, schmidt_dyadic, HaarSampler, StarPiece,
};
use symlat::special::{xi_c, z_factor, ZFactorSpec};
use symlat::symplectic::{SpherePoint, SymplecticMatrix};

#[derive(Parser)]
#[command(
    name = "symlat",
    about = "Numerical laboratory for lattice-point statistics over symplectic lattices",
    version
)]
struct Cli {
    /// Optional key=value configuration file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Write the document to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Worker threads for parallel experiments (default 1; the
    /// SYMLAT_WORKERS environment variable overrides the default).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the completed zeta function at a complex point.
    Xi(XiArgs),
    /// Evaluate the unitary scattering factor Z at a complex point.
    Zfactor(ZfactorArgs),
    /// Dimension of the harmonic kernel at a bidegree.
    HarmonicDim(HarmonicDimArgs),
    /// Verify the raising identities at one bidegree (symbolic + numeric).
    RaiseCheck(RaiseCheckArgs),
    /// Count lattice points of a basis inside a region.
    Count(CountArgs),
    /// Truncated primitive lattice sum of a product function on one basis.
    Siegel(SiegelArgs),
    /// Eisenstein-type series value on one basis (absolutely convergent range).
    Eisenstein(EisensteinArgs),
    /// Constant-term closed formula vs direct torus quadrature (rank two).
    ConstantTerm(ConstantTermArgs),
    /// Period closed contour formula vs direct circle average (rank one).
    PeriodCheck(PeriodCheckArgs),
    /// Norm preservation of the reflection twist (rank two).
    IsometryCheck(IsometryCheckArgs),
    /// Closed-form moment targets for a product function.
    MomentRhs(MomentRhsArgs),
    /// Monte Carlo moments of the primitive lattice sum vs closed forms.
    MomentMc(MomentMcArgs),
    /// Mean-square discrepancy experiment against its variance bounds.
    DiscrepancyMs(DiscrepancyMsArgs),
    /// Counting errors along dilations of a star-shaped piece (scan).
    DilationScan(DilationScanArgs),
    /// Dyadic mean-square counting inequality experiment.
    SchmidtDyadic(SchmidtDyadicArgs),
    /// Run the acceptance gates (all, or selected by number).
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct XiArgs {
    /// Complex argument, e.g. "2+3i".
    #[arg(long)]
    s: Option<String>,
}

#[derive(Args)]
struct ZfactorArgs {
    #[arg(long)]
    n: Option<u32>,
    /// Angular weight (even).
    #[arg(long)]
    m: Option<u32>,
    /// Complex argument, e.g. "2+3i".
    #[arg(long)]
    s: Option<String>,
}

#[derive(Args)]
struct HarmonicDimArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    q: Option<u32>,
}

#[derive(Args)]
struct RaiseCheckArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    q: Option<u32>,
    /// Rational spectral parameter, e.g. "5/2".
    #[arg(long)]
    s: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BasisKind {
    /// Standard integer lattice.
    Identity,
    /// Exact rank-one sampler (requires --seed).
    Exact,
    /// Random-walk sampler (requires --seed).
    Walk,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    basis: Option<BasisKind>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sample index within the seeded stream.
    #[arg(long)]
    index: Option<u64>,
    #[command(flatten)]
    region: RegionArgs,
}

#[derive(Args)]
struct RegionArgs {
    /// Region shape: ball, annulus, or box.
    #[arg(long)]
    region: Option<String>,
    /// Center coordinates, comma-separated (ball/annulus).
    #[arg(long)]
    center: Option<String>,
    /// Ball radius.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    r_inner: Option<f64>,
    #[arg(long)]
    r_outer: Option<f64>,
    /// Box lower corner, comma-separated.
    #[arg(long)]
    lo: Option<String>,
    /// Box upper corner, comma-separated.
    #[arg(long)]
    hi: Option<String>,
}

#[derive(Args)]
struct FamilyArgs {
    /// Radial family: loggauss or yinterval.
    #[arg(long)]
    family: Option<String>,
    /// Log-Gaussian tilt (family loggauss).
    #[arg(long)]
    b: Option<f64>,
    /// Interval lower endpoint (family yinterval; upper endpoint is --b).
    #[arg(long)]
    a: Option<f64>,
    /// Optional dilation factor applied to the radial profile.
    #[arg(long)]
    dilate: Option<f64>,
}

#[derive(Args)]
struct SiegelArgs {
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, value_enum)]
    basis: Option<BasisKind>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    index: Option<u64>,
    /// Truncation radius override (default: integrated-tail rule).
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Args)]
struct EisensteinArgs {
    /// Complex argument; requires Re s > 2n.
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Angular bidegree (defaults to the spherical series).
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long, value_enum)]
    basis: Option<BasisKind>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    index: Option<u64>,
    /// Enumeration radius for the truncated series.
    #[arg(long)]
    radius: Option<f64>,
    /// Acceptable relative truncation-tail bound.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct ConstantTermArgs {
    /// Complex argument, e.g. "6".
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    y: Option<f64>,
    /// Quadrature points per torus dimension.
    #[arg(long)]
    grid: Option<usize>,
    /// Relative tolerance for the verdict.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct PeriodCheckArgs {
    #[arg(long)]
    y: Option<f64>,
    #[command(flatten)]
    family: FamilyArgs,
    /// Angular bidegree: (0,0), (2,0), or (0,2).
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    q: Option<u32>,
    /// Boundary point on the unit circle, two comma-separated coordinates.
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct IsometryCheckArgs {
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    q: Option<u32>,
    /// Log-Gaussian tilt of the radial factor.
    #[arg(long)]
    b: Option<f64>,
    /// Seed for the random harmonic combination.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct MomentRhsArgs {
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    family: FamilyArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SamplerKind {
    Exact,
    Walk,
}

#[derive(Args)]
struct MomentMcArgs {
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sampler: exact (rank one) or walk; default picks by rank.
    #[arg(long, value_enum)]
    sampler: Option<SamplerKind>,
    /// Relative tolerance for the verdicts.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct DiscrepancyMsArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    sampler: Option<SamplerKind>,
    #[command(flatten)]
    region: RegionArgs,
}

#[derive(Args)]
struct DilationScanArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    basis: Option<BasisKind>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    index: Option<u64>,
    /// Piece center, comma-separated.
    #[arg(long)]
    center: Option<String>,
    /// Inner radius of the piece (0 for a ball).
    #[arg(long)]
    r_inner: Option<f64>,
    /// Outer radius of the piece (total volume must be 1).
    #[arg(long)]
    r_outer: Option<f64>,
    /// Center of the removed inner ball (default: concentric); with this
    /// flag the piece is a non-star-shaped off-center ball difference.
    #[arg(long)]
    inner_center: Option<String>,
    /// Dilation factors, comma-separated.
    #[arg(long)]
    t_grid: Option<String>,
    /// Emit two-column CSV (t, primitive error) instead of JSON lines.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct SchmidtDyadicArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Dyadic depth T (volumes up to 2^T).
    #[arg(long)]
    depth: Option<u32>,
    /// Sample index whose deviation profile is summarized.
    #[arg(long)]
    profile_index: Option<u64>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Gate numbers to run (all twelve when empty).
    criteria: Vec<u32>,
    /// Emit JSON lines instead of the text table.
    #[arg(long)]
    json: bool,
}

// -------------------------------------------------------------------------
// Plumbing
// -------------------------------------------------------------------------

struct CliError {
    message: String,
    usage: bool,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            usage: true,
        }
    }

    fn run(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            usage: false,
        }
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::run(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// `key=value` configuration file; blank lines and `#` comments ignored.
fn load_config(path: &str) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config file {path}: {e}")))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::usage(format!("config line {}: expected key=value", lineno + 1))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Flag value, then config-file value, then default.
struct Resolver {
    file: BTreeMap<String, String>,
    resolved: BTreeMap<String, Value>,
}

impl Resolver {
    fn new(config: Option<&str>) -> CliResult<Self> {
        Ok(Self {
            file: config.map(load_config).transpose()?.unwrap_or_default(),
            resolved: BTreeMap::new(),
        })
    }

    fn lookup<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                CliError::usage(format!("config key {key}: cannot parse {raw:?}"))
            }),
        }
    }

    /// Resolves one parameter and records it for the config echo.
    fn value<T>(&mut self, key: &str, flag: Option<T>, default: T) -> CliResult<T>
    where
        T: std::str::FromStr + Clone + Into<Value>,
    {
        let v = match flag {
            Some(v) => v,
            None => self.lookup(key)?.unwrap_or(default),
        };
        self.resolved.insert(key.into(), v.clone().into());
        Ok(v)
    }

    /// Resolves a mandatory parameter (no default).
    fn required<T>(&mut self, key: &str, flag: Option<T>) -> CliResult<T>
    where
        T: std::str::FromStr + Clone + Into<Value>,
    {
        let v = match flag {
            Some(v) => v,
            None => self
                .lookup(key)?
                .ok_or_else(|| CliError::usage(format!("missing required parameter --{key}")))?,
        };
        self.resolved.insert(key.into(), v.clone().into());
        Ok(v)
    }

    /// Resolves a string-typed parameter without recording it (callers
    /// record the parsed form).
    fn raw(&self, key: &str, flag: Option<String>) -> Option<String> {
        flag.or_else(|| self.file.get(key).cloned())
    }

    fn record(&mut self, key: &str, value: Value) {
        self.resolved.insert(key.into(), value);
    }

    fn config_echo(&self) -> Value {
        Value::Object(self.resolved.clone().into_iter().collect())
    }
}

fn parse_complex(text: &str) -> CliResult<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::usage(format!("cannot parse complex number {text:?}"));
    if let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('I')) {
        // Split re and im at the last +/- that is not a leading sign and
        // not part of an exponent.
        let chars: Vec<char> = body.chars().collect();
        let mut split = None;
        for i in (1..chars.len()).rev() {
            if (chars[i] == '+' || chars[i] == '-')
                && chars[i - 1] != 'e'
                && chars[i - 1] != 'E'
            {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re: f64 = body[..i].parse().map_err(|_| bad())?;
                let im_text = &body[i..];
                let im: f64 = if im_text == "+" {
                    1.0
                } else if im_text == "-" {
                    -1.0
                } else {
                    im_text.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = if body.is_empty() {
                    1.0
                } else if body == "-" {
                    -1.0
                } else {
                    body.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        Ok(Complex64::new(s.parse().map_err(|_| bad())?, 0.0))
    }
}

fn parse_rational(text: &str) -> CliResult<GRat> {
    let bad = || CliError::usage(format!("cannot parse rational number {text:?}"));
    match text.split_once('/') {
        Some((num, den)) => {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            let den: i64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            Ok(GRat::from_ratio(num, den))
        }
        None => Ok(GRat::from_int(text.trim().parse().map_err(|_| bad())?)),
    }
}

fn parse_floats(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::usage(format!("cannot parse number {:?}", p.trim())))
        })
        .collect()
}

fn cval(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn complex_param(r: &mut Resolver, key: &str, flag: Option<String>) -> CliResult<Complex64> {
    let raw = r
        .raw(key, flag)
        .ok_or_else(|| CliError::usage(format!("missing required parameter --{key}")))?;
    let z = parse_complex(&raw)?;
    r.record(key, cval(z));
    Ok(z)
}

/// Radial profile from family flags: `loggauss` (tilt `b`) or `yinterval`
/// (window `(a, b]`), optionally dilated.
fn radial_param(r: &mut Resolver, args: &FamilyArgs) -> CliResult<MellinPair> {
    let family = r.value("family", args.family.clone(), "loggauss".to_string())?;
    let dilate = r.raw("dilate", args.dilate.map(|v| v.to_string()));
    let base = match family.as_str() {
        "loggauss" => {
            let b = r.value("b", args.b, 2.0)?;
            MellinPair::log_gaussian(b)?
        }
        "yinterval" => {
            let a = r.value("a", args.a, 0.25)?;
            let b = r.value("b", args.b, 0.5)?;
            MellinPair::y_interval(a, b)?
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown radial family {other:?} (expected loggauss or yinterval)"
            )))
        }
    };
    match dilate {
        None => Ok(base),
        Some(raw) => {
            let lambda: f64 = raw
                .parse()
                .map_err(|_| CliError::usage(format!("cannot parse --dilate {raw:?}")))?;
            r.record("dilate", lambda.into());
            Ok(base.dilated(lambda)?)
        }
    }
}

/// Angular factor from an optional bidegree: `None`/`(0,0)` is spherical,
/// otherwise the first element of the harmonic kernel basis.
fn angular_param(n: usize, p: u32, q: u32) -> CliResult<SphereHarmonic> {
    if p == 0 && q == 0 {
        return Ok(SphereHarmonic::constant(n));
    }
    let basis = harmonic_basis(n, p, q);
    let poly = basis
        .into_iter()
        .next()
        .ok_or_else(|| CliError::run(format!("empty harmonic kernel at bidegree ({p},{q})")))?;
    Ok(SphereHarmonic::new(poly)?)
}

fn basis_param(
    r: &mut Resolver,
    n: usize,
    kind: Option<BasisKind>,
    seed: Option<u64>,
    index: Option<u64>,
) -> CliResult<LatticeBasis> {
    let kind_name = r.value(
        "basis",
        kind.map(|k| {
            match k {
                BasisKind::Identity => "identity",
                BasisKind::Exact => "exact",
                BasisKind::Walk => "walk",
            }
            .to_string()
        }),
        "identity".to_string(),
    )?;
    match kind_name.as_str() {
        "identity" => Ok(LatticeBasis::identity(n)),
        "exact" | "walk" => {
            let seed = r.required("seed", seed)?;
            let index = r.value("index", index, 0u64)?;
            let sampler = if kind_name == "exact" {
                if n != 1 {
                    return Err(CliError::usage(
                        "the exact sampler is rank-one only (--n 1)".to_string(),
                    ));
                }
                HaarSampler::exact_modular(seed)
            } else {
                HaarSampler::random_walk(n, seed)?
            };
            Ok(sampler.sample_basis(index)?)
        }
        other => Err(CliError::usage(format!("unknown basis kind {other:?}"))),
    }
}

fn region_param(r: &mut Resolver, args: &RegionArgs, dim: usize) -> CliResult<RegionSpec> {
    let shape = r.value("region", args.region.clone(), "ball".to_string())?;
    let center_of = |r: &mut Resolver, flag: &Option<String>| -> CliResult<Vec<f64>> {
        let raw = r
            .raw("center", flag.clone())
            .unwrap_or_else(|| vec!["0"; dim].join(","));
        let center = parse_floats(&raw)?;
        r.record("center", center.clone().into());
        Ok(center)
    };
    match shape.as_str() {
        "ball" => Ok(RegionSpec::Ball {
            center: center_of(r, &args.center)?,
            radius: r.value("radius", args.radius, 2.0)?,
        }),
        "annulus" => Ok(RegionSpec::Annulus {
            center: center_of(r, &args.center)?,
            r_inner: r.value("r-inner", args.r_inner, 1.0)?,
            r_outer: r.value("r-outer", args.r_outer, 2.0)?,
        }),
        "box" => {
            let lo_raw = r
                .raw("lo", args.lo.clone())
                .ok_or_else(|| CliError::usage("box region needs --lo".to_string()))?;
            let hi_raw = r
                .raw("hi", args.hi.clone())
                .ok_or_else(|| CliError::usage("box region needs --hi".to_string()))?;
            let lo = parse_floats(&lo_raw)?;
            let hi = parse_floats(&hi_raw)?;
            r.record("lo", lo.clone().into());
            r.record("hi", hi.clone().into());
            Ok(RegionSpec::Box { lo, hi })
        }
        other => Err(CliError::usage(format!(
            "unknown region shape {other:?} (expected ball, annulus, or box)"
        ))),
    }
}

/// Serializes a report with deterministic field order.
fn report_json(report: &symlat::report::ExperimentReport) -> Value {
    serde_json::to_value(report).expect("report serialization cannot fail")
}

struct Emitted {
    text: String,
    verdict_failed: bool,
}

fn document(config: Value, body: Value, verdict_failed: bool) -> Emitted {
    let mut doc = serde_json::Map::new();
    doc.insert("config".into(), config);
    if let Value::Object(fields) = body {
        for (k, v) in fields {
            doc.insert(k, v);
        }
    }
    let text = serde_json::to_string_pretty(&Value::Object(doc)).expect("serialization")
        + "\n";
    Emitted {
        text,
        verdict_failed,
    }
}

// -------------------------------------------------------------------------
// Subcommand implementations
// -------------------------------------------------------------------------

fn run_xi(r: &mut Resolver, args: XiArgs) -> CliResult<Emitted> {
    let s = complex_param(r, "s", args.s)?;
    let value = xi_c(s)?;
    Ok(document(
        r.config_echo(),
        json!({
            "value": cval(value),
            "provenance": "closed-form",
            "rel_error_bound": 1e-12,
        }),
        false,
    ))
}

fn run_zfactor(r: &mut Resolver, args: ZfactorArgs) -> CliResult<Emitted> {
    let n = r.value("n", args.n, 2u32)?;
    let m = r.value("m", args.m, 0u32)?;
    let s = complex_param(r, "s", args.s)?;
    let value = z_factor(&ZFactorSpec { n, m, s })?;
    // Consistency readout: the factor is unitary on the critical line.
    let on_line = z_factor(&ZFactorSpec {
        n,
        m,
        s: Complex64::new(n as f64, s.im),
    })?;
    Ok(document(
        r.config_echo(),
        json!({
            "value": cval(value),
            "critical_line_modulus": on_line.norm(),
            "critical_line_deviation": (on_line.norm() - 1.0).abs(),
            "provenance": "closed-form",
        }),
        false,
    ))
}

fn run_harmonic_dim(r: &mut Resolver, args: HarmonicDimArgs) -> CliResult<Emitted> {
    let n = r.value("n", args.n, 2usize)?;
    let p = r.value("p", args.p, 0u32)?;
    let q = r.value("q", args.q, 0u32)?;
    if n == 0 {
        return Err(CliError::usage("--n must be positive".to_string()));
    }
    Ok(document(
        r.config_echo(),
        json!({
            "dimension": harmonic_dimension(n, p, q),
            "provenance": "closed-form",
        }),
        false,
    ))
}

fn run_raise_check(r: &mut Resolver, args: RaiseCheckArgs) -> CliResult<Emitted> {
    let n = r.value("n", args.n, 2usize)?;
    let p = r.value("p", args.p, 1u32)?;
    let q = r.value("q", args.q, 1u32)?;
    let s_raw = r.raw("s", args.s).unwrap_or_else(|| "5/2".to_string());
    let s = parse_rational(&s_raw)?;
    r.record("s", Value::String(s_raw));
    if n == 0 {
        return Err(CliError::usage("--n must be positive".to_string()));
    }
    let h = highest_weight_function(n, &s, p, q);
    let coeff = -&(&s + &GRat::from_int((p + q) as i64));
    let holomorphic_ok =
        raise_holomorphic(&h) == highest_weight_function(n, &s, p + 2, q).scale(&coeff);
    let antiholomorphic_ok =
        raise_antiholomorphic(&h) == highest_weight_function(n, &s, p, q + 2).scale(&coeff);
    let pass = holomorphic_ok && antiholomorphic_ok;
    Ok(document(
        r.config_echo(),
        json!({
            "holomorphic_ok": holomorphic_ok,
            "antiholomorphic_ok": antiholomorphic_ok,
            "pass": pass,
            "provenance": "closed-form",
        }),
        !pass,
    ))
}

fn run_count(r: &mut Resolver, args: CountArgs) -> CliResult<Emitted> {
    let n = r.value("n", args.n, 2usize)?;
    if n == 0 {
        return Err(CliError::usage("--n must be positive".to_string()));
    }
    let basis = basis_param(r, n, args.basis, args.seed, args.index)?;
    let region = region_param(r, &args.region, 2 * n)?;
    let count = count_in_region(&basis, &region)?;
    Ok(document(
        r.config_echo(),
        json!({
            "all": count.all,
            "primitive": count.primitive,
            "volume": region.volume(2 * n),
            "provenance": "closed-form",
        }),
        false,
    ))
}

fn run_siegel(r: &mut Resolver, args: SiegelArgs) -> CliResult<Emitted> {
    let n = r.value("n", args.n, 1usize)?;
    if n == 0 {
        return Err(CliError::usage("--n must be positive".to_string()));
    }
    let radial = radial_param(r, &args.family)?;
    let f = ProductFunction::spherical(n, radial);
    let default_radius = mc_truncation_radius(&f)?;
    let radius = r.value("radius", args.radius, default_radius)?;
    let basis = basis_param(r, n, args.basis, args.seed, args.index)?;
    let (theta, points) = siegel_transform_truncated(&f, &basis, radius)?;
    Ok(document(
        r.config_echo(),
        json!({
            "theta": cval(theta),
            "points": points,
            "provenance": "quadrature",
        }),
        false,
    ))
}

fn run_eisenstein(r: &mut Resolver, args: EisensteinArgs) -> CliResult<Emitted> {
    let n = r.value("n", args.n, 1usize)?;
    if n == 0 {
        return Err(CliError::usage("--n must be positive".to_string()));
    }
    let s = complex_param(r, "s", args.s)?;
    let p = r.value("p", args.p, 0u32)?;
    let q = r.value("q", args.q, 0u32)?;
    let radius = r.value("radius", args.radius, 80.0)?;
    let tolerance = r.value("tolerance", args.tolerance, 1e-6)?;
    let basis = basis_param(r, n, args.basis, args.seed, args.index)?;
    let g = SymplecticMatrix::new(basis.rows().clone())?;
    let angular = angular_param(n, p, q)?;
    let angular_ref = if p == 0 && q == 0 {
        None
    } else {
        Some(&angular)
    };
    let value = eisenstein_series(s, &g, angular_ref, radius, tolerance)?;
    Ok(document(
        r.config_echo(),
        json!({
            "value": cval(value.value),
            "points": value.points,
            "tail_bound": value.tail_bound,
            "provenance": "quadrature",
        }),
        false,
    ))
}

fn run_constant_term(r: &mut Resolver, args: ConstantTermArgs) -> CliResult<Emitted> {
    let s = complex_param(r, "s", args.s)?;
    let y = r.value("y", args.y, 1.0)?;
    let grid = r.value("grid", args.grid, 8usize)?;
    let tolerance = r.value("tolerance", args.tolerance, 1e-3)?;
    let m = SymplecticMatrix::identity(1);
    let closed = constant_term_closed(s, &m, y, 2)?;
    let direct = constant_term_direct(s, &m, y, grid)?;
    let rel = (closed - direct).norm() / closed.norm().max(1e-300);
    let pass = rel < tolerance;
    Ok(document(
        r.config_echo(),
        json!({
            "closed": cval(closed),
            "direct": cval(direct),
            "rel_deviation": rel,
            "pass": pass,
            "provenance": "quadrature",
        }),
        !pass,
    ))
}

fn run_period_check(r: &mut Resolver, args: PeriodCheckArgs) -> CliResult<Emitted> {
    let y = r.value("y", args.y, 1.0)?;
    let radial = radial_param(r, &args.family)?;
    let p = r.value("p", args.p, 0u32)?;
    let q = r.value("q", args.q, 0u32)?;
    let tolerance = r.value("tolerance", args.tolerance, 1e-3)?;
    let k_raw = r
        .raw("k", args.k)
        .unwrap_or_else(|| "0.6,0.8".to_string());
    let k_coords = parse_floats(&k_raw)?;
    r.record("k", k_coords.clone().into());
    let k = SpherePoint::new(&k_coords)?;
    let f = ProductFunction::new(radial, angular_param(1, p, q)?);
    let closed = period_closed(&f, y, &k)?;
    let direct = period_direct_n1(&f, y, &k)?;
    let scale = closed.norm().max(direct.norm()).max(1e-12);
    let rel = (closed - direct).norm() / scale;
    let pass = rel < tolerance;
    Ok(document(
        r.config_echo(),
        json!({
            "closed": cval(closed),
            "direct": cval(direct),
            "rel_deviation": rel,
            "pass": pass,
            "provenance": "quadrature",
        }),
        !pass,
    ))
}

fn run_isometry_check(r: &mut Resolver, args: IsometryCheckArgs) -> CliResult<Emitted> {
    use rand::{Rng, SeedableRng};
    let p = r.value("p", args.p, 2u32)?;
    let q = r.value("q", args.q, 0u32)?;
    let b = r.value("b", args.b, 2.0)?;
    let seed = r.required("seed", args.seed)?;
    let tolerance = r.value("tolerance", args.tolerance, 1e-6)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let basis = harmonic_basis(2, p, q);
    let mut combo = BidegreePolynomial::zero(2);
    for h in &basis {
        let num = rng.gen_range(-9i64..=9);
        if num != 0 {
            combo = combo.add(&h.scale(&GRat::from_ratio(num, 4)));
        }
    }
    if combo.is_zero() {
        combo = basis
            .into_iter()
            .next()
            .ok_or_else(|| CliError::run(format!("empty harmonic kernel at ({p},{q})")))?;
    }
    let f = ProductFunction::new(MellinPair::log_gaussian(b)?, SphereHarmonic::new(combo)?);
    let twisted = iota_apply(&f)?;
    let norm_f = function_norm2(&f)?.sqrt();
    let norm_twisted = function_norm2(&twisted)?.sqrt();
    let deviation = (norm_twisted / norm_f - 1.0).abs();
    let pass = deviation < tolerance;
    Ok(document(
        r.config_echo(),
        json!({
            "norm": norm_f,
            "twisted_norm": norm_twisted,
            "ratio_deviation": deviation,
            "pass": pass,
            "provenance": "quadrature",
        }),
        !pass,
    ))
}

fn run_moment_rhs(r: &mut Resolver, args: MomentRhsArgs) -> CliResult<Emitted> {
    let n = r.value("n", args.n, 1usize)?;
    if n == 0 {
        return Err(CliError::usage("--n must be positive".to_string()));
    }
    let f = ProductFunction::spherical(n, radial_param(r, &args.family)?);
    let report = moment_rhs(&f)?;
    Ok(document(
        r.config_echo(),
        json!({
            "first_rhs": cval(report.first_rhs),
            "second_rhs": cval(report.second_rhs),
            "integral": cval(report.integral),
            "norm2": report.norm2,
            "iota_pairing": cval(report.iota_pairing),
            "provenance": "closed-form",
        }),
        false,
    ))
}

fn sampler_param(
    r: &mut Resolver,
    n: usize,
    kind: Option<SamplerKind>,
    seed: u64,
) -> CliResult<HaarSampler> {
    let default_kind = if n == 1 { "exact" } else { "walk" };
    let kind_name = r.value(
        "sampler",
        kind.map(|k| {
            match k {
                SamplerKind::Exact => "exact",
                SamplerKind::Walk => "walk",
            }
            .to_string()
        }),
        default_kind.to_string(),
    )?;
    match kind_name.as_str() {
        "exact" => {
            if n != 1 {
                return Err(CliError::usage(
                    "the exact sampler is rank-one only (--n 1)".to_string(),
                ));
            }
            Ok(HaarSampler::exact_modular(seed))
        }
        "walk" => Ok(HaarSampler::random_walk(n, seed)?),
        other => Err(CliError::usage(format!("unknown sampler kind {other:?}"))),
    }
}

fn run_moment_mc(r: &mut Resolver, args: MomentMcArgs) -> CliResult<Emitted> {
    let n = r.value("n", args.n, 1usize)?;
    if n == 0 {
        return Err(CliError::usage("--n must be positive".to_string()));
    }
    let f = ProductFunction::spherical(n, radial_param(r, &args.family)?);
    let samples = r.value("samples", args.samples, 10_000u64)?;
    let seed = r.required("seed", args.seed)?;
    let tolerance = r.value("tolerance", args.tolerance, 0.05f64)?;
    let sampler = sampler_param(r, n, args.sampler, seed)?;
    let run = mc_moments(&f, &sampler, samples, tolerance)?;
    let pass = run.first.verdict && run.second.verdict;
    Ok(document(
        r.config_echo(),
        json!({
            "first": report_json(&run.first),
            "second": report_json(&run.second),
            "radius": run.radius,
        }),
        !pass,
    ))
}

fn run_discrepancy_ms(r: &mut Resolver, args: DiscrepancyMsArgs) -> CliResult<Emitted> {
    let n = r.value("n", args.n, 2usize)?;
    if n == 0 {
        return Err(CliError::usage("--n must be positive".to_string()));
    }
    let samples = r.value("samples", args.samples, 1000u64)?;
    let seed = r.required("seed", args.seed)?;
    let sampler = sampler_param(r, n, args.sampler, seed)?;
    let region = region_param(r, &args.region, 2 * n)?;
    let run = discrepancy_meansquare(&region, &sampler, samples)?;
    let pass = run.primitive.verdict && run.all_points.verdict;
    Ok(document(
        r.config_echo(),
        json!({
            "primitive": report_json(&run.primitive),
            "all_points": report_json(&run.all_points),
            "volume": region.volume(2 * n),
        }),
        !pass,
    ))
}

fn run_dilation_scan(r: &mut Resolver, args: DilationScanArgs) -> CliResult<Emitted> {
    let n = r.value("n", args.n, 2usize)?;
    if n == 0 {
        return Err(CliError::usage("--n must be positive".to_string()));
    }
    let basis = basis_param(r, n, args.basis, args.seed, args.index)?;
    let center_raw = r
        .raw("center", args.center)
        .unwrap_or_else(|| {
            let mut c = vec!["0.2".to_string()];
            c.resize(2 * n, "0".to_string());
            c.join(",")
        });
    let center = parse_floats(&center_raw)?;
    r.record("center", center.clone().into());
    let r_inner = r.value("r-inner", args.r_inner, 0.5f64)?;
    let default_outer = unit_volume_outer(2 * n, r_inner);
    let r_outer = r.value("r-outer", args.r_outer, default_outer)?;
    let grid_raw = r
        .raw("t-grid", args.t_grid)
        .unwrap_or_else(|| "5,10,15,20,25,30,35,40".to_string());
    let t_grid = parse_floats(&grid_raw)?;
    r.record("t-grid", t_grid.clone().into());
    let csv = args.csv || r.lookup::<bool>("csv")?.unwrap_or(false);
    r.record("csv", csv.into());

    let inner_center_raw = r.raw("inner-center", args.inner_center);
    let piece = match inner_center_raw {
        Some(raw) => {
            let hole = parse_floats(&raw)?;
            r.record("inner-center", hole.clone().into());
            StarPiece::difference(center, r_outer, hole, r_inner)
        }
        None if r_inner == 0.0 => StarPiece::ball(center, r_outer),
        None => StarPiece::shell(center, r_inner, r_outer),
    };
    let records = dilation_scan(&[piece], &basis, &t_grid)?;

    if csv {
        let mut text = String::from("t,d_primitive\n");
        for rec in &records {
            text += &format!("{},{}\n", rec.t, rec.d_primitive);
        }
        return Ok(Emitted {
            text,
            verdict_failed: false,
        });
    }
    let config = r.config_echo();
    let mut text = String::new();
    for rec in &records {
        let line = json!({
            "config": config,
            "t": rec.t,
            "volume": rec.volume,
            "count_all": rec.count_all,
            "count_primitive": rec.count_primitive,
            "d_all": rec.d_all,
            "d_primitive": rec.d_primitive,
            "bound": rec.bound,
        });
        text += &(serde_json::to_string(&line).expect("serialization") + "\n");
    }
    Ok(Emitted {
        text,
        verdict_failed: false,
    })
}

/// Outer radius making the piece volume exactly one.
fn unit_volume_outer(d: usize, r_inner: f64) -> f64 {
    let unit = symlat::lattice::ball_volume(d, 1.0);
    (r_inner.powi(d as i32) + 1.0 / unit).powf(1.0 / d as f64)
}

fn run_schmidt_dyadic(r: &mut Resolver, args: SchmidtDyadicArgs) -> CliResult<Emitted> {
    let n = r.value("n", args.n, 2usize)?;
    if n == 0 {
        return Err(CliError::usage("--n must be positive".to_string()));
    }
    let samples = r.value("samples", args.samples, 500u64)?;
    let seed = r.required("seed", args.seed)?;
    let depth = r.value("depth", args.depth, 8u32)?;
    let profile_index = r.value("profile-index", args.profile_index, 0u64)?;
    let sampler = if n == 1 {
        HaarSampler::exact_modular(seed)
    } else {
        HaarSampler::random_walk(n, seed)?
    };
    let report = schmidt_dyadic(&sampler, samples, depth)?;

    // Per-lattice deviation profile for one sample of the same stream.
    let basis = sampler.sample_basis(profile_index)?;
    let deviations = schmidt_deviations(&basis, depth)?;
    let onset = deviation_onset(&deviations);
    let max_ratio = deviations
        .iter()
        .enumerate()
        .skip(1)
        .map(|(idx, s)| {
            let nn = (idx + 1) as f64;
            s.abs() / (nn.sqrt() * nn.ln().powi(2))
        })
        .fold(0.0f64, f64::max);

    let pass = report.verdict;
    Ok(document(
        r.config_echo(),
        json!({
            "report": report_json(&report),
            "profile": {
                "index": profile_index,
                "envelope_onset": onset,
                "max_envelope_ratio": max_ratio,
            },
        }),
        !pass,
    ))
}

fn run_selftest(args: SelftestArgs) -> CliResult<Emitted> {
    let rows = run_all_selected(&args.criteria);
    if rows.is_empty() {
        return Err(CliError::usage(
            "no matching gates (valid numbers are 1 through 12)".to_string(),
        ));
    }
    let failed = rows.iter().any(|row| !row.pass);
    let mut text = String::new();
    for row in &rows {
        if args.json {
            text += &(serde_json::to_string(row).expect("serialization") + "\n");
        } else {
            text += &(row.render() + "\n");
        }
    }
    Ok(Emitted {
        text,
        verdict_failed: failed,
    })
}

// -------------------------------------------------------------------------
// Entry point
// -------------------------------------------------------------------------

fn dispatch(cli: Cli, resolver: &mut Resolver) -> CliResult<Emitted> {
    match cli.command {
        Command::Xi(args) => run_xi(resolver, args),
        Command::Zfactor(args) => run_zfactor(resolver, args),
        Command::HarmonicDim(args) => run_harmonic_dim(resolver, args),
        Command::RaiseCheck(args) => run_raise_check(resolver, args),
        Command::Count(args) => run_count(resolver, args),
        Command::Siegel(args) => run_siegel(resolver, args),
        Command::Eisenstein(args) => run_eisenstein(resolver, args),
        Command::ConstantTerm(args) => run_constant_term(resolver, args),
        Command::PeriodCheck(args) => run_period_check(resolver, args),
        Command::IsometryCheck(args) => run_isometry_check(resolver, args),
        Command::MomentRhs(args) => run_moment_rhs(resolver, args),
        Command::MomentMc(args) => run_moment_mc(resolver, args),
        Command::DiscrepancyMs(args) => run_discrepancy_ms(resolver, args),
        Command::DilationScan(args) => run_dilation_scan(resolver, args),
        Command::SchmidtDyadic(args) => run_schmidt_dyadic(resolver, args),
        Command::Selftest(args) => run_selftest(args),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = Cli::parse();

    let mut resolver = match Resolver::new(cli.config.as_deref()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e.message);
            return ExitCode::from(1);
        }
    };

    // Worker count: flag, then environment, then config file, then 1.
    let workers = cli
        .workers
        .or_else(|| {
            std::env::var("SYMLAT_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .or_else(|| resolver.lookup("workers").ok().flatten())
        .unwrap_or(1);
    resolver.record("workers", (workers as u64).into());
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build_global();

    let out_path = cli.out.clone();
    match dispatch(cli, &mut resolver) {
        Ok(emitted) => {
            if let Some(path) = out_path {
                if let Err(e) = std::fs::write(&path, emitted.text.as_bytes()) {
                    eprintln!("error: cannot write {path}: {e}");
                    return ExitCode::from(1);
                }
            } else {
                print!("{}", emitted.text);
                let _ = std::io::stdout().flush();
            }
            eprintln!("elapsed: {:.1} ms", start.elapsed().as_secs_f64() * 1e3);
            if emitted.verdict_failed {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            let _ = e.usage;
            ExitCode::from(1)
        }
    }
}
