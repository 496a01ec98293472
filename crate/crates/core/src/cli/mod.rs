//! The `k3lattice` command-line tool.
//!
//! Every subcommand reads JSON (from `--input` or stdin) and/or flags, and
//! writes one JSON object to stdout. Nothing is printed on failure except a
//! message on stderr; the exit status says what went wrong:
//! 0 success, 2 bad input, 3 violated mathematical precondition,
//! 4 inconsistent data.

mod json;

use std::ffi::OsString;
use std::io::Read;
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Deserialize;
use serde_json::{json, Value};

use json::{
    int, int_list, int_matrix, ints, matrix, rat, rat_matrix, rat_rows, rats, signature, vector,
};
pub use json::{IntText, LatticeDocument, ProvenanceBlock, RatText};

use crate::arith::prime_divisors;
use crate::bb::{bilinear, degree_to_bb, lambda_n, q_from_w, w_from_q, BbNorm, RatVector};
use crate::density::{
    empirical_density, inert_in_any, inert_union_theoretical, union_inert_density,
    PrimePredicateReport,
};
use crate::disc::discriminant_group;
use crate::enumeration::{is_isometric_definite, vectors_of_norm, DEFAULT_ISOMETRY_RANK};
use crate::error::{LatticeError, Result};
use crate::lattice::{LatticeVector, QuadLattice};
use crate::local::{
    artin_invariant, is_selfdual_at_p, jordan_decomposition, pointed_invariants,
    zp_pointed_equivalent,
};
use crate::moduli::{
    abel_jacobi_constants, check_k3_crystal_pairing, cubic_lambda2_comparison,
    cubic_primitive_lattice, fermat_transcendental_lattice, mukai_lattice, mukai_pairing,
    mukai_perp_disc_check, FrobeniusPairingInstance, MukaiVector,
};
use crate::newton::{is_supersingular_newton, newton_polygon};

/// Environment variable capping the worker threads used internally.
pub const THREADS_ENV: &str = "K3LATTICE_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "k3lattice",
    version,
    about = "Exact lattice arithmetic for K3^[n]-type and cubic fourfold lattices"
)]
struct Cli {
    /// Wrap the result as {"data": ..., "meta": ...} with timing information
    #[arg(long, global = true)]
    meta: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct InputArg {
    /// Read the JSON input from this file instead of stdin
    #[arg(long, short)]
    input: Option<std::path::PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit a named lattice as a JSON document
    Build {
        #[arg(value_enum)]
        kind: BuildKind,
        /// n for `lambda`, m for `rank1`
        #[arg(long, allow_negative_numbers = true)]
        n: Option<i64>,
    },
    /// Discriminant group, its quadratic form and primary parts
    Disc(InputArg),
    /// Recover the Beauville–Bogomolov form from top-degree products
    BbRecover(InputArg),
    /// Empirical and theoretical prime densities
    Density(DensityArgs),
    /// Newton polygon of an integer polynomial
    Newton {
        #[arg(long)]
        prime: String,
        /// Coefficients in ascending degree, comma separated
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        coeffs: Vec<String>,
        /// Cohomological weight for the supersingularity test
        #[arg(long)]
        weight: Option<u32>,
    },
    /// Artin invariant of a supersingular Tate-type lattice
    Artin {
        #[arg(long)]
        prime: String,
        #[command(flatten)]
        input: InputArg,
    },
    /// Odd-prime Jordan decomposition
    Jordan {
        #[arg(long)]
        prime: String,
        #[arg(long)]
        precision: Option<u32>,
        #[command(flatten)]
        input: InputArg,
    },
    /// All vectors of a given norm in a definite lattice
    Enumerate {
        #[arg(long, allow_negative_numbers = true)]
        norm: String,
        #[arg(long, default_value = "1000")]
        coeff_bound: String,
        #[command(flatten)]
        input: InputArg,
    },
    /// Isometry test for two definite lattices
    Isometric(InputArg),
    /// Invariants of pointed lattices and p-adic equivalence of two points
    Pointed {
        #[arg(long)]
        prime: Option<String>,
        #[command(flatten)]
        input: InputArg,
    },
    /// Mukai lattice, Mukai pairing and the discriminant check on v⊥
    Mukai {
        #[arg(long)]
        prime: Option<String>,
        #[command(flatten)]
        input: InputArg,
    },
    /// Frobenius compatibility F(x)·F(y) = p²(x·y)
    Crystal(InputArg),
    /// Degrees attached to the Fano variety of lines of a cubic fourfold
    Constants,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BuildKind {
    U,
    E8,
    Lambda,
    Rank1,
    Cubic,
    Fermat,
}

#[derive(Args, Debug)]
#[group(skip)]
#[command(group(clap::ArgGroup::new("predicate").required(true).multiple(false).args(["fermat", "inert", "union"])))]
struct DensityArgs {
    /// Primes p ≡ 2 (mod 3)
    #[arg(long)]
    fermat: bool,
    /// Primes inert in at least one Q(√−d)
    #[arg(long, value_delimiter = ',')]
    inert: Option<Vec<u64>>,
    /// Like --inert, for a set of distinct primes d
    #[arg(long, value_delimiter = ',')]
    union: Option<Vec<u64>>,
    #[arg(long, default_value_t = 1_000_000)]
    bound: u64,
}

/// Exit status, stdout and stderr of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(err: &LatticeError) -> i32 {
    match err {
        LatticeError::InvalidInput(_) | LatticeError::DimensionMismatch { .. } => 2,
        LatticeError::Degenerate(_)
        | LatticeError::Domain(_)
        | LatticeError::UnsupportedPrime(_)
        | LatticeError::Capacity(_)
        | LatticeError::Structure(_) => 3,
        LatticeError::Inconsistent(_) => 4,
    }
}

fn failure(err: LatticeError) -> Outcome {
    Outcome {
        code: exit_code(&err),
        stdout: String::new(),
        stderr: format!("error: {err}\n"),
    }
}

fn thread_count() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(LatticeError::invalid(format!(
                "{THREADS_ENV} must be a positive integer, got {s:?}"
            ))),
        },
    }
}

/// Runs the tool on `args` (including the program name), reading JSON input
/// from `stdin` when no `--input` file is given.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let threads = match thread_count() {
        Ok(t) => t,
        Err(e) => return failure(e),
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            return failure(LatticeError::invalid(format!(
                "cannot start worker threads: {e}"
            )))
        }
    };
    let started = Instant::now();
    // input is read up front so that no partial work happens on bad input
    let text = match input_arg(&cli.command)
        .map(|arg| read_input(arg, stdin))
        .transpose()
    {
        Ok(t) => t.unwrap_or_default(),
        Err(e) => return failure(e),
    };
    let result = pool.install(|| dispatch(&cli.command, &text));
    match result {
        Err(e) => failure(e),
        Ok(data) => {
            let payload = if cli.meta {
                let unix = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                json!({
                    "data": data,
                    "meta": {
                        "command": command_name(&cli.command),
                        "version": env!("CARGO_PKG_VERSION"),
                        "elapsed_ms": started.elapsed().as_secs_f64() * 1000.0,
                        "unix_time": unix,
                        "threads": pool.current_num_threads(),
                    }
                })
            } else {
                data
            };
            let mut stdout = serde_json::to_string_pretty(&payload).expect("JSON values serialize");
            stdout.push('\n');
            Outcome {
                code: 0,
                stdout,
                stderr: String::new(),
            }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Build { .. } => "build",
        Command::Disc(_) => "disc",
        Command::BbRecover(_) => "bb-recover",
        Command::Density(_) => "density",
        Command::Newton { .. } => "newton",
        Command::Artin { .. } => "artin",
        Command::Jordan { .. } => "jordan",
        Command::Enumerate { .. } => "enumerate",
        Command::Isometric(_) => "isometric",
        Command::Pointed { .. } => "pointed",
        Command::Mukai { .. } => "mukai",
        Command::Crystal(_) => "crystal",
        Command::Constants => "constants",
    }
}

fn input_arg(c: &Command) -> Option<&InputArg> {
    match c {
        Command::Disc(i) | Command::BbRecover(i) | Command::Isometric(i) | Command::Crystal(i) => {
            Some(i)
        }
        Command::Artin { input, .. }
        | Command::Jordan { input, .. }
        | Command::Enumerate { input, .. }
        | Command::Pointed { input, .. }
        | Command::Mukai { input, .. } => Some(input),
        Command::Build { .. }
        | Command::Density(_)
        | Command::Newton { .. }
        | Command::Constants => None,
    }
}

fn read_input(arg: &InputArg, stdin: &mut dyn Read) -> Result<String> {
    let mut text = String::new();
    match &arg.input {
        Some(path) => {
            text = std::fs::read_to_string(path).map_err(|e| {
                LatticeError::invalid(format!("cannot read {}: {e}", path.display()))
            })?;
        }
        None => {
            stdin
                .read_to_string(&mut text)
                .map_err(|e| LatticeError::invalid(format!("cannot read stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn parse_int(label: &str, s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim())
        .map_err(|_| LatticeError::invalid(format!("{label}: not an integer: {s:?}")))
}

fn read_lattice(text: &str) -> Result<QuadLattice> {
    let doc: LatticeDocument = json::parse(text)?;
    doc.to_lattice()
}

fn dispatch(command: &Command, text: &str) -> Result<Value> {
    match command {
        Command::Build { kind, n } => cmd_build(*kind, *n),
        Command::Disc(_) => cmd_disc(&read_lattice(text)?),
        Command::BbRecover(_) => cmd_bb_recover(&json::parse(text)?),
        Command::Density(args) => cmd_density(args),
        Command::Newton {
            prime,
            coeffs,
            weight,
        } => cmd_newton(prime, coeffs, *weight),
        Command::Artin { prime, .. } => {
            let lattice = read_lattice(text)?;
            cmd_artin(&lattice, &parse_int("prime", prime)?)
        }
        Command::Jordan {
            prime, precision, ..
        } => {
            let lattice = read_lattice(text)?;
            cmd_jordan(&lattice, &parse_int("prime", prime)?, *precision)
        }
        Command::Enumerate {
            norm, coeff_bound, ..
        } => {
            let norm = parse_int("norm", norm)?;
            let bound = parse_int("coeff-bound", coeff_bound)?;
            if bound <= BigInt::zero() {
                return Err(LatticeError::invalid("coeff-bound must be positive"));
            }
            let lattice = read_lattice(text)?;
            cmd_enumerate(&lattice, &norm, &bound)
        }
        Command::Isometric(_) => cmd_isometric(&json::parse(text)?),
        Command::Pointed { prime, .. } => {
            let prime = prime
                .as_deref()
                .map(|p| parse_int("prime", p))
                .transpose()?;
            cmd_pointed(&json::parse(text)?, prime.as_ref())
        }
        Command::Mukai { prime, .. } => {
            let prime = prime
                .as_deref()
                .map(|p| parse_int("prime", p))
                .transpose()?;
            cmd_mukai(&json::parse(text)?, prime.as_ref())
        }
        Command::Crystal(_) => cmd_crystal(&json::parse(text)?),
        Command::Constants => cmd_constants(),
    }
}

fn cmd_build(kind: BuildKind, n: Option<i64>) -> Result<Value> {
    let need_n = |what: &str| n.ok_or_else(|| LatticeError::invalid(format!("{what} needs --n")));
    let (lattice, name) = match kind {
        BuildKind::U => (QuadLattice::hyperbolic_plane(), "U".to_string()),
        BuildKind::E8 => (QuadLattice::e8(), "E8".to_string()),
        BuildKind::Lambda => {
            let n = need_n("lambda")?;
            (QuadLattice::lambda(n)?, format!("Lambda_{n}"))
        }
        BuildKind::Rank1 => {
            let m = need_n("rank1")?;
            (QuadLattice::rank1(m)?, format!("<{m}>"))
        }
        BuildKind::Cubic => (
            cubic_primitive_lattice(),
            "cubic primitive lattice".to_string(),
        ),
        BuildKind::Fermat => (
            fermat_transcendental_lattice(),
            "Fermat cubic transcendental lattice".to_string(),
        ),
    };
    Ok(
        serde_json::to_value(LatticeDocument::from_lattice(&lattice, Some(name)))
            .expect("document serializes"),
    )
}

fn lattice_summary(l: &QuadLattice) -> Value {
    json!({
        "rank": l.rank(),
        "det": int(&l.det()),
        "signature": signature(l.signature()),
        "even": l.is_even(),
    })
}

fn cmd_disc(lattice: &QuadLattice) -> Result<Value> {
    let form = discriminant_group(lattice);
    let mut locals = Vec::new();
    for p in prime_divisors(&form.order()) {
        let part = form.local_part(&p)?;
        let mut entry = json::finite_form(&part);
        entry["prime"] = int(&p);
        locals.push(entry);
    }
    let mut out = json::finite_form(&form);
    out["lattice"] = lattice_summary(lattice);
    out["exponent"] = int(&form.exponent());
    out["local_parts"] = Value::Array(locals);
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WSample {
    args: Vec<Vec<RatText>>,
    value: RatText,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BbInput {
    n: u32,
    #[serde(default)]
    q: Option<Vec<Vec<RatText>>>,
    #[serde(default)]
    w_samples: Option<Vec<WSample>>,
    #[serde(default)]
    degree: Option<IntText>,
    #[serde(default)]
    xi: Option<Vec<RatText>>,
    #[serde(default)]
    q_xi: Option<RatText>,
    #[serde(default)]
    basis: Option<Vec<Vec<RatText>>>,
}

fn unit_basis(r: usize) -> Vec<RatVector> {
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| BigRational::from_integer(BigInt::from((i == j) as i64)))
                .collect()
        })
        .collect()
}

/// Exact rational `n`-th root, if there is one.
fn rational_root(x: &BigRational, n: u32) -> Option<BigRational> {
    let negative = x < &BigRational::zero();
    if negative && n.is_multiple_of(2) {
        return None;
    }
    let root = |v: &BigInt| {
        let r = v.nth_root(n);
        (num_traits::pow(r.clone(), n as usize) == *v).then_some(r)
    };
    let r = BigRational::new(root(x.numer())?, root(x.denom())?);
    Some(r)
}

fn cmd_bb_recover(input: &BbInput) -> Result<Value> {
    let modes = [
        input.q.is_some(),
        input.w_samples.is_some(),
        input.degree.is_some(),
    ];
    if modes.iter().filter(|&&m| m).count() != 1 {
        return Err(LatticeError::invalid(
            "give exactly one of \"q\", \"w_samples\" or \"degree\"",
        ));
    }
    let n = input.n;
    if n == 0 {
        return Err(LatticeError::invalid("n must be at least 1"));
    }
    if let Some(d) = &input.degree {
        let norm = degree_to_bb(&d.0, n)?;
        let mut out =
            json!({"mode": "degree", "n": n, "degree": int(&d.0), "lambda_n": int(&lambda_n(n))});
        match norm {
            BbNorm::Exact { value, integral } => {
                out["exact"] = json!(true);
                out["integral"] = json!(integral);
                out["bb_norm"] = rat(&value);
            }
            BbNorm::Irrational { lower, upper } => {
                out["exact"] = json!(false);
                out["lower"] = rat(&lower);
                out["upper"] = rat(&upper);
            }
        }
        return Ok(out);
    }
    let xi = rats(
        input
            .xi
            .as_ref()
            .ok_or_else(|| LatticeError::invalid("\"xi\" is required"))?,
    );
    let basis = match &input.basis {
        Some(b) => rat_matrix(b),
        None => unit_basis(xi.len()),
    };
    if let Some(q) = &input.q {
        let q = rat_matrix(q);
        if q.len() != xi.len() {
            return Err(LatticeError::DimensionMismatch {
                expected: q.len(),
                actual: xi.len(),
            });
        }
        let q_xi = bilinear(&q, &xi, &xi);
        let recovered = q_from_w(|args| w_from_q(&q, n, args), n, &xi, &q_xi, &basis)?;
        return Ok(json!({
            "mode": "q",
            "n": n,
            "q_xi": rat(&q_xi),
            "q": rat_rows(&recovered),
            "roundtrip": input.basis.is_none() && recovered == q,
        }));
    }
    let samples = input.w_samples.as_ref().expect("mode checked");
    let mut table: std::collections::BTreeMap<Vec<Vec<BigRational>>, BigRational> =
        Default::default();
    for s in samples {
        let mut key: Vec<Vec<BigRational>> = s.args.iter().map(|a| rats(a)).collect();
        key.sort();
        if let Some(prev) = table.insert(key, s.value.0.clone()) {
            if prev != s.value.0 {
                return Err(LatticeError::Inconsistent(
                    "two samples of the symmetric form disagree on the same arguments".into(),
                ));
            }
        }
    }
    let lookup = |args: &[RatVector]| -> Result<BigRational> {
        let mut key = args.to_vec();
        key.sort();
        table.get(&key).cloned().ok_or_else(|| {
            let shown: Vec<Vec<String>> = args
                .iter()
                .map(|a| a.iter().map(|x| x.to_string()).collect())
                .collect();
            LatticeError::invalid(format!("no sample for w at {shown:?}"))
        })
    };
    let q_xi = match &input.q_xi {
        Some(v) => v.0.clone(),
        None => {
            if n.is_multiple_of(2) {
                return Err(LatticeError::invalid(
                    "\"q_xi\" is required for even n: w determines q only up to sign",
                ));
            }
            let top = lookup(&vec![xi.clone(); 2 * n as usize])?;
            let t = top / BigRational::from_integer(lambda_n(n));
            rational_root(&t, n).ok_or_else(|| {
                LatticeError::Inconsistent(format!(
                    "w(ξ, …, ξ)/λₙ = {t} has no rational {n}-th root"
                ))
            })?
        }
    };
    let recovered = q_from_w(lookup, n, &xi, &q_xi, &basis)?;
    Ok(json!({
        "mode": "w_samples",
        "n": n,
        "q_xi": rat(&q_xi),
        "q": rat_rows(&recovered),
    }))
}

fn density_json(report: &PrimePredicateReport, predicate: Value) -> Value {
    json!({
        "predicate": predicate,
        "bound": report.bound,
        "total_primes": report.total_primes,
        "hits": report.hits,
        "empirical_density": rat(&report.empirical_density),
        "empirical_density_approx": format!("{:.6}", report.empirical_density.to_f64().unwrap_or(f64::NAN)),
        "theoretical_density": report.theoretical_density.as_ref().map(rat),
        "deviation": report.deviation().map(|d| format!("{d:.6}")),
    })
}

fn cmd_density(args: &DensityArgs) -> Result<Value> {
    if args.fermat {
        let half = BigRational::new(1.into(), 2.into());
        let report = empirical_density(|p| p % 3 == 2, args.bound, Some(half))?;
        return Ok(density_json(&report, json!({"kind": "fermat"})));
    }
    if let Some(ds) = &args.inert {
        let theory = inert_union_theoretical(ds)?;
        let report = empirical_density(inert_in_any(ds)?, args.bound, Some(theory))?;
        return Ok(density_json(
            &report,
            json!({"kind": "inert", "fields": ds}),
        ));
    }
    let ps = args.union.as_ref().expect("clap enforces one predicate");
    let theory = union_inert_density(ps)?;
    let report = empirical_density(inert_in_any(ps)?, args.bound, Some(theory))?;
    Ok(density_json(
        &report,
        json!({"kind": "union", "primes": ps}),
    ))
}

fn cmd_newton(prime: &str, coeffs: &[String], weight: Option<u32>) -> Result<Value> {
    let p = parse_int("prime", prime)?;
    let coeffs: Vec<BigInt> = coeffs
        .iter()
        .map(|c| parse_int("coefficient", c))
        .collect::<Result<_>>()?;
    let np = newton_polygon(&coeffs, &p)?;
    Ok(json!({
        "prime": int(&p),
        "degree": np.degree(),
        "slopes": np.slopes.iter().map(|(s, m)| json!({"valuation": rat(s), "multiplicity": m})).collect::<Vec<_>>(),
        "weight": weight,
        "supersingular": weight.map(|w| is_supersingular_newton(&np, w)),
    }))
}

fn cmd_artin(lattice: &QuadLattice, prime: &BigInt) -> Result<Value> {
    let a = artin_invariant(lattice, prime)?;
    Ok(json!({
        "prime": int(&a.prime),
        "sigma": a.sigma,
        "superspecial": a.superspecial,
        "t0_basis": a.t0_basis.iter().map(vector).collect::<Vec<_>>(),
        "t1_basis": a.t1_basis.iter().map(vector).collect::<Vec<_>>(),
        "lints": a.lints,
    }))
}

fn cmd_jordan(lattice: &QuadLattice, prime: &BigInt, precision: Option<u32>) -> Result<Value> {
    let j = jordan_decomposition(lattice, prime, precision)?;
    let mut out = json::jordan(&j);
    out["selfdual"] = json!(is_selfdual_at_p(lattice, prime)?);
    Ok(out)
}

fn cmd_enumerate(lattice: &QuadLattice, norm: &BigInt, bound: &BigInt) -> Result<Value> {
    let set = vectors_of_norm(lattice, norm, bound)?;
    Ok(json!({
        "norm": int(&set.norm),
        "count": set.len(),
        "vectors": set.vectors.iter().map(vector).collect::<Vec<_>>(),
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IsometricInput {
    a: LatticeDocument,
    b: LatticeDocument,
    #[serde(default)]
    max_rank: Option<usize>,
}

fn cmd_isometric(input: &IsometricInput) -> Result<Value> {
    let a = input.a.to_lattice()?;
    let b = input.b.to_lattice()?;
    let g = is_isometric_definite(&a, &b, input.max_rank.unwrap_or(DEFAULT_ISOMETRY_RANK))?;
    Ok(json!({
        "isometric": g.is_some(),
        "isometry": g.as_ref().map(matrix),
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointedInput {
    lattice: LatticeDocument,
    point: Vec<IntText>,
    #[serde(default)]
    other_point: Option<Vec<IntText>>,
}

fn pointed_json(lattice: &QuadLattice, point: &LatticeVector) -> Result<Value> {
    let inv = pointed_invariants(lattice, point)?;
    Ok(json!({
        "point": vector(point),
        "signature": signature(inv.signature),
        "point_norm": int(&inv.point_norm),
        "divisibility": int(&inv.divisibility),
        "complement": json::local_data(&inv.complement),
        "ambient": json::local_data(&inv.ambient),
        "certification": json::certification(inv.certification),
    }))
}

fn cmd_pointed(input: &PointedInput, prime: Option<&BigInt>) -> Result<Value> {
    let lattice = input.lattice.to_lattice()?;
    let point = LatticeVector(ints(&input.point));
    let mut out = json!({"first": pointed_json(&lattice, &point)?});
    match &input.other_point {
        Some(other) => {
            let other = LatticeVector(ints(other));
            out["second"] = pointed_json(&lattice, &other)?;
            let a = pointed_invariants(&lattice, &point)?;
            let b = pointed_invariants(&lattice, &other)?;
            out["invariants_match"] = json!(a.matches(&b)?);
            if let Some(p) = prime {
                let v = zp_pointed_equivalent(&lattice, &point, &other, p)?;
                out["zp_equivalence"] = json!({
                    "prime": int(p),
                    "equivalent": v.equivalent,
                    "certification": json::certification(v.certification),
                });
            }
        }
        None if prime.is_some() => {
            return Err(LatticeError::invalid(
                "--prime compares two points; give \"other_point\"",
            ));
        }
        None => {}
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MukaiVectorInput {
    r: IntText,
    c1: Vec<IntText>,
    s: IntText,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MukaiInput {
    ns: LatticeDocument,
    #[serde(default)]
    v: Option<MukaiVectorInput>,
    /// shorthand for v = (1, 0, 1 − n)
    #[serde(default)]
    hilbert_n: Option<i64>,
}

fn cmd_mukai(input: &MukaiInput, prime: Option<&BigInt>) -> Result<Value> {
    let ns = input.ns.to_lattice()?;
    let v = match (&input.v, input.hilbert_n) {
        (Some(v), None) => {
            MukaiVector::new(v.r.0.clone(), LatticeVector(ints(&v.c1)), v.s.0.clone())
        }
        (None, Some(n)) => MukaiVector::hilbert_scheme(ns.rank(), n),
        _ => {
            return Err(LatticeError::invalid(
                "give exactly one of \"v\" and \"hilbert_n\"",
            ))
        }
    };
    let v2 = mukai_pairing(&v, &v, &ns)?;
    let mukai = mukai_lattice(&ns);
    let mut out = json!({
        "v": {"r": int(&v.r), "c1": vector(&v.c1), "s": int(&v.s)},
        "v_squared": int(&v2),
        "mukai_gram": matrix(mukai.gram()),
        "mukai_lattice": lattice_summary(&mukai),
    });
    if let Some(p) = prime {
        let r = mukai_perp_disc_check(&v, &ns, p)?;
        out["perp_check"] = json!({
            "prime": int(&r.prime),
            "perp_rank": r.perp_rank,
            "perp_det": int(&r.perp_det),
            "perp_disc_p_order": int(&r.perp_disc_p_order),
            "ns_disc_p_order": int(&r.ns_disc_p_order),
            "orders_match": r.perp_disc_p_order == r.ns_disc_p_order,
            "lints": r.lints,
        });
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CrystalInput {
    frobenius: Vec<Vec<IntText>>,
    gram: Vec<Vec<IntText>>,
    prime: IntText,
}

fn cmd_crystal(input: &CrystalInput) -> Result<Value> {
    let inst = FrobeniusPairingInstance {
        frobenius: int_matrix(&input.frobenius)?,
        gram: int_matrix(&input.gram)?,
        prime: input.prime.0.clone(),
    };
    let ok = check_k3_crystal_pairing(&inst)?;
    Ok(json!({
        "prime": int(&inst.prime),
        "compatible": ok,
        "pulled_back": matrix(&inst.frobenius.congruence(&inst.gram)?),
    }))
}

fn cmd_constants() -> Result<Value> {
    let c = abel_jacobi_constants()?;
    let cmp = cubic_lambda2_comparison()?;
    Ok(json!({
        "h4": int(&c.h4),
        "g_bb": int(&c.g_bb),
        "g4": int(&c.g4),
        "lambda_2": int(&lambda_n(2)),
        "lambda2_polarization": {
            "point": vector(&cmp.point),
            "norm": int(&cmp.point_norm),
            "divisibility": int(&cmp.divisibility),
            "complement_signature": signature(cmp.complement_signature),
            "complement_det": int(&cmp.complement_det),
            "complement_invariant_factors": int_list(&cmp.complement_invariant_factors),
        },
        "cubic_lattice": {
            "signature": signature(cmp.cubic_signature),
            "invariant_factors": int_list(&cmp.cubic_invariant_factors),
        },
    }))
}
