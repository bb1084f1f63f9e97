//! `drcalc`: exact double ramification cycles from the command line.
//!
//! Subcommands:
//!
//! * `dr`          — the double ramification cycle `DR_g(a, k)` as an exact
//!   tautological class (with `--u`, its Hodge-type extension);
//! * `chiodo-eval` — the interpolated Chiodo-class polynomial in the root
//!   order `r` (with `--r`, the rescaled class at one fixed `r`);
//! * `pixton-eval` — the interpolated Pixton-sum polynomial in `r` (with
//!   `--r`, the finite sum at one fixed `r`);
//! * `pair`        — integrate a stored class against a psi monomial;
//! * `excess-scan` — exhaustively check the excess-dimension inequalities
//!   on small stable graphs.
//!
//! Results are emitted as a single JSON document on stdout (or `--output`),
//! with every rational number rendered exactly as a `p/q` string; a
//! human-readable table goes to stderr.  Flags override a `--config` JSON
//! file, which overrides built-in defaults.  Exit codes: 0 success,
//! 1 validation or usage error, 2 stabilization failure, 3 counterexample.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use drcalc_core::exactmath::{format_rational, pow_r, Rational};
use drcalc_core::excess::smoothness_scan;
use drcalc_core::formulas::{
    chiodo_poly_with_policy, dr_cycle_with_policy, epsilon_total_chern, hodge_dr_with_policy,
    pixton_p, pixton_poly_with_policy, DRInput, EdgeConvention, RSamplePolicy,
};
use drcalc_core::tautclass::{LegKappaPoly, TautClass, TautPolyClass};
use drcalc_core::witten::WittenCache;
use drcalc_core::{Error, Result};

/// Environment variable naming the persistent intersection-number cache
/// directory.  `--cache-dir` and the config file take precedence; with
/// neither set, the cache is kept in memory for the current run only.
const CACHE_DIR_ENV: &str = "DRCALC_CACHE_DIR";

#[derive(Parser)]
#[command(
    name = "drcalc",
    version,
    about = "Exact double ramification cycles, Chiodo classes, and Pixton sums \
             on moduli of stable curves"
)]
struct Cli {
    /// JSON config file; explicit flags override its fields.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory for the persistent intersection-number cache (default:
    /// $DRCALC_CACHE_DIR if set, otherwise in-memory).
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    /// Write the JSON result to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the double ramification cycle (or, with --u, the Hodge-type
    /// class extending it).
    Dr(DrArgs),
    /// Interpolate the Chiodo-class polynomial in the root order r; with
    /// --r, evaluate the rescaled class at that fixed r instead.
    ChiodoEval(EvalArgs),
    /// Interpolate the Pixton-sum polynomial in r; with --r, evaluate the
    /// finite sum at that fixed r instead.
    PixtonEval(EvalArgs),
    /// Integrate a stored class file against a psi monomial.
    Pair(PairArgs),
    /// Exhaustively check the excess-dimension inequalities on small stable
    /// graphs.
    ExcessScan(ScanArgs),
}

#[derive(Args)]
struct DrArgs {
    /// Genus.
    #[arg(long)]
    g: Option<u32>,

    /// Comma-separated ramification vector, one entry per marking; entry i
    /// sits at the marking labelled i+1.  Must sum to -k(2g-2+n).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<i64>>,

    /// Number of markings; optional, but must equal the length of --a.
    #[arg(long)]
    n: Option<u32>,

    /// Twist: the power of the log cotangent line in the twisted bundle
    /// (default 0).
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i64>,

    /// Ground-class power: 0 gives the plain cycle, u > 0 the Hodge-type
    /// class of codimension g+u (default 0).
    #[arg(long)]
    u: Option<u32>,

    /// Edge-factor convention: `w-wprime` (default) or `w-squared`.
    #[arg(long, value_parser = parse_convention)]
    convention: Option<EdgeConvention>,

    /// Also integrate the class (against --psi if given) and report the
    /// resulting number; the total degree must be the dimension.
    #[arg(long)]
    pair: bool,

    /// Comma-separated psi exponents for the pairing; entry i applies to
    /// the marking labelled i+1.
    #[arg(long, value_delimiter = ',')]
    psi: Option<Vec<u32>>,

    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Genus.
    #[arg(long)]
    g: Option<u32>,

    /// Comma-separated ramification vector, one entry per marking.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<i64>>,

    /// Number of markings; optional, but must equal the length of --a.
    #[arg(long)]
    n: Option<u32>,

    /// Twist (default 0).
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i64>,

    /// Codimension of the graded piece to compute.
    #[arg(long)]
    d: Option<u32>,

    /// Evaluate at this fixed root order instead of interpolating the
    /// polynomial in r.
    #[arg(long)]
    r: Option<u64>,

    /// Edge-factor convention: `w-wprime` (default) or `w-squared`.
    #[arg(long, value_parser = parse_convention)]
    convention: Option<EdgeConvention>,

    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Args)]
struct PairArgs {
    /// JSON class file: either a bare class array or an output object of
    /// `dr`, `chiodo-eval`, or `pixton-eval`.
    file: Option<PathBuf>,

    /// Comma-separated psi exponents; entry i applies to the marking
    /// labelled i+1.  Omitted entries are zero.
    #[arg(long, value_delimiter = ',')]
    psi: Option<Vec<u32>>,

    /// Ambient genus (read from the class file when it records one).
    #[arg(long)]
    g: Option<u32>,

    /// Ambient marking count (read from the class file when it records one).
    #[arg(long)]
    n: Option<u32>,
}

#[derive(Args)]
struct ScanArgs {
    /// Largest total genus to scan.
    #[arg(long)]
    gmax: Option<u32>,

    /// Largest vertex count to scan.
    #[arg(long)]
    vmax: Option<usize>,

    /// Largest edge count to scan.
    #[arg(long)]
    emax: Option<usize>,
}

/// Interpolation-policy flags shared by the polynomial-producing commands.
#[derive(Args)]
struct PolicyArgs {
    /// Extra sample moduli held back to verify the interpolated polynomial.
    #[arg(long)]
    verify_points: Option<usize>,

    /// Which disjoint block of admissible sample moduli to use (0 = first).
    #[arg(long)]
    window: Option<usize>,

    /// Lower bound every sample modulus must exceed.
    #[arg(long)]
    threshold_floor: Option<u64>,
}

/// Config-file schema.  Every field is optional: explicit flags beat the
/// file, the file beats built-in defaults.
#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    g: Option<u32>,
    n: Option<u32>,
    a: Option<Vec<i64>>,
    k: Option<i64>,
    d: Option<u32>,
    u: Option<u32>,
    r: Option<u64>,
    convention: Option<EdgeConvention>,
    pair: Option<bool>,
    psi: Option<Vec<u32>>,
    verify_points: Option<usize>,
    window: Option<usize>,
    threshold_floor: Option<u64>,
    cache_dir: Option<PathBuf>,
    output: Option<PathBuf>,
    class_file: Option<PathBuf>,
    gmax: Option<u32>,
    vmax: Option<usize>,
    emax: Option<usize>,
}

fn parse_convention(s: &str) -> std::result::Result<EdgeConvention, String> {
    EdgeConvention::from_str(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive here as non-error kinds; keep
            // their conventional zero exit and reserve 1 for usage errors.
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let file = match load_config(cli.config.as_deref()) {
        Ok(file) => file,
        Err(err) => return report_failure(&err, None),
    };
    let output = cli.output.clone().or_else(|| file.output.clone());
    match run(cli, &file) {
        Ok((doc, code)) => match emit(&doc, output.as_deref()) {
            Ok(()) => ExitCode::from(code),
            Err(err) => report_failure(&err, None),
        },
        Err(err) => report_failure(&err, output.as_deref()),
    }
}

fn run(cli: Cli, file: &FileConfig) -> Result<(Value, u8)> {
    let cache_dir = cli.cache_dir.or_else(|| file.cache_dir.clone());
    match cli.command {
        Command::Dr(args) => cmd_dr(args, file, cache_dir.as_deref()),
        Command::ChiodoEval(args) => cmd_eval(args, file, Formula::Chiodo),
        Command::PixtonEval(args) => cmd_eval(args, file, Formula::Pixton),
        Command::Pair(args) => cmd_pair(args, file, cache_dir.as_deref()),
        Command::ExcessScan(args) => cmd_excess_scan(args, file),
    }
}

/// Emit the failure as machine-readable JSON (stdout or the requested
/// output file) plus a stderr message, and map it to the exit code.
fn report_failure(err: &Error, output: Option<&Path>) -> ExitCode {
    let doc = json!({ "error": { "kind": error_kind(err), "message": err.to_string() } });
    if emit(&doc, output).is_err() && output.is_some() {
        let _ = emit(&doc, None);
    }
    eprintln!("error: {err}");
    ExitCode::from(exit_code(err))
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Stabilization(_) => 2,
        Error::Counterexample(_) => 3,
        _ => 1,
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Validation(_) => "validation",
        Error::Stabilization(_) => "stabilization",
        Error::DegreeMismatch(_) => "degree-mismatch",
        Error::Instability(_) => "instability",
        Error::DimensionOverflow(_) => "dimension-overflow",
        Error::Counterexample(_) => "counterexample",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_dr(args: DrArgs, file: &FileConfig, cache_dir: Option<&Path>) -> Result<(Value, u8)> {
    let input = build_input(
        args.g.or(file.g),
        args.a.clone().or_else(|| file.a.clone()),
        args.n.or(file.n),
        args.k.or(file.k).unwrap_or(0),
        args.convention.or(file.convention).unwrap_or_default(),
        args.u.or(file.u).unwrap_or(0),
    )?;
    let policy = build_policy(&args.policy, file);
    let class = if input.u == 0 {
        dr_cycle_with_policy(&input, &policy)?
    } else {
        hodge_dr_with_policy(&input, &policy)?
    };
    eprintln!(
        "dr: g={} n={} a={:?} k={} u={} convention={} (codim {})",
        input.g,
        input.n,
        input.a,
        input.k,
        input.u,
        input.convention,
        input.g + input.u
    );
    eprint!("{}", class_table(&class));
    let mut doc = json!({
        "command": "dr",
        "g": input.g,
        "n": input.n,
        "a": input.a,
        "k": input.k,
        "u": input.u,
        "convention": input.convention,
        "policy": policy_json(&policy),
        "codim": input.g + input.u,
        "class": class,
    });
    let psi = args.psi.clone().or_else(|| file.psi.clone());
    if args.pair || file.pair.unwrap_or(false) || psi.is_some() {
        let psi = psi.unwrap_or_default();
        let pairing = pair_class(&class, input.g, input.n, &psi, cache_dir)?;
        eprintln!("pairing = {}", format_rational(&pairing));
        doc["psi"] = json!(psi);
        doc["pairing"] = Value::String(format_rational(&pairing));
    }
    Ok((doc, 0))
}

enum Formula {
    Chiodo,
    Pixton,
}

fn cmd_eval(args: EvalArgs, file: &FileConfig, which: Formula) -> Result<(Value, u8)> {
    let input = build_input(
        args.g.or(file.g),
        args.a.clone().or_else(|| file.a.clone()),
        args.n.or(file.n),
        args.k.or(file.k).unwrap_or(0),
        args.convention.or(file.convention).unwrap_or_default(),
        0,
    )?;
    let d = args
        .d
        .or(file.d)
        .ok_or_else(|| Error::Validation("missing codimension: pass --d".into()))?;
    let name = match which {
        Formula::Chiodo => "chiodo-eval",
        Formula::Pixton => "pixton-eval",
    };
    eprintln!(
        "{name}: g={} n={} a={:?} k={} d={d} convention={}",
        input.g, input.n, input.a, input.k, input.convention
    );
    let mut doc = json!({
        "command": name,
        "g": input.g,
        "n": input.n,
        "a": input.a,
        "k": input.k,
        "d": d,
        "convention": input.convention,
    });
    match args.r.or(file.r) {
        Some(r) => {
            let class = match which {
                Formula::Pixton => pixton_p(&input, d, r)?,
                Formula::Chiodo => {
                    // The same rescaled sample the interpolation uses: the
                    // codimension-d piece of the pushed-forward total Chern
                    // class, times r^(2d+1-2g).
                    let rescale = pow_r(r, 2 * d as i64 + 1 - 2 * i64::from(input.g));
                    epsilon_total_chern(&input, r, d)?
                        .graded_piece(d)
                        .scale(&rescale)
                }
            };
            eprintln!("at fixed r = {r}:");
            eprint!("{}", class_table(&class));
            doc["r"] = json!(r);
            doc["class"] = json!(class);
        }
        None => {
            let policy = build_policy(&args.policy, file);
            let poly = match which {
                Formula::Chiodo => chiodo_poly_with_policy(&input, d, &policy)?,
                Formula::Pixton => pixton_poly_with_policy(&input, d, &policy)?,
            };
            let constant = poly.constant_term();
            eprint!("{}", poly_table(&poly));
            eprintln!("constant term:");
            eprint!("{}", class_table(&constant));
            doc["policy"] = policy_json(&policy);
            doc["class_poly"] = json!(poly);
            doc["constant_term"] = json!(constant);
        }
    }
    Ok((doc, 0))
}

fn cmd_pair(args: PairArgs, file: &FileConfig, cache_dir: Option<&Path>) -> Result<(Value, u8)> {
    let path = args
        .file
        .clone()
        .or_else(|| file.class_file.clone())
        .ok_or_else(|| Error::Validation("missing class file argument".into()))?;
    let text = std::fs::read_to_string(&path)?;
    let value: Value = serde_json::from_str(&text)?;
    let mut g = args.g.or(file.g);
    let mut n = args.n.or(file.n);
    let class: TautClass = if value.is_array() {
        serde_json::from_value(value)?
    } else if let Some(obj) = value.as_object() {
        if g.is_none() {
            g = obj.get("g").and_then(Value::as_u64).map(|x| x as u32);
        }
        if n.is_none() {
            n = obj.get("n").and_then(Value::as_u64).map(|x| x as u32);
        }
        let class_value = obj
            .get("class")
            .or_else(|| obj.get("constant_term"))
            .cloned()
            .ok_or_else(|| {
                Error::Validation(format!(
                    "{}: no `class` or `constant_term` field to pair against",
                    path.display()
                ))
            })?;
        serde_json::from_value(class_value)?
    } else {
        return Err(Error::Validation(format!(
            "{}: expected a JSON array or object",
            path.display()
        )));
    };
    let g = g.ok_or_else(|| Error::Validation("ambient genus unknown: pass --g".into()))?;
    let n = n.ok_or_else(|| {
        Error::Validation("ambient marking count unknown: pass --n".into())
    })?;
    let psi = args.psi.clone().or_else(|| file.psi.clone()).unwrap_or_default();
    let pairing = pair_class(&class, g, n, &psi, cache_dir)?;
    eprintln!("pairing = {}", format_rational(&pairing));
    let doc = json!({
        "command": "pair",
        "g": g,
        "n": n,
        "psi": psi,
        "pairing": format_rational(&pairing),
    });
    Ok((doc, 0))
}

fn cmd_excess_scan(args: ScanArgs, file: &FileConfig) -> Result<(Value, u8)> {
    let gmax = args
        .gmax
        .or(file.gmax)
        .ok_or_else(|| Error::Validation("missing genus bound: pass --gmax".into()))?;
    let vmax = args
        .vmax
        .or(file.vmax)
        .ok_or_else(|| Error::Validation("missing vertex bound: pass --vmax".into()))?;
    let emax = args
        .emax
        .or(file.emax)
        .ok_or_else(|| Error::Validation("missing edge bound: pass --emax".into()))?;
    let report = smoothness_scan(gmax, vmax, emax);
    eprintln!(
        "excess-scan: g <= {gmax}, vertices <= {vmax}, edges <= {emax}: \
         {} graphs, {} configs ({} vines), {} violations",
        report.graphs_scanned,
        report.configs_scanned,
        report.vine_configs,
        report.violations.len()
    );
    let verdict = report.verify();
    let mut doc = json!({ "command": "excess-scan", "report": report });
    match verdict {
        Ok(()) => Ok((doc, 0)),
        Err(err) => {
            eprintln!("error: {err}");
            doc["error"] = json!({ "kind": error_kind(&err), "message": err.to_string() });
            Ok((doc, exit_code(&err)))
        }
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

fn build_input(
    g: Option<u32>,
    a: Option<Vec<i64>>,
    n: Option<u32>,
    k: i64,
    convention: EdgeConvention,
    u: u32,
) -> Result<DRInput> {
    let g = g.ok_or_else(|| Error::Validation("missing genus: pass --g".into()))?;
    let a = a.unwrap_or_default();
    if let Some(n) = n {
        if n as usize != a.len() {
            return Err(Error::Validation(format!(
                "marking count mismatch: --n {n} but --a has {} entries",
                a.len()
            )));
        }
    }
    Ok(DRInput::new(g, a, k)?.with_convention(convention).with_u(u))
}

fn build_policy(args: &PolicyArgs, file: &FileConfig) -> RSamplePolicy {
    let dflt = RSamplePolicy::default();
    RSamplePolicy {
        verify_points: args
            .verify_points
            .or(file.verify_points)
            .unwrap_or(dflt.verify_points),
        window: args.window.or(file.window).unwrap_or(dflt.window),
        threshold_floor: args
            .threshold_floor
            .or(file.threshold_floor)
            .unwrap_or(dflt.threshold_floor),
    }
}

fn policy_json(policy: &RSamplePolicy) -> Value {
    json!({
        "verify_points": policy.verify_points,
        "window": policy.window,
        "threshold_floor": policy.threshold_floor,
    })
}

/// Integrate `class * prod_i psi_i^(psi[i-1])` over the ambient space.
fn pair_class(
    class: &TautClass,
    g: u32,
    n: u32,
    psi: &[u32],
    cache_dir: Option<&Path>,
) -> Result<Rational> {
    if psi.len() > n as usize {
        return Err(Error::Validation(format!(
            "psi monomial has {} entries but there are only {n} markings",
            psi.len()
        )));
    }
    let pairs: Vec<(u32, u32)> = psi
        .iter()
        .enumerate()
        .map(|(i, &e)| (i as u32 + 1, e))
        .collect();
    let monomial = LegKappaPoly::psi_monomial(&pairs);
    // A cap high enough that nothing is truncated: degree mismatches must
    // surface as integration errors, not be dropped silently.
    let cap = class.terms().map(|(s, _)| s.codim()).max().unwrap_or(0)
        + psi.iter().sum::<u32>();
    let product = class.mul_leg_polynomial(&monomial, cap)?;
    let mut cache = open_cache(cache_dir)?;
    product.integrate(g, n, &mut cache)
}

fn open_cache(dir: Option<&Path>) -> Result<WittenCache> {
    let dir: Option<PathBuf> = dir
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from));
    match dir {
        Some(d) => {
            std::fs::create_dir_all(&d)?;
            WittenCache::open(&d.join("witten.cache"))
        }
        None => Ok(WittenCache::in_memory()),
    }
}

fn emit(doc: &Value, output: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn class_table(class: &TautClass) -> String {
    if class.is_zero() {
        return "  (zero class)\n".into();
    }
    let mut out = String::new();
    for (stratum, coeff) in class.terms() {
        let _ = writeln!(out, "  {:>14}  {stratum}", format_rational(coeff));
    }
    out
}

fn poly_table(poly: &TautPolyClass) -> String {
    if poly.num_terms() == 0 {
        return "  (zero class)\n".into();
    }
    let mut out = String::new();
    for (stratum, coeffs) in poly.terms() {
        let list = coeffs
            .coeffs()
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(out, "  [{list}]  {stratum}");
    }
    out
}
