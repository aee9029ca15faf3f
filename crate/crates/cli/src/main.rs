//! Command-line driver for the `lmoment` library.
//!
//! Every subcommand computes something twice — a brute-force character sum
//! and a closed-form or transform-side prediction — and reports the gap.
//! Reports are deterministic: the same arguments and seed produce
//! byte-identical files regardless of thread count.

use std::collections::BTreeMap;
use std::env;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lmoment::arith::{is_prime, primes_in};
use lmoment::kernels::HbKernelTable;
use lmoment::moments::{divisor_component_series_with, moment_all_characters, ParityClass};
use lmoment::tolerances::{SERIES_RECOVERY_TOL, TSERIES_MAX_X};
use lmoment::verify::{
    fit_error_exponent, hb_expansion_probe, kernel_probe_with, reciprocity_probe,
    residual_even, residual_zero_shift, HbProbe, MomentReport, ReportRow, VerifyError,
    REPORT_SEED, REPORT_VERSION,
};
use lmoment::Complex64;

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "lmoment",
    version,
    about = "Second moments of primitive Dirichlet L-series at the central point",
    long_about = "Second moments of primitive Dirichlet L-series at the central point.\n\n\
        Each subcommand evaluates a moment two independent ways — a direct sum \
        over the character group and a closed-form or transform-side prediction — \
        and reports the residual between them. Output files are deterministic: \
        the same arguments and seed give byte-identical bytes at any thread count."
)]
struct Cli {
    /// Worker threads for the character sums (0 = library default, which
    /// honors RAYON_NUM_THREADS).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed recorded in report metadata so downstream randomized suites can
    /// replay against the exact artifact.
    #[arg(long, global = true, default_value_t = REPORT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One modulus: the family moment, its closed-form main and secondary
    /// terms, and the residual between them.
    Moment(MomentArgs),
    /// Many moduli: residual rows per modulus, optionally with a fitted
    /// growth exponent of |residual| in q.
    Sweep(SweepArgs),
    /// The divisor-sum component T(k): exact value versus the smooth
    /// expansion k·ln k + A·k + B·√k, with remainder extrapolation and an
    /// optional oscillatory-series cross-check.
    Hb(HbArgs),
    /// Twisted moments: S(p,h) against the closed form built from the
    /// reflected moment S(h,-p).
    Twist(TwistArgs),
    /// Kernel transform diagnostics: closed forms versus direct oscillatory
    /// quadrature, contour independence, and degenerate-shift identities.
    Kernel(KernelArgs),
}

#[derive(Args)]
struct MomentArgs {
    /// Modulus (at least 3 for the primitive families).
    #[arg(long)]
    q: u64,
    /// Character family to average over.
    #[arg(long, value_enum, default_value_t = Parity::Even)]
    parity: Parity,
    /// First shift of the central point, as `re` or `re,im`. Only the even
    /// family has shifted closed forms.
    #[arg(long, value_parser = parse_complex, default_value = "0")]
    alpha: Complex64,
    /// Second shift of the central point, as `re` or `re,im`.
    #[arg(long, value_parser = parse_complex, default_value = "0")]
    beta: Complex64,
    /// Override the divisor cut D in the reported error budget (default ⌊√q⌋).
    #[arg(long)]
    d_cut: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Moduli: `N`, `A..B` (inclusive), `a,b,c`, `primes:A..B`, or
    /// `semiprimes-balanced:A..B` (products of two primes with factor ratio
    /// at most 2).
    #[arg(long)]
    q: String,
    /// Character family to average over.
    #[arg(long, value_enum, default_value_t = Parity::Even)]
    parity: Parity,
    /// First shift of the central point (`re` or `re,im`); even family only.
    #[arg(long, value_parser = parse_complex, default_value = "0")]
    alpha: Complex64,
    /// Second shift of the central point (`re` or `re,im`).
    #[arg(long, value_parser = parse_complex, default_value = "0")]
    beta: Complex64,
    /// Override the divisor cut D in the reported error budgets.
    #[arg(long)]
    d_cut: Option<u64>,
    /// Fit ln|residual| against ln q over the swept rows.
    #[arg(long)]
    fit: bool,
    /// Smallest modulus admitted into the fit.
    #[arg(long, default_value_t = 100)]
    fit_q_min: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct HbArgs {
    /// Moduli k: `N`, `A..B` (inclusive), `a,b,c`, or `primes:A..B`.
    /// At least 3 values, used in ascending order.
    #[arg(long)]
    k: String,
    /// Also evaluate each component by its oscillatory divisor series and
    /// compare against the exact recovery from character moments.
    #[arg(long)]
    series_check: bool,
    /// Kernel-argument cap for the series route; the run fails if the tail
    /// is not certified before the cap.
    #[arg(long, default_value_t = TSERIES_MAX_X)]
    series_cutoff: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TwistArgs {
    /// Twist residues h: a single prime or a comma list of primes.
    #[arg(long)]
    h: String,
    /// Moduli p: `N`, `A..B`, `a,b,c`, or `primes:A..B`; every value must be
    /// prime. Pairs are formed for each h < p.
    #[arg(long)]
    p: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct KernelArgs {
    /// Skip the slow quadrature cells and run only the structural checks.
    #[arg(long)]
    quick: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the rows to this file. Relative paths land in LMOMENT_OUT_DIR
    /// when that variable is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// File format; inferred from the extension when omitted (`.csv` means
    /// CSV, anything else JSON).
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Parity {
    /// Even primitive characters.
    Even,
    /// Odd primitive characters.
    Odd,
    /// All primitive characters.
    AllPrimitive,
    /// Every character mod q (no closed-form split; print-only).
    All,
}

impl Parity {
    fn label(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::AllPrimitive => "all-primitive",
            Parity::All => "all-characters",
        }
    }
}

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

enum CliError {
    /// Arguments that cannot describe a computation (exit 2).
    Invalid(String),
    /// A computation that was asked for but did not succeed numerically,
    /// or an I/O failure writing its artifact (exit 1).
    Failed(String),
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::InsufficientData { .. } => CliError::Invalid(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let started = Instant::now();
    let outcome = match cli.command {
        Command::Moment(args) => run_moment(args, cli.seed),
        Command::Sweep(args) => run_sweep(args, cli.seed),
        Command::Hb(args) => run_hb(args, cli.seed),
        Command::Twist(args) => run_twist(args, cli.seed),
        Command::Kernel(args) => run_kernel(args, cli.seed),
    };
    eprintln!("elapsed: {} ms", started.elapsed().as_millis());
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

// ---------------------------------------------------------------------------
// Shared parsing and validation
// ---------------------------------------------------------------------------

/// Parse `re` or `re,im` into a complex shift.
fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = match s.split_once(',') {
        Some((re, im)) => (re, im),
        None => (s, "0"),
    };
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{t}` is not a number; shifts are `re` or `re,im`"))
    };
    Ok(Complex64::new(parse(re)?, parse(im)?))
}

/// Expand a modulus spec: `N`, `A..B` (inclusive), `a,b,c`, `primes:A..B`,
/// or `semiprimes-balanced:A..B`. The result is ascending and deduplicated.
fn parse_modulus_spec(spec: &str) -> Result<Vec<u64>, CliError> {
    let mut out = if let Some(body) = spec.strip_prefix("primes:") {
        let (lo, hi) = parse_range(body)?;
        primes_in(lo, hi)
    } else if let Some(body) = spec.strip_prefix("semiprimes-balanced:") {
        let (lo, hi) = parse_range(body)?;
        balanced_semiprimes(lo, hi)
    } else if spec.contains("..") {
        let (lo, hi) = parse_range(spec)?;
        (lo..=hi).collect()
    } else if spec.contains(',') {
        spec.split(',')
            .map(parse_u64)
            .collect::<Result<Vec<u64>, CliError>>()?
    } else {
        vec![parse_u64(spec)?]
    };
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(invalid(format!("the modulus spec `{spec}` expands to nothing")));
    }
    Ok(out)
}

fn parse_u64(s: &str) -> Result<u64, CliError> {
    s.trim()
        .parse::<u64>()
        .map_err(|_| invalid(format!("`{s}` is not a nonnegative integer")))
}

fn parse_range(body: &str) -> Result<(u64, u64), CliError> {
    let (lo, hi) = body
        .split_once("..")
        .ok_or_else(|| invalid(format!("`{body}` is not a range; expected `A..B`")))?;
    let (lo, hi) = (parse_u64(lo)?, parse_u64(hi)?);
    if lo > hi {
        return Err(invalid(format!("empty range `{body}`: {lo} > {hi}")));
    }
    Ok((lo, hi))
}

/// Products of two distinct primes `p·r` with `p < r ≤ 2p`, inside `[lo, hi]`.
fn balanced_semiprimes(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let p_max = (hi as f64).sqrt() as u64 + 1;
    for p in primes_in(2, p_max) {
        for r in primes_in(p + 1, (2 * p).min(hi / p.max(1))) {
            let q = p * r;
            if q >= lo && q <= hi {
                out.push(q);
            }
        }
    }
    out.sort_unstable();
    out
}

/// The shift domain guaranteed by the closed forms.
fn check_shift(name: &str, z: Complex64) -> Result<(), CliError> {
    if z.re.abs() > 0.4 || z.im.abs() > 2.0 {
        return Err(invalid(format!(
            "{name} = {z} is outside the supported shift box |re| <= 0.4, |im| <= 2.0"
        )));
    }
    Ok(())
}

fn check_primitive_modulus(q: u64) -> Result<(), CliError> {
    if q < 3 {
        return Err(invalid(format!(
            "q = {q} carries no primitive characters; the primitive families need q >= 3"
        )));
    }
    Ok(())
}

fn check_d_cut(q: u64, d_cut: Option<u64>) -> Result<(), CliError> {
    if let Some(d) = d_cut {
        if d < 1 || d > q {
            return Err(invalid(format!(
                "--d-cut {d} must lie in 1..={q} for modulus {q}"
            )));
        }
    }
    Ok(())
}

/// Compute one residual row with the validated arguments.
fn residual_row(
    q: u64,
    parity: Parity,
    alpha: Complex64,
    beta: Complex64,
    d_cut: Option<u64>,
) -> Result<ReportRow, CliError> {
    check_primitive_modulus(q)?;
    check_d_cut(q, d_cut)?;
    let zero_shift = alpha.norm() == 0.0 && beta.norm() == 0.0;
    let row = match parity {
        Parity::Even if zero_shift => residual_zero_shift(q, ParityClass::Even),
        Parity::Even => residual_even(q, alpha, beta),
        Parity::Odd if zero_shift => residual_zero_shift(q, ParityClass::Odd),
        Parity::AllPrimitive if zero_shift => {
            residual_zero_shift(q, ParityClass::AllPrimitive)
        }
        Parity::Odd | Parity::AllPrimitive => {
            return Err(invalid(
                "shifted closed forms exist only for the even family; \
                 drop --alpha/--beta or use --parity even",
            ));
        }
        Parity::All => unreachable!("the all-characters family never builds rows"),
    };
    Ok(match d_cut {
        Some(d) => row.with_cut(d),
        None => row,
    })
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

/// Resolve the output location: relative paths land in `LMOMENT_OUT_DIR`
/// when set, and parent directories are created.
fn resolve_out(path: &Path) -> Result<PathBuf, CliError> {
    let resolved = if path.is_absolute() {
        path.to_path_buf()
    } else {
        match env::var_os("LMOMENT_OUT_DIR") {
            Some(dir) => Path::new(&dir).join(path),
            None => path.to_path_buf(),
        }
    };
    if let Some(parent) = resolved.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Failed(format!("creating {parent:?}: {e}")))?;
        }
    }
    Ok(resolved)
}

fn resolve_format(output: &OutputArgs, path: &Path) -> Format {
    output.format.unwrap_or_else(|| {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            _ => Format::Json,
        }
    })
}

fn quote_csv(field: &str) -> String {
    format!("\"{}\"", field.replace('"', "\"\""))
}

/// Write a `{meta, rows}` artifact for non-moment row types; the moment
/// reports go through [`MomentReport`]'s own writers.
fn write_artifact<T: Serialize>(
    output: &OutputArgs,
    seed: u64,
    settings: &BTreeMap<String, String>,
    rows: &[T],
    csv_header: &str,
    csv_line: impl Fn(&T) -> String,
) -> Result<(), CliError> {
    let Some(requested) = output.out.as_deref() else {
        return Ok(());
    };
    let path = resolve_out(requested)?;
    let format = resolve_format(output, &path);
    let io_err = |e: std::io::Error| CliError::Failed(format!("writing {path:?}: {e}"));
    let mut w = BufWriter::new(File::create(&path).map_err(io_err)?);
    match format {
        Format::Csv => {
            let mut body = String::from(csv_header);
            body.push('\n');
            for row in rows {
                body.push_str(&csv_line(row));
                body.push('\n');
            }
            w.write_all(body.as_bytes()).map_err(io_err)?;
        }
        Format::Json => {
            let doc = serde_json::json!({
                "meta": {
                    "version": REPORT_VERSION,
                    "seed": seed,
                    "settings": settings,
                },
                "rows": rows,
            });
            serde_json::to_writer_pretty(&mut w, &doc)
                .map_err(|e| CliError::Failed(format!("writing {path:?}: {e}")))?;
            w.write_all(b"\n").map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)?;
    println!("wrote {} rows to {}", rows.len(), path.display());
    Ok(())
}

fn write_moment_report(
    output: &OutputArgs,
    report: &MomentReport,
) -> Result<(), CliError> {
    let Some(requested) = output.out.as_deref() else {
        return Ok(());
    };
    let path = resolve_out(requested)?;
    match resolve_format(output, &path) {
        Format::Csv => report.write_csv(&path)?,
        Format::Json => report.write_json(&path)?,
    }
    println!("wrote {} rows to {}", report.rows.len(), path.display());
    Ok(())
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.6e} {:+.6e}i", z.re, z.im)
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn run_moment(args: MomentArgs, seed: u64) -> Result<(), CliError> {
    check_shift("--alpha", args.alpha)?;
    check_shift("--beta", args.beta)?;

    if args.parity == Parity::All {
        if args.alpha.norm() != 0.0 || args.beta.norm() != 0.0 {
            return Err(invalid(
                "the all-characters moment is defined at the central point only",
            ));
        }
        if args.output.out.is_some() {
            return Err(invalid(
                "the all-characters family has no residual rows to write; drop --out",
            ));
        }
        if args.q < 1 {
            return Err(invalid("q must be at least 1"));
        }
        let m = moment_all_characters(args.q);
        println!(
            "q={} family=all-characters characters={} moment={:.15e}",
            m.q, m.character_count, m.value.re
        );
        return Ok(());
    }

    let row = residual_row(args.q, args.parity, args.alpha, args.beta, args.d_cut)?;
    print_row(&row);

    let report = MomentReport::new(vec![row], moment_settings(&args)).with_seed(seed);
    write_moment_report(&args.output, &report)
}

fn moment_settings(args: &MomentArgs) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("command".into(), "moment".into()),
        ("q".into(), args.q.to_string()),
        ("parity".into(), args.parity.label().into()),
        ("alpha".into(), args.alpha.to_string()),
        ("beta".into(), args.beta.to_string()),
        (
            "d_cut".into(),
            args.d_cut.map_or_else(|| "default".into(), |d| d.to_string()),
        ),
    ])
}

fn print_row(row: &ReportRow) {
    println!(
        "q={} family={} alpha={} beta={}",
        row.q,
        row.parity,
        Complex64::new(row.alpha_re, row.alpha_im),
        Complex64::new(row.beta_re, row.beta_im)
    );
    println!("  moment     = {}", fmt_c(Complex64::new(row.lhs_re, row.lhs_im)));
    println!("  main       = {}", fmt_c(Complex64::new(row.main_re, row.main_im)));
    println!(
        "  secondary  = {}",
        fmt_c(Complex64::new(row.secondary_re, row.secondary_im))
    );
    println!(
        "  residual   = {}  |residual| = {:.6e}",
        fmt_c(Complex64::new(row.residual_re, row.residual_im)),
        row.residual_abs()
    );
    println!(
        "  |residual|/q^(1/4) = {:.6e}   /(q^(1/4) d(q)) = {:.6e}",
        row.residual_norm, row.residual_norm_divisors
    );
    println!(
        "  error budget = {:.6e}  (divisor cut D = {}, d(q) = {}, balanced divisors = {})",
        row.error_budget, row.d_cut, row.divisor_count, row.balanced_divisors
    );
}

fn run_sweep(args: SweepArgs, seed: u64) -> Result<(), CliError> {
    check_shift("--alpha", args.alpha)?;
    check_shift("--beta", args.beta)?;
    if args.parity == Parity::All {
        return Err(invalid(
            "sweeps compare against closed forms; use --parity even, odd, or all-primitive",
        ));
    }
    let qs = parse_modulus_spec(&args.q)?;
    for &q in &qs {
        check_primitive_modulus(q)?;
        check_d_cut(q, args.d_cut)?;
    }

    let mut rows = Vec::with_capacity(qs.len());
    for &q in &qs {
        let row = residual_row(q, args.parity, args.alpha, args.beta, args.d_cut)?;
        println!(
            "q={:<6} |residual|={:.6e}  /q^(1/4)={:.6e}  /(q^(1/4)d(q))={:.6e}  budget={:.6e}",
            q,
            row.residual_abs(),
            row.residual_norm,
            row.residual_norm_divisors,
            row.error_budget
        );
        rows.push(row);
    }

    let mut settings = BTreeMap::from([
        ("command".into(), "sweep".into()),
        ("q".into(), args.q.clone()),
        ("parity".into(), args.parity.label().into()),
        ("alpha".into(), args.alpha.to_string()),
        ("beta".into(), args.beta.to_string()),
        (
            "d_cut".into(),
            args.d_cut.map_or_else(|| "default".into(), |d| d.to_string()),
        ),
    ]);
    if args.fit {
        let fit = fit_error_exponent(&rows, args.fit_q_min)?;
        println!(
            "fitted |residual| ~ q^{:.4} (intercept {:.4}, r^2 {:.6}, {} points, q >= {})",
            fit.slope, fit.intercept, fit.r_squared, fit.n_points, args.fit_q_min
        );
        settings.insert("fit_slope".into(), format!("{:.16e}", fit.slope));
        settings.insert("fit_intercept".into(), format!("{:.16e}", fit.intercept));
        settings.insert("fit_r_squared".into(), format!("{:.16e}", fit.r_squared));
        settings.insert("fit_n_points".into(), fit.n_points.to_string());
        settings.insert("fit_q_min".into(), args.fit_q_min.to_string());
    }

    let report = MomentReport::new(rows, settings).with_seed(seed);
    write_moment_report(&args.output, &report)
}

/// Row shape for `hb --series-check` artifacts: the probe columns plus the
/// oscillatory-series route and its deviation from the exact component.
#[derive(Serialize)]
struct HbSeriesRow {
    k: u64,
    component: f64,
    expansion: f64,
    deviation: f64,
    series: f64,
    series_deviation: f64,
}

fn run_hb(args: HbArgs, seed: u64) -> Result<(), CliError> {
    let ks = parse_modulus_spec(&args.k)?;
    if ks.len() < 3 {
        return Err(invalid(format!(
            "remainder extrapolation needs at least 3 moduli, got {}",
            ks.len()
        )));
    }
    if args.series_cutoff <= 0.0 {
        return Err(invalid("--series-cutoff must be positive"));
    }

    let probe = hb_expansion_probe(&ks);
    for row in &probe.rows {
        println!(
            "k={:<5} component={:.10e}  expansion={:.10e}  deviation={:+.6e}",
            row.k, row.component, row.expansion, row.deviation
        );
    }
    println!(
        "remainder model: decays like k^-{}; limit estimate {:.6e} (spread {:.6e} over {} extrapolations)",
        probe.detected_power,
        probe.c0_estimate,
        probe.c0_spread,
        probe.c0_half.len()
    );

    let mut settings = BTreeMap::from([
        ("command".into(), "hb".into()),
        ("k".into(), args.k.clone()),
        ("series_check".into(), args.series_check.to_string()),
        ("detected_power".into(), format!("{:.1}", probe.detected_power)),
        ("c0_estimate".into(), format!("{:.16e}", probe.c0_estimate)),
        ("c0_spread".into(), format!("{:.16e}", probe.c0_spread)),
    ]);

    if !args.series_check {
        return write_artifact(
            &args.output,
            seed,
            &settings,
            &probe.rows,
            "k,component,expansion,deviation",
            |r| {
                format!(
                    "{},{:.16e},{:.16e},{:.16e}",
                    r.k, r.component, r.expansion, r.deviation
                )
            },
        );
    }

    settings.insert("series_cutoff".into(), format!("{:.16e}", args.series_cutoff));
    let rows = series_check_rows(&probe, args.series_cutoff)?;
    let worst = rows
        .iter()
        .map(|r| r.series_deviation.abs())
        .fold(0.0f64, f64::max);
    println!(
        "series cross-check: worst |series - component| = {:.6e} (tolerance {:.0e})",
        worst, SERIES_RECOVERY_TOL
    );
    write_artifact(
        &args.output,
        seed,
        &settings,
        &rows,
        "k,component,expansion,deviation,series,series_deviation",
        |r| {
            format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.k, r.component, r.expansion, r.deviation, r.series, r.series_deviation
            )
        },
    )?;
    if worst > SERIES_RECOVERY_TOL {
        return Err(CliError::Failed(format!(
            "series route deviates from the exact component by {worst:.3e} \
             (tolerance {SERIES_RECOVERY_TOL:.0e})"
        )));
    }
    Ok(())
}

fn series_check_rows(probe: &HbProbe, cutoff: f64) -> Result<Vec<HbSeriesRow>, CliError> {
    let table = HbKernelTable::new();
    probe
        .rows
        .iter()
        .map(|r| {
            let series = divisor_component_series_with(r.k, cutoff, &table)
                .map_err(|e| CliError::Failed(format!("series at k = {}: {e}", r.k)))?;
            Ok(HbSeriesRow {
                k: r.k,
                component: r.component,
                expansion: r.expansion,
                deviation: r.deviation,
                series,
                series_deviation: series - r.component,
            })
        })
        .collect()
}

fn run_twist(args: TwistArgs, seed: u64) -> Result<(), CliError> {
    let hs = parse_modulus_spec(&args.h)?;
    let ps = parse_modulus_spec(&args.p)?;
    for &h in &hs {
        if !is_prime(h) {
            return Err(invalid(format!("twist residue h = {h} is not prime")));
        }
    }
    for &p in &ps {
        if !is_prime(p) {
            return Err(invalid(format!("modulus p = {p} is not prime")));
        }
    }
    let pairs: Vec<(u64, u64)> = hs
        .iter()
        .flat_map(|&h| ps.iter().filter(move |&&p| h < p).map(move |&p| (h, p)))
        .collect();
    if pairs.is_empty() {
        return Err(invalid(
            "no (h, p) pairs with h < p; the twist must be smaller than the modulus",
        ));
    }

    let rows = reciprocity_probe(&pairs);
    for r in &rows {
        println!(
            "h={:<3} p={:<6} S(p,h)={:+.8e}  rhs={:+.8e}  residual={:+.6e}  ratio={:.4}{}",
            r.h,
            r.p,
            r.s_ph,
            r.rhs,
            r.residual,
            r.ratio,
            if r.beyond_two_thirds { "  [h >= p^(2/3)]" } else { "" }
        );
    }

    let settings = BTreeMap::from([
        ("command".into(), "twist".into()),
        ("h".into(), args.h.clone()),
        ("p".into(), args.p.clone()),
    ]);
    write_artifact(
        &args.output,
        seed,
        &settings,
        &rows,
        "h,p,s_ph,s_h_neg_p,rhs,residual,bound_scale,ratio,beyond_two_thirds",
        |r| {
            format!(
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                r.h,
                r.p,
                r.s_ph,
                r.s_h_neg_p,
                r.rhs,
                r.residual,
                r.bound_scale,
                r.ratio,
                r.beyond_two_thirds
            )
        },
    )
}

fn run_kernel(args: KernelArgs, seed: u64) -> Result<(), CliError> {
    let cells = kernel_probe_with(!args.quick);
    let mut failures = 0usize;
    for cell in &cells {
        let verdict = if cell.pass { "PASS" } else { "FAIL" };
        let note = if cell.note.is_empty() {
            String::new()
        } else {
            format!("  ({})", cell.note)
        };
        println!(
            "{verdict} {}: delta={:.3e} tolerance={:.0e}{note}",
            cell.label, cell.delta, cell.tolerance
        );
        failures += usize::from(!cell.pass);
    }

    let settings = BTreeMap::from([
        ("command".into(), "kernel".into()),
        ("quick".into(), args.quick.to_string()),
    ]);
    write_artifact(
        &args.output,
        seed,
        &settings,
        &cells,
        "label,delta,tolerance,pass,note",
        |c| {
            format!(
                "{},{:.16e},{:.16e},{},{}",
                quote_csv(&c.label),
                c.delta,
                c.tolerance,
                c.pass,
                quote_csv(&c.note)
            )
        },
    )?;
    if failures > 0 {
        return Err(CliError::Failed(format!(
            "{failures} kernel cell(s) out of tolerance"
        )));
    }
    Ok(())
}
