//! Command-line front end: argument parsing, the subcommands, and their JSON
//! and CSV renderings.

use std::fmt;
use std::str::FromStr;

use besselprod::integrals::{integral_n_bessel, integral_n_bessel_quadrature, integral_two_j0};
use besselprod::products::{derivative_product, direct_product, eval_product, product_expansion};
use besselprod::verify::run_suite;
use besselprod::{
    Error, EvalReport, ExactRational, OrderSpec, QuadratureResult, Scale, ScaleSpec, SeriesCoeffs, Suite,
    TruncatedSeries, VerifyReport,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::value::RawValue;

pub const MAX_TRUNC: u32 = 64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIVERGENT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "besselprod", version, about = "Series expansions of products of Bessel functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Coefficients of Π J_ν(a x) in powers of (x/2)²
    Expand(ExpandArgs),
    /// Evaluate the truncated expansion at a point, next to the direct product
    Eval(EvalArgs),
    /// n-th derivative of a product of zeroth-order Bessel functions
    Derive(DeriveArgs),
    /// ∫ over the real line of Π J_0(a x): closed form against quadrature
    Integrate(IntegrateArgs),
    /// Run the verification suites
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct FactorArgs {
    /// Comma-separated Bessel orders, e.g. 0,1/2,2 (defaults to all zero)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub orders: Option<Vec<String>>,
    /// Comma-separated scales as integers, fractions or decimals, e.g. 1,1/2,0.25
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub scales: Vec<String>,
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub factors: FactorArgs,
    /// Truncation order R (at most 64)
    #[arg(long, default_value_t = 10)]
    pub trunc: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub factors: FactorArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, default_value_t = 40)]
    pub trunc: u32,
    #[arg(long, default_value_t = 1e-15)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct DeriveArgs {
    /// Comma-separated scales of the zeroth-order factors
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub scales: Vec<String>,
    /// Derivative order
    #[arg(long)]
    pub n: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, default_value_t = 40)]
    pub trunc: u32,
    #[arg(long, default_value_t = 1e-15)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct IntegrateArgs {
    /// Two or three comma-separated scales
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub scales: Vec<String>,
    /// Largest accepted |closed form − quadrature|
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// A failed command, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) => EXIT_USAGE,
            Error::Divergence { .. } => EXIT_DIVERGENT,
            Error::NonConvergence { .. } => EXIT_VERIFY,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError { code: EXIT_VERIFY, message: format!("csv output failed: {e}") }
    }
}

/// Output of a successful command. A nonzero `code` still prints `stdout`.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: Option<String>,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, stderr: None, code: EXIT_OK }
    }
}

pub type CliResult = std::result::Result<Outcome, CliError>;

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Expand(a) => cmd_expand(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Derive(a) => cmd_derive(&a),
        Command::Integrate(a) => cmd_integrate(&a),
        Command::Verify(a) => cmd_verify(&a),
    }
}

/// Parses an integer, a fraction `p/q`, or a decimal with optional exponent
/// into the exact rational it denotes (`0.1` is `1/10`).
pub fn parse_rational(text: &str) -> std::result::Result<ExactRational, String> {
    let s = text.trim();
    let bad = || format!("cannot read {text:?} as a number");
    if s.contains('/') {
        let q = ExactRational::from_str(s).map_err(|_| bad())?;
        return Ok(q);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
        || exponent.unsigned_abs() > 10_000
    {
        return Err(bad());
    }
    let mut numer: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        ExactRational::from_integer(numer * num_traits::pow(ten, shift as usize))
    } else {
        ExactRational::new(numer, num_traits::pow(ten, (-shift) as usize))
    })
}

fn parse_list(items: &[String], what: &str) -> std::result::Result<Vec<ExactRational>, CliError> {
    if items.is_empty() {
        return Err(CliError::usage(format!("--{what} needs at least one entry")));
    }
    items
        .iter()
        .map(|s| parse_rational(s).map_err(|e| CliError::usage(format!("--{what}: {e}"))))
        .collect()
}

fn parse_scales(items: &[String]) -> std::result::Result<ScaleSpec, CliError> {
    let values = parse_list(items, "scales")?;
    values
        .into_iter()
        .map(|q| Scale::exact(q).map_err(|e| CliError::usage(format!("--scales: {e}"))))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(ScaleSpec)
}

fn parse_factors(f: &FactorArgs) -> std::result::Result<(OrderSpec, ScaleSpec), CliError> {
    let scales = parse_scales(&f.scales)?;
    let orders = match &f.orders {
        None => OrderSpec::zeros(scales.len()),
        Some(items) => OrderSpec(parse_list(items, "orders")?.iter().map(besselprod::types::rational_to_f64).collect()),
    };
    if orders.len() != scales.len() {
        return Err(CliError::usage(format!(
            "--orders has {} entries but --scales has {}",
            orders.len(),
            scales.len()
        )));
    }
    Ok((orders, scales))
}

fn check_trunc(trunc: u32) -> std::result::Result<(), CliError> {
    if trunc > MAX_TRUNC {
        return Err(CliError::usage(format!("--trunc must be at most {MAX_TRUNC}, got {trunc}")));
    }
    Ok(())
}

fn check_tol(tol: f64) -> std::result::Result<(), CliError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::usage(format!("--tol must be positive, got {tol}")));
    }
    Ok(())
}

/// A float rendered with 17 significant digits; non-finite values become null.
pub fn fixed(v: f64) -> Box<RawValue> {
    let text = if v.is_finite() { format!("{v:.16e}") } else { "null".to_string() };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

fn fixed_all(values: impl IntoIterator<Item = f64>) -> Vec<Box<RawValue>> {
    values.into_iter().map(fixed).collect()
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct ReportJson {
    value: Box<RawValue>,
    terms_used: usize,
    last_term: Box<RawValue>,
    converged: bool,
}

impl From<&EvalReport> for ReportJson {
    fn from(r: &EvalReport) -> Self {
        ReportJson {
            value: fixed(r.value),
            terms_used: r.terms_used,
            last_term: fixed(r.last_term),
            converged: r.converged,
        }
    }
}

#[derive(Serialize)]
struct QuadratureJson {
    value: Box<RawValue>,
    abs_error_estimate: Box<RawValue>,
    intervals_used: usize,
}

impl From<&QuadratureResult> for QuadratureJson {
    fn from(q: &QuadratureResult) -> Self {
        QuadratureJson {
            value: fixed(q.value),
            abs_error_estimate: fixed(q.abs_error_estimate),
            intervals_used: q.intervals_used,
        }
    }
}

fn coefficient_strings(coeffs: &SeriesCoeffs) -> Vec<String> {
    match coeffs {
        SeriesCoeffs::Exact(v) => v.iter().map(ToString::to_string).collect(),
        SeriesCoeffs::Real(v) => v.iter().map(|c| format!("{c:.16e}")).collect(),
    }
}

#[derive(Serialize)]
struct ExpandJson {
    orders: Vec<Box<RawValue>>,
    scales: Vec<String>,
    trunc: u32,
    prefactor_exponent: Box<RawValue>,
    scalar: Box<RawValue>,
    exact: bool,
    coeffs: Vec<String>,
}

pub fn cmd_expand(a: &ExpandArgs) -> CliResult {
    check_trunc(a.trunc)?;
    let (orders, scales) = parse_factors(&a.factors)?;
    let series = product_expansion(&orders, &scales, a.trunc)?;
    match a.format {
        Format::Json => Ok(Outcome::ok(to_json(&ExpandJson {
            orders: fixed_all(orders.iter()),
            scales: parse_list(&a.factors.scales, "scales")?.iter().map(ToString::to_string).collect(),
            trunc: a.trunc,
            prefactor_exponent: fixed(series.prefactor_exponent),
            scalar: fixed(series.scalar),
            exact: series.coeffs.is_exact(),
            coeffs: coefficient_strings(&series.coeffs),
        }))),
        Format::Csv => series_csv(&series),
    }
}

fn series_csv(series: &TruncatedSeries) -> CliResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["r", "coefficient", "exact"])?;
    let exact = series.coeffs.is_exact().to_string();
    for (r, c) in coefficient_strings(&series.coeffs).iter().enumerate() {
        w.write_record([r.to_string().as_str(), c.as_str(), exact.as_str()])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError { code: EXIT_VERIFY, message: e.to_string() })?;
    Ok(Outcome::ok(String::from_utf8(bytes).expect("csv output is UTF-8")))
}

fn key_value_csv(rows: &[(&str, String)]) -> CliResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "value"])?;
    for (k, v) in rows {
        w.write_record([*k, v.as_str()])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError { code: EXIT_VERIFY, message: e.to_string() })?;
    Ok(Outcome::ok(String::from_utf8(bytes).expect("csv output is UTF-8")))
}

fn sci(v: f64) -> String {
    fixed(v).get().to_string()
}

#[derive(Serialize)]
struct EvalJson {
    x: Box<RawValue>,
    trunc: u32,
    series: ReportJson,
    direct: ReportJson,
    difference: Box<RawValue>,
}

pub fn cmd_eval(a: &EvalArgs) -> CliResult {
    check_trunc(a.trunc)?;
    check_tol(a.tol)?;
    let (orders, scales) = parse_factors(&a.factors)?;
    let series = product_expansion(&orders, &scales, a.trunc)?;
    let s = eval_product(&series, a.x, a.tol)?;
    let d = direct_product(&orders, &scales, a.x, a.tol)?;
    let difference = (s.value - d.value).abs();
    match a.format {
        Format::Json => Ok(Outcome::ok(to_json(&EvalJson {
            x: fixed(a.x),
            trunc: a.trunc,
            series: (&s).into(),
            direct: (&d).into(),
            difference: fixed(difference),
        }))),
        Format::Csv => key_value_csv(&[
            ("x", sci(a.x)),
            ("series", sci(s.value)),
            ("series_converged", s.converged.to_string()),
            ("direct", sci(d.value)),
            ("difference", sci(difference)),
        ]),
    }
}

#[derive(Serialize)]
struct DeriveJson {
    n: u32,
    x: Box<RawValue>,
    trunc: u32,
    value: Box<RawValue>,
}

pub fn cmd_derive(a: &DeriveArgs) -> CliResult {
    check_trunc(a.trunc)?;
    check_tol(a.tol)?;
    let scales = parse_scales(&a.scales)?;
    let value = derivative_product(a.n, &scales, a.x, a.trunc, a.tol)?;
    match a.format {
        Format::Json => Ok(Outcome::ok(to_json(&DeriveJson {
            n: a.n,
            x: fixed(a.x),
            trunc: a.trunc,
            value: fixed(value),
        }))),
        Format::Csv => key_value_csv(&[("n", a.n.to_string()), ("x", sci(a.x)), ("value", sci(value))]),
    }
}

#[derive(Serialize)]
struct IntegrateJson {
    scales: Vec<String>,
    method: &'static str,
    closed_form: ReportJson,
    quadrature: QuadratureJson,
    residual: Box<RawValue>,
    tolerance: Box<RawValue>,
    within_tolerance: bool,
}

pub fn cmd_integrate(a: &IntegrateArgs) -> CliResult {
    check_tol(a.tol)?;
    let exact = parse_list(&a.scales, "scales")?;
    if !(2..=3).contains(&exact.len()) {
        return Err(CliError::usage(format!("--scales needs 2 or 3 entries, got {}", exact.len())));
    }
    if exact.iter().any(Zero::is_zero) {
        return Err(CliError::usage("--scales entries must be nonzero"));
    }
    let values: Vec<f64> = exact.iter().map(besselprod::types::rational_to_f64).collect();
    let (method, closed) = if values.len() == 2 {
        // the larger scale plays the role of a
        let (a_, b_) = if exact[0].abs() >= exact[1].abs() { (values[0], values[1]) } else { (values[1], values[0]) };
        let value = integral_two_j0(a_, b_)?;
        let report = EvalReport { value, terms_used: 0, last_term: 0.0, converged: true };
        ("agm", report)
    } else {
        ("series", integral_n_bessel(&values, 1e-16)?)
    };
    let quad = integral_n_bessel_quadrature(&values, (a.tol * 1e-3).max(1e-12))?;
    let residual = (closed.value - quad.value).abs();
    let within = residual <= a.tol;
    let stdout = match a.format {
        Format::Json => to_json(&IntegrateJson {
            scales: exact.iter().map(ToString::to_string).collect(),
            method,
            closed_form: (&closed).into(),
            quadrature: (&quad).into(),
            residual: fixed(residual),
            tolerance: fixed(a.tol),
            within_tolerance: within,
        }),
        Format::Csv => {
            key_value_csv(&[
                ("closed_form", sci(closed.value)),
                ("quadrature", sci(quad.value)),
                ("residual", sci(residual)),
                ("tolerance", sci(a.tol)),
            ])?
            .stdout
        }
    };
    Ok(Outcome {
        stdout,
        stderr: (!within).then(|| format!("residual {residual:e} exceeds tolerance {:e}", a.tol)),
        code: if within { EXIT_OK } else { EXIT_VERIFY },
    })
}

#[derive(Serialize)]
struct CaseJson {
    id: String,
    expected: Box<RawValue>,
    got: Box<RawValue>,
    residual: Box<RawValue>,
    tolerance: Box<RawValue>,
    passed: bool,
}

#[derive(Serialize)]
struct VerifyJson {
    suite: String,
    cases: usize,
    failures: usize,
    worst_residual: Box<RawValue>,
    tolerance: Box<RawValue>,
    details: Vec<CaseJson>,
}

pub fn verify_json(report: &VerifyReport) -> String {
    to_json(&VerifyJson {
        suite: report.suite.clone(),
        cases: report.cases,
        failures: report.failures,
        worst_residual: fixed(report.worst_residual),
        tolerance: fixed(report.tolerance),
        details: report
            .details
            .iter()
            .map(|d| CaseJson {
                id: d.id.clone(),
                expected: fixed(d.expected),
                got: fixed(d.got),
                residual: fixed(d.residual),
                tolerance: fixed(d.tolerance),
                passed: d.passed,
            })
            .collect(),
    })
}

pub fn cmd_verify(a: &VerifyArgs) -> CliResult {
    let suite: Suite = a.suite.parse().map_err(|e: Error| CliError::usage(e.to_string()))?;
    let report = run_suite(suite);
    let stdout = match a.format {
        Format::Json => verify_json(&report),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["case", "expected", "got", "residual", "tolerance", "passed"])?;
            for d in &report.details {
                w.write_record([
                    d.id.clone(),
                    sci(d.expected),
                    sci(d.got),
                    sci(d.residual),
                    sci(d.tolerance),
                    d.passed.to_string(),
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| CliError { code: EXIT_VERIFY, message: e.to_string() })?;
            String::from_utf8(bytes).expect("csv output is UTF-8")
        }
    };
    let summary = format!(
        "verify {}: {} cases, {} failures, worst residual {:e} (tolerance {:e})",
        report.suite, report.cases, report.failures, report.worst_residual, report.tolerance
    );
    Ok(Outcome {
        stdout,
        stderr: Some(summary),
        code: if report.passed() { EXIT_OK } else { EXIT_VERIFY },
    })
}
