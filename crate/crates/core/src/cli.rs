//! The `resum` command line.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit code: 0 on success, 2 for usage and model errors, 3 for numerical
//! failures (including results whose error estimate exceeds `--tol`).

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::complexfn::Side;
use crate::error::Error;
use crate::models::{bundled, load_model, CoefficientModel, ModelKind};
use crate::quadrature::QuadratureResult;
use crate::reconstruct::{
    borel_sum, borel_sum_ei, reconstruct_entire, reconstruct_finite_radius_with, singularity_report, Lateral,
    ReconOptions,
};
use crate::sums::{
    abel_limit_oracle, eqsum_direct_oracle, eval_eqsum, eval_limit1, optimal_truncation_oracle, AbelApproach,
    Limit1Reading,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "resum", version, about = "Resummation of power series, special sums and Borel sums by contour integrals")]
struct Cli {
    /// Output format (default: human; csv for scan).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Fail with exit code 3 when an error estimate exceeds tol * max(1, |value|).
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print coefficients f_k of a model.
    Coeffs {
        #[command(flatten)]
        model: ModelArg,
        /// Inclusive index range `a..b` (or a single index), starting at 1.
        #[arg(long, value_parser = parse_k_range, default_value = "1..10")]
        k: (u32, u32),
    },
    /// Evaluate the resummed function at one or more points.
    Eval {
        #[command(flatten)]
        model: ModelArg,
        /// Evaluation point, e.g. `0.5`, `2+1i`, `-3-0.5i`; repeatable.
        #[arg(long, required = true, allow_hyphen_values = true)]
        z: Vec<String>,
        #[command(flatten)]
        contour: ContourArgs,
    },
    /// Probe the cut of one singularity.
    Singularity {
        #[command(flatten)]
        model: ModelArg,
        /// Term index.
        #[arg(long, default_value_t = 0)]
        j: usize,
        /// Relative probe offsets from the singularity, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.2,0.5")]
        eps: Vec<f64>,
    },
    /// Evaluate along a segment or on a grid and write CSV rows.
    Scan {
        #[command(flatten)]
        model: ModelArg,
        /// Segment start.
        #[arg(long, allow_hyphen_values = true, required_unless_present = "grid")]
        from: Option<String>,
        /// Segment end (defaults to the start).
        #[arg(long, allow_hyphen_values = true)]
        to: Option<String>,
        /// Number of points on the segment, endpoints included.
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Grid `re0,re1,nre,im0,im1,nim`, row-major in the imaginary part.
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["from", "to"])]
        grid: Option<String>,
        /// Output file (stdout when absent).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        #[command(flatten)]
        contour: ContourArgs,
    },
    /// Special sums with an oracle comparison.
    Sums {
        #[command(subcommand)]
        which: SumsCommand,
    },
    /// Borel sums with the optimal-truncation comparison.
    Borel {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, required = true, allow_hyphen_values = true)]
        z: Vec<String>,
        /// direct, upper, lower or median.
        #[arg(long, default_value = "median")]
        lateral: String,
    },
}

#[derive(Subcommand, Debug)]
enum SumsCommand {
    /// sum_n (-1)^n e^{sqrt n}, compared with its Abel limit.
    Limit1 {
        /// Integrand reading: derived or printed.
        #[arg(long, default_value = "derived")]
        reading: String,
    },
    /// sum_k e^{i sqrt k} k^{-a}, compared with a direct sum.
    Eqsum {
        #[arg(long)]
        a: f64,
        /// Terms summed explicitly by the oracle.
        #[arg(long, default_value_t = 10_000)]
        n: u64,
    },
}

#[derive(Args, Debug)]
struct ModelArg {
    /// Model file or bundled model name (f1, f2, f3-stirling, borel-sqrt).
    #[arg(value_name = "MODEL")]
    positional: Option<String>,
    #[arg(long = "model", value_name = "MODEL", conflicts_with = "positional")]
    flag: Option<String>,
}

#[derive(Args, Debug)]
struct ContourArgs {
    /// Side of a branch cut for points on it: upper, lower or off.
    #[arg(long, default_value = "off")]
    side: String,
    /// Lateral choice for Borel models.
    #[arg(long, default_value = "median")]
    lateral: String,
    /// Half-width of the loop around a nearby singularity (finite-radius models).
    #[arg(long)]
    eps: Option<f64>,
    /// Truncation length of the remainder loop (finite-radius models).
    #[arg(long)]
    tail: Option<f64>,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_numeric() { EXIT_NUMERIC } else { EXIT_USAGE }, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn io_failure(e: std::io::Error) -> Failure {
    usage(format!("i/o error: {e}"))
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = thread_pool().and_then(|pool| pool.install(|| execute(&cli)));
    match result {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_USAGE
            }
        },
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Pool sized by RESUM_THREADS when set.
fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("RESUM_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
            usage(format!("RESUM_THREADS must be a positive integer, got `{v}`"))
        })?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| usage(format!("cannot start worker threads: {e}")))
}

fn execute(cli: &Cli) -> CliResult<String> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(usage("--tol must be positive"));
    }
    let fmt = cli.format;
    match &cli.command {
        Command::Coeffs { model, k } => cmd_coeffs(model, *k, fmt.unwrap_or(Format::Human), cli.tol),
        Command::Eval { model, z, contour } => cmd_eval(model, z, contour, fmt.unwrap_or(Format::Human), cli.tol),
        Command::Singularity { model, j, eps } => cmd_singularity(model, *j, eps, fmt.unwrap_or(Format::Human), cli.tol),
        Command::Scan { model, from, to, count, grid, out, contour } => {
            let points = match grid {
                Some(g) => grid_points(g)?,
                None => {
                    let from = from.as_deref().ok_or_else(|| usage("scan needs --from or --grid"))?;
                    ray_points(from, to.as_deref(), *count)?
                }
            };
            let text = cmd_scan(model, &points, contour, fmt.unwrap_or(Format::Csv), cli.tol)?;
            match out {
                Some(path) => {
                    std::fs::write(path, text).map_err(io_failure)?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
        Command::Sums { which } => cmd_sums(which, fmt.unwrap_or(Format::Human), cli.tol),
        Command::Borel { model, z, lateral } => cmd_borel(model, z, lateral, fmt.unwrap_or(Format::Human), cli.tol),
    }
}

// Argument parsing helpers.

fn parse_k_range(s: &str) -> std::result::Result<(u32, u32), String> {
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("`{t}` is not a coefficient index"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            let a = parse(a)?;
            if a == 0 {
                return Err("coefficients start at k = 1".into());
            }
            if b.trim().is_empty() {
                return Err("the range needs an upper bound, e.g. 1..10".into());
            }
            (a, parse(b)?)
        }
        None => {
            let a = parse(s)?;
            (a, a)
        }
    };
    if a == 0 {
        return Err("coefficients start at k = 1".into());
    }
    if b < a {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

fn parse_z(s: &str) -> CliResult<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let z: Complex64 = t.parse().map_err(|_| usage(format!("cannot parse complex number `{s}`")))?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(usage(format!("`{s}` is not finite")));
    }
    Ok(z)
}

fn ray_points(from: &str, to: Option<&str>, count: usize) -> CliResult<Vec<Complex64>> {
    if count < 1 {
        return Err(usage("--count must be at least 1"));
    }
    let a = parse_z(from)?;
    let b = match to {
        Some(t) => parse_z(t)?,
        None => a,
    };
    if count == 1 {
        return Ok(vec![a]);
    }
    let n = (count - 1) as f64;
    Ok((0..count).map(|i| if i == count - 1 { b } else { a + (b - a) * (i as f64 / n) }).collect())
}

fn grid_points(spec: &str) -> CliResult<Vec<Complex64>> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        return Err(usage("--grid expects re0,re1,nre,im0,im1,nim"));
    }
    let num = |t: &str| t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| usage(format!("bad grid value `{t}`")));
    let cnt = |t: &str| t.parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(|| usage(format!("grid counts must be >= 1, got `{t}`")));
    let axis = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        if n == 1 {
            vec![lo]
        } else {
            (0..n).map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
        }
    };
    let re = axis(num(parts[0])?, num(parts[1])?, cnt(parts[2])?);
    let im = axis(num(parts[3])?, num(parts[4])?, cnt(parts[5])?);
    Ok(im.iter().flat_map(|&y| re.iter().map(move |&x| Complex64::new(x, y))).collect())
}

fn parse_side(s: &str) -> CliResult<Side> {
    s.parse().map_err(|e: Error| usage(e.to_string()))
}

fn parse_lateral(s: &str) -> CliResult<Lateral> {
    s.parse().map_err(|e: Error| usage(e.to_string()))
}

/// Resolved model and the name it was given by.
fn resolve_model(arg: &ModelArg) -> CliResult<(String, CoefficientModel)> {
    let name = arg
        .flag
        .as_ref()
        .or(arg.positional.as_ref())
        .ok_or_else(|| usage("a model is required (file path or bundled name)"))?;
    let model = if Path::new(name).is_file() {
        load_model(name)?
    } else {
        match bundled(name) {
            Ok(m) => m,
            Err(_) => return Err(usage(format!("`{name}` is neither a model file nor a bundled model"))),
        }
    };
    Ok((name.clone(), model))
}

fn within_tol(r: &QuadratureResult, tol: f64) -> bool {
    r.error_estimate <= tol * r.value.norm().max(1.0)
}

fn tol_failure(what: String, err: f64, tol: f64) -> Failure {
    Failure {
        code: EXIT_NUMERIC,
        message: format!("{what}: error estimate {err:.3e} exceeds the tolerance {tol:.3e}"),
    }
}

fn json<T: Serialize>(v: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Shortest round-trip form, in exponent notation outside [1e-5, 1e16).
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn cfmt(z: Complex64) -> String {
    format!("{:.15e} {} {:.15e}i", z.re, if z.im.is_sign_negative() { '-' } else { '+' }, z.im.abs())
}

fn kind_name(k: ModelKind) -> &'static str {
    match k {
        ModelKind::FiniteRadius => "finite_radius",
        ModelKind::Entire => "entire",
        ModelKind::Borel => "borel",
    }
}

// coeffs

#[derive(Serialize)]
struct CoeffRow {
    k: u32,
    re: f64,
    im: f64,
    err: f64,
    closed_re: Option<f64>,
    closed_im: Option<f64>,
}

#[derive(Serialize)]
struct CoeffsOut<'a> {
    command: &'static str,
    model: &'a str,
    kind: &'static str,
    rows: Vec<CoeffRow>,
}

fn cmd_coeffs(arg: &ModelArg, (k0, k1): (u32, u32), fmt: Format, tol: f64) -> CliResult<String> {
    let (name, model) = resolve_model(arg)?;
    let mut rows = Vec::new();
    for k in k0..=k1 {
        let r = model.coefficient(k)?;
        if !within_tol(&r, tol) {
            return Err(tol_failure(format!("f_{k}"), r.error_estimate, tol));
        }
        let closed = model.closed_form(k);
        rows.push(CoeffRow {
            k,
            re: r.value.re,
            im: r.value.im,
            err: r.error_estimate,
            closed_re: closed.map(|c| c.re),
            closed_im: closed.map(|c| c.im),
        });
    }
    Ok(match fmt {
        Format::Json => json(&CoeffsOut { command: "coeffs", model: &name, kind: kind_name(model.kind), rows })?,
        Format::Csv => {
            let mut s = String::from("k,re_f,im_f,err,re_closed,im_closed\n");
            for r in &rows {
                let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
                s += &format!("{},{},{},{},{},{}\n", r.k, num(r.re), num(r.im), num(r.err), opt(r.closed_re), opt(r.closed_im));
            }
            s
        }
        Format::Human => {
            let mut s = format!("coefficients of {name} ({})\n", kind_name(model.kind));
            for r in &rows {
                s += &format!("k = {:>4}  f_k = {}  err {:.1e}", r.k, cfmt(Complex64::new(r.re, r.im)), r.err);
                if let (Some(a), Some(b)) = (r.closed_re, r.closed_im) {
                    s += &format!("  closed form {}", cfmt(Complex64::new(a, b)));
                }
                s.push('\n');
            }
            s
        }
    })
}

// eval and scan

#[derive(Serialize)]
struct PointRow {
    re_z: f64,
    im_z: f64,
    re_f: f64,
    im_f: f64,
    err: f64,
}

#[derive(Serialize)]
struct PointsOut<'a> {
    command: &'static str,
    model: &'a str,
    kind: &'static str,
    side: Side,
    points: Vec<PointRow>,
}

struct Evaluator {
    model: CoefficientModel,
    side: Side,
    lateral: Lateral,
    opts: ReconOptions,
}

impl Evaluator {
    fn new(model: CoefficientModel, c: &ContourArgs) -> CliResult<Self> {
        let mut opts = ReconOptions::default();
        if c.eps.is_some() || c.tail.is_some() {
            if model.kind != ModelKind::FiniteRadius {
                return Err(usage("--eps and --tail apply to finite_radius models only"));
            }
        }
        if let Some(e) = c.eps {
            if !(e > 0.0 && e < 1.0) {
                return Err(usage("--eps must lie in (0, 1)"));
            }
            opts.lemma_width = e;
        }
        if let Some(t) = c.tail {
            if !(t > 0.0 && t.is_finite()) {
                return Err(usage("--tail must be positive"));
            }
            opts.tail_length = t;
        }
        Ok(Evaluator { model, side: parse_side(&c.side)?, lateral: parse_lateral(&c.lateral)?, opts })
    }

    fn eval(&self, z: Complex64) -> crate::Result<QuadratureResult> {
        match self.model.kind {
            ModelKind::FiniteRadius => reconstruct_finite_radius_with(&self.model, z, self.side, &self.opts),
            ModelKind::Entire => reconstruct_entire(&self.model, z),
            ModelKind::Borel => borel_sum(&self.model, z, self.lateral),
        }
    }
}

fn eval_points(ev: &Evaluator, points: &[Complex64], tol: f64) -> CliResult<Vec<PointRow>> {
    // parallel evaluation, rows kept in input order; the first failing point wins
    let results: Vec<_> = points.par_iter().map(|&z| (z, ev.eval(z))).collect();
    let mut rows = Vec::with_capacity(points.len());
    for (z, r) in results {
        let r = r.map_err(|e| {
            let f = Failure::from(e);
            Failure { message: format!("z = {z}: {}", f.message), ..f }
        })?;
        if !within_tol(&r, tol) {
            return Err(tol_failure(format!("z = {z}"), r.error_estimate, tol));
        }
        rows.push(PointRow { re_z: z.re, im_z: z.im, re_f: r.value.re, im_f: r.value.im, err: r.error_estimate });
    }
    Ok(rows)
}

fn render_points(command: &'static str, name: &str, ev: &Evaluator, rows: Vec<PointRow>, fmt: Format) -> CliResult<String> {
    Ok(match fmt {
        Format::Json => json(&PointsOut { command, model: name, kind: kind_name(ev.model.kind), side: ev.side, points: rows })?,
        Format::Csv => {
            let mut s = String::from("re_z,im_z,re_f,im_f,err\n");
            for r in &rows {
                s += &format!("{},{},{},{},{}\n", num(r.re_z), num(r.im_z), num(r.re_f), num(r.im_f), num(r.err));
            }
            s
        }
        Format::Human => {
            let mut s = String::new();
            for r in &rows {
                s += &format!(
                    "f({}) = {}  err {:.1e}\n",
                    Complex64::new(r.re_z, r.im_z),
                    cfmt(Complex64::new(r.re_f, r.im_f)),
                    r.err
                );
            }
            s
        }
    })
}

fn cmd_eval(arg: &ModelArg, zs: &[String], c: &ContourArgs, fmt: Format, tol: f64) -> CliResult<String> {
    let (name, model) = resolve_model(arg)?;
    let ev = Evaluator::new(model, c)?;
    let points = zs.iter().map(|s| parse_z(s)).collect::<CliResult<Vec<_>>>()?;
    let rows = eval_points(&ev, &points, tol)?;
    render_points("eval", &name, &ev, rows, fmt)
}

fn cmd_scan(arg: &ModelArg, points: &[Complex64], c: &ContourArgs, fmt: Format, tol: f64) -> CliResult<String> {
    let (name, model) = resolve_model(arg)?;
    let ev = Evaluator::new(model, c)?;
    let rows = eval_points(&ev, points, tol)?;
    render_points("scan", &name, &ev, rows, fmt)
}

// singularity

#[derive(Serialize)]
struct SingularityRow {
    offset: f64,
    re_probe: f64,
    im_probe: f64,
    re_local_upper: Option<f64>,
    im_local_upper: Option<f64>,
    re_local_lower: Option<f64>,
    im_local_lower: Option<f64>,
    re_measured_jump: f64,
    im_measured_jump: f64,
    re_predicted_jump: f64,
    im_predicted_jump: f64,
    err: f64,
}

#[derive(Serialize)]
struct SingularityOut<'a> {
    command: &'static str,
    model: &'a str,
    j: usize,
    re_a: f64,
    im_a: f64,
    probes: Vec<SingularityRow>,
}

fn cmd_singularity(arg: &ModelArg, j: usize, offsets: &[f64], fmt: Format, tol: f64) -> CliResult<String> {
    let (name, model) = resolve_model(arg)?;
    let a = model.terms.get(j).ok_or_else(|| usage(format!("model has no term {j}")))?.a;
    let mut probes = Vec::new();
    for &off in offsets {
        let r = singularity_report(&model, j, off)?;
        let scale = r.predicted_jump.norm().max(1.0);
        if r.error_estimate > tol * scale {
            return Err(tol_failure(format!("probe offset {off}"), r.error_estimate, tol));
        }
        probes.push(SingularityRow {
            offset: off,
            re_probe: r.probe.re,
            im_probe: r.probe.im,
            re_local_upper: r.local_upper.map(|v| v.re),
            im_local_upper: r.local_upper.map(|v| v.im),
            re_local_lower: r.local_lower.map(|v| v.re),
            im_local_lower: r.local_lower.map(|v| v.im),
            re_measured_jump: r.measured_jump.re,
            im_measured_jump: r.measured_jump.im,
            re_predicted_jump: r.predicted_jump.re,
            im_predicted_jump: r.predicted_jump.im,
            err: r.error_estimate,
        });
    }
    Ok(match fmt {
        Format::Json => json(&SingularityOut { command: "singularity", model: &name, j, re_a: a.re, im_a: a.im, probes })?,
        Format::Csv => {
            let mut s = String::from("offset,re_probe,im_probe,re_measured_jump,im_measured_jump,re_predicted_jump,im_predicted_jump,err\n");
            for p in &probes {
                s += &format!(
                    "{},{},{},{},{},{},{},{}\n",
                    num(p.offset),
                    num(p.re_probe),
                    num(p.im_probe),
                    num(p.re_measured_jump),
                    num(p.im_measured_jump),
                    num(p.re_predicted_jump),
                    num(p.im_predicted_jump),
                    num(p.err)
                );
            }
            s
        }
        Format::Human => {
            let mut s = format!("singularity {j} of {name} at {a}\n");
            for p in &probes {
                s += &format!("probe {}\n", Complex64::new(p.re_probe, p.im_probe));
                let measured = Complex64::new(p.re_measured_jump, p.im_measured_jump);
                let predicted = Complex64::new(p.re_predicted_jump, p.im_predicted_jump);
                s += &format!("  jump measured  {}  err {:.1e}\n", cfmt(measured), p.err);
                s += &format!("  jump predicted {}  difference {:.1e}\n", cfmt(predicted), (measured - predicted).norm());
                if let (Some(re), Some(im)) = (p.re_local_upper, p.im_local_upper) {
                    s += &format!("  local part (upper) {}\n", cfmt(Complex64::new(re, im)));
                }
                if let (Some(re), Some(im)) = (p.re_local_lower, p.im_local_lower) {
                    s += &format!("  local part (lower) {}\n", cfmt(Complex64::new(re, im)));
                }
            }
            s
        }
    })
}

// sums

#[derive(Serialize)]
struct SumOut {
    command: &'static str,
    sum: &'static str,
    parameter: Option<f64>,
    reading: Option<Limit1Reading>,
    re_value: f64,
    im_value: f64,
    err: f64,
    oracle: &'static str,
    re_oracle: f64,
    im_oracle: f64,
    oracle_err: f64,
    difference: f64,
}

fn cmd_sums(which: &SumsCommand, fmt: Format, tol: f64) -> CliResult<String> {
    let out = match which {
        SumsCommand::Limit1 { reading } => {
            let reading: Limit1Reading = reading.parse().map_err(|e: Error| usage(e.to_string()))?;
            let v = eval_limit1(reading)?;
            let o = abel_limit_oracle(|n| Complex64::new((n as f64).sqrt().exp(), 0.0), &AbelApproach::default())?;
            if !within_tol(&v, tol) {
                return Err(tol_failure("limit1".into(), v.error_estimate, tol));
            }
            SumOut {
                command: "sums",
                sum: "limit1",
                parameter: None,
                reading: Some(reading),
                re_value: v.value.re,
                im_value: v.value.im,
                err: v.error_estimate,
                oracle: "abel",
                re_oracle: o.value.re,
                im_oracle: o.value.im,
                oracle_err: o.error,
                difference: (v.value - o.value).norm(),
            }
        }
        SumsCommand::Eqsum { a, n } => {
            let v = eval_eqsum(*a)?;
            let o = eqsum_direct_oracle(*a, *n)?;
            if !within_tol(&v, tol) {
                return Err(tol_failure("eqsum".into(), v.error_estimate, tol));
            }
            SumOut {
                command: "sums",
                sum: "eqsum",
                parameter: Some(*a),
                reading: None,
                re_value: v.value.re,
                im_value: v.value.im,
                err: v.error_estimate,
                oracle: "direct",
                re_oracle: o.value.re,
                im_oracle: o.value.im,
                oracle_err: o.error,
                difference: (v.value - o.value).norm(),
            }
        }
    };
    Ok(match fmt {
        Format::Json => json(&out)?,
        Format::Csv => format!(
            "sum,parameter,re_value,im_value,err,re_oracle,im_oracle,oracle_err,difference\n{},{},{},{},{},{},{},{},{}\n",
            out.sum,
            out.parameter.map(num).unwrap_or_default(),
            num(out.re_value),
            num(out.im_value),
            num(out.err),
            num(out.re_oracle),
            num(out.im_oracle),
            num(out.oracle_err),
            num(out.difference)
        ),
        Format::Human => {
            let mut s = match (out.parameter, out.reading) {
                (Some(a), _) => format!("eqsum, a = {a}\n"),
                (_, Some(r)) => format!("limit1 ({r:?} reading)\n"),
                _ => String::new(),
            };
            s += &format!("  contour  {}  err {:.1e}\n", cfmt(Complex64::new(out.re_value, out.im_value)), out.err);
            s += &format!("  {:<8} {}  err {:.1e}\n", out.oracle, cfmt(Complex64::new(out.re_oracle, out.im_oracle)), out.oracle_err);
            s += &format!("  difference {:.3e}\n", out.difference);
            s
        }
    })
}

// borel

#[derive(Serialize)]
struct BorelRow {
    re_z: f64,
    im_z: f64,
    re_f: f64,
    im_f: f64,
    err: f64,
    re_truncated: f64,
    im_truncated: f64,
    truncation_floor: f64,
    k_star: u32,
    re_ei: Option<f64>,
    im_ei: Option<f64>,
}

#[derive(Serialize)]
struct BorelOut<'a> {
    command: &'static str,
    model: &'a str,
    lateral: Lateral,
    points: Vec<BorelRow>,
}

fn cmd_borel(arg: &ModelArg, zs: &[String], lateral: &str, fmt: Format, tol: f64) -> CliResult<String> {
    let (name, model) = resolve_model(arg)?;
    if model.kind != ModelKind::Borel {
        return Err(usage(format!("`{name}` is a {} model; borel needs a borel model", kind_name(model.kind))));
    }
    let lateral = parse_lateral(lateral)?;
    let points = zs.iter().map(|s| parse_z(s)).collect::<CliResult<Vec<_>>>()?;
    let mut rows = Vec::new();
    for z in points {
        let r = borel_sum(&model, z, lateral)?;
        if !within_tol(&r, tol) {
            return Err(tol_failure(format!("z = {z}"), r.error_estimate, tol));
        }
        let coeff = |k: u32| model.coefficient(k).map(|c| c.value).unwrap_or(Complex64::new(f64::NAN, 0.0));
        let t = optimal_truncation_oracle(coeff, z);
        let ei = if z.im == 0.0 { borel_sum_ei(&model, z.re).ok().map(|e| e.value) } else { None };
        rows.push(BorelRow {
            re_z: z.re,
            im_z: z.im,
            re_f: r.value.re,
            im_f: r.value.im,
            err: r.error_estimate,
            re_truncated: t.value.re,
            im_truncated: t.value.im,
            truncation_floor: t.floor,
            k_star: t.k_star,
            re_ei: ei.map(|e| e.re),
            im_ei: ei.map(|e| e.im),
        });
    }
    Ok(match fmt {
        Format::Json => json(&BorelOut { command: "borel", model: &name, lateral, points: rows })?,
        Format::Csv => {
            let mut s = String::from("re_z,im_z,re_f,im_f,err\n");
            for r in &rows {
                s += &format!("{},{},{},{},{}\n", num(r.re_z), num(r.im_z), num(r.re_f), num(r.im_f), num(r.err));
            }
            s
        }
        Format::Human => {
            let mut s = String::new();
            for r in &rows {
                let z = Complex64::new(r.re_z, r.im_z);
                s += &format!("z = {z} ({lateral:?})\n");
                s += &format!("  borel sum   {}  err {:.1e}\n", cfmt(Complex64::new(r.re_f, r.im_f)), r.err);
                s += &format!(
                    "  truncated   {}  floor {:.1e} at k = {}\n",
                    cfmt(Complex64::new(r.re_truncated, r.im_truncated)),
                    r.truncation_floor,
                    r.k_star
                );
                if let (Some(re), Some(im)) = (r.re_ei, r.im_ei) {
                    s += &format!("  Ei form     {}\n", cfmt(Complex64::new(re, im)));
                }
            }
            s
        }
    })
}
