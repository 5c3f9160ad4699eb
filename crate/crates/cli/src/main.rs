use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sampling_core::experiments::{load_config, run, write_csv, ExperimentKind, ExperimentReport, ExperimentSpec, Value};
use sampling_core::functions::{known_labels, lookup};
use sampling_core::kernels::{parse_kernel, KNOWN_KERNELS};
use sampling_core::norms::{luxemburg_norm, mixed_lebesgue_norm, ExponentVector, OrliczVector, DEFAULT_LUXEMBURG_TOL, KNOWN_ORLICZ};
use sampling_core::numerics::QuadratureSpec;
use sampling_core::operators::{apply_on_grid, generalized_apply, kantorovich_apply, OperatorConfig, Which};
use sampling_core::Error;

/// Sampling operators with tensor-product kernels, mixed Lebesgue and
/// Orlicz norms, and the experiments built on them.
#[derive(Parser)]
#[command(name = "sampling", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Lebesgue,
    Orlicz,
}

#[derive(Clone, Copy, ValueEnum)]
enum Operator {
    Kantorovich,
    Generalized,
}

#[derive(Subcommand)]
enum Command {
    /// Check partition of unity, moments and the Fourier condition of a kernel.
    Certify {
        kernel_id: String,
        /// Lattice radius of the truncated sums (default: per-family radius).
        #[arg(long)]
        radius: Option<usize>,
        /// Report path (default: certify.csv).
        #[arg(long, default_value = "certify.csv")]
        out: PathBuf,
    },
    /// Mixed Lebesgue or Luxemburg norm of a corpus function.
    Norm {
        #[arg(long, value_enum)]
        space: Space,
        /// Exponents, innermost first, e.g. 1,2.
        #[arg(long = "P", required_if_eq("space", "lebesgue"))]
        p: Option<String>,
        /// Orlicz functions, innermost first, e.g. power:1,ratio:2.
        #[arg(long = "Phi", required_if_eq("space", "orlicz"))]
        phi: Option<String>,
        #[arg(long)]
        function: String,
        /// Accept exponents that are not non-decreasing.
        #[arg(long)]
        allow_unordered: bool,
        /// Also write the value to a one-row CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a sampling operator at a point or on a grid.
    Apply {
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        function: String,
        #[arg(long)]
        w: f64,
        #[arg(long, value_enum, default_value = "kantorovich")]
        operator: Operator,
        /// Point to evaluate at, e.g. 0.25,0.5; printed to stdout.
        #[arg(long, conflicts_with = "out", required_unless_present = "out")]
        at: Option<String>,
        /// Grid CSV over the support box of the function.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 65)]
        points: usize,
    },
    /// Run every experiment of a config file.
    Run { config_path: PathBuf },
    /// Known kernels, functions, Orlicz families and experiment kinds.
    List,
}

/// Failures of the input, as opposed to failed checks.
fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::UnknownKernel { .. }
            | Error::UnknownFunction { .. }
            | Error::UnknownOrlicz { .. }
            | Error::InvalidExponents(_)
            | Error::InvalidArgument(_)
            | Error::ArityMismatch { .. }
            | Error::UnsupportedDimension(_)
            | Error::Config { .. }
    )
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if is_usage_error(&e) { 2 } else { 1 })
}

/// 12 significant digits with trailing zeros dropped, like `%.12g`, but
/// integers keep a `.0`.
fn sig12(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..12).contains(&exp) {
        let fixed = trim(&format!("{v:.*}", (11 - exp).max(0) as usize));
        // keep a decimal point so the value reads as a real
        if fixed.contains('.') {
            fixed
        } else {
            fixed + ".0"
        }
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

/// The dimension a kernel id lives in: 1 for product kernels, `d` for
/// Bochner–Riesz ids.
fn kernel_dim(id: &str) -> Result<usize, Error> {
    let mut last = None;
    for d in 1..=3 {
        match parse_kernel(id, d, false) {
            Ok(_) => return Ok(d),
            Err(e @ Error::ArityMismatch { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("three attempts"))
}

fn certify(kernel_id: String, radius: Option<usize>, out: PathBuf) -> Result<ExitCode, Error> {
    let mut spec = ExperimentSpec::new("certify", ExperimentKind::KernelCertify, out);
    spec.dims = vec![kernel_dim(&kernel_id)?];
    spec.kernels = vec![kernel_id];
    spec.radius = radius;
    finish(&spec, run(&spec)?)
}

fn finish(spec: &ExperimentSpec, report: ExperimentReport) -> Result<ExitCode, Error> {
    write_csv(&report, &spec.output)?;
    for f in &report.failures {
        eprintln!("{}: {f}", spec.name);
    }
    eprintln!(
        "{}: {} ({} rows, {:.1} s) -> {}",
        spec.name,
        if report.passed() { "pass" } else { "FAILED" },
        report.rows.len(),
        report.wallclock.as_secs_f64(),
        spec.output.display()
    );
    Ok(ExitCode::from(if report.passed() { 0 } else { 1 }))
}

fn norm(space: Space, p: Option<String>, phi: Option<String>, label: &str, allow_unordered: bool, out: Option<PathBuf>) -> Result<ExitCode, Error> {
    let f = lookup(label)?;
    let q = QuadratureSpec::default();
    let (index, value) = match space {
        Space::Lebesgue => {
            let p = p.expect("required by clap");
            let p = if allow_unordered {
                ExponentVector::parse_unordered(&p)?
            } else {
                p.parse::<ExponentVector>()?
            };
            (p.to_string(), mixed_lebesgue_norm(&f, &p, &q)?)
        }
        Space::Orlicz => {
            let phi: OrliczVector = phi.expect("required by clap").parse()?;
            (phi.ids().join(","), luxemburg_norm(&phi, &f, &q, DEFAULT_LUXEMBURG_TOL)?.to_f64())
        }
    };
    println!("{}", sig12(value));
    if let Some(path) = out {
        let mut r = ExperimentReport::new(&["function", "space", "index", "norm"]);
        r.meta("function_label", label);
        r.meta("quadrature", format!("{q:?}"));
        let space = match space {
            Space::Lebesgue => "lebesgue",
            Space::Orlicz => "orlicz",
        };
        r.push(vec![label.into(), space.into(), index.into(), value.into()]);
        write_csv(&r, &path)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_point(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("cannot parse coordinate '{}'", t.trim()))))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn apply(kernel: &str, label: &str, w: f64, operator: Operator, at: Option<String>, out: Option<PathBuf>, points: usize) -> Result<ExitCode, Error> {
    let f = lookup(label)?;
    let cfg = OperatorConfig::new(parse_kernel(kernel, f.arity(), false)?.into_product()?, w)?;
    let which = match operator {
        Operator::Kantorovich => Which::Kantorovich,
        Operator::Generalized => Which::Generalized,
    };
    if let Some(at) = at {
        let x = parse_point(&at)?;
        let v = match which {
            Which::Kantorovich => kantorovich_apply(&cfg, &f, &x)?,
            Which::Generalized => generalized_apply(&cfg, &f, &x)?,
        };
        println!("{}", sig12(v));
        return Ok(ExitCode::SUCCESS);
    }
    let path = out.expect("required by clap");
    let g = apply_on_grid(&cfg, &f, f.support(), points, which, None)?;
    write_csv(&grid_report(&g, kernel, label, w, which), &path)?;
    eprintln!("{} points -> {}", g.values().len(), path.display());
    Ok(ExitCode::SUCCESS)
}

fn grid_report(g: &sampling_core::norms::GridFunction, kernel: &str, label: &str, w: f64, which: Which) -> ExperimentReport {
    let n = g.dim();
    let mut columns: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    columns.push("value".into());
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut r = ExperimentReport::new(&cols);
    r.meta("kernel_id", kernel);
    r.meta("function_label", label);
    r.meta("operator", which);
    r.meta("w", w);
    let axes: Vec<Vec<f64>> = (0..n).map(|i| sampling_core::norms::GridFunction::axis_points(g.domain(), g.pts_per_axis(), i)).collect();
    let m = g.pts_per_axis();
    for (idx, &v) in g.values().iter().enumerate() {
        // axis 0 varies fastest
        let mut row: Vec<Value> = (0..n).map(|i| Value::Num(axes[i][(idx / m.pow(i as u32)) % m])).collect();
        row.push(v.into());
        r.push(row);
    }
    r
}

fn run_config(path: &Path) -> Result<ExitCode, Error> {
    let config = load_config(path)?;
    let mut code = ExitCode::SUCCESS;
    for spec in &config.experiments {
        if let Some(dir) = spec.output.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io {
                path: dir.to_path_buf(),
                source: e,
            })?;
        }
        let outcome = run(spec).and_then(|r| finish(spec, r));
        match outcome {
            Ok(c) if c == ExitCode::SUCCESS => {}
            Ok(c) => code = c,
            Err(e) if is_usage_error(&e) => return Err(e),
            Err(e) => {
                eprintln!("{}: error: {e}", spec.name);
                code = ExitCode::from(1);
            }
        }
    }
    Ok(code)
}

fn list() -> ExitCode {
    println!("kernels:");
    for k in KNOWN_KERNELS {
        println!("  {k}");
    }
    println!("functions:");
    for f in known_labels() {
        println!("  {f}");
    }
    println!("orlicz families:");
    for o in KNOWN_ORLICZ {
        println!("  {o}");
    }
    println!("experiment kinds:");
    for k in ExperimentKind::ALL {
        println!("  {k}");
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Certify { kernel_id, radius, out } => certify(kernel_id, radius, out),
        Command::Norm {
            space,
            p,
            phi,
            function,
            allow_unordered,
            out,
        } => norm(space, p, phi, &function, allow_unordered, out),
        Command::Apply {
            kernel,
            function,
            w,
            operator,
            at,
            out,
            points,
        } => apply(&kernel, &function, w, operator, at, out, points),
        Command::Run { config_path } => run_config(&config_path),
        Command::List => Ok(list()),
    };
    outcome.unwrap_or_else(fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(1.0), "1.0");
        assert_eq!(sig12((2.0f64 / 3.0).sqrt()), "0.816496580928");
        assert_eq!(sig12(1234.5), "1234.5");
        assert_eq!(sig12(1e-7), "1e-7");
        assert_eq!(sig12(-2.5e20), "-2.5e20");
        assert_eq!(sig12(f64::INFINITY), "inf");
    }
}
