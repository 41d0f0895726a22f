//! Command-line front end: parse a parametrization, locate its poles, run
//! the branch cascade, and report the generalized asymptotes.

mod plot;
mod report;

use clap::Parser;
use gasym::asymptotes::{all_asymptotes, nd_asymptotes};
use gasym::branches::{approach_distance, BranchError};
use gasym::expr::parse;
use gasym::poles::{PoleError, Window};
use gasym::series::SeriesError;
use gasym::{CurveParam, Options};
use report::{PoleReport, Report};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

const EXIT_PARSE: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;
const EXIT_DIVERGED: u8 = 4;

/// Computes infinity branches and generalized asymptotes of a curve given
/// by meromorphic component functions of one parameter `s`.
#[derive(Parser, Debug)]
#[command(name = "gasym", version, about)]
struct Args {
    /// Component expressions, e.g. "(2*s^2-7*s+2)/((s-1)*s^2)"; at least two.
    #[arg(required = true, num_args = 2..)]
    components: Vec<String>,

    /// Pole search window as xmin,xmax,ymin,ymax.
    #[arg(long, default_value = "-10,10,-10,10")]
    window: String,

    /// Extra series orders past the constant branch term.
    #[arg(long)]
    depth: Option<i64>,

    /// Number of negative-exponent branch coefficients to report.
    #[arg(long, default_value_t = 3)]
    tail: usize,

    /// Relative zero tolerance for series coefficients (0 < tol <= 1e-2).
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,

    /// Emit the report as JSON instead of text.
    #[arg(long)]
    json: bool,

    /// Write curve/asymptote plot samples as CSV to this path.
    #[arg(long, value_name = "PATH")]
    plot: Option<String>,

    /// Radii for the approach-distance table, comma separated.
    #[arg(long, default_value = "10,100,1000,10000")]
    radii: String,

    /// Plotted x-range as lo,hi; defaults to the window's real extent.
    #[arg(long)]
    xrange: Option<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn run(args: &Args) -> Result<ExitCode, Failure> {
    let window =
        Window::parse(&args.window).map_err(|e| fail(EXIT_PARSE, format!("--window: {e}")))?;
    if !(args.tol > 0.0 && args.tol <= 1e-2) {
        return Err(fail(EXIT_PARSE, "--tol must lie in (0, 1e-2]"));
    }
    let radii = parse_radii(&args.radii).map_err(|e| fail(EXIT_PARSE, format!("--radii: {e}")))?;
    let xrange = match &args.xrange {
        Some(text) => parse_range(text).map_err(|e| fail(EXIT_PARSE, format!("--xrange: {e}")))?,
        None => (window.re_min, window.re_max),
    };

    let mut exprs = Vec::with_capacity(args.components.len());
    for (i, text) in args.components.iter().enumerate() {
        let e = parse(text).map_err(|e| fail(EXIT_PARSE, format!("component {}: {e}", i + 1)))?;
        exprs.push(e);
    }
    let curve = CurveParam::new(exprs)
        .map_err(|e| fail(EXIT_PARSE, format!("invalid parametrization: {e}")))?;

    let options = Options {
        depth: args.depth,
        tail_terms: args.tail,
        tolerance: args.tol,
    };

    let outcome = if curve.dimension() == 2 {
        all_asymptotes(&curve, &window, &options)
    } else {
        nd_asymptotes(&curve, &window, &options)
    }
    .map_err(|e| match e {
        PoleError::UnsupportedStructure(_) => fail(EXIT_UNSUPPORTED, e.to_string()),
        PoleError::Series(SeriesError::EssentialSingularity(_)) => {
            fail(EXIT_UNSUPPORTED, e.to_string())
        }
        other => fail(1, other.to_string()),
    })?;

    let mut results = Vec::new();
    for (asymptote, branch) in outcome.asymptotes.into_iter().zip(outcome.branches) {
        let pole = branch.pole.clone();
        let distances = approach_distance(&curve, &pole, &asymptote, &radii).ok();
        results.push(PoleReport {
            pole,
            branch,
            asymptote,
            distances,
        });
    }

    let diverged = outcome
        .failures
        .iter()
        .any(|f| matches!(f.error, BranchError::Diverged { .. }));
    let had_failures = !outcome.failures.is_empty();

    let report = Report {
        curve: args.components.clone(),
        window,
        depth: args.depth,
        tail_terms: args.tail,
        tolerance: args.tol,
        radii,
        results,
        failures: outcome.failures,
    };

    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    if args.json {
        report.write_json(&mut out)
    } else {
        report.write_text(&mut out)
    }
    .map_err(|e| fail(1, format!("writing report: {e}")))?;
    out.flush().map_err(|e| fail(1, e.to_string()))?;

    if let Some(path) = &args.plot {
        let file = File::create(path)
            .map_err(|e| fail(1, format!("cannot create plot file {path}: {e}")))?;
        let mut w = BufWriter::new(file);
        let poles: Vec<_> = report.results.iter().map(|r| r.pole.clone()).collect();
        let asymptotes: Vec<_> = report.results.iter().map(|r| r.asymptote.clone()).collect();
        plot::emit_plot_samples(&mut w, &curve, &poles, &asymptotes, xrange)
            .map_err(|e| fail(1, format!("writing plot samples: {e}")))?;
    }

    if diverged {
        Ok(ExitCode::from(EXIT_DIVERGED))
    } else if had_failures {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn parse_radii(text: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for raw in text.split(',') {
        let v: f64 = raw
            .trim()
            .parse()
            .map_err(|_| format!("bad radius '{raw}'"))?;
        if v <= 0.0 {
            return Err("radii must be positive".into());
        }
        if let Some(&last) = out.last() {
            if v <= last {
                return Err("radii must be strictly increasing".into());
            }
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err("need at least one radius".into());
    }
    Ok(out)
}

fn parse_range(text: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err("expected lo,hi".into());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| "bad lower bound")?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| "bad upper bound")?;
    if lo >= hi {
        return Err("range must have positive extent".into());
    }
    Ok((lo, hi))
}
