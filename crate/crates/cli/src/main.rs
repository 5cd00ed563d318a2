//! `ayrel`: build surfaces of the real-rel family, run the verification
//! suites, and write reports and SVG renderings.
//!
//! Exit codes: 0 pass, 1 check failure, 2 search budget exhausted, 3 bad
//! input or I/O.

use std::path::PathBuf;
use std::process::ExitCode;

use ayrel::ay::build_xr;
use ayrel::cylinders::vertical_decomposition;
use ayrel::iet::{first_return_iet, iet_periodicity, saf, TRACE_BUDGET};
use ayrel::trace::DEFAULT_BUDGET;
use ayrel::twist::{extract_chart, orbit_closure};
use num_traits::Zero;
use ayrel_cli::suites::{self, Options, ORBIT_BUDGET};
use ayrel_cli::{parse_time, svg};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "ayrel", version, about = "Exact geometry of the Arnoux-Yoccoz real-rel family")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the surface x_r as JSON.
    Build {
        /// Rel time in Q(a), e.g. `3/2`, `a^3`, `-1 + a^2`.
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        /// Output file; standard output when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and write its report.
    Verify {
        /// One of holonomies, cylinders, renorm, torus, iet, all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Smallest window index for the cylinder checks.
        #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
        k_min: i64,
        /// Largest window index for the cylinder checks.
        #[arg(long, default_value_t = 6)]
        k_max: i64,
        /// Samples per window for the cylinder checks.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Report file; standard output when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Write `id<TAB>status<TAB>claim` lines instead of JSON.
        #[arg(long)]
        tsv: bool,
    },
    /// Render x_r as SVG.
    Svg {
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(short, long)]
        out: PathBuf,
        /// Pixels per unit length.
        #[arg(long, default_value_t = 120.0)]
        scale: f64,
    },
    /// Cylinders, twist chart and return map of x_r as JSON, or the
    /// line-segment table as TSV.
    Report {
        #[arg(long, allow_hyphen_values = true, required_unless_present = "segment")]
        r: Option<String>,
        /// Emit the return-map table along the rel leaf instead.
        #[arg(long)]
        segment: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

/// Failure carrying its exit code.
struct Exit(u8, String);

fn input(msg: impl std::fmt::Display) -> Exit {
    Exit(3, msg.to_string())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Exit> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn build(r: &str, out: &Option<PathBuf>) -> Result<u8, Exit> {
    let r = parse_time(r).map_err(input)?;
    let x = build_xr(&r).map_err(|e| Exit(1, e.to_string()))?;
    emit(out, &pretty(&x.to_json()))?;
    Ok(0)
}

fn verify(suite: &str, opts: &Options, out: &Option<PathBuf>, tsv: bool) -> Result<u8, Exit> {
    let report = suites::run(suite, opts).ok_or_else(|| input(format!("unknown suite {suite:?}")))?;
    let text = if tsv { report.to_tsv() } else { pretty(&report.to_json()) };
    emit(out, &text)?;
    let failing = report.failing();
    if !failing.is_empty() {
        eprintln!("failing checks: {}", failing.join(", "));
    }
    Ok(report.status().exit_code() as u8)
}

fn render(r: &str, out: &PathBuf, scale: f64) -> Result<u8, Exit> {
    let r = parse_time(r).map_err(input)?;
    let x = build_xr(&r).map_err(|e| Exit(1, e.to_string()))?;
    let d = if r.is_zero() { None } else { vertical_decomposition(&x.surface, DEFAULT_BUDGET).ok() };
    emit(&Some(out.clone()), &svg::render(&x.surface, d.as_ref(), scale))?;
    Ok(0)
}

fn report(r: Option<&str>, segment: bool, out: &Option<PathBuf>) -> Result<u8, Exit> {
    if segment {
        let tsv = suites::segment_table().map_err(|e| Exit(1, e))?;
        emit(out, &tsv)?;
        return Ok(0);
    }
    let r = parse_time(r.unwrap_or_default()).map_err(input)?;
    let x = build_xr(&r).map_err(|e| Exit(1, e.to_string()))?;
    let mut v = json!({ "rel_time": r.to_string(), "area": x.surface.area().to_string() });
    let mut code = 0;
    match vertical_decomposition(&x.surface, DEFAULT_BUDGET) {
        Ok(d) => {
            let chart = extract_chart(&d);
            v["cylinders"] = d.to_json();
            v["twist_chart"] = chart.to_json();
            v["orbit_closure"] = orbit_closure(&chart).map(|o| o.to_json()).unwrap_or_else(|e| json!({ "error": e.to_string() }));
        }
        Err(e) => {
            v["cylinders"] = json!({ "error": e.to_string() });
            code = 2;
        }
    }
    match first_return_iet(&x.surface, TRACE_BUDGET) {
        Ok(m) => {
            v["return_map"] = m.iet.to_json();
            v["return_map_verdict"] = json!(iet_periodicity(&m.iet, ORBIT_BUDGET).name());
            v["saf"] = saf(&m.iet).to_json();
        }
        Err(e) => v["return_map"] = json!({ "error": e.to_string() }),
    }
    emit(out, &pretty(&v))?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match &cli.cmd {
        Cmd::Build { r, out } => build(r, out),
        Cmd::Verify { suite, k_min, k_max, samples, out, tsv } => {
            verify(suite, &Options { k_min: *k_min, k_max: *k_max, samples: *samples }, out, *tsv)
        }
        Cmd::Svg { r, out, scale } => render(r, out, *scale),
        Cmd::Report { r, segment, out } => report(r.as_deref(), *segment, out),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
