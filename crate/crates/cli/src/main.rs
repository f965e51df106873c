//! `convex-inclusion`: inclusion checks, witness maps and identification
//! suites from the command line.
//!
//! Exit codes: 0 success (inclusion holds, witness written, suite
//! consistent), 1 negative outcome (non-inclusion certificate, no witness,
//! inconsistent suite), 2 usage, parse or computation errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use convex_inclusion::bodies::{contains, parse_body, polytopalize, translative_inclusion, Body};
use convex_inclusion::witness::find_witness;
use convex_inclusion::{identify, tuples, Error, Functional, SuiteReport, WitnessCertificate, EPS_GEO};

/// Boundary samples used when an ellipsoid has to be replaced by a polytope.
const ELLIPSOID_SAMPLES_2D: usize = 256;
const ELLIPSOID_SAMPLES_3D: usize = 600;

#[derive(Parser)]
#[command(name = "convex-inclusion", version, about = "Inclusion identification for convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide A ⊆ B (or A + x ⊆ B with --translate); print a witness
    /// certificate when it fails.
    CheckInclusion {
        path_a: PathBuf,
        path_b: PathBuf,
        #[arg(long)]
        translate: bool,
    },
    /// Build a fractional-linear map reversing a monotone functional.
    Witness {
        path_a: PathBuf,
        path_b: PathBuf,
        #[arg(long, default_value = "volume")]
        functional: String,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Certificate file; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an identification suite and emit its records as CSV.
    Suite {
        name: SuiteName,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// CSV file; printed to stdout when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    Sums,
    Sections,
    Projections,
    TuplesAffine,
    TuplesProjective,
    Reuleaux,
}

/// Failure with a chosen exit code.
struct Exit(u8, String);

impl From<anyhow::Error> for Exit {
    fn from(e: anyhow::Error) -> Self {
        Exit(2, format!("error: {e:#}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::CheckInclusion {
            path_a,
            path_b,
            translate,
        } => check_inclusion(&path_a, &path_b, translate),
        Command::Witness {
            path_a,
            path_b,
            functional,
            eps,
            out,
        } => witness(&path_a, &path_b, &functional, eps, out.as_deref()),
        Command::Suite {
            name,
            samples,
            seed,
            csv,
        } => suite(name, samples, seed, csv.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, msg)) => {
            eprintln!("{msg}");
            ExitCode::from(code)
        }
    }
}

fn load(path: &Path) -> Result<Body> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_body(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Ellipsoids are replaced by inscribed polytopes; polytopes pass through.
fn polytopal(b: Body) -> Result<Body> {
    Ok(match b {
        Body::Ellipsoid(e) => {
            let m = if e.dim() == 2 { ELLIPSOID_SAMPLES_2D } else { ELLIPSOID_SAMPLES_3D };
            Body::Polytope(polytopalize(&e, m)?)
        }
        p => p,
    })
}

fn load_pair(a: &Path, b: &Path) -> Result<(Body, Body)> {
    let (a, b) = (polytopal(load(a)?)?, polytopal(load(b)?)?);
    if a.dim() != b.dim() {
        anyhow::bail!("bodies live in different dimensions ({} and {})", a.dim(), b.dim());
    }
    Ok((a, b))
}

fn fmt_point(x: &convex_inclusion::Vector) -> String {
    let parts: Vec<String> = x.iter().map(|c| format!("{c}")).collect();
    format!("[{}]", parts.join(", "))
}

fn certificate_json(cert: &WitnessCertificate) -> Result<String> {
    Ok(serde_json::to_string_pretty(cert)?)
}

fn check_inclusion(pa: &Path, pb: &Path, translate: bool) -> std::result::Result<u8, Exit> {
    let (a, b) = load_pair(pa, pb)?;
    let x0 = if translate {
        translative_inclusion(&a, &b).map_err(anyhow::Error::from)?
    } else {
        let tol = EPS_GEO * b.extent().max(1.0);
        contains(&b, &a, tol)
            .map_err(anyhow::Error::from)?
            .then(|| convex_inclusion::Vector::zeros(a.dim()))
    };
    if let Some(x0) = x0 {
        println!("included: x0 = {}", fmt_point(&x0));
        return Ok(0);
    }
    // With --translate the certificate is for the LP-optimal translate.
    let a = if translate {
        let lp = convex_inclusion::bodies::inclusion_lp(&a, &b).map_err(anyhow::Error::from)?;
        convex_inclusion::bodies::scale_translate(&a, 1.0, &lp.shift).map_err(anyhow::Error::from)?
    } else {
        a
    };
    let cert = find_witness(&a, &b, Functional::Volume, 0.5).map_err(anyhow::Error::from)?;
    println!("{}", certificate_json(&cert)?);
    Ok(1)
}

fn witness(pa: &Path, pb: &Path, functional: &str, eps: f64, out: Option<&Path>) -> std::result::Result<u8, Exit> {
    let functional: Functional = functional.parse().map_err(anyhow::Error::from)?;
    let (a, b) = load_pair(pa, pb)?;
    let cert = match find_witness(&a, &b, functional, eps) {
        Ok(c) => c,
        Err(Error::NoWitnessPoint) => return Err(Exit(1, "A ⊆ B: no witness exists".into())),
        Err(e) => return Err(anyhow::Error::from(e).into()),
    };
    let json = certificate_json(&cert)?;
    let mut lines = Vec::new();
    for (name, (fa, fb)) in &cert.measured {
        lines.push(format!("{name}: F(A) = {fa:.12e}, F(B) = {fb:.12e}"));
    }
    match out {
        Some(path) => {
            fs::write(path, json + "\n")
                .with_context(|| format!("writing {}", path.display()))?;
            for l in lines {
                println!("{l}");
            }
        }
        None => {
            for l in lines {
                eprintln!("{l}");
            }
            println!("{json}");
        }
    }
    Ok(0)
}

fn run_suite(name: SuiteName, samples: usize, seed: u64) -> convex_inclusion::Result<SuiteReport> {
    match name {
        SuiteName::Sums => identify::sums_suite(samples, seed),
        SuiteName::Sections => identify::sections_suite(samples, seed),
        SuiteName::Projections => identify::projections_suite(samples, seed),
        SuiteName::Reuleaux => identify::reuleaux_suite(samples, seed),
        SuiteName::TuplesAffine => tuples::tuples_affine_suite(samples, seed),
        SuiteName::TuplesProjective => tuples::tuples_projective_suite(samples, seed),
    }
}

fn suite_csv(report: &SuiteReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &report.records {
        w.serialize(r)?;
    }
    Ok(w.into_inner()?)
}

fn suite(name: SuiteName, samples: usize, seed: u64, csv_path: Option<&Path>) -> std::result::Result<u8, Exit> {
    let report = run_suite(name, samples, seed).map_err(anyhow::Error::from)?;
    let bytes = suite_csv(&report)?;
    match csv_path {
        Some(path) => {
            fs::write(path, &bytes).with_context(|| format!("writing {}", path.display()))?;
            println!("{}", report.summary());
        }
        None => {
            std::io::stdout()
                .write_all(&bytes)
                .context("writing CSV to stdout")?;
            eprintln!("{}", report.summary());
        }
    }
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    Ok(match report.verdict.as_str() {
        "INCONSISTENT" | "FAILED" => 1,
        _ => 0,
    })
}
