//! Batch front-end for the spectral-pair toolkit.
//!
//! Measures and systems come in as JSON files, verdicts go out as JSON and
//! sampled curves as CSV. Exit code 0 means the checked property holds,
//! 1 means it was checked and fails, 2 means the input or invocation was
//! invalid.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use spectrapair_core::atomic::{self, FrequencySet};
use spectrapair_core::density::{CongruencePartition, SpectrumVerdict, StepDensity};
use spectrapair_core::ifs;
use spectrapair_core::io::{self, MeasureInput};
use spectrapair_core::sampling;

#[derive(Parser)]
#[command(
    name = "spectrapair",
    version,
    about = "Verify and construct measures with prescribed exponential spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the input measure's exponentials form an orthonormal
    /// basis (step densities against the integer lattice, atomic measures
    /// against their declared spectrum)
    Check(CheckArgs),
    /// Sample a spectral quantity over a frequency grid and emit CSV
    Curve(CurveArgs),
    /// Emit congruence partitions of the unit interval and their indicator
    /// densities, all sharing the integer spectrum
    Family(FamilyArgs),
    /// Analyze an affine iterated function system
    Ifs(IfsArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Measure description (JSON)
    #[arg(long)]
    input: PathBuf,
    /// Also write the verdict JSON to this file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Unitarity tolerance for atomic spectra
    #[arg(long, env = "SPECTRAPAIR_TOL", default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Quantity {
    /// Fourier transform of the measure: columns t,re,im
    #[value(name = "mu_hat")]
    MuHat,
    /// Exact Parseval sum over integer translates: columns t,c_phi
    #[value(name = "c_phi")]
    CPhi,
    /// Truncated frequency-side Parseval sum: columns t,c_phi_poisson
    #[value(name = "c_phi_poisson")]
    CPhiPoisson,
    /// Truncated spectral sum of an IFS measure: columns t,spectral_sum
    #[value(name = "spectral_sum")]
    SpectralSum,
}

#[derive(Args)]
struct CurveArgs {
    /// Quantity to sample
    #[arg(value_enum)]
    quantity: Quantity,
    /// Measure description (JSON)
    #[arg(long)]
    input: PathBuf,
    /// Output CSV file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sampling grid start:stop:count, e.g. -3:3:601
    #[arg(long, allow_hyphen_values = true)]
    grid: Grid,
    /// Truncation radius for the frequency-side Parseval sum
    #[arg(long = "trunc-N", default_value_t = 50)]
    trunc: u32,
    /// Spectrum slice depth for spectral sums
    #[arg(long = "depth-n", default_value_t = 8)]
    depth: usize,
    /// Product factors for IFS Fourier transforms
    #[arg(long = "factors-K", default_value_t = 40)]
    factors: usize,
}

#[derive(Args)]
struct FamilyArgs {
    /// Partition description (JSON); omit to generate random partitions
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory for partition/density JSON files
    #[arg(long)]
    out: PathBuf,
    /// Number of partitions to generate
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Pieces per random partition
    #[arg(long, default_value_t = 3)]
    pieces: usize,
    /// Seed for the random generator
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum IfsAction {
    /// Check that (B, L) is a Hadamard pair
    Hadamard,
    /// Enumerate the candidate lattice and all nontrivial extreme cycles
    Cycles,
    /// Compute the depth-n support cover of the invariant measure
    Cover,
    /// Search for a support-based non-equivalence certificate (ifs-pair input)
    Certificate,
}

#[derive(Args)]
struct IfsArgs {
    /// Action to run
    #[arg(value_enum)]
    action: IfsAction,
    /// System description (JSON); certificate wants an ifs-pair
    #[arg(long)]
    input: PathBuf,
    /// Also write the report JSON to this file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cover depth / certificate depth
    #[arg(long = "depth-n", default_value_t = 1)]
    depth: usize,
    /// Unitarity tolerance for the Hadamard test
    #[arg(long, env = "SPECTRAPAIR_TOL", default_value_t = 1e-10)]
    tol: f64,
}

/// Inclusive sampling grid `start:stop:count`.
#[derive(Debug, Copy, Clone)]
struct Grid {
    start: f64,
    stop: f64,
    count: usize,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:count, got {s:?}"));
        }
        let start: f64 = parts[0].parse().map_err(|e| format!("bad start: {e}"))?;
        let stop: f64 = parts[1].parse().map_err(|e| format!("bad stop: {e}"))?;
        let count: usize = parts[2].parse().map_err(|e| format!("bad count: {e}"))?;
        if count < 1 {
            return Err("count must be at least 1".into());
        }
        if start >= stop || start.is_nan() || stop.is_nan() {
            return Err("start must be below stop".into());
        }
        Ok(Grid { start, stop, count })
    }
}

impl Grid {
    fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        let steps = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.start + span * i as f64 / steps)
            .collect()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Curve(args) => cmd_curve(args),
        Command::Family(args) => cmd_family(args),
        Command::Ifs(args) => cmd_ifs(args),
    }
}

fn read_input(path: &PathBuf) -> Result<MeasureInput> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading input file {}", path.display()))?;
    io::parse_measure(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit_json(value: &serde_json::Value, out: Option<&PathBuf>) -> Result<()> {
    let line = value.to_string();
    println!("{line}");
    if let Some(path) = out {
        fs::write(path, format!("{line}\n"))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// 15 significant digits, the CSV contract for all real columns.
fn csv_float(x: f64) -> String {
    format!("{x:.14e}")
}

fn emit_text(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

fn density_verdict_json(verdict: &SpectrumVerdict) -> serde_json::Value {
    match verdict {
        SpectrumVerdict::OrthonormalAndComplete { certificate } => json!({
            "status": verdict.status(),
            "theorem": "T1.2",
            "certificate": io::partition_to_json(certificate),
        }),
        SpectrumVerdict::OrthonormalIncomplete { witness } => {
            let witness = witness.as_ref().map(|(cell, value)| {
                json!({
                    "cell": cell
                        .intervals()
                        .iter()
                        .map(|(lo, hi)| vec![lo.to_string(), hi.to_string()])
                        .collect::<Vec<_>>(),
                    "value": value.to_string(),
                })
            });
            json!({
                "status": verdict.status(),
                "theorem": "T1.2",
                "witness": witness,
            })
        }
        SpectrumVerdict::NotOrthonormal { cell, sum } => json!({
            "status": verdict.status(),
            "theorem": "T1.1",
            "witness": {
                "cell": cell
                    .intervals()
                    .iter()
                    .map(|(lo, hi)| vec![lo.to_string(), hi.to_string()])
                    .collect::<Vec<_>>(),
                "sum": sum.to_string(),
            },
        }),
    }
}

fn check_density(d: &StepDensity) -> (serde_json::Value, bool) {
    let verdict = d.integer_spectrum_verdict();
    (density_verdict_json(&verdict), verdict.is_complete())
}

fn cmd_check(args: CheckArgs) -> Result<bool> {
    if args.tol <= 0.0 {
        bail!("tolerance must be positive");
    }
    let (value, ok) = match read_input(&args.input)? {
        MeasureInput::Step(d) => check_density(&d),
        MeasureInput::Partition(p) => check_density(&p.indicator_density()),
        MeasureInput::Atomic { measure, spectrum } => {
            let freqs = match spectrum {
                Some(f) => f,
                None => {
                    if measure.dim() != 1 {
                        bail!("atomic inputs of dimension above 1 must declare a spectrum");
                    }
                    FrequencySet::range(measure.len())
                }
            };
            let defect = atomic::spectrum_defect(&measure, &freqs)?;
            let ok = defect < args.tol;
            let status = if ok { "spectrum" } else { "not_spectrum" };
            let flat: Vec<serde_json::Value> = freqs
                .frequencies()
                .iter()
                .map(|f| if f.len() == 1 { json!(f[0]) } else { json!(f) })
                .collect();
            (
                json!({
                    "status": status,
                    "theorem": "T2.6",
                    "unitarity_defect": defect,
                    "spectrum": flat,
                }),
                ok,
            )
        }
        MeasureInput::Ifs { .. } | MeasureInput::IfsPair { .. } => {
            bail!("iterated function systems are handled by the `ifs` subcommand")
        }
    };
    emit_json(&value, args.out.as_ref())?;
    Ok(ok)
}

// ---------------------------------------------------------------------------
// curve
// ---------------------------------------------------------------------------

fn cmd_curve(args: CurveArgs) -> Result<bool> {
    let input = read_input(&args.input)?;
    let points = args.grid.points();
    let mut csv = String::new();
    match (args.quantity, input) {
        (Quantity::MuHat, MeasureInput::Step(d)) => {
            if d.dim() != 1 {
                bail!("curves sample one-dimensional measures");
            }
            csv.push_str("t,re,im\n");
            for t in points {
                let v = d.fourier_transform(&[t]);
                writeln!(
                    csv,
                    "{},{},{}",
                    csv_float(t),
                    csv_float(v.re),
                    csv_float(v.im)
                )?;
            }
        }
        (Quantity::MuHat, MeasureInput::Atomic { measure, .. }) => {
            if measure.dim() != 1 {
                bail!("curves sample one-dimensional measures");
            }
            csv.push_str("t,re,im\n");
            for t in points {
                let v = measure.fourier_transform(&[t]);
                writeln!(
                    csv,
                    "{},{},{}",
                    csv_float(t),
                    csv_float(v.re),
                    csv_float(v.im)
                )?;
            }
        }
        (Quantity::MuHat, MeasureInput::Ifs { ifs, .. }) => {
            if args.factors < 1 {
                bail!("factors-K must be at least 1");
            }
            csv.push_str("t,re,im\n");
            for t in points {
                let v = ifs.fourier_transform(t, args.factors);
                writeln!(
                    csv,
                    "{},{},{}",
                    csv_float(t),
                    csv_float(v.re),
                    csv_float(v.im)
                )?;
            }
        }
        (Quantity::CPhi, MeasureInput::Step(d)) => {
            if d.dim() != 1 {
                bail!("curves sample one-dimensional measures");
            }
            csv.push_str("t,c_phi\n");
            for t in points {
                let v = d.parseval_sum(&[t])?;
                writeln!(csv, "{},{}", csv_float(t), csv_float(v))?;
            }
        }
        (Quantity::CPhiPoisson, MeasureInput::Step(d)) => {
            if d.dim() != 1 {
                bail!("curves sample one-dimensional measures");
            }
            csv.push_str("t,c_phi_poisson\n");
            for t in points {
                let v = d.parseval_sum_partial(&[t], args.trunc);
                writeln!(csv, "{},{}", csv_float(t), csv_float(v))?;
            }
        }
        (Quantity::SpectralSum, MeasureInput::Ifs { ifs, dual }) => {
            let dual = dual.context("spectral sums need the dual digits L")?;
            if args.factors < 1 {
                bail!("factors-K must be at least 1");
            }
            let slice = ifs::gamma_slice(ifs.scale(), &dual, args.depth)?;
            csv.push_str("t,spectral_sum\n");
            for t in points {
                let v = ifs::spectral_sum(&ifs, &slice, t, args.factors);
                writeln!(csv, "{},{}", csv_float(t), csv_float(v))?;
            }
        }
        (Quantity::CPhi | Quantity::CPhiPoisson, _) => {
            bail!("this quantity is defined for step densities only")
        }
        (Quantity::SpectralSum, _) => {
            bail!("spectral sums are defined for iterated function systems only")
        }
        (Quantity::MuHat, MeasureInput::IfsPair { .. } | MeasureInput::Partition(_)) => {
            bail!("transforms are sampled from a single measure input")
        }
    }
    emit_text(&csv, args.out.as_ref())?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// family
// ---------------------------------------------------------------------------

fn cmd_family(args: FamilyArgs) -> Result<bool> {
    if args.count < 1 {
        bail!("count must be at least 1");
    }
    if args.pieces < 1 {
        bail!("pieces must be at least 1");
    }
    let partitions: Vec<CongruencePartition> = match &args.input {
        Some(path) => {
            if args.count != 1 {
                bail!("an explicit partition input emits exactly one family member");
            }
            match read_input(path)? {
                MeasureInput::Partition(p) => vec![p],
                _ => bail!("family input must be a partition description"),
            }
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (0..args.count)
                .map(|_| sampling::random_congruence_partition(&mut rng, args.pieces, 64, 8))
                .collect()
        }
    };
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating output directory {}", args.out.display()))?;
    let mut all_complete = true;
    for (i, partition) in partitions.iter().enumerate() {
        let density = partition.indicator_density();
        // Postcondition: every emitted density carries the integer spectrum.
        all_complete &= density.integer_spectrum_verdict().is_complete();
        let p_path = args.out.join(format!("partition_{i:03}.json"));
        let d_path = args.out.join(format!("density_{i:03}.json"));
        fs::write(&p_path, format!("{}\n", io::partition_to_json(partition)))
            .with_context(|| format!("writing {}", p_path.display()))?;
        fs::write(&d_path, format!("{}\n", io::step_density_to_json(&density)))
            .with_context(|| format!("writing {}", d_path.display()))?;
    }
    let summary = json!({
        "count": partitions.len(),
        "dir": args.out.display().to_string(),
        "all_complete": all_complete,
    });
    emit_json(&summary, None)?;
    Ok(all_complete)
}

// ---------------------------------------------------------------------------
// ifs
// ---------------------------------------------------------------------------

fn cmd_ifs(args: IfsArgs) -> Result<bool> {
    if args.tol <= 0.0 {
        bail!("tolerance must be positive");
    }
    let input = read_input(&args.input)?;
    let (value, ok) = match (args.action, input) {
        (IfsAction::Hadamard, MeasureInput::Ifs { ifs, dual }) => {
            let dual = dual.context("the Hadamard test needs the dual digits L")?;
            let defect = ifs::hadamard_defect(&ifs, &dual)?;
            let ok = defect < args.tol;
            (json!({ "hadamard": ok, "defect": defect }), ok)
        }
        (IfsAction::Cycles, MeasureInput::Ifs { ifs, dual }) => {
            let dual = dual.context("the cycle search needs the dual digits L")?;
            let found = ifs::extreme_cycles(&ifs, &dual)?;
            let candidates: Vec<String> = found.candidates.iter().map(|c| c.to_string()).collect();
            let cycles: Vec<Vec<String>> = found
                .cycles
                .iter()
                .map(|c| c.points.iter().map(|p| p.to_string()).collect())
                .collect();
            let digits: Vec<Vec<i64>> = found.cycles.iter().map(|c| c.digits.clone()).collect();
            let ok = found.cycles.is_empty();
            (
                json!({
                    "candidates": candidates,
                    "cycles": cycles,
                    "cycle_digits": digits,
                    "spectrum_certified": ok,
                }),
                ok,
            )
        }
        (IfsAction::Cover, MeasureInput::Ifs { ifs, .. }) => {
            let cover: Vec<Vec<String>> = ifs::support_cover(&ifs, args.depth)
                .iter()
                .map(|(lo, hi)| vec![lo.to_string(), hi.to_string()])
                .collect();
            (json!(cover), true)
        }
        (IfsAction::Certificate, MeasureInput::IfsPair { first, second, .. }) => {
            match ifs::non_equivalence_certificate(&first, &second, args.depth) {
                Some(cert) => (
                    json!({
                        "certificate": {
                            "point": cert.point.to_string(),
                            "distance": cert.distance.to_string(),
                        }
                    }),
                    true,
                ),
                None => (json!({ "certificate": null }), false),
            }
        }
        (IfsAction::Certificate, _) => {
            bail!("the certificate action takes an ifs-pair input")
        }
        (_, _) => bail!("this action takes a single ifs input"),
    };
    emit_json(&value, args.out.as_ref())?;
    Ok(ok)
}
