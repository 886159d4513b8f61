use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use tverberg_core::colorful::{partition_colorful, ColorInstance};
use tverberg_core::geom::DiameterPolicy;
use tverberg_core::hamsandwich::generalized_ham_sandwich;
use tverberg_core::tverberg::{
    partition_balanced, partition_general, partition_nearly_balanced, Mode, PartitionOptions,
    SelectionRule, SizeSpec, DEFAULT_ARITY,
};

use crate::bench;
use crate::document::{Certificate, CertificateDocument, Parameters};
use crate::error::CliError;
use crate::gen::{self, Distribution};
use crate::io::{self, ClassesJson, InputFile, PointsJson};
use crate::svg;
use crate::verify::{verify, VerifyInput, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "tverberg-nd", version, about = "No-dimensional Tverberg partitions and depth certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partition a point set into parts whose hulls meet a small ball.
    Tverberg(TverbergArgs),
    /// Split color classes into colorful sets whose hulls meet a small ball.
    Colorful(ColorfulArgs),
    /// Common depth certificate for k ≤ d point sets.
    Hamsandwich(HamSandwichArgs),
    /// Re-derive every invariant of a certificate from its input.
    Verify(VerifyArgs),
    /// Write a seeded synthetic dataset.
    Gen(GenArgs),
    /// Time the partitioners over a grid of sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Certificate path (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record wall-clock time in the certificate (makes output non-reproducible).
    #[arg(long)]
    pub record_timing: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    General,
    Balanced,
    NearlyBalanced,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RuleArg {
    ConditionalExpectation,
    UniformAverage,
}

#[derive(Debug, Args)]
pub struct TverbergArgs {
    pub input: PathBuf,
    /// Number of parts.
    #[arg(long)]
    pub k: Option<usize>,
    /// Prescribed part sizes, comma separated; implies general mode.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Arity of the lifting tree in general mode.
    #[arg(long)]
    pub arity: Option<usize>,
    /// Defaults to balanced when k divides n, nearly balanced otherwise.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    pub rule: Option<RuleArg>,
    /// Render the partition (2D input only).
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ColorfulArgs {
    /// JSON file of the form {"classes": [[[x, y, ...], ...], ...]}.
    pub input: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct HamSandwichArgs {
    /// One dataset per point set.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Depth parameter per set, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub m: Vec<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub certificate: PathBuf,
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Also run the hull-distance and planar depth oracles.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "uniform")]
    pub dist: Distribution,
    /// Number of points (ignored with --classes).
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Emit this many color classes of --k points each (JSON).
    #[arg(long, requires = "k")]
    pub classes: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Algo {
    Tverberg,
    Colorful,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value = "tverberg")]
    pub algo: Algo,
    /// Point counts for the tverberg bench (default 2^4 .. 2^18).
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    /// Class sizes for the colorful bench (default 8 .. 128).
    #[arg(long, value_delimiter = ',')]
    pub k_grid: Option<Vec<usize>>,
    #[arg(long, default_value_t = 16)]
    pub k: usize,
    #[arg(long, default_value_t = 16)]
    pub d: usize,
    /// Number of color classes for the colorful bench.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

pub fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Tverberg(a) => cmd_tverberg(a),
        Command::Colorful(a) => cmd_colorful(a),
        Command::Hamsandwich(a) => cmd_hamsandwich(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(mut doc: CertificateDocument, started: Instant, output: &Output) -> Result<(), CliError> {
    if output.record_timing {
        doc.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    write_out(output.out.as_deref(), &doc.to_json())
}

fn cmd_tverberg(a: TverbergArgs) -> anyhow::Result<()> {
    let file = io::read_input(&a.input)?;
    let set = io::parse_points(&file)?;
    let digest = io::digest(std::slice::from_ref(&file));
    let n = set.len();
    let options = PartitionOptions {
        arity: a.arity.unwrap_or(DEFAULT_ARITY),
        rule: match a.rule {
            Some(RuleArg::UniformAverage) => SelectionRule::UniformAverage,
            _ => SelectionRule::ConditionalExpectation,
        },
        ..Default::default()
    };
    let k = match (&a.sizes, a.k) {
        (Some(s), Some(k)) if s.len() != k => {
            return Err(CliError::Infeasible(tverberg_core::Error::InvalidSizes(format!(
                "--k {k} but {} sizes given",
                s.len()
            )))
            .into())
        }
        (Some(s), _) => s.len(),
        (None, Some(k)) => k,
        (None, None) => return Err(CliError::Parse("either --k or --sizes is required".into()).into()),
    };
    let mode = match (a.mode, &a.sizes) {
        (Some(ModeArg::General), _) | (None, Some(_)) => Mode::General,
        (Some(_), Some(_)) => {
            return Err(CliError::Parse("--sizes requires general mode".into()).into());
        }
        (Some(ModeArg::Balanced), None) => Mode::Balanced,
        (Some(ModeArg::NearlyBalanced), None) => Mode::NearlyBalanced,
        (None, None) if k > 0 && n % k == 0 => Mode::Balanced,
        (None, None) => Mode::NearlyBalanced,
    };
    let started = Instant::now();
    let cert = match mode {
        Mode::General => {
            let sizes = match &a.sizes {
                Some(s) => SizeSpec::new(s.clone()),
                None => SizeSpec::nearly_balanced(n, k),
            }
            .map_err(CliError::from)?;
            partition_general(&set, &sizes, &options)
        }
        Mode::Balanced => partition_balanced(&set, k, &options),
        Mode::NearlyBalanced => partition_nearly_balanced(&set, k, &options),
    }
    .map_err(CliError::from)?;
    if let Some(path) = &a.svg {
        let drawing = svg::render_tverberg(&set, &cert).map_err(CliError::from)?;
        write_out(Some(path), &drawing)?;
    }
    let parameters = Parameters {
        mode: Some(mode),
        k: Some(k),
        sizes: a.sizes.clone(),
        arity: (mode == Mode::General).then_some(options.arity),
        rule: a.rule.map(|_| options.rule),
        m: None,
    };
    let doc = CertificateDocument::new(digest, parameters, Certificate::Tverberg(cert));
    Ok(emit(doc, started, &a.output)?)
}

fn cmd_colorful(a: ColorfulArgs) -> anyhow::Result<()> {
    let file = io::read_input(&a.input)?;
    let classes = io::parse_classes(&file)?;
    let digest = io::digest(std::slice::from_ref(&file));
    let inst = ColorInstance::new(classes).map_err(CliError::from)?;
    let started = Instant::now();
    let cert = partition_colorful(&inst, &DiameterPolicy::default()).map_err(CliError::from)?;
    if let Some(path) = &a.svg {
        let drawing = svg::render_colorful(&inst, &cert).map_err(CliError::from)?;
        write_out(Some(path), &drawing)?;
    }
    let parameters = Parameters {
        k: Some(inst.k()),
        ..Default::default()
    };
    let doc = CertificateDocument::new(digest, parameters, Certificate::Colorful(cert));
    Ok(emit(doc, started, &a.output)?)
}

fn cmd_hamsandwich(a: HamSandwichArgs) -> anyhow::Result<()> {
    let files: Vec<InputFile> = a.inputs.iter().map(|p| io::read_input(p)).collect::<Result<_, _>>()?;
    let sets = files.iter().map(io::parse_points).collect::<Result<Vec<_>, _>>()?;
    if a.m.len() != sets.len() {
        return Err(CliError::Parse(format!("{} values for --m, {} input sets", a.m.len(), sets.len())).into());
    }
    let digest = io::digest(&files);
    let started = Instant::now();
    let cert = generalized_ham_sandwich(&sets, &a.m, &DiameterPolicy::default()).map_err(CliError::from)?;
    let parameters = Parameters {
        k: Some(sets.len()),
        m: Some(a.m.clone()),
        ..Default::default()
    };
    let doc = CertificateDocument::new(digest, parameters, Certificate::HamSandwich(cert));
    Ok(emit(doc, started, &a.output)?)
}

fn cmd_verify(a: VerifyArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&a.certificate)
        .map_err(|e| CliError::Parse(format!("{}: {e}", a.certificate.display())))?;
    let doc = CertificateDocument::from_json(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", a.certificate.display())))?;
    let files: Vec<InputFile> = a.inputs.iter().map(|p| io::read_input(p)).collect::<Result<_, _>>()?;
    let found = io::digest(&files);
    if found != doc.input_digest {
        return Err(CliError::DigestMismatch {
            expected: doc.input_digest.clone(),
            found,
        }
        .into());
    }
    let input = match &doc.certificate {
        Certificate::Tverberg(_) => {
            let [file] = files.as_slice() else {
                return Err(CliError::Parse("tverberg certificates take one input".into()).into());
            };
            VerifyInput::Points(io::parse_points(file)?)
        }
        Certificate::Colorful(_) => {
            let [file] = files.as_slice() else {
                return Err(CliError::Parse("colorful certificates take one input".into()).into());
            };
            VerifyInput::Classes(ColorInstance::new(io::parse_classes(file)?).map_err(CliError::from)?)
        }
        Certificate::HamSandwich(_) => {
            VerifyInput::Sets(files.iter().map(io::parse_points).collect::<Result<_, _>>()?)
        }
    };
    let options = VerifyOptions {
        oracle: a.oracle,
        ..Default::default()
    };
    let checks = verify(&doc, &input, &options);
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(CliError::VerifyFailed {
            failed,
            total: checks.len(),
        }
        .into());
    }
    println!("verified: {} checks passed", checks.len());
    Ok(())
}

fn cmd_gen(a: GenArgs) -> anyhow::Result<()> {
    let text = match (a.classes, a.k) {
        (Some(classes), Some(k)) => {
            let doc = ClassesJson {
                classes: gen::classes(a.dist, classes, k, a.d, a.seed),
            };
            serde_json::to_string(&doc).context("serializing classes")? + "\n"
        }
        _ => {
            let rows = gen::points(a.dist, a.n, a.d, a.seed);
            match a.format {
                Format::Csv => io::write_csv(&rows, a.d),
                Format::Json => {
                    let doc = PointsJson {
                        dim: Some(a.d),
                        points: rows,
                    };
                    serde_json::to_string(&doc).context("serializing points")? + "\n"
                }
            }
        }
    };
    Ok(write_out(a.out.as_deref(), &text)?)
}

fn cmd_bench(a: BenchArgs) -> anyhow::Result<()> {
    let report = match a.algo {
        Algo::Tverberg => {
            let grid = a.n_grid.unwrap_or_else(|| (4..=18).map(|e| 1usize << e).collect());
            bench::bench_tverberg(&grid, a.k, a.d, a.reps, a.seed)?
        }
        Algo::Colorful => {
            let grid = a.k_grid.unwrap_or_else(|| vec![8, 16, 32, 64, 128]);
            bench::bench_colorful(&grid, a.n, a.d, a.reps, a.seed)?
        }
    };
    if a.json {
        println!("{}", serde_json::to_string(&report)?);
    } else {
        print!("{report}");
    }
    Ok(())
}
