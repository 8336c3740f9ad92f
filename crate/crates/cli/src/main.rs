//! Command-line driver for the load-count and convergence experiments.

mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rtforest::experiment::{run_bench, run_convergence_1d, run_convergence_2d, synthetic_hdr, uniform_inputs};
use rtforest::families::load_weights;
use rtforest::forest::{depth_stats, read_forest, validate_forest, write_forest};
use rtforest::image::load_image;
use rtforest::sequences::{PointStream, SequenceKind};
use rtforest::{
    build_cdf, BuildMode, Density2D, Family, ForestOptions, Method, Options2D, Pmf, RadixForest,
    Sampler2D,
};

use output::{Format, Table};

#[derive(Parser)]
#[command(name = "rtforest", version, about = "Inverse-CDF sampling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Memory-load statistics (max, avg, avg over groups) per sampler.
    Bench(BenchArgs),
    /// Quadratic density error of alias vs monotone sampling as N doubles.
    Convergence(ConvergenceArgs),
    /// Build a forest and write it in the RTF1 binary format.
    Build(BuildArgs),
    /// Check a serialized forest and report its depth.
    Validate(ValidateArgs),
    /// Draw samples (row, col, u, v) from a 2D density.
    Sample2d(Sample2dArgs),
}

#[derive(Args)]
struct DistArgs {
    /// Family name (pow20, mod32pow25, mod64pow35, spikes4, uniform,
    /// halfsine, geometric) or a text file of weights.
    #[arg(long, default_value = "pow20")]
    dist: String,
    /// Number of intervals for a family.
    #[arg(long, default_value_t = 1024)]
    n: usize,
    /// Guide-table cells; defaults to the number of intervals.
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Sequence {
    Hammersley,
    Prng,
}

#[derive(Args)]
struct StreamArgs {
    /// Number of uniform inputs.
    #[arg(long, default_value_t = 1 << 20)]
    samples: u64,
    /// PRNG seed; ignored for the Hammersley sequence.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Sequence::Prng)]
    sequence: Sequence,
}

impl StreamArgs {
    fn kind(&self) -> SequenceKind {
        match self.sequence {
            Sequence::Hammersley => SequenceKind::Hammersley,
            Sequence::Prng => SequenceKind::Prng { seed: self.seed },
        }
    }
}

#[derive(Args)]
struct OutArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct DensityArgs {
    /// PGM or PFM image.
    #[arg(long, conflicts_with = "synthetic")]
    image: Option<PathBuf>,
    /// Synthetic high-dynamic-range map of the given size, e.g. 64x64.
    #[arg(long)]
    synthetic: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    dist: DistArgs,
    #[command(flatten)]
    stream: StreamArgs,
    /// Comma-separated sampler names.
    #[arg(long, value_delimiter = ',', default_values_t = Method::ALL)]
    samplers: Vec<Method>,
    /// Lanes per group for the group-maximum average.
    #[arg(long, default_value_t = 32)]
    group_size: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[command(flatten)]
    dist: DistArgs,
    #[command(flatten)]
    density: DensityArgs,
    /// Smallest sample count, as a power of two.
    #[arg(long, default_value_t = 14)]
    min_log2: u32,
    /// Largest sample count, as a power of two.
    #[arg(long, default_value_t = 20)]
    max_log2: u32,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    dist: DistArgs,
    /// Skip rebalancing and direct storage of single-interval cells.
    #[arg(long)]
    raw: bool,
    /// Rebalance cells deeper than ceil(log2 k) + slack.
    #[arg(long, conflicts_with = "raw")]
    slack: Option<usize>,
    /// Destination file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Forest file written by `build`.
    path: PathBuf,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct Sample2dArgs {
    #[command(flatten)]
    density: DensityArgs,
    /// Number of points.
    #[arg(long, default_value_t = 1024)]
    samples: u64,
    /// PRNG seed; ignored for the Hammersley sequence.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Sequence::Prng)]
    sequence: Sequence,
    /// Select the column first.
    #[arg(long)]
    transposed: bool,
    /// Guide-table cells of the marginal; defaults to the row count.
    #[arg(long)]
    m_marginal: Option<usize>,
    /// Guide-table cells of each conditional; defaults to the column count.
    #[arg(long)]
    m_row: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

enum Failure {
    /// Bad configuration, input or I/O.
    Config(anyhow::Error),
    /// A forest failed validation.
    Invalid,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

impl From<rtforest::Error> for Failure {
    fn from(e: rtforest::Error) -> Self {
        Failure::Config(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bench(a) => bench(a),
        Command::Convergence(a) => convergence(a),
        Command::Build(a) => build(a),
        Command::Validate(a) => validate(a),
        Command::Sample2d(a) => sample2d(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// The distribution and a label for output rows.
fn load_dist(args: &DistArgs) -> anyhow::Result<(Pmf, String)> {
    if let Ok(family) = args.dist.parse::<Family>() {
        if args.n == 0 {
            bail!("--n must be positive");
        }
        return Ok((family.pmf(args.n)?, family.name().to_owned()));
    }
    let path = Path::new(&args.dist);
    if !path.exists() {
        bail!("'{}' is neither a distribution family nor a file", args.dist);
    }
    let pmf = load_weights(path).with_context(|| format!("reading weights from {}", path.display()))?;
    Ok((pmf, args.dist.clone()))
}

fn load_density(args: &DensityArgs) -> anyhow::Result<Option<Density2D>> {
    if let Some(path) = &args.image {
        return Ok(Some(
            load_image(path).with_context(|| format!("reading image {}", path.display()))?,
        ));
    }
    if let Some(size) = &args.synthetic {
        let (w, h) = size
            .split_once('x')
            .and_then(|(w, h)| Some((w.parse::<usize>().ok()?, h.parse::<usize>().ok()?)))
            .filter(|&(w, h)| w > 0 && h > 0)
            .with_context(|| format!("invalid size '{size}', expected WxH"))?;
        return Ok(Some(synthetic_hdr(w, h)));
    }
    Ok(None)
}

fn emit(table: &Table, out: &OutArgs) -> Result<(), Failure> {
    match &out.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            table.write(out.format, &mut w)?;
            w.flush()?;
        }
        None => table.write(out.format, std::io::stdout().lock())?,
    }
    Ok(())
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    if a.group_size == 0 || !a.stream.samples.is_multiple_of(a.group_size as u64) {
        return Err(anyhow::anyhow!(
            "--samples ({}) must be a multiple of a positive --group-size ({})",
            a.stream.samples,
            a.group_size
        )
        .into());
    }
    let (pmf, label) = load_dist(&a.dist)?;
    let m = a.dist.m.unwrap_or(pmf.len());
    // Inputs are drawn in order before the parallel lookups.
    let xis = uniform_inputs(a.stream.kind(), a.stream.samples);
    let rows = run_bench(&pmf, &a.samplers, Some(m), &xis, a.group_size, BuildMode::Parallel)?;
    let mut table = Table::new(&["method", "distribution", "n", "m", "samples", "max", "avg", "avg32"]);
    for r in rows {
        table.push(vec![
            r.method.name().into(),
            label.clone().into(),
            pmf.len().into(),
            m.into(),
            a.stream.samples.into(),
            r.stats.max.into(),
            r.stats.average.into(),
            r.stats.average_group.into(),
        ]);
    }
    emit(&table, &a.out)
}

fn convergence(a: ConvergenceArgs) -> Result<(), Failure> {
    let rows = match load_density(&a.density)? {
        Some(d) => run_convergence_2d(&d, a.min_log2, a.max_log2, BuildMode::Parallel)?,
        None => {
            let (pmf, _) = load_dist(&a.dist)?;
            run_convergence_1d(&pmf, a.min_log2, a.max_log2, BuildMode::Parallel)?
        }
    };
    let mut table = Table::new(&["N", "e_alias", "e_monotonic"]);
    for r in rows {
        table.push(vec![r.samples.into(), r.e_alias.into(), r.e_monotonic.into()]);
    }
    emit(&table, &a.out)
}

fn build(a: BuildArgs) -> Result<(), Failure> {
    let (pmf, _) = load_dist(&a.dist)?;
    let (cdf, remap) = build_cdf(&pmf).compact();
    if !remap.is_identity() {
        eprintln!(
            "note: {} zero-width intervals dropped; leaf indices refer to the remaining {}",
            pmf.len() - cdf.len(),
            cdf.len()
        );
    }
    let defaults = ForestOptions::default();
    let opts = ForestOptions {
        cells: Some(a.dist.m.unwrap_or(cdf.len())),
        rebalance_slack: if a.raw { None } else { a.slack.or(defaults.rebalance_slack) },
        direct_single_interval_cells: !a.raw,
        ..defaults
    };
    let forest = RadixForest::build(&cdf, opts)?;
    let file = File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut w = BufWriter::new(file);
    write_forest(&forest, &mut w)?;
    w.flush()?;
    Ok(())
}

fn validate(a: ValidateArgs) -> Result<(), Failure> {
    let file = File::open(&a.path).with_context(|| format!("opening {}", a.path.display()))?;
    let forest = read_forest(std::io::BufReader::new(file))
        .with_context(|| format!("reading {}", a.path.display()))?;
    let report = validate_forest(&forest);
    for failure in &report.failures {
        eprintln!("{failure:?}");
    }
    let depth = depth_stats(&forest);
    let mut table = Table::new(&["n", "m", "points_checked", "failures", "max_depth", "ok"]);
    table.push(vec![
        forest.len().into(),
        forest.cells().into(),
        report.points_checked.into(),
        report.failures.len().into(),
        depth.max_depth.into(),
        report.is_ok().into(),
    ]);
    emit(&table, &a.out)?;
    if report.is_ok() {
        Ok(())
    } else {
        Err(Failure::Invalid)
    }
}

fn sample2d(a: Sample2dArgs) -> Result<(), Failure> {
    let Some(d) = load_density(&a.density)? else {
        return Err(anyhow::anyhow!("one of --image or --synthetic is required").into());
    };
    let sampler = Sampler2D::build(
        &d,
        Options2D {
            m_marginal: a.m_marginal,
            m_row: a.m_row,
            transposed: a.transposed,
            ..Options2D::default()
        },
    )?;
    let kind = match a.sequence {
        Sequence::Hammersley => SequenceKind::Hammersley,
        Sequence::Prng => SequenceKind::Prng { seed: a.seed },
    };
    let mut table = Table::new(&["row", "col", "u", "v"]);
    for (x, y) in PointStream::new(kind, a.samples) {
        let s = sampler.sample(x, y);
        table.push(vec![s.row.into(), s.col.into(), s.u.into(), s.v.into()]);
    }
    emit(&table, &a.out)
}
