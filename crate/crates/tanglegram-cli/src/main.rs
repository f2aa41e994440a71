//! Command-line front end: generate instance sets, solve single
//! instances, run benchmarks and render layouts.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tanglegram::bench::{
    records_to_csv, run_algorithm, run_benchmark, summarize, summary_to_csv, Algorithm,
    BenchInstance,
};
use tanglegram::generate::{gen_set, GenConfig, GenSet};
use tanglegram::newick::{load_tanglegram, save_tanglegram};
use tanglegram::recursive::rec_split_bb;
use tanglegram::svg::render_svg_to_file;
use tanglegram::{count_crossings, Orientation, Tanglegram};

#[derive(Parser)]
#[command(
    name = "tanglegram",
    about = "Crossing minimization for binary tanglegrams",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a set of random instances as .tgl files.
    Gen(GenArgs),
    /// Solve one instance file with a chosen algorithm.
    Solve(SolveArgs),
    /// Solve instance batches with several algorithms and emit CSV.
    Bench(BenchArgs),
    /// Render an instance to SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Instance family: A, B, C or D.
    #[arg(long)]
    set: GenSet,
    /// Leaves per tree (power of two for A and B).
    #[arg(long)]
    n: usize,
    /// Number of instances.
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Random seed; identical seeds regenerate identical files.
    #[arg(long)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (.tgl).
    file: PathBuf,
    /// Algorithm to run.
    #[arg(long, default_value = "rec-split-bb")]
    algo: Algorithm,
    /// Time limit in seconds for the exact solver.
    #[arg(long, default_value_t = 600)]
    time_limit: u64,
    /// Also render the computed layout to this SVG file.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of .tgl instance files (alternative to --set).
    #[arg(long, conflicts_with_all = ["set", "n", "count", "seed"])]
    instances: Option<PathBuf>,
    /// Generate instances of this family instead of reading files.
    #[arg(long, requires_all = ["n", "seed"])]
    set: Option<GenSet>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated algorithms (default: the five standard ones).
    #[arg(long, value_delimiter = ',')]
    algos: Vec<Algorithm>,
    /// Per-solve time limit for the exact reference, in seconds.
    #[arg(long, default_value_t = 600)]
    time_limit: u64,
    /// Per-run CSV output path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Summary CSV output path.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    /// Instance file (.tgl).
    file: PathBuf,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
    /// Lay the instance out with this algorithm first (otherwise the
    /// stored drawing is rendered as is).
    #[arg(long)]
    algo: Option<Algorithm>,
    /// Time limit in seconds when --algo is the exact solver.
    #[arg(long, default_value_t = 600)]
    time_limit: u64,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Render(args) => cmd_render(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let config = GenConfig::new(args.set, args.n, args.count, args.seed);
    let instances = gen_set(&config)?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    for (i, t) in instances.iter().enumerate() {
        let name = instance_name(args.set, args.n, i);
        let path = args.out_dir.join(format!("{name}.tgl"));
        save_tanglegram(t, &path).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn instance_name(set: GenSet, n: usize, index: usize) -> String {
    format!("{}-n{}-{:03}", set.name(), n, index)
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let t =
        load_tanglegram(&args.file).with_context(|| format!("loading {}", args.file.display()))?;
    let limit = Duration::from_secs(args.time_limit);
    let warm = warm_start_for(args.algo, &t);
    let (orientation, _, proved) = run_algorithm(args.algo, &t, limit, warm.as_ref());
    let crossings = count_crossings(&t, &orientation)?;
    match proved {
        Some(true) => println!("crossings: {crossings}, optimal: proved"),
        Some(false) => println!("crossings: {crossings}, optimal: unproved (time limit)"),
        None => println!("crossings: {crossings}"),
    }
    if let Some(path) = args.svg {
        render_svg_to_file(&t, &orientation, &path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn warm_start_for(algo: Algorithm, t: &Tanglegram) -> Option<Orientation> {
    matches!(algo, Algorithm::Exact).then(|| rec_split_bb(t).orientation)
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let instances = collect_instances(&args)?;
    if instances.is_empty() {
        bail!("no instances to benchmark");
    }
    let algorithms: Vec<Algorithm> = if args.algos.is_empty() {
        Algorithm::DEFAULT.to_vec()
    } else {
        args.algos.clone()
    };
    let records = run_benchmark(
        &instances,
        &algorithms,
        Duration::from_secs(args.time_limit),
    );
    if let Some(path) = &args.csv {
        fs::write(path, records_to_csv(&records))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let summary = summarize(&records);
    if let Some(path) = &args.summary {
        fs::write(path, summary_to_csv(&summary))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    println!(
        "{:<4} {:>5} {:<20} {:>5} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "set", "n", "algorithm", "runs", "min", "q1", "median", "q3", "max", "mean"
    );
    for row in &summary {
        println!(
            "{:<4} {:>5} {:<20} {:>5} {:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>8.3}",
            row.set,
            row.n,
            row.algorithm,
            row.count,
            row.min,
            row.q1,
            row.median,
            row.q3,
            row.max,
            row.mean
        );
    }
    Ok(())
}

fn collect_instances(args: &BenchArgs) -> Result<Vec<BenchInstance>> {
    if let Some(dir) = &args.instances {
        return load_instance_dir(dir);
    }
    let (Some(set), Some(n), Some(seed)) = (args.set, args.n, args.seed) else {
        bail!("pass either --instances DIR or --set/--n/--seed");
    };
    let config = GenConfig::new(set, n, args.count, seed);
    Ok(gen_set(&config)?
        .into_iter()
        .enumerate()
        .map(|(i, tanglegram)| BenchInstance {
            id: instance_name(set, n, i),
            set: set.name().to_string(),
            n,
            seed,
            tanglegram,
        })
        .collect())
}

fn load_instance_dir(dir: &Path) -> Result<Vec<BenchInstance>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "tgl"))
        .collect();
    paths.sort();
    let mut instances = Vec::with_capacity(paths.len());
    for path in paths {
        let tanglegram =
            load_tanglegram(&path).with_context(|| format!("loading {}", path.display()))?;
        let n = tanglegram.leaf_count();
        instances.push(BenchInstance {
            id: path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            set: "file".to_string(),
            n,
            seed: 0,
            tanglegram,
        });
    }
    Ok(instances)
}

fn cmd_render(args: RenderArgs) -> Result<()> {
    let t =
        load_tanglegram(&args.file).with_context(|| format!("loading {}", args.file.display()))?;
    let orientation = match args.algo {
        Some(algo) => {
            let warm = warm_start_for(algo, &t);
            let limit = Duration::from_secs(args.time_limit);
            run_algorithm(algo, &t, limit, warm.as_ref()).0
        }
        None => Orientation::unflipped(&t),
    };
    let crossings = count_crossings(&t, &orientation)?;
    render_svg_to_file(&t, &orientation, &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("{} ({} crossings)", args.out.display(), crossings);
    Ok(())
}
